//! Magic simplices: Bell-diagonal 2⊗2 states, the Weyl-generated 3⊗3 simplex,
//! its line structure, and grid scans of three-parameter families.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::bases;
use crate::criteria::{self, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Subsystem};
use crate::states::{self, Bell, DensityMatrix, PureState};
use crate::tol::Tolerances;

const WEIGHT_SUM: f64 = 1e-12;
const WEIGHT_NEGATIVE: f64 = -1e-12;

fn check_sum(sum: f64) -> Result<()> {
    if (sum - 1.0).abs() > WEIGHT_SUM {
        return Err(Error::OutOfRange {
            name: "weight sum",
            value: sum,
            range: "1",
        });
    }
    Ok(())
}

/// Weights over the Bell projectors in the order (Ψ+, Ψ−, Φ+, Φ−).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexPoint2x2 {
    pub weights: [f64; 4],
}

impl SimplexPoint2x2 {
    pub fn new(weights: [f64; 4]) -> Result<Self> {
        check_sum(weights.iter().sum())?;
        Ok(Self { weights })
    }

    pub fn is_valid(&self) -> bool {
        self.weights.iter().all(|&w| w >= WEIGHT_NEGATIVE)
    }

    /// Membership in the octahedron `max aᵢ ≤ 1/2`.
    pub fn in_octahedron(&self) -> bool {
        self.weights.iter().all(|&w| w <= 0.5 + 1e-10)
    }
}

/// `Σ aᵢ·(Bell projector i)`, or `None` for pseudomixtures with a negative weight.
pub fn bell_diagonal(p: &SimplexPoint2x2) -> Option<DensityMatrix> {
    if !p.is_valid() {
        return None;
    }
    let mut m = ComplexMatrix::zeros(4, 4);
    for (w, b) in p.weights.iter().zip(Bell::ALL) {
        m += states::bell_projector(b).scale(*w);
    }
    DensityMatrix::new(m, 2, 2).ok()
}

/// Weights `c[k][l]` over the projectors `P_{k,l}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexPoint3x3 {
    pub weights: [[f64; 3]; 3],
}

impl SimplexPoint3x3 {
    pub fn new(weights: [[f64; 3]; 3]) -> Result<Self> {
        check_sum(weights.iter().flatten().sum())?;
        Ok(Self { weights })
    }
}

fn check_index(k: usize, l: usize) -> Result<()> {
    for idx in [k, l] {
        if idx > 2 {
            return Err(Error::IndexOutOfRange {
                what: "simplex index",
                index: idx,
                limit: 2,
            });
        }
    }
    Ok(())
}

/// `|Ω_{k,l}⟩ = (W_{k,l}⊗I)|Ω_{0,0}⟩` with `|Ω_{0,0}⟩ = Σ|ii⟩/√3`.
pub fn omega3(k: usize, l: usize) -> Result<PureState> {
    check_index(k, l)?;
    let w = bases::weyl(3, k, l)?;
    let omega = states::max_entangled(3)?;
    PureState::new(linalg::tensor(&w, &linalg::identity(3)) * omega.amplitudes(), 3, 3)
}

/// `P_{k,l} = |Ω_{k,l}⟩⟨Ω_{k,l}|`.
pub fn projector3(k: usize, l: usize) -> Result<ComplexMatrix> {
    Ok(omega3(k, l)?.projector())
}

fn projectors3() -> Vec<ComplexMatrix> {
    (0..9)
        .map(|i| projector3(i / 3, i % 3).expect("indices in range"))
        .collect()
}

/// `Σ c_{k,l} P_{k,l}`, or `None` when the pseudomixture is not positive.
pub fn simplex3_state(c: &SimplexPoint3x3) -> Option<DensityMatrix> {
    let mut m = ComplexMatrix::zeros(9, 9);
    for (i, p) in projectors3().iter().enumerate() {
        m += p.scale(c.weights[i / 3][i % 3]);
    }
    DensityMatrix::new(m, 3, 3).ok()
}

/// Hilbert-Schmidt projection onto `span{P_{k,l}}`; the projectors are orthonormal.
pub fn project_onto_simplex_span(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(9, 9);
    for p in projectors3() {
        out += p.scale(linalg::trace_product(&p, m).re);
    }
    out
}

/// Three points of the 3×3 phase space lying on an affine line mod 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Line3x3 {
    pub points: [(usize, usize); 3],
}

/// Whether three points are pairwise distinct and collinear mod 3.
pub fn collinear(points: &[(usize, usize); 3]) -> bool {
    let [p, q, r] = *points;
    if p == q || q == r || p == r {
        return false;
    }
    // the third point on the line through p and q is 2q − p
    r == ((2 * q.0 + 3 - p.0) % 3, (2 * q.1 + 3 - p.1) % 3)
}

impl Line3x3 {
    pub fn new(points: [(usize, usize); 3]) -> Result<Self> {
        for (k, l) in points {
            check_index(k, l)?;
        }
        if !collinear(&points) {
            return Err(Error::NotALine);
        }
        Ok(Self { points })
    }

    pub fn contains(&self, p: (usize, usize)) -> bool {
        self.points.contains(&p)
    }
}

impl fmt::Display for Line3x3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.points;
        write!(f, "({},{}) ({},{}) ({},{})", a.0, a.1, b.0, b.1, c.0, c.1)
    }
}

/// The 12 lines: directions (1,0), (0,1), (1,1), (1,2), three offsets each.
pub fn lines3() -> Vec<Line3x3> {
    let directions = [(1, 0), (0, 1), (1, 1), (1, 2)];
    let mut out = Vec::with_capacity(12);
    for (dk, dl) in directions {
        let mut seen: Vec<[(usize, usize); 3]> = Vec::new();
        for k0 in 0..3 {
            for l0 in 0..3 {
                let mut pts = [0, 1, 2].map(|t| ((k0 + t * dk) % 3, (l0 + t * dl) % 3));
                pts.sort();
                if !seen.contains(&pts) {
                    seen.push(pts);
                }
            }
        }
        out.extend(seen.into_iter().map(|points| Line3x3 { points }));
    }
    out
}

/// `(1/3) Σ_{(k,l)∈line} P_{k,l}`.
pub fn sigma_out(line: &Line3x3) -> DensityMatrix {
    let mut m = ComplexMatrix::zeros(9, 9);
    for (k, l) in line.points {
        m += projector3(k, l).expect("validated line").scale(1.0 / 3.0);
    }
    DensityMatrix::new(m, 3, 3).expect("mixture of projectors")
}

/// `((1−α−β−γ)/9)·I + α P₁ + β P₂ + γ P₃`, `None` when not positive.
fn family_state(params: [f64; 3], points: &[(usize, usize); 3], tols: &Tolerances) -> Option<DensityMatrix> {
    let [a, b, g] = params;
    let mut m = linalg::identity(9).scale((1.0 - a - b - g) / 9.0);
    for (w, (k, l)) in params.iter().zip(points) {
        m += projector3(*k, *l).expect("validated points").scale(*w);
    }
    DensityMatrix::with_tolerances(m, 3, 3, tols).ok()
}

/// The three-parameter family over the points of a line.
pub fn family_line(alpha: f64, beta: f64, gamma: f64, line: &Line3x3) -> Option<DensityMatrix> {
    family_state([alpha, beta, gamma], &line.points, &Tolerances::default())
}

/// The three-parameter family over three points not on a common line.
pub fn family_offline(
    alpha: f64,
    beta: f64,
    gamma: f64,
    points: [(usize, usize); 3],
) -> Result<Option<DensityMatrix>> {
    Family::offline(points)?;
    Ok(family_state([alpha, beta, gamma], &points, &Tolerances::default()))
}

/// Which three vertices a scanned family mixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Line(Line3x3),
    Offline([(usize, usize); 3]),
}

impl Family {
    pub fn offline(points: [(usize, usize); 3]) -> Result<Self> {
        for (k, l) in points {
            check_index(k, l)?;
        }
        let [p, q, r] = points;
        if p == q || q == r || p == r || collinear(&points) {
            return Err(Error::Collinear);
        }
        Ok(Family::Offline(points))
    }

    /// `P_{0,0}, P_{1,0}, P_{2,0}`.
    pub fn default_line() -> Self {
        Family::Line(Line3x3 {
            points: [(0, 0), (1, 0), (2, 0)],
        })
    }

    /// `P_{1,0}, P_{2,0}, P_{1,1}`.
    pub fn default_offline() -> Self {
        Family::Offline([(1, 0), (2, 0), (1, 1)])
    }

    pub fn points(&self) -> [(usize, usize); 3] {
        match self {
            Family::Line(l) => l.points,
            Family::Offline(p) => *p,
        }
    }

    pub fn state(&self, params: [f64; 3], tols: &Tolerances) -> Option<DensityMatrix> {
        family_state(params, &self.points(), tols)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slice {
    /// Two-dimensional `(α, β)` grid at the given `γ`.
    FixedGamma(f64),
    /// Full `(α, β, γ)` grid.
    Full,
}

/// A scan over a regular grid of `grid` points per axis spanning `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub family: Family,
    pub grid: usize,
    pub lo: f64,
    pub hi: f64,
    pub slice: Slice,
}

impl ScanSpec {
    /// Parameter tuples in lexicographic order.
    pub fn params(&self) -> Result<Vec<[f64; 3]>> {
        if self.grid < 2 {
            return Err(Error::OutOfRange {
                name: "grid",
                value: self.grid as f64,
                range: "grid >= 2",
            });
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::OutOfRange {
                name: "scan range",
                value: self.hi - self.lo,
                range: "lo < hi",
            });
        }
        let n = self.grid;
        let axis: Vec<f64> = (0..n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
            .collect();
        let mut out = Vec::new();
        for &a in &axis {
            for &b in &axis {
                match self.slice {
                    Slice::FixedGamma(g) => out.push([a, b, g]),
                    Slice::Full => out.extend(axis.iter().map(|&g| [a, b, g])),
                }
            }
        }
        Ok(out)
    }
}

/// Criteria evaluated at one grid point; criterion fields are `None` off the state space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionCell {
    pub params: [f64; 3],
    pub is_state: bool,
    pub is_ppt: Option<bool>,
    pub ccn_value: Option<f64>,
    pub ccn_flag: Option<bool>,
    pub verdict: Option<Verdict>,
}

impl RegionCell {
    pub fn is_bound_entangled_candidate(&self) -> bool {
        self.is_ppt == Some(true) && self.ccn_flag == Some(true)
    }
}

fn evaluate(family: &Family, params: [f64; 3], tols: &Tolerances) -> RegionCell {
    match family.state(params, tols) {
        None => RegionCell {
            params,
            is_state: false,
            is_ppt: None,
            ccn_value: None,
            ccn_flag: None,
            verdict: None,
        },
        Some(rho) => {
            let r = criteria::classify_with(&rho, tols);
            RegionCell {
                params,
                is_state: true,
                is_ppt: Some(r.ppt),
                ccn_value: Some(r.ccn_value),
                ccn_flag: Some(r.ccn_flag),
                verdict: Some(r.verdict),
            }
        }
    }
}

/// Evaluate every grid cell in parallel; the output keeps the grid order.
pub fn scan_region(spec: &ScanSpec, tols: &Tolerances) -> Result<Vec<RegionCell>> {
    let params = spec.params()?;
    Ok(params
        .into_par_iter()
        .map(|p| evaluate(&spec.family, p, tols))
        .collect())
}

/// CSV with columns `alpha,beta,gamma,is_state,is_ppt,ccn_value,ccn_flag,verdict`.
pub fn cells_to_csv(cells: &[RegionCell]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record([
        "alpha", "beta", "gamma", "is_state", "is_ppt", "ccn_value", "ccn_flag", "verdict",
    ])
    .map_err(csv_err)?;
    let opt = |x: Option<String>| x.unwrap_or_default();
    for c in cells {
        w.write_record([
            c.params[0].to_string(),
            c.params[1].to_string(),
            c.params[2].to_string(),
            c.is_state.to_string(),
            opt(c.is_ppt.map(|b| b.to_string())),
            opt(c.ccn_value.map(|v| v.to_string())),
            opt(c.ccn_flag.map(|b| b.to_string())),
            opt(c.verdict.map(|v| v.as_str().to_string())),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// Smallest `α ∈ [0, 1]` at which `family(α, 0, 0)` becomes NPT, by bisection.
pub fn npt_onset_alpha(family: &Family) -> f64 {
    let points = family.points();
    let min_pt = |a: f64| {
        let mut m = linalg::identity(9).scale((1.0 - a) / 9.0);
        m += projector3(points[0].0, points[0].1).expect("validated").scale(a);
        linalg::min_eigenvalue(&linalg::partial_transpose(&m, 3, 3, Subsystem::A).expect("9x9"))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if min_pt(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
