//! Entanglement and mixedness measures. Entropies are in bits (ebits).

use std::fmt;
use std::str::FromStr;

use nalgebra::Schur;
use serde::Serialize;

use crate::bases;
use crate::criteria;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, Subsystem};
use crate::states::{self, DensityMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Ebits,
    Dimensionless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Optimization,
    Bisection,
}

/// A named measure value with its units and how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureResult {
    pub name: String,
    pub value: f64,
    pub units: Units,
    pub method: Method,
    /// True when the value is only a lower bound on the quantity named.
    pub lower_bound: bool,
}

/// The measures that can be requested by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    LinearEntropy,
    VonNeumannEntropy,
    Concurrence,
    EntanglementOfFormation,
    Negativity,
    NegativityNormalized,
    FullyEntangledFraction,
    RandomRobustness,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 8] = [
        MeasureKind::LinearEntropy,
        MeasureKind::VonNeumannEntropy,
        MeasureKind::Concurrence,
        MeasureKind::EntanglementOfFormation,
        MeasureKind::Negativity,
        MeasureKind::NegativityNormalized,
        MeasureKind::FullyEntangledFraction,
        MeasureKind::RandomRobustness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::LinearEntropy => "linear-entropy",
            MeasureKind::VonNeumannEntropy => "entropy",
            MeasureKind::Concurrence => "concurrence",
            MeasureKind::EntanglementOfFormation => "eof",
            MeasureKind::Negativity => "negativity",
            MeasureKind::NegativityNormalized => "negativity-normalized",
            MeasureKind::FullyEntangledFraction => "fef",
            MeasureKind::RandomRobustness => "robustness",
        }
    }

    /// Whether the measure is only defined for two qubits.
    pub fn two_qubit_only(self) -> bool {
        matches!(
            self,
            MeasureKind::Concurrence | MeasureKind::EntanglementOfFormation
        )
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown measure '{s}'")))
    }
}

/// Evaluate one named measure on `rho`.
pub fn measure(kind: MeasureKind, rho: &DensityMatrix, seed: u64) -> Result<MeasureResult> {
    let closed = |value: f64, units: Units| MeasureResult {
        name: kind.name().to_string(),
        value,
        units,
        method: Method::ClosedForm,
        lower_bound: false,
    };
    Ok(match kind {
        MeasureKind::LinearEntropy => closed(linear_entropy(rho)?, Units::Dimensionless),
        MeasureKind::VonNeumannEntropy => closed(von_neumann_entropy(rho), Units::Ebits),
        MeasureKind::Concurrence => closed(concurrence_2q(rho)?, Units::Dimensionless),
        MeasureKind::EntanglementOfFormation => closed(eof_2q(rho)?, Units::Ebits),
        MeasureKind::Negativity => closed(negativity(rho), Units::Dimensionless),
        MeasureKind::NegativityNormalized => closed(negativity_normalized(rho), Units::Dimensionless),
        MeasureKind::FullyEntangledFraction => MeasureResult {
            method: Method::Optimization,
            ..closed(
                FefSearch::with_seed(seed).maximize(rho)?,
                Units::Dimensionless,
            )
        },
        MeasureKind::RandomRobustness => {
            let r = random_robustness(rho);
            MeasureResult {
                method: Method::Bisection,
                lower_bound: !r.exact,
                ..closed(r.value, Units::Dimensionless)
            }
        }
    })
}

/// `(d/(d−1))(1 − tr ρ²)` with `d` the total dimension.
pub fn linear_entropy(rho: &DensityMatrix) -> Result<f64> {
    let d = rho.dim();
    if d < 2 {
        return Err(Error::UnsupportedDimensions {
            required: "total dimension at least 2",
            d1: rho.dims().0,
            d2: rho.dims().1,
        });
    }
    let d = d as f64;
    Ok(d / (d - 1.0) * (1.0 - rho.purity()))
}

/// `−Σ λ log₂ λ` over a probability vector, with `0·log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    let h: f64 = p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum();
    h.max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.spectrum())
}

/// Entropies of the two reduced states of `psi`.
pub fn reduced_entropies(psi: &PureState) -> (f64, f64) {
    let rho = states::from_pure(psi);
    (
        von_neumann_entropy(&rho.reduced(Subsystem::A)),
        von_neumann_entropy(&rho.reduced(Subsystem::B)),
    )
}

/// Entropy of entanglement of a pure state.
pub fn pure_entanglement(psi: &PureState) -> f64 {
    reduced_entropies(psi).0
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    let (d1, d2) = rho.dims();
    if (d1, d2) != (2, 2) {
        return Err(Error::UnsupportedDimensions {
            required: "2x2",
            d1,
            d2,
        });
    }
    Ok(())
}

/// `(σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn spin_flip(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    require_two_qubits(rho)?;
    let y = bases::pauli(2)?;
    let yy = linalg::tensor(&y, &y);
    Ok(&yy * rho.matrix().conjugate() * &yy)
}

/// Eigenvalues of `ρ ρ̃` below this are round-off and are set to zero before
/// the square root.
const ROUND_OFF: f64 = 1e-14;

/// Square roots of the eigenvalues of `ρ ρ̃`, sorted descending.
pub fn concurrence_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let tilde = spin_flip(rho)?;
    let product = rho.matrix() * &tilde;
    let eigen: Vec<f64> = match Schur::try_new(product, 1e-15, 10_000).and_then(|s| s.eigenvalues()) {
        Some(values) => values.iter().map(|z| z.re).collect(),
        None => {
            // same spectrum via the Hermitian route √ρ ρ̃ √ρ
            let s = linalg::sqrt_psd(rho.matrix())?;
            linalg::eigenvalues_hermitian(&linalg::hermitian_part(&(&s * &tilde * &s)))
        }
    };
    let mut lambdas: Vec<f64> = eigen
        .into_iter()
        .map(|x| if x > ROUND_OFF { x.sqrt() } else { 0.0 })
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok([lambdas[0], lambdas[1], lambdas[2], lambdas[3]])
}

/// `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
pub fn concurrence_2q(rho: &DensityMatrix) -> Result<f64> {
    let l = concurrence_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// `h(x) = −x log₂x − (1−x) log₂(1−x)`.
pub fn binary_entropy(x: f64) -> f64 {
    shannon_entropy(&[x, 1.0 - x])
}

pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

pub fn eof_2q(rho: &DensityMatrix) -> Result<f64> {
    Ok(eof_from_concurrence(concurrence_2q(rho)?))
}

/// `(‖ρ^{T_A}‖₁ − 1)/2`.
pub fn negativity(rho: &DensityMatrix) -> f64 {
    let pt = rho.partial_transpose(Subsystem::A);
    let norm: f64 = linalg::eigenvalues_hermitian(&pt).iter().map(|x| x.abs()).sum();
    ((norm - 1.0) / 2.0).max(0.0)
}

/// Negativity divided by `min(d1, d2) − 1`, so that maximally entangled states score 1/2.
pub fn negativity_normalized(rho: &DensityMatrix) -> f64 {
    let (d1, d2) = rho.dims();
    let m = d1.min(d2);
    if m < 2 {
        return 0.0;
    }
    negativity(rho) / (m - 1) as f64
}

/// Multi-start polar-update ascent for the fully entangled fraction.
///
/// With `|Ψ_U⟩ = (U⊗I)|Ω⟩` the overlap is `(1/d) vec(U)† ρ vec(U)`, a convex
/// quadratic in `U`; replacing `U` by the unitary polar factor of `ρ vec(U)`
/// never decreases it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FefSearch {
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tolerance: f64,
}

impl Default for FefSearch {
    fn default() -> Self {
        Self {
            starts: 16,
            seed: 0,
            max_iter: 2000,
            tolerance: 1e-14,
        }
    }
}

impl FefSearch {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn maximize(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(self.maximize_with_unitary(rho)?.0)
    }

    /// The best overlap and the unitary achieving it.
    pub fn maximize_with_unitary(&self, rho: &DensityMatrix) -> Result<(f64, ComplexMatrix)> {
        let (d1, d2) = rho.dims();
        if d1 != d2 {
            return Err(Error::UnsupportedDimensions {
                required: "equal subsystem dimensions",
                d1,
                d2,
            });
        }
        let d = d1;
        let mut rng = states::rng_from_seed(self.seed);
        let mut best = (f64::NEG_INFINITY, linalg::identity(d));
        for s in 0..self.starts.max(1) {
            let start = if s == 0 {
                linalg::identity(d)
            } else {
                states::random_unitary(d, &mut rng)
            };
            let cand = self.ascend(rho.matrix(), d, start);
            if cand.0 > best.0 {
                best = cand;
            }
        }
        Ok(best)
    }

    fn ascend(&self, rho: &ComplexMatrix, d: usize, mut u: ComplexMatrix) -> (f64, ComplexMatrix) {
        let mut value = overlap(rho, d, &u);
        for _ in 0..self.max_iter {
            let g = rho * vec_rows(&u);
            let next = linalg::polar_unitary(&ComplexMatrix::from_fn(d, d, |i, k| g[i * d + k]));
            let next_value = overlap(rho, d, &next);
            if next_value < value + self.tolerance {
                if next_value > value {
                    return (next_value, next);
                }
                break;
            }
            u = next;
            value = next_value;
        }
        (value, u)
    }
}

fn vec_rows(u: &ComplexMatrix) -> ComplexVector {
    let d = u.nrows();
    ComplexVector::from_fn(d * d, |r, _| u[(r / d, r % d)])
}

/// `⟨Ψ_U|ρ|Ψ_U⟩` with `|Ψ_U⟩ = (U⊗I)|Ω⟩`.
fn overlap(rho: &ComplexMatrix, d: usize, u: &ComplexMatrix) -> f64 {
    linalg::expectation(rho, &vec_rows(u)) / d as f64
}

/// Maximal overlap with a maximally entangled state, default search settings.
pub fn fully_entangled_fraction(rho: &DensityMatrix) -> Result<f64> {
    FefSearch::default().maximize(rho)
}

/// The normalized maximally entangled state `(U⊗I)|Ω⟩`.
pub fn maximally_entangled_from(u: &ComplexMatrix) -> Result<PureState> {
    let d = u.nrows();
    let v = vec_rows(u).unscale((d as f64).sqrt());
    PureState::new(v, d, d)
}

/// Random robustness value; `exact` is false where PPT is not equivalent to
/// separability, in which case `value` is a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Robustness {
    pub value: f64,
    pub exact: bool,
}

/// Width of the final bisection interval.
pub const ROBUSTNESS_WIDTH: f64 = 1e-9;

/// Smallest `s ≥ 0` such that `(ρ + s·I/d)/(1+s)` is PPT.
pub fn random_robustness(rho: &DensityMatrix) -> Robustness {
    let (d1, d2) = rho.dims();
    let exact = d1 * d2 <= 6;
    if criteria::is_ppt(rho).0 {
        return Robustness { value: 0.0, exact };
    }
    let d = rho.dim();
    let pt = rho.partial_transpose(Subsystem::A);
    let noise = linalg::identity(d).scale(1.0 / d as f64);
    // the normalization 1/(1+s) does not change the sign of the spectrum
    let ppt_at = |s: f64| linalg::min_eigenvalue(&(&pt + noise.scale(s))) >= 0.0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while !ppt_at(hi) {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > ROBUSTNESS_WIDTH {
        let mid = 0.5 * (lo + hi);
        if ppt_at(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Robustness { value: hi, exact }
}

/// Mixture `(ρ + s·I/d)/(1+s)`.
pub fn noisy(rho: &DensityMatrix, s: f64) -> Result<DensityMatrix> {
    let (d1, d2) = rho.dims();
    let mixed = DensityMatrix::maximally_mixed(d1, d2);
    DensityMatrix::mixture(&[(1.0 / (1.0 + s), rho), (s / (1.0 + s), &mixed)])
}
