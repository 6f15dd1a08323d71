//! CHSH and CGLMP Bell quantities, Bell-operator and Jamiolkowski witnesses,
//! and local filtering.

use std::str::FromStr;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::bases;
use crate::error::{Error, Result};
use crate::geometry::Witness;
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::states::DensityMatrix;
use crate::tol;

/// Measurement directions for the two CHSH settings on each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshSettings {
    pub a1: [f64; 3],
    pub a2: [f64; 3],
    pub b1: [f64; 3],
    pub b2: [f64; 3],
}

fn check_unit(v: &[f64; 3]) -> Result<()> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !n.is_finite() || (n - 1.0).abs() > tol::NORM {
        return Err(Error::NotUnitVector { norm: n });
    }
    Ok(())
}

impl ChshSettings {
    pub fn new(a1: [f64; 3], a2: [f64; 3], b1: [f64; 3], b2: [f64; 3]) -> Result<Self> {
        let s = Self { a1, a2, b1, b2 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for v in [&self.a1, &self.a2, &self.b1, &self.b2] {
            check_unit(v)?;
        }
        Ok(())
    }

    /// Settings reaching `2√2` on the singlet, all in the x–z plane.
    pub fn planar_optimal() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a1: [0.0, 0.0, 1.0],
            a2: [1.0, 0.0, 0.0],
            b1: [r, 0.0, r],
            b2: [r, 0.0, -r],
        }
    }
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

/// `E(a,b) = tr(ρ (a·σ)⊗(b·σ))`.
pub fn correlation(rho: &DensityMatrix, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let op = linalg::tensor(&bases::pauli_dot(a), &bases::pauli_dot(b));
    linalg::trace_product(rho.matrix(), &op).re
}

/// `|E(a₁,b₁) − E(a₁,b₂)| + |E(a₂,b₂) + E(a₂,b₁)|`.
pub fn chsh_value(rho: &DensityMatrix, s: &ChshSettings) -> Result<f64> {
    require_two_qubits(rho)?;
    s.validate()?;
    let e = |a, b| correlation(rho, a, b);
    Ok((e(&s.a1, &s.b1) - e(&s.a1, &s.b2)).abs() + (e(&s.a2, &s.b2) + e(&s.a2, &s.b1)).abs())
}

/// The CHSH combination without absolute values.
pub fn chsh_signed(rho: &DensityMatrix, s: &ChshSettings) -> Result<f64> {
    require_two_qubits(rho)?;
    s.validate()?;
    let e = |a, b| correlation(rho, a, b);
    Ok(e(&s.a1, &s.b1) - e(&s.a1, &s.b2) + e(&s.a2, &s.b2) + e(&s.a2, &s.b1))
}

fn t_matrix(rho: &DensityMatrix) -> Result<Matrix3<f64>> {
    Ok(bases::correlation_tensor(rho)?.t_matrix())
}

fn unit_or(v: Vector3<f64>, fallback: Vector3<f64>) -> Vector3<f64> {
    let n = v.norm();
    if n > 1e-12 { v / n } else { fallback }
}

fn any_orthogonal(v: &Vector3<f64>) -> Vector3<f64> {
    let trial = if v.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    (trial - v * v.dot(&trial)).normalize()
}

/// `2√(u₁+u₂)` with `u₁ ≥ u₂` the two largest eigenvalues of `TᵀT`.
pub fn chsh_max(rho: &DensityMatrix) -> Result<f64> {
    Ok(chsh_optimal(rho)?.0)
}

/// The maximal CHSH value together with settings attaining it.
pub fn chsh_optimal(rho: &DensityMatrix) -> Result<(f64, ChshSettings)> {
    require_two_qubits(rho)?;
    let t = t_matrix(rho)?;
    let eig = SymmetricEigen::new(t.transpose() * t);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let u1 = eig.eigenvalues[order[0]].max(0.0);
    let u2 = eig.eigenvalues[order[1]].max(0.0);
    let c1: Vector3<f64> = eig.eigenvectors.column(order[0]).into();
    let c2: Vector3<f64> = eig.eigenvectors.column(order[1]).into();
    let theta = if u1 > 0.0 { (u2 / u1).sqrt().atan() } else { std::f64::consts::FRAC_PI_4 };
    let (sin, cos) = theta.sin_cos();
    let b1 = c1 * cos + c2 * sin;
    let b2 = -c1 * cos + c2 * sin;
    let a1 = unit_or(t * c1, Vector3::z());
    let a2 = unit_or(t * c2, any_orthogonal(&a1));
    let arr = |v: Vector3<f64>| [v.x, v.y, v.z];
    let s = ChshSettings {
        a1: arr(a1),
        a2: arr(a2),
        b1: arr(b1),
        b2: arr(b2),
    };
    Ok((2.0 * (u1 + u2).sqrt(), s))
}

/// `a₁·σ ⊗ (b₁+b₂)·σ + a₂·σ ⊗ (b₁−b₂)·σ`.
pub fn bell_operator_chsh(s: &ChshSettings) -> Result<ComplexMatrix> {
    s.validate()?;
    let sum = [s.b1[0] + s.b2[0], s.b1[1] + s.b2[1], s.b1[2] + s.b2[2]];
    let diff = [s.b1[0] - s.b2[0], s.b1[1] - s.b2[1], s.b1[2] - s.b2[2]];
    Ok(linalg::tensor(&bases::pauli_dot(&s.a1), &bases::pauli_dot(&sum))
        + linalg::tensor(&bases::pauli_dot(&s.a2), &bases::pauli_dot(&diff)))
}

/// `W = 2·I − B`, verified by product-state minimization.
pub fn witness_from_bell(b: &ComplexMatrix) -> Result<Witness> {
    linalg::check_hermitian(b)?;
    if b.nrows() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: b.nrows(),
        });
    }
    let w = linalg::identity(4).scale(2.0) - b;
    Ok(Witness::new(w, 2, 2)?.verify())
}

/// Positive but not completely positive maps available for witness construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositiveMap {
    Transposition,
}

impl FromStr for PositiveMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transposition" | "transpose" => Ok(PositiveMap::Transposition),
            other => Err(Error::UnsupportedMap(other.to_string())),
        }
    }
}

/// `(Λ⊗I)(|Ω⟩⟨Ω|)` for the maximally entangled `|Ω⟩ = Σ|ii⟩/√d`.
///
/// For the transposition this is `SWAP/d`, negative on antisymmetric states.
pub fn jamiolkowski_witness(map: PositiveMap, d: usize) -> Result<Witness> {
    if d < 2 {
        return Err(Error::OutOfRange {
            name: "d",
            value: d as f64,
            range: "d >= 2",
        });
    }
    let omega = crate::states::from_pure(&crate::states::max_entangled(d)?);
    let op = match map {
        PositiveMap::Transposition => omega.partial_transpose(linalg::Subsystem::A),
    };
    Ok(Witness::new(op, d, d)?.verify())
}

/// Outcome probabilities `p[i][j][a][b]` for Alice setting `i`, Bob setting `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityTable {
    pub d: usize,
    pub p: [[Vec<Vec<f64>>; 2]; 2],
}

const TABLE_SUM: f64 = 1e-9;
const TABLE_NEGATIVE: f64 = -1e-12;

impl ProbabilityTable {
    pub fn new(d: usize, p: [[Vec<Vec<f64>>; 2]; 2]) -> Result<Self> {
        for (i, row) in p.iter().enumerate() {
            for (j, block) in row.iter().enumerate() {
                if block.len() != d || block.iter().any(|r| r.len() != d) {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: block.len(),
                    });
                }
                let mut sum = 0.0;
                for &x in block.iter().flatten() {
                    if !x.is_finite() || x < TABLE_NEGATIVE {
                        return Err(Error::OutOfRange {
                            name: "probability",
                            value: x,
                            range: "[0, 1]",
                        });
                    }
                    sum += x;
                }
                if (sum - 1.0).abs() > TABLE_SUM {
                    return Err(Error::TableNormalization { i, j, sum });
                }
            }
        }
        Ok(Self { d, p })
    }

    pub fn uniform(d: usize) -> Self {
        let block = vec![vec![1.0 / (d * d) as f64; d]; d];
        Self {
            d,
            p: [[block.clone(), block.clone()], [block.clone(), block]],
        }
    }

    /// The table of a deterministic local strategy with outcomes `a[i]`, `b[j]`.
    pub fn deterministic(d: usize, a: [usize; 2], b: [usize; 2]) -> Self {
        let block = |x: usize, y: usize| {
            let mut m = vec![vec![0.0; d]; d];
            m[x % d][y % d] = 1.0;
            m
        };
        Self {
            d,
            p: [
                [block(a[0], b[0]), block(a[0], b[1])],
                [block(a[1], b[0]), block(a[1], b[1])],
            ],
        }
    }

    /// `P(A_i = B_j + k mod d)`.
    fn a_equals_b_plus(&self, i: usize, j: usize, k: isize) -> f64 {
        let d = self.d as isize;
        (0..d)
            .map(|b| self.p[i][j][((b + k).rem_euclid(d)) as usize][b as usize])
            .sum()
    }

    /// `P(B_j = A_i + k mod d)`.
    fn b_equals_a_plus(&self, i: usize, j: usize, k: isize) -> f64 {
        let d = self.d as isize;
        (0..d)
            .map(|a| self.p[i][j][a as usize][((a + k).rem_euclid(d)) as usize])
            .sum()
    }
}

/// Check that the columns of `u` form an orthonormal basis.
fn check_orthonormal(u: &ComplexMatrix, d: usize) -> Result<()> {
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: u.nrows(),
        });
    }
    let deviation = (u.adjoint() * u - linalg::identity(d)).norm();
    if deviation > tol::NORM {
        return Err(Error::NotOrthonormal { deviation });
    }
    Ok(())
}

/// Outcome probabilities for projective measurements in the given bases.
/// Column `a` of `bases_a[i]` is the vector for outcome `a` of Alice's setting `i`.
pub fn probability_table(
    rho: &DensityMatrix,
    bases_a: &[ComplexMatrix; 2],
    bases_b: &[ComplexMatrix; 2],
) -> Result<ProbabilityTable> {
    let (d1, d2) = rho.dims();
    if d1 != d2 {
        return Err(Error::UnsupportedDimensions {
            required: "equal subsystem dimensions",
            d1,
            d2,
        });
    }
    let d = d1;
    for u in bases_a.iter().chain(bases_b) {
        check_orthonormal(u, d)?;
    }
    let block = |i: usize, j: usize| {
        let mut m = vec![vec![0.0; d]; d];
        for (a, row) in m.iter_mut().enumerate() {
            let va: ComplexVector = bases_a[i].column(a).into();
            for (b, cell) in row.iter_mut().enumerate() {
                let vb: ComplexVector = bases_b[j].column(b).into();
                *cell = linalg::expectation(rho.matrix(), &linalg::tensor_vec(&va, &vb)).max(0.0);
            }
        }
        let total: f64 = m.iter().flatten().sum();
        for x in m.iter_mut().flatten() {
            *x /= total;
        }
        m
    };
    ProbabilityTable::new(d, [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]])
}

/// Classical bound of [`cglmp_value`] for outcome count `d`.
pub fn cglmp_local_bound(d: usize) -> f64 {
    if d == 2 { 3.0 } else { 2.0 }
}

/// The CGLMP quantity `I_d`.
///
/// For `d = 2` this is the four-term form with local bound 3. For `d > 2` the
/// bracketed differences are weighted by `1 − 2k/(d−1)`, which leaves
/// `d = 3` unchanged and keeps the local bound at 2 for larger `d`.
pub fn cglmp_value(t: &ProbabilityTable) -> f64 {
    let d = t.d;
    if d == 2 {
        return t.a_equals_b_plus(0, 0, 0)
            + t.b_equals_a_plus(1, 0, 1)
            + t.a_equals_b_plus(1, 1, 0)
            + t.b_equals_a_plus(0, 1, 0);
    }
    let mut total = 0.0;
    for k in 0..(d / 2) as isize {
        let weight = 1.0 - 2.0 * k as f64 / (d - 1) as f64;
        let positive = t.a_equals_b_plus(0, 0, k)
            + t.b_equals_a_plus(1, 0, k + 1)
            + t.a_equals_b_plus(1, 1, k)
            + t.b_equals_a_plus(0, 1, k);
        let negative = t.a_equals_b_plus(0, 0, -k - 1)
            + t.b_equals_a_plus(1, 0, -k)
            + t.a_equals_b_plus(1, 1, -k - 1)
            + t.b_equals_a_plus(0, 1, -k - 1);
        total += weight * (positive - negative);
    }
    total
}

/// A pair of local operators applied as `(f_A⊗f_B) ρ (f_A⊗f_B)†`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFilter {
    pub fa: ComplexMatrix,
    pub fb: ComplexMatrix,
}

/// Apply the filter and renormalize.
pub fn apply_filter(rho: &DensityMatrix, f: &LocalFilter) -> Result<DensityMatrix> {
    let (d1, d2) = rho.dims();
    if f.fa.nrows() != d1 || f.fa.ncols() != d1 || f.fb.nrows() != d2 || f.fb.ncols() != d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            found: f.fa.nrows() * f.fb.nrows(),
        });
    }
    if !linalg::is_finite(&f.fa) || !linalg::is_finite(&f.fb) {
        return Err(Error::NonFinite);
    }
    let k = linalg::tensor(&f.fa, &f.fb);
    let out = &k * rho.matrix() * k.adjoint();
    let tr = linalg::trace(&out).re;
    if tr <= 1e-12 {
        return Err(Error::VanishingTrace { trace: tr });
    }
    DensityMatrix::new(linalg::hermitian_part(&out).unscale(tr), d1, d2)
}

/// The larger `α` with `α² + β² = 1` and `αβ = product`.
pub fn alpha_from_product(product: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&product) {
        return Err(Error::OutOfRange {
            name: "alpha*beta",
            value: product,
            range: "[0, 1/2]",
        });
    }
    Ok(((1.0 + (1.0 - 4.0 * product * product).sqrt()) / 2.0).sqrt())
}

fn beta_of(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "(0, 1)",
        });
    }
    Ok((1.0 - alpha * alpha).sqrt())
}

/// `λ|Ψ_α⟩⟨Ψ_α| + (1−λ)/2 (|00⟩⟨00| + |11⟩⟨11|)` with `|Ψ_α⟩ = α|01⟩ + β|10⟩`.
pub fn hidden_nonlocality_state(lambda: f64, alpha: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            range: "[0, 1]",
        });
    }
    let beta = beta_of(alpha)?;
    let psi = ComplexVector::from_vec(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(alpha, 0.0),
        Complex64::new(beta, 0.0),
        Complex64::new(0.0, 0.0),
    ]);
    let mut m = linalg::outer(&psi, &psi).scale(lambda);
    m[(0, 0)] += Complex64::new((1.0 - lambda) / 2.0, 0.0);
    m[(3, 3)] += Complex64::new((1.0 - lambda) / 2.0, 0.0);
    DensityMatrix::new(m, 2, 2)
}

/// `F_A = diag(√(β/α), 1)`, `F_B = diag(1, √(β/α))`.
pub fn hidden_nonlocality_filter(alpha: f64) -> Result<LocalFilter> {
    let beta = beta_of(alpha)?;
    let r = Complex64::new((beta / alpha).sqrt(), 0.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(LocalFilter {
        fa: ComplexMatrix::from_row_slice(2, 2, &[r, zero, zero, one]),
        fb: ComplexMatrix::from_row_slice(2, 2, &[one, zero, zero, r]),
    })
}
