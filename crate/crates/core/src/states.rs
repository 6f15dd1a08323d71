//! Validated density matrices, pure states and the named state families.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, Subsystem};
use crate::tol::{self, Tolerances};

/// A bipartite density matrix on `C^{d1} ⊗ C^{d2}`.
///
/// Construction validates Hermiticity, unit trace and positivity; the stored
/// matrix is the Hermitian part of the input. Unipartite states use `d2 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    d1: usize,
    d2: usize,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, d1: usize, d2: usize) -> Result<Self> {
        Self::with_tolerances(mat, d1, d2, &Tolerances::default())
    }

    pub fn with_tolerances(
        mat: ComplexMatrix,
        d1: usize,
        d2: usize,
        tols: &Tolerances,
    ) -> Result<Self> {
        let n = linalg::check_square(&mat)?;
        if d1 == 0 || d2 == 0 || n != d1 * d2 {
            return Err(Error::DimensionMismatch {
                expected: d1 * d2,
                found: n,
            });
        }
        linalg::check_hermitian(&mat)?;
        let mat = linalg::hermitian_part(&mat);
        let trace = linalg::trace(&mat).re;
        if (trace - 1.0).abs() > tol::TRACE {
            return Err(Error::Trace { trace });
        }
        let min_eigenvalue = linalg::min_eigenvalue(&mat);
        if min_eigenvalue < tols.psd_cutoff {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { mat, d1, d2 })
    }

    /// Unipartite state (`d2 = 1`).
    pub fn single(mat: ComplexMatrix) -> Result<Self> {
        let d = linalg::check_square(&mat)?;
        Self::new(mat, d, 1)
    }

    /// Wrap a matrix already known to be a valid state.
    pub(crate) fn from_trusted(mat: ComplexMatrix, d1: usize, d2: usize) -> Self {
        debug_assert_eq!(mat.nrows(), d1 * d2);
        Self { mat, d1, d2 }
    }

    pub fn maximally_mixed(d1: usize, d2: usize) -> Self {
        let d = d1 * d2;
        Self::from_trusted(linalg::identity(d).scale(1.0 / d as f64), d1, d2)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    pub fn dim(&self) -> usize {
        self.d1 * self.d2
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        linalg::hs_inner(&self.mat, &self.mat).re
    }

    /// Reduced state on the subsystem that is kept (i.e. `Subsystem::A` keeps A).
    pub fn reduced(&self, keep: Subsystem) -> DensityMatrix {
        let traced = match keep {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        };
        let m = linalg::partial_trace(&self.mat, self.d1, self.d2, traced)
            .expect("dimensions checked at construction");
        let d = m.nrows();
        Self::from_trusted(linalg::hermitian_part(&m), d, 1)
    }

    pub fn partial_transpose(&self, subsystem: Subsystem) -> ComplexMatrix {
        linalg::partial_transpose(&self.mat, self.d1, self.d2, subsystem)
            .expect("dimensions checked at construction")
    }

    /// Spectrum, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        linalg::eigenvalues_hermitian(&self.mat)
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
        Self::from_trusted(linalg::tensor(&a.mat, &b.mat), a.dim(), b.dim())
    }

    /// `(U₁⊗U₂) ρ (U₁⊗U₂)†`; the unitaries are not checked.
    pub fn local_unitary(&self, u1: &ComplexMatrix, u2: &ComplexMatrix) -> DensityMatrix {
        let u = linalg::tensor(u1, u2);
        let m = &u * &self.mat * u.adjoint();
        Self::from_trusted(linalg::hermitian_part(&m), self.d1, self.d2)
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let first = parts.first().ok_or(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
        let (d1, d2) = first.1.dims();
        let mut acc = ComplexMatrix::zeros(d1 * d2, d1 * d2);
        for (w, rho) in parts {
            if rho.dims() != (d1, d2) {
                return Err(Error::DimensionMismatch {
                    expected: d1 * d2,
                    found: rho.dim(),
                });
            }
            acc += rho.mat.scale(*w);
        }
        DensityMatrix::new(acc, d1, d2)
    }

    pub fn to_file(&self) -> StateFile {
        StateFile::from_matrix(&self.mat, self.d1, self.d2)
    }
}

/// A normalized bipartite state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
    d1: usize,
    d2: usize,
}

impl PureState {
    pub fn new(amplitudes: ComplexVector, d1: usize, d2: usize) -> Result<Self> {
        if amplitudes.len() != d1 * d2 {
            return Err(Error::DimensionMismatch {
                expected: d1 * d2,
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol::NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes,
            d1,
            d2,
        })
    }

    /// Normalizes the input first; fails only on a zero vector.
    pub fn normalized(amplitudes: ComplexVector, d1: usize, d2: usize) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm < 1e-300 {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(amplitudes.unscale(norm), d1, d2)
    }

    pub fn from_real(amplitudes: &[f64], d1: usize, d2: usize) -> Result<Self> {
        let v = ComplexVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&x| Complex64::new(x, 0.0)),
        );
        Self::new(v, d1, d2)
    }

    /// Product state `|a⟩⊗|b⟩`.
    pub fn product(a: &ComplexVector, b: &ComplexVector) -> Result<Self> {
        Self::normalized(linalg::tensor_vec(a, b), a.len(), b.len())
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    /// Amplitudes reshaped into the `d1 × d2` coefficient matrix.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.d1, self.d2, |i, k| self.amplitudes[i * self.d2 + k])
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> ComplexMatrix {
        linalg::outer(&self.amplitudes, &self.amplitudes)
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn from_pure(psi: &PureState) -> DensityMatrix {
    DensityMatrix::from_trusted(psi.projector(), psi.d1, psi.d2)
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        from_pure(psi)
    }
}

/// The four two-qubit Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bell {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PsiPlus, Bell::PsiMinus, Bell::PhiPlus, Bell::PhiMinus];
}

pub fn bell_state(which: Bell) -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match which {
        Bell::PsiPlus => [0.0, s, s, 0.0],
        Bell::PsiMinus => [0.0, s, -s, 0.0],
        Bell::PhiPlus => [s, 0.0, 0.0, s],
        Bell::PhiMinus => [s, 0.0, 0.0, -s],
    };
    PureState::from_real(&amps, 2, 2).expect("Bell states are normalized")
}

pub fn bell_projector(which: Bell) -> ComplexMatrix {
    bell_state(which).projector()
}

/// Werner purity `F ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct WernerParam(f64);

impl WernerParam {
    pub fn new(f: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::OutOfRange {
                name: "F",
                value: f,
                range: "[0, 1]",
            });
        }
        Ok(Self(f))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Werner state with weight `F` on a chosen Bell state and `(1−F)/3` on the others.
pub fn werner_on(f: WernerParam, target: Bell) -> DensityMatrix {
    let f = f.value();
    let rest = (1.0 - f) / 3.0;
    let mut m = ComplexMatrix::zeros(4, 4);
    for b in Bell::ALL {
        let w = if b == target { f } else { rest };
        m += bell_projector(b).scale(w);
    }
    DensityMatrix::from_trusted(m, 2, 2)
}

/// `F |Φ+⟩⟨Φ+| + (1−F)/3 (|Ψ+⟩⟨Ψ+| + |Φ−⟩⟨Φ−| + |Ψ−⟩⟨Ψ−|)`.
pub fn werner(f: WernerParam) -> DensityMatrix {
    werner_on(f, Bell::PhiPlus)
}

/// The two-qutrit bound entangled family `ρ_a`, `0 < a < 1`.
pub fn horodecki_3x3(a: f64) -> Result<DensityMatrix> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::OutOfRange {
            name: "a",
            value: a,
            range: "(0, 1)",
        });
    }
    let mut m = nalgebra::DMatrix::<f64>::zeros(9, 9);
    for i in 0..9 {
        m[(i, i)] = a;
    }
    for &i in &[0usize, 4, 8] {
        for &j in &[0usize, 4, 8] {
            m[(i, j)] = a;
        }
    }
    let diag = (1.0 + a) / 2.0;
    let off = (1.0 - a * a).sqrt() / 2.0;
    m[(6, 6)] = diag;
    m[(8, 8)] = diag;
    m[(6, 8)] = off;
    m[(8, 6)] = off;
    let norm = 1.0 / (8.0 * a + 1.0);
    let mat = m.map(|x| Complex64::new(x * norm, 0.0));
    DensityMatrix::new(mat, 3, 3)
}

/// `(1/√d) Σᵢ |i,i⟩`.
pub fn max_entangled(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::OutOfRange {
            name: "d",
            value: d as f64,
            range: "d >= 2",
        });
    }
    let mut v = ComplexVector::zeros(d * d);
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        v[i * d + i] = amp;
    }
    PureState::new(v, d, d)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random unit vector in `C^d`.
pub fn random_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| gaussian_complex(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Ginibre-distributed state of the given rank, `ρ = GG†/tr(GG†)`.
///
/// Identical seeds give bit-identical output.
pub fn random_density(d1: usize, d2: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let d = d1 * d2;
    if rank < 1 || rank > d {
        return Err(Error::OutOfRange {
            name: "rank",
            value: rank as f64,
            range: "1 <= rank <= d1*d2",
        });
    }
    let mut rng = rng_from_seed(seed);
    Ok(random_density_with(d1, d2, rank, &mut rng))
}

pub fn random_density_with<R: Rng + ?Sized>(
    d1: usize,
    d2: usize,
    rank: usize,
    rng: &mut R,
) -> DensityMatrix {
    let d = d1 * d2;
    let g = ComplexMatrix::from_fn(d, rank, |_, _| gaussian_complex(rng));
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    DensityMatrix::from_trusted(linalg::hermitian_part(&m.unscale(tr)), d1, d2)
}

/// Random convex mixture of `terms` pure product states (separable by construction).
pub fn random_separable<R: Rng + ?Sized>(
    d1: usize,
    d2: usize,
    terms: usize,
    rng: &mut R,
) -> DensityMatrix {
    let d = d1 * d2;
    let weights: Vec<f64> = (0..terms)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(d, d);
    for w in weights {
        let a = random_vector(d1, rng);
        let b = random_vector(d2, rng);
        let v = linalg::tensor_vec(&a, &b);
        m += linalg::outer(&v, &v).scale(w / total);
    }
    DensityMatrix::from_trusted(linalg::hermitian_part(&m), d1, d2)
}

/// On-disk state format: `d1`, `d2`, and the row-major matrix as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub d1: usize,
    pub d2: usize,
    pub matrix: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_matrix(m: &ComplexMatrix, d1: usize, d2: usize) -> Self {
        let n = m.nrows();
        let mut matrix = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                matrix.push([z.re, z.im]);
            }
        }
        Self { d1, d2, matrix }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    /// The raw matrix, checked only for shape and finiteness.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.d1 * self.d2;
        if n == 0 || self.matrix.len() != n * n {
            return Err(Error::Format(format!(
                "matrix has {} entries, expected {} for d1={} d2={}",
                self.matrix.len(),
                n * n,
                self.d1,
                self.d2
            )));
        }
        let m = ComplexMatrix::from_fn(n, n, |r, c| {
            let [re, im] = self.matrix[r * n + c];
            Complex64::new(re, im)
        });
        if !linalg::is_finite(&m) {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    pub fn to_state(&self, tols: &Tolerances) -> Result<DensityMatrix> {
        DensityMatrix::with_tolerances(self.to_matrix()?, self.d1, self.d2, tols)
    }

    /// JSON text with every number written to 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{{\"d1\":{},\"d2\":{},\"matrix\":[", self.d1, self.d2);
        for (i, [re, im]) in self.matrix.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "[{},{}]", full_precision(*re), full_precision(*im));
        }
        out.push_str("]}");
        out
    }
}

/// Scientific notation with 17 significant digits (round-trips every `f64`).
pub fn full_precision(x: f64) -> String {
    if x == 0.0 {
        // normalizes -0.0 as well
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}
