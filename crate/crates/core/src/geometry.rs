//! Distances between states, geometric entanglement witnesses and the
//! nearest-PPT construction.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, Subsystem};
use crate::states::DensityMatrix;
use crate::tol;

/// A Hermitian operator on `C^{d1} ⊗ C^{d2}` together with the outcome of its
/// product-state minimization, once computed.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub op: ComplexMatrix,
    pub d1: usize,
    pub d2: usize,
    pub min_product_expectation: Option<f64>,
    pub verified: bool,
}

impl Witness {
    pub fn new(op: ComplexMatrix, d1: usize, d2: usize) -> Result<Self> {
        linalg::check_hermitian(&op)?;
        if op.nrows() != d1 * d2 {
            return Err(Error::DimensionMismatch {
                expected: d1 * d2,
                found: op.nrows(),
            });
        }
        Ok(Self {
            op: linalg::hermitian_part(&op),
            d1,
            d2,
            min_product_expectation: None,
            verified: false,
        })
    }

    /// `tr(ρW)`.
    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        linalg::trace_product(&self.op, rho.matrix()).re
    }

    /// Run the product-state minimization with default settings and record it.
    pub fn verify(self) -> Self {
        self.verify_with(&ProductSearch::default())
    }

    pub fn verify_with(mut self, search: &ProductSearch) -> Self {
        let m = search.minimize(&self.op, self.d1, self.d2).value;
        self.min_product_expectation = Some(m);
        self.verified = m >= tol::WITNESS_CUTOFF;
        self
    }
}

/// Outcome of a product-state minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMinimum {
    pub value: f64,
    pub a: ComplexVector,
    pub b: ComplexVector,
}

/// Multi-start alternating minimization of `⟨a⊗b|W|a⊗b⟩` over unit vectors.
///
/// For fixed `a` the optimal `b` is the lowest eigenvector of the contracted
/// `d2 × d2` operator and vice versa. Starts are drawn from a Halton sequence
/// offset by `seed`, so results are reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductSearch {
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tolerance: f64,
}

impl Default for ProductSearch {
    fn default() -> Self {
        Self {
            starts: 32,
            seed: 0,
            max_iter: 1000,
            tolerance: 1e-12,
        }
    }
}

impl ProductSearch {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn minimize(&self, w: &ComplexMatrix, d1: usize, d2: usize) -> ProductMinimum {
        let primes = first_primes(2 * d1);
        let mut best: Option<ProductMinimum> = None;
        for s in 0..self.starts.max(1) {
            let index = self.seed.wrapping_mul(self.starts as u64) + s as u64 + 1;
            let a0 = halton_vector(index, &primes);
            let cand = self.descend(w, d1, d2, a0);
            if best.as_ref().is_none_or(|b| cand.value < b.value) {
                best = Some(cand);
            }
        }
        best.expect("at least one start")
    }

    fn descend(&self, w: &ComplexMatrix, d1: usize, d2: usize, mut a: ComplexVector) -> ProductMinimum {
        let mut value = f64::INFINITY;
        let mut b = ComplexVector::zeros(d2);
        for _ in 0..self.max_iter {
            let (vb, bb) = lowest(&contract_first(w, d1, d2, &a));
            b = bb;
            let (va, aa) = lowest(&contract_second(w, d1, d2, &b));
            a = aa;
            let improvement = value - va.min(vb);
            value = va.min(vb);
            if improvement < self.tolerance {
                break;
            }
        }
        ProductMinimum { value, a, b }
    }
}

/// `min_{a,b} ⟨a⊗b|W|a⊗b⟩` with default search settings.
pub fn min_product_expectation(w: &Witness) -> f64 {
    ProductSearch::default().minimize(&w.op, w.d1, w.d2).value
}

/// `M[k,l] = Σ_{ij} ā_i W[(i,k),(j,l)] a_j`.
fn contract_first(w: &ComplexMatrix, d1: usize, d2: usize, a: &ComplexVector) -> ComplexMatrix {
    ComplexMatrix::from_fn(d2, d2, |k, l| {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d1 {
            for j in 0..d1 {
                acc += a[i].conj() * w[(i * d2 + k, j * d2 + l)] * a[j];
            }
        }
        acc
    })
}

/// `N[i,j] = Σ_{kl} b̄_k W[(i,k),(j,l)] b_l`.
fn contract_second(w: &ComplexMatrix, d1: usize, d2: usize, b: &ComplexVector) -> ComplexMatrix {
    ComplexMatrix::from_fn(d1, d1, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..d2 {
            for l in 0..d2 {
                acc += b[k].conj() * w[(i * d2 + k, j * d2 + l)] * b[l];
            }
        }
        acc
    })
}

fn lowest(m: &ComplexMatrix) -> (f64, ComplexVector) {
    let eig = linalg::eig_hermitian_unchecked(&linalg::hermitian_part(m));
    let j = eig.eigenvalues.len() - 1;
    (eig.eigenvalues[j], eig.eigenvector(j))
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().all(|p| !c.is_multiple_of(*p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn halton_vector(index: u64, primes: &[u64]) -> ComplexVector {
    let d = primes.len() / 2;
    let mut v = ComplexVector::from_fn(d, |i, _| {
        let re = 2.0 * radical_inverse(index, primes[2 * i]) - 1.0;
        let im = 2.0 * radical_inverse(index, primes[2 * i + 1]) - 1.0;
        Complex64::new(re, im)
    });
    let n = v.norm();
    if n < 1e-12 {
        v = ComplexVector::zeros(d);
        v[0] = Complex64::new(1.0, 0.0);
        return v;
    }
    v.unscale(n)
}

fn check_same_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    Ok(())
}

/// `‖ρ − σ‖₂ = √tr((ρ−σ)²)`.
pub fn hs_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dims(rho, sigma)?;
    Ok(linalg::hs_norm(&(rho.matrix() - sigma.matrix())))
}

const SUPPORT_CUTOFF: f64 = 1e-12;

/// Quantum relative entropy `tr(ρ log₂ρ − ρ log₂σ)`; `+∞` when the support of
/// `ρ` is not contained in that of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dims(rho, sigma)?;
    let r = linalg::eig_hermitian_unchecked(rho.matrix());
    let s = linalg::eig_hermitian_unchecked(sigma.matrix());
    let neg_entropy: f64 = r
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.log2())
        .sum();
    let mut cross = 0.0;
    for (j, &mu) in s.eigenvalues.iter().enumerate() {
        let weight = linalg::expectation(rho.matrix(), &s.eigenvector(j));
        if mu > SUPPORT_CUTOFF {
            cross += weight * mu.log2();
        } else if weight > SUPPORT_CUTOFF {
            return Ok(f64::INFINITY);
        }
    }
    Ok(neg_entropy - cross)
}

/// Uhlmann fidelity `(‖√ρ √σ‖₁)²`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dims(rho, sigma)?;
    let root = linalg::trace_norm(&(clipped_sqrt(rho.matrix()) * clipped_sqrt(sigma.matrix())));
    Ok((root * root).clamp(0.0, 1.0))
}

/// Square root with round-off eigenvalues set to zero, so that rank-deficient
/// inputs do not pick up `√ε` contributions.
fn clipped_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    linalg::eig_hermitian_unchecked(m).map(|x| if x > 1e-13 { x.sqrt() } else { 0.0 })
}

/// Bures distance `2 − 2√F`.
pub fn bures_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    Ok((2.0 - 2.0 * f.sqrt()).max(0.0))
}

/// Geometric witness `C = ρ̃ − ρ − ⟨ρ̃, ρ̃−ρ⟩·I`.
///
/// `tr(ρ̃C) = 0` and `tr(ρC) = −‖ρ̃−ρ‖₂²` by construction.
pub fn geometric_witness(rho: &DensityMatrix, reference: &DensityMatrix) -> Result<Witness> {
    check_same_dims(rho, reference)?;
    witness_from_reference(rho, reference.matrix())
}

fn witness_from_reference(rho: &DensityMatrix, reference: &ComplexMatrix) -> Result<Witness> {
    let diff = reference - rho.matrix();
    let shift = linalg::hs_inner(reference, &diff).re;
    let op = &diff - linalg::identity(rho.dim()).scale(shift);
    let (d1, d2) = rho.dims();
    Witness::new(op, d1, d2)
}

/// The geometric witness scaled to `‖ρ̃ − ρ‖₂ = 1`.
fn normalized_geometric_witness(rho: &DensityMatrix, reference: &DensityMatrix) -> Result<Witness> {
    let dist = hs_distance(rho, reference)?;
    if dist < 1e-12 {
        return Err(Error::DegenerateReference);
    }
    let mut w = geometric_witness(rho, reference)?;
    w.op = w.op.unscale(dist);
    Ok(w)
}

/// Whether `candidate` is the closest separable state to `rho`: the
/// normalized geometric witness must be nonnegative on every product state.
pub fn closest_separable_check(rho: &DensityMatrix, candidate: &DensityMatrix) -> Result<bool> {
    let w = normalized_geometric_witness(rho, candidate)?.verify();
    Ok(w.verified)
}

/// Lower and upper bounds on the Hilbert-Schmidt distance from `rho` to the
/// separable set, using the separable reference `omega`.
///
/// `upper = ‖ω − ρ‖₂`; `lower = max(0, min_{a,b} ⟨a⊗b|C|a⊗b⟩ − tr(ρC))` for
/// the normalized geometric operator `C` built from `omega`.
pub fn bnt_bounds(rho: &DensityMatrix, omega: &DensityMatrix) -> Result<(f64, f64)> {
    let upper = hs_distance(rho, omega)?;
    if upper < 1e-12 {
        return Ok((0.0, 0.0));
    }
    let w = normalized_geometric_witness(rho, omega)?;
    let m = min_product_expectation(&w);
    let lower = (m - w.expectation(rho)).max(0.0);
    Ok((lower, upper))
}

/// Euclidean projection of `values` onto the probability simplex:
/// `eᵢ = max(vᵢ + λ, 0)` with `λ` chosen so that `Σ eᵢ = 1`.
pub fn project_to_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut lambda = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (1.0 - cumulative) / (k + 1) as f64;
        if v + candidate > 0.0 {
            lambda = candidate;
        }
    }
    values.iter().map(|&v| (v + lambda).max(0.0)).collect()
}

/// Result of the nearest-PPT construction.
#[derive(Debug, Clone, Serialize)]
pub struct NearestPpt {
    /// `(U E U†)^{T_A}`; PPT and unit-trace, but not necessarily positive.
    #[serde(skip)]
    pub candidate: ComplexMatrix,
    /// The candidate as a validated state, `None` when it fails positivity.
    #[serde(skip)]
    pub state: Option<DensityMatrix>,
    /// `‖candidate − ρ‖₂`; a lower bound on the distance to the PPT set on failure.
    pub distance: f64,
}

impl NearestPpt {
    pub fn is_failure(&self) -> bool {
        self.state.is_none()
    }

    /// Smallest eigenvalue of the candidate's partial transpose.
    pub fn min_pt_eigenvalue(&self, d1: usize, d2: usize) -> Result<f64> {
        let pt = linalg::partial_transpose(&self.candidate, d1, d2, Subsystem::A)?;
        Ok(linalg::eig_hermitian(&pt)?.min())
    }

    /// Geometric witness of `rho` built from the candidate, scaled to unit
    /// distance. The candidate is the nearest point of a convex superset of
    /// the separable states, so this is a witness even on failure.
    pub fn witness(&self, rho: &DensityMatrix) -> Result<Witness> {
        if self.distance < 1e-12 {
            return Err(Error::DegenerateReference);
        }
        let mut w = witness_from_reference(rho, &self.candidate)?;
        w.op = w.op.unscale(self.distance);
        Ok(w)
    }
}

/// Clip the spectrum of `ρ^{T_A}` onto the probability simplex and transpose back.
pub fn nearest_ppt_state(rho: &DensityMatrix) -> NearestPpt {
    let (d1, d2) = rho.dims();
    let pt = rho.partial_transpose(Subsystem::A);
    let eig = linalg::eig_hermitian_unchecked(&pt);
    let clipped = project_to_simplex(&eig.eigenvalues);
    let clipped_eig = linalg::HermitianEigensystem {
        eigenvalues: clipped,
        eigenvectors: eig.eigenvectors.clone(),
    };
    let back = clipped_eig.reconstruct();
    let candidate = linalg::hermitian_part(
        &linalg::partial_transpose(&back, d1, d2, Subsystem::A).expect("same dimensions"),
    );
    let distance = linalg::hs_norm(&(&candidate - rho.matrix()));
    let state = DensityMatrix::new(candidate.clone(), d1, d2).ok();
    NearestPpt {
        candidate,
        state,
        distance,
    }
}
