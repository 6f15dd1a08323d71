//! Dense complex linear algebra on small operators.
//!
//! Everything here works on [`ComplexMatrix`] (an `nalgebra` dynamic matrix of
//! `Complex64`). Bipartite index conventions: the composite basis index of
//! `|i⟩⊗|k⟩` with `i < d1`, `k < d2` is `i·d2 + k`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which factor of a bipartite space an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Eigenvalues (descending) and matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigensystem {
    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// `V f(Λ) V†` without error checking.
    pub(crate) fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.nrows();
        let mut scaled = v.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fj = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        &scaled * v.adjoint()
    }

    pub fn eigenvector(&self, j: usize) -> ComplexVector {
        self.eigenvectors.column(j).into_owned()
    }
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Hilbert-Schmidt inner product `tr(A†B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Frobenius (Hilbert-Schmidt) norm.
pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Outer product `|u⟩⟨v|`.
pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}

/// Expectation value `⟨v|A|v⟩` (real part).
pub fn expectation(a: &ComplexMatrix, v: &ComplexVector) -> f64 {
    (v.adjoint() * a * v)[(0, 0)].re
}

/// `tr(AB)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn is_finite(a: &ComplexMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Relative anti-Hermitian part `‖A − A†‖_F / ‖A‖_F` (0 for the zero matrix).
pub fn hermiticity_deviation(a: &ComplexMatrix) -> f64 {
    let scale = hs_norm(a);
    if scale == 0.0 {
        return 0.0;
    }
    hs_norm(&(a - a.adjoint())) / scale
}

/// `(A + A†)/2`.
pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub(crate) fn check_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub(crate) fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    check_square(a)?;
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    let deviation = hermiticity_deviation(a);
    if deviation > tol::HERMITIAN_REL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

fn check_bipartite(rho: &ComplexMatrix, d1: usize, d2: usize) -> Result<()> {
    let n = check_square(rho)?;
    if n != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            found: n,
        });
    }
    Ok(())
}

/// Kronecker product `A ⊗ B`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of column vectors.
pub fn tensor_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

/// Trace out `subsystem`; the result lives on the remaining factor.
pub fn partial_trace(
    rho: &ComplexMatrix,
    d1: usize,
    d2: usize,
    subsystem: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartite(rho, d1, d2)?;
    let out = match subsystem {
        Subsystem::A => ComplexMatrix::from_fn(d2, d2, |k, l| {
            (0..d1).map(|i| rho[(i * d2 + k, i * d2 + l)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| rho[(i * d2 + k, j * d2 + k)]).sum()
        }),
    };
    Ok(out)
}

/// Transpose the indices of `subsystem` only.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    d1: usize,
    d2: usize,
    subsystem: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartite(rho, d1, d2)?;
    let n = d1 * d2;
    let out = ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / d2, r % d2);
        let (j, l) = (c / d2, c % d2);
        match subsystem {
            Subsystem::A => rho[(j * d2 + k, i * d2 + l)],
            Subsystem::B => rho[(i * d2 + l, j * d2 + k)],
        }
    });
    Ok(out)
}

/// Realignment `ρ_R[(i·d1+j), (k·d2+l)] = ⟨i,k|ρ|j,l⟩`, a `d1² × d2²` matrix.
pub fn realign(rho: &ComplexMatrix, d1: usize, d2: usize) -> Result<ComplexMatrix> {
    check_bipartite(rho, d1, d2)?;
    let out = ComplexMatrix::from_fn(d1 * d1, d2 * d2, |r, c| {
        let (i, j) = (r / d1, r % d1);
        let (k, l) = (c / d2, c % d2);
        rho[(i * d2 + k, j * d2 + l)]
    });
    Ok(out)
}

/// Singular values in descending order (any shape).
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Schatten `n`-norm, `(Σ sᵢⁿ)^{1/n}`; `n = 1` is the trace norm.
pub fn schatten_norm(a: &ComplexMatrix, n: f64) -> Result<f64> {
    if n.is_nan() || n < 1.0 {
        return Err(Error::OutOfRange {
            name: "schatten order",
            value: n,
            range: "n >= 1",
        });
    }
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    let s = singular_values(a);
    if n == 1.0 {
        return Ok(s.iter().sum());
    }
    if n.is_infinite() {
        return Ok(s.first().copied().unwrap_or(0.0));
    }
    Ok(s.iter().map(|x| x.powf(n)).sum::<f64>().powf(1.0 / n))
}

pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).iter().sum()
}

/// Polar factor `W V†` of `A = W Σ V†` (the closest unitary for square `A`).
pub fn polar_unitary(a: &ComplexMatrix) -> ComplexMatrix {
    let svd = SVD::new(a.clone(), true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    u * v_t
}

/// Hermitian eigendecomposition with deterministic ordering.
///
/// The input is symmetrized before decomposition. Eigenvalues are sorted
/// descending; every eigenvector has its first non-negligible component made
/// real-positive; exactly tied eigenvalues are ordered lexicographically by
/// their (phase-fixed) eigenvectors.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEigensystem> {
    check_hermitian(a)?;
    Ok(eig_hermitian_unchecked(&hermitian_part(a)))
}

pub(crate) fn eig_hermitian_unchecked(a: &ComplexMatrix) -> HermitianEigensystem {
    let n = a.nrows();
    let eig = SymmetricEigen::new(a.clone());
    let mut pairs: Vec<(f64, ComplexVector)> = (0..n)
        .map(|j| {
            let mut v = eig.eigenvectors.column(j).into_owned();
            fix_phase(&mut v);
            (eig.eigenvalues[j], v)
        })
        .collect();
    pairs.sort_by(|(la, va), (lb, vb)| {
        lb.total_cmp(la).then_with(|| lex_cmp(va, vb))
    });
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (j, (_, v)) in pairs.iter().enumerate() {
        eigenvectors.set_column(j, v);
    }
    HermitianEigensystem {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigenvalues only, descending.
pub(crate) fn eigenvalues_hermitian(a: &ComplexMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(a)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

pub(crate) fn min_eigenvalue(a: &ComplexMatrix) -> f64 {
    hermitian_part(a)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn fix_phase(v: &mut ComplexVector) {
    if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

fn lex_cmp(a: &ComplexVector, b: &ComplexVector) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// `V f(Λ) V†` for Hermitian `A`.
///
/// Fails when `f` returns a non-finite value on any eigenvalue, e.g. `sqrt`
/// of a negative number or `log` of zero. Callers wanting the `0·log 0 = 0`
/// convention encode it in `f`.
pub fn herm_function(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(a)?;
    for &lam in &eig.eigenvalues {
        if !f(lam).is_finite() {
            return Err(Error::FunctionUndefined { eigenvalue: lam });
        }
    }
    Ok(eig.map(f))
}

/// Square root of a PSD matrix; eigenvalues within the PSD cutoff are clipped to 0.
pub fn sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    herm_function(a, |x| {
        if x >= 0.0 {
            x.sqrt()
        } else if x >= tol::PSD_CUTOFF {
            0.0
        } else {
            f64::NAN
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sx() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    fn sy() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
    }

    fn diag(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
            v.len(),
            v.iter().map(|&x| c(x, 0.0)),
        ))
    }

    fn singlet() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = ComplexVector::from_vec(vec![ZERO, c(s, 0.0), c(-s, 0.0), ZERO]);
        outer(&v, &v)
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(tensor(&identity(2), &identity(2)), identity(4));
        let xx = tensor(&sx(), &sx());
        for r in 0..4 {
            for col in 0..4 {
                let expected = if r + col == 3 { ONE } else { ZERO };
                assert_eq!(xx[(r, col)], expected);
            }
        }
        let p = tensor(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]));
        assert_eq!(p, diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn partial_trace_examples() {
        let rho_a = diag(&[0.3, 0.7]);
        let rho_b = ComplexMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.5, 0.0)]);
        let prod = tensor(&rho_a, &rho_b);
        let red = partial_trace(&prod, 2, 2, Subsystem::B).unwrap();
        assert!((red - &rho_a).norm() < 1e-15);
        let red = partial_trace(&prod, 2, 2, Subsystem::A).unwrap();
        assert!((red - &rho_b).norm() < 1e-15);

        let red = partial_trace(&singlet(), 2, 2, Subsystem::A).unwrap();
        assert!((red - identity(2).scale(0.5)).norm() < 1e-15);
        let red = partial_trace(&identity(4).scale(0.25), 2, 2, Subsystem::B).unwrap();
        assert!((red - identity(2).scale(0.5)).norm() < 1e-15);

        assert!(matches!(
            partial_trace(&identity(5), 2, 2, Subsystem::A),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_unequal_dims() {
        // |1⟩⟨1| ⊗ diag(0.2, 0.3, 0.5)
        let a = diag(&[0.0, 1.0]);
        let b = diag(&[0.2, 0.3, 0.5]);
        let p = tensor(&a, &b);
        assert!((partial_trace(&p, 2, 3, Subsystem::A).unwrap() - &b).norm() < 1e-15);
        assert!((partial_trace(&p, 2, 3, Subsystem::B).unwrap() - &a).norm() < 1e-15);
    }

    #[test]
    fn partial_transpose_examples() {
        let pt = partial_transpose(&singlet(), 2, 2, Subsystem::A).unwrap();
        let ev = eig_hermitian(&pt).unwrap().eigenvalues;
        for (x, y) in ev.iter().zip([0.5, 0.5, 0.5, -0.5]) {
            assert!((x - y).abs() < 1e-12);
        }

        let rho_a = ComplexMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.1, 0.3), c(0.1, -0.3), c(0.4, 0.0)]);
        let rho_b = diag(&[0.25, 0.75]);
        let prod = tensor(&rho_a, &rho_b);
        let pt = partial_transpose(&prod, 2, 2, Subsystem::A).unwrap();
        assert!((pt - tensor(&rho_a.transpose(), &rho_b)).norm() < 1e-15);

        let m = ComplexMatrix::from_fn(6, 6, |i, j| c(i as f64 + 0.1 * j as f64, (i * j) as f64));
        let both = partial_transpose(
            &partial_transpose(&m, 2, 3, Subsystem::A).unwrap(),
            2,
            3,
            Subsystem::B,
        )
        .unwrap();
        assert_eq!(both, m.transpose());
    }

    #[test]
    fn realign_rectangular_shape() {
        let m = identity(6);
        let r = realign(&m, 2, 3).unwrap();
        assert_eq!((r.nrows(), r.ncols()), (4, 9));
        // identity = I₂ ⊗ I₃, rank-one after realignment
        let s = singular_values(&r);
        assert!((s[0] - (2.0f64 * 3.0).sqrt()).abs() < 1e-12);
        assert!(s[1] < 1e-12);
    }

    #[test]
    fn realign_trace_norms() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = ComplexVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let w = ComplexVector::from_vec(vec![c(s, 0.0), c(0.0, -s)]);
        let prod = outer(&tensor_vec(&v, &w), &tensor_vec(&v, &w));
        assert!((trace_norm(&realign(&prod, 2, 2).unwrap()) - 1.0).abs() < 1e-12);
        assert!((trace_norm(&realign(&identity(4).scale(0.25), 2, 2).unwrap()) - 0.5).abs() < 1e-12);
        assert!((trace_norm(&realign(&singlet(), 2, 2).unwrap()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn schatten_examples() {
        assert!((schatten_norm(&identity(4), 1.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((schatten_norm(&singlet(), 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((schatten_norm(&sy(), 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(schatten_norm(&sy(), 0.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn eig_examples() {
        let e = eig_hermitian(&diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 2.0, 1.0]);
        let e = eig_hermitian(&sx()).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14 && (e.eigenvalues[1] + 1.0).abs() < 1e-14);
        let e = eig_hermitian(&singlet()).unwrap();
        for (x, y) in e.eigenvalues.iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert!((x - y).abs() < 1e-14);
        }
        let bad = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(eig_hermitian(&bad), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_is_deterministic_under_degeneracy() {
        let a = identity(3);
        let e1 = eig_hermitian(&a).unwrap();
        let e2 = eig_hermitian(&a.clone()).unwrap();
        assert_eq!(e1.eigenvectors, e2.eigenvectors);
        assert!((e1.reconstruct() - a).norm() < 1e-14);
    }

    #[test]
    fn herm_function_examples() {
        let a = diag(&[0.3, 0.7]);
        assert!((herm_function(&a, |x| x).unwrap() - &a).norm() < 1e-14);
        let r = herm_function(&diag(&[4.0, 9.0]), f64::sqrt).unwrap();
        assert!((r - diag(&[2.0, 3.0])).norm() < 1e-14);
        let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.log2() };
        let r = herm_function(&diag(&[0.5, 0.5]), xlogx).unwrap();
        assert!((trace(&r).re + 1.0).abs() < 1e-14);
        let r = herm_function(&diag(&[1.0, 0.0]), xlogx).unwrap();
        assert!(trace(&r).re.abs() < 1e-14);
        assert!(matches!(
            herm_function(&diag(&[1.0, 0.0]), f64::log2),
            Err(Error::FunctionUndefined { .. })
        ));
    }

    #[test]
    fn polar_of_unitary_is_itself() {
        let u = sy();
        assert!((polar_unitary(&u) - &u).norm() < 1e-12);
        let a = diag(&[2.0, 0.5]);
        assert!((polar_unitary(&a) - identity(2)).norm() < 1e-12);
    }
}
