//! Operator bases and Bloch-vector decompositions.
//!
//! Hermitian bases (Pauli, generalized Gell-Mann) are normalized to
//! `tr(ΓᵢΓⱼ) = 2δᵢⱼ`, so a state decomposes as `ρ = I/d + Σ bᵢΓᵢ` with
//! `bᵢ = tr(ρΓᵢ)/2`. Weyl operators satisfy `tr(W†W') = d·δ` and give complex
//! coefficients `bᵢ = tr(Wᵢ†ρ)/d`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ONE, ZERO};
use crate::states::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Pauli,
    GellMann,
    Weyl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub basis: BasisKind,
    pub dim: usize,
    /// Length `d² − 1`; imaginary parts vanish for the Hermitian bases.
    pub coefficients: Vec<Complex64>,
}

impl BlochVector {
    pub fn real(&self) -> Vec<f64> {
        self.coefficients.iter().map(|z| z.re).collect()
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `I/d + Σ bᵢΓᵢ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut m = linalg::identity(d).scale(1.0 / d as f64);
        for (b, g) in self.coefficients.iter().zip(basis_elements(self.basis, d)) {
            m += g * *b;
        }
        m
    }
}

/// Pauli matrix `σ₁`, `σ₂` or `σ₃`.
pub fn pauli(i: usize) -> Result<ComplexMatrix> {
    let i_unit = Complex64::new(0.0, 1.0);
    let m = match i {
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -i_unit, i_unit, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => {
            return Err(Error::IndexOutOfRange {
                what: "Pauli matrix",
                index: i,
                limit: 3,
            })
        }
    };
    Ok(ComplexMatrix::from_row_slice(2, 2, &m))
}

pub(crate) fn paulis() -> [ComplexMatrix; 3] {
    [pauli(1).unwrap(), pauli(2).unwrap(), pauli(3).unwrap()]
}

/// `n·σ` for a real 3-vector.
pub fn pauli_dot(n: &[f64; 3]) -> ComplexMatrix {
    let [x, y, z] = paulis();
    x.scale(n[0]) + y.scale(n[1]) + z.scale(n[2])
}

/// Generalized Gell-Mann matrices for dimension `d`.
///
/// Order: symmetric `(j,k)`, `j<k` lexicographic; antisymmetric in the same
/// order; then diagonal `l = 1..d−1`.
pub fn gell_mann(d: usize) -> Result<Vec<ComplexMatrix>> {
    if d < 2 {
        return Err(Error::OutOfRange {
            name: "d",
            value: d as f64,
            range: "d >= 2",
        });
    }
    let i_unit = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(d * d - 1);
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|j| (j + 1..d).map(move |k| (j, k)))
        .collect();
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, k)] = ONE;
        m[(k, j)] = ONE;
        out.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, k)] = -i_unit;
        m[(k, j)] = i_unit;
        out.push(m);
    }
    for l in 1..d {
        let lf = l as f64;
        let norm = (2.0 / (lf * (lf + 1.0))).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = Complex64::new(norm, 0.0);
        }
        m[(l, l)] = Complex64::new(-lf * norm, 0.0);
        out.push(m);
    }
    Ok(out)
}

/// Weyl operator `W_{m,n} = Σ_k e^{2πi kn/d} |k⟩⟨k+m mod d|`.
pub fn weyl(d: usize, m: usize, n: usize) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::OutOfRange {
            name: "d",
            value: 0.0,
            range: "d >= 1",
        });
    }
    for idx in [m, n] {
        if idx >= d {
            return Err(Error::IndexOutOfRange {
                what: "Weyl index",
                index: idx,
                limit: d - 1,
            });
        }
    }
    let mut w = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let phase = 2.0 * PI * (k * n) as f64 / d as f64;
        w[(k, (k + m) % d)] = Complex64::from_polar(1.0, phase);
    }
    Ok(w)
}

/// The `d² − 1` non-identity Weyl operators, `(m,n)` lexicographic.
pub fn weyl_basis(d: usize) -> Vec<ComplexMatrix> {
    (0..d)
        .flat_map(|m| (0..d).map(move |n| (m, n)))
        .filter(|&(m, n)| (m, n) != (0, 0))
        .map(|(m, n)| weyl(d, m, n).expect("indices in range"))
        .collect()
}

fn basis_elements(kind: BasisKind, d: usize) -> Vec<ComplexMatrix> {
    match kind {
        BasisKind::Pauli | BasisKind::GellMann => gell_mann(d).expect("d >= 2"),
        BasisKind::Weyl => weyl_basis(d),
    }
}

/// Bloch coefficients of a unipartite state in the chosen basis.
pub fn bloch_decompose(rho: &DensityMatrix, basis: BasisKind) -> Result<BlochVector> {
    let (d1, d2) = rho.dims();
    if d2 != 1 {
        return Err(Error::UnsupportedDimensions {
            required: "unipartite state (d2 = 1)",
            d1,
            d2,
        });
    }
    if d1 < 2 || (basis == BasisKind::Pauli && d1 != 2) {
        return Err(Error::UnsupportedDimensions {
            required: "d >= 2 (d = 2 for Pauli)",
            d1,
            d2,
        });
    }
    let m = rho.matrix();
    let coefficients = match basis {
        BasisKind::Pauli | BasisKind::GellMann => basis_elements(basis, d1)
            .iter()
            .map(|g| Complex64::new(linalg::trace_product(m, g).re / 2.0, 0.0))
            .collect(),
        BasisKind::Weyl => basis_elements(basis, d1)
            .iter()
            .map(|w| linalg::hs_inner(w, m) / d1 as f64)
            .collect(),
    };
    Ok(BlochVector {
        basis,
        dim: d1,
        coefficients,
    })
}

/// Two-qubit decomposition `ρ = ¼(I + a·σ⊗I + I⊗b·σ + Σ t_mn σ_m⊗σ_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTensor2x2 {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl CorrelationTensor2x2 {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let s = paulis();
        let id = linalg::identity(2);
        let mut m = linalg::identity(4);
        for i in 0..3 {
            m += linalg::tensor(&s[i], &id).scale(self.a[i]);
            m += linalg::tensor(&id, &s[i]).scale(self.b[i]);
            for j in 0..3 {
                m += linalg::tensor(&s[i], &s[j]).scale(self.t[i][j]);
            }
        }
        m.scale(0.25)
    }

    pub fn t_matrix(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::from_fn(|i, j| self.t[i][j])
    }
}

pub fn correlation_tensor(rho: &DensityMatrix) -> Result<CorrelationTensor2x2> {
    let (d1, d2) = rho.dims();
    if (d1, d2) != (2, 2) {
        return Err(Error::UnsupportedDimensions {
            required: "2x2",
            d1,
            d2,
        });
    }
    let m = rho.matrix();
    let s = paulis();
    let id = linalg::identity(2);
    let mut out = CorrelationTensor2x2 {
        a: [0.0; 3],
        b: [0.0; 3],
        t: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        out.a[i] = linalg::trace_product(m, &linalg::tensor(&s[i], &id)).re;
        out.b[i] = linalg::trace_product(m, &linalg::tensor(&id, &s[i])).re;
        for j in 0..3 {
            out.t[i][j] = linalg::trace_product(m, &linalg::tensor(&s[i], &s[j])).re;
        }
    }
    Ok(out)
}
