//! Separability criteria and the combined classifier.

use serde::{Deserialize, Serialize};

use crate::linalg::{self, ComplexMatrix, Subsystem};
use crate::states::{DensityMatrix, PureState};
use crate::tol::{self, Tolerances};

/// Final class assigned by [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Separable,
    EntangledDistillable,
    EntangledPPT,
    EntangledUndetermined,
    Undecided,
}

impl Verdict {
    pub fn is_entangled(self) -> bool {
        matches!(
            self,
            Verdict::EntangledDistillable | Verdict::EntangledPPT | Verdict::EntangledUndetermined
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Separable => "Separable",
            Verdict::EntangledDistillable => "EntangledDistillable",
            Verdict::EntangledPPT => "EntangledPPT",
            Verdict::EntangledUndetermined => "EntangledUndetermined",
            Verdict::Undecided => "Undecided",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub d1: usize,
    pub d2: usize,
    pub ppt: bool,
    pub min_pt_eigenvalue: f64,
    pub reduction_violated: bool,
    pub reduction_min_eigenvalues: [f64; 2],
    pub ccn_value: f64,
    pub ccn_flag: bool,
    pub majorisation_violated: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    /// Nonincreasing, strictly above the rank cutoff.
    pub coefficients: Vec<f64>,
    /// Columns are the left Schmidt vectors.
    pub left_vectors: ComplexMatrix,
    pub right_vectors: ComplexMatrix,
    pub rank: usize,
}

const SCHMIDT_CUTOFF: f64 = 1e-10;

/// Minimum eigenvalue of `ρ^{T_A}` and whether it clears the PSD cutoff.
pub fn is_ppt(rho: &DensityMatrix) -> (bool, f64) {
    is_ppt_with(rho, &Tolerances::default())
}

pub fn is_ppt_with(rho: &DensityMatrix, tols: &Tolerances) -> (bool, f64) {
    let min = linalg::min_eigenvalue(&rho.partial_transpose(Subsystem::A));
    (min >= tols.psd_cutoff, min)
}

/// Reduction criterion: `I⊗ρ_B − ρ ≥ 0` and `ρ_A⊗I − ρ ≥ 0`.
///
/// Returns whether either operator has an eigenvalue below the cutoff, plus
/// both minimum eigenvalues `[I⊗ρ_B − ρ, ρ_A⊗I − ρ]`.
pub fn reduction_check(rho: &DensityMatrix) -> (bool, [f64; 2]) {
    reduction_check_with(rho, &Tolerances::default())
}

pub fn reduction_check_with(rho: &DensityMatrix, tols: &Tolerances) -> (bool, [f64; 2]) {
    let (d1, d2) = rho.dims();
    let ra = rho.reduced(Subsystem::A);
    let rb = rho.reduced(Subsystem::B);
    let m = rho.matrix();
    let op_b = linalg::tensor(&linalg::identity(d1), rb.matrix()) - m;
    let op_a = linalg::tensor(ra.matrix(), &linalg::identity(d2)) - m;
    let mins = [linalg::min_eigenvalue(&op_b), linalg::min_eigenvalue(&op_a)];
    (mins.iter().any(|&x| x < tols.psd_cutoff), mins)
}

/// Realignment (computable cross norm) criterion: `(‖ρ_R‖₁, ‖ρ_R‖₁ > 1 + ε)`.
pub fn ccn_check(rho: &DensityMatrix) -> (f64, bool) {
    ccn_check_with(rho, &Tolerances::default())
}

pub fn ccn_check_with(rho: &DensityMatrix, tols: &Tolerances) -> (f64, bool) {
    let (d1, d2) = rho.dims();
    let r = linalg::realign(rho.matrix(), d1, d2).expect("dimensions checked at construction");
    let value = linalg::trace_norm(&r);
    (value, value > 1.0 + tols.ccn_excess)
}

/// Whether `x ≺ y` fails, comparing descending partial sums after padding
/// both vectors with zeros to a common length.
pub fn majorisation_fails(x: &[f64], y: &[f64], margin: f64) -> bool {
    let n = x.len().max(y.len());
    let sorted = |v: &[f64]| {
        let mut s = v.to_vec();
        s.resize(n, 0.0);
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let (xs, ys) = (sorted(x), sorted(y));
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..n {
        sx += xs[k];
        sy += ys[k];
        if sx > sy + margin {
            return true;
        }
    }
    false
}

/// Majorisation criterion: separable states satisfy `λ(ρ) ≺ λ(ρ_A)` and `λ(ρ) ≺ λ(ρ_B)`.
pub fn majorisation_check(rho: &DensityMatrix) -> bool {
    let spec = rho.spectrum();
    let spec_a = rho.reduced(Subsystem::A).spectrum();
    let spec_b = rho.reduced(Subsystem::B).spectrum();
    majorisation_fails(&spec, &spec_a, tol::MAJORISATION_MARGIN)
        || majorisation_fails(&spec, &spec_b, tol::MAJORISATION_MARGIN)
}

/// Schmidt decomposition from the SVD of the `d1 × d2` coefficient matrix.
pub fn schmidt(psi: &PureState) -> SchmidtDecomposition {
    let c = psi.coefficient_matrix();
    let svd = nalgebra::SVD::new(c, true, true);
    let u = svd.u.expect("requested");
    // ψ = Σ cₖ uₖ ⊗ vₖ with vₖ the conjugated right singular vectors
    let v = svd.v_t.expect("requested").transpose();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| svd.singular_values[i] > SCHMIDT_CUTOFF)
        .collect();
    let coefficients = kept.iter().map(|&i| svd.singular_values[i]).collect();
    let left_vectors = ComplexMatrix::from_fn(u.nrows(), kept.len(), |r, j| u[(r, kept[j])]);
    let right_vectors = ComplexMatrix::from_fn(v.nrows(), kept.len(), |r, j| v[(r, kept[j])]);
    SchmidtDecomposition {
        rank: kept.len(),
        coefficients,
        left_vectors,
        right_vectors,
    }
}

/// Run every criterion and combine them into a [`Verdict`].
pub fn classify(rho: &DensityMatrix) -> ClassificationReport {
    classify_with(rho, &Tolerances::default())
}

pub fn classify_with(rho: &DensityMatrix, tols: &Tolerances) -> ClassificationReport {
    let (d1, d2) = rho.dims();
    let (ppt, min_pt_eigenvalue) = is_ppt_with(rho, tols);
    let (reduction_violated, reduction_min_eigenvalues) = reduction_check_with(rho, tols);
    let (ccn_value, ccn_flag) = ccn_check_with(rho, tols);
    let majorisation_violated = majorisation_check(rho);

    let low_dim = matches!((d1, d2), (2, 2) | (2, 3) | (3, 2));
    let verdict = if low_dim {
        if ppt {
            Verdict::Separable
        } else {
            Verdict::EntangledDistillable
        }
    } else if !ppt {
        if d1 == 2 || d2 == 2 || reduction_violated {
            Verdict::EntangledDistillable
        } else {
            Verdict::EntangledUndetermined
        }
    } else if ccn_flag {
        Verdict::EntangledPPT
    } else {
        Verdict::Undecided
    };

    ClassificationReport {
        d1,
        d2,
        ppt,
        min_pt_eigenvalue,
        reduction_violated,
        reduction_min_eigenvalues,
        ccn_value,
        ccn_flag,
        majorisation_violated,
        verdict,
    }
}
