//! The BBPSSW recurrence protocol: twirling, Bell rotation, the purity map and
//! an exact two-copy simulation of one round.

use num_complex::Complex64;
use serde::Serialize;

use crate::criteria;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Subsystem};
use crate::states::{self, Bell, DensityMatrix, WernerParam};

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

/// `F = ⟨target|ρ|target⟩`, the parameter of the twirled state.
pub fn twirl_fidelity(rho: &DensityMatrix, target: Bell) -> Result<WernerParam> {
    require_two_qubits(rho)?;
    let f = linalg::expectation(rho.matrix(), states::bell_state(target).amplitudes());
    WernerParam::new(f.clamp(0.0, 1.0))
}

/// Twirl onto the Werner family around `target`, keeping the target fidelity.
pub fn twirl(rho: &DensityMatrix, target: Bell) -> Result<DensityMatrix> {
    Ok(states::werner_on(twirl_fidelity(rho, target)?, target))
}

/// Alice's local rotation `[[0, −1], [1, 0]]`.
fn rotation() -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    ComplexMatrix::from_row_slice(2, 2, &[z, -one, one, z])
}

/// Rotate Alice's qubit so that Ψ− and Φ+ exchange weights (and Ψ+ with Φ−).
pub fn rotate_bell(rho: &DensityMatrix) -> Result<DensityMatrix> {
    require_two_qubits(rho)?;
    Ok(rho.local_unitary(&rotation(), &linalg::identity(2)))
}

/// One round of the purity map: `(F′, p_success)`.
pub fn bbpssw_purity_step(f: WernerParam) -> (WernerParam, f64) {
    let f = f.value();
    let g = 1.0 - f;
    let numerator = f * f + g * g / 9.0;
    let denominator = f * f + 2.0 * f * g / 3.0 + 5.0 * g * g / 9.0;
    let next = (numerator / denominator).clamp(0.0, 1.0);
    (WernerParam::new(next).expect("clamped to [0, 1]"), denominator)
}

/// Result of one simulated round on two copies.
#[derive(Debug, Clone)]
pub struct TwoCopyOutcome {
    /// Ψ− fidelity of the input.
    pub fidelity_in: f64,
    /// Surviving source pair before the back-rotation (Φ+ frame).
    pub source_state: DensityMatrix,
    /// Surviving pair after the back-rotation (Ψ− frame).
    pub output: DensityMatrix,
    /// Probability that the target-pair outcomes match.
    pub p_success: f64,
}

impl TwoCopyOutcome {
    /// `⟨Φ+|source|Φ+⟩`, equal to `⟨Ψ−|output|Ψ−⟩`.
    pub fn fidelity_out(&self) -> f64 {
        linalg::expectation(self.source_state.matrix(), states::bell_state(Bell::PhiPlus).amplitudes())
    }
}

/// Basis index of qubits `(a1, b1, a2, b2)` in the `(A1 B1)(A2 B2)` ordering.
fn index(a1: usize, b1: usize, a2: usize, b2: usize) -> usize {
    a1 * 8 + b1 * 4 + a2 * 2 + b2
}

/// Bilateral CNOT: `A1 → A2` and `B1 → B2`, as a permutation matrix.
fn bilateral_xor() -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(16, 16);
    for a1 in 0..2 {
        for b1 in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    u[(index(a1, b1, a2 ^ a1, b2 ^ b1), index(a1, b1, a2, b2))] =
                        Complex64::new(1.0, 0.0);
                }
            }
        }
    }
    u
}

/// Projector onto matching z outcomes on the target pair (`↑↑` and `↓↓`).
fn matching_projector() -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(16, 16);
    for a1 in 0..2 {
        for b1 in 0..2 {
            for t in 0..2 {
                let i = index(a1, b1, t, t);
                p[(i, i)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    p
}

/// Simulate one round of the protocol on two copies of the twirled input.
pub fn bbpssw_two_copy(rho: &DensityMatrix) -> Result<TwoCopyOutcome> {
    let f = twirl_fidelity(rho, Bell::PsiMinus)?;
    let pair = rotate_bell(&states::werner_on(f, Bell::PsiMinus))?;
    let both = linalg::tensor(pair.matrix(), pair.matrix());
    let u = bilateral_xor();
    let p = matching_projector();
    let kept = &p * (&u * both * u.adjoint()) * &p;
    let p_success = linalg::trace(&kept).re;
    if p_success <= 1e-12 {
        return Err(Error::VanishingTrace { trace: p_success });
    }
    let reduced = linalg::partial_trace(&kept, 4, 4, Subsystem::B)?.unscale(p_success);
    let source_state = DensityMatrix::new(linalg::hermitian_part(&reduced), 2, 2)?;
    let output = rotate_bell(&source_state)?;
    Ok(TwoCopyOutcome {
        fidelity_in: f.value(),
        source_state,
        output,
        p_success,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistillationStep {
    pub f_before: f64,
    pub f_after: f64,
    pub p_success: f64,
}

/// Successive rounds of the purity map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistillationTrace {
    pub steps: Vec<DistillationStep>,
}

impl DistillationTrace {
    /// CSV with columns `step,F_before,F_after,p_success`, steps numbered from 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,F_before,F_after,p_success\n");
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                i + 1,
                s.f_before,
                s.f_after,
                s.p_success
            ));
        }
        out
    }
}

/// `n` rounds of [`bbpssw_purity_step`] starting at `f0`.
pub fn iterate_distill(f0: WernerParam, n: usize) -> Result<DistillationTrace> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "steps",
            value: 0.0,
            range: "n >= 1",
        });
    }
    let mut f = f0;
    let mut steps = Vec::with_capacity(n);
    for _ in 0..n {
        let (next, p) = bbpssw_purity_step(f);
        steps.push(DistillationStep {
            f_before: f.value(),
            f_after: next.value(),
            p_success: p,
        });
        f = next;
    }
    Ok(DistillationTrace { steps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Distillable {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistillabilityFlags {
    pub npt: bool,
    pub reduction_violated: bool,
    pub distillable: Distillable,
}

/// Distillability as far as the partial transpose and reduction criterion decide it.
pub fn distillability_flags(rho: &DensityMatrix) -> DistillabilityFlags {
    let (ppt, _) = criteria::is_ppt(rho);
    let (reduction_violated, _) = criteria::reduction_check(rho);
    let (d1, d2) = rho.dims();
    let distillable = if reduction_violated || (!ppt && d1.min(d2) == 2) {
        Distillable::Yes
    } else if ppt {
        Distillable::No
    } else {
        Distillable::Unknown
    };
    DistillabilityFlags {
        npt: !ppt,
        reduction_violated,
        distillable,
    }
}
