//! Numerical cutoffs shared by every criterion.
//!
//! Verdicts depend on these values, so they live in one place and the
//! acceptance tests pin them.

/// Relative Hermiticity tolerance: `‖A − A†‖_F ≤ HERMITIAN_REL · ‖A‖_F`.
pub const HERMITIAN_REL: f64 = 1e-8;

/// Lowest eigenvalue still accepted as positive semidefinite.
pub const PSD_CUTOFF: f64 = -1e-10;

/// Allowed deviation of a state's trace from one.
pub const TRACE: f64 = 1e-10;

/// Allowed deviation of a state vector's norm from one.
pub const NORM: f64 = 1e-10;

/// Realignment trace norm must exceed `1 + CCN_EXCESS` to flag entanglement.
pub const CCN_EXCESS: f64 = 1e-9;

/// Partial-sum margin before majorisation counts as violated.
pub const MAJORISATION_MARGIN: f64 = 1e-10;

/// Minimum product expectation still accepted for a valid witness.
pub const WITNESS_CUTOFF: f64 = -1e-7;

/// Runtime-adjustable subset of the cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Eigenvalue cutoff for positivity (state validation and PPT).
    pub psd_cutoff: f64,
    /// Excess over one required by the realignment criterion.
    pub ccn_excess: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd_cutoff: PSD_CUTOFF,
            ccn_excess: CCN_EXCESS,
        }
    }
}
