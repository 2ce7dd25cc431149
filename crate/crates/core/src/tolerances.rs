//! Every numerical threshold used by the checks, in one place.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Allowed zero mode of a `∂̄⁻¹` argument, relative to its max norm.
    pub dbar_mean: f64,
    /// Allowed `max|Im|/max|·|` of fields that must be real.
    pub reality: f64,
    /// `max|Σ(F_z^a)²| / max Σ|F_z^a|²` accepted as conformal.
    pub conformality: f64,
    /// Relative least-squares residual accepted by immersion synthesis.
    pub synthesis: f64,
    /// Period defect (relative to the immersion diameter) deciding "closed torus".
    pub period_defect: f64,
    /// Constraint residual `‖∂̄V − ∂(U²)‖∞` relative to `‖U²‖∞` accepted by `mnv_rhs`.
    pub constraint: f64,
    /// Relative imaginary part accepted in the mNV right-hand side.
    pub rhs_reality: f64,
    /// Same, for the fifth-order hierarchy members.
    pub hierarchy_reality: f64,
    /// `|tr M ∓ 2|` accepted as a ±1 monodromy.
    pub monodromy: f64,
    /// Blow-up guard: a step is rejected when max|U| grows by more than this factor.
    pub blow_up_factor: f64,
    /// Relative Dirac residual accepted as a kernel spinor.
    pub kernel: f64,
    /// Flow invariants checked by run reports.
    pub flow: FlowTolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowTolerances {
    pub willmore_drift: f64,
    pub constraint: f64,
    pub period_defect: f64,
    pub imag_u: f64,
    pub dirac: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            dbar_mean: 1e-10,
            reality: 1e-12,
            conformality: 1e-6,
            synthesis: 1e-6,
            period_defect: 1e-8,
            constraint: 1e-8,
            rhs_reality: 1e-10,
            hierarchy_reality: 1e-9,
            monodromy: 1e-6,
            blow_up_factor: 10.0,
            kernel: 1e-8,
            flow: FlowTolerances::default(),
        }
    }
}

impl Default for FlowTolerances {
    fn default() -> Self {
        Self {
            willmore_drift: 1e-6,
            constraint: 1e-9,
            period_defect: 1e-7,
            imag_u: 1e-9,
            dirac: 1e-6,
        }
    }
}
