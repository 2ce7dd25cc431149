use thiserror::Error;

use crate::lattice::SpinCharacter;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice generators are degenerate (normalized cell area {area:e})")]
    DegenerateLattice { area: f64 },

    #[error("grid resolution {n1}x{n2} invalid: each side must be even and at least 4")]
    InvalidResolution { n1: usize, n2: usize },

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("spin characters differ: {0} vs {1}")]
    CharacterMismatch(SpinCharacter, SpinCharacter),

    #[error("operation requires a trivially periodic field, got character {0}")]
    NontrivialCharacter(SpinCharacter),

    #[error("field has a component in the kernel of dbar: zero mode magnitude {magnitude:e}")]
    ZeroModeObstruction { magnitude: f64 },

    #[error("dealiased product takes 2 to 4 factors, got {0}")]
    FactorCount(usize),

    #[error("field is not real: max |Im| = {imag:e} (scale {scale:e})")]
    NotReal { imag: f64, scale: f64 },

    #[error("metric density vanishes at node ({j1}, {j2}): D = {value:e}")]
    VanishingDensity { j1: usize, j2: usize, value: f64 },

    #[error("parametrization is not conformal: relative isotropy defect {defect:e}")]
    NonConformal { defect: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spinor branch continuation is inconsistent at node ({j1}, {j2})")]
    BranchInconsistent { j1: usize, j2: usize },

    #[error("immersion equations are inconsistent: relative residual {residual:e}")]
    SynthesisInconsistent { residual: f64 },

    #[error("monodromy admits no (anti)periodic solution: eigenvalues {eigenvalues:?}")]
    MonodromyIncompatible {
        eigenvalues: [num_complex::Complex64; 2],
    },

    #[error("profile must have even length >= 4, got {0}")]
    InvalidProfile(usize),

    #[error("constraint dbar V = d(U^2) violated: residual {residual:e}")]
    ConstraintViolation { residual: f64 },

    #[error("time step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("blow-up guard tripped: max|U| went from {before:e} to {after:e}")]
    BlowUp { before: f64, after: f64 },

    #[error("Dirac operator has no kernel at any spin structure (best residual {residual:e})")]
    NoKernel { residual: f64 },

    #[error("malformed snapshot: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
