//! Spectral simulation of tori in Weierstrass form under the modified
//! Novikov–Veselov flow, with the geometric checks that go with it.

// Negated comparisons make NaN fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fft;
pub mod field;
pub mod flows;
pub mod io;
pub mod lattice;
pub mod sample;
pub mod spectral;
pub mod tolerances;
pub mod verify;
pub mod weierstrass;
pub mod willmore;

pub use error::{Error, Result};
pub use field::{GridField, Spectrum};
pub use lattice::{PeriodicLattice, SpinCharacter};
pub use num_complex::Complex64;
pub use tolerances::Tolerances;
pub use weierstrass::{Immersion, SpinorPair, WeierstrassData};
