//! Seeded random band-limited fields for property checks.

use num_complex::Complex64;
use rand::Rng;

use crate::field::{GridField, Spectrum};
use crate::lattice::{PeriodicLattice, SpinCharacter};

/// Random field whose Fourier coefficients vanish beyond `max_mode` on
/// either axis and decay like `e^{−(|m₁|+|m₂|)/2}` below it.
pub fn random_smooth_field(
    lattice: PeriodicLattice,
    character: SpinCharacter,
    max_mode: f64,
    rng: &mut impl Rng,
) -> GridField {
    let mut s = Spectrum::zeros(lattice, character);
    let modes: Vec<_> = s.modes().collect();
    for m in modes {
        if m.m1.abs() <= max_mode && m.m2.abs() <= max_mode && !m.nyquist {
            let amp = (-(m.m1.abs() + m.m2.abs()) / 2.0).exp();
            s.coeffs_mut()[m.index] =
                amp * Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    s.to_field()
}

/// Real part of [`random_smooth_field`] with trivial character.
pub fn random_real_field(lattice: PeriodicLattice, max_mode: f64, rng: &mut impl Rng) -> GridField {
    random_smooth_field(lattice, SpinCharacter::TRIVIAL, max_mode, rng).re()
}
