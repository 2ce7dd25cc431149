//! Closed-form test surfaces: the Clifford torus and round tori of revolution.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;

use super::{Immersion, SpinorPair, WeierstrassData};
use crate::error::{Error, Result};
use crate::field::GridField;
use crate::lattice::{PeriodicLattice, SpinCharacter};

/// `U(x) = sin x / (2√2 (√2 − sin x))`.
pub fn clifford_potential(x: f64) -> f64 {
    x.sin() / (2.0 * SQRT_2 * (SQRT_2 - x.sin()))
}

/// Profiles `(r₁, r₂)` with `ψ_i = r_i(x) e^{iy/2}`; both change sign over one period in `x`.
pub fn clifford_profiles(x: f64) -> (f64, f64) {
    let q = SQRT_2 - x.sin();
    let half = 0.5 * (x + FRAC_PI_4);
    let r1 = 2f64.powf(0.25) * (half.sin() - half.cos()) / q;
    let r2 = 2f64.powf(0.75) * half.cos() / q;
    (r1, r2)
}

/// `(−2 sin y, −2 cos y, 2 cos x) / (√2 − sin x)`: the stereographic image of
/// the flat torus in S³, oriented to match the spinors of [`clifford_torus`].
pub fn clifford_immersion(lattice: PeriodicLattice) -> Immersion {
    let coord = |f: fn(f64, f64) -> f64| {
        GridField::real_from_fn(lattice, move |x, y| f(x, y) / (SQRT_2 - x.sin()))
    };
    Immersion::closed([
        coord(|_, y| -2.0 * y.sin()),
        coord(|_, y| -2.0 * y.cos()),
        coord(|x, _| 2.0 * x.cos()),
    ])
    .expect("real periodic coordinates")
}

/// Weierstrass data, immersion and lattice of the Clifford torus on the
/// `2π × 2π` square; the spinors are anti-periodic along both generators.
pub fn clifford_torus(
    n1: usize,
    n2: usize,
) -> Result<(WeierstrassData, Immersion, PeriodicLattice)> {
    let lattice = PeriodicLattice::square_2pi(n1, n2)?;
    let ch = SpinCharacter::new(true, true);
    let u = GridField::real_from_fn(lattice, |x, _| clifford_potential(x));
    let spinor = |pick: fn((f64, f64)) -> f64| {
        GridField::from_fn(lattice, ch, |z| {
            pick(clifford_profiles(z.re)) * Complex64::from_polar(1.0, 0.5 * z.im)
        })
    };
    let psis = SpinorPair::new(spinor(|r| r.0), spinor(|r| r.1))?;
    let data = WeierstrassData::new(u, psis)?;
    Ok((data, clifford_immersion(lattice), lattice))
}

/// Torus of revolution with tube radius 1 and core radius `aspect > 1`, in
/// conformal coordinates: `x` runs along the tube over one period
/// `2π/√(aspect² − 1)`, `y ∈ [0, 2π)` around the axis.
///
/// Its Willmore energy is `π² aspect² / √(aspect² − 1)`.
pub fn round_torus(aspect: f64, n1: usize, n2: usize) -> Result<Immersion> {
    if !(aspect > 1.0 && aspect.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "torus aspect ratio must exceed 1, got {aspect}"
        )));
    }
    let root = (aspect * aspect - 1.0).sqrt();
    let period = 2.0 * PI / root;
    let lattice = PeriodicLattice::new(
        Complex64::new(period, 0.0),
        Complex64::new(0.0, 2.0 * PI),
        n1,
        n2,
    )?;
    let k = ((aspect + 1.0) / (aspect - 1.0)).sqrt();
    let omega = 0.5 * root;
    let angle = move |x: f64| 2.0 * (k * (omega * x).sin()).atan2((omega * x).cos());
    let coords = [
        GridField::real_from_fn(lattice, |x, y| (aspect + angle(x).cos()) * y.cos()),
        GridField::real_from_fn(lattice, |x, y| (aspect + angle(x).cos()) * y.sin()),
        GridField::real_from_fn(lattice, |x, _| angle(x).sin()),
    ];
    Immersion::closed(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_values() {
        assert_eq!(clifford_potential(0.0), 0.0);
        let expected = 1.0 / (2.0 * SQRT_2 * (SQRT_2 - 1.0));
        assert!((clifford_potential(PI / 2.0) - expected).abs() < 1e-15);
        assert!((expected - 0.853_553_390_593_274).abs() < 1e-14);
    }

    #[test]
    fn profiles_are_antiperiodic_with_density_two_over_q() {
        for k in 0..17 {
            let x = k as f64 * 0.4;
            let (a, b) = clifford_profiles(x);
            let (c, d) = clifford_profiles(x + 2.0 * PI);
            assert!((a + c).abs() < 1e-13 && (b + d).abs() < 1e-13);
            assert!((a * a + b * b - 2.0 / (SQRT_2 - x.sin())).abs() < 1e-13);
        }
    }

    #[test]
    fn round_torus_rejects_thin_core() {
        assert!(round_torus(1.0, 8, 8).is_err());
        assert!(round_torus(2.0, 8, 8).unwrap().is_closed(1e-12));
    }
}
