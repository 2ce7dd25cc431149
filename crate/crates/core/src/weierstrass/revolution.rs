//! Potentials depending on `x` only: spinors `ψ_i = r_i(x) e^{iy/2}` with
//!
//! ```text
//! r₁' = −r₁/2 + 2U r₂,    r₂' = r₂/2 − 2U r₁
//! ```
//!
//! integrated over one period of the profile.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;

use super::{SpinorPair, WeierstrassData};
use crate::error::{Error, Result};
use crate::fft::{bin, fft1, freq};
use crate::field::GridField;
use crate::lattice::{PeriodicLattice, SpinCharacter};
use crate::tolerances::Tolerances;

/// RK4 sub-steps per grid cell.
const OVERSAMPLE: usize = 64;

/// Spinors built from a potential alone are scaled to this mean of `D`.
pub const NORMALIZED_MEAN_DENSITY: f64 = 2.0;

/// Period map of the profile ODE.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monodromy {
    pub matrix: [[f64; 2]; 2],
    pub eigenvalues: [Complex64; 2],
}

impl Monodromy {
    pub fn trace(&self) -> f64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    /// `Some(±1)` when the trace is within `tol` of `±2`: a periodic or
    /// anti-periodic solution exists.
    pub fn sign(&self, tol: f64) -> Option<f64> {
        let t = self.trace();
        if (t - 2.0).abs() <= tol {
            Some(1.0)
        } else if (t + 2.0).abs() <= tol {
            Some(-1.0)
        } else {
            None
        }
    }
}

struct Profile {
    /// Samples at `x = k·h/2`, `k = 0..2·steps`.
    fine: Vec<f64>,
    h: f64,
    steps: usize,
}

impl Profile {
    fn new(samples: &[f64], period: f64) -> Result<Self> {
        let n = samples.len();
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidProfile(n));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "profile period must be positive, got {period}"
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "profile contains non-finite samples".into(),
            ));
        }
        let steps = n * OVERSAMPLE;
        let m = 2 * steps;
        let mut c: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft1(&mut c, FftDirection::Forward);
        let mut fine = vec![Complex64::default(); m];
        for (b, coeff) in c.iter().enumerate() {
            let f = freq(b, n);
            let coeff = coeff / n as f64;
            if b == n / 2 {
                fine[bin(f, m)] += 0.5 * coeff;
                fine[bin(-f, m)] += 0.5 * coeff;
            } else {
                fine[bin(f, m)] += coeff;
            }
        }
        fft1(&mut fine, FftDirection::Inverse);
        Ok(Self {
            fine: fine.iter().map(|v| v.re).collect(),
            h: period / steps as f64,
            steps,
        })
    }

    fn at(&self, k: usize) -> f64 {
        self.fine[k % self.fine.len()]
    }

    /// Advances `r` across sub-step `s`.
    fn rk4(&self, s: usize, r: [f64; 2]) -> [f64; 2] {
        let f = |u: f64, r: [f64; 2]| [-0.5 * r[0] + 2.0 * u * r[1], 0.5 * r[1] - 2.0 * u * r[0]];
        let h = self.h;
        let (u0, um, u1) = (self.at(2 * s), self.at(2 * s + 1), self.at(2 * s + 2));
        let k1 = f(u0, r);
        let k2 = f(um, [r[0] + 0.5 * h * k1[0], r[1] + 0.5 * h * k1[1]]);
        let k3 = f(um, [r[0] + 0.5 * h * k2[0], r[1] + 0.5 * h * k2[1]]);
        let k4 = f(u1, [r[0] + h * k3[0], r[1] + h * k3[1]]);
        [
            r[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            r[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    }

    /// Solution values at the `n` grid nodes and after one full period.
    fn solve(&self, r0: [f64; 2], n: usize) -> (Vec<[f64; 2]>, [f64; 2]) {
        let mut r = r0;
        let mut nodes = Vec::with_capacity(n);
        for s in 0..self.steps {
            if s % OVERSAMPLE == 0 {
                nodes.push(r);
            }
            r = self.rk4(s, r);
        }
        (nodes, r)
    }
}

fn eigenvalues(m: [[f64; 2]; 2]) -> [Complex64; 2] {
    let t = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = Complex64::new(t * t - 4.0 * det, 0.0).sqrt();
    [(t + disc) / 2.0, (t - disc) / 2.0]
}

/// Monodromy of the profile ODE over one period.
pub fn monodromy(profile: &[f64], period: f64) -> Result<Monodromy> {
    let p = Profile::new(profile, period)?;
    let (_, c1) = p.solve([1.0, 0.0], profile.len());
    let (_, c2) = p.solve([0.0, 1.0], profile.len());
    let matrix = [[c1[0], c2[0]], [c1[1], c2[1]]];
    Ok(Monodromy {
        matrix,
        eigenvalues: eigenvalues(matrix),
    })
}

/// Spinors for an `x`-only potential on the lattice `(period, 2πi)`.
///
/// The spin character is anti-periodic along `y` and carries the monodromy
/// sign along `x`. Spinors are scaled to mean `D` equal to
/// [`NORMALIZED_MEAN_DENSITY`] with `r₂(0) ≥ 0`.
pub fn revolution_data(profile: &[f64], period: f64, n2: usize) -> Result<WeierstrassData> {
    let tol = Tolerances::default();
    let n1 = profile.len();
    let p = Profile::new(profile, period)?;
    let (cols1, c1) = p.solve([1.0, 0.0], n1);
    let (cols2, c2) = p.solve([0.0, 1.0], n1);
    let matrix = [[c1[0], c2[0]], [c1[1], c2[1]]];
    let mono = Monodromy {
        matrix,
        eigenvalues: eigenvalues(matrix),
    };
    let s = mono
        .sign(tol.monodromy)
        .ok_or(Error::MonodromyIncompatible {
            eigenvalues: mono.eigenvalues,
        })?;

    let rows = [
        [matrix[0][0] - s, matrix[0][1]],
        [matrix[1][0], matrix[1][1] - s],
    ];
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let big = if norm(rows[0]) >= norm(rows[1]) {
        rows[0]
    } else {
        rows[1]
    };
    let scale = matrix.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    let v = if norm(big) > tol.monodromy * scale {
        [-big[1], big[0]]
    } else {
        closing_vector(&cols1, &cols2)
    };

    let mut r: Vec<[f64; 2]> = cols1
        .iter()
        .zip(&cols2)
        .map(|(a, b)| [v[0] * a[0] + v[1] * b[0], v[0] * a[1] + v[1] * b[1]])
        .collect();
    let mean_d = r.iter().map(|x| x[0] * x[0] + x[1] * x[1]).sum::<f64>() / n1 as f64;
    let mut k = (NORMALIZED_MEAN_DENSITY / mean_d).sqrt();
    let lead = if r[0][1].abs() > 1e-12 * norm(r[0]) {
        r[0][1]
    } else {
        r[0][0]
    };
    if lead < 0.0 {
        k = -k;
    }
    r.iter_mut().for_each(|x| *x = [k * x[0], k * x[1]]);

    let lattice = PeriodicLattice::new(
        Complex64::new(period, 0.0),
        Complex64::new(0.0, 2.0 * PI),
        n1,
        n2,
    )?;
    let ch = SpinCharacter::new(s < 0.0, true);
    let n2f = n2 as f64;
    let spinor = |c: usize| {
        let mut values = Vec::with_capacity(lattice.len());
        for row in &r {
            for j2 in 0..n2 {
                values.push(row[c] * Complex64::from_polar(1.0, PI * j2 as f64 / n2f));
            }
        }
        GridField::new(lattice, ch, values)
    };
    let psis = SpinorPair::new(spinor(0)?, spinor(1)?)?;
    let mut u = Vec::with_capacity(lattice.len());
    for &v in profile {
        u.extend(std::iter::repeat_n(Complex64::new(v, 0.0), n2));
    }
    WeierstrassData::new(GridField::new(lattice, SpinCharacter::TRIVIAL, u)?, psis)
}

/// When every solution closes up, pick one with `∫ r₁r₂ dx = 0` so the
/// surface closes along `x` as well; otherwise the least open one.
fn closing_vector(a: &[[f64; 2]], b: &[[f64; 2]]) -> [f64; 2] {
    let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        p += x[0] * x[1];
        q += 0.5 * (x[0] * y[1] + y[0] * x[1]);
        r += y[0] * y[1];
    }
    let disc = q * q - p * r;
    if p.abs() < 1e-14 * (q.abs() + r.abs()) {
        return [1.0, 0.0];
    }
    if disc >= 0.0 {
        return [(-q + disc.sqrt()) / p, 1.0];
    }
    // Eigenvector of [[p, q], [q, r]] for the eigenvalue of least modulus.
    let mean = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
    let lam = if (mean - rad).abs() < (mean + rad).abs() {
        mean - rad
    } else {
        mean + rad
    };
    if q.abs() > 0.0 {
        [lam - r, q]
    } else if (p - lam).abs() < (r - lam).abs() {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    }
}

#[cfg(test)]
mod tests {
    use super::super::clifford_potential;
    use super::super::clifford_profiles;
    use super::*;

    fn clifford_profile(n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| clifford_potential(2.0 * PI * j as f64 / n as f64))
            .collect()
    }

    #[test]
    fn clifford_profile_is_antiperiodic() {
        let m = monodromy(&clifford_profile(32), 2.0 * PI).unwrap();
        assert_eq!(m.sign(1e-6), Some(-1.0));
    }

    #[test]
    fn recovers_clifford_spinors() {
        let n = 64;
        let data = revolution_data(&clifford_profile(n), 2.0 * PI, 8).unwrap();
        assert_eq!(data.psis().character(), SpinCharacter::new(true, true));
        for j in 0..n {
            let (r1, r2) = clifford_profiles(2.0 * PI * j as f64 / n as f64);
            assert!((data.psis().psi1().at(j, 0).re - r1).abs() < 1e-8);
            assert!((data.psis().psi2().at(j, 0).re - r2).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_potential_has_hyperbolic_monodromy() {
        let err = revolution_data(&[0.0; 8], 2.0 * PI, 8).unwrap_err();
        let Error::MonodromyIncompatible { eigenvalues } = err else {
            panic!("unexpected {err:?}")
        };
        assert!((eigenvalues[0].re - PI.exp()).abs() < 1e-9);
        assert!((eigenvalues[1].re - (-PI).exp()).abs() < 1e-9);
    }

    #[test]
    fn odd_profile_rejected() {
        assert!(matches!(
            monodromy(&[0.0; 5], 1.0),
            Err(Error::InvalidProfile(5))
        ));
    }
}
