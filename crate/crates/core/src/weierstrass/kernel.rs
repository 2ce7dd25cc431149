//! Numerical kernel of the Dirac operator `L = [[∂, −U], [U, ∂̄]]` for a
//! given potential, by shifted inverse iteration on `L*L`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{SpinorPair, WeierstrassData, NORMALIZED_MEAN_DENSITY};
use crate::error::{Error, Result};
use crate::field::{GridField, Spectrum};
use crate::lattice::SpinCharacter;
use crate::spectral::{d_z, d_zbar};
use crate::tolerances::Tolerances;

const OUTER_ITERATIONS: usize = 4;
const MAX_CG: usize = 2000;

/// A kernel element together with its relative residual.
#[derive(Clone, Debug)]
pub struct KernelSpinor {
    pub data: WeierstrassData,
    pub residual: f64,
}

pub fn dirac_kernel(u: &GridField) -> Result<KernelSpinor> {
    dirac_kernel_with(u, &SpinCharacter::all(), Tolerances::default().kernel)
}

/// Searches each candidate spin structure and keeps the one whose
/// smallest singular vector of `L` has the least relative residual
/// `‖Lψ‖ / (ω‖ψ‖)`, `ω` the smallest nonzero `|∂|` symbol on the lattice.
///
/// The kernel is quaternionic (`(ψ₁, ψ₂) ↦ (ψ̄₂, −ψ̄₁)` preserves it), so the
/// returned element is one representative of a rotation family.
pub fn dirac_kernel_with(
    u: &GridField,
    characters: &[SpinCharacter],
    tol: f64,
) -> Result<KernelSpinor> {
    u.require_trivial()?;
    u.require_real(Tolerances::default().reality)?;
    let mut best: Option<(f64, SpinorPair)> = None;
    for &ch in characters {
        let (res, psis) = smallest_singular(u, ch);
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, psis));
        }
    }
    let (residual, psis) = best.ok_or(Error::NoKernel {
        residual: f64::INFINITY,
    })?;
    if residual > tol {
        return Err(Error::NoKernel { residual });
    }
    let mean_d = (0..psis.lattice().len())
        .map(|k| psis.psi1().values()[k].norm_sqr() + psis.psi2().values()[k].norm_sqr())
        .sum::<f64>()
        / psis.lattice().len() as f64;
    let psis = psis.scale(Complex64::new(
        (NORMALIZED_MEAN_DENSITY / mean_d).sqrt(),
        0.0,
    ));
    Ok(KernelSpinor {
        data: WeierstrassData::new(u.clone(), psis)?,
        residual,
    })
}

struct Pair(Spectrum, Spectrum);

impl Pair {
    fn dot(&self, o: &Pair) -> Complex64 {
        let d = |a: &Spectrum, b: &Spectrum| {
            a.coeffs()
                .iter()
                .zip(b.coeffs())
                .map(|(x, y)| x.conj() * y)
                .sum::<Complex64>()
        };
        d(&self.0, &o.0) + d(&self.1, &o.1)
    }

    fn norm(&self) -> f64 {
        self.dot(self).re.max(0.0).sqrt()
    }

    fn axpy(&self, s: Complex64, o: &Pair) -> Pair {
        Pair(self.0.axpy(s, &o.0), self.1.axpy(s, &o.1))
    }

    fn scale(&self, s: f64) -> Pair {
        Pair(self.0.scale(s), self.1.scale(s))
    }
}

struct Problem<'a> {
    u: &'a GridField,
    shift: f64,
    precond_floor: f64,
}

impl Problem<'_> {
    fn apply_l(&self, p: &Pair) -> (GridField, GridField) {
        let (a, b) = (p.0.to_field(), p.1.to_field());
        let r1 = d_z(&a)
            .try_sub(&self.u.try_mul(&b).expect("same grid"))
            .expect("same character");
        let r2 = d_zbar(&b)
            .try_add(&self.u.try_mul(&a).expect("same grid"))
            .expect("same character");
        (r1, r2)
    }

    /// `(L*L + shift) p` restricted to non-Nyquist modes.
    fn normal(&self, p: &Pair) -> Pair {
        let (r1, r2) = self.apply_l(p);
        let s1 = d_zbar(&r1)
            .scale(-1.0)
            .try_add(&self.u.try_mul(&r2).expect("same grid"))
            .expect("same character");
        let s2 = d_z(&r2)
            .try_add(&self.u.try_mul(&r1).expect("same grid"))
            .expect("same character")
            .scale(-1.0);
        Pair(s1.spectrum().drop_nyquist(), s2.spectrum().drop_nyquist())
            .axpy(Complex64::new(self.shift, 0.0), p)
    }

    fn precondition(&self, p: &Pair) -> Pair {
        let f = |s: &Spectrum| {
            let mut out = s.clone();
            for m in s.modes() {
                out.coeffs_mut()[m.index] = if m.nyquist {
                    Complex64::default()
                } else {
                    s.coeffs()[m.index] / (PI * PI * m.wave.norm_sqr() + self.precond_floor)
                };
            }
            out
        };
        Pair(f(&p.0), f(&p.1))
    }

    fn solve(&self, b: &Pair) -> Pair {
        let mut x = Pair(
            Spectrum::zeros(*b.0.lattice(), b.0.character()),
            Spectrum::zeros(*b.1.lattice(), b.1.character()),
        );
        let mut r = b.scale(1.0);
        let mut z = self.precondition(&r);
        let mut p = z.scale(1.0);
        let mut rz = r.dot(&z).re;
        let target = 1e-13 * b.norm();
        for _ in 0..MAX_CG {
            let ap = self.normal(&p);
            let alpha = rz / p.dot(&ap).re;
            x = x.axpy(Complex64::new(alpha, 0.0), &p);
            r = r.axpy(Complex64::new(-alpha, 0.0), &ap);
            if r.norm() < target {
                break;
            }
            z = self.precondition(&r);
            let rz_new = r.dot(&z).re;
            p = z.axpy(Complex64::new(rz_new / rz, 0.0), &p);
            rz = rz_new;
        }
        x
    }
}

fn smallest_singular(u: &GridField, ch: SpinCharacter) -> (f64, SpinorPair) {
    let l = *u.lattice();
    let probe = Spectrum::zeros(l, ch);
    let omega = probe
        .modes()
        .filter(|m| m.wave.norm_sqr() > 0.0)
        .map(|m| PI * m.wave.norm())
        .fold(f64::INFINITY, f64::min);
    let u2 = u.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / l.len() as f64;
    let problem = Problem {
        u,
        shift: 1e-6 * (omega * omega + u2),
        precond_floor: omega * omega + u2,
    };

    // Deterministic start spread over the lowest modes.
    let start = |seed: f64| {
        let mut s = Spectrum::zeros(l, ch);
        for m in probe.modes() {
            if m.m1.abs() <= 1.5 && m.m2.abs() <= 1.5 && !m.nyquist {
                let phase = seed + 0.7 * m.m1 + 1.3 * m.m2;
                s.coeffs_mut()[m.index] =
                    Complex64::from_polar(1.0 / (1.0 + m.m1.abs() + m.m2.abs()), phase);
            }
        }
        s
    };
    let mut x = Pair(start(0.1), start(2.3));
    x = x.scale(1.0 / x.norm());
    for _ in 0..OUTER_ITERATIONS {
        let y = problem.solve(&x);
        x = y.scale(1.0 / y.norm());
    }
    let (r1, r2) = problem.apply_l(&x);
    let psis = SpinorPair::new(x.0.to_field(), x.1.to_field()).expect("shared character");
    let norm = (psis.psi1().rms().powi(2) + psis.psi2().rms().powi(2)).sqrt();
    let res = (r1.rms().powi(2) + r2.rms().powi(2)).sqrt() / (omega * norm);
    (res, psis)
}
