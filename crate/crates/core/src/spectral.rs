//! Fourier differentiation, `∂̄` inversion, dealiased products and
//! integration on the torus `C/Γ`.
//!
//! On the plane wave `exp(2πi⟨k, z⟩)`, `c = k_x + i k_y`:
//! `∂ ↦ πi·c̄`, `∂̄ ↦ πi·c`, `Δ = 4∂∂̄ ↦ −4π²|c|²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft::{self, bin, freq};
use crate::field::{apply_phase, GridField, Spectrum};
use crate::lattice::{PeriodicLattice, SpinCharacter};
use crate::tolerances::Tolerances;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn dz_symbol(c: Complex64) -> Complex64 {
    I * PI * c.conj()
}

#[inline]
pub fn dzbar_symbol(c: Complex64) -> Complex64 {
    I * PI * c
}

/// Symbol of `∂^p ∂̄^q`.
#[inline]
pub fn symbol(c: Complex64, p: u32, q: u32) -> Complex64 {
    dz_symbol(c).powu(p) * dzbar_symbol(c).powu(q)
}

impl Spectrum {
    /// `∂^p ∂̄^q` in coefficient space.
    pub fn deriv(&self, p: u32, q: u32) -> Spectrum {
        self.apply(|c| symbol(c, p, q))
    }
}

pub fn d_z(f: &GridField) -> GridField {
    f.spectrum().deriv(1, 0).to_field()
}

pub fn d_zbar(f: &GridField) -> GridField {
    f.spectrum().deriv(0, 1).to_field()
}

/// `∂^p ∂̄^q f`.
pub fn deriv(f: &GridField, p: u32, q: u32) -> GridField {
    f.spectrum().deriv(p, q).to_field()
}

pub fn d_x(f: &GridField) -> GridField {
    f.spectrum().apply(|c| 2.0 * PI * I * c.re).to_field()
}

pub fn d_y(f: &GridField) -> GridField {
    f.spectrum().apply(|c| 2.0 * PI * I * c.im).to_field()
}

/// Flat Laplacian `∂²/∂x² + ∂²/∂y²`.
pub fn laplacian(f: &GridField) -> GridField {
    f.spectrum()
        .apply(|c| Complex64::new(-4.0 * PI * PI * c.norm_sqr(), 0.0))
        .to_field()
}

/// Which first-order operator to invert.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Inverse {
    Dz,
    Dzbar,
}

fn invert(
    f: &Spectrum,
    which: Inverse,
    gauge: Complex64,
    scale: f64,
    tol_mean: f64,
) -> Result<Spectrum> {
    let zero = f.zero_mode();
    if zero.norm() > tol_mean * scale {
        return Err(Error::ZeroModeObstruction {
            magnitude: zero.norm(),
        });
    }
    let mut out = f.apply(|c| {
        if c.norm_sqr() == 0.0 {
            Complex64::default()
        } else {
            match which {
                Inverse::Dz => 1.0 / dz_symbol(c),
                Inverse::Dzbar => 1.0 / dzbar_symbol(c),
            }
        }
    });
    if f.character().is_trivial() {
        out.coeffs_mut()[0] = gauge;
    }
    Ok(out)
}

/// Solves `∂̄g = f` with `mean(g) = 0`, using the default zero-mode tolerance.
///
/// Anti-periodic `f` has no kernel component and always inverts.
pub fn dbar_inverse(f: &GridField) -> Result<GridField> {
    dbar_inverse_with(f, Complex64::default(), Tolerances::default().dbar_mean)
}

/// Solves `∂̄g = f` with `mean(g) = gauge`; fails when `|mean f| > tol_mean·max|f|`.
pub fn dbar_inverse_with(f: &GridField, gauge: Complex64, tol_mean: f64) -> Result<GridField> {
    Ok(invert(&f.spectrum(), Inverse::Dzbar, gauge, f.max_abs(), tol_mean)?.to_field())
}

/// Solves `∂g = f` with `mean(g) = 0`.
pub fn dz_inverse(f: &GridField) -> Result<GridField> {
    dz_inverse_with(f, Complex64::default(), Tolerances::default().dbar_mean)
}

pub fn dz_inverse_with(f: &GridField, gauge: Complex64, tol_mean: f64) -> Result<GridField> {
    Ok(invert(&f.spectrum(), Inverse::Dz, gauge, f.max_abs(), tol_mean)?.to_field())
}

/// Spectrum-level inverse of `∂̄`; `scale` sets the zero-mode tolerance reference.
pub fn dbar_inverse_spectrum(
    f: &Spectrum,
    gauge: Complex64,
    scale: f64,
    tol_mean: f64,
) -> Result<Spectrum> {
    invert(f, Inverse::Dzbar, gauge, scale, tol_mean)
}

/// Spectrum-level inverse of `∂`.
pub fn dz_inverse_spectrum(
    f: &Spectrum,
    gauge: Complex64,
    scale: f64,
    tol_mean: f64,
) -> Result<Spectrum> {
    invert(f, Inverse::Dz, gauge, scale, tol_mean)
}

/// A zero-padded grid large enough to multiply `degree` band-limited
/// factors without aliasing into the retained band.
#[derive(Clone, Copy, Debug)]
pub struct Padding {
    base: PeriodicLattice,
    m1: usize,
    m2: usize,
}

fn padded_len(n: usize, degree: usize) -> usize {
    let m = ((degree + 1) * n).div_ceil(2);
    m + m % 2
}

impl Padding {
    pub fn for_degree(base: &PeriodicLattice, degree: usize) -> Self {
        let degree = degree.max(1);
        Self {
            base: *base,
            m1: padded_len(base.n1(), degree),
            m2: padded_len(base.n2(), degree),
        }
    }

    /// No padding: products become plain nodal products (aliased).
    pub fn none(base: &PeriodicLattice) -> Self {
        Self {
            base: *base,
            m1: base.n1(),
            m2: base.n2(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m1, self.m2)
    }

    pub fn len(&self) -> usize {
        self.m1 * self.m2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Samples the band-limited interpolant of `s` on the padded grid.
    pub fn lift(&self, s: &Spectrum) -> Vec<Complex64> {
        debug_assert_eq!(s.lattice(), &self.base);
        let (n1, n2) = (self.base.n1(), self.base.n2());
        let (m1, m2) = (self.m1, self.m2);
        let mut fine = vec![Complex64::default(); m1 * m2];
        for mode in s.modes() {
            if mode.nyquist && (m1, m2) != (n1, n2) {
                continue;
            }
            let (b1, b2) = (mode.index / n2, mode.index % n2);
            let f1 = bin(freq(b1, n1), m1);
            let f2 = bin(freq(b2, n2), m2);
            fine[f1 * m2 + f2] = s.coeffs()[mode.index];
        }
        fft::fft2(&mut fine, m1, m2, FftDirection::Inverse);
        apply_phase(&mut fine, m1, m2, s.character(), 1.0);
        fine
    }

    /// Transforms padded samples of a field with character `ch` and keeps
    /// the base band (Nyquist bins of periodic axes dropped).
    pub fn restrict(&self, mut fine: Vec<Complex64>, ch: SpinCharacter) -> Spectrum {
        let (n1, n2) = (self.base.n1(), self.base.n2());
        let (m1, m2) = (self.m1, self.m2);
        apply_phase(&mut fine, m1, m2, ch, -1.0);
        fft::fft2(&mut fine, m1, m2, FftDirection::Forward);
        let norm = 1.0 / (m1 * m2) as f64;
        let mut out = Spectrum::zeros(self.base, ch);
        let idx: Vec<(usize, bool)> = out.modes().map(|m| (m.index, m.nyquist)).collect();
        let aliased = (m1, m2) == (n1, n2);
        for (index, nyquist) in idx {
            if nyquist && !aliased {
                continue;
            }
            let (b1, b2) = (index / n2, index % n2);
            let f1 = bin(freq(b1, n1), m1);
            let f2 = bin(freq(b2, n2), m2);
            out.coeffs_mut()[index] = fine[f1 * m2 + f2] * norm;
        }
        out
    }
}

/// Pointwise product of 2–4 factors evaluated on a zero-padded grid and
/// truncated back; the result's character is the sum of the factors'.
pub fn dealiased_product(fs: &[&GridField]) -> Result<GridField> {
    if !(2..=4).contains(&fs.len()) {
        return Err(Error::FactorCount(fs.len()));
    }
    for f in &fs[1..] {
        fs[0].check_same_lattice(f)?;
    }
    let spectra: Vec<Spectrum> = fs.iter().map(|f| f.spectrum()).collect();
    let refs: Vec<&Spectrum> = spectra.iter().collect();
    Ok(product_spectra(&refs, Padding::for_degree(fs[0].lattice(), fs.len())).to_field())
}

/// Product of spectra on the given padding.
pub fn product_spectra(fs: &[&Spectrum], pad: Padding) -> Spectrum {
    let mut ch = SpinCharacter::TRIVIAL;
    let mut acc: Option<Vec<Complex64>> = None;
    for s in fs {
        ch = ch + s.character();
        let lifted = pad.lift(s);
        acc = Some(match acc {
            None => lifted,
            Some(mut a) => {
                a.iter_mut().zip(&lifted).for_each(|(x, y)| *x *= y);
                a
            }
        });
    }
    pad.restrict(acc.expect("at least one factor"), ch)
}

/// Result of integrating over the fundamental domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    /// The integrand was anti-periodic, so the integral is identically zero.
    pub vanishes_by_symmetry: bool,
}

/// `∫ f dx dy` over one cell, as `mean × area`.
pub fn integrate(f: &GridField) -> Integral {
    if !f.is_trivial() {
        return Integral {
            value: Complex64::default(),
            vanishes_by_symmetry: true,
        };
    }
    Integral {
        value: f.mean() * f.lattice().area(),
        vanishes_by_symmetry: false,
    }
}
