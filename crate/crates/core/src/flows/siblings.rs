//! Sibling equations: KdV and mKdV on the line, NV, and the fifth-order
//! members NV2 and mNV2 of the two hierarchies.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft::{bin, fft1, freq};
use crate::field::{GridField, Spectrum};
use crate::spectral::{dbar_inverse_spectrum, product_spectra, Padding};
use crate::tolerances::Tolerances;

/// Real samples of a periodic function of one variable at `x_j = j·period/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub values: Vec<f64>,
    pub period: f64,
}

fn padded_len(n: usize, degree: usize) -> usize {
    let m = ((degree + 1) * n).div_ceil(2);
    m + m % 2
}

impl Line {
    pub fn new(values: Vec<f64>, period: f64) -> Result<Self> {
        if values.len() < 4 || !values.len().is_multiple_of(2) {
            return Err(Error::InvalidProfile(values.len()));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "period must be positive, got {period}"
            )));
        }
        Ok(Self { values, period })
    }

    pub fn from_fn(n: usize, period: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            (0..n).map(|j| f(j as f64 * period / n as f64)).collect(),
            period,
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn coeffs(&self) -> Vec<Complex64> {
        let n = self.len() as f64;
        let mut c: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        fft1(&mut c, FftDirection::Forward);
        c.iter_mut().for_each(|v| *v /= n);
        c
    }

    fn with_values(&self, values: Vec<f64>) -> Line {
        Line {
            values,
            period: self.period,
        }
    }

    /// `k`-th derivative; the Nyquist coefficient is dropped.
    pub fn deriv(&self, k: u32) -> Line {
        let n = self.len();
        let mut c = self.coeffs();
        for (b, v) in c.iter_mut().enumerate() {
            *v = if b == n / 2 {
                Complex64::default()
            } else {
                *v * Complex64::new(0.0, 2.0 * PI * freq(b, n) as f64 / self.period).powu(k)
            };
        }
        fft1(&mut c, FftDirection::Inverse);
        self.with_values(c.iter().map(|v| v.re).collect())
    }

    /// Product of 2–4 factors on a grid padded for the degree, truncated back.
    pub fn product(factors: &[&Line]) -> Line {
        let n = factors[0].len();
        let m = padded_len(n, factors.len());
        let mut acc = vec![Complex64::new(1.0, 0.0); m];
        for f in factors {
            let c = f.coeffs();
            let mut fine = vec![Complex64::default(); m];
            for (b, v) in c.iter().enumerate() {
                if b != n / 2 {
                    fine[bin(freq(b, n), m)] = *v;
                }
            }
            fft1(&mut fine, FftDirection::Inverse);
            acc.iter_mut().zip(&fine).for_each(|(a, b)| *a *= b);
        }
        fft1(&mut acc, FftDirection::Forward);
        let mut c = vec![Complex64::default(); n];
        for (b, v) in c.iter_mut().enumerate() {
            if b != n / 2 {
                *v = acc[bin(freq(b, n), m)] / m as f64;
            }
        }
        fft1(&mut c, FftDirection::Inverse);
        factors[0].with_values(c.iter().map(|v| v.re).collect())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn distance(&self, other: &Line) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `Σ c_i·f_i`.
    pub fn combine(terms: &[(f64, &Line)]) -> Line {
        let mut out = vec![0.0; terms[0].1.len()];
        for (c, f) in terms {
            out.iter_mut().zip(&f.values).for_each(|(o, v)| *o += c * v);
        }
        terms[0].1.with_values(out)
    }

    fn shift(&self, c: f64) -> Line {
        self.with_values(self.values.iter().map(|v| v + c).collect())
    }
}

/// `¼u_xxx + (3/2)uu_x`.
pub fn kdv_rhs(u: &Line) -> Line {
    Line::combine(&[
        (0.25, &u.deriv(3)),
        (1.5, &Line::product(&[u, &u.deriv(1)])),
    ])
}

/// `u_xxx + 24u²u_x`.
pub fn mkdv_rhs(u: &Line) -> Line {
    Line::combine(&[
        (1.0, &u.deriv(3)),
        (24.0, &Line::product(&[u, u, &u.deriv(1)])),
    ])
}

fn real_or_err(rhs: GridField, u: &GridField, tol: f64) -> Result<GridField> {
    let scale = rhs.max_abs().max(u.max_abs());
    if rhs.max_imag() > tol * scale {
        return Err(Error::NotReal {
            imag: rhs.max_imag(),
            scale,
        });
    }
    Ok(rhs.re())
}

/// Derivative `∂^k` or, mirrored, `∂̄^k`.
fn d(s: &Spectrum, k: u32, bar: bool) -> Spectrum {
    if bar {
        s.deriv(0, k)
    } else {
        s.deriv(k, 0)
    }
}

fn inv(s: &Spectrum, gauge: f64) -> Spectrum {
    dbar_inverse_spectrum(s, Complex64::new(gauge, 0.0), 1.0, f64::INFINITY)
        .expect("no tolerance on the zero mode")
}

/// NV flow `∂³U + ∂̄³U + ∂(VU) + ∂̄(V̄U)`, `∂̄V = 3∂U`, mean-zero `V`.
pub fn nv_rhs(u: &GridField) -> Result<GridField> {
    nv_rhs_with(u, 0.0, &Tolerances::default())
}

/// NV flow with `mean V = gauge`.
pub fn nv_rhs_with(u: &GridField, gauge: f64, tol: &Tolerances) -> Result<GridField> {
    u.require_trivial()?;
    let s = u.spectrum();
    let v = inv(&s.deriv(1, 0).scale(3.0), gauge);
    let pad = Padding::for_degree(u.lattice(), 2);
    let vu = product_spectra(&[&v, &s], pad);
    let vbu = product_spectra(&[&v.conj(), &s], pad);
    let rhs = s
        .deriv(3, 0)
        .axpy(1.0, &s.deriv(0, 3))
        .axpy(1.0, &vu.deriv(1, 0))
        .axpy(1.0, &vbu.deriv(0, 1));
    real_or_err(rhs.to_field(), u, tol.rhs_reality)
}

/// Second NV flow `Φ + Φ̄`, `Φ = ∂⁵U + ∂(V∂²U + V_z∂U + WU)`,
/// `∂̄V = 5∂U`, `∂̄W = 5∂³U + 3V∂U + V_zU`.
pub fn nv2_rhs(u: &GridField) -> Result<GridField> {
    u.require_trivial()?;
    let s = u.spectrum();
    let pad = Padding::for_degree(u.lattice(), 2);
    let v = inv(&s.deriv(1, 0).scale(5.0), 0.0);
    let w_src = s
        .deriv(3, 0)
        .scale(5.0)
        .axpy(3.0, &product_spectra(&[&v, &s.deriv(1, 0)], pad))
        .axpy(1.0, &product_spectra(&[&v.deriv(1, 0), &s], pad));
    let w = inv(&w_src, 0.0);
    let phi = |v: &Spectrum, w: &Spectrum, bar: bool| {
        let inner = product_spectra(&[v, &d(&s, 2, bar)], pad)
            .axpy(1.0, &product_spectra(&[&d(v, 1, bar), &d(&s, 1, bar)], pad))
            .axpy(1.0, &product_spectra(&[w, &s], pad));
        d(&s, 5, bar).axpy(1.0, &d(&inner, 1, bar))
    };
    let rhs = phi(&v, &w, false).axpy(1.0, &phi(&v.conj(), &w.conj(), true));
    real_or_err(rhs.to_field(), u, Tolerances::default().hierarchy_reality)
}

/// Reading of the token `U²_z` in the `W` constraint of the second mNV flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mnv2Reading {
    /// `(U_z)²`.
    #[default]
    SquareOfDerivative,
    /// `(U²)_z`.
    DerivativeOfSquare,
}

/// Second mNV flow `Φ + Φ̄` with
///
/// ```text
/// Φ = U_zzzzz + 5VU_zzz + (15/2)V_zU_zz + 5(V² − (3/2)V_zz + W)U_z
///     + 5(VV_z − V_zzz + W_z/2)U,
/// V_z̄ = (U²)_z,   W_z̄ = (U²V − U²_z)_z,
/// ```
///
/// `V`, `W` mean-zero, and `Φ̄` the same expression with `∂̄, V̄, W̄`.
pub fn mnv2_rhs(u: &GridField, reading: Mnv2Reading) -> Result<GridField> {
    u.require_trivial()?;
    let s = u.spectrum();
    let l = u.lattice();
    let pad2 = Padding::for_degree(l, 2);
    let pad3 = Padding::for_degree(l, 3);
    let u2 = product_spectra(&[&s, &s], pad2);
    let v = inv(&u2.deriv(1, 0), 0.0);
    let token = match reading {
        Mnv2Reading::SquareOfDerivative => {
            let uz = s.deriv(1, 0);
            product_spectra(&[&uz, &uz], pad2)
        }
        Mnv2Reading::DerivativeOfSquare => u2.deriv(1, 0),
    };
    let w = inv(
        &product_spectra(&[&s, &s, &v], pad3)
            .axpy(-1.0, &token)
            .deriv(1, 0),
        0.0,
    );

    let phi = |v: &Spectrum, w: &Spectrum, bar: bool| {
        let lift = |x: &Spectrum| pad3.lift(x);
        let (fu, f1, f2, f3, f5) = (
            lift(&s),
            lift(&d(&s, 1, bar)),
            lift(&d(&s, 2, bar)),
            lift(&d(&s, 3, bar)),
            d(&s, 5, bar),
        );
        let (fv, fv1, fv2, fv3) = (
            lift(v),
            lift(&d(v, 1, bar)),
            lift(&d(v, 2, bar)),
            lift(&d(v, 3, bar)),
        );
        let (fw, fw1) = (lift(w), lift(&d(w, 1, bar)));
        let nl: Vec<Complex64> = (0..pad3.len())
            .map(|k| {
                5.0 * fv[k] * f3[k]
                    + 7.5 * fv1[k] * f2[k]
                    + 5.0 * (fv[k] * fv[k] - 1.5 * fv2[k] + fw[k]) * f1[k]
                    + 5.0 * (fv[k] * fv1[k] - fv3[k] + 0.5 * fw1[k]) * fu[k]
            })
            .collect();
        f5.axpy(1.0, &pad3.restrict(nl, s.character()))
    };
    let rhs = phi(&v, &w, false).axpy(1.0, &phi(&v.conj(), &w.conj(), true));
    real_or_err(rhs.to_field(), u, Tolerances::default().hierarchy_reality)
}

/// The second mNV flow for `x`-only potentials, evaluated directly on the
/// line with `∂ = ∂̄ = ½∂_x`: `2Φ` with `V = U² − ⟨U²⟩`.
pub fn mnv2_rhs_1d(u: &Line, reading: Mnv2Reading) -> Line {
    let dz = |f: &Line, k: u32| {
        let g = f.deriv(k);
        let c = 0.5f64.powi(k as i32);
        g.with_values(g.values.iter().map(|v| v * c).collect())
    };
    let u2 = Line::product(&[u, u]);
    let v = u2.shift(-u2.mean());
    let token = match reading {
        Mnv2Reading::SquareOfDerivative => {
            let uz = dz(u, 1);
            Line::product(&[&uz, &uz])
        }
        Mnv2Reading::DerivativeOfSquare => dz(&u2, 1),
    };
    let w0 = Line::combine(&[(1.0, &Line::product(&[u, u, &v])), (-1.0, &token)]);
    let w = w0.shift(-w0.mean());
    let (u1, u2d, u3, u5) = (dz(u, 1), dz(u, 2), dz(u, 3), dz(u, 5));
    let (v1, v2, v3, w1) = (dz(&v, 1), dz(&v, 2), dz(&v, 3), dz(&w, 1));
    let coeff1 = Line::combine(&[(1.0, &Line::product(&[&v, &v])), (-1.5, &v2), (1.0, &w)]);
    let coeff0 = Line::combine(&[(1.0, &Line::product(&[&v, &v1])), (-1.0, &v3), (0.5, &w1)]);
    // Coefficients are themselves products; multiply with one more padding.
    let phi = Line::combine(&[
        (1.0, &u5),
        (5.0, &Line::product(&[&v, &u3])),
        (7.5, &Line::product(&[&v1, &u2d])),
        (5.0, &Line::product(&[&coeff1, &u1])),
        (5.0, &Line::product(&[&coeff0, u])),
    ]);
    Line::combine(&[(2.0, &phi)])
}
