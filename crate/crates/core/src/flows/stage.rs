//! Nonlinear part of the coupled `(U, ψ)` flow evaluated on one padded grid.

use num_complex::Complex64;

use crate::field::Spectrum;
use crate::spectral::{dbar_inverse_spectrum, product_spectra, Padding};

/// Where V's mean comes from.
#[derive(Clone, Copy, Debug, PartialEq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gauge {
    /// `mean V = 0`.
    #[default]
    ZeroMean,
    /// `mean V = c`.
    Fixed(f64),
    /// `mean V = mean U²`; for `y`-independent `U` this makes `V = U²`.
    MeanSquare,
}

impl Gauge {
    pub(crate) fn value(&self, u2_mean: Complex64) -> Complex64 {
        match *self {
            Gauge::ZeroMean => Complex64::default(),
            Gauge::Fixed(c) => Complex64::new(c, 0.0),
            Gauge::MeanSquare => u2_mean,
        }
    }
}

/// `V` with `∂̄V = ∂(U²)`, `U²` formed without aliasing (or nodally when `dealias` is off).
pub(crate) fn potential_v(u: &Spectrum, gauge: Gauge, dealias: bool) -> Spectrum {
    let pad = if dealias {
        Padding::for_degree(u.lattice(), 2)
    } else {
        Padding::none(u.lattice())
    };
    let u2 = product_spectra(&[u, u], pad);
    let w = u2.deriv(1, 0);
    // ∂(U²) has no zero mode, so the obstruction check cannot fire.
    dbar_inverse_spectrum(&w, gauge.value(u2.zero_mode()), 1.0, f64::INFINITY)
        .expect("derivative has zero mean")
}

/// Symbol of `∂³ + ∂̄³` on every coefficient (Nyquist bins map to 0).
pub(crate) fn linear_symbol(s: &Spectrum) -> Vec<Complex64> {
    s.modes()
        .map(|m| {
            if m.nyquist {
                Complex64::default()
            } else {
                crate::spectral::symbol(m.wave, 3, 0) + crate::spectral::symbol(m.wave, 0, 3)
            }
        })
        .collect()
}

/// Nonlinear right-hand sides `(N_U, N_ψ₁, N_ψ₂)` of
///
/// ```text
/// U_t  = ∂³U + ∂̄³U + 3U_zV + (3/2)UV_z + 3U_z̄V̄ + (3/2)UV̄_z̄
/// ψ₁_t = ∂³ψ₁ + ∂̄³ψ₁ − 3U_z∂ψ₂ + 3V̄∂̄ψ₁ + 3UVψ₂ + (3/2)V̄_z̄ψ₁
/// ψ₂_t = ∂³ψ₂ + ∂̄³ψ₂ + 3V∂ψ₂ + 3U_z̄∂̄ψ₁ + (3/2)V_zψ₂ − 3UV̄ψ₁
/// ```
///
/// with every product formed on one grid padded for cubic terms.
pub(crate) fn nonlinear(
    u: &Spectrum,
    v: &Spectrum,
    psi: Option<(&Spectrum, &Spectrum)>,
    dealias: bool,
) -> (Spectrum, Option<(Spectrum, Spectrum)>) {
    let lattice = u.lattice();
    let pad = if dealias {
        Padding::for_degree(lattice, 3)
    } else {
        Padding::none(lattice)
    };
    let vb = v.conj();
    let fu = pad.lift(u);
    let fuz = pad.lift(&u.deriv(1, 0));
    let fuzb = pad.lift(&u.deriv(0, 1));
    let fv = pad.lift(v);
    let fvb = pad.lift(&vb);
    let fvz = pad.lift(&v.deriv(1, 0));
    let fvbzb = pad.lift(&vb.deriv(0, 1));

    let nu: Vec<Complex64> = (0..pad.len())
        .map(|k| {
            3.0 * fuz[k] * fv[k]
                + 1.5 * fu[k] * fvz[k]
                + 3.0 * fuzb[k] * fvb[k]
                + 1.5 * fu[k] * fvbzb[k]
        })
        .collect();
    let nu = pad.restrict(nu, u.character());

    let npsi = psi.map(|(p1, p2)| {
        let ch = p1.character();
        let fp1 = pad.lift(p1);
        let fp2 = pad.lift(p2);
        let fdp2 = pad.lift(&p2.deriv(1, 0));
        let fdbp1 = pad.lift(&p1.deriv(0, 1));
        let mut n1 = Vec::with_capacity(pad.len());
        let mut n2 = Vec::with_capacity(pad.len());
        for k in 0..pad.len() {
            n1.push(
                -3.0 * fuz[k] * fdp2[k]
                    + 3.0 * fvb[k] * fdbp1[k]
                    + 3.0 * fu[k] * fv[k] * fp2[k]
                    + 1.5 * fvbzb[k] * fp1[k],
            );
            n2.push(
                3.0 * fv[k] * fdp2[k] + 3.0 * fuzb[k] * fdbp1[k] + 1.5 * fvz[k] * fp2[k]
                    - 3.0 * fu[k] * fvb[k] * fp1[k],
            );
        }
        (pad.restrict(n1, ch), pad.restrict(n2, ch))
    });
    (nu, npsi)
}
