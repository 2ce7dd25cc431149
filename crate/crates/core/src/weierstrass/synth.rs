//! Integrating the closed forms of the representation into `X: C/Γ → R³`.

use num_complex::Complex64;

use super::{Immersion, SpinorPair};
use crate::error::{Error, Result};
use crate::field::{GridField, Spectrum};
use crate::spectral::{dz_symbol, dzbar_symbol};
use crate::tolerances::Tolerances;

pub fn synthesize_immersion(psis: &SpinorPair) -> Result<Immersion> {
    synthesize_immersion_with(psis, &Tolerances::default())
}

/// Solves `∂(X¹+iX²) = iψ̄₁²`, `∂̄(X¹+iX²) = −iψ̄₂²`, `∂X³ = −ψ₂ψ̄₁`
/// mode by mode in the least-squares sense.
///
/// Zero modes of the data become the linear part (and thus the period
/// defect); the periodic part has mean zero. Fails when the relative
/// least-squares residual exceeds `tol.synthesis`, which happens exactly
/// when the data violate the Dirac system.
pub fn synthesize_immersion_with(psis: &SpinorPair, tol: &Tolerances) -> Result<Immersion> {
    let i = Complex64::i();
    let (p1, p2) = (psis.psi1(), psis.psi2());
    let a = p1.conj().try_mul(&p1.conj())?.scale(i);
    let b = p2.conj().try_mul(&p2.conj())?.scale(-i);
    let g3 = p2.try_mul(&p1.conj())?.scale(-1.0);

    let (w, w_lin, rw) = solve_pair(&a.spectrum(), &b.spectrum());
    let (x3, x3_lin, r3) = solve_pair(&g3.spectrum(), &g3.conj().spectrum());
    let residual = rw.max(r3);
    if residual > tol.synthesis {
        return Err(Error::SynthesisInconsistent { residual });
    }
    let linear = [
        [w_lin[0].re, w_lin[1].re],
        [w_lin[0].im, w_lin[1].im],
        [x3_lin[0].re, x3_lin[1].re],
    ];
    Immersion::new([w.re(), w.im(), x3.re()], linear)
}

/// Period defect `[j][a]` read off the zero modes of the integrands alone,
/// without checking that the data are consistent.
pub fn period_defect(psis: &SpinorPair) -> Result<[[f64; 3]; 2]> {
    let i = Complex64::i();
    let (p1, p2) = (psis.psi1(), psis.psi2());
    let a = p1.conj().try_mul(&p1.conj())?.mean() * i;
    let b = p2.conj().try_mul(&p2.conj())?.mean() * (-i);
    let g3 = -p2.try_mul(&p1.conj())?.mean();
    let (w0, w1) = (a + b, i * (a - b));
    let (x0, x1) = (g3 + g3.conj(), i * (g3 - g3.conj()));
    let linear = [[w0.re, w1.re], [w0.im, w1.im], [x0.re, x1.re]];
    let l = psis.lattice();
    let mut out = [[0.0; 3]; 2];
    for (j, g) in [l.gen1(), l.gen2()].into_iter().enumerate() {
        for k in 0..3 {
            out[j][k] = linear[k][0] * g.re + linear[k][1] * g.im;
        }
    }
    Ok(out)
}

/// Least-squares `F` with `∂F ≈ f`, `∂̄F ≈ g`. Returns the mean-zero
/// periodic part, the linear coefficients `(α, β)` of `αx + βy`, and the
/// relative residual.
fn solve_pair(f: &Spectrum, g: &Spectrum) -> (GridField, [Complex64; 2], f64) {
    let mut out = Spectrum::zeros(*f.lattice(), f.character());
    let (mut res, mut norm) = (0.0, 0.0);
    let (fc, gc) = (f.coeffs(), g.coeffs());
    for mode in f.modes() {
        let k = mode.index;
        norm += fc[k].norm_sqr() + gc[k].norm_sqr();
        if mode.wave.norm_sqr() == 0.0 {
            continue;
        }
        if mode.nyquist {
            res += fc[k].norm_sqr() + gc[k].norm_sqr();
            continue;
        }
        let (s1, s2) = (dz_symbol(mode.wave), dzbar_symbol(mode.wave));
        let x = (s1.conj() * fc[k] + s2.conj() * gc[k]) / (s1.norm_sqr() + s2.norm_sqr());
        out.coeffs_mut()[k] = x;
        res += (s1 * x - fc[k]).norm_sqr() + (s2 * x - gc[k]).norm_sqr();
    }
    // ∂(αx + βy) = (α − iβ)/2 and ∂̄(αx + βy) = (α + iβ)/2.
    let (f0, g0) = (f.zero_mode(), g.zero_mode());
    let linear = [f0 + g0, Complex64::i() * (f0 - g0)];
    let rel = if norm > 0.0 { (res / norm).sqrt() } else { 0.0 };
    (out.to_field(), linear, rel)
}
