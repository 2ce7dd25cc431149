//! Pointwise geometry of the immersion read off from `(U, ψ)`.

use num_complex::Complex64;

use super::SpinorPair;
use crate::error::{Error, Result};
use crate::field::GridField;
use crate::spectral::{d_z, d_zbar, laplacian};

/// `(∂ψ₁ − Uψ₂, ∂̄ψ₂ + Uψ₁)`; both vanish for Weierstrass data.
///
/// Panics if `U` and the spinors live on different lattices.
pub fn dirac_residual(u: &GridField, psis: &SpinorPair) -> (GridField, GridField) {
    let (p1, p2) = (psis.psi1(), psis.psi2());
    let up2 = u.try_mul(p2).expect("U and ψ share a lattice");
    let up1 = u.try_mul(p1).expect("U and ψ share a lattice");
    let r1 = d_z(p1).try_sub(&up2).expect("characters agree");
    let r2 = d_zbar(p2).try_add(&up1).expect("characters agree");
    (r1, r2)
}

/// `D = |ψ₁|² + |ψ₂|²`, the conformal factor of the metric `D²(dx² + dy²)`.
pub fn induced_metric_density(psis: &SpinorPair) -> GridField {
    let l = *psis.lattice();
    let values = psis
        .psi1()
        .values()
        .iter()
        .zip(psis.psi2().values())
        .map(|(a, b)| Complex64::new(a.norm_sqr() + b.norm_sqr(), 0.0))
        .collect();
    GridField::new(l, crate::SpinCharacter::TRIVIAL, values).expect("same grid")
}

fn positive_density(psis: &SpinorPair) -> Result<GridField> {
    let d = induced_metric_density(psis);
    let n2 = d.lattice().n2();
    let floor = 1e-14 * d.max_abs();
    for (k, v) in d.values().iter().enumerate() {
        if !(v.re > floor) {
            return Err(Error::VanishingDensity {
                j1: k / n2,
                j2: k % n2,
                value: v.re,
            });
        }
    }
    Ok(d)
}

/// `H = 2U/D`.
pub fn mean_curvature(u: &GridField, psis: &SpinorPair) -> Result<GridField> {
    u.check_same_lattice(psis.psi1())?;
    let d = positive_density(psis)?;
    let values = u
        .values()
        .iter()
        .zip(d.values())
        .map(|(u, d)| Complex64::new(2.0 * u.re / d.re, 0.0))
        .collect();
    GridField::new(*d.lattice(), crate::SpinCharacter::TRIVIAL, values)
}

/// `K = −Δ log D / D²`, with `log D` formed pointwise and differentiated spectrally.
pub fn gaussian_curvature(psis: &SpinorPair) -> Result<GridField> {
    let d = positive_density(psis)?;
    let lap = laplacian(&d.map(|v| Complex64::new(v.re.ln(), 0.0)));
    GridField::new(
        *d.lattice(),
        crate::SpinCharacter::TRIVIAL,
        lap.values()
            .iter()
            .zip(d.values())
            .map(|(l, d)| Complex64::new(-l.re / (d.re * d.re), 0.0))
            .collect(),
    )
}

/// The isotropic vector `G = ∂X = (i(ψ̄₁² + ψ₂²)/2, (ψ̄₁² − ψ₂²)/2, −ψ₂ψ̄₁)`.
pub fn gauss_map(psis: &SpinorPair) -> [GridField; 3] {
    let i = Complex64::i();
    let (a, b) = (psis.psi1().values(), psis.psi2().values());
    let comp = |f: &dyn Fn(Complex64, Complex64) -> Complex64| {
        let values = a.iter().zip(b).map(|(&p1, &p2)| f(p1.conj(), p2)).collect();
        GridField::new(*psis.lattice(), crate::SpinCharacter::TRIVIAL, values).expect("same grid")
    };
    [
        comp(&|c1, p2| 0.5 * i * (c1 * c1 + p2 * p2)),
        comp(&|c1, p2| 0.5 * (c1 * c1 - p2 * p2)),
        comp(&|c1, p2| -p2 * c1),
    ]
}
