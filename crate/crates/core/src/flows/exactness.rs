//! Exactness of the forms that move the immersion under the flow.
//!
//! With `ψ_t` from the spinor flow,
//! `ψ₂ψ₂t = ∂F`, `−ψ₁ψ₁t = ∂̄F` for `F = f₁ + g₁ − f₂ − g₂`, and
//! `(ψ₂ψ̄₁)_t = ∂H`, `(ψ₁ψ̄₂)_t = ∂̄H` for `H = h₁ + h₂`, where
//!
//! ```text
//! f₁ = (3/2)Vψ₂²,  g₁ = ψ₂∂²ψ₂ − (∂ψ₂)²/2,
//! f₂ = (3/2)V̄ψ₁²,  g₂ = ψ₁∂̄²ψ₁ − (∂̄ψ₁)²/2,
//! h₁ = ψ̄₁∂²ψ₂ + ψ₂∂²ψ̄₁ − ∂ψ₂∂ψ̄₁ + 3Vψ̄₁ψ₂,
//! h₂ = ψ₁∂̄²ψ̄₂ + ψ̄₂∂̄²ψ₁ − ∂̄ψ̄₂∂̄ψ₁ + 3V̄ψ₁ψ̄₂.
//! ```

use super::{psi_rhs, FlowState};
use crate::field::GridField;
use crate::spectral::{d_z, d_zbar, dealiased_product, deriv};

/// Relative `∞`-norm mismatch of each form against `d` of its potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exactness {
    pub omega0: f64,
    pub omega1: f64,
}

fn mul(a: &GridField, b: &GridField) -> GridField {
    dealiased_product(&[a, b]).expect("same lattice")
}

fn mul3(a: &GridField, b: &GridField, c: &GridField) -> GridField {
    dealiased_product(&[a, b, c]).expect("same lattice")
}

fn lin(terms: &[(f64, &GridField)]) -> GridField {
    let mut out = terms[0].1.scale(terms[0].0);
    for (c, f) in &terms[1..] {
        out = out.try_add(&f.scale(*c)).expect("compatible terms");
    }
    out
}

fn rel(residuals: &[GridField], scale: &[GridField]) -> f64 {
    let r = residuals.iter().map(GridField::max_abs).fold(0.0, f64::max);
    let s = scale.iter().map(GridField::max_abs).fold(0.0, f64::max);
    if s > 0.0 {
        r / s
    } else {
        r
    }
}

pub fn exactness_residuals(state: &FlowState) -> Exactness {
    let (p1, p2) = (state.psis().psi1(), state.psis().psi2());
    let (c1, c2) = (p1.conj(), p2.conj());
    let v = &state.v;
    let vb = v.conj();
    let psit = psi_rhs(state);
    let (p1t, p2t) = (psit.psi1(), psit.psi2());

    let dp2 = d_z(p2);
    let dbp1 = d_zbar(p1);
    let f = lin(&[
        (1.5, &mul3(v, p2, p2)),
        (1.0, &mul(p2, &deriv(p2, 2, 0))),
        (-0.5, &mul(&dp2, &dp2)),
        (-1.5, &mul3(&vb, p1, p1)),
        (-1.0, &mul(p1, &deriv(p1, 0, 2))),
        (0.5, &mul(&dbp1, &dbp1)),
    ]);
    let a0 = mul(p2, p2t);
    let b0 = mul(p1, p1t).scale(-1.0);
    let omega0 = rel(
        &[
            a0.try_sub(&d_z(&f)).unwrap(),
            b0.try_sub(&d_zbar(&f)).unwrap(),
        ],
        &[a0, b0],
    );

    let h = lin(&[
        (1.0, &mul(&c1, &deriv(p2, 2, 0))),
        (1.0, &mul(p2, &deriv(&c1, 2, 0))),
        (-1.0, &mul(&dp2, &d_z(&c1))),
        (3.0, &mul3(v, &c1, p2)),
        (1.0, &mul(p1, &deriv(&c2, 0, 2))),
        (1.0, &mul(&c2, &deriv(p1, 0, 2))),
        (-1.0, &mul(&d_zbar(&c2), &dbp1)),
        (3.0, &mul3(&vb, p1, &c2)),
    ]);
    let a1 = mul(p2t, &c1).try_add(&mul(p2, &p1t.conj())).unwrap();
    let b1 = mul(p1t, &c2).try_add(&mul(p1, &p2t.conj())).unwrap();
    let omega1 = rel(
        &[
            a1.try_sub(&d_z(&h)).unwrap(),
            b1.try_sub(&d_zbar(&h)).unwrap(),
        ],
        &[a1, b1],
    );
    Exactness { omega0, omega1 }
}
