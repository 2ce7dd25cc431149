//! The Dirac operator `L`, the `A±`, `B±` operators of the two half-flows,
//! and the residual of `L_t + [L, A] − BL = 0`.

use num_complex::Complex64;

use crate::error::Result;
use crate::field::GridField;
use crate::spectral::{d_x, d_z, d_zbar, dbar_inverse, dealiased_product, deriv, dz_inverse};
use crate::weierstrass::SpinorPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    /// `[[∂, −U], [U, ∂̄]]`.
    LmNV,
    APlus,
    AMinus,
    BPlus,
    BMinus,
    /// `∂_x − ½[[−1, 4U], [−4U, 1]]`.
    LmKdV,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfFlow {
    Plus,
    Minus,
}

/// An operator together with its coefficient fields: `U`, and the
/// potentials `V` (`∂̄V = ∂(U²)`) and `V⁻` (`∂V⁻ = ∂̄(U²)`, equal to `V̄`
/// for real `U`).
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub u: GridField,
    pub v: GridField,
    pub v_minus: GridField,
}

impl OperatorSpec {
    /// Solves both potentials with zero mean; `U` may be complex.
    pub fn new(kind: OperatorKind, u: &GridField) -> Result<Self> {
        u.require_trivial()?;
        let u2 = dealiased_product(&[u, u])?;
        let v = dbar_inverse(&d_z(&u2))?;
        let v_minus = dz_inverse(&d_zbar(&u2))?;
        Ok(Self {
            kind,
            u: u.clone(),
            v,
            v_minus,
        })
    }

    pub fn with_kind(&self, kind: OperatorKind) -> Self {
        Self {
            kind,
            ..self.clone()
        }
    }
}

fn mul(a: &GridField, b: &GridField) -> GridField {
    dealiased_product(&[a, b]).expect("same lattice")
}

fn mul3(a: &GridField, b: &GridField, c: &GridField) -> GridField {
    dealiased_product(&[a, b, c]).expect("same lattice")
}

fn sum(terms: &[(f64, &GridField)]) -> GridField {
    let mut out = terms[0].1.scale(terms[0].0);
    for (c, f) in &terms[1..] {
        out = out.try_add(&f.scale(*c)).expect("compatible terms");
    }
    out
}

/// Applies the operator to `φ`; products are dealiased.
pub fn apply_operator(spec: &OperatorSpec, phi: &SpinorPair) -> Result<SpinorPair> {
    spec.u.check_same_lattice(phi.psi1())?;
    let (p1, p2) = (phi.psi1(), phi.psi2());
    let (u, v, vm) = (&spec.u, &spec.v, &spec.v_minus);
    let (a, b) = match spec.kind {
        OperatorKind::LmNV => (
            sum(&[(1.0, &d_z(p1)), (-1.0, &mul(u, p2))]),
            sum(&[(1.0, &mul(u, p1)), (1.0, &d_zbar(p2))]),
        ),
        OperatorKind::APlus => {
            let (uz, vz) = (d_z(u), d_z(v));
            let dp2 = d_z(p2);
            (
                sum(&[
                    (1.0, &deriv(p1, 3, 0)),
                    (-3.0, &mul(&uz, &dp2)),
                    (3.0, &mul3(u, v, p2)),
                ]),
                sum(&[
                    (1.0, &deriv(p2, 3, 0)),
                    (3.0, &mul(v, &dp2)),
                    (1.5, &mul(&vz, p2)),
                ]),
            )
        }
        OperatorKind::AMinus => {
            let (uzb, vmzb) = (d_zbar(u), d_zbar(vm));
            let dbp1 = d_zbar(p1);
            (
                sum(&[
                    (1.0, &deriv(p1, 0, 3)),
                    (3.0, &mul(vm, &dbp1)),
                    (1.5, &mul(&vmzb, p1)),
                ]),
                sum(&[
                    (1.0, &deriv(p2, 0, 3)),
                    (3.0, &mul(&uzb, &dbp1)),
                    (-3.0, &mul3(u, vm, p1)),
                ]),
            )
        }
        OperatorKind::BPlus => {
            let (uz, uzz) = (d_z(u), deriv(u, 2, 0));
            (
                sum(&[(3.0, &mul(&uz, &d_z(p2))), (-3.0, &mul3(u, v, p2))]),
                sum(&[
                    (-3.0, &mul(&uz, &d_z(p1))),
                    (-3.0, &mul(&uzz, p1)),
                    (-3.0, &mul3(u, v, p1)),
                ]),
            )
        }
        OperatorKind::BMinus => {
            let (uzb, uzbzb) = (d_zbar(u), deriv(u, 0, 2));
            (
                sum(&[
                    (3.0, &mul(&uzb, &d_zbar(p2))),
                    (3.0, &mul(&uzbzb, p2)),
                    (3.0, &mul3(u, vm, p2)),
                ]),
                sum(&[(-3.0, &mul(&uzb, &d_zbar(p1))), (3.0, &mul3(u, vm, p1))]),
            )
        }
        OperatorKind::LmKdV => (
            sum(&[(1.0, &d_x(p1)), (0.5, p1), (-2.0, &mul(u, p2))]),
            sum(&[(1.0, &d_x(p2)), (2.0, &mul(u, p1)), (-0.5, p2)]),
        ),
    };
    SpinorPair::new(a, b)
}

/// Right-hand side of one half-flow.
fn half_flow_rhs(spec: &OperatorSpec, flow: HalfFlow) -> GridField {
    let u = &spec.u;
    match flow {
        HalfFlow::Plus => sum(&[
            (1.0, &deriv(u, 3, 0)),
            (3.0, &mul(&d_z(u), &spec.v)),
            (1.5, &mul(u, &d_z(&spec.v))),
        ]),
        HalfFlow::Minus => sum(&[
            (1.0, &deriv(u, 0, 3)),
            (3.0, &mul(&d_zbar(u), &spec.v_minus)),
            (1.5, &mul(u, &d_zbar(&spec.v_minus))),
        ]),
    }
}

/// `‖L_tφ + L(Aφ) − A(Lφ) − B(Lφ)‖∞ / ‖φ‖∞` for one half-flow, with `L_t`
/// taken from the analytic right-hand side `U_t±`.
pub fn triple_residual(u: &GridField, flow: HalfFlow, phi: &SpinorPair) -> Result<f64> {
    triple_residual_with(u, flow, phi, 1.0)
}

/// As [`triple_residual`] with `B` scaled by `b_scale` (`−1` is a sign-corrupted control).
pub fn triple_residual_with(
    u: &GridField,
    flow: HalfFlow,
    phi: &SpinorPair,
    b_scale: f64,
) -> Result<f64> {
    let l = OperatorSpec::new(OperatorKind::LmNV, u)?;
    let (a, b) = match flow {
        HalfFlow::Plus => (
            l.with_kind(OperatorKind::APlus),
            l.with_kind(OperatorKind::BPlus),
        ),
        HalfFlow::Minus => (
            l.with_kind(OperatorKind::AMinus),
            l.with_kind(OperatorKind::BMinus),
        ),
    };
    let ut = half_flow_rhs(&l, flow);
    let lt = SpinorPair::new(mul(&ut, phi.psi2()).scale(-1.0), mul(&ut, phi.psi1()))?;
    let l_phi = apply_operator(&l, phi)?;
    let la = apply_operator(&l, &apply_operator(&a, phi)?)?;
    let al = apply_operator(&a, &l_phi)?;
    let bl = apply_operator(&b, &l_phi)?;
    let r = lt
        .try_add(&la)?
        .try_add(&al.scale(Complex64::new(-1.0, 0.0)))?
        .try_add(&bl.scale(Complex64::new(-b_scale, 0.0)))?;
    let norm = phi.max_abs();
    Ok(if norm > 0.0 {
        r.max_abs() / norm
    } else {
        r.max_abs()
    })
}
