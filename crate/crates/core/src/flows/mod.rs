//! The modified Novikov–Veselov flow on `(U, ψ)`, its sibling equations and
//! operator-identity checks.

mod exactness;
mod siblings;
mod stage;
mod triples;

pub use exactness::{exactness_residuals, Exactness};
pub use siblings::{
    kdv_rhs, mkdv_rhs, mnv2_rhs, mnv2_rhs_1d, nv2_rhs, nv_rhs, nv_rhs_with, Line, Mnv2Reading,
};
pub use stage::Gauge;
pub use triples::{
    apply_operator, triple_residual, triple_residual_with, HalfFlow, OperatorKind, OperatorSpec,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridField, Spectrum};
use crate::spectral::{integrate, product_spectra, Padding};
use crate::tolerances::Tolerances;
use crate::weierstrass::{SpinorPair, WeierstrassData};

/// Time discretization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Four-stage Runge–Kutta on the Lawson-transformed variables; the
    /// dispersive part `∂³ + ∂̄³` is integrated exactly.
    #[default]
    IntegratingFactor,
    /// Classical four-stage Runge–Kutta on the full right-hand side.
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowConfig {
    pub scheme: Scheme,
    pub gauge: Gauge,
    /// Off only for negative controls: products become aliased nodal products.
    pub dealias: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::IntegratingFactor,
            gauge: Gauge::ZeroMean,
            dealias: true,
        }
    }
}

/// `0.5·(Δx)³` with `Δx` the finest grid spacing.
pub fn default_dt(lattice: &crate::PeriodicLattice) -> f64 {
    0.5 * lattice.min_spacing().powi(3)
}

/// Flow time, state and the potential `V` solving `∂̄V = ∂(U²)`.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub t: f64,
    pub data: WeierstrassData,
    pub v: GridField,
}

impl FlowState {
    pub fn new(data: WeierstrassData, config: &FlowConfig) -> Self {
        let v = potential_v(data.u(), config.gauge, config.dealias);
        Self { t: 0.0, data, v }
    }

    pub fn u(&self) -> &GridField {
        self.data.u()
    }

    pub fn psis(&self) -> &SpinorPair {
        self.data.psis()
    }

    /// `max|∂̄V − ∂(U²)| / max|U²|`.
    pub fn constraint_residual(&self) -> f64 {
        constraint_residual(self.u(), &self.v)
    }

    pub fn imag_u_norm(&self) -> f64 {
        self.u().max_imag()
    }
}

fn potential_v(u: &GridField, gauge: Gauge, dealias: bool) -> GridField {
    stage::potential_v(&u.spectrum(), gauge, dealias).to_field()
}

/// `V` with `∂̄V = ∂(U²)` and `mean V = gauge`.
pub fn solve_v(u: &GridField, gauge: f64) -> Result<GridField> {
    solve_v_with(u, Gauge::Fixed(gauge))
}

pub fn solve_v_with(u: &GridField, gauge: Gauge) -> Result<GridField> {
    u.require_trivial()?;
    Ok(potential_v(u, gauge, true))
}

/// `max|∂̄V − ∂(U²)|`, relative to `max|U²|` (absolute when `U = 0`).
pub fn constraint_residual(u: &GridField, v: &GridField) -> f64 {
    let s = u.spectrum();
    let u2 = product_spectra(&[&s, &s], Padding::for_degree(u.lattice(), 2));
    let lhs = v.spectrum().deriv(0, 1);
    let res = lhs.axpy(-1.0, &u2.deriv(1, 0)).to_field().max_abs();
    let scale = u2.to_field().max_abs();
    if scale > 0.0 {
        res / scale
    } else {
        res
    }
}

fn full_rhs_u(u: &Spectrum, v: &Spectrum, dealias: bool) -> Spectrum {
    let (mut n, _) = stage::nonlinear(u, v, None, dealias);
    add_linear(&mut n, u);
    n
}

fn add_linear(n: &mut Spectrum, x: &Spectrum) {
    let sym = stage::linear_symbol(x);
    for ((a, b), s) in n.coeffs_mut().iter_mut().zip(x.coeffs()).zip(&sym) {
        *a += s * b;
    }
}

/// Right-hand side of the mNV equation for a given `V`; real for real `U`.
///
/// Fails when `V` violates its constraint or the result is not real to
/// within the configured tolerance.
pub fn mnv_rhs(u: &GridField, v: &GridField) -> Result<GridField> {
    mnv_rhs_with(u, v, &Tolerances::default())
}

pub fn mnv_rhs_with(u: &GridField, v: &GridField, tol: &Tolerances) -> Result<GridField> {
    u.require_trivial()?;
    u.check_same_lattice(v)?;
    let residual = constraint_residual(u, v);
    if residual > tol.constraint {
        return Err(Error::ConstraintViolation { residual });
    }
    let rhs = full_rhs_u(&u.spectrum(), &v.spectrum(), true).to_field();
    let scale = rhs.max_abs().max(u.max_abs());
    if rhs.max_imag() > tol.rhs_reality * scale {
        return Err(Error::NotReal {
            imag: rhs.max_imag(),
            scale,
        });
    }
    Ok(rhs.re())
}

/// Time derivative of the spinors transported with the flow.
pub fn psi_rhs(state: &FlowState) -> SpinorPair {
    let (p1, p2) = (
        state.psis().psi1().spectrum(),
        state.psis().psi2().spectrum(),
    );
    let (_, n) = stage::nonlinear(
        &state.u().spectrum(),
        &state.v.spectrum(),
        Some((&p1, &p2)),
        true,
    );
    let (mut n1, mut n2) = n.expect("spinors supplied");
    add_linear(&mut n1, &p1);
    add_linear(&mut n2, &p2);
    SpinorPair::new(n1.to_field(), n2.to_field()).expect("shared character")
}

/// `|∫ U·U_t| / ∫ U²`, the instantaneous relative change of the Willmore integrand.
pub fn willmore_density_drift(state: &FlowState) -> f64 {
    let u = state.u();
    let rhs = full_rhs_u(&u.spectrum(), &state.v.spectrum(), true).to_field();
    let w = integrate(&u.try_mul(&u.conj()).expect("same grid"))
        .value
        .re;
    if w == 0.0 {
        return 0.0;
    }
    integrate(&u.try_mul(&rhs).expect("same grid")).value.norm() / w
}

#[derive(Clone)]
struct Vars {
    u: Spectrum,
    p1: Spectrum,
    p2: Spectrum,
}

impl Vars {
    fn axpy(&self, h: f64, k: &Vars) -> Vars {
        Vars {
            u: self.u.axpy(h, &k.u),
            p1: self.p1.axpy(h, &k.p1),
            p2: self.p2.axpy(h, &k.p2),
        }
    }
}

fn nonlinear(x: &Vars, config: &FlowConfig) -> Vars {
    let v = stage::potential_v(&x.u, config.gauge, config.dealias);
    let (u, p) = stage::nonlinear(&x.u, &v, Some((&x.p1, &x.p2)), config.dealias);
    let (p1, p2) = p.expect("spinors supplied");
    Vars { u, p1, p2 }
}

/// `exp(h·(∂³ + ∂̄³))` per coefficient for the characters of `U` and `ψ`.
struct Propagator {
    u: Vec<Complex64>,
    psi: Vec<Complex64>,
}

impl Propagator {
    fn new(x: &Vars, h: f64) -> Self {
        let table = |s: &Spectrum| {
            stage::linear_symbol(s)
                .into_iter()
                .map(|l| (l * h).exp())
                .collect()
        };
        Self {
            u: table(&x.u),
            psi: table(&x.p1),
        }
    }

    fn apply(&self, y: &Vars) -> Vars {
        let run = |s: &Spectrum, e: &[Complex64]| {
            let mut out = s.clone();
            out.coeffs_mut()
                .iter_mut()
                .zip(e)
                .for_each(|(c, e)| *c *= e);
            out
        };
        Vars {
            u: run(&y.u, &self.u),
            p1: run(&y.p1, &self.psi),
            p2: run(&y.p2, &self.psi),
        }
    }
}

fn full(x: &Vars, config: &FlowConfig) -> Vars {
    let mut n = nonlinear(x, config);
    add_linear(&mut n.u, &x.u);
    add_linear(&mut n.p1, &x.p1);
    add_linear(&mut n.p2, &x.p2);
    n
}

/// One step of size `dt`; `V` is re-solved at every stage.
pub fn step(state: &FlowState, dt: f64, config: &FlowConfig) -> Result<FlowState> {
    step_with(state, dt, config, &Tolerances::default())
}

pub fn step_with(
    state: &FlowState,
    dt: f64,
    config: &FlowConfig,
    tol: &Tolerances,
) -> Result<FlowState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(dt));
    }
    let x = Vars {
        u: state.u().spectrum(),
        p1: state.psis().psi1().spectrum(),
        p2: state.psis().psi2().spectrum(),
    };
    let h = dt;
    let next = match config.scheme {
        Scheme::Rk4 => {
            let k1 = full(&x, config);
            let k2 = full(&x.axpy(0.5 * h, &k1), config);
            let k3 = full(&x.axpy(0.5 * h, &k2), config);
            let k4 = full(&x.axpy(h, &k3), config);
            x.axpy(h / 6.0, &k1)
                .axpy(h / 3.0, &k2)
                .axpy(h / 3.0, &k3)
                .axpy(h / 6.0, &k4)
        }
        Scheme::IntegratingFactor => {
            let (eh, ew) = (Propagator::new(&x, 0.5 * h), Propagator::new(&x, h));
            let half = |y: &Vars| eh.apply(y);
            let whole = |y: &Vars| ew.apply(y);
            let xh = half(&x);
            let k1 = nonlinear(&x, config);
            let k2 = nonlinear(&xh.axpy(0.5 * h, &half(&k1)), config);
            let k3 = nonlinear(&xh.axpy(0.5 * h, &k2), config);
            let k4 = nonlinear(&whole(&x).axpy(h, &half(&k3)), config);
            whole(&x)
                .axpy(h / 6.0, &whole(&k1))
                .axpy(h / 3.0, &half(&k2))
                .axpy(h / 3.0, &half(&k3))
                .axpy(h / 6.0, &k4)
        }
    };
    let u = next.u.to_field();
    let (before, after) = (state.u().max_abs(), u.max_abs());
    if !after.is_finite() || (before > 0.0 && after > tol.blow_up_factor * before) {
        return Err(Error::BlowUp { before, after });
    }
    let psis = SpinorPair::new(next.p1.to_field(), next.p2.to_field())?;
    let v = stage::potential_v(&next.u, config.gauge, config.dealias).to_field();
    Ok(FlowState {
        t: state.t + dt,
        data: WeierstrassData::from_parts_unchecked(u, psis),
        v,
    })
}
