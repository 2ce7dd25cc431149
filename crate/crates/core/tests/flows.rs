use std::f64::consts::PI;

use mnv_core::flows::*;
use mnv_core::sample::{random_real_field, random_smooth_field};
use mnv_core::spectral::{d_x, deriv, integrate};
use mnv_core::weierstrass::{
    clifford_potential, clifford_profiles, clifford_torus, dirac_residual,
};
use mnv_core::{Complex64, GridField, PeriodicLattice, SpinCharacter, SpinorPair, WeierstrassData};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn skew() -> PeriodicLattice {
    PeriodicLattice::new(
        Complex64::new(2.0 * PI, 0.0),
        Complex64::new(0.9, 5.5),
        32,
        32,
    )
    .unwrap()
}

fn y_independent(n: usize, f: impl Fn(f64) -> f64) -> GridField {
    let l = PeriodicLattice::square_2pi(n, 8).unwrap();
    GridField::real_from_fn(l, |x, _| f(x))
}

fn profile(f: &GridField) -> Line {
    let n2 = f.lattice().n2();
    Line::new(
        f.values().iter().step_by(n2).map(|v| v.re).collect(),
        f.lattice().gen1().re,
    )
    .unwrap()
}

fn clifford_state(n: usize, gauge: Gauge) -> FlowState {
    let (data, _, _) = clifford_torus(n, n).unwrap();
    FlowState::new(
        data,
        &FlowConfig {
            gauge,
            ..FlowConfig::default()
        },
    )
}

#[test]
fn constant_potential_gives_gauge() {
    let u = GridField::constant(skew(), Complex64::new(0.4, 0.0));
    let v = solve_v(&u, 0.25).unwrap();
    assert!(v.distance(&GridField::constant(skew(), Complex64::new(0.25, 0.0))) < 1e-14);
}

#[test]
fn x_only_potential_with_mean_square_gauge_gives_u_squared() {
    let u = y_independent(32, |x| 0.3 * x.sin() + 0.1 * (2.0 * x).cos());
    let v = solve_v_with(&u, Gauge::MeanSquare).unwrap();
    let u2 = u.try_mul(&u).unwrap();
    assert!(v.distance(&u2) < 1e-13);
}

#[test]
fn constraint_holds_for_random_potentials() {
    let mut r = rng(1);
    for _ in 0..3 {
        let u = random_real_field(skew(), 4.0, &mut r);
        let v = solve_v(&u, 0.0).unwrap();
        assert!(constraint_residual(&u, &v) < 1e-10);
        assert!(v.mean().norm() < 1e-14);
    }
}

#[test]
fn zero_potential_is_stationary() {
    let l = skew();
    let zero = GridField::zeros(l, SpinCharacter::TRIVIAL);
    assert_eq!(mnv_rhs(&zero, &zero).unwrap().max_abs(), 0.0);
    assert_eq!(nv_rhs(&zero).unwrap().max_abs(), 0.0);
    assert_eq!(nv2_rhs(&zero).unwrap().max_abs(), 0.0);
    assert_eq!(
        mnv2_rhs(&zero, Mnv2Reading::default()).unwrap().max_abs(),
        0.0
    );
}

#[test]
fn mnv_reduces_to_mkdv() {
    let u = y_independent(64, |x| 0.4 * x.sin() - 0.2 * (3.0 * x).cos() + 0.1);
    let v = solve_v_with(&u, Gauge::MeanSquare).unwrap();
    let rhs = mnv_rhs(&u, &v).unwrap();
    let expected = mkdv_rhs(&profile(&u));
    let got = profile(&rhs);
    assert!(got.distance(&Line::combine(&[(0.25, &expected)])) < 1e-10);
}

#[test]
fn clifford_rhs_is_a_translation() {
    let state = clifford_state(96, Gauge::MeanSquare);
    let rhs = mnv_rhs(state.u(), &state.v).unwrap();
    let half_ux = d_x(state.u()).scale(0.5);
    assert!(
        rhs.distance(&half_ux) < 1e-9,
        "{:e}",
        rhs.distance(&half_ux)
    );
    let line = Line::from_fn(96, 2.0 * PI, clifford_potential).unwrap();
    let lhs = mkdv_rhs(&line);
    assert!(lhs.distance(&Line::combine(&[(2.0, &line.deriv(1))])) < 1e-9);
}

#[test]
fn mnv_rhs_rejects_bad_constraint() {
    let mut r = rng(2);
    let u = random_real_field(skew(), 3.0, &mut r);
    let v = random_smooth_field(skew(), SpinCharacter::TRIVIAL, 3.0, &mut r);
    assert!(matches!(
        mnv_rhs(&u, &v),
        Err(mnv_core::Error::ConstraintViolation { .. })
    ));
}

#[test]
fn nv_reduces_to_kdv_form() {
    let u = y_independent(64, |x| 0.5 * x.cos() + 0.2 * (2.0 * x).sin() + 0.3);
    let rhs = nv_rhs_with(&u, 3.0 * u.mean().re, &Default::default()).unwrap();
    let p = profile(&u);
    let expected = Line::combine(&[
        (0.25, &p.deriv(3)),
        (6.0, &Line::product(&[&p, &p.deriv(1)])),
    ]);
    assert!(profile(&rhs).distance(&expected) < 1e-10);
}

#[test]
fn nv_and_second_flows_preserve_reality() {
    let mut r = rng(3);
    for _ in 0..3 {
        let u = random_real_field(skew(), 4.0, &mut r);
        assert!(nv_rhs(&u).is_ok());
        assert!(nv2_rhs(&u).is_ok());
        assert!(mnv2_rhs(&u, Mnv2Reading::SquareOfDerivative).is_ok());
        assert!(mnv2_rhs(&u, Mnv2Reading::DerivativeOfSquare).is_ok());
    }
}

#[test]
fn mnv2_reduces_on_the_line() {
    for reading in [
        Mnv2Reading::SquareOfDerivative,
        Mnv2Reading::DerivativeOfSquare,
    ] {
        let u = y_independent(64, |x| 0.3 * x.sin() + 0.2 * (2.0 * x).cos());
        let rhs = profile(&mnv2_rhs(&u, reading).unwrap());
        let line = mnv2_rhs_1d(&profile(&u), reading);
        let scale = line.max_abs();
        assert!(scale > 1e-3);
        assert!(
            rhs.distance(&line) < 1e-10 * scale.max(1.0),
            "{reading:?}: {:e}",
            rhs.distance(&line)
        );
    }
}

#[test]
fn psi_rhs_is_pure_dispersion_without_potential() {
    let l = skew();
    let ch = SpinCharacter::new(false, true);
    let zero = GridField::zeros(l, SpinCharacter::TRIVIAL);
    let e = GridField::mode(l, ch, 1, -2);
    let psis = SpinorPair::new(GridField::zeros(l, ch), e.clone()).unwrap();
    let state = FlowState::new(
        WeierstrassData::new(zero, psis).unwrap(),
        &FlowConfig::default(),
    );
    let rhs = psi_rhs(&state);
    let expected = deriv(&e, 3, 0).try_add(&deriv(&e, 0, 3)).unwrap();
    assert!(rhs.psi2().distance(&expected) < 1e-10);
    assert!(rhs.psi1().max_abs() < 1e-14);
}

#[test]
fn psi_rhs_is_linear_in_psi() {
    let state = clifford_state(32, Gauge::ZeroMean);
    let mut r = rng(4);
    let ch = state.psis().character();
    let l = *state.u().lattice();
    let other = SpinorPair::new(
        random_smooth_field(l, ch, 3.0, &mut r),
        random_smooth_field(l, ch, 3.0, &mut r),
    )
    .unwrap();
    let with = |p: SpinorPair| {
        psi_rhs(&FlowState {
            t: 0.0,
            data: WeierstrassData::new(state.u().clone(), p).unwrap(),
            v: state.v.clone(),
        })
    };
    let sum = with(state.psis().try_add(&other).unwrap());
    let parts = with(state.psis().clone()).try_add(&with(other)).unwrap();
    assert!(sum.distance(&parts) < 1e-11);
}

#[test]
fn zero_state_stays_zero() {
    let l = PeriodicLattice::square_2pi(16, 16).unwrap();
    let zero = GridField::zeros(l, SpinCharacter::TRIVIAL);
    let psis = SpinorPair::new(
        GridField::constant(l, Complex64::new(1.0, 0.0)),
        GridField::constant(l, Complex64::new(0.0, 1.0)),
    )
    .unwrap();
    let mut state = FlowState::new(
        WeierstrassData::new(zero, psis).unwrap(),
        &FlowConfig::default(),
    );
    for _ in 0..100 {
        state = step(&state, 1e-3, &FlowConfig::default()).unwrap();
    }
    assert!(state.u().max_abs() < 1e-13);
}

fn translation_error(gauge: Gauge, speed: f64) -> f64 {
    let config = FlowConfig {
        gauge,
        ..FlowConfig::default()
    };
    let mut state = clifford_state(64, gauge);
    for _ in 0..100 {
        state = step(&state, 1e-4, &config).unwrap();
    }
    let t = state.t;
    let exact = GridField::real_from_fn(*state.u().lattice(), |x, _| {
        clifford_potential(x + speed * t)
    });
    state.u().distance(&exact)
}

#[test]
fn clifford_flow_translates_the_profile() {
    assert!(translation_error(Gauge::MeanSquare, 0.5) < 1e-5);
    // Zero-mean V differs from U² by ⟨U²⟩ = 1/8, which advects at −3/8.
    assert!(translation_error(Gauge::ZeroMean, 0.125) < 1e-5);
}

#[test]
fn kernel_is_transported() {
    let config = FlowConfig::default();
    let mut state = clifford_state(64, Gauge::ZeroMean);
    for _ in 0..20 {
        state = step(&state, 1e-4, &config).unwrap();
    }
    let (r1, r2) = dirac_residual(state.u(), state.psis());
    assert!(r1.max_abs().max(r2.max_abs()) < 1e-7);
    assert!(state.constraint_residual() < 1e-9);
}

fn run(state: &FlowState, dt: f64, t_end: f64, scheme: Scheme) -> FlowState {
    let config = FlowConfig {
        scheme,
        ..FlowConfig::default()
    };
    let steps = (t_end / dt).round() as usize;
    let mut s = state.clone();
    for _ in 0..steps {
        s = step(&s, dt, &config).unwrap();
    }
    s
}

#[test]
fn fourth_order_self_convergence() {
    let l = PeriodicLattice::square_2pi(32, 32).unwrap();
    let mut r = rng(5);
    let u = random_real_field(l, 3.0, &mut r).scale(0.5);
    let ch = SpinCharacter::TRIVIAL;
    let psis = SpinorPair::new(
        random_smooth_field(l, ch, 3.0, &mut r),
        random_smooth_field(l, ch, 3.0, &mut r),
    )
    .unwrap();
    let state = FlowState::new(
        WeierstrassData::new(u, psis).unwrap(),
        &FlowConfig::default(),
    );
    let t_end = 0.02;
    for scheme in [Scheme::IntegratingFactor, Scheme::Rk4] {
        let dt = 1e-3;
        let reference = run(&state, dt / 64.0, t_end, scheme);
        let e1 = run(&state, dt, t_end, scheme).u().distance(reference.u());
        let e2 = run(&state, dt / 2.0, t_end, scheme)
            .u()
            .distance(reference.u());
        let ratio = e1 / e2;
        assert!(
            ratio > 13.0 && ratio < 19.0,
            "{scheme:?}: {e1:e} / {e2:e} = {ratio}"
        );
    }
}

#[test]
fn schemes_agree() {
    let state = clifford_state(32, Gauge::ZeroMean);
    let a = run(&state, 1e-4, 0.01, Scheme::IntegratingFactor);
    let b = run(&state, 1e-4, 0.01, Scheme::Rk4);
    assert!(a.u().distance(b.u()) < 1e-10);
    assert!(
        a.psis().distance(b.psis()) < 1e-10,
        "{:e} {:e}",
        a.u().distance(b.u()),
        a.psis().distance(b.psis())
    );
}

#[test]
fn invalid_steps_and_blow_up_are_reported() {
    let state = clifford_state(16, Gauge::ZeroMean);
    assert!(matches!(
        step(&state, 0.0, &FlowConfig::default()),
        Err(mnv_core::Error::InvalidStep(_))
    ));
    assert!(matches!(
        step(&state, -1.0, &FlowConfig::default()),
        Err(mnv_core::Error::InvalidStep(_))
    ));
    let l = PeriodicLattice::square_2pi(16, 16).unwrap();
    let big = GridField::real_from_fn(l, |x, y| 40.0 * (x + y).sin());
    let psis = SpinorPair::new(
        GridField::constant(l, Complex64::new(1.0, 0.0)),
        GridField::zeros(l, SpinCharacter::TRIVIAL),
    )
    .unwrap();
    let s = FlowState::new(
        WeierstrassData::new(big, psis).unwrap(),
        &FlowConfig::default(),
    );
    let config = FlowConfig {
        scheme: Scheme::Rk4,
        ..FlowConfig::default()
    };
    assert!(matches!(
        step(&s, 0.5, &config),
        Err(mnv_core::Error::BlowUp { .. })
    ));
}

#[test]
fn willmore_integrand_is_conserved_instantaneously() {
    let state = clifford_state(64, Gauge::ZeroMean);
    assert!(willmore_density_drift(&state) < 1e-10);
    let mut r = rng(6);
    let l = skew();
    for _ in 0..3 {
        let u = random_real_field(l, 4.0, &mut r);
        let ch = SpinCharacter::TRIVIAL;
        let psis = SpinorPair::new(
            GridField::constant(l, Complex64::new(1.0, 0.0)),
            GridField::zeros(l, ch),
        )
        .unwrap();
        let s = FlowState::new(
            WeierstrassData::new(u, psis).unwrap(),
            &FlowConfig::default(),
        );
        assert!(willmore_density_drift(&s) < 1e-9);
    }
    let zero = FlowState::new(
        WeierstrassData::new(
            GridField::zeros(l, SpinCharacter::TRIVIAL),
            SpinorPair::new(
                GridField::zeros(l, SpinCharacter::TRIVIAL),
                GridField::zeros(l, SpinCharacter::TRIVIAL),
            )
            .unwrap(),
        )
        .unwrap(),
        &FlowConfig::default(),
    );
    assert_eq!(willmore_density_drift(&zero), 0.0);
}

#[test]
fn immersion_velocity_forms_are_exact() {
    for gauge in [Gauge::ZeroMean, Gauge::MeanSquare] {
        let state = clifford_state(64, gauge);
        let e = exactness_residuals(&state);
        assert!(e.omega0 < 1e-8 && e.omega1 < 1e-8, "{e:?}");
    }
}

#[test]
fn dirac_operator_annihilates_clifford_spinors() {
    let (data, _, _) = clifford_torus(64, 64).unwrap();
    let l = OperatorSpec::new(OperatorKind::LmNV, data.u()).unwrap();
    assert!(apply_operator(&l, data.psis()).unwrap().max_abs() < 1e-8);
    let lattice = PeriodicLattice::square_2pi(64, 8).unwrap();
    let ch = SpinCharacter::new(true, false);
    let r1 = GridField::from_fn(lattice, ch, |z| {
        Complex64::new(clifford_profiles(z.re).0, 0.0)
    });
    let r2 = GridField::from_fn(lattice, ch, |z| {
        Complex64::new(clifford_profiles(z.re).1, 0.0)
    });
    let u = GridField::real_from_fn(lattice, |x, _| clifford_potential(x));
    let spec = OperatorSpec::new(OperatorKind::LmKdV, &u).unwrap();
    assert!(
        apply_operator(&spec, &SpinorPair::new(r1, r2).unwrap())
            .unwrap()
            .max_abs()
            < 1e-9
    );
}

#[test]
fn a_plus_without_potential_is_the_third_derivative() {
    let l = skew();
    let mut r = rng(7);
    let ch = SpinCharacter::new(true, true);
    let phi = SpinorPair::new(
        random_smooth_field(l, ch, 3.0, &mut r),
        random_smooth_field(l, ch, 3.0, &mut r),
    )
    .unwrap();
    let zero = GridField::zeros(l, SpinCharacter::TRIVIAL);
    let a = apply_operator(
        &OperatorSpec::new(OperatorKind::APlus, &zero).unwrap(),
        &phi,
    )
    .unwrap();
    assert!(a.psi1().distance(&deriv(phi.psi1(), 3, 0)) < 1e-12);
    assert!(a.psi2().distance(&deriv(phi.psi2(), 3, 0)) < 1e-12);
    let c = SpinorPair::new(
        GridField::constant(l, Complex64::new(1.0, 2.0)),
        GridField::constant(l, Complex64::new(-1.0, 0.5)),
    )
    .unwrap();
    let lz = OperatorSpec::new(OperatorKind::LmNV, &zero).unwrap();
    assert!(apply_operator(&lz, &c).unwrap().max_abs() < 1e-15);
}

#[test]
fn triple_identities_hold_for_both_half_flows() {
    let l = PeriodicLattice::square_2pi(64, 64).unwrap();
    let mut r = rng(8);
    for _ in 0..2 {
        let u = random_smooth_field(l, SpinCharacter::TRIVIAL, 4.0, &mut r);
        let ch = SpinCharacter::all()[r_index(&mut r)];
        let phi = SpinorPair::new(
            random_smooth_field(l, ch, 4.0, &mut r),
            random_smooth_field(l, ch, 4.0, &mut r),
        )
        .unwrap();
        for flow in [HalfFlow::Plus, HalfFlow::Minus] {
            let res = triple_residual(&u, flow, &phi).unwrap();
            assert!(res < 1e-8, "{flow:?}: {res:e}");
            let bad = triple_residual_with(&u, flow, &phi, -1.0).unwrap();
            assert!(
                bad > 1e-2 && bad > 1e6 * res.max(1e-300),
                "{flow:?}: {bad:e}"
            );
        }
    }
}

fn r_index(r: &mut ChaCha8Rng) -> usize {
    use rand::Rng;
    r.gen_range(0..4)
}

#[test]
fn zero_potential_has_zero_triple_residual() {
    let l = skew();
    let mut r = rng(9);
    let ch = SpinCharacter::TRIVIAL;
    let phi = SpinorPair::new(
        random_smooth_field(l, ch, 3.0, &mut r),
        random_smooth_field(l, ch, 3.0, &mut r),
    )
    .unwrap();
    let zero = GridField::zeros(l, ch);
    assert!(triple_residual(&zero, HalfFlow::Plus, &phi).unwrap() < 1e-12);
    assert!(triple_residual(&zero, HalfFlow::Minus, &phi).unwrap() < 1e-12);
}

#[test]
fn willmore_energy_is_conserved_over_a_short_run() {
    let config = FlowConfig::default();
    let mut state = clifford_state(32, Gauge::ZeroMean);
    let w = |s: &FlowState| 4.0 * integrate(&s.u().try_mul(s.u()).unwrap()).value.re;
    let w0 = w(&state);
    for _ in 0..50 {
        state = step(&state, 1e-4, &config).unwrap();
    }
    assert!((w(&state) - w0).abs() / w0 < 1e-10);
    assert!(state.imag_u_norm() < 1e-12);
}
