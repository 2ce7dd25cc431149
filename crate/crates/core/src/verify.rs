//! Named property suites on built-in data. Every check is a measured value
//! against a fixed limit; suites with random inputs take an explicit seed.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::GridField;
use crate::flows::{
    exactness_residuals, mkdv_rhs, mnv2_rhs, mnv2_rhs_1d, mnv_rhs, nv_rhs_with, solve_v_with, step,
    triple_residual, triple_residual_with, willmore_density_drift, FlowConfig, FlowState, Gauge,
    HalfFlow, Line, Mnv2Reading,
};
use crate::lattice::{PeriodicLattice, SpinCharacter};
use crate::sample::{random_real_field, random_smooth_field};
use crate::spectral::{d_x, d_y, d_z, d_zbar, dbar_inverse, dealiased_product, integrate};
use crate::tolerances::{FlowTolerances, Tolerances};
use crate::weierstrass::{
    clifford_torus, dirac_residual, extract_spinors, gauss_map, gaussian_curvature,
    induced_metric_density, mean_curvature, round_torus, synthesize_immersion, SpinorPair,
    WeierstrassData,
};
use crate::willmore::{
    el_residual, el_residual_covariant, flow_report, willmore_direct, willmore_from_potential,
};

pub const DEFAULT_SEED: u64 = 20_260_401;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Spectral,
    Triples,
    Reductions,
    Clifford,
    Representation,
    Exactness,
    Conservation,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Spectral,
        Suite::Triples,
        Suite::Reductions,
        Suite::Clifford,
        Suite::Representation,
        Suite::Exactness,
        Suite::Conservation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Spectral => "spectral",
            Suite::Triples => "triples",
            Suite::Reductions => "reductions",
            Suite::Clifford => "clifford",
            Suite::Representation => "representation",
            Suite::Exactness => "exactness",
            Suite::Conservation => "conservation",
        }
    }

    pub fn run(&self, seed: u64) -> Result<SuiteReport> {
        let checks = match self {
            Suite::Spectral => spectral(seed)?,
            Suite::Triples => triples(seed)?,
            Suite::Reductions => reductions()?,
            Suite::Clifford => clifford()?,
            Suite::Representation => representation()?,
            Suite::Exactness => exactness(seed)?,
            Suite::Conservation => conservation()?,
        };
        Ok(SuiteReport {
            suite: *self,
            seed,
            checks,
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            bound: Bound::AtMost,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            bound: Bound::AtLeast,
        }
    }

    /// NaN never passes.
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.value <= self.limit,
            Bound::AtLeast => self.value >= self.limit,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {} value={:.3e} {op} {:.1e}",
            self.name, self.value, self.limit
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn skew(n1: usize, n2: usize) -> Result<PeriodicLattice> {
    PeriodicLattice::new(Complex64::new(5.0, 0.4), Complex64::new(1.2, 4.5), n1, n2)
}

fn random_pair(
    l: PeriodicLattice,
    ch: SpinCharacter,
    max_mode: f64,
    rng: &mut impl Rng,
) -> Result<SpinorPair> {
    SpinorPair::new(
        random_smooth_field(l, ch, max_mode, rng),
        random_smooth_field(l, ch, max_mode, rng),
    )
}

fn max_over(l: &PeriodicLattice, mut f: impl FnMut(usize, usize, Complex64) -> f64) -> f64 {
    let mut m: f64 = 0.0;
    for j1 in 0..l.n1() {
        for j2 in 0..l.n2() {
            m = m.max(f(j1, j2, l.node(j1, j2)));
        }
    }
    m
}

/// Tenth-order central difference along `e`.
fn central_difference(
    f: &impl Fn(Complex64) -> Complex64,
    z: Complex64,
    e: Complex64,
    h: f64,
) -> Complex64 {
    const W: [f64; 5] = [
        5.0 / 6.0,
        -5.0 / 21.0,
        5.0 / 84.0,
        -5.0 / 504.0,
        1.0 / 1260.0,
    ];
    W.iter()
        .enumerate()
        .map(|(k, w)| (f(z + e * ((k + 1) as f64 * h)) - f(z - e * ((k + 1) as f64 * h))) * *w)
        .sum::<Complex64>()
        / h
}

fn gauss_bonnet(psis: &SpinorPair) -> Result<f64> {
    let d = induced_metric_density(psis);
    let k = gaussian_curvature(psis)?;
    Ok(integrate(&k.try_mul(&d)?.try_mul(&d)?).value.norm())
}

fn spectral(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let l = skew(32, 32)?;
    let (g1, g2) = (l.gen1(), l.gen2());
    let det = g1.re * g2.im - g1.im * g2.re;
    for ch in SpinCharacter::all() {
        let (d1, d2) = ch.offsets();
        let f = move |z: Complex64| {
            let s1 = 2.0 * PI * (z.re * g2.im - z.im * g2.re) / det;
            let s2 = 2.0 * PI * (g1.re * z.im - g1.im * z.re) / det;
            (0.6 * s1.sin() + 0.4 * (s1 + s2).cos()).exp()
                * Complex64::from_polar(1.0, d1 * s1 + d2 * s2)
        };
        let field = GridField::from_fn(l, ch, f);
        let (fx, fy, fz, fzb) = (d_x(&field), d_y(&field), d_z(&field), d_zbar(&field));
        let (mut err, mut scale) = (0.0f64, 0.0f64);
        for j1 in 0..l.n1() {
            for j2 in 0..l.n2() {
                let z = l.node(j1, j2);
                let dx = central_difference(&f, z, Complex64::new(1.0, 0.0), 2e-2);
                let dy = central_difference(&f, z, Complex64::new(0.0, 1.0), 2e-2);
                let dz = (dx - Complex64::i() * dy) * 0.5;
                let dzb = (dx + Complex64::i() * dy) * 0.5;
                for (a, b) in [
                    (fx.at(j1, j2), dx),
                    (fy.at(j1, j2), dy),
                    (fz.at(j1, j2), dz),
                    (fzb.at(j1, j2), dzb),
                ] {
                    err = err.max((a - b).norm());
                    scale = scale.max(b.norm());
                }
            }
        }
        out.push(Check::at_most(
            format!("derivative_vs_finite_difference[{ch}]"),
            err / scale,
            1e-8,
        ));
    }

    let mut r = rng(seed);
    let coarse = skew(16, 16)?;
    let fine = skew(64, 64)?;
    let ch = SpinCharacter::new(true, false);
    let (a, b) = (
        random_smooth_field(fine, ch, 7.0, &mut r),
        random_smooth_field(fine, ch, 7.0, &mut r),
    );
    let restrict = |f: &GridField| -> Vec<Complex64> {
        (0..coarse.len())
            .map(|k| f.at(4 * (k / coarse.n2()), 4 * (k % coarse.n2())))
            .collect()
    };
    let ca = GridField::new(coarse, ch, restrict(&a))?;
    let cb = GridField::new(coarse, ch, restrict(&b))?;
    let got = dealiased_product(&[&ca, &cb])?;
    let mut s = a.try_mul(&b)?.spectrum();
    let drop: Vec<usize> = s
        .modes()
        .filter(|m| m.m1.abs() >= 8.0 || m.m2.abs() >= 8.0)
        .map(|m| m.index)
        .collect();
    for k in drop {
        s.coeffs_mut()[k] = Complex64::default();
    }
    let refined = GridField::new(coarse, got.character(), restrict(&s.to_field()))?;
    out.push(Check::at_most(
        "dealiased_vs_refined_product",
        got.distance(&refined) / refined.max_abs(),
        1e-10,
    ));

    let mut worst: f64 = 0.0;
    for ch in SpinCharacter::all() {
        let mut f = random_smooth_field(l, ch, 10.0, &mut r);
        if ch.is_trivial() {
            f = f.try_sub(&GridField::constant(l, f.mean()))?;
        }
        worst = worst.max(d_zbar(&dbar_inverse(&f)?).distance(&f) / f.max_abs());
    }
    out.push(Check::at_most("dzbar_after_dbar_inverse", worst, 1e-11));

    let (data, _, _) = clifford_torus(64, 64)?;
    out.push(Check::at_most(
        "gauss_bonnet[clifford]",
        gauss_bonnet(data.psis())?,
        1e-8,
    ));
    let (_, round) = extract_spinors(&round_torus(2.0, 64, 64)?)?;
    out.push(Check::at_most(
        "gauss_bonnet[round 2.0]",
        gauss_bonnet(&round)?,
        1e-8,
    ));
    Ok(out)
}

fn triples(seed: u64) -> Result<Vec<Check>> {
    let mut r = rng(seed);
    let l = PeriodicLattice::square_2pi(64, 64)?;
    let (mut worst, mut control) = (0.0f64, f64::INFINITY);
    for _ in 0..2 {
        let u = random_smooth_field(l, SpinCharacter::TRIVIAL, 4.0, &mut r);
        for _ in 0..2 {
            let ch = SpinCharacter::all()[r.gen_range(0..4)];
            let phi = random_pair(l, ch, 4.0, &mut r)?;
            for flow in [HalfFlow::Plus, HalfFlow::Minus] {
                worst = worst.max(triple_residual(&u, flow, &phi)?);
                control = control.min(triple_residual_with(&u, flow, &phi, -1.0)?);
            }
        }
    }
    Ok(vec![
        Check::at_most("triple_residual", worst, 1e-8),
        Check::at_least("triple_residual[corrupted B]", control, 1e-2),
    ])
}

fn y_independent(n: usize, f: impl Fn(f64) -> f64) -> Result<GridField> {
    Ok(GridField::real_from_fn(
        PeriodicLattice::square_2pi(n, 8)?,
        |x, _| f(x),
    ))
}

fn profile(f: &GridField) -> Result<Line> {
    let n2 = f.lattice().n2();
    Line::new(
        f.values().iter().step_by(n2).map(|v| v.re).collect(),
        f.lattice().gen1().re,
    )
}

fn reductions() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let u = y_independent(64, |x| 0.4 * x.sin() - 0.2 * (3.0 * x).cos() + 0.1)?;
    let v = solve_v_with(&u, Gauge::MeanSquare)?;
    let p = profile(&u)?;
    let lhs = profile(&mnv_rhs(&u, &v)?)?;
    out.push(Check::at_most(
        "mnv_to_mkdv",
        lhs.distance(&Line::combine(&[(0.25, &mkdv_rhs(&p))])),
        1e-10,
    ));
    let nv = profile(&nv_rhs_with(&u, 3.0 * u.mean().re, &Tolerances::default())?)?;
    let kdv = Line::combine(&[
        (0.25, &p.deriv(3)),
        (6.0, &Line::product(&[&p, &p.deriv(1)])),
    ]);
    out.push(Check::at_most("nv_to_kdv_form", nv.distance(&kdv), 1e-10));
    for reading in [
        Mnv2Reading::SquareOfDerivative,
        Mnv2Reading::DerivativeOfSquare,
    ] {
        let two_d = profile(&mnv2_rhs(&u, reading)?)?;
        let line = mnv2_rhs_1d(&p, reading);
        out.push(Check::at_most(
            format!("mnv2_to_line[{reading:?}]"),
            two_d.distance(&line) / line.max_abs(),
            1e-10,
        ));
    }
    Ok(out)
}

fn clifford() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let (data, _, l) = clifford_torus(128, 128)?;
    let u = data.u();
    let ux = d_x(u);
    let first_integral = max_over(&l, |a, b, _| {
        let (u, ux) = (u.at(a, b).re, ux.at(a, b).re);
        (ux * ux + 4.0 * u.powi(4) - 2.0 * u * u - u / SQRT_2 - 1.0 / 16.0).abs()
    });
    out.push(Check::at_most("first_integral", first_integral, 1e-10));
    let w = willmore_from_potential(u);
    out.push(Check::at_most(
        "willmore_is_2pi2",
        (w - 2.0 * PI * PI).abs() / (2.0 * PI * PI),
        1e-7,
    ));
    out.push(Check::at_most(
        "willmore_two_ways",
        (willmore_direct(data.psis(), u)? - w).abs() / w,
        1e-10,
    ));
    let d = induced_metric_density(data.psis());
    let el = el_residual(u, &d)?;
    out.push(Check::at_most("el_residual", el.max_abs(), 1e-6));
    out.push(Check::at_most(
        "el_covariant_agreement",
        el_residual_covariant(u, data.psis())?.distance(&el),
        1e-6,
    ));
    let h = mean_curvature(u, data.psis())?;
    let k = gaussian_curvature(data.psis())?;
    out.push(Check::at_most(
        "mean_curvature_closed_form",
        max_over(&l, |a, b, z| {
            (h.at(a, b).re - z.re.sin() / (2.0 * SQRT_2)).abs()
        }),
        1e-10,
    ));
    out.push(Check::at_most(
        "gauss_curvature_closed_form",
        max_over(&l, |a, b, z| {
            (k.at(a, b).re - (SQRT_2 * z.re.sin() - 1.0) / 4.0).abs()
        }),
        1e-10,
    ));
    let (data, _, _) = clifford_torus(96, 96)?;
    let v = solve_v_with(data.u(), Gauge::MeanSquare)?;
    let rhs = mnv_rhs(data.u(), &v)?;
    out.push(Check::at_most(
        "stationary_up_to_translation",
        rhs.distance(&d_x(data.u()).scale(0.5)),
        1e-9,
    ));
    Ok(out)
}

fn representation() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let (data, closed, _) = clifford_torus(64, 64)?;
    let x = synthesize_immersion(data.psis())?;
    out.push(Check::at_most(
        "synthesized_vs_closed_form",
        x.distance_up_to_translation(&closed),
        1e-6,
    ));
    let (u, psis) = extract_spinors(&x)?;
    out.push(Check::at_most(
        "extract_synthesize_potential",
        u.distance(data.u()),
        1e-6,
    ));
    out.push(Check::at_most(
        "extract_synthesize_spinors",
        psis.distance_up_to_sign(data.psis()),
        1e-6,
    ));
    for (name, x) in [
        ("clifford", closed),
        ("round 2.5", round_torus(2.5, 64, 64)?),
    ] {
        let (_, psis) = extract_spinors(&x)?;
        let back = synthesize_immersion(&psis)?;
        out.push(Check::at_most(
            format!("synthesize_extract[{name}]"),
            back.distance_up_to_translation(&x),
            1e-6,
        ));
    }
    let g = gauss_map(data.psis());
    let iso = isotropy_defect(&g)?;
    out.push(Check::at_most("gauss_map_isotropy", iso, 1e-11));
    let (r1, r2) = dirac_residual(data.u(), data.psis());
    out.push(Check::at_most(
        "dirac_residual",
        r1.max_abs().max(r2.max_abs()),
        1e-8,
    ));
    Ok(out)
}

fn isotropy_defect(g: &[GridField; 3]) -> Result<f64> {
    Ok(g[0]
        .try_mul(&g[0])?
        .try_add(&g[1].try_mul(&g[1])?)?
        .try_add(&g[2].try_mul(&g[2])?)?
        .max_abs())
}

fn exactness(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, gauge) in [
        ("zero-mean", Gauge::ZeroMean),
        ("mean-square", Gauge::MeanSquare),
    ] {
        let (data, _, _) = clifford_torus(64, 64)?;
        let state = FlowState::new(
            data,
            &FlowConfig {
                gauge,
                ..FlowConfig::default()
            },
        );
        let e = exactness_residuals(&state);
        out.push(Check::at_most(
            format!("omega0_exact[{name}]"),
            e.omega0,
            1e-8,
        ));
        out.push(Check::at_most(
            format!("omega1_exact[{name}]"),
            e.omega1,
            1e-8,
        ));
        out.push(Check::at_most(
            format!("willmore_density_drift[clifford {name}]"),
            willmore_density_drift(&state),
            1e-10,
        ));
    }
    let mut r = rng(seed);
    let l = skew(32, 32)?;
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let u = random_real_field(l, 4.0, &mut r);
        let psis = SpinorPair::new(
            GridField::constant(l, Complex64::new(1.0, 0.0)),
            GridField::zeros(l, SpinCharacter::TRIVIAL),
        )?;
        let state = FlowState::new(WeierstrassData::new(u, psis)?, &FlowConfig::default());
        worst = worst.max(willmore_density_drift(&state));
    }
    out.push(Check::at_most(
        "willmore_density_drift[random]",
        worst,
        1e-9,
    ));
    Ok(out)
}

fn conservation() -> Result<Vec<Check>> {
    let config = FlowConfig::default();
    let (data, _, _) = clifford_torus(64, 64)?;
    let lattice = *data.lattice();
    let mut state = FlowState::new(data, &config);
    let mut series = vec![state.clone()];
    for k in 1..=200 {
        state = step(&state, 1e-4, &config)?;
        if k % 50 == 0 {
            series.push(state.clone());
        }
    }
    let tol = FlowTolerances::default();
    let report = flow_report(&series, &tol)?;
    Ok(vec![
        Check::at_most("willmore_drift", report.willmore_drift, tol.willmore_drift),
        Check::at_most(
            "constraint_residual",
            report.max_constraint_residual,
            tol.constraint,
        ),
        Check::at_most("dirac_residual", report.max_dirac_residual, tol.dirac),
        Check::at_most(
            "period_defect_norm",
            report.max_period_defect,
            tol.period_defect,
        ),
        Check::at_most(
            "period_defect_change",
            report.period_defect_change,
            tol.period_defect,
        ),
        Check::at_most("imag_U_norm", report.max_imag_u, tol.imag_u),
        Check::at_most(
            "lattice_unchanged",
            if *state.u().lattice() == lattice {
                0.0
            } else {
                1.0
            },
            0.0,
        ),
    ])
}
