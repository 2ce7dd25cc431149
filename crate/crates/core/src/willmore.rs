//! The Willmore functional, its Euler–Lagrange residual, and the conformal
//! class of the period lattice.
//!
//! Areas use `dz dz̄ ≡ dx dy`, which makes `W = 4∫U²` agree with `∫H² dμ`
//! and gives `W = 2π²` on the Clifford torus.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::GridField;
use crate::flows::FlowState;
use crate::lattice::PeriodicLattice;
use crate::spectral::{d_x, d_y, integrate, laplacian};
use crate::tolerances::FlowTolerances;
use crate::weierstrass::{
    gaussian_curvature, induced_metric_density, mean_curvature, period_defect, SpinorPair,
    WeierstrassData,
};

/// `W = 4∫U² dx dy`.
pub fn willmore_from_potential(u: &GridField) -> f64 {
    4.0 * integrate(&u.map(|v| Complex64::new(v.re * v.re, 0.0)))
        .value
        .re
}

/// `W = ∫H² D² dx dy` with `H = 2U/D`.
pub fn willmore_direct(psis: &SpinorPair, u: &GridField) -> Result<f64> {
    let h = mean_curvature(u, psis)?;
    let d = induced_metric_density(psis);
    let integrand = h.try_mul(&h)?.try_mul(&d)?.try_mul(&d)?;
    Ok(integrate(&integrand.re()).value.re)
}

/// `ΔU·D − 2(U_x D_x + U_y D_y) + U·ΔD + 8U³D`, zero exactly on Willmore
/// surfaces. Derivatives are spectral, products nodal.
pub fn el_residual(u: &GridField, d: &GridField) -> Result<GridField> {
    u.check_same_lattice(d)?;
    let (lu, ld) = (laplacian(u), laplacian(d));
    let (ux, uy, dx, dy) = (d_x(u), d_y(u), d_x(d), d_y(d));
    let values = (0..u.values().len())
        .map(|k| {
            let (u, d) = (u.values()[k].re, d.values()[k].re);
            let r = lu.values()[k].re * d
                - 2.0
                    * (ux.values()[k].re * dx.values()[k].re
                        + uy.values()[k].re * dy.values()[k].re)
                + u * ld.values()[k].re
                + 8.0 * u * u * u * d;
            Complex64::new(r, 0.0)
        })
        .collect();
    GridField::new(*u.lattice(), u.character(), values)
}

/// The same residual from `ΔH + 2H(H² − K)` with the Laplace–Beltrami
/// operator `Δ/D²`, rescaled by `D⁴/2` so it matches [`el_residual`].
pub fn el_residual_covariant(u: &GridField, psis: &SpinorPair) -> Result<GridField> {
    let h = mean_curvature(u, psis)?;
    let k = gaussian_curvature(psis)?;
    let d = induced_metric_density(psis);
    let lh = laplacian(&h);
    let values = (0..h.values().len())
        .map(|j| {
            let (h, k, d) = (h.values()[j].re, k.values()[j].re, d.values()[j].re);
            let d2 = d * d;
            Complex64::new(
                0.5 * d2 * d2 * (lh.values()[j].re / d2 + 2.0 * h * (h * h - k)),
                0.0,
            )
        })
        .collect();
    GridField::new(*h.lattice(), h.character(), values)
}

/// Both norms of the residual: raw `∞`-norm and the `D`-weighted RMS
/// `(∫r²D² / ∫D²)^{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElNorms {
    pub inf: f64,
    pub weighted_l2: f64,
}

pub fn el_norms(residual: &GridField, d: &GridField) -> ElNorms {
    let (num, den) = residual
        .values()
        .iter()
        .zip(d.values())
        .fold((0.0, 0.0), |(n, m), (r, d)| {
            let d2 = d.re * d.re;
            (n + r.norm_sqr() * d2, m + d2)
        });
    let weighted_l2 = if den > 0.0 { (num / den).sqrt() } else { 0.0 };
    ElNorms {
        inf: residual.max_abs(),
        weighted_l2,
    }
}

/// Modulus of the period lattice in the standard fundamental domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalClass {
    pub tau: Complex64,
}

const BOUNDARY: f64 = 1e-12;

/// Reduces `gen2/gen1` to `|τ| ≥ 1`, `|Re τ| ≤ ½`, `Im τ > 0`; boundary
/// ties go to `Re τ ≥ 0`.
pub fn conformal_class(lattice: &PeriodicLattice) -> ConformalClass {
    ConformalClass {
        tau: reduce_modulus(lattice.gen2() / lattice.gen1()),
    }
}

pub fn reduce_modulus(mut tau: Complex64) -> Complex64 {
    if tau.im < 0.0 {
        tau = -tau;
    }
    for _ in 0..200 {
        tau.re -= tau.re.round();
        if tau.norm_sqr() < 1.0 - BOUNDARY {
            tau = -tau.inv();
        } else {
            break;
        }
    }
    if (tau.re + 0.5).abs() < BOUNDARY {
        tau.re = 0.5;
    }
    if (tau.norm_sqr() - 1.0).abs() < BOUNDARY && tau.re < 0.0 {
        tau.re = -tau.re;
    }
    tau
}

/// `0 ≤ a ≤ ½` and `√(1 − a²) ≤ b ≤ 1` for `(a, b) = (|Re τ|, Im τ)`.
pub fn li_yau_region(cc: &ConformalClass) -> bool {
    let (a, b) = (cc.tau.re.abs(), cc.tau.im);
    a <= 0.5 + BOUNDARY && b >= (1.0 - a * a).max(0.0).sqrt() - BOUNDARY && b <= 1.0 + BOUNDARY
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WillmoreReport {
    pub willmore: f64,
    pub willmore_direct: f64,
    /// `W − 2π²`.
    pub bound_gap: f64,
    pub el_residual: ElNorms,
    pub conformal_class: ConformalClass,
    pub in_li_yau_region: bool,
}

pub fn willmore_report(data: &WeierstrassData) -> Result<WillmoreReport> {
    let willmore = willmore_from_potential(data.u());
    let d = induced_metric_density(data.psis());
    let residual = el_residual(data.u(), &d)?;
    let conformal_class = conformal_class(data.lattice());
    Ok(WillmoreReport {
        willmore,
        willmore_direct: willmore_direct(data.psis(), data.u())?,
        bound_gap: willmore - 2.0 * PI * PI,
        el_residual: el_norms(&residual, &d),
        conformal_class,
        in_li_yau_region: li_yau_region(&conformal_class),
    })
}

/// One row of the invariant time series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantRow {
    pub t: f64,
    pub willmore: f64,
    #[serde(rename = "mean_U")]
    pub mean_u: f64,
    pub constraint_residual: f64,
    pub dirac_residual: f64,
    pub period_defect_norm: f64,
    #[serde(rename = "imag_U_norm")]
    pub imag_u_norm: f64,
}

pub fn invariant_row(state: &FlowState) -> Result<InvariantRow> {
    let defect = period_defect(state.psis())?;
    Ok(InvariantRow {
        t: state.t,
        willmore: willmore_from_potential(state.u()),
        mean_u: state.u().mean().re,
        constraint_residual: state.constraint_residual(),
        dirac_residual: state.data.dirac_residual_norm(),
        period_defect_norm: defect
            .iter()
            .flatten()
            .fold(0.0, |m: f64, v| m.max(v.abs())),
        imag_u_norm: state.imag_u_norm(),
    })
}

/// Per-snapshot rows, whole-run extremes, and the thresholds they broke.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowReport {
    pub rows: Vec<InvariantRow>,
    pub reports: Vec<WillmoreReport>,
    pub willmore_drift: f64,
    pub max_constraint_residual: f64,
    pub max_dirac_residual: f64,
    pub max_period_defect: f64,
    /// Largest change of the period defect from the first snapshot; the
    /// flow preserves periods, so this is what is checked.
    pub period_defect_change: f64,
    pub max_imag_u: f64,
    pub violations: Vec<String>,
}

impl FlowReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `|W(t) − W(0)|` is taken relative to `W(0)`, or absolute when `W(0) = 0`.
/// An empty series yields an empty, passing report.
pub fn flow_report(series: &[FlowState], tol: &FlowTolerances) -> Result<FlowReport> {
    use rayon::prelude::*;
    let rows = series
        .par_iter()
        .map(invariant_row)
        .collect::<Result<Vec<_>>>()?;
    let reports = series
        .par_iter()
        .map(|s| willmore_report(&s.data))
        .collect::<Result<Vec<_>>>()?;
    let w0 = rows.first().map_or(0.0, |r| r.willmore);
    let scale = if w0 > 0.0 { w0 } else { 1.0 };
    let max = |f: fn(&InvariantRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let willmore_drift = rows
        .iter()
        .map(|r| (r.willmore - w0).abs() / scale)
        .fold(0.0, f64::max);
    let max_constraint_residual = max(|r| r.constraint_residual);
    let max_dirac_residual = max(|r| r.dirac_residual);
    let max_period_defect = max(|r| r.period_defect_norm);
    let max_imag_u = max(|r| r.imag_u_norm);
    let defects = series
        .iter()
        .map(|s| period_defect(s.psis()))
        .collect::<Result<Vec<_>>>()?;
    let first = defects.first().copied().unwrap_or_default();
    let period_defect_change = defects
        .iter()
        .flat_map(|d| {
            d.iter()
                .flatten()
                .zip(first.iter().flatten())
                .map(|(a, b)| (a - b).abs())
        })
        .fold(0.0, f64::max);
    let mut violations = Vec::new();
    for (name, value, limit) in [
        ("willmore_drift", willmore_drift, tol.willmore_drift),
        (
            "constraint_residual",
            max_constraint_residual,
            tol.constraint,
        ),
        ("dirac_residual", max_dirac_residual, tol.dirac),
        (
            "period_defect_change",
            period_defect_change,
            tol.period_defect,
        ),
        ("imag_U_norm", max_imag_u, tol.imag_u),
    ] {
        if !(value <= limit) {
            violations.push(format!("{name} = {value:.3e} exceeds {limit:.1e}"));
        }
    }
    if reports
        .iter()
        .any(|r| r.bound_gap < -1e-6 && r.willmore > 0.0)
    {
        violations.push("willmore below 2π² on a torus".into());
    }
    Ok(FlowReport {
        rows,
        reports,
        willmore_drift,
        max_constraint_residual,
        max_dirac_residual,
        max_period_defect,
        period_defect_change,
        max_imag_u,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(g1: Complex64, g2: Complex64) -> PeriodicLattice {
        PeriodicLattice::new(g1, g2, 8, 8).unwrap()
    }

    #[test]
    fn constant_potential_energy() {
        let l = PeriodicLattice::square_2pi(8, 8).unwrap();
        let u = GridField::constant(l, Complex64::new(0.3, 0.0));
        assert!((willmore_from_potential(&u) - 16.0 * PI * PI * 0.09).abs() < 1e-12);
        assert_eq!(
            willmore_from_potential(&GridField::constant(l, Complex64::default())),
            0.0
        );
    }

    #[test]
    fn reduced_examples() {
        let c = |a, b| Complex64::new(a, b);
        assert!(
            (conformal_class(&lattice(c(1.0, 0.0), c(0.0, 1.0))).tau - c(0.0, 1.0)).norm() < 1e-15
        );
        let s = 2.0 * PI;
        assert!((conformal_class(&lattice(c(s, 0.0), c(0.0, s))).tau - c(0.0, 1.0)).norm() < 1e-15);
        assert!(
            (conformal_class(&lattice(c(1.0, 0.0), c(0.3, 1.1))).tau - c(0.3, 1.1)).norm() < 1e-15
        );
        assert!((reduce_modulus(c(-0.5, 2.0)) - c(0.5, 2.0)).norm() < 1e-15);
        assert!((reduce_modulus(c(0.0, 0.5)) - c(0.0, 2.0)).norm() < 1e-15);
        let on_arc = c((0.3f64).cos(), (0.3f64).sin()) * c(0.0, 1.0);
        assert!(reduce_modulus(on_arc).re >= 0.0);
    }

    #[test]
    fn li_yau_examples() {
        let cc = |a, b| ConformalClass {
            tau: Complex64::new(a, b),
        };
        assert!(li_yau_region(&cc(0.0, 1.0)));
        assert!(li_yau_region(&cc(0.5, 0.87)));
        assert!(li_yau_region(&cc(0.5, 0.9)));
        assert!(!li_yau_region(&cc(0.4, 0.9)));
        assert!(!li_yau_region(&cc(0.0, 2.0)));
    }
}
