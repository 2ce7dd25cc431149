//! The generalized Weierstrass representation: spinor data `(U, ψ₁, ψ₂)`
//! solving `ψ₁z = Uψ₂, ψ₂z̄ = −Uψ₁`, the immersed torus it integrates to,
//! and the way back from a conformal immersion to spinors.

mod clifford;
mod extract;
mod geometry;
mod kernel;
mod revolution;
mod synth;

pub use clifford::{
    clifford_immersion, clifford_potential, clifford_profiles, clifford_torus, round_torus,
};
pub use extract::{extract_spinors, extract_spinors_with};
pub use geometry::{
    dirac_residual, gauss_map, gaussian_curvature, induced_metric_density, mean_curvature,
};
pub use kernel::{dirac_kernel, dirac_kernel_with, KernelSpinor};
pub use revolution::{monodromy, revolution_data, Monodromy, NORMALIZED_MEAN_DENSITY};
pub use synth::{period_defect, synthesize_immersion, synthesize_immersion_with};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::GridField;
use crate::lattice::{PeriodicLattice, SpinCharacter};
use crate::tolerances::Tolerances;

/// The two Weierstrass spinors; both share one lattice and one spin character.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorPair {
    psi1: GridField,
    psi2: GridField,
}

impl SpinorPair {
    pub fn new(psi1: GridField, psi2: GridField) -> Result<Self> {
        psi1.check_same_lattice(&psi2)?;
        if psi1.character() != psi2.character() {
            return Err(Error::CharacterMismatch(psi1.character(), psi2.character()));
        }
        Ok(Self { psi1, psi2 })
    }

    pub fn psi1(&self) -> &GridField {
        &self.psi1
    }

    pub fn psi2(&self) -> &GridField {
        &self.psi2
    }

    pub fn into_parts(self) -> (GridField, GridField) {
        (self.psi1, self.psi2)
    }

    pub fn lattice(&self) -> &PeriodicLattice {
        self.psi1.lattice()
    }

    pub fn character(&self) -> SpinCharacter {
        self.psi1.character()
    }

    pub fn scale(&self, mu: Complex64) -> Self {
        Self {
            psi1: self.psi1.scale(mu),
            psi2: self.psi2.scale(mu),
        }
    }

    pub fn try_add(&self, other: &SpinorPair) -> Result<Self> {
        Ok(Self {
            psi1: self.psi1.try_add(&other.psi1)?,
            psi2: self.psi2.try_add(&other.psi2)?,
        })
    }

    /// `max(max|ψ₁ − φ₁|, max|ψ₂ − φ₂|)`.
    pub fn distance(&self, other: &SpinorPair) -> f64 {
        self.psi1
            .distance(&other.psi1)
            .max(self.psi2.distance(&other.psi2))
    }

    /// Distance modulo the global sign ambiguity `ψ ↦ −ψ`.
    pub fn distance_up_to_sign(&self, other: &SpinorPair) -> f64 {
        self.distance(other)
            .min(self.distance(&other.scale(Complex64::new(-1.0, 0.0))))
    }

    pub fn max_abs(&self) -> f64 {
        self.psi1.max_abs().max(self.psi2.max_abs())
    }
}

/// Real potential plus spinors: the state advanced by the flow.
#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassData {
    u: GridField,
    psis: SpinorPair,
}

impl WeierstrassData {
    /// Checks that `U` is real, periodic and on the spinors' lattice.
    pub fn new(u: GridField, psis: SpinorPair) -> Result<Self> {
        Self::with_tolerances(u, psis, &Tolerances::default())
    }

    pub fn with_tolerances(u: GridField, psis: SpinorPair, tol: &Tolerances) -> Result<Self> {
        u.check_same_lattice(psis.psi1())?;
        u.require_trivial()?;
        u.require_real(tol.reality)?;
        Ok(Self { u, psis })
    }

    /// Skips the reality check; flow stages carry roundoff-level imaginary parts.
    pub(crate) fn from_parts_unchecked(u: GridField, psis: SpinorPair) -> Self {
        Self { u, psis }
    }

    pub fn u(&self) -> &GridField {
        &self.u
    }

    pub fn psis(&self) -> &SpinorPair {
        &self.psis
    }

    pub fn lattice(&self) -> &PeriodicLattice {
        self.u.lattice()
    }

    pub fn into_parts(self) -> (GridField, SpinorPair) {
        (self.u, self.psis)
    }

    /// `max` of both Dirac residual components, relative to `max|ψ|`-scaled derivatives.
    pub fn dirac_residual_norm(&self) -> f64 {
        let (r1, r2) = dirac_residual(&self.u, &self.psis);
        r1.max_abs().max(r2.max_abs())
    }
}

/// Three real coordinate fields. Each coordinate is `periodic part +
/// linear part`; the linear part carries the period defect.
#[derive(Clone, Debug, PartialEq)]
pub struct Immersion {
    coords: [GridField; 3],
    /// `(∂X^a/∂x, ∂X^a/∂y)` of the non-periodic part of each coordinate.
    linear: [[f64; 2]; 3],
}

impl Immersion {
    /// A closed immersion from periodic, real coordinate fields.
    pub fn closed(coords: [GridField; 3]) -> Result<Self> {
        Self::new(coords, [[0.0; 2]; 3])
    }

    pub fn new(coords: [GridField; 3], linear: [[f64; 2]; 3]) -> Result<Self> {
        for c in &coords[1..] {
            coords[0].check_same_lattice(c)?;
        }
        for c in &coords {
            c.require_trivial()?;
        }
        Ok(Self { coords, linear })
    }

    pub fn coords(&self) -> &[GridField; 3] {
        &self.coords
    }

    pub fn linear(&self) -> [[f64; 2]; 3] {
        self.linear
    }

    pub fn lattice(&self) -> &PeriodicLattice {
        self.coords[0].lattice()
    }

    /// Translation of `X` along each generator: `period_defect()[j][a]`.
    pub fn period_defect(&self) -> [[f64; 3]; 2] {
        let l = self.lattice();
        let mut out = [[0.0; 3]; 2];
        for (j, g) in [l.gen1(), l.gen2()].into_iter().enumerate() {
            out[j] = std::array::from_fn(|a| self.linear[a][0] * g.re + self.linear[a][1] * g.im);
        }
        out
    }

    pub fn period_defect_norm(&self) -> f64 {
        self.period_defect()
            .iter()
            .flatten()
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Largest extent of the sampled vertices over the three axes.
    pub fn diameter(&self) -> f64 {
        let pos = self.positions();
        (0..3)
            .map(|a| {
                let (lo, hi) = pos
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                        (lo.min(p[a]), hi.max(p[a]))
                    });
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    /// Closed iff the period defect is below `tol` relative to the diameter.
    pub fn is_closed(&self, tol: f64) -> bool {
        self.period_defect_norm() <= tol * self.diameter().max(f64::MIN_POSITIVE)
    }

    /// Vertex positions at the grid nodes, row-major.
    pub fn positions(&self) -> Vec<[f64; 3]> {
        let l = *self.lattice();
        let mut out = Vec::with_capacity(l.len());
        for j1 in 0..l.n1() {
            for j2 in 0..l.n2() {
                let z = l.node(j1, j2);
                let k = j1 * l.n2() + j2;
                out.push(std::array::from_fn(|a| {
                    self.coords[a].values()[k].re
                        + self.linear[a][0] * z.re
                        + self.linear[a][1] * z.im
                }));
            }
        }
        out
    }

    /// Max vertex distance after removing the mean offset.
    pub fn distance_up_to_translation(&self, other: &Immersion) -> f64 {
        let (a, b) = (self.positions(), other.positions());
        let n = a.len() as f64;
        let mut shift = [0.0; 3];
        for (p, q) in a.iter().zip(&b) {
            for k in 0..3 {
                shift[k] += (p[k] - q[k]) / n;
            }
        }
        a.iter()
            .zip(&b)
            .map(|(p, q)| {
                (0..3)
                    .map(|k| (p[k] - q[k] - shift[k]).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}
