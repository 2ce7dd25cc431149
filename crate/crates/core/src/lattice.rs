//! Period lattices and spin characters.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Add;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cell areas below this fraction of `max|gen|^2` are rejected as degenerate.
const DEGENERACY_TOL: f64 = 1e-8;

/// A rank-2 lattice of periods together with the sampling grid on its
/// fundamental domain.
///
/// Node `(j1, j2)` sits at `z = (j1/n1)·gen1 + (j2/n2)·gen2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicLattice {
    gen1: Complex64,
    gen2: Complex64,
    n1: usize,
    n2: usize,
    /// Rows are the dual generators `(a, b)` with `a·Re g_j + b·Im g_j = δ_ij`.
    dual: [[f64; 2]; 2],
}

impl PeriodicLattice {
    pub fn new(gen1: Complex64, gen2: Complex64, n1: usize, n2: usize) -> Result<Self> {
        if n1 < 4 || n2 < 4 || !n1.is_multiple_of(2) || !n2.is_multiple_of(2) {
            return Err(Error::InvalidResolution { n1, n2 });
        }
        let scale = gen1.norm_sqr().max(gen2.norm_sqr());
        let cross = (gen1.conj() * gen2).im;
        let area = if scale > 0.0 {
            cross.abs() / scale
        } else {
            0.0
        };
        if !(area >= DEGENERACY_TOL) {
            return Err(Error::DegenerateLattice { area });
        }
        // K G^T = I with G = [[Re g1, Im g1], [Re g2, Im g2]].
        let (a, b, c, d) = (gen1.re, gen1.im, gen2.re, gen2.im);
        let det = a * d - b * c;
        let dual = [[d / det, -c / det], [-b / det, a / det]];
        Ok(Self {
            gen1,
            gen2,
            n1,
            n2,
            dual,
        })
    }

    /// Square `2π × 2π` torus, the home of the Clifford data.
    pub fn square_2pi(n1: usize, n2: usize) -> Result<Self> {
        Self::new(
            Complex64::new(2.0 * PI, 0.0),
            Complex64::new(0.0, 2.0 * PI),
            n1,
            n2,
        )
    }

    pub fn gen1(&self) -> Complex64 {
        self.gen1
    }

    pub fn gen2(&self) -> Complex64 {
        self.gen2
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dual(&self) -> [[f64; 2]; 2] {
        self.dual
    }

    pub fn area(&self) -> f64 {
        (self.gen1.conj() * self.gen2).im.abs()
    }

    /// Same periods, different sampling.
    pub fn with_resolution(&self, n1: usize, n2: usize) -> Result<Self> {
        Self::new(self.gen1, self.gen2, n1, n2)
    }

    pub fn node(&self, j1: usize, j2: usize) -> Complex64 {
        self.gen1 * (j1 as f64 / self.n1 as f64) + self.gen2 * (j2 as f64 / self.n2 as f64)
    }

    /// Smallest distance between neighbouring nodes.
    pub fn min_spacing(&self) -> f64 {
        (self.gen1.norm() / self.n1 as f64).min(self.gen2.norm() / self.n2 as f64)
    }

    /// The wavevector `c = a + ib` of the plane wave `exp(2πi⟨k, z⟩)` with
    /// `k = (m1 + δ1)·k1 + (m2 + δ2)·k2`.
    pub fn wave(&self, m1: f64, m2: f64) -> Complex64 {
        let [k1, k2] = self.dual;
        Complex64::new(m1 * k1[0] + m2 * k2[0], m1 * k1[1] + m2 * k2[1])
    }
}

/// Periodicity offsets of a field: along each generator the field is
/// periodic (`false`, offset 0) or anti-periodic (`true`, offset ½).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinCharacter {
    pub half1: bool,
    pub half2: bool,
}

impl SpinCharacter {
    pub const TRIVIAL: SpinCharacter = SpinCharacter {
        half1: false,
        half2: false,
    };

    pub fn new(half1: bool, half2: bool) -> Self {
        Self { half1, half2 }
    }

    pub fn is_trivial(&self) -> bool {
        !self.half1 && !self.half2
    }

    pub fn offsets(&self) -> (f64, f64) {
        (
            if self.half1 { 0.5 } else { 0.0 },
            if self.half2 { 0.5 } else { 0.0 },
        )
    }

    /// All four characters, trivial first.
    pub fn all() -> [SpinCharacter; 4] {
        [
            Self::new(false, false),
            Self::new(true, false),
            Self::new(false, true),
            Self::new(true, true),
        ]
    }
}

impl Add for SpinCharacter {
    type Output = SpinCharacter;

    fn add(self, rhs: Self) -> Self {
        Self {
            half1: self.half1 ^ rhs.half1,
            half2: self.half2 ^ rhs.half2,
        }
    }
}

impl fmt::Display for SpinCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = |b: bool| if b { "1/2" } else { "0" };
        write!(f, "({}, {})", h(self.half1), h(self.half2))
    }
}
