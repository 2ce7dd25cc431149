//! Sampled fields on a periodic lattice and their Fourier coefficients.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft::{self, freq};
use crate::lattice::{PeriodicLattice, SpinCharacter};

/// Complex samples of a (possibly anti-periodic) function on the
/// fundamental domain, row-major in `(j1, j2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    lattice: PeriodicLattice,
    character: SpinCharacter,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(
        lattice: PeriodicLattice,
        character: SpinCharacter,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::Format(format!(
                "expected {} samples for a {}x{} grid, got {}",
                lattice.len(),
                lattice.n1(),
                lattice.n2(),
                values.len()
            )));
        }
        Ok(Self {
            lattice,
            character,
            values,
        })
    }

    pub fn zeros(lattice: PeriodicLattice, character: SpinCharacter) -> Self {
        Self {
            lattice,
            character,
            values: vec![Complex64::default(); lattice.len()],
        }
    }

    pub fn constant(lattice: PeriodicLattice, value: Complex64) -> Self {
        Self {
            lattice,
            character: SpinCharacter::TRIVIAL,
            values: vec![value; lattice.len()],
        }
    }

    /// Samples `f(z)` at every node.
    pub fn from_fn(
        lattice: PeriodicLattice,
        character: SpinCharacter,
        mut f: impl FnMut(Complex64) -> Complex64,
    ) -> Self {
        let mut values = Vec::with_capacity(lattice.len());
        for j1 in 0..lattice.n1() {
            for j2 in 0..lattice.n2() {
                values.push(f(lattice.node(j1, j2)));
            }
        }
        Self {
            lattice,
            character,
            values,
        }
    }

    /// Samples a real function of `(x, y)`.
    pub fn real_from_fn(lattice: PeriodicLattice, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        Self::from_fn(lattice, SpinCharacter::TRIVIAL, |z| {
            Complex64::new(f(z.re, z.im), 0.0)
        })
    }

    /// Plane wave `exp(2πi⟨(m1+δ1)k1 + (m2+δ2)k2, z⟩)` sampled at the nodes.
    pub fn mode(lattice: PeriodicLattice, character: SpinCharacter, m1: i64, m2: i64) -> Self {
        let (d1, d2) = character.offsets();
        let (n1, n2) = (lattice.n1() as f64, lattice.n2() as f64);
        let mut values = Vec::with_capacity(lattice.len());
        for j1 in 0..lattice.n1() {
            for j2 in 0..lattice.n2() {
                let ph = 2.0
                    * PI
                    * ((m1 as f64 + d1) * j1 as f64 / n1 + (m2 as f64 + d2) * j2 as f64 / n2);
                values.push(Complex64::from_polar(1.0, ph));
            }
        }
        Self {
            lattice,
            character,
            values,
        }
    }

    pub fn lattice(&self) -> &PeriodicLattice {
        &self.lattice
    }

    pub fn character(&self) -> SpinCharacter {
        self.character
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, j1: usize, j2: usize) -> Complex64 {
        self.values[j1 * self.lattice.n2() + j2]
    }

    pub fn is_trivial(&self) -> bool {
        self.character.is_trivial()
    }

    pub fn check_same_lattice(&self, other: &GridField) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(())
    }

    fn check_compatible(&self, other: &GridField) -> Result<()> {
        self.check_same_lattice(other)?;
        if self.character != other.character {
            return Err(Error::CharacterMismatch(self.character, other.character));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            lattice: self.lattice,
            character: self.character,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        // exp(-2πi(m+½)s) has offset -½ ≡ ½, so conjugation keeps the character.
        self.map(|v| v.conj())
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        self.map(|v| v * s)
    }

    /// Real part, as a real-valued field.
    pub fn re(&self) -> Self {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    /// Imaginary part, as a real-valued field.
    pub fn im(&self) -> Self {
        self.map(|v| Complex64::new(v.im, 0.0))
    }

    pub fn try_add(&self, other: &GridField) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &GridField) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    /// Nodal product without dealiasing; characters add.
    pub fn try_mul(&self, other: &GridField) -> Result<Self> {
        self.check_same_lattice(other)?;
        let mut out = self.zip(other, |a, b| a * b);
        out.character = self.character + other.character;
        Ok(out)
    }

    fn zip(&self, other: &GridField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            lattice: self.lattice,
            character: self.character,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn min_re(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(v.re))
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// Root-mean-square of the samples.
    pub fn rms(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    /// `max|self - other|`.
    pub fn distance(&self, other: &GridField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Fails unless `max|Im| <= tol · max(max|v|, 1e-300)`.
    pub fn require_real(&self, tol: f64) -> Result<()> {
        let imag = self.max_imag();
        let scale = self.max_abs();
        if imag > tol * scale.max(1e-300) {
            return Err(Error::NotReal { imag, scale });
        }
        Ok(())
    }

    pub fn require_trivial(&self) -> Result<()> {
        if !self.is_trivial() {
            return Err(Error::NontrivialCharacter(self.character));
        }
        Ok(())
    }

    /// Forward transform to normalized Fourier coefficients.
    pub fn spectrum(&self) -> Spectrum {
        let (n1, n2) = (self.lattice.n1(), self.lattice.n2());
        let mut data = self.values.clone();
        apply_phase(&mut data, n1, n2, self.character, -1.0);
        fft::fft2(&mut data, n1, n2, FftDirection::Forward);
        let norm = 1.0 / (n1 * n2) as f64;
        data.iter_mut().for_each(|v| *v *= norm);
        Spectrum {
            lattice: self.lattice,
            character: self.character,
            coeffs: data,
        }
    }
}

impl Add for &GridField {
    type Output = GridField;
    fn add(self, rhs: &GridField) -> GridField {
        self.try_add(rhs).expect("incompatible fields in +")
    }
}

impl Sub for &GridField {
    type Output = GridField;
    fn sub(self, rhs: &GridField) -> GridField {
        self.try_sub(rhs).expect("incompatible fields in -")
    }
}

impl Mul<f64> for &GridField {
    type Output = GridField;
    fn mul(self, rhs: f64) -> GridField {
        self.scale(rhs)
    }
}

impl Neg for &GridField {
    type Output = GridField;
    fn neg(self) -> GridField {
        self.scale(-1.0)
    }
}

/// Multiplies sample `(j1, j2)` by `exp(sign·2πi(δ1 j1/n1 + δ2 j2/n2))`.
pub(crate) fn apply_phase(
    data: &mut [Complex64],
    n1: usize,
    n2: usize,
    ch: SpinCharacter,
    sign: f64,
) {
    if ch.is_trivial() {
        return;
    }
    let (d1, d2) = ch.offsets();
    let p1: Vec<Complex64> = (0..n1)
        .map(|j| Complex64::from_polar(1.0, sign * 2.0 * PI * d1 * j as f64 / n1 as f64))
        .collect();
    let p2: Vec<Complex64> = (0..n2)
        .map(|j| Complex64::from_polar(1.0, sign * 2.0 * PI * d2 * j as f64 / n2 as f64))
        .collect();
    for (j1, row) in data.chunks_mut(n2).enumerate() {
        for (j2, v) in row.iter_mut().enumerate() {
            *v *= p1[j1] * p2[j2];
        }
    }
}

/// Fourier coefficients of a [`GridField`] in FFT bin order.
///
/// Bin `(b1, b2)` carries the plane wave with shifted frequencies
/// `(m1 + δ1, m2 + δ2)`, `m = freq(b)`. On an axis with offset 0 the bin
/// `n/2` is the unpaired Nyquist mode; it is kept for exact round trips
/// but every derivative maps it to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    lattice: PeriodicLattice,
    character: SpinCharacter,
    coeffs: Vec<Complex64>,
}

/// One Fourier bin: its storage index, wavevector `c = a + ib`, and
/// whether it is a Nyquist bin.
#[derive(Clone, Copy, Debug)]
pub struct Mode {
    pub index: usize,
    pub m1: f64,
    pub m2: f64,
    pub wave: Complex64,
    pub nyquist: bool,
}

impl Spectrum {
    pub fn zeros(lattice: PeriodicLattice, character: SpinCharacter) -> Self {
        Self {
            lattice,
            character,
            coeffs: vec![Complex64::default(); lattice.len()],
        }
    }

    pub fn lattice(&self) -> &PeriodicLattice {
        &self.lattice
    }

    pub fn character(&self) -> SpinCharacter {
        self.character
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of the constant mode; zero for anti-periodic characters.
    pub fn zero_mode(&self) -> Complex64 {
        if self.character.is_trivial() {
            self.coeffs[0]
        } else {
            Complex64::default()
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        let (n1, n2) = (self.lattice.n1(), self.lattice.n2());
        let (d1, d2) = self.character.offsets();
        let (h1, h2) = (self.character.half1, self.character.half2);
        (0..n1 * n2).map(move |index| {
            let (b1, b2) = (index / n2, index % n2);
            let m1 = freq(b1, n1) as f64 + d1;
            let m2 = freq(b2, n2) as f64 + d2;
            Mode {
                index,
                m1,
                m2,
                wave: self.lattice.wave(m1, m2),
                nyquist: (!h1 && b1 == n1 / 2) || (!h2 && b2 == n2 / 2),
            }
        })
    }

    /// Multiplies every in-band coefficient by `symbol(wave)`; Nyquist bins are zeroed.
    pub fn apply(&self, symbol: impl Fn(Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        for mode in self.modes() {
            out.coeffs[mode.index] = if mode.nyquist {
                Complex64::default()
            } else {
                self.coeffs[mode.index] * symbol(mode.wave)
            };
        }
        out
    }

    pub fn drop_nyquist(&self) -> Self {
        self.apply(|_| Complex64::new(1.0, 0.0))
    }

    /// Coefficients of the complex conjugate field: the wave `k + δ` goes to `−k − δ`.
    pub fn conj(&self) -> Self {
        let (n1, n2) = (self.lattice.n1(), self.lattice.n2());
        let (d1, d2) = self.character.offsets();
        let mut out = Self::zeros(self.lattice, self.character);
        for mode in self.modes() {
            let f1 = fft::bin((-mode.m1 - d1).round() as i64, n1);
            let f2 = fft::bin((-mode.m2 - d2).round() as i64, n2);
            out.coeffs[f1 * n2 + f2] = self.coeffs[mode.index].conj();
        }
        out
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: impl Into<Complex64>, other: &Spectrum) -> Self {
        debug_assert_eq!(self.lattice, other.lattice);
        debug_assert_eq!(self.character, other.character);
        let s = s.into();
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a += s * b);
        out
    }

    pub fn add_assign_scaled(&mut self, s: impl Into<Complex64>, other: &Spectrum) {
        let s = s.into();
        self.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a += s * b);
    }

    pub fn to_field(&self) -> GridField {
        let (n1, n2) = (self.lattice.n1(), self.lattice.n2());
        let mut data = self.coeffs.clone();
        fft::fft2(&mut data, n1, n2, FftDirection::Inverse);
        apply_phase(&mut data, n1, n2, self.character, 1.0);
        GridField {
            lattice: self.lattice,
            character: self.character,
            values: data,
        }
    }
}
