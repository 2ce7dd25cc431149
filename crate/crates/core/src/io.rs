//! File formats: GWF1 field records, state snapshots, wavefront meshes,
//! per-node scalar and invariant CSVs, and the TOML run manifest.
//!
//! A GWF1 record is the magic `GWF1`, the generators as four little-endian
//! `f64` (`Re g₁, Im g₁, Re g₂, Im g₂`), `n1, n2` as little-endian `u32`, the
//! two half-offset flags as bytes `0`/`1`, then `n1·n2` samples row-major as
//! `(re, im)` `f64` pairs. A state snapshot is the records `U, ψ₁, ψ₂` in a row.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::GridField;
use crate::flows::{FlowConfig, Gauge, Scheme};
use crate::lattice::{PeriodicLattice, SpinCharacter};
use crate::tolerances::Tolerances;
use crate::weierstrass::{
    gaussian_curvature, induced_metric_density, mean_curvature, Immersion, SpinorPair,
    WeierstrassData,
};
use crate::willmore::InvariantRow;

pub const MAGIC: &[u8; 4] = b"GWF1";

pub fn write_field(w: &mut impl Write, f: &GridField) -> Result<()> {
    let l = f.lattice();
    w.write_all(MAGIC)?;
    for v in [l.gen1().re, l.gen1().im, l.gen2().re, l.gen2().im] {
        w.write_all(&v.to_le_bytes())?;
    }
    for n in [l.n1(), l.n2()] {
        let n = u32::try_from(n)
            .map_err(|_| Error::Format(format!("resolution {n} does not fit in u32")))?;
        w.write_all(&n.to_le_bytes())?;
    }
    let (h1, h2) = f.character().offsets();
    w.write_all(&[(h1 != 0.0) as u8, (h2 != 0.0) as u8])?;
    let mut buf = Vec::with_capacity(16 * f.values().len());
    for v in f.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn flag(b: u8) -> Result<bool> {
    match b {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(Error::Format(format!(
            "offset flag must be 0 or 1, got {b}"
        ))),
    }
}

/// Reads one record. Truncated input is a `Format` error, not an I/O error.
pub fn read_field(r: &mut impl Read) -> Result<GridField> {
    read_field_inner(r).map_err(|e| match e {
        Error::Io(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
            Error::Format("truncated record".into())
        }
        e => e,
    })
}

fn read_field_inner(r: &mut impl Read) -> Result<GridField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let g = [read_f64(r)?, read_f64(r)?, read_f64(r)?, read_f64(r)?];
    let (n1, n2) = (read_u32(r)? as usize, read_u32(r)? as usize);
    let mut offsets = [0u8; 2];
    r.read_exact(&mut offsets)?;
    let character = SpinCharacter::new(flag(offsets[0])?, flag(offsets[1])?);
    let lattice = PeriodicLattice::new(
        Complex64::new(g[0], g[1]),
        Complex64::new(g[2], g[3]),
        n1,
        n2,
    )?;
    let mut buf = vec![0u8; 16 * lattice.len()];
    r.read_exact(&mut buf)?;
    let values = buf
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    GridField::new(lattice, character, values)
}

pub fn write_state(w: &mut impl Write, data: &WeierstrassData) -> Result<()> {
    write_field(w, data.u())?;
    write_field(w, data.psis().psi1())?;
    write_field(w, data.psis().psi2())
}

/// Reads `U, ψ₁, ψ₂` and rejects trailing bytes.
pub fn read_state(r: &mut impl Read, tol: &Tolerances) -> Result<WeierstrassData> {
    let u = read_field(r)?;
    let psis = SpinorPair::new(read_field(r)?, read_field(r)?)?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format(
            "trailing bytes after the third record".into(),
        ));
    }
    WeierstrassData::with_tolerances(u, psis, tol)
}

pub fn save_state(path: &Path, data: &WeierstrassData) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_state(&mut w, data)?;
    w.flush()?;
    Ok(())
}

pub fn load_state(path: &Path, tol: &Tolerances) -> Result<WeierstrassData> {
    read_state(&mut BufReader::new(File::open(path)?), tol)
}

/// Vertices at the grid nodes, one quad per cell with periodic wraparound.
pub fn write_obj(w: &mut impl Write, x: &Immersion) -> Result<()> {
    let l = *x.lattice();
    let (n1, n2) = (l.n1(), l.n2());
    writeln!(w, "# torus mesh {n1}x{n2}")?;
    for p in x.positions() {
        writeln!(w, "v {:.17e} {:.17e} {:.17e}", p[0], p[1], p[2])?;
    }
    let id = |j1: usize, j2: usize| (j1 % n1) * n2 + (j2 % n2) + 1;
    for j1 in 0..n1 {
        for j2 in 0..n2 {
            writeln!(
                w,
                "f {} {} {} {}",
                id(j1, j2),
                id(j1 + 1, j2),
                id(j1 + 1, j2 + 1),
                id(j1, j2 + 1)
            )?;
        }
    }
    Ok(())
}

/// Vertex and quad counts of a wavefront mesh.
pub fn obj_counts(text: &str) -> (usize, usize) {
    text.lines().fold((0, 0), |(v, f), line| {
        match line.split_whitespace().next() {
            Some("v") => (v + 1, f),
            Some("f") => (v, f + 1),
            _ => (v, f),
        }
    })
}

/// Per-node quantities of `(U, ψ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scalar {
    D,
    H,
    K,
    U,
}

impl Scalar {
    pub const ALL: [Scalar; 4] = [Scalar::D, Scalar::H, Scalar::K, Scalar::U];

    pub fn field(&self, data: &WeierstrassData) -> Result<GridField> {
        match self {
            Scalar::D => Ok(induced_metric_density(data.psis())),
            Scalar::H => mean_curvature(data.u(), data.psis()),
            Scalar::K => gaussian_curvature(data.psis()),
            Scalar::U => Ok(data.u().clone()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scalar::D => "D",
            Scalar::H => "H",
            Scalar::K => "K",
            Scalar::U => "U",
        })
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" => Ok(Scalar::D),
            "H" => Ok(Scalar::H),
            "K" => Ok(Scalar::K),
            "U" => Ok(Scalar::U),
            _ => Err(Error::InvalidParameter(format!(
                "unknown scalar {s:?}, expected D, H, K or U"
            ))),
        }
    }
}

/// A `#` line with the quantity and lattice, then `j1,j2,x,y,<quantity>`.
pub fn write_scalars(w: &mut impl Write, data: &WeierstrassData, q: Scalar) -> Result<()> {
    let f = q.field(data)?;
    let l = *f.lattice();
    writeln!(
        w,
        "# quantity={q} gen1=({},{}) gen2=({},{}) n1={} n2={}",
        l.gen1().re,
        l.gen1().im,
        l.gen2().re,
        l.gen2().im,
        l.n1(),
        l.n2()
    )?;
    writeln!(w, "j1,j2,x,y,{q}")?;
    for j1 in 0..l.n1() {
        for j2 in 0..l.n2() {
            let z = l.node(j1, j2);
            writeln!(
                w,
                "{j1},{j2},{:.17e},{:.17e},{:.17e}",
                z.re,
                z.im,
                f.at(j1, j2).re
            )?;
        }
    }
    Ok(())
}

/// Invariant time series with header
/// `t,willmore,mean_U,constraint_residual,dirac_residual,period_defect_norm,imag_U_norm`.
pub struct TimeSeriesWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> TimeSeriesWriter<W> {
    pub fn new(w: W) -> Self {
        Self {
            inner: csv::Writer::from_writer(w),
        }
    }

    pub fn push(&mut self, row: &InvariantRow) -> Result<()> {
        self.inner.serialize(row).map_err(csv_error)?;
        self.inner.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Format(format!("{other:?}")),
    }
}

pub fn read_time_series(r: impl Read) -> Result<Vec<InvariantRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(csv_error))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeRecord {
    pub gen1: [f64; 2],
    pub gen2: [f64; 2],
    pub n1: usize,
    pub n2: usize,
}

impl From<&PeriodicLattice> for LatticeRecord {
    fn from(l: &PeriodicLattice) -> Self {
        Self {
            gen1: [l.gen1().re, l.gen1().im],
            gen2: [l.gen2().re, l.gen2().im],
            n1: l.n1(),
            n2: l.n2(),
        }
    }
}

impl LatticeRecord {
    pub fn lattice(&self) -> Result<PeriodicLattice> {
        PeriodicLattice::new(
            Complex64::new(self.gen1[0], self.gen1[1]),
            Complex64::new(self.gen2[0], self.gen2[1]),
            self.n1,
            self.n2,
        )
    }
}

/// Everything needed to repeat a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub source: String,
    pub lattice: LatticeRecord,
    pub scheme: Scheme,
    pub gauge: Gauge,
    pub dealias: bool,
    pub dt: f64,
    pub steps: usize,
    pub snapshot_every: usize,
    pub tolerances: Tolerances,
}

impl RunManifest {
    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            scheme: self.scheme,
            gauge: self.gauge,
            dealias: self.dealias,
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GridField {
        let l = PeriodicLattice::new(Complex64::new(2.0, 0.1), Complex64::new(-0.3, 1.7), 6, 4)
            .unwrap();
        GridField::from_fn(l, SpinCharacter::new(true, false), |z| {
            Complex64::new(z.re.sin(), z.im * z.re)
        })
    }

    #[test]
    fn field_roundtrip_is_bit_identical() {
        let f = sample();
        let mut bytes = Vec::new();
        write_field(&mut bytes, &f).unwrap();
        assert_eq!(bytes.len(), 4 + 32 + 8 + 2 + 16 * 24);
        assert_eq!(&bytes[..4], b"GWF1");
        assert_eq!(&bytes[44..46], &[1, 0]);
        let g = read_field(&mut bytes.as_slice()).unwrap();
        assert_eq!(g.lattice(), f.lattice());
        assert_eq!(g.character(), f.character());
        assert!(g
            .values()
            .iter()
            .zip(f.values())
            .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
        let mut again = Vec::new();
        write_field(&mut again, &g).unwrap();
        assert_eq!(again, bytes);
    }

    #[test]
    fn malformed_records_are_rejected() {
        let mut bytes = Vec::new();
        write_field(&mut bytes, &sample()).unwrap();
        assert!(matches!(
            read_field(&mut &bytes[..bytes.len() - 1]),
            Err(Error::Format(_))
        ));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_field(&mut bad.as_slice()),
            Err(Error::Format(_))
        ));
        let mut bad = bytes.clone();
        bad[44] = 2;
        assert!(matches!(
            read_field(&mut bad.as_slice()),
            Err(Error::Format(_))
        ));
        let mut odd = bytes;
        odd[36..40].copy_from_slice(&5u32.to_le_bytes());
        assert!(matches!(
            read_field(&mut odd.as_slice()),
            Err(Error::InvalidResolution { .. })
        ));
    }

    #[test]
    fn scalar_names_parse() {
        for q in Scalar::ALL {
            assert_eq!(q.to_string().parse::<Scalar>().unwrap(), q);
        }
        assert!("W".parse::<Scalar>().is_err());
    }
}
