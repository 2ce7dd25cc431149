use std::fmt::Write as _;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use mnv_core::io::{read_field, save_state, write_obj};
use mnv_core::weierstrass::{
    clifford_torus, dirac_kernel, extract_spinors, period_defect, revolution_data, round_torus,
    synthesize_immersion,
};
use mnv_core::willmore::{willmore_report, WillmoreReport};
use mnv_core::{GridField, Immersion, Tolerances, WeierstrassData};

use crate::{MakeArgs, SourceKind, Status};

pub fn make(args: &MakeArgs) -> Result<Status> {
    let (data, immersion) = build(args)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    save_state(&args.out.join("state.gwf"), &data)?;
    let immersion = match immersion {
        Some(x) => x,
        None => synthesize_immersion(data.psis())?,
    };
    let mut mesh = BufWriter::new(fs::File::create(args.out.join("mesh.obj"))?);
    write_obj(&mut mesh, &immersion)?;
    mesh.flush()?;
    let report = willmore_report(&data)?;
    let text = report_text(&format!("{:?}", args.source).to_lowercase(), &data, &report)?;
    fs::write(args.out.join("report.txt"), &text)?;
    print!("{text}");
    Ok(Status::Passed)
}

fn input(args: &MakeArgs) -> Result<&Path> {
    match &args.input {
        Some(p) => Ok(p),
        None => bail!("source {:?} needs an input file", args.source),
    }
}

fn build(args: &MakeArgs) -> Result<(WeierstrassData, Option<Immersion>)> {
    let n = args.resolution;
    Ok(match args.source {
        SourceKind::Clifford => {
            let (data, x, _) = clifford_torus(n, n)?;
            (data, Some(x))
        }
        SourceKind::Round => {
            let x = round_torus(args.aspect, n, n)?;
            let (u, psis) = extract_spinors(&x)?;
            (WeierstrassData::new(u, psis)?, Some(x))
        }
        SourceKind::Revolution => {
            let path = input(args)?;
            let profile = read_profile(path)?;
            (revolution_data(&profile, args.period, n)?, None)
        }
        SourceKind::Potential => {
            let path = input(args)?;
            let u = read_field(&mut BufReader::new(fs::File::open(path)?))
                .with_context(|| format!("reading potential {}", path.display()))?;
            (dirac_kernel(&u)?.data, None)
        }
        SourceKind::Immersion => {
            let path = input(args)?;
            let mut r = BufReader::new(fs::File::open(path)?);
            let coords: [GridField; 3] = [
                read_field(&mut r)?,
                read_field(&mut r)?,
                read_field(&mut r)?,
            ];
            let x = Immersion::closed(coords)?;
            let (u, psis) = extract_spinors(&x)?;
            (
                WeierstrassData::with_tolerances(u, psis, &Tolerances::default())?,
                Some(x),
            )
        }
    })
}

/// One sample per line; blank lines and `#` comments are skipped.
pub fn read_profile(path: &Path) -> Result<Vec<f64>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading profile {}", path.display()))?;
    text.lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(k, l)| {
            l.parse::<f64>()
                .with_context(|| format!("{}:{}: not a number: {l:?}", path.display(), k + 1))
        })
        .collect()
}

/// `key = value` lines describing one snapshot.
pub fn report_text(source: &str, data: &WeierstrassData, r: &WillmoreReport) -> Result<String> {
    let l = data.lattice();
    let defect = period_defect(data.psis())?;
    let mut s = String::new();
    writeln!(s, "source = {source}")?;
    writeln!(
        s,
        "lattice = ({}, {}) ({}, {}) {}x{}",
        l.gen1().re,
        l.gen1().im,
        l.gen2().re,
        l.gen2().im,
        l.n1(),
        l.n2()
    )?;
    writeln!(s, "spin_character = {}", data.psis().character())?;
    writeln!(s, "willmore = {:.12}", r.willmore)?;
    writeln!(s, "willmore_direct = {:.12}", r.willmore_direct)?;
    writeln!(s, "bound_gap = {:.6e}", r.bound_gap)?;
    writeln!(s, "el_residual_inf = {:.6e}", r.el_residual.inf)?;
    writeln!(
        s,
        "el_residual_weighted = {:.6e}",
        r.el_residual.weighted_l2
    )?;
    writeln!(
        s,
        "tau = {:.12} {:+.12}i",
        r.conformal_class.tau.re, r.conformal_class.tau.im
    )?;
    writeln!(s, "li_yau_region = {}", r.in_li_yau_region)?;
    writeln!(s, "dirac_residual = {:.6e}", data.dirac_residual_norm())?;
    writeln!(
        s,
        "period_defect_norm = {:.6e}",
        defect
            .iter()
            .flatten()
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    )?;
    Ok(s)
}
