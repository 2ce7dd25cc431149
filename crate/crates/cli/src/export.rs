use std::fs;
use std::io::{BufWriter, Write};

use anyhow::{anyhow, Context, Result};
use clap::ValueEnum;
use mnv_core::io::{load_state, read_time_series, write_obj, write_scalars, Scalar};
use mnv_core::weierstrass::synthesize_immersion;
use mnv_core::Tolerances;

use crate::{ExportArgs, Format, Status};

pub fn export(args: &ExportArgs) -> Result<Status> {
    let format = Format::from_str(&args.format, true).map_err(|_| {
        anyhow!(
            "unknown export format {:?}; expected one of obj, scalars, series",
            args.format
        )
    })?;
    let mut out = BufWriter::new(
        fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?,
    );
    match format {
        Format::Obj => {
            let data = load_state(&args.input, &Tolerances::default())?;
            write_obj(&mut out, &synthesize_immersion(data.psis())?)?;
        }
        Format::Scalars => {
            let q: Scalar = args.quantity.parse()?;
            let data = load_state(&args.input, &Tolerances::default())?;
            write_scalars(&mut out, &data, q)?;
        }
        Format::Series => {
            let rows = read_time_series(fs::File::open(&args.input)?)?;
            writeln!(out, "# t willmore mean_U constraint_residual dirac_residual period_defect_norm imag_U_norm")?;
            for r in rows {
                writeln!(
                    out,
                    "{:.10e} {:.15e} {:.15e} {:.6e} {:.6e} {:.6e} {:.6e}",
                    r.t,
                    r.willmore,
                    r.mean_u,
                    r.constraint_residual,
                    r.dirac_residual,
                    r.period_defect_norm,
                    r.imag_u_norm
                )?;
            }
        }
    }
    out.flush()?;
    Ok(Status::Passed)
}
