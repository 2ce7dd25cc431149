use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mnv_core::flows::{default_dt, step_with, FlowConfig, FlowState};
use mnv_core::io::{
    load_state, save_state, write_obj, LatticeRecord, RunManifest, TimeSeriesWriter,
};
use mnv_core::weierstrass::{clifford_torus, synthesize_immersion};
use mnv_core::willmore::{flow_report, invariant_row};
use mnv_core::{Tolerances, WeierstrassData};

use crate::{EvolveArgs, Status};

pub fn snapshot_name(step: usize) -> String {
    format!("state_{step:07}.gwf")
}

fn initial(args: &EvolveArgs, tol: &Tolerances) -> Result<WeierstrassData> {
    if args.input == "clifford" {
        Ok(clifford_torus(args.resolution, args.resolution)?.0)
    } else {
        let path = Path::new(&args.input);
        load_state(path, tol).with_context(|| format!("reading snapshot {}", path.display()))
    }
}

pub fn load_tolerances(path: Option<&PathBuf>) -> Result<Tolerances> {
    match path {
        None => Ok(Tolerances::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

pub fn evolve(args: &EvolveArgs) -> Result<Status> {
    anyhow::ensure!(args.every > 0, "--every must be positive");
    let tol = load_tolerances(args.tolerances.as_ref())?;
    let data = initial(args, &tol)?;
    let lattice = *data.lattice();
    let dt = args.dt.unwrap_or_else(|| default_dt(&lattice));
    anyhow::ensure!(dt > 0.0 && dt.is_finite(), "dt must be positive, got {dt}");
    let config = FlowConfig {
        scheme: args.scheme.into(),
        gauge: args.gauge,
        dealias: !args.no_dealias,
    };

    let snapshots = args.out.join("snapshots");
    fs::create_dir_all(&snapshots).with_context(|| format!("creating {}", snapshots.display()))?;
    let manifest = RunManifest {
        source: args.input.clone(),
        lattice: LatticeRecord::from(&lattice),
        scheme: config.scheme,
        gauge: config.gauge,
        dealias: config.dealias,
        dt,
        steps: args.steps,
        snapshot_every: args.every,
        tolerances: tol.clone(),
    };
    fs::write(args.out.join("manifest.toml"), manifest.to_toml()?)?;

    let mut series = TimeSeriesWriter::new(fs::File::create(args.out.join("invariants.csv"))?);
    let mut state = FlowState::new(data, &config);
    let mut kept = vec![state.clone()];
    series.push(&invariant_row(&state)?)?;
    save_state(&snapshots.join(snapshot_name(0)), &state.data)?;
    let mut guard = None;
    for k in 1..=args.steps {
        match step_with(&state, dt, &config, &tol) {
            Ok(next) => state = next,
            Err(e) => {
                guard = Some(format!("step {k}: {e}"));
                break;
            }
        }
        if k % args.every == 0 || k == args.steps {
            series.push(&invariant_row(&state)?)?;
            save_state(&snapshots.join(snapshot_name(k)), &state.data)?;
            kept.push(state.clone());
        }
    }

    let mesh = args.out.join("final.obj");
    match synthesize_immersion(state.psis()) {
        Ok(x) => {
            let mut w = std::io::BufWriter::new(fs::File::create(&mesh)?);
            write_obj(&mut w, &x)?;
            w.flush()?;
        }
        Err(e) => eprintln!("warning: no final mesh: {e}"),
    }

    let report = flow_report(&kept, &tol.flow)?;
    let mut summary = format!(
        "t = {}\nsteps = {}\nwillmore_drift = {:.3e}\nmax_constraint_residual = {:.3e}\nmax_dirac_residual = {:.3e}\nmax_period_defect = {:.3e}\nperiod_defect_change = {:.3e}\nmax_imag_U = {:.3e}\n",
        state.t,
        kept.len(),
        report.willmore_drift,
        report.max_constraint_residual,
        report.max_dirac_residual,
        report.max_period_defect,
        report.period_defect_change,
        report.max_imag_u,
    );
    let mut failures = report.violations.clone();
    if let Some(g) = guard {
        failures.insert(0, format!("blow-up guard: {g}"));
    }
    for f in &failures {
        summary.push_str(&format!("FAIL {f}\n"));
    }
    fs::write(args.out.join("summary.txt"), &summary)?;
    print!("{summary}");
    if failures.is_empty() {
        Ok(Status::Passed)
    } else {
        for f in &failures {
            eprintln!("invariant breach: {f}");
        }
        Ok(Status::Failed)
    }
}
