use anyhow::Result;
use mnv_core::verify::Suite;

use crate::{Status, SuiteArg, VerifyArgs};

fn suites(arg: SuiteArg) -> Vec<Suite> {
    match arg {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Spectral => vec![Suite::Spectral],
        SuiteArg::Triples => vec![Suite::Triples],
        SuiteArg::Reductions => vec![Suite::Reductions],
        SuiteArg::Clifford => vec![Suite::Clifford],
        SuiteArg::Representation => vec![Suite::Representation],
        SuiteArg::Exactness => vec![Suite::Exactness],
        SuiteArg::Conservation => vec![Suite::Conservation],
    }
}

/// Prints `seed=…` then one `PASS`/`FAIL suite/check …` line per check.
pub fn verify(args: &VerifyArgs) -> Result<Status> {
    println!("seed={}", args.seed);
    let mut failed = Vec::new();
    for suite in suites(args.suite) {
        let report = suite.run(args.seed)?;
        for check in &report.checks {
            println!("{suite}/{check}");
            if !check.passed() {
                failed.push(format!("{suite}/{}", check.name));
            }
        }
    }
    if failed.is_empty() {
        println!("verify: all checks passed");
        Ok(Status::Passed)
    } else {
        eprintln!("verify: failed checks: {}", failed.join(", "));
        Ok(Status::Failed)
    }
}
