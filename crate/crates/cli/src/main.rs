use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use measura_cli::{emit, run, ExperimentConfig, UsageError};

fn main() -> ExitCode {
    let config = ExperimentConfig::parse();
    match execute(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn execute(config: &ExperimentConfig) -> anyhow::Result<()> {
    if let Some(workers) = config.workers {
        rayon::ThreadPoolBuilder::new().num_threads(workers).build_global().context("starting worker pool")?;
    }
    let result = run(config)?;
    let mut out: Box<dyn Write> = match &config.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    emit(&result, config.format, &mut out).context("writing results")?;
    for v in &result.verdicts {
        eprintln!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    eprintln!("wall clock: {:.3} s", result.wall_clock.as_secs_f64());
    Ok(())
}
