//! Command-line experiment harness: each command runs one of the library's
//! numerical checks and emits its records as CSV or JSON.

mod commands;
mod oracle;

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

pub use oracle::prohorov_brute_force;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Recover the Gaussian matrix and drift of a synthetic Lévy–Khintchine triple from its exponent
    LevyRecover,
    /// Lévy measure convergence delta_{1+1/n} -> delta_1 seen through products F_u F_v
    LevyConverge,
    /// Laplace functional of a random measure: product identity and recovery of the deterministic part
    RandomMeasure,
    /// Killed Brownian motion from eps: (1/eps) P(lifetime > t) against the excursion tail sqrt(2/(pi t))
    Excursion,
    /// Fragmentations: the uniform witness with G_1 = 1 and the power-sum convergence checks
    Fragmentation,
    /// Stone-Weierstrass approximation by polynomials vanishing on the face x_1 = 0
    SwApprox,
    /// Exact Prohorov distance against a subset-enumeration brute force
    ProhorovOracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::LevyRecover => "levy-recover",
            Self::LevyConverge => "levy-converge",
            Self::RandomMeasure => "random-measure",
            Self::Excursion => "excursion",
            Self::Fragmentation => "fragmentation",
            Self::SwApprox => "sw-approx",
            Self::ProhorovOracle => "prohorov-oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Parameters not given on the command line take per-command defaults,
/// filled in by [`ExperimentConfig::resolved`].
#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "measura", version, about = "Numerical checks for boundedly finite measures")]
pub struct ExperimentConfig {
    #[arg(long, value_enum)]
    pub command: Command,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Starting point of the killed Brownian motion (excursion) or approximation accuracy (sw-approx)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Time step of the Brownian simulation
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Number of simulated paths, or of random samples for the other commands
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<usize>,
    /// Largest m in the Richardson schedule
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<f64>,
    /// Dimension D (Lévy commands) or ground-set size (random-measure)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Largest power p in the fragmentation power sums
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_p: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Output file; standard output if absent
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; results do not depend on it
    #[arg(long, env = "MEASURA_WORKERS")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("invalid --{field}: {reason}")]
pub struct UsageError {
    pub field: &'static str,
    pub reason: String,
}

fn usage(field: &'static str, reason: impl Into<String>) -> UsageError {
    UsageError { field, reason: reason.into() }
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            seed: 0,
            eps: None,
            dt: None,
            n_paths: None,
            m_max: None,
            dim: None,
            max_p: None,
            tol: None,
            out: None,
            format: Format::Csv,
            workers: None,
        }
    }

    /// Fills in the defaults of the parameters the command uses, drops the
    /// others, and checks ranges.
    pub fn resolved(&self) -> Result<Self, UsageError> {
        let mut c = Self { out: self.out.clone(), ..Self::new(self.command) };
        c.seed = self.seed;
        c.format = self.format;
        c.workers = self.workers;
        match self.command {
            Command::LevyRecover => {
                c.dim = Some(self.dim.unwrap_or(2));
                c.m_max = Some(self.m_max.unwrap_or(1e3));
                c.tol = Some(self.tol.unwrap_or(1e-2));
            }
            Command::LevyConverge => {
                c.dim = Some(self.dim.unwrap_or(1));
                c.n_paths = Some(self.n_paths.unwrap_or(20));
                c.tol = Some(self.tol.unwrap_or(1e-3));
            }
            Command::RandomMeasure => {
                c.dim = Some(self.dim.unwrap_or(3));
                c.n_paths = Some(self.n_paths.unwrap_or(1000));
                c.m_max = Some(self.m_max.unwrap_or(1e3));
                c.tol = Some(self.tol.unwrap_or(1e-3));
            }
            Command::Excursion => {
                c.eps = Some(self.eps.unwrap_or(0.01));
                c.dt = Some(self.dt.unwrap_or(measura::excursion::DEFAULT_DT));
                c.n_paths = Some(self.n_paths.unwrap_or(measura::excursion::DEFAULT_N_PATHS));
            }
            Command::Fragmentation => {
                c.n_paths = Some(self.n_paths.unwrap_or(1000));
                c.max_p = Some(self.max_p.unwrap_or(6));
                c.tol = Some(self.tol.unwrap_or(1e-6));
            }
            Command::SwApprox => {
                c.eps = Some(self.eps.unwrap_or(0.05));
                c.m_max = Some(self.m_max.unwrap_or(1024.0));
            }
            Command::ProhorovOracle => {
                c.n_paths = Some(self.n_paths.unwrap_or(500));
                c.tol = Some(self.tol.unwrap_or(1e-4));
            }
        }
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<(), UsageError> {
        if let Some(eps) = self.eps {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(usage("eps", format!("{eps} not in (0, 1)")));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt <= 0.1) {
                return Err(usage("dt", format!("{dt} not in (0, 0.1]")));
            }
        }
        if let Some(n) = self.n_paths {
            let min = if self.command == Command::Excursion { 100 } else { 1 };
            if n < min {
                return Err(usage("n-paths", format!("{n} is below {min}")));
            }
        }
        if let Some(m) = self.m_max {
            if !(m >= 8.0 && m.is_finite()) {
                return Err(usage("m-max", format!("{m} is below 8")));
            }
        }
        if let Some(d) = self.dim {
            let max = if self.command == Command::RandomMeasure { 16 } else { 3 };
            if !(1..=max).contains(&d) {
                return Err(usage("dim", format!("{d} not in 1..={max}")));
            }
        }
        if let Some(p) = self.max_p {
            if !(1..=64).contains(&p) {
                return Err(usage("max-p", format!("{p} not in 1..=64")));
            }
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(usage("tol", format!("{tol} is not positive")));
            }
        }
        if self.workers == Some(0) {
            return Err(usage("workers", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub library_version: String,
    pub seed: u64,
    pub rng: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub verdicts: Vec<Verdict>,
    pub meta: Meta,
    /// Reported on standard error only, so that output files are reproducible.
    pub wall_clock: Duration,
}

impl ExperimentResult {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// Rows as `column -> value` objects, in column order.
    pub fn records(&self) -> Vec<serde_json::Map<String, serde_json::Value>> {
        self.rows
            .iter()
            .map(|row| self.columns.iter().cloned().zip(row.iter().map(|v| serde_json::json!(v))).collect())
            .collect()
    }
}

/// Runs the configured command. Parameters are resolved first; library
/// errors carry the command name.
pub fn run(config: &ExperimentConfig) -> anyhow::Result<ExperimentResult> {
    let config = config.resolved()?;
    let start = std::time::Instant::now();
    let table = commands::dispatch(&config)
        .map_err(|e| anyhow::Error::new(e).context(format!("command {} failed", config.command.name())))?;
    Ok(ExperimentResult {
        meta: Meta {
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            rng: "ChaCha8 seeded from --seed, one stream per batch of 1024 samples".to_string(),
        },
        config,
        columns: table.columns.iter().map(|c| c.to_string()).collect(),
        rows: table.rows,
        verdicts: table.verdicts,
        wall_clock: start.elapsed(),
    })
}

#[derive(Serialize, Deserialize)]
struct JsonDocument {
    config: ExperimentConfig,
    rows: Vec<serde_json::Map<String, serde_json::Value>>,
    verdicts: Vec<Verdict>,
    meta: Meta,
}

/// CSV: header then one line per row, values with 17 significant digits.
/// JSON: one object `{config, rows, verdicts, meta}`.
pub fn emit(result: &ExperimentResult, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", result.columns.join(","))?;
            for row in &result.rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        Format::Json => {
            let doc = JsonDocument {
                config: result.config.clone(),
                rows: result.records(),
                verdicts: result.verdicts.clone(),
                meta: result.meta.clone(),
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()
}

/// Parses a JSON document written by [`emit`] back into its rows and verdicts.
pub fn parse_json(text: &str) -> serde_json::Result<(Vec<serde_json::Map<String, serde_json::Value>>, Vec<Verdict>)> {
    let doc: JsonDocument = serde_json::from_str(text)?;
    Ok((doc.rows, doc.verdicts))
}
