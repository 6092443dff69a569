//! Run-wide configuration: fixed-point precision, worker threads, timing,
//! seed, and envelope defaults, merged from (highest precedence first)
//! command-line flags, a flat `key=value` config file, the environment,
//! and built-in defaults.

use clap::ValueEnum;
use digitweyl::{Error, Result};
use std::fmt;
use std::fs;
use std::path::Path;

/// Environment variable consulted for the worker-thread count when the
/// `--threads` flag is absent.
pub const ENV_THREADS: &str = "DIGITWEYL_THREADS";

/// Default seed for the randomized suites.
pub const DEFAULT_SEED: u64 = 0x00D1_6175;

/// Output format for the tabular subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Comma-separated values with a header row.
    Csv,
    /// One JSON document per run.
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Fixed-point precision of every quantized coefficient.
    pub bits: u32,
    /// Worker threads for the parallel engines; `None` keeps the machine
    /// default. Results are independent of this knob — only speed changes.
    pub threads: Option<usize>,
    /// Report wall-clock times; off by default so equal runs emit equal bytes.
    pub timing: bool,
    /// Seed for the randomized suites.
    pub seed: u64,
    /// Replaces each asymptotically-negligible factor by `2^{εr}`.
    pub epsilon: f64,
    /// Multiplicative constant applied to every envelope.
    pub constant: f64,
    /// Output format for tabular results.
    pub format: OutputFormat,
}

/// Raw settings as they appear in a config file; every field optional.
#[derive(Clone, Debug, Default)]
pub struct PartialConfig {
    pub bits: Option<u32>,
    pub threads: Option<usize>,
    pub timing: Option<bool>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub constant: Option<f64>,
    pub format: Option<OutputFormat>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::description(format!("config key `{key}`: cannot parse `{value}`")))
}

/// Parse a flat `key=value` config file. Blank lines and lines starting
/// with `#` are skipped; unknown keys are rejected.
pub fn parse_config_file(path: &Path) -> Result<PartialConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::description(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = PartialConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::description(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "B" => out.bits = Some(parse_value(key, value)?),
            "threads" => out.threads = Some(parse_value(key, value)?),
            "timing" => out.timing = Some(parse_value(key, value)?),
            "seed" => out.seed = Some(parse_value(key, value)?),
            "epsilon" => out.epsilon = Some(parse_value(key, value)?),
            "constant" => out.constant = Some(parse_value(key, value)?),
            "format" => {
                out.format = Some(match value {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    other => {
                        return Err(Error::description(format!(
                            "config key `format`: `{other}` is not csv or json"
                        )))
                    }
                })
            }
            other => return Err(Error::description(format!("unknown config key `{other}`"))),
        }
    }
    Ok(out)
}

impl RunConfig {
    /// Merge flags over file settings over the environment over defaults,
    /// then validate the invariants.
    pub fn assemble(flags: PartialConfig, file: PartialConfig) -> Result<RunConfig> {
        let env_threads = match std::env::var(ENV_THREADS) {
            Ok(v) => Some(v.parse::<usize>().map_err(|_| {
                Error::description(format!("{ENV_THREADS}: cannot parse `{v}` as a thread count"))
            })?),
            Err(_) => None,
        };
        let cfg = RunConfig {
            bits: flags.bits.or(file.bits).unwrap_or(128),
            threads: flags.threads.or(file.threads).or(env_threads),
            timing: flags.timing.or(file.timing).unwrap_or(false),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            epsilon: flags.epsilon.or(file.epsilon).unwrap_or(0.0),
            constant: flags.constant.or(file.constant).unwrap_or(1.0),
            format: flags.format.or(file.format).unwrap_or(OutputFormat::Csv),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if ![128, 192, 256].contains(&self.bits) {
            return Err(Error::description(format!(
                "B = {} is not one of 128, 192, 256",
                self.bits
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::description("thread count must be ≥ 1"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::description("epsilon must be ≥ 0 and finite"));
        }
        if !(self.constant > 0.0 && self.constant.is_finite()) {
            return Err(Error::description("constant must be positive and finite"));
        }
        Ok(())
    }

    /// Pin the global worker pool when a thread count was requested.
    pub fn install_thread_pool(&self) -> Result<()> {
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::resource(format!("thread pool: {e}")))?;
        }
        Ok(())
    }
}
