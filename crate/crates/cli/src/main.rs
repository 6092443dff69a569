//! Command-line front door: exact exponential sums over digitally
//! restricted integers, theoretical envelopes next to measurements, exact
//! discrepancy, continued-fraction certification, mean-value counts, and a
//! self-test of every cross-module invariant.
//!
//! Exit codes: 0 success, 1 selftest violation, 2 usage error, 3 resource
//! guard. Output is byte-identical across runs and thread counts for a
//! fixed config and seed (wall-clock columns print 0 unless `--timing`).

mod commands;
mod config;
mod measure;
mod parse;
mod svg;

use clap::{Args, Parser, Subcommand};
use commands::{DiscrepancyRequest, ScanRequest, SumRequest, VerifyRequest};
use config::{parse_config_file, OutputFormat, PartialConfig, RunConfig};
use digitweyl::Error;
use measure::{ClassParams, SetKind};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "digitweyl",
    version,
    about = "Exact Weyl sums over digitally restricted integers",
    propagate_version = true
)]
struct Cli {
    /// Fixed-point precision for quantized coefficients (128, 192, or 256).
    #[arg(long = "B", global = true, value_name = "BITS")]
    bits: Option<u32>,
    /// Worker threads (default: machine parallelism, or DIGITWEYL_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report wall-clock times (off by default to keep output byte-stable).
    #[arg(long, global = true)]
    timing: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replace each asymptotically-negligible envelope factor by 2^(εr).
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Multiplicative constant applied to every envelope.
    #[arg(long, global = true)]
    constant: Option<f64>,
    /// Output format for tabular subcommands.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Flat key=value config file (keys: B, threads, timing, seed, epsilon,
    /// constant, format); flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SetArgs {
    /// Bit length: the class lives in [0, 2^r).
    #[arg(long)]
    r: Option<u32>,
    /// Digit sum (set = fixed).
    #[arg(long)]
    s: Option<u32>,
    /// Residue (set = cong or chi11).
    #[arg(long)]
    k: Option<u32>,
    /// Modulus (set = cong).
    #[arg(long)]
    m: Option<u32>,
}

#[derive(Args)]
struct EnvelopeArgs {
    /// Envelope formula to evaluate next to the measurement.
    #[arg(long)]
    formula: Option<String>,
    /// Fixed Dirichlet denominator for formulas that need one.
    #[arg(long)]
    q: Option<u64>,
    /// `auto`: derive (a, q) from the leading coefficient's convergents.
    #[arg(long, value_name = "auto")]
    alpha_q: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// One exponential sum over a digit class, twist, or classical range.
    Sum {
        /// Polynomial: comma-separated coefficients, lowest degree first,
        /// no constant term (rat:p/q, dec:0.…, root:k:p/q, bare integers).
        #[arg(long, value_name = "COEFFS")]
        poly: String,
        /// Index family to sum over.
        #[arg(long, value_enum)]
        set: SetKind,
        #[command(flatten)]
        class: SetArgs,
        /// Frequency multiplier ℓ ≥ 1.
        #[arg(long, default_value_t = 1)]
        ell: u64,
        /// Multiplier h ≠ 0 (set = classical).
        #[arg(long, allow_hyphen_values = true)]
        h: Option<i64>,
        /// Number of terms N (set = classical sums over 1..=N).
        #[arg(long)]
        n: Option<u64>,
        #[command(flatten)]
        envelope: EnvelopeArgs,
    },
    /// Sweep r over an inclusive range, one row per step.
    Scan {
        #[arg(long, value_name = "COEFFS")]
        poly: String,
        #[arg(long, value_enum)]
        set: SetKind,
        /// Inclusive range `a..b` of bit lengths.
        #[arg(long, value_name = "A..B")]
        r_range: String,
        /// Step between consecutive r values.
        #[arg(long, default_value_t = 1)]
        r_step: u32,
        /// Digit sum fixed across the sweep (set = fixed).
        #[arg(long)]
        s: Option<u32>,
        /// Digit sum as a fraction of r: s = ⌊f·r⌋.
        #[arg(long)]
        s_frac: Option<f64>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 1)]
        ell: u64,
        #[command(flatten)]
        envelope: EnvelopeArgs,
    },
    /// Exponent thresholds for d = 3..10: ξ, 1−ξ, and the entropy root ρ₀.
    Table1,
    /// Measured magnitudes against one envelope formula over an r-range.
    VerifyBounds {
        /// Envelope formula id (see README for the thirteen ids).
        #[arg(long)]
        formula: String,
        #[arg(long, value_name = "COEFFS")]
        poly: String,
        #[arg(long, value_name = "A..B")]
        r_range: String,
        #[arg(long, default_value_t = 1)]
        r_step: u32,
        #[arg(long, default_value_t = 1)]
        ell: u64,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long)]
        s_frac: Option<f64>,
        /// Residue for the congruence families (default 0).
        #[arg(long)]
        k: Option<u32>,
        /// Modulus for the congruence families (default 2).
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, value_name = "auto")]
        alpha_q: Option<String>,
    },
    /// Exact discrepancy of {f(n): n in a digit class}, with the ETK majorant.
    Discrepancy {
        #[arg(long, value_name = "COEFFS")]
        poly: String,
        #[arg(long, value_enum)]
        set: SetKind,
        #[command(flatten)]
        class: SetArgs,
        /// Sweep r instead of a single value.
        #[arg(long, value_name = "A..B")]
        r_range: Option<String>,
        #[arg(long, default_value_t = 1)]
        r_step: u32,
        /// Digit sum as a fraction of r: s = ⌊f·r⌋.
        #[arg(long)]
        s_frac: Option<f64>,
        /// Truncation order of the majorant (sums at ℓ = 1..L).
        #[arg(long = "L")]
        l: u32,
        /// Majorant constant.
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        /// Also write a log-scale D-vs-r plot to this file.
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },
    /// Certified continued-fraction convergents of a real number.
    Convergents {
        /// The real α (rat:p/q, dec:0.…, root:k:p/q, golden, sqrt2-1).
        #[arg(long)]
        alpha: String,
        /// How many partial quotients to emit.
        #[arg(long, default_value_t = 40)]
        count: usize,
    },
    /// Vinogradov mean-value counts J against their envelope.
    Mvt {
        /// Highest power in the system.
        #[arg(long)]
        d: u32,
        /// Tuple length per side.
        #[arg(long)]
        s: u32,
        /// Comma-separated list of ranges N.
        #[arg(long = "N-list", value_name = "N1,N2,…")]
        n_list: String,
    },
    /// Run every cross-module invariant suite.
    Selftest {
        /// Larger randomized suites (slower, same invariants).
        #[arg(long)]
        deep: bool,
    },
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::Description(_) | Error::Consistency(_) => 2,
        Error::Resource(_) | Error::Precision(_) => 3,
    }
}

fn run(cli: Cli) -> digitweyl::Result<i32> {
    let file_cfg = match &cli.config {
        Some(path) => parse_config_file(path)?,
        None => PartialConfig::default(),
    };
    let flag_cfg = PartialConfig {
        bits: cli.bits,
        threads: cli.threads,
        timing: cli.timing.then_some(true),
        seed: cli.seed,
        epsilon: cli.epsilon,
        constant: cli.constant,
        format: cli.format,
    };
    let cfg = RunConfig::assemble(flag_cfg, file_cfg)?;
    cfg.install_thread_pool()?;

    match cli.command {
        Command::Sum { poly, set, class, ell, h, n, envelope } => commands::cmd_sum(
            &cfg,
            &SumRequest {
                poly,
                set,
                ell,
                params: ClassParams { r: class.r, s: class.s, k: class.k, m: class.m, h, n },
                formula: envelope.formula,
                q: envelope.q,
                alpha_q: envelope.alpha_q,
            },
        ),
        Command::Scan { poly, set, r_range, r_step, s, s_frac, k, m, ell, envelope } => {
            commands::cmd_scan(
                &cfg,
                &ScanRequest {
                    base: SumRequest {
                        poly,
                        set,
                        ell,
                        params: ClassParams { r: None, s, k, m, h: None, n: None },
                        formula: envelope.formula,
                        q: envelope.q,
                        alpha_q: envelope.alpha_q,
                    },
                    r_range,
                    r_step,
                    s_frac,
                },
            )
        }
        Command::Table1 => commands::cmd_table1(&cfg),
        Command::VerifyBounds {
            formula,
            poly,
            r_range,
            r_step,
            ell,
            s,
            s_frac,
            k,
            m,
            q,
            alpha_q,
        } => commands::cmd_verify_bounds(
            &cfg,
            &VerifyRequest { formula, poly, r_range, r_step, ell, s, s_frac, k, m, q, alpha_q },
        ),
        Command::Discrepancy { poly, set, class, r_range, r_step, s_frac, l, c, svg } => {
            commands::cmd_discrepancy(
                &cfg,
                &DiscrepancyRequest {
                    poly,
                    set,
                    r: class.r,
                    r_range,
                    r_step,
                    s: class.s,
                    s_frac,
                    k: class.k,
                    m: class.m,
                    l,
                    c,
                    svg,
                },
            )
        }
        Command::Convergents { alpha, count } => commands::cmd_convergents(&cfg, &alpha, count),
        Command::Mvt { d, s, n_list } => commands::cmd_mvt(&cfg, d, s, &n_list),
        Command::Selftest { deep } => commands::cmd_selftest(&cfg, deep),
    }
}

fn main() -> ExitCode {
    // Die quietly when a pipe consumer (head, less) closes stdout early.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("digitweyl: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}
