//! The subcommand runners. Each prints its artifact to stdout (CSV with a
//! header row, or one JSON document) and returns the process exit code.

use crate::config::{OutputFormat, RunConfig};
use crate::measure::{
    attach_envelope, csv_row, json_row, measure, ClassParams, EnvelopeCells, Measurement, QSource,
    SetKind, CSV_HEADER,
};
use crate::parse::{parse_poly, parse_range, parse_u64_list};
use crate::svg::discrepancy_plot;
use digitweyl::bounds::{bound_rhs, BoundParams, FormulaId};
use digitweyl::digits::DigitClassSpec;
use digitweyl::dioph::continued_fraction;
use digitweyl::discrepancy::{class_points, equidistribution_report, extreme_discrepancy};
use digitweyl::exponents::threshold_table;
use digitweyl::fixedpoint::ExactReal;
use digitweyl::mvt::mvt_scaling_report;
use digitweyl::poly::RealPolynomial;
use digitweyl::selftest::{run_selftest, SelftestConfig};
use digitweyl::{Error, Result};
use num_traits::ToPrimitive;
use serde_json::json;
use std::fs;
use std::path::PathBuf;

/// Combine `--q` and `--alpha-q` into one denominator source.
pub fn q_source(q: Option<u64>, alpha_q: Option<&str>) -> Result<QSource> {
    match (q, alpha_q) {
        (Some(_), Some(_)) => Err(Error::description("--q and --alpha-q are mutually exclusive")),
        (Some(q), None) => Ok(QSource::Explicit(q)),
        (None, Some("auto")) => Ok(QSource::Auto),
        (None, Some(other)) => {
            Err(Error::description(format!("--alpha-q only understands `auto`, got `{other}`")))
        }
        (None, None) => Ok(QSource::None),
    }
}

/// Resolve the digit-sum parameter at bit length `r`: a fixed `--s`, or
/// `--s-frac f` giving `s = ⌊f·r⌋`.
pub fn resolve_s(s: Option<u32>, s_frac: Option<f64>, r: u32) -> Result<Option<u32>> {
    match (s, s_frac) {
        (Some(_), Some(_)) => Err(Error::description("--s and --s-frac are mutually exclusive")),
        (Some(s), None) => Ok(Some(s)),
        (None, Some(f)) => {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::description(format!("--s-frac {f} is outside [0, 1]")));
            }
            Ok(Some((f * f64::from(r)).floor() as u32))
        }
        (None, None) => Ok(None),
    }
}

/// Build the class spec measured by `discrepancy` and the rate formulas.
fn class_spec(
    kind: SetKind,
    r: u32,
    s: Option<u32>,
    k: Option<u32>,
    m: Option<u32>,
) -> Result<DigitClassSpec> {
    let need = |v: Option<u32>, flag: &str| {
        v.ok_or_else(|| Error::description(format!("set `{}` needs --{flag}", kind.tag())))
    };
    let refuse = |v: Option<u32>, flag: &str| -> Result<()> {
        if v.is_some() {
            return Err(Error::description(format!(
                "set `{}` does not take --{flag}",
                kind.tag()
            )));
        }
        Ok(())
    };
    match kind {
        SetKind::Full => {
            refuse(s, "s")?;
            refuse(k, "k")?;
            refuse(m, "m")?;
            Ok(DigitClassSpec::Full { r })
        }
        SetKind::Fixed => {
            refuse(k, "k")?;
            refuse(m, "m")?;
            Ok(DigitClassSpec::FixedSum { r, s: need(s, "s")? })
        }
        SetKind::Cong => {
            refuse(s, "s")?;
            Ok(DigitClassSpec::CongruenceSum { r, k: need(k, "k")?, m: need(m, "m")? })
        }
        SetKind::Chi11 => {
            refuse(s, "s")?;
            refuse(m, "m")?;
            Ok(DigitClassSpec::Chi11Parity { r, k: need(k, "k")? })
        }
        SetKind::Sigmapair => {
            refuse(s, "s")?;
            refuse(k, "k")?;
            refuse(m, "m")?;
            Ok(DigitClassSpec::SigmaPairParity { r })
        }
        other => Err(Error::description(format!(
            "set `{}` is not a point-set family; use full, fixed, cong, chi11, or sigmapair",
            other.tag()
        ))),
    }
}

fn print_rows(cfg: &RunConfig, csv: Vec<String>, json_doc: serde_json::Value) {
    match cfg.format {
        OutputFormat::Csv => {
            for line in csv {
                println!("{line}");
            }
        }
        OutputFormat::Json => {
            println!("{}", serde_json::to_string_pretty(&json_doc).expect("valid JSON"));
        }
    }
}

// ---------------------------------------------------------------- sum/scan

pub struct SumRequest {
    pub poly: String,
    pub set: SetKind,
    pub ell: u64,
    pub params: ClassParams,
    pub formula: Option<String>,
    pub q: Option<u64>,
    pub alpha_q: Option<String>,
}

fn measured_row(
    cfg: &RunConfig,
    f: &RealPolynomial,
    req: &SumRequest,
    params: ClassParams,
    formula: Option<FormulaId>,
    qsrc: &QSource,
) -> Result<(Measurement, Option<EnvelopeCells>)> {
    let meas = measure(f, req.set, req.ell, params)?;
    let env = formula
        .map(|id| attach_envelope(f, &meas, id, qsrc, cfg.epsilon, cfg.constant))
        .transpose()?;
    Ok((meas, env))
}

pub fn cmd_sum(cfg: &RunConfig, req: &SumRequest) -> Result<i32> {
    let f = parse_poly(&req.poly, cfg.bits)?;
    let formula = req.formula.as_deref().map(FormulaId::parse).transpose()?;
    let qsrc = q_source(req.q, req.alpha_q.as_deref())?;
    let (meas, env) = measured_row(cfg, &f, req, req.params, formula, &qsrc)?;
    print_rows(
        cfg,
        vec![CSV_HEADER.to_string(), csv_row(&meas, env.as_ref(), cfg.timing)],
        json!({ "rows": [json_row(&meas, env.as_ref(), cfg.timing)] }),
    );
    Ok(0)
}

pub struct ScanRequest {
    pub base: SumRequest,
    pub r_range: String,
    pub r_step: u32,
    pub s_frac: Option<f64>,
}

pub fn cmd_scan(cfg: &RunConfig, req: &ScanRequest) -> Result<i32> {
    if !req.base.set.takes_r() {
        return Err(Error::description("scan sweeps r; set `classical` has no r"));
    }
    if req.r_step == 0 {
        return Err(Error::description("--r-step must be ≥ 1"));
    }
    let f = parse_poly(&req.base.poly, cfg.bits)?;
    let formula = req.base.formula.as_deref().map(FormulaId::parse).transpose()?;
    let qsrc = q_source(req.base.q, req.base.alpha_q.as_deref())?;
    let (lo, hi) = parse_range(&req.r_range)?;
    let mut csv = vec![CSV_HEADER.to_string()];
    let mut rows = Vec::new();
    for r in (lo..=hi).step_by(req.r_step as usize) {
        let params = ClassParams {
            r: Some(r),
            s: resolve_s(req.base.params.s, req.s_frac, r)?,
            ..req.base.params
        };
        let (meas, env) = measured_row(cfg, &f, &req.base, params, formula, &qsrc)?;
        csv.push(csv_row(&meas, env.as_ref(), cfg.timing));
        rows.push(json_row(&meas, env.as_ref(), cfg.timing));
    }
    print_rows(cfg, csv, json!({ "rows": rows }));
    Ok(0)
}

// ---------------------------------------------------------------- table1

pub fn cmd_table1(cfg: &RunConfig) -> Result<i32> {
    let round6 = |x: f64| (x * 1e6).round() / 1e6;
    let mut csv = vec!["d,xi,one_minus_xi,rho0".to_string()];
    let mut rows = Vec::new();
    for row in threshold_table()? {
        let xi = row.xi.to_f64().expect("ξ fits f64");
        let omx = row.one_minus_xi.to_f64().expect("1−ξ fits f64");
        csv.push(format!("{},{:.6},{:.6},{:.6}", row.d, xi, omx, row.rho_printed));
        rows.push(json!({
            "d": row.d,
            "xi": round6(xi),
            "one_minus_xi": round6(omx),
            "rho0": row.rho_printed,
        }));
    }
    print_rows(cfg, csv, json!({ "rows": rows }));
    Ok(0)
}

// ---------------------------------------------------------------- verify-bounds

pub struct VerifyRequest {
    pub formula: String,
    pub poly: String,
    pub r_range: String,
    pub r_step: u32,
    pub ell: u64,
    pub s: Option<u32>,
    pub s_frac: Option<f64>,
    pub k: Option<u32>,
    pub m: Option<u32>,
    pub q: Option<u64>,
    pub alpha_q: Option<String>,
}

/// What a bound formula is measured against.
enum MeasuredFamily {
    SumOf(SetKind),
    DiscCong,
    DiscSparse,
}

fn family_for(formula: FormulaId) -> MeasuredFamily {
    match formula {
        FormulaId::Cong | FormulaId::CongDioph | FormulaId::CongLog | FormulaId::CongSimple => {
            MeasuredFamily::SumOf(SetKind::Cong)
        }
        FormulaId::Tm => MeasuredFamily::SumOf(SetKind::Tm),
        FormulaId::Rs => MeasuredFamily::SumOf(SetKind::Rs),
        FormulaId::DoubleTwist => MeasuredFamily::SumOf(SetKind::Pair),
        FormulaId::Sparse
        | FormulaId::SparseDioph
        | FormulaId::SparseSimple
        | FormulaId::SparseLog => MeasuredFamily::SumOf(SetKind::Fixed),
        FormulaId::EquiCong => MeasuredFamily::DiscCong,
        FormulaId::EquiSparse => MeasuredFamily::DiscSparse,
    }
}

pub fn cmd_verify_bounds(cfg: &RunConfig, req: &VerifyRequest) -> Result<i32> {
    if req.r_step == 0 {
        return Err(Error::description("--r-step must be ≥ 1"));
    }
    let formula = FormulaId::parse(&req.formula)?;
    let f = parse_poly(&req.poly, cfg.bits)?;
    let qsrc = q_source(req.q, req.alpha_q.as_deref())?;
    let (lo, hi) = parse_range(&req.r_range)?;
    let mut csv = vec!["r,q,measured,envelope,ratio,trivial_ratio".to_string()];
    let mut rows = Vec::new();
    let mut fitted: Option<f64> = None;
    for r in (lo..=hi).step_by(req.r_step as usize) {
        let s = resolve_s(req.s, req.s_frac, r)?;
        // Congruence-shaped formulas measure the k ≡ 0 (mod 2) class unless
        // told otherwise.
        let (k, m) = (req.k.unwrap_or(0), req.m.unwrap_or(2));
        let (q_cell, measured, envelope, ratio, trivial_ratio) = match family_for(formula) {
            MeasuredFamily::SumOf(kind) => {
                let params = ClassParams {
                    r: Some(r),
                    s: if formula.needs_s() { s } else { None },
                    k: matches!(kind, SetKind::Cong).then_some(k),
                    m: matches!(kind, SetKind::Cong).then_some(m),
                    h: None,
                    n: None,
                };
                let meas = measure(&f, kind, req.ell, params)?;
                let cells = attach_envelope(&f, &meas, formula, &qsrc, cfg.epsilon, cfg.constant)?;
                (cells.q, meas.sum.magnitude, cells.envelope.value, cells.ratio, cells.trivial_ratio)
            }
            MeasuredFamily::DiscCong | MeasuredFamily::DiscSparse => {
                let spec = match family_for(formula) {
                    MeasuredFamily::DiscSparse => DigitClassSpec::FixedSum {
                        r,
                        s: s.ok_or_else(|| {
                            Error::description("formula `equi-sparse` needs --s or --s-frac")
                        })?,
                    },
                    _ => DigitClassSpec::CongruenceSum { r, k, m },
                };
                let d_meas = extreme_discrepancy(&class_points(&f, spec)?);
                let mut p = BoundParams::new(f.degree() as u32, r, req.ell);
                p.s = s;
                p.epsilon = cfg.epsilon;
                p.constant = cfg.constant;
                let env = bound_rhs(formula, &p)?;
                // The rate formulas bound a normalized quantity; the trivial
                // comparison level is 1.
                (None, d_meas, env.value, d_meas / env.value, d_meas)
            }
        };
        fitted = Some(fitted.map_or(ratio, |best: f64| best.max(ratio)));
        csv.push(format!(
            "{r},{},{measured},{envelope},{ratio},{trivial_ratio}",
            q_cell.map(|q| q.to_string()).unwrap_or_default()
        ));
        rows.push(json!({
            "r": r,
            "q": q_cell,
            "measured": measured,
            "envelope": envelope,
            "ratio": ratio,
            "trivial_ratio": trivial_ratio,
        }));
    }
    let fitted = fitted.expect("range is non-empty");
    csv.push(format!("# fitted_constant={fitted}"));
    print_rows(
        cfg,
        csv,
        json!({ "formula": formula.as_str(), "rows": rows, "fitted_constant": fitted }),
    );
    Ok(0)
}

// ---------------------------------------------------------------- discrepancy

pub struct DiscrepancyRequest {
    pub poly: String,
    pub set: SetKind,
    pub r: Option<u32>,
    pub r_range: Option<String>,
    pub r_step: u32,
    pub s: Option<u32>,
    pub s_frac: Option<f64>,
    pub k: Option<u32>,
    pub m: Option<u32>,
    pub l: u32,
    pub c: f64,
    pub svg: Option<PathBuf>,
}

pub fn cmd_discrepancy(cfg: &RunConfig, req: &DiscrepancyRequest) -> Result<i32> {
    if req.r_step == 0 {
        return Err(Error::description("--r-step must be ≥ 1"));
    }
    let f = parse_poly(&req.poly, cfg.bits)?;
    let (rs, multi): (Vec<u32>, bool) = match (req.r, &req.r_range) {
        (Some(r), None) => (vec![r], false),
        (None, Some(rr)) => {
            let (lo, hi) = parse_range(rr)?;
            ((lo..=hi).step_by(req.r_step as usize).collect(), true)
        }
        (Some(_), Some(_)) => {
            return Err(Error::description("--r and --r-range are mutually exclusive"))
        }
        (None, None) => return Err(Error::description("pass --r or --r-range")),
    };
    let mut objects = Vec::new();
    let mut curve = Vec::new();
    for &r in &rs {
        let s = resolve_s(req.s, req.s_frac, r)?;
        let spec = class_spec(req.set, r, s, req.k, req.m)?;
        let rep = equidistribution_report(&f, spec, req.l, req.c, cfg.epsilon)?;
        curve.push((r, rep.measured));
        let mut obj = json!({
            "N": rep.n,
            "D": rep.measured,
            "etk": rep.etk,
            "envelope": rep.envelope.map(|e| e.value),
            "ratios": {
                "measured_over_etk": rep.ratio_measured_etk,
                "measured_over_envelope": rep.ratio_measured_envelope,
            },
        });
        if multi {
            obj["r"] = json!(r);
        }
        objects.push(obj);
    }
    if let Some(path) = &req.svg {
        let title = format!("extreme discrepancy, set {}", req.set.tag());
        let plot = discrepancy_plot(&curve, &title)?;
        fs::write(path, plot)
            .map_err(|e| Error::description(format!("cannot write {}: {e}", path.display())))?;
    }
    let doc = if multi { json!(objects) } else { objects.pop().expect("one row") };
    println!("{}", serde_json::to_string_pretty(&doc).expect("valid JSON"));
    Ok(0)
}

// ---------------------------------------------------------------- convergents

pub fn cmd_convergents(cfg: &RunConfig, alpha: &str, count: usize) -> Result<i32> {
    let alpha = ExactReal::parse(alpha)?;
    let cf = continued_fraction(&alpha, count)?;
    let mut csv = vec!["index,a,q,err".to_string()];
    let mut rows = Vec::new();
    for (i, c) in cf.convergents.iter().enumerate() {
        csv.push(format!("{i},{},{},{}", c.a, c.q, c.err));
        rows.push(json!({
            "index": i,
            "a": c.a.to_string(),
            "q": c.q.to_string(),
            "err": c.err,
        }));
    }
    print_rows(cfg, csv, json!({ "rows": rows }));
    Ok(0)
}

// ---------------------------------------------------------------- mvt

pub fn cmd_mvt(cfg: &RunConfig, d: u32, s: u32, n_list: &str) -> Result<i32> {
    let ns = parse_u64_list(n_list)?;
    let rep = mvt_scaling_report(d, s, &ns)?;
    let mut csv = vec!["d,s,n,j,envelope,ratio".to_string()];
    let mut rows = Vec::new();
    for row in &rep.rows {
        csv.push(format!("{d},{s},{},{},{},{}", row.n, row.j, row.envelope, row.ratio));
        rows.push(json!({
            "n": row.n,
            "j": row.j.to_string(),
            "envelope": row.envelope,
            "ratio": row.ratio,
        }));
    }
    csv.push(format!("# critical_exponent={}", rep.critical_exponent));
    csv.push(format!("# max_ratio={}", rep.max_ratio));
    csv.push(format!("# ratio_flat={}", rep.ratio_flat));
    print_rows(
        cfg,
        csv,
        json!({
            "d": d,
            "s": s,
            "critical_exponent": rep.critical_exponent,
            "rows": rows,
            "max_ratio": rep.max_ratio,
            "ratio_flat": rep.ratio_flat,
        }),
    );
    Ok(0)
}

// ---------------------------------------------------------------- selftest

pub fn cmd_selftest(cfg: &RunConfig, deep: bool) -> Result<i32> {
    let report = run_selftest(&SelftestConfig { seed: cfg.seed, deep })?;
    for suite in &report.suites {
        println!(
            "suite {:<20} {:>6} checks  {:>3} findings",
            suite.name,
            suite.checks,
            suite.findings.len()
        );
    }
    for finding in &report.findings {
        println!("finding [{}] {}", finding.suite, finding.detail);
    }
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    println!(
        "selftest: {verdict} ({} checks, {} findings)",
        report.checks,
        report.findings.len()
    );
    Ok(if report.passed() { 0 } else { 1 })
}
