//! One measured exponential sum with its class parameters, the optional
//! theoretical envelope next to it, and the unified output row shared by
//! `sum` and `scan`.

use clap::ValueEnum;
use digitweyl::bounds::{bound_rhs, empirical_ratio, BoundEnvelope, BoundParams, FormulaId};
use digitweyl::dioph::choose_q;
use digitweyl::poly::RealPolynomial;
use digitweyl::weyl::{
    classical_sum, full_range_sum, sum_chi11_class, sum_congruence, sum_double_twist,
    sum_fixed_digit, sum_rudin_shapiro, sum_sigma_pair, sum_thue_morse, SumResult,
};
use digitweyl::{Error, Result};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::json;

/// Which index set or twist a row measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SetKind {
    /// All of `[0, 2^r)`.
    Full,
    /// Digit sum exactly `s` (needs `--s`).
    Fixed,
    /// Digit sum `≡ k (mod m)` (needs `--k`, `--m`).
    Cong,
    /// Parity of the `11`-block count `≡ k (mod 2)` (needs `--k`).
    Chi11,
    /// `σ(n) + σ(n+1)` even.
    Sigmapair,
    /// Full range twisted by the Thue–Morse sign.
    Tm,
    /// Full range twisted by the Rudin–Shapiro sign.
    Rs,
    /// Full range twisted by `t_n · t_{n+1}`.
    Pair,
    /// Classical sum over `1..=N` with multiplier `h` (needs `--h`, `--n`).
    Classical,
}

impl SetKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SetKind::Full => "full",
            SetKind::Fixed => "fixed",
            SetKind::Cong => "cong-class",
            SetKind::Chi11 => "chi11-class",
            SetKind::Sigmapair => "sigmapair-class",
            SetKind::Tm => "tm-twist",
            SetKind::Rs => "rs-twist",
            SetKind::Pair => "pair-twist",
            SetKind::Classical => "classical",
        }
    }

    /// True for the families indexed by a bit length `r`.
    pub fn takes_r(&self) -> bool {
        !matches!(self, SetKind::Classical)
    }
}

/// Class parameters accompanying a measurement request.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClassParams {
    pub r: Option<u32>,
    pub s: Option<u32>,
    pub k: Option<u32>,
    pub m: Option<u32>,
    pub h: Option<i64>,
    pub n: Option<u64>,
}

impl ClassParams {
    fn need<T: Copy>(v: Option<T>, flag: &str, kind: SetKind) -> Result<T> {
        v.ok_or_else(|| {
            Error::description(format!("set `{}` needs --{flag}", kind.tag()))
        })
    }

    fn refuse<T>(v: Option<T>, flag: &str, kind: SetKind) -> Result<()> {
        if v.is_some() {
            return Err(Error::description(format!(
                "set `{}` does not take --{flag}",
                kind.tag()
            )));
        }
        Ok(())
    }
}

/// One measured sum with the parameters that produced it.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub kind: SetKind,
    pub d: u32,
    pub ell: u64,
    pub params: ClassParams,
    pub sum: SumResult,
}

/// Run the family selected by `kind`. Every parameter the family does not
/// use must be absent — stray flags are rejected rather than ignored.
pub fn measure(
    f: &RealPolynomial,
    kind: SetKind,
    ell: u64,
    params: ClassParams,
) -> Result<Measurement> {
    let ClassParams { r, s, k, m, h, n } = params;
    if kind.takes_r() {
        ClassParams::refuse(h, "h", kind)?;
        ClassParams::refuse(n, "n", kind)?;
        if ell == 0 {
            return Err(Error::description("ℓ must be ≥ 1"));
        }
    }
    let sum = match kind {
        SetKind::Full | SetKind::Tm | SetKind::Rs | SetKind::Pair | SetKind::Sigmapair => {
            ClassParams::refuse(s, "s", kind)?;
            ClassParams::refuse(k, "k", kind)?;
            ClassParams::refuse(m, "m", kind)?;
            let r = ClassParams::need(r, "r", kind)?;
            match kind {
                SetKind::Full => full_range_sum(f, ell, r)?,
                SetKind::Tm => sum_thue_morse(f, ell, r)?,
                SetKind::Rs => sum_rudin_shapiro(f, ell, r)?,
                SetKind::Pair => sum_double_twist(f, ell, r)?,
                _ => sum_sigma_pair(f, ell, r)?,
            }
        }
        SetKind::Fixed => {
            ClassParams::refuse(k, "k", kind)?;
            ClassParams::refuse(m, "m", kind)?;
            sum_fixed_digit(f, ell, ClassParams::need(r, "r", kind)?, ClassParams::need(s, "s", kind)?)?
        }
        SetKind::Cong => {
            ClassParams::refuse(s, "s", kind)?;
            sum_congruence(
                f,
                ell,
                ClassParams::need(r, "r", kind)?,
                ClassParams::need(k, "k", kind)?,
                ClassParams::need(m, "m", kind)?,
            )?
        }
        SetKind::Chi11 => {
            ClassParams::refuse(s, "s", kind)?;
            ClassParams::refuse(m, "m", kind)?;
            sum_chi11_class(f, ell, ClassParams::need(r, "r", kind)?, ClassParams::need(k, "k", kind)?)?
        }
        SetKind::Classical => {
            ClassParams::refuse(r, "r", kind)?;
            ClassParams::refuse(s, "s", kind)?;
            ClassParams::refuse(k, "k", kind)?;
            ClassParams::refuse(m, "m", kind)?;
            if ell != 1 {
                return Err(Error::description("classical sums take --h, not --ell"));
            }
            classical_sum(f, ClassParams::need(h, "h", kind)?, ClassParams::need(n, "n", kind)?)?
        }
    };
    Ok(Measurement { kind, d: f.degree() as u32, ell, params, sum })
}

/// How the Dirichlet denominator for an envelope is obtained.
#[derive(Clone, Debug)]
pub enum QSource {
    /// No denominator available; formulas that need one are rejected.
    None,
    /// Fixed denominator from `--q`.
    Explicit(u64),
    /// Best convergent of the leading coefficient (`--alpha-q auto`).
    Auto,
}

/// An evaluated envelope, with the Dirichlet pair that entered it.
#[derive(Clone, Debug)]
pub struct EnvelopeCells {
    pub envelope: BoundEnvelope,
    pub q: Option<u64>,
    pub a: Option<BigInt>,
    pub ratio: f64,
    pub trivial_ratio: f64,
}

/// Resolve the Dirichlet denominator for `formula` at (r, ℓ): an explicit
/// `--q` wins; `auto` asks the continued fraction of the leading
/// coefficient for the best denominator at this scale.
pub fn resolve_q(
    f: &RealPolynomial,
    formula: FormulaId,
    source: &QSource,
    r: u32,
    ell: u64,
) -> Result<(Option<u64>, Option<BigInt>)> {
    if !formula.needs_q() {
        return Ok((None, None));
    }
    match source {
        QSource::Explicit(q) => Ok((Some(*q), None)),
        QSource::Auto => {
            let alpha = f.exact_coeffs().last().expect("polynomials are non-empty");
            let conv = choose_q(alpha, r, ell, f.degree() as u32)?;
            let q = conv.q.to_u64().ok_or_else(|| {
                Error::description("auto-chosen q exceeds 64 bits; pass --q explicitly")
            })?;
            Ok((Some(q), Some(conv.a)))
        }
        QSource::None => Err(Error::description(format!(
            "formula `{}` needs a denominator; pass --q or --alpha-q auto",
            formula.as_str()
        ))),
    }
}

/// Evaluate `formula` next to a measurement and compare.
pub fn attach_envelope(
    f: &RealPolynomial,
    meas: &Measurement,
    formula: FormulaId,
    q_source: &QSource,
    epsilon: f64,
    constant: f64,
) -> Result<EnvelopeCells> {
    let r = meas.params.r.ok_or_else(|| {
        Error::description("envelopes are defined over the r-indexed families")
    })?;
    let (q, a) = resolve_q(f, formula, q_source, r, meas.ell)?;
    let mut p = BoundParams::new(meas.d, r, meas.ell);
    p.s = meas.params.s;
    p.q = q;
    p.epsilon = epsilon;
    p.constant = constant;
    let envelope = bound_rhs(formula, &p)?;
    let report = empirical_ratio(&meas.sum, &envelope)?;
    Ok(EnvelopeCells { envelope, q, a, ratio: report.ratio, trivial_ratio: report.trivial_ratio })
}

/// Header of the unified row emitted by `sum` and `scan`.
pub const CSV_HEADER: &str =
    "formula_id,d,r,s,k,m,ell,q,a,sum_re,sum_im,magnitude,terms,envelope,ratio,elapsed_ms";

fn cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// Render one unified CSV row. The `formula_id` column carries the envelope
/// formula when one was evaluated and the family tag otherwise; for
/// classical rows the `ell` column carries the multiplier `h`.
pub fn csv_row(meas: &Measurement, env: Option<&EnvelopeCells>, timing: bool) -> String {
    let ell_cell = match meas.kind {
        SetKind::Classical => cell(&meas.params.h),
        _ => meas.ell.to_string(),
    };
    let cols: [String; 16] = [
        env.map(|e| e.envelope.formula.as_str().to_string())
            .unwrap_or_else(|| meas.kind.tag().to_string()),
        meas.d.to_string(),
        cell(&meas.params.r),
        cell(&meas.params.s),
        cell(&meas.params.k),
        cell(&meas.params.m),
        ell_cell,
        cell(&env.and_then(|e| e.q)),
        cell(&env.and_then(|e| e.a.clone())),
        meas.sum.re.to_string(),
        meas.sum.im.to_string(),
        meas.sum.magnitude.to_string(),
        meas.sum.terms.to_string(),
        cell(&env.map(|e| e.envelope.value)),
        cell(&env.map(|e| e.ratio)),
        if timing { meas.sum.elapsed_ms.to_string() } else { "0".to_string() },
    ];
    cols.join(",")
}

/// The same row as a JSON object (keys = column names, absent cells null).
pub fn json_row(meas: &Measurement, env: Option<&EnvelopeCells>, timing: bool) -> serde_json::Value {
    json!({
        "formula_id": env.map(|e| e.envelope.formula.as_str().to_string())
            .unwrap_or_else(|| meas.kind.tag().to_string()),
        "d": meas.d,
        "r": meas.params.r,
        "s": meas.params.s,
        "k": meas.params.k,
        "m": meas.params.m,
        "ell": match meas.kind {
            SetKind::Classical => json!(meas.params.h),
            _ => json!(meas.ell),
        },
        "q": env.and_then(|e| e.q),
        "a": env.and_then(|e| e.a.as_ref().map(|a| a.to_string())),
        "sum_re": meas.sum.re,
        "sum_im": meas.sum.im,
        "magnitude": meas.sum.magnitude,
        "terms": meas.sum.terms,
        "envelope": env.map(|e| e.envelope.value),
        "ratio": env.map(|e| e.ratio),
        "elapsed_ms": if timing { meas.sum.elapsed_ms } else { 0 },
    })
}
