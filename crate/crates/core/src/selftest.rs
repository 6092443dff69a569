//! The cross-module invariant suite: every structural identity the library
//! promises, re-checked at desk scale against naive reference
//! implementations. Violations come back as findings — they are reported,
//! never silently tolerated.

use crate::digits::{binomial_u64, digit_sum, rudin_shapiro, thue_morse, thue_morse_pair, DigitClassSpec};
use crate::dioph::continued_fraction;
use crate::discrepancy::{
    brute_force_discrepancy, class_points, etk_majorant, extreme_discrepancy, PointSet,
};
use crate::error::Result;
use crate::exponents::inequality_suite;
use crate::fixedpoint::ExactReal;
use crate::mvt::vinogradov_count;
use crate::poly::RealPolynomial;
use crate::weyl::{
    classical_sum, full_range_sum, sum_chi11_class, sum_congruence, sum_double_twist,
    sum_fixed_digit, sum_rudin_shapiro, sum_scaled_phases, sum_sigma_pair, sum_thue_morse,
};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One violated invariant.
#[derive(Clone, Debug)]
pub struct Finding {
    /// Which suite detected it.
    pub suite: &'static str,
    /// What was violated, with the observed numbers.
    pub detail: String,
}

/// Outcome of one named suite.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    /// Individual assertions evaluated.
    pub checks: u64,
    pub findings: Vec<Finding>,
}

/// Aggregate over all suites.
#[derive(Clone, Debug)]
pub struct SelftestReport {
    pub suites: Vec<SuiteOutcome>,
    pub checks: u64,
    pub findings: Vec<Finding>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Knobs for the suite sizes.
#[derive(Clone, Copy, Debug)]
pub struct SelftestConfig {
    /// Seed for every randomized sub-suite; fixed seed → identical run.
    pub seed: u64,
    /// Deep mode raises the sizes to the full documented scale (minutes);
    /// the default stays interactive (seconds).
    pub deep: bool,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { seed: 0x00D16175, deep: false }
    }
}

struct Recorder {
    name: &'static str,
    checks: u64,
    findings: Vec<Finding>,
}

impl Recorder {
    fn new(name: &'static str) -> Self {
        Recorder { name, checks: 0, findings: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.findings.push(Finding { suite: self.name, detail: detail() });
        }
    }

    fn into_outcome(self) -> SuiteOutcome {
        SuiteOutcome { name: self.name, checks: self.checks, findings: self.findings }
    }
}

/// Run every suite. Engine errors (as opposed to violated invariants)
/// propagate as errors; violations are collected into the report.
pub fn run_selftest(cfg: &SelftestConfig) -> Result<SelftestReport> {
    let mut suites = Vec::new();
    suites.push(suite_exponents()?);
    suites.push(suite_engine_vs_naive(cfg)?);
    suites.push(suite_partition_identities(cfg)?);
    suites.push(suite_difference_tables(cfg)?);
    suites.push(suite_discrepancy(cfg)?);
    suites.push(suite_etk(cfg)?);
    suites.push(suite_mvt(cfg)?);
    suites.push(suite_convergents()?);
    suites.push(suite_phase_scaling()?);

    let checks = suites.iter().map(|s| s.checks).sum();
    let findings: Vec<Finding> = suites.iter().flat_map(|s| s.findings.clone()).collect();
    Ok(SelftestReport { suites, checks, findings })
}

/// Exact-rational exponent identities over a d-range.
fn suite_exponents() -> Result<SuiteOutcome> {
    let mut rec = Recorder::new("exponents");
    let report = inequality_suite(3, 1000)?;
    rec.checks += report.checks;
    for v in &report.violations {
        rec.findings.push(Finding { suite: "exponents", detail: v.clone() });
    }
    Ok(rec.into_outcome())
}

fn random_poly(rng: &mut ChaCha8Rng, d: usize, bits: u32) -> RealPolynomial {
    let mut coeffs = Vec::with_capacity(d);
    for i in 0..d {
        let leading = i + 1 == d;
        let kind = rng.gen_range(0..3u8);
        let c = match kind {
            // Rational p/q with small height.
            0 => {
                let mut p = rng.gen_range(-20i64..=20);
                if leading && p == 0 {
                    p = 1;
                }
                let q = rng.gen_range(1i64..=64);
                ExactReal::rational(p, q).expect("q ≥ 1")
            }
            // k-th root of a small non-perfect-power rational.
            1 => {
                let k = rng.gen_range(2u32..=3);
                let rad = rng.gen_range(2i64..=30);
                ExactReal::root(k, BigRational::from_integer(rad.into()))
                    .expect("radicand positive")
            }
            // Possibly zero below the top; integer otherwise.
            _ => {
                if leading {
                    ExactReal::integer(rng.gen_range(1..=5))
                } else {
                    ExactReal::integer(rng.gen_range(0..=2))
                }
            }
        };
        coeffs.push(c);
    }
    RealPolynomial::new(coeffs, bits).expect("leading coefficient nonzero")
}

fn naive_weighted(f: &RealPolynomial, ell: u64, r: u32, weight: impl Fn(u64) -> f64) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    for n in 0..(1u64 << r) {
        let w = weight(n);
        if w != 0.0 {
            let (c, s) = f.frac_eval(ell, n).unit_circle();
            re += w * c;
            im += w * s;
        }
    }
    (re, im)
}

/// Every sum family vs a naive filter-and-sum loop.
fn suite_engine_vs_naive(cfg: &SelftestConfig) -> Result<SuiteOutcome> {
    let mut rec = Recorder::new("engine-vs-naive");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x01);
    let configs = if cfg.deep { 50 } else { 12 };
    let r_max = if cfg.deep { 14 } else { 12 };
    const TOL: f64 = 1e-9;

    for case in 0..configs {
        let d = *[3usize, 4, 5].get(case % 3).unwrap();
        let f = random_poly(&mut rng, d, 128);
        let r = rng.gen_range(6..=r_max);
        let ell = rng.gen_range(1u64..=5);
        let close = |got: (f64, f64), want: (f64, f64)| {
            (got.0 - want.0).abs() <= TOL && (got.1 - want.1).abs() <= TOL
        };

        let m = rng.gen_range(2u32..=5);
        let k = rng.gen_range(0..m);
        let got = sum_congruence(&f, ell, r, k, m)?;
        let want =
            naive_weighted(&f, ell, r, |n| if digit_sum(n) % m == k { 1.0 } else { 0.0 });
        rec.check(close((got.re, got.im), want), || {
            format!("congruence sum r={r} k={k} m={m}: ({}, {}) vs naive ({}, {})", got.re, got.im, want.0, want.1)
        });

        let s = rng.gen_range(1..=r);
        let got = sum_fixed_digit(&f, ell, r, s)?;
        let want = naive_weighted(&f, ell, r, |n| if digit_sum(n) == s { 1.0 } else { 0.0 });
        rec.check(close((got.re, got.im), want), || {
            format!("fixed-digit sum r={r} s={s}: ({}, {}) vs naive ({}, {})", got.re, got.im, want.0, want.1)
        });

        let kp = rng.gen_range(0..2u32);
        let got = sum_chi11_class(&f, ell, r, kp)?;
        let want = naive_weighted(&f, ell, r, |n| {
            if crate::digits::chi11(n) % 2 == kp { 1.0 } else { 0.0 }
        });
        rec.check(close((got.re, got.im), want), || {
            format!("χ11-class sum r={r} k={kp}: ({}, {}) vs naive ({}, {})", got.re, got.im, want.0, want.1)
        });

        let got = sum_sigma_pair(&f, ell, r)?;
        let want = naive_weighted(&f, ell, r, |n| {
            if (digit_sum(n) + digit_sum(n + 1)) % 2 == 0 { 1.0 } else { 0.0 }
        });
        rec.check(close((got.re, got.im), want), || {
            format!("σ-pair sum r={r}: ({}, {}) vs naive ({}, {})", got.re, got.im, want.0, want.1)
        });

        let got = sum_thue_morse(&f, ell, r)?;
        let want = naive_weighted(&f, ell, r, |n| thue_morse(n) as f64);
        rec.check(close((got.re, got.im), want), || {
            format!("±σ twist r={r}: ({}, {}) vs naive ({}, {})", got.re, got.im, want.0, want.1)
        });

        let got = sum_rudin_shapiro(&f, ell, r)?;
        let want = naive_weighted(&f, ell, r, |n| rudin_shapiro(n) as f64);
        rec.check(close((got.re, got.im), want), || {
            format!("±χ11 twist r={r}: ({}, {}) vs naive ({}, {})", got.re, got.im, want.0, want.1)
        });

        let got = sum_double_twist(&f, ell, r)?;
        let want = naive_weighted(&f, ell, r, |n| thue_morse_pair(n) as f64);
        rec.check(close((got.re, got.im), want), || {
            format!("double twist r={r}: ({}, {}) vs naive ({}, {})", got.re, got.im, want.0, want.1)
        });

        let h = *[-3i64, -1, 1, 2, 5].get(case % 5).unwrap();
        let n_terms = 1u64 << r;
        let got = classical_sum(&f, h, n_terms)?;
        let (mut re, mut im) = (0.0, 0.0);
        for n in 1..=n_terms {
            let raw = f.frac_eval(h.unsigned_abs(), n).unit_circle();
            let (c, s) = if h < 0 { (raw.0, -raw.1) } else { raw };
            re += c;
            im += s;
        }
        rec.check(close((got.re, got.im), (re, im)), || {
            format!("classical sum h={h} N={n_terms}: ({}, {}) vs naive ({re}, {im})", got.re, got.im)
        });
    }
    Ok(rec.into_outcome())
}

/// Exact partition and twist identities at moderate r.
fn suite_partition_identities(cfg: &SelftestConfig) -> Result<SuiteOutcome> {
    let mut rec = Recorder::new("partition-identities");
    let r = if cfg.deep { 24 } else { 16 };
    let tol = 2f64.powi(-40) * 2f64.powi(r as i32);
    let f = RealPolynomial::monomial(ExactReal::parse("root:3:2").expect("valid"), 3, 128)?;
    let ell = 1;

    let full = full_range_sum(&f, ell, r)?;

    for m in [2u32, 3, 5] {
        let (mut re, mut im) = (0.0, 0.0);
        for k in 0..m {
            let part = sum_congruence(&f, ell, r, k, m)?;
            re += part.re;
            im += part.im;
        }
        rec.check((re - full.re).abs() <= tol && (im - full.im).abs() <= tol, || {
            format!("Σ_k congruence parts (m={m}) = ({re}, {im}) vs full ({}, {})", full.re, full.im)
        });
    }

    let (mut re, mut im) = (0.0, 0.0);
    for s in 0..=r {
        let part = sum_fixed_digit(&f, ell, r, s)?;
        re += part.re;
        im += part.im;
    }
    rec.check((re - full.re).abs() <= tol && (im - full.im).abs() <= tol, || {
        format!("Σ_s fixed-digit parts = ({re}, {im}) vs full ({}, {})", full.re, full.im)
    });

    let tm = sum_thue_morse(&f, ell, r)?;
    let u0 = sum_congruence(&f, ell, r, 0, 2)?;
    let u1 = sum_congruence(&f, ell, r, 1, 2)?;
    rec.check(
        (tm.re - (u0.re - u1.re)).abs() <= tol && (tm.im - (u0.im - u1.im)).abs() <= tol,
        || format!("±σ twist ≠ U₀ − U₁ at r={r}"),
    );

    let rs = sum_rudin_shapiro(&f, ell, r)?;
    let r0 = sum_chi11_class(&f, ell, r, 0)?;
    rec.check(
        (rs.re - (2.0 * r0.re - full.re)).abs() <= tol
            && (rs.im - (2.0 * r0.im - full.im)).abs() <= tol,
        || format!("±χ11 twist ≠ 2R₀ − full at r={r}"),
    );

    let w = sum_double_twist(&f, ell, r)?;
    let v = sum_sigma_pair(&f, ell, r)?;
    rec.check(
        (w.re - (2.0 * v.re - full.re)).abs() <= tol
            && (w.im - (2.0 * v.im - full.im)).abs() <= tol,
        || format!("double twist ≠ 2V − full at r={r}"),
    );
    Ok(rec.into_outcome())
}

/// Bitwise agreement of the streaming evaluator with direct Horner.
fn suite_difference_tables(cfg: &SelftestConfig) -> Result<SuiteOutcome> {
    let mut rec = Recorder::new("difference-tables");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x02);
    let polys = 20;
    let span: u64 = if cfg.deep { 1_000_000 } else { 20_000 };
    for _ in 0..polys {
        let d = rng.gen_range(1..=8);
        let bits = *[128u32, 192, 256].get(rng.gen_range(0..3)).unwrap();
        let f = random_poly(&mut rng, d, bits);
        let ell = rng.gen_range(1u64..=7);
        let n0 = rng.gen_range(0u64..=1 << 40);
        let mut mismatch = None;
        for (i, v) in f.difference_stream(ell, n0, span).enumerate() {
            if v != f.frac_eval(ell, n0 + i as u64) {
                mismatch = Some(n0 + i as u64);
                break;
            }
        }
        rec.check(mismatch.is_none(), || {
            format!("stream diverged from Horner at n = {} (d={d}, B={bits})", mismatch.unwrap())
        });
    }
    Ok(rec.into_outcome())
}

/// Sorting-formula discrepancy vs the O(N²) endpoint oracle.
fn suite_discrepancy(cfg: &SelftestConfig) -> Result<SuiteOutcome> {
    let mut rec = Recorder::new("discrepancy");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x03);
    let sets = if cfg.deep { 200 } else { 60 };
    let n_max = if cfg.deep { 500 } else { 250 };
    for _ in 0..sets {
        let n = rng.gen_range(1..=n_max);
        let ps = PointSet::new((0..n).map(|_| rng.gen_range(0.0..1.0)).collect())?;
        let fast = extreme_discrepancy(&ps);
        let brute = brute_force_discrepancy(&ps);
        rec.check((fast - brute).abs() < 1e-12, || {
            format!("N={n}: sorted formula {fast} vs brute force {brute}")
        });
    }
    for n in [1usize, 2, 7, 64, 333] {
        let ps = PointSet::new((0..n).map(|k| k as f64 / n as f64).collect())?;
        let d = extreme_discrepancy(&ps);
        rec.check((d - 1.0 / n as f64).abs() < 1e-15, || {
            format!("equispaced N={n}: D = {d}, expected 1/N")
        });
    }
    Ok(rec.into_outcome())
}

/// Measured discrepancy never exceeds the ETK majorant at c = 3.
fn suite_etk(cfg: &SelftestConfig) -> Result<SuiteOutcome> {
    let mut rec = Recorder::new("etk-coverage");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x04);
    const C: f64 = 3.0;

    let direct_sums = |ps: &PointSet, l: usize| -> Vec<f64> {
        (1..=l)
            .map(|ell| {
                let (mut re, mut im) = (0.0, 0.0);
                for &x in ps.sorted_values() {
                    let t = 2.0 * std::f64::consts::PI * ell as f64 * x;
                    re += t.cos();
                    im += t.sin();
                }
                (re * re + im * im).sqrt()
            })
            .collect()
    };

    for n in [16usize, 100, 256] {
        let ps = PointSet::new((0..n).map(|k| k as f64 / n as f64).collect())?;
        let sums = direct_sums(&ps, n / 2);
        let maj = etk_majorant(&sums, n as u64, C)?;
        let d = extreme_discrepancy(&ps);
        rec.check(d <= maj, || format!("equispaced N={n}: D={d} > majorant {maj}"));
    }

    let random_sets = if cfg.deep { 100 } else { 40 };
    for _ in 0..random_sets {
        let n = rng.gen_range(2usize..=400);
        let ps = PointSet::new((0..n).map(|_| rng.gen_range(0.0..1.0)).collect())?;
        let l = rng.gen_range(4usize..=64);
        let sums = direct_sums(&ps, l);
        let maj = etk_majorant(&sums, n as u64, C)?;
        let d = extreme_discrepancy(&ps);
        rec.check(d <= maj, || format!("random N={n} L={l}: D={d} > majorant {maj}"));
    }

    let (r, s_list, l) = if cfg.deep { (20, vec![8u32, 10], 64) } else { (18, vec![8u32], 32) };
    let f = RealPolynomial::monomial(ExactReal::parse("root:3:2").expect("valid"), 3, 128)?;
    for s in s_list {
        let spec = DigitClassSpec::FixedSum { r, s };
        let phases = crate::weyl::class_phases(&f, spec)?;
        let ps = class_points(&f, spec)?;
        let sums: Vec<f64> =
            (1..=l).map(|ell| sum_scaled_phases(&phases, ell, f.bits()).magnitude).collect();
        let maj = etk_majorant(&sums, ps.len() as u64, C)?;
        let d = extreme_discrepancy(&ps);
        rec.check(d <= maj, || {
            format!("polynomial image r={r} s={s} L={l}: D={d} > majorant {maj}")
        });
    }
    Ok(rec.into_outcome())
}

/// Mean-value oracle identities.
fn suite_mvt(cfg: &SelftestConfig) -> Result<SuiteOutcome> {
    let mut rec = Recorder::new("mean-value-oracle");
    let n_single = if cfg.deep { 100 } else { 40 };
    for d in 1..=4 {
        for n in (10..=n_single).step_by(10) {
            let j = vinogradov_count(d, 1, n)?;
            rec.check(j == n.into(), || format!("J_{{{d},1}}({n}) = {j}, expected {n}"));
        }
    }
    let n_pairs = if cfg.deep { 50 } else { 24 };
    for n in 1..=n_pairs {
        let j = vinogradov_count(2, 2, n)?;
        rec.check(j == (2 * n * n - n).into(), || {
            format!("J_{{2,2}}({n}) = {j}, expected 2N²−N")
        });
    }
    let n_ratio = if cfg.deep { 24 } else { 12 };
    for s in 2..=4u32 {
        for n in (4..=n_ratio).step_by(4) {
            let j = vinogradov_count(2, s, n)?.to_f64().expect("fits");
            let nf = n as f64;
            let env = nf.powi(s as i32) + nf.powf(2.0 * s as f64 - 3.0);
            rec.check(j / env <= 4.0, || {
                format!("J_{{2,{s}}}({n}) / envelope = {} > 4", j / env)
            });
        }
    }
    Ok(rec.into_outcome())
}

/// Certified convergents for the three reference irrationals.
fn suite_convergents() -> Result<SuiteOutcome> {
    let mut rec = Recorder::new("convergents");
    for desc in ["golden", "sqrt2-1", "root:3:2"] {
        let alpha = ExactReal::parse(desc).expect("valid description");
        let cf = continued_fraction(&alpha, 40)?;
        let convs = &cf.convergents;
        rec.check(convs.len() == 40, || {
            format!("{desc}: requested 40 certified convergents, got {}", convs.len())
        });
        // Certification is internal (a failed Dirichlet check errors out);
        // re-verify the error magnitudes numerically as well.
        for c in convs {
            let q = c.q.to_f64().expect("fits");
            rec.check(c.err < 1.0 / (q * q), || {
                format!("{desc}: |α − a/q| = {} at q = {q} breaches 1/q²", c.err)
            });
        }
    }
    // Golden-ratio denominators are Fibonacci numbers.
    let alpha = ExactReal::parse("golden").expect("valid");
    let cf = continued_fraction(&alpha, 30)?;
    let (mut a, mut b) = (1u64, 0u64);
    for c in &cf.convergents {
        rec.check(c.q == a.into(), || format!("golden denominator {} ≠ Fibonacci {a}", c.q));
        let next = a + b;
        b = a;
        a = next;
    }
    Ok(rec.into_outcome())
}

/// Scaled phase tables reproduce direct sums bit for bit.
fn suite_phase_scaling() -> Result<SuiteOutcome> {
    let mut rec = Recorder::new("phase-scaling");
    let f = RealPolynomial::monomial(ExactReal::parse("sqrt2-1").expect("valid"), 4, 128)?;
    let spec = DigitClassSpec::FixedSum { r: 16, s: 6 };
    let phases = crate::weyl::class_phases(&f, spec)?;
    rec.check(phases.len() as u64 == binomial_u64(16, 6), || {
        format!("phase table size {} ≠ C(16,6)", phases.len())
    });
    for ell in 1..=6u64 {
        let scaled = sum_scaled_phases(&phases, ell, f.bits());
        let direct = sum_fixed_digit(&f, ell, 16, 6)?;
        rec.check(
            scaled.re.to_bits() == direct.re.to_bits()
                && scaled.im.to_bits() == direct.im.to_bits(),
            || format!("ℓ={ell}: scaled phases ({}, {}) ≠ direct ({}, {})", scaled.re, scaled.im, direct.re, direct.im),
        );
    }
    Ok(rec.into_outcome())
}
