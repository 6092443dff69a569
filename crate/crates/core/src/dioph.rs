//! Continued fractions with certified terms, rational-approximation searches,
//! and the denominator choice that optimizes the main restricted-sum bound.
//!
//! Irrational inputs are resolved through exact dyadic enclosures: partial
//! quotients are emitted only while the two enclosure endpoints produce the
//! same quotient, so no term is ever guessed from floating-point noise. The
//! enclosure is refined and the expansion restarted whenever more terms are
//! needed.

use crate::error::{Error, Result};
use crate::exponents::profile;
use crate::fixedpoint::ExactReal;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// A continued-fraction convergent `a/q` of some real α.
#[derive(Clone, Debug)]
pub struct Convergent {
    /// Numerator (coprime to `q`).
    pub a: BigInt,
    /// Positive denominator.
    pub q: BigUint,
    /// `|α − a/q|`, evaluated from a high-precision enclosure of α.
    pub err: f64,
}

/// A continued-fraction prefix: partial quotients and their convergents.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    /// `α = [a₀; a₁, a₂, …]`; `a₀` may be any integer, later terms are ≥ 1.
    pub quotients: Vec<BigInt>,
    /// Convergent `k` corresponds to the prefix `[a₀; …, a_k]`.
    pub convergents: Vec<Convergent>,
    /// True when the expansion ended because α is rational and the full
    /// (finite) expansion was produced.
    pub terminated: bool,
}

/// Partial quotients of a rational number (full finite expansion, capped at
/// `max_terms`). The canonical form is used: the last quotient is ≥ 2 unless
/// the expansion has a single term.
fn rational_quotients(x: &BigRational, max_terms: usize) -> (Vec<BigInt>, bool) {
    let mut quotients = Vec::new();
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    while quotients.len() < max_terms {
        let (q, rem) = num.div_mod_floor(&den);
        quotients.push(q);
        if rem.is_zero() {
            return (quotients, true);
        }
        num = den;
        den = rem;
    }
    (quotients, false)
}

/// Longest common prefix of the quotient sequences of the two enclosure
/// endpoints; every real strictly between them shares this prefix.
fn common_prefix(lo: &BigRational, hi: &BigRational, max_terms: usize) -> Vec<BigInt> {
    let (qa, _) = rational_quotients(lo, max_terms + 1);
    let (qb, _) = rational_quotients(hi, max_terms + 1);
    let mut shared: Vec<BigInt> = qa
        .iter()
        .zip(qb.iter())
        .take_while(|(x, y)| x == y)
        .map(|(x, _)| x.clone())
        .collect();
    // The endpoints are rationals and their own expansions terminate; a
    // terminal quotient equal by value may still be a truncation for the
    // interior point, so drop the last agreeing term unless it is
    // interior-certain (strictly shorter than both endpoint expansions).
    if shared.len() == qa.len() || shared.len() == qb.len() {
        shared.pop();
    }
    shared.truncate(max_terms);
    shared
}

/// First `count` partial quotients of α, with certified convergents.
///
/// Rational α may terminate earlier, in which case all quotients are
/// returned and `terminated` is set. Irrational α is refined through dyadic
/// enclosures until `count` terms are certain; if that takes more than
/// 2^20 bits of precision, a precision error is returned.
pub fn continued_fraction(alpha: &ExactReal, count: usize) -> Result<ContinuedFraction> {
    if count == 0 {
        return Err(Error::domain("continued fraction needs count ≥ 1"));
    }
    let (quotients, terminated) = match alpha.as_rational() {
        Some(x) => rational_quotients(x, count),
        None => {
            let mut prec: u32 = 128;
            loop {
                let floor = alpha.floor_scaled(prec);
                let scale = BigInt::one() << prec;
                let lo = BigRational::new(floor.clone(), scale.clone());
                let hi = BigRational::new(floor + 1, scale);
                let shared = common_prefix(&lo, &hi, count);
                if shared.len() >= count {
                    break (shared, false);
                }
                prec = prec.checked_mul(2).unwrap_or(u32::MAX);
                if prec > (1 << 20) {
                    return Err(Error::precision(format!(
                        "continued fraction needs more than 2^20 bits for {count} terms"
                    )));
                }
            }
        }
    };
    let convergents = certified_convergents(alpha, &quotients)?;
    Ok(ContinuedFraction { quotients, convergents, terminated })
}

/// Build convergents by the standard recurrence and certify each against the
/// Dirichlet inequality `|α − a/q| < 1/q²` using exact comparisons.
fn certified_convergents(alpha: &ExactReal, quotients: &[BigInt]) -> Result<Vec<Convergent>> {
    // Exact value for rationals; 512 fractional bits otherwise. Only the
    // reported `err` uses this — the certification below is exact.
    let approx = match alpha.as_rational() {
        Some(x) => x.clone(),
        None => BigRational::new(alpha.floor_scaled(512), BigInt::one() << 512),
    };
    let mut result = Vec::with_capacity(quotients.len());
    let mut p_prev = BigInt::one();
    let mut p_prev2 = BigInt::zero();
    let mut q_prev = BigInt::zero();
    let mut q_prev2 = BigInt::one();
    for a_k in quotients {
        let p = a_k * &p_prev + &p_prev2;
        let q = a_k * &q_prev + &q_prev2;
        p_prev2 = std::mem::replace(&mut p_prev, p.clone());
        q_prev2 = std::mem::replace(&mut q_prev, q.clone());

        debug_assert!(p.gcd(&q).is_one(), "convergents must be reduced");
        let q_sq = &q * &q;
        let lower = BigRational::new(&p * &q - 1, q_sq.clone());
        let upper = BigRational::new(&p * &q + 1, q_sq);
        let inside = alpha.cmp_rational(&lower) == Ordering::Greater
            && alpha.cmp_rational(&upper) == Ordering::Less;
        if !inside {
            return Err(Error::consistency(format!(
                "convergent {p}/{q} fails the 1/q² approximation check"
            )));
        }
        let err = (&approx - BigRational::new(p.clone(), q.clone()))
            .abs()
            .to_f64()
            .unwrap_or(f64::NAN);
        let (sign, q_mag) = q.into_parts();
        debug_assert_eq!(sign, num_bigint::Sign::Plus);
        result.push(Convergent { a: p, q: q_mag, err });
    }
    Ok(result)
}

/// The convergent denominator closest, in log scale, to the target
/// `ℓ^{η₁/(η₁+η₂)} · 2^{(ζ₃/(η₁+η₂)) r}`; ties go to the smaller q.
///
/// Errors if no convergent lies within a factor of 2^r of the target.
pub fn choose_q(alpha: &ExactReal, r: u32, ell: u64, d: u32) -> Result<Convergent> {
    if r == 0 {
        return Err(Error::domain("choose_q requires r ≥ 1"));
    }
    if ell == 0 {
        return Err(Error::domain("choose_q requires ℓ ≥ 1"));
    }
    let p = profile(d)?;
    let target_log2 = p.q_target_ell_exponent().to_f64().unwrap() * (ell as f64).log2()
        + p.q_target_r_exponent().to_f64().unwrap() * f64::from(r);

    // Generate convergents until the denominators pass the upper end of the
    // acceptance window (or the expansion terminates).
    let mut count = 16;
    let cf = loop {
        let cf = continued_fraction(alpha, count)?;
        let last_log2 = log2_biguint(&cf.convergents.last().unwrap().q);
        if cf.terminated || last_log2 > target_log2 + f64::from(r) {
            break cf;
        }
        count *= 2;
        if count > 1 << 16 {
            return Err(Error::precision("denominator search exhausted 2^16 terms"));
        }
    };

    let mut best: Option<(f64, &Convergent)> = None;
    for c in &cf.convergents {
        if c.q.is_zero() {
            continue;
        }
        let dist = (log2_biguint(&c.q) - target_log2).abs();
        // Strict improvement keeps the earlier (smaller) denominator on ties.
        if best.map_or(true, |(d0, _)| dist < d0) {
            best = Some((dist, c));
        }
    }
    let (dist, c) = best.ok_or_else(|| Error::domain("no convergents available"))?;
    if dist > f64::from(r) {
        return Err(Error::domain(format!(
            "no convergent denominator within factor 2^{r} of the 2^{target_log2:.3} target"
        )));
    }
    Ok(c.clone())
}

fn log2_biguint(q: &BigUint) -> f64 {
    // Exact for small q; for large q use the top 64 bits plus the exponent.
    let bits = q.bits();
    if bits <= 53 {
        return q.to_f64().unwrap().log2();
    }
    let shift = bits - 53;
    let top = (q >> shift).to_f64().unwrap();
    top.log2() + shift as f64
}

/// Result of the finite-sample irrationality-exponent probe.
#[derive(Clone, Debug)]
pub struct DiophantineProbe {
    /// `max ln(1/(q‖qα‖)) / ln q` over convergent denominators `2 ≤ q ≤ Q`.
    pub estimate: f64,
    /// The denominator attaining the maximum.
    pub argmax_q: u64,
    /// Set when some `q ≤ Q` gives `‖qα‖ = 0` (α is rational with
    /// denominator ≤ Q); `estimate` is meaningless in that case.
    pub infinite_type: bool,
    /// Always true: a finite sample only ever gives a lower proxy.
    pub empirical: bool,
}

/// Probe the approximation quality of α by its convergents up to `q_limit`.
pub fn diophantine_type_probe(alpha: &ExactReal, q_limit: u64) -> Result<DiophantineProbe> {
    if q_limit < 10 {
        return Err(Error::domain("probe requires Q ≥ 10"));
    }
    // Expand until denominators exceed Q (or the expansion ends).
    let mut count = 16;
    let cf = loop {
        let cf = continued_fraction(alpha, count)?;
        let last = &cf.convergents.last().unwrap().q;
        if cf.terminated || *last > BigUint::from(q_limit) {
            break cf;
        }
        count *= 2;
        if count > 1 << 16 {
            return Err(Error::precision("probe exhausted 2^16 expansion terms"));
        }
    };

    // ‖qα‖ from a high-precision enclosure (exact for rational α).
    let approx = match alpha.as_rational() {
        Some(x) => x.clone(),
        None => BigRational::new(alpha.floor_scaled(512), BigInt::one() << 512),
    };

    let mut best = f64::NEG_INFINITY;
    let mut argmax = 0u64;
    for c in &cf.convergents {
        let q_u64 = match c.q.to_u64() {
            Some(q) if q <= q_limit => q,
            _ => break,
        };
        if q_u64 < 2 {
            continue; // ln q = 0 at q = 1
        }
        let dist = (&approx * BigRational::from_integer(BigInt::from(q_u64))
            - BigRational::from_integer(c.a.clone()))
        .abs();
        if dist.is_zero() {
            return Ok(DiophantineProbe {
                estimate: f64::INFINITY,
                argmax_q: q_u64,
                infinite_type: true,
                empirical: true,
            });
        }
        let qnorm = dist.to_f64().unwrap();
        let value = -((q_u64 as f64) * qnorm).ln() / (q_u64 as f64).ln();
        if value > best {
            best = value;
            argmax = q_u64;
        }
    }
    if argmax == 0 {
        return Err(Error::domain("no convergent denominator in [2, Q]"));
    }
    Ok(DiophantineProbe { estimate: best, argmax_q: argmax, infinite_type: false, empirical: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> ExactReal {
        ExactReal::parse("golden").unwrap()
    }

    #[test]
    fn golden_ratio_quotients_all_one() {
        let cf = continued_fraction(&golden(), 20).unwrap();
        assert!(!cf.terminated);
        assert_eq!(cf.quotients[0], BigInt::zero());
        for a in &cf.quotients[1..] {
            assert!(a.is_one(), "golden ratio quotient {a} ≠ 1");
        }
        // Denominators are Fibonacci numbers 1, 1, 2, 3, 5, 8, …
        let mut fib = (1u64, 1u64);
        for c in &cf.convergents[1..] {
            assert_eq!(c.q, BigUint::from(fib.1));
            fib = (fib.1, fib.0 + fib.1);
        }
    }

    #[test]
    fn sqrt_two_minus_one_quotients_all_two() {
        let alpha = ExactReal::parse("sqrt2-1").unwrap();
        let cf = continued_fraction(&alpha, 15).unwrap();
        assert_eq!(cf.quotients[0], BigInt::zero());
        for a in &cf.quotients[1..] {
            assert_eq!(*a, BigInt::from(2), "√2−1 quotient {a} ≠ 2");
        }
    }

    #[test]
    fn cbrt_two_expansion() {
        let alpha = ExactReal::parse("root:3:2").unwrap();
        let cf = continued_fraction(&alpha, 12).unwrap();
        // Frozen from an independent high-precision expansion of 2^{1/3}.
        let expected = [1i64, 3, 1, 5, 1, 1, 4, 1, 1, 8, 1, 14];
        let got: Vec<i64> = cf.quotients.iter().map(|a| a.to_i64().unwrap()).collect();
        assert_eq!(got, expected);
        // The early convergents include 1/1, 5/4, and 63/50, in this order.
        let pairs: Vec<(i64, u64)> = cf
            .convergents
            .iter()
            .map(|c| (c.a.to_i64().unwrap(), c.q.to_u64().unwrap()))
            .collect();
        let wanted = [(1, 1), (5, 4), (63, 50)];
        let mut pos = 0;
        for pair in pairs {
            if pos < wanted.len() && pair == wanted[pos] {
                pos += 1;
            }
        }
        assert_eq!(pos, wanted.len(), "expected subsequence 1/1, 5/4, 63/50");
    }

    #[test]
    fn rational_terminates_exactly() {
        let alpha = ExactReal::rational(355, 113).unwrap();
        let cf = continued_fraction(&alpha, 30).unwrap();
        assert!(cf.terminated);
        let last = cf.convergents.last().unwrap();
        assert_eq!(last.a, BigInt::from(355));
        assert_eq!(last.q, BigUint::from(113u32));
        assert_eq!(last.err, 0.0);
    }

    #[test]
    fn convergent_denominators_strictly_increase_after_first() {
        let cf = continued_fraction(&golden(), 25).unwrap();
        for w in cf.convergents.windows(2).skip(1) {
            assert!(w[0].q < w[1].q);
        }
    }

    #[test]
    fn consecutive_convergents_straddle() {
        let alpha = ExactReal::parse("root:3:2").unwrap();
        let cf = continued_fraction(&alpha, 10).unwrap();
        for w in cf.convergents.windows(2) {
            let x = BigRational::new(w[0].a.clone(), BigInt::from(w[0].q.clone()));
            let y = BigRational::new(w[1].a.clone(), BigInt::from(w[1].q.clone()));
            let cx = alpha.cmp_rational(&x);
            let cy = alpha.cmp_rational(&y);
            assert_ne!(cx, cy, "consecutive convergents must straddle α");
        }
    }

    #[test]
    fn choose_q_golden_degree_three() {
        let c = choose_q(&golden(), 9, 1, 3).unwrap();
        // Target 2^{(10/9)·9} = 1024; nearest Fibonacci denominator is 987.
        assert_eq!(c.q, BigUint::from(987u32));
    }

    #[test]
    fn choose_q_pell_degree_four() {
        // d = 4: ζ₃/(η₁+η₂) = (1/3)/(1/10+1/9) = 30/19; target 2^{300/19}.
        // Frozen oracle: nearest Pell denominator is 80782.
        let alpha = ExactReal::parse("sqrt2-1").unwrap();
        let c = choose_q(&alpha, 10, 1, 4).unwrap();
        assert_eq!(c.q, BigUint::from(80782u32));
    }

    #[test]
    fn choose_q_monotone_in_r() {
        let alpha = golden();
        let mut prev = BigUint::zero();
        for r in 4..=16 {
            let c = choose_q(&alpha, r, 1, 3).unwrap();
            assert!(c.q >= prev, "q must not decrease with r");
            prev = c.q;
        }
    }

    #[test]
    fn probe_frozen_values() {
        // Independent high-precision oracle values at Q = 10⁶.
        let cases = [
            (ExactReal::parse("golden").unwrap(), 1.0827257408918518),
            (ExactReal::parse("sqrt2-1").unwrap(), 1.5431066063272239),
            (ExactReal::parse("root:3:2").unwrap(), 1.3276457414010392),
        ];
        for (alpha, want) in cases {
            let probe = diophantine_type_probe(&alpha, 1_000_000).unwrap();
            assert!(!probe.infinite_type);
            assert!(probe.empirical);
            assert!(
                (probe.estimate - want).abs() < 1e-9,
                "got {}, want {want}",
                probe.estimate
            );
        }
    }

    #[test]
    fn probe_flags_rational() {
        let probe = diophantine_type_probe(&ExactReal::rational(1, 3).unwrap(), 100).unwrap();
        assert!(probe.infinite_type);
        assert_eq!(probe.argmax_q, 3);
    }
}
