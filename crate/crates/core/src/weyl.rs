//! Exponential-sum engine over quantized polynomial phases.
//!
//! Eight sum families share two evaluation paths. Classes that cover a
//! consecutive range (full range, digit-sum congruence, `11`-block parity,
//! σ-pair parity, the classical range `1..=N`, and the three twisted sums)
//! stream phases through the finite-difference table and apply a per-index
//! weight. Fixed-digit-sum classes are sparse in `[0, 2^r)`, so members are
//! produced by constant-time popcount stepping and evaluated individually by
//! Horner.
//!
//! Determinism contract: the index range is cut into fixed-size blocks whose
//! count depends only on the range length, each block accumulates with
//! compensated (Kahan) summation, and block results are combined in ascending
//! block order. Thread scheduling therefore never changes the output bits.
//!
//! Range conventions: the classical sum runs over `n = 1..=N`; every
//! class-restricted sum runs over `n ∈ [0, 2^r)` as the class definitions
//! require. Both are documented on the operations below.

use crate::digits::{rudin_shapiro, thue_morse, thue_morse_pair, DigitClassSpec};
use crate::error::{Error, Result};
use crate::fixedpoint::FracFixed;
use crate::poly::RealPolynomial;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::time::Instant;

/// Default cap on log2 of the streamed index-range length. Streams longer
/// than `2^DEFAULT_RANGE_CAP` are refused with a resource error; the capped
/// entry points accept a different limit.
pub const DEFAULT_RANGE_CAP: u32 = 34;

/// Block length for deterministic partitioning (2^16 indices per block).
const BLOCK_LOG2: u32 = 16;

/// One computed exponential sum.
#[derive(Clone, Copy, Debug)]
pub struct SumResult {
    /// Real part of the sum.
    pub re: f64,
    /// Imaginary part of the sum.
    pub im: f64,
    /// Number of summands (the cardinality of the index set).
    pub terms: u64,
    /// `|re + i·im|`.
    pub magnitude: f64,
    /// Fixed-point precision the phases were computed at.
    pub bits: u32,
    /// Number of partition blocks the range was cut into.
    pub partitions: usize,
    /// Wall-clock time of the computation, in milliseconds.
    pub elapsed_ms: u64,
}

impl SumResult {
    fn finish(re: f64, im: f64, terms: u64, bits: u32, partitions: usize, t0: Instant) -> Self {
        SumResult {
            re,
            im,
            terms,
            magnitude: re.hypot(im),
            bits,
            partitions,
            elapsed_ms: t0.elapsed().as_millis() as u64,
        }
    }

    /// The complex conjugate (same terms and metadata).
    pub fn conjugated(mut self) -> Self {
        self.im = -self.im;
        self
    }
}

/// Compensated accumulator.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Number of fixed-size blocks covering `len` indices.
#[inline]
fn partition_count(len: u64) -> u64 {
    (len + (1 << BLOCK_LOG2) - 1) >> BLOCK_LOG2
}

fn check_stream_len(len: u64, cap: u32) -> Result<()> {
    if cap >= 63 || len <= 1u64 << cap {
        Ok(())
    } else {
        Err(Error::resource(format!(
            "index range of {len} values exceeds the 2^{cap} streaming cap"
        )))
    }
}

/// Weighted sum of `e(f_ℓ(n))` over the consecutive range `[start, start+len)`.
///
/// `weight` maps an index to −1, 0, or +1; zero-weight indices are skipped
/// and not counted as terms.
fn consecutive_weighted_sum<W>(
    f: &RealPolynomial,
    ell: u64,
    start: u64,
    len: u64,
    weight: W,
) -> (f64, f64, u64, usize)
where
    W: Fn(u64) -> i32 + Sync,
{
    let blocks = partition_count(len);
    let parts: Vec<(f64, f64, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let offset = b << BLOCK_LOG2;
            let block_start = start + offset;
            let block_len = (len - offset).min(1 << BLOCK_LOG2) as usize;
            let mut re = Kahan::default();
            let mut im = Kahan::default();
            let mut count = 0u64;
            let stream = f.difference_stream(ell, block_start, block_len as u64);
            for (i, phase) in stream.enumerate() {
                let w = weight(block_start + i as u64);
                if w != 0 {
                    let (cos, sin) = phase.unit_circle();
                    let wf = w as f64;
                    re.add(wf * cos);
                    im.add(wf * sin);
                    count += 1;
                }
            }
            (re.sum, im.sum, count)
        })
        .collect();
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    let mut terms = 0u64;
    for (r, i, c) in parts {
        re.add(r);
        im.add(i);
        terms += c;
    }
    (re.sum, im.sum, terms, blocks as usize)
}

/// `T_f(h, N) = Σ_{n=1}^{N} e(h·f(n))`.
///
/// Negative `h` is evaluated as the complex conjugate of the `|h|` sum,
/// which is exact: negating the multiplier negates every fixed-point phase.
pub fn classical_sum(f: &RealPolynomial, h: i64, n_terms: u64) -> Result<SumResult> {
    classical_sum_capped(f, h, n_terms, DEFAULT_RANGE_CAP)
}

/// [`classical_sum`] with an explicit streaming cap.
pub fn classical_sum_capped(f: &RealPolynomial, h: i64, n_terms: u64, cap: u32) -> Result<SumResult> {
    let t0 = Instant::now();
    if h == 0 {
        return Err(Error::domain("classical sum requires a nonzero frequency h"));
    }
    if n_terms == 0 {
        return Err(Error::domain("classical sum requires N ≥ 1"));
    }
    check_stream_len(n_terms, cap)?;
    let ell = h.unsigned_abs();
    let (re, im, terms, partitions) = consecutive_weighted_sum(f, ell, 1, n_terms, |_| 1);
    let result = SumResult::finish(re, im, terms, f.bits(), partitions, t0);
    Ok(if h < 0 { result.conjugated() } else { result })
}

/// Sum of `e(ℓ·f(n))` over all `n ∈ [0, 2^r)`.
pub fn full_range_sum(f: &RealPolynomial, ell: u64, r: u32) -> Result<SumResult> {
    full_range_sum_capped(f, ell, r, DEFAULT_RANGE_CAP)
}

/// [`full_range_sum`] with an explicit streaming cap.
pub fn full_range_sum_capped(f: &RealPolynomial, ell: u64, r: u32, cap: u32) -> Result<SumResult> {
    class_sum_capped(f, ell, DigitClassSpec::Full { r }, cap)
}

/// `U_f(r, ℓ, k, m)`: the sum over `n < 2^r` with `σ(n) ≡ k (mod m)`.
pub fn sum_congruence(f: &RealPolynomial, ell: u64, r: u32, k: u32, m: u32) -> Result<SumResult> {
    class_sum_capped(f, ell, DigitClassSpec::CongruenceSum { r, k, m }, DEFAULT_RANGE_CAP)
}

/// `S_f(r, ℓ, s)`: the sum over `n < 2^r` with `σ(n) = s`.
pub fn sum_fixed_digit(f: &RealPolynomial, ell: u64, r: u32, s: u32) -> Result<SumResult> {
    class_sum_capped(f, ell, DigitClassSpec::FixedSum { r, s }, DEFAULT_RANGE_CAP)
}

/// `R_f(r, ℓ)` over the class `χ11(n) ≡ k (mod 2)`.
pub fn sum_chi11_class(f: &RealPolynomial, ell: u64, r: u32, k: u32) -> Result<SumResult> {
    class_sum_capped(f, ell, DigitClassSpec::Chi11Parity { r, k }, DEFAULT_RANGE_CAP)
}

/// `V_f(r, ℓ)` over the class with `σ(n) + σ(n+1)` even.
pub fn sum_sigma_pair(f: &RealPolynomial, ell: u64, r: u32) -> Result<SumResult> {
    class_sum_capped(f, ell, DigitClassSpec::SigmaPairParity { r }, DEFAULT_RANGE_CAP)
}

/// Unweighted sum over any digit class, with an explicit streaming cap.
pub fn class_sum_capped(
    f: &RealPolynomial,
    ell: u64,
    spec: DigitClassSpec,
    cap: u32,
) -> Result<SumResult> {
    let t0 = Instant::now();
    require_multiplier(ell)?;
    spec.validate()?;
    if let DigitClassSpec::FixedSum { r, s } = spec {
        return fixed_digit_sum_impl(f, ell, r, s, cap, t0);
    }
    let r = spec.r();
    let len = 1u64 << r;
    check_stream_len(len, cap)?;
    let (re, im, terms, partitions) =
        consecutive_weighted_sum(f, ell, 0, len, |n| spec.contains(n) as i32);
    Ok(SumResult::finish(re, im, terms, f.bits(), partitions, t0))
}

/// `TM_f(r, ℓ) = Σ_{n<2^r} t_n e(ℓ·f(n))` with the parity weight `t_n = (−1)^{σ(n)}`.
pub fn sum_thue_morse(f: &RealPolynomial, ell: u64, r: u32) -> Result<SumResult> {
    twisted_sum(f, ell, r, thue_morse)
}

/// `RS_f(r, ℓ) = Σ_{n<2^r} ρ_n e(ℓ·f(n))` with `ρ_n = (−1)^{χ11(n)}`.
pub fn sum_rudin_shapiro(f: &RealPolynomial, ell: u64, r: u32) -> Result<SumResult> {
    twisted_sum(f, ell, r, rudin_shapiro)
}

/// `W_f(r, ℓ) = Σ_{n<2^r} t_n t_{n+1} e(ℓ·f(n))`.
pub fn sum_double_twist(f: &RealPolynomial, ell: u64, r: u32) -> Result<SumResult> {
    twisted_sum(f, ell, r, thue_morse_pair)
}

fn twisted_sum(f: &RealPolynomial, ell: u64, r: u32, weight: fn(u64) -> i32) -> Result<SumResult> {
    let t0 = Instant::now();
    require_multiplier(ell)?;
    DigitClassSpec::Full { r }.validate()?;
    let len = 1u64 << r;
    check_stream_len(len, DEFAULT_RANGE_CAP)?;
    let (re, im, terms, partitions) = consecutive_weighted_sum(f, ell, 0, len, weight);
    debug_assert_eq!(terms, len);
    Ok(SumResult::finish(re, im, terms, f.bits(), partitions, t0))
}

fn require_multiplier(ell: u64) -> Result<()> {
    if ell == 0 {
        Err(Error::domain("phase multiplier ℓ must be ≥ 1"))
    } else {
        Ok(())
    }
}

/// Sparse-path sum for a fixed-digit-sum class: members are generated in
/// blocks whose starting member comes from rank-based unranking, stepped by
/// the same-popcount successor, and evaluated individually.
fn fixed_digit_sum_impl(
    f: &RealPolynomial,
    ell: u64,
    r: u32,
    s: u32,
    cap: u32,
    t0: Instant,
) -> Result<SumResult> {
    let spec = DigitClassSpec::FixedSum { r, s };
    let card = spec.cardinality()?;
    if cap < 63 && card > (BigUint::from(1u64) << cap) {
        return Err(Error::resource(format!(
            "fixed-digit-sum class has {card} members, above the 2^{cap} cap"
        )));
    }
    let members = card.to_u64().expect("class size fits u64 for r ≤ 63");
    if members == 0 {
        // Unreachable for valid specs (0 ≤ s ≤ r always has members), but
        // keep the sum well-defined.
        return Ok(SumResult::finish(0.0, 0.0, 0, f.bits(), 0, t0));
    }
    let blocks = partition_count(members);
    let parts: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let rank0 = b << BLOCK_LOG2;
            let block_len = (members - rank0).min(1 << BLOCK_LOG2);
            let mut n = spec
                .unrank_fixed_sum(&BigUint::from(rank0))
                .expect("rank below cardinality");
            let mut re = Kahan::default();
            let mut im = Kahan::default();
            for i in 0..block_len {
                let (cos, sin) = f.frac_eval(ell, n).unit_circle();
                re.add(cos);
                im.add(sin);
                if i + 1 < block_len {
                    n = crate::digits::next_same_popcount(n);
                }
            }
            (re.sum, im.sum)
        })
        .collect();
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    for (r_part, i_part) in parts {
        re.add(r_part);
        im.add(i_part);
    }
    Ok(SumResult::finish(re.sum, im.sum, members, f.bits(), blocks as usize, t0))
}

/// Fixed-point phases `{f(n)} at ℓ = 1` for every member of a class, in
/// increasing member order.
///
/// Scaling these by ℓ (see [`sum_scaled_phases`]) reproduces the engine's
/// phases bit-for-bit, because multiplying the evaluated value by ℓ modulo
/// 2^B equals evaluating with every quantized coefficient pre-multiplied by
/// ℓ. This lets a caller sweep many ℓ against one cached phase vector.
pub fn class_phases(f: &RealPolynomial, spec: DigitClassSpec) -> Result<Vec<FracFixed>> {
    class_phases_capped(f, spec, DEFAULT_RANGE_CAP)
}

/// [`class_phases`] with an explicit cap on the class cardinality.
pub fn class_phases_capped(
    f: &RealPolynomial,
    spec: DigitClassSpec,
    cap: u32,
) -> Result<Vec<FracFixed>> {
    spec.validate()?;
    let card = spec.cardinality()?;
    if cap < 63 && card > (BigUint::from(1u64) << cap) {
        return Err(Error::resource(format!(
            "class has {card} members, above the 2^{cap} phase-cache cap"
        )));
    }
    match spec {
        DigitClassSpec::FixedSum { .. } => {
            Ok(spec.enumerate()?.map(|n| f.frac_eval(1, n)).collect())
        }
        _ => {
            // Consecutive underlying range: stream differences and filter.
            let len = 1u64 << spec.r();
            let mut phases = Vec::with_capacity(card.to_u64().unwrap_or(0) as usize);
            for (i, phase) in f.difference_stream(1, 0, len).enumerate() {
                if spec.contains(i as u64) {
                    phases.push(phase);
                }
            }
            Ok(phases)
        }
    }
}

/// `Σ e(ℓ·x)` over cached unit-multiplier phases, with the same deterministic
/// blocked accumulation as the main engine paths.
pub fn sum_scaled_phases(phases: &[FracFixed], ell: u64, bits: u32) -> SumResult {
    let t0 = Instant::now();
    let len = phases.len() as u64;
    let blocks = partition_count(len.max(1));
    let parts: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = (b << BLOCK_LOG2) as usize;
            let hi = (lo + (1usize << BLOCK_LOG2)).min(phases.len());
            let mut re = Kahan::default();
            let mut im = Kahan::default();
            for phase in &phases[lo..hi] {
                let (cos, sin) = phase.wrapping_mul_u64(ell).unit_circle();
                re.add(cos);
                im.add(sin);
            }
            (re.sum, im.sum)
        })
        .collect();
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    for (r, i) in parts {
        re.add(r);
        im.add(i);
    }
    SumResult::finish(re.sum, im.sum, len, bits, blocks as usize, t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::ExactReal;

    fn poly(coeffs: Vec<ExactReal>) -> RealPolynomial {
        RealPolynomial::new(coeffs, 128).unwrap()
    }

    fn half_z() -> RealPolynomial {
        poly(vec![ExactReal::rational(1, 2).unwrap()])
    }

    fn z_cubed_integer() -> RealPolynomial {
        poly(vec![ExactReal::integer(0), ExactReal::integer(0), ExactReal::integer(1)])
    }

    #[test]
    fn classical_alternating() {
        let f = half_z();
        let t2 = classical_sum(&f, 1, 2).unwrap();
        assert!(t2.magnitude < 1e-12, "e(1/2)+e(1) should cancel");
        let t3 = classical_sum(&f, 1, 3).unwrap();
        assert!((t3.re + 1.0).abs() < 1e-12 && t3.im.abs() < 1e-12);
    }

    #[test]
    fn classical_integer_phases() {
        let f = z_cubed_integer();
        for n in [1u64, 7, 100] {
            let t = classical_sum(&f, 5, n).unwrap();
            assert!((t.re - n as f64).abs() < 1e-9);
            assert!(t.im.abs() < 1e-9);
            assert_eq!(t.terms, n);
        }
    }

    #[test]
    fn negative_h_is_exact_conjugate() {
        let f = poly(vec![ExactReal::rational(1, 7).unwrap(), ExactReal::parse("root:3:2").unwrap()]);
        let plus = classical_sum(&f, 3, 500).unwrap();
        let minus = classical_sum(&f, -3, 500).unwrap();
        assert_eq!(plus.re.to_bits(), minus.re.to_bits());
        assert_eq!((-plus.im).to_bits(), minus.im.to_bits());
    }

    #[test]
    fn full_range_base_cases() {
        let f = half_z();
        let r0 = full_range_sum(&f, 1, 0).unwrap();
        assert!((r0.re - 1.0).abs() < 1e-12 && r0.im.abs() < 1e-12);
        let r2 = full_range_sum(&f, 1, 2).unwrap();
        assert!(r2.magnitude < 1e-12);
    }

    #[test]
    fn full_range_equals_shifted_classical() {
        let f = poly(vec![ExactReal::rational(2, 9).unwrap(), ExactReal::rational(5, 13).unwrap()]);
        let full = full_range_sum(&f, 4, 6).unwrap();
        let shifted = classical_sum(&f, 4, (1 << 6) - 1).unwrap();
        assert!((full.re - (shifted.re + 1.0)).abs() < 1e-10);
        assert!((full.im - shifted.im).abs() < 1e-10);
    }

    #[test]
    fn congruence_counts_members_when_phases_vanish() {
        let f = z_cubed_integer();
        for (k, m) in [(0u32, 2u32), (1, 2), (2, 3)] {
            let u = sum_congruence(&f, 9, 10, k, m).unwrap();
            let card = DigitClassSpec::CongruenceSum { r: 10, k, m }
                .cardinality()
                .unwrap();
            assert_eq!(BigUint::from(u.terms), card);
            assert!((u.re - u.terms as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn fixed_digit_zero_ones() {
        let f = poly(vec![ExactReal::rational(3, 11).unwrap(), ExactReal::rational(1, 5).unwrap()]);
        let s0 = sum_fixed_digit(&f, 2, 20, 0).unwrap();
        assert_eq!(s0.terms, 1);
        assert!((s0.re - 1.0).abs() < 1e-12, "f(0) = 0 so the only phase is 1");
    }

    #[test]
    fn thue_morse_balanced_for_integer_coefficients() {
        let f = z_cubed_integer();
        for r in 1..=10 {
            let tm = sum_thue_morse(&f, 1, r).unwrap();
            assert!(tm.magnitude < 1e-9, "r = {r}");
        }
    }

    #[test]
    fn twist_identities_small() {
        let f = poly(vec![ExactReal::rational(1, 3).unwrap(), ExactReal::parse("root:3:2").unwrap()]);
        let r = 10;
        let full = full_range_sum(&f, 1, r).unwrap();

        let tm = sum_thue_morse(&f, 1, r).unwrap();
        let u0 = sum_congruence(&f, 1, r, 0, 2).unwrap();
        let u1 = sum_congruence(&f, 1, r, 1, 2).unwrap();
        assert!((tm.re - (u0.re - u1.re)).abs() < 1e-9);
        assert!((tm.im - (u0.im - u1.im)).abs() < 1e-9);

        let rs = sum_rudin_shapiro(&f, 1, r).unwrap();
        let r0 = sum_chi11_class(&f, 1, r, 0).unwrap();
        assert!((rs.re - (2.0 * r0.re - full.re)).abs() < 1e-9);
        assert!((rs.im - (2.0 * r0.im - full.im)).abs() < 1e-9);

        let w = sum_double_twist(&f, 1, r).unwrap();
        let v = sum_sigma_pair(&f, 1, r).unwrap();
        assert!((w.re - (2.0 * v.re - full.re)).abs() < 1e-9);
        assert!((w.im - (2.0 * v.im - full.im)).abs() < 1e-9);
    }

    #[test]
    fn partition_over_digit_sums_small() {
        let f = poly(vec![ExactReal::rational(1, 3).unwrap(), ExactReal::rational(4, 7).unwrap()]);
        let r = 12;
        let full = full_range_sum(&f, 1, r).unwrap();
        let mut re = 0.0;
        let mut im = 0.0;
        for s in 0..=r {
            let part = sum_fixed_digit(&f, 1, r, s).unwrap();
            re += part.re;
            im += part.im;
        }
        assert!((re - full.re).abs() < 1e-9);
        assert!((im - full.im).abs() < 1e-9);
    }

    #[test]
    fn determinism_bitwise() {
        let f = poly(vec![ExactReal::parse("root:3:2").unwrap()]);
        let a = sum_congruence(&f, 3, 14, 1, 3).unwrap();
        let b = sum_congruence(&f, 3, 14, 1, 3).unwrap();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
        assert_eq!(a.partitions, b.partitions);
    }

    #[test]
    fn magnitude_bounded_by_terms() {
        let f = poly(vec![ExactReal::rational(1, 17).unwrap(), ExactReal::rational(1, 97).unwrap()]);
        for r in [4u32, 8, 12] {
            let res = full_range_sum(&f, 1, r).unwrap();
            assert!(res.magnitude <= res.terms as f64 + 1e-9);
        }
    }

    #[test]
    fn scaled_phases_match_direct_sums() {
        let f = poly(vec![
            ExactReal::rational(1, 5).unwrap(),
            ExactReal::rational(0, 1).unwrap(),
            ExactReal::parse("root:3:2").unwrap(),
        ]);
        let spec = DigitClassSpec::FixedSum { r: 12, s: 5 };
        let phases = class_phases(&f, spec).unwrap();
        for ell in [1u64, 2, 17, 64] {
            let cached = sum_scaled_phases(&phases, ell, f.bits());
            let direct = sum_fixed_digit(&f, ell, 12, 5).unwrap();
            assert_eq!(cached.re.to_bits(), direct.re.to_bits(), "ℓ = {ell}");
            assert_eq!(cached.im.to_bits(), direct.im.to_bits(), "ℓ = {ell}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = half_z();
        assert!(classical_sum(&f, 0, 10).is_err());
        assert!(classical_sum(&f, 1, 0).is_err());
        assert!(sum_congruence(&f, 0, 8, 0, 2).is_err());
        assert!(full_range_sum(&f, 1, 40).is_err());
        assert!(sum_congruence(&f, 1, 3, 5, 3).is_err());
    }
}
