//! Exact real-number descriptions, and their reduction mod 1 to B-bit
//! fixed-point residues.
//!
//! [`ExactReal`] describes a real number exactly: a rational, a decimal
//! string, the real k-th root of a positive rational, or an affine image
//! `scale·(p/q)^{1/k} + offset` of such a root (which covers inputs like
//! `(√5−1)/2` and `√2−1`). [`FracFixed`] is the working representation of its
//! fractional part: an unsigned B-bit integer `v` denoting `v/2^B ∈ [0, 1)`.
//! Addition and multiplication by integers wrap mod 2^B, which is exactly
//! arithmetic mod 1 on these binary fractions.

use crate::error::{Error, Result};
use crate::wide::{self, Limbs};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Default working precision in bits.
pub const DEFAULT_BITS: u32 = 128;

/// A residue mod 1 stored as an unsigned B-bit integer (`value/2^B`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FracFixed {
    limbs: Limbs,
    bits: u32,
}

impl FracFixed {
    /// The zero residue at the given width.
    pub fn zero(bits: u32) -> Self {
        assert!(bits > 0 && bits <= wide::MAX_BITS, "width out of range");
        FracFixed { limbs: [0; 4], bits }
    }

    /// Build from raw limbs (little-endian); bits at and above B are cleared.
    pub fn from_limbs(mut limbs: Limbs, bits: u32) -> Self {
        assert!(bits > 0 && bits <= wide::MAX_BITS, "width out of range");
        wide::mask_to_bits(&mut limbs, bits);
        FracFixed { limbs, bits }
    }

    /// Build from a big integer, reduced mod 2^B.
    pub fn from_biguint(v: &BigUint, bits: u32) -> Self {
        let modulus = BigUint::one() << bits;
        let reduced = v % &modulus;
        let digits = reduced.to_u64_digits();
        let mut limbs = [0u64; 4];
        for (i, d) in digits.into_iter().enumerate() {
            limbs[i] = d;
        }
        FracFixed { limbs, bits }
    }

    /// The stored value as a big integer in `[0, 2^B)`.
    pub fn to_biguint(&self) -> BigUint {
        BigUint::from_slice(
            &self
                .limbs
                .iter()
                .flat_map(|&w| [(w & 0xffff_ffff) as u32, (w >> 32) as u32])
                .collect::<Vec<_>>(),
        )
    }

    /// Raw little-endian limbs.
    pub fn limbs(&self) -> &Limbs {
        &self.limbs
    }

    /// Working width in bits.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Wrapping addition mod 1.
    #[inline]
    pub fn wrapping_add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.bits, other.bits, "mixed precisions");
        FracFixed { limbs: wide::add_mod(&self.limbs, &other.limbs, self.bits), bits: self.bits }
    }

    /// Wrapping subtraction mod 1.
    #[inline]
    pub fn wrapping_sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.bits, other.bits, "mixed precisions");
        FracFixed { limbs: wide::sub_mod(&self.limbs, &other.limbs, self.bits), bits: self.bits }
    }

    /// Wrapping multiplication by an integer factor mod 1.
    #[inline]
    pub fn wrapping_mul_u64(&self, k: u64) -> Self {
        FracFixed { limbs: wide::mul_u64_mod(&self.limbs, k, self.bits), bits: self.bits }
    }

    /// Negation mod 1 (`1 - x` for nonzero x).
    #[inline]
    pub fn wrapping_neg(&self) -> Self {
        FracFixed { limbs: wide::neg_mod(&self.limbs, self.bits), bits: self.bits }
    }

    /// True when the residue is exactly zero.
    pub fn is_zero(&self) -> bool {
        wide::is_zero(&self.limbs, self.bits)
    }

    /// The fraction rounded toward zero to 53 bits, in `[0, 1)`.
    #[inline]
    pub fn to_f64(&self) -> f64 {
        wide::top53(&self.limbs, self.bits) as f64 / (1u64 << 53) as f64
    }

    /// The point `e(x) = exp(2πi·x)` on the unit circle, as `(re, im)`.
    ///
    /// Uses the top 53 bits of the residue; per-call error is a few units in
    /// the last place of double precision.
    #[inline]
    pub fn unit_circle(&self) -> (f64, f64) {
        let theta = 2.0 * std::f64::consts::PI * self.to_f64();
        let (s, c) = theta.sin_cos();
        (c, s)
    }
}

impl fmt::Debug for FracFixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FracFixed({:#x}/2^{})", self.to_biguint(), self.bits)
    }
}

/// An exactly described real number.
///
/// `Root`/`AffineRoot` radicands that are perfect k-th powers are normalized
/// to `Rational` during construction, so the root variants always denote
/// irrational numbers.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactReal {
    /// An exact rational p/q.
    Rational(BigRational),
    /// `scale · radicand^(1/k) + offset` with `radicand > 0` not a perfect
    /// k-th power and `scale ≠ 0`.
    AffineRoot { k: u32, radicand: BigRational, scale: BigRational, offset: BigRational },
}

impl ExactReal {
    /// An integer constant.
    pub fn integer(n: i64) -> Self {
        ExactReal::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// An exact rational p/q (q ≠ 0).
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::description("rational with zero denominator"));
        }
        Ok(ExactReal::Rational(BigRational::new(BigInt::from(p), BigInt::from(q))))
    }

    /// The real k-th root of a positive rational.
    pub fn root(k: u32, radicand: BigRational) -> Result<Self> {
        Self::affine_root(k, radicand, BigRational::one(), BigRational::zero())
    }

    /// `scale · radicand^(1/k) + offset`; collapses to `Rational` when the
    /// radicand is a perfect k-th power or the scale is zero.
    pub fn affine_root(
        k: u32,
        radicand: BigRational,
        scale: BigRational,
        offset: BigRational,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::description("root order k must be ≥ 1"));
        }
        if !radicand.is_positive() {
            return Err(Error::description("root radicand must be positive"));
        }
        if scale.is_zero() {
            return Ok(ExactReal::Rational(offset));
        }
        if k == 1 {
            return Ok(ExactReal::Rational(scale * radicand + offset));
        }
        // Perfect-power normalization: p/q reduced; both parts must be exact
        // k-th powers of integers for the root to be rational.
        let p = radicand.numer().magnitude();
        let q = radicand.denom().magnitude();
        let pr = p.nth_root(k);
        let qr = q.nth_root(k);
        if pr.pow(k) == *p && qr.pow(k) == *q {
            let exact = BigRational::new(BigInt::from(pr), BigInt::from(qr));
            return Ok(ExactReal::Rational(scale * exact + offset));
        }
        Ok(ExactReal::AffineRoot { k, radicand, scale, offset })
    }

    /// Parse a textual description.
    ///
    /// Accepted forms:
    /// - `rat:p/q` — exact rational (also `rat:n` for integers);
    /// - `dec:±ddd.ddd` — exact decimal;
    /// - `root:k:p/q` — the real k-th root of a positive rational;
    /// - `affroot:k:p/q:s:t` — `s · (p/q)^{1/k} + t` with `s`, `t` rationals;
    /// - `golden` — `(√5 − 1)/2`;
    /// - `sqrt2-1` — `√2 − 1`.
    pub fn parse(desc: &str) -> Result<Self> {
        let desc = desc.trim();
        match desc {
            "golden" => {
                return Self::affine_root(
                    2,
                    BigRational::from_integer(5.into()),
                    BigRational::new(1.into(), 2.into()),
                    BigRational::new((-1).into(), 2.into()),
                )
            }
            "sqrt2-1" => {
                return Self::affine_root(
                    2,
                    BigRational::from_integer(2.into()),
                    BigRational::one(),
                    BigRational::from_integer((-1).into()),
                )
            }
            _ => {}
        }
        let (tag, rest) = desc
            .split_once(':')
            .ok_or_else(|| Error::description(format!("unrecognized coefficient `{desc}`")))?;
        match tag {
            "rat" => Ok(ExactReal::Rational(parse_rational(rest)?)),
            "dec" => Ok(ExactReal::Rational(parse_decimal(rest)?)),
            "root" => {
                let (k, rad) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::description(format!("root needs `k:p/q`: `{desc}`")))?;
                let k: u32 = k
                    .parse()
                    .map_err(|_| Error::description(format!("bad root order in `{desc}`")))?;
                Self::root(k, parse_rational(rad)?)
            }
            "affroot" => {
                let parts: Vec<&str> = rest.split(':').collect();
                if parts.len() != 4 {
                    return Err(Error::description(format!(
                        "affroot needs `k:p/q:scale:offset`: `{desc}`"
                    )));
                }
                let k: u32 = parts[0]
                    .parse()
                    .map_err(|_| Error::description(format!("bad root order in `{desc}`")))?;
                Self::affine_root(
                    k,
                    parse_rational(parts[1])?,
                    parse_rational(parts[2])?,
                    parse_rational(parts[3])?,
                )
            }
            _ => Err(Error::description(format!("unrecognized coefficient tag `{tag}`"))),
        }
    }

    /// True when the number is exactly zero.
    pub fn is_zero(&self) -> bool {
        matches!(self, ExactReal::Rational(r) if r.is_zero())
    }

    /// The exact rational value, when the number is rational. Root variants
    /// are irrational by construction and return `None`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactReal::Rational(r) => Some(r),
            ExactReal::AffineRoot { .. } => None,
        }
    }

    /// The negated number.
    pub fn negated(&self) -> Self {
        match self {
            ExactReal::Rational(r) => ExactReal::Rational(-r.clone()),
            ExactReal::AffineRoot { k, radicand, scale, offset } => ExactReal::AffineRoot {
                k: *k,
                radicand: radicand.clone(),
                scale: -scale.clone(),
                offset: -offset.clone(),
            },
        }
    }

    /// Exact comparison against a rational.
    ///
    /// Root variants are irrational (normalized on construction), so the
    /// result is never `Equal` for them; the comparison reduces to comparing
    /// the radicand with the k-th power of a rational — an exact big-integer
    /// test.
    pub fn cmp_rational(&self, t: &BigRational) -> Ordering {
        match self {
            ExactReal::Rational(r) => r.cmp(t),
            ExactReal::AffineRoot { k, radicand, scale, offset } => {
                // scale·ρ + offset ? t  ⟺  ρ ? (t − offset)/scale  (flip if scale < 0)
                let w = (t - offset) / scale;
                let base = if w.is_negative() {
                    // ρ > 0 > w
                    Ordering::Greater
                } else {
                    radicand.cmp(&pow_rational(&w, *k))
                };
                if scale.is_negative() {
                    base.reverse()
                } else {
                    base
                }
            }
        }
    }

    /// `floor(self · 2^shift)` as an exact big integer.
    ///
    /// For root variants this refines a dyadic enclosure of the root until the
    /// floor is determined; termination is guaranteed because the scaled value
    /// is irrational. The result is exact for every variant.
    pub fn floor_scaled(&self, shift: u32) -> BigInt {
        match self {
            ExactReal::Rational(r) => {
                let scaled = r * BigRational::from_integer(BigInt::one() << shift);
                scaled.floor().to_integer()
            }
            ExactReal::AffineRoot { k, radicand, scale, offset } => {
                let mut prec = shift + 64;
                loop {
                    // Root enclosure m/2^prec ≤ ρ < (m+1)/2^prec.
                    let m = floor_root_scaled(radicand, *k, prec);
                    let two_p = BigRational::from_integer(BigInt::one() << prec);
                    let lo_root = BigRational::new(m.clone(), BigInt::one()) / &two_p;
                    let hi_root = BigRational::new(m + 1, BigInt::one()) / &two_p;
                    let (lo_root, hi_root) =
                        if scale.is_negative() { (hi_root, lo_root) } else { (lo_root, hi_root) };
                    let scale2 = BigRational::from_integer(BigInt::one() << shift);
                    let lo = (scale * lo_root + offset) * &scale2;
                    let hi = (scale * hi_root + offset) * &scale2;
                    let flo = lo.floor().to_integer();
                    let fhi = hi.floor().to_integer();
                    if flo == fhi {
                        return flo;
                    }
                    prec *= 2;
                }
            }
        }
    }

    /// Round the fractional part to the nearest multiple of 2^{-bits}, ties
    /// toward +∞, wrapping to 0 at 1 — the canonical [`FracFixed`] image.
    ///
    /// Exactness: with `m = floor({α}·2^{B+1})`, round-half-up({α}·2^B) equals
    /// `(m + 1) >> 1`, and reducing mod 2^B folds the `{α} ≈ 1` case to 0.
    pub fn quantize(&self, bits: u32) -> FracFixed {
        assert!(bits > 0 && bits <= wide::MAX_BITS, "width out of range");
        let scaled = self.floor_scaled(bits + 1);
        // Fractional part: floor({α}·2^{B+1}) = floor(α·2^{B+1}) mod 2^{B+1}.
        let modulus = BigInt::one() << (bits + 1);
        let m = scaled.mod_floor(&modulus);
        let rounded: BigInt = (m + 1) >> 1;
        let (_, mag) = rounded.into_parts();
        FracFixed::from_biguint(&mag, bits)
    }

    /// Best-effort double-precision value (for reporting only).
    pub fn to_f64(&self) -> f64 {
        let scaled = self.floor_scaled(64);
        let num = BigRational::new(scaled, BigInt::one() << 64);
        num.to_f64().unwrap_or(f64::NAN)
    }
}

/// `w^k` for a non-negative rational.
fn pow_rational(w: &BigRational, k: u32) -> BigRational {
    BigRational::new(w.numer().pow(k), w.denom().pow(k))
}

/// `floor(radicand^{1/k} · 2^prec)` for a positive rational radicand: the
/// largest m with `m^k · q ≤ p · 2^{k·prec}`, found by big-integer bisection.
fn floor_root_scaled(radicand: &BigRational, k: u32, prec: u32) -> BigInt {
    let p = radicand.numer().magnitude().clone();
    let q = radicand.denom().magnitude().clone();
    let target = p << (k as u64 * prec as u64); // compare m^k·q ≤ target
    // Upper bound: radicand^{1/k} ≤ max(radicand, 1), so (⌊p/q⌋+2)·2^prec works.
    let mut hi: BigUint = ((radicand.numer().magnitude() / radicand.denom().magnitude())
        + BigUint::from(2u32))
        << prec;
    let mut lo = BigUint::zero();
    // Invariant: lo^k·q ≤ target < hi^k·q.
    while &lo + BigUint::one() < hi {
        let mid: BigUint = (&lo + &hi) >> 1;
        if mid.pow(k) * &q <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    BigInt::from_biguint(Sign::Plus, lo)
}

/// Parse `p/q` or a bare integer into an exact rational.
fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt =
        num.parse().map_err(|_| Error::description(format!("bad integer `{num}`")))?;
    let d: BigInt =
        den.parse().map_err(|_| Error::description(format!("bad integer `{den}`")))?;
    if d.is_zero() {
        return Err(Error::description("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

/// Parse a decimal literal `±ddd.ddd` into an exact rational.
fn parse_decimal(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::description(format!("empty decimal `{s}`")));
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::description(format!("bad decimal `{s}`")));
    }
    let value: BigInt =
        digits.parse().map_err(|_| Error::description(format!("bad decimal `{s}`")))?;
    let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(BigRational::new(value * BigInt::from(sign), scale))
}
