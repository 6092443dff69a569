//! Binary digit functions and the restricted index classes built from them.
//!
//! The classes over `[0, 2^r)` are: fixed digit sum (`σ(n) = s`), digit-sum
//! congruence (`σ(n) ≡ k mod m`), parity of the overlapping-`11` block count
//! (`χ11(n) ≡ k mod 2`), parity of `σ(n) + σ(n+1)` (members have even total),
//! and the unrestricted full range. Enumeration is strictly increasing;
//! fixed-digit-sum classes step in constant time via the same-popcount
//! successor and support rank-based splitting for parallel consumption.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Binary digit sum σ(n) (popcount).
#[inline]
pub fn digit_sum(n: u64) -> u32 {
    n.count_ones()
}

/// Number of (possibly overlapping) `11` blocks in the binary expansion.
#[inline]
pub fn chi11(n: u64) -> u32 {
    (n & (n >> 1)).count_ones()
}

/// `t_n = (−1)^{σ(n)}`.
#[inline]
pub fn thue_morse(n: u64) -> i32 {
    1 - 2 * ((digit_sum(n) & 1) as i32)
}

/// `ρ_n = (−1)^{χ11(n)}`.
#[inline]
pub fn rudin_shapiro(n: u64) -> i32 {
    1 - 2 * ((chi11(n) & 1) as i32)
}

/// `t_n · t_{n+1} = (−1)^{σ(n)+σ(n+1)}`.
///
/// Incrementing n turns the trailing block of ones into zeros and sets the
/// next bit, so `σ(n+1) = σ(n) − trailing_ones(n) + 1` and the product is
/// `(−1)^{trailing_ones(n)+1}`.
#[inline]
pub fn thue_morse_pair(n: u64) -> i32 {
    2 * ((n.trailing_ones() & 1) as i32) - 1
}

/// A restricted class of integers below 2^r.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigitClassSpec {
    /// `σ(n) = s`, with `0 ≤ s ≤ r`.
    FixedSum { r: u32, s: u32 },
    /// `σ(n) ≡ k (mod m)`, with `m ≥ 1`, `0 ≤ k < m`.
    CongruenceSum { r: u32, k: u32, m: u32 },
    /// `χ11(n) ≡ k (mod 2)`, with `k ∈ {0, 1}`.
    Chi11Parity { r: u32, k: u32 },
    /// `σ(n) + σ(n+1) ≡ 0 (mod 2)`.
    SigmaPairParity { r: u32 },
    /// All of `[0, 2^r)`.
    Full { r: u32 },
}

/// Maximum bit length for class members (members are `u64`).
pub const MAX_R: u32 = 63;

impl DigitClassSpec {
    /// Validate the parameter domain.
    pub fn validate(&self) -> Result<()> {
        let r = self.r();
        if r > MAX_R {
            return Err(Error::domain(format!("r = {r} exceeds the {MAX_R}-bit cap")));
        }
        match *self {
            DigitClassSpec::FixedSum { r, s } => {
                if s > r {
                    return Err(Error::domain(format!("digit sum s = {s} exceeds r = {r}")));
                }
            }
            DigitClassSpec::CongruenceSum { k, m, .. } => {
                if m == 0 {
                    return Err(Error::domain("modulus m must be ≥ 1"));
                }
                if k >= m {
                    return Err(Error::domain(format!("residue k = {k} not below m = {m}")));
                }
            }
            DigitClassSpec::Chi11Parity { k, .. } => {
                if k > 1 {
                    return Err(Error::domain("parity class k must be 0 or 1"));
                }
            }
            DigitClassSpec::SigmaPairParity { .. } | DigitClassSpec::Full { .. } => {}
        }
        Ok(())
    }

    /// The bit-length parameter r.
    pub fn r(&self) -> u32 {
        match *self {
            DigitClassSpec::FixedSum { r, .. }
            | DigitClassSpec::CongruenceSum { r, .. }
            | DigitClassSpec::Chi11Parity { r, .. }
            | DigitClassSpec::SigmaPairParity { r }
            | DigitClassSpec::Full { r } => r,
        }
    }

    /// Membership test for `n < 2^r`.
    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        match *self {
            DigitClassSpec::FixedSum { s, .. } => digit_sum(n) == s,
            DigitClassSpec::CongruenceSum { k, m, .. } => digit_sum(n) % m == k,
            DigitClassSpec::Chi11Parity { k, .. } => chi11(n) & 1 == k,
            DigitClassSpec::SigmaPairParity { .. } => n.trailing_ones() & 1 == 1,
            DigitClassSpec::Full { .. } => true,
        }
    }

    /// Exact number of members, as a big integer.
    pub fn cardinality(&self) -> Result<BigUint> {
        self.validate()?;
        Ok(match *self {
            DigitClassSpec::FixedSum { r, s } => binomial(r, s),
            DigitClassSpec::CongruenceSum { r, k, m } => {
                // Digit DP over r positions; state = digit-sum residue mod m.
                let mut counts = vec![BigUint::zero(); m as usize];
                counts[0] = BigUint::one();
                for _ in 0..r {
                    let mut next = vec![BigUint::zero(); m as usize];
                    for res in 0..m as usize {
                        // Append a 0 bit (residue unchanged) or a 1 bit.
                        let bumped = (res + 1) % m as usize;
                        next[res] += &counts[res];
                        next[bumped] += &counts[res];
                    }
                    counts = next;
                }
                counts[k as usize].clone()
            }
            DigitClassSpec::Chi11Parity { r, k } => {
                // Transfer-matrix DP over bits from least significant up;
                // state = (previous bit, χ11 parity so far).
                let zero_state = || [[BigUint::zero(), BigUint::zero()], [BigUint::zero(), BigUint::zero()]];
                let mut counts = zero_state();
                counts[0][0] = BigUint::one(); // empty expansion
                for _ in 0..r {
                    let mut next = zero_state();
                    for prev in 0..2usize {
                        for par in 0..2usize {
                            if counts[prev][par].is_zero() {
                                continue;
                            }
                            // Next bit 0: parity unchanged.
                            next[0][par] += &counts[prev][par];
                            // Next bit 1: parity flips when the previous bit was 1.
                            let flipped = par ^ prev;
                            next[1][flipped] += &counts[prev][par];
                        }
                    }
                    counts = next;
                }
                &counts[0][k as usize] + &counts[1][k as usize]
            }
            DigitClassSpec::SigmaPairParity { r } => {
                // Members have an odd number of trailing ones: patterns
                // …0·1^e with e odd contribute 2^{r−1−e} each, plus the
                // all-ones word when r is odd.
                let mut total = BigUint::zero();
                let mut e = 1;
                while e < r {
                    total += BigUint::one() << (r - 1 - e);
                    e += 2;
                }
                if r % 2 == 1 {
                    total += BigUint::one();
                }
                total
            }
            DigitClassSpec::Full { r } => BigUint::one() << r,
        })
    }

    /// Strictly increasing enumeration of the class members.
    pub fn enumerate(&self) -> Result<ClassIter> {
        self.validate()?;
        Ok(match *self {
            DigitClassSpec::FixedSum { r, s } => {
                if s == 0 {
                    // Only n = 0; represent as a degenerate scan of [0, 1).
                    ClassIter::Scan { next: 0, end: 1, spec: *self }
                } else {
                    let first = (1u64 << s) - 1;
                    let last = first << (r - s);
                    ClassIter::Popcount { next: Some(first), last }
                }
            }
            _ => ClassIter::Scan { next: 0, end: 1u64 << self.r(), spec: *self },
        })
    }

    /// The rank-th member (0-based) of a fixed-digit-sum class, by the
    /// combinatorial number system: choose set bits from the top down.
    ///
    /// Only meaningful for `FixedSum`; other classes return a domain error.
    pub fn unrank_fixed_sum(&self, rank: &BigUint) -> Result<u64> {
        let (r, s) = match *self {
            DigitClassSpec::FixedSum { r, s } => (r, s),
            _ => return Err(Error::domain("unranking applies to fixed-digit-sum classes")),
        };
        self.validate()?;
        let mut remaining = rank.clone();
        let mut n: u64 = 0;
        let mut ones_left = s;
        for pos in (0..r).rev() {
            if ones_left == 0 {
                break;
            }
            if ones_left > pos {
                // All remaining positions must be ones.
                n |= (1u64 << ones_left) - 1;
                break;
            }
            // Members with bit `pos` clear come first: C(pos, ones_left) of them.
            let below = binomial(pos, ones_left);
            if remaining < below {
                continue;
            }
            remaining -= below;
            n |= 1u64 << pos;
            ones_left -= 1;
        }
        Ok(n)
    }
}

/// Same-popcount successor (the next larger integer with the same number of
/// set bits).
#[inline]
pub fn next_same_popcount(v: u64) -> u64 {
    debug_assert!(v != 0);
    let c = v & v.wrapping_neg();
    let r = v + c;
    r | (((v ^ r) >> 2) / c)
}

/// Enumeration stream for a digit class.
pub enum ClassIter {
    /// Constant-time stepping through equal-popcount words.
    Popcount { next: Option<u64>, last: u64 },
    /// Filtered ascending scan of `[next, end)`.
    Scan { next: u64, end: u64, spec: DigitClassSpec },
}

impl Iterator for ClassIter {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        match self {
            ClassIter::Popcount { next, last } => {
                let cur = (*next)?;
                *next = if cur == *last { None } else { Some(next_same_popcount(cur)) };
                Some(cur)
            }
            ClassIter::Scan { next, end, spec } => {
                while *next < *end {
                    let n = *next;
                    *next += 1;
                    if spec.contains(n) {
                        return Some(n);
                    }
                }
                None
            }
        }
    }
}

/// Exact binomial coefficient `C(r, s)`.
pub fn binomial(r: u32, s: u32) -> BigUint {
    if s > r {
        return BigUint::zero();
    }
    let s = s.min(r - s);
    let mut acc = BigUint::one();
    for i in 0..s {
        acc = acc * BigUint::from(r - i) / BigUint::from(i + 1);
    }
    acc
}

/// `C(r, s)` as u64 when it fits (r ≤ 63 always fits: C(63,31) < 2^63).
pub fn binomial_u64(r: u32, s: u32) -> u64 {
    binomial(r, s).to_u64().expect("binomial exceeds u64")
}
