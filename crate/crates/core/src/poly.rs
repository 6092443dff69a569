//! Polynomials with exactly described real coefficients, evaluated mod 1 in
//! B-bit fixed point.
//!
//! A [`RealPolynomial`] has the form `f(Z) = α₁Z + α₂Z² + … + α_dZ^d` (no
//! constant term, `α_d ≠ 0`). Each coefficient is quantized once to a
//! [`FracFixed`] residue; every evaluation is then exact arithmetic mod 1 on
//! the quantized image. Two evaluation paths are provided — direct Horner
//! ([`RealPolynomial::frac_eval`]) and a d-th-order finite-difference stream
//! ([`RealPolynomial::difference_stream`]) — that agree bit for bit.

use crate::error::{Error, Result};
use crate::fixedpoint::{ExactReal, FracFixed};

/// A polynomial `Σ_{i=1}^d α_i Z^i` with exact coefficients and their
/// quantized B-bit images.
#[derive(Clone, Debug)]
pub struct RealPolynomial {
    exact: Vec<ExactReal>,
    quantized: Vec<FracFixed>,
    bits: u32,
}

impl RealPolynomial {
    /// Build from coefficients `[α₁, …, α_d]` (lowest degree first).
    ///
    /// Requires `d ≥ 1` and `α_d ≠ 0` (checked exactly).
    pub fn new(coeffs: Vec<ExactReal>, bits: u32) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("polynomial needs degree ≥ 1"));
        }
        if coeffs.last().unwrap().is_zero() {
            return Err(Error::domain("leading coefficient must be nonzero"));
        }
        let quantized = coeffs.iter().map(|c| c.quantize(bits)).collect();
        Ok(RealPolynomial { exact: coeffs, quantized, bits })
    }

    /// A monomial `α·Z^d` (coefficients below the leading one are zero).
    pub fn monomial(alpha: ExactReal, d: usize, bits: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("polynomial needs degree ≥ 1"));
        }
        let mut coeffs = vec![ExactReal::integer(0); d - 1];
        coeffs.push(alpha);
        Self::new(coeffs, bits)
    }

    /// Degree d ≥ 1.
    pub fn degree(&self) -> usize {
        self.exact.len()
    }

    /// Working precision in bits.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// The exact coefficients `[α₁, …, α_d]`.
    pub fn exact_coeffs(&self) -> &[ExactReal] {
        &self.exact
    }

    /// The quantized coefficient images `[α̃₁, …, α̃_d]`.
    pub fn quantized_coeffs(&self) -> &[FracFixed] {
        &self.quantized
    }

    /// The polynomial with every coefficient negated (exact), re-quantized.
    pub fn negated(&self) -> Self {
        let coeffs: Vec<ExactReal> = self.exact.iter().map(|c| c.negated()).collect();
        RealPolynomial::new(coeffs, self.bits).expect("negation preserves validity")
    }

    /// `{ℓ·f̃(n)}`: the fractional part of ℓ times the quantized polynomial
    /// at n, computed by Horner with all products and sums wrapping mod 2^B.
    ///
    /// ℓ is folded in by scaling each quantized coefficient mod 2^B, which
    /// coincides (mod 1) with scaling the evaluated value.
    pub fn frac_eval(&self, ell: u64, n: u64) -> FracFixed {
        let d = self.quantized.len();
        // acc = ℓα_d; acc = acc·n + ℓα_i for i = d−1 .. 1; result acc·n.
        let mut acc = self.quantized[d - 1].wrapping_mul_u64(ell);
        for i in (0..d - 1).rev() {
            acc = acc.wrapping_mul_u64(n).wrapping_add(&self.quantized[i].wrapping_mul_u64(ell));
        }
        acc.wrapping_mul_u64(n)
    }

    /// A streaming evaluator yielding `{ℓ·f̃(n0)}, {ℓ·f̃(n0+1)}, …` that is
    /// bit-for-bit identical to [`Self::frac_eval`] at every index.
    ///
    /// Seeds a d-th-order forward-difference table with d+1 direct
    /// evaluations; each subsequent value costs d wrapping additions. The
    /// table stays exact because the quantized polynomial is a degree-d
    /// polynomial over the ring of residues mod 2^B, whose (d+1)-st forward
    /// difference vanishes identically.
    pub fn difference_stream(&self, ell: u64, n0: u64, count: u64) -> DiffStream {
        let d = self.quantized.len();
        // Seed values f̃(n0), …, f̃(n0+d), then in-place forward differencing:
        // after pass j, table[i] = Δ^j applied at n0+i for i ≥ j.
        let mut table: Vec<FracFixed> =
            (0..=d as u64).map(|j| self.frac_eval(ell, n0 + j)).collect();
        for j in 1..=d {
            for i in (j..=d).rev() {
                table[i] = table[i].wrapping_sub(&table[i - 1]);
            }
        }
        DiffStream { table, remaining: count }
    }
}

/// Iterator produced by [`RealPolynomial::difference_stream`].
pub struct DiffStream {
    /// `table[j]` holds the j-th forward difference at the current index.
    table: Vec<FracFixed>,
    remaining: u64,
}

impl Iterator for DiffStream {
    type Item = FracFixed;

    #[inline]
    fn next(&mut self) -> Option<FracFixed> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = self.table[0];
        let d = self.table.len() - 1;
        for j in 0..d {
            self.table[j] = self.table[j].wrapping_add(&self.table[j + 1]);
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining.min(usize::MAX as u64) as usize;
        (n, Some(n))
    }
}
