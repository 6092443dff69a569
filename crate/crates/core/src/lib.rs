//! Exact exponential sums over digitally restricted integers.
//!
//! The crate computes Weyl sums `Σ e(ℓ·f(n))` with real polynomial phases
//! `f`, restricted to integers selected by binary-digit conditions (fixed
//! digit sum, digit-sum congruence classes, digit-pattern parities) or
//! twisted by the Thue–Morse and Rudin–Shapiro sequences. Coefficients are
//! exact reals (rationals and affine images of k-th roots), quantized once
//! to B-bit fixed point; from that point every phase is computed by exact
//! wrapping arithmetic mod 1, so results are reproducible bit-for-bit at any
//! thread count.
//!
//! Companion analysis tools evaluate the theoretical envelopes these sums
//! are measured against: exact rational exponent families, threshold tables,
//! continued-fraction machinery, power-sum optimization, discrepancy of the
//! resulting point sets, and small-scale mean-value counts.

pub mod bounds;
pub mod digits;
pub mod dioph;
pub mod discrepancy;
pub mod error;
pub mod exponents;
pub mod fixedpoint;
pub mod mvt;
pub mod poly;
pub mod selftest;
pub mod weyl;
pub mod wide;

pub use error::{Error, Result};
