//! Textual descriptions accepted on the command line: polynomials as
//! comma-separated coefficient lists, and inclusive integer ranges.

use digitweyl::fixedpoint::ExactReal;
use digitweyl::poly::RealPolynomial;
use digitweyl::{Error, Result};

/// Parse a polynomial description: comma-separated coefficients, lowest
/// degree first, no constant term — `"rat:1/7,0,root:3:2"` is
/// `(1/7)·Z + 2^{1/3}·Z³`. A bare integer token is shorthand for the
/// corresponding rational, so interior zero coefficients can be written
/// as `0`. A single coefficient describes a linear polynomial.
pub fn parse_poly(desc: &str, bits: u32) -> Result<RealPolynomial> {
    let coeffs = desc
        .split(',')
        .map(|token| {
            let token = token.trim();
            match token.parse::<i64>() {
                Ok(n) => Ok(ExactReal::integer(n)),
                Err(_) => ExactReal::parse(token),
            }
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::description(format!("polynomial `{desc}`: {e}")))?;
    RealPolynomial::new(coeffs, bits)
        .map_err(|e| Error::description(format!("polynomial `{desc}`: {e}")))
}

/// Parse an inclusive range `"a..b"` with `a ≤ b`; a single integer
/// `"a"` means the one-element range `a..a`.
pub fn parse_range(desc: &str) -> Result<(u32, u32)> {
    let bad = || Error::description(format!("range `{desc}`: expected `a..b` with a ≤ b"));
    if let Some((lo, hi)) = desc.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok((lo, hi))
    } else {
        let single: u32 = desc.trim().parse().map_err(|_| bad())?;
        Ok((single, single))
    }
}

/// Parse a comma-separated list of positive integers.
pub fn parse_u64_list(desc: &str) -> Result<Vec<u64>> {
    desc.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::description(format!("list `{desc}`: `{t}` is not an integer")))
        })
        .collect()
}
