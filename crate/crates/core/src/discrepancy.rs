//! Exact extreme discrepancy of finite 1-D point sets, the
//! Erdős–Turán–Koksma majorant, and combined equidistribution reports for
//! polynomial images of digit classes.

use crate::bounds::{bound_rhs, BoundEnvelope, BoundParams, FormulaId};
use crate::digits::DigitClassSpec;
use crate::error::{Error, Result};
use crate::poly::RealPolynomial;
use crate::weyl::{class_phases, sum_scaled_phases};

/// A finite multiset of points in `[0, 1)`, stored sorted.
#[derive(Clone, Debug)]
pub struct PointSet {
    values: Vec<f64>,
}

impl PointSet {
    /// Validates that every value lies in `[0, 1)` and that the set is
    /// non-empty, then stores the values in ascending order.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("point set must be non-empty"));
        }
        for &v in &values {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::domain(format!("point {v} outside [0, 1)")));
            }
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(PointSet { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty sets
    }

    /// The points in ascending order.
    pub fn sorted_values(&self) -> &[f64] {
        &self.values
    }
}

/// The fractional parts `{f(n)}` for `n` ranging over a digit class, in a
/// point set ready for discrepancy evaluation.
pub fn class_points(f: &RealPolynomial, spec: DigitClassSpec) -> Result<PointSet> {
    let phases = class_phases(f, spec)?;
    PointSet::new(phases.iter().map(|p| p.to_f64()).collect())
}

/// Exact extreme discrepancy: the supremum over all subintervals
/// `I ⊆ [0, 1)` of `|#{x ∈ I}/N − |I||`.
///
/// Computed from the sorted points `x_(1) ≤ … ≤ x_(N)` as
/// `1/N + max_i (i/N − x_(i)) + max_i (x_(i) − i/N)`; the two maxima are
/// taken without clamping, and the `1/N` term resolves the open/closed
/// endpoint subtleties of the supremum (verified against the brute-force
/// oracle below).
pub fn extreme_discrepancy(ps: &PointSet) -> f64 {
    let n = ps.values.len() as f64;
    let mut over = f64::NEG_INFINITY;
    let mut under = f64::NEG_INFINITY;
    for (idx, &x) in ps.values.iter().enumerate() {
        let i = (idx + 1) as f64;
        over = over.max(i / n - x);
        under = under.max(x - i / n);
    }
    1.0 / n + over + under
}

/// Star discrepancy (sup over anchored intervals `[0, t)` only), exposed
/// for reference: `max_i max(i/N − x_(i), x_(i) − (i−1)/N)`.
pub fn star_discrepancy(ps: &PointSet) -> f64 {
    let n = ps.values.len() as f64;
    let mut best = f64::NEG_INFINITY;
    for (idx, &x) in ps.values.iter().enumerate() {
        let i = (idx + 1) as f64;
        best = best.max((i / n - x).max(x - (i - 1.0) / n));
    }
    best
}

/// O(N²) reference evaluation of the extreme discrepancy: the supremum is
/// attained in the limit at interval endpoints drawn from the sample
/// together with 0 and 1, testing each candidate pair both as a closed
/// interval (counting boundary points) and as an open one (excluding them).
pub fn brute_force_discrepancy(ps: &PointSet) -> f64 {
    let xs = &ps.values;
    let n = xs.len() as f64;
    let mut endpoints: Vec<f64> = Vec::with_capacity(xs.len() + 2);
    endpoints.push(0.0);
    endpoints.extend_from_slice(xs);
    endpoints.push(1.0);
    endpoints.dedup();

    // Count of points ≤ t and < t via binary search on the sorted sample.
    let le = |t: f64| xs.partition_point(|&x| x <= t) as f64;
    let lt = |t: f64| xs.partition_point(|&x| x < t) as f64;

    let mut best: f64 = 0.0;
    for (i, &a) in endpoints.iter().enumerate() {
        for &b in &endpoints[i..] {
            let length = b - a;
            let closed = le(b) - lt(a);
            let open = lt(b) - le(a);
            best = best.max(closed / n - length);
            best = best.max(length - open / n);
        }
    }
    best
}

/// The Erdős–Turán–Koksma majorant
/// `c · (1/L + (1/N) Σ_{ℓ=1}^{L} |S_ℓ| / ℓ)`,
/// where `sums[ℓ−1] = |Σ_n e(ℓ y_n)|`.
pub fn etk_majorant(sums: &[f64], n: u64, c: f64) -> Result<f64> {
    if sums.is_empty() {
        return Err(Error::description("the majorant needs at least one exponential sum"));
    }
    if n == 0 {
        return Err(Error::domain("point count must be ≥ 1"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain("majorant constant must be positive and finite"));
    }
    let mut tail = 0.0;
    for (idx, &s) in sums.iter().enumerate() {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::domain(format!("|S_{}| = {s} is not a valid magnitude", idx + 1)));
        }
        tail += s / (idx + 1) as f64;
    }
    Ok(c * (1.0 / sums.len() as f64 + tail / n as f64))
}

/// Combined equidistribution evidence for the points `{f(n)}`, `n` in a
/// digit class.
#[derive(Clone, Debug)]
pub struct EquidistributionReport {
    /// Number of points.
    pub n: u64,
    /// Truncation order of the majorant.
    pub l: u32,
    /// Measured extreme discrepancy.
    pub measured: f64,
    /// Measured star discrepancy (reference).
    pub star: f64,
    /// ETK majorant built from the measured sums `|S_ℓ|`, ℓ = 1..L.
    pub etk: f64,
    /// Constant used in the majorant.
    pub etk_constant: f64,
    /// The measured sums that entered the majorant.
    pub sums: Vec<f64>,
    /// Theoretical decay envelope when one applies (congruence classes and
    /// fixed digit sum only) and the polynomial degree is ≥ 3.
    pub envelope: Option<BoundEnvelope>,
    /// measured / etk.
    pub ratio_measured_etk: f64,
    /// measured / envelope, when an envelope applies.
    pub ratio_measured_envelope: Option<f64>,
}

/// Computes the measured discrepancy of `{f(n): n ∈ spec}`, the ETK
/// majorant from measured twisted sums at ℓ = 1..L, and — for congruence
/// classes and fixed-digit-sum classes under a degree-≥ 3 polynomial — the
/// theoretical decay envelope.
///
/// All exponential sums reuse one phase table at ℓ = 1, scaled modularly,
/// so the whole report costs one class enumeration.
pub fn equidistribution_report(
    f: &RealPolynomial,
    spec: DigitClassSpec,
    l: u32,
    etk_constant: f64,
    epsilon: f64,
) -> Result<EquidistributionReport> {
    if l == 0 {
        return Err(Error::description("majorant truncation L must be ≥ 1"));
    }
    let phases = class_phases(f, spec)?;
    let n = phases.len() as u64;
    let ps = PointSet::new(phases.iter().map(|p| p.to_f64()).collect())?;
    let measured = extreme_discrepancy(&ps);
    let star = star_discrepancy(&ps);

    let sums: Vec<f64> = (1..=u64::from(l))
        .map(|ell| sum_scaled_phases(&phases, ell, f.bits()).magnitude)
        .collect();
    let etk = etk_majorant(&sums, n, etk_constant)?;

    let d = f.degree() as u32;
    let envelope = if d >= 3 {
        match spec {
            DigitClassSpec::CongruenceSum { r, .. } => {
                let mut params = BoundParams::new(d, r, 1);
                params.epsilon = epsilon;
                Some(bound_rhs(FormulaId::EquiCong, &params)?)
            }
            DigitClassSpec::FixedSum { r, s } => {
                let mut params = BoundParams::new(d, r, 1);
                params.s = Some(s);
                params.epsilon = epsilon;
                Some(bound_rhs(FormulaId::EquiSparse, &params)?)
            }
            _ => None,
        }
    } else {
        None
    };

    Ok(EquidistributionReport {
        n,
        l,
        measured,
        star,
        etk,
        etk_constant,
        sums,
        envelope,
        ratio_measured_etk: measured / etk,
        ratio_measured_envelope: envelope.map(|e| measured / e.value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::ExactReal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn equispaced(n: usize) -> PointSet {
        PointSet::new((0..n).map(|k| k as f64 / n as f64).collect()).unwrap()
    }

    #[test]
    fn equispaced_attains_the_floor() {
        for n in [1, 2, 4, 10, 128] {
            let d = extreme_discrepancy(&equispaced(n));
            assert!((d - 1.0 / n as f64).abs() < 1e-15, "n = {n}: {d}");
        }
    }

    #[test]
    fn single_point_has_full_discrepancy() {
        let ps = PointSet::new(vec![0.5]).unwrap();
        assert_eq!(extreme_discrepancy(&ps), 1.0);
    }

    #[test]
    fn small_frozen_example() {
        let ps = PointSet::new(vec![0.1, 0.5, 0.55]).unwrap();
        let d = extreme_discrepancy(&ps);
        // Interval (0.55, 1) misses all three points: D = 0.45 + 1/6.
        assert!((d - (1.0 / 3.0 + 0.45 - 1.0 / 6.0)).abs() < 1e-15);
        assert!((brute_force_discrepancy(&ps) - d).abs() < 1e-12);
    }

    #[test]
    fn sorted_formula_matches_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x00D15C0);
        for trial in 0..40 {
            let n = rng.gen_range(1..=200);
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let ps = PointSet::new(values).unwrap();
            let fast = extreme_discrepancy(&ps);
            let brute = brute_force_discrepancy(&ps);
            assert!(
                (fast - brute).abs() < 1e-12,
                "trial {trial}, n = {n}: sorted {fast} vs brute {brute}"
            );
        }
    }

    #[test]
    fn discrepancy_range_and_star_comparison() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let n = rng.gen_range(1..=300);
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let ps = PointSet::new(values).unwrap();
            let d = extreme_discrepancy(&ps);
            let star = star_discrepancy(&ps);
            assert!(d >= 1.0 / n as f64 - 1e-12);
            assert!(d <= 1.0 + 1e-12);
            assert!(star <= d + 1e-12, "star ≤ extreme");
            assert!(d <= 2.0 * star + 1e-12, "extreme ≤ 2 · star");
        }
    }

    #[test]
    fn rejects_bad_points() {
        assert!(PointSet::new(vec![]).is_err());
        assert!(PointSet::new(vec![1.0]).is_err());
        assert!(PointSet::new(vec![-0.1]).is_err());
        assert!(PointSet::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn majorant_degenerate_forms() {
        // All sums vanish → c/L.
        let zeros = vec![0.0; 8];
        assert!((etk_majorant(&zeros, 100, 3.0).unwrap() - 3.0 / 8.0).abs() < 1e-15);

        // All sums maximal (= N) → c (1/L + H_L).
        let n = 50u64;
        let full = vec![n as f64; 4];
        let h4 = 1.0 + 0.5 + 1.0 / 3.0 + 0.25;
        assert!((etk_majorant(&full, n, 3.0).unwrap() - 3.0 * (0.25 + h4)).abs() < 1e-12);

        assert!(etk_majorant(&[], 10, 3.0).is_err());
        assert!(etk_majorant(&[1.0], 0, 3.0).is_err());
        assert!(etk_majorant(&[-1.0], 10, 3.0).is_err());
    }

    #[test]
    fn majorant_covers_equispaced_sets() {
        // Equispaced points: S_ℓ = 0 unless N | ℓ, where S_ℓ = N. With
        // L ≤ N/2 every sum vanishes, the majorant is c/L, and the
        // measured discrepancy 1/N stays below it for c = 3.
        let n = 64usize;
        let ps = equispaced(n);
        let l = 32usize;
        let sums: Vec<f64> = (1..=l)
            .map(|ell| {
                let (mut re, mut im) = (0.0, 0.0);
                for &x in ps.sorted_values() {
                    let t = 2.0 * std::f64::consts::PI * (ell as f64) * x;
                    re += t.cos();
                    im += t.sin();
                }
                (re * re + im * im).sqrt()
            })
            .collect();
        let majorant = etk_majorant(&sums, n as u64, 3.0).unwrap();
        assert!((majorant - 3.0 / l as f64).abs() < 1e-9);
        assert!(extreme_discrepancy(&ps) <= majorant);
    }

    #[test]
    fn report_trivial_integer_polynomial() {
        // Integer coefficients (f = Z³) put every point at 0 → D = 1.
        let f = RealPolynomial::monomial(ExactReal::integer(1), 3, 128).unwrap();
        let rep =
            equidistribution_report(&f, DigitClassSpec::Full { r: 8 }, 8, 3.0, 0.0).unwrap();
        assert_eq!(rep.measured, 1.0);
        assert!(rep.envelope.is_none(), "full range carries no decay envelope");
    }

    #[test]
    fn report_equispaced_linear_polynomial() {
        // f = n / 2^r over the full range is exactly equispaced.
        let r = 10u32;
        let f =
            RealPolynomial::new(vec![ExactReal::rational(1, 1 << r).unwrap()], 128).unwrap();
        let rep = equidistribution_report(&f, DigitClassSpec::Full { r }, 16, 3.0, 0.0).unwrap();
        assert!((rep.measured - 2f64.powi(-(r as i32))).abs() < 1e-12);
        assert!(rep.measured <= rep.etk);
    }

    #[test]
    fn report_cubic_on_sparse_class() {
        let f = RealPolynomial::monomial(ExactReal::parse("root:3:2").unwrap(), 3, 128).unwrap();
        let spec = DigitClassSpec::FixedSum { r: 18, s: 9 };
        let rep = equidistribution_report(&f, spec, 16, 3.0, 0.0).unwrap();
        assert_eq!(rep.n, crate::digits::binomial_u64(18, 9));
        assert!(rep.measured <= rep.etk, "majorant must cover the measurement");
        let env = rep.envelope.expect("sparse spec has an envelope");
        assert_eq!(env.formula, FormulaId::EquiSparse);
        assert!(rep.ratio_measured_envelope.is_some());
    }

    #[test]
    fn report_congruence_class_envelope() {
        let f = RealPolynomial::monomial(ExactReal::parse("golden").unwrap(), 3, 128).unwrap();
        let spec = DigitClassSpec::CongruenceSum { r: 12, k: 0, m: 2 };
        let rep = equidistribution_report(&f, spec, 8, 3.0, 0.0).unwrap();
        let env = rep.envelope.expect("congruence spec has an envelope");
        assert_eq!(env.formula, FormulaId::EquiCong);
        // d = 3 → min{ν₁, ν₂} = 1/13.
        assert!((env.value - 2f64.powf(-12.0 / 13.0)).abs() < 1e-12);
        assert!(rep.measured <= rep.etk);
    }
}
