//! Integration tests for the exact-coefficient and fixed-point layers:
//! frozen quantization images, round-half-up semantics, wrapping-ring
//! algebra, and bitwise agreement of the two polynomial evaluators.

use digitweyl::fixedpoint::{ExactReal, FracFixed};
use digitweyl::poly::RealPolynomial;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

/// Round-half-up quantization of an exact rational to B bits, written
/// directly against BigInt arithmetic as an independent reference.
fn reference_quantize(x: &BigRational, bits: u32) -> BigUint {
    let scaled = x * BigRational::new(BigInt::one() << (bits + 1), BigInt::one());
    let floor = scaled.floor().to_integer();
    let modulus = BigInt::one() << (bits + 1);
    let m = ((floor % &modulus) + &modulus) % &modulus;
    let rounded: BigInt = (m + 1) >> 1;
    let b_mod = BigInt::one() << bits;
    (rounded % b_mod).to_biguint().unwrap()
}

#[test]
fn cube_root_of_two_has_frozen_128_bit_image() {
    // Independently computed via integer square/cube-root bisection:
    // frac(2^(1/3)) · 2^128, rounded half-up.
    let alpha = ExactReal::parse("root:3:2").unwrap();
    let q = alpha.quantize(128);
    let expect = BigUint::parse_bytes(b"428a2f98d728ae223ddab715be250d0c", 16).unwrap();
    assert_eq!(q.to_biguint(), expect);
}

#[test]
fn golden_and_pell_descriptions_parse_to_roots() {
    // golden − (√5 − 1)/2 = 0 and (√2 − 1) both lie in (0, 1).
    for (desc, low, high) in [("golden", 0.61, 0.62), ("sqrt2-1", 0.41, 0.42)] {
        let alpha = ExactReal::parse(desc).unwrap();
        let x = alpha.to_f64();
        assert!(x > low && x < high, "{desc} evaluated to {x}");
        assert!(alpha.as_rational().is_none(), "{desc} must stay irrational");
    }
}

#[test]
fn perfect_powers_collapse_to_rationals() {
    let alpha = ExactReal::parse("root:3:27/8").unwrap();
    let r = alpha.as_rational().expect("27/8 is a perfect cube");
    assert_eq!(*r, BigRational::new(3.into(), 2.into()));
}

#[test]
fn parse_rejects_malformed_descriptions() {
    for bad in ["", "rat:1/0", "root:0:2", "root:2:-4", "dec:abc", "nope:1"] {
        assert!(ExactReal::parse(bad).is_err(), "{bad:?} should be rejected");
    }
    // A first root is trivially its own radicand and collapses to a rational.
    let first_root = ExactReal::parse("root:1:2").unwrap();
    assert_eq!(*first_root.as_rational().unwrap(), BigRational::from_integer(2.into()));
}

#[test]
fn quantize_small_rationals_by_hand() {
    // 1/3 at B = 4: round(16/3) = 5.
    let q = ExactReal::rational(1, 3).unwrap().quantize(4);
    assert_eq!(q.to_biguint(), BigUint::from(5u32));
    // 1/2 at any B is exactly 2^(B−1).
    let q = ExactReal::rational(1, 2).unwrap().quantize(16);
    assert_eq!(q.to_biguint(), BigUint::from(1u32) << 15);
    // Negative values wrap: −1/4 ≡ 3/4 mod 1.
    let q = ExactReal::rational(-1, 4).unwrap().quantize(8);
    assert_eq!(q.to_biguint(), BigUint::from(192u32));
}

proptest! {
    #[test]
    fn quantize_matches_bigint_reference(p in -2000i64..2000, q in 1i64..2000, bits in 1u32..=200) {
        let x = BigRational::new(p.into(), q.into());
        let got = ExactReal::rational(p, q).unwrap().quantize(bits);
        prop_assert_eq!(got.to_biguint(), reference_quantize(&x, bits));
    }

    #[test]
    fn quantize_error_is_at_most_half_ulp(p in -999i64..999, q in 1i64..999, bits in 1u32..=128) {
        // |{x} − q(x)/2^B| ≤ 2^{−B−1} as rationals.
        let x = BigRational::new(p.into(), q.into());
        let frac = &x - x.floor();
        let image = BigRational::new(
            BigInt::from(ExactReal::rational(p, q).unwrap().quantize(bits).to_biguint()),
            BigInt::one() << bits,
        );
        let diff = (&frac - &image).abs();
        // The image may wrap to 0 when x rounds up to 1: distance mod 1.
        let wrapped = (BigRational::one() - &diff).abs();
        let half_ulp = BigRational::new(BigInt::one(), BigInt::one() << (bits + 1));
        prop_assert!(diff <= half_ulp || wrapped <= half_ulp,
            "x = {p}/{q}, B = {bits}: error {diff}");
    }

    #[test]
    fn wrapping_ring_algebra(a in any::<u64>(), b in any::<u64>(), k in any::<u64>(), bits in 1u32..=256) {
        let base = |v: u64| FracFixed::from_biguint(&BigUint::from(v), bits);
        let (x, y) = (base(a), base(b));
        // Additive inverse.
        prop_assert!(x.wrapping_add(&x.wrapping_neg()).is_zero());
        // Commutativity and the sub/add inverse relation.
        prop_assert_eq!(x.wrapping_add(&y).to_biguint(), y.wrapping_add(&x).to_biguint());
        prop_assert_eq!(x.wrapping_add(&y).wrapping_sub(&y).to_biguint(), x.to_biguint());
        // Scalar multiplication distributes over addition.
        let lhs = x.wrapping_add(&y).wrapping_mul_u64(k);
        let rhs = x.wrapping_mul_u64(k).wrapping_add(&y.wrapping_mul_u64(k));
        prop_assert_eq!(lhs.to_biguint(), rhs.to_biguint());
    }

    #[test]
    fn unit_circle_lands_on_the_circle(v in any::<u64>(), bits in 53u32..=256) {
        let x = FracFixed::from_biguint(&BigUint::from(v), bits);
        let (c, s) = x.unit_circle();
        prop_assert!((c * c + s * s - 1.0).abs() < 1e-12);
    }
}

fn arb_exact_real() -> impl Strategy<Value = ExactReal> {
    prop_oneof![
        (-50i64..50, 1i64..100).prop_map(|(p, q)| ExactReal::rational(p, q).unwrap()),
        (2u32..=4, 2i64..50).prop_map(|(k, rad)| {
            ExactReal::root(k, BigRational::from_integer(rad.into())).unwrap()
        }),
        (-5i64..=5).prop_map(ExactReal::integer),
    ]
}

fn arb_poly() -> impl Strategy<Value = RealPolynomial> {
    (
        proptest::collection::vec(arb_exact_real(), 0..7),
        arb_exact_real().prop_filter("leading nonzero", |c| !c.is_zero()),
        prop_oneof![Just(128u32), Just(192), Just(256)],
    )
        .prop_map(|(mut coeffs, lead, bits)| {
            coeffs.push(lead);
            RealPolynomial::new(coeffs, bits).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stream_is_bitwise_horner(f in arb_poly(), ell in 1u64..100, n0 in 0u64..(1 << 48)) {
        let count = 300u64;
        for (i, v) in f.difference_stream(ell, n0, count).enumerate() {
            let direct = f.frac_eval(ell, n0 + i as u64);
            prop_assert_eq!(v.to_biguint(), direct.to_biguint(), "index {}", i);
        }
    }

    #[test]
    fn negated_polynomial_gives_additive_inverse(f in arb_poly(), n in 0u64..(1 << 40)) {
        let g = f.negated();
        let sum = f.frac_eval(1, n).wrapping_add(&g.frac_eval(1, n));
        // f + (−f) quantizes coefficients independently, so the sum of the
        // two images is 0 exactly (round-half-up of x and −x are negatives
        // mod 1 except at ties, where both round up — allow one ulp per
        // coefficient).
        let as_int = BigInt::from(sum.to_biguint());
        let modulus = BigInt::one() << f.bits();
        let dist = (&as_int).min(&(&modulus - &as_int)).clone();
        prop_assert!(dist <= BigInt::from(f.degree() * 2), "distance {dist}");
    }
}

#[test]
fn ell_scaling_matches_coefficient_scaling() {
    // Evaluating at multiplier ℓ equals evaluating the polynomial whose
    // quantized coefficients were scaled by ℓ in the ring — the identity
    // the engine's phase cache relies on.
    let f = RealPolynomial::new(
        vec![
            ExactReal::rational(3, 7).unwrap(),
            ExactReal::parse("root:2:5").unwrap(),
            ExactReal::rational(-9, 11).unwrap(),
        ],
        128,
    )
    .unwrap();
    for ell in [1u64, 2, 3, 17, 12345] {
        for n in [0u64, 1, 2, 77, 100_000] {
            let direct = f.frac_eval(ell, n);
            let via_one = {
                // Σ (c_j ℓ) n^j mod 2^B computed with BigUint arithmetic.
                let modulus = BigUint::one() << 128;
                let mut acc = BigUint::zero();
                for (j, c) in f.quantized_coeffs().iter().enumerate() {
                    let term = c.to_biguint() * ell
                        * BigUint::from(n).pow(j as u32 + 1);
                    acc = (acc + term) % &modulus;
                }
                acc
            };
            assert_eq!(direct.to_biguint(), via_one, "ℓ = {ell}, n = {n}");
        }
    }
}
