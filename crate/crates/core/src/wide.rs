//! Fixed-width wrapping integer arithmetic on little-endian `[u64; 4]` limbs.
//!
//! Values are residues mod 2^B for a configurable width 1 ≤ B ≤ 256; bits at
//! and above B are kept zero. Wrapping addition, subtraction and
//! multiplication by a `u64` are the only operations the fixed-point layer
//! needs: they realize exact arithmetic mod 1 on B-bit binary fractions.

pub const MAX_LIMBS: usize = 4;
pub const MAX_BITS: u32 = (MAX_LIMBS as u32) * 64;

pub type Limbs = [u64; MAX_LIMBS];

/// Number of limbs touched by a width of `bits`.
#[inline]
pub fn limbs_for_bits(bits: u32) -> usize {
    debug_assert!(bits > 0 && bits <= MAX_BITS);
    ((bits + 63) / 64) as usize
}

/// Zero out everything at and above bit `bits`.
#[inline]
pub fn mask_to_bits(a: &mut Limbs, bits: u32) {
    let n = limbs_for_bits(bits);
    let rem = bits % 64;
    if rem != 0 {
        a[n - 1] &= (1u64 << rem) - 1;
    }
    for limb in a.iter_mut().skip(n) {
        *limb = 0;
    }
}

/// `a + b mod 2^bits`.
#[inline]
pub fn add_mod(a: &Limbs, b: &Limbs, bits: u32) -> Limbs {
    let n = limbs_for_bits(bits);
    let mut out = [0u64; MAX_LIMBS];
    let mut carry = false;
    for i in 0..n {
        let (s1, c1) = a[i].overflowing_add(b[i]);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        out[i] = s2;
        carry = c1 | c2;
    }
    mask_to_bits(&mut out, bits);
    out
}

/// `a - b mod 2^bits`.
#[inline]
pub fn sub_mod(a: &Limbs, b: &Limbs, bits: u32) -> Limbs {
    let n = limbs_for_bits(bits);
    let mut out = [0u64; MAX_LIMBS];
    let mut borrow = false;
    for i in 0..n {
        let (d1, b1) = a[i].overflowing_sub(b[i]);
        let (d2, b2) = d1.overflowing_sub(borrow as u64);
        out[i] = d2;
        borrow = b1 | b2;
    }
    mask_to_bits(&mut out, bits);
    out
}

/// `a * k mod 2^bits` for a single-limb factor.
#[inline]
pub fn mul_u64_mod(a: &Limbs, k: u64, bits: u32) -> Limbs {
    let n = limbs_for_bits(bits);
    let mut out = [0u64; MAX_LIMBS];
    let mut carry: u64 = 0;
    for i in 0..n {
        let prod = (a[i] as u128) * (k as u128) + carry as u128;
        out[i] = prod as u64;
        carry = (prod >> 64) as u64;
    }
    mask_to_bits(&mut out, bits);
    out
}

/// `-a mod 2^bits` (two's complement within the active width).
#[inline]
pub fn neg_mod(a: &Limbs, bits: u32) -> Limbs {
    sub_mod(&[0; MAX_LIMBS], a, bits)
}

/// The fraction `a / 2^bits` scaled to 53 bits: `floor(a · 2^(53-bits))` for
/// narrow widths, `a >> (bits - 53)` otherwise. This is the mantissa used to
/// place the value on the unit circle in double precision.
#[inline]
pub fn top53(a: &Limbs, bits: u32) -> u64 {
    if bits <= 53 {
        return a[0] << (53 - bits);
    }
    let shift = bits - 53;
    let limb = (shift / 64) as usize;
    let off = shift % 64;
    let lo = a[limb] >> off;
    if off == 0 {
        lo & ((1u64 << 53) - 1)
    } else {
        let hi = if limb + 1 < MAX_LIMBS { a[limb + 1] } else { 0 };
        (lo | (hi << (64 - off))) & ((1u64 << 53) - 1)
    }
}

/// True if every active limb is zero.
#[inline]
pub fn is_zero(a: &Limbs, bits: u32) -> bool {
    let n = limbs_for_bits(bits);
    a[..n].iter().all(|&w| w == 0)
}
