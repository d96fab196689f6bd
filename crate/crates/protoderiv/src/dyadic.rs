//! Exact binary-exponent arithmetic on `f64`.
//!
//! The bump family and the scale grids in this crate live on powers of two.
//! These helpers construct powers of two exactly, read off binary exponents
//! without going through `log2` (which is not guaranteed correctly rounded),
//! and measure distances between floats in units of representable steps.

/// Exact `2^e` for `e` in `-1074..=1023`.
///
/// Built from the bit pattern, so the result is exact down to the smallest
/// subnormal; `powi`-style repeated multiplication is avoided.
///
/// # Panics
///
/// Panics if `e` is outside the representable exponent range.
pub fn pow2(e: i32) -> f64 {
    assert!(
        (-1074..=1023).contains(&e),
        "2^{e} is not representable as f64"
    );
    if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else {
        // Subnormal range: value is mantissa * 2^-1074 with a single set bit.
        f64::from_bits(1u64 << (e + 1074))
    }
}

/// Largest `e` with `2^e <= t`, i.e. `floor(log2 t)`, exact for every
/// positive finite `t` including subnormals.
///
/// # Panics
///
/// Panics unless `t` is finite and strictly positive.
pub fn floor_log2(t: f64) -> i32 {
    assert!(t > 0.0 && t.is_finite(), "floor_log2 needs 0 < t < inf");
    let bits = t.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    if biased != 0 {
        biased - 1023
    } else {
        let mantissa = bits & ((1u64 << 52) - 1);
        63 - mantissa.leading_zeros() as i32 - 1074
    }
}

/// Number of representable steps between `a` and `b`: 0 iff they are equal
/// (`-0.0` and `0.0` count as equal), 1 for adjacent floats, and so on.
/// Both arguments must be finite.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    assert!(a.is_finite() && b.is_finite(), "ulp_distance needs finite args");
    // Map the sign-magnitude bit patterns onto a single monotone integer line.
    fn key(x: f64) -> i64 {
        let b = x.to_bits() as i64;
        if b < 0 {
            i64::MIN.wrapping_sub(b)
        } else {
            b
        }
    }
    key(a).abs_diff(key(b))
}
