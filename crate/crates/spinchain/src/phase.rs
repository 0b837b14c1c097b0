//! Extended-precision phase reduction.
//!
//! Fidelity at very large times needs `lambda * t mod 2*pi` to much better
//! than f64 argument reduction can deliver. Every f64 is an exact dyadic
//! rational `m * 2^e`, so products with other f64s or with big integers can
//! be reduced exactly; only the final division by `2*pi` needs a finite-
//! precision `pi`, computed here to whatever width the inputs demand.
//!
//! The working precision defaults to 256 bits and can be overridden with the
//! `SPINCHAIN_PRECISION_BITS` environment variable (read once per process).

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// Above this magnitude of `lambda * t`, plain f64 reduction has lost too
/// many bits and the exact dyadic path takes over.
pub(crate) const EXTENDED_REDUCTION_THRESHOLD: f64 = 1e6;

const DEFAULT_PRECISION_BITS: u64 = 256;

/// Working precision in bits for the `2*pi` division (env-overridable).
pub(crate) fn precision_bits() -> u64 {
    static BITS: OnceLock<u64> = OnceLock::new();
    *BITS.get_or_init(|| {
        std::env::var("SPINCHAIN_PRECISION_BITS")
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
            .map(|b| b.clamp(64, 1 << 20))
            .unwrap_or(DEFAULT_PRECISION_BITS)
    })
}

/// Exact dyadic decomposition of a finite f64: returns `(m, e)` with
/// `x == m * 2^e` exactly.
fn dyadic(x: f64) -> (i64, i64) {
    assert!(x.is_finite(), "dyadic decomposition of non-finite value");
    let bits = x.to_bits();
    let neg = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (mant, exp) = if biased == 0 {
        (frac, -1074) // subnormal
    } else {
        (frac | (1 << 52), biased - 1075)
    };
    (if neg { -mant } else { mant }, exp)
}

/// `w * 2^shift` as f64 for non-negative `w`, correct to ~1 ulp even when
/// `w` itself far exceeds f64 range.
fn shifted_to_f64(w: &BigUint, shift: i64) -> f64 {
    if w.is_zero() {
        return 0.0;
    }
    let bits = w.bits() as i64;
    let (top, extra) = if bits <= 53 {
        (w.to_u64().expect("fits"), 0)
    } else {
        ((w >> ((bits - 53) as u64)).to_u64().expect("53 bits"), bits - 53)
    };
    let e = shift + extra;
    if e < -1200 {
        return 0.0;
    }
    // Split the scaling so each factor stays in range.
    let half = (e / 2) as i32;
    (top as f64) * 2f64.powi(half) * 2f64.powi((e - half as i64) as i32)
}

/// `(lambda * k) mod 2` in `[0, 2)`, exact up to the final f64 rounding.
/// This is the phase of `exp(-i lambda k pi)` in units of `pi`.
pub(crate) fn mod_two_at_integer_multiple(lambda: f64, k: &BigUint) -> f64 {
    let (m, e) = dyadic(lambda);
    if m == 0 || k.is_zero() {
        return 0.0;
    }
    let z = BigInt::from(m) * BigInt::from(k.clone());
    if e >= 1 {
        return 0.0; // even integer multiple
    }
    // r = z * 2^e mod 2 = (z mod 2^{1-e}) * 2^e, taken non-negative.
    let shift = (1 - e) as u64;
    let modulus = BigInt::from(1u8) << shift;
    let w = z.mod_floor(&modulus).to_biguint().expect("mod_floor is non-negative");
    shifted_to_f64(&w, e)
}

/// `|x| mod 2*pi` for the exact product `x = lambda * t`, returned in
/// `[0, 2*pi)` with the sign of `x` folded in (negative products reduce to
/// `2*pi - r`). Used when `|lambda * t|` exceeds the reduction threshold.
pub(crate) fn product_mod_two_pi(lambda: f64, t: f64) -> f64 {
    let (m1, e1) = dyadic(lambda);
    let (m2, e2) = dyadic(t);
    let z = BigInt::from(m1) * BigInt::from(m2);
    if z.is_zero() {
        return 0.0;
    }
    let negative = z.is_negative();
    let mag = z.magnitude().clone();
    let e = e1 + e2;

    let prec = precision_bits();
    // Precision must cover the integer part of x/(2*pi) as well.
    let int_bits = (mag.bits() as i64 + e).max(0) as u64;
    let work = prec + int_bits + 64;

    let two_pi = pi_fixed(work) << 1u8; // 2*pi * 2^work
    // x * 2^work as an integer (truncating bits below 2^-work).
    let total_shift = e + work as i64;
    let x_fp = if total_shift >= 0 { &mag << (total_shift as u64) } else { &mag >> ((-total_shift) as u64) };

    let rem = x_fp.mod_floor(&two_pi);
    let r = shifted_to_f64(&rem, -(work as i64));
    if negative && r != 0.0 {
        (2.0 * std::f64::consts::PI - r).rem_euclid(2.0 * std::f64::consts::PI)
    } else {
        r
    }
}

/// `pi * 2^bits`, truncated. Computed by a Machin arctangent series in fixed
/// point with guard bits; cached per requested width.
fn pi_fixed(bits: u64) -> BigUint {
    static CACHE: OnceLock<Mutex<HashMap<u64, BigUint>>> = OnceLock::new();
    // Bucket widths to multiples of 512 so sweeps reuse one computation.
    let bucket = bits.div_ceil(512) * 512;
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let stored = {
        let map = cache.lock().expect("pi cache poisoned");
        map.get(&bucket).cloned()
    };
    let value = match stored {
        Some(v) => v,
        None => {
            let guard = bucket + 32;
            // pi = 16 atan(1/5) - 4 atan(1/239)
            let v = (atan_inv_fixed(5, guard) << 4u8) - (atan_inv_fixed(239, guard) << 2u8);
            let v = v >> 32u8;
            cache.lock().expect("pi cache poisoned").insert(bucket, v.clone());
            v
        }
    };
    value >> (bucket - bits)
}

/// `atan(1/x) * 2^bits`, truncated (alternating Gregory series).
fn atan_inv_fixed(x: u64, bits: u64) -> BigUint {
    let one = BigUint::from(1u8) << bits;
    let x2 = BigUint::from(x * x);
    let mut denom_pow = BigUint::from(x);
    let mut acc = BigInt::zero();
    let mut j: u64 = 0;
    loop {
        let term = &one / (&denom_pow * BigUint::from(2 * j + 1));
        if term.is_zero() {
            break;
        }
        if j % 2 == 0 {
            acc += BigInt::from(term);
        } else {
            acc -= BigInt::from(term);
        }
        denom_pow *= &x2;
        j += 1;
    }
    acc.to_biguint().expect("atan(1/x) is positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn test_pi_fixed_matches_f64() {
        let p = pi_fixed(80);
        let approx = shifted_to_f64(&p, -80);
        assert!((approx - PI).abs() < 1e-15, "{approx} vs {PI}");
    }

    #[test]
    fn test_pi_fixed_known_low_bits() {
        // pi * 2^16 = 205887.41..., truncates to 205887.
        assert_eq!(pi_fixed(16), BigUint::from(205887u32));
    }

    #[test]
    fn test_mod_two_even_integers_vanish() {
        for lam in [-12.0, -6.0, -2.0, 0.0, 4.0, 1024.0] {
            for k in [1u64, 3, 14789, 1_000_000_007] {
                let r = mod_two_at_integer_multiple(lam, &BigUint::from(k));
                assert_eq!(r, 0.0, "lambda={lam} k={k}");
            }
        }
    }

    #[test]
    fn test_mod_two_odd_and_fractional() {
        // (-3) * 5 = -15, mod 2 = 1.
        assert_eq!(mod_two_at_integer_multiple(-3.0, &BigUint::from(5u8)), 1.0);
        // (-6.5) * 3 = -19.5, mod 2 = 0.5.
        assert_eq!(mod_two_at_integer_multiple(-6.5, &BigUint::from(3u8)), 0.5);
        // 0.25 * 1 = 0.25.
        assert_eq!(mod_two_at_integer_multiple(0.25, &BigUint::from(1u8)), 0.25);
    }

    #[test]
    fn test_mod_two_huge_multiplier_stays_exact() {
        // lambda = 2 + 2^-40, k = 3 * 2^39: k * lambda mod 2 = 3/2 exactly.
        let lam = 2.0 + 2f64.powi(-40);
        let k = BigUint::from(3u128 << 39);
        assert_eq!(mod_two_at_integer_multiple(lam, &k), 1.5);
    }

    #[test]
    fn test_product_mod_two_pi_agrees_with_naive_at_moderate_size() {
        for (lam, t) in [(3.5, 100.0), (-7.25, 981.0), (13.0, 0.125), (-1.0, 5.0)] {
            let exact = product_mod_two_pi(lam, t);
            let naive = (lam * t).rem_euclid(2.0 * PI);
            assert!((exact - naive).abs() < 1e-9, "lam={lam} t={t}: {exact} vs {naive}");
        }
    }

    #[test]
    fn test_product_mod_two_pi_huge_argument() {
        // lambda * t = 2^60 exactly; reduce against high-precision pi.
        let r = product_mod_two_pi(2f64.powi(30), 2f64.powi(30));
        // Reference value of 2^60 mod 2*pi computed with 40-digit arithmetic.
        let expected = 4.121_865_314_039_859_4;
        assert!((r - expected).abs() < 1e-9, "{r} vs {expected}");
    }
}
