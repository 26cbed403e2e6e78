//! In-place multiplication and division of dense coefficient buffers by
//! binomial factors `(1 - c q^k)` with `k >= 1`.
//!
//! Buffers hold coefficients of `q^0 .. q^(len-1)`; everything past the end is
//! truncated. Division is exact because `(1 - c q^k)` is a unit power series.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// `buf <- buf * (1 - c q^k)`.
pub(crate) fn mul_binomial(buf: &mut [BigInt], c: &BigInt, k: usize) {
    debug_assert!(k >= 1);
    if c.is_zero() || k >= buf.len() {
        return;
    }
    let minus_one = -BigInt::one();
    for i in (k..buf.len()).rev() {
        let (lo, hi) = buf.split_at_mut(i);
        let src = &lo[i - k];
        if src.is_zero() {
            continue;
        }
        if c.is_one() {
            hi[0] -= src;
        } else if *c == minus_one {
            hi[0] += src;
        } else {
            hi[0] -= src * c;
        }
    }
}

/// `buf <- buf / (1 - c q^k)`.
pub(crate) fn div_binomial(buf: &mut [BigInt], c: &BigInt, k: usize) {
    debug_assert!(k >= 1);
    if c.is_zero() || k >= buf.len() {
        return;
    }
    let minus_one = -BigInt::one();
    for i in k..buf.len() {
        let (lo, hi) = buf.split_at_mut(i);
        let src = &lo[i - k];
        if src.is_zero() {
            continue;
        }
        if c.is_one() {
            hi[0] += src;
        } else if *c == minus_one {
            hi[0] -= src;
        } else {
            hi[0] += src * c;
        }
    }
}

/// `buf <- buf * (1 - c q^k)^e` for any integer `e`.
pub(crate) fn apply_binomial_power(buf: &mut [BigInt], c: &BigInt, k: usize, e: i64) {
    if e >= 0 {
        for _ in 0..e {
            mul_binomial(buf, c, k);
        }
    } else {
        for _ in 0..(-e) {
            div_binomial(buf, c, k);
        }
    }
}

/// Dense product of two buffers, truncated to `len` coefficients.
pub(crate) fn mul_dense(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if y.is_zero() {
                continue;
            }
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn mul_then_div_is_identity() {
        let orig = ints(&[1, 3, -2, 0, 5, 7, 1, 1]);
        let mut buf = orig.clone();
        let c = BigInt::from(-2);
        mul_binomial(&mut buf, &c, 3);
        assert_ne!(buf, orig);
        div_binomial(&mut buf, &c, 3);
        assert_eq!(buf, orig);
    }

    #[test]
    fn geometric_series() {
        let mut buf = ints(&[1, 0, 0, 0, 0, 0]);
        div_binomial(&mut buf, &BigInt::one(), 2);
        assert_eq!(buf, ints(&[1, 0, 1, 0, 1, 0]));
    }
}
