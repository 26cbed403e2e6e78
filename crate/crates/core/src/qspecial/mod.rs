//! Builders for q-Pochhammer symbols, Gaussian polynomials, the Jacobi
//! triple product and the `T0`/`T1`/`U` polynomial family.

mod tpoly;

pub use tpoly::{t_poly, TPoly, TTable};

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::One;
use parking_lot::Mutex;
use thiserror::Error;

use crate::series::{FactorError, Factored, Poly, QSeries};
use crate::Monomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSpecialError {
    #[error("base exponent must be positive, got {0}")]
    BadBase(i64),
    #[error("a factor of the product vanishes identically")]
    VanishingFactor,
    #[error("non-integral expansion: {0}")]
    NonIntegral(String),
    #[error("monomial arithmetic overflow")]
    Overflow,
}

impl From<FactorError> for QSpecialError {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::VanishingDenominator => QSpecialError::VanishingFactor,
            FactorError::NonIntegral(s) => QSpecialError::NonIntegral(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PochLength {
    Finite(u64),
    Infinite,
}

/// `(a; q^base_exp)_length`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PochSpec {
    pub a: Monomial,
    pub base_exp: i64,
    pub length: PochLength,
}

impl PochSpec {
    pub fn finite(a: Monomial, base_exp: i64, n: u64) -> Self {
        PochSpec {
            a,
            base_exp,
            length: PochLength::Finite(n),
        }
    }

    pub fn infinite(a: Monomial, base_exp: i64) -> Self {
        PochSpec {
            a,
            base_exp,
            length: PochLength::Infinite,
        }
    }

    /// The product in factored form, raised to `power`.
    pub fn factored(&self, power: i64) -> Result<Factored, QSpecialError> {
        if self.base_exp < 1 {
            return Err(QSpecialError::BadBase(self.base_exp));
        }
        let mut f = Factored::one();
        match self.length {
            PochLength::Finite(n) => {
                for k in 0..n as i64 {
                    let m = self
                        .a
                        .mul(Monomial::q(self.base_exp * k))
                        .map_err(|_| QSpecialError::Overflow)?;
                    f.mul_factor(m, power);
                }
            }
            PochLength::Infinite => f.mul_infinite(self.a, self.base_exp, power),
        }
        Ok(f)
    }
}

/// Expands `(a; q^t)_n` or `(a; q^t)_inf` through `q^order`.
///
/// A product containing the factor `(1 - 1)` is rejected, since callers use
/// it to detect invalid specializations.
pub fn poch(spec: &PochSpec, order: i64) -> Result<QSeries, QSpecialError> {
    let f = spec.factored(1)?;
    if f.is_zero() {
        return Err(QSpecialError::VanishingFactor);
    }
    Ok(f.expand(order)?)
}

/// `(a_1, ..., a_k; q^t)_length`.
pub fn poch_multi(args: &[Monomial], base_exp: i64, length: PochLength, order: i64) -> Result<QSeries, QSpecialError> {
    let mut f = Factored::one();
    for &a in args {
        f.mul(&PochSpec { a, base_exp, length }.factored(1)?);
    }
    if f.is_zero() {
        return Err(QSpecialError::VanishingFactor);
    }
    Ok(f.expand(order)?)
}

type BinomKey = (u64, u64);

fn binomial_cache() -> &'static Mutex<HashMap<BinomKey, Arc<Poly>>> {
    static CACHE: OnceLock<Mutex<HashMap<BinomKey, Arc<Poly>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The Gaussian polynomial `[n m]` in base `q^base_exp`; zero unless
/// `0 <= m <= n`.
pub fn q_binomial(n: i64, m: i64, base_exp: usize) -> Poly {
    assert!(base_exp >= 1, "base exponent must be positive");
    if n < 0 || m < 0 || m > n {
        return Poly::zero();
    }
    gaussian(n as u64, m as u64).dilate(base_exp)
}

/// `[n m]_q` as the exact quotient `(q^{n-m+1};q)_m / (q;q)_m`.
pub(crate) fn gaussian(n: u64, m: u64) -> Arc<Poly> {
    let m = m.min(n - m);
    if let Some(p) = binomial_cache().lock().get(&(n, m)) {
        return p.clone();
    }
    let one = BigInt::one();
    let mut num = Poly::one();
    for i in 1..=m {
        num.mul_binomial(&one, (n - m + i) as usize);
    }
    for i in 1..=m {
        num = num
            .div_binomial_exact(&one, i as usize)
            .unwrap_or_else(|| panic!("q-binomial [{n} {m}]: inexact division by 1 - q^{i}"));
    }
    let p = Arc::new(num);
    binomial_cache().lock().insert((n, m), p.clone());
    p
}

/// Bilateral side of the Jacobi triple product in base `q^b`:
/// `sum_n (-1)^n q^{b n(n-1)/2} t^n` through `q^order`.
pub fn triple_product(t: Monomial, base_exp: i64, order: i64) -> Result<QSeries, QSpecialError> {
    if base_exp < 1 {
        return Err(QSpecialError::BadBase(base_exp));
    }
    let exp = |n: i64| base_exp * n * (n - 1) / 2 + t.exp() * n;
    let mut acc: HashMap<i64, BigInt> = HashMap::new();
    for dir in [1i64, -1] {
        let mut n = if dir == 1 { 0 } else { -1 };
        loop {
            let e = exp(n);
            if e > order && exp(n + dir) >= e {
                break;
            }
            if e <= order {
                let c = coeff_power(t.coeff(), n)?;
                let c = if n % 2 == 0 { c } else { -c };
                *acc.entry(e).or_default() += c;
            }
            n += dir;
        }
    }
    Ok(sparse_to_series(acc, order))
}

/// Product side `(t, q^b/t, q^b; q^b)_inf` of the triple product.
pub fn triple_product_side(t: Monomial, base_exp: i64, order: i64) -> Result<QSeries, QSpecialError> {
    let qb = Monomial::q(base_exp);
    let inv = qb
        .div(t)
        .map_err(|_| QSpecialError::NonIntegral(format!("q^{base_exp}/({t})")))?;
    let mut f = Factored::one();
    for a in [t, inv, qb] {
        f.mul(&PochSpec::infinite(a, base_exp).factored(1)?);
    }
    Ok(f.expand(order)?)
}

fn coeff_power(c: i64, n: i64) -> Result<BigInt, QSpecialError> {
    if n >= 0 {
        Ok(num_traits::pow(BigInt::from(c), n as usize))
    } else if c.abs() == 1 {
        Ok(BigInt::from(if n % 2 == 0 { 1 } else { c }))
    } else {
        Err(QSpecialError::NonIntegral(format!("({c})^{n}")))
    }
}

pub(crate) fn sparse_to_series(acc: HashMap<i64, BigInt>, order: i64) -> QSeries {
    let Some(&lo) = acc.keys().min() else {
        return QSeries::zero(order);
    };
    let mut dense = vec![BigInt::default(); (order - lo + 1).max(0) as usize];
    for (e, c) in acc {
        if e <= order {
            dense[(e - lo) as usize] += c;
        }
    }
    QSeries::from_coeffs(lo, dense, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(e: i64) -> Monomial {
        Monomial::q(e)
    }

    #[test]
    fn finite_and_empty_products() {
        let p = poch(&PochSpec::finite(q(1), 1, 2), 10).unwrap();
        assert_eq!(p, QSeries::from_i64s(0, &[1, -1, -1, 1], 10));
        let e = poch(&PochSpec::finite(Monomial::new(7, 3).unwrap(), 1, 0), 10).unwrap();
        assert_eq!(e, QSeries::one(10));
    }

    #[test]
    fn infinite_product_with_gaps() {
        // (1-q)(1-q^6)(1-q^11) through q^12
        let p = poch(&PochSpec::infinite(q(1), 5), 12).unwrap();
        let mut want = vec![0i64; 13];
        for (e, c) in [(0, 1), (1, -1), (6, -1), (7, 1), (11, -1), (12, 1)] {
            want[e] = c;
        }
        assert_eq!(p, QSeries::from_i64s(0, &want, 12));
    }

    #[test]
    fn vanishing_factor_is_an_error() {
        assert_eq!(
            poch(&PochSpec::finite(q(-2), 1, 3), 10),
            Err(QSpecialError::VanishingFactor)
        );
        assert_eq!(
            poch(&PochSpec::infinite(q(0), 1), 10),
            Err(QSpecialError::VanishingFactor)
        );
        assert!(poch(&PochSpec::finite(q(-2), 1, 2), 10).is_ok());
        assert_eq!(poch(&PochSpec::finite(q(1), 0, 2), 10), Err(QSpecialError::BadBase(0)));
    }

    #[test]
    fn gaussian_polynomials() {
        assert_eq!(q_binomial(4, 2, 1), Poly::from_i64s(&[1, 1, 2, 1, 1]));
        assert_eq!(q_binomial(9, 0, 1), Poly::one());
        assert_eq!(q_binomial(3, 5, 1), Poly::zero());
        assert_eq!(q_binomial(3, -1, 1), Poly::zero());
        assert_eq!(q_binomial(2, 1, 2), Poly::from_i64s(&[1, 0, 1]));
    }

    #[test]
    fn gaussian_pascal_rule() {
        for n in 1..=14 {
            for k in 1..n {
                let lhs = q_binomial(n, k, 1);
                let rhs = q_binomial(n - 1, k - 1, 1).add(&q_binomial(n - 1, k, 1).shift(k as usize));
                assert_eq!(lhs, rhs, "[{n} {k}]");
            }
        }
    }

    #[test]
    fn triple_product_vanishes_at_t_equals_q() {
        assert!(triple_product(q(1), 1, 40).unwrap().is_zero());
    }

    #[test]
    fn triple_product_at_minus_one() {
        // 2 (-q;q)^2 (q;q) = 2 sum_{n>=0} q^{n(n+1)/2}
        let s = triple_product(Monomial::neg_q(0), 1, 40).unwrap();
        let mut want = vec![0i64; 41];
        let mut n = 0;
        while n * (n + 1) / 2 <= 40 {
            want[n * (n + 1) / 2] = 2;
            n += 1;
        }
        assert_eq!(s, QSeries::from_i64s(0, &want, 40));
    }

    #[test]
    fn triple_product_sum_equals_product() {
        for (t, b) in [(Monomial::neg_q(3), 10), (q(2), 5), (Monomial::neg_q(-1), 2)] {
            let sum = triple_product(t, b, 60).unwrap();
            let prod = triple_product_side(t, b, 60).unwrap();
            assert_eq!(sum, prod, "t = {t}, base q^{b}");
        }
    }
}
