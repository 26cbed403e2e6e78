//! Products of binomial factors kept in factored form until expansion.
//!
//! Every factor `(1 - c q^e)` is normalized on entry: `e > 0` stays a unit
//! binomial, `e == 0` becomes the scalar `1 - c` (or a recorded zero), and
//! `e < 0` is rewritten as `-c q^e (1 - c^{-1} q^{-e})`. Expansion therefore
//! only ever multiplies or divides a unit power series.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{kernel, QSeries};
use crate::Monomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("a denominator factor vanishes identically")]
    VanishingDenominator,
    #[error("non-integral coefficient {0}")]
    NonIntegral(String),
}

/// `scalar * q^shift * prod (1 - c q^k)^mult * prod_tails`, all `k >= 1`.
#[derive(Debug, Clone)]
pub struct Factored {
    scalar: BigRational,
    shift: i64,
    num_zeros: u32,
    den_zeros: u32,
    non_integral: bool,
    factors: BTreeMap<(i64, i64), i64>,
    tails: Vec<Tail>,
}

/// `prod_{i>=0} (1 - c q^{start + step*i})^power` with `start >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Tail {
    c: i64,
    start: i64,
    step: i64,
    power: i64,
}

impl Default for Factored {
    fn default() -> Self {
        Self::one()
    }
}

impl Factored {
    pub fn one() -> Self {
        Factored {
            scalar: BigRational::one(),
            shift: 0,
            num_zeros: 0,
            den_zeros: 0,
            non_integral: false,
            factors: BTreeMap::new(),
            tails: Vec::new(),
        }
    }

    /// True if the product is identically zero (and no denominator vanishes).
    pub fn is_zero(&self) -> bool {
        self.num_zeros > 0 && self.den_zeros == 0
    }

    pub fn is_invalid(&self) -> bool {
        self.den_zeros > 0
    }

    /// Exact lowest exponent of a nonzero, valid product.
    pub fn valuation(&self) -> Option<i64> {
        (self.num_zeros == 0 && self.den_zeros == 0).then_some(self.shift)
    }

    pub fn scalar(&self) -> &BigRational {
        &self.scalar
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn mul_scalar(&mut self, c: &BigRational) {
        self.scalar *= c;
    }

    pub fn mul_q_power(&mut self, e: i64) {
        self.shift += e;
    }

    pub fn mark_non_integral(&mut self) {
        self.non_integral = true;
    }

    pub fn is_non_integral(&self) -> bool {
        self.non_integral
    }

    pub fn has_zero_numerator(&self) -> bool {
        self.num_zeros > 0
    }

    pub fn has_zero_denominator(&self) -> bool {
        self.den_zeros > 0
    }

    /// The unit binomials `(c, k) -> multiplicity`, excluding lazy tails.
    pub(crate) fn unit_factors(&self) -> &BTreeMap<(i64, i64), i64> {
        &self.factors
    }

    /// Multiplies by `m^power`.
    pub fn mul_monomial(&mut self, m: Monomial, power: i64) {
        self.shift += m.exp() * power;
        let c = BigRational::from_integer(BigInt::from(m.coeff()));
        self.scalar *= pow_rational(&c, power);
    }

    /// Multiplies by `(1 - m)^power`.
    pub fn mul_factor(&mut self, m: Monomial, power: i64) {
        if power == 0 {
            return;
        }
        let (c, e) = (m.coeff(), m.exp());
        match e.cmp(&0) {
            std::cmp::Ordering::Greater => {
                let slot = self.factors.entry((c, e)).or_insert(0);
                *slot += power;
                if *slot == 0 {
                    self.factors.remove(&(c, e));
                }
            }
            std::cmp::Ordering::Equal => {
                if c == 1 {
                    if power > 0 {
                        self.num_zeros += power as u32;
                    } else {
                        self.den_zeros += (-power) as u32;
                    }
                } else {
                    let v = BigRational::from_integer(BigInt::from(1 - c));
                    self.scalar *= pow_rational(&v, power);
                }
            }
            std::cmp::Ordering::Less => {
                // 1 - c q^e = (-c) q^e (1 - (1/c) q^{-e})
                let lead = BigRational::from_integer(BigInt::from(-c));
                self.scalar *= pow_rational(&lead, power);
                self.shift += e * power;
                if c.abs() == 1 {
                    let slot = self.factors.entry((c, -e)).or_insert(0);
                    *slot += power;
                    if *slot == 0 {
                        self.factors.remove(&(c, -e));
                    }
                } else {
                    // the inner factor would carry a 1/c coefficient
                    self.non_integral = true;
                }
            }
        }
    }

    /// Multiplies by `(m; q^step)_inf ^ power`. Factors with nonpositive
    /// exponent are applied immediately; the rest are kept as a lazy tail.
    pub fn mul_infinite(&mut self, m: Monomial, step: i64, power: i64) {
        assert!(step >= 1);
        if power == 0 {
            return;
        }
        let mut e = m.exp();
        while e <= 0 {
            self.mul_factor(Monomial::new(m.coeff(), e).expect("nonzero"), power);
            e += step;
        }
        self.tails.push(Tail {
            c: m.coeff(),
            start: e,
            step,
            power,
        });
    }

    /// Multiplies two factored products.
    pub fn mul(&mut self, other: &Factored) {
        self.scalar *= &other.scalar;
        self.shift += other.shift;
        self.num_zeros += other.num_zeros;
        self.den_zeros += other.den_zeros;
        self.non_integral |= other.non_integral;
        for (&key, &m) in &other.factors {
            let slot = self.factors.entry(key).or_insert(0);
            *slot += m;
            if *slot == 0 {
                self.factors.remove(&key);
            }
        }
        self.tails.extend(other.tails.iter().cloned());
    }

    /// Expands through `q^order`.
    pub fn expand(&self, order: i64) -> Result<QSeries, FactorError> {
        if self.den_zeros > 0 {
            return Err(FactorError::VanishingDenominator);
        }
        if self.num_zeros > 0 {
            return Ok(QSeries::zero(order));
        }
        if self.non_integral {
            return Err(FactorError::NonIntegral("binomial factor".into()));
        }
        let scalar = integral(&self.scalar)?;
        let m = order - self.shift;
        if m < 0 {
            return Ok(QSeries::zero(order));
        }
        let mut buf = self.unit_part(m as usize + 1);
        if !scalar.is_one() {
            for c in buf.iter_mut() {
                *c *= &scalar;
            }
        }
        Ok(QSeries::from_coeffs(self.shift, buf, order))
    }

    /// The unit power series `prod (1 - c q^k)^mult * tails`, `len` terms.
    pub(crate) fn unit_part(&self, len: usize) -> Vec<BigInt> {
        let mut buf = vec![BigInt::zero(); len];
        buf[0] = BigInt::one();
        for (&(c, k), &mult) in &self.factors {
            if (k as usize) < len {
                kernel::apply_binomial_power(&mut buf, &BigInt::from(c), k as usize, mult);
            }
        }
        for t in &self.tails {
            let c = BigInt::from(t.c);
            let mut k = t.start;
            while (k as usize) < len {
                kernel::apply_binomial_power(&mut buf, &c, k as usize, t.power);
                k += t.step;
            }
        }
        buf
    }
}

pub(crate) fn pow_rational(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

pub(crate) fn integral(x: &BigRational) -> Result<BigInt, FactorError> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(FactorError::NonIntegral(x.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(e: i64) -> Monomial {
        Monomial::q(e)
    }

    #[test]
    fn negative_exponent_factor_is_normalized() {
        // (1 - q^-2) = -q^-2 (1 - q^2)
        let mut f = Factored::one();
        f.mul_factor(q(-2), 1);
        let s = f.expand(3).unwrap();
        assert_eq!(s, QSeries::from_i64s(-2, &[-1, 0, 1], 3));
    }

    #[test]
    fn zero_factors() {
        let mut f = Factored::one();
        f.mul_factor(q(0), 1);
        assert!(f.is_zero());
        assert!(f.expand(5).unwrap().is_zero());
        let mut g = Factored::one();
        g.mul_factor(q(0), -1);
        assert_eq!(g.expand(5), Err(FactorError::VanishingDenominator));
    }

    #[test]
    fn non_unit_inverse_is_non_integral() {
        let mut f = Factored::one();
        f.mul_factor(Monomial::new(2, -1).unwrap(), 1);
        assert!(matches!(f.expand(4), Err(FactorError::NonIntegral(_))));
        let mut g = Factored::one();
        g.mul_factor(Monomial::new(3, 0).unwrap(), -1);
        assert!(matches!(g.expand(4), Err(FactorError::NonIntegral(_))));
    }

    #[test]
    fn infinite_tail_matches_euler() {
        let mut f = Factored::one();
        f.mul_infinite(q(1), 1, 1);
        // pentagonal numbers
        let s = f.expand(12).unwrap();
        assert_eq!(
            s,
            QSeries::from_i64s(0, &[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1], 12)
        );
    }
}
