//! Truncated Laurent series in `q` with arbitrary-precision integer coefficients.
//!
//! A [`QSeries`] stores every coefficient from its lowest nonzero exponent
//! (`lead`) up to and including its truncation order `N`. Coefficients of
//! `q^k` for `k > N` are unknown. The zero series has an empty coefficient
//! vector and `lead == 0`, so structural equality is series equality.

pub(crate) mod biv;
mod factored;
pub(crate) mod kernel;
mod poly;

pub use biv::{BivError, BivSeries};
pub use factored::{FactorError, Factored};
pub use poly::Poly;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Default truncation order used by the engines when none is given.
pub const DEFAULT_ORDER: i64 = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation orders differ ({0} vs {1})")]
    OrderMismatch(i64, i64),
    #[error("leading coefficient {0} is not a unit")]
    NonUnitLead(BigInt),
    #[error("cannot invert the zero series")]
    InvertZero,
    #[error("coefficient of q^{exp} is beyond truncation order {order}")]
    BeyondTruncation { exp: i64, order: i64 },
    #[error("cannot raise truncation order from {from} to {to}")]
    CannotExtend { from: i64, to: i64 },
    #[error("substitution power must be positive, got {0}")]
    BadPower(i64),
}

/// A truncated Laurent series `sum_{k=lead}^{N} c_k q^k + O(q^{N+1})`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    lead: i64,
    coeffs: Vec<BigInt>,
    order: i64,
}

impl QSeries {
    pub fn zero(order: i64) -> Self {
        QSeries {
            lead: 0,
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(BigInt::one(), 0, order)
    }

    pub fn monomial(coeff: impl Into<BigInt>, exp: i64, order: i64) -> Self {
        let c = coeff.into();
        if c.is_zero() || exp > order {
            return Self::zero(order);
        }
        let mut coeffs = vec![BigInt::zero(); (order - exp + 1) as usize];
        coeffs[0] = c;
        QSeries {
            lead: exp,
            coeffs,
            order,
        }
    }

    /// Builds a series from coefficients of `q^start, q^(start+1), ...`.
    /// Entries past `order` are dropped; missing entries up to `order` are zero.
    pub fn from_coeffs(start: i64, coeffs: Vec<BigInt>, order: i64) -> Self {
        let mut s = QSeries {
            lead: start,
            coeffs,
            order,
        };
        s.normalize();
        s
    }

    pub fn from_i64s(start: i64, coeffs: &[i64], order: i64) -> Self {
        Self::from_coeffs(start, coeffs.iter().map(|&c| BigInt::from(c)).collect(), order)
    }

    /// Restores the representation invariants after direct edits.
    fn normalize(&mut self) {
        let first = self.coeffs.iter().position(|c| !c.is_zero());
        match first {
            None => {
                self.coeffs.clear();
                self.lead = 0;
            }
            Some(i) => {
                self.coeffs.drain(..i);
                self.lead += i as i64;
                if self.lead > self.order {
                    self.coeffs.clear();
                    self.lead = 0;
                    return;
                }
                let len = (self.order - self.lead + 1) as usize;
                self.coeffs.resize(len, BigInt::zero());
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient, `None` for zero.
    pub fn lead(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.lead)
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn lead_coeff(&self) -> Option<&BigInt> {
        self.coeffs.first()
    }

    pub fn coefficient(&self, k: i64) -> Result<BigInt, SeriesError> {
        if k > self.order {
            return Err(SeriesError::BeyondTruncation {
                exp: k,
                order: self.order,
            });
        }
        Ok(self.coeff_unchecked(k))
    }

    pub(crate) fn coeff_unchecked(&self, k: i64) -> BigInt {
        if self.is_zero() || k < self.lead || k > self.order {
            BigInt::zero()
        } else {
            self.coeffs[(k - self.lead) as usize].clone()
        }
    }

    /// Iterator over `(exponent, coefficient)` for nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.lead + i as i64, c))
    }

    /// Dense coefficients of `q^from ..= q^order` (zeros where absent).
    pub fn dense_from(&self, from: i64) -> Vec<BigInt> {
        if from > self.order {
            return Vec::new();
        }
        (from..=self.order).map(|k| self.coeff_unchecked(k)).collect()
    }

    /// Drops information above `new_order`. `new_order` may not exceed the
    /// current order.
    pub fn truncate(&self, new_order: i64) -> Result<QSeries, SeriesError> {
        if new_order > self.order {
            return Err(SeriesError::CannotExtend {
                from: self.order,
                to: new_order,
            });
        }
        let mut s = self.clone();
        s.order = new_order;
        if !s.is_zero() {
            if s.lead > new_order {
                return Ok(QSeries::zero(new_order));
            }
            s.coeffs.truncate((new_order - s.lead + 1) as usize);
        }
        Ok(s)
    }

    /// Multiplies by `q^k`; the truncation order moves with it.
    pub fn shift(&self, k: i64) -> QSeries {
        let mut s = self.clone();
        s.order += k;
        if !s.is_zero() {
            s.lead += k;
        }
        s
    }

    pub fn scale(&self, c: &BigInt) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.order);
        }
        QSeries {
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            order: self.order,
        }
    }

    fn check_orders(&self, other: &QSeries) -> Result<(), SeriesError> {
        if self.order != other.order {
            return Err(SeriesError::OrderMismatch(self.order, other.order));
        }
        Ok(())
    }

    pub fn add(&self, other: &QSeries) -> Result<QSeries, SeriesError> {
        self.check_orders(other)?;
        Ok(self.add_aligned(other, false))
    }

    pub fn sub(&self, other: &QSeries) -> Result<QSeries, SeriesError> {
        self.check_orders(other)?;
        Ok(self.add_aligned(other, true))
    }

    fn add_aligned(&self, other: &QSeries, negate: bool) -> QSeries {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        let start = self.lead.min(other.lead);
        let mut out = self.dense_from(start);
        for (i, c) in other.coeffs.iter().enumerate() {
            let idx = (other.lead - start) as usize + i;
            if negate {
                out[idx] -= c;
            } else {
                out[idx] += c;
            }
        }
        QSeries::from_coeffs(start, out, self.order)
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            order: self.order,
        }
    }

    /// Exact product. Both factors must share the order `N`; the result has
    /// order `N + min(0, L)` where `L` is the smaller lead of the two.
    pub fn mul(&self, other: &QSeries) -> Result<QSeries, SeriesError> {
        self.check_orders(other)?;
        let lead_of = |s: &QSeries| if s.is_zero() { 0 } else { s.lead.min(0) };
        let order = self.order + lead_of(self).min(lead_of(other));
        if self.is_zero() || other.is_zero() {
            return Ok(QSeries::zero(order));
        }
        let lead = self.lead + other.lead;
        if lead > order {
            return Ok(QSeries::zero(order));
        }
        let len = (order - lead + 1) as usize;
        let out = kernel::mul_dense(&self.coeffs, &other.coeffs, len);
        Ok(QSeries::from_coeffs(lead, out, order))
    }

    /// Multiplicative inverse. The leading coefficient must be `+1` or `-1`.
    ///
    /// With lead `L` and order `N` the inverse is determined through
    /// `q^(N - 2L)`, and that is the order of the result. For `L == 0` this is
    /// `N` itself.
    pub fn invert(&self) -> Result<QSeries, SeriesError> {
        let Some(a0) = self.coeffs.first() else {
            return Err(SeriesError::InvertZero);
        };
        if !(a0.is_one() || *a0 == -BigInt::one()) {
            return Err(SeriesError::NonUnitLead(a0.clone()));
        }
        let sign_neg = a0.is_negative();
        let out_lead = -self.lead;
        let out_order = self.order - 2 * self.lead;
        let n = (out_order - out_lead + 1).max(0) as usize;
        let mut g = vec![BigInt::zero(); n];
        // Normalized f = f/a0 has constant term 1; solve g = 1 - sum_{j>=1} f_j g_{i-j}.
        for i in 0..n {
            let mut acc = if i == 0 { BigInt::one() } else { BigInt::zero() };
            for j in 1..=i.min(self.coeffs.len() - 1) {
                let fj = &self.coeffs[j];
                if fj.is_zero() || g[i - j].is_zero() {
                    continue;
                }
                if sign_neg {
                    acc += fj * &g[i - j];
                } else {
                    acc -= fj * &g[i - j];
                }
            }
            g[i] = acc;
        }
        if sign_neg {
            for c in g.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        Ok(QSeries::from_coeffs(out_lead, g, out_order))
    }

    /// Replaces `q` by `q^m`. Exponents beyond the truncation order are dropped,
    /// so the order is unchanged.
    pub fn substitute_power(&self, m: i64) -> Result<QSeries, SeriesError> {
        if m < 1 {
            return Err(SeriesError::BadPower(m));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let new_lead = self.lead * m;
        if new_lead > self.order {
            return Ok(QSeries::zero(self.order));
        }
        let mut out = vec![BigInt::zero(); (self.order - new_lead + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = (self.lead + i as i64) * m;
            if e > self.order {
                break;
            }
            out[(e - new_lead) as usize] = c.clone();
        }
        Ok(QSeries::from_coeffs(new_lead, out, self.order))
    }

    /// Replaces `q` by `-q`.
    pub fn negate_q(&self) -> QSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if (self.lead + i as i64).rem_euclid(2) == 1 {
                    -c
                } else {
                    c.clone()
                }
            })
            .collect();
        QSeries {
            lead: self.lead,
            coeffs,
            order: self.order,
        }
    }

    /// First exponent (ascending, up to the smaller order) where two series
    /// differ, with both coefficients.
    /// Product of two series known to different orders. The result carries
    /// the largest order the inputs determine: `min(A + lead(g), B + lead(f))`
    /// for `f` known through `A` and `g` through `B`.
    pub fn mul_mixed(&self, other: &QSeries) -> QSeries {
        let (a, b) = (self, other);
        // a zero series is only known to vanish through its order
        let la = if a.is_zero() { a.order + 1 } else { a.lead };
        let lb = if b.is_zero() { b.order + 1 } else { b.lead };
        let order = (a.order + lb).min(b.order + la);
        if a.is_zero() || b.is_zero() {
            return QSeries::zero(order);
        }
        let lead = a.lead + b.lead;
        if lead > order {
            return QSeries::zero(order);
        }
        let len = (order - lead + 1) as usize;
        let out = kernel::mul_dense(&a.coeffs, &b.coeffs, len);
        QSeries::from_coeffs(lead, out, order)
    }

    pub fn first_mismatch(&self, other: &QSeries) -> Option<(i64, BigInt, BigInt)> {
        let order = self.order.min(other.order);
        let lo = match (self.lead(), other.lead()) {
            (None, None) => return None,
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => a.min(b),
        };
        (lo..=order).find_map(|k| {
            let (a, b) = (self.coeff_unchecked(k), other.coeff_unchecked(k));
            (a != b).then_some((k, a, b))
        })
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries({self})")
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_c = !mag.is_one() || k == 0;
            if show_c {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(start: i64, c: &[i64], n: i64) -> QSeries {
        QSeries::from_i64s(start, c, n)
    }

    #[test]
    fn telescoping_geometric() {
        let n = 20;
        let one_minus_q = s(0, &[1, -1], n);
        let geom = QSeries::from_coeffs(0, vec![BigInt::one(); 21], n);
        assert_eq!(one_minus_q.mul(&geom).unwrap(), QSeries::one(n));
    }

    #[test]
    fn product_of_two_binomials() {
        let n = 10;
        let p = s(0, &[1, -1], n).mul(&s(0, &[1, 0, -1], n)).unwrap();
        assert_eq!(p, s(0, &[1, -1, -1, 1], n));
        assert_eq!(p.coefficient(2).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn zero_annihilates() {
        let f = s(-2, &[3, 1, 4], 15);
        assert!(f.mul(&QSeries::zero(15)).unwrap().is_zero());
    }

    #[test]
    fn mismatched_orders_rejected() {
        assert_eq!(s(0, &[1], 5).mul(&s(0, &[1], 6)), Err(SeriesError::OrderMismatch(5, 6)));
    }

    #[test]
    fn invert_geometric_and_identity() {
        let n = 12;
        let inv = s(0, &[1, -1], n).invert().unwrap();
        assert_eq!(inv, QSeries::from_coeffs(0, vec![BigInt::one(); 13], n));
        assert_eq!(QSeries::one(n).invert().unwrap(), QSeries::one(n));
    }

    #[test]
    fn invert_laurent_multiplies_back_to_one() {
        let n = 12;
        let f = s(1, &[1, -1], n); // q(1-q)
        let g = f.invert().unwrap();
        assert_eq!(g.lead(), Some(-1));
        assert_eq!(g.coefficient(-1).unwrap(), BigInt::one());
        assert_eq!(g.coefficient(5).unwrap(), BigInt::one());
        assert_eq!(g.order(), n - 2);
        let back = f.truncate(n - 2).unwrap().mul(&g).unwrap();
        assert_eq!(back, QSeries::one(n - 3));
    }

    #[test]
    fn invert_rejects_non_unit() {
        assert_eq!(
            s(0, &[2, 1], 5).invert(),
            Err(SeriesError::NonUnitLead(BigInt::from(2)))
        );
    }

    #[test]
    fn substitute_power_examples() {
        let f = s(0, &[1, 1], 10);
        assert_eq!(f.substitute_power(2).unwrap(), s(0, &[1, 0, 1], 10));
        assert_eq!(f.substitute_power(1).unwrap(), f);
        assert!(f.substitute_power(0).is_err());
    }

    #[test]
    fn coefficient_edges() {
        let f = s(3, &[1, 2], 10);
        assert_eq!(f.coefficient(1).unwrap(), BigInt::zero());
        assert!(matches!(f.coefficient(11), Err(SeriesError::BeyondTruncation { .. })));
    }

    #[test]
    fn canonical_zero() {
        let z = s(4, &[0, 0, 0], 10);
        assert!(z.is_zero());
        assert_eq!(z, QSeries::zero(10));
        assert_eq!(s(0, &[1, -1], 5).sub(&s(0, &[1, -1], 5)).unwrap(), QSeries::zero(5));
    }

    #[test]
    fn negate_q_flips_odd() {
        assert_eq!(s(0, &[1, 2, 3], 4).negate_q(), s(0, &[1, -2, 3], 4));
    }

    #[test]
    fn mixed_order_product() {
        // q^2 (1 + q) known through q^5, times 1 - q known through q^3
        let f = QSeries::from_i64s(2, &[1, 1], 5);
        let g = QSeries::from_i64s(0, &[1, -1], 3);
        let p = f.mul_mixed(&g);
        assert_eq!(p.order(), 5);
        assert_eq!(p, QSeries::from_i64s(2, &[1, 0, -1], 5));
        let z = QSeries::zero(4).mul_mixed(&QSeries::monomial(1, 3, 10));
        assert_eq!(z.order(), 7);
        assert!(z.is_zero());
    }

    #[test]
    fn display() {
        assert_eq!(s(0, &[1, -1, 0, 2], 3).to_string(), "1 - q + 2q^3 + O(q^4)");
    }
}
