use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{kernel, QSeries};

/// An exact polynomial in `q` with integer coefficients, dense from `q^0`.
///
/// Trailing zeros are stripped, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::from_coeffs(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// `c q^k`.
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c.into();
        Self::from_coeffs(v)
    }

    /// `1 - c q^k`.
    pub fn binomial(c: impl Into<BigInt>, k: usize) -> Self {
        let c = c.into();
        if k == 0 {
            return Self::from_coeffs(vec![BigInt::one() - c]);
        }
        let mut v = vec![BigInt::zero(); k + 1];
        v[0] = BigInt::one();
        v[k] = -c;
        Self::from_coeffs(v)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = self.coeffs.clone();
        v.resize(n, BigInt::zero());
        for (i, c) in other.coeffs.iter().enumerate() {
            v[i] += c;
        }
        Poly::from_coeffs(v)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![BigInt::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        Poly::from_coeffs(kernel::mul_dense(&self.coeffs, &other.coeffs, len))
    }

    /// Multiplies in place by `(1 - c q^k)`, `k >= 1`.
    pub fn mul_binomial(&mut self, c: &BigInt, k: usize) {
        if self.is_zero() {
            return;
        }
        self.coeffs.resize(self.coeffs.len() + k, BigInt::zero());
        kernel::mul_binomial(&mut self.coeffs, c, k);
        self.trim();
    }

    /// Exact division; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let nd = self.degree()?;
        if nd < dd {
            return None;
        }
        let lc = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                if !dc.is_zero() {
                    rem[i + j] -= &q * dc;
                }
            }
            quot[i] = q;
        }
        rem.iter().all(|c| c.is_zero()).then(|| Poly::from_coeffs(quot))
    }

    /// Exact division by `(1 - c q^k)`, `k >= 1`, in linear time.
    pub fn div_binomial_exact(&self, c: &BigInt, k: usize) -> Option<Poly> {
        let Some(d) = self.degree() else {
            return Some(Poly::zero());
        };
        if d < k {
            return None;
        }
        let mut buf = self.coeffs.clone();
        kernel::div_binomial(&mut buf, c, k);
        // the quotient series is a polynomial iff its top window vanishes
        if buf[d - k + 1..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        buf.truncate(d - k + 1);
        Some(Poly::from_coeffs(buf))
    }

    /// Drops every term of degree above `max_deg`.
    pub fn truncate(&self, max_deg: usize) -> Poly {
        if self.coeffs.len() <= max_deg + 1 {
            return self.clone();
        }
        Poly::from_coeffs(self.coeffs[..=max_deg].to_vec())
    }

    /// Replaces `q` by `q^m`, `m >= 1`.
    pub fn dilate(&self, m: usize) -> Poly {
        assert!(m >= 1);
        if m == 1 || self.is_zero() {
            return self.clone();
        }
        let mut v = vec![BigInt::zero(); (self.coeffs.len() - 1) * m + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * m] = c.clone();
        }
        Poly { coeffs: v }
    }

    /// Replaces `q` by `-q`.
    pub fn negate_q(&self) -> Poly {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// The polynomial as a truncated series of the given order.
    pub fn to_series(&self, order: i64) -> QSeries {
        QSeries::from_coeffs(0, self.coeffs.clone(), order)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_series(self.degree().unwrap_or(0) as i64).to_string();
        let body = s.rsplit_once(" + O(").map(|(b, _)| b).unwrap_or(&s);
        write!(f, "Poly({body})")
    }
}
