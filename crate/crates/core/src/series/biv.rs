use num_bigint::BigInt;
use num_traits::Zero;

use super::{QSeries, SeriesError};

/// A power series in `t` truncated at degree `D`, whose coefficients are
/// [`QSeries`] sharing one truncation order `N`. Only nonnegative powers of
/// `q` are supported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivSeries {
    t_coeffs: Vec<QSeries>,
    order: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BivError {
    #[error("t-degree {n} outside 0..={max}")]
    DegreeOutOfRange { n: i64, max: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("bivariate series must not contain negative powers of q")]
    NegativeQPower,
}

impl BivSeries {
    pub fn zero(t_degree: usize, order: i64) -> Self {
        BivSeries {
            t_coeffs: vec![QSeries::zero(order); t_degree + 1],
            order,
        }
    }

    pub fn from_rows(rows: Vec<QSeries>, order: i64) -> Result<Self, BivError> {
        for r in &rows {
            if r.order() != order {
                return Err(SeriesError::OrderMismatch(r.order(), order).into());
            }
            if r.lead().is_some_and(|l| l < 0) {
                return Err(BivError::NegativeQPower);
            }
        }
        Ok(BivSeries { t_coeffs: rows, order })
    }

    /// Builds from dense rows `rows[t][k]` = coefficient of `t^t q^k`.
    pub(crate) fn from_dense(rows: Vec<Vec<BigInt>>, order: i64) -> Self {
        BivSeries {
            t_coeffs: rows.into_iter().map(|r| QSeries::from_coeffs(0, r, order)).collect(),
            order,
        }
    }

    fn to_dense(&self) -> Vec<Vec<BigInt>> {
        self.t_coeffs.iter().map(|s| s.dense_from(0)).collect()
    }

    /// `1/(1-t)` truncated at t-degree `t_degree`.
    pub fn geometric_t(t_degree: usize, order: i64) -> Self {
        BivSeries {
            t_coeffs: vec![QSeries::one(order); t_degree + 1],
            order,
        }
    }

    pub fn t_degree(&self) -> usize {
        self.t_coeffs.len() - 1
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// The coefficient of `t^n`.
    pub fn t_coefficient(&self, n: i64) -> Result<&QSeries, BivError> {
        usize::try_from(n)
            .ok()
            .and_then(|i| self.t_coeffs.get(i))
            .ok_or(BivError::DegreeOutOfRange {
                n,
                max: self.t_degree(),
            })
    }

    pub fn add(&self, other: &BivSeries) -> Result<BivSeries, BivError> {
        let d = self.t_degree().min(other.t_degree());
        let rows = (0..=d)
            .map(|i| self.t_coeffs[i].add(&other.t_coeffs[i]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BivSeries {
            t_coeffs: rows,
            order: self.order,
        })
    }

    pub fn mul(&self, other: &BivSeries) -> Result<BivSeries, BivError> {
        let d = self.t_degree().min(other.t_degree());
        let mut rows = vec![QSeries::zero(self.order); d + 1];
        for i in 0..=d {
            for j in 0..=(d - i) {
                let p = self.t_coeffs[i].mul(&other.t_coeffs[j])?;
                rows[i + j] = rows[i + j].add(&p)?;
            }
        }
        Ok(BivSeries {
            t_coeffs: rows,
            order: self.order,
        })
    }

    /// Multiplies by `(1 - c t^a q^b)`, or divides when `inverse` is set.
    /// Division requires `a + b >= 1` so the factor is a unit.
    pub fn apply_binomial(&mut self, c: &BigInt, a: usize, b: usize, inverse: bool) {
        assert!(a + b >= 1, "factor (1 - c) is not a unit binomial");
        let mut dense = self.to_dense();
        apply_binomial_dense(&mut dense, c, a, b, inverse);
        *self = BivSeries::from_dense(dense, self.order);
    }
}

/// Dense kernel for `(1 - c t^a q^b)^{+-1}` on `rows[t][k]`.
pub(crate) fn apply_binomial_dense(rows: &mut [Vec<BigInt>], c: &BigInt, a: usize, b: usize, inverse: bool) {
    let d = rows.len();
    if d == 0 || c.is_zero() {
        return;
    }
    let n = rows[0].len();
    if a == 0 {
        for row in rows.iter_mut() {
            if inverse {
                super::kernel::div_binomial(row, c, b);
            } else {
                super::kernel::mul_binomial(row, c, b);
            }
        }
        return;
    }
    let ts: Vec<usize> = if inverse {
        (a..d).collect()
    } else {
        (a..d).rev().collect()
    };
    for ti in ts {
        let (lo, hi) = rows.split_at_mut(ti);
        let src = &lo[ti - a];
        let dst = &mut hi[0];
        for k in b..n {
            let s = &src[k - b];
            if s.is_zero() {
                continue;
            }
            let v = s * c;
            if inverse {
                dst[k] += v;
            } else {
                dst[k] -= v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn geometric_in_t() {
        let mut f = BivSeries::zero(6, 10);
        f.t_coeffs[0] = QSeries::one(10);
        f.apply_binomial(&BigInt::one(), 1, 0, true);
        assert_eq!(f, BivSeries::geometric_t(6, 10));
        for n in 0..=6 {
            assert_eq!(f.t_coefficient(n).unwrap(), &QSeries::one(10));
        }
        assert!(f.t_coefficient(7).is_err());
        assert!(f.t_coefficient(-1).is_err());
    }

    #[test]
    fn factor_round_trip() {
        let mut f = BivSeries::geometric_t(5, 12);
        let orig = f.clone();
        let c = BigInt::from(-1);
        f.apply_binomial(&c, 1, 2, false);
        f.apply_binomial(&c, 1, 2, true);
        assert_eq!(f, orig);
        let g = orig.mul(&BivSeries::geometric_t(5, 12)).unwrap();
        // 1/(1-t)^2 has t^n coefficient n+1
        assert_eq!(g.t_coefficient(4).unwrap(), &QSeries::monomial(5, 0, 12));
    }
}
