use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonomialError {
    #[error("monomial coefficient must be nonzero")]
    ZeroCoefficient,
    #[error("{0} is not divisible by {1}")]
    Inexact(i64, i64),
    #[error("monomial arithmetic overflow")]
    Overflow,
    #[error("cannot parse monomial {0:?}")]
    Parse(String),
}

/// A signed integer times a power of `q`: the values that free parameters
/// of a transformation may be bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    coeff: i64,
    exp: i64,
}

impl Monomial {
    pub fn new(coeff: i64, exp: i64) -> Result<Self, MonomialError> {
        if coeff == 0 {
            return Err(MonomialError::ZeroCoefficient);
        }
        Ok(Monomial { coeff, exp })
    }

    /// `q^exp`.
    pub const fn q(exp: i64) -> Self {
        Monomial { coeff: 1, exp }
    }

    /// `-q^exp`.
    pub const fn neg_q(exp: i64) -> Self {
        Monomial { coeff: -1, exp }
    }

    pub const ONE: Monomial = Monomial::q(0);

    pub fn coeff(&self) -> i64 {
        self.coeff
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn mul(self, other: Monomial) -> Result<Monomial, MonomialError> {
        Ok(Monomial {
            coeff: self.coeff.checked_mul(other.coeff).ok_or(MonomialError::Overflow)?,
            exp: self.exp.checked_add(other.exp).ok_or(MonomialError::Overflow)?,
        })
    }

    pub fn div(self, other: Monomial) -> Result<Monomial, MonomialError> {
        if self.coeff % other.coeff != 0 {
            return Err(MonomialError::Inexact(self.coeff, other.coeff));
        }
        Ok(Monomial {
            coeff: self.coeff / other.coeff,
            exp: self.exp - other.exp,
        })
    }

    pub fn neg(self) -> Monomial {
        Monomial {
            coeff: -self.coeff,
            exp: self.exp,
        }
    }

    /// Integer power; negative powers need a unit coefficient.
    pub fn pow(self, k: i64) -> Result<Monomial, MonomialError> {
        let exp = self.exp.checked_mul(k).ok_or(MonomialError::Overflow)?;
        let coeff = if k >= 0 {
            let k32 = u32::try_from(k).map_err(|_| MonomialError::Overflow)?;
            self.coeff.checked_pow(k32).ok_or(MonomialError::Overflow)?
        } else {
            match self.coeff {
                1 => 1,
                -1 => {
                    if k % 2 == 0 {
                        1
                    } else {
                        -1
                    }
                }
                c => return Err(MonomialError::Inexact(1, c)),
            }
        };
        Ok(Monomial { coeff, exp })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.coeff < 0 { "-" } else { "" };
        let mag = self.coeff.unsigned_abs();
        match (mag, self.exp) {
            (m, 0) => write!(f, "{sign}{m}"),
            (1, 1) => write!(f, "{sign}q"),
            (1, e) => write!(f, "{sign}q^{e}"),
            (m, 1) => write!(f, "{sign}{m}*q"),
            (m, e) => write!(f, "{sign}{m}*q^{e}"),
        }
    }
}

impl FromStr for Monomial {
    type Err = MonomialError;

    /// Accepts forms like `q`, `-q^3`, `2*q^-1`, `-1`, `q^(-2)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || MonomialError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.as_str()),
        };
        let (coeff_part, q_part) = match body.find('q') {
            None => (body, None),
            Some(i) => {
                let c = body[..i].trim_end_matches('*');
                (c, Some(&body[i + 1..]))
            }
        };
        let mag: i64 = if coeff_part.is_empty() {
            1
        } else {
            coeff_part.parse().map_err(|_| err())?
        };
        let exp: i64 = match q_part {
            None => 0,
            Some("") => 1,
            Some(p) => {
                let p = p.strip_prefix('^').ok_or_else(err)?;
                let p = p.trim_start_matches('(').trim_end_matches(')');
                p.parse().map_err(|_| err())?
            }
        };
        Monomial::new(if neg { -mag } else { mag }, exp)
    }
}
