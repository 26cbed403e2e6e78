use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, One, Zero};

/// A power product of integer variables, sorted by name.
pub type VarPower = Vec<(String, u32)>;

/// A polynomial with rational coefficients in integer-valued variables.
/// Used for exponents and Pochhammer lengths.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExpPoly {
    terms: BTreeMap<VarPower, Rational64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpEvalError {
    Unbound(String),
    NonIntegral,
    Overflow,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        Self::rational(Rational64::from_integer(c))
    }

    pub fn rational(c: Rational64) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn var(name: &str) -> Self {
        let mut p = Self::zero();
        p.terms.insert(vec![(name.to_string(), 1)], Rational64::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational64> {
        match self.terms.len() {
            0 => Some(Rational64::zero()),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        self.as_constant().filter(|c| c.is_integer()).map(|c| c.to_integer())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VarPower, &Rational64)> {
        self.terms.iter()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|k| k.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.terms.keys().any(|k| k.iter().any(|(v, _)| v == var))
    }

    /// Highest power of `var` appearing.
    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms
            .keys()
            .flat_map(|k| k.iter().filter(|(v, _)| v == var).map(|(_, e)| *e))
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of `var^k` as a polynomial in the other variables.
    pub fn coefficient_of(&self, var: &str, k: u32) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (key, c) in &self.terms {
            let e = key.iter().find(|(v, _)| v == var).map(|(_, e)| *e).unwrap_or(0);
            if e == k {
                let rest: VarPower = key.iter().filter(|(v, _)| v != var).cloned().collect();
                out.add_term(rest, *c);
            }
        }
        out
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator(&self) -> i64 {
        self.terms.values().fold(1, |acc, c| acc.lcm(c.denom()))
    }

    fn add_term(&mut self, key: VarPower, c: Rational64) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_insert_with(Rational64::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), *c);
        }
        out
    }

    pub fn neg(&self) -> ExpPoly {
        ExpPoly {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Rational64) -> ExpPoly {
        if c.is_zero() {
            return ExpPoly::zero();
        }
        ExpPoly {
            terms: self.terms.iter().map(|(k, x)| (k.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                out.add_term(merge_powers(k1, k2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> ExpPoly {
        let mut out = ExpPoly::constant(1);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Replaces `var` by the polynomial `value`.
    pub fn substitute(&self, var: &str, value: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (key, c) in &self.terms {
            let mut term = ExpPoly::rational(*c);
            for (v, e) in key {
                let f = if v == var {
                    value.pow(*e)
                } else {
                    let mut p = ExpPoly::zero();
                    p.terms.insert(vec![(v.clone(), *e)], Rational64::one());
                    p
                };
                term = term.mul(&f);
            }
            out = out.add(&term);
        }
        out
    }

    /// Evaluates at integer values of all variables; the value must be an
    /// integer.
    pub fn eval(&self, env: &dyn Fn(&str) -> Option<i64>) -> Result<i64, ExpEvalError> {
        let mut acc = num_rational::Ratio::<i128>::zero();
        for (key, c) in &self.terms {
            let mut t = num_rational::Ratio::<i128>::new(*c.numer() as i128, *c.denom() as i128);
            for (v, e) in key {
                let x = env(v).ok_or_else(|| ExpEvalError::Unbound(v.clone()))? as i128;
                let p = x.checked_pow(*e).ok_or(ExpEvalError::Overflow)?;
                t = t
                    .checked_mul(&num_rational::Ratio::from_integer(p))
                    .ok_or(ExpEvalError::Overflow)?;
            }
            acc = acc.checked_add(&t).ok_or(ExpEvalError::Overflow)?;
        }
        if !acc.is_integer() {
            return Err(ExpEvalError::NonIntegral);
        }
        i64::try_from(acc.to_integer()).map_err(|_| ExpEvalError::Overflow)
    }

    /// Checks that the polynomial takes integer values at every integer
    /// point, by testing a full residue system modulo the denominator.
    pub fn is_integer_valued(&self) -> bool {
        let d = self.denominator();
        if d == 1 {
            return true;
        }
        let vars: Vec<String> = self.vars().into_iter().collect();
        let mut point = vec![0i64; vars.len()];
        loop {
            let env = |name: &str| vars.iter().position(|v| v == name).map(|i| point[i]);
            if self.eval(&env).is_err() {
                return false;
            }
            let mut i = 0;
            loop {
                if i == point.len() {
                    return true;
                }
                point[i] += 1;
                if point[i] < d {
                    break;
                }
                point[i] = 0;
                i += 1;
            }
        }
    }
}

fn merge_powers(a: &VarPower, b: &VarPower) -> VarPower {
    let mut m: BTreeMap<String, u32> = BTreeMap::new();
    for (v, e) in a.iter().chain(b.iter()) {
        *m.entry(v.clone()).or_default() += e;
    }
    m.into_iter().collect()
}

impl fmt::Display for ExpPoly {
    /// Integer-coefficient numerator over a common denominator, highest
    /// total degree first: `(3*n^2+3*n)/2`, `-n+1`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let d = self.denominator();
        let mut keys: Vec<&VarPower> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().map(|x| x.1).sum();
            let db: u32 = b.iter().map(|x| x.1).sum();
            db.cmp(&da).then_with(|| a.cmp(b))
        });
        let mut body = String::new();
        for (i, key) in keys.iter().enumerate() {
            let c = self.terms[*key] * Rational64::from_integer(d);
            let n = c.to_integer();
            if n < 0 {
                body.push('-');
            } else if i > 0 {
                body.push('+');
            }
            let mag = n.abs();
            let vars: Vec<String> = key
                .iter()
                .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            if vars.is_empty() {
                body.push_str(&mag.to_string());
            } else {
                if mag != 1 {
                    body.push_str(&format!("{mag}*"));
                }
                body.push_str(&vars.join("*"));
            }
        }
        if d == 1 {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{d}")
        }
    }
}

impl fmt::Debug for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExpPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n() -> ExpPoly {
        ExpPoly::var("n")
    }

    #[test]
    fn arithmetic_and_eval() {
        // (3n^2 + 3n)/2
        let p = n()
            .mul(&n())
            .scale(Rational64::new(3, 2))
            .add(&n().scale(Rational64::new(3, 2)));
        assert_eq!(p.to_string(), "(3*n^2+3*n)/2");
        for k in -5..=5 {
            assert_eq!(p.eval(&|_| Some(k)), Ok((3 * k * k + 3 * k) / 2));
        }
        assert!(p.is_integer_valued());
        assert_eq!(p.degree_in("n"), 2);
        assert_eq!(p.coefficient_of("n", 1), ExpPoly::rational(Rational64::new(3, 2)));
    }

    #[test]
    fn integrality_rejects_half_values() {
        let p = n()
            .mul(&n())
            .add(&n())
            .add(&ExpPoly::constant(1))
            .scale(Rational64::new(1, 2));
        assert!(!p.is_integer_valued());
        assert_eq!(p.eval(&|_| Some(1)), Err(ExpEvalError::NonIntegral));
    }

    #[test]
    fn substitution() {
        let p = n().mul(&ExpPoly::var("m")).add(&n());
        let s = p.substitute("n", &ExpPoly::var("m").add(&ExpPoly::constant(1)));
        // (m+1)m + m + 1 = m^2 + 2m + 1
        assert_eq!(s.to_string(), "m^2+2*m+1");
        assert_eq!(ExpPoly::zero().to_string(), "0");
        assert_eq!(n().neg().add(&ExpPoly::constant(1)).to_string(), "-n+1");
    }
}
