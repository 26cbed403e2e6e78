use std::collections::{BTreeMap, BTreeSet};

use super::exppoly::ExpPoly;

/// A product `prod c_i^{E_i} * q^{E_q} * prod s_j^{E_j}` with integer bases
/// `c_i` (`-1` or primes), symbolic parameters `s_j`, and polynomial
/// exponents. Kept in canonical form so structural equality is meaningful.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MonoExpr {
    pub(crate) consts: BTreeMap<i64, ExpPoly>,
    pub(crate) q: ExpPoly,
    pub(crate) syms: BTreeMap<String, ExpPoly>,
}

impl MonoExpr {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn q_pow(e: ExpPoly) -> Self {
        MonoExpr {
            q: e,
            ..Self::default()
        }
    }

    pub fn symbol(name: &str) -> Self {
        let mut m = Self::default();
        m.syms.insert(name.to_string(), ExpPoly::constant(1));
        m
    }

    /// An integer literal, factored into `-1` and primes.
    pub fn integer(mut v: i64) -> Option<Self> {
        if v == 0 {
            return None;
        }
        let mut m = Self::default();
        if v < 0 {
            m.consts.insert(-1, ExpPoly::constant(1));
            v = -v;
        }
        let mut p = 2;
        while p * p <= v {
            let mut e = 0;
            while v % p == 0 {
                v /= p;
                e += 1;
            }
            if e > 0 {
                m.consts.insert(p, ExpPoly::constant(e));
            }
            p += 1;
        }
        if v > 1 {
            m.consts.insert(v, ExpPoly::constant(1));
        }
        Some(m)
    }

    pub fn is_one(&self) -> bool {
        self.consts.is_empty() && self.q.is_zero() && self.syms.is_empty()
    }

    pub fn q_exponent(&self) -> &ExpPoly {
        &self.q
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&String, &ExpPoly)> {
        self.syms.iter()
    }

    pub fn constants(&self) -> impl Iterator<Item = (&i64, &ExpPoly)> {
        self.consts.iter()
    }

    /// The exponent of `-1`, if any.
    pub fn sign_exponent(&self) -> Option<&ExpPoly> {
        self.consts.get(&-1)
    }

    pub fn mul(&self, other: &MonoExpr) -> MonoExpr {
        let mut out = self.clone();
        for (b, e) in &other.consts {
            let v = out.consts.entry(*b).or_default();
            *v = v.add(e);
        }
        out.q = out.q.add(&other.q);
        for (s, e) in &other.syms {
            let v = out.syms.entry(s.clone()).or_default();
            *v = v.add(e);
        }
        out.normalize();
        out
    }

    pub fn pow(&self, e: &ExpPoly) -> MonoExpr {
        let mut out = MonoExpr {
            consts: self.consts.iter().map(|(b, x)| (*b, x.mul(e))).collect(),
            q: self.q.mul(e),
            syms: self.syms.iter().map(|(s, x)| (s.clone(), x.mul(e))).collect(),
        };
        out.normalize();
        out
    }

    pub fn inverse(&self) -> MonoExpr {
        self.pow(&ExpPoly::constant(-1))
    }

    /// Flips the sign.
    pub fn negate(&self) -> MonoExpr {
        self.mul(&MonoExpr::integer(-1).expect("nonzero"))
    }

    pub(crate) fn normalize(&mut self) {
        self.consts.retain(|_, e| !e.is_zero());
        self.syms.retain(|_, e| !e.is_zero());
        if let Some(e) = self.consts.get_mut(&-1) {
            if let Some(c) = e.as_constant() {
                if c.is_integer() {
                    let r = c.to_integer().rem_euclid(2);
                    *e = ExpPoly::constant(r);
                }
            }
            if e.is_zero() {
                self.consts.remove(&-1);
            }
        }
    }

    /// Integer variables appearing in any exponent.
    pub fn int_vars(&self) -> BTreeSet<String> {
        let mut out = self.q.vars();
        for e in self.consts.values().chain(self.syms.values()) {
            out.extend(e.vars());
        }
        out
    }

    pub fn mentions_int(&self, var: &str) -> bool {
        self.q.mentions(var) || self.consts.values().chain(self.syms.values()).any(|e| e.mentions(var))
    }

    /// Splits off a constant sign: returns `(negative, rest)` where `rest`
    /// has no constant odd power of `-1`.
    pub fn split_sign(&self) -> (bool, MonoExpr) {
        match self.consts.get(&-1).and_then(|e| e.as_integer()) {
            Some(1) => {
                let mut m = self.clone();
                m.consts.remove(&-1);
                (true, m)
            }
            _ => (false, self.clone()),
        }
    }

    pub(crate) fn exponent_denominators(&self) -> i64 {
        use num_integer::Integer;
        let mut d = self.q.denominator();
        for e in self.consts.values().chain(self.syms.values()) {
            d = d.lcm(&e.denominator());
        }
        d
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Length {
    Infinite,
    Finite(ExpPoly),
}

/// `(a_1, ..., a_k; q^base)_length`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poch {
    pub args: Vec<MonoExpr>,
    pub base: i64,
    pub length: Length,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Range {
    /// `n >= lo`
    From(i64),
    /// `n in Z`
    Bilateral,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SumExpr {
    pub var: String,
    pub range: Range,
    pub body: Box<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Poch(Poch),
    Sum(SumExpr),
    Group(Expr),
}

/// A product of a monomial and factors raised to nonzero integer powers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Term {
    pub mono: MonoExpr,
    pub factors: Vec<(Factor, i64)>,
}

/// A sum of terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Expr {
    pub terms: Vec<Term>,
}

impl Expr {
    pub fn from_term(t: Term) -> Self {
        Expr { terms: vec![t] }
    }

    /// Free symbolic parameters.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        visit_expr(self, &mut |m| out.extend(m.syms.keys().cloned()), &mut |_| {});
        out
    }

    /// Free integer parameters (variables not bound by a sum).
    pub fn int_params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_ints_expr(self, &mut Vec::new(), &mut out);
        out
    }
}

fn visit_expr(e: &Expr, mono: &mut dyn FnMut(&MonoExpr), poch: &mut dyn FnMut(&Poch)) {
    for t in &e.terms {
        visit_term(t, mono, poch);
    }
}

fn visit_term(t: &Term, mono: &mut dyn FnMut(&MonoExpr), poch: &mut dyn FnMut(&Poch)) {
    mono(&t.mono);
    for (f, _) in &t.factors {
        match f {
            Factor::Poch(p) => {
                for a in &p.args {
                    mono(a);
                }
                poch(p);
            }
            Factor::Sum(s) => visit_term(&s.body, mono, poch),
            Factor::Group(g) => visit_expr(g, mono, poch),
        }
    }
}

fn collect_ints_expr(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    for t in &e.terms {
        collect_ints_term(t, bound, out);
    }
}

fn collect_ints_term(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    fn add(vars: BTreeSet<String>, bound: &[String], out: &mut BTreeSet<String>) {
        out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
    }
    add(t.mono.int_vars(), bound, out);
    for (f, _) in &t.factors {
        match f {
            Factor::Poch(p) => {
                for a in &p.args {
                    add(a.int_vars(), bound, out);
                }
                if let Length::Finite(l) = &p.length {
                    add(l.vars(), bound, out);
                }
            }
            Factor::Sum(s) => {
                bound.push(s.var.clone());
                collect_ints_term(&s.body, bound, out);
                bound.pop();
            }
            Factor::Group(g) => collect_ints_expr(g, bound, out),
        }
    }
}

impl Term {
    pub fn is_mono_only(&self) -> bool {
        self.factors.is_empty()
    }

    /// True if the term depends on integer variable `var`.
    pub fn mentions_int(&self, var: &str) -> bool {
        let mut out = BTreeSet::new();
        collect_ints_term(self, &mut Vec::new(), &mut out);
        out.contains(var)
    }
}

impl Factor {
    pub fn mentions_int(&self, var: &str) -> bool {
        Term {
            mono: MonoExpr::one(),
            factors: vec![(self.clone(), 1)],
        }
        .mentions_int(var)
    }
}

/// Symbol and integer-parameter bindings of an instance, plus an optional
/// change of variable `q -> sign * q^power`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct InstanceSpec {
    pub parent: String,
    pub symbols: BTreeMap<String, MonoExpr>,
    pub ints: BTreeMap<String, i64>,
    pub qsub: Option<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RecordBody {
    Equation { lhs: Expr, rhs: Expr },
    Instance(InstanceSpec),
}

/// One stanza of identity source: an equation or an instance of another
/// record, with optional metadata.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdentityRecord {
    pub id: String,
    pub source: Option<String>,
    pub tags: Vec<String>,
    pub body: RecordBody,
}

impl IdentityRecord {
    /// Free parameters of an equation: symbols then integer parameters.
    /// Instances need their parent to answer this; see the catalog.
    pub fn equation_params(&self) -> Option<(BTreeSet<String>, BTreeSet<String>)> {
        match &self.body {
            RecordBody::Equation { lhs, rhs } => {
                let mut syms = lhs.symbols();
                syms.extend(rhs.symbols());
                let mut ints = lhs.int_params();
                ints.extend(rhs.int_params());
                Some((syms, ints))
            }
            RecordBody::Instance(_) => None,
        }
    }
}
