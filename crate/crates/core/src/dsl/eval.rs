//! Evaluation of expressions to truncated series.
//!
//! A sum is evaluated in two passes. The first computes the exact valuation
//! of every term from its factored form (cheap: no coefficient arithmetic)
//! and decides where the sum can stop. The second walks the same indices
//! keeping a running product of unit binomials, updated by the difference
//! between consecutive terms' factor multisets, and adds each term once.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::ast::*;
use super::exppoly::{ExpEvalError, ExpPoly};
use crate::series::{kernel, FactorError, Factored, QSeries};
use crate::Monomial;

/// The change of variable `q -> sign * q^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QSub {
    pub sign: i64,
    pub power: i64,
}

impl Default for QSub {
    fn default() -> Self {
        QSub { sign: 1, power: 1 }
    }
}

impl QSub {
    pub fn new(sign: i64, power: i64) -> Self {
        assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
        assert!(power >= 1, "power must be positive");
        QSub { sign, power }
    }

    pub fn is_identity(&self) -> bool {
        self.sign == 1 && self.power == 1
    }

    /// Applies `self` after `inner`: `q -> inner(q)`, then `q -> self(q)`.
    pub fn after(&self, inner: QSub) -> QSub {
        let sign = inner.sign * if inner.power % 2 == 1 { self.sign } else { 1 };
        QSub {
            sign,
            power: inner.power * self.power,
        }
    }

    fn sign_pow(&self, e: i64) -> i64 {
        if self.sign == -1 && e.rem_euclid(2) == 1 {
            -1
        } else {
            1
        }
    }
}

/// Values for the free parameters of an expression.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Specialization {
    pub symbols: BTreeMap<String, Monomial>,
    pub ints: BTreeMap<String, i64>,
    pub qsub: QSub,
}

impl Specialization {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_symbol(mut self, name: &str, m: Monomial) -> Self {
        self.symbols.insert(name.to_string(), m);
        self
    }

    pub fn with_int(mut self, name: &str, v: i64) -> Self {
        self.ints.insert(name.to_string(), v);
        self
    }

    pub fn with_qsub(mut self, q: QSub) -> Self {
        self.qsub = q;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvalidReason {
    VanishingDenominator,
    NonIntegral,
    Nonterminating,
    ZeroDivisor,
}

impl std::fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InvalidReason::VanishingDenominator => "a denominator factor vanishes",
            InvalidReason::NonIntegral => "non-integral coefficients",
            InvalidReason::Nonterminating => "the sum does not terminate at this order",
            InvalidReason::ZeroDivisor => "division by a series that vanishes",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("invalid specialization: {0}")]
    Invalid(InvalidReason),
    #[error("unbound parameter '{0}'")]
    Unbound(String),
    #[error("unsupported expression: {0}")]
    Unsupported(String),
    #[error("exponent arithmetic overflow")]
    Overflow,
}

impl EvalError {
    pub fn is_invalid(&self) -> bool {
        matches!(self, EvalError::Invalid(_))
    }
}

impl From<ExpEvalError> for EvalError {
    fn from(e: ExpEvalError) -> Self {
        match e {
            ExpEvalError::Unbound(v) => EvalError::Unbound(v),
            ExpEvalError::NonIntegral => EvalError::Invalid(InvalidReason::NonIntegral),
            ExpEvalError::Overflow => EvalError::Overflow,
        }
    }
}

impl From<FactorError> for EvalError {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::VanishingDenominator => EvalError::Invalid(InvalidReason::VanishingDenominator),
            FactorError::NonIntegral(_) => EvalError::Invalid(InvalidReason::NonIntegral),
        }
    }
}

type EResult<T> = Result<T, EvalError>;

/// Evaluates `expr` through `q^order` under `spec`.
pub fn evaluate(expr: &Expr, spec: &Specialization, order: i64) -> EResult<QSeries> {
    let env = Env {
        spec,
        locals: Vec::new(),
    };
    eval_expr(expr, &env, order)
}

#[derive(Clone)]
struct Env<'a> {
    spec: &'a Specialization,
    locals: Vec<(String, i64)>,
}

impl Env<'_> {
    fn int(&self, name: &str) -> Option<i64> {
        self.locals
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .or_else(|| self.spec.ints.get(name).copied())
    }

    fn eval_exp(&self, e: &ExpPoly) -> EResult<i64> {
        Ok(e.eval(&|v| self.int(v))?)
    }

    fn with_local(&self, name: &str, v: i64) -> Env<'_> {
        let mut e = self.clone();
        e.locals.push((name.to_string(), v));
        e
    }
}

fn rational_pow(base: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), e.unsigned_abs() as usize)
    }
}

/// Value of a monomial expression: `(coefficient, exponent)`.
fn eval_mono(m: &MonoExpr, env: &Env) -> EResult<(BigRational, i64)> {
    let mut coeff = BigRational::one();
    let mut exp: i64 = 0;
    for (b, e) in m.constants() {
        let k = env.eval_exp(e)?;
        if *b == -1 {
            if k.rem_euclid(2) == 1 {
                coeff = -coeff;
            }
        } else {
            if k.unsigned_abs() > 4096 {
                return Err(EvalError::Overflow);
            }
            coeff *= rational_pow(&BigRational::from_integer(BigInt::from(*b)), k);
        }
    }
    let eq = env.eval_exp(m.q_exponent())?;
    if env.spec.qsub.sign_pow(eq) == -1 {
        coeff = -coeff;
    }
    exp = exp
        .checked_add(eq.checked_mul(env.spec.qsub.power).ok_or(EvalError::Overflow)?)
        .ok_or(EvalError::Overflow)?;
    for (s, e) in m.symbols() {
        let k = env.eval_exp(e)?;
        let b = env.spec.symbols.get(s).ok_or_else(|| EvalError::Unbound(s.clone()))?;
        if b.coeff() != 1 {
            if k.unsigned_abs() > 4096 {
                return Err(EvalError::Overflow);
            }
            coeff *= rational_pow(&BigRational::from_integer(BigInt::from(b.coeff())), k);
        }
        exp = exp
            .checked_add(b.exp().checked_mul(k).ok_or(EvalError::Overflow)?)
            .ok_or(EvalError::Overflow)?;
    }
    Ok((coeff, exp))
}

/// Evaluates a monomial expression to a [`Monomial`] under `spec`.
pub fn evaluate_mono(m: &MonoExpr, spec: &Specialization) -> EResult<Monomial> {
    let env = Env {
        spec,
        locals: Vec::new(),
    };
    eval_arg(m, &env)
}

/// A Pochhammer argument as an integer monomial.
fn eval_arg(m: &MonoExpr, env: &Env) -> EResult<Monomial> {
    let (c, e) = eval_mono(m, env)?;
    if !c.is_integer() {
        return Err(EvalError::Invalid(InvalidReason::NonIntegral));
    }
    let c = c.to_integer().to_i64().ok_or(EvalError::Overflow)?;
    Monomial::new(c, e).map_err(|_| EvalError::Overflow)
}

/// Calls `sink(factor, multiplicity)` for each binomial `(1 - m)` of a
/// finite-length symbol; negative lengths give reciprocal factors.
fn finite_factors(arg: Monomial, base: i64, len: i64, qsub: QSub, sink: &mut dyn FnMut(Monomial, i64)) -> EResult<()> {
    let step = base.checked_mul(qsub.power).ok_or(EvalError::Overflow)?;
    let (range, mult): (Box<dyn Iterator<Item = i64>>, i64) = if len >= 0 {
        (Box::new(0..len), 1)
    } else {
        (Box::new((len..0).rev()), -1)
    };
    for k in range {
        let sign = qsub.sign_pow(base * k);
        let m = Monomial::new(arg.coeff() * sign, arg.exp() + step * k).map_err(|_| EvalError::Overflow)?;
        sink(m, mult);
    }
    Ok(())
}

/// Multiplies `f` by `(arg; q^base)_inf ^ power` after the substitution.
fn infinite_into(f: &mut Factored, arg: Monomial, base: i64, power: i64, qsub: QSub) -> EResult<()> {
    let step = base.checked_mul(qsub.power).ok_or(EvalError::Overflow)?;
    if qsub.sign == -1 && base % 2 == 1 {
        // factors alternate in sign: split into even and odd k
        f.mul_infinite(arg, 2 * step, power);
        let odd = Monomial::new(-arg.coeff(), arg.exp() + step).map_err(|_| EvalError::Overflow)?;
        f.mul_infinite(odd, 2 * step, power);
    } else {
        f.mul_infinite(arg, step, power);
    }
    Ok(())
}

fn poch_into(f: &mut Factored, p: &Poch, power: i64, env: &Env) -> EResult<()> {
    for a in &p.args {
        let arg = eval_arg(a, env)?;
        match &p.length {
            Length::Infinite => infinite_into(f, arg, p.base, power, env.spec.qsub)?,
            Length::Finite(l) => {
                let len = env.eval_exp(l)?;
                finite_factors(arg, p.base, len, env.spec.qsub, &mut |m, mult| {
                    f.mul_factor(m, mult * power)
                })?;
            }
        }
    }
    Ok(())
}

fn eval_expr(e: &Expr, env: &Env, order: i64) -> EResult<QSeries> {
    let mut acc = QSeries::zero(order);
    for t in &e.terms {
        let v = eval_term(t, env, order)?;
        acc = acc
            .add(&v.truncate(order).expect("term evaluated to the requested order"))
            .expect("same order");
    }
    Ok(acc)
}

/// Moves factors of a sum body that do not involve the index out of the sum.
fn hoist(t: &Term) -> Term {
    let mut out = Term {
        mono: t.mono.clone(),
        factors: Vec::new(),
    };
    for (f, p) in &t.factors {
        match f {
            Factor::Sum(s) => {
                let body = hoist(&s.body);
                let mut inner = Term {
                    mono: body.mono.clone(),
                    factors: Vec::new(),
                };
                for (g, k) in body.factors {
                    if g.mentions_int(&s.var) {
                        inner.factors.push((g, k));
                    } else {
                        out.factors.push((g, k * p));
                    }
                }
                out.factors.push((
                    Factor::Sum(SumExpr {
                        var: s.var.clone(),
                        range: s.range.clone(),
                        body: Box::new(inner),
                    }),
                    *p,
                ));
            }
            other => out.factors.push((other.clone(), *p)),
        }
    }
    out
}

/// The monomial and Pochhammer part of a term, plus its series factors.
fn split_term<'t>(t: &'t Term, env: &Env) -> EResult<(Factored, Vec<(&'t Factor, i64)>)> {
    let mut f = Factored::one();
    let (c, e) = eval_mono(&t.mono, env)?;
    f.mul_scalar(&c);
    f.mul_q_power(e);
    let mut series = Vec::new();
    for (g, p) in &t.factors {
        match g {
            Factor::Poch(pc) => poch_into(&mut f, pc, *p, env)?,
            other => series.push((other, *p)),
        }
    }
    Ok((f, series))
}

fn eval_term(t: &Term, env: &Env, order: i64) -> EResult<QSeries> {
    let t = hoist(t);
    let (f, series) = split_term(&t, env)?;
    if f.has_zero_denominator() {
        return Err(EvalError::Invalid(InvalidReason::VanishingDenominator));
    }
    if series.is_empty() {
        return Ok(f.expand(order)?);
    }
    // valuation of each series factor: a lower bound for multiplicands,
    // the exact lead for divisors. Every factor is checked even when the
    // product is already zero, so that 0 * (1/0) stays invalid.
    let mut vals = Vec::with_capacity(series.len());
    for (g, p) in &series {
        let v = if *p > 0 {
            lower_bound_factor(g, env)?
        } else {
            Some(exact_lead(g, env)?)
        };
        vals.push(v);
    }
    let Some(vals) = vals.into_iter().collect::<Option<Vec<i64>>>() else {
        return Ok(QSeries::zero(order));
    };
    let Some(vf) = f.valuation() else {
        return Ok(QSeries::zero(order));
    };
    let total = vf + series.iter().zip(&vals).map(|((_, p), v)| p * v).sum::<i64>();
    if total > order {
        return Ok(QSeries::zero(order));
    }
    let mut acc = f.expand(order - (total - vf))?;
    for ((g, p), v) in series.iter().zip(&vals) {
        let need = order - total + v;
        let s = eval_factor(g, env, need)?;
        let s = if *p > 0 {
            s
        } else {
            s.invert().map_err(|_| EvalError::Invalid(InvalidReason::NonIntegral))?
        };
        for _ in 0..p.unsigned_abs() {
            acc = acc.mul_mixed(&s);
        }
    }
    Ok(acc.truncate(order).expect("factor orders cover the requested order"))
}

fn eval_factor(g: &Factor, env: &Env, order: i64) -> EResult<QSeries> {
    match g {
        Factor::Group(e) => eval_expr(e, env, order),
        Factor::Sum(s) => eval_sum(s, env, order),
        Factor::Poch(p) => {
            let mut f = Factored::one();
            poch_into(&mut f, p, 1, env)?;
            Ok(f.expand(order)?)
        }
    }
}

fn lower_bound_factor(g: &Factor, env: &Env) -> EResult<Option<i64>> {
    match g {
        Factor::Group(e) => {
            let mut best: Option<i64> = None;
            for t in &e.terms {
                if let Some(v) = lower_bound_term(t, env)? {
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
            Ok(best)
        }
        Factor::Sum(s) => {
            let scan = scan_sum(s, env, None)?;
            Ok(scan.min_valuation())
        }
        Factor::Poch(p) => {
            let mut f = Factored::one();
            poch_into(&mut f, p, 1, env)?;
            if f.has_zero_denominator() {
                return Err(EvalError::Invalid(InvalidReason::VanishingDenominator));
            }
            Ok(f.valuation())
        }
    }
}

fn lower_bound_term(t: &Term, env: &Env) -> EResult<Option<i64>> {
    let t = hoist(t);
    let (f, series) = split_term(&t, env)?;
    if f.has_zero_denominator() {
        return Err(EvalError::Invalid(InvalidReason::VanishingDenominator));
    }
    let mut v = f.valuation();
    for (g, p) in series {
        let w = if p > 0 {
            lower_bound_factor(g, env)?
        } else {
            Some(exact_lead(g, env)?)
        };
        v = v.zip(w).map(|(v, w)| v + p * w);
    }
    Ok(v)
}

/// Lowest exponent with a nonzero coefficient; an error if the factor is
/// zero as far as it can be resolved.
fn exact_lead(g: &Factor, env: &Env) -> EResult<i64> {
    let lb = lower_bound_factor(g, env)?.ok_or(EvalError::Invalid(InvalidReason::ZeroDivisor))?;
    for extra in [8, 32, 128] {
        let s = eval_factor(g, env, lb + extra)?;
        if let Some(l) = s.lead() {
            return Ok(l);
        }
    }
    Err(EvalError::Invalid(InvalidReason::ZeroDivisor))
}

/// One index of a sum: its factored term and whether it is the first of an
/// unbroken run of zero terms.
struct Header {
    f: Factored,
    persistent_zero: bool,
}

fn build_header(body: &Term, var: &str, n: i64, env: &Env, width: i64) -> EResult<Header> {
    let env = env.with_local(var, n);
    let mut f = Factored::one();
    let (c, e) = eval_mono(&body.mono, &env)?;
    f.mul_scalar(&c);
    f.mul_q_power(e);
    let mut persistent_zero = false;
    for (g, p) in &body.factors {
        let Factor::Poch(pc) = g else {
            return Err(EvalError::Unsupported(format!(
                "a series factor inside a sum may not depend on the index '{var}'"
            )));
        };
        let qsub = env.spec.qsub;
        for a in &pc.args {
            let arg = eval_arg(a, &env)?;
            match &pc.length {
                Length::Finite(l) => {
                    let len = env.eval_exp(l)?;
                    let mut zero_here = false;
                    finite_factors(arg, pc.base, len, qsub, &mut |m, mult| {
                        if m.exp() == 0 && m.coeff() == 1 && mult > 0 {
                            zero_here = true;
                        }
                        f.mul_factor(m, mult * p)
                    })?;
                    if zero_here && *p > 0 && !a.mentions_int(var) && nondecreasing_in(l, var) {
                        persistent_zero = true;
                    }
                }
                Length::Infinite => {
                    let step = pc.base.checked_mul(qsub.power).ok_or(EvalError::Overflow)?;
                    let mut k = 0i64;
                    loop {
                        let e = arg.exp() + step * k;
                        if e > width && e > 0 {
                            break;
                        }
                        let sign = qsub.sign_pow(pc.base * k);
                        let m = Monomial::new(arg.coeff() * sign, e).map_err(|_| EvalError::Overflow)?;
                        f.mul_factor(m, *p);
                        k += 1;
                    }
                }
            }
        }
    }
    Ok(Header { f, persistent_zero })
}

fn nondecreasing_in(l: &ExpPoly, var: &str) -> bool {
    match l.degree_in(var) {
        0 => true,
        1 => l
            .coefficient_of(var, 1)
            .as_constant()
            .is_some_and(|c| c >= num_rational::Rational64::zero()),
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Entry {
    Zero,
    Val(i64),
}

struct Scan {
    /// Indices of the nonnegative side, then of the negative side.
    sides: Vec<Vec<(i64, Entry)>>,
}

impl Scan {
    fn min_valuation(&self) -> Option<i64> {
        self.sides
            .iter()
            .flatten()
            .filter_map(|(_, e)| match e {
                Entry::Val(v) => Some(*v),
                Entry::Zero => None,
            })
            .min()
    }
}

fn period_of(body: &Term, qsub: QSub) -> i64 {
    let mut p: i64 = 2 * qsub.power;
    let mut bump = |d: i64| p = p.lcm(&d.max(1));
    bump(body.mono.exponent_denominators());
    for (g, _) in &body.factors {
        if let Factor::Poch(pc) = g {
            bump(pc.base);
            for a in &pc.args {
                bump(a.exponent_denominators());
            }
            if let Length::Finite(l) = &pc.length {
                bump(l.denominator());
            }
        }
    }
    p.min(720)
}

/// Size of the region of indices before every term's factor structure has
/// settled into its eventual quasi-polynomial shape.
fn breakpoint_bound(body: &Term, var: &str, env: &Env) -> EResult<i64> {
    let env0 = env.with_local(var, 0);
    let mut b: i64 = 4;
    for (g, _) in &body.factors {
        if let Factor::Poch(pc) = g {
            for a in &pc.args {
                let m = eval_arg(a, &env0)?;
                b = b.saturating_add(m.exp().abs());
            }
            if let Length::Finite(l) = &pc.length {
                b = b.saturating_add(env0.eval_exp(l)?.abs());
            }
        }
    }
    Ok(b.min(100_000))
}

/// Classification of the last four samples of one residue class.
enum Trend {
    Rising,
    Falling,
    AllZero,
    Unclear,
}

fn trend(samples: &[Entry]) -> Trend {
    if samples.iter().all(|e| *e == Entry::Zero) {
        return Trend::AllZero;
    }
    let vals: Option<Vec<i64>> = samples
        .iter()
        .map(|e| match e {
            Entry::Val(v) => Some(*v),
            Entry::Zero => None,
        })
        .collect();
    let Some(v) = vals else {
        return Trend::Unclear;
    };
    let d: Vec<i64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    if d[1] - d[0] != d[2] - d[1] {
        return Trend::Unclear;
    }
    let second = d[1] - d[0];
    if second > 0 || (second == 0 && d[0] > 0) {
        if d[0] > 0 {
            Trend::Rising
        } else {
            Trend::Unclear
        }
    } else {
        Trend::Falling
    }
}

/// Scans term valuations. With `threshold = Some(N)` the scan continues
/// until all later terms provably exceed `q^N`; with `None` it stops once
/// the minimum has been passed.
fn scan_sum(s: &SumExpr, env: &Env, threshold: Option<i64>) -> EResult<Scan> {
    let body = &s.body;
    let period = period_of(body, env.spec.qsub);
    let bp = breakpoint_bound(body, &s.var, env)?;
    let budget = bp + 4 * period * (threshold.unwrap_or(0).abs() + 64) + 64;
    let starts: Vec<(i64, i64)> = match s.range {
        Range::From(lo) => vec![(lo, 1)],
        Range::Bilateral => vec![(0, 1), (-1, -1)],
    };
    let mut sides = Vec::new();
    for (start, dir) in starts {
        let mut entries: Vec<(i64, Entry)> = Vec::new();
        let mut n = start;
        loop {
            let h = build_header(body, &s.var, n, env, 0)?;
            if h.f.has_zero_denominator() {
                return Err(EvalError::Invalid(InvalidReason::VanishingDenominator));
            }
            if h.f.has_zero_numerator() {
                entries.push((n, Entry::Zero));
                if h.persistent_zero {
                    break;
                }
            } else {
                entries.push((n, Entry::Val(h.f.shift())));
            }
            let count = entries.len() as i64;
            if count > bp && count >= 4 * period {
                let mut all_rising = true;
                for r in 0..period as usize {
                    let samples: Vec<Entry> = (0..4)
                        .map(|j| entries[entries.len() - 1 - r - (3 - j) * period as usize].1)
                        .collect();
                    match trend(&samples) {
                        Trend::Rising => {
                            if let Some(t) = threshold {
                                if samples.iter().any(|e| matches!(e, Entry::Val(v) if *v <= t)) {
                                    all_rising = false;
                                }
                            }
                        }
                        Trend::AllZero => {}
                        Trend::Falling => return Err(EvalError::Invalid(InvalidReason::Nonterminating)),
                        Trend::Unclear => all_rising = false,
                    }
                }
                if all_rising {
                    break;
                }
            }
            if count > budget {
                return Err(EvalError::Invalid(InvalidReason::Nonterminating));
            }
            n += dir;
        }
        sides.push(entries);
    }
    Ok(Scan { sides })
}

fn eval_sum(s: &SumExpr, env: &Env, order: i64) -> EResult<QSeries> {
    let scan = scan_sum(s, env, Some(order))?;
    let used_min = scan
        .sides
        .iter()
        .flatten()
        .filter_map(|(_, e)| match e {
            Entry::Val(v) if *v <= order => Some(*v),
            _ => None,
        })
        .min();
    let Some(vmin) = used_min else {
        return Ok(QSeries::zero(order));
    };
    let width = order - vmin;
    let len = width as usize + 1;
    let mut acc = vec![BigInt::zero(); len];
    for side in &scan.sides {
        let mut buf = vec![BigInt::zero(); len];
        buf[0] = BigInt::one();
        let mut prev: BTreeMap<(i64, i64), i64> = BTreeMap::new();
        for (n, entry) in side {
            let h = build_header(&s.body, &s.var, *n, env, width)?;
            let cur = h.f.unit_factors();
            apply_diff(&mut buf, &prev, cur);
            prev = cur.clone();
            let Entry::Val(v) = entry else { continue };
            if *v > order {
                continue;
            }
            if h.f.is_non_integral() || !h.f.scalar().is_integer() {
                return Err(EvalError::Invalid(InvalidReason::NonIntegral));
            }
            let c = h.f.scalar().to_integer();
            let off = (v - vmin) as usize;
            for (i, b) in buf.iter().take(len - off).enumerate() {
                if !b.is_zero() {
                    acc[off + i] += &c * b;
                }
            }
        }
    }
    Ok(QSeries::from_coeffs(vmin, acc, order))
}

fn apply_diff(buf: &mut [BigInt], prev: &BTreeMap<(i64, i64), i64>, cur: &BTreeMap<(i64, i64), i64>) {
    let len = buf.len();
    let mut apply = |c: i64, k: i64, delta: i64| {
        if delta != 0 && (k as usize) < len {
            kernel::apply_binomial_power(buf, &BigInt::from(c), k as usize, delta);
        }
    };
    for (key, m) in cur {
        let old = prev.get(key).copied().unwrap_or(0);
        apply(key.0, key.1, m - old);
    }
    for (key, m) in prev {
        if !cur.contains_key(key) {
            apply(key.0, key.1, -m);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_expr;

    fn eval(src: &str, spec: &Specialization, order: i64) -> QSeries {
        evaluate(&parse_expr(src).unwrap(), spec, order).unwrap()
    }

    fn coeffs(s: &QSeries, order: i64) -> Vec<i64> {
        (0..=order)
            .map(|k| s.coefficient(k).unwrap().to_i64().unwrap())
            .collect()
    }

    #[test]
    fn rogers_ramanujan_sum() {
        let s = eval("sum(n>=0) q^(n^2) / poch(q; q; n)", &Specialization::new(), 9);
        assert_eq!(coeffs(&s, 9), vec![1, 1, 1, 1, 2, 2, 3, 3, 4, 5]);
    }

    #[test]
    fn product_side_matches_sum() {
        let spec = Specialization::new();
        let lhs = eval("sum(n>=0) q^(n^2+n) / poch(q; q; n)", &spec, 60);
        let rhs = eval("1 / poch(q^2, q^3; q^5; inf)", &spec, 60);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn half_integer_exponent_quadratic() {
        // against a term-by-term expansion
        let spec = Specialization::new();
        let s = eval("sum(n>=0) q^((n^2+n)/2) * poch(-q; q; n) / poch(q; q; n)", &spec, 30);
        let mut direct = QSeries::zero(30);
        for n in 0..10 {
            let t = eval(
                &format!("q^({}) * poch(-q; q; {n}) / poch(q; q; {n})", n * (n + 1) / 2),
                &spec,
                30,
            );
            direct = direct.add(&t).unwrap();
        }
        assert_eq!(s, direct);
    }

    #[test]
    fn substitution_and_symbols() {
        let spec = Specialization::new()
            .with_symbol("a", Monomial::new(-1, 1).unwrap())
            .with_qsub(QSub::new(1, 2));
        // (a; q)_3 with a = -q, q -> q^2: (1 + q)(1 + q^3)(1 + q^5)
        let s = eval("poch(a; q; 3)", &spec, 12);
        assert_eq!(coeffs(&s, 9), vec![1, 1, 0, 1, 1, 1, 1, 0, 1, 1]);
        let t = eval("poch(q; q; 2)", &Specialization::new().with_qsub(QSub::new(-1, 1)), 4);
        // (1 + q)(1 - q^2)
        assert_eq!(coeffs(&t, 4), vec![1, 1, -1, -1, 0]);
    }

    #[test]
    fn composition_of_substitutions() {
        let a = QSub::new(-1, 1);
        let b = QSub::new(1, 3);
        let e = parse_expr("poch(q; q^2; inf) * q").unwrap();
        let two_steps = evaluate(&e, &Specialization::new().with_qsub(a), 60)
            .unwrap()
            .substitute_power(3)
            .unwrap()
            .truncate(60)
            .unwrap();
        let one_step = evaluate(&e, &Specialization::new().with_qsub(b.after(a)), 60).unwrap();
        assert_eq!(two_steps, one_step);
    }

    #[test]
    fn bilateral_sum_is_triple_product() {
        let spec = Specialization::new();
        let lhs = eval("sum(n in Z) (-1)^n * q^((3*n^2-n)/2)", &spec, 80);
        let rhs = eval("poch(q; q; inf)", &spec, 80);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn terminating_and_invalid() {
        let spec = Specialization::new().with_int("m", 4);
        // sum_n [m n] (-1)^n q^{n(n-1)/2} = 0 for m >= 1
        let s = eval(
            "sum(n>=0) (-1)^n * q^((n^2-n)/2) * poch(q; q; m) / poch(q; q; n) / poch(q; q; m-n)",
            &spec,
            20,
        );
        assert!(s.is_zero());
        let e = parse_expr("1 / poch(q^(-2); q; 3)").unwrap();
        assert_eq!(
            evaluate(&e, &Specialization::new(), 10),
            Err(EvalError::Invalid(InvalidReason::VanishingDenominator))
        );
        let e = parse_expr("sum(n>=0) z^n").unwrap();
        let spec = Specialization::new().with_symbol("z", Monomial::ONE);
        assert_eq!(
            evaluate(&e, &spec, 10),
            Err(EvalError::Invalid(InvalidReason::Nonterminating))
        );
    }

    #[test]
    fn unbound_parameters() {
        let e = parse_expr("poch(a; q; inf)").unwrap();
        assert_eq!(
            evaluate(&e, &Specialization::new(), 5),
            Err(EvalError::Unbound("a".into()))
        );
    }

    #[test]
    fn division_by_a_sum() {
        let spec = Specialization::new();
        let s = eval("1 / (sum(n>=0) q^(n^2) / poch(q; q; n))", &spec, 40);
        let p = eval("poch(q, q^4; q^5; inf)", &spec, 40);
        assert_eq!(s, p);
    }
}
