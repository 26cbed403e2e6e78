//! Recognizing infinite products from series coefficients, and a small
//! search over families of single sums.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, EntryKind, Side};
use crate::dsl::{evaluate, parse_expr, RecordBody, Specialization};
use crate::QSeries;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProdError {
    #[error("series is zero")]
    Zero,
    #[error("constant term {0} is not 1")]
    NonunitConstant(BigInt),
    #[error("series has lead {0}; normalize first")]
    NonzeroLead(i64),
    #[error("series is known only through q^{have}, need q^{want}")]
    TooShort { have: i64, want: usize },
}

/// Exponents `e_1..e_n` with `f = prod_k (1 - q^k)^(-e_k) + O(q^(n+1))`.
/// Requires lead 0 and constant term 1.
pub fn prodmake(f: &QSeries, n: usize) -> Result<Vec<BigInt>, ProdError> {
    match f.lead() {
        None => return Err(ProdError::Zero),
        Some(0) => {}
        Some(l) => return Err(ProdError::NonzeroLead(l)),
    }
    if f.order() < n as i64 {
        return Err(ProdError::TooShort {
            have: f.order(),
            want: n,
        });
    }
    let mut g = f.dense_from(0);
    g.truncate(n + 1);
    if !g[0].is_one() {
        return Err(ProdError::NonunitConstant(g[0].clone()));
    }
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let e = g[k].clone();
        if !e.is_zero() {
            mul_binomial_power(&mut g, k, &e);
        }
        out.push(e);
    }
    debug_assert!(g[1..].iter().all(Zero::is_zero));
    Ok(out)
}

/// `g *= (1 - q^k)^e`, truncated to the length of `g`.
fn mul_binomial_power(g: &mut [BigInt], k: usize, e: &BigInt) {
    let n = g.len();
    if let Some(small) = e.to_i64().filter(|v| v.abs() <= 8) {
        for _ in 0..small.abs() {
            if small > 0 {
                for i in (k..n).rev() {
                    let v = g[i - k].clone();
                    g[i] -= v;
                }
            } else {
                for i in k..n {
                    let v = g[i - k].clone();
                    g[i] += v;
                }
            }
        }
        return;
    }
    // (1 - x)^e = sum_j b_j x^j with b_j = b_{j-1} (j - 1 - e) / j.
    let terms = (n - 1) / k;
    let mut b = vec![BigInt::one()];
    for j in 1..=terms {
        let j = BigInt::from(j);
        let next = &b[b.len() - 1] * (&j - BigInt::one() - e) / &j;
        b.push(next);
    }
    let src = g.to_vec();
    for i in 0..n {
        let mut acc = BigInt::zero();
        for (j, bj) in b.iter().enumerate().take(i / k + 1) {
            acc += bj * &src[i - j * k];
        }
        g[i] = acc;
    }
}

/// A purely periodic product `q^shift * prod_k (1 - q^k)^(-e_k)` with
/// `e_k = exponents[(k - 1) % period]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProductForm {
    pub period: usize,
    pub exponents: Vec<i64>,
    pub verified_to: usize,
    pub shift: i64,
}

impl ProductForm {
    pub fn exponent(&self, k: usize) -> i64 {
        self.exponents[(k - 1) % self.period]
    }

    /// Same product, ignoring how far it was checked.
    pub fn same_product(&self, other: &ProductForm) -> bool {
        self.period == other.period && self.exponents == other.exponents && self.shift == other.shift
    }

    /// True if `self` is `other` with `q -> q^d`.
    pub fn is_rescaling_of(&self, other: &ProductForm, d: usize) -> bool {
        if d < 2 || self.shift != other.shift * d as i64 {
            return false;
        }
        let span = self.period.lcm(&(other.period * d));
        (1..=span).all(|k| {
            let want = if k % d == 0 { other.exponent(k / d) } else { 0 };
            self.exponent(k) == want
        })
    }

    /// The product as DSL text.
    pub fn to_dsl(&self) -> String {
        let m = self.period;
        let mut by_exp: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &e) in self.exponents.iter().enumerate() {
            if e != 0 {
                by_exp.entry(e).or_default().push(i + 1);
            }
        }
        let poch = |rs: &[usize], p: i64| {
            let args: Vec<String> = rs.iter().map(|&r| q_pow(r as i64)).collect();
            let base = q_pow(m as i64);
            if p == 1 {
                format!("poch({}; {base}; inf)", args.join(", "))
            } else {
                format!("poch({}; {base}; inf)^{p}", args.join(", "))
            }
        };
        let mut num: Vec<String> = Vec::new();
        if self.shift != 0 {
            num.push(q_pow(self.shift));
        }
        let mut den = Vec::new();
        for (&e, rs) in &by_exp {
            if e < 0 {
                num.push(poch(rs, -e));
            } else {
                den.push(poch(rs, e));
            }
        }
        let mut s = if num.is_empty() {
            "1".to_string()
        } else {
            num.join(" * ")
        };
        for d in den {
            s.push_str(" / ");
            s.push_str(&d);
        }
        s
    }
}

fn q_pow(e: i64) -> String {
    match e {
        1 => "q".to_string(),
        e if e < 0 => format!("q^({e})"),
        e => format!("q^{e}"),
    }
}

/// Smallest period `m <= m_max` of `e`, accepted only when `e` covers at
/// least three full periods and `guard` comparisons `e_{k+m} = e_k`.
pub fn detect_period(e: &[BigInt], m_max: usize, guard: usize) -> Option<ProductForm> {
    let n = e.len();
    let small: Vec<i64> = e.iter().map(|v| v.to_i64()).collect::<Option<_>>()?;
    (1..=m_max.min(n)).find_map(|m| {
        if n < 3 * m || n - m < guard {
            return None;
        }
        (m..n).all(|i| small[i] == small[i - m]).then(|| ProductForm {
            period: m,
            exponents: small[..m].to_vec(),
            verified_to: n,
            shift: 0,
        })
    })
}

/// Factors out `q^lead`, runs [`prodmake`] through `q^n` of the remaining
/// unit series, and looks for a period.
pub fn recognize(f: &QSeries, n: usize, m_max: usize) -> Result<Option<ProductForm>, ProdError> {
    let lead = f.lead().ok_or(ProdError::Zero)?;
    let unit = f.shift(-lead);
    let e = prodmake(&unit, n)?;
    Ok(detect_period(&e, m_max, 2 * m_max).map(|p| ProductForm { shift: lead, ..p }))
}

/// `q^shift prod_k (1 - q^k)^(-e_k)` through `q^order`.
pub fn expand_product(form: &ProductForm, order: i64) -> QSeries {
    let n = (order - form.shift).max(0) as usize;
    let mut g = vec![BigInt::zero(); n + 1];
    g[0] = BigInt::one();
    for k in 1..=n {
        let e = form.exponent(k);
        if e != 0 {
            mul_binomial_power(&mut g, k, &BigInt::from(-e));
        }
    }
    QSeries::from_coeffs(0, g, n as i64).shift(form.shift)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct IntRange(pub i64, pub i64);

impl IntRange {
    fn values(self) -> impl Iterator<Item = i64> {
        self.0..=self.1
    }
}

fn unit_range() -> IntRange {
    IntRange(1, 1)
}

fn plus_only() -> Vec<String> {
    vec!["+".to_string()]
}

fn default_max_exponent() -> i64 {
    3
}

/// Sums `sum(n>=0) sign^n q^((a n^2 + b n)/c) * numerator / denominator`
/// with `a`, `b`, `c` ranging over inclusive intervals and `numerator`,
/// `denominator` drawn from menus of DSL text in `n`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchFamily {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub a: IntRange,
    pub b: IntRange,
    #[serde(default = "unit_range")]
    pub c: IntRange,
    #[serde(default = "plus_only")]
    pub signs: Vec<String>,
    pub numerators: Vec<String>,
    pub denominators: Vec<String>,
    pub max_period: usize,
    #[serde(default = "default_max_exponent")]
    pub max_exponent: i64,
}

const BUILTIN_FAMILIES: [(&str, &str); 2] = [
    ("gg-triple", include_str!("../data/families/gg-triple.toml")),
    ("c13-pair", include_str!("../data/families/c13-pair.toml")),
];

#[derive(Debug, thiserror::Error)]
pub enum FamilyError {
    #[error("cannot read {path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error("malformed family file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("sign must be \"+\" or \"-\", got {0:?}")]
    BadSign(String),
}

impl SearchFamily {
    pub fn parse(text: &str) -> Result<Self, FamilyError> {
        let f: SearchFamily = toml::from_str(text)?;
        if let Some(s) = f.signs.iter().find(|s| *s != "+" && *s != "-") {
            return Err(FamilyError::BadSign(s.clone()));
        }
        Ok(f)
    }

    /// A family shipped with the crate, by name.
    pub fn builtin(name: &str) -> Option<Self> {
        BUILTIN_FAMILIES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Self::parse(text).expect("built-in family parses"))
    }

    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTIN_FAMILIES.iter().map(|(n, _)| *n)
    }

    pub fn from_file(path: &Path) -> Result<Self, FamilyError> {
        let text = std::fs::read_to_string(path).map_err(|err| FamilyError::Io {
            path: path.display().to_string(),
            err,
        })?;
        Self::parse(&text)
    }

    /// Every sum in the family, in a fixed order.
    pub fn instantiations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in self.a.values() {
            for b in self.b.values() {
                for c in self.c.values().filter(|&c| c > 0) {
                    for sign in &self.signs {
                        for num in &self.numerators {
                            for den in &self.denominators {
                                out.push(sum_text(a, b, c, sign == "-", num, den));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn sum_text(a: i64, b: i64, c: i64, negative: bool, num: &str, den: &str) -> String {
    let mut parts = Vec::new();
    if negative {
        parts.push("(-1)^n".to_string());
    }
    let poly = match (a, b) {
        (0, 0) => String::new(),
        _ => {
            let mut s = String::new();
            let mut push = |coef: i64, var: &str| {
                if coef == 0 {
                    return;
                }
                if !s.is_empty() {
                    s.push(if coef < 0 { '-' } else { '+' });
                } else if coef < 0 {
                    s.push('-');
                }
                if coef.abs() != 1 {
                    s.push_str(&format!("{}*", coef.abs()));
                }
                s.push_str(var);
            };
            push(a, "n^2");
            push(b, "n");
            s
        }
    };
    if !poly.is_empty() {
        if c == 1 {
            parts.push(format!("q^({poly})"));
        } else {
            parts.push(format!("q^(({poly})/{c})"));
        }
    }
    if num.trim() != "1" {
        parts.push(num.trim().to_string());
    }
    let mut body = if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" * ")
    };
    for f in split_product(den) {
        if f != "1" {
            body = format!("{body} / {f}");
        }
    }
    format!("sum(n>=0) {body}")
}

/// Splits `A * B * ...` at top-level `*`.
fn split_product(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out
}

/// A product recognized in the catalog: which identity's sum side it is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownProduct {
    pub id: String,
    pub form: ProductForm,
}

/// Product forms of the sum side of every catalog identity that has one.
pub fn catalog_products(cat: &Catalog, n: usize, m_max: usize) -> Vec<KnownProduct> {
    let ids: Vec<&str> = cat
        .entries()
        .iter()
        .filter(|e| e.kind == EntryKind::Identity)
        .map(|e| e.id())
        .collect();
    ids.par_iter()
        .filter_map(|id| {
            let s = cat
                .evaluate_side(id, Side::Lhs, &Specialization::default(), n as i64)
                .ok()?
                .ok()?;
            let form = recognize(&s, n, m_max).ok()??;
            Some(KnownProduct {
                id: id.to_string(),
                form,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rescaling {
    pub id: String,
    pub d: usize,
}

/// One recognized candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub lhs_dsl: String,
    pub period: usize,
    pub pattern: Vec<i64>,
    pub shift: i64,
    pub verified_to: usize,
    pub product_dsl: String,
    /// Catalog identities with the same product.
    pub known: Vec<String>,
    /// Catalog identities whose sum side is this exact expression.
    pub same_lhs: Vec<String>,
    /// Catalog products this one becomes under `q -> q^d`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rescaled: Vec<Rescaling>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub family: String,
    #[serde(rename = "N")]
    pub order: usize,
    pub tried: usize,
    /// Instantiations rejected by the evaluator (non-integral, nonterminating, ...).
    pub invalid: usize,
    pub candidates: Vec<Candidate>,
    pub ms: u64,
}

enum Outcome {
    Invalid,
    NotProduct,
    Found(String, ProductForm),
}

fn try_instance(text: &str, n: usize, fam: &SearchFamily) -> Outcome {
    let Ok(expr) = parse_expr(text) else {
        return Outcome::Invalid;
    };
    let Ok(series) = evaluate(&expr, &Specialization::default(), n as i64) else {
        return Outcome::Invalid;
    };
    match recognize(&series, n, fam.max_period) {
        Ok(Some(form)) if form.exponents.iter().all(|e| e.abs() <= fam.max_exponent) => {
            Outcome::Found(text.to_string(), form)
        }
        _ => Outcome::NotProduct,
    }
}

/// Runs every instantiation of `fam` through `q^n` and keeps those whose
/// coefficients are a periodic product with small exponents. Each hit is
/// matched against the catalog by product and by sum expression.
pub fn search(fam: &SearchFamily, cat: &Catalog, n: usize) -> SearchReport {
    let start = std::time::Instant::now();
    let texts = fam.instantiations();
    let outcomes: Vec<Outcome> = texts.par_iter().map(|t| try_instance(t, n, fam)).collect();
    let invalid = outcomes.iter().filter(|o| matches!(o, Outcome::Invalid)).count();
    let found: Vec<(String, ProductForm)> = outcomes
        .into_iter()
        .filter_map(|o| match o {
            Outcome::Found(t, f) => Some((t, f)),
            _ => None,
        })
        .collect();
    let known = if found.is_empty() {
        Vec::new()
    } else {
        catalog_products(cat, n, fam.max_period.max(24))
    };
    let lhs_index: Vec<(String, crate::dsl::Expr)> = cat
        .entries()
        .iter()
        .filter_map(|e| match &e.record.body {
            RecordBody::Equation { lhs, .. } => Some((e.id().to_string(), lhs.clone())),
            RecordBody::Instance(_) => None,
        })
        .collect();
    let mut candidates = Vec::new();
    for (text, form) in found {
        let parsed = parse_expr(&text).expect("parsed once already");
        let same_lhs = lhs_index
            .iter()
            .filter(|(_, l)| *l == parsed)
            .map(|(id, _)| id.clone())
            .collect();
        let matches: Vec<String> = known
            .iter()
            .filter(|k| k.form.same_product(&form))
            .map(|k| k.id.clone())
            .collect();
        let rescaled = known
            .iter()
            .flat_map(|k| {
                (2..=form.period)
                    .filter(|&d| form.is_rescaling_of(&k.form, d))
                    .map(|d| Rescaling { id: k.id.clone(), d })
            })
            .collect();
        candidates.push(Candidate {
            lhs_dsl: text,
            period: form.period,
            pattern: form.exponents.clone(),
            shift: form.shift,
            verified_to: form.verified_to,
            product_dsl: form.to_dsl(),
            known: matches,
            same_lhs,
            rescaled,
        });
    }
    SearchReport {
        family: fam.name.clone(),
        order: n,
        tried: texts.len(),
        invalid,
        candidates,
        ms: start.elapsed().as_millis() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(c: &[i64], order: i64) -> QSeries {
        QSeries::from_i64s(0, c, order)
    }

    fn ints(e: &[BigInt]) -> Vec<i64> {
        e.iter().map(|v| v.to_i64().unwrap()).collect()
    }

    /// Exponents through the log-derivative: with `c_n = sum_{d|n} d e_d`,
    /// `n f_n = sum_{j=1}^n c_j f_{n-j}`.
    fn prodmake_by_log_derivative(f: &[BigInt]) -> Vec<BigInt> {
        let n = f.len() - 1;
        let mut c = vec![BigInt::zero(); n + 1];
        let mut e = vec![BigInt::zero(); n + 1];
        for m in 1..=n {
            let mut s = BigInt::from(m) * &f[m];
            for j in 1..m {
                s -= &c[j] * &f[m - j];
            }
            c[m] = s;
            let mut r = c[m].clone();
            for d in 1..m {
                if m % d == 0 {
                    r -= BigInt::from(d) * &e[d];
                }
            }
            e[m] = r / BigInt::from(m);
        }
        e[1..].to_vec()
    }

    #[test]
    fn trivial_products() {
        let geo = series(&[1; 11], 10);
        assert_eq!(ints(&prodmake(&geo, 10).unwrap()), [1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        let lin = series(&[1, -1], 10);
        assert_eq!(ints(&prodmake(&lin, 10).unwrap()), [-1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            prodmake(&series(&[2, 1], 5), 5),
            Err(ProdError::NonunitConstant(BigInt::from(2)))
        );
        assert_eq!(prodmake(&QSeries::zero(5), 5), Err(ProdError::Zero));
        assert_eq!(prodmake(&series(&[0, 1], 5), 5), Err(ProdError::NonzeroLead(1)));
        assert_eq!(
            prodmake(&series(&[1], 5), 6),
            Err(ProdError::TooShort { have: 5, want: 6 })
        );
    }

    #[test]
    fn agrees_with_log_derivative_on_arbitrary_series() {
        let f = series(&[1, 3, -2, 7, 0, 5, -11, 4, 9, -1, 2, 13, 6, -8, 1, 3, 30], 16);
        let want = prodmake_by_log_derivative(&f.dense_from(0));
        assert_eq!(prodmake(&f, 16).unwrap(), want);
    }

    #[test]
    fn rogers_ramanujan_exponents() {
        let cat = Catalog::builtin();
        let f = cat
            .evaluate_side("rr1-a", Side::Lhs, &Specialization::default(), 120)
            .unwrap()
            .unwrap();
        let e = prodmake(&f, 120).unwrap();
        for (i, v) in ints(&e).into_iter().enumerate() {
            let k = i + 1;
            assert_eq!(v, i64::from(k % 5 == 1 || k % 5 == 4), "k={k}");
        }
        let form = detect_period(&e, 12, 24).unwrap();
        assert_eq!((form.period, form.exponents), (5, vec![1, 0, 0, 1, 0]));
    }

    #[test]
    fn aperiodic_has_no_period() {
        let e: Vec<BigInt> = (1..=60)
            .map(|k: i64| BigInt::from((k as f64).sqrt().fract() == 0.0))
            .collect();
        assert_eq!(detect_period(&e, 12, 24), None);
    }

    #[test]
    fn period_needs_three_repetitions() {
        let e: Vec<BigInt> = [1, 0, 0, 1, 0, 1, 0, 0, 1, 0]
            .iter()
            .map(|&v| BigInt::from(v))
            .collect();
        assert_eq!(detect_period(&e, 5, 5), None);
    }

    #[test]
    fn expand_then_recognize() {
        let form = ProductForm {
            period: 6,
            exponents: vec![2, -1, 0, 0, 3, -1],
            verified_to: 90,
            shift: 2,
        };
        let s = expand_product(&form, 92);
        assert_eq!(recognize(&s, 90, 12).unwrap(), Some(form));
    }

    #[test]
    fn dsl_of_product_evaluates_back() {
        let form = ProductForm {
            period: 8,
            exponents: vec![0, 1, 1, 0, 0, 0, 1, -2],
            verified_to: 50,
            shift: 1,
        };
        let text = form.to_dsl();
        assert_eq!(text, "q * poch(q^8; q^8; inf)^2 / poch(q^2, q^3, q^7; q^8; inf)");
        let got = evaluate(&parse_expr(&text).unwrap(), &Specialization::default(), 50).unwrap();
        assert_eq!(got, expand_product(&form, 50));
    }

    #[test]
    fn rescaling() {
        let rr = ProductForm {
            period: 5,
            exponents: vec![1, 0, 0, 1, 0],
            verified_to: 60,
            shift: 0,
        };
        let mut ex = vec![0; 10];
        ex[1] = 1;
        ex[7] = 1;
        let scaled = ProductForm {
            period: 10,
            exponents: ex,
            verified_to: 60,
            shift: 0,
        };
        assert!(scaled.is_rescaling_of(&rr, 2));
        assert!(!scaled.is_rescaling_of(&rr, 5));
        assert!(!rr.is_rescaling_of(&scaled, 2));
    }

    #[test]
    fn sum_text_shapes() {
        assert_eq!(
            sum_text(1, 0, 1, false, "1", "poch(q; q; n)"),
            "sum(n>=0) q^(n^2) / poch(q; q; n)"
        );
        assert_eq!(
            sum_text(3, 3, 2, true, "poch(-q; q; n)", "1"),
            "sum(n>=0) (-1)^n * q^((3*n^2+3*n)/2) * poch(-q; q; n)"
        );
        assert_eq!(sum_text(2, -1, 1, false, "1", "1"), "sum(n>=0) q^(2*n^2-n)");
        assert_eq!(
            sum_text(
                2,
                0,
                1,
                false,
                "poch(q; q^2; n)",
                "poch(-q; q^2; n) * poch(q^4; q^4; n)"
            ),
            "sum(n>=0) q^(2*n^2) * poch(q; q^2; n) / poch(-q; q^2; n) / poch(q^4; q^4; n)"
        );
    }

    #[test]
    fn family_file() {
        let fam = SearchFamily::parse(
            r#"
name = "rr"
a = [1, 1]
b = [0, 1]
numerators = ["1"]
denominators = ["poch(q; q; n)"]
max_period = 10
"#,
        )
        .unwrap();
        assert_eq!(fam.instantiations().len(), 2);
        let r = search(&fam, Catalog::builtin(), 60);
        assert_eq!(r.candidates.len(), 2);
        assert!(r.candidates[0].known.contains(&"rr1-a".to_string()));
        assert!(r.candidates[0].same_lhs.contains(&"rr1-a".to_string()));
        assert!(SearchFamily::parse("name = 1").is_err());
    }

    #[test]
    fn builtin_families_parse() {
        for name in SearchFamily::builtin_names() {
            assert_eq!(SearchFamily::builtin(name).unwrap().name, name);
        }
        assert!(SearchFamily::builtin("nope").is_none());
    }

    #[test]
    fn empty_family_finds_nothing() {
        let fam = SearchFamily::parse(
            r#"
name = "empty"
a = [1, 1]
b = [0, 0]
numerators = []
denominators = ["1"]
max_period = 10
"#,
        )
        .unwrap();
        let r = search(&fam, Catalog::builtin(), 40);
        assert_eq!((r.tried, r.candidates.len()), (0, 0));
    }
}
