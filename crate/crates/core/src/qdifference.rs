//! Fermionic and bosonic polynomial sequences whose common limit proves an
//! identity through a q-difference equation, and the continued fraction
//! numerators behind a gap-partition theorem.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::catalog::{Catalog, Side};
use crate::dsl::{parse_record, RecordBody, Specialization};
use crate::qspecial::TTable;
use crate::series::biv::apply_binomial_dense;
use crate::verify::{verify_chain, Chain, Step};
use crate::verify::{SpecGrid, Status, VerifyError};
use crate::{Poly, QSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeqKind {
    #[serde(rename = "P_fermionic")]
    PFermionic,
    #[serde(rename = "Q_bosonic")]
    QBosonic,
    #[serde(rename = "P_cf_numerator")]
    PCfNumerator,
    #[serde(rename = "S_gap_gf")]
    SGapGf,
}

/// Exact polynomials indexed from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySeq {
    pub kind: SeqKind,
    pub values: Vec<Poly>,
}

impl PolySeq {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<&Poly> {
        self.values.get(n)
    }

    /// First index where the two sequences differ.
    pub fn first_difference(&self, other: &PolySeq) -> Option<usize> {
        let n = self.len().min(other.len());
        (0..n).find(|&i| self.values[i] != other.values[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QdiffError {
    #[error("truncation order {order} too small: P_{n_max} needs q^{needed}")]
    TruncationTooSmall { n_max: usize, needed: usize, order: i64 },
    #[error("coefficient of q^{k} changes between Q_{n} and Q_{next}", next = n + 1)]
    NotStable { k: usize, n: usize },
}

fn poly(c: &[i64]) -> Poly {
    Poly::from_i64s(c)
}

/// `P_0..P_{n_max}` from the three-term recurrence obtained by comparing
/// powers of `t` in the q-difference equation for `f(t,q)`.
pub fn p_n_recurrence(n_max: usize) -> PolySeq {
    let seeds = [
        poly(&[1]),
        Poly::one().add(&Poly::monomial(1, 3)),
        poly(&[1, 0, 0, 1, 2, 0, 0, 0, 1]),
    ];
    let mut values: Vec<Poly> = seeds.into_iter().take(n_max + 1).collect();
    for n in 3..=n_max {
        let a = poly(&[1, 1, -1]).add(&Poly::monomial(1, 2 * n + 1));
        let b = poly(&[0, -1, 1, 1]).add(&Poly::monomial(1, 2 * n));
        let p = a
            .mul(&values[n - 1])
            .add(&b.mul(&values[n - 2]))
            .sub(&values[n - 3].shift(3));
        values.push(p);
    }
    PolySeq {
        kind: SeqKind::PFermionic,
        values,
    }
}

/// t-coefficients of `sum_k t^k q^(k^2+shift*k) (-tq;q^2)_k /
/// ((tq;q^2)_k (-tq^2;q^2)_k (t;q^2)_{k+1})`, through `t^n_max` and `q^(len-1)`.
fn fermionic_rows(shift: usize, n_max: usize, len: usize) -> Vec<Vec<BigInt>> {
    let d = n_max + 1;
    let mut acc = vec![vec![BigInt::zero(); len]; d];
    let one = BigInt::one();
    let minus = -BigInt::one();
    for k in 0..d {
        let lead = k * k + shift * k;
        if lead >= len {
            break;
        }
        // Work on t^k * (...) with rows shifted down by k.
        let mut term = vec![vec![BigInt::zero(); len]; d - k];
        term[0][lead] = BigInt::one();
        for i in 0..k {
            apply_binomial_dense(&mut term, &minus, 1, 2 * i + 1, false);
            apply_binomial_dense(&mut term, &one, 1, 2 * i + 1, true);
            apply_binomial_dense(&mut term, &minus, 1, 2 * i + 2, true);
        }
        for i in 0..=k {
            apply_binomial_dense(&mut term, &one, 1, 2 * i, true);
        }
        for (row, src) in acc[k..].iter_mut().zip(term) {
            for (a, b) in row.iter_mut().zip(src) {
                *a += b;
            }
        }
    }
    acc
}

fn extract(rows: Vec<Vec<BigInt>>, kind: SeqKind) -> PolySeq {
    PolySeq {
        kind,
        values: rows.into_iter().map(Poly::from_coeffs).collect(),
    }
}

/// `P_0..P_{n_max}` read off the bivariate expansion of `f(t,q)`.
/// `order` must reach `deg P_{n_max} = n_max^2 + 2 n_max`.
pub fn p_n_bivariate(n_max: usize, order: i64) -> Result<PolySeq, QdiffError> {
    let needed = n_max * n_max + 2 * n_max;
    if order < needed as i64 {
        return Err(QdiffError::TruncationTooSmall { n_max, needed, order });
    }
    Ok(extract(
        fermionic_rows(2, n_max, order as usize + 1),
        SeqKind::PFermionic,
    ))
}

/// The fermionic sequence for the partner identity: the same construction
/// with `q^(k^2)` in place of `q^(k^2+2k)`. Degrees are at most `n^2+2n`.
pub fn p_n_partner(n_max: usize) -> PolySeq {
    let order = n_max * n_max + 2 * n_max + 1;
    extract(fermionic_rows(0, n_max, order), SeqKind::PFermionic)
}

fn theta_sum(table: &TTable, l: i64, parts: &[(i64, i64, i64, usize)]) -> Poly {
    // Each part is (quadratic, linear, A offset, q shift):
    // sum_j (-1)^j q^(shift + a j^2 + b j) U(l, 5j + off).
    let bound = (l + 5).div_euclid(5) + 1;
    let mut acc = Poly::zero();
    for &(a, b, off, shift) in parts {
        for j in [-bound - 1, bound + 1] {
            assert!(table.u(l, 5 * j + off).is_zero(), "tail term j={j} does not vanish");
        }
        for j in -bound..=bound {
            let u = table.u(l, 5 * j + off);
            if u.is_zero() {
                continue;
            }
            let e = a * j * j + b * j;
            let term = u.shift((shift as i64 + e) as usize);
            acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
    }
    acc
}

const QD_THETA: [(i64, i64, i64, usize); 2] = [(10, 3, 0, 0), (10, 13, 3, 4)];
const PARTNER_THETA: [(i64, i64, i64, usize); 2] = [(10, 1, 0, 0), (10, 9, 2, 2)];

/// `Q_0..Q_{n_max}` in the bosonic form built from `U(n+1, A)`.
pub fn q_n_bosonic(n_max: usize) -> PolySeq {
    let table = TTable::new(n_max as i64 + 1);
    q_n_from_table(&table, n_max)
}

fn q_n_from_table(table: &TTable, n_max: usize) -> PolySeq {
    PolySeq {
        kind: SeqKind::QBosonic,
        values: (0..=n_max).map(|n| theta_sum(table, n as i64 + 1, &QD_THETA)).collect(),
    }
}

/// The partner's bosonic sequence, built from `U(n, A)`.
pub fn q_n_partner(n_max: usize) -> PolySeq {
    let table = TTable::new(n_max as i64);
    q_n_partner_from_table(&table, n_max)
}

fn q_n_partner_from_table(table: &TTable, n_max: usize) -> PolySeq {
    PolySeq {
        kind: SeqKind::QBosonic,
        values: (0..=n_max)
            .map(|n| theta_sum(table, n as i64, &PARTNER_THETA))
            .collect(),
    }
}

/// Compares the partner's bosonic and fermionic sequences for `n <= n_max`.
pub fn check_sills_bosonic(n_max: usize) -> Status {
    match q_n_partner(n_max).first_difference(&p_n_partner(n_max)) {
        None => Status::Pass,
        Some(_) => Status::Fail,
    }
}

/// Coefficients of `q^0..q^max_deg` in the limit of `seq`, after checking
/// that the coefficient of `q^k` is constant from index `k` on.
pub fn stable_limit(seq: &PolySeq, max_deg: usize) -> Result<QSeries, QdiffError> {
    let last = seq.len().saturating_sub(1);
    for k in 0..=max_deg {
        for n in k..last {
            if seq.values[n].coeff(k) != seq.values[n + 1].coeff(k) {
                return Err(QdiffError::NotStable { k, n });
            }
        }
    }
    let coeffs = (0..=max_deg).map(|k| seq.values[last].coeff(k)).collect();
    Ok(QSeries::from_coeffs(0, coeffs, max_deg as i64))
}

/// Limits of the two bosonic sequences through `q^max_deg`, computed from a
/// degree-capped table with a margin of extra indices.
pub fn bosonic_limits(max_deg: usize) -> Result<(QSeries, QSeries), QdiffError> {
    let n_max = max_deg + 8;
    let table = TTable::truncated(n_max as i64 + 1, max_deg);
    let q = stable_limit(&q_n_from_table(&table, n_max), max_deg)?;
    let p = stable_limit(&q_n_partner_from_table(&table, n_max), max_deg)?;
    Ok((q, p))
}

/// `P_0..P_{v_max}`: numerators of the continued fraction
/// `1 + q^2 + q^3/(1 + q^4 + q^5/(1 + q^6 + ...))`.
pub fn p_v_continued_fraction(v_max: usize) -> PolySeq {
    let mut values = vec![poly(&[1, 0, 1]), poly(&[1, 0, 1, 1, 1, 0, 1])];
    values.truncate(v_max + 1);
    for v in 2..=v_max {
        let p = Poly::one()
            .add(&Poly::monomial(1, 2 * v + 2))
            .mul(&values[v - 1])
            .add(&values[v - 2].shift(2 * v + 1));
        values.push(p);
    }
    PolySeq {
        kind: SeqKind::PCfNumerator,
        values,
    }
}

/// Partitions with smallest part >= 2, largest part <= 2v+2, consecutive
/// parts differing by >= 2, and by >= 3 below an odd part.
pub fn type_v_partitions(v: usize) -> Vec<Vec<usize>> {
    fn go(max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        let top = match cur.last() {
            None => max,
            Some(&p) if p % 2 == 1 => p.saturating_sub(3),
            Some(&p) => p.saturating_sub(2),
        };
        for part in 2..=top {
            cur.push(part);
            go(max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(2 * v + 2, &mut Vec::new(), &mut out);
    out
}

/// `S_v = sum_n c_v(n) q^n` for `v <= v_max`, by listing type-v partitions
/// of size `<= order`.
pub fn s_v_generating(v_max: usize, order: usize) -> PolySeq {
    let values = (0..=v_max)
        .map(|v| {
            let mut c = vec![0i64; order + 1];
            for p in type_v_partitions(v) {
                let n: usize = p.iter().sum();
                if n <= order {
                    c[n] += 1;
                }
            }
            Poly::from_i64s(&c)
        })
        .collect();
    PolySeq {
        kind: SeqKind::SGapGf,
        values,
    }
}

/// Checks `c_v(n) = c_{v-1}(n) + c_{v-1}(n-2v-2) + c_{v-2}(n-2v-1)` for
/// `2 <= v <= v_max`, `n <= n_max`. Returns the first failing `(v, n)`.
pub fn check_c_v_recurrence(v_max: usize, n_max: usize) -> Option<(usize, usize)> {
    let s = s_v_generating(v_max, n_max);
    let c = |v: usize, n: i64| -> BigInt {
        if n < 0 {
            BigInt::zero()
        } else {
            s.values[v].coeff(n as usize)
        }
    };
    for v in 2..=v_max {
        for n in 0..=n_max as i64 {
            let rhs = c(v - 1, n) + c(v - 1, n - 2 * v as i64 - 2) + c(v - 2, n - 2 * v as i64 - 1);
            if c(v, n) != rhs {
                return Some((v, n as usize));
            }
        }
    }
    None
}

const QD_PREFACTOR: &str = "poch(-q; q^2; inf) / poch(q^2; q^2; inf)";

/// The limit of each bosonic sequence rewritten as a product: Jacobi's
/// triple product on each theta sum, then the quintuple-type identity with
/// `q -> -q^5`.
pub fn assembly_chains() -> Vec<Chain> {
    use crate::verify::Step::Expr;
    vec![
        Chain {
            name: "qdeq-assembly",
            symbols: &[],
            steps: vec![
                Expr("poch(-q; q^2; inf) / poch(q^2; q^2; inf) * (sum(j in Z) (-1)^j * q^(10*j^2+3*j) + q^4 * sum(j in Z) (-1)^j * q^(10*j^2+13*j))"),
                Expr("poch(-q; q^2; inf) / poch(q^2; q^2; inf) * (poch(q^7, q^13, q^20; q^20; inf) - q * poch(q^3, q^17, q^20; q^20; inf))"),
                Step::Side {
                    of: "baileyeq-qd",
                    side: Side::Lhs,
                    times: QD_PREFACTOR,
                },
                Step::Side {
                    of: "baileyeq-qd",
                    side: Side::Rhs,
                    times: QD_PREFACTOR,
                },
                Step::Side {
                    of: "instance(qdeq; q -> -q)",
                    side: Side::Rhs,
                    times: "1",
                },
            ],
        },
        Chain {
            name: "id21eq-assembly",
            symbols: &[],
            steps: vec![
                Expr("poch(-q; q^2; inf) / poch(q^2; q^2; inf) * (sum(j in Z) (-1)^j * q^(10*j^2+j) + q^2 * sum(j in Z) (-1)^j * q^(10*j^2+9*j))"),
                Expr("poch(-q; q^2; inf) / poch(q^2; q^2; inf) * (poch(q^9, q^11, q^20; q^20; inf) + q^2 * poch(q, q^19, q^20; q^20; inf))"),
                Step::Side {
                    of: "baileyeq-id21",
                    side: Side::Lhs,
                    times: QD_PREFACTOR,
                },
                Step::Side {
                    of: "baileyeq-id21",
                    side: Side::Rhs,
                    times: QD_PREFACTOR,
                },
                Step::Side {
                    of: "instance(id21eq; q -> -q)",
                    side: Side::Rhs,
                    times: "1",
                },
            ],
        },
    ]
}

/// The product side of `id` with `q -> -q`, through `q^max_deg`.
pub fn negated_product(cat: &Catalog, id: &str, max_deg: usize) -> Result<QSeries, VerifyError> {
    let rec = parse_record(&format!("x: instance({id}; q -> -q)")).expect("well-formed instance");
    let RecordBody::Instance(inst) = rec.body else {
        unreachable!("parsed as an instance")
    };
    cat.evaluate_instance(&inst, Side::Rhs, &Specialization::default(), max_deg as i64)?
        .map_err(|err| VerifyError::Eval {
            id: id.to_string(),
            err,
        })
}

/// One line of the q-difference suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub ms: u64,
}

impl Check {
    fn new(name: &str, ok: bool, detail: String, start: Instant) -> Check {
        Check {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
            ms: start.elapsed().as_millis() as u64,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Sizes for [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSizes {
    /// `P_n = Q_n` and the partner check run for `n <= n_max`.
    pub n_max: usize,
    /// Recurrence against bivariate extraction for `n <= n_biv`.
    pub n_biv: usize,
    /// Stable coefficients are compared through this degree.
    pub limit_deg: usize,
    pub v_max: usize,
    /// `c_v` recurrence checked for `n <= c_n_max`.
    pub c_n_max: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        SuiteSizes {
            n_max: 40,
            n_biv: 25,
            limit_deg: 60,
            v_max: 8,
            c_n_max: 60,
        }
    }
}

fn first_diff_detail(d: Option<usize>, upto: usize) -> String {
    match d {
        None => format!("equal for n <= {upto}"),
        Some(n) => format!("first difference at n = {n}"),
    }
}

/// Runs every exact check of the module.
pub fn run_suite(cat: &Catalog, sizes: SuiteSizes) -> Result<Vec<Check>, VerifyError> {
    let mut out = Vec::new();

    let t = Instant::now();
    let p = p_n_recurrence(sizes.n_max);
    let d = q_n_bosonic(sizes.n_max).first_difference(&p);
    out.push(Check::new(
        "P_n = Q_n",
        d.is_none(),
        first_diff_detail(d, sizes.n_max),
        t,
    ));

    let t = Instant::now();
    let needed = sizes.n_biv * sizes.n_biv + 2 * sizes.n_biv;
    let (ok, detail) = match p_n_bivariate(sizes.n_biv, needed as i64) {
        Ok(b) => {
            let d = p_n_recurrence(sizes.n_biv).first_difference(&b);
            (d.is_none(), first_diff_detail(d, sizes.n_biv))
        }
        Err(e) => (false, e.to_string()),
    };
    out.push(Check::new("recurrence = bivariate", ok, detail, t));

    let t = Instant::now();
    let d = q_n_partner(sizes.n_max).first_difference(&p_n_partner(sizes.n_max));
    out.push(Check::new(
        "partner P_n = Q_n",
        d.is_none(),
        first_diff_detail(d, sizes.n_max),
        t,
    ));

    let t = Instant::now();
    let limits = bosonic_limits(sizes.limit_deg);
    for (i, (name, id)) in [("Q_n limit", "qdeq"), ("partner Q_n limit", "id21eq")]
        .into_iter()
        .enumerate()
    {
        let (ok, detail) = match &limits {
            Ok(pair) => {
                let lim = if i == 0 { &pair.0 } else { &pair.1 };
                let want = negated_product(cat, id, sizes.limit_deg)?;
                match crate::verify::compare(lim, &want) {
                    None => (
                        true,
                        format!("matches {id} product (q -> -q) through q^{}", sizes.limit_deg),
                    ),
                    Some(m) => (false, format!("differs from {id} product at q^{}", m.exp)),
                }
            }
            Err(e) => (false, e.to_string()),
        };
        out.push(Check::new(name, ok, detail, t));
    }

    let grid = SpecGrid::default();
    for chain in assembly_chains() {
        let r = verify_chain(cat, &chain, &grid, sizes.limit_deg as i64)?;
        let detail = match r.step {
            None => format!("{} steps agree", chain.steps.len()),
            Some(s) => format!("step {s} differs"),
        };
        out.push(Check {
            name: chain.name.to_string(),
            status: r.status,
            detail,
            ms: r.ms,
        });
    }

    let t = Instant::now();
    let deg = 2 * (sizes.v_max + 1) * (sizes.v_max + 3);
    let d = s_v_generating(sizes.v_max, deg).first_difference(&p_v_continued_fraction(sizes.v_max));
    out.push(Check::new(
        "S_v = P_v",
        d.is_none(),
        first_diff_detail(d, sizes.v_max)
            .replace("n =", "v =")
            .replace("n <=", "v <="),
        t,
    ));

    let t = Instant::now();
    let bad = check_c_v_recurrence(sizes.v_max, sizes.c_n_max);
    let detail = match bad {
        None => format!("holds for v <= {}, n <= {}", sizes.v_max, sizes.c_n_max),
        Some((v, n)) => format!("fails at v = {v}, n = {n}"),
    };
    out.push(Check::new("c_v recurrence", bad.is_none(), detail, t));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64s(c)
    }

    #[test]
    fn seeds() {
        let r = p_n_recurrence(2);
        assert_eq!(
            r.values,
            vec![p(&[1]), p(&[1, 0, 0, 1]), p(&[1, 0, 0, 1, 2, 0, 0, 0, 1])]
        );
        assert_eq!(p_n_recurrence(0).len(), 1);
    }

    #[test]
    fn degrees() {
        for (n, v) in p_n_recurrence(12).values.iter().enumerate() {
            assert_eq!(v.degree(), Some(n * n + 2 * n));
        }
    }

    #[test]
    fn bivariate_matches_recurrence() {
        let b = p_n_bivariate(10, 120).unwrap();
        assert_eq!(b.first_difference(&p_n_recurrence(10)), None);
        assert_eq!(b.values[1], p(&[1, 0, 0, 1]));
    }

    #[test]
    fn bivariate_rejects_short_truncation() {
        assert_eq!(
            p_n_bivariate(5, 34),
            Err(QdiffError::TruncationTooSmall {
                n_max: 5,
                needed: 35,
                order: 34
            })
        );
    }

    #[test]
    fn bosonic_small() {
        let q = q_n_bosonic(6);
        assert_eq!(q.first_difference(&p_n_recurrence(6)), None);
        assert_eq!(q.values[0], Poly::one());
    }

    #[test]
    fn partner_small() {
        assert_eq!(check_sills_bosonic(10), Status::Pass);
        assert_eq!(p_n_partner(0).values[0], Poly::one());
    }

    #[test]
    fn stable_limit_detects_changes() {
        let seq = PolySeq {
            kind: SeqKind::QBosonic,
            values: vec![p(&[1]), p(&[1, 1]), p(&[1, 1, 0, 5]), p(&[1, 1, 2, 4])],
        };
        assert_eq!(stable_limit(&seq, 2), Err(QdiffError::NotStable { k: 2, n: 2 }));
        assert_eq!(stable_limit(&seq, 1).unwrap().coefficient(1).unwrap(), BigInt::one());
    }

    #[test]
    fn small_type_v() {
        let s = s_v_generating(1, 20);
        assert_eq!(s.values[0], p(&[1, 0, 1]));
        assert_eq!(s.values[1], p(&[1, 0, 1, 1, 1, 0, 1]));
        assert_eq!(type_v_partitions(1).len(), 5);
    }

    #[test]
    fn cf_numerators() {
        let cf = p_v_continued_fraction(5);
        assert_eq!(cf.values[0], p(&[1, 0, 1]));
        assert_eq!(cf.values[1], p(&[1, 0, 1, 1, 1, 0, 1]));
        assert_eq!(s_v_generating(5, 80).first_difference(&cf), None);
        assert_eq!(check_c_v_recurrence(5, 40), None);
    }

    #[test]
    fn limits_match_products() {
        let cat = Catalog::builtin();
        let (q, partner) = bosonic_limits(30).unwrap();
        assert_eq!(
            crate::verify::compare(&q, &negated_product(cat, "qdeq", 30).unwrap()),
            None
        );
        assert_eq!(
            crate::verify::compare(&partner, &negated_product(cat, "id21eq", 30).unwrap()),
            None
        );
    }

    #[test]
    fn partner_q30_agrees_with_product_through_q30() {
        let q30 = q_n_partner(30).values[30].truncate(30);
        let got = QSeries::from_coeffs(0, q30.coeffs().to_vec(), 30);
        let want = negated_product(Catalog::builtin(), "id21eq", 30).unwrap();
        assert_eq!(crate::verify::compare(&got, &want), None);
    }

    #[test]
    fn assembly() {
        let cat = Catalog::builtin();
        for chain in assembly_chains() {
            let r = verify_chain(cat, &chain, &SpecGrid::default(), 60).unwrap();
            assert_eq!(r.status, Status::Pass, "{}: {:?}", chain.name, r);
        }
    }
}
