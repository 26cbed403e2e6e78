use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use parking_lot::Mutex;

use super::{gaussian, q_binomial};
use crate::series::Poly;

/// A member of the `T0`/`T1`/`U` family, written `(L, A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TPoly {
    T0(i64, i64),
    T1(i64, i64),
    U(i64, i64),
}

fn memo() -> &'static Mutex<HashMap<TPoly, Arc<Poly>>> {
    static MEMO: OnceLock<Mutex<HashMap<TPoly, Arc<Poly>>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// Evaluates a member of the family from its defining sum
/// `sum_r (-1)^r [L r]_{q^2} [2L-2r, L-A-r]_q` (with `(-q)^r` for `T1`).
/// Negative `L` gives zero.
pub fn t_poly(p: TPoly) -> Arc<Poly> {
    if let Some(v) = memo().lock().get(&p) {
        return v.clone();
    }
    let v = Arc::new(match p {
        TPoly::T0(l, a) => defining_sum(l, a, false),
        TPoly::T1(l, a) => defining_sum(l, a, true),
        TPoly::U(l, a) => t_poly(TPoly::T0(l, a)).add(&t_poly(TPoly::T0(l, a + 1))),
    });
    memo().lock().insert(p, v.clone());
    v
}

fn defining_sum(l: i64, a: i64, t1: bool) -> Poly {
    if l < 0 || a.abs() > l {
        return Poly::zero();
    }
    let mut acc = Poly::zero();
    for r in 0..=l {
        let k = l - a - r;
        if k < 0 {
            break;
        }
        let right = q_binomial(2 * l - 2 * r, k, 1);
        if right.is_zero() {
            continue;
        }
        let mut term = gaussian(l as u64, r as u64).dilate(2).mul(&right);
        if t1 {
            term = term.shift(r as usize);
        }
        acc = if r % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// `T0(L, A)` and `T1(L, A)` for all `0 <= L <= max_l`, built row by row from
/// the three-term recurrences. Much faster than the defining sums for large
/// `L`; [`t_poly`] is the reference.
pub struct TTable {
    max_l: i64,
    max_deg: Option<usize>,
    t0: Vec<Vec<Poly>>,
    t1: Vec<Vec<Poly>>,
}

impl TTable {
    pub fn new(max_l: i64) -> Self {
        Self::build(max_l, None)
    }

    /// Like [`TTable::new`] but keeps only terms of degree `<= max_deg`.
    /// The recurrences only shift upward, so the kept terms are exact.
    pub fn truncated(max_l: i64, max_deg: usize) -> Self {
        Self::build(max_l, Some(max_deg))
    }

    fn build(max_l: i64, max_deg: Option<usize>) -> Self {
        let cut = |p: Poly| match max_deg {
            Some(d) => p.truncate(d),
            None => p,
        };
        let max_l = max_l.max(0);
        let width = |l: i64| (2 * l + 1) as usize;
        let mut t0: Vec<Vec<Poly>> = vec![vec![Poly::one()]];
        let mut t1: Vec<Vec<Poly>> = vec![vec![Poly::one()]];
        for l in 1..=max_l {
            let prev0 = &t0[(l - 1) as usize];
            let prev1 = &t1[(l - 1) as usize];
            let get = |row: &Vec<Poly>, a: i64| -> Poly {
                let i = a + (l - 1);
                if a.abs() > l - 1 {
                    Poly::zero()
                } else {
                    row[i as usize].clone()
                }
            };
            let mut row0 = Vec::with_capacity(width(l));
            for a in -l..=l {
                // T0(L,A) = T0(L-1,A-1) + q^{L+A} T1(L-1,A) + q^{2L+2A} T0(L-1,A+1)
                let p = get(prev0, a - 1)
                    .add(&get(prev1, a).shift((l + a) as usize))
                    .add(&get(prev0, a + 1).shift((2 * l + 2 * a) as usize));
                row0.push(cut(p));
            }
            let mut row1 = vec![Poly::zero(); width(l)];
            let mut above = Poly::zero();
            for a in (-l..=l).rev() {
                // T1(L,A) = T1(L,A+1) + q^{L-A} T0(L,A) - q^{L+A+1} T0(L,A+1)
                let i = (a + l) as usize;
                let t0_next = if a < l { row0[i + 1].clone() } else { Poly::zero() };
                let p = above
                    .add(&row0[i].shift((l - a) as usize))
                    .sub(&t0_next.shift((l + a + 1) as usize));
                let p = cut(p);
                row1[i] = p.clone();
                above = p;
            }
            t0.push(row0);
            t1.push(row1);
        }
        TTable { max_l, max_deg, t0, t1 }
    }

    pub fn max_l(&self) -> i64 {
        self.max_l
    }

    /// The degree cap, if the table is truncated.
    pub fn max_deg(&self) -> Option<usize> {
        self.max_deg
    }

    fn lookup<'a>(&'a self, rows: &'a [Vec<Poly>], l: i64, a: i64) -> Option<&'a Poly> {
        assert!(l <= self.max_l, "L = {l} beyond table size {}", self.max_l);
        if l < 0 || a.abs() > l {
            None
        } else {
            Some(&rows[l as usize][(a + l) as usize])
        }
    }

    pub fn t0(&self, l: i64, a: i64) -> Poly {
        self.lookup(&self.t0, l, a).cloned().unwrap_or_default()
    }

    pub fn t1(&self, l: i64, a: i64) -> Poly {
        self.lookup(&self.t1, l, a).cloned().unwrap_or_default()
    }

    pub fn u(&self, l: i64, a: i64) -> Poly {
        self.t0(l, a).add(&self.t0(l, a + 1))
    }
}
