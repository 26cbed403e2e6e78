//! Partition counts under congruence and gap conditions, and the
//! equinumerosity theorems that tie the two together.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, Side};
use crate::dsl::Specialization;
use crate::verify::{Status, VerifyError};

/// Parts lying in the given residue classes modulo `modulus`. A residue equal
/// to `modulus` stands for the class of 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceRule {
    pub modulus: u64,
    pub residues: BTreeSet<u64>,
}

impl CongruenceRule {
    pub fn new(modulus: u64, residues: &[u64]) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        assert!(
            residues.iter().all(|r| (1..=modulus).contains(r)),
            "residues must lie in 1..={modulus}"
        );
        CongruenceRule {
            modulus,
            residues: residues.iter().copied().collect(),
        }
    }

    pub fn allows(&self, part: u64) -> bool {
        part > 0 && self.residues.iter().any(|r| part % self.modulus == r % self.modulus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Parity {
    Odd,
    Even,
    Never,
}

impl Parity {
    fn matches(self, part: u64) -> bool {
        match self {
            Parity::Odd => part % 2 == 1,
            Parity::Even => part.is_multiple_of(2),
            Parity::Never => false,
        }
    }
}

/// Parts `n_1 >= n_2 >= ...` with `n_i - n_{i+1} >= min_gap`, raised to
/// `min_gap + 1` when `n_i` has parity `extra_gap_parity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GapRule {
    pub min_gap: u64,
    pub extra_gap_parity: Parity,
    /// Smallest allowed part; 0 and 1 both mean any positive part.
    pub min_smallest: u64,
    pub max_largest: Option<u64>,
}

impl GapRule {
    fn gap_below(&self, part: u64) -> u64 {
        if self.extra_gap_parity.matches(part) {
            self.min_gap + 1
        } else {
            self.min_gap
        }
    }
}

/// Partitions of `n` into parts allowed by `rule`.
pub fn count_congruence(n: u64, rule: &CongruenceRule) -> u128 {
    congruence_counts(n, rule)[n as usize]
}

/// `count_congruence(k, rule)` for every `k <= n_max`.
pub fn congruence_counts(n_max: u64, rule: &CongruenceRule) -> Vec<u128> {
    let n = n_max as usize;
    let mut ways = vec![0u128; n + 1];
    ways[0] = 1;
    for part in (1..=n_max).filter(|&p| rule.allows(p)) {
        let p = part as usize;
        for k in p..=n {
            ways[k] += ways[k - p];
        }
    }
    ways
}

struct GapCounter<'a> {
    rule: &'a GapRule,
    memo: HashMap<(u64, u64), u128>,
}

impl GapCounter<'_> {
    /// Partitions of `rem` with every part at most `cap`.
    fn count(&mut self, rem: u64, cap: u64) -> u128 {
        if rem == 0 {
            return 1;
        }
        let cap = cap.min(rem);
        let lo = self.rule.min_smallest.max(1);
        if cap < lo {
            return 0;
        }
        if let Some(&v) = self.memo.get(&(rem, cap)) {
            return v;
        }
        let mut total = 0;
        for part in lo..=cap {
            let gap = self.rule.gap_below(part);
            let next = part.saturating_sub(gap);
            if rem == part {
                total += 1;
            } else if next >= lo {
                total += self.count(rem - part, next);
            }
        }
        self.memo.insert((rem, cap), total);
        total
    }
}

/// Partitions of `n` obeying `rule`, counted by descent from the largest part.
pub fn count_gap(n: u64, rule: &GapRule) -> u128 {
    gap_counts(n, rule)[n as usize]
}

/// `count_gap(k, rule)` for every `k <= n_max`, sharing one memo table.
pub fn gap_counts(n_max: u64, rule: &GapRule) -> Vec<u128> {
    let mut c = GapCounter {
        rule,
        memo: HashMap::new(),
    };
    let cap = rule.max_largest.unwrap_or(u64::MAX);
    (0..=n_max).map(|n| c.count(n, cap)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "tGG1")]
    Gg1,
    #[serde(rename = "tGG2")]
    Gg2,
    #[serde(rename = "tGGn")]
    Ggn,
    #[serde(rename = "tGGn1")]
    Ggn1,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::Gg1, Theorem::Gg2, Theorem::Ggn, Theorem::Ggn1];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Gg1 => "tGG1",
            Theorem::Gg2 => "tGG2",
            Theorem::Ggn => "tGGn",
            Theorem::Ggn1 => "tGGn1",
        }
    }

    pub fn congruence(self) -> CongruenceRule {
        let r: &[u64] = match self {
            Theorem::Gg1 => &[1, 4, 7],
            Theorem::Gg2 => &[3, 4, 5],
            Theorem::Ggn => &[2, 3, 7],
            Theorem::Ggn1 => &[1, 5, 6],
        };
        CongruenceRule::new(8, r)
    }

    pub fn gap(self) -> GapRule {
        let (parity, min_smallest) = match self {
            Theorem::Gg1 => (Parity::Even, 0),
            Theorem::Gg2 => (Parity::Even, 3),
            Theorem::Ggn => (Parity::Odd, 2),
            Theorem::Ggn1 => (Parity::Odd, 0),
        };
        GapRule {
            min_gap: 2,
            extra_gap_parity: parity,
            min_smallest,
            max_largest: None,
        }
    }

    /// The catalog identity whose two sides generate the two counts.
    pub fn catalog_id(self) -> &'static str {
        match self {
            Theorem::Gg1 => "GG1",
            Theorem::Gg2 => "GG2",
            Theorem::Ggn => "id13",
            Theorem::Ggn1 => "id13a",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown theorem {s:?}; expected one of tGG1, tGG2, tGGn, tGGn1"))
    }
}

/// One row of a theorem check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub n: u64,
    pub congruence: u128,
    pub gap: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub theorem: Theorem,
    pub n_max: u64,
    pub status: Status,
    /// First `n` where the two counts differ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<u64>,
    /// First `n` where a count differs from the catalog series coefficient.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_mismatch: Option<u64>,
    pub rows: Vec<CountRow>,
    pub ms: u64,
}

fn coefficients(cat: &Catalog, id: &str, side: Side, n_max: u64) -> Result<Vec<BigInt>, VerifyError> {
    let s = cat
        .evaluate_side(id, side, &Specialization::default(), n_max as i64)?
        .map_err(|err| VerifyError::Eval {
            id: id.to_string(),
            err,
        })?;
    Ok(s.dense_from(0))
}

/// Compares the two counts for every `n <= n_max`, and each against the
/// coefficients of the matching side of the catalog identity: the product
/// side for the congruence count, the sum side for the gap count.
pub fn verify_partition_theorem(cat: &Catalog, theorem: Theorem, n_max: u64) -> Result<PartitionReport, VerifyError> {
    let start = Instant::now();
    let cong = congruence_counts(n_max, &theorem.congruence());
    let gap = gap_counts(n_max, &theorem.gap());
    let id = theorem.catalog_id();
    let prod = coefficients(cat, id, Side::Rhs, n_max)?;
    let sum = coefficients(cat, id, Side::Lhs, n_max)?;
    let rows: Vec<CountRow> = (0..=n_max)
        .map(|n| CountRow {
            n,
            congruence: cong[n as usize],
            gap: gap[n as usize],
        })
        .collect();
    let first_mismatch = rows.iter().find(|r| r.congruence != r.gap).map(|r| r.n);
    let series_mismatch = rows
        .iter()
        .find(|r| {
            let i = r.n as usize;
            BigInt::from(r.congruence) != prod[i] || BigInt::from(r.gap) != sum[i]
        })
        .map(|r| r.n);
    let ok = first_mismatch.is_none() && series_mismatch.is_none();
    Ok(PartitionReport {
        theorem,
        n_max,
        status: if ok { Status::Pass } else { Status::Fail },
        first_mismatch,
        series_mismatch,
        rows,
        ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every partition of `n` as a non-increasing list.
    fn all_partitions(n: u64) -> Vec<Vec<u64>> {
        fn go(rem: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            if rem == 0 {
                out.push(cur.clone());
                return;
            }
            for p in (1..=max.min(rem)).rev() {
                cur.push(p);
                go(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(n, n, &mut Vec::new(), &mut out);
        out
    }

    fn obeys(p: &[u64], rule: &GapRule) -> bool {
        let lo = rule.min_smallest.max(1);
        p.iter().all(|&x| x >= lo && rule.max_largest.is_none_or(|m| x <= m))
            && p.windows(2).all(|w| w[0] >= w[1] + rule.gap_below(w[0]))
    }

    #[test]
    fn spot_values() {
        let ggn = Theorem::Ggn;
        assert_eq!(count_congruence(0, &ggn.congruence()), 1);
        assert_eq!(count_congruence(7, &ggn.congruence()), 2);
        assert_eq!(count_congruence(1, &ggn.congruence()), 0);
        assert_eq!(count_gap(7, &ggn.gap()), 2);
        assert_eq!(count_gap(0, &ggn.gap()), 1);
        assert_eq!(count_gap(3, &Theorem::Gg2.gap()), 1);
    }

    #[test]
    fn counters_match_brute_force() {
        let rules: Vec<GapRule> = Theorem::ALL
            .iter()
            .map(|t| t.gap())
            .chain([GapRule {
                min_gap: 1,
                extra_gap_parity: Parity::Never,
                min_smallest: 0,
                max_largest: Some(5),
            }])
            .collect();
        for n in 0..=24 {
            let parts = all_partitions(n);
            for t in Theorem::ALL {
                let rule = t.congruence();
                let want = parts.iter().filter(|p| p.iter().all(|&x| rule.allows(x))).count();
                assert_eq!(count_congruence(n, &rule), want as u128, "{t} congruence n={n}");
            }
            for rule in &rules {
                let want = parts.iter().filter(|p| obeys(p, rule)).count();
                assert_eq!(count_gap(n, rule), want as u128, "{rule:?} n={n}");
            }
        }
    }

    #[test]
    fn residue_equal_to_modulus_is_zero_class() {
        let r = CongruenceRule::new(4, &[4]);
        assert!(r.allows(8) && !r.allows(2));
        assert_eq!(count_congruence(8, &r), 2);
    }

    #[test]
    fn theorems_hold() {
        let cat = Catalog::builtin();
        for t in Theorem::ALL {
            let r = verify_partition_theorem(cat, t, 60).unwrap();
            assert_eq!(
                r.status,
                Status::Pass,
                "{t}: {:?} {:?}",
                r.first_mismatch,
                r.series_mismatch
            );
            assert_eq!(r.rows.len(), 61);
        }
    }

    #[test]
    fn plain_gap_two_matches_rogers_ramanujan() {
        let rule = GapRule {
            min_gap: 2,
            extra_gap_parity: Parity::Never,
            min_smallest: 0,
            max_largest: None,
        };
        let want = coefficients(Catalog::builtin(), "rr1-a", Side::Lhs, 60).unwrap();
        let got: Vec<BigInt> = gap_counts(60, &rule).into_iter().map(BigInt::from).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn type_v_counts_match_enumeration() {
        for v in 0..=6u64 {
            let rule = GapRule {
                max_largest: Some(2 * v + 2),
                ..Theorem::Ggn.gap()
            };
            let s = crate::qdifference::s_v_generating(v as usize, 60);
            let got = gap_counts(60, &rule);
            for (n, c) in got.iter().enumerate() {
                assert_eq!(BigInt::from(*c), s.values[v as usize].coeff(n), "v={v} n={n}");
            }
        }
    }

    #[test]
    fn parse_theorem_names() {
        assert_eq!("tggn1".parse::<Theorem>(), Ok(Theorem::Ggn1));
        assert!("tGG3".parse::<Theorem>().is_err());
    }
}
