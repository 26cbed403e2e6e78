use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::Params;
use crate::dsl::{QSub, Specialization};
use crate::Monomial;

/// Candidate values for the free parameters of a transformation.
///
/// Every symbol ranges over `±q^e` for `e` in `exp_min..=exp_max`, every
/// integer parameter over `int_min..=int_max`, and the whole point is
/// evaluated under each change of variable in `qsubs`. When the full product is
/// larger than `max_points`, a fixed-seed sample of that many points is
/// taken instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecGrid {
    pub exp_min: i64,
    pub exp_max: i64,
    pub signs: Vec<i64>,
    pub int_min: i64,
    pub int_max: i64,
    pub qsubs: Vec<QSub>,
    /// Zero means no cap.
    pub max_points: usize,
    pub seed: u64,
}

impl Default for SpecGrid {
    fn default() -> Self {
        SpecGrid {
            exp_min: -1,
            exp_max: 4,
            signs: vec![1, -1],
            int_min: 0,
            int_max: 5,
            qsubs: vec![QSub::default(), QSub::new(-1, 1), QSub::new(1, 2)],
            max_points: 240,
            seed: 0x5152_5200,
        }
    }
}

impl SpecGrid {
    pub fn candidates(&self) -> Vec<Monomial> {
        let mut out = Vec::new();
        for e in self.exp_min..=self.exp_max {
            for &s in &self.signs {
                if let Ok(m) = Monomial::new(s, e) {
                    out.push(m);
                }
            }
        }
        out
    }

    /// Number of points before sampling, saturating.
    pub fn size(&self, params: &Params) -> usize {
        let c = self.candidates().len();
        let k = (self.int_max - self.int_min + 1).max(0) as usize;
        let mut total: usize = self.qsubs.len();
        for _ in &params.symbols {
            total = total.saturating_mul(c);
        }
        for _ in &params.ints {
            total = total.saturating_mul(k);
        }
        total
    }

    /// The specializations to try, in a deterministic order. `salt` varies
    /// the sample between entries.
    pub fn points(&self, params: &Params, salt: &str) -> Vec<Specialization> {
        let cands = self.candidates();
        let ints: Vec<i64> = (self.int_min..=self.int_max).collect();
        let total = self.size(params);
        if total == 0 {
            return Vec::new();
        }
        let indices: Vec<usize> = if self.max_points == 0 || total <= self.max_points {
            (0..total).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(salt));
            let mut v = sample(&mut rng, total, self.max_points).into_vec();
            v.sort_unstable();
            v
        };
        indices
            .into_iter()
            .map(|mut i| {
                let mut symbols = BTreeMap::new();
                for s in &params.symbols {
                    symbols.insert(s.clone(), cands[i % cands.len()]);
                    i /= cands.len();
                }
                let mut iv = BTreeMap::new();
                for s in &params.ints {
                    iv.insert(s.clone(), ints[i % ints.len()]);
                    i /= ints.len();
                }
                Specialization {
                    symbols,
                    ints: iv,
                    qsub: self.qsubs[i % self.qsubs.len()],
                }
            })
            .collect()
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// `a=q^2, b=-q^(-1)` style description of a specialization.
pub fn describe(spec: &Specialization) -> String {
    let mut parts: Vec<String> = spec.symbols.iter().map(|(k, v)| format!("{k}={v}")).collect();
    parts.extend(spec.ints.iter().map(|(k, v)| format!("{k}={v}")));
    if !spec.qsub.is_identity() {
        let sign = if spec.qsub.sign < 0 { "-" } else { "" };
        parts.push(format!("q->{sign}q^{}", spec.qsub.power));
    }
    parts.join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(syms: &[&str], ints: &[&str]) -> Params {
        Params {
            symbols: syms.iter().map(|s| s.to_string()).collect(),
            ints: ints.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn full_grid_without_cap() {
        let g = SpecGrid {
            max_points: 0,
            ..SpecGrid::default()
        };
        assert_eq!(g.candidates().len(), 12);
        let p = params(&["a", "b"], &[]);
        let pts = g.points(&p, "x");
        assert_eq!(pts.len(), 432);
        assert_eq!(pts[0].symbols["a"], Monomial::q(-1));
        assert_eq!(pts[1].symbols["a"], Monomial::neg_q(-1));
        assert_eq!(pts[12].symbols["b"], Monomial::neg_q(-1));
        assert!(pts[143].qsub.is_identity());
        assert_eq!(pts[144].qsub, QSub::new(-1, 1));
    }

    #[test]
    fn sampling_is_deterministic_and_salted() {
        let g = SpecGrid::default();
        let p = params(&["a", "b", "c"], &["n"]);
        assert_eq!(g.size(&p), 12 * 12 * 12 * 6 * 3);
        let x = g.points(&p, "Wat");
        assert_eq!(x.len(), g.max_points);
        assert_eq!(x, g.points(&p, "Wat"));
        assert_ne!(x, g.points(&p, "other"));
    }

    #[test]
    fn describe_spec() {
        let s = Specialization::new()
            .with_symbol("a", Monomial::neg_q(2))
            .with_int("n", 3)
            .with_qsub(crate::dsl::QSub::new(1, 2));
        assert_eq!(describe(&s), "a=-q^2, n=3, q->q^2");
    }
}
