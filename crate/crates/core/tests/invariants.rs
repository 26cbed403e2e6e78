use num_bigint::BigInt;
use proptest::prelude::*;

use qrr_core::dsl::{evaluate, parse_expr, Specialization};
use qrr_core::partitions::{count_congruence, count_gap, CongruenceRule, GapRule, Parity};
use qrr_core::prodsearch::{expand_product, prodmake, recognize, ProductForm};
use qrr_core::{Poly, QSeries};

const ORDER: i64 = 30;

fn series() -> impl Strategy<Value = QSeries> {
    (-3i64..4, prop::collection::vec(-9i64..10, 1..12)).prop_map(|(lead, c)| QSeries::from_i64s(lead, &c, ORDER))
}

fn unit() -> impl Strategy<Value = QSeries> {
    prop::collection::vec(-9i64..10, 0..10).prop_map(|mut c| {
        c.insert(0, 1);
        QSeries::from_i64s(0, &c, ORDER)
    })
}

fn common(a: &QSeries, b: &QSeries) -> (QSeries, QSeries) {
    let n = a.order().min(b.order());
    (a.truncate(n).unwrap(), b.truncate(n).unwrap())
}

fn mul(a: &QSeries, b: &QSeries) -> QSeries {
    let (a, b) = common(a, b);
    a.mul(&b).unwrap()
}

fn add(a: &QSeries, b: &QSeries) -> QSeries {
    let (a, b) = common(a, b);
    a.add(&b).unwrap()
}

fn parity() -> impl Strategy<Value = Parity> {
    prop_oneof![Just(Parity::Odd), Just(Parity::Even), Just(Parity::Never)]
}

fn brute_partitions(n: u64) -> Vec<Vec<u64>> {
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

proptest! {
    #[test]
    fn multiplication_commutes_and_associates(a in series(), b in series(), c in series()) {
        prop_assert_eq!(mul(&a, &b), mul(&b, &a));
        let left = mul(&mul(&a, &b), &c);
        let right = mul(&a, &mul(&b, &c));
        prop_assert!(left.first_mismatch(&right).is_none());
    }

    #[test]
    fn distributive(a in series(), b in series(), c in series()) {
        let left = mul(&a, &add(&b, &c));
        let right = add(&mul(&a, &b), &mul(&a, &c));
        prop_assert!(left.first_mismatch(&right).is_none());
    }

    #[test]
    fn inverse_of_unit(u in unit(), a in series()) {
        let inv = u.invert().unwrap();
        prop_assert_eq!(mul(&u, &inv), QSeries::one(ORDER));
        let back = mul(&mul(&a, &u), &inv);
        prop_assert!(back.first_mismatch(&a).is_none());
    }

    #[test]
    fn product_order_tracks_negative_leads(a in series(), b in series()) {
        let p = mul(&a, &b);
        let lost = a.lead().unwrap_or(0).min(b.lead().unwrap_or(0)).min(0);
        prop_assert_eq!(p.order(), ORDER + lost);
    }

    #[test]
    fn negating_q_twice_is_identity(a in series()) {
        prop_assert_eq!(a.negate_q().negate_q(), a);
    }

    #[test]
    fn poly_product_matches_series_product(x in prop::collection::vec(-5i64..6, 0..8), y in prop::collection::vec(-5i64..6, 0..8)) {
        let (p, r) = (Poly::from_i64s(&x), Poly::from_i64s(&y));
        let via_poly = p.mul(&r).to_series(ORDER);
        let via_series = p.to_series(ORDER).mul(&r.to_series(ORDER)).unwrap();
        prop_assert_eq!(via_poly, via_series);
    }

    #[test]
    fn prodmake_round_trip(m in 1usize..=12, raw in prop::collection::vec(-3i64..=3, 12), shift in 0i64..3) {
        let exps = raw[..m].to_vec();
        let form = ProductForm { period: m, exponents: exps.clone(), verified_to: 60, shift };
        let f = expand_product(&form, 60 + shift);
        let got = recognize(&f, 60, 12).unwrap().expect("periodic");
        prop_assert_eq!(m % got.period, 0);
        prop_assert_eq!(got.shift, shift);
        for k in 1..=60 {
            prop_assert_eq!(got.exponent(k), exps[(k - 1) % m]);
        }
    }

    #[test]
    fn prodmake_recovers_arbitrary_exponents(exps in prop::collection::vec(-3i64..=3, ORDER as usize)) {
        let mut f = QSeries::one(ORDER);
        for (i, &ek) in exps.iter().enumerate() {
            let binom = QSeries::one(ORDER).sub(&QSeries::monomial(1, i as i64 + 1, ORDER)).unwrap();
            let factor = if ek > 0 { binom.invert().unwrap() } else { binom };
            for _ in 0..ek.abs() {
                f = f.mul(&factor).unwrap();
            }
        }
        let want: Vec<BigInt> = exps.iter().map(|&e| BigInt::from(e)).collect();
        prop_assert_eq!(prodmake(&f, ORDER as usize).unwrap(), want);
    }

    #[test]
    fn product_text_evaluates_to_product(m in 1usize..=8, raw in prop::collection::vec(-2i64..=2, 8)) {
        let form = ProductForm { period: m, exponents: raw[..m].to_vec(), verified_to: 40, shift: 0 };
        let text = form.to_dsl();
        let got = evaluate(&parse_expr(&text).unwrap(), &Specialization::default(), 40).unwrap();
        prop_assert_eq!(got, expand_product(&form, 40));
    }

    #[test]
    fn gap_count_matches_brute_force(
        n in 0u64..=18,
        min_gap in 0u64..=3,
        par in parity(),
        min_smallest in 0u64..=3,
        max_largest in prop::option::of(1u64..=12),
    ) {
        let rule = GapRule { min_gap, extra_gap_parity: par, min_smallest, max_largest };
        let extra = |x: u64| match par {
            Parity::Odd => x % 2 == 1,
            Parity::Even => x.is_multiple_of(2),
            Parity::Never => false,
        };
        let want = brute_partitions(n)
            .into_iter()
            .filter(|p| {
                p.iter().all(|&x| x >= min_smallest.max(1) && max_largest.is_none_or(|m| x <= m))
                    && p.windows(2).all(|w| w[0] >= w[1] + min_gap + u64::from(extra(w[0])))
            })
            .count();
        prop_assert_eq!(count_gap(n, &rule), want as u128);
    }

    #[test]
    fn congruence_count_matches_brute_force(n in 0u64..=18, m in 1u64..=8, picks in prop::collection::btree_set(1u64..=8, 1..4)) {
        let residues: Vec<u64> = picks.into_iter().filter(|r| *r <= m).collect();
        prop_assume!(!residues.is_empty());
        let rule = CongruenceRule::new(m, &residues);
        let want = brute_partitions(n)
            .into_iter()
            .filter(|p| p.iter().all(|x| residues.iter().any(|r| x % m == r % m)))
            .count();
        prop_assert_eq!(count_congruence(n, &rule), want as u128);
    }
}

#[test]
fn leading_coefficient_survives_shift() {
    let a = QSeries::from_i64s(2, &[3, 1], ORDER);
    assert_eq!(a.shift(-2).coefficient(0).unwrap(), BigInt::from(3));
}
