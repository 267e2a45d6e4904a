use proptest::prelude::*;

use whr_algebra::{Laurent, Rat, RatFunc};
use whr_core::config::{Caps, Param, WeightConfig, WeightSpec};
use whr_core::curve::{build_curve, FieldBackend, RamValue};
use whr_core::hurwitz::{
    genus_of, pure_hurwitz_connected, pure_hurwitz_frobenius, pure_hurwitz_oracle, weighted_hurwitz, BranchData,
};
use whr_core::partitions::{character, factorial, partitions_of, Partition};
use whr_core::tau::tau_p_basis;
use whr_core::toprec::{f03_matches, pole_report, TopRec};

fn partition_of(n: u32) -> impl Strategy<Value = Partition> {
    let all = partitions_of(n);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn profiles(max_n: u32, max_k: usize) -> impl Strategy<Value = (u32, Vec<Partition>)> {
    (1..=max_n).prop_flat_map(move |n| (Just(n), prop::collection::vec(partition_of(n), 1..=max_k)))
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_filter_map("nonzero", |(a, b)| (a != 0).then(|| Rat::new(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frobenius_is_order_independent((n, mut ps) in profiles(5, 4), seed in any::<u64>()) {
        let a = pure_hurwitz_frobenius(&BranchData::new(n, ps.clone()).unwrap()).unwrap();
        let len = ps.len();
        ps.rotate_left((seed as usize) % len);
        let b = pure_hurwitz_frobenius(&BranchData::new(n, ps).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn connected_numbers_bounded_by_all((n, ps) in profiles(5, 3)) {
        let b = BranchData::new(n, ps).unwrap();
        let all = pure_hurwitz_frobenius(&b).unwrap();
        let conn = pure_hurwitz_connected(&b).unwrap();
        prop_assert!(conn >= Rat::zero());
        prop_assert!(conn <= all);
        prop_assert_eq!(conn, pure_hurwitz_oracle(&b, true, 6).unwrap());
    }

    #[test]
    fn connected_covers_have_nonnegative_genus((n, ps) in profiles(5, 4)) {
        let b = BranchData::new(n, ps).unwrap();
        if !pure_hurwitz_connected(&b).unwrap().is_zero() {
            prop_assert!(b.euler_characteristic <= 2);
            prop_assert_eq!(b.euler_characteristic % 2, 0);
        }
    }

    #[test]
    fn conjugation_is_an_involution(p in (1u32..=8).prop_flat_map(partition_of)) {
        prop_assert_eq!(p.conjugate().conjugate(), p.clone());
        prop_assert_eq!(p.conjugate().weight(), p.weight());
        // χ_{λ′}(μ) = sgn(μ) χ_λ(μ)
        for mu in partitions_of(p.weight()) {
            let sign = if mu.colength() % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(character(&p.conjugate(), &mu).unwrap(), sign * character(&p, &mu).unwrap());
        }
    }

    #[test]
    fn weighted_numbers_are_symmetric(g1 in 1i64..4, g2 in 0i64..3, n in 1u32..=4, d in 0u32..=3) {
        let cfg = WeightConfig::new(WeightSpec::Coeffs(vec![Rat::from_int(g1), Rat::from_int(g2)]), vec![]);
        for mu in partitions_of(n) {
            for nu in partitions_of(n) {
                let a = weighted_hurwitz(&cfg, &mu, &nu, d, true).unwrap();
                let b = weighted_hurwitz(&cfg, &nu, &mu, d, true).unwrap();
                prop_assert_eq!(&a, &b);
                if !a.is_zero() {
                    prop_assert!(genus_of(d, &mu, &nu).unwrap() >= 0);
                }
            }
        }
    }

    #[test]
    fn tau_table_is_symmetric(g1 in -3i64..4, g2 in -2i64..3) {
        let cfg = WeightConfig::new(WeightSpec::Coeffs(vec![Rat::from_int(g1), Rat::from_int(g2)]), vec![])
            .with_caps(Caps { gamma: 4, ..Caps::default() });
        let t = tau_p_basis(&cfg).unwrap();
        for (mu, nu, d, v) in t.iter() {
            prop_assert_eq!(t.get(nu, mu, d), v);
        }
    }

    #[test]
    fn curve_identities_hold(g1 in 1i64..4, s1 in small_rat(), s2 in small_rat()) {
        let cfg = WeightConfig::new(
            WeightSpec::Coeffs(vec![Rat::from_int(g1)]),
            vec![Param::Value(s1), Param::Value(s2)],
        );
        let Ok(curve) = build_curve(&cfg) else { return Ok(()) };
        prop_assert!(curve.xy_identity_holds());
        prop_assert!(curve.classical_curve_holds());
        prop_assert!(curve.sigma_matches_dx());
        if curve.backend != FieldBackend::Rational {
            return Ok(());
        }
        let sample = RatFunc::constant(Rat::zero());
        for p in &curve.ramification {
            if !matches!(p.value, RamValue::Rational(_)) || !p.simple {
                continue;
            }
            let a = curve.point_in(&p.value, &sample).unwrap();
            let order = 6;
            let u = curve.involution_jet(&a, order).unwrap();
            let uu = u.compose(&u).unwrap();
            let t = Laurent::monomial(RatFunc::constant(Rat::one()), 1, uu.prec());
            prop_assert!(uu.sub(&t).truncate(order as i32 + 1).is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn omega03_is_symmetric_and_integrates(s1 in small_rat()) {
        let cfg = WeightConfig::new(
            WeightSpec::Coeffs(vec![Rat::one()]),
            vec![Param::Value(s1.clone()), Param::Value(Rat::new(1, 2))],
        );
        let curve = build_curve(&cfg).unwrap();
        // s₁ = ±2 makes Ŷ′ vanish at a ramification point
        let mut tr = match TopRec::new(&curve, &RatFunc::constant(Rat::zero()), None) {
            Ok(tr) => tr,
            Err(e) => {
                prop_assert!(s1 == Rat::from_int(2) || s1 == Rat::from_int(-2), "{}", e);
                return Ok(());
            }
        };
        let w03 = tr.compute(0, 3).unwrap();
        prop_assert!(w03.is_symmetric());
        prop_assert!(pole_report(&w03, &tr.points).unwrap().passed());
        prop_assert!(f03_matches(&tr.curve, &tr.points, &w03).unwrap());
        let w11 = tr.compute(1, 1).unwrap();
        prop_assert!(pole_report(&w11, &tr.points).unwrap().passed());
    }
}

#[test]
fn burnside_sum_of_squared_dimensions() {
    for n in 1..=7u32 {
        let mut total = Rat::zero();
        for l in partitions_of(n) {
            let dim = Rat::from_bigint(factorial(n).into()) / Rat::from_bigint(l.hook_product().into());
            total += &(dim.clone() * dim);
        }
        assert_eq!(total, Rat::from_bigint(factorial(n).into()));
    }
}
