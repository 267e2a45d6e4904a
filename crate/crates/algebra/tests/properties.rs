use proptest::prelude::*;
use whr_algebra::{Matrix, Poly, Rat, TruncatedSeries, Var, Vars};

fn rat() -> impl Strategy<Value = Rat> {
    (-30i64..30, 1i64..12).prop_map(|(p, q)| Rat::new(p, q))
}

fn poly() -> impl Strategy<Value = Poly<Rat>> {
    prop::collection::vec(rat(), 0..6).prop_map(|c| Poly::new(c, Rat::zero()))
}

fn layout() -> Vars {
    Vars::new(vec![Var::capped("x", 5), Var::capped("y", 4)])
}

fn series() -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(((0i32..6, 0i32..5), rat()), 0..8).prop_map(|ts| {
        let v = layout();
        TruncatedSeries::from_terms(
            &v,
            ts.into_iter().map(|((a, b), c)| ([a, b].into_iter().collect(), c)),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn rat_field_axioms(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a - &a, Rat::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Rat::one());
        }
    }

    #[test]
    fn rat_string_round_trip(a in rat()) {
        prop_assert_eq!(a.to_string().parse::<Rat>().unwrap(), a);
    }

    #[test]
    fn poly_division_identity(a in poly(), b in poly()) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.div_rem(&b).unwrap();
        prop_assert_eq!(q.mul(&b).add(&r), a);
        prop_assert!(r.is_zero() || r.degree() < b.degree());
    }

    #[test]
    fn poly_bezout(a in poly(), b in poly()) {
        prop_assume!(!a.is_zero() || !b.is_zero());
        let (g, s, t) = a.ext_gcd(&b);
        prop_assert_eq!(s.mul(&a).add(&t.mul(&b)), g.clone());
        prop_assert!(a.rem(&g).unwrap().is_zero());
    }

    #[test]
    fn series_ring_axioms(a in series(), b in series(), c in series()) {
        let l = a.mul(&b.add(&c).unwrap()).unwrap();
        let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn log_inverts_exp(a in series()) {
        let a = a.add_constant(&-a.constant_term());
        let e = a.exp().unwrap();
        prop_assert_eq!(e.log().unwrap(), a);
    }

    #[test]
    fn series_inverse(a in series(), c in rat()) {
        prop_assume!(!c.is_zero());
        let a = a.add_constant(&(c - a.constant_term()));
        let one = TruncatedSeries::one(&layout());
        prop_assert_eq!(a.mul(&a.inverse().unwrap()).unwrap(), one);
    }

    #[test]
    fn squarefree_decomposition_multiplies_back(a in poly(), b in poly()) {
        let f = a.mul(&a).mul(&b);
        prop_assume!(f.degree().unwrap_or(0) > 0);
        let mut prod = Poly::constant(f.leading());
        for (g, m) in f.squarefree_decomposition() {
            prod = prod.mul(&g.pow(m as u32));
        }
        prop_assert_eq!(prod, f);
    }

    #[test]
    fn matrix_inverse_round_trip(entries in prop::collection::vec(rat(), 9)) {
        let m = Matrix::new(3, 3, entries);
        prop_assume!(!m.det_field().unwrap().is_zero());
        let i = Matrix::identity_like(3, &Rat::zero());
        prop_assert_eq!(m.mul(&m.inverse().unwrap()).unwrap(), i);
        prop_assert_eq!(m.det().unwrap(), m.det_field().unwrap());
    }
}
