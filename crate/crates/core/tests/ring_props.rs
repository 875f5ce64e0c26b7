use num_traits::{One, Zero};
use proptest::prelude::*;
use virial_core::ring::{f64_to_rat, parse_rat, rat, rat_string, EtaExpr, Rat};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn expr(max_log: u32) -> impl Strategy<Value = EtaExpr> {
    prop::collection::vec((-2i64..=5, 0u32..=max_log, small_rat()), 0..5).prop_map(EtaExpr::from_terms)
}

fn poly() -> impl Strategy<Value = EtaExpr> {
    prop::collection::vec(small_rat(), 1..7).prop_map(|c| EtaExpr::from_poly(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn additive_group(a in expr(2), b in expr(2), c in expr(2)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a - &a, EtaExpr::zero());
        prop_assert_eq!(&a + &(-&a), EtaExpr::zero());
    }

    #[test]
    fn multiplicative_laws(a in expr(2), b in expr(2), c in expr(1)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &EtaExpr::constant(Rat::one()), a.clone());
    }

    #[test]
    fn kernel_solves_linear_ode(g in expr(2), k in 1u64..8) {
        // u = KI(g, k) solves u' = −N u + g with u(t = 0) = 0
        let n = rat((k * (k + 1) / 2) as i64, 1);
        let u = g.kernel_integrate(k);
        prop_assert_eq!(&u.d_dt() + &u.scale(&n), g);
        prop_assert_eq!(u.eval_exact(&Rat::one()).unwrap(), Rat::zero());
    }

    #[test]
    fn division_undoes_multiplication(g in expr(1), k in 0u32..6) {
        let p = &g * &EtaExpr::one_minus_eta_pow(k);
        prop_assert_eq!(p.div_one_minus_eta_pow(k).unwrap(), g);
    }

    #[test]
    fn product_rule(a in expr(1), b in expr(1)) {
        prop_assert_eq!((&a * &b).d_dt(), &(&a.d_dt() * &b) + &(&a * &b.d_dt()));
    }

    #[test]
    fn json_round_trip(a in expr(3)) {
        prop_assert_eq!(EtaExpr::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn exact_and_float_evaluation_agree(p in poly(), j in 1u32..100) {
        let e = f64::from(j) / 100.0;
        let exact = p.eval_exact_f64(e).unwrap();
        let plain = p.eval_f64(e).unwrap();
        prop_assert!((exact - plain).abs() <= 1e-12 * (1.0 + exact.abs()) * 200.0);
    }

    #[test]
    fn rational_strings_round_trip(r in small_rat()) {
        prop_assert_eq!(parse_rat(&rat_string(&r)).unwrap(), r);
    }
}

#[test]
fn f64_conversion_is_exact() {
    assert_eq!(f64_to_rat(0.375).unwrap(), rat(3, 8));
    assert!(f64_to_rat(f64::NAN).is_err());
    assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
}

#[test]
fn logs_block_exact_evaluation_off_one() {
    let l = EtaExpr::log_eta();
    assert!(l.eval_exact(&rat(1, 2)).is_err());
    assert_eq!(l.eval_exact(&Rat::one()).unwrap(), Rat::zero());
}
