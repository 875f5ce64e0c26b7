use num_traits::{One, Zero};
use proptest::prelude::*;
use virial_core::ring::{int, rat, Rat};
use virial_core::series::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

fn seq(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec(small_rat(), len)
}

/// All compositions of `k` into `n` positive parts.
fn compositions(k: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in 1..k {
        for mut rest in compositions(k - first, n - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conv_commutative_and_bilinear(a in seq(6..7), b in seq(6..7), c in seq(6..7), s in small_rat(), base in 0usize..2) {
        let mk = |v: &Vec<Rat>| CoeffSeq::new(base, v.clone()).unwrap();
        let (sa, sb, sc) = (mk(&a), mk(&b), mk(&c));
        prop_assert_eq!(conv(&sa, &sb).unwrap(), conv(&sb, &sa).unwrap());
        let comb: Vec<Rat> = b.iter().zip(&c).map(|(x, y)| x * &s + y).collect();
        let lhs = conv(&sa, &mk(&comb)).unwrap();
        let ab = conv(&sa, &sb).unwrap();
        let ac = conv(&sa, &sc).unwrap();
        let rhs: Vec<Rat> = ab.values().iter().zip(ac.values()).map(|(x, y)| x * &s + y).collect();
        prop_assert_eq!(lhs.values(), &rhs[..]);
    }

    #[test]
    fn h_k_matches_compositions(g in seq(8..9), k in 2usize..=8) {
        let gamma = CoeffSeq::base1(g.clone());
        let mut brute = Rat::zero();
        for n in 2..=k {
            for comp in compositions(k, n) {
                brute += comp.iter().fold(Rat::one(), |p, &l| p * &g[l - 1]);
            }
        }
        prop_assert_eq!(h_k_eval(&gamma, k).unwrap(), brute / int(2));
    }

    #[test]
    fn b_beta_round_trip(beta in seq(1..12)) {
        let k = beta.len();
        let beta = CoeffSeq::base1(beta);
        let b = b_from_beta(&beta, k + 1).unwrap();
        prop_assert_eq!(b.at(1), &Rat::one());
        prop_assert_eq!(beta_from_b(&b, k).unwrap(), beta);
    }

    #[test]
    fn inverse_composes_to_identity(tail in seq(1..7), lin in 1i64..5) {
        let k = 7;
        let mut c = vec![Rat::zero(), int(lin)];
        c.extend(tail);
        c.resize(k + 1, Rat::zero());
        let f = FormalSeries::new(c, Indeterminate::Z);
        let g = series_invert(&f, k).unwrap();
        let id = f.compose(&g, k).unwrap();
        for n in 0..=k {
            prop_assert_eq!(id.coeff(n), if n == 1 { Rat::one() } else { Rat::zero() });
        }
        let back = series_invert(&g, k).unwrap();
        prop_assert_eq!(back.coeffs(), &f.coeffs()[..=k]);
    }
}

#[test]
fn b2_is_half_beta1() {
    let beta = CoeffSeq::base1(vec![rat(3, 7)]);
    let b = b_from_beta(&beta, 2).unwrap();
    assert_eq!(b.at(2), &rat(3, 14));
}

#[test]
fn partition_counts() {
    // p(n) for n = 1..10
    let known = [1u64, 2, 3, 5, 7, 11, 15, 22, 30, 42];
    for (i, &p) in known.iter().enumerate() {
        let w = WeightedPartition::new(i + 1, i + 1);
        assert_eq!(w.count(), p);
        assert_eq!(w.enumerate().len() as u64, p);
    }
    assert_eq!(WeightedPartition::new(6, 2).count(), 4);
}

#[test]
fn thermo_maps_virial_coefficients() {
    let beta = CoeffSeq::base1(vec![int(2), rat(-1, 3), rat(5, 4)]);
    let t = thermo_maps(&beta, 3);
    assert_eq!(t.virial.at(1), &int(1));
    for n in 1..=3 {
        assert_eq!(t.virial.at(n + 1), &(-(int(n as i64) * beta.at(n)) / int(n as i64 + 1)));
        assert_eq!(t.pressure.coeff(n + 1), *t.virial.at(n + 1));
    }
}

#[test]
fn radius_on_known_sequences() {
    let geo: Vec<f64> = (1..=20).map(|n| 2f64.powi(n)).collect();
    let r = radius_estimate(&geo, RadiusMethod::Ratio).unwrap();
    assert!((r.estimate - 0.5).abs() < 1e-14);
    let alg: Vec<f64> = (1..=30).map(|n| f64::from(n).powf(-1.5) * 3f64.powi(n)).collect();
    let r = radius_estimate(&alg, RadiusMethod::DombSykes).unwrap();
    assert!((r.estimate - 1.0 / 3.0).abs() < 1e-3, "{}", r.estimate);
    assert!(radius_estimate(&geo[..3], RadiusMethod::Ratio).is_err());
}

#[test]
fn mismatched_bases_are_rejected() {
    let a = CoeffSeq::base0(vec![int(1)]);
    let b = CoeffSeq::base1(vec![int(1)]);
    assert!(conv(&a, &b).is_err());
}
