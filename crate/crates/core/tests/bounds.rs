use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use virial_core::bounds::*;
use virial_core::ring::{int, rat, EtaExpr, Rat};
use virial_core::series::{radius_estimate, RadiusMethod};

#[test]
fn p_and_r_through_the_kernel() {
    for k in 2..=12u64 {
        let f = poly_family(k).unwrap();
        let n = int(n_k(k) as i64);
        let p = EtaExpr::one_minus_eta_pow(k as u32)
            .kernel_integrate(k)
            .scale(&n)
            .div_one_minus_eta_pow(k as u32 + 1)
            .unwrap();
        assert_eq!(p, EtaExpr::from_poly(&f.p), "P_{k}");
        let r = EtaExpr::one_minus_eta_pow(k as u32 - 1)
            .kernel_integrate(k)
            .scale(&n)
            .div_one_minus_eta_pow(k as u32)
            .unwrap();
        assert_eq!(r, EtaExpr::from_poly(&f.r), "R_{k}");
        assert_eq!(poly_eval(&f.r, &Rat::zero()), Rat::one());
        assert_eq!(poly_eval(&f.r, &Rat::one()), rat(k as i64 + 1, 2));
    }
}

#[test]
fn family_invariants_up_to_20() {
    for k in 2..=20u64 {
        let f = poly_family(k).unwrap();
        assert_eq!(f.p.len() as u64, f.d_int + 1);
        assert_eq!(f.r.len() as u64, f.d_contra + 1);
        assert_eq!(f.q.len() as u64, f.d_int + 2);
        assert!(f.p.iter().all(|x| x.is_positive()));
        assert!(f.q_coeffs().iter().all(|x| x.is_positive()));
        assert_eq!(f.q_coeffs().iter().fold(Rat::zero(), |s, x| s + x), Rat::one());
        let (t1, rest) = f.claim_t();
        let pk1 = poly_family(k + 1).unwrap().p.get(1).cloned().unwrap_or_else(Rat::zero);
        let p1 = f.p.get(1).cloned().unwrap_or_else(Rat::zero);
        assert_eq!(t1, Rat::one() - p1 + int(k as i64 - 1) * (Rat::one() - pk1));
        // positivity runs up to the full degree N_k + 1 of T_k
        assert_eq!(rest.len() as u64, n_k(k));
        assert!(rest.iter().all(|x| x.is_positive()), "k = {k}");
        if k >= 3 {
            assert!(t1 >= rat(67, 45));
        }
        for (n, l) in f.l_coeffs().iter().enumerate() {
            let n = n + 1;
            let pn = f.r.get(n).cloned().unwrap_or_else(Rat::zero);
            assert_eq!(*l, pn - rat(k as i64 - 1, k as i64 + 1) * &f.r[n - 1]);
        }
    }
    let (t31, _) = poly_family(3).unwrap().claim_t();
    assert_eq!(t31, rat(67, 45));
    assert_eq!(poly_family(2).unwrap().claim_t().0, rat(8, 5));
    assert!(poly_family(1).is_err());
}

#[test]
fn q_is_one_minus_p_times_one_minus_eta() {
    let f = poly_family(6).unwrap();
    for j in 0..=10 {
        let e = rat(j, 10);
        assert_eq!(poly_eval(&f.q, &e), Rat::one() - (Rat::one() - &e) * poly_eval(&f.p, &e));
    }
}

#[test]
fn h_constant_two_routes() {
    for k in 2..=12 {
        for n in 0..=(k * (k + 1) / 2) {
            assert_eq!(h_const(k, n), h_const_via_degrees(k, n), "k={k} n={n}");
        }
    }
}

#[test]
fn h_roots_solve_discriminant_and_set_radius() {
    for (num, den) in [(0, 1), (1, 100), (1, 4), (1, 2), (9, 10)] {
        let eta = rat(num, den);
        let e = num as f64 / den as f64;
        let h = majorant_h(&eta, 60).unwrap();
        for r in h.roots.iter().flatten() {
            let scale = 1.0 + e * e * r.powi(4) + r * r;
            assert!(h_discriminant(*r, e).abs() < 1e-10 * scale, "eta {e} root {r}");
        }
        assert!(h.series.coeffs()[1..].iter().all(|c| c.is_positive()));
        let coeffs: Vec<f64> = h.series.coeffs()[1..].iter().map(virial_core::ring::rat_to_f64).collect();
        let est = radius_estimate(&coeffs, RadiusMethod::DombSykes).unwrap().estimate;
        assert!((est / h.smallest_positive - 1.0).abs() < 1e-2, "eta {e}: {est} vs {}", h.smallest_positive);
    }
    assert!(majorant_h(&Rat::one(), 4).is_err());
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn h1_smallest_root_by_bisection() {
    for j in 0..20 {
        let e = f64::from(j) / 20.0;
        let m = majorant_h1(e).unwrap();
        // the quartic is positive at r = 0 and first changes sign at the smallest root
        let f = |r: f64| h1_discriminant(r, e);
        let mut hi = 0.0;
        while f(hi) > 0.0 {
            hi += 1e-3;
            assert!(hi < 2.0, "no sign change at eta {e}");
        }
        let root = bisect(f, hi - 1e-3, hi);
        assert!((root - m.smallest).abs() < 1e-9, "eta {e}: {root} vs {}", m.smallest);
        assert!((m.smallest - kappa(e).unwrap()).abs() < 1e-12);
        for r in m.roots {
            assert!(f(r).abs() < 1e-9, "eta {e}: root {r}");
        }
        assert!(m.roots.iter().all(|r| *r >= m.smallest - 1e-15));
    }
}

#[test]
fn h1_double_root_at_eta_one() {
    // the two smallest roots merge into 1 − 1/√2
    let m = majorant_h1(1.0).unwrap();
    assert!((m.roots[2] - m.roots[3]).abs() < 1e-15);
    assert!(h1_discriminant(m.smallest, 1.0).abs() < 1e-12);
    assert!(h1_discriminant(m.smallest - 1e-3, 1.0) > 0.0 && h1_discriminant(m.smallest + 1e-3, 1.0) > 0.0);
}

#[test]
fn threshold_hits_w_of_inverse_e() {
    let th = threshold_solve().unwrap();
    let w = lambert_w((-1.0f64).exp()).unwrap();
    assert!((kappa(th.eta_star).unwrap() - w).abs() < 1e-12);
    assert!((th.epsilon_t_star + th.eta_star.ln() / 2.0).abs() < 1e-15);
}

#[test]
fn lp_against_grid_search() {
    for (kap, b) in [(1.0, 1.0), (2.0, 0.5), (3.5, 2.0)] {
        let lp = lp_bounds(kap, b).unwrap();
        let brute = (0..=100_000)
            .map(|i| {
                let w = f64::from(i) / 100_000.0;
                ((1.0 + kap) * (-w).exp() - 1.0) * w / (kap * kap * b)
            })
            .fold(f64::MIN, f64::max);
        assert!(lp.r0 >= brute - 1e-15 && lp.r0 - brute < 1e-9);
    }
    assert!(matches!(lp_bounds(1.0, 0.0), Err(BoundsError::DegenerateParams(_))));
}

#[test]
fn bound_curve_sampling() {
    let grid: Vec<f64> = (0..=10).map(|i| f64::from(i) / 10.0).collect();
    let c = BoundCurve::sample("kappa", &grid, kappa).unwrap();
    assert_eq!(c.samples.len(), 11);
    assert!(c.samples.windows(2).all(|w| w[1].1 > w[0].1));
    assert!(BoundCurve::sample("kappa", &[0.5, 0.1], kappa).is_err());
}

proptest! {
    #[test]
    fn lambert_identity(x in -0.3678f64..1e6) {
        let w = lambert_w(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-14 * x.abs().max(1e-300) + 1e-300);
        prop_assert!(w >= -1.0);
    }

    #[test]
    fn lambert_log_grid(e in -8.0f64..8.0) {
        let x = 10f64.powf(e);
        let w = lambert_w(x).unwrap();
        prop_assert!(((w * w.exp() - x) / x).abs() <= 1e-14);
    }
}
