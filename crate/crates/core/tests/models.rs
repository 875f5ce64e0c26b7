use num_traits::{One, Zero};
use virial_core::engines::{mayer_exact, ModelParams};
use virial_core::models::*;
use virial_core::ring::Rat;

#[test]
fn hard_sphere_coefficients_invert_z() {
    let inv = inverse_z_coeffs(15).unwrap();
    assert!(inv[0].is_zero());
    for n in 1..=15 {
        assert_eq!(inv[n], hard_sphere_mayer_coeff(n as u64), "n = {n}");
    }
    match hard_sphere_dinf(HardSphereQuery::MayerCoeff(4)).unwrap() {
        HardSphereValue::Exact(v) => assert_eq!(v, hard_sphere_mayer_coeff(4)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn hard_sphere_pressure_and_map() {
    assert_eq!(hard_sphere_pressure(0.4), 0.4 + 0.08);
    match hard_sphere_dinf(HardSphereQuery::Zmap(Cplx::new(-1.0, 0.0))).unwrap() {
        HardSphereValue::Point(z) => assert!((z.re + (-1.0f64).exp()).abs() < 1e-16),
        other => panic!("{other:?}"),
    }
    assert!(circle_image_z(1.3, 10).is_err());
}

#[test]
fn circle_images_are_inverse() {
    for i in 1..=10 {
        let r = f64::from(i) / (10.0 * std::f64::consts::E);
        for p in circle_image_w(r, 90).unwrap() {
            let z = Cplx::polar(p.radius, p.theta);
            let back = z_map(p.image);
            assert!((back - z).abs() < 1e-12 * r.max(1.0), "radius {r} theta {}", p.theta);
            assert!(p.image.re >= -1.0 - 1e-6);
        }
        let pts = circle_image_z(f64::from(i) / 10.0, 64).unwrap();
        assert_eq!(pts.len(), 65);
    }
}

#[test]
fn ford_continuity_and_tangency() {
    let p = ford_pressure();
    let f = ford_free_energy();
    let h = 1e-13;
    for x in [0.5, 1.5] {
        let (_, left) = p.eval(x - h).unwrap();
        let (_, right) = p.eval(x).unwrap();
        assert!((left - right).abs() < 1e-12, "P jump at {x}");
        let (_, fl) = f.eval(x - h).unwrap();
        let (_, fr) = f.eval(x).unwrap();
        assert!((fl - fr).abs() < 1e-12, "F jump at {x}");
    }
    let d = 1e-7;
    let fluid = f.branches[0].1;
    let dense = f.branches[2].1;
    assert!(((fluid(0.5) - fluid(0.5 - d)) / d).abs() < 1e-6);
    assert!(((dense(1.5 + d) - dense(1.5)) / d).abs() < 1e-6);
    assert_eq!(ford_model(0.25).unwrap().branch, FordBranch::Fluid);
    assert_eq!(ford_model(1.5).unwrap().branch.label(), "dense");
    let tiny = ford_model(1e-9).unwrap();
    assert!((tiny.p - 1e-9).abs() < 1e-17);
    assert!(ford_model(-0.1).is_err());
}

#[test]
fn majorant_q_matches_mayer_engine() {
    let taylor = mayer_majorant_taylor(12).unwrap();
    let m = mayer_exact(&ModelParams::new(12)).unwrap();
    for k in 0..=12 {
        assert_eq!(taylor[k], m.c.at(k).eval_exact(&Rat::one()).unwrap());
    }
    // Q against its partial sums well inside the disc
    let (t, z, eps) = (0.8, 0.3, 0.5);
    let lam = (1.0 - (-2.0f64 * eps * t).exp()) / (2.0 * eps);
    let x = lam * z;
    let sum: f64 = taylor.iter().enumerate().map(|(k, c)| virial_core::ring::rat_to_f64(c) * x.powi(k as i32)).sum();
    let q = mayer_majorant_q(t, z, eps).unwrap();
    assert!((q - sum).abs() < 1e-5, "{q} vs {sum}");
    assert_eq!(mayer_majorant_q(0.0, 5.0, eps).unwrap(), 1.0);
    assert!(mayer_majorant_q(100.0, 1.0 / std::f64::consts::E * 1.01, 0.5).is_err());
    assert!(taylor[0].is_one());
}

#[test]
fn limit_pressures_domain() {
    let l = limit_pressures(2.0, 0.25, 0.0).unwrap();
    assert_eq!((l.t0, l.eps0, l.tinf), (0.0, 0.0, 0.0));
    assert!(limit_pressures(1.0, 0.25, -0.5).is_err());
}
