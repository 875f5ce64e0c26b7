//! Acceptance suite shared by the `acceptance` test target and `virial-lab selftest`.
//! Every criterion reports its sub-checks with the measured values.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{rngs::StdRng, Rng, SeedableRng};
use rayon::prelude::*;

use crate::bounds::{self, kappa, lambert_w, lp_bounds, majorant_h1, poly_eval, poly_family, threshold_solve};
use crate::engines::{
    asymptotic_smallt, c_at_origin, mayer_exact, numeric_trajectories, slope_formula, stationary_limit, virial_exact,
    ModelParams, Side, TrajectoryKind,
};
use crate::models::{hard_sphere_mayer_coeff, limit_pressures};
use crate::ring::{f64_to_rat, factorial, int, rat, rat_to_f64, EtaExpr, Rat};
use crate::series::{
    b_from_beta, beta_from_b, bk_closed, bk_sum, conv_domination_worst, radius_estimate, radius_estimate_from,
    thermo_maps, CoeffSeq, RadiusMethod,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let parts: Vec<String> = self
            .checks
            .iter()
            .map(|c| format!("{}{}: {}", if c.passed { "" } else { "!" }, c.label, c.detail))
            .collect();
        write!(f, "criterion {:>2} {} {} | {}", self.id, status, self.name, parts.join("; "))
    }
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn new() -> Self {
        Self { checks: Vec::new() }
    }

    fn check(&mut self, label: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { label: label.to_string(), passed, detail: detail.into() });
    }

    fn close(&mut self, label: &str, value: f64, target: f64, tol: f64) {
        let err = (value - target).abs();
        self.check(label, err <= tol, format!("{value:.10} vs {target} (err {err:.2e}, tol {tol:.0e})"));
    }

    fn finish(self, id: u32, name: &'static str) -> Outcome {
        Outcome { id, name, checks: self.checks }
    }
}

fn poly(c: &[Rat]) -> EtaExpr {
    EtaExpr::from_poly(c)
}

fn fail_on<T, E: fmt::Display>(b: &mut Builder, label: &str, r: Result<T, E>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            b.check(label, false, format!("error {e}"));
            None
        }
    }
}

pub fn criterion_1() -> Outcome {
    let mut b = Builder::new();
    let half = rat(1, 2);
    for eps in [half.clone(), rat(1, 3)] {
        let Some(v) = fail_on(&mut b, "virial", virial_exact(&ModelParams::new(3).with_epsilon(eps.clone()))) else {
            continue;
        };
        let lam = v.lambda_pow(1);
        let g2 = -(v.lambda_pow(3).scale(&(int(2) * &eps)));
        b.check(&format!("gamma1 = -lambda (eps {eps})"), v.gamma.at(1) == &-lam, v.gamma.at(1).to_string());
        b.check(&format!("gamma2 = -2 eps lambda^3 (eps {eps})"), v.gamma.at(2) == &g2, v.gamma.at(2).to_string());
        b.check(&format!("delta2 = -(1-eta) (eps {eps})"), v.delta.at(2) == &-EtaExpr::lambda(), v.delta.at(2).to_string());
        let d3 = -(EtaExpr::lambda() * poly(&[int(1), int(-2), rat(-1, 2)]));
        b.check(&format!("delta3 closed form (eps {eps})"), v.delta.at(3) == &d3, v.delta.at(3).to_string());
    }
    if let Some(m) = fail_on(&mut b, "mayer", mayer_exact(&ModelParams::new(2))) {
        let q2 = poly(&[int(1), rat(-3, 2), int(0), rat(1, 2)]);
        b.check("q2 = 1 - 3/2 eta + 1/2 eta^3", m.q.at(2) == &q2, m.q.at(2).to_string());
    }
    b.finish(1, "exact anchors")
}

pub fn criterion_2() -> Outcome {
    let mut b = Builder::new();
    let k_max = 20;
    if let Some(m) = fail_on(&mut b, "mayer", mayer_exact(&ModelParams::new(k_max))) {
        let rec = c_at_origin(k_max);
        let mut bad = Vec::new();
        for k in 0..=k_max {
            let closed = Rat::new(num_traits::pow(num_bigint::BigInt::from(k + 1), k), factorial(k as u64 + 1));
            let at_zero = m.c.at(k).eval_exact(&Rat::one());
            if at_zero.as_ref() != Ok(&closed) || rec[k] != closed {
                bad.push(k);
            }
        }
        b.check("c_k(0) = (k+1)^k/(k+1)!, k <= 20", bad.is_empty(), format!("mismatches {bad:?}"));
        let printed = [(2, rat(3, 2)), (3, rat(8, 3)), (4, rat(125, 24))];
        let ok = printed.iter().all(|(k, v)| m.c.at(*k).eval_exact(&Rat::one()).as_ref() == Ok(v));
        b.check("c2, c3, c4 = 3/2, 8/3, 125/24", ok, "printed values");
    }
    b.finish(2, "Mayer coefficients at t = 0")
}

fn random_rat(rng: &mut StdRng) -> Rat {
    let n: i64 = rng.gen_range(-50..=50);
    let d: i64 = rng.gen_range(1..=20);
    rat(n, d)
}

pub fn criterion_3() -> Outcome {
    let mut b = Builder::new();
    let k_max = 8;
    for eps in [rat(1, 2), rat(2, 5)] {
        let p = ModelParams::new(k_max + 1).with_epsilon(eps.clone());
        let (Some(v), Some(m)) = (fail_on(&mut b, "virial", virial_exact(&p)), fail_on(&mut b, "mayer", mayer_exact(&p)))
        else {
            continue;
        };
        if let Some(beta) = fail_on(&mut b, "inversion", beta_from_b(&m.b, k_max)) {
            let bad: Vec<usize> = (1..=k_max).filter(|&k| beta.at(k) != v.beta.at(k)).collect();
            b.check(&format!("beta_k(virial) = inverse(b) k <= 8, eps {eps}"), bad.is_empty(), format!("mismatches {bad:?}"));
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut failures = 0;
    let trials = 20;
    for trial in 0..trials {
        let kk = 2 + trial % 11;
        let beta = CoeffSeq::base1((0..kk).map(|_| random_rat(&mut rng)).collect::<Vec<_>>());
        let ok = b_from_beta(&beta, kk + 1)
            .and_then(|bb| beta_from_b(&bb, kk))
            .map(|back| back == beta)
            .unwrap_or(false);
        let mut bv = vec![Rat::one()];
        bv.extend((1..=kk).map(|_| random_rat(&mut rng)));
        let bseq = CoeffSeq::base1(bv);
        let ok2 = beta_from_b(&bseq, kk)
            .and_then(|be| b_from_beta(&be, kk + 1))
            .map(|back| back == bseq)
            .unwrap_or(false);
        if !ok || !ok2 {
            failures += 1;
        }
    }
    b.check("round trip b <-> beta, random rationals, K <= 12", failures == 0, format!("{failures}/{trials} trials failed"));
    b.finish(3, "cross-engine identity")
}

pub fn criterion_4() -> Outcome {
    let mut b = Builder::new();
    if let (Ok(k1), Ok(k0)) = (kappa(1.0), kappa(0.0)) {
        b.close("kappa(1)", k1, 1.0 - 0.5f64.sqrt(), 1e-12);
        b.close("kappa(0)", k0, 3.0 - 8f64.sqrt(), 1e-12);
    }
    let mut worst = 0.0f64;
    let mut min_r = f64::INFINITY;
    for i in 0..=1000 {
        let eta = i as f64 / 1000.0;
        let (Ok(h1), Ok(k)) = (majorant_h1(eta), kappa(eta)) else {
            worst = f64::INFINITY;
            continue;
        };
        worst = worst.max((h1.smallest - k).abs());
        if i > 0 {
            min_r = min_r.min(h1.smallest);
        }
    }
    b.check("R_{-,-} = kappa on 1001 points", worst <= 1e-12, format!("max diff {worst:.2e}"));
    match threshold_solve() {
        Ok(th) => {
            b.close("eta*", th.eta_star, 0.99463, 1e-4);
            b.close("epsilon t*", th.epsilon_t_star, 0.00538, 1e-4);
            b.checks.last_mut().unwrap().detail += &format!(" [-log eta* = {:.6}]", -th.eta_star.ln());
        }
        Err(e) => b.check("threshold", false, e.to_string()),
    }
    b.check(
        "R_{-,-} > 0.144767 on (0,1]",
        min_r > bounds::LEBOWITZ_PENROSE,
        format!("min {min_r:.6}"),
    );
    b.finish(4, "majorant bounds")
}

pub fn criterion_5() -> Outcome {
    let mut b = Builder::new();
    match lambert_w((-1.0f64).exp()) {
        Ok(w) => b.close("W(1/e)", w, 0.278465, 5e-7),
        Err(e) => b.check("W(1/e)", false, e.to_string()),
    }
    let mut worst = 0.0f64;
    let xs = (0..=400).map(|i| -0.36 + i as f64 * 0.001).chain((0..=120).map(|i| 10f64.powf(-6.0 + i as f64 * 0.1)));
    for x in xs {
        if x == 0.0 {
            continue;
        }
        let rel = match lambert_w(x) {
            Ok(w) => ((w * w.exp() - x) / x).abs(),
            Err(_) => f64::INFINITY,
        };
        worst = worst.max(rel);
    }
    b.check("W e^W = x relative", worst <= 1e-14, format!("max rel err {worst:.2e}"));
    match lp_bounds(1.0, 1.0) {
        Ok(lp) => {
            b.close("max (2e^-w - 1) w", lp.r0, 0.14476, 1e-5);
            b.checks.last_mut().unwrap().detail += &format!(" [w* = {:.5}]", lp.w_star);
        }
        Err(e) => b.check("LP", false, e.to_string()),
    }
    b.finish(5, "Lambert W")
}

/// `η = e^{−scale·t}` rounded to binary64, then taken exactly.
fn exact_etas(ts: &[f64], scale: f64) -> Vec<Rat> {
    ts.iter().map(|t| f64_to_rat((-scale * t).exp()).unwrap_or_else(|_| Rat::zero())).collect()
}

fn strictly_decreasing(v: &[Rat]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn family_failures(k: u64, grid: &[Rat]) -> Vec<String> {
    let mut fails = Vec::new();
    let Ok(f) = poly_family(k) else {
        fails.push(format!("k={k} construct"));
        return fails;
    };
    if !(f.p.iter().all(|x| x.is_positive()) && strictly_decreasing(&f.p)) {
        fails.push(format!("p k={k}"));
    }
    let q = f.q_coeffs();
    if !(q.iter().all(|x| x.is_positive()) && strictly_decreasing(q)) {
        fails.push(format!("q k={k}"));
    }
    if poly_eval(&f.q, &Rat::zero()) != Rat::zero() || poly_eval(&f.q, &Rat::one()) != Rat::one() {
        fails.push(format!("Q endpoints k={k}"));
    }
    if grid.iter().any(|e| poly_eval(&f.t, e) < *e) {
        fails.push(format!("T >= eta k={k}"));
    }
    if k == 2 && f.t != vec![Rat::zero(), Rat::one()] {
        fails.push("T2 = eta".into());
    }
    let (t1, rest) = f.claim_t();
    if !(t1 > Rat::one() && rest.iter().all(|x| x.is_positive())) {
        fails.push(format!("claim T signs k={k}"));
    }
    if !poly_eval(&f.l, &Rat::zero()).is_zero() || !poly_eval(&f.l, &Rat::one()).is_zero() {
        fails.push(format!("L endpoints k={k}"));
    }
    if grid.iter().any(|e| !poly_eval(&f.l, e).is_positive()) {
        fails.push(format!("L > 0 k={k}"));
    }
    fails
}

pub fn criterion_6() -> Outcome {
    let mut b = Builder::new();
    // 1001 interior points; endpoints are checked separately
    let grid: Vec<Rat> = (1..=1001).map(|i| rat(i, 1002)).collect();
    let fails: Vec<String> = (2..=15u64).into_par_iter().flat_map(|k| family_failures(k, &grid)).collect();
    b.check("p, q, Q, T, claim-T, L properties for 2 <= k <= 15", fails.is_empty(), format!("failures {fails:?}"));
    b.check("h_{3,1} = 80", bounds::h_const(3, 1) == int(80), bounds::h_const(3, 1).to_string());
    b.finish(6, "polynomial families")
}

pub fn criterion_7() -> Outcome {
    let mut b = Builder::new();
    for eps in [rat(1, 2), rat(1, 5)] {
        match asymptotic_smallt(12, &eps) {
            Ok(st) => {
                let bad: Vec<usize> = (2..=12).filter(|&k| st.slopes.at(k) != &slope_formula(k, &eps)).collect();
                b.check(&format!("d/dt delta_k(0) = (-1)^(k+1) k eps, 2 <= k <= 12, eps {eps}"), bad.is_empty(), format!("mismatches {bad:?}"));
            }
            Err(e) => b.check("slopes", false, e.to_string()),
        }
    }
    let et: f64 = 1e-4;
    let eta = (-2.0 * et).exp();
    let k_max = 16;
    let Some(v) = fail_on(&mut b, "virial", virial_exact(&ModelParams::new(k_max))) else {
        return b.finish(7, "small-time asymptotics");
    };
    let d: Vec<f64> = (1..=k_max).map(|k| v.delta.at(k).eval_exact_f64(eta).unwrap_or(f64::NAN)).collect();
    let sign_ok = (2..=10).all(|k| d[k - 1].signum() == if k % 2 == 1 { 1.0 } else { -1.0 });
    b.check("sign(delta_k) = (-1)^(k+1), 2 <= k <= 10", sign_ok, "at eps t = 1e-4");
    let mut worst = (0, 0.0f64);
    let mut over = Vec::new();
    for k in 2..=10 {
        let signed = if k % 2 == 1 { d[k - 1] } else { -d[k - 1] };
        let dev = (signed / (k as f64 * et) - 1.0).abs();
        if dev >= 1e-2 {
            over.push(format!("k={k}:{dev:.4}"));
        }
        if dev > worst.1 {
            worst = (k, dev);
        }
    }
    b.check(
        "|(-1)^(k+1) delta_k/(k eps t) - 1| < 1e-2, 2 <= k <= 10",
        over.is_empty(),
        format!("worst k={} dev {:.4}; over tolerance {over:?}", worst.0, worst.1),
    );
    let abs: Vec<f64> = d[1..].iter().map(|x| x.abs()).collect();
    match radius_estimate_from(&abs, 2, RadiusMethod::DombSykes) {
        Ok(r) => {
            b.close("lambda R from |delta_k|, k = 2..16 (Domb-Sykes)", r.estimate, 1.0, 0.02);
            if let Ok(ratio) = radius_estimate_from(&abs, 2, RadiusMethod::Ratio) {
                b.checks.last_mut().unwrap().detail += &format!(" [ratio method {:.4}]", ratio.estimate);
            }
        }
        Err(e) => b.check("radius", false, e.to_string()),
    }
    b.finish(7, "small-time asymptotics")
}

pub fn criterion_8() -> Outcome {
    let mut b = Builder::new();
    if let Some(v) = fail_on(&mut b, "virial", virial_exact(&ModelParams::new(12))) {
        let bad: Vec<usize> = (1..=12).filter(|&k| v.delta.at(k).limit_at_zero().ok() != Some(-Rat::one())).collect();
        b.check("delta_k(eta -> 0) = -1, k <= 12", bad.is_empty(), format!("mismatches {bad:?}"));
    }
    for eps in [rat(1, 2), rat(1, 3)] {
        let Some(st) = fail_on(&mut b, "stationary", stationary_limit(12, &eps)) else {
            continue;
        };
        let nonzero = st.residuals.values().iter().filter(|r| !r.is_zero()).count();
        b.check(&format!("stationary residual = 0, eps {eps}"), nonzero == 0, format!("{nonzero} nonzero"));
        let beta = CoeffSeq::base1(st.gamma_inf.values().iter().enumerate().map(|(i, g)| g / int(i as i64 + 1)).collect());
        let tm = thermo_maps(&beta, 12);
        let two_eps = &eps * int(2);
        let bad: Vec<usize> = (1..=13)
            .filter(|&m| tm.pressure.coeff(m) != Rat::one() / (int(m as i64) * num_traits::pow(two_eps.clone(), m - 1)))
            .collect();
        b.check(&format!("P0 coefficients, eps {eps}"), bad.is_empty(), format!("mismatches {bad:?}"));
        let e = rat_to_f64(&eps);
        if let (Ok(lp), Ok(p0)) = (limit_pressures(0.7, e, 0.3 * e), st.p0(0.3 * e)) {
            b.close(&format!("t -> infinity limit vs P0, eps {eps}"), lp.tinf, p0, 1e-15);
        }
    }
    match limit_pressures(1.0, 0.5, 0.1) {
        Ok(l) => {
            b.close("t -> 0 limit", l.t0, 0.1, 0.0);
            b.close("eps -> 0 limit", l.eps0, 0.105, 1e-15);
        }
        Err(e) => b.check("limits", false, e.to_string()),
    }
    match limit_pressures(1.0, 0.5, 0.5) {
        Ok(l) => b.close("t -> infinity limit", l.tinf, std::f64::consts::LN_2, 1e-15),
        Err(e) => b.check("limits", false, e.to_string()),
    }
    b.finish(8, "stationary and limit pressures")
}

pub fn criterion_9() -> Outcome {
    let mut b = Builder::new();
    let k_max = 12;
    let grid: Vec<f64> = (0..=100).map(|j| j as f64 * 0.05).collect();
    let p = ModelParams::new(k_max);
    let (Some(v), Some(m)) = (fail_on(&mut b, "virial", virial_exact(&p)), fail_on(&mut b, "mayer", mayer_exact(&p))) else {
        return b.finish(9, "numeric vs exact");
    };
    for (side, kind, name) in [(Side::Virial, TrajectoryKind::Delta, "delta"), (Side::Mayer, TrajectoryKind::C, "c")] {
        let Some(ns) = fail_on(&mut b, name, numeric_trajectories(&p, &grid, side)) else {
            continue;
        };
        let mut worst = 0.0f64;
        let ks = if side == Side::Virial { 1..=k_max } else { 0..=k_max };
        for k in ks {
            let ex = if side == Side::Virial { v.delta.at(k) } else { m.c.at(k) };
            for (j, &t) in grid.iter().enumerate() {
                let exact = ex.eval_exact_f64((-t).exp()).unwrap_or(f64::NAN);
                let num = ns.value(kind, k, j).unwrap_or(f64::NAN);
                let err = (exact - num).abs();
                worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
            }
        }
        b.check(&format!("max |numeric - exact| {name}, k <= 12, t in [0,5]"), worst <= 1e-9, format!("{worst:.2e}"));
    }
    let fine: Vec<f64> = (0..=400).map(|j| j as f64 * 0.1).collect();
    let mut nonmono = Vec::new();
    let mut far = 0.0f64;
    let etas = exact_etas(&fine, 1.0);
    for k in 2..=k_max {
        let vals: Vec<Rat> = etas.iter().map(|e| m.c.at(k).eval_exact(e).unwrap_or_else(|_| Rat::zero())).collect();
        if !vals.windows(2).all(|w| w[1] < w[0]) {
            nonmono.push(k);
        }
        far = far.max(rat_to_f64(&(vals.last().unwrap() - Rat::one())).abs());
    }
    b.check("c_k strictly decreasing on [0,40], 2 <= k <= 12", nonmono.is_empty(), format!("non-monotone {nonmono:?}"));
    b.check("|c_k(40) - 1| < 1e-6", far < 1e-6, format!("{far:.2e}"));
    b.finish(9, "numeric vs exact")
}

pub fn criterion_10() -> Outcome {
    let mut b = Builder::new();
    let bad: Vec<u64> = (2..=30).filter(|&n| bk_sum(n) != bk_closed(n)).collect();
    b.check("BK identity n <= 30", bad.is_empty(), format!("mismatches {bad:?}"));
    let (n, r) = conv_domination_worst(10_000);
    b.check("(c*c)_n <= c_n for n <= 1e4", r <= 1.0, format!("worst ratio {r:.6} at n = {n}"));
    // W(x) = Σ (−n)^{n−1}/n! x^n, the same numbers as the hard-sphere n b_n
    let w: Vec<f64> = (1..=40).map(|n| rat_to_f64(&hard_sphere_mayer_coeff(n)).abs()).collect();
    match radius_estimate(&w, RadiusMethod::DombSykes) {
        Ok(r) => {
            let e = (-1.0f64).exp();
            let rel = (r.estimate - e).abs() / e;
            b.check("W-series radius -> 1/e within 1% (40 terms)", rel <= 0.01, format!("{:.6} (rel err {rel:.2e})", r.estimate));
        }
        Err(e) => b.check("W radius", false, e.to_string()),
    }
    b.finish(10, "combinatorial identities")
}

pub fn criterion_11() -> Outcome {
    let mut b = Builder::new();
    let k_max = 12;
    let Some(v) = fail_on(&mut b, "virial", virial_exact(&ModelParams::new(k_max))) else {
        return b.finish(11, "qualitative oscillation content");
    };
    let mut bad_sign = Vec::new();
    for et in [1e-4f64, 1e-3] {
        for k in 2..=k_max {
            let d = v.delta.at(k).eval_exact_f64((-2.0 * et).exp()).unwrap_or(f64::NAN);
            if d.signum() != if k % 2 == 1 { 1.0 } else { -1.0 } {
                bad_sign.push((et, k));
            }
        }
    }
    b.check("sign alternation at eps t in {1e-4, 1e-3}, 2 <= k <= 12", bad_sign.is_empty(), format!("{bad_sign:?}"));
    // eventual monotone approach: |δ_k + 1| decreasing on εt ∈ [10, 20]
    let grid: Vec<f64> = (0..=100).map(|j| 10.0 + j as f64 * 0.1).collect();
    let etas = exact_etas(&grid, 2.0);
    let mut bad = Vec::new();
    let mut far = 0.0f64;
    for k in 1..=k_max {
        let dev: Vec<Rat> = etas
            .iter()
            .map(|e| (v.delta.at(k).eval_exact(e).unwrap_or_else(|_| Rat::zero()) + Rat::one()).abs())
            .collect();
        if k > 1 && !dev.windows(2).all(|w| w[1] < w[0]) {
            bad.push(k);
        }
        far = far.max(rat_to_f64(dev.last().unwrap()));
    }
    b.check("|delta_k + 1| decreasing for eps t in [10, 20]", bad.is_empty(), format!("non-monotone {bad:?}"));
    b.check("|delta_k(eps t = 20) + 1| < 1e-6", far < 1e-6, format!("{far:.2e}"));
    b.finish(11, "qualitative oscillation content")
}

pub fn run_all() -> Vec<Outcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ]
}
