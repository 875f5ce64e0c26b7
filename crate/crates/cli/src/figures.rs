//! Data behind the figures, all in the `2ε = 1` normalization.

use std::path::Path;

use virial_core::bounds::{h_root, kappa, lambert_w, poly_eval_f64, poly_family, LEBOWITZ_PENROSE};
use virial_core::engines::{mayer_exact, numeric_trajectories, virial_exact, ModelParams, Side, TrajectoryKind};
use virial_core::models::{circle_image_w, circle_image_z, CirclePoint};

use crate::output::{metadata, num, write_atomic, Table};
use crate::{grid, CliError};

pub const FILES: [&str; 9] =
    ["fig_kappa.csv", "fig3.csv", "fig5.csv", "figL.csv", "fig1.csv", "fig2.csv", "fig6.csv", "fig7.csv", "figq.csv"];

fn eta_grid() -> Vec<f64> {
    grid(0.0, 1.0, 0.001)
}

fn fig_kappa() -> Result<Table, CliError> {
    let w = lambert_w((-1.0f64).exp())?;
    let mut t = Table::new(&["eta", "kappa", "lebowitz_penrose", "w_inv_e"]);
    for e in eta_grid() {
        t.push(vec![num(e), num(kappa(e)?), num(LEBOWITZ_PENROSE), num(w)]);
    }
    Ok(t)
}

fn fig3() -> Table {
    let mut t = Table::new(&["eta", "value", "name"]);
    for e in eta_grid() {
        if let Some(r) = h_root(-1, -1, e) {
            t.push(vec![num(e), num(r), "r_mm".into()]);
        }
    }
    t
}

fn family_curves(l_side: bool) -> Result<Table, CliError> {
    let mut t = Table::new(&["eta", "value", "name"]);
    for k in 2..=6u64 {
        let f = poly_family(k)?;
        let (c, name) = if l_side { (&f.l, format!("L{k}")) } else { (&f.t, format!("T{k}")) };
        for e in eta_grid() {
            t.push(vec![num(e), num(poly_eval_f64(c, e)), name.clone()]);
        }
    }
    Ok(t)
}

fn circles(pts: Vec<Vec<CirclePoint>>) -> Table {
    let mut t = Table::new(&["radius", "theta", "re", "im"]);
    for p in pts.into_iter().flatten() {
        t.push(vec![num(p.radius), num(p.theta), num(p.image.re), num(p.image.im)]);
    }
    t
}

fn fig1() -> Result<Table, CliError> {
    let pts = (1..=10).map(|i| circle_image_z(f64::from(i) / 10.0, 360)).collect::<Result<Vec<_>, _>>()?;
    Ok(circles(pts))
}

fn fig2() -> Result<Table, CliError> {
    let e = std::f64::consts::E;
    let pts = (1..=10).map(|i| circle_image_w(f64::from(i) / (10.0 * e), 360)).collect::<Result<Vec<_>, _>>()?;
    Ok(circles(pts))
}

fn fig6() -> Result<Table, CliError> {
    let params = ModelParams::new(29);
    let ts = grid(0.0, 3.0, 0.01);
    let set = numeric_trajectories(&params, &ts, Side::Virial)?;
    let mut t = Table::new(&["k", "t", "eta", "value_kind", "value"]);
    for k in 1..=29 {
        for (j, &time) in ts.iter().enumerate() {
            let v = set.value(TrajectoryKind::Delta, k, j).unwrap_or(f64::NAN);
            t.push(vec![k.to_string(), num(time), num((-time).exp()), "delta".into(), num(v)]);
        }
    }
    Ok(t)
}

fn fig7() -> Result<Table, CliError> {
    let v = virial_exact(&ModelParams::new(15))?;
    let mut t = Table::new(&["k", "t", "eta", "value_kind", "value"]);
    for time in [0.17f64, 0.33, 0.75] {
        let eta = (-time).exp();
        for k in 1..=15 {
            t.push(vec![k.to_string(), num(time), num(eta), "delta".into(), num(v.delta.at(k).eval_exact_f64(eta)?)]);
        }
    }
    Ok(t)
}

fn figq() -> Result<Table, CliError> {
    let m = mayer_exact(&ModelParams::new(12))?;
    let mut t = Table::new(&["k", "t", "q_over_lambda_k"]);
    for k in 0..=12 {
        for time in grid(0.0, 5.0, 0.05) {
            // q_k/λ^k = (−1)^k c_k
            let c = m.c.at(k).eval_exact_f64((-time).exp())?;
            let v = if k % 2 == 0 { c } else { -c };
            t.push(vec![k.to_string(), num(time), num(v)]);
        }
    }
    Ok(t)
}

pub fn write_all(dir: &Path, args: &[String]) -> Result<(), CliError> {
    let tables = [fig_kappa()?, fig3(), family_curves(false)?, family_curves(true)?, fig1()?, fig2()?, fig6()?, fig7()?, figq()?];
    for (name, t) in FILES.iter().zip(&tables) {
        write_atomic(&dir.join(name), &t.to_csv())?;
    }
    let files: Vec<String> = FILES.iter().map(|s| s.to_string()).collect();
    write_atomic(&dir.join("metadata.json"), &metadata("figures", args, &files))?;
    Ok(())
}
