use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_virial-lab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const FIGURES: [&str; 9] =
    ["fig_kappa.csv", "fig3.csv", "fig5.csv", "figL.csv", "fig1.csv", "fig2.csv", "fig6.csv", "fig7.csv", "figq.csv"];

#[test]
fn figures_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        let o = lab(&["figures", "--out", d.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in FIGURES {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert!(!x.is_empty() && x == y, "{f}");
        assert!(!x.contains(&b'\r'), "{f} has CR line endings");
        let text = String::from_utf8(x).unwrap();
        assert!(!text.contains("NaN") && !text.contains("inf"), "{f}");
    }
    assert!(a.path().join("metadata.json").exists());
    let csvs = fs::read_dir(a.path()).unwrap().filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "csv").count();
    assert_eq!(csvs, 9);
}

fn rows(dir: &Path, name: &str) -> Vec<Vec<String>> {
    fs::read_to_string(dir.join(name)).unwrap().lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn figure_shapes() {
    let d = tempfile::tempdir().unwrap();
    assert!(lab(&["figures", "--out", d.path().to_str().unwrap()]).status.success());
    assert_eq!(rows(d.path(), "fig6.csv").len(), 29 * 301);
    assert_eq!(rows(d.path(), "fig7.csv").len(), 45);
    assert_eq!(rows(d.path(), "figq.csv").len(), 13 * 101);
    let names: std::collections::BTreeSet<String> = rows(d.path(), "fig5.csv").into_iter().map(|r| r[2].clone()).collect();
    assert_eq!(names.into_iter().collect::<Vec<_>>(), ["T2", "T3", "T4", "T5", "T6"]);
    let kappa = rows(d.path(), "fig_kappa.csv");
    assert_eq!(kappa.len(), 1001);
    assert!(kappa.iter().all(|r| r[2].parse::<f64>().unwrap() == 0.144767));
}

#[test]
fn exact_values_at_half() {
    let o = lab(&["coeffs", "--K", "12", "--eta", "0.5", "--mode", "exact"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "index,value");
    assert_eq!(lines.len(), 13);
    assert_eq!(lines[1], "1,-1/1");
    assert_eq!(lines[2], "2,-1/2");
}

#[test]
fn json_exact_expressions_include_delta_three() {
    let o = lab(&["coeffs", "--K", "3", "--mode", "exact", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cs = v["coefficients"].as_array().unwrap();
    assert_eq!(cs.len(), 3);
    assert_eq!(cs[2]["index"], 3);
    let terms = cs[2]["expr"]["terms"].as_array().unwrap();
    assert!(!terms.is_empty());
    for t in terms {
        for key in ["a", "m", "num", "den"] {
            assert!(t.get(key).is_some(), "{key}");
        }
        assert_eq!(t["m"], 0);
    }
}

#[test]
fn kappa_curve_on_fine_grid() {
    let o = lab(&["bounds", "--curve", "kappa", "--grid", "0:1:0.001"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 1002);
    let last: Vec<&str> = s.lines().last().unwrap().split(',').collect();
    let k1: f64 = last[1].parse().unwrap();
    assert!((k1 - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
}

#[test]
fn invert_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let beta = d.path().join("beta.csv");
    let o = lab(&["coeffs", "--K", "10", "--kind", "beta", "--eta", "1/4", "--out", beta.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(d.path().join("beta.csv.metadata.json").exists());
    let b = lab(&["invert", "--from", "beta", "--input", beta.to_str().unwrap(), "--K", "10"]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    let mayer = lab(&["mayer", "--K", "9", "--kind", "b", "--eta", "1/4"]);
    assert_eq!(stdout(&b), stdout(&mayer));
    let bfile = d.path().join("b.csv");
    fs::write(&bfile, stdout(&b)).unwrap();
    // β_k needs b up to index k + 1.
    let back = lab(&["invert", "--from", "b", "--input", bfile.to_str().unwrap(), "--K", "9"]);
    assert!(back.status.success(), "{}", String::from_utf8_lossy(&back.stderr));
    let expect: String = fs::read_to_string(&beta).unwrap().lines().take(10).map(|l| format!("{l}\n")).collect();
    assert_eq!(stdout(&back), expect);
    let short = lab(&["invert", "--from", "b", "--input", bfile.to_str().unwrap(), "--K", "10"]);
    assert_eq!(short.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&short.stderr).contains("InsufficientOrder"));
}

#[test]
fn exit_codes() {
    assert_eq!(lab(&["bounds", "--curve", "threshold"]).status.code(), Some(0));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lab(&["coeffs", "--epsilon", "-1/2"]).status.code(), Some(2));
    assert_eq!(lab(&["coeffs", "--kind", "q"]).status.code(), Some(2));
    assert_eq!(lab(&["bounds", "--grid", "0:1"]).status.code(), Some(2));
    let o = lab(&["bounds", "--curve", "kappa", "--grid", "0:2:0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DomainError"));
    let o = lab(&["models", "--model", "ford", "--grid", "0:3:1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DomainError"));
}

#[test]
fn thread_cap_is_honored_and_validated() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_virial-lab"))
            .args(["coeffs", "--K", "5", "--eta", "1/2"])
            .env("VIRIAL_LAB_THREADS", v)
            .output()
            .unwrap()
    };
    assert!(run("1").status.success());
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn float_mode_matches_exact() {
    let e = stdout(&lab(&["coeffs", "--K", "8", "--t", "0.5:1:0.5"]));
    let f = stdout(&lab(&["coeffs", "--K", "8", "--mode", "float", "--t", "0.5:1:0.5"]));
    let parse = |s: &str| -> Vec<f64> { s.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect() };
    let (a, b) = (parse(&e), parse(&f));
    assert_eq!(a.len(), 16);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()), "{x} vs {y}");
    }
}

#[test]
fn help_lists_command_map() {
    let s = stdout(&lab(&["--help"]));
    for c in ["coeffs", "mayer", "bounds", "polys", "invert", "models", "figures", "selftest", "eta = exp(-2 epsilon t)"] {
        assert!(s.contains(c), "{c}");
    }
}

#[test]
fn selftest_reports_every_criterion() {
    let o = lab(&["selftest"]);
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.starts_with("criterion ")).count(), 11);
    let all_pass = s.contains("11 of 11 criteria pass");
    assert_eq!(o.status.success(), all_pass);
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 1 }));
}
