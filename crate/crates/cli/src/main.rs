//! `virial-lab`: emits coefficient, bound, model and figure data as CSV or JSON.

mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;
use virial_core::acceptance;
use virial_core::bounds::{self, kappa, lp_bounds, majorant_h1, poly_family, threshold_solve, BoundCurve};
use virial_core::engines::{
    mayer_exact, numeric_trajectories, virial_exact, ModelParams, NumericSet, Side, TrajectoryKind,
};
use virial_core::models::{self, ford_model, hard_sphere_mayer_coeff, limit_pressures, mayer_majorant_q};
use virial_core::ring::{parse_rat, rat_string, rat_to_f64, EtaExpr, Rat};
use virial_core::series::{b_from_beta, beta_from_b, CoeffSeq};

use output::{emit, num, Table};

const COMMAND_MAP: &str = "\
Commands and the quantities they emit:
  coeffs    virial side: gamma_k, delta_k = gamma_k/lambda^k, beta_k = gamma_k/k
  mayer     Mayer side: q_k, c_k = (-1)^k q_k/lambda^k, b_k = q_(k-1)/k
  bounds    kappa(eta), r_(-,-)(eta), R_(-,-)(eta), Lebowitz-Penrose maximization, W(1/e) threshold
  polys     P_k, Q_k, T_k, R_k, L_k coefficient lists, claim-T coefficients, h_(k,n)
  invert    b_l <-> beta_k by the partition sums
  models    hard spheres in d = infinity, Ford model, limit pressures, Mayer majorant Q(t, z)
  figures   fig_kappa, fig3, fig5, figL, fig1, fig2, fig6, fig7, figq CSV files
  selftest  acceptance suite, nonzero exit on any failure

Time enters through eta = exp(-2 epsilon t); epsilon is a rational p/q.
Grids are start:stop:step. Exit codes: 0 ok, 1 engine error, 2 usage error.
Environment: VIRIAL_LAB_THREADS caps parallelism.";

#[derive(Parser, Debug)]
#[command(name = "virial-lab", version, about = "Mayer and virial coefficient laboratory", after_help = COMMAND_MAP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Virial-side coefficients
    Coeffs(CoeffArgs),
    /// Mayer-side coefficients
    Mayer(CoeffArgs),
    /// Convergence-radius bound curves
    Bounds(BoundsArgs),
    /// Polynomial families
    Polys(PolyArgs),
    /// Series inversion between b and beta
    Invert(InvertArgs),
    /// Closed-form reference models
    Models(ModelArgs),
    /// All figure data files
    Figures(FigureArgs),
    /// Acceptance suite
    Selftest,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Exact,
    Float,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Gamma,
    Delta,
    Beta,
    Q,
    C,
    B,
}

#[derive(Args, Debug)]
struct CoeffArgs {
    /// Truncation order (default 16 exact, 30 float)
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    /// Single η value, rational or decimal
    #[arg(long, conflicts_with = "t")]
    eta: Option<String>,
    /// Time grid start:stop:step
    #[arg(long)]
    t: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// delta/gamma/beta for coeffs, c/q/b for mayer
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Curve {
    Kappa,
    RMinusMinus,
    H1MinusMinus,
    Lp,
    Threshold,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, value_enum, default_value = "kappa")]
    curve: Curve,
    #[arg(long, default_value = "0:1:0.01")]
    grid: String,
    /// Stability constant for the LP maximization
    #[arg(long = "kappa-stab", default_value_t = 1.0)]
    kappa_stab: f64,
    #[arg(long = "B", default_value_t = 1.0)]
    b: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    P,
    Q,
    T,
    R,
    L,
    ClaimT,
    H,
}

#[derive(Args, Debug)]
struct PolyArgs {
    /// Largest k
    #[arg(long = "K", default_value_t = 6)]
    k: u64,
    #[arg(long, value_enum, default_value = "p")]
    family: Family,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    Beta,
    B,
}

#[derive(Args, Debug)]
struct InvertArgs {
    #[arg(long, value_enum)]
    from: Source,
    /// CSV with header index,value and rational values
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "K")]
    k: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Model {
    HardSphere,
    HardSphereCoeffs,
    Ford,
    Limits,
    Majorant,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// ρ or z grid start:stop:step
    #[arg(long, default_value = "0:0.5:0.01")]
    grid: String,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    /// Number of coefficients for hard-sphere-coeffs
    #[arg(long = "K", default_value_t = 12)]
    k: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Engine(String),
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
}

macro_rules! engine_errors {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Engine(e.to_string())
            }
        })*
    };
}

engine_errors!(
    virial_core::engines::EngineError,
    virial_core::bounds::BoundsError,
    virial_core::models::ModelError,
    virial_core::series::SeriesError,
    virial_core::ring::RingError
);

/// `start:stop:step`, points computed as `start + i·step` to avoid drift.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("grid '{spec}' must be start:stop:step with step > 0 and stop >= start"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let (a, b, s) = (v[0], v[1], v[2]);
    if !(s > 0.0 && b >= a && a.is_finite() && b.is_finite()) {
        return Err(bad());
    }
    Ok(grid(a, b, s))
}

pub fn grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| if i == n && ((a + n as f64 * step) - b).abs() < 1e-9 * step { b } else { a + i as f64 * step }).collect()
}

fn parse_eps(s: &str) -> Result<Rat, CliError> {
    let e = parse_rat(s).map_err(|e| CliError::Usage(format!("epsilon: {e}")))?;
    if e <= Rat::from_integer(0.into()) {
        return Err(CliError::Usage("epsilon must be positive".into()));
    }
    Ok(e)
}

fn render(t: &Table, format: Format, extra: serde_json::Value) -> String {
    match format {
        Format::Csv => t.to_csv(),
        Format::Json => {
            let mut v = t.to_json();
            if let (Some(obj), Some(ex)) = (v.as_object_mut(), extra.as_object()) {
                for (k, x) in ex {
                    obj.insert(k.clone(), x.clone());
                }
            }
            let mut s = serde_json::to_string_pretty(&v).expect("json");
            s.push('\n');
            s
        }
    }
}

fn numeric_side_kind(kind: Kind) -> Side {
    match kind {
        Kind::Gamma | Kind::Delta | Kind::Beta => Side::Virial,
        _ => Side::Mayer,
    }
}

fn traj_kind(kind: Kind) -> TrajectoryKind {
    match kind {
        Kind::Gamma => TrajectoryKind::Gamma,
        Kind::Delta => TrajectoryKind::Delta,
        Kind::Beta => TrajectoryKind::Beta,
        Kind::Q => TrajectoryKind::Q,
        Kind::C => TrajectoryKind::C,
        Kind::B => TrajectoryKind::B,
    }
}

fn run_coeffs(a: &CoeffArgs, mayer: bool, argv: &[String]) -> Result<(), CliError> {
    let kind = a.kind.unwrap_or(if mayer { Kind::C } else { Kind::Delta });
    if mayer != matches!(kind, Kind::Q | Kind::C | Kind::B) {
        let valid = if mayer { "q, c, b" } else { "gamma, delta, beta" };
        return Err(CliError::Usage(format!("--kind {} is not available here; valid kinds: {valid}", traj_kind(kind).name())));
    }
    let eps = parse_eps(&a.epsilon)?;
    let k_max = a.k.unwrap_or(if a.mode == Mode::Exact { 16 } else { 30 });
    if k_max < 1 {
        return Err(CliError::Usage("--K must be at least 1".into()));
    }
    let params = ModelParams::new(k_max).with_epsilon(eps.clone());
    let tk = traj_kind(kind);
    let name = tk.name();
    let extra = json!({ "kind": name, "epsilon": rat_string(&eps), "K": k_max });
    let two_eps = 2.0 * rat_to_f64(&eps);
    let eta = match &a.eta {
        Some(s) => {
            let e = parse_rat(s).map_err(|e| CliError::Usage(format!("eta: {e}")))?;
            if e <= Rat::from_integer(0.into()) || e > Rat::from_integer(1.into()) {
                return Err(CliError::Usage("eta must lie in (0, 1]".into()));
            }
            Some(e)
        }
        None => None,
    };
    let times = a.t.as_deref().map(parse_grid).transpose()?;
    let cmd = if mayer { "mayer" } else { "coeffs" };

    let body = if a.mode == Mode::Exact {
        let seq: CoeffSeq<EtaExpr> = if mayer {
            let m = mayer_exact(&params)?;
            match kind {
                Kind::Q => m.q,
                Kind::C => m.c,
                _ => m.b,
            }
        } else {
            let v = virial_exact(&params)?;
            match kind {
                Kind::Gamma => v.gamma,
                Kind::Delta => v.delta,
                _ => v.beta,
            }
        };
        if let Some(e) = &eta {
            let mut t = Table::new(&["index", "value"]);
            for k in seq.indices() {
                t.push(vec![k.to_string(), rat_string(&seq.at(k).eval_exact(e)?)]);
            }
            render(&t, a.format, json!({ "kind": name, "epsilon": rat_string(&eps), "eta": rat_string(e) }))
        } else if let Some(ts) = &times {
            let mut t = Table::new(&["k", "t", "eta", "value_kind", "value"]);
            for k in seq.indices() {
                for &time in ts {
                    let e = (-two_eps * time).exp();
                    t.push(vec![k.to_string(), num(time), num(e), name.into(), num(seq.at(k).eval_exact_f64(e)?)]);
                }
            }
            render(&t, a.format, extra)
        } else {
            match a.format {
                Format::Csv => {
                    let mut t = Table::new(&["index", "value"]);
                    for k in seq.indices() {
                        t.push(vec![k.to_string(), seq.at(k).to_string()]);
                    }
                    t.to_csv()
                }
                Format::Json => {
                    let coeffs: Vec<_> =
                        seq.indices().map(|k| json!({ "index": k, "expr": seq.at(k).to_json_value() })).collect();
                    let v = json!({ "kind": name, "epsilon": rat_string(&eps), "base": seq.base(), "coefficients": coeffs });
                    let mut s = serde_json::to_string_pretty(&v).expect("json");
                    s.push('\n');
                    s
                }
            }
        }
    } else {
        let ts = match (&eta, times) {
            (Some(e), _) => vec![-rat_to_f64(e).ln() / two_eps],
            (None, Some(ts)) => ts,
            (None, None) => grid(0.0, 5.0, 0.05),
        };
        let set: NumericSet = numeric_trajectories(&params, &ts, numeric_side_kind(kind))?;
        let mut t = Table::new(&["k", "t", "eta", "value_kind", "value"]);
        let ks = if tk.base() == 0 { 0..=k_max } else if kind == Kind::B { 1..=k_max + 1 } else { 1..=k_max };
        for k in ks {
            for (j, &time) in ts.iter().enumerate() {
                let v = set.value(tk, k, j).ok_or_else(|| CliError::Engine(format!("no value for k = {k}")))?;
                t.push(vec![k.to_string(), num(time), num((-two_eps * time).exp()), name.into(), num(v)]);
            }
        }
        render(&t, a.format, extra)
    };
    emit(a.out.as_deref(), &body, cmd, argv)?;
    Ok(())
}

fn curve_table(c: &BoundCurve) -> Table {
    let mut t = Table::new(&["eta", "value", "name"]);
    for (e, v) in &c.samples {
        t.push(vec![num(*e), num(*v), c.name.clone()]);
    }
    t
}

fn run_bounds(a: &BoundsArgs, argv: &[String]) -> Result<(), CliError> {
    let t = match a.curve {
        Curve::Kappa => curve_table(&BoundCurve::sample("kappa", &parse_grid(&a.grid)?, kappa)?),
        Curve::RMinusMinus => curve_table(&BoundCurve::sample("r_mm", &parse_grid(&a.grid)?, |e| {
            bounds::h_root(-1, -1, e).ok_or_else(|| bounds::BoundsError::NoRoot(format!("complex at eta = {e}")))
        })?),
        Curve::H1MinusMinus => {
            curve_table(&BoundCurve::sample("R_mm", &parse_grid(&a.grid)?, |e| majorant_h1(e).map(|m| m.smallest))?)
        }
        Curve::Lp => {
            let lp = lp_bounds(a.kappa_stab, a.b)?;
            let mut t = Table::new(&["name", "value"]);
            t.push(vec!["r0".into(), num(lp.r0)]);
            t.push(vec!["w_star".into(), num(lp.w_star)]);
            t
        }
        Curve::Threshold => {
            let th = threshold_solve()?;
            let mut t = Table::new(&["name", "value"]);
            t.push(vec!["eta_star".into(), num(th.eta_star)]);
            t.push(vec!["epsilon_t_star".into(), num(th.epsilon_t_star)]);
            t
        }
    };
    emit(a.out.as_deref(), &render(&t, a.format, json!({})), "bounds", argv)?;
    Ok(())
}

fn run_polys(a: &PolyArgs, argv: &[String]) -> Result<(), CliError> {
    if a.k < 2 {
        return Err(CliError::Usage("--K must be at least 2".into()));
    }
    let mut t = Table::new(&["k", "n", "value"]);
    for k in 2..=a.k {
        let f = poly_family(k)?;
        let list: Vec<(usize, Rat)> = match a.family {
            Family::P => f.p.iter().cloned().enumerate().collect(),
            Family::Q => f.q.iter().cloned().enumerate().collect(),
            Family::T => f.t.iter().cloned().enumerate().collect(),
            Family::R => f.r.iter().cloned().enumerate().collect(),
            Family::L => f.l.iter().cloned().enumerate().collect(),
            Family::ClaimT => {
                let (t1, rest) = f.claim_t();
                std::iter::once((1, t1)).chain(rest.into_iter().enumerate().map(|(i, v)| (i + 2, v))).collect()
            }
            Family::H => (0..=f.n_int as i64).map(|n| (n as usize, bounds::h_const(k as i64, n))).collect(),
        };
        for (n, v) in list {
            t.push(vec![k.to_string(), n.to_string(), rat_string(&v)]);
        }
    }
    emit(a.out.as_deref(), &render(&t, a.format, json!({})), "polys", argv)?;
    Ok(())
}

fn read_seq(path: &std::path::Path) -> Result<Vec<(usize, Rat)>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("index")) {
            continue;
        }
        let (idx, val) = line
            .split_once(',')
            .ok_or_else(|| CliError::Usage(format!("line {}: expected index,value", i + 1)))?;
        let idx: usize = idx.trim().parse().map_err(|_| CliError::Usage(format!("line {}: bad index", i + 1)))?;
        let val = parse_rat(val.trim()).map_err(|e| CliError::Usage(format!("line {}: {e}", i + 1)))?;
        out.push((idx, val));
    }
    Ok(out)
}

fn run_invert(a: &InvertArgs, argv: &[String]) -> Result<(), CliError> {
    let rows = read_seq(&a.input)?;
    if rows.iter().enumerate().any(|(i, (idx, _))| *idx != i + 1) {
        return Err(CliError::Usage("input indices must run 1, 2, 3, ...".into()));
    }
    let seq = CoeffSeq::base1(rows.into_iter().map(|(_, v)| v).collect());
    let out = match a.from {
        Source::Beta => b_from_beta(&seq, a.k)?,
        Source::B => beta_from_b(&seq, a.k)?,
    };
    let mut t = Table::new(&["index", "value"]);
    for k in out.indices() {
        t.push(vec![k.to_string(), rat_string(out.at(k))]);
    }
    emit(a.out.as_deref(), &render(&t, a.format, json!({})), "invert", argv)?;
    Ok(())
}

fn run_models(a: &ModelArgs, argv: &[String]) -> Result<(), CliError> {
    let eps = rat_to_f64(&parse_eps(&a.epsilon)?);
    let t = match a.model {
        Model::HardSphere => {
            let mut t = Table::new(&["rho", "pressure"]);
            for r in parse_grid(&a.grid)? {
                t.push(vec![num(r), num(models::hard_sphere_pressure(r))]);
            }
            t
        }
        Model::HardSphereCoeffs => {
            let mut t = Table::new(&["n", "n_b_n"]);
            for n in 1..=a.k {
                t.push(vec![n.to_string(), rat_string(&hard_sphere_mayer_coeff(n))]);
            }
            t
        }
        Model::Ford => {
            let mut t = Table::new(&["rho", "pressure", "free_energy", "branch"]);
            for r in parse_grid(&a.grid)? {
                let p = ford_model(r)?;
                t.push(vec![num(r), num(p.p), num(p.f), p.branch.label().into()]);
            }
            t
        }
        Model::Limits => {
            let mut t = Table::new(&["rho", "t0", "eps0", "tinf"]);
            for r in parse_grid(&a.grid)? {
                let l = limit_pressures(a.t, eps, r)?;
                t.push(vec![num(r), num(l.t0), num(l.eps0), num(l.tinf)]);
            }
            t
        }
        Model::Majorant => {
            let mut t = Table::new(&["z", "q"]);
            for z in parse_grid(&a.grid)? {
                t.push(vec![num(z), num(mayer_majorant_q(a.t, z, eps)?)]);
            }
            t
        }
    };
    emit(a.out.as_deref(), &render(&t, a.format, json!({})), "models", argv)?;
    Ok(())
}

fn run_selftest() -> Result<bool, CliError> {
    let outcomes = acceptance::run_all();
    for o in &outcomes {
        println!("{o}");
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    println!("{passed} of {} criteria pass", outcomes.len());
    Ok(passed == outcomes.len())
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("VIRIAL_LAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Usage(format!("VIRIAL_LAB_THREADS = '{v}' is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Engine(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli, argv: &[String]) -> Result<bool, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Coeffs(a) => run_coeffs(a, false, argv)?,
        Command::Mayer(a) => run_coeffs(a, true, argv)?,
        Command::Bounds(a) => run_bounds(a, argv)?,
        Command::Polys(a) => run_polys(a, argv)?,
        Command::Invert(a) => run_invert(a, argv)?,
        Command::Models(a) => run_models(a, argv)?,
        Command::Figures(a) => figures::write_all(&a.out, argv)?,
        Command::Selftest => return run_selftest(),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(&cli, &argv[1..]) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use virial_core::ring::f64_to_rat;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:3:0.01").unwrap().len(), 301);
        assert_eq!(*parse_grid("0:3:0.01").unwrap().last().unwrap(), 3.0);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn example_configs_parse() {
        let c = Cli::try_parse_from(["virial-lab", "coeffs", "--K", "12", "--eta", "0.5", "--mode", "exact"]).unwrap();
        match c.command {
            Command::Coeffs(a) => {
                assert_eq!(a.k, Some(12));
                assert_eq!(parse_rat(a.eta.as_deref().unwrap()).unwrap(), f64_to_rat(0.5).unwrap());
                assert_eq!(a.mode, Mode::Exact);
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["virial-lab", "bounds", "--curve", "kappa", "--grid", "0:1:0.001"]).is_ok());
        assert!(Cli::try_parse_from(["virial-lab", "invert", "--from", "beta", "--input", "f.csv", "--K", "10"]).is_ok());
        assert!(Cli::try_parse_from(["virial-lab", "nonsense"]).is_err());
    }
}
