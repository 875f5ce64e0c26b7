//! Coefficient trajectories.
//!
//! Virial side: `γ̇_k = −εk(k+1)γ_k − k(k+1)h_k`, `γ_1 = −λ`.
//! Mayer side: `q̇_k = −εk(k+1)q_k − (k+1)/2 (q∗q)_{k−1}`, `q_0 = 1`.
//! Both are solved by variation of constants, exactly in the η ring and numerically
//! by composite Gauss–Legendre quadrature of the same integral.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ring::{int, rat, rat_to_f64, EtaExpr, Rat, RingError};
use crate::series::{h_k_eval_eps, CoeffSeq, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("QuadratureFailure: {0}")]
    QuadratureFailure(String),
    #[error("DomainError: {0}")]
    DomainError(String),
    #[error("DegenerateParams: {0}")]
    DegenerateParams(String),
    #[error("InvalidParams: {0}")]
    InvalidParams(String),
    #[error("UnboundedAtOrigin: coefficient {0} kept a negative power or log term")]
    UnboundedAtOrigin(usize),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimeSpec {
    Eta(Rat),
    T(f64),
    Unspecified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub epsilon: Rat,
    pub k_max: usize,
    pub time: TimeSpec,
}

impl ModelParams {
    pub fn new(k_max: usize) -> Self {
        Self { epsilon: rat(1, 2), k_max, time: TimeSpec::Unspecified }
    }

    pub fn with_epsilon(mut self, epsilon: Rat) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_time(mut self, time: TimeSpec) -> Self {
        self.time = time;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !self.epsilon.is_positive() {
            return Err(EngineError::InvalidParams("epsilon must be positive".into()));
        }
        match &self.time {
            TimeSpec::Eta(e) if !e.is_positive() || e > &Rat::one() => {
                Err(EngineError::InvalidParams("eta must lie in (0, 1]".into()))
            }
            TimeSpec::T(t) if !(*t >= 0.0 && t.is_finite()) => {
                Err(EngineError::InvalidParams("t must be finite and nonnegative".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn epsilon_f64(&self) -> f64 {
        rat_to_f64(&self.epsilon)
    }

    /// `η` as binary64 for the configured time, if any.
    pub fn eta_f64(&self) -> Option<f64> {
        match &self.time {
            TimeSpec::Eta(e) => Some(rat_to_f64(e)),
            TimeSpec::T(t) => Some((-2.0 * self.epsilon_f64() * t).exp()),
            TimeSpec::Unspecified => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrajectoryKind {
    Gamma,
    Delta,
    Beta,
    Q,
    C,
    B,
}

impl TrajectoryKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gamma => "gamma",
            Self::Delta => "delta",
            Self::Beta => "beta",
            Self::Q => "q",
            Self::C => "c",
            Self::B => "b",
        }
    }

    pub fn base(self) -> usize {
        match self {
            Self::Q | Self::C => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Virial,
    Mayer,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Entries {
    Exact(CoeffSeq<EtaExpr>),
    /// `values[i][j]`: index `base + i` at `t_grid[j]`.
    Numeric { t_grid: Vec<f64>, values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTrajectory {
    pub kind: TrajectoryKind,
    pub epsilon: Rat,
    pub entries: Entries,
}

impl CoeffTrajectory {
    pub fn base(&self) -> usize {
        self.kind.base()
    }

    pub fn exact(&self) -> Option<&CoeffSeq<EtaExpr>> {
        match &self.entries {
            Entries::Exact(s) => Some(s),
            Entries::Numeric { .. } => None,
        }
    }

    pub fn numeric_row(&self, k: usize) -> Option<&[f64]> {
        match &self.entries {
            Entries::Numeric { values, .. } if k >= self.base() => values.get(k - self.base()).map(|v| v.as_slice()),
            _ => None,
        }
    }

    /// Binary64 value of index `k` at time `t` (exact entries are evaluated exactly at the rounded η).
    pub fn value_at(&self, k: usize, t: f64) -> Option<f64> {
        match &self.entries {
            Entries::Exact(s) => {
                let eta = (-2.0 * rat_to_f64(&self.epsilon) * t).exp();
                s.get(k).and_then(|e| e.eval_exact_f64(eta).ok())
            }
            Entries::Numeric { t_grid, values } => {
                let j = t_grid.iter().position(|x| *x == t)?;
                values.get(k.checked_sub(self.base())?).map(|v| v[j])
            }
        }
    }
}

fn two_eps_pow_inv(eps: &Rat, k: usize) -> Rat {
    Rat::one() / num_traits::pow(eps * int(2), k)
}

/// Exact virial-side trajectories as expressions in η.
#[derive(Debug, Clone, PartialEq)]
pub struct VirialExact {
    pub epsilon: Rat,
    pub gamma: CoeffSeq<EtaExpr>,
    pub delta: CoeffSeq<EtaExpr>,
    pub beta: CoeffSeq<EtaExpr>,
}

impl VirialExact {
    pub fn trajectory(&self, kind: TrajectoryKind) -> Option<CoeffTrajectory> {
        let s = match kind {
            TrajectoryKind::Gamma => &self.gamma,
            TrajectoryKind::Delta => &self.delta,
            TrajectoryKind::Beta => &self.beta,
            _ => return None,
        };
        Some(CoeffTrajectory { kind, epsilon: self.epsilon.clone(), entries: Entries::Exact(s.clone()) })
    }

    /// `λ^k` with `λ = (1 − η)/(2ε)`.
    pub fn lambda_pow(&self, k: usize) -> EtaExpr {
        EtaExpr::one_minus_eta_pow(k as u32).scale(&two_eps_pow_inv(&self.epsilon, k))
    }
}

/// `γ_k = ∫_0^t e^{−εk(k+1)(t−s)} (−k(k+1)h_k) ds`, `δ_k = γ_k/λ^k`, `β_k = γ_k/k`.
pub fn virial_exact(params: &ModelParams) -> Result<VirialExact, EngineError> {
    params.validate()?;
    let kk = params.k_max;
    if kk < 1 {
        return Err(EngineError::InvalidParams("K must be at least 1".into()));
    }
    let mut gamma: Vec<EtaExpr> = vec![EtaExpr::zero(), -EtaExpr::lambda()];
    // f[j] = Σ_{n≥1} (γ^{∗n})_j
    let mut f: Vec<EtaExpr> = vec![EtaExpr::zero(), gamma[1].clone()];
    for k in 2..=kk {
        let mut s = EtaExpr::zero();
        for i in 1..k {
            s = &s + &(&gamma[i] * &f[k - i]);
        }
        let g = s.scale(&rat(-((k * (k + 1)) as i64), 2));
        let gk = g.kernel_integrate(k as u64);
        f.push(&gk + &s);
        gamma.push(gk);
    }
    let mut delta = Vec::with_capacity(kk);
    for (k, g) in gamma.iter().enumerate().skip(1) {
        let d = g.div_one_minus_eta_pow(k as u32)?;
        if !d.is_bounded_at_origin() {
            return Err(EngineError::UnboundedAtOrigin(k));
        }
        delta.push(d);
    }
    let eps = &params.epsilon;
    let gamma: Vec<EtaExpr> =
        gamma.into_iter().enumerate().skip(1).map(|(k, g)| g.scale(&two_eps_pow_inv(eps, k))).collect();
    let beta = gamma.iter().enumerate().map(|(i, g)| g.scale(&rat(1, i as i64 + 1))).collect();
    Ok(VirialExact {
        epsilon: eps.clone(),
        gamma: CoeffSeq::base1(gamma),
        delta: CoeffSeq::base1(delta),
        beta: CoeffSeq::base1(beta),
    })
}

/// Exact Mayer-side trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct MayerExact {
    pub epsilon: Rat,
    /// `q_0..q_K`.
    pub q: CoeffSeq<EtaExpr>,
    /// `c_k = (−1)^k q_k/λ^k`, `k = 0..K`.
    pub c: CoeffSeq<EtaExpr>,
    /// `b_k = q_{k−1}/k`, `k = 1..K+1`.
    pub b: CoeffSeq<EtaExpr>,
}

impl MayerExact {
    pub fn trajectory(&self, kind: TrajectoryKind) -> Option<CoeffTrajectory> {
        let s = match kind {
            TrajectoryKind::Q => &self.q,
            TrajectoryKind::C => &self.c,
            TrajectoryKind::B => &self.b,
            _ => return None,
        };
        Some(CoeffTrajectory { kind, epsilon: self.epsilon.clone(), entries: Entries::Exact(s.clone()) })
    }
}

/// `q_k = ∫_0^t e^{−εk(k+1)(t−s)} (−(k+1)/2)(q∗q)_{k−1} ds` with `q_0 = 1`.
pub fn mayer_exact(params: &ModelParams) -> Result<MayerExact, EngineError> {
    params.validate()?;
    let kk = params.k_max;
    let mut q: Vec<EtaExpr> = vec![EtaExpr::constant(Rat::one())];
    for k in 1..=kk {
        let m = k - 1;
        let mut s = EtaExpr::zero();
        for j in 0..=m / 2 {
            let p = &q[j] * &q[m - j];
            s = if 2 * j == m { &s + &p } else { &s + &p.scale(&int(2)) };
        }
        q.push(s.scale(&rat(-(k as i64 + 1), 2)).kernel_integrate(k as u64));
    }
    let mut c = Vec::with_capacity(kk + 1);
    for (k, qk) in q.iter().enumerate() {
        let mut d = qk.div_one_minus_eta_pow(k as u32)?;
        if k % 2 == 1 {
            d = -d;
        }
        if !d.is_bounded_at_origin() {
            return Err(EngineError::UnboundedAtOrigin(k));
        }
        c.push(d);
    }
    let eps = &params.epsilon;
    let q: Vec<EtaExpr> = q.into_iter().enumerate().map(|(k, e)| e.scale(&two_eps_pow_inv(eps, k))).collect();
    let b = q.iter().enumerate().map(|(j, e)| e.scale(&rat(1, j as i64 + 1))).collect();
    Ok(MayerExact { epsilon: eps.clone(), q: CoeffSeq::base0(q), c: CoeffSeq::base0(c), b: CoeffSeq::base1(b) })
}

/// `c_k(0)` from `c_0 = 1`, `c_k = (k+1)/(2k) (c∗c)_{k−1}`.
pub fn c_at_origin(k_max: usize) -> Vec<Rat> {
    let mut c = vec![Rat::one()];
    for k in 1..=k_max {
        let mut s = Rat::zero();
        for j in 0..k {
            s += &c[j] * &c[k - 1 - j];
        }
        c.push(s * rat(k as i64 + 1, 2 * k as i64));
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Agreement required between successive panel doublings, relative to `max(1, |value|)`
    /// of the normalized coefficients δ_k or c_k.
    pub rel_tol: f64,
    /// Upper bound on the total number of quadrature nodes.
    pub max_nodes: usize,
    /// Initial `εk(k+1)·Δ` for the largest k.
    pub stiffness_step: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self { nodes: 16, rel_tol: 1e-12, max_nodes: 1 << 23, stiffness_step: 0.5 }
    }
}

/// Numeric trajectories on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSet {
    pub side: Side,
    pub epsilon: f64,
    pub k_max: usize,
    pub t_grid: Vec<f64>,
    /// `raw[k][j]`: γ_k (virial, `raw[0]` unused) or q_k (Mayer) at `t_grid[j]`.
    pub raw: Vec<Vec<f64>>,
    pub panels: usize,
}

impl NumericSet {
    pub fn lambda(&self, t: f64) -> f64 {
        -(-2.0 * self.epsilon * t).exp_m1() / (2.0 * self.epsilon)
    }

    fn normalized(&self, k: usize, j: usize) -> f64 {
        let t = self.t_grid[j];
        match self.side {
            Side::Virial => {
                if t == 0.0 {
                    return if k == 1 { -1.0 } else { 0.0 };
                }
                self.raw[k][j] / self.lambda(t).powi(k as i32)
            }
            Side::Mayer => {
                if t == 0.0 {
                    return rat_to_f64(&c_at_origin(k)[k]);
                }
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                s * self.raw[k][j] / self.lambda(t).powi(k as i32)
            }
        }
    }

    pub fn value(&self, kind: TrajectoryKind, k: usize, j: usize) -> Option<f64> {
        let ok = match self.side {
            Side::Virial => matches!(kind, TrajectoryKind::Gamma | TrajectoryKind::Delta | TrajectoryKind::Beta),
            Side::Mayer => matches!(kind, TrajectoryKind::Q | TrajectoryKind::C | TrajectoryKind::B),
        };
        let top = if kind == TrajectoryKind::B { self.k_max + 1 } else { self.k_max };
        if !ok || k < kind.base() || k > top || j >= self.t_grid.len() {
            return None;
        }
        Some(match kind {
            TrajectoryKind::Gamma | TrajectoryKind::Q => self.raw[k][j],
            TrajectoryKind::Delta | TrajectoryKind::C => self.normalized(k, j),
            TrajectoryKind::Beta => self.raw[k][j] / k as f64,
            TrajectoryKind::B => self.raw[k - 1][j] / k as f64,
        })
    }

    pub fn trajectory(&self, kind: TrajectoryKind) -> Option<CoeffTrajectory> {
        let top = if kind == TrajectoryKind::B { self.k_max + 1 } else { self.k_max };
        let mut values = Vec::new();
        for k in kind.base()..=top {
            let row: Option<Vec<f64>> = (0..self.t_grid.len()).map(|j| self.value(kind, k, j)).collect();
            values.push(row?);
        }
        let epsilon = Rat::from_float(self.epsilon).unwrap_or_else(|| rat(1, 2));
        Some(CoeffTrajectory { kind, epsilon, entries: Entries::Numeric { t_grid: self.t_grid.clone(), values } })
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for n in 2..=m {
                let p2 = ((2 * n - 1) as f64 * z * p1 - (n - 1) as f64 * p0) / n as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (z * pm - pm1) / (z * z - 1.0);
            let dz = pm / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[m - 1 - i] = 0.5 * (1.0 - z);
        w[m - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

struct Panelling {
    xi: Vec<f64>,
    wt: Vec<f64>,
    bary: Vec<f64>,
}

impl Panelling {
    fn new(m: usize) -> Self {
        let (xi, wt) = gauss_legendre(m);
        let bary = (0..m)
            .map(|j| 1.0 / (0..m).filter(|&i| i != j).map(|i| xi[j] - xi[i]).product::<f64>())
            .collect();
        Self { xi, wt, bary }
    }

    fn lagrange(&self, x: f64) -> Vec<f64> {
        let m = self.xi.len();
        if let Some(j) = self.xi.iter().position(|&p| p == x) {
            let mut v = vec![0.0; m];
            v[j] = 1.0;
            return v;
        }
        let terms: Vec<f64> = (0..m).map(|j| self.bary[j] / (x - self.xi[j])).collect();
        let s: f64 = terms.iter().sum();
        terms.into_iter().map(|t| t / s).collect()
    }

    /// Weights `r_j` with `∫_0^x e^{−a(x−s)} g(s) ds ≈ Σ_j r_j g(Δ ξ_j)` for the panel interpolant.
    fn row(&self, x: f64, delta: f64, a: f64) -> Vec<f64> {
        let m = self.xi.len();
        let mut r = vec![0.0; m];
        if x <= 0.0 {
            return r;
        }
        for l in 0..m {
            let y = x * self.xi[l];
            let f = x * self.wt[l] * (-a * (x - y)).exp();
            for (rj, lj) in r.iter_mut().zip(self.lagrange(y / delta)) {
                *rj += f * lj;
            }
        }
        r
    }
}

fn solve_fixed(
    side: Side,
    eps: f64,
    k_max: usize,
    t_grid: &[f64],
    t_end: f64,
    panels: usize,
    pan: &Panelling,
) -> Vec<Vec<f64>> {
    let m = pan.xi.len();
    let delta = t_end / panels as f64;
    let n_nodes = panels * m;
    let mut node_vals: Vec<Vec<f64>> = Vec::with_capacity(k_max + 1);
    let mut f_vals: Vec<Vec<f64>> = Vec::new();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(k_max + 1);
    match side {
        Side::Virial => {
            node_vals.push(vec![0.0; n_nodes]);
            f_vals.push(vec![0.0; n_nodes]);
            out.push(vec![0.0; t_grid.len()]);
        }
        Side::Mayer => {
            node_vals.push(vec![1.0; n_nodes]);
            out.push(vec![1.0; t_grid.len()]);
        }
    }
    let locate = |t: f64| -> (usize, f64) {
        let p = ((t / delta).floor() as usize).min(panels - 1);
        (p, t - p as f64 * delta)
    };
    for k in 1..=k_max {
        let a = eps * (k * (k + 1)) as f64;
        let mut g = vec![0.0; n_nodes];
        let mut s_store = vec![0.0; n_nodes];
        match side {
            Side::Virial => {
                if k == 1 {
                    g.iter_mut().for_each(|x| *x = -1.0);
                } else {
                    for n in 0..n_nodes {
                        let mut s = 0.0;
                        for i in 1..k {
                            s += node_vals[i][n] * f_vals[k - i][n];
                        }
                        s_store[n] = s;
                        g[n] = -((k * (k + 1)) as f64) * eps * s;
                    }
                }
            }
            Side::Mayer => {
                let mm = k - 1;
                for n in 0..n_nodes {
                    let mut s = 0.0;
                    for j in 0..=mm {
                        s += node_vals[j][n] * node_vals[mm - j][n];
                    }
                    g[n] = -((k + 1) as f64) / 2.0 * s;
                }
            }
        }
        let rows: Vec<Vec<f64>> = pan.xi.iter().map(|&x| pan.row(x * delta, delta, a)).collect();
        let end_row = pan.row(delta, delta, a);
        let decay_nodes: Vec<f64> = pan.xi.iter().map(|&x| (-a * x * delta).exp()).collect();
        let decay_end = (-a * delta).exp();
        let mut vals = vec![0.0; n_nodes];
        let mut starts = vec![0.0; panels];
        let mut cur = 0.0;
        for p in 0..panels {
            starts[p] = cur;
            let gp = &g[p * m..(p + 1) * m];
            for i in 0..m {
                let j: f64 = rows[i].iter().zip(gp).map(|(r, x)| r * x).sum();
                vals[p * m + i] = decay_nodes[i] * cur + j;
            }
            let j: f64 = end_row.iter().zip(gp).map(|(r, x)| r * x).sum();
            cur = decay_end * cur + j;
        }
        let targets: Vec<f64> = t_grid
            .iter()
            .map(|&t| {
                if t <= 0.0 {
                    return 0.0;
                }
                let (p, x) = locate(t);
                let r = pan.row(x, delta, a);
                let gp = &g[p * m..(p + 1) * m];
                (-a * x).exp() * starts[p] + r.iter().zip(gp).map(|(r, x)| r * x).sum::<f64>()
            })
            .collect();
        if side == Side::Virial {
            let fk: Vec<f64> = vals.iter().zip(&s_store).map(|(v, s)| v + s).collect();
            f_vals.push(fk);
        }
        node_vals.push(vals);
        out.push(targets);
    }
    out
}

/// Binary64 trajectories by composite Gauss–Legendre quadrature of the variation-of-constants
/// integrals, doubling the panel count until successive results agree.
pub fn numeric_trajectories(params: &ModelParams, t_grid: &[f64], side: Side) -> Result<NumericSet, EngineError> {
    numeric_trajectories_with(params, t_grid, side, &NumericOptions::default())
}

pub fn numeric_trajectories_with(
    params: &ModelParams,
    t_grid: &[f64],
    side: Side,
    opts: &NumericOptions,
) -> Result<NumericSet, EngineError> {
    params.validate()?;
    if params.k_max < 1 {
        return Err(EngineError::InvalidParams("K must be at least 1".into()));
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EngineError::InvalidParams("time grid must be increasing and nonnegative".into()));
    }
    let eps = params.epsilon_f64();
    let k_max = params.k_max;
    let t_end = t_grid.last().copied().unwrap_or(0.0);
    let pan = Panelling::new(opts.nodes);
    let mk = |raw: Vec<Vec<f64>>, panels| NumericSet {
        side,
        epsilon: eps,
        k_max,
        t_grid: t_grid.to_vec(),
        raw,
        panels,
    };
    if t_end == 0.0 {
        let raw = solve_fixed(side, eps, k_max, t_grid, 1.0, 1, &pan);
        return Ok(mk(raw, 1));
    }
    let a_max = eps * (k_max * (k_max + 1)) as f64;
    let mut panels = ((t_end * a_max / opts.stiffness_step).ceil() as usize).max(8);
    let mut prev = mk(solve_fixed(side, eps, k_max, t_grid, t_end, panels, &pan), panels);
    loop {
        panels *= 2;
        if panels * opts.nodes > opts.max_nodes {
            return Err(EngineError::QuadratureFailure(format!(
                "no agreement to {} within {} nodes",
                opts.rel_tol, opts.max_nodes
            )));
        }
        let next = mk(solve_fixed(side, eps, k_max, t_grid, t_end, panels, &pan), panels);
        let kind = if side == Side::Virial { TrajectoryKind::Delta } else { TrajectoryKind::C };
        let mut worst = 0.0f64;
        for k in 1..=k_max {
            for j in 0..t_grid.len() {
                let (u, v) = (prev.value(kind, k, j).unwrap(), next.value(kind, k, j).unwrap());
                let d = (u - v).abs() / v.abs().max(1.0);
                worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
            }
        }
        if worst <= opts.rel_tol {
            return Ok(next);
        }
        prev = next;
    }
}

/// Maximizer of `δ_k(t)` on `[t_lo, t_hi]`: grid scan then golden-section refinement.
pub fn peak_time(k: usize, epsilon: &Rat, t_lo: f64, t_hi: f64) -> Result<(f64, f64), EngineError> {
    let params = ModelParams::new(k).with_epsilon(epsilon.clone());
    let eval = |t: f64| -> Result<f64, EngineError> {
        let s = numeric_trajectories(&params, &[t], Side::Virial)?;
        Ok(s.value(TrajectoryKind::Delta, k, 0).unwrap_or(f64::NAN))
    };
    let n = 64;
    let grid: Vec<f64> = (0..=n).map(|i| t_lo + (t_hi - t_lo) * i as f64 / n as f64).collect();
    let s = numeric_trajectories(&params, &grid, Side::Virial)?;
    let vals: Vec<f64> = (0..grid.len()).map(|j| s.value(TrajectoryKind::Delta, k, j).unwrap()).collect();
    let best = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(n)]);
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - gr * (b - a), a + gr * (b - a));
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    for _ in 0..40 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = eval(d)?;
        }
    }
    let t = 0.5 * (a + b);
    Ok((t, eval(t)?))
}

/// Small-time data: `δ̇_k(0)` from the exact expressions and the resummed approximant.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallTime {
    pub epsilon: Rat,
    /// `δ̇_k(0)` for `k = 1..K`.
    pub slopes: CoeffSeq<Rat>,
}

impl SmallTime {
    /// `φ ≈ −tρ − εt·t²ρ²/(1 + tρ)`, analytic for `t|ρ| < 1`.
    pub fn phi_approx(&self, rho: f64, t: f64) -> f64 {
        let e = rat_to_f64(&self.epsilon);
        -t * rho - (t * t * rho * rho / (1.0 + t * rho)) * e * t
    }
}

/// `(−1)^{k+1} k ε`.
pub fn slope_formula(k: usize, epsilon: &Rat) -> Rat {
    let v = int(k as i64) * epsilon;
    if k % 2 == 1 {
        v
    } else {
        -v
    }
}

pub fn asymptotic_smallt(k_max: usize, epsilon: &Rat) -> Result<SmallTime, EngineError> {
    if k_max < 2 {
        return Err(EngineError::InvalidParams("K must be at least 2".into()));
    }
    let v = virial_exact(&ModelParams::new(k_max).with_epsilon(epsilon.clone()))?;
    let two_eps = epsilon * int(2);
    let slopes = v
        .delta
        .values()
        .iter()
        .map(|d| Ok(d.d_dt().eval_exact(&Rat::one())? * &two_eps))
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok(SmallTime { epsilon: epsilon.clone(), slopes: CoeffSeq::base1(slopes) })
}

/// The `t → ∞` fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct Stationary {
    pub epsilon: Rat,
    /// `γ̃_k = −(2ε)^{−k}`.
    pub gamma_inf: CoeffSeq<Rat>,
    /// `γ̃_k + h_k(γ̃)/ε`, zero for an exact fixed point.
    pub residuals: CoeffSeq<Rat>,
}

impl Stationary {
    fn check(&self, rho: f64) -> Result<f64, EngineError> {
        let two_eps = 2.0 * rat_to_f64(&self.epsilon);
        if rho.abs() >= two_eps {
            return Err(EngineError::DomainError(format!("|rho| = {} not below 2 epsilon = {two_eps}", rho.abs())));
        }
        Ok(rho / two_eps)
    }

    /// `ψ_0 = −(ρ/2ε)/(1 − ρ/2ε)`.
    pub fn psi0(&self, rho: f64) -> Result<f64, EngineError> {
        let x = self.check(rho)?;
        Ok(-x / (1.0 - x))
    }

    /// `φ_0 = log(1 − ρ/2ε)`.
    pub fn phi0(&self, rho: f64) -> Result<f64, EngineError> {
        let x = self.check(rho)?;
        Ok((-x).ln_1p())
    }

    /// `P_0 = −2ε log(1 − ρ/2ε)`.
    pub fn p0(&self, rho: f64) -> Result<f64, EngineError> {
        let x = self.check(rho)?;
        Ok(-2.0 * rat_to_f64(&self.epsilon) * (-x).ln_1p())
    }

    /// `ρ/2 + ε ψ_0/(1 − ψ_0)`.
    pub fn stationary_residual(&self, rho: f64) -> Result<f64, EngineError> {
        let p = self.psi0(rho)?;
        Ok(rho / 2.0 + rat_to_f64(&self.epsilon) * p / (1.0 - p))
    }
}

pub fn stationary_limit(k_max: usize, epsilon: &Rat) -> Result<Stationary, EngineError> {
    if k_max < 1 || !epsilon.is_positive() {
        return Err(EngineError::InvalidParams("need K >= 1 and epsilon > 0".into()));
    }
    let g: Vec<Rat> = (1..=k_max).map(|k| -two_eps_pow_inv(epsilon, k)).collect();
    let gamma = CoeffSeq::base1(g);
    let inv_eps = Rat::one() / epsilon;
    let residuals = (1..=k_max)
        .map(|k| Ok(gamma.at(k) + h_k_eval_eps(&gamma, k, epsilon)? * &inv_eps))
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok(Stationary { epsilon: epsilon.clone(), gamma_inf: gamma, residuals: CoeffSeq::base1(residuals) })
}

/// Constants of the general majorant for `u_t + ε(1+a)…` type equations.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantConstants {
    pub delta: f64,
    pub b: f64,
    pub a_const: f64,
    pub epsilon: f64,
    pub a: f64,
}

impl MajorantConstants {
    /// `B max(1, t) e^{−ε(1+a)t} |z| < 1`.
    pub fn domain_check(&self, t: f64, z: f64) -> bool {
        self.b * t.max(1.0) * (-self.epsilon * (1.0 + self.a) * t).exp() * z.abs() < 1.0
    }
}

/// `δ = 1/η_c + C/ε − √(2/η_c + C²/ε²)`, `B = (δA²)^{−1}`, `A = 3/(2π²)`.
pub fn appendix_d_constants(c: &Rat, epsilon: &Rat, eta_const: &Rat, a: &Rat) -> Result<MajorantConstants, EngineError> {
    if !epsilon.is_positive() || c.is_negative() || !eta_const.is_positive() {
        return Err(EngineError::InvalidParams("need epsilon > 0, C >= 0, eta > 0".into()));
    }
    let (c, e, h) = (rat_to_f64(c), rat_to_f64(epsilon), rat_to_f64(eta_const));
    let delta = 1.0 / h + c / e - (2.0 / h + (c / e) * (c / e)).sqrt();
    if !(delta > 0.0) {
        return Err(EngineError::DegenerateParams(format!("delta = {delta} is not positive")));
    }
    let a_const = 3.0 / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
    Ok(MajorantConstants { delta, b: 1.0 / (delta * a_const * a_const), a_const, epsilon: e, a: rat_to_f64(a) })
}

/// Hamilton–Jacobi instance: `α = −1`, `γ = 1/2`, `C = 0`.
pub fn hamilton_jacobi_constants(epsilon: &Rat, eta_const: &Rat) -> Result<MajorantConstants, EngineError> {
    appendix_d_constants(&Rat::zero(), epsilon, eta_const, &rat(-1, 1))
}

/// Edge-irreducible instance: `C = ε`, `η_c = 1`.
pub fn edge_irreducible_constants(epsilon: &Rat, a: &Rat) -> Result<MajorantConstants, EngineError> {
    appendix_d_constants(epsilon, epsilon, &Rat::one(), a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[Rat]) -> EtaExpr {
        EtaExpr::from_poly(c)
    }

    #[test]
    fn first_virial_coefficients() {
        let v = virial_exact(&ModelParams::new(3)).unwrap();
        assert_eq!(v.gamma.at(1), &-EtaExpr::lambda());
        assert_eq!(v.gamma.at(2), &-EtaExpr::one_minus_eta_pow(3));
        assert_eq!(v.delta.at(2), &-EtaExpr::lambda());
        let d3 = -(EtaExpr::lambda() * poly(&[int(1), int(-2), rat(-1, 2)]));
        assert_eq!(v.delta.at(3), &d3);
    }

    #[test]
    fn first_mayer_coefficients() {
        let m = mayer_exact(&ModelParams::new(2)).unwrap();
        assert_eq!(m.q.at(1), &-EtaExpr::lambda());
        assert_eq!(m.q.at(2), &poly(&[int(1), rat(-3, 2), int(0), rat(1, 2)]));
        assert_eq!(m.c.at(2).eval_exact(&Rat::one()).unwrap(), rat(3, 2));
    }

    #[test]
    fn epsilon_rescaling() {
        let e = rat(3, 1);
        let v = virial_exact(&ModelParams::new(2).with_epsilon(e.clone())).unwrap();
        // γ_2 = −2ελ³ with λ = (1−η)/(2ε)
        let lam3 = EtaExpr::one_minus_eta_pow(3).scale(&rat(1, 216));
        assert_eq!(v.gamma.at(2), &lam3.scale(&int(-6)));
        assert_eq!(v.delta.at(2), &-EtaExpr::lambda());
    }

    #[test]
    fn origin_recursion() {
        let c = c_at_origin(4);
        assert_eq!(c, vec![int(1), int(1), rat(3, 2), rat(8, 3), rat(125, 24)]);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(15)).sum();
        assert!((s - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn numeric_first_coefficients() {
        let p = ModelParams::new(2);
        let grid = [0.0, 0.3, 1.0, 2.5];
        let s = numeric_trajectories(&p, &grid, Side::Virial).unwrap();
        for (j, &t) in grid.iter().enumerate() {
            let lam = 1.0 - (-t).exp();
            assert!((s.value(TrajectoryKind::Gamma, 1, j).unwrap() + lam).abs() < 1e-14);
            assert!((s.value(TrajectoryKind::Gamma, 2, j).unwrap() + lam.powi(3)).abs() < 1e-13);
        }
    }

    #[test]
    fn stationary_fixed_point() {
        let s = stationary_limit(6, &rat(2, 7)).unwrap();
        assert!(s.residuals.values().iter().all(|r| r.is_zero()));
        assert_eq!(s.gamma_inf.at(1), &rat(-7, 4));
        assert!(s.p0(0.6).is_err());
    }

    #[test]
    fn majorant_constants_degenerate() {
        assert!(matches!(
            hamilton_jacobi_constants(&rat(1, 2), &int(1)),
            Err(EngineError::DegenerateParams(_))
        ));
        let d = edge_irreducible_constants(&rat(1, 2), &int(0)).unwrap();
        assert!((d.delta - (2.0 - 3f64.sqrt())).abs() < 1e-15);
    }
}
