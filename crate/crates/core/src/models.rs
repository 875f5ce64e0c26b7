//! Closed-form reference systems: hard spheres in infinite dimension, the Ford model,
//! the three limit pressures and the Mayer-side majorant `Q(t, z)`.

use std::ops::{Add, Div, Mul, Sub};

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::lambert_w;
use crate::ring::{factorial, int, Rat};
use crate::series::{series_invert, FormalSeries, Indeterminate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("DomainError: {0}")]
    DomainError(String),
}

/// Complex pair, only as much as the circle images need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl Cplx {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn exp(self) -> Self {
        Self::polar(self.re.exp(), self.im)
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }
}

impl Add for Cplx {
    type Output = Cplx;
    fn add(self, o: Cplx) -> Cplx {
        Cplx::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Cplx {
    type Output = Cplx;
    fn sub(self, o: Cplx) -> Cplx {
        Cplx::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Cplx {
    type Output = Cplx;
    fn mul(self, o: Cplx) -> Cplx {
        Cplx::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Div for Cplx {
    type Output = Cplx;
    fn div(self, o: Cplx) -> Cplx {
        let d = o.re * o.re + o.im * o.im;
        Cplx::new((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)
    }
}

/// `Z(ρ) = ρe^ρ`.
pub fn z_map(rho: Cplx) -> Cplx {
    rho * rho.exp()
}

/// Principal branch of W on `|z| ≤ 1/e` by Halley iteration.
pub fn lambert_w_complex(z: Cplx) -> Cplx {
    if z.abs() == 0.0 {
        return z;
    }
    // branch-point expansion near −1/e, Taylor otherwise
    let p2 = (z.scale(std::f64::consts::E) + Cplx::new(1.0, 0.0)).scale(2.0);
    let mut w = if p2.abs() < 0.5 {
        let r = p2.abs().sqrt();
        let th = p2.im.atan2(p2.re) / 2.0;
        let p = Cplx::polar(r, th);
        Cplx::new(-1.0, 0.0) + p - (p * p).scale(1.0 / 3.0) + (p * p * p).scale(11.0 / 72.0)
    } else {
        z - z * z + (z * z * z).scale(1.5)
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + Cplx::new(1.0, 0.0);
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + Cplx::new(2.0, 0.0)) * f / wp1.scale(2.0);
        let dw = f / denom;
        w = w - dw;
        if dw.abs() <= 1e-16 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// Sample of a circle `|x| = radius` and its image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePoint {
    pub radius: f64,
    pub theta: f64,
    pub image: Cplx,
}

fn circle_image(radius: f64, n_theta: usize, f: impl Fn(Cplx) -> Cplx + Sync) -> Vec<CirclePoint> {
    (0..=n_theta)
        .into_par_iter()
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            CirclePoint { radius, theta, image: f(Cplx::polar(radius, theta)) }
        })
        .collect()
}

/// Images of `|ρ| = radius` under `Z`.
pub fn circle_image_z(radius: f64, n_theta: usize) -> Result<Vec<CirclePoint>, ModelError> {
    if !(radius > 0.0 && radius <= 1.2) || n_theta == 0 {
        return Err(ModelError::DomainError(format!("radius {radius} outside (0, 1.2]")));
    }
    Ok(circle_image(radius, n_theta, z_map))
}

/// Images of `|z| = radius` under W.
pub fn circle_image_w(radius: f64, n_theta: usize) -> Result<Vec<CirclePoint>, ModelError> {
    if !(radius > 0.0 && radius <= (-1.0f64).exp() + 1e-15) || n_theta == 0 {
        return Err(ModelError::DomainError(format!("radius {radius} outside (0, 1/e]")));
    }
    Ok(circle_image(radius, n_theta, lambert_w_complex))
}

/// `P(ρ) = ρ + ρ²/2`.
pub fn hard_sphere_pressure(rho: f64) -> f64 {
    rho + rho * rho / 2.0
}

/// `n b_n = (−n)^{n−1}/n!`.
pub fn hard_sphere_mayer_coeff(n: u64) -> Rat {
    let mut p = int(1);
    for _ in 1..n {
        p *= int(-(n as i64));
    }
    p / Rat::from_integer(factorial(n))
}

pub enum HardSphereQuery {
    Zmap(Cplx),
    Pressure(f64),
    MayerCoeff(u64),
    CircleImage { radius: f64, n_theta: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum HardSphereValue {
    Point(Cplx),
    Scalar(f64),
    Exact(Rat),
    Points(Vec<CirclePoint>),
}

pub fn hard_sphere_dinf(q: HardSphereQuery) -> Result<HardSphereValue, ModelError> {
    Ok(match q {
        HardSphereQuery::Zmap(r) => HardSphereValue::Point(z_map(r)),
        HardSphereQuery::Pressure(r) => HardSphereValue::Scalar(hard_sphere_pressure(r)),
        HardSphereQuery::MayerCoeff(n) => HardSphereValue::Exact(hard_sphere_mayer_coeff(n)),
        HardSphereQuery::CircleImage { radius, n_theta } => HardSphereValue::Points(circle_image_z(radius, n_theta)?),
    })
}

/// Coefficients of the inverse of `ρe^ρ`, index n gives `[z^n] ρ(z)`.
pub fn inverse_z_coeffs(k: usize) -> Result<Vec<Rat>, ModelError> {
    let f: Vec<Rat> = (0..=k)
        .map(|n| if n == 0 { Rat::zero() } else { Rat::from_integer(1.into()) / Rat::from_integer(factorial(n as u64 - 1)) })
        .collect();
    series_invert(&FormalSeries::new(f, Indeterminate::Z), k)
        .map(|s| s.coeffs().to_vec())
        .map_err(|e| ModelError::DomainError(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FordBranch {
    Fluid,
    Plateau,
    Dense,
}

impl FordBranch {
    pub fn label(self) -> &'static str {
        match self {
            FordBranch::Fluid => "fluid",
            FordBranch::Plateau => "plateau",
            FordBranch::Dense => "dense",
        }
    }
}

/// Piecewise function with half-open branches `[b_i, b_{i+1})`.
pub struct PiecewisePressure {
    pub breakpoints: Vec<f64>,
    pub branches: Vec<(FordBranch, fn(f64) -> f64)>,
}

impl PiecewisePressure {
    pub fn locate(&self, rho: f64) -> Option<usize> {
        (0..self.branches.len()).find(|&i| rho >= self.breakpoints[i] && rho < self.breakpoints[i + 1])
    }

    pub fn eval(&self, rho: f64) -> Option<(FordBranch, f64)> {
        self.locate(rho).map(|i| (self.branches[i].0, (self.branches[i].1)(rho)))
    }
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

pub fn ford_pressure() -> PiecewisePressure {
    PiecewisePressure {
        breakpoints: vec![0.0, 0.5, 1.5, 2.0],
        branches: vec![
            (FordBranch::Fluid, |r| -(-r).ln_1p()),
            (FordBranch::Plateau, |_| std::f64::consts::LN_2),
            (FordBranch::Dense, |r| ((r - 1.0) / ((2.0 - r) * (2.0 - r))).ln()),
        ],
    }
}

pub fn ford_free_energy() -> PiecewisePressure {
    PiecewisePressure {
        breakpoints: vec![0.0, 0.5, 1.5, 2.0],
        branches: vec![
            (FordBranch::Fluid, |r| xlogx(r) + xlogx(1.0 - r)),
            (FordBranch::Plateau, |_| -std::f64::consts::LN_2),
            (FordBranch::Dense, |r| xlogx(r - 1.0) + xlogx(2.0 - r)),
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FordPoint {
    pub p: f64,
    pub f: f64,
    pub branch: FordBranch,
}

pub fn ford_model(rho: f64) -> Result<FordPoint, ModelError> {
    let (branch, p) = ford_pressure()
        .eval(rho)
        .ok_or_else(|| ModelError::DomainError(format!("rho = {rho} outside [0, 2)")))?;
    let (_, f) = ford_free_energy().eval(rho).expect("same breakpoints");
    Ok(FordPoint { p, f, branch })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitPressures {
    pub t0: f64,
    pub eps0: f64,
    pub tinf: f64,
}

/// `ρ`, `ρ + tρ²/2` and `−2ε log(1 − ρ/2ε)`.
pub fn limit_pressures(t: f64, epsilon: f64, rho: f64) -> Result<LimitPressures, ModelError> {
    if !(epsilon > 0.0) || rho.abs() >= 2.0 * epsilon {
        return Err(ModelError::DomainError(format!("|rho| = {} not below 2 epsilon = {}", rho.abs(), 2.0 * epsilon)));
    }
    Ok(LimitPressures {
        t0: rho,
        eps0: rho + t * rho * rho / 2.0,
        tinf: -2.0 * epsilon * (-rho / (2.0 * epsilon)).ln_1p(),
    })
}

/// `Q(t, z) = −W(−λz)/(λz)` with `λ = (1 − e^{−2εt})/(2ε)`.
pub fn mayer_majorant_q(t: f64, z: f64, epsilon: f64) -> Result<f64, ModelError> {
    if !(epsilon > 0.0) || t < 0.0 {
        return Err(ModelError::DomainError("need epsilon > 0 and t >= 0".into()));
    }
    let lam = -(-2.0 * epsilon * t).exp_m1() / (2.0 * epsilon);
    let x = lam * z;
    if std::f64::consts::E * x.abs() >= 1.0 {
        return Err(ModelError::DomainError(format!("e*lambda*|z| = {} >= 1", std::f64::consts::E * x.abs())));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let w = lambert_w(-x).map_err(|e| ModelError::DomainError(e.to_string()))?;
    Ok(-w / x)
}

/// Taylor coefficients of `−W(−x)/x`, from the compositional inverse of `we^w`.
pub fn mayer_majorant_taylor(k_max: usize) -> Result<Vec<Rat>, ModelError> {
    let w = inverse_z_coeffs(k_max + 1)?;
    // −W(−x)/x = Σ_k −w_{k+1}(−1)^{k+1} x^k
    Ok((0..=k_max)
        .map(|k| if k % 2 == 0 { w[k + 1].clone() } else { -w[k + 1].clone() })
        .collect())
}
