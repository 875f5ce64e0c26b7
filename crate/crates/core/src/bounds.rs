//! Convergence-radius bounds: the prefactor κ(η), the majorants H and H₁ with their
//! discriminant roots, the polynomial families P/Q/T/R/L, Lambert W and the
//! Lebowitz–Penrose / Lagrange thresholds.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ring::{int, rat, rat_to_f64, EtaExpr, Rat};
use crate::series::{FormalSeries, Indeterminate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("DomainError: {0}")]
    DomainError(String),
    #[error("NoRoot: {0}")]
    NoRoot(String),
    #[error("DegenerateParams: {0}")]
    DegenerateParams(String),
}

/// Lebowitz–Penrose lower bound `λ𝓡 > 0.144767` for nonnegative potentials.
pub const LEBOWITZ_PENROSE: f64 = 0.144767;

/// Sampled `(η, value)` curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub name: String,
    pub samples: Vec<(f64, f64)>,
    pub metadata: BTreeMap<String, String>,
}

impl BoundCurve {
    pub fn sample(
        name: &str,
        grid: &[f64],
        f: impl Fn(f64) -> Result<f64, BoundsError>,
    ) -> Result<Self, BoundsError> {
        if grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(BoundsError::DomainError("eta grid must increase within [0, 1]".into()));
        }
        let samples = grid
            .iter()
            .map(|&e| {
                let v = f(e)?;
                if v.is_finite() {
                    Ok((e, v))
                } else {
                    Err(BoundsError::DomainError(format!("{name} not finite at eta = {e}")))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { name: name.to_string(), samples, metadata: BTreeMap::new() })
    }
}

fn check_unit(eta: f64) -> Result<(), BoundsError> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(BoundsError::DomainError(format!("eta = {eta} outside [0, 1]")))
    }
}

/// `κ = (2 + √(1−η) − 2√(1 − η/2 + √(1−η)))/(1 + η)`.
pub fn kappa(eta: f64) -> Result<f64, BoundsError> {
    check_unit(eta)?;
    let s = (1.0 - eta).sqrt();
    Ok((2.0 + s - 2.0 * (1.0 - eta / 2.0 + s).sqrt()) / (1.0 + eta))
}

/// Majorant `H(r) = ¼(1 + r − ηr² − √((1 + r − ηr²)² − 8(r − ηr²)))` and its branch points.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantH {
    pub eta: Rat,
    pub series: FormalSeries<Rat>,
    /// `r_{σ,σ'} = (1 + σ√(1 − (12 + σ'8√2)η))/(2η)` in the order `++, +−, −+, −−`;
    /// `None` for complex or (at η = 0) absent roots.
    pub roots: [Option<f64>; 4],
    pub smallest_positive: f64,
}

/// Coefficients by the exact recursion `H = s + 2H² − sH`, `s = r − ηr²`.
pub fn majorant_h(eta: &Rat, k_max: usize) -> Result<MajorantH, BoundsError> {
    if eta < &Rat::zero() || eta >= &Rat::one() {
        return Err(BoundsError::DomainError("eta must lie in [0, 1)".into()));
    }
    let mut h = vec![Rat::zero(); k_max + 1];
    for n in 1..=k_max {
        let mut v = match n {
            1 => Rat::one(),
            2 => -eta.clone(),
            _ => Rat::zero(),
        };
        for i in 1..n {
            v += int(2) * &h[i] * &h[n - i];
        }
        v -= &h[n - 1];
        if n >= 2 {
            v += eta * &h[n - 2];
        }
        h[n] = v;
    }
    let e = rat_to_f64(eta);
    let roots = [h_root(1, 1, e), h_root(1, -1, e), h_root(-1, 1, e), h_root(-1, -1, e)];
    let smallest_positive = roots
        .iter()
        .flatten()
        .copied()
        .filter(|r| *r > 0.0)
        .fold(f64::INFINITY, f64::min);
    Ok(MajorantH { eta: eta.clone(), series: FormalSeries::new(h, Indeterminate::R), roots, smallest_positive })
}

/// `r_{σ,σ'}(η)`; `None` when complex, or for `σ = +` at `η = 0` where the root escapes to infinity.
pub fn h_root(sigma: i8, sigma_p: i8, eta: f64) -> Option<f64> {
    let c = 12.0 + f64::from(sigma_p) * 8.0 * std::f64::consts::SQRT_2;
    if eta == 0.0 {
        // roots of r² − 6r + 1
        return (sigma < 0).then(|| c / 4.0);
    }
    let d = 1.0 - c * eta;
    if d < 0.0 {
        None
    } else if sigma < 0 {
        // rationalized against cancellation at small η
        Some(c / (2.0 * (1.0 + d.sqrt())))
    } else {
        Some((1.0 + d.sqrt()) / (2.0 * eta))
    }
}

/// Roots of the discriminant of the refined majorant `H₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantH1 {
    /// `R_{σ,σ'}` in the order `++, +−, −+, −−`.
    pub roots: [f64; 4],
    pub smallest: f64,
}

/// `R_{σ,σ'} = (2 − σ'√(1−η) + 2σ√(1 − η/2 − σ'√(1−η)))/(1 + η)`.
pub fn majorant_h1(eta: f64) -> Result<MajorantH1, BoundsError> {
    check_unit(eta)?;
    let s = (1.0 - eta).sqrt();
    let r = |sg: f64, sgp: f64| (2.0 - sgp * s + 2.0 * sg * (1.0 - eta / 2.0 - sgp * s).max(0.0).sqrt()) / (1.0 + eta);
    let roots = [r(1.0, 1.0), r(1.0, -1.0), r(-1.0, 1.0), r(-1.0, -1.0)];
    Ok(MajorantH1 { roots, smallest: roots[3] })
}

/// `(1 − r² − ηr²)² − 8(r(1−r)² − ηr²(1−r))`, the discriminant numerator for `H₁`.
pub fn h1_discriminant(r: f64, eta: f64) -> f64 {
    let a = 1.0 - r * r - eta * r * r;
    a * a - 8.0 * (r * (1.0 - r) * (1.0 - r) - eta * r * r * (1.0 - r))
}

/// `η²r⁴ − 2ηr³ + (1 + 6η)r² − 6r + 1`, the discriminant of `H`.
pub fn h_discriminant(r: f64, eta: f64) -> f64 {
    eta * eta * r.powi(4) - 2.0 * eta * r.powi(3) + (1.0 + 6.0 * eta) * r * r - 6.0 * r + 1.0
}

/// `p_n = Π_{j=1}^{n} (D − j + 1)/(N − j)`, `n = 0..D`.
pub fn product_coeffs(d: u64, n: u64) -> Vec<Rat> {
    let mut p = vec![Rat::one()];
    for j in 1..=d {
        let next = p.last().unwrap() * rat((d - j + 1) as i64, (n - j) as i64);
        p.push(next);
    }
    p
}

/// Degree of `P_k`: `(k−2)(k+1)/2`.
pub fn d_int(k: u64) -> u64 {
    (k - 2) * (k + 1) / 2
}

/// Degree of `R_k`: `k(k−1)/2`.
pub fn d_contra(k: u64) -> u64 {
    k * (k - 1) / 2
}

/// `N_k = k(k+1)/2`.
pub fn n_k(k: u64) -> u64 {
    k * (k + 1) / 2
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_else(Rat::zero) + b.get(i).cloned().unwrap_or_else(Rat::zero))
        .collect()
}

fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.len() > 1 && v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
    v
}

pub fn poly_eval(c: &[Rat], x: &Rat) -> Rat {
    if x.is_positive() && x <= &Rat::one() {
        if let Ok(v) = EtaExpr::from_poly(c).eval_exact(x) {
            return v;
        }
    }
    c.iter().rev().fold(Rat::zero(), |acc, a| acc * x + a)
}

pub fn poly_eval_f64(c: &[Rat], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + rat_to_f64(a))
}

pub fn poly_derivative(c: &[Rat]) -> Vec<Rat> {
    if c.len() <= 1 {
        return vec![Rat::zero()];
    }
    c.iter().enumerate().skip(1).map(|(n, a)| a * int(n as i64)).collect()
}

fn q_from_p(p: &[Rat]) -> Vec<Rat> {
    // Q = 1 − (1 − η) P
    let one_minus = [Rat::one(), -Rat::one()];
    let prod = poly_mul(&one_minus, p);
    trim(poly_add(&[Rat::one()], &prod.iter().map(|x| -x).collect::<Vec<_>>()))
}

/// Exact coefficient lists (ascending powers of η) of the polynomial families at index k.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFamily {
    pub k: u64,
    pub d_int: u64,
    pub n_int: u64,
    pub p: Vec<Rat>,
    pub q: Vec<Rat>,
    /// Majorant convention: `T_2 = Q_2 = η`, otherwise equal to `t_formula`.
    pub t: Vec<Rat>,
    /// `Q_k + (k−1)(1−η)Q_{k+1}` for every k.
    pub t_formula: Vec<Rat>,
    pub d_contra: u64,
    pub r: Vec<Rat>,
    pub l: Vec<Rat>,
}

impl PolyFamily {
    /// `t_{k,1}` and `t_{k,n}` (`n ≥ 2`) with `T_k = t_{k,1}η − Σ_{n≥2} t_{k,n}η^n`.
    pub fn claim_t(&self) -> (Rat, Vec<Rat>) {
        let t1 = self.t_formula.get(1).cloned().unwrap_or_else(Rat::zero);
        let rest = self.t_formula.iter().skip(2).map(|c| -c).collect();
        (t1, rest)
    }

    /// `q_{k,n}` for `n = 1..=D+1`.
    pub fn q_coeffs(&self) -> &[Rat] {
        &self.q[1..]
    }

    /// `l_{k,n} = p_{k,n} − (k−1)/(k+1) p_{k,n−1}` with the contra-section `p`.
    pub fn l_coeffs(&self) -> &[Rat] {
        &self.l[1..]
    }
}

pub fn poly_family(k: u64) -> Result<PolyFamily, BoundsError> {
    if k < 2 {
        return Err(BoundsError::DomainError("k must be at least 2".into()));
    }
    let p = product_coeffs(d_int(k), n_k(k));
    let q = q_from_p(&p);
    let q_next = q_from_p(&product_coeffs(d_int(k + 1), n_k(k + 1)));
    let tail = poly_mul(&[int(k as i64 - 1), int(1 - k as i64)], &q_next);
    let t_formula = trim(poly_add(&q, &tail));
    let t = if k == 2 { q.clone() } else { t_formula.clone() };
    let r = product_coeffs(d_contra(k), n_k(k));
    let lin = [Rat::one(), -rat(k as i64 - 1, k as i64 + 1)];
    let mut l = poly_mul(&lin, &r);
    l[0] -= Rat::one();
    Ok(PolyFamily { k, d_int: d_int(k), n_int: n_k(k), p, q, t, t_formula, d_contra: d_contra(k), r, l })
}

/// `h_{k,n} = −¼k(k²+k−6)(k²+3k−2n)(k²+k−2n) + ½(k−1)³(k+2)²(k²+k−2(n+1))`.
pub fn h_const(k: i64, n: i64) -> Rat {
    let a = rat(-1, 4) * int(k * (k * k + k - 6) * (k * k + 3 * k - 2 * n) * (k * k + k - 2 * n));
    let b = rat(1, 2) * int((k - 1).pow(3) * (k + 2).pow(2) * (k * k + k - 2 * (n + 1)));
    a + b
}

/// The same constant through `N_k`, `D_{k+1}`:
/// `−k(k²+k−6)(N_{k+1}−n−1)(D_{k+1}−n+1) + (k−1)(k²+k−2)²(N_k−n−1)`.
pub fn h_const_via_degrees(k: i64, n: i64) -> Rat {
    let nk = k * (k + 1) / 2;
    let nk1 = (k + 1) * (k + 2) / 2;
    let dk1 = (k - 1) * (k + 2) / 2;
    int(-k * (k * k + k - 6) * (nk1 - n - 1) * (dk1 - n + 1) + (k - 1) * (k * k + k - 2).pow(2) * (nk - n - 1))
}

/// Principal branch of Lambert W for `x ≥ −1/e`.
pub fn lambert_w(x: f64) -> Result<f64, BoundsError> {
    let e = std::f64::consts::E;
    let branch = -1.0 / e;
    if x.is_nan() || x < branch {
        return Err(BoundsError::DomainError(format!("x = {x} below -1/e")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let q = e * x + 1.0;
    if q <= 0.0 {
        return Ok(-1.0);
    }
    let mut w = if q < 0.3 {
        let p = (2.0 * q).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 1.0 {
        x * (1.0 - x + 1.5 * x * x).max(0.3)
    } else if x < 3.0 {
        x.ln_1p() * 0.75
    } else {
        let l = x.ln();
        l - l.ln()
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let dw = f / denom;
        w -= dw;
        if dw.abs() <= 1e-16 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// Lebowitz–Penrose type maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpBound {
    pub r0: f64,
    pub w_star: f64,
}

/// `max_{w∈[0,1)} ((1+κ)e^{−w} − 1) w/(κ²B)`.
pub fn lp_bounds(kappa_stab: f64, b: f64) -> Result<LpBound, BoundsError> {
    if !(kappa_stab >= 1.0) || !(b > 0.0) || !kappa_stab.is_finite() || !b.is_finite() {
        return Err(BoundsError::DegenerateParams(format!("kappa = {kappa_stab}, B = {b}")));
    }
    let k1 = 1.0 + kappa_stab;
    let f = |w: f64| (k1 * (-w).exp() - 1.0) * w;
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut c, mut d) = (hi - gr * (hi - lo), lo + gr * (hi - lo));
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = f(d);
        }
    }
    let mut w = 0.5 * (lo + hi);
    for _ in 0..8 {
        let e = (-w).exp();
        let g = k1 * e * (1.0 - w) - 1.0;
        let gp = k1 * e * (w - 2.0);
        let step = g / gp;
        w -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    Ok(LpBound { r0: f(w) / (kappa_stab * kappa_stab * b), w_star: w })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub eta_star: f64,
    /// `−(log η*)/2`.
    pub epsilon_t_star: f64,
}

/// Solves `R_{−,−}(η) = W(e^{−1})` by bisection.
pub fn threshold_solve() -> Result<Threshold, BoundsError> {
    let target = lambert_w((-1.0f64).exp())?;
    let g = |e: f64| majorant_h1(e).map(|m| m.smallest - target);
    let (mut lo, mut hi) = (0.0, 1.0);
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if glo.signum() == ghi.signum() {
        return Err(BoundsError::NoRoot("R_{-,-} - W(1/e) does not change sign on [0, 1]".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)?.signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eta_star = 0.5 * (lo + hi);
    Ok(Threshold { eta_star, epsilon_t_star: -eta_star.ln() / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_endpoints() {
        assert!((kappa(1.0).unwrap() - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!((kappa(0.0).unwrap() - (3.0 - 8f64.sqrt())).abs() < 1e-15);
        assert!(kappa(1.1).is_err());
    }

    #[test]
    fn h_prefix() {
        let eta = rat(2, 7);
        let h = majorant_h(&eta, 6).unwrap();
        let c = h.series.coeffs();
        let e = &eta;
        assert_eq!(c[1], int(1));
        assert_eq!(c[2], int(1) - e);
        assert_eq!(c[3], int(3) - int(2) * e);
        assert_eq!(c[4], int(11) - int(9) * e + e * e);
        assert_eq!(c[5], int(45) - int(44) * e + int(9) * e * e);
    }

    #[test]
    fn h_roots_at_zero() {
        let h = majorant_h(&Rat::zero(), 3).unwrap();
        assert!((h.smallest_positive - (3.0 - 8f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn family_small_cases() {
        let f = poly_family(3).unwrap();
        assert_eq!(f.p[1], rat(2, 5));
        assert_eq!(f.r, vec![int(1), rat(3, 5), rat(3, 10), rat(1, 10)]);
        assert_eq!(f.l_coeffs()[1], int(0));
        let f2 = poly_family(2).unwrap();
        assert_eq!(f2.t, vec![int(0), int(1)]);
        let (t1, rest) = f2.claim_t();
        assert_eq!(t1, rat(8, 5));
        assert_eq!(rest, vec![rat(3, 10), rat(1, 5), rat(1, 10)]);
    }

    #[test]
    fn h31() {
        assert_eq!(h_const(3, 1), int(80));
        assert_eq!(h_const_via_degrees(3, 1), int(80));
    }

    #[test]
    fn w_values() {
        assert_eq!(lambert_w(0.0).unwrap(), 0.0);
        assert!((lambert_w(-(-1.0f64).exp()).unwrap() + 1.0).abs() < 1e-7);
        assert!((lambert_w(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!(lambert_w(-0.5).is_err());
    }

    #[test]
    fn lp_scaling() {
        let a = lp_bounds(1.0, 1.0).unwrap();
        let b = lp_bounds(1.0, 2.0).unwrap();
        assert!((a.r0 - 2.0 * b.r0).abs() < 1e-15);
        assert!(lp_bounds(0.5, 1.0).is_err());
    }
}
