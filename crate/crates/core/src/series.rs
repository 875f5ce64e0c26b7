//! Coefficient sequences and truncated power series: convolutions, the `h_k`
//! nonlinearity, Faà di Bruno reduction between Mayer and irreducible coefficients,
//! Lagrange inversion, thermodynamic maps and radius estimation.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ring::{big, binomial, factorial, int, rat, Rat, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("BaseMismatch: bases {0} and {1}")]
    BaseMismatch(usize, usize),
    #[error("InsufficientOrder: need index {need}, have {have}")]
    InsufficientOrder { need: usize, have: usize },
    #[error("NotInvertible: {0}")]
    NotInvertible(String),
    #[error("TooShort: need at least 5 nonzero trailing terms, got {0}")]
    TooShort(usize),
    #[error("InvalidBase: {0}")]
    InvalidBase(usize),
}

/// Finite sequence indexed `base..=base+len-1`, with `base` 0 (Mayer) or 1 (virial).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq<T> {
    base: usize,
    values: Vec<T>,
}

impl<T: Ring> CoeffSeq<T> {
    pub fn new(base: usize, values: Vec<T>) -> Result<Self, SeriesError> {
        if base > 1 {
            return Err(SeriesError::InvalidBase(base));
        }
        Ok(Self { base, values })
    }

    pub fn base0(values: Vec<T>) -> Self {
        Self { base: 0, values }
    }

    pub fn base1(values: Vec<T>) -> Self {
        Self { base: 1, values }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest index present (`base − 1` when empty, so 0 for an empty base-1 sequence).
    pub fn order(&self) -> usize {
        (self.base + self.values.len()).saturating_sub(1)
    }

    pub fn has(&self, k: usize) -> bool {
        k >= self.base && k < self.base + self.values.len()
    }

    pub fn get(&self, k: usize) -> Option<&T> {
        if self.has(k) {
            Some(&self.values[k - self.base])
        } else {
            None
        }
    }

    /// Panics when `k` is out of range.
    pub fn at(&self, k: usize) -> &T {
        self.get(k).unwrap_or_else(|| panic!("index {k} outside {}..={}", self.base, self.order()))
    }

    pub fn push(&mut self, v: T) {
        self.values.push(v);
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.base..self.base + self.values.len()
    }

    pub fn map<U: Ring>(&self, f: impl Fn(usize, &T) -> U) -> CoeffSeq<U> {
        CoeffSeq { base: self.base, values: self.indices().map(|k| f(k, self.at(k))).collect() }
    }

    fn require(&self, k: usize) -> Result<(), SeriesError> {
        if k == 0 && self.base == 1 {
            return Ok(());
        }
        if self.base + self.values.len() <= k {
            return Err(SeriesError::InsufficientOrder { need: k, have: self.order() });
        }
        Ok(())
    }
}

/// Base 1: `(a∗b)_k = Σ_{l=1}^{k−1} a_l b_{k−l}`; base 0: `Σ_{j=0}^{k} a_j b_{k−j}`.
pub fn conv<T: Ring>(a: &CoeffSeq<T>, b: &CoeffSeq<T>) -> Result<CoeffSeq<T>, SeriesError> {
    if a.base != b.base {
        return Err(SeriesError::BaseMismatch(a.base, b.base));
    }
    let mut out = Vec::new();
    if a.is_empty() || b.is_empty() {
        return Ok(CoeffSeq { base: a.base, values: out });
    }
    let top = a.order().min(b.order());
    for k in a.base..=top {
        let range = if a.base == 1 { 1..k } else { 0..k + 1 };
        let mut s = T::zero_el();
        for l in range {
            s = s.plus(&a.at(l).times(b.at(k - l)));
        }
        out.push(s);
    }
    Ok(CoeffSeq { base: a.base, values: out })
}

/// `h_k = ε Σ_{n≥2} (γ^{∗n})_k` for `k ≥ 2`, `h_1 = 1/2`, with `ε = 1/2`.
pub fn h_k_eval<T: Ring>(gamma: &CoeffSeq<T>, k: usize) -> Result<T, SeriesError> {
    h_k_eval_eps(gamma, k, &rat(1, 2))
}

/// As [`h_k_eval`] with an explicit ε (`h_1` stays `1/2`).
pub fn h_k_eval_eps<T: Ring>(gamma: &CoeffSeq<T>, k: usize, eps: &Rat) -> Result<T, SeriesError> {
    if gamma.base != 1 {
        return Err(SeriesError::BaseMismatch(gamma.base, 1));
    }
    if k == 1 {
        return Ok(T::from_rat(rat(1, 2)));
    }
    gamma.require(k - 1)?;
    // F = Σ_{n≥1} γ^{∗n} solves F = γ + γ∗F; the requested sum is (γ∗F)_k.
    let mut f: Vec<T> = vec![T::zero_el()];
    for j in 1..k {
        let mut s = gamma.at(j).clone();
        for i in 1..j {
            s = s.plus(&gamma.at(i).times(&f[j - i]));
        }
        f.push(s);
    }
    let mut s = T::zero_el();
    for i in 1..k {
        s = s.plus(&gamma.at(i).times(&f[k - i]));
    }
    Ok(s.scaled(eps))
}

/// Multiplicity vectors `(n_1, …, n_P)` with `Σ i·n_i = target`, `P = max_part`.
#[derive(Debug, Clone)]
pub struct WeightedPartition {
    target: usize,
    max_part: usize,
}

impl WeightedPartition {
    pub fn new(target: usize, max_part: usize) -> Self {
        Self { target, max_part }
    }

    pub fn count(&self) -> u64 {
        fn go(n: usize, p: usize, memo: &mut HashMap<(usize, usize), u64>) -> u64 {
            if n == 0 {
                return 1;
            }
            if p == 0 {
                return 0;
            }
            if let Some(&v) = memo.get(&(n, p)) {
                return v;
            }
            let mut s = 0;
            let mut used = 0;
            while used <= n {
                s += go(n - used, p - 1, memo);
                used += p;
            }
            memo.insert((n, p), s);
            s
        }
        go(self.target, self.max_part, &mut HashMap::new())
    }

    pub fn enumerate(&self) -> Vec<Vec<usize>> {
        fn go(rem: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if p == 0 {
                if rem == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            for n in (0..=rem / p).rev() {
                cur[p - 1] = n;
                go(rem - n * p, p - 1, cur, out);
            }
            cur[p - 1] = 0;
        }
        let mut out = Vec::new();
        let mut cur = vec![0; self.max_part];
        go(self.target, self.max_part, &mut cur, &mut out);
        out
    }
}

fn rat_factorial(n: usize) -> Rat {
    big(&factorial(n as u64))
}

/// Mayer coefficients from irreducible ones:
/// `b_l = l^{−2} Σ_{n_1+2n_2+⋯=l−1} Π (lβ_i)^{n_i}/n_i!`, `b_1 = 1`.
pub fn b_from_beta<T: Ring>(beta: &CoeffSeq<T>, l_max: usize) -> Result<CoeffSeq<T>, SeriesError> {
    if beta.base != 1 {
        return Err(SeriesError::BaseMismatch(beta.base, 1));
    }
    beta.require(l_max.saturating_sub(1))?;
    let mut out = vec![T::one_el()];
    for l in 2..=l_max {
        let lr = int(l as i64);
        let mut pow_cache: HashMap<(usize, usize), T> = HashMap::new();
        let mut s = T::zero_el();
        for ns in WeightedPartition::new(l - 1, l - 1).enumerate() {
            let mut w = Rat::one();
            let mut term = T::one_el();
            for (i0, &n) in ns.iter().enumerate() {
                if n == 0 {
                    continue;
                }
                let i = i0 + 1;
                w = w * num_traits::pow(lr.clone(), n) / rat_factorial(n);
                let p = pow_cache.entry((i, n)).or_insert_with(|| beta.at(i).pow_el(n as u32)).clone();
                term = term.times(&p);
            }
            s = s.plus(&term.scaled(&w));
        }
        out.push(s.scaled(&(Rat::one() / (&lr * &lr))));
    }
    Ok(CoeffSeq::base1(out))
}

/// Irreducible coefficients from Mayer ones:
/// `β_k = Σ_{n_2+2n_3+⋯+kn_{k+1}=k} (−1)^{Σn−1} (k+Σn−1)!/k! Π (i b_i)^{n_i}/n_i!`.
pub fn beta_from_b<T: Ring>(b: &CoeffSeq<T>, k_max: usize) -> Result<CoeffSeq<T>, SeriesError> {
    if b.base != 1 {
        return Err(SeriesError::BaseMismatch(b.base, 1));
    }
    b.require(k_max + 1)?;
    let mut out = Vec::new();
    for k in 1..=k_max {
        let mut pow_cache: HashMap<(usize, usize), T> = HashMap::new();
        let mut s = T::zero_el();
        for ns in WeightedPartition::new(k, k).enumerate() {
            let total: usize = ns.iter().sum();
            let mut w = rat_factorial(k + total - 1) / rat_factorial(k);
            if total % 2 == 0 {
                w = -w;
            }
            let mut term = T::one_el();
            for (j0, &n) in ns.iter().enumerate() {
                if n == 0 {
                    continue;
                }
                let i = j0 + 2;
                w /= rat_factorial(n);
                let p = pow_cache
                    .entry((i, n))
                    .or_insert_with(|| b.at(i).scaled(&int(i as i64)).pow_el(n as u32))
                    .clone();
                term = term.times(&p);
            }
            s = s.plus(&term.scaled(&w));
        }
        out.push(s);
    }
    Ok(CoeffSeq::base1(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Indeterminate {
    Z,
    Rho,
    R,
    Omega,
}

/// Truncated power series `Σ_{n=0}^{K} a_n x^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries<T> {
    coeffs: CoeffSeq<T>,
    var: Indeterminate,
}

impl<T: Ring> FormalSeries<T> {
    pub fn new(coeffs: Vec<T>, var: Indeterminate) -> Self {
        Self { coeffs: CoeffSeq::base0(coeffs), var }
    }

    pub fn var(&self) -> Indeterminate {
        self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.order()
    }

    pub fn coeffs(&self) -> &[T] {
        self.coeffs.values()
    }

    pub fn coeff(&self, n: usize) -> T {
        self.coeffs.get(n).cloned().unwrap_or_else(T::zero_el)
    }

    pub fn mul_trunc(&self, o: &Self, k: usize) -> Self {
        let mut out = vec![T::zero_el(); k + 1];
        for (i, a) in self.coeffs().iter().enumerate().take(k + 1) {
            if a.is_zero_el() {
                continue;
            }
            for (j, b) in o.coeffs().iter().enumerate().take(k + 1 - i) {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Self::new(out, self.var)
    }

    /// `self(inner(x))` to order `k`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self, k: usize) -> Result<Self, SeriesError> {
        if !inner.coeff(0).is_zero_el() {
            return Err(SeriesError::NotInvertible("inner series has a constant term".into()));
        }
        let mut acc = Self::new(vec![T::zero_el(); k + 1], inner.var);
        for a in self.coeffs().iter().take(k + 1).rev() {
            acc = acc.mul_trunc(inner, k);
            let mut c = acc.coeffs.values.clone();
            c[0] = c[0].plus(a);
            acc = Self::new(c, inner.var);
        }
        Ok(acc)
    }
}

impl FormalSeries<Rat> {
    /// `1/self` to order `k`; needs a nonzero constant term.
    pub fn reciprocal(&self, k: usize) -> Result<Self, SeriesError> {
        let a0 = self.coeff(0);
        if a0.is_zero() {
            return Err(SeriesError::NotInvertible("zero constant term".into()));
        }
        let mut out: Vec<Rat> = vec![Rat::one() / &a0];
        for n in 1..=k {
            let mut s = Rat::zero();
            for j in 1..=n {
                s += self.coeff(j) * &out[n - j];
            }
            out.push(-s / &a0);
        }
        Ok(Self::new(out, self.var))
    }
}

/// Compositional inverse by Lagrange–Bürmann: `[z^n] g = (1/n)[w^{n−1}] (w/f(w))^n`.
pub fn series_invert(f: &FormalSeries<Rat>, k: usize) -> Result<FormalSeries<Rat>, SeriesError> {
    if !f.coeff(0).is_zero() {
        return Err(SeriesError::NotInvertible("nonzero constant term".into()));
    }
    if f.coeff(1).is_zero() {
        return Err(SeriesError::NotInvertible("zero linear coefficient".into()));
    }
    if f.order() < k {
        return Err(SeriesError::InsufficientOrder { need: k, have: f.order() });
    }
    let shifted = FormalSeries::new((1..=k).map(|n| f.coeff(n)).collect(), f.var);
    let phi = shifted.reciprocal(k.saturating_sub(1))?;
    let mut out = vec![Rat::zero()];
    let mut pw = FormalSeries::new(vec![Rat::one()], f.var);
    for n in 1..=k {
        pw = pw.mul_trunc(&phi, k - 1);
        out.push(pw.coeff(n - 1) / int(n as i64));
    }
    Ok(FormalSeries::new(out, f.var))
}

/// Series with a separately tagged `c·log ρ` part.
#[derive(Debug, Clone, PartialEq)]
pub struct LogTagged<T> {
    pub log_coefficient: Rat,
    pub series: FormalSeries<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermoMaps<T> {
    /// `P(ρ) = ρ − Σ n/(n+1) β_n ρ^{n+1}`.
    pub pressure: FormalSeries<T>,
    /// `μ*(ρ) = log ρ − Σ β_n ρ^n`.
    pub mu_star: LogTagged<T>,
    /// `−𝔅(ρ) = −Σ β_n ρ^{n+1}/(n+1)`; the full free energy adds `ρ log ρ − ρ`.
    pub f_excess: FormalSeries<T>,
    /// Virial coefficients `B_1 = 1`, `B_{n+1} = −n β_n/(n+1)`.
    pub virial: CoeffSeq<T>,
}

/// Pressure, chemical potential, excess free energy and virial coefficients from `β_1..β_K`.
/// Uses `min(K, order(β))` terms.
pub fn thermo_maps<T: Ring>(beta: &CoeffSeq<T>, k: usize) -> ThermoMaps<T> {
    let k = k.min(beta.order());
    let mut p = vec![T::zero_el(), T::one_el()];
    let mut mu = vec![T::zero_el()];
    let mut fe = vec![T::zero_el(), T::zero_el()];
    let mut bv = vec![T::one_el()];
    for n in 1..=k {
        let bn = beta.at(n);
        let r = rat(n as i64, n as i64 + 1);
        p.push(bn.scaled(&-r.clone()));
        mu.push(bn.negated());
        fe.push(bn.scaled(&rat(-1, n as i64 + 1)));
        bv.push(bn.scaled(&-r));
    }
    ThermoMaps {
        pressure: FormalSeries::new(p, Indeterminate::Rho),
        mu_star: LogTagged { log_coefficient: Rat::one(), series: FormalSeries::new(mu, Indeterminate::Rho) },
        f_excess: FormalSeries::new(fe, Indeterminate::Rho),
        virial: CoeffSeq::base1(bv),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMethod {
    Ratio,
    DombSykes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusEstimate {
    pub estimate: f64,
    /// Per-index estimates, last entry nearest the tail.
    pub partial: Vec<f64>,
    /// Fitted slope of `a_n/a_{n−1}` against `1/n` (Domb–Sykes only).
    pub slope: Option<f64>,
}

/// Radius of convergence from coefficients `seq[i] = a_{i+1}`.
pub fn radius_estimate(seq: &[f64], method: RadiusMethod) -> Result<RadiusEstimate, SeriesError> {
    radius_estimate_from(seq, 1, method)
}

/// As [`radius_estimate`] with `seq[i] = a_{first_index + i}`.
pub fn radius_estimate_from(
    seq: &[f64],
    first_index: usize,
    method: RadiusMethod,
) -> Result<RadiusEstimate, SeriesError> {
    let trailing = seq.iter().rev().take_while(|x| **x != 0.0 && x.is_finite()).count();
    if trailing < 5 {
        return Err(SeriesError::TooShort(trailing));
    }
    let start = seq.len() - trailing;
    let pts: Vec<(f64, f64)> = (start + 1..seq.len())
        .map(|i| {
            let n = (first_index + i) as f64;
            (n, (seq[i] / seq[i - 1]).abs())
        })
        .collect();
    match method {
        RadiusMethod::Ratio => {
            let partial: Vec<f64> = pts.iter().map(|p| 1.0 / p.1).collect();
            Ok(RadiusEstimate { estimate: *partial.last().unwrap(), partial, slope: None })
        }
        RadiusMethod::DombSykes => {
            let partial: Vec<f64> = pts
                .windows(2)
                .map(|w| {
                    let (n1, r1) = w[0];
                    let (n2, r2) = w[1];
                    1.0 / ((n2 * r2 - n1 * r1) / (n2 - n1))
                })
                .collect();
            let tail = &pts[pts.len() / 2..];
            let m = tail.len() as f64;
            let (sx, sy) = tail.iter().fold((0.0, 0.0), |(a, b), p| (a + 1.0 / p.0, b + p.1));
            let (mx, my) = (sx / m, sy / m);
            let (sxy, sxx) = tail.iter().fold((0.0, 0.0), |(a, b), p| {
                let dx = 1.0 / p.0 - mx;
                (a + dx * (p.1 - my), b + dx * dx)
            });
            let slope = sxy / sxx;
            let intercept = my - slope * mx;
            Ok(RadiusEstimate { estimate: 1.0 / intercept, partial, slope: Some(slope) })
        }
    }
}

/// Left side of `(1/2) Σ_{j=1}^{n−1} C(n,j) j^{j−1} (n−j)^{n−j−1} = (n−1) n^{n−2}`.
pub fn bk_sum(n: u64) -> Rat {
    let mut s = BigInt::zero();
    for j in 1..n {
        s += binomial(n, j)
            * num_traits::pow(BigInt::from(j), (j - 1) as usize)
            * num_traits::pow(BigInt::from(n - j), (n - j - 1) as usize);
    }
    big(&s) / int(2)
}

pub fn bk_closed(n: u64) -> Rat {
    big(&(BigInt::from(n - 1) * num_traits::pow(BigInt::from(n), (n - 2) as usize)))
}

/// Worst ratio `(c∗c)_n / c_n` over `2 ≤ n ≤ n_max` for `c_i = A d^i/i²`, `A = 3/(2π²)`.
/// The `d^i` factor cancels, so the ratio is `A Σ n²/(i²(n−i)²)`.
pub fn conv_domination_worst(n_max: usize) -> (usize, f64) {
    let a = 3.0 / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
    let mut worst = (0, 0.0);
    for n in 2..=n_max {
        let nf = n as f64;
        let mut s = 0.0;
        for i in 1..n {
            let x = nf / (i as f64 * (n - i) as f64);
            s += x * x;
        }
        let r = a * s;
        if r > worst.1 {
            worst = (n, r);
        }
    }
    worst
}
