//! Exact scalars and the ring of time expressions `Σ c·η^a·log^m η`.
//!
//! Everything is kept in the `2ε = 1` normalization, so `λ = 1 − η` and
//! `t = −log η`. Other values of ε are reached by rescaling (see `engines`).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary precision rational, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("DomainError: {0}")]
    DomainError(String),
    #[error("ExactnessError: log terms cannot be evaluated exactly at eta = {0}")]
    ExactnessError(String),
    #[error("NotDivisible: expression is not divisible by (1-eta)^{0}")]
    NotDivisible(u32),
    #[error("ParseError: {0}")]
    ParseError(String),
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn big(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite binary64.
pub fn f64_to_rat(x: f64) -> Result<Rat, RingError> {
    Rat::from_float(x).ok_or_else(|| RingError::DomainError(format!("non-finite value {x}")))
}

/// `num/den`, the denominator always printed.
pub fn rat_string(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q`, an integer, or a plain decimal such as `0.125` (exactly).
pub fn parse_rat(s: &str) -> Result<Rat, RingError> {
    let s = s.trim();
    let err = || RingError::ParseError(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if ip_abs.is_empty() { "0" } else { ip_abs }, fp);
        let num: BigInt = digits.parse().map_err(|_| err())?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let v = Rat::new(num, den);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rat::from_integer(n))
}

/// Minimal commutative ring interface shared by `Rat` and `EtaExpr`.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_el() -> Self;
    fn one_el() -> Self;
    fn is_zero_el(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn scaled(&self, c: &Rat) -> Self;
    fn from_rat(c: Rat) -> Self;

    fn negated(&self) -> Self {
        Self::zero_el().minus(self)
    }

    fn pow_el(&self, n: u32) -> Self {
        let mut acc = Self::one_el();
        for _ in 0..n {
            acc = acc.times(self);
        }
        acc
    }
}

impl Ring for Rat {
    fn zero_el() -> Self {
        Rat::zero()
    }
    fn one_el() -> Self {
        Rat::one()
    }
    fn is_zero_el(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn scaled(&self, c: &Rat) -> Self {
        self * c
    }
    fn from_rat(c: Rat) -> Self {
        c
    }
}

/// Finite sum `Σ c·η^a·log^m η` keyed by `(a, m)`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct EtaExpr {
    terms: BTreeMap<(i64, u32), Rat>,
}

impl EtaExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(a: i64, m: u32, c: Rat) -> Self {
        let mut e = Self::zero();
        e.add_term(a, m, c);
        e
    }

    pub fn eta() -> Self {
        Self::monomial(1, 0, Rat::one())
    }

    pub fn log_eta() -> Self {
        Self::monomial(0, 1, Rat::one())
    }

    /// `λ = 1 − η` in `2ε = 1` units.
    pub fn lambda() -> Self {
        Self::one_minus_eta_pow(1)
    }

    pub fn one_minus_eta_pow(k: u32) -> Self {
        let mut e = Self::zero();
        for j in 0..=k {
            let c = big(&binomial(k as u64, j as u64));
            e.add_term(j as i64, 0, if j % 2 == 0 { c } else { -c });
        }
        e
    }

    /// Polynomial `Σ coeffs[n] η^n`.
    pub fn from_poly(coeffs: &[Rat]) -> Self {
        let mut e = Self::zero();
        for (n, c) in coeffs.iter().enumerate() {
            e.add_term(n as i64, 0, c.clone());
        }
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, u32, Rat)>>(it: I) -> Self {
        let mut e = Self::zero();
        for (a, m, c) in it {
            e.add_term(a, m, c);
        }
        e
    }

    fn add_term(&mut self, a: i64, m: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((a, m)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, u32, &Rat)> {
        self.terms.iter().map(|(&(a, m), c)| (a, m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: i64, m: u32) -> Rat {
        self.terms.get(&(a, m)).cloned().unwrap_or_else(Rat::zero)
    }

    /// No negative powers of η and no log factors.
    pub fn is_bounded_at_origin(&self) -> bool {
        self.terms.keys().all(|&(a, m)| a >= 0 && m == 0)
    }

    pub fn has_logs(&self) -> bool {
        self.terms.keys().any(|&(_, m)| m > 0)
    }

    pub fn max_eta_power(&self) -> Option<i64> {
        self.terms.keys().map(|&(a, _)| a).max()
    }

    pub fn min_eta_power(&self) -> Option<i64> {
        self.terms.keys().map(|&(a, _)| a).min()
    }

    /// Dense coefficients `[c_0, …, c_D]` of a polynomial in η; `None` otherwise.
    pub fn poly_coeffs(&self) -> Option<Vec<Rat>> {
        if !self.is_bounded_at_origin() {
            return None;
        }
        let d = self.max_eta_power().unwrap_or(0) as usize;
        let mut v = vec![Rat::zero(); d + 1];
        for (a, _, c) in self.terms() {
            v[a as usize] = c.clone();
        }
        Some(v)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn mul_eta_pow(&self, s: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(a, m), c)| ((a + s, m), c.clone())).collect(),
        }
    }

    fn add_expr(&self, o: &Self, sign: bool) -> Self {
        let mut out = self.clone();
        for (&(a, m), c) in &o.terms {
            out.add_term(a, m, if sign { c.clone() } else { -c });
        }
        out
    }

    fn mul_expr(&self, o: &Self) -> Self {
        if self.is_empty() || o.is_empty() {
            return Self::zero();
        }
        let xs = slices(self);
        let ys = slices(o);
        let mut out = Self::zero();
        for sx in &xs {
            for sy in &ys {
                let mut acc = vec![BigInt::zero(); sx.nums.len() + sy.nums.len() - 1];
                for (i, p) in sx.nums.iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    for (j, q) in sy.nums.iter().enumerate() {
                        if !q.is_zero() {
                            acc[i + j] += p * q;
                        }
                    }
                }
                let den = &sx.den * &sy.den;
                for (i, v) in acc.into_iter().enumerate() {
                    if !v.is_zero() {
                        out.add_term(sx.amin + sy.amin + i as i64, sx.m + sy.m, Rat::new(v, den.clone()));
                    }
                }
            }
        }
        out
    }

    /// Exact value at a rational `η ∈ (0, 1]`.
    pub fn eval_exact(&self, eta: &Rat) -> Result<Rat, RingError> {
        if !eta.is_positive() || eta > &Rat::one() {
            return Err(RingError::DomainError(format!("eta = {} outside (0, 1]", rat_string(eta))));
        }
        if eta.is_one() {
            return Ok(self.terms().filter(|t| t.1 == 0).fold(Rat::zero(), |s, (_, _, c)| s + c));
        }
        if self.has_logs() {
            return Err(RingError::ExactnessError(rat_string(eta)));
        }
        let lo = self.min_eta_power().unwrap_or(0);
        let hi = self.max_eta_power().unwrap_or(0);
        // integer Horner on the homogenized polynomial, one reduction at the end
        let den = self.terms().fold(BigInt::one(), |l, (_, _, c)| l.lcm(c.denom()));
        let (p, q) = (eta.numer(), eta.denom());
        let mut acc = BigInt::zero();
        let mut qpow = BigInt::one();
        for a in (lo..=hi).rev() {
            let c = self.coeff(a, 0);
            if a == hi {
                acc = c.numer() * (&den / c.denom());
            } else {
                qpow *= q;
                if !c.is_zero() {
                    acc = acc * p + c.numer() * (&den / c.denom()) * &qpow;
                } else {
                    acc *= p;
                }
            }
        }
        let acc = Rat::new(acc, den * qpow);
        Ok(if lo >= 0 {
            acc * num_traits::pow(eta.clone(), lo as usize)
        } else {
            acc / num_traits::pow(eta.clone(), (-lo) as usize)
        })
    }

    /// Plain binary64 evaluation; `eta = 0` is accepted as the limit for bounded expressions.
    pub fn eval_f64(&self, eta: f64) -> Result<f64, RingError> {
        if eta == 0.0 {
            return self.limit_at_zero().map(|c| rat_to_f64(&c));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(RingError::DomainError(format!("eta = {eta} outside (0, 1]")));
        }
        let l = eta.ln();
        Ok(self
            .terms()
            .map(|(a, m, c)| rat_to_f64(c) * eta.powi(a as i32) * l.powi(m as i32))
            .sum())
    }

    /// Converts the binary64 `eta` to its exact rational value, evaluates exactly and rounds once.
    /// Avoids the cancellation of large alternating coefficients near `η = 1`.
    pub fn eval_exact_f64(&self, eta: f64) -> Result<f64, RingError> {
        if eta == 0.0 {
            return self.limit_at_zero().map(|c| rat_to_f64(&c));
        }
        let e = f64_to_rat(eta)?;
        self.eval_exact(&e).map(|v| rat_to_f64(&v))
    }

    /// Limit `η → 0⁺`; only defined for bounded expressions.
    pub fn limit_at_zero(&self) -> Result<Rat, RingError> {
        if !self.is_bounded_at_origin() {
            return Err(RingError::DomainError("expression unbounded as eta -> 0".into()));
        }
        Ok(self.coeff(0, 0))
    }

    /// `η^N ∫_η^1 u^{−N−1} g(u) du` with `N = k(k+1)/2`, i.e. `∫_0^t e^{−N(t−s)} g(η(s)) ds`.
    pub fn kernel_integrate(&self, k: u64) -> Self {
        let n = (k * (k + 1) / 2) as i64;
        let mut out = Self::zero();
        for (a, m, c) in self.terms() {
            let s = a - n;
            if s == 0 {
                out.add_term(n, m + 1, -c / int(m as i64 + 1));
                continue;
            }
            let sr = int(s);
            // antiderivative u^s Σ_j (−1)^j m!/(m−j)! log^{m−j} u / s^{j+1}
            let mut falling = Rat::one();
            for j in 0..=m {
                if j > 0 {
                    falling *= int((m - j + 1) as i64);
                }
                let mut coef = &falling / num_traits::pow(sr.clone(), (j + 1) as usize) * c;
                if j % 2 == 1 {
                    coef = -coef;
                }
                out.add_term(a, m - j, -coef.clone());
                if j == m {
                    out.add_term(n, 0, coef);
                }
            }
        }
        out
    }

    /// d/dt in `2ε = 1` units: `dη/dt = −η`, `d(log η)/dt = −1`.
    pub fn d_dt(&self) -> Self {
        let mut out = Self::zero();
        for (a, m, c) in self.terms() {
            out.add_term(a, m, -(c * int(a)));
            if m > 0 {
                out.add_term(a, m - 1, -(c * int(m as i64)));
            }
        }
        out
    }

    /// Exact quotient by `(1 − η)^k`.
    pub fn div_one_minus_eta_pow(&self, k: u32) -> Result<Self, RingError> {
        let mut cur = self.clone();
        for _ in 0..k {
            let mut out = Self::zero();
            let mut by_m: BTreeMap<u32, Vec<(i64, Rat)>> = BTreeMap::new();
            for (a, m, c) in cur.terms() {
                by_m.entry(m).or_default().push((a, c.clone()));
            }
            for (m, ts) in by_m {
                let lo = ts.first().map(|t| t.0).unwrap_or(0);
                let hi = ts.last().map(|t| t.0).unwrap_or(0);
                let mut dense = vec![Rat::zero(); (hi - lo + 1) as usize];
                for (a, c) in ts {
                    dense[(a - lo) as usize] = c;
                }
                let mut carry = Rat::zero();
                for (i, p) in dense.iter().enumerate() {
                    carry += p;
                    if i + 1 < dense.len() {
                        out.add_term(lo + i as i64, m, carry.clone());
                    }
                }
                if !carry.is_zero() {
                    return Err(RingError::NotDivisible(k));
                }
            }
            cur = out;
        }
        Ok(cur)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(EtaExprJson::from(self.clone())).expect("serializable")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, RingError> {
        serde_json::from_str(s).map_err(|e| RingError::ParseError(e.to_string()))
    }
}

struct Slice {
    m: u32,
    amin: i64,
    nums: Vec<BigInt>,
    den: BigInt,
}

fn slices(x: &EtaExpr) -> Vec<Slice> {
    let mut by_m: BTreeMap<u32, Vec<(i64, &Rat)>> = BTreeMap::new();
    for (a, m, c) in x.terms() {
        by_m.entry(m).or_default().push((a, c));
    }
    by_m.into_iter()
        .map(|(m, ts)| {
            let amin = ts.iter().map(|t| t.0).min().unwrap_or(0);
            let amax = ts.iter().map(|t| t.0).max().unwrap_or(0);
            let den = ts.iter().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
            let mut nums = vec![BigInt::zero(); (amax - amin + 1) as usize];
            for (a, c) in ts {
                nums[(a - amin) as usize] = c.numer() * (&den / c.denom());
            }
            Slice { m, amin, nums, den }
        })
        .collect()
}

impl Ring for EtaExpr {
    fn zero_el() -> Self {
        Self::zero()
    }
    fn one_el() -> Self {
        Self::constant(Rat::one())
    }
    fn is_zero_el(&self) -> bool {
        self.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        self.add_expr(o, true)
    }
    fn minus(&self, o: &Self) -> Self {
        self.add_expr(o, false)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul_expr(o)
    }
    fn scaled(&self, c: &Rat) -> Self {
        self.scale(c)
    }
    fn from_rat(c: Rat) -> Self {
        Self::constant(c)
    }
}

macro_rules! expr_binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl<'a> $tr<&'a EtaExpr> for &'a EtaExpr {
            type Output = EtaExpr;
            fn $f(self, o: &'a EtaExpr) -> EtaExpr {
                $body(self, o)
            }
        }
        impl $tr<EtaExpr> for EtaExpr {
            type Output = EtaExpr;
            fn $f(self, o: EtaExpr) -> EtaExpr {
                $body(&self, &o)
            }
        }
    };
}

expr_binop!(Add, add, |x: &EtaExpr, y: &EtaExpr| x.add_expr(y, true));
expr_binop!(Sub, sub, |x: &EtaExpr, y: &EtaExpr| x.add_expr(y, false));
expr_binop!(Mul, mul, |x: &EtaExpr, y: &EtaExpr| x.mul_expr(y));

impl Neg for &EtaExpr {
    type Output = EtaExpr;
    fn neg(self) -> EtaExpr {
        self.scale(&int(-1))
    }
}

impl Neg for EtaExpr {
    type Output = EtaExpr;
    fn neg(self) -> EtaExpr {
        self.scale(&int(-1))
    }
}

impl fmt::Display for EtaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, m, c)) in self.terms().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            write!(f, "{mag}")?;
            match a {
                0 => {}
                1 => write!(f, "*eta")?,
                _ => write!(f, "*eta^{a}")?,
            }
            match m {
                0 => {}
                1 => write!(f, "*log(eta)")?,
                _ => write!(f, "*log(eta)^{m}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for EtaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EtaExpr({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    a: i64,
    m: u32,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct EtaExprJson {
    terms: Vec<TermJson>,
}

impl From<EtaExpr> for EtaExprJson {
    fn from(e: EtaExpr) -> Self {
        EtaExprJson {
            terms: e
                .terms()
                .map(|(a, m, c)| TermJson { a, m, num: c.numer().to_string(), den: c.denom().to_string() })
                .collect(),
        }
    }
}

impl TryFrom<EtaExprJson> for EtaExpr {
    type Error = RingError;
    fn try_from(j: EtaExprJson) -> Result<Self, RingError> {
        let mut e = EtaExpr::zero();
        for t in j.terms {
            let c = parse_rat(&format!("{}/{}", t.num, t.den))?;
            if e.terms.contains_key(&(t.a, t.m)) {
                return Err(RingError::ParseError(format!("duplicate term ({}, {})", t.a, t.m)));
            }
            e.add_term(t.a, t.m, c);
        }
        Ok(e)
    }
}

impl Serialize for EtaExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EtaExprJson::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for EtaExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = EtaExprJson::deserialize(d)?;
        EtaExpr::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> EtaExpr {
        EtaExpr::from_poly(&c.iter().map(|&x| int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn square_of_lambda() {
        assert_eq!(&EtaExpr::lambda() * &EtaExpr::lambda(), poly(&[1, -2, 1]));
    }

    #[test]
    fn log_exponents_add() {
        let x = EtaExpr::monomial(2, 1, int(1));
        let y = EtaExpr::monomial(3, 0, int(1));
        assert_eq!(&x * &y, EtaExpr::monomial(5, 1, int(1)));
    }

    #[test]
    fn eval_points() {
        assert_eq!(EtaExpr::lambda().eval_exact(&int(1)).unwrap(), int(0));
        assert_eq!(EtaExpr::monomial(2, 0, int(1)).eval_exact(&rat(1, 2)).unwrap(), rat(1, 4));
        let d3 = -(EtaExpr::lambda()
            * EtaExpr::from_poly(&[int(1), int(-2), rat(-1, 2)]));
        assert_eq!(d3.limit_at_zero().unwrap(), int(-1));
        assert!(EtaExpr::log_eta().eval_exact(&rat(1, 2)).is_err());
        assert_eq!(EtaExpr::log_eta().eval_exact(&int(1)).unwrap(), int(0));
        assert!(EtaExpr::eta().eval_exact(&int(0)).is_err());
        assert!(EtaExpr::eta().eval_f64(1.5).is_err());
    }

    #[test]
    fn kernel_of_minus_one() {
        let g = EtaExpr::constant(int(-1));
        assert_eq!(g.kernel_integrate(1), poly(&[-1, 1]));
    }

    #[test]
    fn kernel_produces_log_on_resonance() {
        // N_1 = 1, so g = η gives ∫ u^{-1} du
        let out = EtaExpr::eta().kernel_integrate(1);
        assert_eq!(out, EtaExpr::monomial(1, 1, int(-1)));
        assert_eq!(out.d_dt(), &out.scale(&int(-1)) + &EtaExpr::eta());
    }

    #[test]
    fn division_by_lambda_powers() {
        let p = &EtaExpr::one_minus_eta_pow(3) * &poly(&[2, 0, 5]);
        assert_eq!(p.div_one_minus_eta_pow(3).unwrap(), poly(&[2, 0, 5]));
        assert_eq!(poly(&[1, 1]).div_one_minus_eta_pow(1), Err(RingError::NotDivisible(1)));
    }

    #[test]
    fn json_round_trip() {
        let e = EtaExpr::from_terms([(0, 0, rat(-3, 2)), (2, 1, rat(7, 5)), (-1, 0, int(4))]);
        let s = e.to_json();
        assert!(s.starts_with("{\"terms\":[{\"a\":-1,\"m\":0,\"num\":\"4\",\"den\":\"1\"}"));
        assert_eq!(EtaExpr::from_json(&s).unwrap(), e);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse_rat("7").unwrap(), int(7));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
