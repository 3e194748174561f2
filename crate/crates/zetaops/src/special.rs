//! Theta series Psi, Theta and their images under H_alpha and Delta_alpha,
//! kept as exact polynomial-coefficient series sum_n P(pi n^2 t) e^{-pi n^2 t}.

use crate::error::{Result, ZError};
use crate::funcspace::{AnalyticFunction, Decay};
use crate::jet::Jet;
use crate::{c, Sign};
use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub const MAX_DELTA_POWER: usize = 8;
const PREC: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants"));
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Best rational for a float with small denominator (exact for dyadic and
/// simple decimal inputs).
pub fn rat_from_f64(x: f64) -> BigRational {
    for d in [1i64, 2, 3, 4, 5, 6, 8, 10, 12, 16, 100, 1000] {
        let n = (x * d as f64).round();
        if (n / d as f64 - x).abs() <= 1e-15 * x.abs().max(1.0) {
            return rat(n as i64, d);
        }
    }
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// f(t) = sum_{n>=1} P(pi n^2 t) e^{-pi n^2 t}.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPolySeries {
    pub poly: Vec<BigRational>,
}

impl ExpPolySeries {
    /// Psi itself: P = 1.
    pub fn psi() -> Self {
        ExpPolySeries { poly: vec![BigRational::one()] }
    }

    pub fn zero() -> Self {
        ExpPolySeries { poly: vec![] }
    }

    pub fn degree(&self) -> usize {
        self.poly.len().saturating_sub(1)
    }

    fn trimmed(mut self) -> Self {
        while self.poly.last().map_or(false, |p| p.is_zero()) {
            self.poly.pop();
        }
        self
    }

    /// t d/dt acting on P(y)e^{-y}: P -> yP' - yP.
    pub fn apply_d(&self) -> Self {
        let n = self.poly.len();
        let mut out = vec![BigRational::zero(); n + 1];
        for (i, p) in self.poly.iter().enumerate() {
            out[i] += p * BigInt::from(i);
            out[i + 1] -= p;
        }
        ExpPolySeries { poly: out }.trimmed()
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.poly.len().max(o.poly.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, p) in self.poly.iter().enumerate() {
            out[i] += p;
        }
        for (i, p) in o.poly.iter().enumerate() {
            out[i] += p;
        }
        ExpPolySeries { poly: out }.trimmed()
    }

    fn scale(&self, a: &BigRational) -> Self {
        ExpPolySeries { poly: self.poly.iter().map(|p| p * a).collect() }.trimmed()
    }

    /// P + alpha (yP' - yP).
    pub fn apply_h(&self, alpha: &BigRational) -> Self {
        self.add(&self.apply_d().scale(alpha))
    }

    /// n-fold Delta_alpha = 2 alpha D + alpha^2 D^2.
    pub fn apply_delta(&self, alpha: &BigRational, n: usize) -> Result<Self> {
        if n > MAX_DELTA_POWER {
            return Err(ZError::Capability(format!("Delta power {} exceeds the maximum {}", n, MAX_DELTA_POWER)));
        }
        let two = rat(2, 1);
        let mut s = self.clone();
        for _ in 0..n {
            let d1 = s.apply_d();
            let d2 = d1.apply_d();
            s = d1.scale(&(&two * alpha)).add(&d2.scale(&(alpha * alpha)));
        }
        Ok(s)
    }

    pub fn poly_f64(&self) -> Vec<f64> {
        self.poly.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect()
    }

    fn abs_sum(&self) -> f64 {
        self.poly.iter().map(|p| p.abs().to_f64().unwrap_or(f64::INFINITY)).sum()
    }

    /// Number of terms N so that the tail sum_{n>N} is below eps.
    pub fn terms_needed(&self, t: f64, eps: f64) -> Result<usize> {
        let s = self.abs_sum();
        if s == 0.0 {
            return Ok(0);
        }
        let d = self.degree() as f64;
        let mut n = 1usize;
        loop {
            let np = (n + 1) as f64;
            let y = PI * np * np * t;
            if y >= 2.0 * d + 2.0 {
                let q = (-PI * (2.0 * np + 1.0) * t).exp() * ((np + 1.0) / np).powf(2.0 * d);
                if q < 1.0 {
                    let bound = s * y.max(1.0).powf(d) * (-y).exp() / (1.0 - q);
                    if bound <= eps {
                        return Ok(n);
                    }
                }
            }
            n += 1;
            if n > 10_000_000 {
                return Err(ZError::Truncation(format!("theta series at t = {} needs more than 1e7 terms", t)));
            }
        }
    }

    /// Double precision evaluation with certified truncation.
    pub fn eval(&self, t: f64, eps: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(ZError::Domain(format!("series evaluated at t = {}", t)));
        }
        let p = self.poly_f64();
        let n = self.terms_needed(t, eps)?;
        let mut s = 0.0;
        for k in (1..=n).rev() {
            let y = PI * (k * k) as f64 * t;
            s += horner(&p, y) * (-y).exp();
        }
        Ok(s)
    }

    /// Evaluation in ~190-bit arithmetic, rounded to double at the end.
    /// Needed where the polynomial terms cancel to many digits.
    pub fn eval_precise(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(ZError::Domain(format!("series evaluated at t = {}", t)));
        }
        let n = self.terms_needed(t, 1e-40)?;
        CONSTS.with(|cc| {
            let mut cc = cc.borrow_mut();
            let coeffs: Vec<BigFloat> = self.poly.iter().map(|p| rat_to_bf(p, &mut cc)).collect();
            let pi = cc.pi(PREC, RM);
            let tb = BigFloat::from_f64(t, PREC);
            let pit = pi.mul(&tb, PREC, RM);
            let mut sum = BigFloat::from_f64(0.0, PREC);
            for k in 1..=n {
                let y = pit.mul(&BigFloat::from_u64((k * k) as u64, PREC), PREC, RM);
                let mut acc = BigFloat::from_f64(0.0, PREC);
                for cf in coeffs.iter().rev() {
                    acc = acc.mul(&y, PREC, RM).add(cf, PREC, RM);
                }
                let e = y.neg().exp(PREC, RM, &mut cc);
                sum = sum.add(&acc.mul(&e, PREC, RM), PREC, RM);
            }
            Ok(bf_to_f64(&sum))
        })
    }

    /// Log-coordinate jet of the series: c_k = (1/k!) (D^k P)-series at e^x.
    pub fn to_function(&self, name: &str, decay_at_0: Decay) -> AnalyticFunction {
        let mut polys = vec![self.clone()];
        for _ in 0..14 {
            let next = polys.last().unwrap().apply_d();
            polys.push(next);
        }
        let pf: Vec<Vec<f64>> = polys.iter().map(|p| p.poly_f64()).collect();
        let base = self.clone();
        AnalyticFunction::from_jet_fn(
            name,
            move |x, n| {
                if n > pf.len() {
                    return Err(ZError::Capability(format!("series jets limited to length {}", pf.len())));
                }
                let t = x.exp();
                let deg = base.degree() + n;
                let bound_poly = ExpPolySeries { poly: vec![BigRational::one(); deg + 1] };
                let nt = bound_poly.terms_needed(t, 1e-300)?.max(1);
                let mut out = vec![c(0.0, 0.0); n];
                let mut fact = 1.0;
                for k in 0..n {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    let mut s = 0.0;
                    for m in (1..=nt).rev() {
                        let y = PI * (m * m) as f64 * t;
                        s += horner(&pf[k], y) * (-y).exp();
                    }
                    out[k] = c(s / fact, 0.0);
                }
                Ok(Jet(out))
            },
            decay_at_0,
            Decay::Rapid,
        )
    }
}

fn horner(p: &[f64], y: f64) -> f64 {
    p.iter().rev().fold(0.0, |a, c| a * y + c)
}

fn rat_to_bf(r: &BigRational, cc: &mut Consts) -> BigFloat {
    let n = BigFloat::parse(&r.numer().to_string(), Radix::Dec, PREC, RM, cc);
    let d = BigFloat::parse(&r.denom().to_string(), Radix::Dec, PREC, RM, cc);
    n.div(&d, PREC, RM)
}

fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    format!("{}", x).parse::<f64>().unwrap_or(f64::NAN)
}

pub fn apply_h(series: &ExpPolySeries, alpha: &BigRational) -> ExpPolySeries {
    series.apply_h(alpha)
}

pub fn apply_delta(series: &ExpPolySeries, alpha: &BigRational, n: usize) -> Result<ExpPolySeries> {
    series.apply_delta(alpha, n)
}

/// Delta_4^n Psi.
pub fn psi_n(n: usize) -> Result<ExpPolySeries> {
    ExpPolySeries::psi().apply_delta(&rat(4, 1), n)
}

/// Psi(t) = sum_{n>=1} e^{-pi n^2 t}.
pub fn psi(t: f64, eps: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(ZError::Domain(format!("psi at t = {}", t)));
    }
    if t < 1e-2 {
        // Psi(t) = t^{-1/2}[Psi(1/t) + 1/2] - 1/2
        let r = t.sqrt();
        return Ok((psi(1.0 / t, eps * r)? + 0.5) / r - 0.5);
    }
    ExpPolySeries::psi().eval(t, eps)
}

pub fn theta(t: f64, eps: f64) -> Result<f64> {
    Ok(1.0 + 2.0 * psi(t, eps / 2.0)?)
}

fn psi_jet_direct(x: f64, n: usize) -> Jet {
    let t = Jet::var(x, n).exp();
    let t0 = x.exp();
    let mut sum = Jet::zeros(n);
    let mut k = 1usize;
    loop {
        let a = PI * (k * k) as f64;
        let term = t.scale(c(-a, 0.0)).exp();
        sum = &sum + &term;
        if a * t0 > 2.0 * n as f64 + 2.0 && term.max_abs() < 1e-19 * sum.max_abs() {
            break;
        }
        if a * t0 > 745.0 {
            break;
        }
        k += 1;
    }
    sum
}

/// Jet of Psi at e^x, using the functional equation for x < 0.
pub fn psi_jet(x: f64, n: usize) -> Jet {
    if x >= 0.0 {
        return psi_jet_direct(x, n);
    }
    let a = psi_jet_direct(-x, n).chain_linear(-1.0).add_const(c(0.5, 0.0));
    let e = Jet::var(x, n).scale(c(-0.5, 0.0)).exp();
    (&e * &a).add_const(c(-0.5, 0.0))
}

/// Psi as a test function (behaves like t^{-1/2}/... at 0, rapid at infinity).
pub fn psi_function() -> AnalyticFunction {
    AnalyticFunction::from_jet_fn("psi", |x, n| Ok(psi_jet(x, n)), Decay::Power(-0.5), Decay::Rapid)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IterWhich {
    PsiAt1,
    HPsiAt1,
}

fn binom(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, b| a * b as f64)
}

/// Closed forms of the iterated values at t = 1.
///
/// With P = (C a^m/2) 2^{2n-m} m!:
/// odd m: psi^+_n(1) = -P C(n, 2n-m), H psi^-_n(1) = P (C(n+1,2n-m+1) + C(n,2n-m+1));
/// even m: H psi^+_n(1) = -P (C(n+1,2n-m+1) + C(n,2n-m+1)), psi^-_n(1) = P C(n, 2n-m).
pub fn iteration_closed_form(n: usize, m: usize, alpha: f64, cc: f64, which: IterWhich, sign: Sign) -> Result<f64> {
    let (ni, mi) = (n as i64, m as i64);
    let pre = (cc * alpha.powi(m as i32) / 2.0) * 2f64.powi((2 * ni - mi) as i32) * factorial(m);
    let single = pre * binom(ni, 2 * ni - mi);
    let pair = pre * (binom(ni + 1, 2 * ni - mi + 1) + binom(ni, 2 * ni - mi + 1));
    // value at t = 1 of the recursions for psi_n and H psi_n; the minus
    // branch is not the negated plus branch once 2n - m + 1 >= 0
    match (m % 2 == 1, which, sign) {
        (true, IterWhich::PsiAt1, Sign::Plus) => Ok(-single),
        (true, IterWhich::HPsiAt1, Sign::Minus) => Ok(pair),
        (false, IterWhich::HPsiAt1, Sign::Plus) => Ok(-pair),
        (false, IterWhich::PsiAt1, Sign::Minus) => Ok(single),
        _ => Err(ZError::Capability(format!("no closed form for {:?} with sign {:?} at m = {}", which, sign, m))),
    }
}

/// A function satisfying
/// Psi(t) = +-(-1)^m t^{-2/a} Psi(1/t) + C ln^m(t) [t^{-2/a} -+ 1]/2,
/// built as seed-generated homogeneous part plus a power-log particular solution.
pub fn synthetic_funci1(m: usize, alpha: f64, cc: f64, sign: Sign, seed: &AnalyticFunction) -> AnalyticFunction {
    let sigma = sign.value() * if m % 2 == 0 { 1.0 } else { -1.0 };
    let (a, b) = match sign {
        Sign::Plus => (-cc / 4.0, cc / 4.0),
        Sign::Minus => (cc / 4.0, cc / 4.0),
    };
    let w = -2.0 / alpha;
    let g = seed.clone();
    AnalyticFunction::from_jet_fn(
        &format!("funci1[m={},{}]({})", m, if sign == Sign::Plus { "+" } else { "-" }, seed.name()),
        move |x, n| {
            let v = Jet::var(x, n);
            let ew = v.scale(c(w, 0.0)).exp();
            let refl = g.log_jet(-x, n)?.chain_linear(-1.0);
            let hom = &g.log_jet(x, n)? + &(&ew * &refl).scale(c(sigma, 0.0));
            let mut lm = Jet::constant(c(1.0, 0.0), n);
            for _ in 0..m {
                lm = &lm * &v;
            }
            let part = &lm.scale(c(a, 0.0)) + &(&ew * &lm).scale(c(b, 0.0));
            Ok(&hom + &part)
        },
        Decay::None,
        Decay::None,
    )
}

/// Finite combinations of power-log atoms t^s ln^k t with exact coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PowerLog {
    /// (exponent, log power) -> coefficient
    pub terms: BTreeMap<(BigRational, usize), BigRational>,
}

impl PowerLog {
    pub fn atom(s: BigRational, k: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((s, k), BigRational::one());
        PowerLog { terms }
    }

    /// H_a(t^s L^k) = (1 + a s) t^s L^k + a k t^s L^{k-1}.
    pub fn apply_h(&self, a: &BigRational) -> Self {
        let mut out: BTreeMap<(BigRational, usize), BigRational> = BTreeMap::new();
        for ((s, k), cf) in &self.terms {
            let f0 = cf * (BigRational::one() + a * s);
            *out.entry((s.clone(), *k)).or_insert_with(BigRational::zero) += f0;
            if *k > 0 {
                let f1 = cf * a * BigInt::from(*k);
                *out.entry((s.clone(), k - 1)).or_insert_with(BigRational::zero) += f1;
            }
        }
        out.retain(|_, v| !v.is_zero());
        PowerLog { terms: out }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let l = t.ln();
        self.terms
            .iter()
            .map(|((s, k), cf)| cf.to_f64().unwrap() * t.powf(s.to_f64().unwrap()) * l.powi(*k as i32))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h4_psi_poly() {
        let h = ExpPolySeries::psi().apply_h(&rat(4, 1));
        assert_eq!(h.poly, vec![rat(1, 1), rat(-4, 1)]);
        let d = ExpPolySeries::psi().apply_delta(&rat(4, 1), 1).unwrap();
        assert_eq!(d.poly, vec![rat(0, 1), rat(-24, 1), rat(16, 1)]);
    }

    #[test]
    fn precise_and_double_agree_for_psi() {
        let s = ExpPolySeries::psi();
        let a = s.eval(1.0, 1e-18).unwrap();
        let b = s.eval_precise(1.0).unwrap();
        assert!((a - b).abs() < 1e-16);
    }

    #[test]
    fn psi_jet_matches_functional_equation_branch() {
        let a = psi_jet(1e-9, 3);
        let b = psi_jet(-1e-9, 3);
        for k in 0..3 {
            assert!((a.0[k] - b.0[k]).norm() < 1e-8);
        }
    }
}
