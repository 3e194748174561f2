//! Dilation sums sum_{n>=1} f(n^lambda t), plain and fused with H_lambda.

use crate::error::{Result, ZError};
use crate::funcspace::{AnalyticFunction, Decay};
use crate::jet::Jet;
use crate::quad::{find_window, gk_adaptive, Tol};
use crate::{c, C64};

const M: usize = 30;
const DIRECT_MAX: f64 = 20000.0;
const BERNOULLI: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
const EM_TERMS: usize = 5;

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, b| a * b as f64)
}

/// Signed Stirling numbers of the first kind s(j, i), j <= 9.
fn stirling1() -> [[f64; 10]; 10] {
    let mut s = [[0.0; 10]; 10];
    s[0][0] = 1.0;
    for j in 0..9 {
        for i in 0..=j + 1 {
            let prev = if i > 0 { s[j][i - 1] } else { 0.0 };
            s[j + 1][i] = prev - j as f64 * s[j][i];
        }
    }
    s
}

/// Jet of D^i f given a longer jet of f.
fn d_pow(j: &Jet, i: usize, n: usize) -> Jet {
    let mut out = Jet::zeros(n);
    for k in 0..n {
        if k + i < j.len() {
            out.0[k] = j.0[k + i] * (factorial(k + i) / factorial(k));
        }
    }
    out
}

/// H_lambda on a jet: c_k + lambda (k+1) c_{k+1}, one shorter.
fn h_jet(j: &Jet, lambda: f64) -> Jet {
    let n = j.len() - 1;
    Jet((0..n).map(|k| j.0[k] + j.0[k + 1] * (lambda * (k + 1) as f64)).collect())
}

/// Build Z^lambda f, or H_lambda Z^lambda f when `fused`.
pub fn zeta_fn(f: &AnalyticFunction, lambda: f64, fused: bool) -> Result<AnalyticFunction> {
    if !(lambda > 0.0) {
        return Err(ZError::Domain(format!("Z^lambda needs lambda > 0, got {}", lambda)));
    }
    let b = f.support().1;
    let s_inf = f.decay_at_inf.exponent();
    if !b.is_finite() && !(s_inf * lambda > 1.0) {
        return Err(ZError::Truncation(format!(
            "Z^{} on {}: tail bound needs decay t^-s at infinity with {}*s > 1, certificate gives s = {}",
            lambda,
            f.name(),
            lambda,
            s_inf
        )));
    }
    let d0 = if fused { f.decay_at_0 } else { f.decay_at_0.min(Decay::Power(-1.0 / lambda)) };
    let g = f.clone();
    let name = if fused { format!("HZ[{}]({})", lambda, f.name()) } else { format!("Z[{}]({})", lambda, f.name()) };
    let st = stirling1();
    let h = AnalyticFunction::from_jet_fn(
        &name,
        move |x, n| zeta_jet(&g, lambda, fused, x, n, &st),
        d0,
        f.decay_at_inf,
    );
    // the sum reaches below the support of f, so only the upper end survives
    Ok(h.with_support(0.0, b))
}

fn term(g: &AnalyticFunction, lambda: f64, fused: bool, x: f64, k: f64, n: usize) -> Result<Jet> {
    let y = x + lambda * k.ln();
    if fused {
        Ok(h_jet(&g.log_jet(y, n + 1)?, lambda))
    } else {
        g.log_jet(y, n)
    }
}

fn zeta_jet(g: &AnalyticFunction, lambda: f64, fused: bool, x: f64, n: usize, st: &[[f64; 10]; 10]) -> Result<Jet> {
    let t = x.exp();
    let (a, b) = g.support();
    if a > 0.0 && b.is_finite() {
        let lo = (a / t).powf(1.0 / lambda).ceil().max(1.0);
        let hi = (b / t).powf(1.0 / lambda).floor();
        if hi < lo {
            return Ok(Jet::zeros(n));
        }
        if hi - lo + 1.0 <= DIRECT_MAX {
            let mut s = Jet::zeros(n);
            let mut k = lo;
            while k <= hi {
                s = &s + &term(g, lambda, fused, x, k, n)?;
                k += 1.0;
            }
            return Ok(s);
        }
        if fused {
            // H_lambda annihilates the t^{-1/lambda} profile of the integral
            return Ok(Jet::zeros(n));
        }
        // sum ~ integral; all Euler-Maclaurin corrections vanish for smooth compact support
        let (la, lb) = (a.ln(), b.ln());
        let mut integrand = |u: f64, out: &mut [C64]| -> Result<()> {
            out[0] = g.eval_log(u)? * (u / lambda).exp();
            Ok(())
        };
        let (v, _) = gk_adaptive(&mut integrand, la, lb, 1, Tol::new(1e-300, 1e-14))?;
        let pref = Jet::var(x, n).scale(c(-1.0 / lambda, 0.0)).exp();
        return Ok(pref.scale(v[0] / lambda));
    }

    let can_stop = g.decay_at_inf == Decay::Rapid || b.is_finite();
    let mut s = Jet::zeros(n);
    let mut small = 0;
    for k in 1..M {
        let tk = term(g, lambda, fused, x, k as f64, n)?;
        let tm = tk.max_abs();
        s = &s + &tk;
        if can_stop && (k as f64).powf(lambda) * t > 1.0 && tm <= 1e-18 * s.max_abs() {
            small += 1;
            if small >= 2 {
                return Ok(s);
            }
        } else {
            small = 0;
        }
    }
    // Euler-Maclaurin from M on
    let mf = M as f64;
    let ym = x + lambda * mf.ln();
    let len = n + 2 * EM_TERMS;
    let base = if fused { h_jet(&g.log_jet(ym, len + 1)?, lambda) } else { g.log_jet(ym, len)? };
    s = &s + &base.clone().truncate(n).scale(c(0.5, 0.0));
    for k in 1..=EM_TERMS {
        let j = 2 * k - 1;
        let mut dj = Jet::zeros(n);
        for i in 1..=j {
            if st[j][i] != 0.0 {
                dj = &dj + &d_pow(&base, i, n).scale(c(st[j][i] * lambda.powi(i as i32), 0.0));
            }
        }
        let coef = BERNOULLI[k - 1] / factorial(2 * k) * mf.powi(-(j as i32));
        s = &s - &dj.scale(c(coef, 0.0));
    }
    if fused {
        // integral of (y G)' from M to infinity
        let gm = g.log_jet(ym, n)?;
        s = &s - &gm.scale(c(mf, 0.0));
    } else {
        let rate = if g.decay_at_inf == Decay::Rapid || b.is_finite() { None } else { Some(lambda * g.decay_at_inf.exponent() - 1.0) };
        let v0 = mf.ln();
        let hi_hint = if b.is_finite() { ((b.ln() - x) / lambda).max(v0) } else { f64::INFINITY };
        let (_, hi) = find_window(|v| Ok(g.eval_log(x + lambda * v)?.norm() * v.exp()), (v0, hi_hint), None, rate, 1e-18)?;
        if hi > v0 {
            let mut integrand = |v: f64, out: &mut [C64]| -> Result<()> {
                let j = g.log_jet(x + lambda * v, n)?;
                let e = v.exp();
                for k in 0..n {
                    out[k] = j.0[k] * e;
                }
                Ok(())
            };
            let (v, _) = gk_adaptive(&mut integrand, v0, hi, n, Tol::new(1e-300, 1e-14))?;
            s = &s + &Jet(v);
        }
    }
    Ok(s)
}
