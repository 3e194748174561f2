//! Test functions on the positive half line and log-coordinate grids.

use crate::error::{Result, ZError};
use crate::jet::Jet;
use crate::{c, Sign, C64};
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Decay certificate at one end of the half line.
///
/// At 0, `Power(s)` means |f(t)| <= C t^s; at infinity it means |f(t)| <= C t^{-s}.
/// Negative exponents describe growth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    Rapid,
    Power(f64),
    None,
}

impl Decay {
    pub fn exponent(self) -> f64 {
        match self {
            Decay::Rapid => f64::INFINITY,
            Decay::Power(s) => s,
            Decay::None => f64::NEG_INFINITY,
        }
    }

    pub fn from_exponent(e: f64) -> Decay {
        if e == f64::INFINITY {
            Decay::Rapid
        } else if e == f64::NEG_INFINITY || e.is_nan() {
            Decay::None
        } else {
            Decay::Power(e)
        }
    }

    pub fn min(self, o: Decay) -> Decay {
        Decay::from_exponent(self.exponent().min(o.exponent()))
    }

    pub fn shift(self, d: f64) -> Decay {
        Decay::from_exponent(self.exponent() + d)
    }

    pub fn scale(self, k: f64) -> Decay {
        match self {
            Decay::Rapid => Decay::Rapid,
            Decay::None => Decay::None,
            Decay::Power(s) => Decay::Power(s * k),
        }
    }
}

/// Taylor data of f(e^x) in x. Implementations return jets of the requested
/// length, or fail with a capability error when they cannot.
pub trait LogRule: Send + Sync {
    fn jet(&self, x: f64, n: usize) -> Result<Jet>;

    /// Longest jet the rule produces without finite differences.
    fn max_len(&self) -> usize {
        usize::MAX
    }
}

struct ClosureRule<F> {
    f: F,
}

impl<F: Fn(f64) -> C64 + Send + Sync> LogRule for ClosureRule<F> {
    fn jet(&self, x: f64, _n: usize) -> Result<Jet> {
        Ok(Jet(vec![(self.f)(x.exp())]))
    }
    fn max_len(&self) -> usize {
        1
    }
}

struct ClosureDerivRule<F, G> {
    f: F,
    df: G,
}

impl<F, G> LogRule for ClosureDerivRule<F, G>
where
    F: Fn(f64) -> C64 + Send + Sync,
    G: Fn(f64) -> C64 + Send + Sync,
{
    fn jet(&self, x: f64, n: usize) -> Result<Jet> {
        let t = x.exp();
        let mut v = vec![(self.f)(t)];
        if n > 1 {
            v.push((self.df)(t) * t);
        }
        Ok(Jet(v))
    }
    fn max_len(&self) -> usize {
        2
    }
}

/// Rule given directly as a jet builder in the log coordinate.
pub struct JetFn<F>(pub F);

impl<F: Fn(f64, usize) -> Result<Jet> + Send + Sync> LogRule for JetFn<F> {
    fn jet(&self, x: f64, n: usize) -> Result<Jet> {
        (self.0)(x, n)
    }
}

/// A test function on (0, inf) with decay certificates and an optional
/// support interval [a, b] (a may be 0, b may be infinite).
#[derive(Clone)]
pub struct AnalyticFunction {
    name: Arc<str>,
    rule: Arc<dyn LogRule>,
    pub decay_at_0: Decay,
    pub decay_at_inf: Decay,
    support: (f64, f64),
    window: Arc<OnceLock<Option<(f64, f64)>>>,
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticFunction({})", self.name)
    }
}

const FD_H: f64 = 1e-4;

impl AnalyticFunction {
    pub fn from_rule(name: &str, rule: Arc<dyn LogRule>, decay_at_0: Decay, decay_at_inf: Decay) -> Self {
        AnalyticFunction {
            name: name.into(),
            rule,
            decay_at_0,
            decay_at_inf,
            support: (0.0, f64::INFINITY),
            window: Arc::new(OnceLock::new()),
        }
    }

    pub fn from_jet_fn<F>(name: &str, f: F, decay_at_0: Decay, decay_at_inf: Decay) -> Self
    where
        F: Fn(f64, usize) -> Result<Jet> + Send + Sync + 'static,
    {
        Self::from_rule(name, Arc::new(JetFn(f)), decay_at_0, decay_at_inf)
    }

    /// Leaf from a plain evaluation closure. Derivatives fall back to finite
    /// differences in the log coordinate. Rapid decay claims are spot-checked.
    pub fn new<F>(name: &str, f: F, decay_at_0: Decay, decay_at_inf: Decay) -> Result<Self>
    where
        F: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        let g = Self::from_rule(name, Arc::new(ClosureRule { f }), decay_at_0, decay_at_inf);
        g.check_decay()?;
        Ok(g)
    }

    /// Leaf with an exact t-derivative.
    pub fn with_derivative<F, G>(name: &str, f: F, df: G, decay_at_0: Decay, decay_at_inf: Decay) -> Result<Self>
    where
        F: Fn(f64) -> C64 + Send + Sync + 'static,
        G: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        let g = Self::from_rule(name, Arc::new(ClosureDerivRule { f, df }), decay_at_0, decay_at_inf);
        g.check_decay()?;
        Ok(g)
    }

    pub fn with_support(mut self, a: f64, b: f64) -> Self {
        self.support = (a.max(0.0), b);
        self.window = Arc::new(OnceLock::new());
        self
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn log_support(&self) -> (f64, f64) {
        let (a, b) = self.support;
        let lo = if a > 0.0 { a.ln() } else { f64::NEG_INFINITY };
        let hi = if b.is_finite() { b.ln() } else { f64::INFINITY };
        (lo, hi)
    }

    pub fn has_exact_derivative(&self) -> bool {
        self.rule.max_len() >= 2
    }

    /// Mellin strip (lo, hi) on which the certificates guarantee convergence.
    pub fn mellin_strip(&self) -> (f64, f64) {
        let (lo, hi) = self.log_support();
        let a = if lo.is_finite() { f64::NEG_INFINITY } else { -self.decay_at_0.exponent() };
        let b = if hi.is_finite() { f64::INFINITY } else { self.decay_at_inf.exponent() };
        (a, b)
    }

    /// Jet of f(e^{x+e}) of length n.
    pub fn log_jet(&self, x: f64, n: usize) -> Result<Jet> {
        let (lo, hi) = self.log_support();
        if x < lo || x > hi {
            return Ok(Jet::zeros(n));
        }
        let m = self.rule.max_len();
        if n <= m {
            let j = self.rule.jet(x, n)?;
            return Ok(j.truncate(n));
        }
        if n > 3 {
            return Err(ZError::Capability(format!(
                "{} needs {} log derivatives but has no exact derivative rule",
                self.name,
                n - 1
            )));
        }
        // fourth-order central differences in x
        let h = FD_H;
        let mut v = self.rule.jet(x, m)?.0;
        let val = |d: f64| -> Result<Jet> { self.rule.jet(x + d, m) };
        let p1 = val(h)?;
        let m1 = val(-h)?;
        let p2 = val(2.0 * h)?;
        let m2 = val(-2.0 * h)?;
        if m == 1 {
            let d1 = (-p2.0[0] + p1.0[0] * 8.0 - m1.0[0] * 8.0 + m2.0[0]) / (12.0 * h);
            v.push(d1);
            if n == 3 {
                let d2 = (-p2.0[0] + p1.0[0] * 16.0 - v[0] * 30.0 + m1.0[0] * 16.0 - m2.0[0]) / (12.0 * h * h);
                v.push(d2 * 0.5);
            }
        } else {
            let d2 = (-p2.0[1] + p1.0[1] * 8.0 - m1.0[1] * 8.0 + m2.0[1]) / (12.0 * h);
            v.push(d2 * 0.5);
        }
        Ok(Jet(v))
    }

    pub fn eval(&self, t: f64) -> Result<C64> {
        if !(t > 0.0) {
            return Err(ZError::Domain(format!("{} evaluated at t = {}", self.name, t)));
        }
        let (a, b) = self.support;
        if t < a || t > b {
            return Ok(c(0.0, 0.0));
        }
        Ok(self.rule.jet(t.ln(), 1)?.0[0])
    }

    /// Value at e^x.
    pub fn eval_log(&self, x: f64) -> Result<C64> {
        Ok(self.log_jet(x, 1)?.0[0])
    }

    /// Exact t-derivative f'(t) when available, finite differences otherwise.
    pub fn deriv(&self, t: f64) -> Result<C64> {
        if !(t > 0.0) {
            return Err(ZError::Domain(format!("{} differentiated at t = {}", self.name, t)));
        }
        Ok(self.log_jet(t.ln(), 2)?.0[1] / t)
    }

    /// Spot check of rapid decay claims: |f(t)| t^{+-k} must not grow
    /// between t = 10^2 and 10^3 (resp. 10^-2 and 10^-3) for k <= 8.
    pub fn check_decay(&self) -> Result<()> {
        let probe = |t: f64| -> Result<f64> {
            let v = self.eval(t)?.norm();
            if v.is_nan() {
                return Err(ZError::Sampling { index: 0, x: t.ln(), reason: format!("{} is NaN", self.name) });
            }
            Ok(v)
        };
        if self.decay_at_inf == Decay::Rapid {
            let (a, b) = (probe(1e2)?, probe(1e3)?);
            for k in 0..=8 {
                let (u, v) = (a * 1e2f64.powi(k), b * 1e3f64.powi(k));
                if v > u * (1.0 + 1e-12) && v > 1e-300 {
                    return Err(ZError::Hypothesis(format!("{}: rapid decay at infinity fails for k = {}", self.name, k)));
                }
            }
        }
        if self.decay_at_0 == Decay::Rapid {
            let (a, b) = (probe(1e-2)?, probe(1e-3)?);
            for k in 0..=8 {
                let (u, v) = (a * 1e2f64.powi(k), b * 1e3f64.powi(k));
                if v > u * (1.0 + 1e-12) && v > 1e-300 {
                    return Err(ZError::Hypothesis(format!("{}: rapid decay at 0 fails for k = {}", self.name, k)));
                }
            }
        }
        Ok(())
    }

    /// Log-coordinate interval outside of which |f| < 1e-18 * peak, for
    /// functions that decay rapidly (or vanish) at both ends.
    pub fn rapid_window(&self) -> Option<(f64, f64)> {
        *self.window.get_or_init(|| {
            let (lo, hi) = self.log_support();
            let ok0 = lo.is_finite() || self.decay_at_0 == Decay::Rapid;
            let ok1 = hi.is_finite() || self.decay_at_inf == Decay::Rapid;
            if !(ok0 && ok1) {
                return None;
            }
            crate::quad::find_window(|x| Ok(self.eval_log(x)?.norm()), (lo, hi), None, None, 1e-18).ok()
        })
    }

    pub fn scale(&self, k: C64) -> AnalyticFunction {
        let f = self.clone();
        let mut g = Self::from_jet_fn(&format!("{}*{}", fmt_c(k), self.name), move |x, n| Ok(f.log_jet(x, n)?.scale(k)), self.decay_at_0, self.decay_at_inf);
        g.support = self.support;
        g
    }

    pub fn conj(&self) -> AnalyticFunction {
        let f = self.clone();
        let mut g = Self::from_jet_fn(&format!("conj({})", self.name), move |x, n| Ok(f.log_jet(x, n)?.conj()), self.decay_at_0, self.decay_at_inf);
        g.support = self.support;
        g
    }

    pub fn add(&self, o: &AnalyticFunction) -> AnalyticFunction {
        let (f, g) = (self.clone(), o.clone());
        let mut h = Self::from_jet_fn(
            &format!("({}+{})", self.name, o.name),
            move |x, n| Ok(&f.log_jet(x, n)? + &g.log_jet(x, n)?),
            self.decay_at_0.min(o.decay_at_0),
            self.decay_at_inf.min(o.decay_at_inf),
        );
        h.support = (self.support.0.min(o.support.0), self.support.1.max(o.support.1));
        h
    }

    pub fn sub(&self, o: &AnalyticFunction) -> AnalyticFunction {
        self.add(&o.scale(c(-1.0, 0.0)))
    }

    pub fn mul(&self, o: &AnalyticFunction) -> AnalyticFunction {
        let (f, g) = (self.clone(), o.clone());
        let mut h = Self::from_jet_fn(
            &format!("{}*{}", self.name, o.name),
            move |x, n| Ok(&f.log_jet(x, n)? * &g.log_jet(x, n)?),
            Decay::from_exponent(self.decay_at_0.exponent() + o.decay_at_0.exponent()),
            Decay::from_exponent(self.decay_at_inf.exponent() + o.decay_at_inf.exponent()),
        );
        h.support = (self.support.0.max(o.support.0), self.support.1.min(o.support.1));
        h
    }
}

pub(crate) fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("({}{:+}i)", z.re, z.im)
    }
}

/// (tau^mu_hbar f)(t) = t^{mu(1+hbar)} f(t^mu).
pub fn tau_fn(f: &AnalyticFunction, hbar: f64, mu: f64) -> AnalyticFunction {
    let g = f.clone();
    let w = mu * (1.0 + hbar);
    let (d0, d1) = tau_decay(f.decay_at_0, f.decay_at_inf, hbar, mu);
    let mut h = AnalyticFunction::from_jet_fn(
        &format!("tau[{},{}]({})", hbar, mu, f.name()),
        move |x, n| {
            let inner = g.log_jet(mu * x, n)?.chain_linear(mu);
            let e = (Jet::var(x, n) * w).exp();
            Ok(&inner * &e)
        },
        d0,
        d1,
    );
    let (a, b) = f.support();
    let (lo, hi) = if mu > 0.0 { (a.powf(1.0 / mu), b.powf(1.0 / mu)) } else { (b.powf(1.0 / mu), a.powf(1.0 / mu)) };
    h.support = (lo, hi);
    h
}

pub fn tau_decay(d0: Decay, dinf: Decay, hbar: f64, mu: f64) -> (Decay, Decay) {
    let w = 1.0 + hbar;
    let s0 = d0.exponent();
    let s1 = dinf.exponent();
    let m = mu.abs();
    if mu < 0.0 {
        (Decay::from_exponent(m * (s1 - w)), Decay::from_exponent(m * (w + s0)))
    } else {
        (Decay::from_exponent(m * (w + s0)), Decay::from_exponent(m * (s1 - w)))
    }
}

/// phi^{+-}_f(t) = (f(t) +- f(1/t))/2.
pub fn project_phi(f: &AnalyticFunction, sign: Sign) -> AnalyticFunction {
    let g = f.clone();
    let s = sign.value();
    let d = f.decay_at_0.min(f.decay_at_inf);
    let mut h = AnalyticFunction::from_jet_fn(
        &format!("phi{}({})", if s > 0.0 { "+" } else { "-" }, f.name()),
        move |x, n| {
            let a = g.log_jet(x, n)?;
            let b = g.log_jet(-x, n)?.chain_linear(-1.0);
            Ok((&a + &b.scale(c(s, 0.0))).scale(c(0.5, 0.0)))
        },
        d,
        d,
    );
    let (a, b) = f.support();
    h.support = (a.min(1.0 / b), b.max(if a > 0.0 { 1.0 / a } else { f64::INFINITY }));
    h
}

/// f^{+-} = (f +- tau_hbar f)/2.
pub fn project_tau(f: &AnalyticFunction, hbar: f64, sign: Sign) -> AnalyticFunction {
    let t = tau_fn(f, hbar, -1.0);
    let s = sign.value();
    f.add(&t.scale(c(s, 0.0))).scale(c(0.5, 0.0)).renamed(&format!("{}^{}", f.name(), if s > 0.0 { "+" } else { "-" }))
}

// ---------------------------------------------------------------- builtins

/// e^{-c t^p}
pub fn exp_power(c0: f64, p: f64) -> AnalyticFunction {
    let name = if c0 == 1.0 && p == 1.0 {
        "exp_neg_t".to_string()
    } else if c0 == 1.0 && p == 2.0 {
        "gaussian".to_string()
    } else {
        format!("exp(-{}t^{})", c0, p)
    };
    AnalyticFunction::from_jet_fn(
        &name,
        move |x, n| Ok((Jet::var(x, n) * p).exp().scale(c(-c0, 0.0)).exp()),
        Decay::Power(0.0),
        Decay::Rapid,
    )
}

pub fn exp_neg_t() -> AnalyticFunction {
    exp_power(1.0, 1.0)
}

pub fn gaussian() -> AnalyticFunction {
    exp_power(1.0, 2.0)
}

/// t^s e^{-rho ln^2 t}
pub fn power_log_gaussian(rho: f64, s: C64) -> AnalyticFunction {
    let name = if s == c(0.0, 0.0) {
        if rho == 1.0 {
            "log_gaussian".to_string()
        } else {
            format!("exp(-{}ln^2t)", rho)
        }
    } else {
        format!("t^{}exp(-{}ln^2t)", fmt_c(s), rho)
    };
    AnalyticFunction::from_jet_fn(
        &name,
        move |x, n| {
            let v = Jet::var(x, n);
            let q = &v * &v;
            Ok((v.scale(s) - q.scale(c(rho, 0.0))).exp())
        },
        Decay::Rapid,
        Decay::Rapid,
    )
}

pub fn log_gaussian(rho: f64) -> AnalyticFunction {
    power_log_gaussian(rho, c(0.0, 0.0))
}

/// Smooth bump exp(-1/(1-u^2)) with u = (2t-a-b)/(b-a), supported on [a, b].
pub fn bump(a: f64, b: f64) -> AnalyticFunction {
    assert!(0.0 < a && a < b);
    AnalyticFunction::from_jet_fn(
        &format!("bump[{},{}]", a, b),
        move |x, n| {
            let t = Jet::var(x, n).exp();
            let u = t.scale(c(2.0 / (b - a), 0.0)).add_const(c(-(a + b) / (b - a), 0.0));
            let q = (&u * &u).scale(c(-1.0, 0.0)).add_const(c(1.0, 0.0));
            if !(q.value().re > 1.0 / 700.0) {
                return Ok(Jet::zeros(n));
            }
            Ok(q.recip().scale(c(-1.0, 0.0)).exp())
        },
        Decay::Rapid,
        Decay::Rapid,
    )
    .with_support(a, b)
}

/// t^2 e^{-t}
pub fn t2_exp() -> AnalyticFunction {
    AnalyticFunction::from_jet_fn(
        "t2_exp",
        |x, n| {
            let v = Jet::var(x, n);
            Ok((v.scale(c(2.0, 0.0)) - v.exp()).exp())
        },
        Decay::Power(2.0),
        Decay::Rapid,
    )
}

/// t^s, no decay unless the exponent provides it.
pub fn power(s: C64) -> AnalyticFunction {
    AnalyticFunction::from_jet_fn(
        &format!("t^{}", fmt_c(s)),
        move |x, n| Ok(Jet::var(x, n).scale(s).exp()),
        Decay::Power(s.re),
        Decay::Power(-s.re),
    )
}

pub fn zero_fn() -> AnalyticFunction {
    AnalyticFunction::from_jet_fn("zero", |_x, n| Ok(Jet::zeros(n)), Decay::Rapid, Decay::Rapid)
}

pub fn constant(v: C64) -> AnalyticFunction {
    AnalyticFunction::from_jet_fn(&format!("const {}", fmt_c(v)), move |_x, n| Ok(Jet::constant(v, n)), Decay::Power(0.0), Decay::Power(0.0))
}

/// The fixed battery used for extensional operator comparisons.
pub fn battery() -> Vec<AnalyticFunction> {
    vec![exp_neg_t(), gaussian(), log_gaussian(1.0), bump(1.5, 3.0), t2_exp()]
}

pub fn battery_names() -> Vec<&'static str> {
    vec!["exp_neg_t", "gaussian", "log_gaussian", "bump", "t2_exp"]
}

pub fn battery_fn(name: &str) -> Option<AnalyticFunction> {
    battery_names().iter().position(|n| *n == name).map(|i| battery().swap_remove(i))
}

// ---------------------------------------------------------------- grids

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl LogGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min < 0.0 && 0.0 < x_max) {
            return Err(ZError::Shape(format!("grid must straddle 0, got [{}, {}]", x_min, x_max)));
        }
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(ZError::Shape(format!("n_points = {} is not a power of two", n_points)));
        }
        Ok(LogGrid { x_min, x_max, n_points })
    }

    pub fn symmetric(l: f64, n_points: usize) -> Result<Self> {
        Self::new(-l, l, n_points)
    }

    pub fn default_grid() -> Self {
        LogGrid { x_min: -12.0, x_max: 12.0, n_points: 4096 }
    }

    pub fn is_symmetric(&self) -> bool {
        self.x_min == -self.x_max
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_points - 1 {
            return self.x_max;
        }
        self.x_min + i as f64 * self.step()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct GridFunction {
    pub grid: LogGrid,
    pub values: Vec<C64>,
    pub window_error: f64,
}

impl GridFunction {
    pub fn new(grid: LogGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(ZError::Shape(format!("{} values for a grid of {} points", values.len(), grid.n_points)));
        }
        let window_error = values[0].norm().max(values[values.len() - 1].norm());
        Ok(GridFunction { grid, values, window_error })
    }

    /// Linear interpolation in the log coordinate.
    pub fn interpolate(&self, t: f64) -> C64 {
        let x = t.ln();
        let g = &self.grid;
        if !(x >= g.x_min && x <= g.x_max) {
            return c(0.0, 0.0);
        }
        let p = (x - g.x_min) / g.step();
        let i = (p.floor() as usize).min(g.n_points - 2);
        let w = p - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    pub fn max_abs_diff(&self, o: &GridFunction) -> f64 {
        self.values.iter().zip(&o.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(usize, C64) -> C64) -> GridFunction {
        let values: Vec<C64> = self.values.iter().enumerate().map(|(i, v)| f(i, *v)).collect();
        GridFunction::new(self.grid, values).unwrap()
    }
}

pub fn sample(f: &AnalyticFunction, grid: &LogGrid) -> Result<GridFunction> {
    let mut values = Vec::with_capacity(grid.n_points);
    for i in 0..grid.n_points {
        let x = grid.x(i);
        let v = f.eval_log(x).map_err(|e| ZError::Sampling { index: i, x, reason: e.to_string() })?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(ZError::Sampling { index: i, x, reason: format!("{} is not finite", f.name()) });
        }
        values.push(v);
    }
    GridFunction::new(*grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_vanishes_outside() {
        let b = bump(1.5, 3.0);
        assert_eq!(b.eval(1.0).unwrap(), c(0.0, 0.0));
        assert!(b.eval(2.25).unwrap().re > 0.3);
    }

    #[test]
    fn fd_fallback_matches_exact() {
        let f = AnalyticFunction::new("e", |t| c((-t).exp(), 0.0), Decay::Power(0.0), Decay::Rapid).unwrap();
        let d = f.deriv(0.7).unwrap();
        assert!((d.re + (-0.7f64).exp()).abs() < 1e-10);
    }
}
