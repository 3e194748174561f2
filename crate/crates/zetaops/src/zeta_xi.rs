//! Reference zeta and gamma, the completed function Xi through three
//! independent routes, heat-flow deformations, critical-line zeros,
//! argument-principle counting and Weil sums.

use crate::error::{Result, ZError};
use crate::funcspace::{sample, AnalyticFunction, Decay, GridFunction, LogGrid};
use crate::mellin::{discrete_mellin, fourier_even};
use crate::operators::zeta_fn;
use crate::quad::{gauss_legendre, gk_scalar, Tol};
use crate::special::{psi_jet, psi_n, MAX_DELTA_POWER};
use crate::{c, Sign, C64};
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

/// Largest |Im s| accepted by the reference zeta.
pub const ENVELOPE: f64 = 200.0;
const LN_3_SQRT8: f64 = 1.762_747_174_039_086;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn expm1_c(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        z * (1.0 + z / 2.0 * (1.0 + z / 3.0 * (1.0 + z / 4.0)))
    } else {
        z.exp() - 1.0
    }
}

/// Dirichlet eta by the Borwein alternating-series acceleration.
fn eta(s: C64) -> C64 {
    let t = s.im.abs();
    let n = (((PI * t / 2.0 + (1.0 + 2.0 * t).ln() + 37.0) / LN_3_SQRT8).ceil() as usize + 5).max(24);
    let nf = n as f64;
    let mut d = Vec::with_capacity(n + 1);
    let mut term = 1.0;
    let mut acc = 1.0;
    d.push(acc);
    for i in 0..n {
        let fi = i as f64;
        term *= 4.0 * (nf + fi) * (nf - fi) / ((2.0 * fi + 1.0) * (2.0 * fi + 2.0));
        acc += term;
        d.push(acc);
    }
    let dn = d[n];
    let mut sum = c(0.0, 0.0);
    for k in (0..n).rev() {
        let w = (d[k] - dn) / dn;
        let p = (-s * ((k + 1) as f64).ln()).exp();
        sum += if k % 2 == 0 { p * w } else { -p * w };
    }
    -sum
}

/// Riemann zeta for Re s > 0, |Im s| <= ENVELOPE.
pub fn zeta_ref(s: C64) -> Result<C64> {
    if s == c(1.0, 0.0) {
        return Err(ZError::Pole("1".into()));
    }
    if !(s.re > 0.0) {
        return Err(ZError::Domain(format!("zeta_ref needs Re s > 0, got s = {}", s)));
    }
    if !(s.im.abs() <= ENVELOPE) {
        return Err(ZError::Envelope(format!("|Im s| = {} exceeds {}", s.im.abs(), ENVELOPE)));
    }
    let denom = -expm1_c((1.0 - s) * LN_2);
    if denom.norm() < 0.05 && (s - 1.0).norm() > 0.1 {
        // next to a zero of 1 - 2^{1-s}: mean value over a small circle
        let r = 0.05;
        let m = 32;
        let mut acc = c(0.0, 0.0);
        for j in 0..m {
            let z = s + c(0.0, 2.0 * PI * j as f64 / m as f64).exp() * r;
            acc += eta(z) / -expm1_c((1.0 - z) * LN_2);
        }
        return Ok(acc / m as f64);
    }
    Ok(eta(s) / denom)
}

/// (1 - s) zeta(s), continued through s = 1.
pub fn one_minus_zeta(s: C64) -> Result<C64> {
    if (s - 1.0).norm() < 1e-12 {
        return Ok(c(-1.0, 0.0));
    }
    Ok((1.0 - s) * zeta_ref(s)?)
}

fn ln_sin_pi(z: C64) -> C64 {
    if z.im.abs() < 10.0 {
        return (z * PI).sin().ln();
    }
    let i = c(0.0, 1.0);
    if z.im > 0.0 {
        -i * PI * z + ((i * 2.0 * PI * z).exp() - 1.0).ln() - (2.0 * i).ln()
    } else {
        i * PI * z + (1.0 - (-i * 2.0 * PI * z).exp()).ln() - (2.0 * i).ln()
    }
}

fn is_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// ln Gamma by Lanczos (g = 7, 9 terms) with reflection for Re z < 1/2.
/// The branch of the imaginary part is not normalized.
pub fn ln_gamma_ref(z: C64) -> Result<C64> {
    if is_pole(z) {
        return Err(ZError::Pole(format!("{}", z)));
    }
    if z.re < 0.5 {
        return Ok(c(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_ref(1.0 - z)?);
    }
    let z = z - 1.0;
    let mut x = c(LANCZOS[0], 0.0);
    for (i, p) in LANCZOS.iter().enumerate().skip(1) {
        x += *p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln())
}

pub fn gamma_ref(s: C64) -> Result<C64> {
    Ok(ln_gamma_ref(s)?.exp())
}

/// Xi(s) = pi^{-s/2} Gamma(s/2) zeta(s).
pub fn xi_direct(s: C64) -> Result<C64> {
    let z = zeta_ref(s)?;
    Ok((ln_gamma_ref(s / 2.0)? - s / 2.0 * PI.ln()).exp() * z)
}

/// e^{pi t/4} Xi(1/2 + i t), real up to rounding.
pub fn xi_critical_scaled(t: f64) -> Result<f64> {
    let t = t.abs();
    let s = c(0.5, t);
    let l = ln_gamma_ref(s / 2.0)? - s / 2.0 * PI.ln() + PI * t / 4.0;
    Ok((l.exp() * zeta_ref(s)?).re)
}

// ------------------------------------------------------------ integral engines

const PANEL: f64 = 1.0 / 16.0;
const GL_NODES: usize = 16;
const X_END: f64 = 5.3;

struct Kernel {
    xs: Vec<f64>,
    /// weight * t^{1/4} (Delta_4^n Psi)(t)
    wk: Vec<f64>,
}

fn kernel(n: usize) -> Result<Arc<Kernel>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Kernel>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(k) = cache.lock().unwrap().get(&n) {
        return Ok(k.clone());
    }
    let series = psi_n(n)?;
    let (gx, gw) = gauss_legendre(GL_NODES);
    let panels = (X_END / PANEL).ceil() as usize;
    let mut nodes = Vec::with_capacity(panels * GL_NODES);
    for p in 0..panels {
        let a = p as f64 * PANEL;
        for j in 0..GL_NODES {
            nodes.push((a + PANEL * 0.5 * (gx[j] + 1.0), PANEL * 0.5 * gw[j]));
        }
    }
    let vals: Vec<Result<f64>> = nodes.par_iter().map(|&(x, _)| series.eval_precise(x.exp())).collect();
    let mut xs = Vec::with_capacity(nodes.len());
    let mut wk = Vec::with_capacity(nodes.len());
    for ((x, w), v) in nodes.into_iter().zip(vals) {
        xs.push(x);
        wk.push(w * (x / 4.0).exp() * v?);
    }
    let k = Arc::new(Kernel { xs, wk });
    cache.lock().unwrap().insert(n, k.clone());
    Ok(k)
}

/// 2 int_1^inf (dt/t) t^{1/4} (Delta_4^n Psi)(t) cosh(ln(t) s/4).
pub fn ibp_integral(s: C64, n: usize, eps: f64) -> Result<C64> {
    if n > MAX_DELTA_POWER {
        return Err(ZError::Capability(format!("Delta power {} exceeds {}", n, MAX_DELTA_POWER)));
    }
    let k = kernel(n)?;
    let grow = s.re.abs() / 4.0;
    let mut acc = c(0.0, 0.0);
    for (i, (&x, &w)) in k.xs.iter().zip(&k.wk).enumerate() {
        acc += (s * x / 4.0).cosh() * w;
        // panel boundary: stop once the rest is negligible
        if (i + 1) % GL_NODES == 0 && x > 2.5 && w.abs() * (grow * x).exp() * 1e3 < eps * 1e-3 {
            break;
        }
    }
    Ok(acc * 2.0)
}

fn check_pm1(s: C64) -> Result<()> {
    if (1.0 - s * s).norm() == 0.0 {
        return Err(ZError::Pole(format!("{} (argument of the integral form)", s)));
    }
    Ok(())
}

/// Xi((1+s)/2) = -4/(1-s^2) + 2 int_1^inf (dt/t) t^{1/4} Psi(t) cosh(ln(t) s/4).
pub fn xi_integral(s: C64, eps: f64) -> Result<C64> {
    check_pm1(s)?;
    Ok(-4.0 / (1.0 - s * s) + ibp_integral(s, 0, eps)?)
}

/// Integrated-by-parts form with n factors of Delta_4 on the kernel.
pub fn xi_ibp(s: C64, n: usize, eps: f64) -> Result<C64> {
    check_pm1(s)?;
    let q = -1.0 / (1.0 - s * s);
    let head = if n == 0 { -4.0 / (1.0 - s * s) } else { c(0.0, 0.0) };
    Ok(head + q.powi(n as i32) * ibp_integral(s, n, eps)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XiEngine {
    Direct,
    Integral,
    Ibp(usize),
}

/// Xi at the usual argument s' through any engine.
pub fn xi(s_prime: C64, engine: XiEngine, eps: f64) -> Result<C64> {
    let s = 2.0 * s_prime - 1.0;
    match engine {
        XiEngine::Direct => xi_direct(s_prime),
        XiEngine::Integral => xi_integral(s, eps),
        XiEngine::Ibp(n) => xi_ibp(s, n, eps),
    }
}

// ------------------------------------------------------------ general continuation

/// zeta(s) M[f](s/lambda) from the split integral with F(x) = f(|x|^lambda)
/// and its Fourier transform. f must be real valued.
pub fn continue_general(f: &AnalyticFunction, lambda: f64, s: C64, eps: f64) -> Result<C64> {
    if !(lambda > 0.0) {
        return Err(ZError::Domain(format!("lambda = {}", lambda)));
    }
    if s == c(0.0, 0.0) || s == c(1.0, 0.0) {
        return Err(ZError::Pole(format!("{}", s)));
    }
    if f.decay_at_inf != Decay::Rapid && !f.support().1.is_finite() {
        return Err(ZError::Hypothesis(format!("{} must decay rapidly at infinity", f.name())));
    }
    let f0 = if f.decay_at_0.exponent() > 0.0 || f.support().0 > 0.0 { 0.0 } else { f.eval_log(-700.0)?.re };
    let fh0 = fourier_even(f, lambda, 0.0, eps)?;
    let zf = zeta_fn(f, lambda, false)?;
    // sum_{n>=1} F^(n u), u = t^{1/lambda}, by Poisson summation through the
    // direct dilation sum; absolute rounding floor ~ 1e-16 (|F(0)| + |F^(0)|)
    let dual = |x: f64| -> Result<f64> {
        let u = (x / lambda).exp();
        Ok((f0 + 2.0 * zf.eval_log(-x)?.re) / (2.0 * u) - fh0 / 2.0)
    };
    let a = s / lambda;
    let b = (1.0 - s) / lambda;
    let scale = f0.abs() + fh0.abs() + zf.eval_log(0.0)?.norm();
    let floor = 1e-14 * scale.max(1e-300);
    let cutoff = |mag: &dyn Fn(f64) -> Result<f64>, thr: f64| -> Result<f64> {
        let mut x = 0.0;
        while x <= 80.0 {
            if mag(x)? <= thr && mag(x + 0.5)? <= thr {
                return Ok(x + 0.5);
            }
            x += 0.5;
        }
        Err(ZError::Truncation(format!("{} does not settle below {:e} by ln t = 80", f.name(), thr)))
    };
    let xz = cutoff(&|x| Ok(zf.eval_log(x)?.norm() * (a.re * x).exp()), 1e-18 * scale)?;
    let xd = cutoff(&|x| Ok(dual(x)?.abs()), floor)?;
    let cap = |abs: f64| Tol { max_intervals: 400, ..Tol::new(abs, 1e-13) };
    let (vz, _) = gk_scalar(|x| Ok((a * x).exp() * zf.eval_log(x)?), 0.0, xz, cap(eps * 0.05))?;
    // rounding in the dual term, carried through the growing weight
    let noise = 1e-16 * scale * if b.re.abs() < 1e-9 { xd } else { ((b.re * xd).exp() - 1.0) / b.re };
    let (vd, _) = gk_scalar(|x| Ok((b * x).exp() * dual(x)?), 0.0, xd, cap(eps * 0.05 + noise))?;
    Ok(-(lambda / 2.0) * (f0 / s + fh0 / (1.0 - s)) + vz + vd)
}

// ------------------------------------------------------------ heat flow

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeatVariant {
    Plain,
    Tilde,
}

/// M[K e^{-rho ln^2}](s/2) with K = Psi (plain) or H_4 Psi (tilde),
/// by the trapezoid rule in x = ln t (geometric convergence for this
/// analytic integrand).
pub fn heat_xi(rho: f64, s: C64, variant: HeatVariant, eps: f64) -> Result<C64> {
    if !(rho > 0.0) {
        return Err(ZError::Domain(format!("rho = {} must be positive", rho)));
    }
    let z = s / 2.0;
    let h = 0.04 / (1.0 + z.im.abs() / 20.0);
    let floor = (eps * 1e-6).max(1e-300);
    let node = |x: f64| -> C64 {
        let j = psi_jet(x, 2);
        let k = match variant {
            HeatVariant::Plain => j.0[0],
            HeatVariant::Tilde => j.0[0] + j.0[1] * 4.0,
        };
        k * (z * x - rho * x * x).exp()
    };
    let mut acc = node(0.0);
    for dir in [1.0, -1.0] {
        let mut k = 1usize;
        let mut quiet = 0;
        loop {
            let x = dir * k as f64 * h;
            let v = node(x);
            acc += v;
            if v.norm() < floor * acc.norm().max(1.0) && x.abs() > 2.0 {
                quiet += 1;
                if quiet >= 8 {
                    break;
                }
            } else {
                quiet = 0;
            }
            k += 1;
            if k > 2_000_000 {
                return Err(ZError::Truncation(format!("heat kernel window for rho = {} too wide", rho)));
            }
        }
    }
    Ok(acc * h)
}

/// sum_{l=0}^m (+-1)^l Xi_rho(s + l), alternating for the tilde variant.
pub fn heat_xi_m(rho: f64, m: usize, s: C64, variant: HeatVariant, eps: f64) -> Result<C64> {
    let mut acc = c(0.0, 0.0);
    for l in 0..=m {
        let sg = if variant == HeatVariant::Tilde && l % 2 == 1 { -1.0 } else { 1.0 };
        acc += heat_xi(rho, s + l as f64, variant, eps)? * sg;
    }
    Ok(acc)
}

/// Xi^m(s) - Xi^m(1-m-s), or the tilde combination with (-1)^m.
pub fn equisym_fn(rho: f64, m: usize, s: C64, variant: HeatVariant, eps: f64) -> Result<C64> {
    let r = c(1.0 - m as f64, 0.0) - s;
    let a = heat_xi_m(rho, m, s, variant, eps)?;
    let b = heat_xi_m(rho, m, r, variant, eps)?;
    Ok(match variant {
        HeatVariant::Plain => a - b,
        HeatVariant::Tilde => a + b * if m % 2 == 0 { 1.0 } else { -1.0 },
    })
}

/// Closed form of `equisym_fn` through the telescoped Omega terms.
pub fn equisym_closed(rho: f64, m: usize, s: C64, variant: HeatVariant) -> C64 {
    let pre = (PI / rho).sqrt() / 2.0;
    let a = ((s - 1.0) * (s - 1.0) / (16.0 * rho)).exp();
    let b = ((s + m as f64) * (s + m as f64) / (16.0 * rho)).exp();
    match variant {
        HeatVariant::Plain => (a - b) * pre,
        HeatVariant::Tilde => -(a + b * if m % 2 == 0 { 1.0 } else { -1.0 }) * pre,
    }
}

/// Predicted root k of the lattice.
pub fn equisym_lattice(m: usize, rho: f64, k: i64, variant: HeatVariant) -> C64 {
    let step = k as f64 / (1.0 + m as f64);
    let frac = match variant {
        HeatVariant::Plain => step,
        HeatVariant::Tilde => step - 0.5,
    };
    c((1.0 - m as f64) / 2.0, 16.0 * rho * PI * frac)
}

/// Omega^m(s) = (1/2) int_0^1 (dt/t)(t^{(s-1)/2} - t^{(s+m)/2}) e^{-rho ln^2 t}.
pub fn telescope_omega(m: usize, s: C64, rho: f64) -> Result<C64> {
    if m > 6 {
        return Err(ZError::Domain(format!("m = {} > 6", m)));
    }
    if !(rho > 0.0) {
        return Err(ZError::Domain(format!("rho = {} must be positive", rho)));
    }
    let p = (s - 1.0) / 2.0;
    let q = (s + m as f64) / 2.0;
    let a = p.re.abs().max(q.re.abs());
    let lo = -(a + (a * a + 4.0 * rho * 80.0).sqrt()) / (2.0 * rho);
    let (v, _) = gk_scalar(|x| Ok(((p * x).exp() - (q * x).exp()) * (-rho * x * x).exp()), lo, 0.0, Tol::new(1e-17, 1e-14))?;
    Ok(v / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquiRoot {
    pub k: i64,
    pub predicted: C64,
    pub located: C64,
    pub residual: f64,
}

/// Roots of the heat-flow symmetry defect near the predicted lattice,
/// k = 0..=k_max, refined by Newton's method.
pub fn equisym_roots(m: usize, rho: f64, k_max: usize, variant: HeatVariant) -> Result<Vec<EquiRoot>> {
    if !(1..=4).contains(&m) {
        return Err(ZError::Domain(format!("m = {} outside 1..=4", m)));
    }
    if k_max > 10 {
        return Err(ZError::Domain(format!("k_max = {} > 10", k_max)));
    }
    if !(rho > 0.0) {
        return Err(ZError::Domain(format!("rho = {} must be positive", rho)));
    }
    let eps = 1e-16;
    let spacing = 16.0 * rho * PI / (1.0 + m as f64);
    (0..=k_max as i64)
        .into_par_iter()
        .map(|k| {
            let pred = equisym_lattice(m, rho, k, variant);
            let f = |s: C64| equisym_fn(rho, m, s, variant, eps);
            let mut s = pred;
            let mut fs = f(s)?;
            let dh = 1e-4 * spacing.min(1.0);
            for _ in 0..60 {
                if fs.norm() == 0.0 {
                    break;
                }
                let d = (f(s + dh)? - f(s - dh)?) / (2.0 * dh);
                let step = fs / d;
                s -= step;
                fs = f(s)?;
                if step.norm() < 1e-13 * (1.0 + s.norm()) {
                    break;
                }
            }
            if (s - pred).norm() > spacing / 2.0 || !(fs.norm() <= 1e-9) {
                return Err(ZError::LatticeMismatch(format!(
                    "k = {}: predicted {}, Newton ended at {} with |F| = {:e}",
                    k,
                    pred,
                    s,
                    fs.norm()
                )));
            }
            Ok(EquiRoot { k, predicted: pred, located: s, residual: fs.norm() })
        })
        .collect()
}

// ------------------------------------------------------------ zeros

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroMethod {
    Computed,
    Loaded,
}

/// Ordinates t_k of zeros 1/2 + i t_k, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroList {
    pub ordinates: Vec<f64>,
    pub residuals: Vec<f64>,
    pub method: ZeroMethod,
}

impl ZeroList {
    pub fn empty() -> Self {
        ZeroList { ordinates: vec![], residuals: vec![], method: ZeroMethod::Loaded }
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// First n zeros.
    pub fn truncated(&self, n: usize) -> ZeroList {
        let n = n.min(self.len());
        ZeroList { ordinates: self.ordinates[..n].to_vec(), residuals: self.residuals[..n].to_vec(), method: self.method }
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        let io = |e: csv::Error| ZError::Io(e.to_string());
        w.write_record(["index", "ordinate", "residual"]).map_err(io)?;
        for (i, (t, r)) in self.ordinates.iter().zip(&self.residuals).enumerate() {
            w.write_record([i.to_string(), format!("{:?}", t), format!("{:?}", r)]).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| ZError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| ZError::Io(e.to_string()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let s = self.to_csv_string()?;
        let mut f = std::fs::File::create(path).map_err(|e| ZError::Io(format!("{}: {}", path.display(), e)))?;
        f.write_all(s.as_bytes()).map_err(|e| ZError::Io(e.to_string()))
    }

    pub fn from_csv_str(s: &str) -> Result<ZeroList> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(s.as_bytes());
        let hdr = r.headers().map_err(|e| ZError::Parse(e.to_string()))?.clone();
        if hdr.iter().collect::<Vec<_>>() != ["index", "ordinate", "residual"] {
            return Err(ZError::Parse(format!("expected header index,ordinate,residual, got {:?}", hdr)));
        }
        let mut out = ZeroList::empty();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| ZError::Parse(e.to_string()))?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| ZError::Parse(format!("row {}: bad field {}", line + 1, i)))
            };
            let t = num(1)?;
            if let Some(&last) = out.ordinates.last() {
                if !(t > last) {
                    return Err(ZError::Parse(format!("row {}: ordinates not strictly increasing", line + 1)));
                }
            }
            out.ordinates.push(t);
            out.residuals.push(num(2)?);
        }
        Ok(out)
    }

    pub fn read_csv(path: &Path) -> Result<ZeroList> {
        let s = std::fs::read_to_string(path).map_err(|e| ZError::Io(format!("{}: {}", path.display(), e)))?;
        if s.trim().is_empty() {
            return Ok(ZeroList::empty());
        }
        Self::from_csv_str(&s)
    }
}

const SCAN_STEP: f64 = 0.05;

/// Root of the scaled critical-line function in [a, b] by Illinois
/// regula falsi.
fn refine_zero(mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let mut side = 0;
    for _ in 0..200 {
        let m = (a * fb - b * fa) / (fb - fa);
        let m = if m > a && m < b { m } else { 0.5 * (a + b) };
        let fm = xi_critical_scaled(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
            if side == -1 {
                fb /= 2.0;
            }
            side = -1;
        } else {
            b = m;
            fb = fm;
            if side == 1 {
                fa /= 2.0;
            }
            side = 1;
        }
        if b - a < 4e-15 * b.abs().max(1.0) {
            break;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Sign changes of e^{pi t/4} Xi(1/2+it) on [0, t_max], refined.
pub fn find_critical_zeros(t_max: f64, tol: f64) -> Result<ZeroList> {
    if !(t_max >= 0.0) {
        return Err(ZError::Domain(format!("t_max = {}", t_max)));
    }
    if t_max > ENVELOPE {
        return Err(ZError::Envelope(format!("t_max = {} exceeds {}", t_max, ENVELOPE)));
    }
    let n = (t_max / SCAN_STEP).ceil() as usize;
    let ts: Vec<f64> = (0..=n).map(|j| (j as f64 * SCAN_STEP).min(t_max)).collect();
    let vals = ts.par_iter().map(|&t| xi_critical_scaled(t)).collect::<Result<Vec<f64>>>()?;
    let brackets: Vec<usize> = (0..n).filter(|&j| vals[j] != 0.0 && (vals[j] > 0.0) != (vals[j + 1] > 0.0)).collect();
    let roots = brackets
        .par_iter()
        .map(|&j| refine_zero(ts[j], vals[j], ts[j + 1], vals[j + 1]))
        .collect::<Result<Vec<f64>>>()?;
    let mut out = ZeroList { ordinates: vec![], residuals: vec![], method: ZeroMethod::Computed };
    for t in roots {
        let r = xi_direct(c(0.5, t))?.norm();
        if r > tol {
            return Err(ZError::Truncation(format!("zero near t = {} refined only to |Xi| = {:e}", t, r)));
        }
        if out.ordinates.last().map_or(true, |&l| t > l) {
            out.ordinates.push(t);
            out.residuals.push(r);
        }
    }
    Ok(out)
}

// ------------------------------------------------------------ argument principle

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

fn arg_step(
    f: &dyn Fn(C64) -> Result<C64>,
    z0: C64,
    f0: C64,
    z1: C64,
    f1: C64,
    depth: usize,
) -> Result<f64> {
    let d = (f1 / f0).arg();
    if d.abs() <= PI / 4.0 {
        return Ok(d);
    }
    if depth > 40 {
        return Err(ZError::Contour(format!("argument not resolved between {} and {}; perturb the box", z0, z1)));
    }
    let zm = (z0 + z1) / 2.0;
    let fm = f(zm)?;
    // |F| decays along the box, so "near a zero" is judged against the neighbours
    if !(fm.norm() > 1e-12 * f0.norm().max(f1.norm())) {
        return Err(ZError::Contour(format!("|F| = {:e} at {} on the contour; perturb the box", fm.norm(), zm)));
    }
    Ok(arg_step(f, z0, f0, zm, fm, depth + 1)? + arg_step(f, zm, fm, z1, f1, depth + 1)?)
}

/// Winding number of F around the boundary of the box.
pub fn count_zeros_rectangle(f: &dyn Fn(C64) -> Result<C64>, rect: Rect) -> Result<i64> {
    let corners = [c(rect.re.0, rect.im.0), c(rect.re.1, rect.im.0), c(rect.re.1, rect.im.1), c(rect.re.0, rect.im.1)];
    let per_edge = 64;
    let mut pts = Vec::with_capacity(4 * per_edge + 1);
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        for j in 0..per_edge {
            pts.push(a + (b - a) * (j as f64 / per_edge as f64));
        }
    }
    pts.push(corners[0]);
    let vals = pts.iter().map(|&z| f(z)).collect::<Result<Vec<C64>>>()?;
    let n = vals.len();
    for i in 0..n {
        let near = vals[(i + n - 2) % (n - 1)].norm().max(vals[(i + 1) % (n - 1)].norm());
        if !(vals[i].norm() > 1e-12 * near) || !vals[i].norm().is_finite() {
            return Err(ZError::Contour(format!("|F| = {:e} at {} on the contour; perturb the box", vals[i].norm(), pts[i])));
        }
    }
    let mut total = 0.0;
    for i in 0..pts.len() - 1 {
        total += arg_step(f, pts[i], vals[i], pts[i + 1], vals[i + 1], 0)?;
    }
    let w = total / (2.0 * PI);
    if (w - w.round()).abs() > 0.05 {
        return Err(ZError::Contour(format!("winding {} is not an integer", w)));
    }
    Ok(w.round() as i64)
}

/// (1-w)zeta(w) at w = c + s plus/minus the same at w = c - s, c = (1+hbar)lambda/2.
pub fn hplus_combination(lambda: f64, hbar: f64, sign: Sign, s: C64) -> Result<C64> {
    let cc = (1.0 + hbar) * lambda / 2.0;
    Ok(one_minus_zeta(s + cc)? + one_minus_zeta(c(cc, 0.0) - s)? * sign.value())
}

/// Multiplier of gamma_+ Zsym_+ + gamma_- Zsym_- at (1+hbar)/2 + s/lambda.
pub fn mh_multiplier(lambda: f64, hbar: f64, gamma_plus: f64, gamma_minus: f64, s: C64) -> Result<C64> {
    let cc = (1.0 + hbar) * lambda / 2.0;
    let a = c(gamma_plus, gamma_minus) / 2.0;
    let b = c(gamma_plus, -gamma_minus) / 2.0;
    Ok(a * one_minus_zeta(s + cc)? + b * one_minus_zeta(c(cc, 0.0) - s)?)
}

// ------------------------------------------------------------ Weil sums

/// Grid used for Weil sums.
pub fn weil_grid() -> LogGrid {
    LogGrid { x_min: -40.0, x_max: 40.0, n_points: 1 << 14 }
}

/// tau_0 conj(f) on a symmetric grid: e^{-x_i} conj f(-x_i).
pub fn tau0_conj(f: &GridFunction) -> Result<GridFunction> {
    if !f.grid.is_symmetric() {
        return Err(ZError::Shape("tau_0 on a grid needs x_min = -x_max".into()));
    }
    let n = f.grid.n_points;
    let vals = (0..n).map(|i| (-f.grid.x(i)).exp() * f.values[n - 1 - i].conj()).collect();
    GridFunction::new(f.grid, vals)
}

/// Real part of sum over z = 1/2 +- i t_k of M[tau_0 conj(f) * f](z).
pub fn weil_sum(f: &AnalyticFunction, zeros: &ZeroList) -> Result<f64> {
    weil_sum_on(f, zeros, &weil_grid())
}

pub fn weil_sum_on(f: &AnalyticFunction, zeros: &ZeroList, grid: &LogGrid) -> Result<f64> {
    let (lo, hi) = f.mellin_strip();
    if !(lo < 0.5) {
        return Err(ZError::Strip { endpoint: "0", detail: format!("1/2 is left of the strip of {}", f.name()) });
    }
    if !(hi > 0.5) {
        return Err(ZError::Strip { endpoint: "inf", detail: format!("1/2 is right of the strip of {}", f.name()) });
    }
    if zeros.is_empty() {
        return Ok(0.0);
    }
    let g = sample(f, grid)?;
    let tg = tau0_conj(&g)?;
    let (x0, h) = (grid.x_min, grid.step());
    // discrete Mellin of the full grid convolution, factored: the direct form
    // amplifies FFT rounding by e^{x/2} at the far end of the extended grid
    let dm = |z: C64| discrete_mellin(x0, h, &tg.values, z) * discrete_mellin(x0, h, &g.values, z);
    let terms: Vec<f64> = zeros.ordinates.par_iter().map(|&t| (dm(c(0.5, t)) + dm(c(0.5, -t))).re).collect();
    Ok(terms.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_two() {
        let z = zeta_ref(c(2.0, 0.0)).unwrap();
        assert!((z.re - PI * PI / 6.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_ref(c(5.0, 0.0)).unwrap().re - 24.0).abs() < 1e-11);
        assert!((gamma_ref(c(0.5, 0.0)).unwrap().re - PI.sqrt()).abs() < 1e-13);
        assert!(gamma_ref(c(-2.0, 0.0)).is_err());
        // reflection region
        let g = gamma_ref(c(-0.5, 0.0)).unwrap();
        assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn near_eta_denominator_zero() {
        let s = c(1.0, 2.0 * PI / LN_2 + 0.01);
        let a = zeta_ref(s).unwrap();
        let b = zeta_ref(s + c(0.06, 0.0)).unwrap();
        assert!((a - b).norm() < 0.2 * a.norm());
    }

    #[test]
    fn linear_winding() {
        let s0 = c(0.3, 0.4);
        let f = move |s: C64| Ok(s - s0);
        let n = count_zeros_rectangle(&f, Rect { re: (0.0, 1.0), im: (0.0, 1.0) }).unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn csv_round_trip() {
        let z = ZeroList { ordinates: vec![14.134725141734695, 21.02203963877155], residuals: vec![1e-20, 0.0], method: ZeroMethod::Computed };
        let s = z.to_csv_string().unwrap();
        assert!(s.starts_with("index,ordinate,residual\n"));
        let back = ZeroList::from_csv_str(&s).unwrap();
        assert_eq!(back.ordinates, z.ordinates);
    }
}
