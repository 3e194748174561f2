//! Mellin transforms, the weighted inner product, multiplicative convolution
//! and even Fourier transforms.

use crate::error::{Result, ZError};
use crate::funcspace::{AnalyticFunction, GridFunction, LogGrid};
use crate::quad::{find_window, gk_adaptive, Tol};
use crate::{c, C64};
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Mellin transform sampled on Re(s) = c.
#[derive(Clone, Debug)]
pub struct MellinLine {
    pub c: f64,
    pub y_values: Vec<f64>,
    pub values: Vec<C64>,
    pub window_error: f64,
    /// Set when the window error exceeds the configured threshold.
    pub warning: bool,
    grid: LogGrid,
}

pub const LINE_WINDOW_THRESHOLD: f64 = 1e-10;

fn rate(e: f64) -> Option<f64> {
    if e.is_infinite() {
        None
    } else {
        Some(e)
    }
}

/// Integrate e^{a x} * k(x) over the real line where k is given as a jet
/// evaluator. `lo_rate`/`hi_rate` are the certified exponential decay
/// rates of the integrand magnitude towards -inf/+inf.
fn log_integral<F>(mut k: F, hint: (f64, f64), lo_rate: f64, hi_rate: f64, eps: f64) -> Result<C64>
where
    F: FnMut(f64) -> Result<C64>,
{
    if hint.0.is_infinite() && !(lo_rate > 0.0) {
        return Err(ZError::Strip { endpoint: "0", detail: format!("integrand grows like e^({} x) as t -> 0", -lo_rate) });
    }
    if hint.1.is_infinite() && !(hi_rate > 0.0) {
        return Err(ZError::Strip { endpoint: "inf", detail: format!("integrand grows like e^({} x) as t -> inf", -hi_rate) });
    }
    let (lo, hi) = find_window(|x| Ok(k(x)?.norm()), hint, rate(lo_rate), rate(hi_rate), 1e-18)?;
    if !(hi > lo) {
        return Ok(c(0.0, 0.0));
    }
    let mut g = |x: f64, out: &mut [C64]| -> Result<()> {
        out[0] = k(x)?;
        Ok(())
    };
    let (v, _) = gk_adaptive(&mut g, lo, hi, 1, Tol::new(eps * 0.1, 1e-14))?;
    Ok(v[0])
}

/// M[f](s) = int_0^inf t^{s-1} f(t) dt.
pub fn mellin_point(f: &AnalyticFunction, s: C64, eps: f64) -> Result<C64> {
    let (lo, hi) = f.mellin_strip();
    if !(s.re > lo) {
        return Err(ZError::Strip {
            endpoint: "0",
            detail: format!("Re s = {} is left of the certified strip ({}, {}) of {}", s.re, lo, hi, f.name()),
        });
    }
    if !(s.re < hi) {
        return Err(ZError::Strip {
            endpoint: "inf",
            detail: format!("Re s = {} is right of the certified strip ({}, {}) of {}", s.re, lo, hi, f.name()),
        });
    }
    log_integral(
        |x| Ok((s * x).exp() * f.eval_log(x)?),
        f.log_support(),
        s.re + f.decay_at_0.exponent(),
        f.decay_at_inf.exponent() - s.re,
        eps,
    )
}

/// <f, g>_hbar = int t^hbar conj(f) g dt.
pub fn inner_product(f: &AnalyticFunction, g: &AnalyticFunction, hbar: f64, eps: f64) -> Result<C64> {
    let (fl, fh) = f.log_support();
    let (gl, gh) = g.log_support();
    let hint = (fl.max(gl), fh.min(gh));
    if hint.1 < hint.0 {
        return Ok(c(0.0, 0.0));
    }
    let w = 1.0 + hbar;
    log_integral(
        |x| {
            let a = f.eval_log(x)?;
            if a == c(0.0, 0.0) {
                return Ok(a);
            }
            Ok(a.conj() * g.eval_log(x)? * (w * x).exp())
        },
        hint,
        w + f.decay_at_0.exponent() + g.decay_at_0.exponent(),
        f.decay_at_inf.exponent() + g.decay_at_inf.exponent() - w,
        eps,
    )
}

/// All values of M[f](c + iy) on the FFT frequency grid of f's log grid.
pub fn mellin_line(f: &GridFunction, cc: f64) -> MellinLine {
    let g = f.grid;
    let n = g.n_points;
    let h = g.step();
    let x0 = g.x_min;
    let mut buf: Vec<C64> = (0..n)
        .map(|j| {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            f.values[j] * (cc * g.x(j)).exp() * w
        })
        .collect();
    let window_error = buf[0].norm().max(buf[n - 1].norm()) * 2.0;
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(&mut buf);
    let mut y_values = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for idx in 0..n {
        // order by frequency from -n/2 to n/2-1
        let k = idx as i64 - (n / 2) as i64;
        let j = k.rem_euclid(n as i64) as usize;
        let y = 2.0 * PI * k as f64 / (n as f64 * h);
        y_values.push(y);
        values.push(buf[j] * h * c(0.0, y * x0).exp());
    }
    MellinLine { c: cc, y_values, values, window_error, warning: window_error > LINE_WINDOW_THRESHOLD, grid: g }
}

/// Diagnostic inverse of `mellin_line` back onto the original grid.
pub fn mellin_line_inverse(line: &MellinLine) -> GridFunction {
    let g = line.grid;
    let n = g.n_points;
    let h = g.step();
    let mut buf = vec![c(0.0, 0.0); n];
    for (idx, v) in line.values.iter().enumerate() {
        let k = idx as i64 - (n / 2) as i64;
        let j = k.rem_euclid(n as i64) as usize;
        buf[j] = v * c(0.0, -line.y_values[idx] * g.x_min).exp() / h;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let values: Vec<C64> = (0..n)
        .map(|j| {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            buf[j] / n as f64 * (-line.c * g.x(j)).exp() / w
        })
        .collect();
    GridFunction::new(g, values).unwrap()
}

fn signed_freq(k: usize, p: usize) -> f64 {
    if k < p / 2 {
        k as f64
    } else if k == p / 2 {
        0.0
    } else {
        k as f64 - p as f64
    }
}

/// (f * g)(t) = int dy/y f(t/y) g(y) on the common grid, via zero-padded FFT.
/// The output lands between padded samples, so one factor is shifted by half
/// a sample spectrally before multiplying.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    if f.grid != g.grid {
        return Err(ZError::Shape("convolution of functions on different grids".into()));
    }
    let grid = f.grid;
    let n = grid.n_points;
    let h = grid.step();
    let p = 2 * n;
    // output index i sits at linear index m = i + off, with a fractional shift frac
    let pos = -grid.x_min / h;
    let off_f = pos.floor();
    let frac = pos - off_f;
    let off = off_f as i64;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(p);
    let inv = planner.plan_fft_inverse(p);
    let mut a = vec![c(0.0, 0.0); p];
    let mut b = vec![c(0.0, 0.0); p];
    a[..n].copy_from_slice(&f.values);
    b[..n].copy_from_slice(&g.values);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for k in 0..p {
        let ks = signed_freq(k, p);
        let shift = c(0.0, 2.0 * PI * ks * frac / p as f64).exp();
        a[k] = a[k] * b[k] * shift;
    }
    inv.process(&mut a);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let m = i as i64 + off;
        let v = if m >= 0 && (m as usize) < p { a[m as usize] * (h / p as f64) } else { c(0.0, 0.0) };
        values.push(v);
    }
    let mut out = GridFunction::new(grid, values)?;
    // wrap-around residue: what the padded product leaves in its far tail
    let wrap = (0..n / 8).map(|k| (a[p - 1 - k] * (h / p as f64)).norm()).fold(0.0, f64::max);
    out.window_error = out.window_error.max(wrap);
    Ok(out)
}

/// Full linear convolution on the extended grid x = 2 x_min + m h, m < 2n - 1.
pub fn convolve_full(f: &GridFunction, g: &GridFunction) -> Result<(f64, f64, Vec<C64>)> {
    if f.grid != g.grid {
        return Err(ZError::Shape("convolution of functions on different grids".into()));
    }
    let n = f.grid.n_points;
    let h = f.grid.step();
    let p = 2 * n;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(p);
    let inv = planner.plan_fft_inverse(p);
    let mut a = vec![c(0.0, 0.0); p];
    let mut b = vec![c(0.0, 0.0); p];
    a[..n].copy_from_slice(&f.values);
    b[..n].copy_from_slice(&g.values);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for k in 0..p {
        a[k] *= b[k];
    }
    inv.process(&mut a);
    let vals: Vec<C64> = a[..2 * n - 1].iter().map(|v| v * (h / p as f64)).collect();
    Ok((2.0 * f.grid.x_min, h, vals))
}

/// Discrete Mellin transform h sum_m e^{s x_m} v_m on x_m = x0 + m h.
pub fn discrete_mellin(x0: f64, h: f64, v: &[C64], s: C64) -> C64 {
    let step = (s * h).exp();
    let mut w = (s * x0).exp();
    let mut acc = c(0.0, 0.0);
    for (m, val) in v.iter().enumerate() {
        if m % 256 == 0 {
            w = (s * (x0 + m as f64 * h)).exp();
        }
        acc += val * w;
        w *= step;
    }
    acc * h
}

/// Cosine transform 2 int_0^inf f(x^lambda) cos(2 pi x p) dx.
pub fn fourier_even(f: &AnalyticFunction, lambda: f64, p: f64, eps: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(ZError::Domain(format!("lambda = {}", lambda)));
    }
    let s_inf = f.decay_at_inf.exponent();
    if !(lambda * s_inf > 1.0) && !f.support().1.is_finite() {
        return Err(ZError::Strip { endpoint: "inf", detail: format!("{}(x^{}) is not integrable", f.name(), lambda) });
    }
    if !(f.decay_at_0.exponent() * lambda > -1.0) && f.support().0 == 0.0 {
        return Err(ZError::Strip { endpoint: "0", detail: format!("{}(x^{}) is not integrable at 0", f.name(), lambda) });
    }
    // upper end from the profile in u = ln x
    let (_, uh) = find_window(
        |u| Ok(f.eval_log(lambda * u)?.norm() * u.exp()),
        (f64::NEG_INFINITY, f.log_support().1 / lambda),
        None,
        if f.decay_at_inf == crate::funcspace::Decay::Rapid { None } else { Some(lambda * s_inf - 1.0) },
        1e-18,
    )?;
    let xmax = uh.exp();
    let xmin = if f.support().0 > 0.0 { f.support().0.powf(1.0 / lambda) } else { 0.0 };
    if !(xmax > xmin) {
        return Ok(0.0);
    }
    let mut g = |x: f64, out: &mut [C64]| -> Result<()> {
        out[0] = if x > 0.0 { f.eval(x.powf(lambda))? * (2.0 * PI * x * p).cos() } else { c(0.0, 0.0) };
        Ok(())
    };
    // panels of about one period keep the oscillation resolved
    let periods = (xmax * p.abs()).ceil().clamp(1.0, 4000.0) as usize;
    let mut total = 0.0;
    for k in 0..periods {
        let a = xmin + (xmax - xmin) * k as f64 / periods as f64;
        let b = xmin + (xmax - xmin) * (k + 1) as f64 / periods as f64;
        let (v, _) = gk_adaptive(&mut g, a, b, 1, Tol::new(eps * 0.01 / periods as f64, 1e-14))?;
        total += v[0].re;
    }
    Ok(2.0 * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{exp_neg_t, log_gaussian, sample};

    #[test]
    fn gamma_two() {
        let v = mellin_point(&exp_neg_t(), c(2.0, 0.0), 1e-12).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn line_matches_closed_form() {
        let g = LogGrid::default_grid();
        let f = sample(&log_gaussian(1.0), &g).unwrap();
        let line = mellin_line(&f, 0.0);
        for (y, v) in line.y_values.iter().zip(&line.values) {
            if y.abs() < 10.0 {
                let s = c(0.0, *y);
                let exact = (s * s / 4.0).exp() * PI.sqrt();
                assert!((v - exact).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn grid_convolution_of_log_gaussians() {
        let g = LogGrid::default_grid();
        let a = sample(&log_gaussian(1.0), &g).unwrap();
        let b = sample(&log_gaussian(2.0), &g).unwrap();
        let r = convolve(&a, &b).unwrap();
        for i in (0..g.n_points).step_by(37) {
            let x = g.x(i);
            let exact = (PI / 3.0).sqrt() * (-(2.0 / 3.0) * x * x).exp();
            assert!((r.values[i].re - exact).abs() < 1e-9, "{} {} {}", x, r.values[i], exact);
        }
    }
}
