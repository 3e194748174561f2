//! Quadrature kernels: adaptive Gauss-Kronrod (vector valued), tanh-sinh on
//! finite intervals and fixed Gauss-Legendre panels.

use crate::error::{Result, ZError};
use crate::C64;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tol {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tol { abs, rel, max_intervals: 4000 }
    }
}

impl Default for Tol {
    fn default() -> Self {
        Tol::new(1e-300, 1e-13)
    }
}

/// Integrand writing `dim` components for abscissa x.
pub trait VecIntegrand {
    fn eval(&mut self, x: f64, out: &mut [C64]) -> Result<()>;
}

impl<F: FnMut(f64, &mut [C64]) -> Result<()>> VecIntegrand for F {
    fn eval(&mut self, x: f64, out: &mut [C64]) -> Result<()> {
        self(x, out)
    }
}

struct Seg {
    a: f64,
    b: f64,
    val: Vec<C64>,
    err: f64,
}

impl PartialEq for Seg {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Seg {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.partial_cmp(&o.err).unwrap_or(std::cmp::Ordering::Equal)
    }
}

fn gk15<I: VecIntegrand + ?Sized>(f: &mut I, a: f64, b: f64, dim: usize, buf: &mut [C64]) -> Result<Seg> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let zero = C64::new(0.0, 0.0);
    let mut k = vec![zero; dim];
    let mut g = vec![zero; dim];
    let mut fv: Vec<Vec<C64>> = Vec::with_capacity(15);
    for i in 0..15 {
        let (xi, _) = node(i);
        f.eval(c + h * xi, buf)?;
        fv.push(buf.to_vec());
    }
    for i in 0..15 {
        let (_, j) = node(i);
        let wk = WGK[j];
        for d in 0..dim {
            k[d] += fv[i][d] * wk;
        }
        if j % 2 == 1 {
            let wg = WG[j / 2];
            for d in 0..dim {
                g[d] += fv[i][d] * wg;
            }
        }
    }
    let mut err: f64 = 0.0;
    for d in 0..dim {
        let mean = k[d] * 0.5;
        let mut resasc = 0.0;
        for i in 0..15 {
            let (_, j) = node(i);
            resasc += WGK[j] * (fv[i][d] - mean).norm();
        }
        resasc *= h.abs();
        let diff = ((k[d] - g[d]) * h).norm();
        let e = if resasc > 0.0 && diff > 0.0 {
            resasc * (200.0 * diff / resasc).powf(1.5).min(1.0)
        } else {
            diff
        };
        err = err.max(e);
    }
    for v in k.iter_mut() {
        *v *= h;
    }
    Ok(Seg { a, b, val: k, err: err.max(50.0 * f64::EPSILON * k_norm_scaled(&fv, h)) })
}

fn k_norm_scaled(fv: &[Vec<C64>], h: f64) -> f64 {
    let mut m: f64 = 0.0;
    for (i, row) in fv.iter().enumerate() {
        let (_, j) = node(i);
        let s: f64 = row.iter().map(|v| v.norm()).fold(0.0, f64::max);
        m = m.max(s * WGK[j]);
    }
    m * h.abs()
}

/// Node i of the 15 point rule: (abscissa in [-1,1], index into XGK/WGK).
fn node(i: usize) -> (f64, usize) {
    if i < 7 {
        (-XGK[i], i)
    } else if i == 7 {
        (0.0, 7)
    } else {
        (XGK[14 - i], 14 - i)
    }
}

/// Adaptive vector valued Gauss-Kronrod on [a, b]. Returns (integral, error estimate).
pub fn gk_adaptive<I: VecIntegrand + ?Sized>(f: &mut I, a: f64, b: f64, dim: usize, tol: Tol) -> Result<(Vec<C64>, f64)> {
    let zero = C64::new(0.0, 0.0);
    if a == b {
        return Ok((vec![zero; dim], 0.0));
    }
    let mut buf = vec![zero; dim];
    // start with a few panels so that narrow features are seen
    let npan = 4;
    let mut heap = BinaryHeap::new();
    for p in 0..npan {
        let lo = a + (b - a) * p as f64 / npan as f64;
        let hi = a + (b - a) * (p + 1) as f64 / npan as f64;
        heap.push(gk15(f, lo, hi, dim, &mut buf)?);
    }
    let mut count = npan;
    loop {
        let mut total = vec![zero; dim];
        let mut err = 0.0;
        for s in heap.iter() {
            for d in 0..dim {
                total[d] += s.val[d];
            }
            err += s.err;
        }
        let mag = total.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if err <= tol.abs.max(tol.rel * mag) || count >= tol.max_intervals {
            return Ok((total, err));
        }
        let worst = heap.pop().unwrap();
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // cannot split further
            heap.push(Seg { err: 0.0, ..worst });
            continue;
        }
        heap.push(gk15(f, worst.a, m, dim, &mut buf)?);
        heap.push(gk15(f, m, worst.b, dim, &mut buf)?);
        count += 1;
    }
}

/// Scalar convenience wrapper.
pub fn gk_scalar<F: FnMut(f64) -> Result<C64>>(mut f: F, a: f64, b: f64, tol: Tol) -> Result<(C64, f64)> {
    let mut g = |x: f64, out: &mut [C64]| -> Result<()> {
        out[0] = f(x)?;
        Ok(())
    };
    let (v, e) = gk_adaptive(&mut g, a, b, 1, tol)?;
    Ok((v[0], e))
}

/// Tanh-sinh quadrature on a finite interval. The integrand receives the
/// abscissa together with its distances to a and b so endpoint
/// singularities can be evaluated without cancellation.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> Result<C64>>(mut f: F, a: f64, b: f64, tol: Tol) -> Result<(C64, f64)> {
    let h2 = 0.5 * (b - a);
    let pi2 = std::f64::consts::FRAC_PI_2;
    let mut eval_at = |t: f64| -> Result<C64> {
        // x = tanh(pi/2 sinh t), weight = pi/2 cosh t / cosh^2(pi/2 sinh t)
        let u = pi2 * t.sinh();
        let ch = u.cosh();
        let w = pi2 * t.cosh() / (ch * ch);
        // 1 - x and 1 + x computed stably
        let e = (-2.0 * u.abs()).exp();
        let comp = 2.0 * e / (1.0 + e);
        let (dl, dr) = if u >= 0.0 { (2.0 - comp, comp) } else { (comp, 2.0 - comp) };
        let xa = h2 * dl;
        let xb = h2 * dr;
        if xa <= 0.0 || xb <= 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let x = if xa < xb { a + xa } else { b - xb };
        let v = f(x, xa, xb)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok(v * w * h2)
    };
    let tmax = 6.0;
    let mut h = 0.5;
    let mut sum = eval_at(0.0)?;
    let mut k = 1;
    while k as f64 * h <= tmax {
        let t = k as f64 * h;
        sum += eval_at(t)? + eval_at(-t)?;
        k += 1;
    }
    let mut est = sum * h;
    let mut err = f64::INFINITY;
    for _level in 0..9 {
        h *= 0.5;
        let mut add = C64::new(0.0, 0.0);
        let mut k = 1;
        while k as f64 * h <= tmax {
            let t = k as f64 * h;
            add += eval_at(t)? + eval_at(-t)?;
            k += 2;
        }
        sum += add;
        let next = sum * h;
        err = (next - est).norm();
        est = next;
        if err <= tol.abs.max(tol.rel * est.norm()) && _level >= 2 {
            break;
        }
    }
    Ok((est, err))
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Find where a nonnegative magnitude profile is non-negligible.
///
/// `rate_lo`/`rate_hi` describe the certified decay of the profile towards
/// -inf/+inf: `None` means rapid, `Some(r)` means at least e^{-r|x|} with r > 0.
/// The returned interval leaves out tails below `tol * peak`.
pub fn find_window<M: FnMut(f64) -> Result<f64>>(
    mut mag: M,
    hint: (f64, f64),
    rate_lo: Option<f64>,
    rate_hi: Option<f64>,
    tol: f64,
) -> Result<(f64, f64)> {
    let (h0, h1) = hint;
    let span_lo = if h0.is_finite() { h0 } else { -40.0 };
    let span_hi = if h1.is_finite() { h1 } else { 40.0 };
    if span_hi <= span_lo {
        return Ok((span_lo, span_lo));
    }
    let nscan = (((span_hi - span_lo) / 0.5).ceil() as usize).clamp(16, 400);
    let step = (span_hi - span_lo) / nscan as f64;
    let mut vals = Vec::with_capacity(nscan + 1);
    let mut peak: f64 = 0.0;
    for i in 0..=nscan {
        let x = span_lo + i as f64 * step;
        let m = mag(x)?;
        let m = if m.is_finite() { m } else { 0.0 };
        peak = peak.max(m);
        vals.push(m);
    }
    if peak == 0.0 {
        return Ok((span_lo, span_lo));
    }
    let thr = tol * peak;
    let first = vals.iter().position(|&m| m > thr).unwrap();
    let last = vals.len() - 1 - vals.iter().rev().position(|&m| m > thr).unwrap();
    let mut lo = if h0.is_finite() { h0.max(span_lo + (first as f64 - 1.0) * step) } else { span_lo + (first as f64 - 1.0) * step };
    let mut hi = if h1.is_finite() { h1.min(span_lo + (last as f64 + 1.0) * step) } else { span_lo + (last as f64 + 1.0) * step };
    if !h0.is_finite() {
        let mut st = 1.0;
        loop {
            let m = mag(lo)?;
            let tail = match rate_lo {
                None => m,
                Some(r) => m / r.max(1e-300),
            };
            if tail <= thr || m == 0.0 {
                break;
            }
            lo -= st;
            st *= 1.3;
            if lo < -5000.0 {
                return Err(ZError::Strip { endpoint: "0", detail: "integrand does not decay towards t -> 0".into() });
            }
        }
    }
    if !h1.is_finite() {
        let mut st = 1.0;
        loop {
            let m = mag(hi)?;
            let tail = match rate_hi {
                None => m,
                Some(r) => m / r.max(1e-300),
            };
            if tail <= thr || m == 0.0 {
                break;
            }
            hi += st;
            st *= 1.3;
            if hi > 5000.0 {
                return Err(ZError::Strip { endpoint: "inf", detail: "integrand does not decay towards t -> inf".into() });
            }
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_gaussian() {
        let (v, _) = gk_scalar(|x| Ok(C64::new((-x * x).exp(), 0.0)), -10.0, 10.0, Tol::default()).unwrap();
        assert!((v.re - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let (v, _) = tanh_sinh(|_x, da, _db| Ok(C64::new(da.powf(-0.5), 0.0)), 0.0, 1.0, Tol::new(1e-15, 1e-14)).unwrap();
        assert!((v.re - 2.0).abs() < 1e-12, "{}", v.re);
    }

    #[test]
    fn legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-15);
    }
}
