//! Convolution-algebra checks on a log grid.

use super::{params, CheckReport, VerifyConfig};
use crate::error::{Result, ZError};
use crate::funcspace::{power_log_gaussian, sample, AnalyticFunction, GridFunction};
use crate::mellin::convolve;
use crate::c;

pub(super) fn fixture_v() -> AnalyticFunction {
    power_log_gaussian(1.0, c(0.3, 0.0))
}

pub(super) fn fixture_f() -> AnalyticFunction {
    power_log_gaussian(0.7, c(-0.4, 0.0))
}

pub(super) fn fixture_g() -> AnalyticFunction {
    power_log_gaussian(1.3, c(0.1, 0.0))
}

fn fixture_w() -> AnalyticFunction {
    power_log_gaussian(0.9, c(0.2, 0.0))
}

fn tau_grid(f: &GridFunction, hbar: f64) -> Result<GridFunction> {
    if !f.grid.is_symmetric() {
        return Err(ZError::Shape("tau on a grid needs x_min = -x_max".into()));
    }
    let n = f.grid.n_points;
    let w = 1.0 + hbar;
    GridFunction::new(f.grid, (0..n).map(|i| (-w * f.grid.x(i)).exp() * f.values[n - 1 - i]).collect())
}

fn lin(a: &GridFunction, ka: f64, b: &GridFunction, kb: f64) -> GridFunction {
    a.map(|i, v| v * ka + b.values[i] * kb)
}

fn max_abs(f: &GridFunction) -> f64 {
    f.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Relative sup distance.
fn rel(a: &GridFunction, b: &GridFunction) -> f64 {
    a.max_abs_diff(b) / max_abs(a).max(max_abs(b)).max(1e-300)
}

struct Alg {
    hbar: f64,
}

impl Alg {
    fn tau(&self, f: &GridFunction) -> Result<GridFunction> {
        tau_grid(f, self.hbar)
    }

    fn conv(&self, a: &GridFunction, b: &GridFunction) -> Result<GridFunction> {
        convolve(a, b)
    }

    /// [a, b] = tau a * b - a * tau b
    fn bracket(&self, a: &GridFunction, b: &GridFunction) -> Result<GridFunction> {
        Ok(lin(&self.conv(&self.tau(a)?, b)?, 1.0, &self.conv(a, &self.tau(b)?)?, -1.0))
    }

    fn odd(&self, v: &GridFunction) -> Result<GridFunction> {
        Ok(lin(v, 1.0, &self.tau(v)?, -1.0))
    }

    /// d^-_V f = (V - tau V) * (f - tau f)
    fn d_minus(&self, v: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
        self.conv(&self.odd(v)?, &self.odd(f)?)
    }

    /// d^+_V f = [(id - tau) V, f]
    fn d_plus(&self, v: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
        self.bracket(&self.odd(v)?, f)
    }
}

fn on_grid(f: &AnalyticFunction, cfg: &VerifyConfig) -> Result<GridFunction> {
    sample(f, &cfg.grid)
}

/// d^-_W d^-_V = 0 and d^+_W d^+_V = 0 on f, the twisted product rule for
/// d^-_V on f * g, and the Jacobi identity of the bracket on (f, g, V).
pub fn check_cohomology(v: &AnalyticFunction, f: &AnalyticFunction, g: &AnalyticFunction, hbar: f64, cfg: &VerifyConfig) -> CheckReport {
    let mut p = params(&[("hbar", hbar.to_string()), ("v", v.name().into()), ("f", f.name().into()), ("g", g.name().into())]);
    let run = |p: &mut std::collections::BTreeMap<String, String>| -> Result<f64> {
        let a = Alg { hbar: hbar + cfg.tau_shift };
        let (vg, fg, gg, wg) = (on_grid(v, cfg)?, on_grid(f, cfg)?, on_grid(g, cfg)?, on_grid(&fixture_w(), cfg)?);
        let zero = fg.map(|_, _| c(0.0, 0.0));
        let inner_m = a.d_minus(&vg, &fg)?;
        let dd_m = a.d_minus(&wg, &inner_m)?;
        let inner_p = a.d_plus(&vg, &fg)?;
        let dd_p = a.d_plus(&wg, &inner_p)?;
        let d2 = (dd_m.max_abs_diff(&zero) / max_abs(&inner_m).max(1e-300)).max(dd_p.max_abs_diff(&zero) / max_abs(&inner_p).max(1e-300));

        let fgc = a.conv(&fg, &gg)?;
        let lhs = a.d_minus(&vg, &fgc)?;
        let rhs = lin(&a.conv(&a.d_minus(&vg, &fg)?, &gg)?, 1.0, &a.conv(&a.tau(&fg)?, &a.d_minus(&vg, &gg)?)?, 1.0);
        let twisted = rel(&lhs, &rhs);

        let j1 = a.bracket(&fg, &a.bracket(&gg, &vg)?)?;
        let j2 = a.bracket(&gg, &a.bracket(&vg, &fg)?)?;
        let j3 = a.bracket(&vg, &a.bracket(&fg, &gg)?)?;
        let sum = lin(&lin(&j1, 1.0, &j2, 1.0), 1.0, &j3, 1.0);
        let scale = max_abs(&j1).max(max_abs(&j2)).max(max_abs(&j3)).max(1e-300);
        let jacobi = sum.max_abs_diff(&zero) / scale;

        p.insert("d_squared".into(), format!("{:e}", d2));
        p.insert("twisted_rule".into(), format!("{:e}", twisted));
        p.insert("jacobi".into(), format!("{:e}", jacobi));
        Ok(d2.max(twisted).max(jacobi))
    };
    let r = run(&mut p);
    CheckReport::from_result(&format!("cohomology.hbar_{}", hbar), p, r, cfg.tol.cohomology, "log-gaussian fixtures on the config grid")
}

/// For tau-odd V, (id - tau) V = 2 V, so d^+_V f = 2 [V, f].
pub fn check_cohomology_odd_factor(cfg: &VerifyConfig) -> CheckReport {
    let run = || -> Result<f64> {
        let a = Alg { hbar: cfg.tau_shift };
        let v0 = on_grid(&fixture_v(), cfg)?;
        let v = lin(&v0, 0.5, &a.tau(&v0)?, -0.5);
        let f = on_grid(&fixture_f(), cfg)?;
        let lhs = a.d_plus(&v, &f)?;
        let rhs = a.bracket(&v, &f)?.map(|_, z| z * 2.0);
        Ok(rel(&lhs, &rhs))
    };
    CheckReport::from_result("cohomology.odd_factor", params(&[("hbar", "0".into())]), run(), cfg.tol.adjoint, "tau-odd part of a fixture")
}

/// Tau-odd f lies in the kernel of d^+_V.
pub fn check_cohomology_kernel(cfg: &VerifyConfig) -> CheckReport {
    let run = || -> Result<f64> {
        let a = Alg { hbar: cfg.tau_shift };
        let v = on_grid(&fixture_v(), cfg)?;
        let f0 = on_grid(&fixture_f(), cfg)?;
        let f = lin(&f0, 0.5, &a.tau(&f0)?, -0.5);
        let d = a.d_plus(&v, &f)?;
        // scale: the same map on the tau-even part
        let fe = lin(&f0, 0.5, &a.tau(&f0)?, 0.5);
        let s = max_abs(&a.d_plus(&v, &fe)?).max(1e-300);
        Ok(max_abs(&d) / s)
    };
    CheckReport::from_result("cohomology.kernel", params(&[("hbar", "0".into())]), run(), cfg.tol.adjoint, "tau-odd part of a fixture")
}
