//! Named identity checks. Each check evaluates both sides of an identity
//! numerically and reports the residual against a configurable tolerance.

mod grid;

pub use grid::{check_cohomology, check_cohomology_kernel, check_cohomology_odd_factor};

use crate::error::{Result, ZError};
use crate::funcspace::{
    battery, bump, exp_neg_t, exp_power, gaussian, log_gaussian, power, power_log_gaussian, project_tau, tau_fn, AnalyticFunction,
    LogGrid,
};
use crate::mellin::{inner_product, mellin_line, mellin_line_inverse, mellin_point};
use crate::operators::{
    adjoint, apply_fn, commutator, compose, conv_fn, delta, h, hz, identity, lincomb, rota_baxter_r, scaled, tau, OperatorExpr, Subst,
    SubstMap, SymKind, SymmetrizedOp,
};
use crate::special::{iteration_closed_form, psi_n, synthetic_funci1, ExpPolySeries, IterWhich};
use crate::zeta_xi::{
    continue_general, count_zeros_rectangle, equisym_closed, equisym_fn, equisym_roots, find_critical_zeros, gamma_ref, mh_multiplier,
    one_minus_zeta, xi, xi_direct, zeta_ref, HeatVariant, Rect, XiEngine,
};
use crate::{c, Sign, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub inputs_provenance: String,
}

impl CheckReport {
    pub fn new(name: &str, params: BTreeMap<String, String>, residual: f64, tolerance: f64, provenance: &str) -> Self {
        CheckReport {
            name: name.to_string(),
            params,
            residual,
            tolerance,
            passed: residual <= tolerance,
            inputs_provenance: provenance.to_string(),
        }
    }

    fn from_result(name: &str, mut params: BTreeMap<String, String>, r: Result<f64>, tolerance: f64, provenance: &str) -> Self {
        match r {
            Ok(v) => CheckReport::new(name, params, v, tolerance, provenance),
            Err(e) => {
                params.insert("error".into(), e.to_string());
                CheckReport::new(name, params, f64::INFINITY, tolerance, provenance)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub adjoint: f64,
    pub commute: f64,
    pub psc: f64,
    pub polyi: f64,
    pub iteration: f64,
    pub funci: f64,
    pub rota_baxter: f64,
    pub cohomology: f64,
    pub orthogonality: f64,
    pub variance: f64,
    pub mellin: f64,
    pub xi: f64,
    pub equisym: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            adjoint: 1e-8,
            commute: 1e-7,
            psc: 1e-8,
            polyi: 1e-10,
            iteration: 1e-9,
            funci: 1e-8,
            rota_baxter: 1e-10,
            cohomology: 1e-7,
            orthogonality: 1e-10,
            variance: 1e-8,
            mellin: 1e-8,
            xi: 1e-9,
            equisym: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Glob patterns on check names; a check runs if any pattern matches.
    pub filters: Vec<String>,
    pub tol: Tolerances,
    /// Quadrature accuracy target.
    pub eps: f64,
    pub seed: u64,
    /// Grid for convolution-algebra checks.
    pub grid: LogGrid,
    pub hbars: Vec<f64>,
    /// Added to the exponent of every involution built by the suite. Nonzero
    /// values are a deliberate fault.
    pub tau_shift: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            filters: vec!["*".into()],
            tol: Tolerances::default(),
            eps: 1e-12,
            seed: 20240611,
            grid: LogGrid { x_min: -12.0, x_max: 12.0, n_points: 4096 },
            hbars: vec![-0.5, 0.0, 0.5, 1.0],
            tau_shift: 0.0,
        }
    }
}

impl VerifyConfig {
    /// No filters, so `run_all` returns nothing.
    pub fn empty() -> Self {
        VerifyConfig { filters: vec![], ..Default::default() }
    }

    pub fn with_filter(pattern: &str) -> Self {
        VerifyConfig { filters: vec![pattern.to_string()], ..Default::default() }
    }

    pub fn selects(&self, name: &str) -> bool {
        self.filters.iter().any(|p| glob::Pattern::new(p).map(|p| p.matches(name)).unwrap_or(false))
    }
}

fn params(kv: &[(&str, String)]) -> BTreeMap<String, String> {
    kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn fmt_s(s: C64) -> String {
    format!("{}{:+}i", s.re, s.im)
}

/// The smallest of 2, 3 with lambda (1 + hbar) > 1.
pub fn lambda_for(hbar: f64) -> f64 {
    if 2.0 * (1.0 + hbar) > 1.0 {
        2.0
    } else {
        3.0
    }
}

/// Deterministic sample points in [lo, hi], sorted.
pub fn sample_points(seed: u64, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn t_points(cfg: &VerifyConfig) -> Vec<f64> {
    sample_points(cfg.seed, 4, 0.4, 3.5)
}

fn pairs() -> Vec<(AnalyticFunction, AnalyticFunction)> {
    let b = battery();
    (0..b.len()).map(|i| (b[i].clone(), b[(i + 1) % b.len()].clone())).collect()
}

fn shift_tau(op: &OperatorExpr, d: f64) -> OperatorExpr {
    if d == 0.0 {
        return op.clone();
    }
    match op {
        OperatorExpr::Tau { hbar, mu } => OperatorExpr::Tau { hbar: hbar + d, mu: *mu },
        OperatorExpr::Compose(v) => OperatorExpr::Compose(v.iter().map(|o| shift_tau(o, d)).collect()),
        OperatorExpr::LinComb(v) => OperatorExpr::LinComb(v.iter().map(|(k, o)| (*k, shift_tau(o, d))).collect()),
        o => o.clone(),
    }
}

fn zero_op() -> OperatorExpr {
    scaled(c(0.0, 0.0), identity())
}

/// max over t of |lhs f - rhs f| / max(1, |lhs f|)
fn op_residual(lhs: &OperatorExpr, rhs: &OperatorExpr, f: &AnalyticFunction, ts: &[f64]) -> Result<f64> {
    let a = apply_fn(lhs, f)?;
    let b = apply_fn(rhs, f)?;
    let mut r: f64 = 0.0;
    for &t in ts {
        let (x, y) = (a.eval(t)?, b.eval(t)?);
        r = r.max((x - y).norm() / x.norm().max(1.0));
    }
    Ok(r)
}

// ------------------------------------------------------------------ PSC

/// max over s of |(1-s) zeta(s) M[f](s/lambda) - M[H Z f](s/lambda)|
pub fn check_psc(f: &AnalyticFunction, lambda: f64, s_grid: &[C64], cfg: &VerifyConfig) -> CheckReport {
    let name = format!("psc.{}.lambda_{}", f.name(), lambda);
    let run = || -> Result<f64> {
        f.check_decay().map_err(|e| ZError::Hypothesis(e.to_string()))?;
        let g = apply_fn(&hz(lambda), f)?;
        let mut r: f64 = 0.0;
        for &s in s_grid {
            let lhs = one_minus_zeta(s)? * mellin_point(f, s / lambda, cfg.eps)?;
            let rhs = mellin_point(&g, s / lambda, cfg.eps)?;
            r = r.max((lhs - rhs).norm());
        }
        Ok(r)
    };
    let p = params(&[
        ("f", f.name().to_string()),
        ("lambda", lambda.to_string()),
        ("s", s_grid.iter().map(|s| fmt_s(*s)).collect::<Vec<_>>().join(" ")),
    ]);
    CheckReport::from_result(&name, p, run(), cfg.tol.psc, "builtin f, fixed s grid, reference zeta")
}

pub fn psc_s_grid() -> Vec<C64> {
    vec![c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(0.25, 4.0), c(1.5, -2.0), c(0.8, 9.0), c(2.7, 0.5)]
}

// ------------------------------------------------------------------ adjoints

/// |<op f, g> - <f, op* g>| in <.,.>_hbar, with op* from the structural rules.
pub fn check_adjoint(op: &OperatorExpr, hbar: f64, f: &AnalyticFunction, g: &AnalyticFunction, cfg: &VerifyConfig) -> CheckReport {
    let name = format!("adjoint.{}.hbar_{}", op, hbar);
    let p = params(&[("op", op.to_string()), ("hbar", hbar.to_string()), ("f", f.name().into()), ("g", g.name().into())]);
    CheckReport::from_result(&name, p, adjoint_residual(op, hbar, &[(f.clone(), g.clone())], cfg), cfg.tol.adjoint, "fixed function pair")
}

fn adjoint_residual(op: &OperatorExpr, hbar: f64, pairs: &[(AnalyticFunction, AnalyticFunction)], cfg: &VerifyConfig) -> Result<f64> {
    let adj = shift_tau(&adjoint(op, hbar)?, cfg.tau_shift);
    let mut r: f64 = 0.0;
    for (f, g) in pairs {
        let a = inner_product(&apply_fn(op, f)?, g, hbar, cfg.eps)?;
        let b = inner_product(f, &apply_fn(&adj, g)?, hbar, cfg.eps)?;
        r = r.max((a - b).norm());
    }
    Ok(r)
}

fn symmetric_residual(op: &OperatorExpr, hbar: f64, pairs: &[(AnalyticFunction, AnalyticFunction)], eps: f64) -> Result<f64> {
    let mut r: f64 = 0.0;
    for (f, g) in pairs {
        let a = inner_product(&apply_fn(op, f)?, g, hbar, eps)?;
        let b = inner_product(f, &apply_fn(op, g)?, hbar, eps)?;
        r = r.max((a - b).norm());
    }
    Ok(r)
}

/// |<A f, g> - <f, A g>| for one of the four symmetrized operators.
pub fn check_selfadjoint(op: &SymmetrizedOp, f: &AnalyticFunction, g: &AnalyticFunction, cfg: &VerifyConfig) -> CheckReport {
    check_selfadjoint_pairs(op, &[(f.clone(), g.clone())], cfg)
}

fn check_selfadjoint_pairs(op: &SymmetrizedOp, pairs: &[(AnalyticFunction, AnalyticFunction)], cfg: &VerifyConfig) -> CheckReport {
    let name = format!("selfadjoint.{}.hbar_{}", op.kind.name(), op.hbar);
    let p = params(&[
        ("lambda", op.lambda.to_string()),
        ("hbar", op.hbar.to_string()),
        ("pairs", pairs.iter().map(|(f, g)| format!("{}/{}", f.name(), g.name())).collect::<Vec<_>>().join(" ")),
    ]);
    CheckReport::from_result(&name, p, symmetric_residual(&op.expand(), op.hbar, pairs, cfg.eps), cfg.tol.adjoint, "battery pairs")
}

/// Self-adjoint convolution operators built from a real kernel V.
pub fn sacon_ops(v: &AnalyticFunction, hbar: f64, shift: f64) -> Vec<(&'static str, OperatorExpr)> {
    let tv = tau_fn(&v.conj(), hbar + shift, -1.0);
    let sym = v.add(&tv).scale(c(0.5, 0.0));
    let anti = v.sub(&tv).scale(c(0.0, 0.5));
    let t = tau(hbar + shift);
    vec![
        ("sym", OperatorExpr::Conv(sym)),
        ("antisym", OperatorExpr::Conv(anti)),
        ("pretau", compose(vec![t.clone(), OperatorExpr::Conv(v.clone())])),
        ("posttau", compose(vec![OperatorExpr::Conv(v.clone()), t])),
    ]
}

/// <Zsym_- f^+, g^+> = 0: Zsym_- maps the tau-even space to the tau-odd one.
pub fn check_eigenspace(hbar: f64, cfg: &VerifyConfig) -> CheckReport {
    let lambda = lambda_for(hbar);
    let op = SymmetrizedOp { kind: SymKind::ZsymMinus, lambda, hbar, tau_shift: cfg.tau_shift };
    let run = || -> Result<f64> {
        let fp = project_tau(&gaussian(), hbar, Sign::Plus);
        let gp = project_tau(&log_gaussian(1.0), hbar, Sign::Plus);
        Ok(inner_product(&apply_fn(&op.expand(), &fp)?, &gp, hbar, cfg.eps)?.norm())
    };
    let p = params(&[("lambda", lambda.to_string()), ("hbar", hbar.to_string()), ("f", "gaussian^+".into()), ("g", "log_gaussian^+".into())]);
    CheckReport::from_result(&format!("selfadjoint.eigenspace.hbar_{}", hbar), p, run(), cfg.tol.adjoint, "tau projections of battery functions")
}

// ------------------------------------------------------------------ anticommutation

/// Zhat o H_a + H_a o Zhat and [Zhat, Delta_a] on f, a = 2/(1+hbar).
pub fn check_anticommute_flip(lambda: f64, hbar: f64, f: &AnalyticFunction, cfg: &VerifyConfig) -> CheckReport {
    let a = 2.0 / (1.0 + hbar);
    let ts = t_points(cfg);
    let run = || -> Result<f64> {
        let mut r: f64 = 0.0;
        for kind in [SymKind::ZhatPlus, SymKind::ZhatMinus] {
            let z = SymmetrizedOp { kind, lambda, hbar, tau_shift: cfg.tau_shift }.expand();
            let anti = commutator(&z, &h(a), true);
            r = r.max(op_residual(&anti, &zero_op(), f, &ts)?);
            let comm = commutator(&z, &delta(a), false);
            r = r.max(op_residual(&comm, &zero_op(), f, &ts)?);
        }
        Ok(r)
    };
    let p = params(&[
        ("lambda", lambda.to_string()),
        ("hbar", hbar.to_string()),
        ("alpha", a.to_string()),
        ("f", f.name().into()),
        ("seed", cfg.seed.to_string()),
    ]);
    CheckReport::from_result(&format!("anticommute.{}.hbar_{}", f.name(), hbar), p, run(), cfg.tol.adjoint, "seeded t points")
}

// ------------------------------------------------------------------ uncertainty

/// Orthogonality <f, tau f> = 0, unit variance of tau, and nonnegative slack of
/// <Zhat_+ f, Zhat_+ f> - |<f, Zsym_+ f>|^2 - |<f, Zsym_- f>|^2 for normalized f.
pub fn check_uncertainty(f: &AnalyticFunction, lambda: f64, hbar: f64, cfg: &VerifyConfig) -> CheckReport {
    let name = format!("uncertainty.{}.hbar_{}", f.name(), hbar);
    let mut p = params(&[("lambda", lambda.to_string()), ("hbar", hbar.to_string()), ("f", f.name().into())]);
    let run = |p: &mut BTreeMap<String, String>| -> Result<f64> {
        let (a, b) = f.support();
        if !(a >= 1.0 || b <= 1.0) {
            return Err(ZError::Hypothesis(format!("support [{}, {}] of {} straddles 1", a, b, f.name())));
        }
        let nrm = inner_product(f, f, hbar, cfg.eps)?.re.sqrt();
        let f = f.scale(c(1.0 / nrm, 0.0));
        let t = tau(hbar + cfg.tau_shift);
        let tf = apply_fn(&t, &f)?;
        let orth = inner_product(&f, &tf, hbar, cfg.eps)?.norm();
        let sigma2 = inner_product(&f, &apply_fn(&t, &tf)?, hbar, cfg.eps)?.re - orth * orth;
        let op = |k: SymKind| SymmetrizedOp { kind: k, lambda, hbar, tau_shift: cfg.tau_shift }.expand();
        let zf = apply_fn(&op(SymKind::ZhatPlus), &f)?;
        let lhs = inner_product(&zf, &zf, hbar, cfg.eps)?.re;
        let sp = inner_product(&f, &apply_fn(&op(SymKind::ZsymPlus), &f)?, hbar, cfg.eps)?.norm();
        let sm = inner_product(&f, &apply_fn(&op(SymKind::ZsymMinus), &f)?, hbar, cfg.eps)?.norm();
        let slack = lhs - sp * sp - sm * sm;
        p.insert("orthogonality".into(), format!("{:e}", orth));
        p.insert("sigma2".into(), format!("{}", sigma2));
        p.insert("slack".into(), format!("{}", slack));
        let var_err = (sigma2 - 1.0).abs();
        Ok(orth.max((-slack).max(0.0)).max(if var_err > cfg.tol.variance { var_err } else { 0.0 }))
    };
    let r = run(&mut p);
    CheckReport::from_result(&name, p, r, cfg.tol.orthogonality, "compactly supported bump")
}

// ------------------------------------------------------------------ convolution compatibility

/// H Z (f * g) against (H Z f) * g and f * (H Z g); tau^mu (f * g) against
/// |mu| (tau^mu f * tau^mu g); Zhat o c_V against c_{tau V} o Zhat.
pub fn check_convolution_compat(lambda: f64, hbar: f64, f: &AnalyticFunction, g: &AnalyticFunction, cfg: &VerifyConfig) -> CheckReport {
    let ts = t_points(cfg);
    let mut p = params(&[("lambda", lambda.to_string()), ("hbar", hbar.to_string()), ("f", f.name().into()), ("g", g.name().into())]);
    let run = |p: &mut BTreeMap<String, String>| -> Result<f64> {
        let a = hz(lambda);
        let cg = OperatorExpr::Conv(g.clone());
        let hz_left = op_residual(&compose(vec![a.clone(), cg.clone()]), &compose(vec![cg.clone(), a.clone()]), f, &ts)?;
        let hzg = OperatorExpr::Conv(apply_fn(&a, g)?);
        let hz_right = op_residual(&compose(vec![a.clone(), cg.clone()]), &hzg, f, &ts)?;
        let mut tau_mu: f64 = 0.0;
        for mu in [-1.0, 2.0, -0.5] {
            let t = OperatorExpr::Tau { hbar: hbar + cfg.tau_shift, mu };
            let lhs = compose(vec![t.clone(), cg.clone()]);
            let rhs = scaled(c(f64::abs(mu), 0.0), compose(vec![OperatorExpr::Conv(tau_fn(g, hbar, mu)), t]));
            tau_mu = tau_mu.max(op_residual(&lhs, &rhs, f, &ts)?);
        }
        let mut hconv: f64 = 0.0;
        let tv = OperatorExpr::Conv(tau_fn(g, hbar, -1.0));
        for kind in [SymKind::ZhatPlus, SymKind::ZhatMinus] {
            let z = SymmetrizedOp { kind, lambda, hbar, tau_shift: cfg.tau_shift }.expand();
            hconv = hconv.max(op_residual(&compose(vec![z.clone(), cg.clone()]), &compose(vec![tv.clone(), z]), f, &ts)?);
        }
        p.insert("hz_left".into(), format!("{:e}", hz_left));
        p.insert("hz_right".into(), format!("{:e}", hz_right));
        p.insert("tau_mu".into(), format!("{:e}", tau_mu));
        p.insert("hconv".into(), format!("{:e}", hconv));
        Ok(hz_left.max(hz_right).max(tau_mu).max(hconv))
    };
    let r = run(&mut p);
    CheckReport::from_result(&format!("convolution.compat.hbar_{}", hbar), p, r, cfg.tol.commute, "seeded t points")
}

/// Zsym_+- o c_V = c_V o Zsym_+- for V with conj(tau V) = V.
pub fn check_zsym_convolution(hbar: f64, f: &AnalyticFunction, cfg: &VerifyConfig) -> CheckReport {
    let lambda = lambda_for(hbar);
    let ts = t_points(cfg);
    let v = power_log_gaussian(1.0, c(-(1.0 + hbar) / 2.0, 0.0));
    let run = || -> Result<f64> {
        let cv = OperatorExpr::Conv(v.clone());
        let mut r: f64 = 0.0;
        for kind in [SymKind::ZsymPlus, SymKind::ZsymMinus] {
            let z = SymmetrizedOp { kind, lambda, hbar, tau_shift: cfg.tau_shift }.expand();
            r = r.max(op_residual(&compose(vec![z.clone(), cv.clone()]), &compose(vec![cv.clone(), z]), f, &ts)?);
        }
        Ok(r)
    };
    let p = params(&[("lambda", lambda.to_string()), ("hbar", hbar.to_string()), ("f", f.name().into()), ("v", v.name().into())]);
    CheckReport::from_result(&format!("convolution.zsym_commute.hbar_{}", hbar), p, run(), cfg.tol.commute, "tau-symmetric kernel")
}

/// H_a and d_b act on either factor of a convolution.
pub fn check_convolution_local(f: &AnalyticFunction, g: &AnalyticFunction, cfg: &VerifyConfig) -> CheckReport {
    let ts = t_points(cfg);
    let run = || -> Result<f64> {
        let cg = OperatorExpr::Conv(g.clone());
        let mut r: f64 = 0.0;
        for op in [h(0.7), h(-1.3), OperatorExpr::Dilation(2.0), OperatorExpr::Dilation(0.6)] {
            let lhs = compose(vec![op.clone(), cg.clone()]);
            r = r.max(op_residual(&lhs, &compose(vec![cg.clone(), op.clone()]), f, &ts)?);
            r = r.max(op_residual(&lhs, &OperatorExpr::Conv(apply_fn(&op, g)?), f, &ts)?);
        }
        Ok(r)
    };
    let p = params(&[("f", f.name().into()), ("g", g.name().into()), ("ops", "H 0.7, H -1.3, d 2, d 0.6".into())]);
    CheckReport::from_result("convolution.local_operators", p, run(), cfg.tol.commute, "seeded t points")
}

// ------------------------------------------------------------------ commutation battery

/// H_a tau^mu and tau^mu H_a rewritten with the other order, plus the
/// anticommutation at a = 2/(1+hbar).
pub fn check_comrel(hbar: f64, cfg: &VerifyConfig) -> CheckReport {
    let ts = t_points(cfg);
    let w = 1.0 + hbar;
    let f = gaussian();
    let run = || -> Result<f64> {
        let mut r: f64 = 0.0;
        for alpha in [0.7, -1.3] {
            for mu in [-1.0, 2.0, 0.5] {
                let t = OperatorExpr::Tau { hbar: hbar + cfg.tau_shift, mu };
                let k1 = 1.0 + alpha * mu * w;
                if k1.abs() > 1e-6 {
                    let lhs = compose(vec![h(alpha), t.clone()]);
                    let rhs = scaled(c(k1, 0.0), compose(vec![t.clone(), h(alpha * mu / k1)]));
                    r = r.max(op_residual(&lhs, &rhs, &f, &ts)?);
                }
                let k2 = 1.0 - alpha * w;
                if k2.abs() > 1e-6 {
                    let lhs = compose(vec![t.clone(), h(alpha)]);
                    let rhs = scaled(c(k2, 0.0), compose(vec![h(alpha / (mu * k2)), t.clone()]));
                    r = r.max(op_residual(&lhs, &rhs, &f, &ts)?);
                }
            }
        }
        let a = 2.0 / w;
        let t = tau(hbar + cfg.tau_shift);
        r = r.max(op_residual(&commutator(&h(a), &t, true), &zero_op(), &f, &ts)?);
        Ok(r)
    };
    let p = params(&[("hbar", hbar.to_string()), ("alpha", "0.7 -1.3".into()), ("mu", "-1 2 0.5".into()), ("f", f.name().into())]);
    CheckReport::from_result(&format!("comrel.hbar_{}", hbar), p, run(), cfg.tol.commute, "seeded t points")
}

/// ((H Z)^n)* = tau (H Z)^n tau, as an adjunction residual.
pub fn check_hermitri(n: usize, hbar: f64, cfg: &VerifyConfig) -> CheckReport {
    let lambda = lambda_for(hbar);
    let mut ops = Vec::new();
    for _ in 0..n {
        ops.push(h(lambda));
        ops.push(OperatorExpr::Zeta(lambda));
    }
    let op = compose(ops.clone());
    let t = tau(hbar + cfg.tau_shift);
    let mut adj = vec![t.clone()];
    adj.extend(ops);
    adj.push(t);
    let adj = compose(adj);
    let run = || -> Result<f64> {
        let ps = [(gaussian(), log_gaussian(1.0)), (exp_neg_t(), bump(1.5, 3.0))];
        let mut r: f64 = 0.0;
        for (f, g) in &ps {
            let a = inner_product(&apply_fn(&op, f)?, g, hbar, cfg.eps)?;
            let b = inner_product(f, &apply_fn(&adj, g)?, hbar, cfg.eps)?;
            r = r.max((a - b).norm());
        }
        Ok(r)
    };
    let p = params(&[("n", n.to_string()), ("lambda", lambda.to_string()), ("hbar", hbar.to_string())]);
    CheckReport::from_result(&format!("hermitri.n_{}.hbar_{}", n, hbar), p, run(), cfg.tol.adjoint, "fixed function pairs")
}

/// Commutators of the symmetrizations with tau against those of H Z.
pub fn check_commutators(hbar: f64, cfg: &VerifyConfig) -> CheckReport {
    let lambda = lambda_for(hbar);
    let ts = t_points(cfg);
    let f = gaussian();
    let run = || -> Result<f64> {
        let a = hz(lambda);
        let t = tau(hbar + cfg.tau_shift);
        let zp = SymmetrizedOp { kind: SymKind::ZsymPlus, lambda, hbar, tau_shift: cfg.tau_shift }.expand();
        let zm = SymmetrizedOp { kind: SymKind::ZsymMinus, lambda, hbar, tau_shift: cfg.tau_shift }.expand();
        let at_m = commutator(&a, &t, false);
        let at_p = commutator(&a, &t, true);
        let i2 = c(0.0, 2.0);
        let checks = vec![
            // first family
            (scaled(i2, commutator(&zp, &t, false)), zero_op()),
            (scaled(i2, commutator(&zm, &t, false)), scaled(c(-2.0, 0.0), at_m.clone())),
            (scaled(c(2.0, 0.0), commutator(&zp, &t, true)), scaled(c(2.0, 0.0), at_p.clone())),
            (scaled(c(2.0, 0.0), commutator(&zm, &t, true)), zero_op()),
            // second family
            (scaled(c(0.0, 1.0), commutator(&at_m, &t, true)), zero_op()),
            (scaled(c(0.0, 1.0), commutator(&at_m, &t, false)), scaled(c(4.0, 0.0), zm.clone())),
            (commutator(&at_p, &t, true), scaled(c(4.0, 0.0), zp.clone())),
            (commutator(&at_p, &t, false), zero_op()),
        ];
        let mut r: f64 = 0.0;
        for (l, rr) in &checks {
            r = r.max(op_residual(l, rr, &f, &ts)?);
        }
        Ok(r)
    };
    let p = params(&[("lambda", lambda.to_string()), ("hbar", hbar.to_string()), ("f", f.name().into())]);
    CheckReport::from_result(&format!("commutators.hbar_{}", hbar), p, run(), cfg.tol.commute, "seeded t points")
}

fn pos_map(a: &OperatorExpr, hbar: f64, t: &OperatorExpr, negative: bool) -> Result<OperatorExpr> {
    let adj = adjoint(a, hbar)?;
    let (k1, k2) = if negative { (c(0.0, 0.5), c(0.0, -0.5)) } else { (c(0.5, 0.0), c(0.5, 0.0)) };
    Ok(lincomb(vec![(k1, compose(vec![t.clone(), a.clone()])), (k2, compose(vec![adj, t.clone()]))]))
}

fn con_map(a: &OperatorExpr, hbar: f64, t: &OperatorExpr) -> Result<OperatorExpr> {
    Ok(compose(vec![t.clone(), adjoint(a, hbar)?, t.clone()]))
}

/// Iterates of A -> (tau A + A* tau)/2 and of its negative version
/// A -> i(tau A - A* tau)/2: P^3 = (id +- Con)/2 o P and P^4 = P^2.
pub fn check_iterpos(hbar: f64, cfg: &VerifyConfig) -> CheckReport {
    let lambda = lambda_for(hbar);
    let ts = t_points(cfg);
    let f = gaussian();
    let run = || -> Result<f64> {
        let t = tau(hbar + cfg.tau_shift);
        let a = compose(vec![OperatorExpr::Dilation(2.0), h(lambda), OperatorExpr::Zeta(lambda)]);
        let mut r: f64 = 0.0;
        for negative in [false, true] {
            let p1 = pos_map(&a, hbar, &t, negative)?;
            let p2 = pos_map(&p1, hbar, &t, negative)?;
            let p3 = pos_map(&p2, hbar, &t, negative)?;
            let p4 = pos_map(&p3, hbar, &t, negative)?;
            let sg = if negative { -1.0 } else { 1.0 };
            let rhs = lincomb(vec![(c(0.5 * sg, 0.0), p1.clone()), (c(0.5, 0.0), con_map(&p1, hbar, &t)?)]);
            r = r.max(op_residual(&p3, &rhs, &f, &ts)?);
            r = r.max(op_residual(&p4, &p2, &f, &ts)?);
        }
        Ok(r)
    };
    let p = params(&[("hbar", hbar.to_string()), ("a", "d 2 o H Z".into()), ("lambda", lambda.to_string())]);
    CheckReport::from_result(&format!("iterpos.hbar_{}", hbar), p, run(), cfg.tol.commute, "seeded t points")
}

/// tau o tau = id.
pub fn check_tau_involution(hbar: f64, cfg: &VerifyConfig) -> CheckReport {
    let ts = t_points(cfg);
    let t = tau(hbar + cfg.tau_shift);
    let run = || -> Result<f64> {
        let mut r: f64 = 0.0;
        for f in battery() {
            r = r.max(op_residual(&compose(vec![t.clone(), t.clone()]), &identity(), &f, &ts)?);
        }
        Ok(r)
    };
    CheckReport::from_result(&format!("tau.involution.hbar_{}", hbar), params(&[("hbar", hbar.to_string())]), run(), cfg.tol.commute, "battery")
}

// ------------------------------------------------------------------ Mellin multipliers

/// M[Zsym f]((1+hbar)/2 + s/lambda) = multiplier(s) M[f](same point).
pub fn check_mh(kind: SymKind, hbar: f64, cfg: &VerifyConfig) -> CheckReport {
    let lambda = lambda_for(hbar);
    let f = gaussian();
    let s_vals = [c(0.2, 3.0), c(-0.3, 1.0), c(0.6, -2.0)];
    let (gp, gm) = if kind == SymKind::ZsymPlus { (1.0, 0.0) } else { (0.0, 1.0) };
    let run = || -> Result<f64> {
        let z = apply_fn(&SymmetrizedOp { kind, lambda, hbar, tau_shift: cfg.tau_shift }.expand(), &f)?;
        let mut r: f64 = 0.0;
        for &s in &s_vals {
            let w = s / lambda + (1.0 + hbar) / 2.0;
            let lhs = mellin_point(&z, w, cfg.eps)?;
            let rhs = mh_multiplier(lambda, hbar, gp, gm, s)? * mellin_point(&f, w, cfg.eps)?;
            r = r.max((lhs - rhs).norm());
        }
        Ok(r)
    };
    let p = params(&[("lambda", lambda.to_string()), ("hbar", hbar.to_string()), ("f", f.name().into())]);
    CheckReport::from_result(&format!("mellin.multiplier.{}.hbar_{}", kind.name(), hbar), p, run(), cfg.tol.adjoint, "fixed s points")
}

/// H Z on sum a_n t^{-n} multiplies each term by (1 - lambda n) zeta(lambda n).
pub fn check_infoapp(cfg: &VerifyConfig) -> CheckReport {
    let lambda = 1.5;
    let coef = [1.0, -0.5, 0.25, 0.3, -0.1];
    let run = || -> Result<f64> {
        let mut f = power(c(-1.0, 0.0)).scale(c(coef[0], 0.0));
        for (k, a) in coef.iter().enumerate().skip(1) {
            f = f.add(&power(c(-(k as f64 + 1.0), 0.0)).scale(c(*a, 0.0)));
        }
        let g = apply_fn(&hz(lambda), &f)?;
        let mut r: f64 = 0.0;
        for t in [0.7f64, 1.5, 3.0] {
            let mut want = c(0.0, 0.0);
            for (k, a) in coef.iter().enumerate() {
                let n = k as f64 + 1.0;
                want += zeta_ref(c(lambda * n, 0.0))? * ((1.0 - lambda * n) * a * t.powf(-n));
            }
            let got = g.eval(t)?;
            r = r.max((got - want).norm() / want.norm().max(1.0));
        }
        Ok(r)
    };
    let p = params(&[("lambda", lambda.to_string()), ("coefficients", format!("{:?}", coef))]);
    CheckReport::from_result("operators.power_series_multiplier", p, run(), cfg.tol.adjoint, "fixed coefficients")
}

// ------------------------------------------------------------------ special functions

/// M[e^{-rho ln^2 t}](s) = sqrt(pi/rho) e^{s^2/(4 rho)}.
pub fn check_polyi(rho: f64, cfg: &VerifyConfig) -> CheckReport {
    let s_vals = polyi_s_values(rho);
    let run = || -> Result<f64> {
        let f = log_gaussian(rho);
        let mut r: f64 = 0.0;
        for &s in &s_vals {
            let want = (s * s / (4.0 * rho)).exp() * (PI / rho).sqrt();
            r = r.max((mellin_point(&f, s, cfg.eps)? - want).norm());
        }
        Ok(r)
    };
    let p = params(&[("rho", rho.to_string()), ("s", s_vals.iter().map(|s| fmt_s(*s)).collect::<Vec<_>>().join(" "))]);
    CheckReport::from_result(&format!("polyi.rho_{}", rho), p, run(), cfg.tol.polyi, "fixed s points")
}

/// Ten s values where the closed form stays of moderate size.
pub fn polyi_s_values(rho: f64) -> Vec<C64> {
    let r = (4.0 * rho).sqrt();
    [(0.0, 0.0), (0.5, 0.0), (-0.7, 0.3), (0.3, 1.0), (1.0, -1.2), (-1.1, -0.6), (0.2, 2.0), (1.4, 0.8), (-0.4, 1.6), (0.9, 2.4)]
        .iter()
        .map(|&(a, b)| c(a * r, b * r))
        .collect()
}

/// H_4 Delta_4^n Psi(1) from the exact series against the closed forms, n = 0..=4.
pub fn check_iteration_psi(cfg: &VerifyConfig) -> CheckReport {
    let run = || -> Result<f64> {
        let mut r: f64 = 0.0;
        for n in 0..=4 {
            let v = psi_n(n)?.apply_h(&crate::special::rat(4, 1)).eval_precise(1.0)?;
            let want = iteration_closed_form(n, 0, 4.0, 1.0, IterWhich::HPsiAt1, Sign::Plus)?;
            r = r.max((v - want).abs());
        }
        Ok(r)
    };
    CheckReport::from_result("iteration.psi", params(&[("n", "0..=4".into())]), run(), cfg.tol.iteration, "theta series")
}

/// Delta_4 Psi > 0 and H_4 Psi < 0 on 200 points of [1, 20]; residual counts violations.
pub fn check_kernel_signs(_cfg: &VerifyConfig) -> CheckReport {
    let run = || -> Result<f64> {
        let d = psi_n(1)?;
        let hs = ExpPolySeries::psi().apply_h(&crate::special::rat(4, 1));
        let mut bad = 0;
        for i in 0..200 {
            let t = 1.0 + 19.0 * i as f64 / 199.0;
            if !(d.eval_precise(t)? > 0.0) {
                bad += 1;
            }
            if !(hs.eval_precise(t)? < 0.0) {
                bad += 1;
            }
        }
        Ok(bad as f64)
    };
    CheckReport::from_result("iteration.kernel_signs", params(&[("points", "200 in [1,20]".into())]), run(), 0.0, "uniform grid")
}

/// Synthetic solutions of the reflection equation reproduce the closed forms at t = 1.
pub fn check_funci1(m: usize, sign: Sign, cfg: &VerifyConfig) -> CheckReport {
    let (alpha, cc) = (2.5, 1.3);
    let which = match (m % 2, sign) {
        (1, Sign::Plus) | (0, Sign::Minus) => IterWhich::PsiAt1,
        _ => IterWhich::HPsiAt1,
    };
    let run = || -> Result<f64> {
        let mut g = synthetic_funci1(m, alpha, cc, sign, &gaussian());
        let mut r: f64 = 0.0;
        for n in 0..=3 {
            if n > 0 {
                g = apply_fn(&delta(alpha), &g)?;
            }
            let v = match which {
                IterWhich::PsiAt1 => g.eval(1.0)?,
                IterWhich::HPsiAt1 => apply_fn(&h(alpha), &g)?.eval(1.0)?,
            };
            let want = iteration_closed_form(n, m, alpha, cc, which, sign)?;
            r = r.max((v.re - want).abs().max(v.im.abs()));
        }
        Ok(r)
    };
    let sg = if sign == Sign::Plus { "plus" } else { "minus" };
    let p = params(&[("m", m.to_string()), ("sign", sg.into()), ("alpha", alpha.to_string()), ("c", cc.to_string()), ("n", "0..=3".into())]);
    CheckReport::from_result(&format!("iteration.funci.m_{}.{}", m, sg), p, run(), cfg.tol.funci, "gaussian seed")
}

/// R(FG) = RF RG - R(RF G) - R(F RG) for the one-sided lattice sum R.
pub fn check_rota_baxter(cfg: &VerifyConfig) -> CheckReport {
    let xs = [-1.3, -0.4, 0.0, 0.7, 1.9];
    let run = || -> Result<f64> {
        let eps = 1e-16;
        let f = |x: f64| (-x * x).exp();
        let g = |x: f64| (-(x - 0.3) * (x - 0.3) / 2.0).exp();
        let rf = |x: f64| rota_baxter_r(f, None, x, eps).unwrap_or(f64::NAN);
        let rg = |x: f64| rota_baxter_r(g, None, x, eps).unwrap_or(f64::NAN);
        let mut r: f64 = 0.0;
        for &x in &xs {
            let lhs = rota_baxter_r(|y| f(y) * g(y), None, x, eps)?;
            let rhs = rf(x) * rg(x) - rota_baxter_r(|y| rf(y) * g(y), None, x, eps)? - rota_baxter_r(|y| f(y) * rg(y), None, x, eps)?;
            r = r.max((lhs - rhs).abs());
        }
        Ok(r)
    };
    let p = params(&[("F", "exp(-x^2)".into()), ("G", "exp(-(x-0.3)^2/2)".into()), ("x", format!("{:?}", xs))]);
    CheckReport::from_result("rota_baxter.gaussians", p, run(), cfg.tol.rota_baxter, "fixed x values")
}

// ------------------------------------------------------------------ Mellin

/// Line transform followed by its inverse reproduces the sampled function.
pub fn check_mellin_roundtrip(cfg: &VerifyConfig) -> CheckReport {
    let run = || -> Result<f64> {
        let g = crate::funcspace::sample(&power_log_gaussian(0.8, c(0.3, 0.0)), &cfg.grid)?;
        let back = mellin_line_inverse(&mellin_line(&g, 0.4));
        Ok(back.max_abs_diff(&g))
    };
    CheckReport::from_result("mellin.line_roundtrip", params(&[("c", "0.4".into())]), run(), cfg.tol.mellin, "log-gaussian on the config grid")
}

/// M[f * g] = M[f] M[g] at fixed points.
pub fn check_convolution_theorem(cfg: &VerifyConfig) -> CheckReport {
    let run = || -> Result<f64> {
        let f = exp_neg_t();
        let g = exp_power(2.0, 1.0);
        let fg = conv_fn(&f, &g);
        let mut r: f64 = 0.0;
        for s in [c(0.5, 0.0), c(1.5, 2.0), c(0.8, -4.0)] {
            let want = mellin_point(&f, s, cfg.eps)? * mellin_point(&g, s, cfg.eps)?;
            r = r.max((mellin_point(&fg, s, cfg.eps)? - want).norm());
        }
        Ok(r)
    };
    CheckReport::from_result("mellin.convolution_theorem", params(&[("f", "exp_neg_t".into()), ("g", "exp(-2t)".into())]), run(), cfg.tol.mellin, "fixed s points")
}

// ------------------------------------------------------------------ Xi and continuation

fn xi_points(seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..4).map(|_| c(rng.gen_range(0.05..0.95), rng.gen_range(-20.0..20.0))).collect()
}

/// Direct, integral and integrated-by-parts engines agree.
pub fn check_xi_engines(cfg: &VerifyConfig) -> CheckReport {
    let pts = xi_points(cfg.seed);
    let run = || -> Result<f64> {
        let mut r: f64 = 0.0;
        for &s in &pts {
            let d = xi(s, XiEngine::Direct, cfg.eps)?;
            r = r.max((xi(s, XiEngine::Integral, cfg.eps)? - d).norm());
            for n in 0..=4 {
                r = r.max((xi(s, XiEngine::Ibp(n), cfg.eps)? - d).norm());
            }
        }
        Ok(r)
    };
    let p = params(&[("points", pts.iter().map(|s| fmt_s(*s)).collect::<Vec<_>>().join(" ")), ("seed", cfg.seed.to_string())]);
    CheckReport::from_result("xi.cross_engine", p, run(), cfg.tol.xi, "seeded points in the strip")
}

pub fn check_xi_symmetry(cfg: &VerifyConfig) -> CheckReport {
    let pts = xi_points(cfg.seed.wrapping_add(1));
    let run = || -> Result<f64> {
        let mut r: f64 = 0.0;
        for &s in &pts {
            r = r.max((xi_direct(s)? - xi_direct(1.0 - s)?).norm());
        }
        Ok(r)
    };
    let p = params(&[("points", pts.iter().map(|s| fmt_s(*s)).collect::<Vec<_>>().join(" "))]);
    CheckReport::from_result("xi.functional_equation", p, run(), cfg.tol.xi, "seeded points in the strip")
}

/// The general continuation reproduces zeta(s) M[f](s/lambda).
pub fn check_continuation(cfg: &VerifyConfig) -> CheckReport {
    let run = || -> Result<f64> {
        let mut r: f64 = 0.0;
        let f = exp_power(PI, 1.0);
        for s in [c(0.3, 2.0), c(0.7, -5.0), c(1.5, 1.0)] {
            r = r.max((continue_general(&f, 2.0, s, cfg.eps)? - xi_direct(s)?).norm());
        }
        let g = exp_neg_t();
        for s in [c(0.4, 1.0), c(0.6, -3.0), c(2.0, 0.5)] {
            r = r.max((continue_general(&g, 1.0, s, cfg.eps)? - zeta_ref(s)? * gamma_ref(s)?).norm());
        }
        Ok(r)
    };
    let p = params(&[("cases", "exp(-pi t) lambda 2; exp(-t) lambda 1".into())]);
    CheckReport::from_result("xi.continuation", p, run(), cfg.tol.psc, "fixed s points")
}

/// Sign-change scan and argument principle agree on the zero count up to height 50.
pub fn check_zero_count(_cfg: &VerifyConfig) -> CheckReport {
    let mut p = params(&[("height", "50".into())]);
    let run = |p: &mut BTreeMap<String, String>| -> Result<f64> {
        let scan = find_critical_zeros(50.0, 1e-9)?.len() as i64;
        let arg = count_zeros_rectangle(&|s| xi_direct(s), Rect { re: (0.2, 0.8), im: (1.0, 50.0) })?;
        p.insert("scan".into(), scan.to_string());
        p.insert("argument".into(), arg.to_string());
        Ok((scan - arg).abs() as f64)
    };
    let r = run(&mut p);
    CheckReport::from_result("zeros.count", p, r, 0.0, "scan versus contour")
}

// ------------------------------------------------------------------ heat flow

pub fn check_equisym_identity(m: usize, variant: HeatVariant, cfg: &VerifyConfig) -> CheckReport {
    let rho = 0.05;
    let run = || -> Result<f64> {
        let mut r: f64 = 0.0;
        for s in [c(0.3, 2.0), c(-0.6, 0.7), c(0.1, -1.5)] {
            let want = equisym_closed(rho, m, s, variant);
            r = r.max((equisym_fn(rho, m, s, variant, 1e-16)? - want).norm() / want.norm().max(1.0));
        }
        Ok(r)
    };
    let v = if variant == HeatVariant::Plain { "plain" } else { "tilde" };
    let p = params(&[("m", m.to_string()), ("rho", rho.to_string()), ("variant", v.into())]);
    CheckReport::from_result(&format!("heat.identity.{}.m_{}", v, m), p, run(), cfg.tol.mellin, "fixed s points")
}

pub fn check_equisym_roots(m: usize, variant: HeatVariant, cfg: &VerifyConfig) -> CheckReport {
    let rho = 0.05;
    let run = || -> Result<f64> {
        let roots = equisym_roots(m, rho, 3, variant)?;
        Ok(roots.iter().map(|r| (r.located - r.predicted).norm()).fold(0.0, f64::max))
    };
    let v = if variant == HeatVariant::Plain { "plain" } else { "tilde" };
    let p = params(&[("m", m.to_string()), ("rho", rho.to_string()), ("variant", v.into()), ("k_max", "3".into())]);
    CheckReport::from_result(&format!("heat.roots.{}.m_{}", v, m), p, run(), cfg.tol.equisym, "predicted lattice")
}

// ------------------------------------------------------------------ suite

type Task = (String, Arc<dyn Fn(&VerifyConfig) -> CheckReport + Send + Sync>);

fn task<F: Fn(&VerifyConfig) -> CheckReport + Send + Sync + 'static>(name: String, f: F) -> Task {
    (name, Arc::new(f))
}

fn fmt_h(hbar: f64) -> String {
    format!("{}", hbar)
}

/// Every check in the suite, by name.
fn tasks(cfg: &VerifyConfig) -> Vec<Task> {
    let mut v: Vec<Task> = Vec::new();
    for (fname, f) in [("exp_neg_t", exp_neg_t()), ("gaussian", gaussian())] {
        for lambda in [1.0, 2.0] {
            let f = f.clone();
            v.push(task(format!("psc.{}.lambda_{}", fname, lambda), move |c| check_psc(&f, lambda, &psc_s_grid(), c)));
        }
    }
    for &hb in &cfg.hbars {
        let lambda = lambda_for(hb);
        let subst = OperatorExpr::Subst(Subst { weight: log_gaussian(1.0), map: SubstMap::Power { c: 1.0, p: 2.0 } });
        let adj_ops: Vec<(&str, OperatorExpr, AnalyticFunction, AnalyticFunction)> = vec![
            ("dilation", OperatorExpr::Dilation(2.0), gaussian(), exp_power(0.5, 2.0)),
            ("subst_t2", subst, gaussian(), exp_neg_t()),
            ("conv_log_gaussian", OperatorExpr::Conv(log_gaussian(1.0)), gaussian(), log_gaussian(0.5)),
            ("h", h(0.7), gaussian(), log_gaussian(1.0)),
            ("tau_mu2", OperatorExpr::Tau { hbar: hb, mu: 2.0 }, gaussian(), log_gaussian(1.0)),
            ("zeta", OperatorExpr::Zeta(lambda), gaussian(), log_gaussian(1.0)),
        ];
        for (nm, op, f, g) in adj_ops {
            v.push(task(format!("adjoint.{}.hbar_{}", nm, fmt_h(hb)), move |c| {
                let mut r = check_adjoint(&op, hb, &f, &g, c);
                r.params.insert("label".into(), nm.into());
                r
            }));
        }
        for kind in SymKind::all() {
            v.push(task(format!("selfadjoint.{}.hbar_{}", kind.name(), fmt_h(hb)), move |c| {
                check_selfadjoint_pairs(&SymmetrizedOp { kind, lambda, hbar: hb, tau_shift: c.tau_shift }, &pairs(), c)
            }));
        }
        for (i, nm) in ["sym", "antisym", "pretau", "posttau"].iter().enumerate() {
            v.push(task(format!("selfadjoint.sacon_{}.hbar_{}", nm, fmt_h(hb)), move |c| {
                let kernel = power_log_gaussian(1.0, c_re(0.3));
                let (_, op) = sacon_ops(&kernel, hb, c.tau_shift).swap_remove(i);
                let p = params(&[("hbar", hb.to_string()), ("kernel", kernel.name().into()), ("op", op.to_string())]);
                let name = format!("selfadjoint.sacon_{}.hbar_{}", nm, hb);
                CheckReport::from_result(&name, p, symmetric_residual(&op, hb, &pairs(), c.eps), c.tol.adjoint, "battery pairs")
            }));
        }
        v.push(task(format!("selfadjoint.eigenspace.hbar_{}", fmt_h(hb)), move |c| check_eigenspace(hb, c)));
        for (lo, hi) in [(1.5, 3.0), (1.2, 2.0), (2.0, 5.0)] {
            v.push(task(format!("uncertainty.bump[{},{}].hbar_{}", lo, hi, fmt_h(hb)), move |c| {
                check_uncertainty(&bump(lo, hi), lambda, hb, c)
            }));
        }
        v.push(task(format!("comrel.hbar_{}", fmt_h(hb)), move |c| check_comrel(hb, c)));
        v.push(task(format!("tau.involution.hbar_{}", fmt_h(hb)), move |c| check_tau_involution(hb, c)));
    }
    v.push(task("adjoint.itdt.hbar_-1".into(), |c| check_adjoint(&OperatorExpr::ItDt, -1.0, &gaussian(), &log_gaussian(1.0), c)));
    v.push(task("adjoint.itdt.hbar_0.5".into(), |c| check_adjoint(&OperatorExpr::ItDt, 0.5, &gaussian(), &log_gaussian(1.0), c)));
    for hb in [0.0, 0.5] {
        let lambda = lambda_for(hb);
        for f in [gaussian(), exp_neg_t()] {
            v.push(task(format!("anticommute.{}.hbar_{}", f.name(), hb), move |c| check_anticommute_flip(lambda, hb, &f, c)));
        }
        v.push(task(format!("commutators.hbar_{}", hb), move |c| check_commutators(hb, c)));
        v.push(task(format!("iterpos.hbar_{}", hb), move |c| check_iterpos(hb, c)));
        v.push(task(format!("convolution.zsym_commute.hbar_{}", hb), move |c| check_zsym_convolution(hb, &gaussian(), c)));
        v.push(task(format!("mellin.multiplier.zsym_plus.hbar_{}", hb), move |c| check_mh(SymKind::ZsymPlus, hb, c)));
        v.push(task(format!("mellin.multiplier.zsym_minus.hbar_{}", hb), move |c| check_mh(SymKind::ZsymMinus, hb, c)));
    }
    for n in [1, 2] {
        v.push(task(format!("hermitri.n_{}.hbar_0", n), move |c| check_hermitri(n, 0.0, c)));
    }
    v.push(task("convolution.compat.hbar_0".into(), |c| {
        check_convolution_compat(2.0, 0.0, &log_gaussian(1.0), &power_log_gaussian(0.5, c_re(0.2)), c)
    }));
    v.push(task("convolution.compat.hbar_0.5".into(), |c| {
        check_convolution_compat(2.0, 0.5, &gaussian(), &log_gaussian(1.0), c)
    }));
    v.push(task("convolution.local_operators".into(), |c| check_convolution_local(&gaussian(), &log_gaussian(1.0), c)));
    for hb in [0.0, 0.5] {
        v.push(task(format!("cohomology.hbar_{}", hb), move |c| check_cohomology(&grid::fixture_v(), &grid::fixture_f(), &grid::fixture_g(), hb, c)));
    }
    v.push(task("cohomology.odd_factor".into(), check_cohomology_odd_factor));
    v.push(task("cohomology.kernel".into(), check_cohomology_kernel));
    v.push(task("operators.power_series_multiplier".into(), check_infoapp));
    for rho in [0.1, 1.0, 10.0] {
        v.push(task(format!("polyi.rho_{}", rho), move |c| check_polyi(rho, c)));
    }
    v.push(task("iteration.psi".into(), check_iteration_psi));
    v.push(task("iteration.kernel_signs".into(), check_kernel_signs));
    for m in 0..=3 {
        for sign in [Sign::Plus, Sign::Minus] {
            let sg = if sign == Sign::Plus { "plus" } else { "minus" };
            v.push(task(format!("iteration.funci.m_{}.{}", m, sg), move |c| check_funci1(m, sign, c)));
        }
    }
    v.push(task("rota_baxter.gaussians".into(), check_rota_baxter));
    v.push(task("mellin.line_roundtrip".into(), check_mellin_roundtrip));
    v.push(task("mellin.convolution_theorem".into(), check_convolution_theorem));
    v.push(task("xi.cross_engine".into(), check_xi_engines));
    v.push(task("xi.functional_equation".into(), check_xi_symmetry));
    v.push(task("xi.continuation".into(), check_continuation));
    v.push(task("zeros.count".into(), check_zero_count));
    for (m, variant) in [(1, HeatVariant::Plain), (1, HeatVariant::Tilde), (2, HeatVariant::Plain), (2, HeatVariant::Tilde)] {
        let vn = if variant == HeatVariant::Plain { "plain" } else { "tilde" };
        v.push(task(format!("heat.identity.{}.m_{}", vn, m), move |c| check_equisym_identity(m, variant, c)));
        v.push(task(format!("heat.roots.{}.m_{}", vn, m), move |c| check_equisym_roots(m, variant, c)));
    }
    v
}

fn c_re(x: f64) -> C64 {
    c(x, 0.0)
}

/// Names of all checks, in run order.
pub fn check_names(cfg: &VerifyConfig) -> Vec<String> {
    let mut v: Vec<String> = tasks(cfg).into_iter().map(|(n, _)| n).collect();
    v.sort();
    v
}

/// Runs every selected check in parallel; reports sorted by name.
pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckReport> {
    let selected: Vec<Task> = tasks(cfg).into_iter().filter(|(n, _)| cfg.selects(n)).collect();
    let mut out: Vec<CheckReport> = selected
        .par_iter()
        .map(|(n, f)| {
            let mut r = f(cfg);
            r.name = n.clone();
            r
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

/// Adjunction checks of a user-supplied operator over the battery pairs, one per hbar.
pub fn check_op(op: &OperatorExpr, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let mut out: Vec<CheckReport> = cfg
        .hbars
        .par_iter()
        .map(|&hb| {
            let name = format!("op.adjoint.hbar_{}", hb);
            let p = params(&[("op", op.to_string()), ("hbar", hb.to_string())]);
            CheckReport::from_result(&name, p, adjoint_residual(op, hb, &pairs(), cfg), cfg.tol.adjoint, "battery pairs")
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_filter_runs_nothing() {
        assert!(run_all(&VerifyConfig::empty()).is_empty());
    }

    #[test]
    fn names_are_unique() {
        let n = check_names(&VerifyConfig::default());
        let mut d = n.clone();
        d.dedup();
        assert_eq!(n, d);
        assert!(n.len() >= 25);
    }

    #[test]
    fn glob_selection() {
        let cfg = VerifyConfig::with_filter("psc*");
        assert!(cfg.selects("psc.gaussian.lambda_2"));
        assert!(!cfg.selects("polyi.rho_1"));
    }
}
