//! Operator expressions, their application to test functions and their
//! structural adjoints with respect to <f, g>_hbar = int t^hbar conj(f) g dt.

mod sexpr;
mod zeta_sum;

pub use sexpr::{parse_sexpr, to_sexpr};
pub use zeta_sum::zeta_fn;

use crate::error::{Result, ZError};
use crate::funcspace::{fmt_c, power, tau_fn, AnalyticFunction, Decay};
use crate::jet::Jet;
use crate::quad::{find_window, gk_adaptive, Tol};
use crate::{c, C64};
use std::fmt;
use std::sync::Arc;

/// Change of variable t -> g(t) used by substitution operators.
#[derive(Clone)]
pub enum SubstMap {
    /// g(t) = c t^p
    Power { c: f64, p: f64 },
    /// Arbitrary monotone bijection with its inverse and both derivatives.
    Custom {
        g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        ginv: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        dg: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        dginv: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        g_at_0_is_0: bool,
    },
}

impl SubstMap {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            SubstMap::Power { c, p } => c * t.powf(*p),
            SubstMap::Custom { g, .. } => g(t),
        }
    }

    pub fn maps_0_to_0(&self) -> bool {
        match self {
            SubstMap::Power { p, .. } => *p > 0.0,
            SubstMap::Custom { g_at_0_is_0, .. } => *g_at_0_is_0,
        }
    }

    pub fn inverse(&self) -> SubstMap {
        match self {
            SubstMap::Power { c, p } => SubstMap::Power { c: c.powf(-1.0 / p), p: 1.0 / p },
            SubstMap::Custom { g, ginv, dg, dginv, g_at_0_is_0 } => SubstMap::Custom {
                g: ginv.clone(),
                ginv: g.clone(),
                dg: dginv.clone(),
                dginv: dg.clone(),
                g_at_0_is_0: *g_at_0_is_0,
            },
        }
    }
}

impl fmt::Debug for SubstMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubstMap::Power { c, p } => write!(f, "{}t^{}", c, p),
            SubstMap::Custom { .. } => write!(f, "custom"),
        }
    }
}

/// (S f)(t) = P(t) f(g(t)).
#[derive(Clone, Debug)]
pub struct Subst {
    pub weight: AnalyticFunction,
    pub map: SubstMap,
}

#[derive(Clone, Debug)]
pub enum OperatorExpr {
    Dilation(f64),
    Zeta(f64),
    H(C64),
    Delta(C64),
    Tau { hbar: f64, mu: f64 },
    Mult(AnalyticFunction),
    Conv(AnalyticFunction),
    Subst(Subst),
    /// Applied right to left.
    Compose(Vec<OperatorExpr>),
    LinComb(Vec<(C64, OperatorExpr)>),
    Conjugate,
    /// i t d/dt
    ItDt,
}

use OperatorExpr as Op;

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", to_sexpr(self))
    }
}

pub fn identity() -> OperatorExpr {
    Op::Dilation(1.0)
}

pub fn tau(hbar: f64) -> OperatorExpr {
    Op::Tau { hbar, mu: -1.0 }
}

pub fn h(alpha: f64) -> OperatorExpr {
    Op::H(c(alpha, 0.0))
}

pub fn delta(alpha: f64) -> OperatorExpr {
    Op::Delta(c(alpha, 0.0))
}

pub fn compose(ops: Vec<OperatorExpr>) -> OperatorExpr {
    Op::Compose(ops)
}

pub fn lincomb(terms: Vec<(C64, OperatorExpr)>) -> OperatorExpr {
    Op::LinComb(terms)
}

/// a - b
pub fn difference(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr {
    lincomb(vec![(c(1.0, 0.0), a), (c(-1.0, 0.0), b)])
}

pub fn scaled(k: C64, a: OperatorExpr) -> OperatorExpr {
    lincomb(vec![(k, a)])
}

/// [A, B]_- = AB - BA and [A, B]_+ = AB + BA
pub fn commutator(a: &OperatorExpr, b: &OperatorExpr, plus: bool) -> OperatorExpr {
    let s = if plus { 1.0 } else { -1.0 };
    lincomb(vec![
        (c(1.0, 0.0), compose(vec![a.clone(), b.clone()])),
        (c(s, 0.0), compose(vec![b.clone(), a.clone()])),
    ])
}

/// H_lambda Z^lambda
pub fn hz(lambda: f64) -> OperatorExpr {
    compose(vec![h(lambda), Op::Zeta(lambda)])
}

impl OperatorExpr {
    pub fn validate(&self) -> Result<()> {
        match self {
            Op::Compose(v) if v.is_empty() => Err(ZError::Parse("empty composition".into())),
            Op::LinComb(v) if v.is_empty() => Err(ZError::Parse("empty linear combination".into())),
            Op::Compose(v) => v.iter().try_for_each(|o| o.validate()),
            Op::LinComb(v) => v.iter().try_for_each(|(_, o)| o.validate()),
            Op::Dilation(b) if !(*b > 0.0) => Err(ZError::Domain(format!("dilation by {}", b))),
            Op::Zeta(l) if !(*l > 0.0) => Err(ZError::Domain(format!("Z^{}", l))),
            Op::Tau { mu, .. } if *mu == 0.0 => Err(ZError::Domain("tau with mu = 0".into())),
            _ => Ok(()),
        }
    }
}

fn fused_lambda(a: &OperatorExpr, b: &OperatorExpr) -> Option<f64> {
    match (a, b) {
        (Op::H(al), Op::Zeta(l)) | (Op::Zeta(l), Op::H(al)) if al.im == 0.0 && al.re == *l => Some(*l),
        _ => None,
    }
}

/// The function op(f).
pub fn apply_fn(op: &OperatorExpr, f: &AnalyticFunction) -> Result<AnalyticFunction> {
    match op {
        Op::Dilation(beta) => {
            let beta = *beta;
            if beta == 1.0 {
                return Ok(f.clone());
            }
            let g = f.clone();
            let lb = beta.ln();
            let (a, b) = f.support();
            Ok(AnalyticFunction::from_jet_fn(
                &format!("d[{}]({})", beta, f.name()),
                move |x, n| g.log_jet(x + lb, n),
                f.decay_at_0,
                f.decay_at_inf,
            )
            .with_support(a / beta, b / beta))
        }
        Op::Zeta(l) => zeta_fn(f, *l, false),
        Op::H(alpha) => {
            let (g, al) = (f.clone(), *alpha);
            let (a, b) = f.support();
            Ok(AnalyticFunction::from_jet_fn(
                &format!("H[{}]({})", fmt_c(al), f.name()),
                move |x, n| {
                    let j = g.log_jet(x, n + 1)?;
                    Ok(Jet((0..n).map(|k| j.0[k] + al * j.0[k + 1] * (k + 1) as f64).collect()))
                },
                f.decay_at_0,
                f.decay_at_inf,
            )
            .with_support(a, b))
        }
        Op::Delta(alpha) => {
            let (g, al) = (f.clone(), *alpha);
            let (a, b) = f.support();
            Ok(AnalyticFunction::from_jet_fn(
                &format!("Delta[{}]({})", fmt_c(al), f.name()),
                move |x, n| {
                    let j = g.log_jet(x, n + 2)?;
                    Ok(Jet((0..n)
                        .map(|k| {
                            let k1 = (k + 1) as f64;
                            al * 2.0 * k1 * j.0[k + 1] + al * al * k1 * (k + 2) as f64 * j.0[k + 2]
                        })
                        .collect()))
                },
                f.decay_at_0,
                f.decay_at_inf,
            )
            .with_support(a, b))
        }
        Op::Tau { hbar, mu } => Ok(tau_fn(f, *hbar, *mu)),
        Op::Mult(v) => Ok(v.mul(f)),
        Op::Conv(v) => Ok(conv_fn(v, f)),
        Op::Subst(s) => subst_fn(s, f),
        Op::Conjugate => Ok(f.conj()),
        Op::ItDt => {
            let g = f.clone();
            let (a, b) = f.support();
            Ok(AnalyticFunction::from_jet_fn(
                &format!("itdt({})", f.name()),
                move |x, n| {
                    let j = g.log_jet(x, n + 1)?;
                    Ok(Jet((0..n).map(|k| c(0.0, (k + 1) as f64) * j.0[k + 1]).collect()))
                },
                f.decay_at_0,
                f.decay_at_inf,
            )
            .with_support(a, b))
        }
        Op::Compose(ops) => {
            if ops.is_empty() {
                return Err(ZError::Parse("empty composition".into()));
            }
            let mut g = f.clone();
            let mut i = ops.len();
            while i > 0 {
                if i >= 2 {
                    if let Some(l) = fused_lambda(&ops[i - 2], &ops[i - 1]) {
                        g = zeta_fn(&g, l, true)?;
                        i -= 2;
                        continue;
                    }
                }
                g = apply_fn(&ops[i - 1], &g)?;
                i -= 1;
            }
            Ok(g)
        }
        Op::LinComb(terms) => {
            if terms.is_empty() {
                return Err(ZError::Parse("empty linear combination".into()));
            }
            let mut acc: Option<AnalyticFunction> = None;
            for (k, o) in terms {
                let g = apply_fn(o, f)?;
                let g = if *k == c(1.0, 0.0) { g } else { g.scale(*k) };
                acc = Some(match acc {
                    None => g,
                    Some(a) => a.add(&g),
                });
            }
            Ok(acc.unwrap())
        }
    }
}

/// op(f)(t)
pub fn apply(op: &OperatorExpr, f: &AnalyticFunction, t: f64) -> Result<C64> {
    apply_fn(op, f)?.eval(t)
}

/// Multiplicative convolution (V * f)(t) = int dy/y V(y) f(t/y).
pub fn conv_fn(v: &AnalyticFunction, f: &AnalyticFunction) -> AnalyticFunction {
    let (vv, ff) = (v.clone(), f.clone());
    let d0 = v.decay_at_0.min(f.decay_at_0);
    let d1 = v.decay_at_inf.min(f.decay_at_inf);
    let (va, vb) = v.support();
    let (fa, fb) = f.support();
    AnalyticFunction::from_jet_fn(&format!("conv({},{})", v.name(), f.name()), move |x, n| conv_jet(&vv, &ff, x, n), d0, d1)
        .with_support(va * fa, vb * fb)
}

fn conv_jet(v: &AnalyticFunction, f: &AnalyticFunction, x: f64, n: usize) -> Result<Jet> {
    let (lo, hi) = match (v.rapid_window(), f.rapid_window()) {
        (Some((a, b)), Some((c0, d))) => (a.max(x - d), b.min(x - c0)),
        (Some((a, b)), None) => {
            let (fl, fh) = f.log_support();
            (a.max(x - fh), b.min(x - fl))
        }
        (None, Some((c0, d))) => {
            let (vl, vh) = v.log_support();
            (vl.max(x - d), vh.min(x - c0))
        }
        (None, None) => {
            let (vl, vh) = v.log_support();
            let (fl, fh) = f.log_support();
            let hint = (vl.max(x - fh), vh.min(x - fl));
            let r_lo = v.decay_at_0.exponent() + f.decay_at_inf.exponent();
            let r_hi = v.decay_at_inf.exponent() + f.decay_at_0.exponent();
            if !(r_lo > 0.0) {
                return Err(ZError::Strip { endpoint: "0", detail: format!("convolution of {} and {} diverges", v.name(), f.name()) });
            }
            if !(r_hi > 0.0) {
                return Err(ZError::Strip { endpoint: "inf", detail: format!("convolution of {} and {} diverges", v.name(), f.name()) });
            }
            let rl = if r_lo.is_infinite() { None } else { Some(r_lo) };
            let rh = if r_hi.is_infinite() { None } else { Some(r_hi) };
            find_window(|u| Ok((v.eval_log(u)? * f.eval_log(x - u)?).norm()), hint, rl, rh, 1e-18)?
        }
    };
    if !(hi > lo) {
        return Ok(Jet::zeros(n));
    }
    let mut integrand = |u: f64, out: &mut [C64]| -> Result<()> {
        let a = v.eval_log(u)?;
        if a == c(0.0, 0.0) {
            out.iter_mut().for_each(|o| *o = c(0.0, 0.0));
            return Ok(());
        }
        let j = f.log_jet(x - u, n)?;
        for k in 0..n {
            out[k] = a * j.0[k];
        }
        Ok(())
    };
    let (val, _) = gk_adaptive(&mut integrand, lo, hi, n, Tol::new(1e-300, 1e-13))?;
    Ok(Jet(val))
}

fn subst_fn(s: &Subst, f: &AnalyticFunction) -> Result<AnalyticFunction> {
    let w = s.weight.clone();
    let g = f.clone();
    match &s.map {
        SubstMap::Power { c: c0, p } => {
            let (c0, p) = (*c0, *p);
            let lc = c0.ln();
            let (s0, s1) = (f.decay_at_0.exponent(), f.decay_at_inf.exponent());
            let (e0, e1) = if p > 0.0 { (p * s0, p * s1) } else { (-p * s1, -p * s0) };
            Ok(AnalyticFunction::from_jet_fn(
                &format!("S[{:?}]({})", s.map, f.name()),
                move |x, n| {
                    let inner = g.log_jet(lc + p * x, n)?.chain_linear(p);
                    Ok(&w.log_jet(x, n)? * &inner)
                },
                Decay::from_exponent(s.weight.decay_at_0.exponent() + e0),
                Decay::from_exponent(s.weight.decay_at_inf.exponent() + e1),
            ))
        }
        SubstMap::Custom { g: gm, .. } => {
            let gm = gm.clone();
            let d0 = s.weight.decay_at_0.min(f.decay_at_0.min(f.decay_at_inf));
            let d1 = s.weight.decay_at_inf.min(f.decay_at_0.min(f.decay_at_inf));
            let h = AnalyticFunction::new(&format!("S[custom]({})", f.name()), move |t| {
                let a = w.eval(t).unwrap_or(c(f64::NAN, 0.0));
                let b = g.eval(gm(t)).unwrap_or(c(f64::NAN, 0.0));
                a * b
            }, Decay::None, Decay::None)?;
            let mut h = h;
            h.decay_at_0 = d0;
            h.decay_at_inf = d1;
            Ok(h)
        }
    }
}

/// Structural adjoint with respect to <.,.>_hbar.
pub fn adjoint(op: &OperatorExpr, hbar: f64) -> Result<OperatorExpr> {
    let w = 1.0 + hbar;
    Ok(match op {
        Op::Dilation(beta) => {
            if *beta == 1.0 {
                identity()
            } else {
                scaled(c(beta.powf(-w), 0.0), Op::Dilation(1.0 / beta))
            }
        }
        Op::Zeta(l) => compose(vec![tau(hbar), Op::Zeta(*l), tau(hbar)]),
        Op::H(alpha) => {
            let ac = alpha.conj();
            let k = c(1.0, 0.0) - ac * w;
            if k.norm() < 1e-14 {
                return Err(ZError::SingularAdjoint(format!(
                    "H_{} at hbar = {}: alpha (1 + hbar) = 1 leaves no H-form adjoint",
                    fmt_c(*alpha),
                    hbar
                )));
            }
            scaled(k, Op::H(-ac / k))
        }
        Op::Delta(alpha) => {
            let ha = adjoint(&Op::H(*alpha), hbar)?;
            difference(compose(vec![ha.clone(), ha]), identity())
        }
        Op::Tau { hbar: h0, mu } => {
            let base = scaled(c(1.0 / mu.abs(), 0.0), Op::Tau { hbar, mu: 1.0 / mu });
            if *h0 == hbar {
                base
            } else {
                // tau^mu_{h0} = m_{t^{mu(h0-hbar)}} tau^mu_hbar
                compose(vec![base, Op::Mult(power(c(mu * (h0 - hbar), 0.0)))])
            }
        }
        Op::Mult(v) => Op::Mult(v.conj()),
        Op::Conv(v) => Op::Conv(tau_fn(&v.conj(), hbar, -1.0)),
        Op::Subst(s) => Op::Subst(subst_adjoint(s, hbar)?),
        Op::Compose(ops) => {
            // the pair H_l Z^l is handled as a block: (H Z)* = tau H Z tau
            let mut out = Vec::new();
            let mut i = 0;
            while i < ops.len() {
                if i + 1 < ops.len() {
                    if let Some(l) = fused_lambda(&ops[i], &ops[i + 1]) {
                        out.push(compose(vec![tau(hbar), hz(l), tau(hbar)]));
                        i += 2;
                        continue;
                    }
                }
                out.push(adjoint(&ops[i], hbar)?);
                i += 1;
            }
            out.reverse();
            compose(out)
        }
        Op::LinComb(terms) => lincomb(terms.iter().map(|(k, o)| Ok((k.conj(), adjoint(o, hbar)?))).collect::<Result<Vec<_>>>()?),
        Op::Conjugate => return Err(ZError::Capability("conjugation is antilinear and has no linear adjoint".into())),
        Op::ItDt => {
            if hbar == -1.0 {
                Op::ItDt
            } else {
                lincomb(vec![(c(1.0, 0.0), Op::ItDt), (c(0.0, w), identity())])
            }
        }
    })
}

fn subst_adjoint(s: &Subst, hbar: f64) -> Result<Subst> {
    let sign = if s.map.maps_0_to_0() { 1.0 } else { -1.0 };
    let inv = s.map.inverse();
    let wgt = s.weight.clone();
    let weight = match &s.map {
        SubstMap::Power { c: c0, p } => {
            let (c0, p) = (*c0, *p);
            let lc = c0.ln();
            let w = 1.0 + hbar;
            // P*(u) = |1/p| e^{(1+hbar)(v - x)} conj P(e^v), v = (x - ln c)/p
            let (s0, s1) = (s.weight.decay_at_0.exponent(), s.weight.decay_at_inf.exponent());
            let e = w * (1.0 / p - 1.0);
            let (d0, d1) = if p > 0.0 { (e + s0 / p, -e + s1 / p) } else { (e + s1 / -p, -e + s0 / -p) };
            AnalyticFunction::from_jet_fn(
                &format!("adjw({})", s.weight.name()),
                move |x, n| {
                    let inner = wgt.log_jet((x - lc) / p, n)?.chain_linear(1.0 / p).conj();
                    let ex = Jet::var(x, n).scale(c(e, 0.0)).add_const(c(-w * lc / p, 0.0)).exp();
                    Ok((&ex * &inner).scale(c(1.0 / p.abs(), 0.0)))
                },
                Decay::from_exponent(d0),
                Decay::from_exponent(d1),
            )
        }
        SubstMap::Custom { ginv, dginv, .. } => {
            let (ginv, dginv) = (ginv.clone(), dginv.clone());
            AnalyticFunction::new(
                &format!("adjw({})", s.weight.name()),
                move |u| {
                    let v = ginv(u);
                    let p = wgt.eval(v).unwrap_or(c(f64::NAN, 0.0)).conj();
                    p * (sign * dginv(u) * (v / u).powf(hbar))
                },
                Decay::None,
                Decay::None,
            )?
        }
    };
    Ok(Subst { weight, map: inv })
}

/// Which symmetrization map to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymWhich {
    /// (A + A*)/2
    P,
    /// i(A - A*)/2
    Partial,
    PreTau,
    PostTau,
}

pub fn symmetrize(op: &OperatorExpr, hbar: f64, which: SymWhich) -> Result<OperatorExpr> {
    Ok(match which {
        SymWhich::P => lincomb(vec![(c(0.5, 0.0), op.clone()), (c(0.5, 0.0), adjoint(op, hbar)?)]),
        SymWhich::Partial => lincomb(vec![(c(0.0, 0.5), op.clone()), (c(0.0, -0.5), adjoint(op, hbar)?)]),
        SymWhich::PreTau => compose(vec![tau(hbar), op.clone()]),
        SymWhich::PostTau => compose(vec![op.clone(), tau(hbar)]),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymKind {
    ZsymPlus,
    ZsymMinus,
    ZhatPlus,
    ZhatMinus,
}

impl SymKind {
    pub fn all() -> [SymKind; 4] {
        [SymKind::ZsymPlus, SymKind::ZsymMinus, SymKind::ZhatPlus, SymKind::ZhatMinus]
    }

    pub fn name(self) -> &'static str {
        match self {
            SymKind::ZsymPlus => "zsym_plus",
            SymKind::ZsymMinus => "zsym_minus",
            SymKind::ZhatPlus => "zhat_plus",
            SymKind::ZhatMinus => "zhat_minus",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetrizedOp {
    pub kind: SymKind,
    pub lambda: f64,
    pub hbar: f64,
    /// Exponent offset of the involution; zero except for fault injection.
    pub tau_shift: f64,
}

impl SymmetrizedOp {
    pub fn new(kind: SymKind, lambda: f64, hbar: f64) -> Self {
        SymmetrizedOp { kind, lambda, hbar, tau_shift: 0.0 }
    }

    pub fn expand(&self) -> OperatorExpr {
        let t = tau(self.hbar + self.tau_shift);
        let a = hz(self.lambda);
        let conj = compose(vec![t.clone(), a.clone(), t.clone()]);
        match self.kind {
            SymKind::ZsymPlus => lincomb(vec![(c(0.5, 0.0), a), (c(0.5, 0.0), conj)]),
            SymKind::ZsymMinus => lincomb(vec![(c(0.0, 0.5), a), (c(0.0, -0.5), conj)]),
            SymKind::ZhatPlus => compose(vec![a, t]),
            SymKind::ZhatMinus => compose(vec![t, a]),
        }
    }
}

/// (R F)(x) = sum_{n>=1} F(x + n). `decay` is the certified power p with
/// |F(x)| <= C |x|^{-p}; None means faster than any power.
pub fn rota_baxter_r<F: Fn(f64) -> f64>(f: F, decay: Option<f64>, x: f64, eps: f64) -> Result<f64> {
    if let Some(p) = decay {
        if !(p > 2.0) {
            return Err(ZError::Truncation(format!("lattice sum needs decay faster than |x|^-2, certificate gives {}", p)));
        }
    }
    let mut s = 0.0;
    let mut quiet = 0;
    for n in 1..10_000_000usize {
        let y = x + n as f64;
        let v = f(y);
        s += v;
        let tail = match decay {
            None => v.abs(),
            Some(p) => v.abs() * y.abs() / (p - 1.0),
        };
        if y > 1.0 && tail <= eps * 1e-3 {
            quiet += 1;
            if quiet >= 3 {
                return Ok(s);
            }
        } else {
            quiet = 0;
        }
    }
    Err(ZError::Truncation("lattice sum did not reach its tail bound".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{exp_power, gaussian};

    #[test]
    fn zeta_of_exp_pi_is_psi() {
        let v = apply(&Op::Zeta(2.0), &exp_power(std::f64::consts::PI, 1.0), 1.0).unwrap();
        let p = crate::special::psi(1.0, 1e-18).unwrap();
        assert!((v.re - p).abs() < 1e-15);
    }

    #[test]
    fn tau_involution() {
        let op = compose(vec![tau(0.5), tau(0.5)]);
        let v = apply(&op, &gaussian(), 3.0).unwrap();
        assert!((v.re - (-9.0f64).exp()).abs() < 1e-18);
    }

    #[test]
    fn em_tail_matches_direct_sum() {
        // small t forces the Euler-Maclaurin branch; compare with brute force
        let f = gaussian();
        let t = 1e-3;
        let v = apply(&Op::Zeta(1.0), &f, t).unwrap().re;
        let direct: f64 = (1..200000).map(|n| (-(n as f64 * t).powi(2)).exp()).sum();
        assert!((v - direct).abs() < 1e-9 * direct, "{} {}", v, direct);
        let hv = apply(&hz(1.0), &f, t).unwrap().re;
        let hd: f64 = (1..200000)
            .map(|n| {
                let u = n as f64 * t;
                (1.0 - 2.0 * u * u) * (-u * u).exp()
            })
            .sum();
        assert!((hv - hd).abs() < 1e-9, "{} {}", hv, hd);
    }
}
