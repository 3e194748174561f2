use std::f64::consts::PI;

use proptest::prelude::*;
use zetaops::funcspace::{bump, exp_neg_t, gaussian, log_gaussian, project_phi, project_tau, sample, tau_fn, LogGrid};
use zetaops::mellin::{mellin_line, mellin_line_inverse, mellin_point};
use zetaops::operators::{parse_sexpr, to_sexpr};
use zetaops::special::{psi, theta};
use zetaops::zeta_xi::{xi_direct, zeta_ref, ZeroList};
use zetaops::{Sign, C64};

fn theta_direct(t: f64) -> f64 {
    1.0 + 2.0 * (1..200).map(|n| (-PI * (n * n) as f64 * t).exp()).sum::<f64>()
}

#[test]
fn zeta_special_values() {
    // zeta(3) and zeta(1/2) to double precision
    let cases = [(2.0, PI * PI / 6.0), (4.0, PI.powi(4) / 90.0), (3.0, 1.202_056_903_159_594_2), (0.5, -1.460_354_508_809_586_8)];
    for (s, want) in cases {
        let z = zeta_ref(C64::new(s, 0.0)).unwrap();
        assert!((z.re - want).abs() < 1e-13 && z.im.abs() < 1e-13, "zeta({}) = {}", s, z);
    }
    assert!(zeta_ref(C64::new(1.0, 0.0)).is_err());
    assert!(zeta_ref(C64::new(-1.0, 0.0)).is_err());
}

#[test]
fn xi_real_on_critical_line() {
    for t in [3.0, 10.0, 14.0, 30.0] {
        let v = xi_direct(C64::new(0.5, t)).unwrap();
        assert!(v.im.abs() <= 1e-12 * v.norm().max(1e-300), "t = {}: {}", t, v);
    }
}

#[test]
fn theta_against_direct_sum() {
    for t in [0.05, 0.3, 1.0, 2.5] {
        let want = theta_direct(t);
        assert!((theta(t, 1e-15).unwrap() - want).abs() < 1e-13 * want);
    }
    assert!(psi(-1.0, 1e-15).is_err());
}

#[test]
fn mellin_of_exponentials() {
    // M[e^{-t}](s) = Gamma(s), M[e^{-t^2}](s) = Gamma(s/2)/2
    let g = |n: u32| (1..n).map(|k| k as f64).product::<f64>();
    for n in 1..6u32 {
        let a = mellin_point(&exp_neg_t(), C64::new(n as f64, 0.0), 1e-12).unwrap();
        assert!((a.re - g(n)).abs() < 1e-10 * g(n));
        let b = mellin_point(&gaussian(), C64::new(2.0 * n as f64, 0.0), 1e-12).unwrap();
        assert!((b.re - g(n) / 2.0).abs() < 1e-10 * g(n));
    }
    let h = mellin_point(&gaussian(), C64::new(1.0, 0.0), 1e-12).unwrap();
    assert!((h.re - PI.sqrt() / 2.0).abs() < 1e-11);
}

#[test]
fn mellin_line_roundtrip() {
    let grid = LogGrid::symmetric(10.0, 1024).unwrap();
    let f = sample(&log_gaussian(1.0), &grid).unwrap();
    let line = mellin_line(&f, 0.5);
    assert!(!line.warning);
    let d = mellin_line_inverse(&line).max_abs_diff(&f);
    assert!(d < 1e-12, "{}", d);

    // e^{-t^2} does not vanish at t -> 0, so the left end of the window is flagged
    let g = sample(&gaussian(), &grid).unwrap();
    assert!(mellin_line(&g, 0.5).warning);
}

#[test]
fn grid_shape_errors() {
    assert!(LogGrid::new(-1.0, 1.0, 100).is_err());
    assert!(LogGrid::new(0.5, 1.0, 64).is_err());
}

#[test]
fn zero_list_csv() {
    let z = ZeroList::from_csv_str("index,ordinate,residual\n0,14.1,0\n1,21.0,1e-12\n").unwrap();
    assert_eq!(z.len(), 2);
    let again = ZeroList::from_csv_str(&z.to_csv_string().unwrap()).unwrap();
    assert_eq!(again.ordinates, z.ordinates);
    assert!(ZeroList::from_csv_str("a,b\n1,2\n").is_err());
}

#[test]
fn bump_support() {
    let f = bump(0.5, 2.0);
    assert_eq!(f.eval(0.4).unwrap(), C64::new(0.0, 0.0));
    assert_eq!(f.eval(2.5).unwrap(), C64::new(0.0, 0.0));
    assert!(f.eval(1.0).unwrap().re > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tau_is_involution(hbar in -1.0f64..1.0, t in 0.2f64..5.0) {
        let f = gaussian();
        let g = tau_fn(&tau_fn(&f, hbar, -1.0), hbar, -1.0);
        let a = f.eval(t).unwrap();
        let b = g.eval(t).unwrap();
        prop_assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn tau_formula(hbar in -1.0f64..1.0, t in 0.2f64..5.0) {
        // t^{-(1+hbar)} f(1/t)
        let f = exp_neg_t();
        let v = tau_fn(&f, hbar, -1.0).eval(t).unwrap().re;
        let want = t.powf(-(1.0 + hbar)) * (-1.0 / t).exp();
        prop_assert!((v - want).abs() < 1e-13 * want.max(1e-300) + 1e-300);
    }

    #[test]
    fn projections_split(hbar in -1.0f64..1.0, t in 0.2f64..5.0) {
        let f = exp_neg_t();
        let sum = project_tau(&f, hbar, Sign::Plus).eval(t).unwrap() + project_tau(&f, hbar, Sign::Minus).eval(t).unwrap();
        prop_assert!((sum - f.eval(t).unwrap()).norm() < 1e-14);
        let p = project_phi(&f, Sign::Plus);
        prop_assert!((p.eval(t).unwrap() - p.eval(1.0 / t).unwrap()).norm() < 1e-14);
        let m = project_phi(&f, Sign::Minus);
        prop_assert!((m.eval(t).unwrap() + m.eval(1.0 / t).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn theta_functional_equation(t in 0.05f64..20.0) {
        let a = theta(1.0 / t, 1e-15).unwrap();
        let b = t.sqrt() * theta(t, 1e-15).unwrap();
        prop_assert!((a - b).abs() < 1e-13 * a);
    }

    #[test]
    fn sexpr_round_trip(a in 1u32..9, l in 1u32..9, m in prop_oneof![-3i32..0, 1i32..4], b in 1u32..5) {
        let s = format!("(compose (H {}) (lincomb (2 (Z {})) (-1 (tau 0 {}))) (d {}))", a, l, m, b);
        let e = parse_sexpr(&s).unwrap();
        prop_assert_eq!(to_sexpr(&e), s);
    }
}
