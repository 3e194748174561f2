"""Smoke test for the zetaops_py extension. Run with pytest or as a script."""
import math

import mpmath
import pytest

import zetaops_py as z


def test_xi_matches_mpmath():
    for s in (2 + 0j, 0.5 + 0j, 0.3 + 7j, 3 - 2j):
        want = complex(mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2) * mpmath.zeta(s))
        got = z.xi(s)
        assert abs(got - want) <= 1e-12 * abs(want)


def test_xi_engines():
    a = z.xi(2 + 3j)
    b = z.xi(2 + 3j, engine="ibp", n=2)
    assert abs(a - b) <= 1e-9 * abs(a)
    with pytest.raises(ValueError):
        z.xi(2, engine="nope")


def test_zeta_and_theta():
    assert abs(z.zeta(2) - math.pi**2 / 6) < 1e-13
    t = 0.7
    assert abs(z.theta(1 / t) - math.sqrt(t) * z.theta(t)) < 1e-13
    with pytest.raises(ValueError):
        z.zeta(-1)


def test_zeros_and_weil():
    zs = z.find_zeros(40.0)
    want = [float(mpmath.zetazero(k).imag) for k in range(1, 7)]
    assert len(zs) == len(want)
    assert max(abs(a - b) for a, b in zip(zs, want)) < 1e-9
    v = z.weil_sum(z.Function("gaussian"), zs)
    assert v >= -1e-6
    with pytest.raises(ValueError):
        z.weil_sum(z.Function("gaussian"), [3.0, 2.0])


def test_function_and_operator():
    assert "gaussian" in z.Function.battery()
    f = z.Function("exp_neg_t")
    assert abs(f(1.0) - math.exp(-1)) < 1e-15
    assert abs(f.mellin(3) - 2.0) < 1e-10
    op = z.Operator("(compose (tau 0 -1) (d 2))")
    assert str(op) == "(compose (tau 0 -1) (d 2))"
    # tau_0: f(t) -> f(1/t)/t
    assert abs(z.Operator("(tau 0 -1)").apply(f, 2.0) - math.exp(-0.5) / 2) < 1e-14
    reports = op.check()
    assert reports and all(r["passed"] for r in reports)
    with pytest.raises(ValueError):
        z.Operator("(H)")


def test_checks():
    r = z.run_checks(["xi.functional_equation"])
    assert [x["name"] for x in r] == ["xi.functional_equation"]
    assert r[0]["passed"]
    bad = z.run_checks(["adjoint.*"], tau_shift=0.1)
    assert any(not x["passed"] for x in bad)


def test_heat_roots():
    roots = z.equisym_roots(1, 0.05, 2)
    assert roots
    for _, pred, loc, _ in roots:
        assert abs(pred - loc) < 1e-6


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
