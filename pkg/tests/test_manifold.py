import dataclasses
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from lcmanifold.errors import SingularSystemError
from lcmanifold.manifold import (ManifoldQuadratic, lambda_omega_closed_form,
                                 lienard_closed_form, manifold_eval, manifold_residual,
                                 residual_slope, solve_lambda_omega_manifold,
                                 solve_lienard_manifold, solve_manifold)
from lcmanifold.model import SystemSpec

GAMMAS = [0.5, 1, 2, 4, 9]
KS = [0, 0.5, 1, 2]
LAMBDAS = [0.1, 0.5, 1, 2, 5, 10]


def sympy_coefficients(kind, param, lam, e0, e1, e3):
    """Independent oracle: expand the invariance equation and solve the x^2, xy, y^2 terms."""
    x, y, a0, a1, a2 = sp.symbols("x y a0 a1 a2")
    h = a0 * x**2 + a1 * x * y + a2 * y**2
    if kind == "lambda_omega":
        xd, yd = param * x - y, x + param * y
    else:
        xd, yd = y, -x + param * y
    expr = sp.expand(-lam * h + e0 * x**2 + e1 * y**2 + e3 * x * y
                     - sp.diff(h, x) * xd - sp.diff(h, y) * yd)
    poly = sp.Poly(expr, x, y)
    eqs = [poly.coeff_monomial(mono) for mono in (x**2, x * y, y**2)]
    sol = sp.solve(eqs, [a0, a1, a2], dict=True)[0]
    return tuple(sol[a] for a in (a0, a1, a2))


F = Fraction


@pytest.mark.parametrize("gamma, lam, expected", [
    (4, 1, (F(-1, 85), F(9, 85), F(1, 85))),
    (1, 2, (F(-1, 20), F(1, 5), F(1, 20))),
])
def test_lambda_omega_frozen(gamma, lam, expected):
    oracle = sympy_coefficients("lambda_omega", sp.Integer(gamma), sp.Integer(lam), 0, 0, 1)
    assert tuple(F(int(v.p), int(v.q)) for v in oracle) == expected
    m = solve_lambda_omega_manifold(gamma, lam)
    np.testing.assert_allclose(m.as_array(), [float(v) for v in expected], rtol=0, atol=1e-15)


@pytest.mark.parametrize("k, lam, expected", [
    (0, 1, (F(1, 5), F(1, 5), F(-1, 5))),
    (1, 1, (F(3, 14), F(3, 14), F(-1, 14))),
])
def test_lienard_frozen(k, lam, expected):
    oracle = sympy_coefficients("lienard", sp.Integer(k), sp.Integer(lam), 0, 0, 1)
    assert tuple(F(int(v.p), int(v.q)) for v in oracle) == expected
    m = solve_lienard_manifold(k, lam)
    np.testing.assert_allclose(m.as_array(), [float(v) for v in expected], rtol=0, atol=1e-15)


def test_homogeneous_systems_give_zero():
    assert solve_lambda_omega_manifold(3.0, 0.7, 0, 0, 0).as_array().tolist() == [0, 0, 0]
    assert solve_lienard_manifold(2.0, 1.0, 0, 0, 0).as_array().tolist() == [0, 0, 0]


@pytest.mark.parametrize("gamma", GAMMAS)
@pytest.mark.parametrize("lam", LAMBDAS)
def test_lambda_omega_closed_form_agrees(gamma, lam):
    generic = solve_lambda_omega_manifold(gamma, lam)
    assert generic.max_abs_diff(lambda_omega_closed_form(gamma, lam)) <= 1e-12
    # identities of the e0 = e1 = 0, e3 = 1 case
    assert generic.a0 == pytest.approx(-generic.a2, abs=1e-15)
    assert generic.a1 == pytest.approx(-(lam + 2 * gamma) * generic.a0, abs=1e-14)


@pytest.mark.parametrize("k", KS)
@pytest.mark.parametrize("lam", LAMBDAS)
def test_lienard_closed_form_agrees(k, lam):
    assert solve_lienard_manifold(k, lam).max_abs_diff(lienard_closed_form(k, lam)) <= 1e-12


@pytest.mark.parametrize("kind, param, lam", [
    ("lambda_omega", sp.Rational(3, 2), sp.Rational(7, 10)),
    ("lienard", sp.Rational(1, 3), sp.Rational(5, 2)),
])
def test_general_e_against_sympy(kind, param, lam):
    e0, e1, e3 = sp.Rational(3, 10), sp.Rational(-7, 10), sp.Rational(11, 10)
    oracle = [float(v) for v in sympy_coefficients(kind, param, lam, e0, e1, e3)]
    args = (float(param), float(lam), float(e0), float(e1), float(e3))
    if kind == "lambda_omega":
        pair = solve_lambda_omega_manifold(*args), lambda_omega_closed_form(*args)
    else:
        pair = solve_lienard_manifold(*args), lienard_closed_form(*args)
    for m in pair:
        np.testing.assert_allclose(m.as_array(), oracle, rtol=1e-12, atol=1e-14)


@settings(max_examples=50)
@given(st.floats(0.05, 20), st.floats(0.05, 20),
       st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_closed_form_matches_solve_random(gamma, lam, e0, e1, e3):
    a = solve_lambda_omega_manifold(gamma, lam, e0, e1, e3)
    b = lambda_omega_closed_form(gamma, lam, e0, e1, e3)
    assert a.max_abs_diff(b) <= 1e-12 * max(1.0, float(np.max(np.abs(a.as_array()))))


def test_centre_manifold_limit():
    m = solve_lienard_manifold(1e-8, 1.0)
    centre = solve_lienard_manifold(0.0, 1.0)
    np.testing.assert_allclose(m.as_array(), [0.2, 0.2, -0.2], rtol=0, atol=1e-6)
    # first-order drift in k: d a2/dk at k=0, lambda=1 is 7/25 from the closed form
    assert abs(m.a2 - centre.a2 - 7 / 25 * 1e-8) < 1e-15


def test_large_lambda_decay():
    for lam in [1e2, 1e3, 1e4]:
        scaled = np.abs(solve_lambda_omega_manifold(4.0, lam).as_array()) * lam
        assert np.all(scaled <= 1.0 + 1e-12)
    # lambda * a1 -> e3 while a0, a2 fall off as 1/lambda^2
    assert scaled[1] == pytest.approx(1.0, abs=1e-3)
    assert scaled[0] < 1e-3


def test_singular_lambda_omega():
    with pytest.raises(SingularSystemError, match="gamma=-0.5"):
        solve_lambda_omega_manifold(-0.5, 1.0)


def test_lienard_pole():
    with pytest.raises(SingularSystemError):
        solve_lienard_manifold(-0.5, 1.0)


def test_manifold_eval():
    assert manifold_eval(ManifoldQuadratic(1, 2, 3), (1, 1)) == 6
    assert manifold_eval(solve_lambda_omega_manifold(4, 1), (1, 0)) == pytest.approx(-1 / 85)
    assert manifold_eval(ManifoldQuadratic(0.3, -2, 7), (0, 0)) == 0


def test_residual_vanishes_at_origin():
    spec = SystemSpec.lambda_omega(4, 1)
    assert manifold_residual(spec, solve_manifold(spec), (0, 0)) == 0


@pytest.mark.parametrize("spec", [
    SystemSpec.lambda_omega(4, 1),
    SystemSpec.lambda_omega(1, 0.5, e=(0.3, -0.2, 0.4, 1.1, 0.5, -0.6)),
    SystemSpec.lienard(0.5, 1, friction=((2, 0, 0.5),)),
    SystemSpec.lienard(0.0, 2, e=(1, 1, 1, 1, 1, 1)),
], ids=["lo-default", "lo-general", "lienard-vdp", "centre"])
def test_residual_scaling(spec):
    m = solve_manifold(spec)
    eps = (1e-2, 1e-3, 1e-4)
    assert residual_slope(spec, m, eps=eps) >= 2.9
    leaked = residual_slope(spec, dataclasses.replace(m, a1=m.a1 + 0.1), eps=eps)
    assert leaked == pytest.approx(2.0, abs=0.1)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6),
       st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_c_and_d_do_not_enter_order_two(c, d):
    base = SystemSpec.lambda_omega(2.0, 1.5)
    perturbed = dataclasses.replace(base, c=tuple(c), d=tuple(d))
    assert solve_manifold(perturbed) == solve_manifold(base)
    # no quadratic part survives: residual / eps^2 -> 0 (the slope fit is unreliable
    # when the cubic term changes sign along the probe direction)
    eps = 1e-4
    res = manifold_residual(perturbed, solve_manifold(perturbed), (eps, -0.7 * eps))
    assert abs(res) / eps**2 <= 1e-2


def test_e2_e4_e5_do_not_enter_order_two():
    base = SystemSpec.lambda_omega(2.0, 1.5)
    other = dataclasses.replace(base, e=(0, 0, 5.0, 1.0, -3.0, 2.0))
    assert solve_manifold(other) == solve_manifold(base)
