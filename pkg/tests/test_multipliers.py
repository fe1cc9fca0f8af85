import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thermoplate import multipliers
from thermoplate._dopri import STATUS_MAX_STEPS, STATUS_MIN_STEP, solve_linear
from thermoplate.errors import DegenerateRoots, StepFailure
from thermoplate.multipliers import (
    DataSymbol,
    GaussianDatum,
    H0_hat,
    H1_hat,
    H_hat,
    J0_hat,
    J1_hat,
    MomentSet,
    g1_hat,
    g2_hat,
    moments_of,
    ode_oracle_system,
    ode_oracle_third,
    phi_hat,
    phi_sim_hat,
    psi_hat,
    pure_plate_hat,
    roots_on,
    sin_over,
    u2_hat,
    u_hat,
    u_hat_terms,
)
from thermoplate.roots import DIFFUSION, CharacteristicRoots

ONES = DataSymbol(1.0, 1.0, 1.0)


def exact(t, r, sigma, data=ONES):
    return u_hat(t, r, roots_on(r, sigma), data)


def flipped(roots):
    return CharacteristicRoots(roots.lambda1, roots.lambdaR, -roots.lambdaI, roots.r)


def test_u2_hat_examples():
    assert u2_hat(0.0, DataSymbol(3.0, 2.0, 5.0)) == 0
    assert u2_hat(1.0, DataSymbol(1.0, 0.0, 1.0)) == 0
    assert u2_hat(2.0, DataSymbol(1.0, 0.0, 0.0)) == -16


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("r", [1e-3, 0.1, 1.0, 10.0])
def test_u_hat_initial_value(sigma, r):
    d = DataSymbol(0.7, -1.3, 2.1)
    assert exact(0.0, r, sigma, d) == pytest.approx(0.7, rel=1e-12)


@pytest.mark.parametrize("r", [1e-3, 0.1, 1.0, 10.0])
def test_u_hat_initial_value_sigma_zero(r):
    # with sigma = 0 the theta0 parts of the first two terms are O(r^-2) and cancel
    d = DataSymbol(0.7, -1.3, 2.1)
    terms = u_hat_terms(0.0, r, roots_on(np.asarray(r), 0.0), d)
    cond = sum(abs(complex(x)) for x in terms) / 0.7
    assert exact(0.0, r, 0.0, d) == pytest.approx(0.7, rel=1e-12 * max(cond, 1.0))


def test_u_hat_zero_data():
    assert exact(5.0, 0.4, 1.0, DataSymbol()) == 0


def test_u_hat_example_against_oracle():
    u = exact(10.0, 0.5, 1.0)
    ref = ode_oracle_system(10.0, 0.5, 1.0, ONES)[0]
    assert abs(u - ref) <= 1e-8 * abs(ref)


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("r", [0.05, 0.5, 2.0])
def test_representation_derivatives_at_zero(sigma, r):
    d = DataSymbol(0.3, 1.1, -0.8)
    h = 1e-4
    up, u0, um = (exact(s, r, sigma, d) for s in (h, 0.0, -h))
    assert (up - um) / (2 * h) == pytest.approx(1.1, rel=1e-5)
    second = (up - 2 * u0 + um) / h**2
    target = u2_hat(r, d)
    assert abs(second - target) <= 1e-5 * max(abs(target), 1.0)


@given(st.floats(1e-3, 5.0), st.floats(0.0, 200.0), st.floats(0.1, 3.0))
def test_lambda_i_sign_invariance(r, t, sigma):
    roots = roots_on(np.asarray(r), sigma)
    for fn in (u_hat, g1_hat, g2_hat):
        a = fn(t, r, roots, ONES)
        b = fn(t, r, flipped(roots), ONES)
        assert abs(a - b) <= 1e-13 * max(abs(a), 1e-300) + 1e-300


@given(st.floats(1e-3, 1.0), st.floats(0.0, 100.0), st.floats(0.2, 3.0))
def test_linearity(r, t, sigma):
    roots = roots_on(np.asarray(r), sigma)
    a, b = DataSymbol(1.0, 0.0, 2.0), DataSymbol(0.0, 3.0, -1.0)
    total = DataSymbol(1.0, 3.0, 1.0)
    lhs = u_hat(t, r, roots, total)
    rhs = u_hat(t, r, roots, a) + u_hat(t, r, roots, b)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


def test_degenerate_roots_raise():
    bad = CharacteristicRoots(-1.0, -1.0, 0.0, 1.0)
    with pytest.raises(DegenerateRoots):
        u_hat(1.0, 1.0, bad, ONES)


def test_g_hat_at_time_zero():
    r, sigma = 0.2, 1.0
    roots = roots_on(np.asarray(r), sigma)
    assert g1_hat(0.0, r, roots, ONES) == 0
    den = -((roots.lambda1 - roots.lambdaR) ** 2 + roots.lambdaI**2)
    assert g2_hat(0.0, r, roots, DataSymbol(1.0, 0.0, 0.0)) == pytest.approx(-(roots.lambda1**2) / den)


def test_kernel_values():
    assert J0_hat(3.0, 0.0, 1.0) == 3.0
    assert J1_hat(0.0, 0.7, 1.0) == 1.0
    assert abs(J0_hat(math.pi, 1.0, 1.0)) < 1e-15
    assert J0_hat(math.pi / 2, 1.0, 1.0) == pytest.approx(math.exp(-math.pi / 4), rel=1e-14)
    assert H_hat(4.0, 0.0, 1.0) == 0
    with pytest.raises(ValueError):
        J0_hat(1.0, 1.0, 0.0)


@given(st.floats(0.0, 2.0), st.floats(0.0, 1e3), st.floats(0.1, 4.0), st.booleans())
def test_h_decomposes(r, t, sigma, literal):
    whole = H_hat(t, r, sigma, literal)
    parts = H0_hat(t, r, sigma, literal) + H1_hat(t, r, sigma)
    assert abs(whole - parts) <= 1e-14 * max(1.0, abs(whole))


def test_h0_literal_variant():
    assert H0_hat(2.0, 0.3, 1.0) == H0_hat(2.0, 0.3, 1.0, True)
    assert H0_hat(2.0, 0.3, 2.0, True) / H0_hat(2.0, 0.3, 2.0) == pytest.approx(5 / 3)


def test_sin_over_series_matches_direct():
    t = 3.0
    f = np.array([1e-9, 3e-5, 3.3e-5, 1e-2])
    assert np.allclose(sin_over(f, t), np.sin(f * t) / f, rtol=1e-15)
    assert sin_over(0.0, t) == t


def test_gaussian_datum_moments():
    g = GaussianDatum(2.0, 0.5, (0.3, -1.0))
    assert g.mass(2) == pytest.approx(2.0 * 2 * math.pi * 0.25)
    assert g.first_moment(2) == pytest.approx((0.3 * g.mass(2), -1.0 * g.mass(2)))
    # M = i grad f_hat(0) from a central difference on the line transform
    g1 = GaussianDatum(1.5, 0.8, (0.4,))
    h = 1e-5
    grad = (g1.transform_line(h) - g1.transform_line(-h)) / (2 * h)
    assert (1j * grad).real == pytest.approx(g1.first_moment(1)[0], rel=1e-8)
    assert g1.transform_line(0.0) == pytest.approx(g1.mass(1))
    with pytest.raises(ValueError):
        GaussianDatum(1.0, 0.0)
    with pytest.raises(ValueError):
        g.transform_radial(1.0, 2)


def test_conjugate_symmetry_on_line():
    g = GaussianDatum(1.0, 1.0, (0.7,))
    xi = np.linspace(0.01, 3, 20)
    roots = roots_on(xi, 1.0)
    plus = u_hat(5.0, xi, roots, DataSymbol(g.transform_line(xi), g.transform_line(xi), g.transform_line(xi)))
    minus = u_hat(5.0, xi, roots, DataSymbol(g.transform_line(-xi), g.transform_line(-xi), g.transform_line(-xi)))
    assert np.allclose(minus, np.conj(plus), rtol=1e-14)


def test_phi_examples():
    zero = MomentSet(0.0, 0.0, 0.0, (0.0,))
    assert phi_hat(3.0, 0.4, 1.0, zero) == 0
    m = MomentSet(2.0, 3.0, 5.0, (0.0, 0.0))
    assert phi_hat(7.0, 0.0, 1.0, m) == pytest.approx(7.0 * 3.0 + 2.0)
    vals = phi_hat(7.0, np.linspace(0, 2, 9), 1.0, m)
    assert np.all(np.imag(vals) == 0)
    assert phi_sim_hat(7.0, 0.0, 1.0, m) == 21.0


def test_phi_moment_sign_matches_translation():
    # a translate by x0 multiplies the transform by exp(-i x0 xi) ~ 1 - i x0 xi
    g = GaussianDatum(1.0, 1.0, (0.5,))
    m = moments_of(GaussianDatum(0.0), g, GaussianDatum(0.0), 1)
    xi, t = 1e-3, 10.0
    first = phi_hat(t, xi, 1.0, m) - phi_hat(t, xi, 1.0, MomentSet(0.0, m.P_u1, 0.0, (0.0,)))
    expected = -1j * 0.5 * xi * m.P_u1 * J0_hat(t, xi, 1.0)
    assert first == pytest.approx(expected, rel=1e-12)


def test_psi_examples():
    assert psi_hat(2.0, 0.5, 0.0, 0.0) == 0
    assert psi_hat(0.0, 0.5, 1.0, 1.0) == 0
    d = DIFFUSION
    t = 3.0
    limit = (d.a1 - d.a0) * t * 2 * d.a1 + t * (d.a0**2 + d.a2**2 - d.a1**2)
    assert psi_hat(t, 0.0, 1.0, 0.0) == pytest.approx(limit)
    # series and direct formula at the switch point
    r = 1e-4
    series = psi_hat(t, r, 1.0, 0.0)
    x = r * r * t
    direct = (math.exp(-d.a0 * x) - math.cos(d.a2 * x) * math.exp(-d.a1 * x)) / (r * r) * 2 * d.a1
    direct += math.sin(d.a2 * x) / (d.a2 * r * r) * math.exp(-d.a1 * x) * (d.a0**2 + d.a2**2 - d.a1**2)
    assert series == pytest.approx(direct, rel=1e-6)
    assert psi_hat(t, 0.3, 1.0, 2.0, normalized=True) == pytest.approx(psi_hat(t, 0.3, 1.0, 2.0) / d.profile_normalization)


def test_psi_normalized_matches_sigma_zero_solution():
    # u1-only sigma = 0 solution equals the normalized profile exactly
    r = np.geomspace(0.05, 2, 12)
    t = 4.0
    u = u_hat(t, r, roots_on(r, 0.0), DataSymbol(0.0, 1.0, 0.0))
    assert np.allclose(u, psi_hat(t, r, 1.0, 0.0, normalized=True), rtol=1e-10)


def test_pure_plate():
    assert pure_plate_hat(0.0, 0.8, 2.0, 3.0) == 2.0
    assert pure_plate_hat(5.0, 0.0, 2.0, 3.0) == pytest.approx(17.0)
    t, r, h = 1.3, 0.9, 1e-3
    w = [pure_plate_hat(s, r, 1.0, 1.0) for s in (t - h, t, t + h)]
    second = (w[2] - 2 * w[1] + w[0]) / h**2
    assert second == pytest.approx(-(r**4) * w[1], rel=1e-6)


def test_oracle_examples():
    u, _, _ = ode_oracle_system(3.0, 0.0, 1.0, ONES)
    assert u == pytest.approx(4.0, rel=1e-12)
    assert ode_oracle_third(0.0, 1.0, 1.0, ONES) == 1.0
    assert ode_oracle_third(5.0, 1.0, 1.0, DataSymbol()) == 0
    for r in (0.1, 1.0, 5.0):
        a = ode_oracle_system(10.0, r, 1.0, ONES)[0]
        b = ode_oracle_third(10.0, r, 1.0, ONES)
        assert abs(a - b) <= 1e-8 * abs(a)
    bounded = [abs(ode_oracle_system(t, 1.0, 1.0, DataSymbol(0.0, 0.0, 1.0))[0]) for t in (1.0, 10.0, 100.0)]
    assert max(bounded) < 10


def test_oracle_validation(monkeypatch):
    with pytest.raises(ValueError):
        ode_oracle_system(1.0, 1.0, 1.0, ONES, tol=1e-3)
    _, status, steps = solve_linear(np.array([[0.0, 1.0], [-1e6, 0.0]]), [1.0, 0.0], 1e3, 1e-12, max_steps=10)
    assert status == STATUS_MAX_STEPS and steps == 10
    monkeypatch.setattr(multipliers, "solve_linear", lambda *a, **k: (np.zeros(3, complex), STATUS_MIN_STEP, 0))
    with pytest.raises(StepFailure):
        ode_oracle_system(1.0, 1.0, 1.0, ONES)


@pytest.mark.parametrize("sigma", [0.5, 1.0])
def test_sigma_zero_exactness(sigma):
    for r in (0.1, 1.0, 3.0):
        for t in (0.5, 5.0):
            a = u_hat(t, r, roots_on(np.asarray(r), 0.0), ONES)
            b = ode_oracle_system(t, r, 0.0, ONES)[0]
            assert abs(a - b) <= 1e-7 * max(abs(b), 1e-300)
