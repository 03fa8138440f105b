from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specball.cmatrix import char_poly, jordan_build, jordan_profile, spectral_radius
from specball.domains import in_spectral_ball, sigma
from specball.errors import DomainError, MatrixFormError
from specball.green_lab import (
    ExponentFit,
    GreenBounds,
    ReportConfig,
    embed,
    exponent_fit,
    green_lower_omega,
    green_squeeze_gn,
    lempert_upper_disc,
    make_gap_X,
    make_remark_X,
    make_roots_of_unity_X,
    theorem2_report,
)

ZETA = 0.3 - 0.2j


def nilpotent(*sizes):
    return jordan_build([(0, s) for s in sizes])


# --- constructors -------------------------------------------------------------------


@pytest.mark.parametrize(
    "sizes,row,m",
    [((3,), 3, 3), ((2, 1), 2, 2), ((3, 2), 3, 3), ((4, 1, 1), 4, 4)],
)
def test_remark_X_position_and_char_poly(sizes, row, m):
    V = nilpotent(*sizes)
    X = make_remark_X(V)
    assert X[row - 1, 0] == 1 and np.count_nonzero(X) == 1
    n = V.shape[0]
    expected = np.zeros(n + 1, dtype=complex)
    expected[n], expected[n - m] = 1, -ZETA
    np.testing.assert_allclose(char_poly(V + ZETA * X).coeffs, expected, atol=1e-15)


def test_remark_X_rejects_non_jordan():
    with pytest.raises(MatrixFormError):
        make_remark_X(np.diag([0.5, 0.0]))


@pytest.mark.parametrize("form", ["companion", "diagonal"])
@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_roots_of_unity_spectrum(form, n):
    X = make_roots_of_unity_X(n, form)
    ev = np.linalg.eigvals(X)
    np.testing.assert_allclose(ev**n, 1, atol=1e-12)
    s = sigma(ZETA * X).as_array()
    np.testing.assert_allclose(np.abs(s[:-1]), 0, atol=1e-14)
    assert abs(s[-1]) == pytest.approx(abs(ZETA) ** n)
    assert in_spectral_ball(0.9 * X) and not in_spectral_ball(X)


def test_roots_of_unity_n2_sigma():
    np.testing.assert_allclose(sigma(ZETA * make_roots_of_unity_X(2)).as_array(), [0, -(ZETA**2)], atol=1e-15)


def test_roots_of_unity_bad_input():
    with pytest.raises(DomainError):
        make_roots_of_unity_X(0)
    with pytest.raises(ValueError):
        make_roots_of_unity_X(3, "triangular")


@pytest.mark.parametrize("n,m", [(3, 1), (4, 2), (5, 3), (4, 3)])
def test_gap_X_structure(n, m):
    X = make_gap_X(n, m, seed=2)
    s = sigma(X).as_array()
    np.testing.assert_allclose(s[:m], 0, atol=1e-14)
    r = np.linalg.eigvals(X)
    assert np.abs(r).min() >= 0.05
    d = np.abs(r[:, None] - r[None, :]) + np.eye(n)
    assert d.min() >= 0.05 - 1e-9


@pytest.mark.parametrize("n,m", [(3, 1), (4, 2), (5, 4)])
def test_gap_X_sigma_slope(n, m):
    X = make_gap_X(n, m, seed=0)
    fit = exponent_fit(lambda z: np.log(np.linalg.norm(sigma(z * X).as_array())))
    assert fit.slope == pytest.approx(m + 1, abs=0.05)


def test_gap_X_bad_m():
    with pytest.raises(DomainError):
        make_gap_X(3, 3)


def test_gap_X_seeded():
    np.testing.assert_array_equal(make_gap_X(4, 2, seed=5), make_gap_X(4, 2, seed=5))


def test_embed():
    E = embed(np.ones((2, 2)), 4)
    assert E.shape == (4, 4) and E.sum() == 4 and E[:2, :2].sum() == 4


# --- exponent fit -----------------------------------------------------------------------


def test_fit_log_modulus():
    fit = exponent_fit(lambda z: np.log(abs(z)))
    assert fit.slope == pytest.approx(1, abs=1e-12)
    assert fit.max_abs_residual < 1e-12
    assert isinstance(fit, ExponentFit) and fit.angles_per_radius == 16


@pytest.mark.parametrize("n", [2, 3, 5])
def test_fit_remark_rho(n):
    V = nilpotent(n)
    X = make_remark_X(V)
    fit = exponent_fit(lambda z: np.log(spectral_radius(V + z * X)))
    assert fit.slope == pytest.approx(1 / n, abs=0.01)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_fit_unity_sigma(n):
    X = make_roots_of_unity_X(n)
    fit = exponent_fit(lambda z: np.log(np.linalg.norm(sigma(z * X).as_array())))
    assert fit.slope == pytest.approx(n, abs=0.01)


def test_fit_rejects_nonfinite_and_unsorted_radii():
    with pytest.raises(DomainError):
        exponent_fit(lambda z: float("nan"))
    with pytest.raises(ValueError):
        exponent_fit(np.abs, radii=(1e-2, 1e-1))


def test_fit_json_and_seed_determinism():
    h = lambda z: np.log(abs(z)) + 0.1 * np.cos(np.angle(z))
    a, b = exponent_fit(h, seed=3), exponent_fit(h, seed=3)
    assert a.to_json() == b.to_json()
    json.dumps(a.to_json())


# --- Green-function competitors ----------------------------------------------------------


@pytest.mark.parametrize("sizes", [(3,), (2, 1), (3, 2), (4, 1)])
@pytest.mark.parametrize("r", [1e-1, 1e-3, 1e-6])
def test_pinch_identity(sizes, r):
    V = nilpotent(*sizes)
    X = make_remark_X(V)
    zeta = r * np.exp(0.7j)
    val = green_lower_omega(jordan_profile(V), V + zeta * X)
    assert val == pytest.approx(np.log(r), abs=1e-10)


def test_lower_omega_at_zero_matrix():
    assert green_lower_omega(jordan_profile(nilpotent(3)), np.zeros((3, 3))) == float("-inf")


def test_lower_omega_requires_zero_pole():
    with pytest.raises(DomainError):
        green_lower_omega(jordan_profile(0.5 * np.eye(2)), np.zeros((2, 2)))


def test_lower_omega_general_path():
    W = jordan_build([(0, 2), (0.6, 1)])
    X = embed(make_remark_X(nilpotent(2)), 3)
    val = green_lower_omega(jordan_profile(W), W + 1e-4 * X)
    assert val == pytest.approx(np.log(1e-4), abs=1e-8)


def test_lempert_disc_matches_lower_bound():
    V = nilpotent(3)
    X = make_remark_X(V)
    hi = lempert_upper_disc(V, X, 0.1)
    lo = green_lower_omega(jordan_profile(V), V + 0.1 * X)
    assert hi == pytest.approx(np.log(0.1))
    assert abs(hi - lo) < 1e-12
    assert GreenBounds(lo, hi).consistent()


def test_lempert_disc_edge_cases():
    X = make_roots_of_unity_X(3)
    assert lempert_upper_disc(np.zeros((3, 3)), X, 0) == float("-inf")
    assert lempert_upper_disc(np.zeros((3, 3)), X, 0.5) == pytest.approx(np.log(0.5))
    with pytest.raises(DomainError):
        lempert_upper_disc(np.zeros((3, 3)), 2 * X, 0.1)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(3,), (2, 1), (2, 2), (3, 1)]), st.floats(-6, -1), st.floats(0, 2 * np.pi))
def test_bounds_ordered(sizes, logr, theta):
    V = nilpotent(*sizes)
    X = make_remark_X(V)
    zeta = 10**logr * np.exp(1j * theta)
    b = GreenBounds(green_lower_omega(jordan_profile(V), V + zeta * X), lempert_upper_disc(V, X, zeta))
    assert b.consistent(1e-10)


def test_squeeze_examples():
    assert green_squeeze_gn(np.zeros(3), 0.5, 2.0) == (float("-inf"), float("-inf"))
    lo, hi = green_squeeze_gn(np.array([0.25, 0, 0]), 0.5, 2.0)
    assert hi - lo == pytest.approx(np.log(4))
    with pytest.raises(DomainError):
        green_squeeze_gn(np.array([0.6, 0, 0]), 0.5, 2.0)


@pytest.mark.parametrize("which", [0, 1])
def test_squeeze_slope_unity(which):
    n = 3
    X = make_roots_of_unity_X(n)
    fit = exponent_fit(lambda z: green_squeeze_gn(sigma(z * X), 0.5, 3.0)[which])
    assert fit.slope == pytest.approx(n, abs=0.05)


# --- theorem2 report -------------------------------------------------------------------

FAST = ReportConfig(radii=(1e-1, 1e-2, 1e-3, 1e-4), angles=8, ball_samples=1000)


@pytest.mark.parametrize(
    "spec,m,n0,unity",
    [
        ([(0, 2), (0, 1)], 2, 3, 2),
        ([(0, 3), (0, 1)], 3, 4, 3),
        ([(0.5, 2), (0.5, 1)], 2, 3, 2),
        ([(0, 2), (0, 1), (0.6, 1)], 2, 3, 2),
    ],
)
def test_report_derogatory(spec, m, n0, unity):
    rep = theorem2_report(jordan_build(spec), FAST)
    assert (rep["m_lambda"], rep["n_lambda"], rep["gap"]) == (m, n0, n0 - m)
    assert rep["slope_lower_omega_remark"] == pytest.approx(1.0, abs=0.05)
    assert rep["slope_lower_omega"] == pytest.approx(unity, abs=0.05)
    assert rep["slope_G"] == pytest.approx(n0, abs=0.05)
    assert rep["slope_G_lower_bound_fit"] == pytest.approx(n0, abs=0.05)
    assert rep["strict_gap"] and rep["verdict"].startswith("derogatory")
    assert rep["gap_X_side"]["slope_G_gap"] == pytest.approx(m + 1, abs=0.05)
    assert rep["pinch"]["lower_le_upper"]
    json.dumps({k: v for k, v in rep.items() if k != "samples"})


def test_report_cyclic():
    rep = theorem2_report(nilpotent(3), FAST)
    assert rep["cyclic"] and rep["verdict"] == "cyclic: exponents coincide"
    assert rep["slope_lower_omega"] == pytest.approx(rep["slope_G"], abs=0.05)
    assert rep["gap_X_side"] is None


def test_report_samples_cover_grid():
    rep = theorem2_report(nilpotent(2, 1), FAST)
    series = {s for s, *_ in rep["samples"]}
    assert {"lower_omega_remark", "lower_omega_unity", "squeeze_upper", "squeeze_lower"} <= series
    per = sum(1 for s, *_ in rep["samples"] if s == "squeeze_upper")
    assert per == len(FAST.radii) * FAST.angles
