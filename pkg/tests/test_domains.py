from __future__ import annotations

from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specball.cmatrix import jordan_build, spectral_radius
from specball.cpoly import Polynomial
from specball.domains import (
    BOUNDARY,
    INSIDE,
    OUTSIDE,
    GPoint,
    ball_radii,
    certify_inner_ball,
    classify_matrix,
    classify_point,
    in_spectral_ball,
    in_symmetrized_polydisk,
    max_root_modulus,
    max_root_modulus_batch,
    shilov_angles,
    shilov_sample,
    shilov_sample_array,
    sigma,
    sigma_of_roots,
)
from specball.green_lab import make_roots_of_unity_X

from .helpers import random_conditioned, schur_cohn_inside


def test_gpoint_json_round_trip():
    z = GPoint([1 + 2j, -0.5, 3j])
    assert GPoint.from_json(z.to_json()) == z
    assert z.to_json() == {"n": 3, "z": [[1.0, 2.0], [-0.5, 0.0], [0.0, 3.0]]}
    with pytest.raises(ValueError):
        GPoint.from_json({"n": 2, "z": [[0, 0]]})


# --- sigma --------------------------------------------------------------------------


def test_sigma_examples():
    assert sigma(np.zeros((3, 3))).z == (0, 0, 0)
    C = make_roots_of_unity_X(3)
    np.testing.assert_allclose(sigma(C).as_array(), [0, 0, 1], atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_sigma_of_scaled_unity(n):
    zeta = 0.3 + 0.4j
    X = make_roots_of_unity_X(n)
    expected = np.zeros(n, dtype=complex)
    expected[-1] = zeta**n * (-1) ** (n - 1)
    np.testing.assert_allclose(sigma(zeta * X).as_array(), expected, atol=1e-15)


def test_sigma_of_roots_matches_polynomial():
    rng = np.random.default_rng(0)
    lam = rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4))
    batch = sigma_of_roots(lam)
    for row, s in zip(lam, batch):
        np.testing.assert_allclose(s, Polynomial.from_roots(row).sym().as_array(), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000))
def test_sigma_conjugation_invariance(n, seed):
    rng = np.random.default_rng(seed)
    M = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(n)
    Q = random_conditioned(rng, n, 50)
    np.testing.assert_allclose(
        sigma(Q @ M @ np.linalg.inv(Q)).as_array(), sigma(M).as_array(), atol=1e-8
    )


# --- membership -------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4, 5, 7])
def test_origin_inside(n):
    assert classify_point(np.zeros(n)) == INSIDE
    assert in_symmetrized_polydisk(GPoint(np.zeros(n)))


@pytest.mark.parametrize("n", [3, 4, 5, 6, 8])
def test_explicit_boundary_point(n):
    # (1, 0, ..., 0, (-1)^n, (-1)^n) is sigma of the roots of (x^(n-1) - 1)(x - 1)
    z = np.zeros(n)
    z[0], z[-2], z[-1] = 1, (-1) ** n, (-1) ** n
    assert classify_point(z) == BOUNDARY
    assert not in_symmetrized_polydisk(z)


def test_random_polydisk_points_inside():
    rng = np.random.default_rng(4)
    for _ in range(50):
        lam = 0.9 * np.sqrt(rng.uniform(0, 1, 5)) * np.exp(2j * np.pi * rng.uniform(0, 1, 5))
        assert classify_point(sigma_of_roots(lam)[0]) == INSIDE


def test_outside_and_matrix_classes():
    assert classify_point([3.0, 2.0]) == OUTSIDE  # roots 1, 2
    assert classify_matrix(np.eye(3)) == BOUNDARY
    assert classify_matrix(0.5 * np.eye(3)) == INSIDE
    assert classify_matrix(jordan_build([(1.2, 2)])) == OUTSIDE
    assert not in_spectral_ball(np.eye(2))


def test_membership_agrees_with_schur_cohn():
    rng = np.random.default_rng(21)
    for _ in range(300):
        n = int(rng.integers(1, 7))
        z = (rng.normal(size=n) + 1j * rng.normal(size=n)) * rng.uniform(0.1, 2.0)
        mu = max_root_modulus(z)
        if abs(mu - 1) < 1e-6:
            continue
        coeffs = Polynomial.from_sym(z).coeffs
        assert (mu < 1) == schur_cohn_inside(coeffs)


def test_membership_agreement_matrices_vs_points():
    rng = np.random.default_rng(8)
    checked = 0
    while checked < 500:
        n = int(rng.integers(1, 7))
        M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        M *= rng.uniform(0.3, 1.7) / spectral_radius(M)
        if abs(spectral_radius(M) - 1) < 0.05:
            continue
        assert in_spectral_ball(M) == in_symmetrized_polydisk(sigma(M))
        checked += 1


def test_batch_modulus_matches_scalar():
    rng = np.random.default_rng(2)
    Z = rng.normal(size=(40, 4)) + 1j * rng.normal(size=(40, 4))
    np.testing.assert_allclose(max_root_modulus_batch(Z), [max_root_modulus(z) for z in Z], rtol=1e-9)


# --- distinguished boundary ------------------------------------------------------------


def test_shilov_all_angles_zero():
    n = 5
    expected = [comb(n, k) for k in range(1, n + 1)]
    np.testing.assert_allclose(sigma_of_roots(np.ones((1, n)))[0], expected)


def test_shilov_samples_on_boundary():
    for z in shilov_sample(4, 200, seed=3):
        assert abs(max_root_modulus(z.z) - 1) < 1e-10
        assert classify_point(z) == BOUNDARY
        assert not in_symmetrized_polydisk(z)


def test_shilov_coefficient_bound():
    _, Z = shilov_sample_array(3, 10_000, seed=42)
    assert np.abs(Z[:, 1]).max() <= 3 + 1e-12


def test_shilov_deterministic():
    a = shilov_angles(3, 50, seed=9)
    b = shilov_angles(3, 50, seed=9)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("workers", [2, 3, 7])
def test_shilov_worker_striding(workers):
    full = shilov_angles(4, 100, seed=5)
    parts = [shilov_angles(4, 100, seed=5, worker=w, workers=workers) for w in range(workers)]
    rebuilt = np.empty_like(full)
    for w, part in enumerate(parts):
        rebuilt[w::workers] = part
    np.testing.assert_array_equal(rebuilt, full)


def test_shilov_count_validated():
    with pytest.raises(ValueError):
        shilov_angles(3, 0, seed=0)


# --- ball radii -----------------------------------------------------------------------


def test_ball_radii_n1():
    r, R = ball_radii(1, samples=1000)
    assert r == pytest.approx(1.0, abs=1e-9) or r <= 1.0
    assert R == pytest.approx(1.0, abs=1e-9)


def test_ball_radii_n2():
    r, R = ball_radii(2, samples=2000)
    assert R >= np.sqrt(5) - 1e-9
    assert 0 < r <= 1


@pytest.mark.parametrize("n", [3, 4])
def test_ball_radii_certified(n):
    r, R = ball_radii(n, samples=2000, seed=1)
    assert 0 < r <= 1 < R
    dirs = np.random.default_rng(99).normal(size=(500, n)) + 1j * np.random.default_rng(98).normal(size=(500, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    # an independent direction set also certifies the inner ball
    assert certify_inner_ball(np.zeros(n, dtype=complex), r * (1 - 1e-3), dirs)


def test_ball_radii_needs_samples():
    with pytest.raises(ValueError):
        ball_radii(3, samples=10)
