"""The sigma map, membership in the spectral ball and the symmetrized polydisk,
distinguished-boundary sampling, and ball radii for Green-function squeezes."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .cmatrix import as_array, char_poly, spectral_radius
from .cpoly import Polynomial, root_clusters

INSIDE = "inside"
BOUNDARY = "boundary"
OUTSIDE = "outside"


@dataclass(frozen=True)
class GPoint:
    """A point of C^n read as sigma-coordinates."""

    z: tuple

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(complex(v) for v in np.ravel(self.z)))

    @property
    def n(self) -> int:
        return len(self.z)

    def as_array(self) -> np.ndarray:
        return np.array(self.z, dtype=complex)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def polynomial(self) -> Polynomial:
        return Polynomial.from_sym(self.z)

    def to_json(self) -> dict:
        return {"n": self.n, "z": [[v.real, v.imag] for v in self.z]}

    @classmethod
    def from_json(cls, data) -> "GPoint":
        if isinstance(data, str):
            data = json.loads(data)
        z = [complex(re, im) for re, im in data["z"]]
        if len(z) != int(data["n"]):
            raise ValueError(f"GPoint declares n={data['n']} but has {len(z)} coordinates")
        return cls(z)


def sigma(M) -> GPoint:
    return GPoint(char_poly(M).sym().values)


def sigma_of_roots(lam: np.ndarray) -> np.ndarray:
    """Row-wise elementary symmetric functions; ``lam`` has shape (count, n)."""
    lam = np.atleast_2d(lam)
    count, n = lam.shape
    e = np.zeros((count, n + 1), dtype=complex)
    e[:, 0] = 1.0
    for k in range(n):
        e[:, 1 : k + 2] = e[:, 1 : k + 2] + lam[:, k : k + 1] * e[:, 0 : k + 1]
    return e[:, 1:]


def max_root_modulus(z) -> float:
    """Largest |root| of P_z, with multiple roots polished (accurate near the boundary)."""
    return max(abs(c) for c, _ in root_clusters(Polynomial.from_sym(np.ravel(z)), 0.0, True))


def max_root_modulus_batch(Z: np.ndarray) -> np.ndarray:
    """Vectorized largest |root| for many points via stacked companion matrices."""
    return root_moduli_batch(Z).max(axis=1)


def root_moduli_batch(Z: np.ndarray) -> np.ndarray:
    """|roots| of P_z for each row of Z, shape (count, n)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    count, n = Z.shape
    comp = np.zeros((count, n, n), dtype=complex)
    if n > 1:
        comp[:, np.arange(1, n), np.arange(n - 1)] = 1.0
    signs = (-1.0) ** np.arange(1, n + 1)
    # P(t) = t^n + sum_j (-1)^j z_j t^(n-j); last column holds -c_0..-c_(n-1)
    comp[:, :, n - 1] = -(signs * Z)[:, ::-1]
    return np.abs(np.linalg.eigvals(comp))


def classify_modulus(mu: float, tol: float) -> str:
    if abs(mu - 1.0) <= tol:
        return BOUNDARY
    return INSIDE if mu < 1.0 else OUTSIDE


def classify_point(z, tol: float = 1e-8) -> str:
    return classify_modulus(max_root_modulus(z.z if isinstance(z, GPoint) else z), tol)


def classify_matrix(M, tol: float = 1e-8) -> str:
    return classify_modulus(spectral_radius(M), tol)


def in_spectral_ball(M, tol: float = 1e-8) -> bool:
    return spectral_radius(M) < 1.0 - tol


def in_symmetrized_polydisk(z, tol: float = 1e-8) -> bool:
    return max_root_modulus(z.z if isinstance(z, GPoint) else z) < 1.0 - tol


# --- distinguished boundary ---------------------------------------------------


def shilov_angles(n: int, count: int, seed: int, worker: int = 0, workers: int = 1) -> np.ndarray:
    """Seeded uniform angles, shape (count, n); worker w of k keeps rows w, w+k, ..."""
    if count < 1:
        raise ValueError("count must be >= 1")
    angles = np.random.default_rng(seed).uniform(0.0, 2 * np.pi, size=(count, n))
    return angles[worker::workers]


def shilov_sample_array(
    n: int, count: int, seed: int, worker: int = 0, workers: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    angles = shilov_angles(n, count, seed, worker, workers)
    return angles, sigma_of_roots(np.exp(1j * angles))


def shilov_sample(n: int, count: int, seed: int, worker: int = 0, workers: int = 1) -> list[GPoint]:
    _, Z = shilov_sample_array(n, count, seed, worker, workers)
    return [GPoint(z) for z in Z]


# --- ball radii ---------------------------------------------------------------


def _unit_directions(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    u = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    # coordinate axes are the usual worst cases, include them explicitly
    axes = np.eye(n, dtype=complex)
    return np.vstack([axes, -axes, 1j * axes, u])


def certify_inner_ball(
    center: np.ndarray,
    radius: float,
    directions: np.ndarray,
    fractions=np.linspace(0.125, 1.0, 8),
) -> bool:
    pts = (
        center[None, None, :]
        + radius * fractions[None, :, None] * directions[:, None, :]
    ).reshape(-1, len(center))
    return bool(np.all(max_root_modulus_batch(pts) < 1.0))


def ball_radii(
    n: int,
    samples: int = 2000,
    seed: int = 0,
    center=None,
    directions: int = 2048,
    shrink: float = 0.9,
) -> tuple[float, float]:
    """(r, R) with B(c, r) inside G_n (certified on a direction grid) and
    R an estimate of max |z - c| over the closure of G_n.

    R is maximized over distinguished-boundary samples and refined by a local
    search in the angles.  r starts at the closest sample and shrinks until
    every grid point of B(c, r(1 - 1e-3)) passes the membership test.
    """
    if samples < 1000:
        raise ValueError("ball_radii needs at least 1000 samples")
    c = np.zeros(n, dtype=complex) if center is None else np.asarray(center, dtype=complex)
    angles, Z = shilov_sample_array(n, samples, seed)
    dist = np.linalg.norm(Z - c, axis=1)

    def neg_dist(theta):
        return -np.linalg.norm(sigma_of_roots(np.exp(1j * theta[None, :]))[0] - c)

    best = minimize(neg_dist, angles[np.argmax(dist)], method="Nelder-Mead",
                    options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
    R = max(float(dist.max()), -float(best.fun))

    rng = np.random.default_rng(seed + 1)
    dirs = _unit_directions(n, directions, rng)
    coarse = dirs[: 3 * n + 64]
    r = float(dist.min())
    for _ in range(200):
        # cheap screen first, full grid only for surviving candidates
        if certify_inner_ball(c, r * (1 - 1e-3), coarse) and certify_inner_ball(c, r * (1 - 1e-3), dirs):
            return r, R
        r *= shrink
    return 0.0, R
