"""Small dense complex matrices: characteristic polynomial, spectra, Jordan data.

Matrices are plain ``numpy`` arrays in the computational functions; the
:class:`ComplexMatrix` wrapper exists for validation and JSON exchange.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .cpoly import EPS, Polynomial, cluster_roots, root_clusters
from .errors import ClusteringError, DomainError, MatrixFormError


@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise MatrixFormError(f"expected a nonempty square matrix, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": [[float(z.real), float(z.imag)] for z in self.entries.ravel()],
        }

    @classmethod
    def from_json(cls, data) -> "ComplexMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["n"])
        flat = data["entries"]
        if len(flat) != n * n:
            raise MatrixFormError(f"expected {n * n} entries, got {len(flat)}")
        return cls(np.array([complex(re, im) for re, im in flat]).reshape(n, n))


def as_array(M) -> np.ndarray:
    if isinstance(M, ComplexMatrix):
        return np.array(M.entries)
    return ComplexMatrix(M).entries.copy()


def frobenius(M) -> float:
    return float(np.linalg.norm(np.asarray(M)))


# --- characteristic polynomial ----------------------------------------------


def char_poly_coeffs(A: np.ndarray) -> list:
    """Faddeev-LeVerrier; ascending coefficients of det(tI - A).

    Works for complex and for object arrays (mpmath / Fraction entries).
    """
    n = A.shape[0]
    eye = np.eye(n, dtype=A.dtype)
    c = [0] * (n + 1)
    c[n] = 1
    Mk = np.zeros_like(A)
    for k in range(1, n + 1):
        Mk = A @ Mk + c[n - k + 1] * eye
        c[n - k] = -np.trace(A @ Mk) / k
    return c


def char_poly(M) -> Polynomial:
    return Polynomial(char_poly_coeffs(as_array(M)))


def sigma_high_precision(M, dps: int = 50) -> list:
    """sigma_1..sigma_n evaluated in mpmath at ``dps`` digits (input taken as exact).

    An object array of mpmath numbers is used as given.
    """
    with mpmath.workdps(dps):
        if isinstance(M, np.ndarray) and M.dtype == object:
            obj = M
        else:
            A = as_array(M)
            obj = np.empty(A.shape, dtype=object)
            for idx, z in np.ndenumerate(A):
                obj[idx] = mpmath.mpc(z.real, z.imag)
        n = obj.shape[0]
        c = char_poly_coeffs(obj)
        return [(-1) ** j * c[n - j] for j in range(1, n + 1)]


def eigenvalues(M) -> np.ndarray:
    """Roots of the characteristic polynomial, repeated by multiplicity.

    Numerically multiple roots are merged and polished, so a k-fold
    eigenvalue is returned k times at one accurate value instead of as a
    ring of radius about eps**(1/k).
    """
    return np.concatenate([np.full(k, c, dtype=complex) for c, k in root_clusters(char_poly(M), 0.0, True)])


def spectral_radius(M) -> float:
    return float(max(abs(c) for c, _ in root_clusters(char_poly(M), 0.0, True)))


# --- resolvent quadrature ---------------------------------------------------


def resolvent_projector(M, center: complex, radius: float, nodes: int = 256) -> np.ndarray:
    """(1/2 pi i) * contour integral of (zI - M)^-1 over |z - center| = radius.

    Trapezoidal rule on the circle; spectrally accurate when no eigenvalue
    is near the contour.
    """
    A = as_array(M)
    n = A.shape[0]
    w = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    z = center + radius * w
    shifted = z[:, None, None] * np.eye(n) - A[None, :, :]
    res = np.linalg.solve(shifted, np.broadcast_to(np.eye(n), shifted.shape))
    return (radius * w[:, None, None] * res).sum(axis=0) / nodes


# --- Jordan structure -------------------------------------------------------


@dataclass(frozen=True)
class EigenRecord:
    value: complex
    alg_mult: int  # n(lambda)
    nilpotence: int  # m(lambda)
    blocks: tuple  # Jordan block sizes, decreasing


@dataclass(frozen=True)
class JordanProfile:
    eigenvalues: tuple
    cyclic: bool
    rank_tol: float = 1e-9
    cluster_radius: float = 1e-6

    @property
    def n(self) -> int:
        return sum(e.alg_mult for e in self.eigenvalues)

    def derogatory(self) -> list:
        return [e for e in self.eigenvalues if e.nilpotence < e.alg_mult]

    def block_spec(self) -> list:
        return [(e.value, s) for e in self.eigenvalues for s in e.blocks]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "cyclic": self.cyclic,
            "eigenvalues": [
                {
                    "lambda": [e.value.real, e.value.imag],
                    "n": e.alg_mult,
                    "m": e.nilpotence,
                    "blocks": list(e.blocks),
                }
                for e in self.eigenvalues
            ],
        }


def numerical_rank(A: np.ndarray, threshold: float) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.count_nonzero(s > threshold))


def jordan_profile(M, rank_tol: float = 1e-9, cluster_radius: float = 1e-6) -> JordanProfile:
    """n(lambda), m(lambda) and block sizes for every eigenvalue of M.

    Eigenvalues are clustered from the backward-stable LAPACK spectrum (a
    k-fold eigenvalue scatters by about (eps*|M|)^(1/k)); each cluster centre
    is then refined as tr(M pi)/k with pi the resolvent projector of the
    cluster.  Ranks of (M - lambda I)^j are taken on the range of pi, which
    keeps other eigenvalues from polluting the count.
    """
    A = as_array(M)
    n = A.shape[0]
    scale = n * max(1.0, float(np.linalg.norm(A)))
    clusters = cluster_roots(np.linalg.eigvals(A), radius=cluster_radius, scale=scale)

    def allowance(k):
        return max(cluster_radius, 3.0 * (EPS * scale) ** (1.0 / k))

    for i, (a, ka) in enumerate(clusters):
        for b, kb in clusters[i + 1 :]:
            gap = abs(a - b)
            if gap <= 10 * max(allowance(ka), allowance(kb)):
                raise ClusteringError(
                    f"eigenvalue clusters at {a:.6g} and {b:.6g} are only {gap:.3g} apart"
                )

    records = []
    norm = max(1.0, np.linalg.norm(A, 2))
    for lam, k in clusters:
        if len(clusters) == 1:
            proj = np.eye(n, dtype=complex)
        else:
            gap = min(abs(lam - mu) for mu, _ in clusters if mu != lam)
            proj = resolvent_projector(A, lam, gap / 2)
        lam = complex(np.trace(A @ proj) / k)
        pnorm = np.linalg.norm(proj, 2)
        N = A - lam * np.eye(n)
        ranks = [k]
        power = proj
        for j in range(1, k + 1):
            power = N @ power
            ranks.append(numerical_rank(power, rank_tol * pnorm * norm**j))
            if ranks[-1] == 0:
                break
        m = len(ranks) - 1
        if ranks[-1] != 0:
            raise ClusteringError(
                f"(M - {lam:.6g} I)^k does not vanish on the generalized eigenspace for k <= {k}"
            )
        at_least = [ranks[j - 1] - ranks[j] for j in range(1, m + 1)]
        blocks = []
        for j in range(m, 0, -1):
            exactly = at_least[j - 1] - (at_least[j] if j < m else 0)
            blocks += [j] * exactly
        if sum(blocks) != k:
            raise ClusteringError(
                f"block sizes {blocks} at {lam:.6g} do not add up to multiplicity {k}"
            )
        records.append(EigenRecord(complex(lam), k, m, tuple(blocks)))
    cyclic = all(r.nilpotence == r.alg_mult for r in records)
    return JordanProfile(tuple(records), cyclic, rank_tol, cluster_radius)


def jordan_build(block_spec: Sequence[tuple[complex, int]]) -> np.ndarray:
    """Jordan matrix with v_(j-1,j) = 1 inside blocks.

    Eigenvalues keep their order of first appearance; the blocks of each
    eigenvalue are placed by decreasing size so the zero-column gaps of the
    nilpotent part decrease.
    """
    order: list = []
    sizes: dict = {}
    for lam, s in block_spec:
        if int(s) < 1:
            raise MatrixFormError(f"block size must be >= 1, got {s}")
        lam = complex(lam)
        if lam not in sizes:
            order.append(lam)
            sizes[lam] = []
        sizes[lam].append(int(s))
    n = sum(sum(v) for v in sizes.values())
    if n == 0:
        raise MatrixFormError("empty block specification")
    V = np.zeros((n, n), dtype=complex)
    pos = 0
    for lam in order:
        for s in sorted(sizes[lam], reverse=True):
            for j in range(s):
                V[pos + j, pos + j] = lam
                if j:
                    V[pos + j - 1, pos + j] = 1.0
            pos += s
    return V


def parse_block_spec(text: str) -> list[tuple[complex, int]]:
    """'0:2,0:1;0.8:1' -> [(0,2),(0,1),(0.8,1)]; ',' and ';' both separate blocks."""
    out = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        lam, _, size = item.rpartition(":")
        if not lam:
            raise MatrixFormError(f"malformed block {item!r}; expected value:size")
        out.append((complex(lam.replace(" ", "")), int(size)))
    return out


@dataclass(frozen=True)
class DegreeData:
    """Zero-column data of a nilpotent Jordan matrix and the degrees built from it.

    ``d`` follows the printed rule d_i = 1 + #(F0 in [n-i+2, n]);
    ``d_chain`` is d_i = #(F0 in [1, i]), i.e. d_i = l for b_l <= i < b_(l+1).
    """

    F0: tuple
    d: tuple
    d_chain: tuple
    m: int
    estdi: bool
    estdi_chain: bool


def check_nilpotent_jordan(V: np.ndarray, atol: float = 0.0) -> list[int]:
    """Validate the nilpotent Jordan shape and return the block sizes."""
    n = V.shape[0]
    off = V.copy()
    sup = np.diagonal(V, 1).copy()
    off[np.arange(n - 1), np.arange(1, n)] = 0
    if np.abs(off).max(initial=0) > atol:
        raise MatrixFormError("not a nilpotent Jordan matrix: nonzero entry off the superdiagonal")
    if np.any((np.abs(sup) > atol) & (np.abs(sup - 1) > atol)):
        raise MatrixFormError("superdiagonal entries must be 0 or 1")
    sizes, run = [], 1
    for s in np.abs(sup - 1) <= atol:
        if s:
            run += 1
        else:
            sizes.append(run)
            run = 1
    sizes.append(run)
    return sizes


def f0_and_d(V) -> DegreeData:
    V = as_array(V)
    n = V.shape[0]
    sizes = check_nilpotent_jordan(V)
    if any(a < b for a, b in zip(sizes, sizes[1:])):
        raise MatrixFormError(f"block sizes {sizes} violate the decreasing-gap convention")
    F0 = [j + 1 for j in range(n) if not np.any(V[:, j])]
    b = F0 + [n + 1]
    m = b[1] - b[0]
    d = tuple(1 + sum(1 for f in F0 if n - i + 2 <= f <= n) for i in range(1, n + 1))
    d_chain = tuple(sum(1 for f in F0 if f <= i) for i in range(1, n + 1))
    return DegreeData(
        F0=tuple(F0),
        d=d,
        d_chain=d_chain,
        m=m,
        estdi=all(m * di >= i for i, di in enumerate(d, start=1)),
        estdi_chain=all(m * di >= i for i, di in enumerate(d_chain, start=1)),
    )


# --- Moebius reduction ------------------------------------------------------


def mobius(M, lam0: complex) -> np.ndarray:
    """(lam0 I - M)(I - conj(lam0) M)^-1, sending eigenvalue lam0 to 0."""
    lam0 = complex(lam0)
    if abs(lam0) >= 1:
        raise DomainError(f"|lambda0| must be < 1, got {abs(lam0):.6g}")
    A = as_array(M)
    n = A.shape[0]
    den = np.eye(n) - np.conj(lam0) * A
    if np.linalg.cond(den) > 1e12:
        raise MatrixFormError("I - conj(lambda0) M is numerically singular")
    return (lam0 * np.eye(n) - A) @ np.linalg.inv(den)


def mobius_scalar(z, lam0: complex):
    return (lam0 - z) / (1 - np.conj(lam0) * z)
