"""Monic complex polynomials: root finding, symmetric functions, circle tests.

Coefficient arrays are stored lowest degree first, with the leading 1 kept
explicitly.  The characteristic-polynomial sign convention used throughout is

    P(t) = t^n + sum_j (-1)^j s_j t^(n-j)

so ``s = (s_1, ..., s_n)`` are the elementary symmetric functions of the roots.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from .errors import RootFindingError, DomainError

EPS = np.finfo(float).eps

POWER_TO_ELEMENTARY = "power_to_elementary"
ELEMENTARY_TO_POWER = "elementary_to_power"


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Monic polynomial; non-monic input is divided through by its leading coefficient."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        nz = np.flatnonzero(c)
        if nz.size == 0:
            raise DomainError("the zero polynomial has no monic normal form")
        c = c[: nz[-1] + 1] / c[nz[-1]]
        c[-1] = 1.0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_roots(cls, roots: Iterable[complex]) -> "Polynomial":
        c = np.array([1.0 + 0j])
        for r in roots:
            c = np.convolve(c, [-complex(r), 1.0])
        return cls(c)

    @classmethod
    def from_sym(cls, s: "SymCoeffs | Sequence[complex]") -> "Polynomial":
        values = s.values if isinstance(s, SymCoeffs) else tuple(s)
        n = len(values)
        c = np.zeros(n + 1, dtype=complex)
        c[n] = 1.0
        for j, sj in enumerate(values, start=1):
            c[n - j] = (-1) ** j * sj
        return cls(c)

    def sym(self) -> "SymCoeffs":
        n = self.degree
        return SymCoeffs(tuple((-1) ** j * self.coeffs[n - j] for j in range(1, n + 1)))

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for a in self.coeffs[::-1]:
            out = out * x + a
        return out

    def derivative_coeffs(self) -> np.ndarray:
        """Coefficients of p' (not monic, hence a bare array)."""
        return self.coeffs[1:] * np.arange(1, len(self.coeffs))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    def divmod(self, divisor: "Polynomial") -> tuple["Polynomial", np.ndarray]:
        """Synthetic division by a monic divisor; returns (quotient, remainder coeffs)."""
        if divisor.degree > self.degree:
            raise DomainError("divisor degree exceeds dividend degree")
        rem = self.coeffs.copy()
        d = divisor.degree
        q = np.zeros(self.degree - d + 1, dtype=complex)
        for k in range(self.degree - d, -1, -1):
            q[k] = rem[k + d]
            rem[k : k + d + 1] -= q[k] * divisor.coeffs
        return Polynomial(q), rem[:d]

    def to_json(self) -> list:
        return [[float(z.real), float(z.imag)] for z in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "Polynomial":
        if isinstance(data, str):
            data = json.loads(data)
        return cls([complex(re, im) for re, im in data])

    def __repr__(self):
        return f"Polynomial(degree={self.degree}, coeffs={np.round(self.coeffs, 12).tolist()})"


@dataclass(frozen=True)
class SymCoeffs:
    """(s_1, ..., s_n): elementary symmetric functions, equivalently sigma-coordinates."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=complex)


# --- root finding -----------------------------------------------------------


def _horner(c: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for a in c[::-1]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _aberth(c: np.ndarray, z: np.ndarray, max_iter: int) -> tuple[np.ndarray, bool]:
    """Aberth-Ehrlich simultaneous iteration; ``c`` ascending, monic."""
    z = z.copy()
    active = np.ones(len(z), dtype=bool)
    for _ in range(max_iter):
        p, dp = _horner(c, z)
        zero_dp = dp == 0
        dp[zero_dp] = EPS
        ratio = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            repulsion = (1.0 / diff).sum(axis=1)
            w = ratio / (1.0 - ratio * repulsion)
        w[~np.isfinite(w)] = ratio[~np.isfinite(w)]
        w[p == 0] = 0.0
        w[~active] = 0.0
        z -= w
        active &= np.abs(w) > 4 * EPS * np.maximum(np.abs(z), 1e-300)
        if not active.any():
            return z, True
    return z, False


def _residual_ok(c: np.ndarray, r: np.ndarray, tol: float) -> bool:
    p, _ = _horner(c, r)
    scale = (1.0 + np.abs(c).max()) * np.maximum(1.0, np.abs(r)) ** (len(c) - 1)
    return bool(np.all(np.abs(p) <= tol * scale))


def roots(p: Polynomial, tol: float = 1e-12, max_iter: int = 500) -> np.ndarray:
    """All ``p.degree`` roots, repeated according to multiplicity.

    Aberth-Ehrlich iteration, falling back to companion-matrix eigenvalues
    (then re-polished) when the iteration stalls.  Exact zero low-order
    coefficients are deflated as exact zero roots first.
    """
    if p.degree < 1:
        raise DomainError("roots() needs degree >= 1")
    c = p.coeffs
    k = int(np.argmax(c != 0))
    q = c[k:]
    deg = len(q) - 1
    zeros = np.zeros(k, dtype=complex)
    if deg == 0:
        return zeros
    if deg == 1:
        return np.concatenate([zeros, [-q[0]]])

    radius = max(abs(q[0]) ** (1.0 / deg), 1e-3)
    start = radius * np.exp(1j * (2 * np.pi * np.arange(deg) / deg + 0.4))
    z, converged = _aberth(q, start, max_iter)
    if not (converged and _residual_ok(q, z, tol)):
        companion = np.zeros((deg, deg), dtype=complex)
        companion[1:, :-1] = np.eye(deg - 1)
        companion[:, -1] = -q[:-1]
        z, _ = _aberth(q, np.linalg.eigvals(companion), max_iter)
        if not _residual_ok(q, z, tol):
            raise RootFindingError(f"root finder did not converge for {p!r}")
    return np.concatenate([zeros, z])


def cluster_roots(
    rts: Sequence[complex],
    radius: float = 1e-6,
    scale: float = 1.0,
    coeffs: np.ndarray | None = None,
    safety: float = 64.0,
) -> list[tuple[complex, int]]:
    """Merge numerically multiple roots into (mean, multiplicity) pairs.

    A k-fold root scatters under coefficient noise.  Without ``coeffs`` the
    noise is absolute, eps*scale, and the scatter radius (eps*scale)**(1/k).
    With ``coeffs`` the noise is componentwise, eps*|a_j|, and the radius at a
    centre c is (safety*eps*sum|a_j||c|^j / prod_(other roots)|c - r|)**(1/k);
    tiny roots of polynomials with tiny exact coefficients then stay apart.
    Groups merge when their distance is below max(radius, 3*scatter) with k
    the merged (or local) size.  Single linkage, by increasing distance.
    """
    rts = np.asarray(rts, dtype=complex)
    n = len(rts)
    parent = list(range(n))
    size = [1] * n
    absc = None if coeffs is None else np.abs(np.asarray(coeffs))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def scatter(centre: complex, k: int) -> float:
        if absc is None:
            return (EPS * scale) ** (1.0 / k)
        dist = np.abs(rts - centre)
        others = np.sort(dist)[k:]
        lead = float(np.prod(others)) if len(others) else 1.0
        size_at = float(np.sum(absc * abs(centre) ** np.arange(len(absc))))
        if lead == 0:
            return np.inf
        return (safety * EPS * size_at / lead) ** (1.0 / k)

    pairs = sorted(
        (abs(rts[i] - rts[j]), i, j) for i in range(n) for j in range(i + 1, n)
    )
    for d, i, j in pairs:
        a, b = find(i), find(j)
        if a == b:
            continue
        # a k-fold cluster is met pairwise first, so count its local members
        local = int(np.count_nonzero(np.abs(rts - rts[i]) <= 2 * d))
        k = max(size[a] + size[b], local)
        if d <= max(radius, 3.0 * scatter(0.5 * (rts[i] + rts[j]), k)):
            parent[b] = a
            size[a] += size[b]
    groups: dict[int, list[int]] = defaultdict(list)
    for i in range(n):
        groups[find(i)].append(i)
    out = [(complex(rts[idx].mean()), len(idx)) for idx in groups.values()]
    return sorted(out, key=lambda cm: (abs(cm[0]), np.angle(cm[0])))


def polish_multiple_root(p: Polynomial, z0: complex, k: int, steps: int = 20) -> complex:
    """Newton on the (k-1)-th derivative, where a k-fold root of p is simple."""
    c = p.coeffs.copy()
    for _ in range(k - 1):
        c = c[1:] * np.arange(1, len(c))
    z = np.array([complex(z0)])
    for _ in range(steps):
        f, df = _horner(c, z)
        if df[0] == 0:
            break
        step = f / df
        z = z - step
        if abs(step[0]) <= 4 * EPS * max(abs(z[0]), 1e-300):
            break
    # keep the cluster mean if polishing wandered off
    if abs(z[0] - z0) > 1e-2 * max(1.0, abs(z0)):
        return complex(z0)
    return complex(z[0])


def root_clusters(p: Polynomial, radius: float = 1e-6, componentwise: bool = False) -> list[tuple[complex, int]]:
    """(root, multiplicity) pairs with multiple roots polished to full accuracy.

    ``componentwise=True`` models coefficient noise relative to each
    coefficient (see cluster_roots); use it when the coefficients are exact
    or accurate to working precision.
    """
    if componentwise:
        clusters = cluster_roots(roots(p), radius=radius, coeffs=p.coeffs)
    else:
        clusters = cluster_roots(roots(p), radius=radius, scale=1 + np.abs(p.coeffs).max())
    return [(polish_multiple_root(p, c, k) if k > 1 else c, k) for c, k in clusters]


# --- symmetric functions ----------------------------------------------------


def elem_sym(rts: Sequence[complex]) -> SymCoeffs:
    return Polynomial.from_roots(rts).sym()


def newton_convert(direction: str, values: Sequence, n: int | None = None) -> list:
    """Newton's identities between power sums p_k and elementary e_k, k=1..n.

    Generic over the number type (complex, Fraction, mpmath), so the same
    code serves floating and exact checks.
    """
    values = list(values)
    n = len(values) if n is None else n
    if len(values) != n:
        raise DomainError(f"expected {n} values, got {len(values)}")
    if direction == ELEMENTARY_TO_POWER:
        e = values
        p: list = []
        for k in range(1, n + 1):
            acc = (-1) ** (k - 1) * k * e[k - 1]
            for i in range(1, k):
                acc += (-1) ** (i - 1) * e[i - 1] * p[k - i - 1]
            p.append(acc)
        return p
    if direction == POWER_TO_ELEMENTARY:
        p = values
        e = []
        # k e_k = (-1)^(k-1) p_k + sum_{i<k} (-1)^(k-i-1) e_i p_(k-i)
        for k in range(1, n + 1):
            acc = (-1) ** (k - 1) * p[k - 1]
            for i in range(1, k):
                acc += (-1) ** (k - i - 1) * e[i - 1] * p[k - i - 1]
            e.append(acc / k)
        return e
    raise DomainError(f"unknown direction {direction!r}")


@lru_cache(maxsize=None)
def _power_sums_in_elementary(n: int, lmax: int) -> tuple:
    """Symbolic p_1..p_lmax as integer polynomials in e_1..e_n.

    Each entry maps an exponent tuple (r_1..r_n) to an integer coefficient.
    Uses p_k = sum_{i<k} (-1)^(i-1) e_i p_(k-i) + (-1)^(k-1) k e_k, e_i = 0 for i > n.
    """
    ps: list[dict] = []
    for k in range(1, lmax + 1):
        acc: dict = defaultdict(int)
        if k <= n:
            mono = [0] * n
            mono[k - 1] = 1
            acc[tuple(mono)] += (-1) ** (k - 1) * k
        for i in range(1, min(k - 1, n) + 1):
            sign = (-1) ** (i - 1)
            for mono, coef in ps[k - i - 1].items():
                m = list(mono)
                m[i - 1] += 1
                acc[tuple(m)] += sign * coef
        ps.append({m: c for m, c in acc.items() if c != 0})
    return tuple(ps)


def power_sum_in_elementary(l: int, n: int) -> dict:
    """p_l in terms of e_1..e_n, exact integer coefficients."""
    return dict(_power_sums_in_elementary(n, l)[l - 1])


def waring_coefficient(n: int, l: int, k: int) -> Fraction:
    """Coefficient of s_(n-1)^k in (lambda_1^l + ... + lambda_n^l)/n, in s-coordinates.

    Requires l = k(n-1); computed by the exact symbolic Newton recursion.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    if l != k * (n - 1):
        raise DomainError(f"l must equal k(n-1) = {k * (n - 1)}, got {l}")
    mono = [0] * n
    mono[n - 2] = k
    return Fraction(power_sum_in_elementary(l, n).get(tuple(mono), 0), n)


def waring_formula_term(l: int, exponents: Sequence[int]) -> Fraction:
    """Closed-form Waring coefficient of prod e_i^{r_i} in p_l (independent check)."""
    r = list(exponents)
    if sum((i + 1) * ri for i, ri in enumerate(r)) != l:
        return Fraction(0)
    total = sum(r)
    denom = 1
    for ri in r:
        denom *= factorial(ri)
    return Fraction((-1) ** (l - total) * l * factorial(total - 1), denom)


# --- structural tests -------------------------------------------------------


def self_inversive(p: Polynomial, tol: float = 1e-10) -> complex | None:
    """Unimodular eps with a_(n-j) = eps * conj(a_j) for all j, or None."""
    a = p.coeffs
    n = p.degree
    if abs(abs(a[0]) - 1.0) > tol:
        return None
    eps = a[n] / np.conj(a[0])
    eps /= abs(eps)
    if np.all(np.abs(a[::-1] - eps * np.conj(a)) <= tol * (1 + np.abs(a).max())):
        return complex(eps)
    return None


def roots_on_circle(p: Polynomial, tol: float = 1e-8) -> tuple[bool, float]:
    """Whether every root lies on |z| = 1 within ``tol``; max deviation of |root| from 1.

    Numerically multiple roots are merged and polished before measuring;
    a raw k-fold cluster scatters off the circle by about eps**(1/k).
    """
    clusters = root_clusters(p, radius=10 * tol, componentwise=True)
    dev = max(abs(abs(c) - 1.0) for c, _ in clusters)
    return bool(dev <= tol), float(dev)
