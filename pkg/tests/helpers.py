from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment


def matched_error(a, b) -> float:
    """Largest distance after optimal matching of two multisets."""
    a, b = np.asarray(a), np.asarray(b)
    cost = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max())


def random_conditioned(rng: np.random.Generator, n: int, cond: float) -> np.ndarray:
    """Random complex matrix with 2-norm condition number exactly ``cond``."""
    def unitary():
        q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        return q * (np.diag(r) / np.abs(np.diag(r)))

    s = np.geomspace(1.0, 1.0 / cond, n) if n > 1 else np.ones(1)
    return unitary() @ np.diag(s) @ unitary()


def schur_cohn_inside(coeffs_ascending, strict_margin: float = 0.0) -> bool:
    """Schur-Cohn recursion: all roots in |z| < 1.

    Independent of any root finder; works on the coefficient list directly.
    """
    a = np.array(coeffs_ascending, dtype=complex)[::-1]  # descending, a[0] leading
    while len(a) > 1:
        lead, const = a[0], a[-1]
        if abs(const) >= abs(lead) * (1 - strict_margin):
            return False
        # reduced polynomial: conj(a0) p(z) - a_n p*(z), divided by z
        rev = np.conj(a[::-1])
        b = np.conj(lead) * a - const * rev
        a = b[:-1]
    return True
