"""Contour-integral splitting of the spectrum around a small-eigenvalue cluster.

The enclosed power sums come from the argument-principle kernel
P_M'(z)/P_M(z) = tr (zI - M)^-1, integrated by the trapezoidal rule on a
circle.  From them: the local factor P0 (enclosed eigenvalues), the cofactor
P1, the spectral projector and a block diagonalization P M P^-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr

from .cmatrix import as_array, char_poly, eigenvalues, resolvent_projector
from .cpoly import POWER_TO_ELEMENTARY, Polynomial, SymCoeffs, newton_convert, roots
from .errors import SplittingError


@dataclass(frozen=True)
class SplitResult:
    delta: float
    n0: int
    sigma0: SymCoeffs
    p0: Polynomial
    p1: Polynomial
    factor_residual: float
    center: complex = 0j

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "center": [self.center.real, self.center.imag],
            "n0": self.n0,
            "sigma0": [[v.real, v.imag] for v in self.sigma0.values],
            "p0": self.p0.to_json(),
            "p1": self.p1.to_json(),
            "factor_residual": self.factor_residual,
        }


@dataclass(frozen=True, eq=False)
class BlockDiag:
    P: np.ndarray
    M0: np.ndarray
    M1: np.ndarray
    offdiag_residual: float
    idempotence_residual: float

    def to_json(self) -> dict:
        def mat(a):
            return [[[z.real, z.imag] for z in row] for row in a]

        return {
            "P": mat(self.P),
            "M0": mat(self.M0),
            "M1": mat(self.M1),
            "offdiag_residual": self.offdiag_residual,
            "idempotence_residual": self.idempotence_residual,
        }


def choose_delta(M, target: complex = 0j, n0: int | None = None, tol: float = 1e-9) -> tuple[float, int]:
    """Contour radius around ``target`` separating the n0 nearest eigenvalues.

    Without ``n0`` the split is placed at the largest ratio gap of the sorted
    distances.  Returns (delta, n0).
    """
    # ordering only: LAPACK eigenvalues are accurate enough to place the gap
    dist = np.sort(np.abs(np.linalg.eigvals(as_array(M)) - target))
    n = len(dist)
    if n0 is None:
        if n < 2:
            raise SplittingError("a 1x1 matrix has nothing to split")
        floor = max(dist[-1], 1.0) * 1e-300
        ratios = dist[1:] / np.maximum(dist[:-1], floor)
        n0 = int(np.argmax(ratios)) + 1
    if not 1 <= n0 < n:
        raise SplittingError(f"n0={n0} encloses the whole spectrum of size {n}; nothing to split")
    inner, outer = dist[n0 - 1], dist[n0]
    if outer - inner < 10 * tol:
        raise SplittingError(
            f"no admissible gap: nearest moduli {inner:.6g} and {outer:.6g} around {target}"
        )
    delta = float(np.sqrt(inner * outer)) if inner > 0 else float(outer / 2)
    if np.min(np.abs(dist - delta)) < 1e-3 * delta:
        raise SplittingError(f"eigenvalue within 1e-3*delta of the contour (delta={delta:.6g})")
    return delta, n0


def _power_sums_once(A: np.ndarray, center: complex, delta: float, kmax: int, nodes: int) -> np.ndarray:
    n = A.shape[0]
    w = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    z = center + delta * w
    try:
        resolvents = np.linalg.solve(
            z[:, None, None] * np.eye(n) - A[None], np.broadcast_to(np.eye(n), (nodes, n, n))
        )
    except np.linalg.LinAlgError as exc:
        raise SplittingError(
            f"a quadrature node hits an eigenvalue on the contour of radius {delta:.6g}; choose another delta"
        ) from exc
    kernel = np.trace(resolvents, axis1=1, axis2=2) * delta * w / nodes
    powers = z[None, :] ** np.arange(kmax + 1)[:, None]
    return powers @ kernel


def contour_power_sums(
    M,
    center: complex = 0j,
    delta: float = 0.5,
    kmax: int = 1,
    nodes: int = 256,
    rtol: float = 1e-10,
    max_nodes: int = 8192,
) -> np.ndarray:
    """Sigma_0..Sigma_kmax: power sums of the eigenvalues inside |z - center| < delta.

    Node count doubles until successive estimates agree to ``rtol``
    (relative to max(1, delta**k)); Sigma_0 is the enclosed count.
    """
    A = as_array(M)
    prev = _power_sums_once(A, center, delta, kmax, nodes)
    scale = np.maximum(1.0, delta ** np.arange(kmax + 1))
    while True:
        if 2 * nodes > max_nodes:
            raise SplittingError(
                f"quadrature did not settle at {nodes} nodes; contour radius {delta:.6g} "
                "is too close to an eigenvalue, choose another delta"
            )
        nodes *= 2
        cur = _power_sums_once(A, center, delta, kmax, nodes)
        if np.all(np.abs(cur - prev) <= rtol * scale):
            break
        prev = cur
    if abs(cur[0] - round(cur[0].real)) > 1e-6:
        raise SplittingError(f"Sigma_0 = {cur[0]:.6g} is not an integer; contour hits the spectrum")
    return cur


def local_factor(M, center: complex = 0j, delta: float | None = None, n0: int | None = None,
                 nodes: int = 256, tol: float = 1e-8) -> SplitResult:
    """P_M = P0 * P1 with P0 carrying the eigenvalues enclosed by the contour."""
    A = as_array(M)
    n = A.shape[0]
    if delta is None:
        delta, n0 = choose_delta(A, center, n0)
    sums = contour_power_sums(A, center, delta, kmax=n, nodes=nodes)
    n0_found = int(round(sums[0].real))
    if n0 is not None and n0_found != n0:
        raise SplittingError(f"contour encloses {n0_found} eigenvalues, expected {n0}")
    if not 1 <= n0_found < n:
        raise SplittingError(f"contour encloses {n0_found} of {n} eigenvalues; need a proper split")
    sigma0 = SymCoeffs(newton_convert(POWER_TO_ELEMENTARY, list(sums[1 : n0_found + 1])))
    p0 = Polynomial.from_sym(sigma0)
    P = char_poly(A)
    p1, rem = P.divmod(p0)
    residual = float(np.abs(rem).max(initial=0.0))
    if residual > tol * (1 + np.abs(P.coeffs).max()):
        raise SplittingError(f"P0 does not divide the characteristic polynomial: residual {residual:.3g}")
    return SplitResult(float(delta), n0_found, sigma0, p0, p1, residual, complex(center))


def _range_basis(proj: np.ndarray, rank: int) -> np.ndarray:
    """Orthonormal basis of range(proj) built from its best coordinate columns.

    Pivoted QR picks the coordinates; a positive-diagonal QR then keeps
    coordinate vectors fixed whenever proj already acts as the identity on them.
    """
    _, _, piv = qr(proj, pivoting=True)
    cols = proj[:, np.sort(piv[:rank])]
    q, r = np.linalg.qr(cols)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def block_diagonalize(M, center: complex = 0j, delta: float | None = None, n0: int | None = None,
                      reference=None, nodes: int = 256, tol: float = 1e-8) -> BlockDiag:
    """P M P^-1 = diag(M0, M1) with P^-1 = [pi0 E0, (I - pi0) E1].

    E0, E1 span the reference splitting: the leading n0 coordinates and the
    rest by default, or the spectral subspaces of ``reference`` (same
    contour) when given.  pi0 is the spectral projector of M; with this basis
    P is exactly pi0 on U0 plus pi1 on U1, so P = I + O(|M - reference|).
    """
    A = as_array(M)
    n = A.shape[0]
    if delta is None:
        delta, n0 = choose_delta(A, center, n0)
    try:
        pi0 = resolvent_projector(A, center, delta, nodes)
    except np.linalg.LinAlgError as exc:
        raise SplittingError(f"contour of radius {delta:.6g} passes through the spectrum") from exc
    idem = float(np.linalg.norm(pi0 @ pi0 - pi0))
    if idem > tol:
        raise SplittingError(f"projector is not idempotent: |pi0^2 - pi0| = {idem:.3g}")
    rank = int(round(np.trace(pi0).real))
    if n0 is not None and rank != n0:
        raise SplittingError(f"projector rank {rank} differs from n0={n0}")
    if not 1 <= rank < n:
        raise SplittingError(f"projector rank {rank} gives no proper split of C^{n}")
    if reference is None:
        E0, E1 = np.eye(n)[:, :rank], np.eye(n)[:, rank:]
    else:
        ref0 = resolvent_projector(as_array(reference), center, delta, nodes)
        E0 = _range_basis(ref0, rank)
        E1 = _range_basis(np.eye(n) - ref0, n - rank)
    S = np.hstack([pi0 @ E0, (np.eye(n) - pi0) @ E1])
    if np.linalg.cond(S) > 1e8:
        raise SplittingError("spectral subspaces are far from the reference splitting")
    P = np.linalg.inv(S)
    D = P @ A @ S
    M0, M1 = D[:rank, :rank].copy(), D[rank:, rank:].copy()
    off = D.copy()
    off[:rank, :rank] = 0
    off[rank:, rank:] = 0
    return BlockDiag(P, M0, M1, float(np.linalg.norm(off)), idem)


def enclosed_spectral_radius(M, center: complex = 0j, n0: int | None = None) -> float:
    """rho0: the largest |root| of the local factor P0."""
    split = local_factor(M, center, n0=n0)
    return float(np.abs(roots(split.p0)).max())
