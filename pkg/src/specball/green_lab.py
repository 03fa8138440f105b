"""Counterexample matrices, computable Green-function competitors and
log-log exponent fits for the spectral ball versus the symmetrized polydisk.

No Green function is ever solved for.  Every statement of the form
``f(zeta) <= k log|zeta| + O(1)`` is checked as a least-squares slope of
max-over-angles values against log|zeta| over a decade grid of radii.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .cmatrix import (
    as_array,
    check_nilpotent_jordan,
    f0_and_d,
    jordan_build,
    jordan_profile,
    mobius,
    mobius_scalar,
    sigma_high_precision,
    spectral_radius,
)
from .cpoly import Polynomial, roots
from .domains import ball_radii, sigma
from .errors import DomainError, MatrixFormError, SpecballError
from .splitting import enclosed_spectral_radius

DEFAULT_RADII = tuple(10.0 ** -k for k in range(1, 7))


@dataclass(frozen=True)
class ExponentFit:
    radii: tuple
    angles_per_radius: int
    slope: float
    intercept: float
    max_abs_residual: float
    values: tuple = field(default=(), repr=False)

    def to_json(self) -> dict:
        return {
            "radii": list(self.radii),
            "angles_per_radius": self.angles_per_radius,
            "slope": self.slope,
            "intercept": self.intercept,
            "max_abs_residual": self.max_abs_residual,
        }


@dataclass(frozen=True)
class GreenBounds:
    lower: float
    upper: float
    squeeze: tuple = (float("nan"), float("nan"))

    def consistent(self, atol: float = 1e-12) -> bool:
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            return True
        return self.lower <= self.upper + atol


# --- constructors -------------------------------------------------------------


def make_remark_X(V) -> np.ndarray:
    """Single unit entry at (m, 1) for the nilpotent Jordan V, m = b_2 - 1.

    Then det(tI - V - zeta X) = (t^m - zeta) t^(n-m).
    """
    V = as_array(V)
    data = f0_and_d(V)
    X = np.zeros_like(V)
    X[data.m - 1, 0] = 1.0
    return X


def make_roots_of_unity_X(n: int, form: str = "companion") -> np.ndarray:
    """A matrix with sigma_i = 0 (i < n), sigma_n = (-1)^(n-1): spectrum = n-th roots of unity.

    ``form="companion"`` is the companion matrix of t^n - 1;
    ``form="diagonal"`` is diag(1, w, ..., w^(n-1)), which keeps V + zeta X
    upper triangular for upper triangular V.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if form == "diagonal":
        return np.diag(np.exp(2j * np.pi * np.arange(n) / n))
    if form != "companion":
        raise ValueError(f"unknown form {form!r}")
    X = np.zeros((n, n), dtype=complex)
    X[np.arange(1, n), np.arange(n - 1)] = 1.0
    X[0, n - 1] = 1.0
    return X


def companion(p: Polynomial) -> np.ndarray:
    n = p.degree
    C = np.zeros((n, n), dtype=complex)
    C[np.arange(1, n), np.arange(n - 1)] = 1.0
    C[:, n - 1] = -p.coeffs[:-1]
    return C


def make_gap_X(n: int, m: int, seed: int = 0, budget: int = 100, min_sep: float = 0.05) -> np.ndarray:
    """Companion matrix with sigma_1..sigma_m = 0 and distinct, nonzero, separated roots."""
    if not 1 <= m <= n - 1:
        raise DomainError(f"need 1 <= m <= n-1, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        tail = np.sqrt(rng.uniform(0, 1, n - m)) * np.exp(2j * np.pi * rng.uniform(0, 1, n - m))
        s = np.concatenate([np.zeros(m), tail])
        p = Polynomial.from_sym(s)
        r = roots(p)
        if np.abs(r).min() < min_sep:
            continue
        gaps = np.abs(r[:, None] - r[None, :])
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() >= min_sep:
            return companion(p)
    raise SpecballError(f"make_gap_X: no admissible draw in {budget} attempts (n={n}, m={m})")


def embed(X: np.ndarray, n: int) -> np.ndarray:
    """Place X in the top-left corner of an n x n zero matrix."""
    out = np.zeros((n, n), dtype=complex)
    k = X.shape[0]
    out[:k, :k] = X
    return out


# --- fitting ------------------------------------------------------------------


def exponent_fit(
    h: Callable[[complex], float],
    radii: Sequence[float] = DEFAULT_RADII,
    angles: int = 16,
    seed: int = 0,
) -> ExponentFit:
    """Least-squares slope of max_theta h(r e^{i theta}) against log r.

    The angle grid is equispaced with a seeded random phase offset.
    """
    radii = tuple(float(r) for r in radii)
    if any(a <= b for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly decreasing")
    phase = np.random.default_rng(seed).uniform(0, 2 * np.pi)
    thetas = phase + 2 * np.pi * np.arange(angles) / angles
    values = []
    for r in radii:
        samples = [float(h(r * np.exp(1j * t))) for t in thetas]
        if not np.all(np.isfinite(samples)):
            raise DomainError(f"non-finite sample at radius {r:g}")
        values.append(max(samples))
    x = np.log(radii)
    slope, intercept = np.polyfit(x, values, 1)
    resid = np.asarray(values) - (slope * x + intercept)
    return ExponentFit(radii, angles, float(slope), float(intercept),
                       float(np.abs(resid).max()), tuple(values))


# --- Green-function competitors -------------------------------------------------


def _pole_record(profile):
    for rec in profile.eigenvalues:
        if abs(rec.value) <= 1e-9:
            return rec
    raise DomainError("the pole profile has no eigenvalue at 0; apply mobius first")


def green_lower_omega(profile, M) -> float:
    """Plurisubharmonic minorant of g(V, M) for a pole V with eigenvalue 0.

    Nilpotent pole: m log rho(M).  Otherwise m0 log rho0(M) with rho0 the
    largest root of the local factor enclosing the n0 smallest eigenvalues.
    """
    rec = _pole_record(profile)
    if len(profile.eigenvalues) == 1:
        rho = spectral_radius(M)
        return float("-inf") if rho == 0 else rec.nilpotence * float(np.log(rho))
    rho0 = enclosed_spectral_radius(M, 0j, n0=rec.alg_mult)
    return float("-inf") if rho0 == 0 else rec.nilpotence * float(np.log(rho0))


def lempert_upper_disc(V, X, zeta: complex, angles: int = 64, disc_radius: float = 1.0) -> float:
    """log(|zeta| / s) from the disc w -> V + s w X, which must map the unit disc into Omega_n.

    log rho is subharmonic, so the disc is checked on its boundary circle.
    """
    zeta = complex(zeta)
    if zeta == 0:
        return float("-inf")
    if abs(zeta) >= disc_radius:
        raise DomainError(f"|zeta| = {abs(zeta):g} is not inside the disc of radius {disc_radius:g}")
    V, X = as_array(V), as_array(X)
    bad = _disc_exit(V.tobytes(), X.tobytes(), V.shape[0], angles, disc_radius)
    if bad is not None:
        raise DomainError(f"disc leaves the spectral ball at w = {bad:.6g}")
    return float(np.log(abs(zeta) / disc_radius))


@lru_cache(maxsize=256)
def _disc_exit(vb: bytes, xb: bytes, n: int, angles: int, disc_radius: float):
    """First boundary point w where rho(V + w X) > 1, or None; independent of zeta."""
    V = np.frombuffer(vb, dtype=complex).reshape(n, n)
    X = np.frombuffer(xb, dtype=complex).reshape(n, n)
    s = disc_radius * (1 - 1e-9)
    for t in 2 * np.pi * np.arange(angles) / angles:
        w = s * np.exp(1j * t)
        if spectral_radius(V + w * X) > 1.0 + 1e-9:
            return w
    return None


def green_squeeze_gn(z, r: float, R: float, center=None) -> tuple[float, float]:
    """Bounds on g_{G_n}(c, z) from B(c, r) in G_n in B(c, R)."""
    z = np.asarray(getattr(z, "z", z), dtype=complex)
    c = np.zeros_like(z) if center is None else np.asarray(center, dtype=complex)
    d = float(np.linalg.norm(z - c))
    if d >= r:
        raise DomainError(f"|z - c| = {d:.6g} is not inside the certified ball of radius {r:.6g}")
    if d == 0:
        return float("-inf"), float("-inf")
    return float(np.log(d / R)), float(np.log(d / r))


# --- the report -----------------------------------------------------------------


@dataclass
class ReportConfig:
    radii: tuple = DEFAULT_RADII
    angles: int = 16
    seed: int = 0
    ball_samples: int = 2000
    dps: int = 60


def _choose_pole(profile):
    derog = profile.derogatory()
    pool = derog if derog else list(profile.eigenvalues)
    key = (lambda e: (-(e.alg_mult - e.nilpotence), abs(e.value))) if derog else (
        lambda e: (-e.alg_mult, abs(e.value)))
    return sorted(pool, key=key)[0]


def _unity_perturbed_sigma(W: np.ndarray, n0: int, zeta: complex, dps: int) -> list:
    """sigma(W + zeta X_u) in mpmath with the roots of unity built at ``dps`` digits.

    Float roots of unity do not sum to zero exactly; that rounding would swamp
    the high-order sigma coordinates at small |zeta|.
    """
    import mpmath

    n = W.shape[0]
    with mpmath.workdps(dps):
        obj = np.empty((n, n), dtype=object)
        for idx, z in np.ndenumerate(W):
            obj[idx] = mpmath.mpc(z.real, z.imag)
        zm = mpmath.mpc(zeta.real, zeta.imag)
        for k in range(n0):
            obj[k, k] += zm * mpmath.expjpi(mpmath.mpf(2 * k) / n0)
        return sigma_high_precision(obj, dps)


def _delta_sigma_norm(W: np.ndarray, n0: int, zeta: complex, base: list, dps: int) -> float:
    import mpmath

    s = _unity_perturbed_sigma(W, n0, complex(zeta), dps)
    with mpmath.workdps(dps):
        return float(mpmath.sqrt(sum(abs(a - b) ** 2 for a, b in zip(s, base))))


def theorem2_report(V, config: ReportConfig | None = None) -> dict:
    """Exponents of the computable bounds on both sides of the spectral-ball / polydisk gap.

    Picks an eigenvalue with m(lambda) < n(lambda), moves it to 0 by the
    Moebius map, replaces the result by its Jordan model W (same profile,
    hence the same Green function by conjugation invariance) and fits

    * slope_lower_omega_remark: m log rho(W + zeta E_(m,1)) -> 1,
    * slope_lower_omega_unity: m0 log rho0(W + zeta X_u) -> m,
    * slope_G: both squeeze bounds of g_{G_n}(sigma(W), sigma(W + zeta X_u)) -> n(lambda),

    where X_u is diag(roots of unity) on the pole block.
    """
    cfg = config or ReportConfig()
    V = as_array(V)
    n = V.shape[0]
    profile = jordan_profile(V)
    pole = _choose_pole(profile)
    lam0 = pole.value
    report: dict = {
        "n": n,
        "cyclic": profile.cyclic,
        "profile": profile.to_json(),
        "lambda0": [lam0.real, lam0.imag],
        "config": {"radii": list(cfg.radii), "angles": cfg.angles, "seed": cfg.seed,
                   "ball_samples": cfg.ball_samples, "dps": cfg.dps},
    }

    shifted = mobius(V, lam0) if abs(lam0) > 0 else V
    sprof = jordan_profile(shifted)
    rec0 = _pole_record(sprof)
    if (rec0.alg_mult, rec0.nilpotence, rec0.blocks) != (pole.alg_mult, pole.nilpotence, pole.blocks):
        raise SpecballError("Moebius shift changed the Jordan structure of the pole eigenvalue")
    others = [(mobius_scalar(e.value, lam0), s) for e in profile.eigenvalues if e is not pole
              for s in e.blocks]
    W = jordan_build([(0, s) for s in rec0.blocks] + others)
    wprof = jordan_profile(W)
    n0, m0 = rec0.alg_mult, rec0.nilpotence
    report.update({
        "n_lambda": n0,
        "m_lambda": m0,
        "gap": n0 - m0,
        "blocks": list(rec0.blocks),
        "jordan_model_profile": wprof.to_json(),
    })

    J0 = W[:n0, :n0]
    X_remark = embed(make_remark_X(J0), n)
    X_unity = embed(make_roots_of_unity_X(n0, "diagonal"), n)
    report["constructions"] = {
        "X_remark": f"E_({f0_and_d(J0).m},1) on the pole block: char poly (t^m - zeta) t^(n0-m)",
        "X_unity": "diag of the n0-th roots of unity on the pole block",
        "X_gap": "companion with sigma_1..sigma_m = 0, distinct nonzero roots (side computation)",
        "pole": "Jordan model of the Moebius image, eigenvalue lambda0 sent to 0",
    }

    samples: list = []

    def record(series):
        def wrap(h):
            def inner(zeta):
                v = h(zeta)
                samples.append((series, abs(zeta), float(np.angle(zeta)), v))
                return v
            return inner
        return wrap

    fit_kw = dict(radii=cfg.radii, angles=cfg.angles, seed=cfg.seed)
    fit_remark = exponent_fit(record("lower_omega_remark")(
        lambda z: green_lower_omega(wprof, W + z * X_remark)), **fit_kw)
    fit_unity = exponent_fit(record("lower_omega_unity")(
        lambda z: green_lower_omega(wprof, W + z * X_unity)), **fit_kw)

    base = sigma_high_precision(W, cfg.dps)
    center = np.array([complex(b) for b in base])
    r_in, R_out = ball_radii(n, cfg.ball_samples, cfg.seed, center=center)
    report["ball_radii"] = {"r": r_in, "R": R_out}
    log_d = lambda z: np.log(_delta_sigma_norm(W, n0, z, base, cfg.dps))
    max_d = max(np.exp(log_d(max(cfg.radii) * np.exp(2j * np.pi * k / cfg.angles)))
                for k in range(cfg.angles))
    if max_d >= r_in:
        raise DomainError(f"sigma displacement {max_d:.3g} leaves the certified ball of radius {r_in:.3g}")
    fit_g_upper = exponent_fit(record("squeeze_upper")(lambda z: log_d(z) - np.log(r_in)), **fit_kw)
    fit_g_lower = exponent_fit(record("squeeze_lower")(lambda z: log_d(z) - np.log(R_out)), **fit_kw)

    # pinch along the E_(m,1) disc: m log rho minorant vs. disc majorant
    pinch = 0.0
    ordered = True
    for r in cfg.radii:
        z = complex(r)
        lo = green_lower_omega(wprof, W + z * X_remark)
        hi = lempert_upper_disc(W, X_remark, z) if len(wprof.eigenvalues) == 1 else float("nan")
        if np.isfinite(hi):
            ordered &= GreenBounds(lo, hi).consistent(1e-10)
            pinch = max(pinch, abs(lo - hi))
    report["pinch"] = {"max_abs_gap": pinch if len(wprof.eigenvalues) == 1 else None,
                       "lower_le_upper": bool(ordered)}

    # side computation: gap-type X on the pole block, pole 0 and point zeta X
    side = None
    if m0 < n0:
        Xg = make_gap_X(n0, m0, seed=cfg.seed)
        fit_gap = exponent_fit(
            lambda z: float(np.log(np.linalg.norm(np.array(sigma(z * Xg).z)))), **fit_kw)
        side = {"slope_G_gap": fit_gap.slope, "expected": m0 + 1,
                "exceeds_omega_exponent": bool(fit_gap.slope > m0)}
    report["gap_X_side"] = side

    report["fits"] = {
        "lower_omega_remark": fit_remark.to_json(),
        "lower_omega_unity": fit_unity.to_json(),
        "squeeze_upper": fit_g_upper.to_json(),
        "squeeze_lower": fit_g_lower.to_json(),
    }
    report["slope_lower_omega_remark"] = fit_remark.slope
    report["slope_lower_omega"] = fit_unity.slope
    report["slope_G"] = fit_g_upper.slope
    report["slope_G_lower_bound_fit"] = fit_g_lower.slope
    report["strict_gap"] = bool(fit_g_upper.slope > fit_unity.slope + 0.5)
    report["verdict"] = (
        "cyclic: exponents coincide" if profile.cyclic
        else f"derogatory: n(lambda) - m(lambda) = {n0 - m0} >= 1"
    )
    report["samples"] = samples
    return report
