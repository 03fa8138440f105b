"""Closed-form bounds for invariant metrics of G_n at the origin in the
direction e_{n-1}, the unimodular family p_{n,t}, and a sampled minimax
estimator for M_n = 1 / gamma_{G_n}(0; e_{n-1})."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cpoly import Polynomial, roots_on_circle, waring_coefficient
from .domains import BOUNDARY, GPoint, classify_point, root_moduli_batch, shilov_sample_array
from .errors import DomainError, SolverError

ASYMPTOTIC_REFERENCE = 2.0 / (1.0 + math.e ** 2)


# --- closed forms ---------------------------------------------------------------


def gamma_lower(n: int) -> float:
    """((n-1)/n)^(1/(n-1)): lower bound for the order-(n-1) Caratheodory-Reiffen metric."""
    if n < 2:
        raise DomainError("gamma_lower needs n >= 2")
    return ((n - 1) / n) ** (1.0 / (n - 1))


def gamma_lower_waring(n: int) -> float:
    """Same value, with (n-1)/n read off as |Waring coefficient| of sigma_{n-1}^{n-1} in p_{(n-1)^2}/n."""
    if n < 2:
        raise DomainError("gamma_lower needs n >= 2")
    l = (n - 1) ** 2
    c = abs(waring_coefficient(n, l, n - 1))
    return float(c) ** (1.0 / (n - 1))


def gamma_upper(n: int) -> float:
    """(1 + q^(n-1)) / (q + q^(n-1)) with q = n/(n-2)."""
    if n < 3:
        raise DomainError("gamma_upper needs n >= 3")
    q = n / (n - 2)
    return (1 + q ** (n - 1)) / (q + q ** (n - 1))


def gamma_upper_exact(n: int) -> Fraction:
    if n < 3:
        raise DomainError("gamma_upper needs n >= 3")
    q = Fraction(n, n - 2)
    return (1 + q ** (n - 1)) / (q + q ** (n - 1))


def t_star(n: int) -> float:
    return (-1) ** (n - 1) * (1 + 2 / (n - 2))


@dataclass(frozen=True)
class MetricBoundsRow:
    n: int
    lower: float
    upper: float
    strict_gap: bool
    note: str = ""

    def to_json(self) -> dict:
        return {"n": self.n, "lower": self.lower, "upper": self.upper,
                "strict_gap": self.strict_gap, "note": self.note}


def bounds_table(n_min: int = 3, n_max: int = 10) -> list[MetricBoundsRow]:
    if not 3 <= n_min <= n_max:
        raise DomainError(f"need 3 <= n_min <= n_max, got {n_min}, {n_max}")
    rows = []
    for n in range(n_min, n_max + 1):
        lo, up = gamma_lower(n), gamma_upper(n)
        note = "n=3 handled by external citation" if n == 3 else ""
        rows.append(MetricBoundsRow(n, lo, up, bool(up < lo), note))
    return rows


# --- the p_{n,t} family ---------------------------------------------------------


def lalo_interval(n: int, printed: bool = False) -> tuple[float, float]:
    """Interval of t with all roots of p_{n,t} on the unit circle.

    By default the interval cut out by the sufficient condition
    2 >= (n-2)|1 + (-1)^n t|, centred at (-1)^(n-1).  ``printed=True`` gives
    the interval centred at (-1)^n; for even n it is the mirror image (and
    still valid because p_{n,-t}(x) = p_{n,t}(-x)), for odd n it is not.
    """
    if n < 3:
        raise DomainError("lalo_interval needs n >= 3")
    c = (-1) ** n if printed else (-1) ** (n - 1)
    h = 2 / (n - 2)
    return (c - h, c + h)


def lakatos_condition(n: int, t: float, slack: float = 1e-12) -> bool:
    if n < 3:
        raise DomainError("lakatos_condition needs n >= 3")
    return 2 + slack >= (n - 2) * abs(1 + (-1) ** n * t)


def admissible_t(n: int, t: float, slack: float = 1e-12) -> bool:
    """t in I_n, or (n even) -t in I_n."""
    if lakatos_condition(n, t, slack):
        return True
    return n % 2 == 0 and lakatos_condition(n, -t, slack)


def p_nt(n: int, t: complex) -> Polynomial:
    c = np.zeros(n + 1, dtype=complex)
    c[n] = 1
    c[n - 1] = (-1) ** (n - 1) * t
    c[1] += t
    c[0] += (-1) ** (n - 1)
    return Polynomial(c)


def q_nt_printed(n: int, t: complex) -> Polynomial:
    """The cofactor of (x + 1) written out term by term."""
    b = 1 + (-1) ** n * t
    c = np.zeros(n, dtype=complex)
    c[n - 1] = 1
    for j in range(1, n - 1):
        c[n - 1 - j] = (-1) ** j * b
    c[0] = (-1) ** (n - 1)
    return Polynomial(c)


@dataclass(frozen=True)
class LaloResult:
    on_circle: bool
    deviation: float
    factored_q: Polynomial
    value_at_minus_one: float
    q_matches_printed: float
    condition: bool

    def to_json(self) -> dict:
        return {
            "on_circle": self.on_circle,
            "deviation": self.deviation,
            "factored_q": self.factored_q.to_json(),
            "p_at_minus_one": self.value_at_minus_one,
            "q_printed_difference": self.q_matches_printed,
            "lakatos_condition": self.condition,
        }


def lalo_check(n: int, t: float, tol: float = 1e-8) -> LaloResult:
    if n < 3:
        raise DomainError("lalo_check needs n >= 3")
    p = p_nt(n, t)
    at = abs(p(-1.0))
    if at > 1e-12 * (1 + abs(t)):
        raise DomainError(f"p_{n},t(-1) = {at:.3g} is not zero")
    q, _ = p.divmod(Polynomial(np.array([1.0, 1.0])))
    diff = float(np.abs(q.coeffs - q_nt_printed(n, t).coeffs).max())
    ok, dev = roots_on_circle(q, tol)
    return LaloResult(bool(ok), float(dev), q, float(at), diff, lakatos_condition(n, t))


def t_grid(n: int, count: int = 100, printed: bool = False) -> np.ndarray:
    lo, hi = lalo_interval(n, printed)
    return np.linspace(lo, hi, count)


def boundary_point_from_t(n: int, t: float, tol: float = 1e-8) -> GPoint:
    """((-1)^n t, 0, ..., 0, (-1)^(n-1) t, -1); sigma-image of the roots of p_{n,t}.

    Accepted for admissible t, or when the roots are verified unimodular.
    """
    if n < 3:
        raise DomainError("boundary_point_from_t needs n >= 3")
    z = np.zeros(n, dtype=complex)
    z[0] = (-1) ** n * t
    z[n - 2] += (-1) ** (n - 1) * t
    z[n - 1] = -1
    pt = GPoint(z)
    if not admissible_t(n, t):
        ok, dev = roots_on_circle(p_nt(n, t), tol)
        if not ok:
            raise DomainError(f"t={t} lies outside I_n for n={n} and p_(n,t) has a root off the circle (dev {dev:.3g})")
    if classify_point(pt, tol) != BOUNDARY:
        raise DomainError(f"point for n={n}, t={t} fails the boundary test")
    return pt


def mnt_lower(n: int, t: float, override: bool = False) -> float:
    """|t^(n-1) + t| / (1 + |t|^(n-1)); equals the exact two-point minimax value."""
    if n < 3:
        raise DomainError("mnt_lower needs n >= 3")
    if not override and not admissible_t(n, t):
        raise DomainError(f"t={t} is outside I_n for n={n}; pass override=True to evaluate anyway")
    return abs(t ** (n - 1) + t) / (1 + abs(t) ** (n - 1))


def two_point_minimax(n: int, t: float) -> tuple[float, complex]:
    """inf_a max(|(-1)^n + a|, |(-1)^(n-1) t + a t^(n-1)|) and its minimizer.

    Two weighted distances |a - p| and w|a - q| on a line: the optimum sits on
    the segment at a = (p + w q)/(1 + w).
    """
    p = (-1) ** (n - 1)
    w = abs(t) ** (n - 1)
    q = (-1) ** n * t / t ** (n - 1)
    a = (p + w * q) / (1 + w)
    return w * abs(p - q) / (1 + w), complex(a)


# --- minimax ---------------------------------------------------------------------


def index_set(n: int) -> list[tuple[int, ...]]:
    """(n-2)-tuples alpha with sum_i i * alpha_i = n - 1."""
    if n < 3:
        raise DomainError("index_set needs n >= 3")
    k = n - 2
    out = []

    def rec(i, remaining, acc):
        if i > k:
            if remaining == 0:
                out.append(tuple(acc))
            return
        for a in range(remaining // i + 1):
            rec(i + 1, remaining - a * i, acc + [a])

    rec(1, n - 1, [])
    return sorted(out, reverse=True)


@dataclass
class MinimaxProblem:
    n: int
    index_set: list
    samples: np.ndarray
    restricted: bool = False
    labels: list = field(default_factory=list)

    def __post_init__(self):
        self.samples = np.atleast_2d(np.asarray(self.samples, dtype=complex))
        for a in self.index_set:
            if sum((i + 1) * v for i, v in enumerate(a)) != self.n - 1:
                raise DomainError(f"alpha={a} violates the weighted-sum condition for n={self.n}")

    def design(self) -> tuple[np.ndarray, np.ndarray]:
        """(b, A) so that the objective is max_s |b_s + A_s a|."""
        Z = self.samples
        b = Z[:, self.n - 2]
        A = np.stack([np.prod(Z[:, : self.n - 2] ** np.array(a), axis=1) for a in self.index_set], axis=1)
        return b, A


def explicit_boundary_points(n: int, count: int = 100) -> np.ndarray:
    """(1, 0, ..., (-1)^n, (-1)^n) plus boundary_point_from_t over a t-grid of I_n (and t*)."""
    first = np.zeros(n, dtype=complex)
    first[0] = 1
    first[n - 2] = (-1) ** n
    first[n - 1] = (-1) ** n
    pts = [first]
    ts = list(t_grid(n, count)) + [t_star(n)]
    if n % 2 == 0:
        ts += [-t for t in ts]
    pts += [boundary_point_from_t(n, t).as_array() for t in ts]
    return np.array(pts)


def slice_shilov_samples(n: int, count: int, seed: int, unimodular_tol: float = 1e-9) -> np.ndarray:
    """Distinguished-boundary points of the form (z_1, 0, ..., 0, z_{n-1}, z_n).

    Rejection sampling over self-inversive x^n + a x^(n-1) + e conj(a) x + e,
    |e| = 1, keeping draws whose roots are all unimodular.
    """
    rng = np.random.default_rng(seed)
    amax = 1 + 2 / max(n - 2, 1) + 0.5
    found: list[np.ndarray] = []
    total = 0
    while total < count:
        batch = 2 * (count - total) + 64
        a = amax * np.sqrt(rng.uniform(0, 1, batch)) * np.exp(2j * np.pi * rng.uniform(0, 1, batch))
        e = np.exp(2j * np.pi * rng.uniform(0, 1, batch))
        Z = np.zeros((batch, n), dtype=complex)
        # P(x) = x^n + sum_j (-1)^j z_j x^(n-j)
        Z[:, 0] = -a
        Z[:, n - 2] += (-1) ** (n - 1) * e * np.conj(a)
        Z[:, n - 1] = (-1) ** n * e
        keep = np.all(np.abs(root_moduli_batch(Z) - 1) <= unimodular_tol, axis=1)
        found.append(Z[keep])
        total += int(keep.sum())
    return np.vstack(found)[:count]


def make_problem(n: int, samples: int = 10_000, seed: int = 0, restricted: bool = False,
                 explicit_points: bool = True) -> MinimaxProblem:
    """Boundary samples plus the explicit boundary points; ``restricted`` uses the
    slice z_2 = ... = z_{n-2} = 0, where only alpha = (n-1, 0, ..., 0) survives."""
    if samples < 1000:
        raise DomainError("minimax needs at least 1000 boundary samples")
    if restricted and n > 3:
        Z = slice_shilov_samples(n, samples, seed)
    else:
        _, Z = shilov_sample_array(n, samples, seed)
    labels = ["shilov"] * len(Z)
    if explicit_points:
        extra = explicit_boundary_points(n)
        Z = np.vstack([Z, extra])
        labels += ["explicit"] * len(extra)
    if restricted:
        alphas = [tuple([n - 1] + [0] * (n - 3))]
    else:
        alphas = index_set(n)
    return MinimaxProblem(n, alphas, Z, restricted, labels)


def objective(problem: MinimaxProblem, a) -> float:
    b, A = problem.design()
    return float(np.abs(b + A @ np.asarray(a, dtype=complex)).max())


@dataclass(frozen=True)
class MinimaxResult:
    estimate: float
    coefficients: np.ndarray
    trace: np.ndarray
    sample_count: int
    restarts: int

    def to_json(self) -> dict:
        return {
            "estimate": self.estimate,
            "kind": "sampled minimax",
            "sample_count": self.sample_count,
            "restarts": self.restarts,
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
            "trace_length": int(len(self.trace)),
            "trace_final": float(self.trace[-1]),
        }


def minimax_Mn(
    problem: MinimaxProblem,
    iterations: int = 3000,
    restarts: int = 10,
    step: float = 0.5,
    seed: int = 0,
    guard: int = 1000,
) -> MinimaxResult:
    """Subgradient descent on a -> max_s |b_s + A_s a| with steps step/sqrt(k).

    Restarts from the unit polydisk (the first one from 0).  The trace is the
    best-so-far value across all iterations of all restarts.
    """
    b, A = problem.design()
    k = A.shape[1]
    rng = np.random.default_rng(seed)
    best_val, best_a = np.inf, np.zeros(k, dtype=complex)
    trace = []
    for r in range(restarts):
        if r == 0:
            a = np.zeros(k, dtype=complex)
        else:
            a = np.sqrt(rng.uniform(0, 1, k)) * np.exp(2j * np.pi * rng.uniform(0, 1, k))
        f0 = None
        above = 0
        for it in range(1, iterations + 1):
            w = b + A @ a
            mod = np.abs(w)
            s = int(np.argmax(mod))
            f = float(mod[s])
            if f0 is None:
                f0 = f
            if f < best_val:
                best_val, best_a = f, a.copy()
            trace.append(best_val)
            above = above + 1 if f > f0 else 0
            if above >= guard:
                raise SolverError(f"subgradient diverged: objective above its start for {guard} iterations")
            g = np.conj(A[s]) * (w[s] / f if f > 0 else 1.0)
            gn = np.linalg.norm(g)
            if gn == 0:
                break
            a = a - step / math.sqrt(it) * g / gn
    return MinimaxResult(best_val, best_a, np.array(trace), len(b), restarts)


# --- asymptotics -------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticsRow:
    n: int
    upper_gap: float
    lower_gap: float


def asymptotics_report(n_max: int = 200, n_min: int = 10) -> dict:
    """n(1 - gamma_upper(n)) and n(1 - gamma_lower(n)) against the 2/(1+e^2) line."""
    if n_max < 10:
        raise DomainError("asymptotics_report needs n_max >= 10")
    rows = [AsymptoticsRow(n, n * (1 - gamma_upper(n)), n * (1 - gamma_lower(n)))
            for n in range(n_min, n_max + 1)]
    lower = [r.lower_gap for r in rows]
    return {
        "reference": ASYMPTOTIC_REFERENCE,
        "rows": [{"n": r.n, "n_one_minus_gamma_upper": r.upper_gap,
                  "n_one_minus_gamma_lower": r.lower_gap} for r in rows],
        "upper_min": min(r.upper_gap for r in rows),
        "upper_above_reference_minus_0.01": all(r.upper_gap >= ASYMPTOTIC_REFERENCE - 0.01 for r in rows),
        "lower_strictly_decreasing": all(b < a for a, b in zip(lower, lower[1:])),
    }


__all__ = [
    "ASYMPTOTIC_REFERENCE", "MetricBoundsRow", "MinimaxProblem", "MinimaxResult", "LaloResult",
    "gamma_lower", "gamma_lower_waring", "gamma_upper", "gamma_upper_exact", "t_star", "bounds_table",
    "lalo_interval", "lakatos_condition", "admissible_t", "p_nt", "q_nt_printed", "lalo_check",
    "t_grid", "boundary_point_from_t", "mnt_lower", "two_point_minimax", "index_set",
    "explicit_boundary_points", "slice_shilov_samples", "make_problem", "objective", "minimax_Mn", "asymptotics_report",
]
