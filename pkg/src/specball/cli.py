"""Command-line front end.

Every subcommand writes one deterministic report (JSON by default, CSV with
``--format csv``) to stdout or ``--out``.  Failures exit with status 2 and a
JSON error object.  Settings resolve as defaults < ``--config`` file <
``SPECBALL_*`` environment variables < explicit flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import cmatrix, domains, green_lab, metrics, splitting
from .cpoly import roots
from .errors import SpecballError, UsageError

CSV_HELP = """CSV columns:
  analyze-matrix   lambda_re, lambda_im, n, m, blocks
  membership       coordinate, re, im, status
  split            k, sigma0_re, sigma0_im
  exponent-fit     radius, value
  theorem2-report  series, radius, angle, value
  metrics-table    n, lower, upper, strict_gap, note
  minimax          iteration, best
  lalo             index, root_re, root_im, modulus
  asymptotics      n, n_one_minus_gamma_upper, n_one_minus_gamma_lower
"""


@dataclass
class RunConfig:
    root_tol: float = 1e-12
    rank_tol: float = 1e-9
    cluster_radius: float = 1e-6
    boundary_tol: float = 1e-8
    fit_tol: float = 0.05
    radii: tuple = green_lab.DEFAULT_RADII
    angles: int = 16
    samples: int = 10_000
    seed: int = 0
    format: str = "json"
    out: str | None = None

    def validate(self) -> None:
        for name in ("root_tol", "rank_tol", "cluster_radius", "boundary_tol", "fit_tol"):
            if not getattr(self, name) > 0:
                raise SpecballError(f"config: {name} must be positive")
        if any(a <= b for a, b in zip(self.radii, self.radii[1:])) or min(self.radii) <= 0:
            raise SpecballError("config: radii must be positive and strictly decreasing")
        if self.format not in ("json", "csv"):
            raise SpecballError(f"config: unknown format {self.format!r}")

    def to_json(self) -> dict:
        d = asdict(self)
        d["radii"] = list(self.radii)
        return d


def _coerce(name: str, raw):
    if name == "radii":
        if isinstance(raw, str):
            raw = [float(v) for v in raw.split(",") if v.strip()]
        return tuple(float(v) for v in raw)
    if name in ("angles", "samples", "seed"):
        return int(raw)
    if name in ("format", "out"):
        return None if raw is None else str(raw)
    return float(raw)


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
        unknown = set(data) - {f.name for f in fields(RunConfig)}
        if unknown:
            raise SpecballError(f"config: unknown keys {sorted(unknown)}")
        values.update(data)
    for f in fields(RunConfig):
        env = environ.get("SPECBALL_" + f.name.upper())
        if env is not None:
            values[f.name] = env
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    cfg.validate()
    return cfg


# --- input parsing -----------------------------------------------------------------


def load_matrix(text: str) -> np.ndarray:
    """A Jordan block spec like "0:2,0:1;0.8:1", a JSON file, or inline JSON."""
    path = Path(text)
    if path.suffix == ".json" or (path.exists() and path.is_file()):
        return cmatrix.ComplexMatrix.from_json(path.read_text()).entries.copy()
    if text.lstrip().startswith("{"):
        return cmatrix.ComplexMatrix.from_json(text).entries.copy()
    return cmatrix.jordan_build(cmatrix.parse_block_spec(text))


def load_point(text: str) -> domains.GPoint:
    """JSON {"n", "z"} (file or inline) or a comma list of Python complex literals."""
    path = Path(text)
    if path.suffix == ".json" or (path.exists() and path.is_file()):
        return domains.GPoint.from_json(path.read_text())
    if text.lstrip().startswith("{"):
        return domains.GPoint.from_json(text)
    try:
        return domains.GPoint([complex(v.strip().replace(" ", "")) for v in text.split(",")])
    except ValueError as exc:
        raise SpecballError(f"malformed point {text!r}: {exc}") from exc


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


# --- subcommands -------------------------------------------------------------------


def cmd_analyze_matrix(args, cfg):
    M = load_matrix(args.matrix)
    prof = cmatrix.jordan_profile(M, rank_tol=cfg.rank_tol, cluster_radius=cfg.cluster_radius)
    report = {
        "profile": prof.to_json(),
        "sigma": [_c(v) for v in domains.sigma(M).z],
        "spectral_radius": cmatrix.spectral_radius(M),
        "membership": domains.classify_matrix(M, cfg.boundary_tol),
    }
    rows = [[e.value.real, e.value.imag, e.alg_mult, e.nilpotence, " ".join(map(str, e.blocks))]
            for e in prof.eigenvalues]
    return report, ["lambda_re", "lambda_im", "n", "m", "blocks"], rows


def cmd_membership(args, cfg):
    if (args.point is None) == (args.matrix is None):
        raise SpecballError("membership needs exactly one of --point or --matrix")
    if args.matrix is not None:
        M = load_matrix(args.matrix)
        z = domains.sigma(M)
        status = domains.classify_matrix(M, cfg.boundary_tol)
        mu = cmatrix.spectral_radius(M)
    else:
        z = load_point(args.point)
        mu = domains.max_root_modulus(z.z)
        status = domains.classify_modulus(mu, cfg.boundary_tol)
    report = {"point": z.to_json(), "max_root_modulus": mu, "status": status}
    rows = [[i + 1, v.real, v.imag, status] for i, v in enumerate(z.z)]
    return report, ["coordinate", "re", "im", "status"], rows


def cmd_split(args, cfg):
    M = load_matrix(args.matrix)
    center = complex(args.center)
    split = splitting.local_factor(M, center, delta=args.delta, n0=args.n0)
    bd = splitting.block_diagonalize(M, center, delta=split.delta, n0=split.n0)
    report = {"split": split.to_json(), "block_diagonal": bd.to_json()}
    rows = [[k + 1, v.real, v.imag] for k, v in enumerate(split.sigma0.values)]
    return report, ["k", "sigma0_re", "sigma0_im"], rows


def _fit_function(args, cfg):
    kind = args.kind
    if kind == "remark-rho":
        V = load_matrix(args.matrix)
        X = green_lab.make_remark_X(V)
        return (lambda z: float(np.log(cmatrix.spectral_radius(V + z * X)))), {
            "construction": "E_(m,1) on the nilpotent Jordan matrix", "n": V.shape[0]}
    if kind == "unity-sigma":
        X = green_lab.make_roots_of_unity_X(args.n)
        return (lambda z: float(np.log(domains.sigma(z * X).norm()))), {
            "construction": "companion of t^n - 1", "n": args.n}
    if kind == "gap-sigma":
        X = green_lab.make_gap_X(args.n, args.m, seed=cfg.seed)
        return (lambda z: float(np.log(domains.sigma(z * X).norm()))), {
            "construction": "companion with sigma_1..sigma_m = 0", "n": args.n, "m": args.m}
    raise SpecballError(f"unknown fit kind {kind!r}")


def cmd_exponent_fit(args, cfg):
    h, meta = _fit_function(args, cfg)
    fit = green_lab.exponent_fit(h, cfg.radii, cfg.angles, cfg.seed)
    report = {"kind": args.kind, **meta, "fit": fit.to_json()}
    rows = [[r, v] for r, v in zip(fit.radii, fit.values)]
    return report, ["radius", "value"], rows


def cmd_theorem2_report(args, cfg):
    V = load_matrix(args.matrix)
    rc = green_lab.ReportConfig(radii=cfg.radii, angles=cfg.angles, seed=cfg.seed)
    report = green_lab.theorem2_report(V, rc)
    samples = report.pop("samples")
    rows = [list(s) for s in samples]
    header = ["series", "radius", "angle", "value"]
    if args.csv_out:
        _write_csv(Path(args.csv_out), header, rows)
        report["csv"] = str(args.csv_out)
    return report, header, rows


def cmd_metrics_table(args, cfg):
    rows = metrics.bounds_table(args.nmin, args.nmax)
    report = {"rows": [r.to_json() for r in rows]}
    return report, ["n", "lower", "upper", "strict_gap", "note"], [
        [r.n, r.lower, r.upper, r.strict_gap, r.note] for r in rows]


def cmd_minimax(args, cfg):
    problem = metrics.make_problem(args.n, cfg.samples, cfg.seed, restricted=args.restricted)
    res = metrics.minimax_Mn(problem, iterations=args.iterations, restarts=args.restarts, seed=cfg.seed)
    ts = metrics.t_star(args.n)
    report = {
        "n": args.n,
        "restricted": args.restricted,
        "index_set": [list(a) for a in problem.index_set],
        "result": res.to_json(),
        "closed_form_lower_bound": metrics.mnt_lower(args.n, ts),
        "t_star": ts,
    }
    rows = [[i + 1, float(v)] for i, v in enumerate(res.trace)]
    return report, ["iteration", "best"], rows


def cmd_lalo(args, cfg):
    res = metrics.lalo_check(args.n, args.t, cfg.boundary_tol)
    lo, hi = metrics.lalo_interval(args.n)
    plo, phi = metrics.lalo_interval(args.n, printed=True)
    rts = np.sort_complex(roots(metrics.p_nt(args.n, args.t)))
    report = {
        "n": args.n,
        "t": args.t,
        "interval": [lo, hi],
        "interval_printed_form": [plo, phi],
        "admissible": metrics.admissible_t(args.n, args.t),
        "check": res.to_json(),
    }
    rows = [[i, z.real, z.imag, abs(z)] for i, z in enumerate(rts)]
    return report, ["index", "root_re", "root_im", "modulus"], rows


def cmd_asymptotics(args, cfg):
    report = metrics.asymptotics_report(args.nmax, args.nmin)
    rows = [[r["n"], r["n_one_minus_gamma_upper"], r["n_one_minus_gamma_lower"]] for r in report["rows"]]
    return report, ["n", "n_one_minus_gamma_upper", "n_one_minus_gamma_lower"], rows


COMMANDS = {
    "analyze-matrix": cmd_analyze_matrix,
    "membership": cmd_membership,
    "split": cmd_split,
    "exponent-fit": cmd_exponent_fit,
    "theorem2-report": cmd_theorem2_report,
    "metrics-table": cmd_metrics_table,
    "minimax": cmd_minimax,
    "lalo": cmd_lalo,
    "asymptotics": cmd_asymptotics,
}


# --- plumbing ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--radii", help="comma-separated decreasing radii")
    common.add_argument("--angles", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--rank-tol", dest="rank_tol", type=float)
    common.add_argument("--boundary-tol", dest="boundary_tol", type=float)

    parser = _Parser(
        prog="specball",
        description="Spectral ball / symmetrized polydisk computations.",
        epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, epilog=CSV_HELP,
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    p = add("analyze-matrix", "Jordan profile, sigma and membership of a matrix")
    p.add_argument("--matrix", required=True, help='block spec "0:2,0:1;0.8:1" or JSON file')

    p = add("membership", "classify a point of C^n or a matrix")
    p.add_argument("--point")
    p.add_argument("--matrix")

    p = add("split", "local factor and block diagonalization around a center")
    p.add_argument("--matrix", required=True)
    p.add_argument("--center", default="0")
    p.add_argument("--delta", type=float)
    p.add_argument("--n0", type=int)

    p = add("exponent-fit", "log-log slope of a named family")
    p.add_argument("--kind", required=True, choices=["remark-rho", "unity-sigma", "gap-sigma"])
    p.add_argument("--matrix")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)

    p = add("theorem2-report", "exponent report for a derogatory pole")
    p.add_argument("--matrix", required=True)
    p.add_argument("--csv-out", dest="csv_out", help="also write fit samples as CSV here")

    p = add("metrics-table", "closed-form metric bounds")
    p.add_argument("--nmin", type=int, default=3)
    p.add_argument("--nmax", type=int, default=10)

    p = add("minimax", "sampled minimax estimate of M_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restricted", action="store_true")
    p.add_argument("--iterations", type=int, default=3000)
    p.add_argument("--restarts", type=int, default=10)

    p = add("lalo", "unimodularity check for p_{n,t}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=float, required=True)

    p = add("asymptotics", "n(1 - gamma) columns")
    p.add_argument("--nmin", type=int, default=10)
    p.add_argument("--nmax", type=int, default=200)
    return parser


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def render(report: dict, header: list, rows: list, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(_jsonable(rows))
        return buf.getvalue()
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def _write_csv(path: Path, header, rows) -> None:
    path.write_text(render({}, header, rows, "csv"))


def run(argv=None, environ=os.environ, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        stdout.write(json.dumps({"command": None, "error": exc.kind, "message": str(exc)}, sort_keys=True) + "\n")
        return 2
    try:
        cfg = resolve_config(args, environ)
        report, header, rows = COMMANDS[args.command](args, cfg)
        report = {"command": args.command, "config": cfg.to_json(), "seed": cfg.seed, **report}
        text = render(report, header, rows, cfg.format)
    except (SpecballError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        kind = exc.kind if isinstance(exc, SpecballError) else type(exc).__name__
        err = {"command": args.command, "error": kind, "message": str(exc)}
        stdout.write(json.dumps(err, sort_keys=True) + "\n")
        return 2
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
