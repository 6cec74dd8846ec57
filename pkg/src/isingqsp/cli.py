"""Command-line entry point: every scan and example as a reproducible dataset.

Each output starts with a header that records the configuration, the package
version and the conventions in force. CSV headers are ``#`` comment lines;
JSON output carries the same data under a leading ``"meta"`` key. Numbers are
written with 17 significant digits, so identical configurations produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .applications import (
    ClusterParams,
    bb1_response,
    bb1_response_closed_form,
    box_fourier_coeffs,
    box_reconstruction,
    cluster_response_curve,
    qsp_approximate_cluster,
    re_dispersion,
    re_hamiltonian_terms,
)
from .errors import QSPError
from .momentum import PhaseProgram, extract_poly, plus_response, qsp_canonical
from .solver import PhaseSolver, SolverOptions
from .spacetime import dual_scan, floquet_scan
from .spin import all_up, predict_vacuum_amplitude, qsp_spin

COMMANDS = (
    "floquet-scan",
    "dual-region",
    "bb1",
    "cluster",
    "reverse",
    "chebyshev",
    "oracle-compare",
    "solve-phases",
)

CONVENTIONS = (
    "rot(n, a) = exp(i a n.sigma); sz = diag(1, -1)",
    "eigenvalues ordered by principal argument, ties by modulus; mu = -arg(lambda) in (-pi, pi]",
    "floquet processing factor exp(-i pi (1 - 2 eps) sz)",
    "dual theta = -pi/4 + (i/2) log tan(pi/2 (1 - 2 eps)), principal branch",
    "unitarity decided from eigenvalue moduli",
    "spin basis: site 1 = least significant bit, up = 0; even sector, k_m = (2m - 1) pi / N",
    "box half-width w from the sinc kernel; n = 0 dispersion weight w",
    "polynomial coefficients low degree first",
)

SCAN_HEADER = ("k", "eps", "mu1", "mu2", "lam_mod1", "lam_mod2", "unitary")


@dataclass
class RunConfig:
    command: str
    k: int = 201
    eps: int = 201
    eps_min: float = 0.01
    eps_max: float = 0.49
    N: int = 8
    g: float = 1.0
    J: float = 1.0
    gamma: float = 0.0
    T: float = 0.25
    w: float = 0.75
    nmax: int = 40
    degree: int | None = None
    trials: int = 25
    seed: int = 0
    coeffs: str | None = None
    basis: str = "power"
    mode: str = "P"
    tol: float = 1e-8
    out: str = "-"
    format: str = "csv"


class CheckFailed(Exception):
    """An internal consistency check did not hold."""


@dataclass
class Result:
    columns: Sequence[str] = ()
    rows: list = field(default_factory=list)
    payload: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return "%.17g" % float(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _kgrid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(-math.pi, math.pi, cfg.k)


def _epsgrid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.eps_min, cfg.eps_max, cfg.eps)


def _scan_rows(records):
    rows = []
    for r in records:
        mu = r.mu or (None, None)
        rows.append((r.k, r.eps, mu[0], mu[1], r.lambda_mods[0], r.lambda_mods[1], r.unitary))
    return rows


def cmd_floquet_scan(cfg: RunConfig) -> Result:
    recs = floquet_scan(_kgrid(cfg), _epsgrid(cfg))
    if not all(r.unitary for r in recs):
        raise CheckFailed("floquet operator lost unitarity on the grid")
    half = [r for r in recs if abs(abs(r.k) - math.pi / 2) < 1e-12]
    if any(abs(r.mu[1] - math.pi / 2) > 1e-10 or abs(r.mu[0] + math.pi / 2) > 1e-10 for r in half):
        raise CheckFailed("mu at |k| = pi/2 deviates from +/- pi/2")
    return Result(SCAN_HEADER, _scan_rows(recs))


def cmd_dual_region(cfg: RunConfig) -> Result:
    recs = dual_scan(_kgrid(cfg), _epsgrid(cfg))
    worst = max(abs(r.lambda_mods[0] * r.lambda_mods[1] - 1.0) for r in recs)
    if worst > 1e-8:
        raise CheckFailed(f"dual eigenvalue moduli do not pair up (worst {worst:.3g})")
    res = Result(SCAN_HEADER, _scan_rows(recs))
    res.notes.append(f"unitary fraction: {sum(r.unitary for r in recs) / len(recs):.17g}")
    return res


def cmd_bb1(cfg: RunConfig) -> Result:
    k = _kgrid(cfg)
    plain, bb1 = bb1_response(k)
    dev = float(np.max(np.abs(bb1 - bb1_response_closed_form(k))))
    if dev > 1e-10:
        raise CheckFailed(f"BB1 matrix product disagrees with its polynomial ({dev:.3g})")
    res = Result(("k", "R_plain", "R_bb1"), list(zip(k, plain, bb1)))
    res.notes.append(f"max deviation from closed form: {dev:.3g}")
    return res


def cmd_cluster(cfg: RunConfig) -> Result:
    p = ClusterParams(cfg.g, cfg.J, cfg.gamma, cfg.T)
    k = _kgrid(cfg)
    curve = cluster_response_curve(p, k)
    if cfg.degree is None:
        return Result(("k", "value"), curve)
    Phis, err = qsp_approximate_cluster(p, cfg.degree)
    qsp = np.abs(plus_response(k, Phis)) ** 2
    res = Result(("k", "value", "qsp_value"), [(a, b, c) for (a, b), c in zip(curve, qsp)])
    res.payload = {"degree": cfg.degree, "phases": Phis, "max_error": err}
    res.notes.append(f"qsp degree {cfg.degree}, sup error of <+|V|+> vs cos(Omega T): {err:.17g}")
    return res


def cmd_reverse(cfg: RunConfig) -> Result:
    model = box_fourier_coeffs(cfg.w, cfg.nmax, T=cfg.T)
    k = _kgrid(cfg)
    om = re_dispersion(k, model)
    box = box_reconstruction(k, model)
    rows = list(zip(k, om, np.cos(om * model.T), box))
    res = Result(("k", "omega", "response", "box"), rows)
    terms = re_hamiltonian_terms(model)
    res.payload = {
        "model": json.loads(model.to_json()),
        "terms": [{"range": r, "coefficient": c, "pauli": s} for r, c, s in terms],
    }
    res.notes.append(f"truncation: harmonics |n| <= {model.n_max}")
    res.notes.append("G: " + " ".join(_fmt(g) for g in model.G))
    return res


def cmd_chebyshev(cfg: RunConfig) -> Result:
    degree = cfg.degree if cfg.degree is not None else 10
    if degree < 1:
        raise QSPError("chebyshev needs --degree >= 1")
    rows, worst = [], 0.0
    for d in range(1, degree + 1):
        pp = extract_poly(np.zeros(d + 1))
        ref = np.polynomial.chebyshev.cheb2poly(np.eye(d + 1)[d])
        worst = max(worst, float(np.max(np.abs(pp.P - ref))))
        rows.extend((d, j, c.real) for j, c in enumerate(pp.P))
    if worst > 1e-10:
        raise CheckFailed(f"zero phases failed to reproduce T_d ({worst:.3g})")
    res = Result(("d", "power", "coefficient"), rows)
    res.notes.append(f"max deviation from T_d: {worst:.3g}")
    return res


def cmd_oracle_compare(cfg: RunConfig) -> Result:
    if cfg.N % 2 or not 4 <= cfg.N <= 14:
        raise QSPError(f"oracle-compare needs even N in [4, 14], got {cfg.N}")
    rng = np.random.default_rng(cfg.seed)
    vac = all_up(cfg.N)
    rows, worst = [], 0.0
    for t in range(cfg.trials):
        d = int(rng.integers(0, 9))
        prog = PhaseProgram(rng.uniform(-math.pi, math.pi), tuple(rng.uniform(-math.pi, math.pi, d + 1)))
        dense = abs(vac.overlap(qsp_spin(vac, prog)))
        mom = abs(predict_vacuum_amplitude(prog, cfg.N))
        worst = max(worst, abs(dense - mom))
        rows.append((t, d, prog.theta, dense, mom, abs(dense - mom)))
    res = Result(("trial", "d", "theta", "dense_abs", "momentum_abs", "mismatch"), rows)
    res.payload = {"N": cfg.N, "trials": cfg.trials, "max_mismatch": worst}
    res.notes.append(f"max |amplitude-magnitude mismatch|: {worst:.3g}")
    if worst > 1e-8:
        raise CheckFailed(f"dense and momentum-space amplitudes disagree ({worst:.3g})")
    return res


def cmd_solve_phases(cfg: RunConfig) -> Result:
    if not cfg.coeffs:
        raise QSPError("solve-phases needs --coeffs, e.g. --coeffs 0,-3,0,4")
    try:
        target = [float(c) for c in cfg.coeffs.split(",")]
    except ValueError as exc:
        raise QSPError(f"cannot parse --coeffs: {exc}") from exc
    opts = SolverOptions(tol=cfg.tol, response=cfg.mode, basis=cfg.basis, degree=cfg.degree, seed=cfg.seed)
    solver = PhaseSolver(opts)
    Phis = solver.solve(target)
    res = Result(("index", "Phi"), list(enumerate(Phis)))
    res.payload = {"phases": Phis, "residual": solver.best_residual, "mode": cfg.mode}
    res.notes.append(f"residual: {solver.best_residual:.3g}")
    return res


HANDLERS: dict[str, Callable[[RunConfig], Result]] = {
    "floquet-scan": cmd_floquet_scan,
    "dual-region": cmd_dual_region,
    "bb1": cmd_bb1,
    "cluster": cmd_cluster,
    "reverse": cmd_reverse,
    "chebyshev": cmd_chebyshev,
    "oracle-compare": cmd_oracle_compare,
    "solve-phases": cmd_solve_phases,
}


def _meta(cfg: RunConfig, res: Result) -> dict:
    config = {k: v for k, v in asdict(cfg).items() if k not in ("out", "format")}
    return {
        "package": "isingqsp",
        "version": __version__,
        "config": config,
        "conventions": list(CONVENTIONS),
        "notes": list(res.notes),
    }


def render(cfg: RunConfig, res: Result) -> str:
    meta = _meta(cfg, res)
    if cfg.format == "json":
        body = {"meta": meta, "columns": list(res.columns), "rows": res.rows}
        body.update(res.payload)
        return json.dumps(_jsonable(body), indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# isingqsp {meta['version']}\n")
    buf.write("# config: " + json.dumps(_jsonable(meta["config"]), sort_keys=True) + "\n")
    for c in meta["conventions"]:
        buf.write(f"# convention: {c}\n")
    for n in meta["notes"]:
        buf.write(f"# note: {n}\n")
    buf.write(",".join(res.columns) + "\n")
    for row in res.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute ``cfg``; returns the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        res = HANDLERS[cfg.command](cfg)
        text = render(cfg, res)
    except CheckFailed as exc:
        print(f"consistency check failed: {exc}", file=stderr)
        return 1
    except (QSPError, ValueError) as exc:
        print(str(exc), file=stderr)
        return 1
    if cfg.out == "-":
        stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isingqsp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)

    kgrid = argparse.ArgumentParser(add_help=False)
    kgrid.add_argument("--k", type=_positive_int, default=201, help="number of k points on [-pi, pi]")

    epsgrid = argparse.ArgumentParser(add_help=False)
    epsgrid.add_argument("--eps", type=_positive_int, default=201, help="number of eps points")
    epsgrid.add_argument("--eps-min", type=float, default=0.01)
    epsgrid.add_argument("--eps-max", type=float, default=0.49)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--g", type=float, default=1.0)
    model.add_argument("--J", type=float, default=1.0)
    model.add_argument("--gamma", type=float, default=0.0)
    model.add_argument("--T", type=float, default=0.25)

    sub.add_parser("floquet-scan", parents=[common, kgrid, epsgrid], help="Floquet exponents over (k, eps)")
    sub.add_parser("dual-region", parents=[common, kgrid, epsgrid], help="dual-circuit eigenvalues and unitarity")
    p = sub.add_parser("bb1", parents=[common, kgrid], help="plain and BB1 survival probabilities")
    p.set_defaults(k=401)
    p = sub.add_parser("cluster", parents=[common, kgrid, model], help="cluster-model response curve")
    p.add_argument("--degree", type=int, default=None, help="also fit a QSP sequence of this degree")
    p = sub.add_parser("reverse", parents=[common, kgrid], help="box response and its Hamiltonian")
    p.add_argument("--w", type=float, default=0.75)
    p.add_argument("--nmax", type=int, default=40)
    p.add_argument("--T", type=float, default=1.0)
    p = sub.add_parser("chebyshev", parents=[common], help="polynomials of all-zero phase vectors")
    p.add_argument("--degree", type=_positive_int, default=10)
    p = sub.add_parser("oracle-compare", parents=[common], help="dense circuit vs momentum blocks")
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--trials", type=_positive_int, default=25)
    p = sub.add_parser("solve-phases", parents=[common], help="phases for a target polynomial")
    p.add_argument("--coeffs", required=True, help="comma-separated coefficients, low degree first")
    p.add_argument("--basis", choices=("power", "chebyshev"), default="power")
    p.add_argument("--mode", choices=("P", "plus"), default="P")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--degree", type=int, default=None)
    return parser


def parse_config(argv: Sequence[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    known = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in known})


def main(argv: Sequence[str] | None = None) -> int:
    return run(parse_config(argv))


if __name__ == "__main__":
    raise SystemExit(main())
