"""Scenario runner.

A scenario is a JSON object::

    {
      "space":    {"dim": 1, "mu": {"form": "t/(t+x)", "params": {"scale": 1}}, "tnorm": "product"},
      "scheme":   {"kind": "geometric", "rho": 2.0, "c": 1.0},
      "oracle":   {"kind": "density", "horizon": 1000000, "tol": 0.01},
      "sequence": {"kind": "indicator-of-squares", "params": {}},
      "task":     {"check": "I_theta", "L": [0], "grid": {"eps": [...], "alpha": [...], "R": 20}}
    }

``task`` is one of ``{"check": "nu"|"theta"|"I_theta", "L": ...}``,
``{"scan": [candidates]}``, ``{"points": [candidates]}`` or
``{"cauchy": "theta"|"I_theta"|"I_star"}``, each with an optional ``grid``.

Exit codes: 0 Holds, 1 Fails, 2 Inconclusive, 3 on any error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import algebra, lacunary
from .convergence import (
    ConvergenceReport,
    ParamGrid,
    I_theta_convergence_check,
    nu_convergence_check,
    planted_instance,
    theta_convergence_check,
)
from .ideals import FAILS, HOLDS, INCONCLUSIVE, DensityIdeal, IdealOracle, Status, oracle_from_descriptor
from .pn_space import PNSpace, simple_space
from .points import (
    I_star_theta_cauchy_check,
    I_theta_cauchy_check,
    cluster_points_scan,
    limit_points_scan,
    theta_cauchy_check,
)

EXIT = {HOLDS: 0, FAILS: 1, INCONCLUSIVE: 2}
EXIT_ERROR = 3
CSV_FIELDS = ("eps", "alpha", "block_r", "block_average", "offending", "oracle_status", "overall")
SCAN_FIELDS = ("candidate", "eps", "alpha", "status", "accepted")


class ScenarioError(ValueError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


# ---------------------------------------------------------------------------
# descriptor parsing
# ---------------------------------------------------------------------------


def _get(d: dict, key: str, path: str, default=...):
    if not isinstance(d, dict):
        raise ScenarioError(path, "expected an object")
    if key not in d:
        if default is ...:
            raise ScenarioError(f"{path}.{key}", "missing field")
        return default
    return d[key]


def build_space(desc: dict, path: str = "space") -> PNSpace:
    dim = _get(desc, "dim", path, 1)
    mu_desc = _get(desc, "mu", path, {"form": "t/(t+x)"})
    form = _get(mu_desc, "form", f"{path}.mu")
    params = _get(mu_desc, "params", f"{path}.mu", {}) or {}
    try:
        if form == "t/(t+x)":
            mu = algebra.ratio_df(float(params.get("scale", 1.0)))
        elif form == "grid":
            g = algebra.GridDF(np.asarray(_get(params, "grid", f"{path}.mu.params"), dtype=float),
                               np.asarray(_get(params, "values", f"{path}.mu.params"), dtype=float))
            mu = g.as_df()
        else:
            raise ScenarioError(f"{path}.mu.form", f"unknown form {form!r}")
    except (ValueError, TypeError) as e:
        if isinstance(e, ScenarioError):
            raise
        raise ScenarioError(f"{path}.mu", str(e)) from e
    try:
        T = algebra.tnorm_by_name(_get(desc, "tnorm", path, "product"))
    except (ValueError, KeyError) as e:
        raise ScenarioError(f"{path}.tnorm", str(e)) from e
    try:
        return simple_space(dim, mu, T)
    except ValueError as e:
        raise ScenarioError(path, str(e)) from e


def build_scheme(desc: dict, R: int, path: str = "scheme") -> lacunary.LacunaryScheme:
    try:
        return lacunary.make_scheme(desc, R)
    except (ValueError, TypeError, AttributeError) as e:
        raise ScenarioError(path, str(e)) from e


def build_oracle(desc: dict | None, path: str = "oracle") -> IdealOracle:
    if desc is None:
        return DensityIdeal()
    try:
        return oracle_from_descriptor(desc)
    except (ValueError, TypeError, AttributeError) as e:
        raise ScenarioError(path, str(e)) from e


def build_grid(desc: dict | None, R_override: int | None, path: str = "task.grid") -> ParamGrid:
    desc = desc or {}
    base = ParamGrid()
    try:
        grid = ParamGrid(tuple(desc.get("eps", base.eps)), tuple(desc.get("alpha", base.alpha)),
                         int(desc.get("R", base.R)))
    except (ValueError, TypeError) as e:
        raise ScenarioError(path, str(e)) from e
    return grid.with_horizon(R_override) if R_override is not None else grid


@dataclass
class Built:
    seq: lacunary.SequenceSource
    planted_L: np.ndarray | None = None


def build_sequence(desc: dict, dim: int, seed: int, scheme: dict | None = None, R: int | None = None,
                   path: str = "sequence") -> Built:
    kind = _get(desc, "kind", path)
    p = _get(desc, "params", path, {}) or {}
    try:
        if kind == "indicator-of-squares":
            return Built(lacunary.squares_indicator(float(p.get("value", 1.0)), float(p.get("base", 0.0))))
        if kind == "constant":
            return Built(lacunary.constant(p.get("c", [0.0] * dim)))
        if kind == "alternating":
            return Built(lacunary.alternating(float(p.get("amplitude", 1.0))))
        if kind == "reciprocal":
            return Built(lacunary.reciprocal(float(p.get("scale", 1.0)), dim))
        if kind == "linear":
            return Built(lacunary.linear(float(p.get("slope", 1.0))))
        if kind == "planted":
            inst = planted_instance(np.random.default_rng(seed), dim=dim, scheme=scheme, R=R,
                                    spikes=bool(p.get("spikes", True)))
            return Built(inst.seq, inst.L)
    except (ValueError, TypeError) as e:
        raise ScenarioError(f"{path}.params", str(e)) from e
    raise ScenarioError(f"{path}.kind", f"unknown sequence kind {kind!r}")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def report_csv(report: ConvergenceReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    overall = report.overall.value
    for row in report.rows:
        off = set(row.offending)
        if not row.averages:
            w.writerow([_fmt(row.eps), _fmt(row.alpha), "", "", "", row.status.value, overall])
            continue
        for r, a in enumerate(row.averages, start=1):
            w.writerow([_fmt(row.eps), _fmt(row.alpha), r, _fmt(a), str(r in off).lower(),
                        row.status.value, overall])
    return buf.getvalue()


def _jsonable(o):
    if isinstance(o, Status):
        return o.value
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (float, np.floating)):
        return float(_fmt(o))
    if hasattr(o, "status") and hasattr(o, "evidence"):
        return {"status": o.status.value, "evidence": _jsonable(o.evidence)}
    return o


def report_json(payload: dict) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


@dataclass
class Outcome:
    overall: Status
    csv: str
    json: str


def _scan_outcome(kind: str, cands: list, accepted: list[int], per: list[dict], grid: ParamGrid) -> Outcome:
    overall = HOLDS if accepted else FAILS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_FIELDS)
    for i, c in enumerate(cands):
        for (eps, alpha), st in per[i].items():
            w.writerow([json.dumps(c), _fmt(eps), _fmt(alpha), st, str(i in accepted).lower()])
    payload = {"task": kind, "candidates": cands, "accepted": [cands[i] for i in accepted],
               "overall": overall, "grid": {"eps": grid.eps, "alpha": grid.alpha, "R": grid.R}}
    return Outcome(overall, buf.getvalue(), report_json(payload))


def run(scenario: dict, *, horizon_blocks: int | None = None, seed: int = 0) -> Outcome:
    space = build_space(_get(scenario, "space", "scenario", {}))
    task = _get(scenario, "task", "scenario")
    grid = build_grid(task.get("grid") if isinstance(task, dict) else None, horizon_blocks)
    scheme_desc = _get(scenario, "scheme", "scenario", {"kind": "geometric", "rho": 2.0})
    theta = build_scheme(scheme_desc, grid.R)
    oracle = build_oracle(scenario.get("oracle"))
    built = build_sequence(_get(scenario, "sequence", "scenario"), space.dim, seed, scheme_desc, grid.R)
    seq = built.seq

    def point(v, path):
        if v == "planted" or v is None:
            if built.planted_L is None:
                raise ScenarioError(path, "a limit L is required")
            return built.planted_L
        try:
            return space.point(v)
        except ValueError as e:
            raise ScenarioError(path, str(e)) from e

    if "check" in task:
        L = point(task.get("L"), "task.L")
        mode = task["check"]
        if mode == "nu":
            rep = nu_convergence_check(seq, space, L, grid, theta)
        elif mode == "theta":
            rep = theta_convergence_check(seq, space, theta, L, grid)
        elif mode == "I_theta":
            rep = I_theta_convergence_check(seq, space, theta, oracle, L, grid)
        else:
            raise ScenarioError("task.check", f"unknown mode {mode!r}")
    elif "cauchy" in task:
        variant = task["cauchy"]
        if variant == "theta":
            rep = theta_cauchy_check(seq, space, theta, grid)
        elif variant == "I_theta":
            rep = I_theta_cauchy_check(seq, space, theta, oracle, grid)
        elif variant == "I_star":
            rep = I_star_theta_cauchy_check(seq, space, theta, oracle, grid, task.get("M"))
        else:
            raise ScenarioError("task.cauchy", f"unknown variant {variant!r}")
    elif "scan" in task or "points" in task:
        kind = "scan" if "scan" in task else "points"
        cands = task[kind]
        if not isinstance(cands, list) or not cands:
            raise ScenarioError(f"task.{kind}", "expected a non-empty list of candidates")
        pts = [point(c, f"task.{kind}[{i}]") for i, c in enumerate(cands)]
        labels = [p.tolist() for p in pts]
        if kind == "scan":
            per = []
            for p in pts:
                rep = I_theta_convergence_check(seq, space, theta, oracle, p, grid)
                per.append({(r.eps, r.alpha): r.status.value for r in rep.rows})
            accepted = [i for i, d in enumerate(per) if all(s == "Holds" for s in d.values())]
            return _scan_outcome("scan", labels, accepted, per, grid)
        lam = limit_points_scan(seq, space, theta, oracle, pts, grid)
        gam = cluster_points_scan(seq, space, theta, oracle, pts, grid)
        per = [{k: ("limit" if i in lam.accepted else "") + ("+cluster" if i in gam.accepted else "")
                or "none" for k in lam.evidence[i]} for i in range(len(pts))]
        accepted = sorted(set(lam.accepted) | set(gam.accepted))
        out = _scan_outcome("points", labels, accepted, per, grid)
        payload = json.loads(out.json)
        payload["limit_points"] = [labels[i] for i in lam.accepted]
        payload["cluster_points"] = [labels[i] for i in gam.accepted]
        return Outcome(out.overall, out.csv, report_json(payload))
    else:
        raise ScenarioError("task", "expected one of check, scan, points, cauchy")
    return Outcome(rep.overall, report_csv(rep), report_json(rep.to_dict()))


# ---------------------------------------------------------------------------
# the squares instance
# ---------------------------------------------------------------------------


def squares_instance() -> tuple[lacunary.SequenceSource, PNSpace, lacunary.LacunaryScheme]:
    """Indicator of perfect squares in the space ``nu_x(t) = t / (t + |x|)``
    under the product t-norm, with the geometric scheme ``k_r = 2^r``."""
    space = simple_space(1, algebra.ratio_df(1.0), algebra.PRODUCT)
    theta = lacunary.make_scheme({"kind": "geometric", "rho": 2.0, "c": 1.0})
    return lacunary.squares_indicator(), space, theta


@dataclass(frozen=True)
class SquaresReproduction:
    at_zero: ConvergenceReport
    at_one: ConvergenceReport

    @property
    def ok(self) -> bool:
        return self.at_zero.overall is HOLDS and self.at_one.overall is FAILS


def reproduce_squares_example(oracle: IdealOracle | None = None, R: int = 20,
                              grid: ParamGrid | None = None) -> SquaresReproduction:
    seq, space, theta = squares_instance()
    oracle = oracle or DensityIdeal()
    grid = (grid or ParamGrid()).with_horizon(R)
    return SquaresReproduction(
        I_theta_convergence_check(seq, space, theta, oracle, 0.0, grid),
        I_theta_convergence_check(seq, space, theta, oracle, 1.0, grid),
    )


def _reproduction_text(rep: SquaresReproduction) -> str:
    lines = []
    for name, r in (("L=0", rep.at_zero), ("L=1", rep.at_one)):
        lines.append(f"{name}: overall {r.overall.value}")
        for row in r.rows:
            lines.append(f"  eps={_fmt(row.eps)} alpha={_fmt(row.alpha)} {row.status.value:<12} "
                         f"offending={list(row.offending)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def load_scenario(path: str | Path) -> dict:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(str(path), f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ScenarioError(str(path), "scenario must be a JSON object")
    return data


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lacunary-pn", description="Run a lacunary convergence scenario.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="path to a scenario JSON file")
    src.add_argument("--reproduce", action="store_true",
                     help="run the indicator-of-squares instance for L=0 and L=1")
    p.add_argument("--horizon-blocks", type=int, default=None, metavar="R", help="override the block horizon")
    p.add_argument("--out", default=None, help="directory for the report (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0, help="seed for planted sequences")
    return p


def _emit(text: str, out: str | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.reproduce:
            rep = reproduce_squares_example(R=args.horizon_blocks or 20)
            if args.format == "json":
                text = report_json({"L=0": rep.at_zero.to_dict(), "L=1": rep.at_one.to_dict(), "ok": rep.ok})
            else:
                text = _reproduction_text(rep)
            _emit(text, args.out, f"reproduction.{args.format if args.format == 'json' else 'txt'}")
            return 0 if rep.ok else 1
        scenario = load_scenario(args.scenario)
        outcome = run(scenario, horizon_blocks=args.horizon_blocks, seed=args.seed)
        text = outcome.csv if args.format == "csv" else outcome.json
        _emit(text, args.out, f"report.{args.format}")
        print(f"overall: {outcome.overall.value}", file=sys.stderr)
        return EXIT[outcome.overall]
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:  # noqa: BLE001  any failure maps to the error exit code
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


__all__ = [
    "ScenarioError", "run", "Outcome", "load_scenario", "main", "build_parser", "report_csv",
    "reproduce_squares_example", "SquaresReproduction", "squares_instance", "EXIT",
]
