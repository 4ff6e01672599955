"""Command-line front end.

Subcommands mirror the library: validate, energy, chi, dim, bounds,
family-bounds, microstate, series, selberg, report.  Measures come from
JSON spec files (see ``measures``); reports go to stdout or ``--out`` as
JSON, CSV (series and microstates only), or text.

Exit codes: 0 success; 1 usage error (including knobs a command does
not take); 2 invalid measure specification; 3 energy divergence or
non-convergence; 4 the volume bound's inner-radius equation has no
solution.  Every failure writes a single machine-parseable line to
stderr.  JSON output is deterministic (sorted keys, shortest-round-trip
floats) and serializes infinities as the strings "inf"/"-inf".
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import __version__
from .asymptotics import gamma_ratio_limit_series, selberg_log, selberg_mc_check
from .energy import EnergyResult, offdiag_energy, regularized_energy
from .entropy import (
    CHI_SHIFT,
    DIM_ONE_SHIFT,
    FORMULAS,
    dimension_truncation_bound,
    free_family_bounds,
    free_hausdorff_dimension,
    hausdorff_entropy_bounds,
    sandwich_width,
)
from .measures import MeasureSpecError, SpectralMeasure, load_measure, validate
from .microstates import (
    NoSolutionError,
    SeriesReport,
    build_lower_microstate,
    build_upper_microstate,
    offdiag_sum_series,
    packing_constant_log,
    packing_constant_series,
    pair_partition,
    regularized_product_series,
    sk_counting_check,
    volume_upper_bound_log,
)

__all__ = ["RunConfig", "main", "run", "parse_args"]

DEFAULT_TOL = 1e-6
DEFAULT_SEED = 42
DEFAULT_SAMPLES = 1_000_000
DEFAULT_MC_EPS = 0.5
EPS_SWEEP = (1.0, 0.1, 0.01)

_SERIES_KINDS = ("gamma-ratio", "regularized-product", "offdiag-sum",
                 "packing-constant")
_CSV_COMMANDS = ("series", "microstate")


@dataclass(frozen=True)
class RunConfig:
    """A fully validated invocation: command plus exactly its knobs."""

    command: str
    measure_paths: tuple[str, ...] = ()
    k: int | None = None
    ks: tuple[int, ...] | None = None
    eps: float | None = None
    tol: float = DEFAULT_TOL
    t: float | None = None
    samples: int | None = None
    seed: int = DEFAULT_SEED
    kind: str | None = None
    out: str | None = None
    format: str = "text"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we want exit 1
        raise _UsageError(message)


def _ks_arg(text: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(part.strip()) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--ks expects comma-separated integers, got {text!r}")
    if not ks:
        raise argparse.ArgumentTypeError("--ks must list at least one k")
    return ks


def build_parser() -> _Parser:
    parser = _Parser(
        prog="freeprob",
        description="Logarithmic energies, free entropy, and free Hausdorff "
                    "entropy bounds for spectral measures.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser, metavar="command")

    def new(name: str, help_: str, measures: bool = False):
        p = sub.add_parser(name, help=help_, description=help_)
        if measures:
            p.add_argument("--measure", action="append", default=[],
                           metavar="PATH",
                           help="measure spec JSON file (repeatable)")
        return p

    def finish(p):
        p.add_argument("--out", metavar="PATH",
                       help="write the report to this file instead of stdout")
        p.add_argument("--format", choices=["json", "csv", "text"],
                       help="output format (csv only for series/microstate)")

    p = new("validate", "check a measure spec and report its invariants",
            measures=True)
    finish(p)

    p = new("energy", "off-diagonal log energy plus a regularized sweep",
            measures=True)
    p.add_argument("--tol", type=float, help="absolute quadrature tolerance")
    p.add_argument("--eps", type=float,
                   help="single regularization instead of the default sweep")
    finish(p)

    p = new("chi", "free entropy (log energy plus 3/4 + log(2 pi)/2)",
            measures=True)
    p.add_argument("--tol", type=float, help="absolute quadrature tolerance")
    finish(p)

    p = new("dim", "free Hausdorff dimension 1 - sum(c_i^2)", measures=True)
    finish(p)

    p = new("bounds", "two-sided free Hausdorff entropy bounds",
            measures=True)
    p.add_argument("--tol", type=float, help="absolute quadrature tolerance")
    finish(p)

    p = new("family-bounds", "entropy sandwich for a free family",
            measures=True)
    p.add_argument("--tol", type=float, help="absolute quadrature tolerance")
    finish(p)

    p = new("microstate", "diagonal microstate spectrum and pair statistics",
            measures=True)
    p.add_argument("--k", type=int, required=True, help="matrix size")
    p.add_argument("--kind", choices=["upper", "lower"], required=True,
                   help="quantile-fill (upper) or separated (lower) variant")
    p.add_argument("--eps", type=float,
                   help="with --t: evaluate the volume upper bound (upper kind)")
    p.add_argument("--t", type=float,
                   help="with --eps: evaluate the volume upper bound (upper kind)")
    finish(p)

    p = new("series", "convergence series against its limit or bound",
            measures=True)
    p.add_argument("kind", choices=list(_SERIES_KINDS), help="which series")
    p.add_argument("--ks", type=_ks_arg, required=True,
                   help="comma-separated strictly increasing k values")
    p.add_argument("--eps", type=float,
                   help="regularization (regularized-product only)")
    p.add_argument("--tol", type=float,
                   help="tolerance for the quadrature target")
    finish(p)

    p = new("selberg", "Selberg product: closed form and Monte Carlo check")
    p.add_argument("--k", type=int, required=True, help="number of variables")
    p.add_argument("--eps", type=float,
                   help="half-width of the Monte Carlo cube (k <= 6 only)")
    p.add_argument("--samples", type=int,
                   help="Monte Carlo sample count (k <= 6 only)")
    p.add_argument("--seed", type=int,
                   help="Monte Carlo seed (k <= 6 only)")
    finish(p)

    p = new("report", "comprehensive report over one or more measures",
            measures=True)
    p.add_argument("--tol", type=float, help="absolute quadrature tolerance")
    finish(p)

    return parser


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cmd = ns.command
    paths = tuple(getattr(ns, "measure", []) or [])

    needs_measures = cmd not in ("selberg",) and not (
        cmd == "series" and ns.kind == "gamma-ratio")
    if needs_measures and not paths:
        raise _UsageError(f"{cmd} requires at least one --measure")

    fmt = getattr(ns, "format", None)
    if fmt is None:
        fmt = "csv" if cmd in _CSV_COMMANDS else ("json" if cmd == "report"
                                                  else "text")
    elif fmt == "csv" and cmd not in _CSV_COMMANDS:
        raise _UsageError(f"csv output is only available for "
                          f"{' and '.join(_CSV_COMMANDS)}")

    tol = getattr(ns, "tol", None)
    eps = getattr(ns, "eps", None)
    kind = getattr(ns, "kind", None)

    if cmd == "microstate":
        if len(paths) != 1:
            raise _UsageError("microstate takes exactly one --measure")
        if (eps is None) != (ns.t is None):
            raise _UsageError("--eps and --t must be given together")
        if eps is not None and kind != "upper":
            raise _UsageError("the volume bound (--eps/--t) applies to the "
                              "upper microstate only")
    if cmd == "series":
        if ns.kind == "gamma-ratio":
            if paths:
                raise _UsageError("gamma-ratio takes no --measure")
            if eps is not None or tol is not None:
                raise _UsageError("gamma-ratio takes neither --eps nor --tol "
                                  "(its limit is closed-form)")
        else:
            if len(paths) != 1:
                raise _UsageError(f"series {ns.kind} takes exactly one "
                                  f"--measure")
            if ns.kind == "regularized-product":
                if eps is None:
                    raise _UsageError("series regularized-product requires "
                                      "--eps")
            elif eps is not None:
                raise _UsageError(f"series {ns.kind} does not take --eps")
    samples = None
    seed = DEFAULT_SEED
    if cmd == "selberg":
        if ns.k > 6 and any(v is not None for v in (ns.eps, ns.samples,
                                                    ns.seed)):
            raise _UsageError("Monte Carlo knobs (--eps/--samples/--seed) "
                              "apply only for k <= 6")
        eps = ns.eps if ns.eps is not None else DEFAULT_MC_EPS
        samples = ns.samples if ns.samples is not None else DEFAULT_SAMPLES
        seed = ns.seed if ns.seed is not None else DEFAULT_SEED

    return RunConfig(
        command=cmd,
        measure_paths=paths,
        k=getattr(ns, "k", None),
        ks=getattr(ns, "ks", None),
        eps=eps,
        tol=DEFAULT_TOL if tol is None else tol,
        t=getattr(ns, "t", None),
        samples=samples,
        seed=seed,
        kind=kind,
        out=ns.out,
        format=fmt,
    )


# ---------------------------------------------------------------------------
# Serialization helpers.


def _sanitize(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
    return obj


def _fmt_scalar(v: Any) -> str:
    return str(v)


def _text_lines(obj: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(obj, dict):
        for key, val in obj.items():
            if isinstance(val, dict) or (isinstance(val, list)
                                         and any(isinstance(x, (dict, list))
                                                 for x in val)):
                lines.append(f"{pad}{key}:")
                lines.extend(_text_lines(val, indent + 1))
            elif isinstance(val, list):
                shown = val if len(val) <= 20 else val[:8] + ["..."] + val[-2:]
                body = ", ".join(_fmt_scalar(x) for x in shown)
                suffix = f"  ({len(val)} values)" if len(val) > 20 else ""
                lines.append(f"{pad}{key}: [{body}]{suffix}")
            else:
                lines.append(f"{pad}{key}: {_fmt_scalar(val)}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_text_lines(item, indent + 1))
            else:
                lines.append(f"{pad}- {_fmt_scalar(item)}")
    else:
        lines.append(f"{pad}{_fmt_scalar(obj)}")
    return lines


def _render(payload: dict, config: RunConfig,
            csv_lines: list[str] | None) -> str:
    if config.format == "json":
        return json.dumps(_sanitize(payload), sort_keys=True, indent=2,
                          allow_nan=False)
    if config.format == "csv":
        assert csv_lines is not None
        return "\n".join(csv_lines)
    return "\n".join(_text_lines(_sanitize(payload)))


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fail(code: int, category: str, message: str) -> int:
    one_line = " ".join(str(message).split())
    sys.stderr.write(f"freeprob: error: {category}: {one_line}\n")
    return code


def _envelope(config: RunConfig, inputs: dict, body: dict) -> dict:
    return {
        "tool": {"name": "freeprob", "version": __version__},
        "command": config.command,
        "inputs": inputs,
        **body,
    }


def _energy_dict(res: EnergyResult) -> dict:
    out = {
        "value": res.value,
        "abs_error_estimate": res.abs_error_estimate,
        "components": {
            "diffuse_diffuse": res.components.diffuse_diffuse,
            "atom_diffuse": res.components.atom_diffuse,
            "atom_atom": res.components.atom_atom,
        },
        "status": res.status,
    }
    if res.truncation_note is not None:
        out["truncation_bound"] = res.truncation_bound
        out["truncation_note"] = res.truncation_note
    return out


def _series_dict(kind: str, report: SeriesReport) -> dict:
    out = {
        "kind": kind,
        "ks": list(report.ks),
        "values": list(report.values),
        "target": report.target,
        "relation": report.relation,
        "achieved_gap": report.achieved_gap,
    }
    if report.extras:
        out["extras"] = dict(report.extras)
    return out


def _series_csv(ks, values, target) -> list[str]:
    lines = ["k,value,target,gap"]
    lines.extend(f"{k},{v},{target},{v - target}"
                 for k, v in zip(ks, values))
    return lines


# ---------------------------------------------------------------------------
# Command handlers.  Each returns (payload, exit_code, csv_lines).


def _load_all(config: RunConfig) -> list[tuple[str, SpectralMeasure]]:
    loaded = []
    for path in config.measure_paths:
        try:
            loaded.append((path, load_measure(path)))
        except OSError as exc:
            raise _UsageError(f"cannot read measure file {path}: {exc}")
    return loaded


def _require_valid(path: str, measure: SpectralMeasure) -> None:
    report = validate(measure)
    if not report.ok:
        raise MeasureSpecError(path, "; ".join(report.problems))


def _cmd_validate(config: RunConfig):
    results = []
    all_ok = True
    for path, measure in _load_all(config):
        report = validate(measure)
        all_ok = all_ok and report.ok
        results.append({
            "measure": path,
            "ok": report.ok,
            "problems": list(report.problems),
            "total_mass": report.total_mass,
            "mass_defect": report.mass_defect,
            "tail_mass": report.tail_mass,
        })
    payload = _envelope(config, {"measures": list(config.measure_paths)},
                        {"results": results})
    return payload, 0 if all_ok else 2, None


def _cmd_energy(config: RunConfig):
    eps_list = [config.eps] if config.eps is not None else list(EPS_SWEEP)
    results = []
    worst = 0
    for path, measure in _load_all(config):
        _require_valid(path, measure)
        energy = offdiag_energy(measure, config.tol)
        if energy.status != "ok":
            worst = 3
        results.append({
            "measure": path,
            "offdiag_energy": _energy_dict(energy),
            "regularized": [
                {"eps": e,
                 "value": regularized_energy(measure, e, config.tol)}
                for e in eps_list
            ],
        })
    inputs = {"measures": list(config.measure_paths), "tol": config.tol,
              "eps": eps_list}
    return _envelope(config, inputs, {"results": results}), worst, None


def _cmd_chi(config: RunConfig):
    results = []
    worst = 0
    for path, measure in _load_all(config):
        _require_valid(path, measure)
        if measure.atoms or measure.truncated_tail > 0.0:
            value = -math.inf
        else:
            energy = offdiag_energy(measure, config.tol)
            if energy.status != "ok":
                worst = 3
            value = energy.value + CHI_SHIFT
        results.append({"measure": path, "chi": value,
                        "formula": FORMULAS["chi"]})
    inputs = {"measures": list(config.measure_paths), "tol": config.tol}
    return _envelope(config, inputs, {"results": results}), worst, None


def _cmd_dim(config: RunConfig):
    results = []
    for path, measure in _load_all(config):
        _require_valid(path, measure)
        results.append({
            "measure": path,
            "alpha": free_hausdorff_dimension(measure),
            "truncation_bound": dimension_truncation_bound(measure),
            "formula": FORMULAS["alpha"],
        })
    return _envelope(config, {"measures": list(config.measure_paths)},
                     {"results": results}), 0, None


def _cmd_bounds(config: RunConfig):
    results = []
    worst = 0
    for path, measure in _load_all(config):
        _require_valid(path, measure)
        bounds = hausdorff_entropy_bounds(measure, config.tol)
        if bounds.energy.status != "ok":
            worst = 3
        results.append({
            "measure": path,
            "alpha": bounds.alpha,
            "energy": _energy_dict(bounds.energy),
            "lower": bounds.lower,
            "upper": bounds.upper,
            "width": sandwich_width(bounds.alpha),
            "formulas": {key: FORMULAS[key]
                         for key in ("lower", "upper", "width")},
        })
    inputs = {"measures": list(config.measure_paths), "tol": config.tol}
    return _envelope(config, inputs, {"results": results}), worst, None


def _cmd_family_bounds(config: RunConfig):
    loaded = _load_all(config)
    for path, measure in loaded:
        _require_valid(path, measure)
    family = free_family_bounds([m for _, m in loaded], config.tol)
    worst = 3 if any(e.status != "ok" for e in family.energies) else 0
    body = {
        "n": len(loaded),
        "alphas": list(family.alphas),
        "beta": family.beta,
        "k1": family.k1,
        "k2": family.k2,
        "lower": family.lower,
        "upper": family.upper,
        "energies": [
            {"measure": path, **_energy_dict(energy)}
            for (path, _), energy in zip(loaded, family.energies)
        ],
        "formulas": {key: FORMULAS[key] for key in ("k1", "k2")},
    }
    inputs = {"measures": list(config.measure_paths), "tol": config.tol}
    return _envelope(config, inputs, {"result": body}), worst, None


def _cmd_microstate(config: RunConfig):
    [(path, measure)] = _load_all(config)
    _require_valid(path, measure)
    if config.kind == "upper":
        ms = build_upper_microstate(measure, config.k)
    else:
        ms = build_lower_microstate(measure, config.k)
    part = pair_partition(ms)
    body = {
        "measure": path,
        "kind": ms.kind,
        "k": ms.k,
        "quantile_count": ms.quantile_count,
        "atom_multiplicities": [
            {"location": loc, "multiplicity": mult}
            for loc, mult in ms.atom_multiplicity_map
        ],
        "pair_partition": {"s_count": part.s_count, "w_count": part.w_count},
        "eigenvalues": [float(v) for v in ms.eigenvalues],
    }
    if ms.kind == "upper":
        body["zero_count"] = ms.zero_count
    else:
        body["filler_count"] = ms.filler_count
        body["filler_range"] = list(ms.filler_range)
        body["excluded_quantile_count"] = ms.excluded_quantile_count
        check = sk_counting_check(measure, ms)
        body["counting_bound"] = {
            "lhs": check.lhs, "rhs": check.rhs,
            "margin": check.margin, "holds": check.holds,
        }
        body["packing_constant_log"] = packing_constant_log(
            measure, ms.k, microstate=ms)
    inputs = {"measures": [path], "k": config.k, "kind": config.kind}
    if config.eps is not None:
        body["volume_upper_bound_log"] = volume_upper_bound_log(
            ms, config.eps, config.t)
        inputs["eps"] = config.eps
        inputs["t"] = config.t
    csv_lines = [str(float(v)) for v in ms.eigenvalues]
    return _envelope(config, inputs, {"result": body}), 0, csv_lines


def _cmd_series(config: RunConfig):
    kind = config.kind
    inputs: dict[str, Any] = {"ks": list(config.ks)}
    worst = 0
    if kind == "gamma-ratio":
        gs = gamma_ratio_limit_series(config.ks)
        body = {
            "kind": kind,
            "ks": list(gs.ks),
            "values": list(gs.normalized_values),
            "target": gs.limit,
            "relation": "converges_to",
            "achieved_gap": gs.normalized_values[-1] - gs.limit,
            "approach_side": gs.approach_side,
        }
        csv_lines = _series_csv(gs.ks, gs.normalized_values, gs.limit)
        return _envelope(config, inputs, {"result": body}), 0, csv_lines

    [(path, measure)] = _load_all(config)
    _require_valid(path, measure)
    inputs["measures"] = [path]
    inputs["tol"] = config.tol
    if kind == "regularized-product":
        inputs["eps"] = config.eps
        report = regularized_product_series(measure, config.eps, config.ks,
                                            config.tol)
    else:
        energy = offdiag_energy(measure, config.tol)
        if energy.status != "ok":
            worst = 3
        if kind == "offdiag-sum":
            report = offdiag_sum_series(measure, config.ks, config.tol,
                                        energy=energy)
        else:
            report = packing_constant_series(measure, config.ks, config.tol,
                                             energy=energy)
    body = _series_dict(kind, report)
    csv_lines = _series_csv(report.ks, report.values, report.target)
    return _envelope(config, inputs, {"result": body}), worst, csv_lines


def _cmd_selberg(config: RunConfig):
    log_value = selberg_log(config.k)
    body: dict[str, Any] = {
        "k": config.k,
        "selberg_log": log_value,
        "product": math.exp(log_value),
    }
    inputs: dict[str, Any] = {"k": config.k}
    if config.k <= 6:
        mc = selberg_mc_check(config.k, config.eps, config.samples,
                              config.seed)
        body["monte_carlo"] = {
            "eps": config.eps,
            "samples": config.samples,
            "seed": config.seed,
            "mc_estimate": mc.mc_estimate,
            "closed_form": mc.closed_form,
            "z_score": mc.z_score,
        }
        inputs.update(eps=config.eps, samples=config.samples,
                      seed=config.seed)
    return _envelope(config, inputs, {"result": body}), 0, None


def _cmd_report(config: RunConfig):
    loaded = _load_all(config)
    results = []
    energies = []
    worst = 0
    for path, measure in loaded:
        _require_valid(path, measure)
        energy = offdiag_energy(measure, config.tol)
        energies.append(energy)
        if energy.status != "ok":
            worst = 3
        atomless = not measure.atoms and measure.truncated_tail == 0.0
        chi_value = energy.value + CHI_SHIFT if atomless else -math.inf
        bounds = hausdorff_entropy_bounds(measure, config.tol, energy=energy)
        results.append({
            "measure": path,
            "dimension": {
                "alpha": bounds.alpha,
                "truncation_bound": dimension_truncation_bound(measure),
            },
            "energy": _energy_dict(energy),
            "chi": chi_value,
            "h1_identity": chi_value + DIM_ONE_SHIFT,
            "bounds": {
                "lower": bounds.lower,
                "upper": bounds.upper,
                "width": sandwich_width(bounds.alpha),
            },
        })
    body: dict[str, Any] = {"results": results,
                            "formulas": dict(FORMULAS)}
    if len(loaded) >= 2:
        family = free_family_bounds([m for _, m in loaded], config.tol,
                                    energies=energies)
        body["family"] = {
            "n": len(loaded),
            "beta": family.beta,
            "k1": family.k1,
            "k2": family.k2,
            "lower": family.lower,
            "upper": family.upper,
        }
    inputs = {"measures": list(config.measure_paths), "tol": config.tol}
    return _envelope(config, inputs, body), worst, None


_HANDLERS = {
    "validate": _cmd_validate,
    "energy": _cmd_energy,
    "chi": _cmd_chi,
    "dim": _cmd_dim,
    "bounds": _cmd_bounds,
    "family-bounds": _cmd_family_bounds,
    "microstate": _cmd_microstate,
    "series": _cmd_series,
    "selberg": _cmd_selberg,
    "report": _cmd_report,
}


def run(config: RunConfig) -> int:
    """Execute a validated configuration; returns the exit code."""
    try:
        payload, code, csv_lines = _HANDLERS[config.command](config)
    except _UsageError as exc:
        return _fail(1, "usage", str(exc))
    except MeasureSpecError as exc:
        return _fail(2, "measure-spec", str(exc))
    except NoSolutionError as exc:
        return _fail(4, "no-solution", str(exc))
    except ValueError as exc:
        return _fail(1, "usage", str(exc))
    _emit(_render(payload, config, csv_lines), config.out)
    if code == 3:
        _fail(3, "energy", "an energy quadrature did not converge or "
                           "diverged; see the report's status fields")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        config = parse_args(argv)
    except _UsageError as exc:
        return _fail(1, "usage", str(exc))
    return run(config)
