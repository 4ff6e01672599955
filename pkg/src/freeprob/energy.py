"""Logarithmic energy integrals of spectral measures.

Two quantities, both in absolute-tolerance quadrature:

* ``offdiag_energy``: E = the double integral of log|y - z| against
  mu x mu with the diagonal removed (only atom self-pairs live there).
* ``regularized_energy``: the full-plane integral of log((y - z)^2 + eps),
  diagonal included, which is finite for every eps > 0.

Atomic x atomic terms are exact sums; atomic x diffuse terms are 1-D
adaptive panels in the quantile variable with the log singularity pinned
to a panel edge; diffuse x diffuse terms integrate over the unit square
in quantile coordinates, where log|Q(u) - Q(v)| splits into a smooth
log-ratio plus log|u - v|, and the latter is handled in closed form per
cell.  Absolute (not relative) tolerances throughout, because energies
near zero are routine.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from ._quad import QuadResult, adaptive_quad_1d, adaptive_quad_2d
from .measures import DiffusePart, SpectralMeasure

__all__ = [
    "EnergyComponents",
    "EnergyResult",
    "offdiag_energy",
    "regularized_energy",
    "DEFAULT_FLOOR",
]

DEFAULT_FLOOR = -1e6
_DEFAULT_MAX_CELLS = 40000
_TINY = 1e-300


def _max_cells(explicit: int | None) -> int:
    if explicit is not None:
        return int(explicit)
    env = os.environ.get("FREEPROB_MAX_CELLS")
    return int(env) if env else _DEFAULT_MAX_CELLS


@dataclass(frozen=True)
class EnergyComponents:
    """Breakdown of an energy value by interaction type."""

    diffuse_diffuse: float
    atom_diffuse: float
    atom_atom: float


@dataclass(frozen=True)
class EnergyResult:
    """An energy value with its accuracy diagnostics.

    ``value`` is the sum of the three components (it is -inf exactly when
    a component diverged).  ``status`` is "ok", "not_converged" (budget
    ran out before the tolerance; value is the best estimate), or
    "diverged" (value fell through the divergence floor, reported as
    -inf).  When the measure carries truncated atom-family mass,
    ``truncation_bound`` bounds the absolute energy contribution of the
    dropped mass (which is excluded from ``value``) and
    ``truncation_note`` says so in words.
    """

    value: float
    abs_error_estimate: float
    components: EnergyComponents
    status: str
    truncation_bound: float = 0.0
    truncation_note: str | None = None


# ---------------------------------------------------------------------------
# Quantile-space integrands.


def _log_ratio_evaluator(diffuse: DiffusePart):
    """log of R(u, v) = |Q(u) - Q(v)| / |u - v| for the unit quantile Q.

    R extends continuously to u = v (it becomes Q'), so log|Q(u) - Q(v)|
    = log R + log|u - v| splits the diagonal singularity off exactly.
    """
    if diffuse.kind == "uniform":
        lo, hi = diffuse.interval()
        const = math.log(hi - lo)

        def log_ratio(u, v):
            return np.full(u.shape, const)

        return log_ratio

    if diffuse.kind == "arcsine":
        lo, hi = diffuse.interval()
        width = hi - lo

        def log_ratio(u, v):
            # Q(u) - Q(v) = width * sin(pi(u+v)/2) * sin(pi(u-v)/2)
            s = np.sin(0.5 * math.pi * (u + v))
            r = 0.5 * math.pi * width * s * np.sinc(0.5 * (u - v))
            return np.log(np.maximum(r, _TINY))

        return log_ratio

    def log_ratio(u, v):
        d = u - v
        near = np.abs(d) < 1e-9
        qu = diffuse.quantile_unit(u)
        qv = diffuse.quantile_unit(v)
        r = np.empty_like(d)
        far = ~near
        r[far] = (qu[far] - qv[far]) / d[far]
        if near.any():
            r[near] = diffuse.quantile_unit_derivative(0.5 * (u + v)[near])
        return np.log(np.maximum(np.abs(r), _TINY))

    return log_ratio


def _quantile_level_breaks(measure: SpectralMeasure) -> list[float]:
    """Interior levels in (0,1) where the unit quantile has kinks."""
    diffuse = measure.diffuse
    breaks: list[float] = []
    if diffuse.kind == "piecewise_linear_cdf" and diffuse.mass > 0:
        for _, cum in diffuse.params["knots"][1:-1]:
            breaks.append(float(cum) / diffuse.mass)
    return breaks


def _atom_level(measure: SpectralMeasure, location: float) -> float | None:
    """Quantile level of an atom location inside the diffuse support."""
    diffuse = measure.diffuse
    if diffuse.kind == "empty":
        return None
    lo, hi = diffuse.interval()
    if not lo <= location <= hi:
        return None
    return float(diffuse.cdf_mass(location)) / diffuse.mass


# ---------------------------------------------------------------------------
# Truncated-tail bookkeeping.


def _truncation_bound(measure: SpectralMeasure) -> tuple[float, str | None]:
    tail = measure.truncated_tail
    if tail <= 0.0:
        return 0.0, None
    a, b = measure.support
    landmarks = [atom.location for atom in measure.atoms]
    if measure.diffuse.kind != "empty":
        landmarks.extend(measure.diffuse.interval())
    if measure.truncated_tail_location is not None:
        landmarks.append(measure.truncated_tail_location)
    landmarks = sorted(set(landmarks))
    gaps = [y - x for x, y in zip(landmarks, landmarks[1:]) if y > x]
    diam = b - a
    if not gaps or diam <= 0.0:
        return math.inf, ("dropped atom-family mass cannot be localized; "
                          "its energy contribution is unbounded")
    # |log|y-z|| over pairs meeting the dropped mass is at most the worse
    # of the closest-landmark and diameter scales
    log_cap = max(abs(math.log(min(gaps))), abs(math.log(diam)))
    bound = tail * (2.0 - tail) * log_cap
    note = (f"atom-family tail of mass {tail:.3e} was truncated; its pairs "
            f"contribute at most {bound:.3e} in absolute value and are "
            f"not included in the energy value")
    return bound, note


# ---------------------------------------------------------------------------
# Off-diagonal energy.


def _worst_status(statuses: list[str]) -> str:
    for bad in ("diverged", "not_converged"):
        if bad in statuses:
            return bad
    return "ok"


def offdiag_energy(measure: SpectralMeasure, tol: float = 1e-6, *,
                   floor: float = DEFAULT_FLOOR,
                   max_cells: int | None = None) -> EnergyResult:
    """E = the integral of log|y - z| d(mu x mu) off the diagonal.

    The error budget is split one quarter to the atomic x diffuse panels
    and one half to the diffuse x diffuse cells (the atom x atom sum is
    exact).  A running diffuse total below ``floor`` is reported as
    divergence: value -inf, status "diverged" (distinct from
    "not_converged", where the cell budget ran out and the value is the
    best finite estimate).  ``max_cells`` defaults to the
    FREEPROB_MAX_CELLS environment variable, else 40000.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    cells = _max_cells(max_cells)
    atoms = measure.atoms
    diffuse = measure.diffuse
    c = diffuse.mass
    statuses: list[str] = []

    aa_terms: list[float] = []
    aa_diverged = False
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            gap = abs(atoms[i].location - atoms[j].location)
            if gap == 0.0:
                aa_diverged = True
            else:
                aa_terms.append(2.0 * atoms[i].weight * atoms[j].weight
                                * math.log(gap))
    aa = -math.inf if aa_diverged else math.fsum(aa_terms)

    ad = 0.0
    ad_err = 0.0
    if atoms and c > 0.0:
        budget = 0.25 * tol / len(atoms)
        level_breaks = _quantile_level_breaks(measure)
        for atom in atoms:
            loc = atom.location
            breaks = list(level_breaks)
            singular = _atom_level(measure, loc)
            if singular is not None:
                breaks.append(singular)

            def integrand(u, _loc=loc):
                q = diffuse.quantile_unit(u)
                return np.log(np.maximum(np.abs(_loc - q), _TINY))

            weight = 2.0 * atom.weight * c
            res = adaptive_quad_1d(integrand, 0.0, 1.0,
                                   tol=budget / max(weight, 1e-30),
                                   breakpoints=breaks)
            ad += weight * res.value
            ad_err += weight * res.error
            statuses.append(res.status)

    dd = 0.0
    dd_err = 0.0
    if c > 0.0:
        log_ratio = _log_ratio_evaluator(diffuse)
        breaks = _quantile_level_breaks(measure)
        res = adaptive_quad_2d(log_ratio, tol=0.5 * tol / (c * c),
                               max_cells=cells, u_breaks=breaks,
                               v_breaks=breaks, add_log_gap=True,
                               floor=floor / (c * c))
        dd = c * c * res.value
        dd_err = c * c * res.error
        statuses.append(res.status)

    status = _worst_status(statuses)
    if aa_diverged or status == "diverged":
        status = "diverged"
        value = -math.inf
    else:
        value = math.fsum([aa, ad, dd])
    bound, note = _truncation_bound(measure)
    return EnergyResult(value=value,
                        abs_error_estimate=ad_err + dd_err,
                        components=EnergyComponents(dd, ad, aa),
                        status=status,
                        truncation_bound=bound,
                        truncation_note=note)


# ---------------------------------------------------------------------------
# Regularized energy.


def regularized_energy(measure: SpectralMeasure, eps: float,
                       tol: float = 1e-6, *,
                       max_cells: int | None = None) -> float:
    """Full-plane integral of log((y - z)^2 + eps) d(mu x mu).

    The diagonal is included (each atom's self-pair contributes
    weight^2 * log(eps)) and the integrand is bounded, so the value is
    always finite.  Truncated atom-family mass participates as a point
    mass at its accumulation point, which misplaces it by at most the
    tail's spatial spread; with default truncation tolerances this is
    far below any quadrature tolerance in use.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    cells = _max_cells(max_cells)
    diffuse = measure.diffuse
    c = diffuse.mass

    point_masses = [(a.location, a.weight) for a in measure.atoms]
    if measure.truncated_tail > 0.0 and measure.truncated_tail_location is not None:
        point_masses.append((measure.truncated_tail_location,
                             measure.truncated_tail))

    aa_terms = [wi * wj * math.log((xi - xj) ** 2 + eps)
                for xi, wi in point_masses
                for xj, wj in point_masses]
    aa = math.fsum(aa_terms)

    ad = 0.0
    if point_masses and c > 0.0:
        budget = 0.25 * tol / len(point_masses)
        level_breaks = _quantile_level_breaks(measure)
        for loc, w in point_masses:
            breaks = list(level_breaks)
            crossing = _atom_level(measure, loc)
            if crossing is not None:
                breaks.append(crossing)

            def integrand(u, _loc=loc):
                q = diffuse.quantile_unit(u)
                return np.log((_loc - q) ** 2 + eps)

            weight = 2.0 * w * c
            res = adaptive_quad_1d(integrand, 0.0, 1.0,
                                   tol=budget / max(weight, 1e-30),
                                   breakpoints=breaks)
            ad += weight * res.value

    dd = 0.0
    if c > 0.0:
        breaks = _quantile_level_breaks(measure)

        def integrand2(u, v):
            d = diffuse.quantile_unit(u) - diffuse.quantile_unit(v)
            return np.log(d * d + eps)

        res = adaptive_quad_2d(integrand2, tol=0.5 * tol / (c * c),
                               max_cells=cells, u_breaks=breaks,
                               v_breaks=breaks)
        dd = c * c * res.value

    return math.fsum([aa, ad, dd])
