"""Spectral measures: atomic + diffuse decompositions on a compact interval.

A measure is ``mu = sigma + nu`` with ``sigma`` a finite list of weighted
atoms and ``nu`` a diffuse part drawn from a closed family (uniform,
semicircle, arcsine, piecewise-linear CDF, or empty), all supported in a
declared interval [a, b].  Total mass is 1; when an infinite atom family
is truncated the unrepresented tail mass is carried explicitly so
downstream consumers can bound its effect instead of silently
renormalizing.

Quantiles follow the rightmost-preimage convention: the quantile at
level u is the largest point x in [a, b] with nu([a, x]) <= u, so flat
CDF stretches resolve to their right endpoint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable

import numpy as np

from ._kernels import semicircle_quantile_unit

__all__ = [
    "Atom",
    "DiffusePart",
    "SpectralMeasure",
    "ValidationReport",
    "MeasureSpecError",
    "validate",
    "cdf",
    "diffuse_quantile",
    "diffuse_quantile_batch",
    "truncate_atoms",
    "affine_pushforward",
    "measure_from_dict",
    "measure_to_dict",
    "load_measure",
    "dump_measure",
    "uniform_measure",
    "arcsine_measure",
    "semicircle_measure",
    "atomic_measure",
    "example42_measure",
]

_DIFFUSE_KINDS = ("empty", "uniform", "semicircle", "arcsine",
                  "piecewise_linear_cdf")
_MASS_TOL = 1e-12


def _int_part(x: float) -> int:
    """Mathematical floor of a real-valued product like c*k.

    Plain ``math.floor`` misreads products such as 0.3 * 10 (stored as
    2.9999999999999996); values within 1e-9 of an integer snap to it.
    """
    r = round(x)
    if abs(x - r) < 1e-9:
        return int(r)
    return int(math.floor(x))


class MeasureSpecError(ValueError):
    """Invalid measure specification; ``path`` cites the offending key."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.reason = message
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class Atom:
    """A point mass: ``weight`` at ``location``."""

    location: float
    weight: float


@dataclass(frozen=True)
class DiffusePart:
    """The diffuse component of a measure.

    ``mass`` is its total measure (0 for kind "empty"); ``params`` holds
    the kind-specific shape parameters:

    * uniform / arcsine: ``{"lo": a, "hi": b}``
    * semicircle: ``{"center": c, "radius": r}``
    * piecewise_linear_cdf: ``{"knots": [[x0, 0.0], ..., [xn, mass]]}``
      with both coordinates strictly increasing
    * empty: ``{}``
    """

    kind: str
    mass: float = 0.0
    params: dict = field(default_factory=dict)

    # -- structure ----------------------------------------------------------

    def interval(self) -> tuple[float, float] | None:
        """Support interval of the diffuse part, or None when empty."""
        if self.kind == "empty":
            return None
        if self.kind in ("uniform", "arcsine"):
            return float(self.params["lo"]), float(self.params["hi"])
        if self.kind == "semicircle":
            c = float(self.params["center"])
            r = float(self.params["radius"])
            return c - r, c + r
        if self.kind == "piecewise_linear_cdf":
            knots = self.params["knots"]
            return float(knots[0][0]), float(knots[-1][0])
        raise ValueError(f"unknown diffuse kind {self.kind!r}")

    def _knot_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        knots = self.params["knots"]
        xs = np.array([float(p[0]) for p in knots])
        cs = np.array([float(p[1]) for p in knots])
        return xs, cs

    # -- CDF / quantile -----------------------------------------------------

    def cdf_mass(self, x):
        """nu((-inf, x]) in measure units (ranges over [0, mass])."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        if self.kind == "empty":
            out = np.zeros_like(x)
        elif self.kind == "uniform":
            lo, hi = self.interval()
            frac = np.clip((x - lo) / (hi - lo), 0.0, 1.0)
            out = self.mass * frac
        elif self.kind == "arcsine":
            lo, hi = self.interval()
            frac = np.clip((x - lo) / (hi - lo), 0.0, 1.0)
            out = self.mass * (2.0 / math.pi) * np.arcsin(np.sqrt(frac))
        elif self.kind == "semicircle":
            c = float(self.params["center"])
            r = float(self.params["radius"])
            z = np.clip((x - c) / r, -1.0, 1.0)
            unit = 0.5 + (z * np.sqrt(np.maximum(0.0, 1.0 - z * z))
                          + np.arcsin(z)) / math.pi
            out = self.mass * unit
        elif self.kind == "piecewise_linear_cdf":
            xs, cs = self._knot_arrays()
            out = np.interp(x, xs, cs, left=0.0, right=cs[-1])
        else:
            raise ValueError(f"unknown diffuse kind {self.kind!r}")
        return float(out[0]) if scalar else out

    def quantile_unit(self, p):
        """Quantile at normalized probabilities ``p`` in [0, 1].

        Vectorized; rightmost-preimage convention (relevant only at the
        exact knot levels of a piecewise CDF, where strict monotonicity
        already makes the preimage unique).
        """
        p = np.asarray(p, dtype=float)
        scalar = p.ndim == 0
        p = np.atleast_1d(p)
        if self.kind == "empty":
            raise ValueError("empty diffuse part has no quantiles")
        if self.kind == "uniform":
            lo, hi = self.interval()
            out = lo + (hi - lo) * p
        elif self.kind == "arcsine":
            lo, hi = self.interval()
            s = np.sin(0.5 * math.pi * p)
            out = lo + (hi - lo) * s * s
        elif self.kind == "semicircle":
            c = float(self.params["center"])
            r = float(self.params["radius"])
            out = c + r * semicircle_quantile_unit(p)
        elif self.kind == "piecewise_linear_cdf":
            xs, cs = self._knot_arrays()
            out = np.interp(p * self.mass, cs, xs)
        else:
            raise ValueError(f"unknown diffuse kind {self.kind!r}")
        return float(out[0]) if scalar else out

    def quantile_unit_derivative(self, p):
        """d(quantile_unit)/dp, vectorized; infinite at arcsine endpoints."""
        p = np.asarray(p, dtype=float)
        scalar = p.ndim == 0
        p = np.atleast_1d(p)
        if self.kind == "uniform":
            lo, hi = self.interval()
            out = np.full(p.shape, hi - lo)
        elif self.kind == "arcsine":
            lo, hi = self.interval()
            out = 0.5 * math.pi * (hi - lo) * np.sin(math.pi * p)
        elif self.kind == "semicircle":
            r = float(self.params["radius"])
            z = semicircle_quantile_unit(p)
            out = 0.5 * math.pi * r / np.sqrt(np.maximum(1e-300, 1.0 - z * z))
        elif self.kind == "piecewise_linear_cdf":
            xs, cs = self._knot_arrays()
            seg = np.clip(np.searchsorted(cs, p * self.mass, side="right") - 1,
                          0, len(xs) - 2)
            slopes = (xs[1:] - xs[:-1]) / (cs[1:] - cs[:-1]) * self.mass
            out = slopes[seg]
        else:
            raise ValueError(f"no quantile derivative for kind {self.kind!r}")
        return float(out[0]) if scalar else out

    def validate_params(self) -> list[str]:
        """Kind-specific parameter problems (empty list when fine)."""
        problems: list[str] = []
        if self.kind not in _DIFFUSE_KINDS:
            return [f"diffuse kind {self.kind!r} is not one of {_DIFFUSE_KINDS}"]
        if not 0.0 <= self.mass <= 1.0:
            problems.append(f"diffuse mass {self.mass!r} outside [0, 1]")
        if (self.kind == "empty") != (self.mass == 0.0):
            problems.append("diffuse kind is 'empty' iff mass is 0")
        if self.kind in ("uniform", "arcsine"):
            lo = self.params.get("lo")
            hi = self.params.get("hi")
            if not (isinstance(lo, (int, float)) and isinstance(hi, (int, float))
                    and math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                problems.append(f"{self.kind} params need finite lo < hi, got "
                                f"lo={lo!r}, hi={hi!r}")
        elif self.kind == "semicircle":
            c = self.params.get("center")
            r = self.params.get("radius")
            if not (isinstance(c, (int, float)) and isinstance(r, (int, float))
                    and math.isfinite(c) and math.isfinite(r) and r > 0):
                problems.append(f"semicircle params need finite center and "
                                f"radius > 0, got center={c!r}, radius={r!r}")
        elif self.kind == "piecewise_linear_cdf":
            knots = self.params.get("knots")
            if (not isinstance(knots, (list, tuple)) or len(knots) < 2
                    or any(len(p) != 2 for p in knots)):
                problems.append("piecewise_linear_cdf needs >= 2 [point, "
                                "cumulative] knot pairs")
            else:
                xs = [float(p[0]) for p in knots]
                cs = [float(p[1]) for p in knots]
                if any(b <= a for a, b in zip(xs, xs[1:])):
                    problems.append("piecewise knot points must be strictly "
                                    "increasing")
                if any(b <= a for a, b in zip(cs, cs[1:])):
                    problems.append("piecewise knot cumulative masses must be "
                                    "strictly increasing")
                if abs(cs[0]) > _MASS_TOL:
                    problems.append(f"first knot cumulative mass must be 0, "
                                    f"got {cs[0]!r}")
                if abs(cs[-1] - self.mass) > _MASS_TOL:
                    problems.append(f"last knot cumulative mass {cs[-1]!r} "
                                    f"must equal the diffuse mass {self.mass!r}")
        return problems


_EMPTY_DIFFUSE = DiffusePart(kind="empty", mass=0.0)


@dataclass(frozen=True)
class SpectralMeasure:
    """A probability measure on [a, b]: atoms + diffuse part (+ tail note).

    ``family`` records a named infinite atom family the explicit atoms
    were expanded from (with the expansion tolerance ``family_tol``);
    ``truncated_tail`` is mass not represented by any atom, attributed to
    the family's accumulation point ``truncated_tail_location`` for CDF
    purposes.
    """

    support: tuple[float, float]
    atoms: tuple[Atom, ...] = ()
    diffuse: DiffusePart = _EMPTY_DIFFUSE
    family: str | None = None
    family_tol: float | None = None
    truncated_tail: float = 0.0
    truncated_tail_location: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "support",
                           (float(self.support[0]), float(self.support[1])))
        atoms = tuple(sorted((Atom(float(a.location), float(a.weight))
                              for a in self.atoms),
                             key=lambda a: a.location))
        object.__setattr__(self, "atoms", atoms)

    @property
    def atom_mass(self) -> float:
        return math.fsum(a.weight for a in self.atoms)

    def atoms_by_weight(self) -> tuple[Atom, ...]:
        """Atoms in decreasing-weight order (ties broken by location)."""
        return tuple(sorted(self.atoms, key=lambda a: (-a.weight, a.location)))

    def cdf(self, x):
        return cdf(self, x)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...]
    total_mass: float
    mass_defect: float
    tail_mass: float


def validate(measure: SpectralMeasure) -> ValidationReport:
    """Check every structural invariant; report-style (never raises)."""
    problems: list[str] = []
    a, b = measure.support
    if not (math.isfinite(a) and math.isfinite(b)):
        problems.append(f"support endpoints must be finite, got [{a}, {b}]")
    if a > b:
        problems.append(f"support interval is empty: [{a}, {b}]")
    seen: set[float] = set()
    for atom in measure.atoms:
        if not (0.0 < atom.weight <= 1.0):
            problems.append(f"atom at {atom.location} has weight "
                            f"{atom.weight!r} outside (0, 1]")
        if not (a <= atom.location <= b):
            problems.append(f"atom location {atom.location} outside the "
                            f"support [{a}, {b}]")
        if atom.location in seen:
            problems.append(f"duplicate atom location {atom.location}")
        seen.add(atom.location)
    problems.extend(measure.diffuse.validate_params())
    if not problems and measure.diffuse.kind != "empty":
        lo, hi = measure.diffuse.interval()
        if lo < a - 1e-12 or hi > b + 1e-12:
            problems.append(f"diffuse support [{lo}, {hi}] outside the "
                            f"declared support [{a}, {b}]")
    if measure.truncated_tail < 0.0:
        problems.append(f"negative truncated tail {measure.truncated_tail!r}")
    if measure.family is not None and measure.family != "example42":
        problems.append(f"unknown atom family {measure.family!r}")
    total = measure.atom_mass + measure.diffuse.mass + measure.truncated_tail
    defect = total - 1.0
    if abs(defect) > _MASS_TOL:
        problems.append(f"total mass {total!r} differs from 1 by {defect:.3e}")
    return ValidationReport(ok=not problems, problems=tuple(problems),
                            total_mass=total, mass_defect=defect,
                            tail_mass=measure.truncated_tail)


def cdf(measure: SpectralMeasure, x):
    """mu((-inf, x]); right-continuous, so an atom at x is included.

    Truncated family tail mass counts from its accumulation point on, so
    cdf(b) = 1 within 1e-12 for every valid measure.
    """
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    out = np.zeros_like(x_arr)
    for atom in measure.atoms:
        out += atom.weight * (x_arr >= atom.location)
    out += measure.diffuse.cdf_mass(x_arr)
    if measure.truncated_tail > 0.0 and measure.truncated_tail_location is not None:
        out += measure.truncated_tail * (x_arr >= measure.truncated_tail_location)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Quantiles.


def _bisect_rightmost(cdf_fn: Callable[[np.ndarray], np.ndarray],
                      lo: float, hi: float,
                      levels: np.ndarray, iters: int = 100) -> np.ndarray:
    """Largest x in [lo, hi] with cdf(x) <= level, per level (vectorized).

    100 bisection steps shrink the bracket far below the 1e-12 contract.
    """
    lo_arr = np.full(levels.shape, float(lo))
    hi_arr = np.full(levels.shape, float(hi))
    for _ in range(iters):
        mid = 0.5 * (lo_arr + hi_arr)
        take = cdf_fn(mid) <= levels
        lo_arr = np.where(take, mid, lo_arr)
        hi_arr = np.where(take, hi_arr, mid)
    return 0.5 * (lo_arr + hi_arr)


def diffuse_quantile_batch(measure: SpectralMeasure, k: int) -> np.ndarray:
    """All diffuse quantiles at levels j/k for j = 1 .. floor(c k).

    Each value is the largest x in [a, b] with nu([a, x]) = j/k.  Found
    by bisection on the diffuse CDF and snapped to the closed-form
    inverse when the two agree to 1e-9 (which keeps analytically exact
    quantiles, like j/k itself for uniform [0, 1], bit-exact).
    """
    c = measure.diffuse.mass
    q = _int_part(c * k)
    if q < 1:
        return np.empty(0)
    a, b = measure.support
    levels = np.arange(1, q + 1, dtype=float) / k
    at_top = levels >= c - 1e-14
    out = np.empty(q)
    out[at_top] = b  # the CDF is flat at mass c from the diffuse right
    # endpoint to b, and "largest preimage" picks b
    inner = ~at_top
    if inner.any():
        lv = levels[inner]
        closed = measure.diffuse.quantile_unit(lv / c)
        bis = _bisect_rightmost(measure.diffuse.cdf_mass, a, b, lv)
        scale = max(1.0, abs(a), abs(b))
        out[inner] = np.where(np.abs(closed - bis) <= 1e-9 * scale,
                              closed, bis)
    return out


def diffuse_quantile(measure: SpectralMeasure, j: int, k: int) -> float:
    """The j/k diffuse quantile; defined only for 1 <= j <= floor(c k)."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    c = measure.diffuse.mass
    q = _int_part(c * k)
    if not 1 <= j <= q:
        raise ValueError(
            f"diffuse quantile undefined for j={j}: requires 1 <= j <= "
            f"floor(c*k) = {q} (diffuse mass c = {c})")
    return float(diffuse_quantile_batch(measure, k)[j - 1])


def truncate_atoms(measure: SpectralMeasure, tol: float) -> SpectralMeasure:
    """Keep atoms in decreasing-weight order until the rest weighs < tol.

    Dropped mass is added to the measure's reported truncated tail (never
    renormalized away); for finite lists with no droppable tail this is
    the identity.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    ranked = measure.atoms_by_weight()
    suffix = 0.0
    keep = len(ranked)
    # walk from the lightest atom inward while the dropped tail stays < tol
    for idx in range(len(ranked) - 1, -1, -1):
        if suffix + ranked[idx].weight < tol:
            suffix += ranked[idx].weight
            keep = idx
        else:
            break
    kept = ranked[:keep]
    dropped = ranked[keep:]
    if not dropped:
        return measure
    tail_loc = dropped[0].location
    if measure.truncated_tail_location is not None:
        tail_loc = measure.truncated_tail_location
    return replace(measure,
                   atoms=tuple(kept),
                   family=None,
                   family_tol=None,
                   truncated_tail=measure.truncated_tail + suffix,
                   truncated_tail_location=tail_loc)


def affine_pushforward(measure: SpectralMeasure, scale: float,
                       shift: float = 0.0) -> SpectralMeasure:
    """Pushforward under x -> scale * x + shift (scale nonzero).

    Energies transform as E -> E + log|scale|; a negative scale also
    reflects the measure, which leaves energies unchanged.
    """
    if scale == 0.0:
        raise ValueError("scale must be nonzero")

    def mv(x: float) -> float:
        return scale * x + shift

    a, b = measure.support
    support = (mv(a), mv(b)) if scale > 0 else (mv(b), mv(a))
    atoms = tuple(Atom(mv(at.location), at.weight) for at in measure.atoms)
    d = measure.diffuse
    if d.kind == "empty":
        diffuse = d
    elif d.kind in ("uniform", "arcsine"):
        lo, hi = d.interval()
        lo2, hi2 = (mv(lo), mv(hi)) if scale > 0 else (mv(hi), mv(lo))
        diffuse = DiffusePart(d.kind, d.mass, {"lo": lo2, "hi": hi2})
    elif d.kind == "semicircle":
        diffuse = DiffusePart("semicircle", d.mass,
                              {"center": mv(float(d.params["center"])),
                               "radius": abs(scale) * float(d.params["radius"])})
    else:
        knots = d.params["knots"]
        if scale > 0:
            new = [[mv(float(x)), float(c)] for x, c in knots]
        else:
            # reflection reverses the points; cumulative masses flip to
            # mass - c so they stay strictly increasing from 0
            new = [[mv(float(x)), d.mass - float(c)] for x, c in reversed(knots)]
            new[0][1] = 0.0
            new[-1][1] = d.mass
        diffuse = DiffusePart("piecewise_linear_cdf", d.mass, {"knots": new})
    tail_loc = measure.truncated_tail_location
    return replace(measure, support=support, atoms=atoms, diffuse=diffuse,
                   truncated_tail_location=None if tail_loc is None else mv(tail_loc))


# ---------------------------------------------------------------------------
# Factories.


def uniform_measure(lo: float = 0.0, hi: float = 1.0) -> SpectralMeasure:
    """Uniform probability measure on [lo, hi]."""
    return SpectralMeasure(support=(lo, hi),
                           diffuse=DiffusePart("uniform", 1.0,
                                               {"lo": lo, "hi": hi}))


def arcsine_measure(lo: float, hi: float) -> SpectralMeasure:
    """Arcsine (equilibrium) measure of the interval [lo, hi]."""
    return SpectralMeasure(support=(lo, hi),
                           diffuse=DiffusePart("arcsine", 1.0,
                                               {"lo": lo, "hi": hi}))


def semicircle_measure(center: float = 0.0, radius: float = 2.0) -> SpectralMeasure:
    """Semicircle law; radius 2 gives unit variance."""
    return SpectralMeasure(support=(center - radius, center + radius),
                           diffuse=DiffusePart("semicircle", 1.0,
                                               {"center": center,
                                                "radius": radius}))


def atomic_measure(pairs: Iterable[tuple[float, float]],
                   support: tuple[float, float] | None = None) -> SpectralMeasure:
    """Purely atomic measure from (location, weight) pairs."""
    atoms = tuple(Atom(loc, w) for loc, w in pairs)
    if support is None:
        locs = [a.location for a in atoms]
        support = (min(locs), max(locs))
    return SpectralMeasure(support=support, atoms=atoms)


def _expand_example42(tol: float) -> tuple[tuple[Atom, ...], float]:
    """Atoms of weight 2^-j at 1/j until the remaining tail is < tol.

    The tail after J atoms is exactly 2^-J (dyadic, so the kept mass plus
    the reported tail reproduce 1 with no rounding at all).
    """
    count = max(1, math.ceil(-math.log2(tol)))
    while 2.0 ** -count >= tol:  # guard the boundary case tol = 2^-m
        count += 1
    atoms = tuple(Atom(1.0 / j, 2.0 ** -j) for j in range(1, count + 1))
    return atoms, 2.0 ** -count


def example42_measure(tol: float = 1e-10) -> SpectralMeasure:
    """The built-in infinite atom family: weight 2^-j at location 1/j.

    The locations accumulate at 0, so the truncated tail is attributed
    there.  Its free Hausdorff dimension is 1 - sum 4^-j = 2/3.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    atoms, tail = _expand_example42(tol)
    return SpectralMeasure(support=(0.0, 1.0), atoms=atoms,
                           family="example42", family_tol=tol,
                           truncated_tail=tail, truncated_tail_location=0.0)


# ---------------------------------------------------------------------------
# JSON measure specifications.


def _spec_get(mapping: dict, key: str, path: str, required: bool = True,
              default: Any = None) -> Any:
    if key not in mapping:
        if required:
            raise MeasureSpecError(f"{path}.{key}" if path else key,
                                   "missing required key")
        return default
    return mapping[key]


def _spec_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MeasureSpecError(path, f"expected a number, got {value!r}")
    return float(value)


def measure_from_dict(spec: dict) -> SpectralMeasure:
    """Build a measure from the documented JSON-style mapping.

    Raises MeasureSpecError citing the offending key path on any
    malformed input.  An ``atom_family`` entry is expanded into explicit
    atoms (plus a reported tail) and may not be combined with an explicit
    ``atoms`` list.
    """
    if not isinstance(spec, dict):
        raise MeasureSpecError("", f"measure spec must be an object, "
                                   f"got {type(spec).__name__}")
    unknown = set(spec) - {"support", "atoms", "diffuse", "atom_family"}
    if unknown:
        raise MeasureSpecError(sorted(unknown)[0], "unknown top-level key")
    support_raw = _spec_get(spec, "support", "")
    if (not isinstance(support_raw, (list, tuple)) or len(support_raw) != 2):
        raise MeasureSpecError("support", "expected [a, b]")
    support = (_spec_number(support_raw[0], "support[0]"),
               _spec_number(support_raw[1], "support[1]"))

    atoms: list[Atom] = []
    atoms_raw = _spec_get(spec, "atoms", "", required=False, default=[])
    if not isinstance(atoms_raw, list):
        raise MeasureSpecError("atoms", "expected a list of atoms")
    for i, entry in enumerate(atoms_raw):
        path = f"atoms[{i}]"
        if not isinstance(entry, dict):
            raise MeasureSpecError(path, "expected an object with "
                                         "location and weight")
        loc = _spec_number(_spec_get(entry, "location", path),
                           f"{path}.location")
        w = _spec_number(_spec_get(entry, "weight", path), f"{path}.weight")
        extra = set(entry) - {"location", "weight"}
        if extra:
            raise MeasureSpecError(f"{path}.{sorted(extra)[0]}", "unknown key")
        atoms.append(Atom(loc, w))

    diffuse = _EMPTY_DIFFUSE
    diffuse_raw = _spec_get(spec, "diffuse", "", required=False)
    if diffuse_raw is not None:
        if not isinstance(diffuse_raw, dict):
            raise MeasureSpecError("diffuse", "expected an object")
        kind = _spec_get(diffuse_raw, "kind", "diffuse")
        if kind not in _DIFFUSE_KINDS:
            raise MeasureSpecError("diffuse.kind",
                                   f"unknown kind {kind!r}; expected one "
                                   f"of {_DIFFUSE_KINDS}")
        mass = _spec_number(_spec_get(diffuse_raw, "mass", "diffuse"),
                            "diffuse.mass")
        params_raw = _spec_get(diffuse_raw, "params", "diffuse",
                               required=(kind != "empty"), default={})
        if not isinstance(params_raw, dict):
            raise MeasureSpecError("diffuse.params", "expected an object")
        params: dict[str, Any] = {}
        if kind in ("uniform", "arcsine"):
            params["lo"] = _spec_number(
                _spec_get(params_raw, "lo", "diffuse.params"),
                "diffuse.params.lo")
            params["hi"] = _spec_number(
                _spec_get(params_raw, "hi", "diffuse.params"),
                "diffuse.params.hi")
        elif kind == "semicircle":
            params["center"] = _spec_number(
                _spec_get(params_raw, "center", "diffuse.params"),
                "diffuse.params.center")
            params["radius"] = _spec_number(
                _spec_get(params_raw, "radius", "diffuse.params"),
                "diffuse.params.radius")
        elif kind == "piecewise_linear_cdf":
            knots_raw = _spec_get(params_raw, "knots", "diffuse.params")
            if not isinstance(knots_raw, list) or len(knots_raw) < 2:
                raise MeasureSpecError("diffuse.params.knots",
                                       "expected a list of >= 2 knots")
            knots = []
            for i, pair in enumerate(knots_raw):
                kp = f"diffuse.params.knots[{i}]"
                if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                    raise MeasureSpecError(kp, "expected [point, cumulative]")
                knots.append((_spec_number(pair[0], f"{kp}[0]"),
                              _spec_number(pair[1], f"{kp}[1]")))
            for i in range(1, len(knots)):
                if knots[i][0] <= knots[i - 1][0]:
                    raise MeasureSpecError(
                        f"diffuse.params.knots[{i}][0]",
                        "knot points must be strictly increasing")
                if knots[i][1] <= knots[i - 1][1]:
                    raise MeasureSpecError(
                        f"diffuse.params.knots[{i}][1]",
                        "knot cumulative masses must be strictly increasing")
            params["knots"] = [list(p) for p in knots]
        diffuse = DiffusePart(kind=kind, mass=mass, params=params)

    family_raw = _spec_get(spec, "atom_family", "", required=False)
    family = None
    family_tol = None
    tail = 0.0
    tail_loc = None
    if family_raw is not None:
        if not isinstance(family_raw, dict):
            raise MeasureSpecError("atom_family", "expected an object")
        name = _spec_get(family_raw, "name", "atom_family")
        if name != "example42":
            raise MeasureSpecError("atom_family.name",
                                   f"unknown family {name!r}")
        tol = _spec_number(_spec_get(family_raw, "tol", "atom_family",
                                     required=False, default=1e-10),
                           "atom_family.tol")
        if tol <= 0:
            raise MeasureSpecError("atom_family.tol", "must be positive")
        if atoms:
            raise MeasureSpecError("atoms", "cannot combine an explicit atom "
                                            "list with atom_family")
        fam_atoms, tail = _expand_example42(tol)
        atoms = list(fam_atoms)
        family = name
        family_tol = tol
        tail_loc = 0.0

    return SpectralMeasure(support=support, atoms=tuple(atoms),
                           diffuse=diffuse, family=family,
                           family_tol=family_tol, truncated_tail=tail,
                           truncated_tail_location=tail_loc)


def measure_to_dict(measure: SpectralMeasure) -> dict:
    """Inverse of measure_from_dict (family measures keep their family form)."""
    out: dict[str, Any] = {"support": [measure.support[0], measure.support[1]]}
    if measure.family is not None:
        out["atom_family"] = {"name": measure.family,
                              "tol": measure.family_tol}
    elif measure.atoms:
        out["atoms"] = [{"location": a.location, "weight": a.weight}
                        for a in measure.atoms]
    if measure.diffuse.kind != "empty":
        out["diffuse"] = {"kind": measure.diffuse.kind,
                          "mass": measure.diffuse.mass,
                          "params": json.loads(json.dumps(measure.diffuse.params))}
    return out


def load_measure(path: str) -> SpectralMeasure:
    """Read a measure-specification JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MeasureSpecError("", f"invalid JSON: {exc}") from exc
    return measure_from_dict(spec)


def dump_measure(measure: SpectralMeasure, path: str) -> None:
    """Write the measure's JSON specification."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(measure_to_dict(measure), fh, indent=2, sort_keys=True)
        fh.write("\n")
