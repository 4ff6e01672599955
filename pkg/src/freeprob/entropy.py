"""Free entropy, free Hausdorff dimension, and entropy sandwich bounds.

For a selfadjoint variable with spectral measure mu = sigma + nu (atom
weights c_i), everything here is closed-form arithmetic on top of the
logarithmic energy E:

* chi = E + 3/4 + (1/2) log(2 pi), with any atom forcing -inf through
  its diagonal self-pair.
* alpha = 1 - sum c_i^2, the free Hausdorff dimension.
* The free Hausdorff entropy of exponent alpha is not computable, but it
  is sandwiched: E - alpha log 2 - (1/2) log(288 e) + 3/4 from below and
  E + log 16 + 1/4 from above; the gap is a constant depending only on
  alpha.
* For families of n variables the same sandwich holds with aggregated
  constants K1, K2 around the summed energies.

All constants are evaluated from closed forms in double precision, never
from truncated decimal literals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .energy import EnergyResult, offdiag_energy
from .measures import SpectralMeasure

__all__ = [
    "EntropyBounds",
    "FamilyBounds",
    "free_hausdorff_dimension",
    "dimension_truncation_bound",
    "chi",
    "h1_identity",
    "hausdorff_entropy_bounds",
    "free_family_bounds",
    "family_constants",
    "sandwich_width",
    "CHI_SHIFT",
    "UPPER_SHIFT",
    "HALF_LOG_288E",
    "DIM_ONE_SHIFT",
    "FORMULAS",
]

CHI_SHIFT = 0.75 + 0.5 * math.log(2.0 * math.pi)
UPPER_SHIFT = math.log(16.0) + 0.25
HALF_LOG_288E = 0.5 * (math.log(288.0) + 1.0)
DIM_ONE_SHIFT = 0.5 * (math.log(2.0) - 1.0 - math.log(math.pi))

# formula provenance strings for machine-readable reports
FORMULAS = {
    "alpha": "alpha = 1 - sum(c_i^2)",
    "chi": "chi = E + 3/4 + (1/2) log(2 pi)",
    "h1": "H^1 = chi + (1/2) log(2 / (pi e))",
    "upper": "upper = E + log 16 + 1/4",
    "lower": "lower = E - alpha log 2 - (1/2) log(288 e) + 3/4",
    "k1": "K1 = -(n/2) log(288 e) + 3n/4 - beta log 2",
    "k2": "K2 = n log(16 sqrt(n)) + n/4",
    "width": "upper - lower = log 16 + 1/4 + alpha log 2 + (1/2) log(288 e) - 3/4",
}


@dataclass(frozen=True)
class EntropyBounds:
    """Two-sided bounds on the free Hausdorff entropy of exponent alpha.

    ``alpha`` is the measure's free Hausdorff dimension, ``energy`` the
    full off-diagonal energy result the bounds are built from.  Both
    endpoints are -inf when the energy is.
    """

    alpha: float
    energy: EnergyResult
    lower: float
    upper: float


@dataclass(frozen=True)
class FamilyBounds:
    """Entropy sandwich for a free family of n variables.

    ``alphas`` are the per-variable dimensions, ``beta`` their sum; the
    bounds are sum(E_i) + K1 and sum(E_i) + K2.
    """

    alphas: tuple[float, ...]
    beta: float
    energies: tuple[EnergyResult, ...]
    k1: float
    k2: float
    lower: float
    upper: float


def free_hausdorff_dimension(measure: SpectralMeasure) -> float:
    """alpha = 1 - sum of squared atom weights (1 for diffuse measures).

    Only explicitly represented atoms count; mass in a truncated family
    tail shifts the true value down by at most
    ``dimension_truncation_bound(measure)``.
    """
    return 1.0 - math.fsum(a.weight * a.weight for a in measure.atoms)


def dimension_truncation_bound(measure: SpectralMeasure) -> float:
    """Upper bound on the dimension mass missed by tail truncation.

    The dropped atoms' squared weights sum to at most the squared tail
    mass, so the true dimension lies within [alpha - bound, alpha].
    """
    return measure.truncated_tail ** 2


def chi(measure: SpectralMeasure, tol: float = 1e-6) -> float:
    """Free entropy: full-plane log energy plus 3/4 + (1/2) log(2 pi).

    Any atomic mass (including a truncated family tail) makes the
    diagonal contribute weight^2 * log 0, so the result is -inf without
    any quadrature.  Callers who need convergence diagnostics should use
    offdiag_energy directly; this returns the best estimate even when
    the quadrature reports non-convergence.
    """
    if measure.atoms or measure.truncated_tail > 0.0:
        return -math.inf
    return offdiag_energy(measure, tol).value + CHI_SHIFT


def h1_identity(measure: SpectralMeasure, tol: float = 1e-6) -> float:
    """Exact dimension-one entropy: chi + (1/2) log(2 / (pi e)).

    For atomless measures this is the exact free Hausdorff entropy at
    exponent 1 and must fall inside the sandwich of
    ``hausdorff_entropy_bounds``; with atoms it is -inf like chi.
    """
    return chi(measure, tol) + DIM_ONE_SHIFT


def sandwich_width(alpha: float) -> float:
    """upper - lower: log 16 + 1/4 + alpha log 2 + (1/2) log(288 e) - 3/4."""
    return UPPER_SHIFT + alpha * math.log(2.0) + HALF_LOG_288E - 0.75


def hausdorff_entropy_bounds(measure: SpectralMeasure, tol: float = 1e-6, *,
                             energy: EnergyResult | None = None) -> EntropyBounds:
    """Sandwich the exponent-alpha free Hausdorff entropy around E.

    Pass a precomputed ``energy`` result to skip the quadrature.
    """
    alpha = free_hausdorff_dimension(measure)
    if energy is None:
        energy = offdiag_energy(measure, tol)
    e = energy.value
    if e == -math.inf:
        lower = upper = -math.inf
    else:
        upper = e + UPPER_SHIFT
        lower = e - alpha * math.log(2.0) - HALF_LOG_288E + 0.75
    return EntropyBounds(alpha=alpha, energy=energy, lower=lower, upper=upper)


def family_constants(alphas: Sequence[float]) -> tuple[float, float]:
    """(K1, K2) for a family with the given per-variable dimensions."""
    n = len(alphas)
    beta = math.fsum(alphas)
    k1 = -0.5 * n * (math.log(288.0) + 1.0) + 0.75 * n - beta * math.log(2.0)
    k2 = n * math.log(16.0 * math.sqrt(n)) + 0.25 * n
    return k1, k2


def free_family_bounds(measures: Iterable[SpectralMeasure],
                       tol: float = 1e-6, *,
                       energies: Sequence[EnergyResult] | None = None) -> FamilyBounds:
    """Entropy sandwich for n jointly free variables.

    Freeness is the caller's assertion; the computation only needs the
    marginal measures.  With n = 1 this reproduces
    ``hausdorff_entropy_bounds`` exactly.  Precomputed per-variable
    ``energies`` (in the same order) skip the quadratures.
    """
    measures = list(measures)
    if not measures:
        raise ValueError("free_family_bounds needs at least one measure")
    alphas = tuple(free_hausdorff_dimension(m) for m in measures)
    if energies is None:
        energies = tuple(offdiag_energy(m, tol) for m in measures)
    else:
        energies = tuple(energies)
        if len(energies) != len(measures):
            raise ValueError("energies must match measures one to one")
    k1, k2 = family_constants(alphas)
    e_sum = math.fsum(r.value for r in energies)
    return FamilyBounds(alphas=alphas, beta=math.fsum(alphas),
                        energies=energies, k1=k1, k2=k2,
                        lower=e_sum + k1, upper=e_sum + k2)
