"""Transition densities, stationary laws and decay data for the drift W.

The overdamped dynamics dX = -U'(X) dt + dB (diffusion constant 1/2)
has a transition density expandable in the eigenpairs of the partner
Hamiltonian carrying the drift:

    m_t(x, x0) = e^{U(x0) - U(x)} sum_n e^{-t E_n} psi_n(x) psi_n(x0).

With unbroken symmetry (real-line family) the n=0 term is the
time-independent stationary density [psi_0(x)]^2 and the sum over n >= 1
describes relaxation towards it.  With broken symmetry (half-line
family) every eigenvalue is positive: there is no stationary law, total
mass decays like e^{-t E_0} as probability drains through the origin,
and E_0 = 2*gamma + 1 + b/2 is the smallest decay rate.

Inverting the drift U -> -U swaps the partner Hamiltonians, so the
inverted system relaxes with the partner spectrum; for the broken family
the two spectra coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .ces_families import (
    CesParams,
    Family,
    default_domain,
    drift_potential,
    eigenfunction_minus,
    eigenfunction_minus_at,
    eigenfunction_minus_table,
    energy_minus,
    energy_plus,
    susy_potential,
    validate_params,
)
from .errors import DomainError, NotStationaryError, TruncationFailure
from .susy_core import DEFAULT_POINTS, Domain, GridFunction

__all__ = [
    "TransitionDensity",
    "StationaryDensity",
    "build_transition_density",
    "transition_density",
    "stationary_density",
    "decay_spectrum",
    "inverted_drift_spectrum",
    "metastability_scan",
    "metastability_crossover",
]

_MODE_CAP = 200
_SCAN_POINTS = 16001


def _level_spacing(params: CesParams) -> float:
    return 1.0 if params.family is Family.A else 2.0


def _first_sum_level(params: CesParams) -> int:
    # the unbroken zero mode sits outside the decaying sum
    return 1 if params.family is Family.A else 0


@dataclass(frozen=True)
class TransitionDensity:
    """Spectral transition density at one fixed time.

    ``truncation_n`` is the highest level kept in the decaying sum and
    ``tail_bound`` the geometric estimate of everything discarded.
    Evaluation accepts scalars or arrays in ``x`` with a scalar ``x0``.
    """

    params: CesParams
    t: float
    truncation_n: int
    tail_bound: float

    def evaluate(self, x, x0: float):
        params = self.params
        scalar = np.isscalar(x) or np.asarray(x).ndim == 0
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        x0 = float(x0)
        if params.family is Family.B and (x0 <= 0.0 or np.any(x_arr <= 0.0)):
            raise DomainError("half-line density needs x, x0 > 0")
        lo = _first_sum_level(params)
        rows_x = eigenfunction_minus_at(params, self.truncation_n, x_arr)
        rows_0 = eigenfunction_minus_at(params, self.truncation_n,
                                        np.array([x0]))[:, 0]
        energies = np.array([energy_minus(params, n)
                             for n in range(self.truncation_n + 1)])
        weights = np.exp(-self.t * energies[lo:]) * rows_0[lo:]
        total = weights @ rows_x[lo:]
        # single exponential keeps the prefactor finite even when the
        # two drift values are individually huge
        pref = np.exp(float(drift_potential(params, x0))
                      - drift_potential(params, x_arr))
        out = pref * total
        if params.family is Family.A:
            out = out + rows_x[0] ** 2
        return float(out[0]) if scalar else out

    def mass(self, x0: float, n_points: int = DEFAULT_POINTS) -> float:
        """Quadrature of the density over the contract window."""
        from scipy.integrate import simpson
        x = default_domain(self.params).grid(n_points)
        return float(simpson(self.evaluate(x, x0), x=x))


def _mode_sup_sq(params: CesParams, n_max: int) -> np.ndarray:
    table = eigenfunction_minus_table(params, n_max)
    return np.max(np.abs(table), axis=1) ** 2


def build_transition_density(params: CesParams, t: float,
                             tol: float = 1e-8) -> TransitionDensity:
    """Pick the spectral truncation for time t and package the density.

    Levels are added until their sup-norm-bounded terms stay below the
    tolerance for three consecutive levels and the geometric tail
    estimate is within ``tol``; if 200 levels cannot achieve that the
    spectral route refuses (small t belongs to the PDE oracle instead).
    """
    if t <= 0.0:
        raise DomainError(f"time must be positive, got {t!r}")
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    ratio = math.exp(-t * _level_spacing(params))
    geometric = 1.0 / (1.0 - ratio)
    threshold = min(tol / 10.0, tol / (3.0 * geometric))
    lo = _first_sum_level(params)

    consecutive = 0
    n = lo
    chosen: Optional[int] = None
    last_term = math.inf
    for cap in (16, 32, 64, 128, _MODE_CAP):
        sup_sq = _mode_sup_sq(params, cap)
        while n <= cap:
            last_term = math.exp(-t * energy_minus(params, n)) * sup_sq[n]
            consecutive = consecutive + 1 if last_term < threshold else 0
            if consecutive >= 3:
                chosen = n
                break
            n += 1
        if chosen is not None:
            break
    if chosen is None:
        reachable = last_term * geometric
        raise TruncationFailure(tol, reachable, _MODE_CAP)

    sup_sq = _mode_sup_sq(params, chosen)
    tail = math.exp(-t * (energy_minus(params, chosen)
                          + _level_spacing(params))) \
        * sup_sq[chosen] * geometric
    return TransitionDensity(params=params, t=float(t), truncation_n=chosen,
                             tail_bound=tail)


def transition_density(params: CesParams, t: float, x, x0: float,
                       tol: float = 1e-8):
    """Density of being at x at time t having started from x0."""
    return build_transition_density(params, t, tol).evaluate(x, x0)


@dataclass(frozen=True)
class StationaryDensity:
    """Long-time law of the unbroken system: the squared zero mode."""

    params: CesParams
    density: Callable[[np.ndarray], np.ndarray]

    def on_grid(self, n_points: int = DEFAULT_POINTS) -> GridFunction:
        dom = default_domain(self.params)
        return GridFunction(dom, self.density(dom.grid(n_points)))


def stationary_density(params: CesParams) -> StationaryDensity:
    if params.family is not Family.A:
        raise NotStationaryError(
            "broken symmetry admits no stationary density; total mass "
            "decays at rate "
            f"{energy_minus(params, 0)!r}")

    def density(x):
        return eigenfunction_minus_at(params, 0, x)[0] ** 2

    return StationaryDensity(params=params, density=density)


def decay_spectrum(params: CesParams,
                   count: int) -> List[Tuple[float, GridFunction]]:
    """The ``count`` slowest decay rates with their spatial modes."""
    if count < 1 or count > 50:
        raise DomainError(f"count must lie in [1, 50], got {count!r}")
    lo = _first_sum_level(params)
    return [(energy_minus(params, n), eigenfunction_minus(params, n))
            for n in range(lo, lo + count)]


def inverted_drift_spectrum(params: CesParams, count: int) -> List[float]:
    """Decay rates after flipping the drift potential's sign.

    The inversion swaps the partner Hamiltonians, so these are the
    partner levels: for the unbroken family exactly the original
    nonzero rates (the zero mode has no partner image), for the broken
    family the same rates again.
    """
    if count < 1 or count > 50:
        raise DomainError(f"count must lie in [1, 50], got {count!r}")
    return [energy_plus(params, n) for n in range(count)]


def _sign_change_scan(w_values: np.ndarray,
                      x: np.ndarray) -> List[Tuple[int, int]]:
    s = np.sign(w_values)
    idx = np.nonzero(s[:-1] * s[1:] < 0.0)[0]
    return [(int(i), int(np.sign(w_values[i + 1]))) for i in idx]


def _refine_root(w: Callable[[float], float], lo: float, hi: float) -> float:
    f_lo = w(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = w(mid)
        if f_mid == 0.0 or hi - lo < 1e-12:
            return mid
        if (f_lo < 0.0) == (f_mid < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def metastability_scan(gamma: float, b_grid: Sequence[float]
                       ) -> List[Tuple[float, bool, Optional[float]]]:
    """Classify drift landscapes along b at fixed gamma.

    For each b the superpotential W = U' is scanned for sign changes on
    the half line.  A downward crossing is a local maximum of U and an
    upward one a local minimum; having both makes the landscape
    metastable (a well behind a barrier), no crossing at all leaves a
    monotone, unstable landscape.  Returns (b, has_local_minimum,
    location of the minimum or None).
    """
    dom = Domain.half_line()
    x = dom.grid(_SCAN_POINTS)
    out: List[Tuple[float, bool, Optional[float]]] = []
    for b in b_grid:
        params = validate_params(Family.B, float(b), gamma=gamma)
        pot = susy_potential(params)
        w_vals = np.asarray(pot.w(x))
        crossings = _sign_change_scan(w_vals, x)
        ups = [i for i, direction in crossings if direction > 0]
        downs = [i for i, direction in crossings if direction < 0]
        if ups and downs:
            i = ups[-1]
            loc = _refine_root(lambda v: float(pot.w(v)), x[i], x[i + 1])
            out.append((float(b), True, loc))
        else:
            out.append((float(b), False, None))
    return out


def metastability_crossover(gamma: float, b_lo: float, b_hi: float,
                            tol: float = 1e-6) -> float:
    """Locate the b where the local minimum disappears, by bisection.

    ``b_lo`` must classify as metastable and ``b_hi`` as not (or the
    other way round).
    """

    def is_metastable(b):
        return metastability_scan(gamma, [b])[0][1]

    lo_state = is_metastable(b_lo)
    if lo_state == is_metastable(b_hi):
        raise DomainError(
            "bracket endpoints classify identically; no crossover inside")
    lo, hi = float(b_lo), float(b_hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_metastable(mid) == lo_state:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
