"""Two conditionally solvable model families built from a perturbed drift.

Both families perturb a shape-invariant superpotential Phi by the
logarithmic derivative of an auxiliary function u solving

    u'' + 2 Phi u' - b u = 0,

giving W = Phi + u'/u.  Family A lives on the real line with Phi(x) = x;
Family B on the half line with Phi(x) = x + gamma/x.  For admissible
parameters u stays strictly positive, the partner V+ is an exactly
solvable (radial) oscillator, and the full discrete spectrum plus
eigenfunctions of V- follow in closed form from the supercharge ladder.

Family A has unbroken symmetry (a zero mode exp(-x^2/2)/u exists);
Family B is broken for every admissible parameter choice and its lowest
decay rate 2*gamma + 1 + b/2 tends to zero as b approaches -4*gamma - 2.

All confluent-hypergeometric evaluations are arranged so the series have
positive terms for admissible parameters (the negative-argument calls are
transformed internally), which keeps every closed form here accurate to
near machine precision on the contract windows.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import simpson

from .errors import BoundViolation, ConvergenceError, DomainError, \
    PositivityLoss
from .specfun import hyp1f1, ln_gamma
from .susy_core import DEFAULT_POINTS, Domain, GridFunction, SusyClass, \
    SusyPotential

__all__ = [
    "Family",
    "CesParams",
    "SpectralData",
    "UFunction",
    "beta_bound",
    "validate_params",
    "default_domain",
    "u_function",
    "u_eval",
    "susy_potential",
    "v_plus",
    "v_minus",
    "drift_potential",
    "energy_plus",
    "energy_minus",
    "eigenfunction_plus",
    "eigenfunction_minus",
    "eigenfunction_minus_at",
    "eigenfunction_minus_table",
    "eigenfunction_plus_table",
    "spectral_data",
]


class Family(enum.Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class CesParams:
    """Validated parameters of one solvable system.

    Use :func:`validate_params` to construct; the bounds are not
    re-checked here.  ``beta`` is meaningful for Family A only and
    ``gamma`` for Family B only.
    """

    family: Family
    b: float
    beta: float = 0.0
    gamma: float = 0.0


def beta_bound(b: float) -> float:
    """Largest |beta| keeping u positive for Family A at this b."""
    return 2.0 * math.exp(ln_gamma(b / 4.0 + 1.0) - ln_gamma((b + 2.0) / 4.0))


def validate_params(family, b: float, beta: float = 0.0,
                    gamma: float = 0.0) -> CesParams:
    """Check the solvability bounds and build a parameter set.

    Family A needs b > -2 and |beta| strictly below the positivity
    boundary 2*Gamma(b/4+1)/Gamma((b+2)/4).  Family B needs gamma > 0
    and b > -4*gamma - 2.  Violations raise :class:`BoundViolation`
    carrying the violated bound and its numeric boundary value.
    """
    family = Family(family)
    b = float(b)
    if family is Family.A:
        if b <= -2.0:
            raise BoundViolation("b <= -2", -2.0, b)
        beta = float(beta)
        limit = beta_bound(b)
        if abs(beta) >= limit:
            raise BoundViolation(
                "|beta| >= 2*Gamma(b/4+1)/Gamma((b+2)/4)", limit, beta)
        return CesParams(family=family, b=b, beta=beta)
    gamma = float(gamma)
    if gamma <= 0.0:
        raise BoundViolation("gamma <= 0", 0.0, gamma)
    if b <= -4.0 * gamma - 2.0:
        raise BoundViolation("b <= -4*gamma-2", -4.0 * gamma - 2.0, b)
    return CesParams(family=family, b=b, gamma=gamma)


def default_domain(params: CesParams) -> Domain:
    if params.family is Family.A:
        return Domain.real_line()
    return Domain.half_line()


# ---------------------------------------------------------------------------
# the auxiliary function u

@dataclass(frozen=True)
class UFunction:
    """Evaluator bundle for u, u' and u'/u.

    Positivity over the family's contract window is checked once at
    construction; admissible parameters guarantee it mathematically, so
    a failure signals a corrupted parameter set.
    """

    params: CesParams
    u: Callable[[np.ndarray], np.ndarray]
    u_prime: Callable[[np.ndarray], np.ndarray]
    log_derivative: Callable[[np.ndarray], np.ndarray]


def _u_family_a(params: CesParams):
    b, beta = params.b, params.beta

    def u(x):
        x = np.asarray(x, dtype=float)
        z = -x * x
        val = hyp1f1(-b / 4.0, 0.5, z)
        if beta != 0.0:
            val = val + beta * x * hyp1f1((2.0 - b) / 4.0, 1.5, z)
        return val

    def u_prime(x):
        x = np.asarray(x, dtype=float)
        z = -x * x
        val = b * x * hyp1f1(1.0 - b / 4.0, 1.5, z)
        if beta != 0.0:
            val = (val + beta * hyp1f1((2.0 - b) / 4.0, 1.5, z)
                   - beta * x * x * ((2.0 - b) / 3.0)
                   * hyp1f1((6.0 - b) / 4.0, 2.5, z))
        return val

    def log_derivative(x):
        return u_prime(x) / u(x)

    return u, u_prime, log_derivative


def _u_family_b(params: CesParams):
    # u = 1F1(-b/4, gamma+1/2, -x^2) written in its transformed positive
    # form e^{-x^2} 1F1(a_pos, c, x^2); then u'/(2xu) = (a_pos/c) *
    # F(a_pos+1, c+1, x^2)/F(a_pos, c, x^2) - 1, with no singularity at 0
    b, gamma = params.b, params.gamma
    a_pos = gamma + (b + 2.0) / 4.0
    c = gamma + 0.5

    def u(x):
        x = np.asarray(x, dtype=float)
        z = x * x
        return np.exp(-z) * hyp1f1(a_pos, c, z)

    def _half_log_derivative_over_x(x):
        z = np.asarray(x, dtype=float) ** 2
        return (a_pos / c) * hyp1f1(a_pos + 1.0, c + 1.0, z) \
            / hyp1f1(a_pos, c, z) - 1.0

    def u_prime(x):
        x = np.asarray(x, dtype=float)
        return 2.0 * x * u(x) * _half_log_derivative_over_x(x)

    def log_derivative(x):
        x = np.asarray(x, dtype=float)
        return 2.0 * x * _half_log_derivative_over_x(x)

    return u, u_prime, log_derivative, _half_log_derivative_over_x


@lru_cache(maxsize=128)
def _u_function_cached(params: CesParams) -> UFunction:
    if params.family is Family.A:
        u, up, ld = _u_family_a(params)
    else:
        u, up, ld, _ = _u_family_b(params)
    x = default_domain(params).grid(DEFAULT_POINTS)
    vals = u(x)
    i = int(np.argmin(vals))
    if vals[i] <= 0.0:
        raise PositivityLoss(float(x[i]), float(vals[i]))
    return UFunction(params=params, u=u, u_prime=up, log_derivative=ld)


def u_function(params: CesParams) -> UFunction:
    """Positivity-checked evaluator bundle for u (cached per params)."""
    return _u_function_cached(params)


def u_eval(params: CesParams, x) -> Tuple[np.ndarray, np.ndarray]:
    """u(x) and u'(x); raises PositivityLoss if any u value is <= 0."""
    uf = u_function(params)
    uv = uf.u(x)
    bad = np.asarray(uv <= 0.0)
    if bad.any():
        xa = np.broadcast_to(np.asarray(x, dtype=float), bad.shape)
        i = int(np.argmax(bad))
        raise PositivityLoss(float(xa.flat[i]), float(np.asarray(uv).flat[i]))
    return uv, uf.u_prime(x)


# ---------------------------------------------------------------------------
# superpotential and potentials

def susy_potential(params: CesParams) -> SusyPotential:
    """W = Phi + u'/u with W' taken from the defining equation for u
    (u'' = b u - 2 Phi u', so no numerical differentiation enters)."""
    uf = u_function(params)
    b = params.b
    if params.family is Family.A:
        def w(x):
            x = np.asarray(x, dtype=float)
            return x + uf.log_derivative(x)

        def w_prime(x):
            x = np.asarray(x, dtype=float)
            ld = uf.log_derivative(x)
            return 1.0 + b - 2.0 * x * ld - ld * ld
    else:
        gamma = params.gamma

        def w(x):
            x = np.asarray(x, dtype=float)
            return x + gamma / x + uf.log_derivative(x)

        def w_prime(x):
            x = np.asarray(x, dtype=float)
            ld = uf.log_derivative(x)
            phi = x + gamma / x
            return 1.0 - gamma / (x * x) + b - 2.0 * phi * ld - ld * ld

    return SusyPotential(w=w, w_prime=w_prime, domain=default_domain(params))


def v_plus(params: CesParams, x):
    """Shape-invariant partner: (x^2+b+1)/2 for Family A; the radial
    oscillator x^2/2 + gamma(gamma-1)/(2x^2) + gamma + (b+1)/2 for B."""
    x = np.asarray(x, dtype=float)
    b = params.b
    if params.family is Family.A:
        return 0.5 * (x * x + b + 1.0)
    gamma = params.gamma
    return (0.5 * x * x + 0.5 * gamma * (gamma - 1.0) / (x * x)
            + gamma + 0.5 * (b + 1.0))


def v_minus(params: CesParams, x):
    """The conditionally solvable partner potential."""
    x = np.asarray(x, dtype=float)
    b = params.b
    ld = u_function(params).log_derivative(x)
    if params.family is Family.A:
        return 0.5 * x * x - 0.5 * (b + 1.0) + ld * (2.0 * x + ld)
    gamma = params.gamma
    return (0.5 * x * x + 0.5 * gamma * (gamma + 1.0) / (x * x)
            + gamma - 0.5 * (b + 1.0)
            + ld * (2.0 * x + 2.0 * gamma / x + ld))


def drift_potential(params: CesParams, x):
    """Drift potential U with U' = W.

    Family A: x^2/2 + log u.  Family B uses the cancellation-free form
    -x^2/2 + gamma log x + log 1F1(gamma+(b+2)/4, gamma+1/2, x^2); its
    gamma log x term digs the logarithmic hole at the origin while the
    growth at large x is the oscillator's x^2/2.
    """
    x = np.asarray(x, dtype=float)
    if params.family is Family.A:
        uf = u_function(params)
        return 0.5 * x * x + np.log(uf.u(x))
    gamma = params.gamma
    a_pos = gamma + (params.b + 2.0) / 4.0
    c = gamma + 0.5
    z = x * x
    return -0.5 * z + gamma * np.log(x) + np.log(hyp1f1(a_pos, c, z))


# ---------------------------------------------------------------------------
# spectra

def energy_plus(params: CesParams, n: int) -> float:
    if n < 0 or int(n) != n:
        raise DomainError(f"level index must be a nonnegative integer: {n!r}")
    n = int(n)
    if params.family is Family.A:
        return n + params.b / 2.0 + 1.0
    return 2.0 * n + 2.0 * params.gamma + 1.0 + params.b / 2.0


def energy_minus(params: CesParams, n: int) -> float:
    """Family A: 0, then the partner levels shifted by one (unbroken
    ladder); Family B: equal to the partner levels (broken ladder)."""
    if n < 0 or int(n) != n:
        raise DomainError(f"level index must be a nonnegative integer: {n!r}")
    n = int(n)
    if params.family is Family.A:
        if n == 0:
            return 0.0
        return energy_plus(params, n - 1)
    return energy_plus(params, n)


# ---------------------------------------------------------------------------
# eigenfunctions

def _simpson_norm(values: np.ndarray, x: np.ndarray) -> float:
    """sqrt of the L2 integral with a coarse-grid consistency check."""
    full = float(simpson(values * values, x=x))
    half = float(simpson(values[::2] * values[::2], x=x[::2]))
    if full <= 0.0 or abs(full - half) > 1e-6 * full + 1e-300:
        raise ConvergenceError(
            f"quadrature for the norm has not converged "
            f"(fine {full!r} vs coarse {half!r})")
    return math.sqrt(full)


def _oscillator_ladder(x: np.ndarray, n_max: int) -> np.ndarray:
    """Orthonormal oscillator eigenfunctions phi_0..phi_{n_max} at x."""
    phi = np.empty((n_max + 1, x.size))
    phi[0] = math.pi ** -0.25 * np.exp(-x * x / 2.0)
    if n_max >= 1:
        phi[1] = math.sqrt(2.0) * x * phi[0]
    for k in range(1, n_max):
        phi[k + 1] = (math.sqrt(2.0 / (k + 1)) * x * phi[k]
                      - math.sqrt(k / (k + 1.0)) * phi[k - 1])
    return phi


def _laguerre_ladder(z: np.ndarray, alpha: float, n_max: int) -> np.ndarray:
    lag = np.empty((n_max + 1, z.size))
    lag[0] = 1.0
    if n_max >= 1:
        lag[1] = 1.0 + alpha - z
    for k in range(1, n_max):
        lag[k + 1] = ((2.0 * k + 1.0 + alpha - z) * lag[k]
                      - (k + alpha) * lag[k - 1]) / (k + 1.0)
    return lag


def _resolve_grid(params: CesParams, domain: Optional[Domain],
                  n_points: int) -> Tuple[Domain, np.ndarray]:
    dom = domain or default_domain(params)
    return dom, dom.grid(n_points)


@lru_cache(maxsize=64)
def _plus_table_cached(params: CesParams, n_max: int, domain: Domain,
                       n_points: int) -> np.ndarray:
    _, x = _resolve_grid(params, domain, n_points)
    if params.family is Family.A:
        phi = _oscillator_ladder(x, n_max)
        phi.flags.writeable = False
        return phi
    gamma = params.gamma
    z = x * x
    lag = _laguerre_ladder(z, gamma - 0.5, n_max)
    base = np.exp(gamma * np.log(x) - 0.5 * z)
    out = np.empty_like(lag)
    for n in range(n_max + 1):
        ln_pref = 0.5 * (math.log(2.0) + ln_gamma(n + 1.0)
                         - ln_gamma(n + gamma + 0.5))
        out[n] = math.exp(ln_pref) * base * lag[n]
    out.flags.writeable = False
    return out


def _minus_rows_raw(params: CesParams, n_max: int, x: np.ndarray) -> np.ndarray:
    """Un-normalized closed-form rows 0..n_max at arbitrary points."""
    uf = u_function(params)
    b = params.b
    out = np.empty((n_max + 1, x.size))
    if params.family is Family.A:
        phi = _oscillator_ladder(x, max(n_max, 1))
        ld = uf.log_derivative(x)
        out[0] = np.exp(-x * x / 2.0) / uf.u(x)
        for n in range(1, n_max + 1):
            m = n - 1
            e_plus = m + b / 2.0 + 1.0
            out[n] = (math.sqrt((m + 1.0) / e_plus) * phi[m + 1]
                      + ld * phi[m] / math.sqrt(2.0 * e_plus))
    else:
        gamma = params.gamma
        z = x * x
        lag_hi = _laguerre_ladder(z, gamma + 0.5, n_max)
        lag_lo = _laguerre_ladder(z, gamma - 0.5, n_max)
        # u'/(2xu), finite down to the origin
        _, _, _, half_ld = _u_family_b(params)
        s = half_ld(x)
        base = np.exp((gamma + 1.0) * np.log(x) - 0.5 * z)
        for n in range(n_max + 1):
            ln_pref = 0.5 * (math.log(2.0) + ln_gamma(n + 1.0)
                             - ln_gamma(n + gamma + 0.5)
                             - math.log(n + gamma + 0.5 + b / 4.0))
            out[n] = math.exp(ln_pref) * base * (lag_hi[n] + s * lag_lo[n])
    return out


@lru_cache(maxsize=64)
def _contract_norms_cached(params: CesParams, n_max: int) -> Tuple[float, ...]:
    x = default_domain(params).grid(DEFAULT_POINTS)
    raw = _minus_rows_raw(params, n_max, x)
    return tuple(_simpson_norm(row, x) for row in raw)


@lru_cache(maxsize=64)
def _minus_table_cached(params: CesParams, n_max: int, domain: Domain,
                        n_points: int) -> np.ndarray:
    _, x = _resolve_grid(params, domain, n_points)
    out = _minus_rows_raw(params, n_max, x)
    for n in range(n_max + 1):
        out[n] /= _simpson_norm(out[n], x)
    out.flags.writeable = False
    return out


def eigenfunction_minus_at(params: CesParams, n_max: int, x) -> np.ndarray:
    """Rows 0..n_max evaluated at arbitrary points.

    Normalization constants are the ones from the family's contract
    window, so values here agree with the default-grid table wherever
    the points coincide.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max!r}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rows = _minus_rows_raw(params, int(n_max), x)
    norms = np.asarray(_contract_norms_cached(params, int(n_max)))
    return rows / norms[:, None]


def eigenfunction_plus_table(params: CesParams, n_max: int,
                             domain: Optional[Domain] = None,
                             n_points: int = DEFAULT_POINTS) -> np.ndarray:
    """Rows 0..n_max of the partner eigenfunctions on the grid."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max!r}")
    dom = domain or default_domain(params)
    return _plus_table_cached(params, int(n_max), dom, int(n_points))


def eigenfunction_minus_table(params: CesParams, n_max: int,
                              domain: Optional[Domain] = None,
                              n_points: int = DEFAULT_POINTS) -> np.ndarray:
    """Rows 0..n_max of the normalized eigenfunctions of the perturbed
    system, built through the supercharge ladder."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max!r}")
    dom = domain or default_domain(params)
    return _minus_table_cached(params, int(n_max), dom, int(n_points))


_MAX_LEVEL = 50


def eigenfunction_plus(params: CesParams, n: int,
                       domain: Optional[Domain] = None,
                       n_points: int = DEFAULT_POINTS) -> GridFunction:
    """Closed-form partner eigenfunction, L2-normalized analytically."""
    if n < 0 or n > _MAX_LEVEL:
        raise DomainError(f"level index must lie in [0, {_MAX_LEVEL}]: {n!r}")
    dom = domain or default_domain(params)
    table = _plus_table_cached(params, int(n), dom, int(n_points))
    return GridFunction(dom, table[int(n)])


def eigenfunction_minus(params: CesParams, n: int,
                        domain: Optional[Domain] = None,
                        n_points: int = DEFAULT_POINTS) -> GridFunction:
    """Eigenfunction of the perturbed system at level n.

    Defined through the supercharge ladder applied to the closed-form
    partner states (Family A level 0 is the zero mode exp(-x^2/2)/u),
    then normalized by quadrature.
    """
    if n < 0 or n > _MAX_LEVEL:
        raise DomainError(f"level index must lie in [0, {_MAX_LEVEL}]: {n!r}")
    dom = domain or default_domain(params)
    table = _minus_table_cached(params, int(n), dom, int(n_points))
    return GridFunction(dom, table[int(n)])


# ---------------------------------------------------------------------------
# bundled spectral view

@dataclass(frozen=True)
class SpectralData:
    """Spectrum and eigenfunction access for one parameter set."""

    params: CesParams
    susy_class: SusyClass
    energies_minus: Tuple[float, ...]
    energies_plus: Tuple[float, ...]
    psi_minus: Callable[[int], GridFunction]
    psi_plus: Callable[[int], GridFunction]


def spectral_data(params: CesParams, n_max: int = 10,
                  domain: Optional[Domain] = None,
                  n_points: int = DEFAULT_POINTS) -> SpectralData:
    cls = SusyClass.UNBROKEN if params.family is Family.A \
        else SusyClass.BROKEN
    return SpectralData(
        params=params,
        susy_class=cls,
        energies_minus=tuple(energy_minus(params, n)
                             for n in range(n_max + 1)),
        energies_plus=tuple(energy_plus(params, n)
                            for n in range(n_max + 1)),
        psi_minus=lambda n: eigenfunction_minus(params, n, domain, n_points),
        psi_plus=lambda n: eigenfunction_plus(params, n, domain, n_points),
    )
