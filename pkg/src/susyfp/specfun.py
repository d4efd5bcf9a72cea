"""Scalar special functions backing the solvable-model construction.

The four building blocks are the confluent hypergeometric function, the
physicists' Hermite polynomials, the generalized Laguerre polynomials and
the log-gamma function.  They are implemented directly (power series and
three-term recurrences) rather than delegated, so that every digit the
rest of the package relies on is produced by code validated against the
exact-rational oracles in the test suite.

All routines accept scalars or ndarrays for the continuous argument and
return a matching shape.  Scalar calls run on plain floats (cheap enough
for randomized test batteries); array calls vectorize over the argument.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError, DomainError, OverflowRangeError

# Series stopping rule: a term must fall below _SERIES_EPS times the
# current partial sum for _SERIES_CONSEC consecutive terms.  1e-17 is
# below double rounding, so the sum has saturated when this fires.
_SERIES_EPS = 1e-17
_SERIES_CONSEC = 3
_SERIES_MAX_TERMS = 2000


def _is_nonpositive_integer(a: float) -> bool:
    return a <= 0.0 and float(a) == math.floor(a)


# ---------------------------------------------------------------------------
# scalar engine

def _series_1f1_s(a: float, b: float, z: float) -> float:
    # same association order as the array engine so both give identical bits
    term = 1.0
    total = 1.0
    settled = 0
    for k in range(_SERIES_MAX_TERMS):
        term = term * ((a + k) / (b + k)) * z / (k + 1.0)
        total = total + term
        if not math.isfinite(total):
            raise OverflowRangeError(
                f"1F1 sum overflows float range (a={a!r}, b={b!r}, z={z!r})")
        if abs(term) < _SERIES_EPS * abs(total):
            settled += 1
            if settled >= _SERIES_CONSEC:
                return total
        else:
            settled = 0
    raise ConvergenceError(
        f"1F1 series did not settle within {_SERIES_MAX_TERMS} terms "
        f"(a={a!r}, b={b!r}, z={z!r})")


def _polynomial_1f1_s(a: float, b: float, z: float) -> float:
    term = 1.0
    total = 1.0
    for k in range(int(round(-a))):
        term = term * ((a + k) / (b + k)) * z / (k + 1.0)
        total = total + term
    return total


def _recurrence_down_in_a_s(a: float, b: float, z: float) -> float:
    m = int(math.ceil(-a))
    a0 = a + m
    if b == a0:
        # the contiguous relation degenerates (division by b - a0); this
        # exact-alignment line falls back to the alternating series
        return _series_1f1_s(a, b, z)
    if a0 == 0.0:
        cur, nxt = 1.0, _series_1f1_s(1.0, b, z)
    else:
        cur, nxt = _series_1f1_s(a0, b, z), _series_1f1_s(a0 + 1.0, b, z)
    ak = a0
    for _ in range(m):
        cur, nxt = ((b - 2.0 * ak - z) * cur + ak * nxt) / (b - ak), cur
        ak -= 1.0
    return cur


def _eval_nonneg_z_s(a: float, b: float, z: float) -> float:
    if a >= 0.0:
        return 1.0 if a == 0.0 else _series_1f1_s(a, b, z)
    if z == 0.0:
        return 1.0
    return _recurrence_down_in_a_s(a, b, z)


def _hyp1f1_s(a: float, b: float, z: float) -> float:
    if z < 0.0:
        if _is_nonpositive_integer(a):
            # terminating series in the original variable: for z < 0 the
            # finite sum has all-positive terms, which beats transforming
            return _polynomial_1f1_s(a, b, z)
        return math.exp(z) * _eval_nonneg_z_s(b - a, b, -z)
    return _eval_nonneg_z_s(a, b, z)


# ---------------------------------------------------------------------------
# array engine (same algorithm, vectorized over z)

def _series_1f1(a: float, b: float, z: np.ndarray) -> np.ndarray:
    term = np.ones_like(z)
    total = np.ones_like(z)
    settled = np.zeros(z.shape, dtype=np.int64)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(_SERIES_MAX_TERMS):
            term = term * ((a + k) / (b + k)) * z / (k + 1.0)
            total = total + term
            if not np.isfinite(total).all():
                raise OverflowRangeError(
                    f"1F1 sum overflows float range (a={a!r}, b={b!r}, "
                    f"max|z|={float(np.max(np.abs(z)))!r})")
            below = np.abs(term) < _SERIES_EPS * np.abs(total)
            settled = np.where(below, settled + 1, 0)
            if settled.min() >= _SERIES_CONSEC:
                return total
    raise ConvergenceError(
        f"1F1 series did not settle within {_SERIES_MAX_TERMS} terms "
        f"(a={a!r}, b={b!r}, max|z|={float(np.max(np.abs(z)))!r})")


def _polynomial_1f1(a: float, b: float, z: np.ndarray) -> np.ndarray:
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(int(round(-a))):
        term = term * ((a + k) / (b + k)) * z / (k + 1.0)
        total = total + term
    return total


def _recurrence_down_in_a(a: float, b: float, z: np.ndarray) -> np.ndarray:
    m = int(math.ceil(-a))
    a0 = a + m
    if b == a0:
        return _series_1f1(a, b, z)
    if a0 == 0.0:
        cur, nxt = np.ones_like(z), _series_1f1(1.0, b, z)
    else:
        cur, nxt = _series_1f1(a0, b, z), _series_1f1(a0 + 1.0, b, z)
    ak = a0
    for _ in range(m):
        cur, nxt = ((b - 2.0 * ak - z) * cur + ak * nxt) / (b - ak), cur
        ak -= 1.0
    return cur


def _eval_nonneg_z(a: float, b: float, z: np.ndarray) -> np.ndarray:
    if a >= 0.0:
        return np.ones_like(z) if a == 0.0 else _series_1f1(a, b, z)
    if np.all(z == 0.0):
        return np.ones_like(z)
    return _recurrence_down_in_a(a, b, z)


# ---------------------------------------------------------------------------
# public surface

def hyp1f1(a: float, b: float, z):
    """Confluent hypergeometric function 1F1(a; b; z).

    Negative arguments are always evaluated through the Kummer
    transformation 1F1(a;b;z) = e^z 1F1(b-a;b;-z), so every series this
    routine sums has a non-negative argument.  Whenever the effective
    upper parameter is non-negative the terms are same-signed and the sum
    is stable; a negative effective upper parameter (including the
    terminating polynomial case at positive argument) is routed through
    a downward recurrence in ``a`` instead of the alternating series.

    Accuracy: better than 1e-12 relative whenever the evaluation reduces
    to a same-sign series or a terminating sum at non-positive argument,
    which covers every call the model families in this package generate
    (effective upper parameter >= 0 after the transformation).  In the
    genuinely alternating corner -- non-integer a < 0 with z > 0, or its
    Kummer mirror a > b with z < 0 -- the recurrence is reliable only for
    small |a| shifts; measured accuracy is ~1e-9 at |z| <= 10 for a down
    to -50, degrading beyond |z| ~ 40 where a stable evaluation would
    need large-parameter asymptotics that are out of scope here.
    """
    if _is_nonpositive_integer(b):
        raise DomainError(f"hyp1f1 pole: b={b!r} is a non-positive integer")
    if np.isscalar(z) or np.ndim(z) == 0:
        out = _hyp1f1_s(a, b, float(z))
        if not math.isfinite(out):
            raise OverflowRangeError(
                f"hyp1f1 left the representable range (a={a!r}, b={b!r}, z={z!r})")
        return out
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    neg = z < 0.0
    if neg.any():
        if _is_nonpositive_integer(a):
            out[neg] = _polynomial_1f1(a, b, z[neg])
        else:
            zn = -z[neg]
            out[neg] = np.exp(-zn) * _eval_nonneg_z(b - a, b, zn)
    if (~neg).any():
        out[~neg] = _eval_nonneg_z(a, b, z[~neg])
    if not np.all(np.isfinite(out)):
        raise OverflowRangeError(
            f"hyp1f1 left the representable range (a={a!r}, b={b!r})")
    return out


def hyp1f1_z_derivative(a: float, b: float, z):
    """d/dz 1F1(a; b; z) = (a/b) 1F1(a+1; b+1; z)."""
    if _is_nonpositive_integer(b):
        raise DomainError(f"hyp1f1 pole: b={b!r} is a non-positive integer")
    return (a / b) * hyp1f1(a + 1.0, b + 1.0, z)


def hermite_h(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by upward recurrence.

    H_{n+1} = 2x H_n - 2n H_{n-1}; exact in float arithmetic while the
    values stay below 2**53, and within a few dozen ulp thereafter.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"hermite_h needs integer n >= 0, got {n!r}")
    n = int(n)
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h_prev = np.ones_like(x)
    if n == 0:
        return float(h_prev[0]) if scalar else h_prev
    h_cur = 2.0 * x
    for k in range(1, n):
        h_prev, h_cur = h_cur, 2.0 * x * h_cur - 2.0 * k * h_prev
    return float(h_cur[0]) if scalar else h_cur


def laguerre_l(n: int, alpha: float, x):
    """Generalized Laguerre polynomial L_n^(alpha)(x) by upward recurrence.

    (n+1) L_{n+1} = (2n+1+alpha-x) L_n - (n+alpha) L_{n-1}.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"laguerre_l needs integer n >= 0, got {n!r}")
    if alpha <= -1.0:
        raise DomainError(f"laguerre_l needs alpha > -1, got {alpha!r}")
    n = int(n)
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    l_prev = np.ones_like(x)
    if n == 0:
        return float(l_prev[0]) if scalar else l_prev
    l_cur = 1.0 + alpha - x
    for k in range(1, n):
        l_prev, l_cur = l_cur, ((2.0 * k + 1.0 + alpha - x) * l_cur
                                - (k + alpha) * l_prev) / (k + 1.0)
    return float(l_cur[0]) if scalar else l_cur


# Lanczos approximation of log-gamma with g = 7 and the standard 9-term
# coefficient set (Godfrey's double-precision fit of the Lanczos (1964)
# scheme; the same table appears throughout the numerical literature).
# Relative error is below 1e-13 across the positive axis.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.91893853320467274178  # log(sqrt(2*pi))


def _lanczos_ln_gamma(x: np.ndarray) -> np.ndarray:
    # valid for x >= 0.5
    acc = np.full_like(x, _LANCZOS_COEF[0])
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc = acc + c / (x - 1.0 + i)
    t = x + _LANCZOS_G - 0.5
    return _HALF_LOG_2PI + (x - 0.5) * np.log(t) - t + np.log(acc)


def ln_gamma(x):
    """log Gamma(x) for x > 0.

    Arguments below 0.5 are lifted with log Gamma(x) = log Gamma(x+1) -
    log x so the Lanczos kernel only ever runs in its well-conditioned
    range.
    """
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0.0):
        raise DomainError("ln_gamma requires x > 0")
    small = x < 0.5
    shifted = np.where(small, x + 1.0, x)
    out = _lanczos_ln_gamma(shifted)
    out = np.where(small, out - np.log(np.where(small, x, 1.0)), out)
    return float(out[0]) if scalar else out
