"""Brute-force checks: grid eigensolver, PDE evolution, SDE sampling.

Everything here is deliberately independent of the closed forms: the
eigensolver knows only a potential on a grid, the evolver only a drift,
the sampler only increments.  Their sole job is to confirm (or refute)
the analytic layer, so they favor plain, well-understood second-order
methods whose error behavior is easy to reason about.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import solve_banded

from .errors import BlowUpError, DomainError, GridMismatchError, \
    MassLossError
from .susy_core import Domain, DomainKind, GridFunction

__all__ = [
    "Boundary",
    "Scheme",
    "TridiagonalOperator",
    "McConfig",
    "discretize_hamiltonian",
    "lowest_eigenvalues",
    "crank_nicolson_evolve",
    "euler_maruyama_sample",
    "compare_l_inf",
    "compare_l2",
    "compare_ks",
]


class Boundary(enum.Enum):
    DIRICHLET = "dirichlet"


class Scheme(enum.Enum):
    EULER_MARUYAMA = "euler_maruyama"


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix from a Schroedinger discretization."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray
    h: float
    boundary: Boundary = Boundary.DIRICHLET

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        e = np.asarray(self.off_diagonal, dtype=float)
        if d.ndim != 1 or d.size < 3:
            raise DomainError("need at least a 3x3 operator")
        if e.shape != (d.size - 1,):
            raise DomainError(
                f"off-diagonal length {e.shape} does not fit dimension "
                f"{d.size}")
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "off_diagonal", e)

    @property
    def dimension(self) -> int:
        return self.diagonal.size


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo run configuration; bounds follow the contract runs."""

    n_paths: int
    dt: float
    seed: int
    scheme: Scheme = Scheme.EULER_MARUYAMA

    def __post_init__(self):
        if self.n_paths < 10_000:
            raise DomainError(
                f"contract runs need n_paths >= 10000, got {self.n_paths!r}")
        if not 0.0 < self.dt <= 1e-3:
            raise DomainError(
                f"contract runs need 0 < dt <= 1e-3, got {self.dt!r}")


def discretize_hamiltonian(v: Callable[[np.ndarray], np.ndarray],
                           domain: Domain,
                           n_points: int) -> TridiagonalOperator:
    """Second-order matrix for -(1/2) d^2/dx^2 + v with walls at the ends."""
    if n_points < 101:
        raise DomainError(f"need n_points >= 101, got {n_points!r}")
    x = domain.grid(n_points)
    h = float(x[1] - x[0])
    v_interior = np.asarray(v(x[1:-1]), dtype=float)
    if not np.isfinite(v_interior).all():
        i = int(np.argmin(np.isfinite(v_interior)))
        raise DomainError(
            f"potential is not finite at interior point x={x[1 + i]!r}")
    diagonal = 1.0 / (h * h) + v_interior
    off = np.full(n_points - 3, -0.5 / (h * h))
    return TridiagonalOperator(diagonal=diagonal, off_diagonal=off, h=h)


def _sturm_negative_counts(d: np.ndarray, e_sq: np.ndarray,
                           shifts: np.ndarray) -> np.ndarray:
    """Number of eigenvalues below each shift, by Sturm sequence."""
    pivmin = max(1e-290, float(e_sq.max(initial=0.0)) * 1e-290)
    q = d[0] - shifts
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    counts = (q < 0.0).astype(np.int64)
    for i in range(1, d.size):
        q = d[i] - shifts - e_sq[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        counts += q < 0.0
    return counts


def lowest_eigenvalues(op: TridiagonalOperator, count: int) -> list:
    """The ``count`` smallest eigenvalues by bisection, to 1e-10."""
    n = op.dimension
    if count < 1 or count > n:
        raise DomainError(f"count must lie in [1, {n}], got {count!r}")
    d = op.diagonal
    e = op.off_diagonal
    e_sq = e * e
    radius = np.zeros(n)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    lo = np.full(count, float((d - radius).min()))
    hi = np.full(count, float((d + radius).max()))
    wanted = np.arange(1, count + 1)
    while (hi - lo).max() > 1e-10:
        mid = 0.5 * (lo + hi)
        below = _sturm_negative_counts(d, e_sq, mid) >= wanted
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return [float(v) for v in 0.5 * (lo + hi)]


def _cn_coefficients(w_vals: np.ndarray, h: float):
    # conservative form: row i couples to m_{i +- 1} through the flux
    # (1/2) dm/dx + W m evaluated at the neighbor, so interior columns
    # sum to zero and mass moves only through the walls
    inv_h2 = 1.0 / (h * h)
    sub = 0.5 * inv_h2 - w_vals[:-2] / (2.0 * h)     # coeff of m_{i-1}
    dia = np.full(w_vals.size - 2, -inv_h2)
    sup = 0.5 * inv_h2 + w_vals[2:] / (2.0 * h)      # coeff of m_{i+1}
    return sub, dia, sup


def crank_nicolson_evolve(u_drift: Callable[[np.ndarray], np.ndarray],
                          x0: float, t_final: float, domain: Domain,
                          n_points: int, n_steps: int) -> GridFunction:
    """Evolve a near-delta start under dm/dt = (1/2)m'' + (U'm)'.

    The start is a normalized Gaussian of width 4h at x0.  Mass change
    is reconciled against the integrated wall flux every step; the two
    agree to roundoff for this scheme, so a defect beyond 1e-5 means
    the inputs are broken (and raises).
    """
    if t_final <= 0.0 or n_steps < 1:
        raise DomainError("need t_final > 0 and n_steps >= 1")
    x = domain.grid(n_points)
    h = float(x[1] - x[0])
    if not domain.x_min < x0 < domain.x_max:
        raise DomainError(f"x0={x0!r} lies outside the window")
    dt = t_final / n_steps
    w_vals = np.asarray(u_drift(x), dtype=float)
    if not np.isfinite(w_vals).all():
        raise MassLossError("drift is not finite on the grid")
    sub, dia, sup = _cn_coefficients(w_vals, h)

    # banded matrix of I - (dt/2) L for the implicit half
    k = 0.5 * dt
    ab = np.zeros((3, dia.size))
    ab[0, 1:] = -k * sup[:-1]
    ab[1, :] = 1.0 - k * dia
    ab[2, :-1] = -k * sub[1:]

    sigma0 = 4.0 * h
    m = np.exp(-((x - x0) ** 2) / (2.0 * sigma0 * sigma0))
    m[0] = m[-1] = 0.0
    m[1:-1] /= h * m[1:-1].sum()
    mass_start = h * m[1:-1].sum()

    # the wall rows dropped by the Dirichlet condition would receive
    # these amounts from their neighbors; that is exactly the leak rate
    leak_lo = 0.5 / (h * h) + w_vals[1] / (2.0 * h)
    leak_hi = 0.5 / (h * h) - w_vals[-2] / (2.0 * h)

    leaked = 0.0
    inner = m[1:-1].copy()
    for _ in range(n_steps):
        lm = dia * inner
        lm[1:] += sub[1:] * inner[:-1]
        lm[:-1] += sup[:-1] * inner[1:]
        nxt = solve_banded((1, 1), ab, inner + k * lm)
        mid = 0.5 * (inner + nxt)
        leaked += dt * h * (leak_lo * mid[0] + leak_hi * mid[-1])
        inner = nxt
    if not np.isfinite(inner).all():
        raise MassLossError("evolution produced non-finite values")
    defect = abs(h * inner.sum() + leaked - mass_start)
    if not math.isfinite(defect) or defect > 1e-5:
        raise MassLossError(
            f"mass bookkeeping defect {defect!r} exceeds 1e-5")
    out = np.zeros(n_points)
    out[1:-1] = inner
    return GridFunction(domain, out)


_DRIFT_TABLE_POINTS = 16001
_BLOW_UP = 1e6
_NOISE_BLOCK = 32


def _drift_table(u_drift, domain: Optional[Domain]):
    if domain is None or domain.kind is DomainKind.REAL_LINE:
        lo, hi = (-12.0, 12.0) if domain is None else \
            (domain.x_min - 4.0, domain.x_max + 4.0)
    else:
        lo, hi = domain.x_min, domain.x_max + 4.0
    xs = np.linspace(lo, hi, _DRIFT_TABLE_POINTS)
    return xs, np.asarray(u_drift(xs), dtype=float)


def euler_maruyama_sample(u_drift: Callable[[np.ndarray], np.ndarray],
                          x0: float, t_final: float, cfg: McConfig,
                          domain: Optional[Domain] = None) -> np.ndarray:
    """Terminal positions of dX = -U'(X) dt + dB with diffusion 1/2.

    Noise comes from a counter-based Philox stream keyed on the seed
    (draw k*n_paths+p belongs to path p at step k), so runs are
    reproducible and order-independent.  The drift is linearly
    interpolated from a dense table; half-line domains reflect at the
    lower edge.
    """
    n_steps = int(round(t_final / cfg.dt))
    if n_steps < 1 or abs(n_steps * cfg.dt - t_final) > 1e-9 * t_final:
        raise DomainError(
            f"t_final={t_final!r} is not a whole number of dt={cfg.dt!r} "
            f"steps")
    xs, ws = _drift_table(u_drift, domain)
    table_lo = xs[0]
    inv_table_h = (xs.size - 1) / (xs[-1] - xs[0])
    reflect_at = None
    if domain is not None and domain.kind is DomainKind.HALF_LINE:
        reflect_at = domain.x_min
    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    paths = np.full(cfg.n_paths, float(x0))
    amplitude = math.sqrt(cfg.dt)
    done = 0
    while done < n_steps:
        # noise comes in step-major blocks, which consumes the Philox
        # stream in the same order as one draw per step
        block = min(_NOISE_BLOCK, n_steps - done)
        noise = rng.standard_normal((block, cfg.n_paths))
        for j in range(block):
            # table lookup by index arithmetic (uniform grid); points
            # past the table ends extrapolate the edge cell linearly
            pos = (paths - table_lo) * inv_table_h
            idx = np.clip(pos.astype(np.int64), 0, xs.size - 2)
            frac = pos - idx
            drift = ws[idx] * (1.0 - frac) + ws[idx + 1] * frac
            paths += (-cfg.dt) * drift
            paths += amplitude * noise[j]
            if reflect_at is not None:
                below = paths < reflect_at
                if below.any():
                    paths[below] = 2.0 * reflect_at - paths[below]
        done += block
        peak = float(np.abs(paths).max())
        if not peak <= _BLOW_UP:
            raise BlowUpError(
                f"a path exceeded |x| = {_BLOW_UP:g}; drift is runaway "
                f"or dt too large")
    return paths


def _check_same_grid(f: GridFunction, g: GridFunction):
    if f.domain != g.domain or f.n_points != g.n_points:
        raise GridMismatchError(
            "compared functions live on different grids")


def compare_l_inf(f: GridFunction, g: GridFunction) -> float:
    _check_same_grid(f, g)
    return float(np.abs(f.values - g.values).max())


def compare_l2(f: GridFunction, g: GridFunction) -> float:
    _check_same_grid(f, g)
    diff = f.values - g.values
    return float(math.sqrt(simpson(diff * diff, x=f.x)))


def compare_ks(samples: Sequence[float], g: GridFunction) -> float:
    """Kolmogorov-Smirnov distance of samples against a density grid."""
    samples = np.sort(np.asarray(samples, dtype=float))
    if samples.size == 0:
        raise DomainError("need at least one sample")
    cdf_grid = np.concatenate(
        ([0.0], np.cumsum((g.values[1:] + g.values[:-1]) * 0.5 * g.h)))
    total = cdf_grid[-1]
    if total <= 0.0:
        raise DomainError("reference density has no mass")
    cdf_grid /= total
    ref = np.interp(samples, g.x, cdf_grid, left=0.0, right=1.0)
    n = samples.size
    steps_hi = np.arange(1, n + 1) / n
    steps_lo = np.arange(0, n) / n
    return float(np.maximum(steps_hi - ref, ref - steps_lo).max())
