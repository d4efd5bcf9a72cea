"""Named self-check suites behind the ``verify`` command.

Each suite runs a battery of cross-validations (special-function
identities, operator algebra on grids, matrix spectra against closed
forms, density axioms, sampler statistics) and reports one record per
check with the measured deviation next to its tolerance.  A check that
honestly fails stays failed here; the point of this module is to state
what the code does, not what one would like it to do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from .ces_families import CesParams, Family, default_domain, \
    eigenfunction_minus, eigenfunction_minus_table, \
    eigenfunction_plus_table, energy_minus, susy_potential, v_minus
from .errors import DomainError
from .fokker_planck import build_transition_density, transition_density
from .oracles import McConfig, compare_ks, discretize_hamiltonian, \
    euler_maruyama_sample, lowest_eigenvalues
from .specfun import hermite_h, hyp1f1, hyp1f1_z_derivative, laguerre_l, \
    ln_gamma
from .susy_core import Domain, GridFunction, apply_supercharge_a, \
    apply_supercharge_adagger, partner_potentials

__all__ = ["CheckResult", "SUITE_NAMES", "run_suite"]

SUITE_NAMES = ("specfun", "susy", "spectra", "density", "mc", "all")


@dataclass(frozen=True)
class CheckResult:
    """One named check: a measured deviation against its tolerance."""

    name: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.measured) \
            and self.measured <= self.tolerance

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} {self.name}: measured {self.measured:.6e}"
                f" vs tolerance {self.tolerance:.6e}")


def _default_a() -> CesParams:
    return CesParams(Family.A, b=-1.0, beta=0.3)


def _default_b() -> CesParams:
    return CesParams(Family.B, b=-5.5, gamma=1.0)


# ---------------------------------------------------------------------------
# special functions


def _kummer_battery() -> float:
    rng = np.random.default_rng(20260823)
    worst = 0.0
    for _ in range(10000):
        u = rng.random()
        if u < 0.45:
            a = rng.uniform(0.0, 50.0)
            b = rng.uniform(0.05, 50.0)
            z = rng.uniform(0.0, 100.0)
        elif u < 0.90:
            b = rng.uniform(0.05, 50.0)
            a = rng.uniform(-50.0, b)
            z = rng.uniform(-100.0, 0.0)
        else:
            a = -float(rng.integers(1, 51))
            b = rng.uniform(0.05, 50.0)
            z = rng.uniform(-100.0, 0.0)
        lhs = hyp1f1(a, b, z)
        rhs = math.exp(z) * hyp1f1(b - a, b, -z)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return worst


def _derivative_battery() -> float:
    rng = np.random.default_rng(91)
    h = 1e-5
    worst = 0.0
    for _ in range(10000):
        b = rng.uniform(0.05, 50.0)
        z = rng.uniform(1e-3, 10.0) * (1.0 if rng.random() < 0.5 else -1.0)
        a = rng.uniform(0.0, 50.0) if z >= 0.0 else rng.uniform(-50.0, b)
        d = hyp1f1_z_derivative(a, b, z)
        fd = (hyp1f1(a, b, z + h) - hyp1f1(a, b, z - h)) / (2.0 * h)
        worst = max(worst, abs(d - fd) / max(1.0, abs(d)))
    return worst


def _hermite_exact_battery() -> float:
    worst = 0.0
    for x in (Fraction(-3, 2), Fraction(1, 4), Fraction(7, 8), Fraction(2)):
        exact = [Fraction(1), 2 * x]
        for n in range(1, 50):
            exact.append(2 * x * exact[n] - 2 * n * exact[n - 1])
        scale = max(abs(float(v)) for v in exact)
        for n in range(51):
            got = float(hermite_h(n, float(x)))
            worst = max(worst, abs(got - float(exact[n])) / scale)
    return worst


def _laguerre_exact_battery() -> float:
    worst = 0.0
    for alpha in (Fraction(-1, 2), Fraction(1, 2), Fraction(3, 2)):
        for x in (Fraction(1, 3), Fraction(5, 2)):
            exact = [Fraction(1), 1 + alpha - x]
            for n in range(1, 50):
                nxt = ((2 * n + 1 + alpha - x) * exact[n]
                       - (n + alpha) * exact[n - 1]) / (n + 1)
                exact.append(nxt)
            scale = max(abs(float(v)) for v in exact)
            for n in range(51):
                got = float(laguerre_l(n, float(alpha), float(x)))
                worst = max(worst, abs(got - float(exact[n])) / scale)
    return worst


def _ln_gamma_battery() -> float:
    rng = np.random.default_rng(314)
    worst = 0.0
    for _ in range(2000):
        x = rng.uniform(0.05, 40.0)
        resid = ln_gamma(x + 1.0) - ln_gamma(x) - math.log(x)
        worst = max(worst, abs(resid) / max(1.0, abs(ln_gamma(x + 1.0))))
    return worst


def suite_specfun() -> List[CheckResult]:
    return [
        CheckResult("kummer_identity_battery", _kummer_battery(), 1e-10),
        CheckResult("derivative_relation_battery", _derivative_battery(),
                    1e-7),
        CheckResult("hermite_exact_rational", _hermite_exact_battery(),
                    1e-12),
        CheckResult("laguerre_exact_rational", _laguerre_exact_battery(),
                    1e-12),
        CheckResult("log_gamma_recurrence", _ln_gamma_battery(), 1e-12),
    ]


# ---------------------------------------------------------------------------
# operator algebra


def _second_order_apply(v, f: GridFunction) -> np.ndarray:
    vals, h = f.values, f.h
    lap = np.empty_like(vals)
    lap[1:-1] = (vals[2:] - 2.0 * vals[1:-1] + vals[:-2]) / (h * h)
    lap[0], lap[-1] = lap[1], lap[-2]
    return -0.5 * lap + v(f.x) * vals


def _smooth_test_functions(dom: Domain, n_points: int, count: int,
                           seed: int) -> List[GridFunction]:
    rng = np.random.default_rng(seed)
    x = dom.grid(n_points)
    out = []
    for _ in range(count):
        center = rng.uniform(-2.0, 2.0)
        width = rng.uniform(0.7, 1.6)
        c0, c1, c2 = rng.uniform(-1.0, 1.0, 3)
        bump = np.exp(-((x - center) ** 2) / (2.0 * width * width))
        out.append(GridFunction(dom, bump * (c0 + c1 * x + c2 * x * x)))
    return out


def intertwining_ratio_defect(params: CesParams, n_functions: int = 5,
                              seed: int = 6021) -> float:
    """Worst |ratio - 4| of the intertwining residual under grid halving."""
    pot = susy_potential(params)
    vp, vm = partner_potentials(pot)
    worst = 0.0
    for k in range(n_functions):
        residuals = []
        for n_points in (1001, 2001, 4001):
            f = _smooth_test_functions(pot.domain, n_points, 1,
                                       seed + k)[0]
            lhs = apply_supercharge_a(
                pot, GridFunction(pot.domain,
                                  _second_order_apply(vm, f))).values
            rhs = _second_order_apply(vp, apply_supercharge_a(pot, f))
            residuals.append(float(np.abs(lhs - rhs)[6:-6].max()))
        for coarse, fine in zip(residuals, residuals[1:]):
            worst = max(worst, abs(coarse / fine - 4.0))
    return worst


def ladder_transport_defect(params: CesParams, n_max: int = 5) -> float:
    """Worst sup-deviation of normalized raised partner states from the
    closed-form levels, away from the stencil edges."""
    pot = susy_potential(params)
    dom = default_domain(params)
    x = dom.grid(4001)
    up = eigenfunction_plus_table(params, n_max)
    shift = 1 if params.family is Family.A else 0
    down = eigenfunction_minus_table(params, n_max + shift)
    keep = np.ones(x.size, dtype=bool)
    keep[:10] = keep[-10:] = False
    if params.family is Family.B and params.gamma < 1.0:
        keep &= x >= 0.1
    worst = 0.0
    for n in range(n_max + 1):
        raised = apply_supercharge_adagger(
            pot, GridFunction(dom, up[n])).values
        target = down[n + shift]
        raised = raised / math.sqrt(simpson(raised[keep] ** 2, x=x[keep]))
        scale = math.sqrt(simpson(target[keep] ** 2, x=x[keep]))
        if float(np.dot(raised, target)) < 0.0:
            raised = -raised
        worst = max(worst, float(
            np.abs(raised - target / scale)[keep].max()))
    return worst


def suite_susy() -> List[CheckResult]:
    a = _default_a()
    pot = susy_potential(a)
    psi0 = eigenfunction_minus(a, 0)
    annihilated = float(
        np.abs(apply_supercharge_a(pot, psi0).values[10:-10]).max())
    return [
        CheckResult("intertwining_second_order",
                    intertwining_ratio_defect(a), 1.0),
        CheckResult("zero_mode_annihilated", annihilated, 1e-6),
        CheckResult("ladder_transport_real_line",
                    ladder_transport_defect(a), 1e-5),
        CheckResult("ladder_transport_half_line",
                    ladder_transport_defect(_default_b()), 1e-5),
    ]


# ---------------------------------------------------------------------------
# spectra


def grid_spectrum_defect(params: CesParams, count: int = 6) -> float:
    """Worst |matrix eigenvalue - closed form| over the lowest levels."""
    if params.family is Family.A:
        dom = Domain.real_line(-10.0, 10.0)
    else:
        dom = Domain.half_line()
    op = discretize_hamiltonian(lambda x: v_minus(params, x), dom, 4001)
    got = lowest_eigenvalues(op, count)
    return max(abs(val - energy_minus(params, n))
               for n, val in enumerate(got))


def suite_spectra(params: Optional[CesParams] = None) -> List[CheckResult]:
    targets = [params] if params is not None \
        else [_default_a(), _default_b()]
    out = []
    for p in targets:
        tag = "a" if p.family is Family.A else "b"
        out.append(CheckResult(f"grid_spectrum_family_{tag}",
                               grid_spectrum_defect(p), 5e-4))
    return out


# ---------------------------------------------------------------------------
# densities


def _ou_anchor_defect() -> float:
    params = CesParams(Family.A, b=0.0, beta=0.0)
    rng = np.random.default_rng(777)
    worst = 0.0
    for _ in range(20):
        t = rng.uniform(0.3, 5.0)
        x = rng.uniform(-3.0, 3.0)
        x0 = rng.uniform(-2.0, 2.0)
        mean = x0 * math.exp(-t)
        var = 0.5 * (1.0 - math.exp(-2.0 * t))
        ref = math.exp(-((x - mean) ** 2) / (2.0 * var)) \
            / math.sqrt(2.0 * math.pi * var)
        worst = max(worst, abs(transition_density(params, t, x, x0) - ref))
    return worst


def _mass_defect(params: CesParams, t: float, x0: float) -> float:
    return abs(build_transition_density(params, t).mass(x0) - 1.0)


def _chapman_kolmogorov_defect(params: CesParams, s: float, t: float,
                               x0: float) -> float:
    dom = default_domain(params)
    y = dom.grid(4001)
    first = build_transition_density(params, s)
    second = build_transition_density(params, t)
    both = build_transition_density(params, s + t)
    rng = np.random.default_rng(99)
    if params.family is Family.A:
        points = rng.uniform(-2.0, 2.0, 6)
    else:
        points = rng.uniform(0.5, 3.0, 6)
    mid = first.evaluate(y, x0)
    worst = 0.0
    for x in points:
        integrand = second.evaluate(float(x), y) * mid
        composed = float(simpson(integrand, x=y))
        worst = max(worst, abs(composed - both.evaluate(float(x), x0)))
    return worst


def suite_density() -> List[CheckResult]:
    a = CesParams(Family.A, b=-1.9, beta=0.0)
    b = _default_b()
    return [
        CheckResult("ou_closed_form_anchor", _ou_anchor_defect(), 1e-6),
        CheckResult("unit_mass_real_line",
                    max(_mass_defect(a, 0.5, 0.5), _mass_defect(a, 5.0, 0.5)),
                    1e-5),
        CheckResult("unit_mass_half_line", _mass_defect(b, 1.0, 1.5), 1e-5),
        CheckResult("chapman_kolmogorov_real_line",
                    _chapman_kolmogorov_defect(a, 0.5, 0.5, 0.3), 1e-4),
        CheckResult("chapman_kolmogorov_half_line",
                    _chapman_kolmogorov_defect(b, 0.5, 0.5, 1.5), 1e-4),
    ]


# ---------------------------------------------------------------------------
# sampling


def suite_mc(seed: int = 42, n_paths: int = 10000,
             dt: float = 1e-3) -> List[CheckResult]:
    params = CesParams(Family.A, b=-1.9, beta=0.0)
    dom = default_domain(params)
    cfg = McConfig(n_paths=n_paths, dt=dt, seed=seed)
    samples = euler_maruyama_sample(susy_potential(params).w, 0.5, 8.0,
                                    cfg, domain=dom)
    x = dom.grid(4001)
    reference = GridFunction(
        dom, build_transition_density(params, 8.0).evaluate(x, 0.5))
    ks = compare_ks(samples, reference)
    flat_cfg = McConfig(n_paths=n_paths, dt=dt, seed=seed)
    flat = euler_maruyama_sample(lambda y: np.zeros_like(y), 0.0, 1.0,
                                 flat_cfg)
    return [
        CheckResult("terminal_law_ks", ks, 1.63 / math.sqrt(n_paths)),
        CheckResult("flat_drift_variance", abs(float(flat.var()) - 1.0),
                    0.07),
    ]


# ---------------------------------------------------------------------------
# dispatch


def run_suite(name: str, params: Optional[CesParams] = None,
              seed: int = 42) -> List[CheckResult]:
    """Run one named suite (or every suite) and collect its records."""
    if name == "specfun":
        return suite_specfun()
    if name == "susy":
        return suite_susy()
    if name == "spectra":
        return suite_spectra(params)
    if name == "density":
        return suite_density()
    if name == "mc":
        return suite_mc(seed=seed)
    if name == "all":
        out: List[CheckResult] = []
        for sub in ("specfun", "susy", "spectra", "density", "mc"):
            out.extend(run_suite(sub, params=params, seed=seed))
        return out
    raise DomainError(
        f"unknown suite {name!r}; choose one of {', '.join(SUITE_NAMES)}")
