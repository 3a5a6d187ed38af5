"""The eleven acceptance checks, shared by the CLI ``verify`` suites and the test suite.

Every check returns a CheckResult with the measured quantity, the threshold
it was compared against and the wall time.  Nothing here loosens a
tolerance: a check that cannot be met reports ``passed = False``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .cone import C0_normalization, eval_phi_c, expansion_terms, fit_expansion, solve_cone, theta_bar
from .eikonal import PlaneSpec
from .laplace import SectorIntegral, f_asymptotic
from .params import TWO_PI, Params, make_params
from .solver import NewtonOptions, solve_dirichlet, verify_sandwich
from .subsolution import SphereMeasure, SubSolution, jet_phi_star, mcm_from_derivatives


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    measured: float
    threshold: str
    seconds: float
    detail: dict = field(default_factory=dict)

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return (f"[{tag}] criterion {self.number:2d} {self.name}: measured {self.measured:.6g} "
                f"(need {self.threshold}) in {self.seconds:.2f}s")


def random_measure(rng, N=3):
    """1-8 atoms with log-uniform masses and 0-2 arcs of random density."""
    n_atoms = int(rng.integers(1, 9))
    n_arcs = int(rng.integers(0, 3))
    th = rng.uniform(0, TWO_PI, n_atoms)
    m = np.exp(rng.uniform(-3, 3, n_atoms))
    arcs = []
    for _ in range(n_arcs):
        lo = rng.uniform(0, TWO_PI)
        arcs.append((lo, lo + rng.uniform(0.05, TWO_PI)))
    return SphereMeasure.from_angles(list(zip(th, m)), arcs, float(np.exp(rng.uniform(-2, 1))))


@dataclass
class SubsolutionSample:
    grad_norm: np.ndarray
    max_eig: np.ndarray
    eikonal: np.ndarray
    mcm: np.ndarray
    seconds: float


def subsolution_sample(params: Params, seed=0, n_measures=100, n_points=100, radius=50.0):
    """Analytic jets of phi_* for random measures at random points with |x| <= radius."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    total = n_measures * n_points
    g_norm = np.empty(total)
    eig = np.empty(total)
    eik = np.empty(total)
    mcm = np.empty(total)
    k = 0
    half_s = 0.5 * params.c0 * params.sin_alpha
    T2 = params.cot_alpha ** 2
    for _ in range(n_measures):
        mu = random_measure(rng)
        r = radius * np.sqrt(rng.uniform(size=n_points))
        th = rng.uniform(0, TWO_PI, n_points)
        for x in np.column_stack([r * np.cos(th), r * np.sin(th)]):
            _, g, H = jet_phi_star(mu, params, x)
            g_norm[k] = math.hypot(g[0], g[1])
            eig[k] = np.linalg.eigvalsh(H)[-1]
            eik[k] = -np.trace(H) - half_s * (T2 - g @ g)
            mcm[k] = mcm_from_derivatives(params, g, H)
            k += 1
    return SubsolutionSample(g_norm, eig, eik, mcm, time.perf_counter() - t0)


def _timed(number, name, passed, measured, threshold, t0, budget, **detail):
    dt = time.perf_counter() - t0
    detail["budget_seconds"] = budget
    return CheckResult(number, name, bool(passed and dt < budget), float(measured), threshold, dt, detail)


def check_subsolution(params: Params, seed=0, n_measures=100, n_points=100, radius=50.0):
    """Criteria 1-4 on one shared sample (the sampling time is charged to each)."""
    s = subsolution_sample(params, seed, n_measures, n_points, radius)
    out = []
    T = params.cot_alpha
    for num, name, val, ok, thr in [
        (1, "gradient bound", float(s.grad_norm.max() - T), s.grad_norm.max() <= T + 1e-12,
         "max|grad| - cot(alpha) <= 1e-12"),
        (2, "concavity", float(s.max_eig.max()), s.max_eig.max() <= 1e-12, "max eigenvalue <= 1e-12"),
        (3, "viscous eikonal identity", float(np.abs(s.eikonal).max()), np.abs(s.eikonal).max() <= 1e-8,
         "|residual| <= 1e-8"),
        (4, "sub-solution sign", float(s.mcm.max()), s.mcm.max() <= 1e-10, "max operator <= 1e-10"),
    ]:
        out.append(CheckResult(num, name, bool(ok and s.seconds < 10.0), val, thr, s.seconds,
                               {"budget_seconds": 10.0, "samples": int(s.mcm.size)}))
    return out


def check_cone_asymptotics(alphas=(math.pi / 6, math.pi / 4, math.pi / 3), c0=1.0):
    """Criterion 5: fitted ln r and 1/r coefficients over [100, 1000]."""
    t0 = time.perf_counter()
    worst_log = worst_inv = 0.0
    rows = []
    for a in alphas:
        p = make_params(a, c0)
        prof = solve_cone(p, 1000.0)
        fit = fit_expansion(prof, 100.0, 1000.0)
        a_log, a_inv = expansion_terms(p)
        e_log = abs(fit["log"] / a_log - 1.0)
        e_inv = abs(fit["inv"] / a_inv - 1.0)
        rows.append((a, fit["log"], a_log, fit["inv"], a_inv))
        worst_log, worst_inv = max(worst_log, e_log), max(worst_inv, e_inv)
    ok = worst_log <= 0.01 and worst_inv <= 0.05
    # measured: the larger of the two errors as a fraction of its tolerance
    return _timed(5, "cone asymptotics", ok, max(worst_log / 0.01, worst_inv / 0.05),
                  "<= 1 (ln r coefficient within 1%, 1/r coefficient within 5%)", t0, 30.0,
                  rel_err_log=worst_log, rel_err_inv=worst_inv, rows=rows)


def check_cone_matching(params: Params | None = None, radii=None):
    """Criterion 6: log-log slope of |phi_c - phi_*| over [100, 400] and phi_c >= phi_*.

    phi_* is the sub-solution of the uniform probability measure d(theta)/2pi,
    the measure for which ln(pi c0 cos a)/(c0 sin a) is the matching constant.
    """
    t0 = time.perf_counter()
    p = params or make_params(math.pi / 4, 1.0)
    prof = solve_cone(p, 400.0)
    C0 = C0_normalization(p)
    sub = SubSolution(SphereMeasure.uniform_circle(1.0), p)
    rr = np.geomspace(100.0, 400.0, 12) if radii is None else np.asarray(radii, dtype=float)
    diff = np.array([eval_phi_c(prof, r, C0) - sub([r, 0.0]) for r in rr])
    slope = float(np.polyfit(np.log(rr), np.log(np.abs(diff)), 1)[0])
    r_all = np.concatenate([[0.0], np.geomspace(1e-3, 400.0, 80)])
    gaps = np.array([eval_phi_c(prof, r, C0) - sub([r, 0.0]) for r in r_all])
    below = float(gaps.min())
    ok = abs(slope + 0.5) <= 0.1 and below >= 0.0
    return _timed(6, "cone/sub-solution matching", ok, slope, "slope -0.5 +- 0.1 and phi_c >= phi_*",
                  t0, 30.0, min_gap=below, diffs=list(zip(rr.tolist(), diff.tolist())))


def check_theta_bar(params: Params | None = None, radii=(50.0, 100.0, 200.0)):
    """Criterion 10: r^2 (cos theta_bar - expansion) stable within 20% across the radii."""
    t0 = time.perf_counter()
    p = params or make_params(math.pi / 4, 1.0)
    prof = solve_cone(p, 400.0)
    Ks = []
    for r in radii:
        pred = 1.0 - math.log(r) / (p.c0 * p.cos_alpha * r) + (0.0 - prof.C_raw) / (r * p.cot_alpha)
        Ks.append(r * r * (math.cos(theta_bar(prof, r)) - pred))
    Ks = np.array(Ks)
    spread = float(np.max(np.abs(Ks - Ks.mean())) / abs(Ks.mean()))
    return _timed(10, "theta_bar asymptotics", spread <= 0.2, spread, "relative spread of K <= 0.2",
                  t0, 10.0, K=Ks.tolist())


def check_laplace(radii=(25.0, 50.0, 100.0, 200.0, 400.0), n_angles=64):
    """Criterion 7: max over 64 angles of r |F - leading| e^{-br/2} never grows by more than 1.5x."""
    t0 = time.perf_counter()
    p = make_params(math.pi / 4, math.sqrt(2.0))  # b = 1
    si = SectorIntegral(0.0, math.pi / 2, 1.0, 1.0, p)
    th = np.linspace(si.theta1, si.theta2, n_angles)
    maxima = []
    for r in radii:
        maxima.append(max(f_asymptotic(si, r, float(t))[1] for t in th))
    maxima = np.array(maxima)
    ratio = float(np.max(maxima[1:] / maxima[:-1]))
    ok = np.all(np.isfinite(maxima)) and ratio <= 1.5
    return _timed(7, "Laplace remainder", ok, ratio, "max growth ratio <= 1.5", t0, 60.0,
                  maxima=maxima.tolist(), bound=float(maxima.max()))


@dataclass
class SandwichRun:
    k: int
    field: object
    spec: PlaneSpec
    mu: SphereMeasure
    seconds: float


def sandwich_solve(k, params: Params, half_width=20.0, h=0.1, initial="sub", opts=None):
    spec = PlaneSpec.equispaced(k, params)
    mu = spec.matched_measure()
    low = SubSolution(mu, params)
    if initial == "sub":
        init = low
    elif initial == "average":
        def init(X):
            return 0.5 * (low(X) + spec(X))
    else:
        raise ValueError(f"unknown initial guess {initial!r}")
    t0 = time.perf_counter()
    dom = ((-half_width, half_width), (-half_width, half_width))
    fld = solve_dirichlet(dom, h, spec, init, params, opts or NewtonOptions())
    return SandwichRun(k, fld, spec, mu, time.perf_counter() - t0)


def check_sandwich(runs, params: Params, h=0.1):
    """Criteria 8 and 9 from converged solves (one per k)."""
    tol = 10 * h * h
    ok8 = True
    ok9 = True
    seconds = 0.0
    worst = -math.inf
    detail8, detail9 = {}, {}
    for run in runs:
        seconds += run.seconds
        chk = verify_sandwich(run.field, run.mu, run.spec, tol, raise_on_fail=False)
        hist = run.field.history
        iters = hist[-1][0]
        res = hist[-1][1]
        bound = -2.0 * math.log(run.k) / (params.c0 * params.sin_alpha) - tol
        good = chk.ok and res <= 1e-10 and iters <= 50 and chk.gap_min >= bound
        ok8 &= good
        worst = max(worst, -min(chk.lower_margin, chk.upper_margin))
        detail8[f"k={run.k}"] = {"iterations": iters, "residual": res, "lower_margin": chk.lower_margin,
                                 "upper_margin": chk.upper_margin, "gap_min": chk.gap_min, "gap_bound": bound}
        vals = [v for _, v in chk.decay]
        mono = all(b <= a for a, b in zip(vals, vals[1:]))
        ok9 &= mono
        detail9[f"k={run.k}"] = chk.decay
    r8 = CheckResult(8, "sandwich", bool(ok8 and seconds < 120.0), worst,
                     "phi_* - 10h^2 <= phi_h <= phi^* + 10h^2, gap >= -2 ln k/(c0 sin a) - 10h^2",
                     seconds, {**detail8, "budget_seconds": 120.0})
    r9 = CheckResult(9, "edge-distance decay", bool(ok9), float(max(v[-1][1] for v in detail9.values())),
                     "max gap nonincreasing over l = 2, 5, 10, 15", 0.0, detail9)
    return r8, r9


def check_uniqueness(run_sub: SandwichRun, params: Params, half_width=20.0, h=0.1):
    """Criterion 11: a second solve from (phi_* + phi^*)/2 lands within 1e-9 of the first."""
    other = sandwich_solve(run_sub.k, params, half_width, h, initial="average")
    diff = float(np.max(np.abs(other.field.values - run_sub.field.values)))
    return CheckResult(11, "uniqueness probe", bool(diff <= 1e-9 and other.seconds + run_sub.seconds < 120.0),
                       diff, "max |phi_h - phi_h'| <= 1e-9", other.seconds + run_sub.seconds,
                       {"budget_seconds": 120.0})


def run_suite(name, params: Params | None = None, seed=0, verify=None):
    """Run one CLI suite: subsolution (1-4), cone (5, 6, 10), laplace (7) or sandwich (8, 9, 11)."""
    p = params or make_params(math.pi / 4, 1.0)
    v = verify or {}
    if name == "subsolution":
        return check_subsolution(p, seed, v.get("n_measures", 100), v.get("n_points", 100), v.get("radius", 50.0))
    if name == "cone":
        return [check_cone_asymptotics(), check_cone_matching(p if not p.planar else None),
                check_theta_bar(p if not p.planar else None)]
    if name == "laplace":
        return [check_laplace(tuple(v.get("radii", (25.0, 50.0, 100.0, 200.0, 400.0))), v.get("n_angles", 64))]
    if name == "sandwich":
        ks = [int(k) for k in v.get("ks", (2, 3))]
        hw, h = v.get("half_width", 20.0), v.get("h", 0.1)
        runs = [sandwich_solve(k, p, hw, h) for k in ks]
        r8, r9 = check_sandwich(runs, p, h)
        return [r8, r9, check_uniqueness(runs[-1], p, hw, h)]
    raise ValueError(f"unknown suite {name!r}")
