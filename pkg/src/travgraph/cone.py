"""Radially symmetric travelling graphs (the cone profile).

With v = phi_c'(r) the travelling-graph equation reduces to

    v' = (1 + v^2) (c0 sqrt(1 + v^2) - c - v / r),      v(0) = 0,

whose solution decreases from 0 to -cot(alpha).  The profile phi_c is carried
along as a second ODE component, anchored at phi_c(0) = 0, and its constant
term C in

    phi_c = -cot(a) r + ln r / (c0 sin a) + C + (2 - 3 sin^2 a) / (c0^2 sin 2a r) + O(r^-2)

is cached as ``C_raw``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .errors import BracketViolation, DomainError, IntegrationFailure, OutOfRange, PoorConvergence
from .params import Params, polar_arrays

R0 = 1e-6


def v0_bracket(params: Params, r):
    """Explicit negative sub-solution v0(r) of the radial ODE (zero of its right-hand side)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("v0 is defined for r > 0")
    c, c0 = params.c, params.c0
    k2 = c * c - c0 * c0
    if params.planar:
        k2 = 0.0
    out = -k2 / (c / r + c0 * np.sqrt(1.0 / (r * r) + k2))
    return float(out) if out.ndim == 0 else out


def radial_rhs(params: Params, r, v):
    return (1.0 + v * v) * (params.c0 * np.sqrt(1.0 + v * v) - params.c - v / r)


def expansion_terms(params: Params):
    """Coefficients (log, 1/r) of the large-r expansion of phi_c + cot(a) r."""
    s = params.sin_alpha
    a_log = 1.0 / (params.c0 * s)
    a_inv = (2.0 - 3.0 * s * s) / (params.c0 ** 2 * math.sin(2.0 * params.alpha))
    return a_log, a_inv


@dataclass(frozen=True, eq=False)
class ConeProfile:
    r_grid: np.ndarray
    v: np.ndarray
    phi_c: np.ndarray
    C_raw: float
    params: Params
    tol: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "_spline",
                           CubicHermiteSpline(self.r_grid, self.phi_c, self.v, extrapolate=False))
        dv = radial_rhs(self.params, self.r_grid, self.v)
        object.__setattr__(self, "_vspline",
                           CubicHermiteSpline(self.r_grid, self.v, dv, extrapolate=False))

    @property
    def r_max(self):
        return float(self.r_grid[-1])

    @property
    def r0(self):
        return float(self.r_grid[0])

    def _series_slope(self):
        return 0.5 * (self.params.c0 - self.params.c)

    def phi_raw(self, r):
        """phi_c(r) with phi_c(0) = 0."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise DomainError("radius must be nonnegative")
        if np.any(r > self.r_max * (1 + 1e-14)):
            raise OutOfRange(f"radius beyond tabulated r_max = {self.r_max}")
        rc = np.minimum(r, self.r_max)
        near = rc < self.r0
        out = np.where(near, 0.5 * self._series_slope() * rc * rc,
                       self._spline(np.clip(rc, self.r0, self.r_max)))
        return float(out) if out.ndim == 0 else out

    def slope(self, r):
        """v(r) = phi_c'(r)."""
        r = np.asarray(r, dtype=float)
        if np.any(r > self.r_max * (1 + 1e-14)):
            raise OutOfRange(f"radius beyond tabulated r_max = {self.r_max}")
        rc = np.minimum(r, self.r_max)
        out = np.where(rc < self.r0, self._series_slope() * rc,
                       self._vspline(np.clip(rc, self.r0, self.r_max)))
        return float(out) if out.ndim == 0 else out

    def field(self, target_c=None, value_at_zero=None):
        """The 2-D function x -> phi_c(|x|) shifted by a constant; see ConeField."""
        if value_at_zero is not None:
            shift = float(value_at_zero)
        else:
            shift = (self.C_raw if target_c is None else target_c) - self.C_raw
        return ConeField(self, shift)

    def to_csv(self, path):
        write_profile_csv(self, path)


def _integrate(params, r_max, tol, method="DOP853"):
    a = 0.5 * (params.c0 - params.c)
    y0 = [a * R0, 0.5 * a * R0 * R0]

    def rhs(r, y):
        v = y[0]
        return [radial_rhs(params, r, v), v]

    sol = solve_ivp(rhs, (R0, r_max), y0, method=method, rtol=tol, atol=tol, dense_output=True)
    if not sol.success:
        raise IntegrationFailure(sol.message)
    return sol


def _table_grid(r_max, spacing=0.05):
    head = np.geomspace(R0, 1.0, 241)
    tail = np.linspace(1.0, r_max, max(2, int(math.ceil((r_max - 1.0) / spacing)) + 1))
    return np.concatenate([head[:-1], tail])


def _constant_estimate(params, phi_of_r, r):
    a_log, a_inv = expansion_terms(params)
    return phi_of_r(r) + params.cot_alpha * r - a_log * math.log(r) - a_inv / r


def _richardson(params, phi_of_r, r_hi):
    """Extrapolate the constant term from radii r_hi/2 and r_hi, eliminating the 1/r^2 term."""
    r_lo = 0.5 * r_hi
    e_lo = _constant_estimate(params, phi_of_r, r_lo)
    e_hi = _constant_estimate(params, phi_of_r, r_hi)
    C = (r_hi ** 2 * e_hi - r_lo ** 2 * e_lo) / (r_hi ** 2 - r_lo ** 2)
    return C, abs(C - e_hi)


def solve_cone(params: Params, r_max=1000.0, tol=1e-11) -> ConeProfile:
    """Integrate the radial ODE from r0 = 1e-6 out to ``r_max``.

    The start value v(r0) = (c0 - c) r0 / 2 is the regular series solution at
    the origin.  Raises BracketViolation if v leaves [v0 - 10 tol, 10 tol].
    """
    if r_max < 10:
        raise DomainError("r_max must be at least 10")
    if not (1e-13 <= tol <= 1e-6):
        raise DomainError("tol must lie in [1e-13, 1e-6]")
    grid = _table_grid(float(r_max))
    if params.planar:
        z = np.zeros_like(grid)
        return ConeProfile(grid, z, z.copy(), 0.0, params, tol)
    sol = _integrate(params, float(r_max), tol)
    y = sol.sol(grid)
    v, phi = y[0], y[1]
    lower = v0_bracket(params, grid) - 10 * tol
    bad = (v < lower) | (v > 10 * tol)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise BracketViolation(f"v({grid[i]:.6g}) = {v[i]:.6g} leaves [v0, 0]")
    phi_of_r = lambda r: float(sol.sol(r)[1])
    C_raw, _ = _richardson(params, phi_of_r, float(r_max))
    return ConeProfile(grid, v, phi, float(C_raw), params, tol)


def cone_constant(profile: ConeProfile, threshold=1e-4):
    """``(C, error_estimate)`` for the constant term of the phi_c(0) = 0 profile."""
    if profile.r_max < 200:
        raise DomainError("cone_constant needs r_max >= 200")
    if profile.params.planar:
        return 0.0, 0.0
    phi = profile.phi_raw
    C1, err = _richardson(profile.params, phi, profile.r_max)
    C2, _ = _richardson(profile.params, phi, 0.5 * profile.r_max)
    if abs(C1 - C2) > threshold:
        raise PoorConvergence(f"constant estimates {C1:.10g} and {C2:.10g} differ by {abs(C1 - C2):.3g}")
    return C1, max(err, abs(C1 - C2))


def fit_expansion(profile: ConeProfile, r_lo=100.0, r_hi=1000.0, n=400):
    """Least-squares fit of phi_c + cot(a) r on {ln r, 1, 1/r, 1/r^2} over [r_lo, r_hi]."""
    r = np.geomspace(r_lo, min(r_hi, profile.r_max), n)
    y = profile.phi_raw(r) + profile.params.cot_alpha * r
    A = np.column_stack([np.log(r), np.ones_like(r), 1.0 / r, 1.0 / r ** 2])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return {"log": coef[0], "const": coef[1], "inv": coef[2], "inv2": coef[3]}


def eval_phi_c(profile: ConeProfile, r, target_c):
    """phi_c(r) shifted so that its asymptotic constant equals ``target_c``."""
    return profile.phi_raw(r) + (target_c - profile.C_raw)


def C0_normalization(params: Params):
    """ln(pi c0 cos a) / (c0 sin a): the constant matching the d(theta)/2pi sub-solution."""
    if params.planar:
        raise DomainError("no normalisation constant in the planar case")
    return math.log(math.pi * params.c0 * params.cos_alpha) / (params.c0 * params.sin_alpha)


def theta_bar(profile: ConeProfile, r, phi_c0=0.0):
    """Half-opening of the angular window where the plane through phi_c(0) lies below phi_c.

    Only phi_c(r) - phi_c(0) enters, so ``phi_c0`` (the normalisation of the
    profile) does not change the result.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("theta_bar needs r > 0")
    if profile.params.planar:
        raise DomainError("theta_bar is undefined for alpha = pi/2")
    arg = profile.phi_raw(r) / (-r * profile.params.cot_alpha)
    if np.any(arg < -1e-10) or np.any(arg > 1 + 1e-10):
        raise DomainError("arccos argument left [0, 1]")
    out = np.arccos(np.clip(arg, 0.0, 1.0))
    return float(out) if out.ndim == 0 else out


class ConeField:
    """x -> phi_c(|x|) + shift on R^2 with analytic gradient and Hessian."""

    def __init__(self, profile: ConeProfile, shift=0.0):
        self.profile = profile
        self.shift = float(shift)

    @property
    def value_at_zero(self):
        return self.shift

    def radial(self, r):
        return self.profile.phi_raw(r) + self.shift

    def __call__(self, X):
        r, _ = polar_arrays(X)
        return self.radial(r)

    def jet(self, x):
        x = np.asarray(x, dtype=float)
        r = float(np.hypot(x[0], x[1]))
        val = self.radial(r)
        p = self.profile.params
        if r < self.profile.r0:
            a = 0.5 * (p.c0 - p.c)
            return val, a * x, a * np.eye(2)
        v = self.profile.slope(r)
        dv = radial_rhs(p, r, v)
        e = x / r
        P = np.outer(e, e)
        return val, v * e, dv * P + (v / r) * (np.eye(2) - P)


def write_profile_csv(profile: ConeProfile, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "v", "phi_c"])
        for r, v, f in zip(profile.r_grid, profile.v, profile.phi_c):
            w.writerow([repr(float(r)), repr(float(v)), repr(float(f))])


def read_profile_csv(path, params: Params, tol=1e-10) -> ConeProfile:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    r, v, phi = data[:, 0], data[:, 1], data[:, 2]
    phi_of_r = lambda x: float(np.interp(x, r, phi))
    C_raw = 0.0 if params.planar else _richardson(params, phi_of_r, float(r[-1]))[0]
    return ConeProfile(r, v, phi, float(C_raw), params, tol)
