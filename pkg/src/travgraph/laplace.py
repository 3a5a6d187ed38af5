"""Uniform Laplace asymptotics of exponential integrals over an angular sector.

For a sector [theta1, theta2] with boundary atoms lambda1, lambda2 and a
density f, the integral

    F(x) = lambda1 e^{(br/2) cos(theta1 - tx)} + lambda2 e^{(br/2) cos(theta2 - tx)}
           + int_theta1^theta2 e^{(br/2) cos(theta - tx)} f(theta) dtheta / 2pi

behaves, uniformly for tx in the sector, like

    atoms + e^{br/2} ( f(tx) N0(x) / sqrt(br) + R(x) / r ),   |R| <= C  for r > 1,

where N0 is a truncated Gaussian integral in the variable u = sqrt(r) g(theta - tx).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc

from . import quadrature
from .errors import DomainError, Overflow
from .params import TWO_PI, Params

def _one(theta):
    return np.ones_like(np.asarray(theta, dtype=float))


@dataclass(frozen=True, eq=False)
class SectorIntegral:
    theta1: float
    theta2: float
    lambda1: float
    lambda2: float
    params: Params
    f: object = None
    f_zero: bool = False

    def __post_init__(self):
        if not (self.theta1 < self.theta2):
            raise DomainError("sector needs theta1 < theta2")
        if self.theta2 - self.theta1 > TWO_PI + 1e-12:
            raise DomainError("sector wider than the full circle")
        if self.params.planar:
            raise DomainError("the Laplace expansion needs b = c0 cos(alpha) > 0")

    def density(self, theta):
        if self.f_zero:
            return np.zeros_like(np.asarray(theta, dtype=float))
        return _one(theta) if self.f is None else np.asarray(self.f(theta), dtype=float)


def g_map(params: Params, theta):
    """sign(theta) sqrt(2b(1 - cos theta)) = 2 sqrt(b) sin(theta/2) on [-pi, pi], clamped outside."""
    th = np.clip(np.asarray(theta, dtype=float), -math.pi, math.pi)
    out = 2.0 * math.sqrt(params.b) * np.sin(0.5 * th)
    return float(out) if out.ndim == 0 else out


def g_inverse(params: Params, t):
    t = np.asarray(t, dtype=float)
    top = 2.0 * math.sqrt(params.b)
    if np.any(np.abs(t) > top * (1 + 1e-15)):
        raise DomainError(f"|t| must not exceed 2 sqrt(b) = {top}")
    out = 2.0 * np.arcsin(np.clip(t / top, -1.0, 1.0))
    return float(out) if out.ndim == 0 else out


def _gauss_mass(lo, hi):
    """int_lo^hi e^{-u^2/4} du / (2 pi) via erf/erfc, accurate in both tails."""
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    a, b = lo / 2.0, hi / 2.0
    both_pos = a > 0
    both_neg = b < 0
    mid = erf(b) - erf(a)
    out = np.where(both_pos, erfc(a) - erfc(b), np.where(both_neg, erfc(-b) - erfc(-a), mid))
    return out / (2.0 * math.sqrt(math.pi))


def n_zero(params: Params, theta1, theta2, theta_x, r):
    """Gaussian factor N0 in [0, 1/sqrt(pi)]."""
    if np.any(np.asarray(r) <= 0):
        raise DomainError("n_zero needs r > 0")
    sr = np.sqrt(np.asarray(r, dtype=float))
    lo = sr * g_map(params, np.asarray(theta1) - theta_x)
    hi = sr * g_map(params, np.asarray(theta2) - theta_x)
    out = _gauss_mass(lo, hi)
    return float(out) if np.ndim(out) == 0 else out


def _log_parts(si: SectorIntegral, r, theta_x, rtol):
    """(shift, atom part, integral part) with F = e^shift (atoms + integral)."""
    kappa = 0.5 * si.params.b * r
    c1, c2 = math.cos(si.theta1 - theta_x), math.cos(si.theta2 - theta_x)
    off = (theta_x - si.theta1) % TWO_PI
    inside = off <= si.theta2 - si.theta1
    peak = si.theta1 + off if inside else (si.theta1 if c1 >= c2 else si.theta2)
    cmax = 1.0 if inside else max(c1, c2)
    shift = kappa * cmax
    atoms = si.lambda1 * math.exp(kappa * (c1 - cmax)) + si.lambda2 * math.exp(kappa * (c2 - cmax))
    if si.f_zero:
        return shift, atoms, 0.0

    d0 = peak - theta_x

    def integrand(t):
        return (np.exp(kappa * quadrature.cos_drop(t - theta_x, d0)) * si.density(t))[None, :]

    width = 1.0 / math.sqrt(kappa) if kappa > 0 else math.inf
    bp = quadrature.peak_breakpoints(si.theta1, si.theta2, peak, width)
    val, _, _ = quadrature.integrate(integrand, bp, rtol=rtol, atol=1e-300)
    return shift, atoms, float(val[0]) / TWO_PI


def f_direct(si: SectorIntegral, r, theta_x, log_mode=False, rtol=1e-13):
    """F at polar point (r, theta_x) by adaptive quadrature; ``log_mode`` returns log F."""
    if r < 0:
        raise DomainError("r must be nonnegative")
    shift, atoms, integral = _log_parts(si, r, theta_x, rtol)
    total = atoms + integral
    if log_mode:
        if total <= 0:
            raise DomainError("log F needs F > 0")
        return shift + math.log(total)
    if shift > 700.0:
        raise Overflow("e^{br/2} overflows; use log_mode=True")
    return math.exp(shift) * total


def f_asymptotic(si: SectorIntegral, r, theta_x, rtol=1e-13):
    """``(leading, R_empirical)`` for r > 1 and theta_x in the sector.

    ``leading`` = atoms + e^{br/2} f(tx) N0 / sqrt(br); it is returned in
    log form (log of the value) once e^{br/2} would overflow.
    ``R_empirical`` = r |F - leading| e^{-br/2}, computed without forming
    e^{br/2}: the atoms cancel exactly and only the integral is compared.
    """
    if r <= 1:
        raise DomainError("the expansion is stated for r > 1")
    if not (si.theta1 <= theta_x <= si.theta2):
        raise DomainError("theta_x must lie in [theta1, theta2]")
    b = si.params.b
    kappa = 0.5 * b * r
    n0 = n_zero(si.params, si.theta1, si.theta2, theta_x, r)
    fx = float(si.density(np.array([theta_x]))[0])
    lead_scaled = fx * n0 / math.sqrt(b * r)
    shift, atoms, integral = _log_parts(si, r, theta_x, rtol)
    # inside the sector the shift is exactly kappa
    R = r * abs(integral - lead_scaled)
    atoms_term = si.lambda1 * math.exp(kappa * math.cos(si.theta1 - theta_x) - kappa) \
        + si.lambda2 * math.exp(kappa * math.cos(si.theta2 - theta_x) - kappa)
    scaled = atoms_term + lead_scaled
    if kappa <= 700.0:
        leading = math.exp(kappa) * scaled
    else:
        leading = kappa + math.log(scaled) if scaled > 0 else -math.inf
    return leading, R


def _exp_or_inf(v):
    return math.exp(v) if v < 709.0 else math.inf


def remainder_table(si: SectorIntegral, radii, n_angles=64):
    """Rows (r, theta_x, F_direct, F_leading, R) on a uniform angle set inside the sector.

    Values of F too large for a double are reported as inf.
    """
    th = np.linspace(si.theta1, si.theta2, n_angles)
    rows = []
    for r in radii:
        for t in th:
            logF = f_direct(si, r, t, log_mode=True) if not si.f_zero else -math.inf
            kappa = 0.5 * si.params.b * r
            lead, R = f_asymptotic(si, r, float(t))
            logL = lead if kappa > 700.0 else (math.log(lead) if lead > 0 else -math.inf)
            rows.append((float(r), float(t), _exp_or_inf(logF), _exp_or_inf(logL), R))
    return rows


def split_diagnostic(si: SectorIntegral, r, theta_x, delta=0.3):
    """The three pieces of the proof's split: |theta - tx| > delta on either side, and the core.

    Returns e^{-br/2}-scaled integrals (I1, I2, I3) of the density part; I1
    and I3 decay exponentially in r while I2 carries the Gaussian term.
    """
    kappa = 0.5 * si.params.b * r

    def piece(lo, hi):
        if hi <= lo:
            return 0.0

        def integrand(t):
            return (np.exp(kappa * quadrature.cos_drop(t - theta_x, 0.0)) * si.density(t))[None, :]

        width = 1.0 / math.sqrt(max(kappa, 1e-300))
        bp = quadrature.peak_breakpoints(lo, hi, theta_x, width)
        val, _, _ = quadrature.integrate(integrand, bp, rtol=1e-12, atol=1e-300)
        return float(val[0]) / TWO_PI

    a = max(si.theta1, theta_x - delta)
    b = min(si.theta2, theta_x + delta)
    return piece(si.theta1, a), piece(a, b), piece(b, si.theta2)


def write_remainder_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "theta_x", "F_direct", "F_leading", "R_empirical"])
        for row in rows:
            w.writerow([repr(float(v)) for v in row])
