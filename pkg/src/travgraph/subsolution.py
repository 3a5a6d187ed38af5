"""Hopf-Cole sub-solutions built from nonnegative measures on the sphere.

For a measure mu on S^(N-2) the function

    phi_*(x) = -(2 / (c0 sin a)) log  int exp((b/2) x.nu) dmu(nu),   b = c0 cos a

solves the viscous eikonal equation -lap phi = (c0 sin a / 2)(cot^2 a - |D phi|^2)
exactly, is concave, has |D phi| <= cot a, and is therefore a sub-solution of
the travelling-graph equation.  Everything here is evaluated with the
exponential shifted by its maximum over the support, so |x| in the thousands
is fine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .errors import DomainError
from .params import TWO_PI, Params, normalize_angle, polar_arrays, unit


@dataclass(frozen=True, eq=False)
class SphereMeasure:
    """Finite atoms plus (for N = 3) arcs of constant density on the circle.

    ``directions`` has shape ``(m, N-1)``; ``arcs`` holds ``(lo, hi)`` pairs
    with ``lo < hi <= lo + 2 pi``; every arc carries density ``arc_density``
    with respect to d(theta).
    """

    directions: np.ndarray
    masses: np.ndarray
    arcs: tuple = ()
    N: int = 3
    arc_density: float = 1.0
    _angles: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float).reshape(-1, self.N - 1)
        m = np.asarray(self.masses, dtype=float).reshape(-1)
        if d.shape[0] != m.shape[0]:
            raise DomainError("one mass per atom direction is required")
        if np.any(m <= 0) or not np.all(np.isfinite(m)):
            raise DomainError("atom masses must be positive and finite")
        if d.shape[0] and np.max(np.abs(np.linalg.norm(d, axis=1) - 1.0)) > 1e-12:
            raise DomainError("atom directions must be unit vectors")
        arcs = tuple((float(lo), float(hi)) for lo, hi in self.arcs)
        if arcs and self.N != 3:
            raise DomainError("arcs are only available for N = 3")
        for lo, hi in arcs:
            if not (lo < hi <= lo + TWO_PI + 1e-12):
                raise DomainError(f"arc ({lo}, {hi}) must satisfy lo < hi <= lo + 2 pi")
        if not (self.arc_density > 0):
            raise DomainError("arc density must be positive")
        object.__setattr__(self, "directions", d)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "arcs", arcs)
        if self.total_mass <= 0 or not math.isfinite(self.total_mass):
            raise DomainError("measure must have positive finite mass")

    @classmethod
    def from_angles(cls, atoms=(), arcs=(), arc_density=1.0):
        """Build an N = 3 measure from ``[(theta, mass), ...]`` and ``[(lo, hi), ...]``."""
        atoms = list(atoms)
        th = np.array([a for a, _ in atoms], dtype=float)
        m = np.array([w for _, w in atoms], dtype=float)
        return cls(unit(th).reshape(-1, 2), m, tuple(arcs), 3, float(arc_density), normalize_angle(th))

    @classmethod
    def dirac(cls, nu, mass=1.0):
        nu = np.asarray(nu, dtype=float).reshape(1, -1)
        return cls(nu, np.array([mass]), (), nu.shape[1] + 1)

    @classmethod
    def uniform_circle(cls, total_mass=TWO_PI):
        """Constant density on the whole circle; ``total_mass = 1`` gives d(theta)/2pi."""
        return cls(np.zeros((0, 2)), np.zeros(0), ((0.0, TWO_PI),), 3, total_mass / TWO_PI)

    @property
    def atom_angles(self):
        if self._angles is not None:
            return self._angles
        if self.N != 3:
            raise DomainError("angles only make sense on the circle")
        return normalize_angle(np.arctan2(self.directions[:, 1], self.directions[:, 0]))

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum() + self.arc_density * sum(hi - lo for lo, hi in self.arcs))

    def scaled(self, factor):
        return SphereMeasure(self.directions, self.masses * factor, self.arcs, self.N,
                             self.arc_density * factor, self._angles)

    def regularized(self, eps=1e-3):
        """Add eps at +-e_j for every coordinate axis (the mu + eps mu_1 augmentation)."""
        d = self.N - 1
        axes = np.vstack([np.eye(d), -np.eye(d)])
        dirs = np.vstack([self.directions, axes])
        masses = np.concatenate([self.masses, np.full(2 * d, float(eps))])
        return SphereMeasure(dirs, masses, self.arcs, self.N, self.arc_density)


@dataclass(frozen=True)
class MomentBundle:
    """Normalised moments of the tilted measure exp((b/2) x.nu) dmu at one point."""

    log_F1: float
    ratio_Fnu: np.ndarray
    ratio_Fnunu: np.ndarray

    @property
    def covariance(self):
        return self.ratio_Fnunu - np.outer(self.ratio_Fnu, self.ratio_Fnu)


def _arc_max_cos(lo, hi, theta_x):
    """Largest cos(theta - theta_x) over [lo, hi] and the angle attaining it."""
    off = (theta_x - lo) % TWO_PI
    if off <= hi - lo:
        return 1.0, lo + off
    c_lo, c_hi = math.cos(lo - theta_x), math.cos(hi - theta_x)
    return (c_lo, lo) if c_lo >= c_hi else (c_hi, hi)


def _arc_moments(lo, hi, kappa, theta_x, peak, shift, rtol):
    """int_lo^hi exp(kappa cos(t - theta_x) - shift) [1, cos, sin, cos^2, cos sin, sin^2] dt."""

    # kappa cos(t - theta_x) - shift = kappa (cos d - cos d0) - rest, with d0
    # the offset of the peak, so that the large exponent never cancels
    d0 = peak - theta_x
    rest = shift - kappa * math.cos(d0)

    def integrand(t):
        e = np.exp(kappa * quadrature.cos_drop(t - theta_x, d0) - rest)
        c, s = np.cos(t), np.sin(t)
        return np.vstack([e, e * c, e * s, e * c * c, e * c * s, e * s * s])

    width = 1.0 / math.sqrt(kappa) if kappa > 0 else math.inf
    bp = quadrature.peak_breakpoints(lo, hi, peak, width)
    vals, _, _ = quadrature.integrate(integrand, bp, rtol=rtol)
    return vals


def moments(mu: SphereMeasure, params: Params, x, rtol=1e-12) -> MomentBundle:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != mu.N - 1:
        raise DomainError(f"point has dimension {x.shape[0]}, measure lives on S^{mu.N - 2}")
    half_b = 0.5 * params.b
    s_atoms = mu.directions @ x
    arc_info = []
    if mu.arcs:
        r, th = polar_arrays(x)
        r, th = float(r), float(th)
        for lo, hi in mu.arcs:
            cmax, peak = _arc_max_cos(lo, hi, th)
            arc_info.append((lo, hi, r * cmax, peak))
    s_max = max([*s_atoms, *(a[2] for a in arc_info)])
    shift = half_b * s_max
    w = mu.masses * np.exp(half_b * (s_atoms - s_max))
    F1 = w.sum()
    Fnu = w @ mu.directions
    Fnunu = (mu.directions * w[:, None]).T @ mu.directions
    if arc_info:
        kappa = half_b * r
        for lo, hi, _, peak in arc_info:
            m = mu.arc_density * _arc_moments(lo, hi, kappa, th, peak, shift, rtol)
            F1 += m[0]
            Fnu = Fnu + m[1:3]
            Fnunu = Fnunu + np.array([[m[3], m[4]], [m[4], m[5]]])
    return MomentBundle(shift + math.log(F1), Fnu / F1, Fnunu / F1)


def eval_phi_star(mu, params, x, rtol=1e-12):
    return -params.log_scale * moments(mu, params, x, rtol).log_F1


def _grad_from(mb, params):
    return -params.cot_alpha * mb.ratio_Fnu


def _hess_from(mb, params):
    # c0 cos^2 a / (2 sin a) = cot a * b / 2
    return -(params.cot_alpha * 0.5 * params.b) * mb.covariance


def grad_phi_star(mu, params, x, rtol=1e-12):
    return _grad_from(moments(mu, params, x, rtol), params)


def hess_phi_star(mu, params, x, rtol=1e-12):
    return _hess_from(moments(mu, params, x, rtol), params)


def jet_phi_star(mu, params, x, rtol=1e-12):
    """Value, gradient and Hessian of phi_* from one moment evaluation."""
    mb = moments(mu, params, x, rtol)
    return -params.log_scale * mb.log_F1, _grad_from(mb, params), _hess_from(mb, params)


def viscous_eikonal_residual(mu, params, x, rtol=1e-12):
    _, g, H = jet_phi_star(mu, params, x, rtol)
    return -np.trace(H) - 0.5 * params.c0 * params.sin_alpha * (params.cot_alpha ** 2 - g @ g)


def mcm_from_derivatives(params: Params, g, H):
    """-div(Dphi / sqrt(1+|Dphi|^2)) + c0 - c / sqrt(1+|Dphi|^2) from gradient and Hessian."""
    g = np.asarray(g, dtype=float)
    H = np.asarray(H, dtype=float)
    q = 1.0 / math.sqrt(1.0 + g @ g)
    return -np.trace(H) * q + (g @ H @ g) * q ** 3 + params.c0 - params.c * q


def mcm_operator(evaluator, params, x):
    """Apply the travelling-graph operator to ``evaluator``, a callable x -> (value, grad, hess)."""
    _, g, H = evaluator(x)
    return mcm_from_derivatives(params, g, H)


class SubSolution:
    """Callable wrapper around (mu, params) with vectorised value evaluation."""

    def __init__(self, mu: SphereMeasure, params: Params, rtol=1e-12):
        if mu.N != params.N:
            raise DomainError("measure and params disagree on N")
        self.mu = mu
        self.params = params
        self.rtol = rtol

    def __call__(self, x):
        return self.values(x)

    def jet(self, x):
        return jet_phi_star(self.mu, self.params, x, self.rtol)

    def gradient(self, x):
        return grad_phi_star(self.mu, self.params, x, self.rtol)

    def hessian(self, x):
        return hess_phi_star(self.mu, self.params, x, self.rtol)

    def values(self, X):
        """phi_* at every row of ``X`` (shape ``(..., N-1)``)."""
        X = np.asarray(X, dtype=float)
        flat = X.reshape(-1, self.mu.N - 1)
        if not self.mu.arcs:
            s = flat @ self.mu.directions.T
            e = 0.5 * self.params.b * s
            top = e.max(axis=1, keepdims=True)
            lse = top[:, 0] + np.log(np.exp(e - top) @ self.mu.masses)
            out = -self.params.log_scale * lse
        else:
            out = np.array([eval_phi_star(self.mu, self.params, p, self.rtol) for p in flat])
        return out.reshape(X.shape[:-1])
