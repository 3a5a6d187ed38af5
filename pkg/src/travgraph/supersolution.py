"""Explicit super-solutions: planes, edges, arcs and the global N = 3 assembly.

A plane -cot(a) x.nu - (2/(c0 sin a)) ln(lambda) solves the travelling-graph
equation exactly, so any minimum of planes is a super-solution.  An arc
piece replaces the edge inside its angular window by the (shifted) cone
profile wherever that is lower; both agree at the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cone import ConeProfile, solve_cone
from .eikonal import PlaneSpec, ProfileN3, build_measure_N3, edge_distance_many, eval_inf_planes
from .errors import DomainError, OutOfRange
from .params import TWO_PI, Params, polar_arrays, unit
from .subsolution import SubSolution


def _planes(params, thetas, lams, X):
    X = np.asarray(X, dtype=float)
    flat = X.reshape(-1, 2)
    nu = unit(np.asarray(thetas, dtype=float))
    gam = params.gamma_from_lambda(np.asarray(lams, dtype=float))
    vals = -params.cot_alpha * flat @ nu.T + gam[None, :]
    return vals.min(axis=1).reshape(X.shape[:-1])


def eval_edge(params: Params, theta1, theta2, lam1, lam2, x):
    """min(p1, p2) with p_i(x) = -cot(a) x.nu_i - (2/(c0 sin a)) ln lambda_i."""
    if lam1 <= 0 or lam2 <= 0:
        raise DomainError("edge weights must be positive")
    out = _planes(params, [theta1, theta2], [lam1, lam2], x)
    return float(out) if np.ndim(out) == 0 else out


def eval_planes_inf(spec: PlaneSpec, x):
    """Minimum over the planes of ``spec`` (build it with PlaneSpec.from_weights)."""
    return eval_inf_planes(spec, x)[0]


@dataclass(frozen=True, eq=False)
class ArcPiece:
    """Edge between theta1 and theta2 with the cone profile glued in between.

    The cone is shifted so that its value at the origin equals that of both
    planes, -(2/(c0 sin a)) ln lambda.
    """

    theta1: float
    theta2: float
    lam: float
    profile: ConeProfile

    def __post_init__(self):
        if not (self.theta1 < self.theta2 <= self.theta1 + TWO_PI):
            raise DomainError("arc needs theta1 < theta2 <= theta1 + 2 pi")
        if not (self.lam > 0):
            raise DomainError("arc weight must be positive")

    @property
    def origin_value(self):
        return float(self.profile.params.gamma_from_lambda(self.lam)) + 0.0

    def edge(self, X):
        return _planes(self.profile.params, [self.theta1, self.theta2], [self.lam, self.lam], X)

    def cone(self, r):
        return self.profile.phi_raw(r) + self.origin_value

    def inside(self, theta):
        off = np.mod(np.asarray(theta, dtype=float) - self.theta1, TWO_PI)
        return (off > 0) & (off < self.theta2 - self.theta1)

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        flat = X.reshape(-1, 2)
        r, th = polar_arrays(flat)
        if np.any(r > self.profile.r_max * (1 + 1e-14)):
            raise OutOfRange(f"arc piece evaluated beyond the cone radius {self.profile.r_max}")
        out = self.edge(flat)
        ins = self.inside(th) & (r > 0)
        if np.any(ins):
            out[ins] = np.minimum(out[ins], self.cone(r[ins]))
        out[r == 0] = self.origin_value
        return out.reshape(X.shape[:-1])


def eval_arc(piece: ArcPiece, params: Params, x):
    if params != piece.profile.params:
        raise DomainError("arc piece was built for different parameters")
    out = piece(x)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class EdgePiece:
    theta1: float
    theta2: float
    lam: float
    params: Params

    def __call__(self, X):
        return _planes(self.params, [self.theta1, self.theta2], [self.lam, self.lam], X)


@dataclass(eq=False)
class GlobalSuperN3:
    """Minimum over per-sector pieces plus an additive constant ``C``."""

    profile: ProfileN3
    pieces: list
    shift: float = 0.0
    lambda0: float = 1.0
    sample_sup: float = field(default=0.0)

    @property
    def params(self):
        return self.profile.params

    def base(self, X):
        """The infimum over pieces before the shift."""
        X = np.asarray(X, dtype=float)
        vals = np.stack([np.asarray(p(X), dtype=float) for p in self.pieces])
        return vals.min(axis=0)

    def piece_values(self, X):
        return np.stack([np.asarray(p(X), dtype=float) for p in self.pieces])

    def __call__(self, X):
        return self.base(X) + self.shift


def default_sample(r_max, n_r=40, n_theta=96):
    """Fixed polar sample used to calibrate the global constant."""
    radii = np.concatenate([[0.0], np.geomspace(0.05, r_max, n_r - 1)])
    radii = np.minimum(radii, r_max)
    th = TWO_PI * (np.arange(n_theta) + 0.5) / n_theta
    R, TH = np.meshgrid(radii, th, indexing="ij")
    return np.column_stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel()])


def assemble_global_N3(profile_source, profileN3: ProfileN3, lambda0, params: Params,
                       sample=None, margin=1e-6) -> GlobalSuperN3:
    """Per-sector pieces with weight 2 lambda0 and the calibrated constant C.

    ``profile_source`` is a ConeProfile, or None to solve one out to r = 400.
    C = max(0, sup(phi_* - inf pieces)) + margin over ``sample`` (default: a
    polar grid inside the cone radius).  The k = 2 all-edge case gives the
    plain two-plane infimum.
    """
    if profileN3.k < 2:
        raise DomainError("global assembly needs k >= 2 angles")
    if not (lambda0 > 0):
        raise DomainError("lambda0 must be positive")
    if profileN3.params != params:
        raise DomainError("profile and params disagree")
    lam = 2.0 * lambda0
    need_cone = any(profileN3.sigma)
    cone = None
    if need_cone:
        cone = profile_source if profile_source is not None else solve_cone(params, 400.0)
    pieces = []
    for i in range(profileN3.k):
        lo, hi = profileN3.sector_bounds(i)
        if profileN3.sigma[i]:
            pieces.append(ArcPiece(float(lo), float(hi), lam, cone))
        else:
            pieces.append(EdgePiece(float(lo), float(hi), lam, params))
    sup = GlobalSuperN3(profileN3, pieces, 0.0, float(lambda0))
    if sample is None:
        r_max = cone.r_max if cone is not None else 400.0
        sample = default_sample(r_max)
    low = SubSolution(build_measure_N3(profileN3, lambda0), params)
    gap = low.values(sample) - sup.base(sample)
    worst = float(np.max(gap))
    sup.sample_sup = worst
    sup.shift = max(0.0, worst) + margin
    return sup


@dataclass
class SandwichReport:
    gap_min: float
    gap_max: float
    worst_violation: float
    worst_point: np.ndarray | None
    decay: list

    @property
    def ok(self):
        return self.worst_violation <= 0.0


def sandwich_report(phi_low, phi_high, samples, normals=None, tol=0.0, levels=(1, 2, 5, 10, 15)):
    """Compare two fields on ``samples`` (shape (n, 2)).

    The gap is phi_high - phi_low.  ``worst_violation`` is the largest amount
    by which the gap falls below -tol (0 when the ordering holds).  When the
    plane ``normals`` are given, ``decay`` lists (l, max gap over points at
    edge distance >= l) for each level.
    """
    S = np.asarray(samples, dtype=float).reshape(-1, 2)
    lo = np.asarray(phi_low(S), dtype=float).reshape(-1)
    hi = np.asarray(phi_high(S), dtype=float).reshape(-1)
    gap = hi - lo
    i = int(np.argmin(gap))
    viol = max(0.0, -tol - float(gap[i]))
    decay = []
    if normals is not None:
        d = edge_distance_many(np.asarray(normals, dtype=float), S)
        for l in levels:
            sel = d >= l
            decay.append((float(l), float(np.max(gap[sel])) if np.any(sel) else math.nan))
    return SandwichReport(float(gap.min()), float(gap.max()), viol,
                          S[i].copy() if viol > 0 else None, decay)


def kink_jump(fn, x, normal, h=1e-6):
    """One-sided slopes of ``fn`` across a kink at ``x`` along ``normal``.

    Returns ``right - left``; a concave kink (minimum of smooth pieces, which
    no smooth function can touch from below) gives a nonpositive value.
    """
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    x = np.asarray(x, dtype=float)
    f0 = float(fn(x[None, :])[0])
    right = (float(fn((x + h * n)[None, :])[0]) - f0) / h
    left = (f0 - float(fn((x - h * n)[None, :])[0])) / h
    return right - left


def write_field_csv(path, fn, X):
    from .io import write_xyz
    X = np.asarray(X, dtype=float).reshape(-1, 2)
    write_xyz(path, X, fn(X))
