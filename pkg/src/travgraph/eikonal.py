"""Viscosity solutions of |D phi| = cot(alpha) written as infima of planes.

A plane family is a list of unit normals nu_i with offsets gamma_i in
(-inf, +inf]; the represented function is

    phi(x) = min_i ( -cot(alpha) x.nu_i + gamma_i ).

Entries with gamma = +inf are kept (they mark directions outside the support)
but never win the minimum.  For N = 3 the 1-homogeneous solutions with
finitely many gradient jumps are also described by an angular profile
psi(theta) (see ProfileN3).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpec, DomainError, EmptySet
from .params import TWO_PI, Params, normalize_angle, polar_arrays, unit
from .subsolution import SphereMeasure


@dataclass(frozen=True, eq=False)
class PlaneSpec:
    normals: np.ndarray
    gammas: np.ndarray
    params: Params

    def __post_init__(self):
        d = self.params.dim
        nu = np.asarray(self.normals, dtype=float).reshape(-1, d)
        g = np.asarray(self.gammas, dtype=float).reshape(-1)
        if nu.shape[0] != g.shape[0]:
            raise DomainError("one offset per normal is required")
        if nu.shape[0] == 0:
            raise DomainError("a plane family needs at least one entry")
        if np.max(np.abs(np.linalg.norm(nu, axis=1) - 1.0)) > 1e-12:
            raise DomainError("plane normals must be unit vectors")
        if np.any(np.isnan(g)) or np.any(g == -np.inf):
            raise DomainError("offsets must lie in (-inf, +inf]")
        if not np.any(np.isfinite(g)):
            raise DomainError("at least one offset must be finite")
        object.__setattr__(self, "normals", nu)
        object.__setattr__(self, "gammas", g)

    @classmethod
    def from_angles(cls, angles, params, gammas=None):
        angles = np.atleast_1d(np.asarray(angles, dtype=float))
        g = np.zeros(angles.size) if gammas is None else gammas
        return cls(unit(angles), g, params)

    @classmethod
    def from_weights(cls, normals, lambdas, params):
        """Planes -cot(a) x.nu_i - (2/(c0 sin a)) ln lambda_i, the super-solution family."""
        lam = np.asarray(lambdas, dtype=float)
        if np.any(lam <= 0):
            raise DomainError("plane weights must be positive")
        return cls(normals, params.gamma_from_lambda(lam), params)

    @classmethod
    def equispaced(cls, k, params, phase=0.0):
        return cls.from_angles(phase + TWO_PI * np.arange(k) / k, params)

    @property
    def k(self):
        return self.normals.shape[0]

    @property
    def finite(self):
        return np.isfinite(self.gammas)

    def homogeneous(self):
        """The 1-homogeneous solution with the same finite-offset directions."""
        keep = self.finite
        return PlaneSpec(self.normals[keep], np.zeros(int(keep.sum())), self.params)

    def matched_measure(self):
        """Atoms lambda_i = exp(-gamma_i c0 sin(a) / 2) at the finite-offset normals."""
        keep = self.finite
        lam = self.params.lambda_from_gamma(self.gammas[keep])
        return SphereMeasure(self.normals[keep], lam, (), self.params.N)

    def edges(self):
        return EdgeSet.from_normals(self.normals[self.finite])

    def __call__(self, X):
        return eval_inf_planes_many(self, X)


@dataclass(frozen=True, eq=False)
class EdgeSet:
    """Hyperplane normals nu_i - nu_j of every pair of distinct directions."""

    pairs: tuple
    generators: np.ndarray
    delta: float

    @classmethod
    def from_normals(cls, normals):
        nu = _distinct(np.asarray(normals, dtype=float))
        pairs = tuple(itertools.combinations(range(nu.shape[0]), 2))
        gens = np.array([nu[i] - nu[j] for i, j in pairs]).reshape(len(pairs), nu.shape[1])
        delta = float(np.min(np.linalg.norm(gens, axis=1))) if pairs else 0.0
        return cls(pairs, gens, delta)


def _distinct(nu, tol=1e-12):
    out = []
    for v in nu:
        if not any(np.linalg.norm(v - w) <= tol for w in out):
            out.append(v)
    return np.array(out).reshape(-1, nu.shape[1])


def eval_inf_planes(spec: PlaneSpec, x):
    """``(value, argmin)`` of min_i (-cot a x.nu_i + gamma_i); ties go to the smallest index."""
    x = np.asarray(x, dtype=float).reshape(-1)
    vals = -spec.params.cot_alpha * (spec.normals @ x) + spec.gammas
    i = int(np.argmin(vals))
    return float(vals[i]), i


def eval_inf_planes_many(spec: PlaneSpec, X):
    X = np.asarray(X, dtype=float)
    flat = X.reshape(-1, spec.params.dim)
    vals = -spec.params.cot_alpha * (flat @ spec.normals.T) + spec.gammas[None, :]
    return vals.min(axis=1).reshape(X.shape[:-1])


def edge_distance(spec: PlaneSpec, x):
    """Distance from ``x`` to the edge set of the homogeneous infimum of ``spec``'s directions.

    With i0 the direction maximising x.nu, the point sits in the convex cell
    K_i0 = {y : y.(nu_i0 - nu_j) >= 0 for all j}, and its distance to the
    edges is the distance to the nearest bounding hyperplane (nu_i0 - nu_j)^perp.
    """
    if not np.all(spec.finite):
        raise DomainError("edge distance needs every offset finite")
    nu = _distinct(spec.normals)
    if nu.shape[0] < 2:
        raise DegenerateSpec("fewer than two distinct directions: the edge set is empty")
    return edge_distance_many(nu, np.asarray(x, dtype=float).reshape(1, -1))[0]


def edge_distance_many(normals, X):
    """Vectorised edge distance for distinct unit ``normals`` at rows of ``X``."""
    nu = np.asarray(normals, dtype=float)
    X = np.asarray(X, dtype=float)
    flat = X.reshape(-1, nu.shape[1])
    s = flat @ nu.T
    i0 = np.argmax(s, axis=1)
    top = s[np.arange(flat.shape[0]), i0]
    # distance to (nu_i0 - nu_j)^perp is (x.nu_i0 - x.nu_j) / |nu_i0 - nu_j|
    gaps = np.linalg.norm(nu[i0][:, None, :] - nu[None, :, :], axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = (top[:, None] - s) / gaps
    d[gaps == 0] = np.inf
    return np.maximum(d.min(axis=1), 0.0).reshape(X.shape[:-1])


@dataclass(frozen=True, eq=False)
class ProfileN3:
    """Angular profile of a 1-homogeneous eikonal solution on R^2 with finitely many jumps.

    On the sector [theta_i, theta_{i+1}] the profile is either flat at
    -cot(alpha) (sigma_i = 1, a cone piece) or the minimum of the two planes
    with normals at the sector ends (sigma_i = 0).  Sector k wraps around:
    theta_{k+1} = theta_1 + 2 pi.
    """

    angles: np.ndarray
    sigma: tuple
    params: Params

    def __post_init__(self):
        th = np.asarray(self.angles, dtype=float).reshape(-1)
        sig = tuple(int(s) for s in self.sigma)
        if th.size == 0 or th.size != len(sig):
            raise DomainError("need k >= 1 angles and one flag per angle")
        if any(s not in (0, 1) for s in sig):
            raise DomainError("sigma flags must be 0 or 1")
        if np.any(th < 0) or np.any(th >= TWO_PI) or np.any(np.diff(th) <= 0):
            raise DomainError("angles must be strictly increasing in [0, 2 pi)")
        k = th.size
        if k >= 2 and any(sig[i] * sig[(i + 1) % k] for i in range(k)):
            raise DomainError("adjacent cone sectors (sigma_i = sigma_{i+1} = 1) are not allowed")
        if self.params.N != 3:
            raise DomainError("angular profiles need N = 3")
        object.__setattr__(self, "angles", th)
        object.__setattr__(self, "sigma", sig)

    @property
    def k(self):
        return self.angles.size

    def sector_bounds(self, i):
        th = self.angles
        return th[i], (th[i + 1] if i + 1 < self.k else th[0] + TWO_PI)

    def sector_of(self, theta):
        """Index i with theta in [theta_i, theta_{i+1}) (cyclically)."""
        off = normalize_angle(np.asarray(theta, dtype=float) - self.angles[0])
        rel = self.angles - self.angles[0]
        return np.searchsorted(rel, off, side="right") - 1

    def support(self):
        """Directions where psi = -cot(alpha): the jump-free part K of the circle."""
        pts = [float(t) for t in self.angles]
        arcs = [self.sector_bounds(i) for i in range(self.k) if self.sigma[i]]
        return pts, arcs

    def plane_spec(self, arc_samples=256):
        """Plane family reproducing r psi(theta): all sector ends plus dense arc directions."""
        pts, arcs = self.support()
        dirs = list(pts)
        for lo, hi in arcs:
            n = max(2, int(math.ceil(arc_samples * (hi - lo) / TWO_PI)) + 1)
            dirs.extend(np.linspace(lo, hi, n))
        return PlaneSpec.from_angles(np.array(dirs), self.params)


def eval_psi(profile: ProfileN3, theta):
    theta = np.asarray(theta, dtype=float)
    T = profile.params.cot_alpha
    i = profile.sector_of(theta)
    ends = np.append(profile.angles[1:], profile.angles[0] + TWO_PI)
    lo, hi = profile.angles[i], ends[i]
    t = lo + normalize_angle(theta - lo)
    flat = np.asarray(profile.sigma)[i] == 1
    first = t <= 0.5 * (lo + hi)
    val = np.where(first, -T * np.cos(t - lo), -T * np.cos(t - hi))
    val = np.where(flat, -T, val)
    return float(val) if val.ndim == 0 else val


def eval_phi_infinity(profile: ProfileN3, X):
    """r psi(theta) at the rows of ``X``."""
    r, th = polar_arrays(X)
    return r * eval_psi(profile, th)


def build_measure_N3(profile: ProfileN3, lambda0) -> SphereMeasure:
    if not (lambda0 > 0):
        raise DomainError("lambda0 must be positive")
    k = profile.k
    if k == 1 and profile.sigma[0] == 1:
        lo = float(profile.angles[0])
        return SphereMeasure.from_angles((), [(lo, lo + TWO_PI)])
    mass = {}
    arcs = []
    for i in range(k):
        lo, hi = profile.sector_bounds(i)
        for t in (lo, hi):
            key = round(float(normalize_angle(t)), 12)
            if key >= round(TWO_PI, 12):
                key = 0.0
            mass[key] = mass.get(key, 0.0) + float(lambda0)
        if profile.sigma[i]:
            arcs.append((float(lo), float(hi)))
    atoms = sorted(mass.items())
    return SphereMeasure.from_angles(atoms, arcs)


def cover_compact(nearest, depth, N=3):
    """Dyadic cube decomposition of a compact K on S^(N-2) and one direction of K per cube.

    ``nearest`` maps an ``(n, N-1)`` array of points to the nearest points of K
    (rows of NaN when K is empty).  A cube is kept when the nearest point of K
    to its centre is within half its diagonal, i.e. the cube's circumscribed
    ball meets K.  Returns the list of representatives of the retained cubes
    at every level 0..depth, level by level.
    """
    if not (0 <= depth <= 24):
        raise DomainError("depth must lie in [0, 24]")
    d = N - 1
    centres = np.zeros((1, d))
    width = 2.0
    reps = []
    children = np.array(list(itertools.product((-0.25, 0.25), repeat=d)))
    for level in range(depth + 1):
        near = np.asarray(nearest(centres), dtype=float).reshape(-1, d)
        dist = np.linalg.norm(near - centres, axis=1)
        keep = np.isfinite(dist) & (dist <= 0.5 * width * math.sqrt(d) * (1 + 1e-12))
        if level == 0 and not np.any(keep):
            raise EmptySet("no cube at level 0 meets K")
        centres = centres[keep]
        reps.extend(near[keep])
        if level < depth:
            centres = (centres[:, None, :] + width * children[None, :, :]).reshape(-1, d)
            width *= 0.5
    return [np.asarray(r) for r in reps]


def nearest_on_arc(lo, hi):
    """Projection onto the arc {(cos t, sin t) : lo <= t <= hi} of the unit circle."""

    def nearest(P):
        P = np.asarray(P, dtype=float).reshape(-1, 2)
        th = np.arctan2(P[:, 1], P[:, 0])
        off = np.mod(th - lo, TWO_PI)
        inside = off <= hi - lo
        to_lo = np.minimum(off, TWO_PI - off)
        end_off = np.mod(th - hi, TWO_PI)
        to_hi = np.minimum(end_off, TWO_PI - end_off)
        t = np.where(inside, lo + off, np.where(to_lo <= to_hi, lo, hi))
        # the centre of the circle is equidistant from everything; pick the start
        t = np.where(np.hypot(P[:, 0], P[:, 1]) == 0, lo, t)
        return unit(t)

    return nearest


def nearest_on_points(points):
    """Projection onto a finite set of unit vectors."""
    Q = np.asarray(points, dtype=float)

    def nearest(P):
        P = np.asarray(P, dtype=float).reshape(-1, Q.shape[1])
        d = np.linalg.norm(P[:, None, :] - Q[None, :, :], axis=2)
        return Q[np.argmin(d, axis=1)]

    return nearest


def covering_radius(reps, nearest_samples):
    """Largest distance from a dense sample of K to the closest representative."""
    R = np.asarray(reps)
    S = np.asarray(nearest_samples)
    d = np.linalg.norm(S[:, None, :] - R[None, :, :], axis=2)
    return float(d.min(axis=1).max())
