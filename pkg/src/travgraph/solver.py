"""Damped Newton solver for the travelling-graph equation on a 2-D grid.

The discrete operator at an interior node is

    F = -tr(M) q + (p.Mp) q^3 + c0 - c q,    q = (1 + |p|^2)^(-1/2),

with p and M from second-order central differences (the mixed derivative
uses the four diagonal neighbours).  Boundary nodes carry Dirichlet data and
never change.  The Jacobian is assembled exactly as a sparse 9-point matrix
and factorised with SuperLU.
"""
from __future__ import annotations

import csv
import logging
import math
import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .eikonal import PlaneSpec, edge_distance_many
from .errors import DomainError, LinearSolveFailure, NonConvergence, SandwichViolation
from .params import Params
from .subsolution import SphereMeasure, SubSolution

log = logging.getLogger(__name__)

MAGIC = b"TGRD"
_HEADER = struct.Struct("<4sIIddd")


@dataclass(eq=False)
class GridField:
    """Node values on the rectangle [x0, x0 + (nx-1) h] x [y0, y0 + (ny-1) h].

    ``values[i, j]`` sits at (x0 + i h, y0 + j h).  The outer ring of nodes is
    the Dirichlet boundary.
    """

    x0: float
    y0: float
    h: float
    values: np.ndarray
    history: list = field(default_factory=list)

    def __post_init__(self):
        if not (self.h > 0):
            raise DomainError("grid spacing must be positive")
        self.values = np.array(self.values, dtype=float)
        if self.values.ndim != 2 or min(self.values.shape) < 3:
            raise DomainError("a grid needs at least 3 x 3 nodes")

    @classmethod
    def on_domain(cls, domain, h, fn=None):
        (a1, b1), (a2, b2) = domain
        nx = int(round((b1 - a1) / h)) + 1
        ny = int(round((b2 - a2) / h)) + 1
        if abs(a1 + (nx - 1) * h - b1) > 1e-9 * max(1.0, abs(b1)) or \
                abs(a2 + (ny - 1) * h - b2) > 1e-9 * max(1.0, abs(b2)):
            raise DomainError("domain sides must be multiples of h")
        out = cls(float(a1), float(a2), float(h), np.zeros((nx, ny)))
        if fn is not None:
            out.values = np.asarray(fn(out.points()), dtype=float).reshape(nx, ny)
        return out

    @property
    def shape(self):
        return self.values.shape

    @property
    def domain(self):
        nx, ny = self.shape
        return (self.x0, self.x0 + (nx - 1) * self.h), (self.y0, self.y0 + (ny - 1) * self.h)

    def axes(self):
        nx, ny = self.shape
        return self.x0 + self.h * np.arange(nx), self.y0 + self.h * np.arange(ny)

    def points(self):
        """Node coordinates, shape (nx, ny, 2)."""
        x, y = self.axes()
        X, Y = np.meshgrid(x, y, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def interior_points(self):
        return self.points()[1:-1, 1:-1]

    def interior(self):
        return self.values[1:-1, 1:-1]

    def copy(self):
        return GridField(self.x0, self.y0, self.h, self.values.copy(), list(self.history))

    def to_csv(self, path):
        P = self.points().reshape(-1, 2)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x1", "x2", "value"])
            for (a, b), v in zip(P, self.values.reshape(-1)):
                w.writerow([repr(float(a)), repr(float(b)), repr(float(v))])

    def to_binary(self, path):
        """Header: magic 'TGRD', nx, ny (uint32), h, x0, y0 (float64); then values row-major, little-endian."""
        nx, ny = self.shape
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, nx, ny, self.h, self.x0, self.y0))
            fh.write(self.values.astype("<f8").tobytes(order="C"))

    @classmethod
    def from_binary(cls, path):
        with open(path, "rb") as fh:
            head = fh.read(_HEADER.size)
            magic, nx, ny, h, x0, y0 = _HEADER.unpack(head)
            if magic != MAGIC:
                raise DomainError("not a grid file")
            data = np.frombuffer(fh.read(), dtype="<f8")
        if data.size != nx * ny:
            raise DomainError("grid file is truncated")
        return cls(x0, y0, h, data.reshape(nx, ny).astype(float))

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        xs, ys = np.unique(data[:, 0]), np.unique(data[:, 1])
        h = float(xs[1] - xs[0])
        return cls(float(xs[0]), float(ys[0]), h, data[:, 2].reshape(xs.size, ys.size))


@dataclass(frozen=True)
class NewtonOptions:
    max_iters: int = 50
    residual_tol: float = 1e-10
    damping: float = 1.0
    backtrack: float = 0.5
    max_backtracks: int = 30
    polish: int = 1
    lift_boundary: bool = True

    def __post_init__(self):
        if self.residual_tol < 1e-12:
            raise DomainError("residual_tol must be at least 1e-12")
        if not (0 < self.damping <= 1) or not (0 < self.backtrack < 1):
            raise DomainError("damping must lie in (0, 1] and backtrack in (0, 1)")
        if self.max_iters < 1:
            raise DomainError("max_iters must be positive")


def _derivatives(u, h):
    c = u[1:-1, 1:-1]
    px = (u[2:, 1:-1] - u[:-2, 1:-1]) / (2 * h)
    py = (u[1:-1, 2:] - u[1:-1, :-2]) / (2 * h)
    uxx = (u[2:, 1:-1] - 2 * c + u[:-2, 1:-1]) / (h * h)
    uyy = (u[1:-1, 2:] - 2 * c + u[1:-1, :-2]) / (h * h)
    uxy = (u[2:, 2:] - u[2:, :-2] - u[:-2, 2:] + u[:-2, :-2]) / (4 * h * h)
    return px, py, uxx, uyy, uxy


def _operator(params, px, py, uxx, uyy, uxy):
    q = 1.0 / np.sqrt(1.0 + px * px + py * py)
    pMp = px * px * uxx + 2 * px * py * uxy + py * py * uyy
    return -(uxx + uyy) * q + pMp * q ** 3 + params.c0 - params.c * q


def residual_field(field_: GridField, params: Params):
    """Discrete operator at interior nodes, shape (nx-2, ny-2)."""
    return _operator(params, *_derivatives(field_.values, field_.h))


def discrete_hessian(field_: GridField):
    _, _, uxx, uyy, uxy = _derivatives(field_.values, field_.h)
    return uxx, uyy, uxy


def _jacobian(params, u, h):
    px, py, uxx, uyy, uxy = _derivatives(u, h)
    q = 1.0 / np.sqrt(1.0 + px * px + py * py)
    q3 = q ** 3
    tr = uxx + uyy
    pMp = px * px * uxx + 2 * px * py * uxy + py * py * uyy
    A = -q + px * px * q3
    B = -q + py * py * q3
    Cxy = 2 * px * py * q3
    Px = px * q3 * (tr + params.c) + 2 * (uxx * px + uxy * py) * q3 - 3 * pMp * px * q ** 5
    Py = py * q3 * (tr + params.c) + 2 * (uxy * px + uyy * py) * q3 - 3 * pMp * py * q ** 5
    h2 = h * h
    mx, my = A.shape
    idx = np.arange(mx * my).reshape(mx, my)
    stencil = [
        (0, 0, -2 * (A + B) / h2),
        (1, 0, A / h2 + Px / (2 * h)), (-1, 0, A / h2 - Px / (2 * h)),
        (0, 1, B / h2 + Py / (2 * h)), (0, -1, B / h2 - Py / (2 * h)),
        (1, 1, Cxy / (4 * h2)), (-1, -1, Cxy / (4 * h2)),
        (1, -1, -Cxy / (4 * h2)), (-1, 1, -Cxy / (4 * h2)),
    ]
    rows, cols, vals = [], [], []
    for di, dj, w in stencil:
        # rows whose neighbour (i+di, j+dj) is an interior unknown
        i0, i1 = max(0, -di), mx - max(0, di)
        j0, j1 = max(0, -dj), my - max(0, dj)
        rows.append(idx[i0:i1, j0:j1].ravel())
        cols.append(idx[i0 + di:i1 + di, j0 + dj:j1 + dj].ravel())
        vals.append(w[i0:i1, j0:j1].ravel())
    n = mx * my
    return sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))


def harmonic_lift(values):
    """Discrete harmonic function with the rim of ``values`` as boundary data."""
    mx, my = values.shape[0] - 2, values.shape[1] - 2
    out = np.array(values, dtype=float)

    def second(n):
        return sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n))

    # row-major ordering: index i * my + j
    A = (sp.kron(second(mx), sp.eye(my)) + sp.kron(sp.eye(mx), second(my))).tocsc()
    rhs = np.zeros((mx, my))
    rhs[0, :] -= out[0, 1:-1]
    rhs[-1, :] -= out[-1, 1:-1]
    rhs[:, 0] -= out[1:-1, 0]
    rhs[:, -1] -= out[1:-1, -1]
    out[1:-1, 1:-1] = splu(A).solve(rhs.ravel()).reshape(mx, my)
    return out


def solve_dirichlet(domain, h, boundary_fn, initial_fn, params: Params, opts: NewtonOptions | None = None) -> GridField:
    """Newton iteration for the discrete equation with boundary values from ``boundary_fn``.

    ``boundary_fn`` and ``initial_fn`` map an array of points (..., 2) to
    values.  The returned field records (iteration, max residual, step) in
    ``history``.

    With ``opts.lift_boundary`` the mismatch between the boundary data and
    the initial guess on the rim is extended harmonically into the interior
    before iterating.  Without it a sub-solution guess under super-solution
    data leaves an O(1/h) jump next to the rim, and Newton diverges.
    """
    if params.N != 3:
        raise DomainError("the grid solver is two-dimensional (N = 3)")
    opts = opts or NewtonOptions()
    grid = GridField.on_domain(domain, h, initial_fn)
    bnd = GridField.on_domain(domain, h, boundary_fn)
    u = grid.values
    rim = np.ones(u.shape, dtype=bool)
    rim[1:-1, 1:-1] = False
    if opts.lift_boundary:
        gap = np.where(rim, bnd.values - u, 0.0)
        u += harmonic_lift(gap)
    u[rim] = bnd.values[rim]
    res = residual_field(grid, params)
    norm = float(np.max(np.abs(res)))
    merit = float(np.linalg.norm(res))
    grid.history.append((0, norm, 0.0))
    polished = 0
    for it in range(1, opts.max_iters + 1):
        if norm <= opts.residual_tol:
            if polished >= opts.polish:
                break
            polished += 1
        J = _jacobian(params, u, h)
        try:
            du = splu(J).solve(-res.ravel())
        except RuntimeError as exc:
            raise LinearSolveFailure(str(exc)) from exc
        if not np.all(np.isfinite(du)):
            raise LinearSolveFailure("linear solve produced non-finite values")
        du = du.reshape(res.shape)
        # backtrack on the Euclidean norm, for which the Newton direction is a descent direction
        t = opts.damping
        base = u[1:-1, 1:-1].copy()
        for _ in range(opts.max_backtracks):
            u[1:-1, 1:-1] = base + t * du
            trial = residual_field(grid, params)
            tmerit = float(np.linalg.norm(trial))
            if tmerit < merit or (norm <= opts.residual_tol and np.max(np.abs(trial)) <= opts.residual_tol):
                break
            t *= opts.backtrack
        else:
            u[1:-1, 1:-1] = base
            if norm <= opts.residual_tol:
                break
            raise NonConvergence(f"line search failed at iteration {it} (residual {norm:.3e})")
        res, merit = trial, tmerit
        norm = float(np.max(np.abs(res)))
        grid.history.append((it, norm, t))
        log.debug("newton %d: residual %.3e step %.3g", it, norm, t)
    if norm > opts.residual_tol:
        raise NonConvergence(f"residual {norm:.3e} after {opts.max_iters} iterations")
    return grid


@dataclass
class SandwichCheck:
    lower_margin: float
    upper_margin: float
    gap_min: float
    decay: list
    worst_node: tuple | None = None

    @property
    def ok(self):
        return self.worst_node is None


def verify_sandwich(field_: GridField, mu: SphereMeasure, spec: PlaneSpec, tol, levels=(2, 5, 10, 15),
                    raise_on_fail=True) -> SandwichCheck:
    """Check phi_* - tol <= field <= phi^* + tol at every interior node.

    ``lower_margin`` = min(field - phi_*), ``upper_margin`` = min(phi^* - field),
    ``gap_min`` = min(field - phi^*), and ``decay`` lists (l, max |field - phi^*|)
    over nodes at edge distance >= l.
    """
    P = field_.interior_points()
    u = field_.interior()
    low = SubSolution(mu, spec.params).values(P)
    high = spec(P)
    lower = u - low
    upper = high - u
    bad = (lower < -tol) | (upper < -tol)
    worst = None
    if np.any(bad):
        score = np.minimum(lower, upper)
        k = np.unravel_index(int(np.argmin(np.where(bad, score, np.inf))), score.shape)
        worst = (int(k[0]) + 1, int(k[1]) + 1)
    decay = []
    if spec.k >= 2:
        d = edge_distance_many(spec.normals[spec.finite], P)
        gap = np.abs(u - high)
        for l in levels:
            sel = d >= l
            decay.append((float(l), float(np.max(gap[sel])) if np.any(sel) else math.nan))
    out = SandwichCheck(float(lower.min()), float(upper.min()), float((u - high).min()), decay, worst)
    if worst is not None and raise_on_fail:
        x = field_.points()[worst]
        raise SandwichViolation(f"sandwich violated at node {worst} (x = {x[0]:.6g}, {x[1]:.6g})", node=worst)
    return out


def _rim_distance(field_: GridField):
    P = field_.interior_points()
    (a1, b1), (a2, b2) = field_.domain
    return np.minimum.reduce([P[..., 0] - a1, b1 - P[..., 0], P[..., 1] - a2, b2 - P[..., 1]])


def concavity_probe(field_: GridField, margin=0.0):
    """Largest eigenvalue of the discrete Hessian over interior nodes.

    ``margin`` > 0 skips nodes closer than that to the rim, where kinked
    super-solution boundary data leaves a convex boundary layer.
    """
    if min(field_.shape) < 7:
        raise DomainError("concavity probe needs at least 5 x 5 interior nodes")
    uxx, uyy, uxy = discrete_hessian(field_)
    half_tr = 0.5 * (uxx + uyy)
    rad = np.sqrt(0.25 * (uxx - uyy) ** 2 + uxy ** 2)
    top = half_tr + rad
    sel = _rim_distance(field_) >= margin
    if not np.any(sel):
        raise DomainError("margin leaves no interior nodes")
    return float(np.max(top[sel]))


def gradient_norm(field_: GridField, margin=0.0):
    """|D phi_h| at interior nodes (nodes within ``margin`` of the rim set to nan)."""
    px, py, *_ = _derivatives(field_.values, field_.h)
    g = np.hypot(px, py)
    if margin > 0:
        g = np.where(_rim_distance(field_) >= margin, g, np.nan)
    return g
