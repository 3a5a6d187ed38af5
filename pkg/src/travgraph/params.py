"""Physical constants of the travelling-graph problem and polar coordinates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Params:
    """Constants tying together the front speed, the forcing and the cone angle.

    ``c = c0 / sin(alpha)`` is the vertical speed of the graph, ``b = c0 cos(alpha)``
    is the Hopf-Cole exponent scale and ``cot_alpha`` is the slope of the
    asymptotic cone.  ``N`` is the space dimension, graphs live over R^(N-1).
    """

    alpha: float
    c0: float
    N: int = 3
    c: float = field(init=False)
    b: float = field(init=False)
    cot_alpha: float = field(init=False)
    sin_alpha: float = field(init=False)
    cos_alpha: float = field(init=False)

    def __post_init__(self):
        alpha, c0, N = self.alpha, self.c0, self.N
        if not (0.0 < alpha <= math.pi / 2) or not math.isfinite(alpha):
            raise DomainError(f"alpha must lie in (0, pi/2], got {alpha!r}")
        if not (c0 > 0.0) or not math.isfinite(c0):
            raise DomainError(f"c0 must be positive, got {c0!r}")
        if int(N) != N or N < 2:
            raise DomainError(f"N must be an integer >= 2, got {N!r}")
        s = math.sin(alpha)
        # cos(pi/2) is 6e-17 in floating point; the planar case must be exact
        co = 0.0 if alpha == math.pi / 2 else math.cos(alpha)
        object.__setattr__(self, "N", int(N))
        object.__setattr__(self, "sin_alpha", s)
        object.__setattr__(self, "cos_alpha", co)
        object.__setattr__(self, "c", c0 / s)
        object.__setattr__(self, "b", c0 * co)
        object.__setattr__(self, "cot_alpha", co / s)

    @property
    def dim(self) -> int:
        """Dimension of the base space R^(N-1)."""
        return self.N - 1

    @property
    def log_scale(self) -> float:
        """The factor 2 / (c0 sin alpha) in front of every logarithm."""
        return 2.0 / (self.c0 * self.sin_alpha)

    @property
    def planar(self) -> bool:
        return self.cos_alpha == 0.0

    def gamma_from_lambda(self, lam):
        """Plane offset matching an atom of mass ``lam``: -(2/(c0 sin a)) ln lam."""
        return -self.log_scale * np.log(lam)

    def lambda_from_gamma(self, gamma):
        return np.exp(-np.asarray(gamma, dtype=float) / self.log_scale)


def make_params(alpha: float, c0: float, N: int = 3) -> Params:
    return Params(float(alpha), float(c0), N)


@dataclass(frozen=True)
class PolarPoint:
    r: float
    theta: float


def normalize_angle(theta):
    """Map angles to [0, 2 pi)."""
    t = np.mod(theta, TWO_PI)
    # mod can round up to exactly 2 pi for tiny negative inputs
    if np.ndim(t) == 0:
        t = float(t)
        return 0.0 if t >= TWO_PI else t
    t[t >= TWO_PI] = 0.0
    return t


def to_polar(x) -> PolarPoint:
    x1, x2 = float(x[0]), float(x[1])
    r = math.hypot(x1, x2)
    if r == 0.0:
        return PolarPoint(0.0, 0.0)
    return PolarPoint(r, normalize_angle(math.atan2(x2, x1)))


def from_polar(p: PolarPoint) -> np.ndarray:
    return np.array([p.r * math.cos(p.theta), p.r * math.sin(p.theta)])


def polar_arrays(x):
    """Vectorised polar decomposition of an (..., 2) array: returns (r, theta)."""
    x = np.asarray(x, dtype=float)
    r = np.hypot(x[..., 0], x[..., 1])
    th = normalize_angle(np.arctan2(x[..., 1], x[..., 0]))
    return r, np.where(r == 0.0, 0.0, th)


def unit(theta):
    """Unit vector(s) (cos theta, sin theta)."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
