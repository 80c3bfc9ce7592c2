"""The group G(theta) = R x_rho R^2 and its Lie algebra.

Points are ``(t, v)`` with product ``(t1, v1)(t2, v2) = (t1 + t2, v1 + rho_{t1} v2)``
where ``rho_t = exp(t theta)``.  Batched helpers operate on ``(n, 3)`` arrays
whose rows are ``(t, v1, v2)``.
"""

from dataclasses import dataclass

import numpy as np

from .linalg2 import as_theta_matrix, expm2, lambda_op

__all__ = [
    "GroupPoint",
    "AlgebraElement",
    "Tangent",
    "IDENTITY",
    "rho",
    "mul",
    "inv",
    "exp_g",
    "dL",
    "mul_arr",
    "inv_arr",
    "exp_arr",
]


def _vec2(v):
    arr = np.array(v, dtype=float).reshape(2)
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GroupPoint:
    t: float
    v: np.ndarray

    def __post_init__(self):
        t = float(self.t)
        if not np.isfinite(t):
            raise ValueError("t must be finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", _vec2(self.v))

    @classmethod
    def identity(cls):
        return cls(0.0, (0.0, 0.0))

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(arr[0], arr[1:3])

    def as_array(self):
        return np.array([self.t, self.v[0], self.v[1]])

    def __repr__(self):
        return f"GroupPoint(t={self.t!r}, v=({self.v[0]!r}, {self.v[1]!r}))"


IDENTITY = GroupPoint.identity()


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Element ``(alpha, eta)`` of g(theta); the nilradical is ``alpha == 0``."""

    alpha: float
    eta: np.ndarray

    def __post_init__(self):
        alpha = float(self.alpha)
        if not np.isfinite(alpha):
            raise ValueError("alpha must be finite")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "eta", _vec2(self.eta))

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(arr[0], arr[1:3])

    def as_array(self):
        return np.array([self.alpha, self.eta[0], self.eta[1]])

    def __add__(self, other):
        return AlgebraElement.from_array(self.as_array() + other.as_array())

    def __sub__(self, other):
        return AlgebraElement.from_array(self.as_array() - other.as_array())

    def __mul__(self, c):
        return AlgebraElement.from_array(float(c) * self.as_array())

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        return f"AlgebraElement(alpha={self.alpha!r}, eta=({self.eta[0]!r}, {self.eta[1]!r}))"


@dataclass(frozen=True, eq=False)
class Tangent:
    """Tangent vector ``(dt, dv)`` at ``base``."""

    base: GroupPoint
    dt: float
    dv: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "dv", _vec2(self.dv))

    @classmethod
    def from_array(cls, base, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(base, arr[0], arr[1:3])

    @property
    def vector(self):
        return np.array([self.dt, self.dv[0], self.dv[1]])

    def __repr__(self):
        return f"Tangent(base={self.base!r}, dt={self.dt!r}, dv=({self.dv[0]!r}, {self.dv[1]!r}))"


def rho(ctx, t):
    """``exp(t theta)``; ``t`` may be an array."""
    return expm2(as_theta_matrix(ctx), t)


def mul_arr(ctx, g, h):
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    R = rho(ctx, g[..., 0])
    out = np.empty(np.broadcast_shapes(g.shape, h.shape))
    out[..., 0] = g[..., 0] + h[..., 0]
    out[..., 1:] = g[..., 1:] + np.einsum("...ij,...j->...i", R, h[..., 1:])
    return out


def inv_arr(ctx, g):
    g = np.asarray(g, dtype=float)
    R = rho(ctx, -g[..., 0])
    out = np.empty_like(g)
    out[..., 0] = -g[..., 0]
    out[..., 1:] = -np.einsum("...ij,...j->...i", R, g[..., 1:])
    return out


def exp_arr(ctx, x):
    """Batched exponential map on rows ``(alpha, eta1, eta2)``."""
    x = np.asarray(x, dtype=float)
    alpha = x[..., 0]
    nonzero = alpha != 0.0
    safe = np.where(nonzero, alpha, 1.0)
    L = lambda_op(as_theta_matrix(ctx), alpha)
    moved = np.einsum("...ij,...j->...i", L, x[..., 1:]) / safe[..., None]
    out = np.empty_like(x)
    out[..., 0] = alpha
    out[..., 1:] = np.where(nonzero[..., None], moved, x[..., 1:])
    return out


def mul(ctx, g, h):
    """Semidirect product ``g * h``."""
    return GroupPoint.from_array(mul_arr(ctx, g.as_array(), h.as_array()))


def inv(ctx, g):
    return GroupPoint.from_array(inv_arr(ctx, g.as_array()))


def exp_g(ctx, x):
    """Exponential map: ``(0, eta)`` if ``alpha == 0`` else ``(alpha, Lambda_alpha eta / alpha)``."""
    return GroupPoint.from_array(exp_arr(ctx, x.as_array()))


def dL(ctx, g, w):
    """Push ``w`` forward by the left translation ``L_g``.

    ``w`` is a :class:`Tangent` (at any base) or an :class:`AlgebraElement`
    (read as a tangent at the identity).  The result is ``(alpha, rho_t eta)``
    based at ``g * base``.
    """
    if isinstance(w, AlgebraElement):
        w = Tangent(IDENTITY, w.alpha, w.eta)
    base = mul(ctx, g, w.base)
    return Tangent(base, w.dt, rho(ctx, g.t) @ w.dv)
