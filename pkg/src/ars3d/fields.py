"""Linear and left-invariant vector fields on G(theta) and their flows."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InadmissibleFieldError
from .group import AlgebraElement, GroupPoint, Tangent, exp_arr, mul_arr
from .linalg2 import ThetaForm, commutes, expm2, lambda_op

__all__ = [
    "LinearField",
    "InvariantField",
    "eval_linear",
    "flow",
    "derivation_of",
    "rank_two",
    "flow_invariant",
    "eval_linear_arr",
    "flow_arr",
]

ADMISSIBILITY_TOL = 1e-9
RANK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LinearField:
    """Linear vector field ``X(t, v) = (0, A v + Lambda^theta_t xi)``.

    ``A`` must commute with theta.  Passing ``strict=False`` admits a
    non-commuting ``A``; the result is still a vector field with an exact
    flow, but not a linear one, and is flagged by ``admissible = False``.
    """

    theta: ThetaForm
    xi: np.ndarray
    A: np.ndarray
    strict: bool = field(default=True, repr=False)
    admissible: bool = field(init=False)

    def __post_init__(self):
        xi = np.array(self.xi, dtype=float).reshape(2)
        A = np.array(self.A, dtype=float).reshape(2, 2)
        if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(A))):
            raise InadmissibleFieldError("linear field entries must be finite")
        admissible = commutes(A, self.theta.matrix, ADMISSIBILITY_TOL)
        if self.strict and not admissible:
            raise InadmissibleFieldError(f"A = {A.tolist()} does not commute with theta = {self.theta}")
        xi.setflags(write=False)
        A.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "admissible", admissible)

    @property
    def derivation(self):
        return derivation_of(self)

    def __repr__(self):
        return f"LinearField(theta={self.theta}, xi={self.xi.tolist()}, A={self.A.tolist()})"


@dataclass(frozen=True, eq=False)
class InvariantField:
    """Left-invariant field ``Y(t, v) = (alpha, rho_t eta)`` generated by ``gen``."""

    theta: ThetaForm
    gen: AlgebraElement


def eval_linear_arr(X, pts):
    pts = np.asarray(pts, dtype=float)
    L = lambda_op(X.theta.matrix, pts[..., 0])
    out = np.zeros_like(pts)
    out[..., 1:] = pts[..., 1:] @ X.A.T + L @ X.xi
    return out


def flow_arr(X, s, pts):
    """``phi_s(t, v) = (t, e^{sA} v + Lambda^A_s Lambda^theta_t xi)`` on rows of ``pts``.

    ``t`` is constant along the flow, so this is exact even for a
    non-admissible field; for admissible ones the two Lambda factors commute.
    ``s`` broadcasts against the leading shape of ``pts``.
    """
    pts = np.asarray(pts, dtype=float)
    s = np.broadcast_to(np.asarray(s, dtype=float), pts.shape[:-1])
    E = expm2(X.A, s)
    LA = lambda_op(X.A, s)
    Lt = lambda_op(X.theta.matrix, pts[..., 0]) @ X.xi
    out = pts.copy()
    out[..., 1:] = np.einsum("...ij,...j->...i", E, pts[..., 1:]) + np.einsum("...ij,...j->...i", LA, Lt)
    return out


def eval_linear(X, p):
    return Tangent.from_array(p, eval_linear_arr(X, p.as_array()))


def flow(X, s, p):
    return GroupPoint.from_array(flow_arr(X, s, p.as_array()))


def derivation_of(X):
    """The derivation ``D = [[0, 0], [xi, A]]`` as a 3x3 array."""
    D = np.zeros((3, 3))
    D[1:, 0] = X.xi
    D[1:, 1:] = X.A
    return D


def rank_two(X):
    """True iff ``Im A + R xi = R^2``, judged by the singular values of ``[A | xi]``."""
    sv = np.linalg.svd(np.column_stack([X.A, X.xi]), compute_uv=False)
    return bool(sv[1] > RANK_TOL * (sv[0] + 1.0))


def flow_invariant(Y, s, p):
    """``p * exp(s gen)``."""
    step = exp_arr(Y.theta, float(s) * Y.gen.as_array())
    return GroupPoint.from_array(mul_arr(Y.theta, p.as_array(), step))
