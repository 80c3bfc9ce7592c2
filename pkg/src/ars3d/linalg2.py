"""Closed-form 2x2 linear algebra.

Every 2x2 matrix ``M`` splits as ``M = s*I + N`` with ``s = tr(M)/2`` and
``N @ N = d*I``, ``d = s**2 - det(M)``.  An analytic function then acts as

    f(M) = a(s, d) * I + b(s, d) * N

where ``a``/``b`` are the even/odd divided differences of ``f`` at the
eigenvalues ``s +- sqrt(d)``.  Both ``expm2`` and ``lambda_op`` are built on
this identity, with a power series in ``d`` when the eigenvalues coalesce.

The time argument ``t`` may be a scalar or an array; array input returns a
stack of matrices with shape ``t.shape + (2, 2)``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import null_space

from .config import default_tol
from .errors import InvalidThetaError

__all__ = [
    "Family",
    "ThetaForm",
    "theta_matrix",
    "expm2",
    "lambda_op",
    "commutes",
    "commutant_basis",
    "twisted_commutant_basis",
]

I2 = np.eye(2)
ROT = np.array([[0.0, -1.0], [1.0, 0.0]])

# |tr^2 - 4 det| below this (relative to 1 + tr^2) uses the coalesced branch.
_COALESCE = 1e-8
# scalar phi1 switches to its Taylor polynomial below this |z|.
_PHI1_TAYLOR = 1e-4


class Family(str, Enum):
    JORDAN = "jordan"
    DIAGONAL = "diagonal"
    ROTATION = "rotation"


@dataclass(frozen=True)
class ThetaForm:
    """Canonical form of the matrix theta defining G(theta).

    ``jordan`` is [[1, 1], [0, 1]] (``gamma`` is ignored and stored as 0),
    ``diagonal`` is diag(1, gamma) with gamma in [-1, 1] and ``rotation`` is
    [[gamma, -1], [1, gamma]].
    """

    family: Family
    gamma: float = 0.0

    def __post_init__(self):
        try:
            family = Family(self.family)
        except ValueError:
            raise InvalidThetaError(f"unknown theta family {self.family!r}") from None
        gamma = float(self.gamma)
        if not np.isfinite(gamma):
            raise InvalidThetaError("gamma must be finite")
        if family is Family.JORDAN:
            gamma = 0.0
        elif family is Family.DIAGONAL and not -1.0 <= gamma <= 1.0:
            raise InvalidThetaError(f"diagonal theta requires gamma in [-1, 1], got {gamma}")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def jordan(cls):
        return cls(Family.JORDAN)

    @classmethod
    def diagonal(cls, gamma):
        return cls(Family.DIAGONAL, gamma)

    @classmethod
    def rotation(cls, gamma):
        return cls(Family.ROTATION, gamma)

    @property
    def matrix(self):
        return theta_matrix(self)

    @property
    def trace(self):
        return float(np.trace(self.matrix))

    def __str__(self):
        if self.family is Family.JORDAN:
            return "jordan"
        return f"{self.family.value}({self.gamma:g})"


def theta_matrix(form):
    """Return the 2x2 matrix of a :class:`ThetaForm`."""
    if form.family is Family.JORDAN:
        return np.array([[1.0, 1.0], [0.0, 1.0]])
    if form.family is Family.DIAGONAL:
        return np.array([[1.0, 0.0], [0.0, form.gamma]])
    return np.array([[form.gamma, -1.0], [1.0, form.gamma]])


def as_theta_matrix(ctx):
    """Accept a ThetaForm or a raw 2x2 array."""
    if isinstance(ctx, ThetaForm):
        return ctx.matrix
    return np.asarray(ctx, dtype=float).reshape(2, 2)


def _decompose(A, t):
    A = np.asarray(A, dtype=float).reshape(2, 2)
    t = np.asarray(t, dtype=float)
    tr = A[0, 0] + A[1, 1]
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    N = A - 0.5 * tr * I2
    s = 0.5 * tr * t
    disc = (tr * tr - 4.0 * det) * t * t
    coalesced = np.abs(disc) < _COALESCE * (1.0 + (tr * t) ** 2)
    return N, t, s, disc / 4.0, coalesced


def _assemble(a, b, tN):
    return a[..., None, None] * I2 + b[..., None, None] * tN


def expm2(A, t=1.0):
    """Matrix exponential ``exp(t*A)`` of a 2x2 matrix in closed form."""
    N, t, s, d, coalesced = _decompose(A, t)
    with np.errstate(all="ignore"):
        q = np.sqrt(np.abs(d))
        hyper = (np.cosh(q), np.sinh(q) / np.where(q > 0, q, 1.0))
        trig = (np.cos(q), np.sin(q) / np.where(q > 0, q, 1.0))
    c = np.where(d > 0, hyper[0], trig[0])
    k = np.where(d > 0, hyper[1], trig[1])
    c = np.where(coalesced, 1 + d / 2 + d**2 / 24 + d**3 / 720, c)
    k = np.where(coalesced, 1 + d / 6 + d**2 / 120 + d**3 / 5040, k)
    es = np.exp(s)
    return _assemble(es * c, es * k, t[..., None, None] * N)


def phi1(z):
    """Scalar ``(exp(z) - 1) / z`` for real or complex arrays, 1 at z = 0."""
    z = np.asarray(z)
    small = np.abs(z) < _PHI1_TAYLOR
    safe = np.where(small, 1.0, z)
    taylor = 1 + z / 2 + z**2 / 6 + z**3 / 24 + z**4 / 120 + z**5 / 720
    return np.where(small, taylor, np.expm1(safe) / safe)


def _moments(s, jmax):
    """``I_j(s) = int_0^1 r**j exp(r*s) dr`` for j = 0..jmax (the derivatives of phi1)."""
    s = np.asarray(s, dtype=float)
    out = np.empty((jmax + 1,) + s.shape)
    near = np.abs(s) <= 1.0
    # power series for |s| <= 1
    for j in range(jmax + 1):
        total = np.zeros_like(s)
        term = np.ones_like(s)
        for k in range(30):
            total = total + term / (j + k + 1)
            term = term * s / (k + 1)
        out[j] = total
    # upward recurrence for |s| > 1; error growth is bounded by j!/|s|**j
    far_s = np.where(near, 2.0, s)
    with np.errstate(over="ignore"):
        es = np.exp(far_s)
        rec = np.expm1(far_s) / far_s
        for j in range(jmax + 1):
            if j > 0:
                rec = (es - j * rec) / far_s
            out[j] = np.where(near, out[j], rec)
    return out


def lambda_op(A, t=1.0):
    """Matrix L with ``L @ w = int_0^t exp(u*A) w du``, i.e. ``t * phi1(t*A)``.

    Never inverts ``A``; it is well defined for singular and nilpotent input.
    """
    N, t, s, d, coalesced = _decompose(A, t)
    with np.errstate(all="ignore"):
        q = np.sqrt(np.abs(d))
        qs = np.where(q > 0, q, 1.0)
        # distinct real eigenvalues s +- q
        plus, minus = phi1(s + q), phi1(s - q)
        a_real, b_real = (plus + minus) / 2, (plus - minus) / (2 * qs)
        # complex pair s +- i q
        zc = phi1(s + 1j * q)
        a_cplx, b_cplx = zc.real, zc.imag / qs
    a = np.where(d > 0, a_real, a_cplx)
    b = np.where(d > 0, b_real, b_cplx)
    if np.any(coalesced):
        m = _moments(s, 5)
        a_ser = m[0] + m[2] * d / 2 + m[4] * d**2 / 24
        b_ser = m[1] + m[3] * d / 6 + m[5] * d**2 / 120
        a = np.where(coalesced, a_ser, a)
        b = np.where(coalesced, b_ser, b)
    return t[..., None, None] * _assemble(a, b, t[..., None, None] * N)


def commutes(A, B, tol=None):
    """True iff ``max|AB - BA| <= tol * (1 + |A| |B|)`` (Frobenius norms)."""
    if tol is None:
        tol = default_tol()
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    comm = A @ B - B @ A
    return bool(np.max(np.abs(comm)) <= tol * (1.0 + np.linalg.norm(A) * np.linalg.norm(B)))


def commutant_basis(form):
    """A basis of ``{A : A theta = theta A}`` for a canonical theta."""
    if form.family is Family.JORDAN:
        return [I2.copy(), np.array([[0.0, 1.0], [0.0, 0.0]])]
    if form.family is Family.ROTATION:
        return [I2.copy(), ROT.copy()]
    if form.gamma == 1.0:
        units = []
        for i in range(2):
            for j in range(2):
                E = np.zeros((2, 2))
                E[i, j] = 1.0
                units.append(E)
        return units
    return [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]


def twisted_commutant_basis(theta, eps=1):
    """Orthonormal basis of ``{P : P theta = eps * theta P}``.

    Solved as the null space of the linear map ``P -> P theta - eps theta P``
    written on vec(P).  Works for any 2x2 ``theta``.
    """
    T = as_theta_matrix(theta)
    # row-major vec: vec(P T) = (I kron T^T) vec(P), vec(T P) = (T kron I) vec(P)
    op = np.kron(I2, T.T) - eps * np.kron(T, I2)
    return [v.reshape(2, 2) for v in null_space(op).T]

