"""Maps of G(theta): automorphisms, translations and candidate isometries.

Every map exposes ``apply_arr``/``jacobian_arr`` on ``(n, 3)`` point arrays plus
scalar ``apply``/``jacobian`` wrappers.  Isometry checks are sampling based:
the almost-Riemannian norms of sampled tangents are compared before and after
the map, at generic points and at points of the singular locus.
"""

from dataclasses import dataclass, field

import numpy as np

from .ars import ARS, Distribution, ar_norm_arr, frame_matrices, locus_F_arr, sample_points
from .config import DEFAULT_SEED, default_tol
from .errors import InvalidAutomorphismError, NotConjugatingError
from .fields import LinearField, flow_arr
from .group import IDENTITY, GroupPoint, inv, rho
from .linalg2 import ThetaForm, lambda_op

__all__ = [
    "GroupMap",
    "Automorphism",
    "LeftTranslation",
    "LinearCandidate",
    "AffineCandidate",
    "Composite",
    "apply",
    "jacobian",
    "is_automorphism",
    "pullback",
    "FlowConjugation",
    "verify_flow_conjugation",
    "IsometryReport",
    "verify_isometry",
    "Decomposition",
    "decompose",
    "locus_points",
]


def twisted_commutes(P, T, eps, tol):
    """``P T = eps T P`` up to ``tol * (1 + |P| |T|)``."""
    defect = P @ T - eps * (T @ P)
    return bool(np.max(np.abs(defect)) <= tol * (1.0 + np.linalg.norm(P) * np.linalg.norm(T)))


class GroupMap:
    """Base class; subclasses implement ``apply_arr`` and ``jacobian_arr``."""

    theta: ThetaForm

    def apply_arr(self, pts):
        raise NotImplementedError

    def jacobian_arr(self, pts):
        raise NotImplementedError

    def apply(self, p):
        return GroupPoint.from_array(self.apply_arr(p.as_array()[None, :])[0])

    def jacobian(self, p):
        return self.jacobian_arr(p.as_array()[None, :])[0]


@dataclass(frozen=True, eq=False)
class Automorphism(GroupMap):
    """``(t, v) -> (eps t, P v + eps Lambda^theta_{eps t} eta)`` with ``P theta = eps theta P``."""

    theta: ThetaForm
    eps: int
    P: np.ndarray
    eta: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        eps = int(self.eps)
        P = np.array(self.P, dtype=float).reshape(2, 2)
        eta = np.array(self.eta, dtype=float).reshape(2)
        if eps not in (1, -1):
            raise InvalidAutomorphismError(f"eps must be +1 or -1, got {self.eps}")
        if eps == -1 and self.theta.trace != 0.0:
            raise InvalidAutomorphismError("eps = -1 requires tr(theta) = 0")
        if abs(np.linalg.det(P)) <= 1e-12 * max(np.linalg.norm(P) ** 2, 1e-300):
            raise InvalidAutomorphismError("P must be invertible")
        if not twisted_commutes(P, self.theta.matrix, eps, 1e-9):
            raise InvalidAutomorphismError(f"P theta != eps theta P for P = {P.tolist()}, eps = {eps}")
        P.setflags(write=False)
        eta.setflags(write=False)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def identity(cls, theta):
        return cls(theta, 1, np.eye(2))

    @property
    def matrix(self):
        """Differential at the identity, ``[[eps, 0], [eta, P]]``."""
        M = np.zeros((3, 3))
        M[0, 0] = self.eps
        M[1:, 0] = self.eta
        M[1:, 1:] = self.P
        return M

    def compose(self, other):
        """``self o other`` (apply ``other`` first)."""
        return Automorphism(
            self.theta,
            self.eps * other.eps,
            self.P @ other.P,
            other.eps * self.eta + self.P @ other.eta,
        )

    def inverse(self):
        Pinv = np.linalg.inv(self.P)
        return Automorphism(self.theta, self.eps, Pinv, -self.eps * (Pinv @ self.eta))

    def apply_arr(self, pts):
        pts = np.asarray(pts, dtype=float)
        et = self.eps * pts[..., 0]
        out = np.empty_like(pts)
        out[..., 0] = et
        out[..., 1:] = pts[..., 1:] @ self.P.T + self.eps * (lambda_op(self.theta.matrix, et) @ self.eta)
        return out

    def jacobian_arr(self, pts):
        pts = np.asarray(pts, dtype=float)
        J = np.zeros(pts.shape[:-1] + (3, 3))
        J[..., 0, 0] = self.eps
        J[..., 1:, 0] = rho(self.theta, self.eps * pts[..., 0]) @ self.eta
        J[..., 1:, 1:] = self.P
        return J

    def __repr__(self):
        return f"Automorphism(theta={self.theta}, eps={self.eps}, P={self.P.tolist()}, eta={self.eta.tolist()})"


@dataclass(frozen=True, eq=False)
class LeftTranslation(GroupMap):
    theta: ThetaForm
    g: GroupPoint

    def apply_arr(self, pts):
        pts = np.asarray(pts, dtype=float)
        out = pts.copy()
        out[..., 0] += self.g.t
        out[..., 1:] = self.g.v + pts[..., 1:] @ rho(self.theta, self.g.t).T
        return out

    def jacobian_arr(self, pts):
        pts = np.asarray(pts, dtype=float)
        J = np.zeros(pts.shape[:-1] + (3, 3))
        J[..., 0, 0] = 1.0
        J[..., 1:, 1:] = rho(self.theta, self.g.t)
        return J


@dataclass(frozen=True, eq=False)
class LinearCandidate(GroupMap):
    """``(t, v) -> (a t, P v)``; not necessarily an automorphism."""

    theta: ThetaForm
    a: float
    P: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "P", np.array(self.P, dtype=float).reshape(2, 2))

    def apply_arr(self, pts):
        pts = np.asarray(pts, dtype=float)
        out = np.empty_like(pts)
        out[..., 0] = self.a * pts[..., 0]
        out[..., 1:] = pts[..., 1:] @ self.P.T
        return out

    def jacobian_arr(self, pts):
        pts = np.asarray(pts, dtype=float)
        J = np.zeros(pts.shape[:-1] + (3, 3))
        J[..., 0, 0] = self.a
        J[..., 1:, 1:] = self.P
        return J


@dataclass(frozen=True, eq=False)
class AffineCandidate(GroupMap):
    """``(t, v) -> (a t, P v + a Lambda^theta_{a t} eta)`` without the automorphism checks."""

    theta: ThetaForm
    a: float
    P: np.ndarray
    eta: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "P", np.array(self.P, dtype=float).reshape(2, 2))
        object.__setattr__(self, "eta", np.array(self.eta, dtype=float).reshape(2))

    def apply_arr(self, pts):
        pts = np.asarray(pts, dtype=float)
        at = self.a * pts[..., 0]
        out = np.empty_like(pts)
        out[..., 0] = at
        out[..., 1:] = pts[..., 1:] @ self.P.T + self.a * (lambda_op(self.theta.matrix, at) @ self.eta)
        return out

    def jacobian_arr(self, pts):
        pts = np.asarray(pts, dtype=float)
        J = np.zeros(pts.shape[:-1] + (3, 3))
        J[..., 0, 0] = self.a
        J[..., 1:, 0] = self.a**2 * (rho(self.theta, self.a * pts[..., 0]) @ self.eta)
        J[..., 1:, 1:] = self.P
        return J


@dataclass(frozen=True, eq=False)
class Composite(GroupMap):
    """``maps[0] o maps[1] o ...``: the last map is applied first."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("composite needs at least one map")
        object.__setattr__(self, "maps", maps)

    @property
    def theta(self):
        return self.maps[0].theta

    def apply_arr(self, pts):
        out = np.asarray(pts, dtype=float)
        for m in reversed(self.maps):
            out = m.apply_arr(out)
        return out

    def jacobian_arr(self, pts):
        cur = np.asarray(pts, dtype=float)
        J = np.broadcast_to(np.eye(3), cur.shape[:-1] + (3, 3))
        for m in reversed(self.maps):
            J = m.jacobian_arr(cur) @ J
            cur = m.apply_arr(cur)
        return J


def apply(m, p):
    return m.apply(p)


def jacobian(m, p):
    return m.jacobian(p)


def is_automorphism(m, tol=None):
    """Whether ``m`` coincides with an automorphism of G(theta)."""
    if tol is None:
        tol = default_tol()
    T = m.theta.matrix
    if isinstance(m, Automorphism):
        return True
    if isinstance(m, LinearCandidate):
        if m.a not in (1.0, -1.0):
            return False
        if m.a == -1.0 and m.theta.trace != 0.0:
            return False
        if abs(np.linalg.det(m.P)) <= tol:
            return False
        return twisted_commutes(m.P, T, m.a, tol)
    if isinstance(m, LeftTranslation):
        return bool(np.max(np.abs(m.g.as_array())) <= tol)
    # generic map: it must equal the automorphism with the same differential at e
    if np.max(np.abs(m.apply_arr(np.zeros(3)))) > tol:
        return False
    J = m.jacobian_arr(np.zeros(3))
    eps = float(np.round(J[0, 0]))
    if abs(J[0, 0] - eps) > tol or np.max(np.abs(J[0, 1:])) > tol:
        return False
    try:
        candidate = Automorphism(m.theta, int(eps), J[1:, 1:], J[1:, 0])
    except InvalidAutomorphismError:
        return False
    pts = sample_points(np.random.default_rng(DEFAULT_SEED), 64)
    a, b = m.apply_arr(pts), candidate.apply_arr(pts)
    return bool(np.max(np.abs(a - b) / (1.0 + np.abs(b))) <= 1e3 * tol)


def pullback(sigma, m):
    """The structure ``Sigma_psi`` for which the automorphism ``m`` is an isometry onto ``sigma``.

    Linear field ``(P^-1 (eps xi + A eta), P^-1 A P)``; the distribution basis
    is the preimage of ``sigma``'s basis under the differential at the identity.
    """
    if m.theta != sigma.theta:
        raise ValueError("automorphism and structure live on different groups")
    if not sigma.X.admissible:
        raise ValueError("pullback needs a linear field whose matrix commutes with theta")
    Pinv = np.linalg.inv(m.P)
    X = sigma.X
    X_new = LinearField(sigma.theta, Pinv @ (m.eps * X.xi + X.A @ m.eta), Pinv @ X.A @ m.P)
    rows = np.linalg.solve(m.matrix, sigma.delta.basis.T).T
    return ARS(sigma.theta, X_new, Distribution.from_rows(rows))


@dataclass(frozen=True)
class FlowConjugation:
    sign: int
    residual: float
    residuals: dict


def verify_flow_conjugation(m, sigma1, sigma2, samples=256, seed=DEFAULT_SEED, box=2.0, tol=1e-8):
    """Check ``m o phi1_s = phi2_{+-s} o m`` on sampled ``(s, p)``; report the better sign."""
    rng = np.random.default_rng(seed)
    pts = sample_points(rng, samples, box)
    s = rng.uniform(-box, box, samples)
    lhs = m.apply_arr(flow_arr(sigma1.X, s, pts))
    image = m.apply_arr(pts)
    residuals = {}
    for sign in (1, -1):
        rhs = flow_arr(sigma2.X, sign * s, image)
        err = np.linalg.norm(lhs - rhs, axis=-1) / (1.0 + np.linalg.norm(rhs, axis=-1))
        residuals[sign] = float(np.max(err))
    sign = min(residuals, key=lambda k: (residuals[k], -k))
    if residuals[sign] > tol:
        raise NotConjugatingError(f"flows are not conjugated by the map (residuals {residuals})", residuals)
    return FlowConjugation(sign, residuals[sign], residuals)


def locus_points(sigma, n, rng, box=2.0):
    """Points of the singular locus, always including the identity.

    For fixed ``t`` the locus function is affine in ``v``, so a Newton step
    along its ``v``-gradient lands on the locus; two steps clean up roundoff.
    """
    q = sample_points(rng, n, box)
    ok = np.ones(len(q), dtype=bool)
    for _ in range(2):
        f0 = locus_F_arr(sigma, q)
        grad = np.stack([locus_F_arr(sigma, q + e) - f0 for e in np.eye(3)[1:]], axis=-1)
        gg = np.einsum("ni,ni->n", grad, grad)
        ok &= gg >= 1e-16
        q[:, 1:] -= np.where(ok, f0 / np.where(ok, gg, 1.0), 0.0)[:, None] * grad
    ok &= np.abs(locus_F_arr(sigma, q)) < 1e-12 * (1.0 + np.linalg.norm(q, axis=-1))
    return np.vstack([np.zeros((1, 3)), q[ok]])


@dataclass
class IsometryReport:
    max_rel_error: float
    samples_checked: int
    locus_image_residual: float
    passed: bool
    infinite_pairs: int = 0
    witness: dict = None

    def to_dict(self):
        return {
            "max_rel_error": self.max_rel_error,
            "samples_checked": self.samples_checked,
            "locus_image_residual": self.locus_image_residual,
            "passed": self.passed,
            "infinite_pairs": self.infinite_pairs,
            "witness": self.witness,
        }


def _tangents(sigma, pts, rng, directions):
    """Tangents at each point: frame vectors, mixtures, and random directions."""
    M = frame_matrices(sigma, pts)
    X, Y1, Y2 = M[:, :, 0], M[:, :, 1], M[:, :, 2]
    fixed = [Y1, Y2, Y1 - Y2, X, X + Y1]
    Z = np.stack(fixed[:directions], axis=1)
    extra = max(directions - len(fixed), 0)
    if extra:
        Z = np.concatenate([Z, rng.normal(size=(len(pts), extra, 3))], axis=1)
    # replace vanishing tangents (X at zeros of the field) by random ones
    tiny = np.linalg.norm(Z, axis=-1) < 1e-9
    Z[tiny] = rng.normal(size=(int(tiny.sum()), 3))
    return Z


def verify_isometry(m, sigma1, sigma2, samples=1000, seed=DEFAULT_SEED, box=2.0, directions=8,
                    n_locus=64, tol=1e-8, locus_tol=1e-7):
    """Sample-based check that ``m`` is an isometry from ``sigma1`` to ``sigma2``.

    Compares ``|Z|_1`` at ``p`` with ``|dm Z|_2`` at ``m(p)``.  An infinite
    norm on one side only is a failure.  Locus points of ``sigma1`` must map
    into the locus of ``sigma2``.  The first worst pair is kept as a witness.
    """
    rng = np.random.default_rng(seed)
    regular = sample_points(rng, samples, box)
    singular = locus_points(sigma1, n_locus, rng, box)
    pts = np.vstack([regular, singular])
    Z1 = _tangents(sigma1, pts, rng, directions)
    J = m.jacobian_arr(pts)
    Z2 = np.einsum("nij,nkj->nki", J, Z1)
    images = m.apply_arr(pts)
    n1 = ar_norm_arr(sigma1, pts, Z1)
    n2 = ar_norm_arr(sigma2, images, Z2)

    inf1, inf2 = np.isinf(n1), np.isinf(n2)
    both_finite = ~inf1 & ~inf2
    err = np.full(n1.shape, np.inf)
    err[inf1 & inf2] = 0.0
    a, b = n1[both_finite], n2[both_finite]
    err[both_finite] = np.abs(a - b) / np.maximum(np.maximum(a, b), 1e-300)
    err[both_finite & (np.maximum(n1, n2) == 0.0)] = 0.0

    locus_residual = float(np.max(np.abs(locus_F_arr(sigma2, m.apply_arr(singular)))))
    worst = np.unravel_index(int(np.argmax(err)), err.shape)
    max_err = float(err[worst])
    passed = bool(max_err < tol and locus_residual < locus_tol)
    witness = None
    if not passed:
        i, k = worst
        witness = {
            "point": pts[i].tolist(),
            "tangent": Z1[i, k].tolist(),
            "norm_source": float(n1[worst]),
            "norm_target": float(n2[worst]),
            "locus_image_residual": locus_residual,
        }
    return IsometryReport(
        max_rel_error=max_err,
        samples_checked=int(err.size),
        locus_image_residual=locus_residual,
        passed=passed,
        infinite_pairs=int(np.sum(inf1 & inf2)),
        witness=witness,
    )


@dataclass(frozen=True)
class Decomposition:
    g: GroupPoint
    m0: GroupMap
    locus_residual: float
    fixes_identity: bool


def decompose(m, sigma2):
    """Split ``m = L_g o m0`` with ``m0`` fixing the identity.

    For an isometry onto ``sigma2``, ``g`` lies on its singular locus;
    ``locus_residual`` reports ``|F_2(g)|``.
    """
    g = m.apply(IDENTITY)
    m0 = Composite((LeftTranslation(m.theta, inv(m.theta, g)), m))
    fixed = m0.apply(IDENTITY).as_array()
    return Decomposition(
        g=g,
        m0=m0,
        locus_residual=float(abs(locus_F_arr(sigma2, g.as_array()))),
        fixes_identity=bool(np.max(np.abs(fixed)) < 1e-12 * (1.0 + np.linalg.norm(g.as_array()))),
    )
