"""Normal forms of rank-two structures up to automorphism.

Every rank-two structure is moved by automorphisms onto one of three model
structures whose distributions have orthonormal bases

    alpha_1 = {(1, 0), (sigma, e1)}
    alpha_2 = {(1, 0), (sigma, e2)}
    alpha_3 = {(1, 0), (sigma, e1 + e2)}

(up to an overall rescaling of the metric on the distribution).  Which
classes occur depends on theta; see :func:`class_partition`.

Steps of :func:`classify`:

1. :func:`normalize_e0` finds an automorphism ``psi_hat`` after which
   ``(1, 0)`` lies in the distribution.
2. :func:`orthonormal_complement` completes ``(1, 0)`` to an orthonormal basis
   ``{(1, 0), (sigma, eta)}`` with ``sigma >= 0``, after rescaling the metric so
   that ``(1, 0)`` is a unit vector.
3. A case table on ``eta = (x, y)`` picks ``(eps, P)`` with ``P n = eps * eta``
   for the class direction ``n``; the map ``(t, v) -> (eps t, P v)`` carries the
   model structure onto the normalized one.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .ars import ARS, Distribution, ar_norm
from .errors import InvalidARSError, RankError
from .fields import rank_two
from .group import IDENTITY, Tangent
from .linalg2 import Family, twisted_commutant_basis
from .morphisms import Automorphism, pullback, verify_isometry

__all__ = [
    "CLASS_DIRECTIONS",
    "ClassificationResult",
    "normalize_e0",
    "unit_scale",
    "orthonormal_complement",
    "case_table",
    "classify",
    "canonical_ars",
    "class_partition",
    "automorphism_fit",
    "BranchWarning",
]

CLASS_DIRECTIONS = {
    1: np.array([1.0, 0.0]),
    2: np.array([0.0, 1.0]),
    3: np.array([1.0, 1.0]),
}

BRANCH_TOL = 1e-10
# coordinates this close to the branch threshold are flagged as unstable
BRANCH_WARN = 1e-6
SIGMA_ZERO = 1e-12


class BranchWarning(UserWarning):
    """The case decision depended on a coordinate close to zero."""


def _e0_coords(delta):
    """Coefficients ``c`` with ``c1 b1 + c2 b2 = (1, 0)``, or None if ``(1, 0)`` is not in Delta."""
    e0 = np.array([1.0, 0.0, 0.0])
    if not delta.contains(e0, 1e-10):
        return None
    return delta.coordinates(e0)


def normalize_e0(sigma):
    """Return ``(sigma_n, psi_hat)`` with ``(1, 0)`` in the distribution of ``sigma_n``.

    ``psi_hat(t, v) = (t, v - Lambda^theta_t eta / s)`` for an element
    ``(s, eta)`` of the distribution with ``s != 0``.  It maps that element to
    ``(s, 0)``, so ``psi_hat`` is an isometry from ``sigma`` onto ``sigma_n``.
    """
    theta = sigma.theta
    if _e0_coords(sigma.delta) is not None:
        psi_hat = Automorphism.identity(theta)
        return sigma, psi_hat
    B = sigma.delta.basis
    a = B[:, 0]
    if not np.any(a):
        raise InvalidARSError(["distribution equals nilradical"])
    # the element with alpha = 1 and minimal basis coefficients
    elem = (a @ B) / (a @ a)
    psi_hat = Automorphism(theta, 1, np.eye(2), -elem[1:] / elem[0])
    return pullback(sigma, psi_hat.inverse()), psi_hat


def unit_scale(sigma_n):
    """``|(1, 0)|`` in the metric of the distribution (requires ``(1, 0)`` in it)."""
    c = _e0_coords(sigma_n.delta)
    if c is None:
        raise ValueError("(1, 0) is not in the distribution; call normalize_e0 first")
    return float(np.linalg.norm(c))


def orthonormal_complement(sigma_n):
    """``(sigma, eta)`` completing ``(1, 0)`` to an orthonormal basis of the rescaled metric.

    The sign is fixed by ``sigma > 0``; when ``sigma == 0`` the first nonzero
    coordinate of ``eta`` is made positive.
    """
    c = _e0_coords(sigma_n.delta)
    if c is None:
        raise ValueError("(1, 0) is not in the distribution; call normalize_e0 first")
    b1, b2 = sigma_n.delta.basis
    w = -c[1] * b1 + c[0] * b2
    s, eta = w[0], w[1:]
    if abs(s) <= SIGMA_ZERO * (1.0 + np.linalg.norm(eta)):
        s = 0.0
        lead = eta[0] if abs(eta[0]) > BRANCH_TOL * np.linalg.norm(eta) else eta[1]
        if lead < 0:
            eta = -eta
    elif s < 0:
        s, eta = -s, -eta
    return float(s), np.array(eta, dtype=float)


def _zero(value, scale):
    return abs(value) < BRANCH_TOL * scale


def case_table(theta, eta):
    """Select ``(cls, eps, P)`` for the complement direction ``eta = (x, y)``.

    ``P`` maps the class direction to ``eps * eta`` and satisfies
    ``P theta = eps theta P``.
    """
    x, y = map(float, eta)
    scale = float(np.hypot(x, y))
    family, gamma = theta.family, theta.gamma
    if family is Family.ROTATION or (family is Family.DIAGONAL and gamma == 1.0):
        return 1, 1, np.array([[x, -y], [y, x]])
    if family is Family.JORDAN:
        if _zero(y, scale):
            return 1, 1, x * np.eye(2)
        return 3, 1, np.array([[y, x - y], [0.0, y]])
    if gamma == -1.0:
        if _zero(y, scale):
            return 1, 1, x * np.eye(2)
        if _zero(x, scale):
            # eps = -1 flips the time direction, so P e1 = -eta keeps sigma >= 0
            return 1, -1, np.array([[0.0, -y], [-y, 0.0]])
        return 3, 1, np.diag([x, y])
    if _zero(y, scale):
        return 1, 1, x * np.eye(2)
    if _zero(x, scale):
        return 2, 1, y * np.eye(2)
    return 3, 1, np.diag([x, y])


def _near_branch(eta):
    scale = np.linalg.norm(eta)
    small = min(abs(eta[0]), abs(eta[1])) / scale
    return bool(BRANCH_TOL <= small < BRANCH_WARN)


def canonical_ars(theta, cls, X, sigma, scale=1.0):
    """The model structure with orthonormal basis ``{(1, 0), (sigma, n_cls)} / scale``."""
    if cls not in CLASS_DIRECTIONS:
        raise ValueError(f"class must be 1, 2 or 3, got {cls}")
    if not rank_two(X):
        raise RankError("canonical structures need a rank-two linear field")
    n = CLASS_DIRECTIONS[cls]
    rows = np.array([[1.0, 0.0, 0.0], [sigma, n[0], n[1]]]) / scale
    try:
        return ARS(theta, X, Distribution.from_rows(rows))
    except InvalidARSError as exc:
        raise InvalidARSError([f"class {cls} with sigma={sigma} is not a valid structure"] + exc.reasons) from exc


def class_partition(theta):
    """The classes that occur for rank-two structures on G(theta)."""
    if theta.family is Family.ROTATION or (theta.family is Family.DIAGONAL and theta.gamma == 1.0):
        return frozenset({1})
    if theta.family is Family.JORDAN or theta.gamma == -1.0:
        return frozenset({1, 3})
    return frozenset({1, 2, 3})


@dataclass
class ClassificationResult:
    cls: int
    sigma: float
    normalizer: Automorphism
    canonical: ARS
    scale: float = 1.0
    euclidean: bool = False
    near_branch: bool = False
    isometry_residual: float = float("nan")
    nilradical_norm: float = float("nan")
    nilradical_norm_match: str = ""

    def to_dict(self):
        return {
            "class": self.cls,
            "sigma": self.sigma,
            "euclidean": self.euclidean,
            "scale": self.scale,
            "near_branch": self.near_branch,
            "normalizer": {
                "eps": self.normalizer.eps,
                "P": self.normalizer.P.tolist(),
                "eta": self.normalizer.eta.tolist(),
            },
            "isometry_residual": self.isometry_residual,
            "nilradical_norm": self.nilradical_norm,
            "nilradical_norm_match": self.nilradical_norm_match,
        }


def _nilradical_norm(canonical, cls, scale, sigma):
    """Norm of ``(0, n_cls)`` at the identity, in units where ``(1, 0)`` is unit."""
    n = CLASS_DIRECTIONS[cls]
    value = ar_norm(canonical, IDENTITY, Tangent(IDENTITY, 0.0, n)) / scale
    root = np.sqrt(1.0 + sigma**2)
    linear = 1.0 + sigma**2
    hits = [name for name, ref in (("sqrt(1+sigma^2)", root), ("1+sigma^2", linear)) if abs(value - ref) < 1e-9]
    match = "both" if len(hits) == 2 else (hits[0] if hits else "neither")
    return float(value), match


def classify(sigma, verify=True, samples=200, seed=None):
    """Classify a rank-two structure; see the module docstring.

    The returned ``normalizer`` is an automorphism carrying ``canonical`` onto
    ``sigma`` isometrically.  With ``verify`` the isometry is checked on
    ``samples`` sampled points and the worst relative error is stored in
    ``isometry_residual``.
    """
    if not rank_two(sigma.X):
        raise RankError("structure is not rank two: Im A + R xi != R^2")
    if not sigma.X.admissible:
        raise ValueError("classification needs a linear field whose matrix commutes with theta")
    theta = sigma.theta
    sigma_n, psi_hat = normalize_e0(sigma)
    scale = unit_scale(sigma_n)
    s, eta = orthonormal_complement(sigma_n)
    cls, eps, P = case_table(theta, eta)
    near = _near_branch(eta)
    if near:
        warnings.warn(f"eta = {eta.tolist()} is close to a case boundary", BranchWarning, stacklevel=2)
    psi_p = Automorphism(theta, eps, P)
    chain = pullback(sigma_n, psi_p)
    canonical = canonical_ars(theta, cls, chain.X, s, scale)
    normalizer = psi_hat.inverse().compose(psi_p)
    result = ClassificationResult(
        cls=cls,
        sigma=s,
        normalizer=normalizer,
        canonical=canonical,
        scale=scale,
        euclidean=s == 0.0,
        near_branch=near,
    )
    result.nilradical_norm, result.nilradical_norm_match = _nilradical_norm(canonical, cls, scale, s)
    if verify:
        kwargs = {} if seed is None else {"seed": seed}
        report = verify_isometry(normalizer, canonical, sigma, samples=samples, **kwargs)
        result.isometry_residual = report.max_rel_error
    return result


def automorphism_fit(theta, cls_from, cls_to):
    """Search for an automorphism whose linear part maps ``n_from`` into ``R n_to``.

    Solves the linear conditions ``P theta = eps theta P`` and
    ``n_to x (P n_from) = 0`` on the twisted commutant and asks whether the
    solution space contains an invertible matrix.  Returns a witness ``(eps, P)``
    or ``None`` when infeasible.
    """
    n_from, n_to = CLASS_DIRECTIONS[cls_from], CLASS_DIRECTIONS[cls_to]
    signs = (1, -1) if theta.trace == 0.0 else (1,)
    rng = np.random.default_rng(0)
    for eps in signs:
        basis = twisted_commutant_basis(theta, eps)
        if not basis:
            continue
        # cross(n_to, P n_from) is linear in the basis coefficients
        row = np.array([n_to[0] * (B @ n_from)[1] - n_to[1] * (B @ n_from)[0] for B in basis])
        _, sv, Vt = np.linalg.svd(row[None, :])
        rank = int(np.sum(sv > 1e-12))
        kernel = Vt[rank:]
        if len(kernel) == 0:
            continue
        sols = [sum(c * B for c, B in zip(k, basis)) for k in kernel]
        # det is a quadratic polynomial on the kernel; generic points detect whether it vanishes
        for _ in range(8):
            P = sum(c * S for c, S in zip(rng.normal(size=len(sols)), sols))
            if abs(np.linalg.det(P)) > 1e-8 * max(np.linalg.norm(P) ** 2, 1e-300):
                return eps, P
    return None
