"""Almost-Riemannian structures: distributions, LARC, norm and singular locus.

An ARS is a linear field ``X`` together with a 2D subspace ``Delta`` of the
Lie algebra carrying a declared orthonormal basis ``(b1, b2)``.  At a point
``p`` the frame ``{X(p), dL_p b1, dL_p b2}`` is declared orthonormal; it loses
rank exactly on the singular locus ``Z``.

Since ``X`` has no time component, ``X(p)`` lies in ``Delta^L(p)`` iff it is
parallel to ``rho_t eta*`` where ``eta*`` spans ``Delta`` intersected with the
nilradical.  Hence ``Z = {F = 0}`` with

    F(t, v) = det[A v + Lambda^theta_t xi | rho_t eta*].
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.optimize import brentq

from .config import DEFAULT_SEED, default_tol
from .errors import InvalidARSError, InvalidDistributionError, MaxRootsError
from .fields import LinearField, eval_linear_arr, flow_arr
from .group import AlgebraElement, Tangent, exp_arr, mul_arr, rho
from .linalg2 import ThetaForm, as_theta_matrix

__all__ = [
    "Distribution",
    "ARS",
    "bracket",
    "is_subalgebra",
    "larc",
    "nilradical_line",
    "check_ars",
    "frame_at",
    "frame_matrices",
    "ar_norm",
    "ar_norm_arr",
    "locus_F",
    "locus_F_arr",
    "locus_slice",
    "write_slice_csv",
    "Exponential",
    "LinearFlow",
    "CrossingResult",
    "crossings",
    "sample_points",
]

NORM_RANK_TOL = 1e-9
NORM_RANGE_TOL = 1e-8
NONEMPTY_SAMPLES = 64
NONEMPTY_TOL = 1e-12
CONTAINED_TOL = 1e-11


def sample_points(rng, n, box=2.0):
    """``n`` points with ``|t| <= box`` and ``|v| <= box`` (uniform in the disc)."""
    t = rng.uniform(-box, box, n)
    r = box * np.sqrt(rng.uniform(0.0, 1.0, n))
    phi = rng.uniform(0.0, 2 * np.pi, n)
    return np.column_stack([t, r * np.cos(phi), r * np.sin(phi)])


def bracket(ctx, x, y):
    """``[(a1, w1), (a2, w2)] = (0, a1 theta w2 - a2 theta w1)``."""
    T = as_theta_matrix(ctx)
    return AlgebraElement(0.0, x.alpha * (T @ y.eta) - y.alpha * (T @ x.eta))


@dataclass(frozen=True, eq=False)
class Distribution:
    """2D subspace of g(theta) with a declared orthonormal basis ``(b1, b2)``."""

    b1: AlgebraElement
    b2: AlgebraElement

    def __post_init__(self):
        B = np.vstack([self.b1.as_array(), self.b2.as_array()])
        sv = np.linalg.svd(B, compute_uv=False)
        if not sv[1] > 1e-12 * max(sv[0], 1.0):
            raise InvalidDistributionError("distribution basis vectors are linearly dependent")
        if self.b1.alpha == 0.0 and self.b2.alpha == 0.0:
            raise InvalidDistributionError("distribution equals nilradical")

    @classmethod
    def from_rows(cls, rows):
        rows = np.asarray(rows, dtype=float).reshape(2, 3)
        return cls(AlgebraElement.from_array(rows[0]), AlgebraElement.from_array(rows[1]))

    @classmethod
    def from_gram(cls, vectors, gram):
        """Orthonormalize two spanning vectors given their Gram matrix."""
        U = np.asarray(vectors, dtype=float).reshape(2, 3)
        L = cholesky(np.asarray(gram, dtype=float).reshape(2, 2), lower=True)
        return cls.from_rows(solve_triangular(L, U, lower=True))

    @property
    def basis(self):
        """The 2x3 matrix with rows b1, b2."""
        return np.vstack([self.b1.as_array(), self.b2.as_array()])

    @property
    def normal(self):
        n = np.cross(self.b1.as_array(), self.b2.as_array())
        return n / np.linalg.norm(n)

    def contains(self, z, tol=None):
        """Least-squares membership test (distance to the plane)."""
        if tol is None:
            tol = default_tol()
        z = z.as_array() if isinstance(z, AlgebraElement) else np.asarray(z, dtype=float)
        return bool(abs(self.normal @ z) <= tol * (1.0 + np.linalg.norm(z)))

    def coordinates(self, z):
        """Coefficients of ``z`` in the orthonormal basis (least squares)."""
        z = z.as_array() if isinstance(z, AlgebraElement) else np.asarray(z, dtype=float)
        return np.linalg.lstsq(self.basis.T, z, rcond=None)[0]

    def norm(self, z):
        return float(np.linalg.norm(self.coordinates(z)))


def is_subalgebra(ctx, delta, tol=None):
    return delta.contains(bracket(ctx, delta.b1, delta.b2), tol)


def _apply_derivation(X, z):
    return AlgebraElement(0.0, z.alpha * X.xi + X.A @ z.eta)


def larc(ctx, delta, X, tol=None):
    """Delta is not a subalgebra, or it is and ``D Delta`` is not inside Delta."""
    if not is_subalgebra(ctx, delta, tol):
        return True
    return not all(delta.contains(_apply_derivation(X, b), tol) for b in (delta.b1, delta.b2))


def nilradical_line(delta):
    """Unit generator of ``Delta`` intersected with the nilradical.

    The sign is fixed so that the first nonzero coordinate is positive.
    """
    b1, b2 = delta.b1, delta.b2
    eta = b2.alpha * b1.eta - b1.alpha * b2.eta
    size = np.linalg.norm(eta)
    if size <= 1e-14 * (1.0 + np.linalg.norm(delta.basis)):
        raise InvalidDistributionError("distribution meets the nilradical trivially; inconsistent basis")
    eta = eta / size
    lead = eta[0] if abs(eta[0]) > 1e-12 else eta[1]
    return eta if lead > 0 else -eta


def _raw_locus_F(theta, X, eta_star, pts):
    pts = np.asarray(pts, dtype=float)
    u = eval_linear_arr(X, pts)[..., 1:]
    w = rho(theta, pts[..., 0]) @ eta_star
    return u[..., 0] * w[..., 1] - u[..., 1] * w[..., 0]


def check_ars(theta, X, delta, tol=None):
    """Run the ARS validity checks and return ``(larc_ok, nonempty_ok, reasons)``."""
    reasons = []
    if X.theta != theta:
        reasons.append(f"linear field is defined for {X.theta}, not {theta}")
        return False, False, reasons
    larc_ok = larc(theta, delta, X, tol)
    if not larc_ok:
        reasons.append("LARC fails: distribution is a subalgebra invariant under the derivation")
    rng = np.random.default_rng(DEFAULT_SEED)
    pts = sample_points(rng, NONEMPTY_SAMPLES)
    F = _raw_locus_F(theta, X, nilradical_line(delta), pts)
    nonempty_ok = bool(np.max(np.abs(F)) > NONEMPTY_TOL)
    if not nonempty_ok:
        reasons.append("regular set is empty: X lies in the distribution everywhere")
    return larc_ok, nonempty_ok, reasons


@dataclass(frozen=True, eq=False)
class ARS:
    """A validated almost-Riemannian structure ``{X, Delta^L}`` on G(theta)."""

    theta: ThetaForm
    X: LinearField
    delta: Distribution
    eta_star: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        _, _, reasons = check_ars(self.theta, self.X, self.delta)
        if reasons:
            raise InvalidARSError(reasons)
        object.__setattr__(self, "eta_star", nilradical_line(self.delta))


def frame_matrices(sigma, pts):
    """Stack of 3x3 matrices whose columns are ``X(p), dL_p b1, dL_p b2``."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    R = rho(sigma.theta, pts[:, 0])
    M = np.empty((len(pts), 3, 3))
    M[:, :, 0] = eval_linear_arr(sigma.X, pts)
    for col, b in ((1, sigma.delta.b1), (2, sigma.delta.b2)):
        M[:, 0, col] = b.alpha
        M[:, 1:, col] = R @ b.eta
    return M


def frame_at(sigma, p):
    M = frame_matrices(sigma, p.as_array())[0]
    return tuple(Tangent.from_array(p, M[:, k]) for k in range(3))


def ar_norm_arr(sigma, pts, Z):
    """Almost-Riemannian norms of tangents ``Z`` (shape ``(n, k, 3)``) at ``pts`` (``(n, 3)``).

    Minimum-norm coefficients come from the SVD of the frame; tangents outside
    the span of the frame get ``inf``.
    """
    M = frame_matrices(sigma, pts)
    Z = np.asarray(Z, dtype=float)
    U, S, Vt = np.linalg.svd(M)
    keep = S > NORM_RANK_TOL * S[:, :1]
    Sinv = np.where(keep, 1.0 / np.where(keep, S, 1.0), 0.0)
    # coefficients in the right singular basis; |alpha| = |V c| = |c|
    c = np.einsum("nji,nkj->nki", U, Z) * Sinv[:, None, :]
    alpha = np.einsum("nji,nkj->nki", Vt, c)
    resid = np.linalg.norm(np.einsum("nij,nkj->nki", M, alpha) - Z, axis=-1)
    size = np.linalg.norm(c, axis=-1)
    in_range = resid < NORM_RANGE_TOL * (1.0 + np.linalg.norm(Z, axis=-1))
    return np.where(in_range, size, np.inf)


def ar_norm(sigma, p, Z):
    """Norm of the tangent ``Z`` at ``p``; ``inf`` if ``Z`` is not in the frame's span."""
    vec = Z.vector if isinstance(Z, Tangent) else np.asarray(Z, dtype=float)
    return float(ar_norm_arr(sigma, p.as_array()[None, :], vec[None, None, :])[0, 0])


def locus_F_arr(sigma, pts):
    return _raw_locus_F(sigma.theta, sigma.X, sigma.eta_star, pts)


def locus_F(sigma, p):
    """Implicit function of the singular locus: ``Z = {locus_F = 0}``."""
    return float(locus_F_arr(sigma, p.as_array()))


# --- slices ----------------------------------------------------------------

# marching-squares corner order: (0,0), (1,0), (1,1), (0,1); edges 0..3 are
# bottom, right, top, left.
_EDGE_CORNERS = ((0, 1), (1, 2), (3, 2), (0, 3))
_CASES = {
    1: ((3, 0),), 2: ((0, 1),), 3: ((3, 1),), 4: ((1, 2),), 6: ((0, 2),), 7: ((3, 2),),
    8: ((2, 3),), 9: ((0, 2),), 11: ((1, 2),), 12: ((1, 3),), 13: ((0, 1),), 14: ((3, 0),),
}


def _marching_squares(x, y, F):
    """Segments of ``F = 0`` keyed by grid-edge ids, so neighbours share endpoints exactly."""
    corners = ((0, 0), (1, 0), (1, 1), (0, 1))
    points = {}
    segments = []

    def edge_point(i, j, e, vals):
        a, b = _EDGE_CORNERS[e]
        (ia, ja), (ib, jb) = corners[a], corners[b]
        key = (min(i + ia, i + ib), min(j + ja, j + jb), "h" if ja == jb else "v")
        if key not in points:
            fa, fb = vals[a], vals[b]
            tau = fa / (fa - fb)
            xa, ya = x[i + ia], y[j + ja]
            xb, yb = x[i + ib], y[j + jb]
            points[key] = (xa + tau * (xb - xa), ya + tau * (yb - ya))
        return key

    for i in range(len(x) - 1):
        for j in range(len(y) - 1):
            vals = [F[i + ci, j + cj] for ci, cj in corners]
            case = sum(1 << k for k, val in enumerate(vals) if val >= 0)
            if case in (0, 15):
                continue
            if case in (5, 10):
                # saddle: the sign at the cell centre decides which corners connect
                cut_odd, cut_even = ((0, 1), (2, 3)), ((3, 0), (1, 2))
                center_pos = sum(vals) / 4 >= 0
                if case == 5:
                    pairs = cut_odd if center_pos else cut_even
                else:
                    pairs = cut_even if center_pos else cut_odd
            else:
                pairs = _CASES[case]
            for e1, e2 in pairs:
                segments.append((edge_point(i, j, e1, vals), edge_point(i, j, e2, vals)))
    return points, segments


def _chain(points, segments):
    adjacency = {}
    for idx, (a, b) in enumerate(segments):
        adjacency.setdefault(a, []).append(idx)
        adjacency.setdefault(b, []).append(idx)
    used = [False] * len(segments)
    lines = []
    # start from open ends first so open curves come out whole
    starts = [k for k, segs in adjacency.items() if len(segs) == 1] + list(adjacency)
    for start in starts:
        for seg in adjacency[start]:
            if used[seg]:
                continue
            path = [start]
            current, nxt = start, seg
            while nxt is not None:
                used[nxt] = True
                a, b = segments[nxt]
                current = b if a == current else a
                path.append(current)
                nxt = next((s for s in adjacency[current] if not used[s]), None)
            lines.append(np.array([points[k] for k in path]))
    return lines


def locus_slice(sigma, t, window=(-2.0, 2.0, -2.0, 2.0), resolution=101):
    """Polylines (arrays of ``(v1, v2)`` rows) of the locus in the slice ``{t} x window``.

    ``window`` is ``(v1_min, v1_max, v2_min, v2_max)``; ``resolution`` is the
    number of grid nodes per axis.
    """
    v1_min, v1_max, v2_min, v2_max = map(float, window)
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if not (v1_min < v1_max and v2_min < v2_max):
        raise ValueError(f"invalid window {window}")
    x = np.linspace(v1_min, v1_max, resolution)
    y = np.linspace(v2_min, v2_max, resolution)
    V1, V2 = np.meshgrid(x, y, indexing="ij")
    pts = np.stack([np.full_like(V1, float(t)), V1, V2], axis=-1)
    F = locus_F_arr(sigma, pts.reshape(-1, 3)).reshape(V1.shape)
    points, segments = _marching_squares(x, y, F)
    return _chain(points, segments)


def write_slice_csv(polylines, t, fh):
    """Write slice points as CSV rows ``t,v1,v2`` (header included, LF endings)."""
    fh.write("t,v1,v2\n")
    count = 0
    for line in polylines:
        for v1, v2 in line:
            fh.write(f"{float(t)!r},{float(v1)!r},{float(v2)!r}\n")
            count += 1
    return count


# --- crossings -------------------------------------------------------------


@dataclass(frozen=True)
class Exponential:
    """The curve ``s -> p0 exp(s gen)``."""

    gen: AlgebraElement


@dataclass(frozen=True)
class LinearFlow:
    """The curve ``s -> phi_s(p0)`` of the structure's linear field."""


@dataclass(frozen=True)
class CrossingResult:
    roots: tuple
    contained: bool = False


def _curve_points(sigma, curve, p0, s):
    s = np.asarray(s, dtype=float)
    base = np.broadcast_to(p0.as_array(), s.shape + (3,))
    if isinstance(curve, Exponential):
        return mul_arr(sigma.theta, base, exp_arr(sigma.theta, s[..., None] * curve.gen.as_array()))
    if isinstance(curve, LinearFlow):
        return flow_arr(sigma.X, s, base)
    raise TypeError(f"unknown curve {curve!r}")


def crossings(sigma, curve, p0, interval=(-2.0, 2.0), max_roots=32, samples=512):
    """Parameters where the curve meets the singular locus.

    Sign changes of ``locus_F`` on a uniform scan are refined with Brent's
    method.  If ``|F|`` is negligible at every sample the curve is reported as
    contained in the locus.  More than ``max_roots`` roots raises
    :class:`MaxRootsError`.
    """
    lo, hi = map(float, interval)
    s = np.linspace(lo, hi, samples)
    pts = _curve_points(sigma, curve, p0, s)
    F = locus_F_arr(sigma, pts)
    if np.all(np.abs(F) < CONTAINED_TOL * (1.0 + np.linalg.norm(pts, axis=-1))):
        return CrossingResult((), contained=True)

    def f(x):
        return float(locus_F_arr(sigma, _curve_points(sigma, curve, p0, x)))

    roots = []
    for k in range(samples):
        if F[k] == 0.0:
            roots.append(s[k])
        elif k + 1 < samples and F[k] * F[k + 1] < 0:
            roots.append(brentq(f, s[k], s[k + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps))
        if len(roots) > max_roots:
            raise MaxRootsError(f"more than {max_roots} crossings on {interval}", roots)
    return CrossingResult(tuple(float(r) for r in roots))
