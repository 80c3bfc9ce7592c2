"""Seeded random generators for fields, structures and automorphisms."""

import numpy as np

from .ars import ARS, Distribution
from .errors import InvalidARSError, InvalidDistributionError
from .fields import LinearField, rank_two
from .linalg2 import commutant_basis, twisted_commutant_basis
from .morphisms import Automorphism

__all__ = ["random_linear_field", "random_distribution", "random_ars", "random_automorphism"]


def random_linear_field(theta, rng, scale=1.0):
    coeffs = rng.uniform(-scale, scale, len(commutant_basis(theta)))
    A = sum(c * B for c, B in zip(coeffs, commutant_basis(theta)))
    return LinearField(theta, rng.uniform(-scale, scale, 2), A)


def random_distribution(rng):
    while True:
        rows = rng.uniform(-1.0, 1.0, (2, 3))
        if np.linalg.svd(rows, compute_uv=False)[1] < 0.1 or np.max(np.abs(rows[:, 0])) < 0.1:
            continue
        try:
            return Distribution.from_rows(rows)
        except InvalidDistributionError:
            continue


def random_ars(theta, rng, rank_two_only=False, max_tries=1000):
    """A random valid structure on G(theta); optionally insist on a rank-two field."""
    for _ in range(max_tries):
        X = random_linear_field(theta, rng)
        if rank_two_only and not rank_two(X):
            continue
        try:
            return ARS(theta, X, random_distribution(rng))
        except InvalidARSError:
            continue
    raise RuntimeError(f"no valid structure found for {theta} in {max_tries} tries")


def random_automorphism(theta, rng, min_det=0.25, max_cond=20.0):
    """A random automorphism with a reasonably conditioned linear part."""
    signs = (1, -1) if theta.trace == 0.0 else (1,)
    while True:
        eps = int(rng.choice(signs))
        basis = twisted_commutant_basis(theta, eps)
        P = sum(c * B for c, B in zip(rng.normal(size=len(basis)), basis))
        if abs(np.linalg.det(P)) < min_det or np.linalg.cond(P) > max_cond:
            continue
        return Automorphism(theta, eps, P, rng.uniform(-1.0, 1.0, 2))
