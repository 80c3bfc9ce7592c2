import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ars3d.ars import ARS, Distribution
from ars3d.classify import (
    CLASS_DIRECTIONS,
    BranchWarning,
    automorphism_fit,
    canonical_ars,
    case_table,
    class_partition,
    classify,
    normalize_e0,
    orthonormal_complement,
)
from ars3d.errors import RankError
from ars3d.fields import LinearField, rank_two
from ars3d.linalg2 import ThetaForm
from ars3d.morphisms import Automorphism, pullback, verify_isometry
from ars3d.samplers import random_ars, random_automorphism, random_linear_field

from conftest import ALL_THETAS, FAMILIES

angles = st.floats(0.0, 2 * np.pi, exclude_max=True)


def rank_two_field(theta, rng):
    while True:
        X = random_linear_field(theta, rng)
        if rank_two(X):
            return X


def normalized(theta, X, sigma, eta):
    """Structure with orthonormal basis {(1, 0), (sigma, eta)}."""
    return ARS(theta, X, Distribution.from_rows([[1.0, 0.0, 0.0], [sigma, eta[0], eta[1]]]))


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(ALL_THETAS), angles, st.floats(0.2, 3.0))
def test_case_table_solves_the_intertwining_equations(theta, angle, r):
    eta = r * np.array([np.cos(angle), np.sin(angle)])
    cls, eps, P = case_table(theta, eta)
    T = theta.matrix
    assert cls in class_partition(theta)
    # coordinates below the branch threshold 1e-10 |eta| are treated as zero
    assert np.allclose(P @ CLASS_DIRECTIONS[cls], eps * eta, rtol=0, atol=2e-10 * r)
    assert np.allclose(P @ T, eps * T @ P, atol=1e-12)
    assert np.linalg.det(P) != 0.0


@pytest.mark.parametrize("theta", ALL_THETAS, ids=str)
def test_case_table_axis_branches(theta):
    for eta in ([2.0, 0.0], [0.0, 2.0], [-1.0, 0.0], [0.0, -3.0]):
        cls, eps, P = case_table(theta, np.array(eta))
        assert np.allclose(P @ CLASS_DIRECTIONS[cls], eps * np.array(eta))
        assert abs(np.linalg.det(P)) > 1e-12


def test_class_partition():
    assert class_partition(ThetaForm.rotation(0.7)) == {1}
    assert class_partition(ThetaForm.diagonal(1.0)) == {1}
    assert class_partition(ThetaForm.jordan()) == {1, 3}
    assert class_partition(ThetaForm.diagonal(-1.0)) == {1, 3}
    assert class_partition(ThetaForm.diagonal(0.3)) == {1, 2, 3}
    assert class_partition(ThetaForm.diagonal(0.0)) == {1, 2, 3}


def test_canonical_document_gives_identity_normalizer(rng):
    theta = ThetaForm.diagonal(0.3)
    X = rank_two_field(theta, rng)
    sigma = canonical_ars(theta, 1, X, 0.5)
    res = classify(sigma)
    assert res.cls == 1 and res.sigma == pytest.approx(0.5)
    assert np.allclose(res.normalizer.matrix, np.eye(3), atol=1e-12)
    assert res.isometry_residual < 1e-12


@pytest.mark.parametrize("theta", FAMILIES, ids=str)
def test_classify_random_structures(theta, rng):
    for _ in range(10):
        sigma = random_ars(theta, rng, rank_two_only=True)
        res = classify(sigma, samples=200)
        assert res.cls in class_partition(theta)
        assert res.sigma >= 0.0
        assert res.isometry_residual < 1e-8
        # normalizer pulls sigma back to the canonical structure, up to an
        # orthogonal change of the declared basis
        back = pullback(sigma, res.normalizer)
        K = np.array([back.delta.coordinates(c) for c in res.canonical.delta.basis])
        assert np.allclose(K @ back.delta.basis, res.canonical.delta.basis, atol=1e-9)
        assert np.allclose(K @ K.T, np.eye(2), atol=1e-9)
        assert np.allclose(back.X.A, res.canonical.X.A, atol=1e-9)
        assert np.allclose(back.X.xi, res.canonical.X.xi, atol=1e-9)
        again = classify(pullback(sigma, random_automorphism(theta, rng)), samples=100)
        assert again.cls == res.cls
        assert again.sigma == pytest.approx(res.sigma, rel=1e-7, abs=1e-9)


@pytest.mark.parametrize("theta", FAMILIES, ids=str)
def test_each_class_is_reached(theta, rng):
    X = rank_two_field(theta, rng)
    for cls in class_partition(theta):
        eta = 0.8 * CLASS_DIRECTIONS[cls]
        res = classify(normalized(theta, X, 0.4, eta))
        assert res.cls == cls


def test_diagonal_minus_one_vertical_branch_uses_time_reversal(rng):
    theta = ThetaForm.diagonal(-1.0)
    X = rank_two_field(theta, rng)
    y = 1.3
    sigma = normalized(theta, X, 0.6, [0.0, y])
    res = classify(sigma)
    assert res.cls == 1 and res.normalizer.eps == -1
    assert res.isometry_residual < 1e-9
    # the opposite sign of P sends the model onto the structure with sigma -> -sigma
    model = canonical_ars(theta, 1, pullback(sigma, Automorphism(theta, -1, [[0.0, y], [y, 0.0]])).X, 0.6)
    wrong = Automorphism(theta, -1, [[0.0, y], [y, 0.0]])
    assert not verify_isometry(wrong, model, sigma, samples=200).passed


def test_euclidean_boundary_is_flagged(rng):
    theta = ThetaForm.jordan()
    X = rank_two_field(theta, rng)
    res = classify(normalized(theta, X, 0.0, [0.0, -1.0]))
    assert res.euclidean and res.sigma == 0.0 and res.cls == 3
    assert res.isometry_residual < 1e-9


def test_near_branch_warns(rng):
    theta = ThetaForm.diagonal(0.3)
    X = rank_two_field(theta, rng)
    with pytest.warns(BranchWarning):
        res = classify(normalized(theta, X, 0.5, [1.0, 1e-8]))
    assert res.near_branch and res.cls == 3
    with warnings.catch_warnings():
        warnings.simplefilter("error", BranchWarning)
        assert classify(normalized(theta, X, 0.5, [1.0, 0.0])).cls == 1


def test_normalize_e0_and_complement(rng):
    theta = ThetaForm.rotation(0.7)
    sigma = random_ars(theta, rng, rank_two_only=True)
    sigma_n, psi_hat = normalize_e0(sigma)
    assert sigma_n.delta.contains(np.array([1.0, 0.0, 0.0]), 1e-10)
    assert verify_isometry(psi_hat, sigma, sigma_n, samples=200).passed
    s, eta = orthonormal_complement(sigma_n)
    # the minimal-norm choice in normalize_e0 leaves an orthogonal complement in n(theta)
    assert s == 0.0 and np.linalg.norm(eta) > 0


def test_sigma_is_not_an_isometry_invariant(rng):
    # (t, v) -> (t, v + Lambda_t eta) with (0, eta) in Delta keeps the plane Delta
    # but changes which element is carried to (1, 0), hence the metric's sigma
    theta = ThetaForm.diagonal(0.3)
    X = rank_two_field(theta, rng)
    model = canonical_ars(theta, 3, X, 0.7)
    m = Automorphism(theta, 1, np.eye(2), 0.4 * np.array([1.0, 1.0]))
    moved = pullback(model, m)
    assert moved.delta.contains(np.array([1.0, 0.0, 0.0]), 1e-12)
    res = classify(moved)
    assert res.cls == 3 and abs(res.sigma - 0.7) > 0.1
    assert res.isometry_residual < 1e-9


def test_classify_rejects_rank_deficient_and_non_linear_fields():
    theta = ThetaForm.diagonal(0.0)
    # xi = 0 and A = diag(1, 0) keep X inside a line; the plane still satisfies LARC
    flat = LinearField(theta, [0.0, 0.0], [[1.0, 0.0], [0.0, 0.0]])
    sigma = ARS(theta, flat, Distribution.from_rows([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]]))
    assert not rank_two(flat)
    with pytest.raises(RankError):
        classify(sigma)
    with pytest.raises(RankError):
        canonical_ars(theta, 1, flat, 0.0)
    bent = LinearField(theta, [1.0, 0.0], [[1.0, 1.0], [0.0, 1.0]], strict=False)
    with pytest.raises(ValueError):
        classify(normalized(theta, bent, 0.0, [0.0, 1.0]))


@pytest.mark.parametrize("theta", ALL_THETAS, ids=str)
def test_automorphism_fit(theta):
    part = class_partition(theta)
    for a in part:
        for b in part:
            fit = automorphism_fit(theta, a, b)
            if a != b:
                assert fit is None
                continue
            # the witness is an automorphism sending the class direction to its own line
            eps, P = fit
            Automorphism(theta, eps, P)
            n = CLASS_DIRECTIONS[a]
            image = P @ n
            assert abs(n[0] * image[1] - n[1] * image[0]) < 1e-12 * np.linalg.norm(image)
