"""
Normal forms of rank-two structures
===================================

A random rank-two structure is brought to its model by an explicit
automorphism.  The model has orthonormal frame {(1, 0), (sigma, n)} where
n is e1, e2 or (1, 1) according to the class.  Pulling the structure back by
any other automorphism leaves the class unchanged.

Run with ``python demos/classification_walkthrough.py``.
"""

import numpy as np

from ars3d import Automorphism, ThetaForm, class_partition, classify, pullback, verify_isometry
from ars3d.classify import CLASS_DIRECTIONS, automorphism_fit, canonical_ars
from ars3d.samplers import random_ars, random_automorphism

rng = np.random.default_rng(0x5EED)
np.set_printoptions(precision=4, suppress=True)

for theta in (ThetaForm.jordan(), ThetaForm.diagonal(-1.0), ThetaForm.diagonal(0.3), ThetaForm.rotation(0.7)):
    print(f"\n== {theta}: classes {sorted(class_partition(theta))}")
    sigma = random_ars(theta, rng, rank_two_only=True)
    res = classify(sigma)
    print("input basis:\n", sigma.delta.basis)
    print(f"class {res.cls}, sigma = {res.sigma:.4f}, scale = {res.scale:.4f}")
    print("normalizer [[eps, 0], [eta, P]]:\n", res.normalizer.matrix)
    print(f"normalizer is an isometry onto the input: error {res.isometry_residual:.1e}")

    # models of each class, disguised by a random automorphism, are recovered
    for cls in sorted(class_partition(theta)):
        model = canonical_ars(theta, cls, sigma.X, 0.5)
        hidden = pullback(model, random_automorphism(theta, rng))
        print(f"  model of class {cls} (n = {CLASS_DIRECTIONS[cls]}) classified as {classify(hidden, verify=False).cls}")

    # distinct classes cannot be joined by an automorphism
    part = sorted(class_partition(theta))
    pairs = [(a, b) for a in part for b in part if a < b]
    print("  automorphism between distinct classes:", {f"{a}->{b}": automorphism_fit(theta, a, b) for a, b in pairs})

# sigma depends on the choice of representative: (t, v) -> (t, v + Lambda_t eta)
# with (0, eta) in the plane is an automorphism that keeps the plane but moves sigma.
theta = ThetaForm.diagonal(0.3)
X = random_ars(theta, rng, rank_two_only=True).X
model = canonical_ars(theta, 3, X, 0.7)
shift = Automorphism(theta, 1, np.eye(2), 0.4 * np.ones(2))
moved = pullback(model, shift)
print(f"\nsigma before the shift {classify(model).sigma:.4f}, after {classify(moved).sigma:.4f}")
print("shift is an isometry:", verify_isometry(shift, moved, model, samples=300).passed)
