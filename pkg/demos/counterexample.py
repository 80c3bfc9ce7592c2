"""
An isometry that is not an automorphism
=======================================

On G(theta) with theta = diag(1, 0), take the field X(t, v) = (0, (v2, 0)) and
the plane spanned by (1, 0) and (0, e2).  The time reversal (t, v) -> (-t, v)
preserves the metric, yet it is not a group automorphism.  The field here has
a matrix that does not commute with theta and its rank is one, so this is
consistent with the rigidity statement for rank-two linear fields.

Run with ``python demos/counterexample.py``.
"""

import numpy as np

from ars3d import GroupPoint, Tangent, ar_norm, is_automorphism, locus_F, rank_two, verify_isometry
from ars3d.cli import counterexample
from ars3d.group import mul_arr

sigma, m = counterexample()
print("theta      :", sigma.theta)
print("X          :", sigma.X)
print("admissible :", sigma.X.admissible, " rank two:", rank_two(sigma.X))

# The singular locus is {v2 = 0}: there X vanishes and the frame drops rank.
for p in (GroupPoint(0.3, [1.0, 0.0]), GroupPoint(0.3, [1.0, 0.5])):
    print(f"F(t={p.t}, v={p.v.tolist()}) = {locus_F(sigma, p):+.3f}")

# One tangent by hand: the norm of dm Z at m(p) equals the norm of Z at p.
p = GroupPoint(0.7, [0.2, -1.1])
Z = Tangent(p, 0.4, [-0.3, 0.9])
mp = GroupPoint.from_array(m.apply_arr(p.as_array()))
dZ = m.jacobian_arr(p.as_array()) @ Z.vector
print(f"|Z|_p = {ar_norm(sigma, p, Z):.15f}   |dm Z|_m(p) = {ar_norm(sigma, mp, dZ):.15f}")

# The sampled check, with locus points included.
report = verify_isometry(m, sigma, sigma)
print(f"isometry on {report.samples_checked} samples: {report.passed} (max relative error {report.max_rel_error:.1e})")

# m is not a homomorphism: compare m(gh) with m(g) m(h).
g, h = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
print("m(gh)      :", m.apply_arr(mul_arr(sigma.theta, g, h)))
print("m(g) m(h)  :", mul_arr(sigma.theta, m.apply_arr(g), m.apply_arr(h)))
print("automorphism:", is_automorphism(m))

# With a rank-two field on the same plane the same map stops being an isometry.
sigma2, _ = counterexample(rank_two_field=True)
report2 = verify_isometry(m, sigma2, sigma2)
print(f"rank-two field: isometry {report2.passed}, max relative error {report2.max_rel_error:.2f}")
