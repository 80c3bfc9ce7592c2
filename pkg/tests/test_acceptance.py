"""Acceptance criteria, one test per criterion.

Each test records a single pass/fail line through the ``acceptance`` fixture;
the lines are repeated in the terminal summary.  Run alone with
``pytest tests/test_acceptance.py -s`` to see them inline.
"""

import io
import json
import time

import numpy as np
from scipy.integrate import quad_vec
from scipy.linalg import expm, null_space

from ars3d.ars import ARS, Distribution, Exponential, LinearFlow, ar_norm, ar_norm_arr, bracket, crossings
from ars3d.ars import frame_matrices, locus_F_arr
from ars3d.classify import automorphism_fit, canonical_ars, class_partition, classify
from ars3d.cli import main
from ars3d.errors import MaxRootsError
from ars3d.fields import flow_arr, rank_two
from ars3d.group import AlgebraElement, GroupPoint, exp_arr, inv_arr, mul_arr
from ars3d.linalg2 import expm2, lambda_op
from ars3d.morphisms import locus_points, pullback, verify_isometry
from ars3d.samplers import random_ars, random_automorphism, random_linear_field

from conftest import FAMILIES
from oracles import lambda_block, norm_by_search, rk4_linear_field


def rel_err(a, b):
    return float(np.max(np.abs(a - b) / (1.0 + np.abs(b))))


def test_criterion_1_counterexample(acceptance):
    out = io.StringIO()
    start = time.perf_counter()
    code = main(["demo-counterexample"], out=out)
    elapsed = time.perf_counter() - start
    r = json.loads(out.getvalue())
    ok = (
        code == 0
        and r["isometry"]
        and not r["automorphism"]
        and not r["rank_two"]
        and r["samples_checked"] >= 1000
        and r["max_rel_error"] < 1e-9
        and elapsed < 5.0
    )
    acceptance(
        1,
        "counterexample: isometry, not an automorphism, not rank two",
        ok,
        f"max error {r['max_rel_error']:.2e} over {r['samples_checked']} samples, {elapsed:.2f} s",
    )
    assert ok, r


def test_criterion_2_pullback_soundness(acceptance, rng):
    start = time.perf_counter()
    worst, failures = 0.0, 0
    for theta in FAMILIES:
        for _ in range(100):
            sigma = random_ars(theta, rng)
            m = random_automorphism(theta, rng)
            report = verify_isometry(m, pullback(sigma, m), sigma)
            worst = max(worst, report.max_rel_error)
            failures += not report.passed
    elapsed = time.perf_counter() - start
    ok = failures == 0 and worst < 1e-8 and elapsed < 60.0
    acceptance(2, "pullback makes the automorphism an isometry", ok,
               f"500 pairs, max error {worst:.2e}, {failures} failures, {elapsed:.1f} s")
    assert ok


def test_criterion_3_classification(acceptance, rng):
    start = time.perf_counter()
    problems = []
    worst = 0.0
    for theta in FAMILIES:
        part = class_partition(theta)
        seen = set()
        inputs = [random_ars(theta, rng, rank_two_only=True) for _ in range(100)]
        # random structures are almost always generic, so add pulled-back models of every class
        X = inputs[0].X
        for cls in part:
            for k in range(4):
                model = canonical_ars(theta, cls, X, 0.25 * k)
                inputs.append(pullback(model, random_automorphism(theta, rng)))
        for sigma in inputs:
            res = classify(sigma)
            seen.add(res.cls)
            worst = max(worst, res.isometry_residual)
            if res.cls not in part or not res.isometry_residual < 1e-8:
                problems.append((str(theta), res.cls, res.isometry_residual))
            again = classify(pullback(sigma, random_automorphism(theta, rng)), verify=False)
            if again.cls != res.cls:
                problems.append((str(theta), "pullback changed class", res.cls, again.cls))
        if seen != part:
            problems.append((str(theta), "classes seen", sorted(seen), sorted(part)))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 120.0
    acceptance(3, "classification lands in the partition, normalizer is an isometry, class is invariant", ok,
               f"max normalizer error {worst:.2e}, {elapsed:.1f} s")
    assert ok, problems[:5]


def test_criterion_4_disjointness(acceptance, rng):
    problems = []
    for theta in FAMILIES:
        while True:
            X = random_linear_field(theta, rng)
            if rank_two(X):
                break
        part = class_partition(theta)
        got = {}
        for name, eta in (("e1", [1.0, 0.0]), ("e2", [0.0, 1.0]), ("e1+e2", [1.0, 1.0])):
            delta = Distribution.from_rows([[1.0, 0.0, 0.0], [0.3, *eta]])
            got[name] = classify(ARS(theta, X, delta), verify=False).cls
        if set(got.values()) != part:
            problems.append((str(theta), got, sorted(part)))
        for a in part:
            for b in part:
                fit = automorphism_fit(theta, a, b)
                if (fit is None) != (a != b):
                    problems.append((str(theta), "fit", a, b, fit))
    ok = not problems
    acceptance(4, "constructed inputs separate the classes and no automorphism joins them", ok,
               f"{len(problems)} problems")
    assert ok, problems


def test_criterion_5_closed_forms_against_oracles(acceptance, rng):
    thetas = [FAMILIES[k % len(FAMILIES)] for k in range(100)]
    flow_err = 0.0
    for theta in FAMILIES:
        fields = [random_linear_field(theta, rng) for th in thetas if th == theta]
        A = np.array([X.A for X in fields])
        xi = np.array([X.xi for X in fields])
        p0 = rng.uniform(-2, 2, (len(fields), 4, 3))
        for s_max in (2.0, -2.0):
            s, states = rk4_linear_field(A, xi, theta.matrix, p0, s_max)
            for i, X in enumerate(fields):
                exact = flow_arr(X, s[:, None], np.broadcast_to(p0[i], (len(s), 4, 3)))
                flow_err = max(flow_err, float(np.max(np.abs(exact - states[:, i]))))
    mat_err = 0.0
    for k in range(400):
        A = rng.normal(size=(2, 2)) * rng.choice([1e-6, 1.0, 2.0])
        t = rng.uniform(-2, 2)
        ref_e, ref_l = expm(t * A), lambda_block(A, t)
        mat_err = max(mat_err, np.max(np.abs(expm2(A, t) - ref_e)) / max(1.0, np.max(np.abs(ref_e))))
        mat_err = max(mat_err, np.max(np.abs(lambda_op(A, t) - ref_l)) / max(1.0, np.max(np.abs(ref_l))))
        if k % 20 == 0:
            quad, _ = quad_vec(lambda u: expm(u * A), 0.0, t, epsabs=1e-14, epsrel=1e-13)
            mat_err = max(mat_err, np.max(np.abs(lambda_op(A, t) - quad)) / max(1.0, np.max(np.abs(quad))))
    ok = flow_err < 1e-6 and mat_err < 1e-10
    acceptance(5, "flow and matrix closed forms agree with RK4, expm and quadrature", ok,
               f"flow sup error {flow_err:.2e}, matrix relative error {mat_err:.2e}")
    assert ok


def test_criterion_6_invariant_suite(acceptance, rng):
    n = 10_000
    errs = {}
    for theta in FAMILIES:
        g, h, k = rng.uniform(-2, 2, (3, n, 3))
        e = np.zeros(3)
        errs["assoc"] = max(errs.get("assoc", 0.0),
                            rel_err(mul_arr(theta, mul_arr(theta, g, h), k), mul_arr(theta, g, mul_arr(theta, h, k))))
        errs["unit"] = max(errs.get("unit", 0.0), rel_err(mul_arr(theta, g, e), g), rel_err(mul_arr(theta, e, g), g))
        errs["inverse"] = max(errs.get("inverse", 0.0), rel_err(mul_arr(theta, g, inv_arr(theta, g)), 0 * g))

        x = rng.uniform(-1, 1, (n, 3))
        s, r = rng.uniform(-1.5, 1.5, (2, n, 1))
        errs["exp"] = max(errs.get("exp", 0.0), rel_err(
            exp_arr(theta, (s + r) * x), mul_arr(theta, exp_arr(theta, s * x), exp_arr(theta, r * x))))

        X = random_linear_field(theta, rng)
        tau = rng.uniform(-2, 2, n)
        errs["flow_hom"] = max(errs.get("flow_hom", 0.0), rel_err(
            flow_arr(X, tau, mul_arr(theta, g, h)), mul_arr(theta, flow_arr(X, tau, g), flow_arr(X, tau, h))))

        xs = [AlgebraElement.from_array(row) for row in x[:2000]]
        ys = [AlgebraElement.from_array(row) for row in rng.uniform(-1, 1, (2000, 3))]
        zs = [AlgebraElement.from_array(row) for row in rng.uniform(-1, 1, (2000, 3))]
        jac = 0.0
        for a, b, c in zip(xs, ys, zs):
            total = (bracket(theta, a, bracket(theta, b, c)).as_array()
                     + bracket(theta, b, bracket(theta, c, a)).as_array()
                     + bracket(theta, c, bracket(theta, a, b)).as_array())
            jac = max(jac, float(np.max(np.abs(total))))
        errs["jacobi"] = max(errs.get("jacobi", 0.0), jac)

    # cocycle and e^{sA} - I = Lambda_s A over 100 matrices x 100 parameters
    coc = lin = 0.0
    for _ in range(100):
        A = rng.normal(size=(2, 2))
        t, s = rng.uniform(-1.5, 1.5, (2, 100))
        lhs = lambda_op(A, t + s)
        rhs = lambda_op(A, t) + expm2(A, t) @ lambda_op(A, s)
        coc = max(coc, rel_err(lhs, rhs))
        lin = max(lin, rel_err(expm2(A, s) - np.eye(2), lambda_op(A, s) @ A))
    errs["cocycle"], errs["exp_minus_identity"] = coc, lin

    limits = {"assoc": 1e-12, "unit": 1e-12, "inverse": 1e-12, "exp": 1e-11, "flow_hom": 1e-11,
              "jacobi": 1e-12, "cocycle": 1e-10, "exp_minus_identity": 1e-10}
    bad = {k: v for k, v in errs.items() if not v < limits[k]}
    ok = not bad
    acceptance(6, "group, exponential, flow, cocycle and bracket identities on 10^4 samples", ok,
               ", ".join(f"{k} {v:.1e}" for k, v in sorted(errs.items())))
    assert ok, bad


def _onto_locus(sigma, p):
    # F is affine in v for fixed t, so one Newton step lands on the locus
    f0 = locus_F_arr(sigma, p)
    g = np.array([locus_F_arr(sigma, p + e) - f0 for e in np.eye(3)[1:]])
    q = p.copy()
    q[1:] -= f0 * g / (g @ g)
    return q


def test_criterion_7_norm(acceptance, rng):
    outside = 0
    unit_err = 0.0
    range_mismatch = 0
    for theta in FAMILIES:
        sigma = random_ars(theta, rng)
        for k in range(20):
            p = rng.uniform(-2, 2, 3)
            if k % 2:
                p = _onto_locus(sigma, p)
            M = frame_matrices(sigma, p)[0]
            Z = M @ rng.normal(size=3)
            got = ar_norm(sigma, GroupPoint.from_array(p), Z)
            ref = norm_by_search(M, Z, rng)
            outside += not (ref - 1e-3 <= got <= ref + 1e-8)

        pts = rng.uniform(-2, 2, (1000, 3))
        pts = pts[np.abs(locus_F_arr(sigma, pts)) > 1e-3]
        F = frame_matrices(sigma, pts)
        unit_err = max(unit_err, float(np.max(np.abs(ar_norm_arr(sigma, pts, np.transpose(F, (0, 2, 1))) - 1.0))))

        for _ in range(20):
            q = _onto_locus(sigma, rng.uniform(-2, 2, 3))
            M = frame_matrices(sigma, q)[0]
            u = null_space(M.T, rcond=1e-8)
            if u.shape[1] != 1:
                range_mismatch += 1
                continue
            inside = M @ rng.normal(size=3)
            off = inside + 0.5 * u[:, 0]
            n_in = ar_norm(sigma, GroupPoint.from_array(q), inside)
            n_off = ar_norm(sigma, GroupPoint.from_array(q), off)
            range_mismatch += (not np.isfinite(n_in)) + (n_off != np.inf)
    ok = outside == 0 and unit_err < 1e-9 and range_mismatch == 0
    acceptance(7, "norm matches the search oracle, frame is unit, infinity exactly off the range", ok,
               f"{outside}/100 outside the oracle band, unit error {unit_err:.1e}, "
               f"{range_mismatch} range mismatches")
    assert ok


def _along(sigma, curve, p0, s):
    base = np.broadcast_to(p0.as_array(), (len(s), 3))
    if isinstance(curve, Exponential):
        return mul_arr(sigma.theta, base, exp_arr(sigma.theta, s[:, None] * curve.gen.as_array()))
    return flow_arr(sigma.X, s, base)


def test_criterion_8_locus(acceptance, rng):
    zx_err = 0.0
    iso_err = 0.0
    curves = 0
    too_many = 0
    bad_roots = 0
    for theta in FAMILIES:
        # zeros of X
        for _ in range(10):
            sigma = random_ars(theta, rng)
            if abs(np.linalg.det(sigma.X.A)) < 1e-3:
                continue
            t = rng.uniform(-2, 2, 50)
            v = -np.linalg.solve(sigma.X.A, (lambda_op(theta.matrix, t) @ sigma.X.xi)[..., None])[..., 0]
            zx_err = max(zx_err, float(np.max(np.abs(locus_F_arr(sigma, np.column_stack([t, v]))))
                                       / (1 + np.max(np.abs(v)))))
        # isometries carry the locus into the locus
        for _ in range(10):
            sigma = random_ars(theta, rng)
            m = random_automorphism(theta, rng)
            pts = locus_points(pullback(sigma, m), 100, rng)
            iso_err = max(iso_err, float(np.max(np.abs(locus_F_arr(sigma, m.apply_arr(pts))))))
        # crossings on random curves
        for k in range(200):
            sigma = random_ars(theta, rng)
            p0 = GroupPoint.from_array(rng.uniform(-1, 1, 3))
            curve = Exponential(AlgebraElement.from_array(rng.uniform(-1, 1, 3))) if k % 2 else LinearFlow()
            curves += 1
            try:
                res = crossings(sigma, curve, p0, max_roots=32)
            except MaxRootsError:
                too_many += 1
                continue
            roots = np.array(res.roots)
            if res.contained:
                continue
            if len(roots) > 1 and np.min(np.diff(roots)) <= 0:
                bad_roots += 1
            # each root is a genuine zero of F along the curve
            if len(roots):
                vals = locus_F_arr(sigma, _along(sigma, curve, p0, roots))
                bad_roots += int(np.any(np.abs(vals) > 1e-8))
    ok = zx_err < 1e-10 and iso_err < 1e-7 and too_many == 0 and bad_roots == 0 and curves == 1000
    acceptance(8, "zeros of X on the locus, isometries preserve it, crossings stay isolated", ok,
               f"Z_X error {zx_err:.1e}, image error {iso_err:.1e}, {curves} curves, "
               f"{too_many} over max_roots, {bad_roots} bad roots")
    assert ok
