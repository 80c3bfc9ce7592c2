"""
Slices of the singular locus
============================

The singular locus is the zero set of F(t, v) = det[u | rho_t eta*], where u
is the v-part of X(t, v).  For fixed t it is affine in v, so each slice is a
line (or empty, or the whole plane).  This script writes a few slices to CSV
and checks them against F.

Run with ``python demos/locus_slice.py [outdir]``.
"""

import sys
from pathlib import Path

import numpy as np

from ars3d import ThetaForm, locus_slice
from ars3d.ars import locus_F_arr, write_slice_csv
from ars3d.samplers import random_ars

outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("locus_slices")
outdir.mkdir(parents=True, exist_ok=True)
rng = np.random.default_rng(0x5EED)

sigma = random_ars(ThetaForm.rotation(0.7), rng, rank_two_only=True)
print("X:", sigma.X)
print("eta*:", sigma.eta_star)

for t in (-1.0, 0.0, 1.0):
    lines = locus_slice(sigma, t, (-2, 2, -2, 2), 81)
    path = outdir / f"slice_t{t:+.1f}.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        count = write_slice_csv(lines, t, fh)
    pts = np.vstack([np.column_stack([np.full(len(line), t), line]) for line in lines]) if lines else np.empty((0, 3))
    worst = np.max(np.abs(locus_F_arr(sigma, pts))) if len(pts) else 0.0
    # the slice is a segment of a line: fit it and report the direction
    if len(pts) > 1:
        d = pts[-1, 1:] - pts[0, 1:]
        direction = d / np.linalg.norm(d)
    else:
        direction = None
    print(f"t = {t:+.1f}: {count} points in {len(lines)} polyline(s), max |F| {worst:.1e}, direction {direction}")
    print("   written to", path)
