#!/usr/bin/env python3
"""Regenerate tests/data/fcurve_reference.csv with a high-precision oracle.

Independent evaluation path for the shape curve F[x, y]: mpmath tanh-sinh
quadrature at 24 significant digits, contour rays anchored at S0 = 2 (the
float64 production code uses Gauss-Legendre panels and S0 = 3), with the phase
and amplitudes coded here from scratch.  Anchored by the exact law
F[x, 0] = pi e^{-2x}.

Run once; the output table is committed as a test fixture.
"""

import csv
import sys
import time
from pathlib import Path

import mpmath as mp
import numpy as np

mp.mp.dps = 24
S0 = 2


def integrand(s, x, y):
    w = 1 + y * mp.atan(s)
    a = 1 / (1 + s * s)
    psi = w * s - y / 2 * mp.log(1 + s * s)
    return (a / w) * (1 - 1j * (y / (4 * x)) * a / (w * w)) * mp.e ** (-2j * x * psi)


def F_reference(x, y):
    x, y = mp.mpf(x), mp.mpf(y)
    central = mp.quad(lambda s: integrand(s, x, y),
                      [-S0, -1, "-0.5", 0, "0.5", 1, S0])
    total = central
    for sign in (1, -1):
        kappa = 1 + sign * y * mp.pi / 2
        scale = 1 / (2 * x * kappa)  # u where the ray envelope has decayed by e
        ray = mp.quad(lambda u: integrand(sign * S0 - 1j * u, x, y),
                      [0, scale, 10 * scale, 30 * scale])
        total += sign * (-1j) * ray
    return abs(total)


def main():
    out_path = Path(__file__).resolve().parent.parent / "tests" / "data" / "fcurve_reference.csv"
    points = []
    # the default replotting grid
    for x in np.geomspace(0.1, 4.0, 40):
        points.append((float(x), 0.5))
    # small-x law support points
    for x in np.geomspace(1e-3, 1e-2, 7):
        points.append((float(x), 0.5))
    # off-grid spot checks at other y
    for x in (0.3, 1.0, 2.5):
        for y in (0.2, 0.35):
            points.append((x, y))

    # anchor: the exact y = 0 law; tanh-sinh converges slowly on the most
    # oscillatory spans, so demand 1e-10 (four orders below the fixture's use)
    for x in (0.1, 1.0, 4.0):
        rel = abs(F_reference(x, 0) - mp.pi * mp.e ** (-2 * mp.mpf(x))) / (mp.pi * mp.e ** (-2 * mp.mpf(x)))
        assert rel < mp.mpf("1e-10"), f"anchor failed at x={x}: rel={rel}"
    print("y=0 anchors ok", flush=True)

    rows = []
    for i, (x, y) in enumerate(points):
        tic = time.time()
        F = F_reference(x, y)
        rows.append((repr(x), repr(y), mp.nstr(F, 20)))
        print(f"[{i + 1}/{len(points)}] F[{x:g}, {y:g}] = {mp.nstr(F, 17)} ({time.time() - tic:.1f}s)",
              flush=True)

    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "F_reference"])
        writer.writerows(rows)
    print(f"wrote {out_path} ({len(rows)} rows)")


if __name__ == "__main__":
    sys.exit(main())
