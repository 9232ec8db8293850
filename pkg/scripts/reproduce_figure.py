#!/usr/bin/env python3
"""Reproduce the protocol-shape curve F[x, 1/2] with its flat-limit asymptote.

Writes a CSV (and optionally a PNG when matplotlib is available):

    python scripts/reproduce_figure.py --out fcurve.csv --plot fcurve.png
"""

import argparse

import numpy as np

from sta_cost.oscillatory import f_curve_result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fcurve.csv")
    parser.add_argument("--plot", default=None, help="optional PNG path")
    parser.add_argument("--y", type=float, default=0.5)
    parser.add_argument("--points", type=int, default=40)
    args = parser.parse_args()

    x = np.geomspace(0.1, 4.0, args.points)
    rows = []
    for xi in x:
        res = f_curve_result(float(xi), args.y)
        rows.append((float(xi), abs(res.value), float(np.pi * np.exp(-2 * xi)),
                     res.total_error))

    with open(args.out, "w", newline="\n") as fh:
        fh.write("x,F_xy,pi_exp_minus_2x,abs_error_estimate\n")
        for row in rows:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    print(f"wrote {args.out}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        data = np.array(rows)
        fig, ax = plt.subplots(figsize=(5, 3.4))
        ax.semilogy(data[:, 0], data[:, 1], "-", label=f"F[x, {args.y:g}]")
        ax.semilogy(data[:, 0], data[:, 2], "--", label=r"$\pi e^{-2x}$")
        ax.set_xlabel(r"$x = \omega_0 \tau$")
        ax.set_ylabel("F")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(args.plot, dpi=160)
        print(f"wrote {args.plot}")


if __name__ == "__main__":
    main()
