#!/usr/bin/env python3
"""Render a determinant-series CSV (from `spintomo determinant-series`).

Usage: plot_determinant_series.py series.csv [out.png]
"""
import sys

import numpy as np


def main(argv):
    if not 2 <= len(argv) <= 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    csv_path = argv[1]
    out_path = argv[2] if len(argv) == 3 else csv_path.rsplit(".", 1)[0] + ".png"
    header = None
    rows = []
    with open(csv_path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append([float(x) for x in line.split(",")])
    data = np.array(rows)

    fig, ax = plt.subplots(figsize=(8.5, 6.2))
    styles = ["-", ":", "--", "-."]
    for k, name in enumerate(header[1:]):
        ax.plot(data[:, 0], data[:, k + 1], styles[k % len(styles)],
                label=name.replace("delta_a", "mean photons = "))
    ax.set_xlabel("t")
    ax.set_ylabel("determinant")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    print(f"wrote {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
