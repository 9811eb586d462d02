"""Where on [0,1]^2 does the fitted INAR(1) pgf miss the empirical one?

The statistic integrates a weighted squared pgf difference over the unit
square. Writing that integrand on a grid shows which region drives the
statistic; larger a shifts the weight toward u = 1. The CSV has columns
u0, u1, value and can be fed to any plotting tool.

Usage: python demos/05_heatmap.py [counts-file] [a] [out.csv]
"""

import csv
import sys
from pathlib import Path

from inargof import fit_semiparametric, read_counts
from inargof.pgf import weighted_squared_difference

path = Path(sys.argv[1]) if len(sys.argv) > 1 and sys.argv[1] else Path(__file__).parent / "data" / "ingarch_standin.txt"
a = float(sys.argv[2]) if len(sys.argv) > 2 else 5.0
out = sys.argv[3] if len(sys.argv) > 3 else "heatmap.csv"

x = read_counts(path)
fit = fit_semiparametric(x, 1)
grid = weighted_squared_difference(fit.model, x, a, 21)
with open(out, "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["u0", "u1", "value"])
    w.writerows(grid)
u0, u1, peak = max(grid, key=lambda r: r[2])
print(f"largest weighted squared difference {peak:.3g} at u0={u0:.2f}, u1={u1:.2f}; wrote {out}")
