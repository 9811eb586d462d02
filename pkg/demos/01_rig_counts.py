"""Testing a persistent count series for INAR(1) structure.

Weekly counts of active drilling rigs move in long runs: the ACF is high and
decays slowly, while the PACF cuts off after lag one. That pattern suggests an
INAR(1) model with a small innovation mean. The semi-parametric test checks
the whole INAR(1) class without committing to a Poisson or any other
innovation family.

Usage: python demos/01_rig_counts.py [counts-file] [B]
"""

import sys
from pathlib import Path

from inargof import StatConfig, gof_test, read_counts
from inargof.core import sample_acf, sample_moments, sample_pacf

path = Path(sys.argv[1]) if len(sys.argv) > 1 and sys.argv[1] else Path(__file__).parent / "data" / "rig_counts_standin.txt"
B = int(sys.argv[2]) if len(sys.argv) > 2 else 1000

x = read_counts(path)
mean, var, disp = sample_moments(x)
print(f"{path.name}: n={x.n}, mean={mean:.2f}, variance={var:.2f}, dispersion index={disp:.2f}")
acf, pacf = sample_acf(x, 5), sample_pacf(x, 5)
print("lag   ACF    PACF")
for k in range(1, 6):
    print(f"{k:3d} {acf[k]:6.3f} {pacf[k]:6.3f}")

# a = 5 puts most of the weight near u = 1, where the pgf reflects the bulk of the distribution
res = gof_test(x, p=1, cfg=StatConfig(s=1, a=5), B=B, seed=0)
fit = res.fit.model
print(f"\nfitted alpha = {fit.alphas[0]:.3f}, innovation mean = {fit.innovations.mean():.3f}")
print(f"T_n = {res.statistic:.4g}, bootstrap p-value = {res.p_value:.3f} (B={B})")
print("INAR(1) is", "rejected" if res.reject(0.05) else "not rejected", "at the 5% level")
