"""Higher-order statistics detect dependence beyond the fitted lag.

Per-minute transaction counts are often modelled as INGARCH(1,1), whose
conditional mean carries the whole past. The first-order statistic compares
only the joint pgf of (X_t, X_{t-1}) and can miss the extra memory. The
second-order statistic (s = 2) compares the pgf of (X_t, X_{t-1}, X_{t-2})
under the same INAR(1) fit, with alpha_2 set to zero.

Usage: python demos/03_higher_order.py [counts-file] [B]
"""

import sys
from pathlib import Path

from inargof import StatConfig, gof_test, read_counts
from inargof.core import sample_pacf

path = Path(sys.argv[1]) if len(sys.argv) > 1 and sys.argv[1] else Path(__file__).parent / "data" / "ingarch_standin.txt"
B = int(sys.argv[2]) if len(sys.argv) > 2 else 1000

x = read_counts(path)
pacf = sample_pacf(x, 3)
print(f"{path.name}: n={x.n}, PACF lags 1-3: " + ", ".join(f"{v:.3f}" for v in pacf[1:]))

for s in (1, 2):
    res = gof_test(x, p=1, cfg=StatConfig(s=s, a=5), B=B, seed=0)
    verdict = "reject" if res.reject(0.05) else "do not reject"
    print(f"s={s}: T_n = {res.statistic:.4g}, p-value = {res.p_value:.3f} -> {verdict} INAR(1)")
