"""Regenerate the simulated stand-in series in ``demos/data``.

The real data sets (weekly Alaska drilling rig counts, daily transaction
counts of structured products, per-minute stock transaction counts) are not
redistributed here. Each file below is a simulated series with a similar
length and similar summary statistics, in the same one-count-per-line format.
To run a demo on real data, drop a file with one count per line into
``demos/data`` and pass its path to the demo script.
"""

from pathlib import Path

from inargof import RngStream, parse_dgp, simulate
from inargof.io import write_counts

DATA = Path(__file__).parent / "data"

STANDINS = {
    # highly persistent, small innovation mean
    "rig_counts_standin.txt": ("poi-inar1:lambda=0.8,alpha=0.9", 417, 1991),
    # overdispersed: mean about 1.47, dispersion index about 1.5
    "transactions_standin.txt": ("geom-inar1:pi=0.57,alpha=0.48", 404, 2017),
    # INGARCH(1,1): dependence beyond one lag
    "ingarch_standin.txt": ("ingarch11:beta0=0.6,beta1=0.55,alpha1=0.4", 460, 2002),
}


def main():
    DATA.mkdir(exist_ok=True)
    for name, (dgp, n, seed) in STANDINS.items():
        x = simulate(parse_dgp(dgp), n, RngStream(seed).generator())
        write_counts(x, DATA / name)
        print(f"{name}: {dgp}, n={n}, seed={seed}")


if __name__ == "__main__":
    main()
