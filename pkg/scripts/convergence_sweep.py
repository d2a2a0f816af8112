"""Spline-count convergence of P for a list of (Z, state) points.

    python scripts/convergence_sweep.py --points 1:1s,92:1s,92:2p1/2 --splines 40,50,60,70,80,90
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace

from nuclear_recoil.recoil_one import RecoilConfig, p_function


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", default="1:1s,10:1s,92:1s,92:2s,92:2p1/2")
    parser.add_argument("--splines", default="40,50,60,70,80,90")
    args = parser.parse_args(argv)
    counts = [int(n) for n in args.splines.split(",")]
    base = RecoilConfig(sweep=())
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["Z", "state", "n_splines", "P_c", "P_tr1", "P_tr2", "P", "coulomb_gap", "transverse_one_gap"])
    for point in args.points.split(","):
        z, state = point.split(":")
        for n in counts:
            r = p_function(int(z), state, replace(base, n_splines=n))
            out.writerow([z, state, n] + [f"{v:.10g}" for v in (r.P_c, r.P_tr1, r.P_tr2, r.P,
                                                                 r.coulomb_gap, r.transverse_one_gap)])
    return 0


if __name__ == "__main__":
    sys.exit(run())
