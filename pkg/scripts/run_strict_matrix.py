"""Spectral verification sweep over all nine strict family/reference pairings.

For each admissible pairing this builds the target system with canonical
parameters satisfying the strict relation, runs the independent matrix
verification, and prints the level-by-level comparison. The sextic family is
included on purpose even though its discrete operator is unbounded below;
the printed diagnostics show exactly what that looks like.

Usage: python scripts/run_strict_matrix.py [--levels K] [--grid-n N]
"""

import argparse
import sys
import time

from pctkit.massprofiles import MassParameters, MassProfile
from pctkit.pct import build_target, verify_target
from pctkit.refmodels import ReferenceModel

CANONICAL = {
    ("I", "STP"): MassParameters(alpha=1.0, beta=0.0, gamma=1.0, delta=1.0),
    ("I", "SCP"): MassParameters(alpha=1.0, beta=0.0, gamma=1.0, delta=1.0),
    ("I", "PTP"): MassParameters(alpha=1.0, beta=0.0, gamma=1.0, delta=0.5),
    ("II", "STP"): MassParameters(alpha=4.0, beta=1.0, gamma=1.0),
    ("II", "SCP"): MassParameters(alpha=4.0, beta=1.0, gamma=1.0),
    ("II", "PTP"): MassParameters(alpha=2.0, beta=1.0, gamma=1.0),
    ("III", "STP"): MassParameters(alpha=3.0, beta=1.0, gamma=1.0),
    ("III", "SCP"): MassParameters(alpha=3.0, beta=1.0, gamma=1.0),
    ("III", "PTP"): MassParameters(alpha=1.5, beta=1.0, gamma=1.0),
}


def make_reference(kind):
    if kind == "PTP":
        return ReferenceModel("PTP", chi=2.0, lam=2.0)
    return ReferenceModel(kind, mu=2.0)


def grid_for(kind, override):
    if override is not None:
        n = override
        return n + 1 if kind == "III" and n % 2 == 0 else n
    return {"I": 3999, "II": 4000, "III": 3999}[kind]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--grid-n", type=int, default=None)
    args = ap.parse_args(argv)

    for (kind, refkind), params in CANONICAL.items():
        ref = make_reference(refkind)
        ts = build_target(MassProfile(kind, params), ref)
        t0 = time.perf_counter()
        report = verify_target(
            ts,
            levels=args.levels,
            grid_n=grid_for(kind, args.grid_n),
            ladder=False,
            transport_checks=False,
        )
        dt = time.perf_counter() - t0

        print(f"\n=== kind {kind} + {refkind}  (N = {report.n_used}, {dt:.1f} s) ===")
        print(f"{'k':>3} {'E_analytic':>14} {'E_numeric':>22} {'rel_err':>12}")
        for row in report.rows:
            print(
                f"{row.k:>3} {row.energy_analytic:>14.6f} "
                f"{row.energy_numeric:>22.9g} {row.rel_err:>12.3e}"
            )
        for note in report.notes:
            print(f"  note: {note}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
