"""Deviation audit of every catalogued printed target form against the engine.

The registry keeps the catalogued closed-form expressions exactly as
printed, including their defects. This sweep quantifies each one: maximum
and mean absolute deviation from the engine's composed potential over the
tag's default window, plus the coefficient values, so the health of each
printed form is visible at a glance.

Observed outcomes, for orientation:
  * the sextic-family block reproduces the engine correction exactly, so
    only the composed-well part deviates,
  * the quartic-family block is a half-convention copy with a factor-two
    slip in its constant term,
  * the quadratic-family block mixes terms of different order and deviates
    strongly everywhere.
"""

import sys

from pctkit.massprofiles import MassParameters, MassProfile
from pctkit.pct import PAPER_FORM_TAGS, build_target, compare_paper_form
from pctkit.refmodels import ReferenceModel

SYSTEMS = {
    "Eq14": (("I", MassParameters(1.0, 0.0, 1.0, 1.0)), ("STP", 2.0)),
    "Eq19": (("I", MassParameters(1.0, 0.0, 1.0, 1.0)), ("SCP", 2.0)),
    "Eq24": (("I", MassParameters(1.0, 0.0, 1.0, 0.5)), ("PTP", None)),
    "Eq27": (("II", MassParameters(4.0, 1.0, 1.0)), ("STP", 2.0)),
    "Eq28": (("II", MassParameters(4.0, 1.0, 1.0)), ("SCP", 2.0)),
    "Eq29": (("II", MassParameters(2.0, 1.0, 1.0)), ("PTP", None)),
    "Eq32": (("III", MassParameters(3.0, 1.0, 1.0)), ("STP", 2.0)),
    "Eq33": (("III", MassParameters(3.0, 1.0, 1.0)), ("SCP", 2.0)),
    "Eq34": (("III", MassParameters(1.5, 1.0, 1.0)), ("PTP", None)),
}


def main():
    for tag in PAPER_FORM_TAGS:
        (kind, params), (refkind, mu) = SYSTEMS[tag]
        ref = (
            ReferenceModel("PTP", chi=2.0, lam=2.0)
            if refkind == "PTP"
            else ReferenceModel(refkind, mu=mu)
        )
        ts = build_target(MassProfile(kind, params), ref)
        report = compare_paper_form(ts, tag)

        coeffs = ", ".join(f"{k}={v:.6g}" for k, v in report.coefficients.items())
        print(f"{tag}  (kind {kind} + {refkind})")
        print(f"  coefficients: {coeffs}")
        print(
            f"  |deviation|: max {report.max_abs_deviation:.6g}, "
            f"mean {report.mean_abs_deviation:.6g} over {len(report.rows)} points"
        )
        for note in report.notes:
            print(f"  note: {note}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
