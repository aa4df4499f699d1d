"""Shared pytest hooks: per-criterion pass/fail lines for the acceptance gate."""

import re

_ACCEPTANCE = re.compile(r"test_criterion_(\d+)([a-z]?)(?:_([a-z0-9_]+))?")


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in str(report.nodeid):
        return
    match = _ACCEPTANCE.search(report.nodeid)
    if match is None:
        return
    number, sub, slug = match.groups()
    label = f"criterion {number}{sub or ''}"
    if slug:
        label += " (" + slug.replace("_", " ") + ")"
    if report.passed:
        status = "PASS"
    elif report.failed:
        status = "FAIL"
    else:
        status = report.outcome.upper()
    print(f"\n[ACCEPTANCE] {label}: {status}")
