"""Pochhammer symbols and terminating Gauss hypergeometric sums.

Every bound state handled by this package is, up to an elementary prefactor,
a polynomial: a 2F1 whose first upper parameter is a nonpositive integer, so
the series stops after n + 1 terms. The evaluator below exploits exactly
that. Successive terms come from a ratio recurrence rather than explicit
factorials, which keeps intermediates small, and the sum is accumulated with
compensated summation by default.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreeError, DomainError, ValidationError

__all__ = ["PolyEvalSettings", "pochhammer", "hyp2f1_terminating"]


@dataclass(frozen=True)
class PolyEvalSettings:
    """Limits for terminating polynomial evaluation.

    max_degree bounds the accepted polynomial degree. summation selects the
    accumulation scheme: "plain" adds terms left to right, "compensated"
    carries a Kahan correction term.
    """

    max_degree: int = 30
    summation: str = "compensated"

    def __post_init__(self):
        if self.max_degree < 0:
            raise ValidationError("max_degree must be nonnegative")
        if self.summation not in ("plain", "compensated"):
            raise ValidationError(
                f"summation must be 'plain' or 'compensated', got {self.summation!r}"
            )


_DEFAULT = PolyEvalSettings()


def pochhammer(a: float, k: int) -> float:
    """Rising factorial a (a+1) ... (a+k-1); the empty product is 1.

    Exact zero whenever a is a nonpositive integer with -a < k, since the
    product then walks through zero.
    """
    if k < 0:
        raise ValidationError("k must be nonnegative")
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


def hyp2f1_terminating(n: int, b: float, c: float, x, settings: PolyEvalSettings | None = None):
    """Evaluate 2F1(-n, b; c; x) as its finite (n+1)-term sum.

    Parameters
    ----------
    n : int
        Polynomial degree, n >= 0. Must not exceed settings.max_degree.
    b, c : float
        Remaining upper and lower parameters. c may not be a nonpositive
        integer >= -n + 1, else a denominator inside the sum vanishes.
    x : float or ndarray
        Argument. Arrays are evaluated elementwise in one pass.
    settings : PolyEvalSettings, optional
        Degree bound and summation scheme; module defaults otherwise.

    Returns
    -------
    float or ndarray
        The polynomial value, scalar in, scalar out.

    Notes
    -----
    Terms follow the ratio recurrence

        t_{k+1} = t_k * (-n + k) (b + k) x / ((c + k) (k + 1)),

    starting from t_0 = 1.
    """
    s = settings if settings is not None else _DEFAULT
    if n < 0:
        raise ValidationError("degree n must be nonnegative")
    if n > s.max_degree:
        raise DegreeError(f"degree {n} exceeds max_degree {s.max_degree}")
    if c <= 0 and c == int(c) and -c < n:
        raise DomainError(
            f"c = {c} is a nonpositive integer inside the sum; denominator vanishes"
        )

    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)

    total = np.zeros_like(xa)
    comp = np.zeros_like(xa)
    term = np.ones_like(xa)
    compensated = s.summation == "compensated"
    for k in range(n + 1):
        if compensated:
            y = term - comp
            t = total + y
            comp = (t - total) - y
            total = t
        else:
            total = total + term
        if k < n:
            term = term * ((k - n) * (b + k) / ((c + k) * (k + 1))) * xa
    return float(total[0]) if scalar else total
