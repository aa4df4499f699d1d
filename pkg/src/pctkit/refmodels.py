"""Constant-mass reference problems with closed-form spectra and states.

Three solvable families on bounded intervals, in units with
hbar^2 / (2 m0) = 1 so the eigenproblem reads -Phi'' + U Phi = E Phi:

  STP  squared tangent    U(y) = mu (mu-1) tan(a y)^2       on (-pi/(2a), pi/(2a))
  SCP  squared cotangent  U(y) = mu (mu-1) cot(a y)^2       on (0, pi/a)
  PTP  two-center well    U(y) = chi(chi-1)/sin(a y)^2
                                + lam(lam-1)/cos(a y)^2      on (0, pi/(2a))

The argument scale a stretches the interval; a general well strength U0 at
scale a is realized by the effective parameter from scaled_mu, not by an
overall multiplier. Eigenfunctions are elementary prefactors times
terminating hypergeometric polynomials; the antisymmetric squared-cotangent
branch is catalogued in closed form only at mu = 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracles
from .errors import DomainError, UnsupportedError, ValidationError
from .specfun import hyp2f1_terminating

__all__ = [
    "ReferenceModel",
    "scaled_mu",
    "ref_potential",
    "ref_energy",
    "ref_wavefunction_raw",
    "ref_normalization",
    "LevelEntry",
    "SpectrumTable",
    "ref_spectrum_table",
]

_KINDS = ("STP", "SCP", "PTP")


@dataclass(frozen=True)
class ReferenceModel:
    """One solvable constant-mass problem.

    kind selects the family. STP and SCP take the strength parameter mu;
    PTP takes the pair (chi, lam). scale is the argument scale a > 0.
    """

    kind: str
    mu: float | None = None
    chi: float | None = None
    lam: float | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if not self.scale > 0:
            raise ValidationError("scale must be positive")
        if self.kind in ("STP", "SCP"):
            if self.mu is None or not self.mu >= 1.0:
                raise ValidationError(f"{self.kind} requires mu >= 1")
            if self.chi is not None or self.lam is not None:
                raise ValidationError(f"{self.kind} takes mu only, not chi/lam")
        else:
            if self.chi is None or not self.chi >= 1.0:
                raise ValidationError("PTP requires chi >= 1")
            if self.lam is None or not self.lam >= 1.0:
                raise ValidationError("PTP requires lam >= 1")
            if self.mu is not None:
                raise ValidationError("PTP takes chi and lam, not mu")

    @property
    def domain(self) -> tuple[float, float]:
        a = self.scale
        if self.kind == "STP":
            return (-math.pi / (2.0 * a), math.pi / (2.0 * a))
        if self.kind == "SCP":
            return (0.0, math.pi / a)
        return (0.0, math.pi / (2.0 * a))


def scaled_mu(U0: float, a: float) -> float:
    """Strength parameter equivalent to well depth U0 at argument scale a.

    Inverts U0 = a^2 m (m - 1) for the root m >= 1:
    m = (1 + sqrt(1 + 4 U0 / a^2)) / 2.
    """
    if not a > 0:
        raise ValidationError("scale must be positive")
    if U0 < 0:
        raise ValidationError("U0 must be nonnegative")
    return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * U0 / (a * a)))


def _eff(value: float, scale: float) -> float:
    # identity at unit scale, exact; otherwise depth-preserving remap
    if scale == 1.0:
        return value
    return scaled_mu(value * (value - 1.0), scale)


def _check_inside(model: ReferenceModel, y: np.ndarray):
    lo, hi = model.domain
    if np.any(y <= lo) or np.any(y >= hi):
        raise DomainError(f"argument outside the open interval ({lo}, {hi})")


def ref_potential(model: ReferenceModel, y):
    """Potential value(s) strictly inside the model's interval."""
    ya = np.asarray(y, dtype=float)
    scalar = ya.ndim == 0
    ya = np.atleast_1d(ya)
    _check_inside(model, ya)
    u = model.scale * ya
    if model.kind == "STP":
        out = model.mu * (model.mu - 1.0) * np.tan(u) ** 2
    elif model.kind == "SCP":
        out = model.mu * (model.mu - 1.0) / np.tan(u) ** 2
    else:
        out = model.chi * (model.chi - 1.0) / np.sin(u) ** 2 + model.lam * (
            model.lam - 1.0
        ) / np.cos(u) ** 2
    return float(out[0]) if scalar else out


def ref_energy(model: ReferenceModel, k: int) -> float:
    """k-th energy level, k = 0, 1, 2, ... counted across both parities.

    STP and SCP share one ladder once levels are interleaved by parity:
    E_{2n} = 4 n (n + mu) + mu and E_{2n+1} = (2n+1)(2n + 2 mu + 1) + mu,
    both multiplied by scale^2 with mu replaced by its scaled equivalent.
    PTP: E_k = (scale * (2 k + chi + lam))^2 under the same replacement.
    """
    if k < 0:
        raise ValidationError("level index must be nonnegative")
    a = model.scale
    if model.kind in ("STP", "SCP"):
        m = _eff(model.mu, a)
        n, parity = divmod(k, 2)
        if parity == 0:
            e = 4.0 * n * (n + m) + m
        else:
            e = (2.0 * n + 1.0) * (2.0 * n + 2.0 * m + 1.0) + m
        return a * a * e
    c = _eff(model.chi, a)
    l = _eff(model.lam, a)
    return (a * (2.0 * k + c + l)) ** 2


def ref_wavefunction_raw(model: ReferenceModel, k: int, y):
    """Unnormalized k-th eigenfunction, scalar or elementwise on arrays.

    Closed forms (u = scale * y, parameters at their scaled equivalents):

      STP even   cos(u)^mu            2F1(-n, n+mu;   mu+1/2; cos(u)^2)
      STP odd    sin(u) cos(u)^mu     2F1(-n, n+mu+1; mu+1/2; cos(u)^2)
      SCP even   sin(u)^mu            2F1(-n, n+mu;   mu+1/2; sin(u)^2)
      SCP odd    sin(u)^3             2F1(-n, n+3;    7/2;    sin(u)^2)   [mu = 3 only]
      PTP        sin(u)^chi cos(u)^lam 2F1(-k, k+chi+lam; chi+1/2; sin(u)^2)

    "even"/"odd" refer to parity about the interval midpoint and take
    k = 2n / 2n+1. Raises UnsupportedError for the SCP odd branch when the
    effective mu differs from 3.
    """
    if k < 0:
        raise ValidationError("level index must be nonnegative")
    ya = np.asarray(y, dtype=float)
    scalar = ya.ndim == 0
    ya = np.atleast_1d(ya)
    _check_inside(model, ya)
    u = model.scale * ya

    if model.kind == "STP":
        m = _eff(model.mu, model.scale)
        n, parity = divmod(k, 2)
        c2 = np.cos(u) ** 2
        if parity == 0:
            val = np.cos(u) ** m * hyp2f1_terminating(n, n + m, m + 0.5, c2)
        else:
            val = np.sin(u) * np.cos(u) ** m * hyp2f1_terminating(n, n + m + 1.0, m + 0.5, c2)
    elif model.kind == "SCP":
        m = _eff(model.mu, model.scale)
        n, parity = divmod(k, 2)
        s2 = np.sin(u) ** 2
        if parity == 0:
            val = np.sin(u) ** m * hyp2f1_terminating(n, n + m, m + 0.5, s2)
        else:
            if m != 3.0:
                raise UnsupportedError(
                    "antisymmetric squared-cotangent states are catalogued only at mu = 3"
                )
            val = np.sin(u) ** 3 * hyp2f1_terminating(n, n + 3.0, 3.5, s2)
    else:
        c = _eff(model.chi, model.scale)
        l = _eff(model.lam, model.scale)
        s2 = np.sin(u) ** 2
        val = (
            np.sin(u) ** c
            * np.cos(u) ** l
            * hyp2f1_terminating(k, k + c + l, c + 0.5, s2)
        )
    return float(val[0]) if scalar else val


def ref_normalization(
    model: ReferenceModel, k: int, settings: oracles.QuadratureSettings | None = None
) -> float:
    """L2 normalization constant for the raw k-th eigenfunction."""
    lo, hi = model.domain

    def squared(t):
        if t <= lo or t >= hi:
            return 0.0
        v = ref_wavefunction_raw(model, k, t)
        return v * v

    norm2 = oracles.integrate(squared, (lo, hi), settings)
    if not norm2 > 0:
        raise ValidationError("raw state has nonpositive norm")
    return 1.0 / math.sqrt(norm2)


@dataclass(frozen=True)
class LevelEntry:
    k: int
    energy: float
    parity: str


@dataclass(frozen=True)
class SpectrumTable:
    """First K levels of one reference model, energies strictly increasing."""

    kind: str
    levels: tuple

    def __post_init__(self):
        e = [entry.energy for entry in self.levels]
        if any(b <= a for a, b in zip(e, e[1:])):
            raise ValidationError("spectrum must be strictly increasing")

    def energies(self) -> np.ndarray:
        return np.asarray([entry.energy for entry in self.levels], dtype=float)


def ref_spectrum_table(model: ReferenceModel, K: int) -> SpectrumTable:
    """Table of the lowest K levels with parity tags (PTP carries none)."""
    if K < 1:
        raise ValidationError("K must be positive")
    entries = []
    for k in range(K):
        if model.kind == "PTP":
            parity = "none"
        else:
            parity = "even" if k % 2 == 0 else "odd"
        entries.append(LevelEntry(k, ref_energy(model, k), parity))
    return SpectrumTable(model.kind, tuple(entries))
