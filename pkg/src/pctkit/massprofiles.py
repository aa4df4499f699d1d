"""Parametric mass families, their coordinate maps, and strict constraints.

Each family is the square of a rational expression, so masses are
nonnegative with at most isolated zeros, and sqrt(m) integrates in closed
form to an arctan. The map f(z) = integral of sqrt(m), plus an additive
shift, carries the z line (or half line) onto the bounded interval a
reference problem lives on.

  kind I    m = (delta / (alpha + beta z + gamma z^2))^2          on all z
  kind II   m = (alpha z / (beta^4 + gamma^4 z^4))^2              on z > 0
  kind III  m = (alpha z^2 / (beta^2 + gamma^2 z^6))^2            on all z

The closed-form maps and the first two mass derivatives were re-derived by
direct integration/differentiation; the test suite certifies each against
quadrature and finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracles
from .errors import DomainError, RangeError, ValidationError

__all__ = [
    "MassParameters",
    "MassProfile",
    "validate",
    "mass_value",
    "mass_d1",
    "mass_d2",
    "map_forward",
    "map_forward_quadrature",
    "map_inverse",
    "map_range",
    "ConstraintSpec",
    "strict_constraint",
]

_KINDS = ("I", "II", "III")


@dataclass(frozen=True)
class MassParameters:
    """Raw family coefficients. delta only matters for kind I."""

    alpha: float
    beta: float = 0.0
    gamma: float = 1.0
    delta: float = 1.0

    @property
    def Delta(self) -> float:
        """Discriminant combination 4 alpha gamma - beta^2 of kind I."""
        return 4.0 * self.alpha * self.gamma - self.beta * self.beta


def validate(params: MassParameters, kind: str) -> list:
    """Positivity/nondegeneracy violations for the given family, as strings.

    An empty list means the parameters are admissible.
    """
    if kind not in _KINDS:
        raise ValidationError(f"kind must be one of {_KINDS}, got {kind!r}")
    bad = []
    if kind == "I":
        if not params.gamma > 0:
            bad.append("kind I requires gamma > 0")
        if not params.delta > 0:
            bad.append("kind I requires delta > 0")
        if not params.Delta > 0:
            bad.append("kind I requires Delta = 4 alpha gamma - beta^2 > 0")
    elif kind == "II":
        if not params.alpha > 0:
            bad.append("kind II requires alpha > 0")
        if params.beta == 0:
            bad.append("kind II requires beta != 0")
        if params.gamma == 0:
            bad.append("kind II requires gamma != 0")
    else:
        if not params.alpha > 0:
            bad.append("kind III requires alpha > 0")
        if not params.beta > 0:
            bad.append("kind III requires beta > 0")
        if not params.gamma > 0:
            bad.append("kind III requires gamma > 0")
    return bad


@dataclass(frozen=True)
class MassProfile:
    """A validated mass family instance plus the additive map shift."""

    kind: str
    params: MassParameters
    shift: float = 0.0

    def __post_init__(self):
        bad = validate(self.params, self.kind)
        if bad:
            raise ValidationError("; ".join(bad))

    @property
    def z_domain(self) -> tuple[float, float]:
        if self.kind == "II":
            return (0.0, math.inf)
        return (-math.inf, math.inf)


def _as_array(z):
    za = np.asarray(z, dtype=float)
    return za.ndim == 0, np.atleast_1d(za)


def _check_z(profile: MassProfile, za: np.ndarray):
    if profile.kind == "II" and np.any(za <= 0.0):
        raise DomainError("kind II lives on z > 0")


def mass_value(profile: MassProfile, z):
    """m(z) for scalars or arrays."""
    scalar, za = _as_array(z)
    _check_z(profile, za)
    p = profile.params
    if profile.kind == "I":
        q = p.alpha + p.beta * za + p.gamma * za * za
        out = (p.delta / q) ** 2
    elif profile.kind == "II":
        out = (p.alpha * za / (p.beta**4 + p.gamma**4 * za**4)) ** 2
    else:
        out = (p.alpha * za * za / (p.beta**2 + p.gamma**2 * za**6)) ** 2
    return float(out[0]) if scalar else out


def mass_d1(profile: MassProfile, z):
    """dm/dz in closed form."""
    scalar, za = _as_array(z)
    _check_z(profile, za)
    p = profile.params
    if profile.kind == "I":
        q = p.alpha + p.beta * za + p.gamma * za * za
        out = -2.0 * p.delta**2 * (p.beta + 2.0 * p.gamma * za) / q**3
    elif profile.kind == "II":
        dd = p.beta**4 + p.gamma**4 * za**4
        a2 = p.alpha * p.alpha
        out = 2.0 * a2 * za / dd**2 - 8.0 * a2 * p.gamma**4 * za**5 / dd**3
    else:
        dd = p.beta**2 + p.gamma**2 * za**6
        a2 = p.alpha * p.alpha
        out = 4.0 * a2 * za**3 / dd**2 - 12.0 * a2 * p.gamma**2 * za**9 / dd**3
    return float(out[0]) if scalar else out


def mass_d2(profile: MassProfile, z):
    """d2m/dz2 in closed form."""
    scalar, za = _as_array(z)
    _check_z(profile, za)
    p = profile.params
    if profile.kind == "I":
        q = p.alpha + p.beta * za + p.gamma * za * za
        qp = p.beta + 2.0 * p.gamma * za
        out = -4.0 * p.gamma * p.delta**2 / q**3 + 6.0 * p.delta**2 * qp * qp / q**4
    elif profile.kind == "II":
        dd = p.beta**4 + p.gamma**4 * za**4
        a2 = p.alpha * p.alpha
        g4 = p.gamma**4
        out = (
            2.0 * a2 / dd**2
            - 56.0 * a2 * g4 * za**4 / dd**3
            + 96.0 * a2 * g4 * g4 * za**8 / dd**4
        )
    else:
        dd = p.beta**2 + p.gamma**2 * za**6
        a2 = p.alpha * p.alpha
        g2 = p.gamma * p.gamma
        out = (
            12.0 * a2 * za**2 / dd**2
            - 156.0 * a2 * g2 * za**8 / dd**3
            + 216.0 * a2 * g2 * g2 * za**14 / dd**4
        )
    return float(out[0]) if scalar else out


def map_forward(profile: MassProfile, z):
    """y = f(z) + shift, the closed-form antiderivative of sqrt(m)."""
    scalar, za = _as_array(z)
    _check_z(profile, za)
    p = profile.params
    if profile.kind == "I":
        rt = math.sqrt(p.Delta)
        out = (2.0 * p.delta / rt) * np.arctan((p.beta + 2.0 * p.gamma * za) / rt)
    elif profile.kind == "II":
        out = (p.alpha / (2.0 * p.beta**2 * p.gamma**2)) * np.arctan(
            p.gamma**2 * za**2 / p.beta**2
        )
    else:
        out = (p.alpha / (3.0 * p.beta * p.gamma)) * np.arctan(p.gamma * za**3 / p.beta)
    out = out + profile.shift
    return float(out[0]) if scalar else out


def map_forward_quadrature(
    profile: MassProfile,
    z_from: float,
    z_to: float,
    settings: oracles.QuadratureSettings | None = None,
) -> float:
    """Increment f(z_to) - f(z_from) by direct quadrature of sqrt(m).

    Reference route for certifying the closed-form map; shift cancels.
    """

    def integrand(t):
        if profile.kind == "II" and t <= 0.0:
            return 0.0
        return math.sqrt(mass_value(profile, t))

    return oracles.integrate(integrand, (z_from, z_to), settings)


def map_range(profile: MassProfile) -> tuple[float, float]:
    """Open interval (f + shift) sweeps as z runs over the family's domain."""
    p = profile.params
    if profile.kind == "I":
        half = math.pi * p.delta / math.sqrt(p.Delta)
        return (-half + profile.shift, half + profile.shift)
    if profile.kind == "II":
        top = p.alpha * math.pi / (4.0 * p.beta**2 * p.gamma**2)
        return (profile.shift, top + profile.shift)
    half = p.alpha * math.pi / (6.0 * p.beta * p.gamma)
    return (-half + profile.shift, half + profile.shift)


def _inverse_bisection(profile: MassProfile, target: float) -> float:
    # monotone fallback: f is strictly increasing on the domain
    if profile.kind == "II":
        zlo, zhi = 0.0, 1.0
        while map_forward(profile, zhi) < target:
            zhi *= 2.0
    else:
        zlo, zhi = -1.0, 1.0
        while map_forward(profile, zlo) > target:
            zlo *= 2.0
        while map_forward(profile, zhi) < target:
            zhi *= 2.0
    for _ in range(200):
        mid = 0.5 * (zlo + zhi)
        val = map_forward(profile, mid)
        if abs(val - target) <= 1e-12 * (1.0 + abs(target)):
            return mid
        if val < target:
            zlo = mid
        else:
            zhi = mid
    return 0.5 * (zlo + zhi)


def map_inverse(profile: MassProfile, y):
    """z with f(z) + shift = y; closed form, bisection as a safety net."""
    scalar, ya = _as_array(y)
    lo, hi = map_range(profile)
    if np.any(ya <= lo) or np.any(ya >= hi):
        raise RangeError(f"value outside the map range ({lo}, {hi})")
    p = profile.params
    t = ya - profile.shift
    if profile.kind == "I":
        rt = math.sqrt(p.Delta)
        out = (-p.beta + rt * np.tan(rt * t / (2.0 * p.delta))) / (2.0 * p.gamma)
    elif profile.kind == "II":
        arg = np.tan(2.0 * p.beta**2 * p.gamma**2 * t / p.alpha)
        out = np.sqrt(p.beta**2 * arg) / abs(p.gamma)
    else:
        arg = np.tan(3.0 * p.beta * p.gamma * t / p.alpha) * p.beta / p.gamma
        out = np.cbrt(arg)
    if not np.all(np.isfinite(out)):
        out = np.asarray(
            [_inverse_bisection(profile, float(v)) for v in np.atleast_1d(ya)], dtype=float
        )
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class ConstraintSpec:
    """One strict-mode pairing rule: parameter relation plus map shift."""

    parameter_relation: str
    shift: float
    _lhs: object
    _rhs: object

    def satisfied(self, params: MassParameters) -> bool:
        lhs = self._lhs(params)
        rhs = self._rhs(params)
        return abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1.0)

    def residual(self, params: MassParameters) -> float:
        return self._lhs(params) - self._rhs(params)


_CONSTRAINTS = {
    ("I", "STP"): ConstraintSpec(
        "delta = sqrt(Delta) / 2",
        0.0,
        lambda p: p.delta,
        lambda p: math.sqrt(p.Delta) / 2.0,
    ),
    ("I", "SCP"): ConstraintSpec(
        "delta = sqrt(Delta) / 2",
        math.pi / 2.0,
        lambda p: p.delta,
        lambda p: math.sqrt(p.Delta) / 2.0,
    ),
    ("I", "PTP"): ConstraintSpec(
        "delta = sqrt(Delta) / 4",
        math.pi / 4.0,
        lambda p: p.delta,
        lambda p: math.sqrt(p.Delta) / 4.0,
    ),
    ("II", "STP"): ConstraintSpec(
        "alpha = 4 beta^2 gamma^2",
        -math.pi / 2.0,
        lambda p: p.alpha,
        lambda p: 4.0 * p.beta**2 * p.gamma**2,
    ),
    ("II", "SCP"): ConstraintSpec(
        "alpha = 4 beta^2 gamma^2",
        0.0,
        lambda p: p.alpha,
        lambda p: 4.0 * p.beta**2 * p.gamma**2,
    ),
    ("II", "PTP"): ConstraintSpec(
        "alpha = 2 beta^2 gamma^2",
        0.0,
        lambda p: p.alpha,
        lambda p: 2.0 * p.beta**2 * p.gamma**2,
    ),
    ("III", "STP"): ConstraintSpec(
        "alpha = 3 beta gamma",
        0.0,
        lambda p: p.alpha,
        lambda p: 3.0 * p.beta * p.gamma,
    ),
    ("III", "SCP"): ConstraintSpec(
        "alpha = 3 beta gamma",
        math.pi / 2.0,
        lambda p: p.alpha,
        lambda p: 3.0 * p.beta * p.gamma,
    ),
    ("III", "PTP"): ConstraintSpec(
        "alpha = 3 beta gamma / 2",
        math.pi / 4.0,
        lambda p: p.alpha,
        lambda p: 1.5 * p.beta * p.gamma,
    ),
}


def strict_constraint(kind: str, reference_kind: str) -> ConstraintSpec:
    """Parameter relation and shift that align a family with a reference.

    Strict mode demands the map range equal the reference interval exactly;
    these are the nine admissible pairings.
    """
    try:
        return _CONSTRAINTS[(kind, reference_kind)]
    except KeyError:
        raise ValidationError(
            f"no strict pairing for mass kind {kind!r} with reference {reference_kind!r}"
        ) from None
