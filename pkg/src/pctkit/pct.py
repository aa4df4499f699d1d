"""Target construction by coordinate transplant, plus independent verification.

The construction: take a solvable constant-mass reference on a bounded
interval, take a mass family whose map y = f(z) + shift covers exactly that
interval, and transplant

    U_target(z) = U_ref(f(z) + shift) + V_m(z)
    Psi_k(z)    = m(z)^(1/4) * N_k * Phi_k(f(z) + shift)
    E_k         = reference E_k, unchanged

with the mass-induced correction, in units hbar^2 / (2 m0) = 1 for the
divided kinetic form -(d/dz)((1/m) d/dz) + U,

    V_m(z) = (1/(4 m)) * (m''/m - (7/4) (m'/m)^2).

The correction coefficient is switchable to 1/(8 m) purely as a
falsification probe: the verification pipeline must reject spectra built
with the halved coefficient.

Strict mode demands the family parameters satisfy the pairing relation that
makes the map range equal the reference interval at unit argument scale.
Scaled mode instead rescales the reference interval onto whatever range the
given parameters produce, adjusting the level formulas through the
depth-preserving effective parameter.

The verification half rebuilds the spectrum from m and U_target alone,
through the discretized divided operator and Sturm bisection, and compares
level by level. It shares no closed-form spectral knowledge with the
construction other than the analytic energies it compares against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import massprofiles as mp
from . import oracles
from . import refmodels as rm
from .errors import ConstraintError, SingularError, ValidationError

__all__ = [
    "TargetSystem",
    "mass_correction",
    "build_target",
    "target_potential",
    "target_energy",
    "transport_wavefunction",
    "resolve_window",
    "verify_target",
    "PAPER_FORM_TAGS",
    "paper_form_coefficients",
    "paper_form_potential",
    "DeviationRow",
    "DeviationReport",
    "compare_paper_form",
]

_MASS_FLOOR = 1e-300

# verification window and grid defaults, calibrated per family so that the
# Dirichlet truncation error sits well below each family's tolerance while
# the matrix norm stays inside what extended precision resolves
_EPS_FRAC = {"I": 1.0 / 500.0, "II": 1.0 / 450.0, "III": 1.0 / 640.0}
_N_DEFAULT = {"I": 13999, "II": 8000, "III": 7999}


@dataclass(frozen=True)
class TargetSystem:
    """A constructed variable-mass problem tied to its reference."""

    profile: mp.MassProfile
    reference: rm.ReferenceModel
    mode: str
    correction_coefficient: float = 0.25

    def __post_init__(self):
        if self.mode not in ("strict", "scaled"):
            raise ValidationError(f"mode must be 'strict' or 'scaled', got {self.mode!r}")
        if not self.correction_coefficient > 0:
            raise ValidationError("correction coefficient must be positive")

    @property
    def z_domain(self) -> tuple[float, float]:
        return self.profile.z_domain


def mass_correction(profile: mp.MassProfile, z, coefficient: float = 0.25):
    """The mass-induced potential term, (coefficient/m)(m''/m - 7/4 (m'/m)^2).

    coefficient = 1/4 is the value consistent with the divided kinetic form
    in these units; 1/8 is kept reachable as a falsification probe only.
    Raises SingularError at zeros of m.
    """
    scalar = np.asarray(z).ndim == 0
    za = np.atleast_1d(np.asarray(z, dtype=float))
    m = np.atleast_1d(np.asarray(mp.mass_value(profile, za), dtype=float))
    if np.any(m < _MASS_FLOOR):
        raise SingularError("correction term diverges where the mass vanishes")
    m1 = np.atleast_1d(np.asarray(mp.mass_d1(profile, za), dtype=float))
    m2 = np.atleast_1d(np.asarray(mp.mass_d2(profile, za), dtype=float))
    r = m1 / m
    out = (coefficient / m) * (m2 / m - 1.75 * r * r)
    return float(out[0]) if scalar else out


def build_target(
    profile: mp.MassProfile,
    reference: rm.ReferenceModel,
    mode: str = "strict",
    correction_coefficient: float = 0.25,
) -> TargetSystem:
    """Pair a mass family with a reference problem.

    The reference must be supplied at unit argument scale; any shift on the
    incoming profile is ignored and replaced by the alignment value. Strict
    mode raises ConstraintError when the family parameters miss the pairing
    relation. Scaled mode accepts any admissible parameters and stretches
    the reference interval onto the actual map range.
    """
    if reference.scale != 1.0:
        raise ValidationError(
            "pass the reference at unit scale; scaled mode derives the scale itself"
        )
    spec = mp.strict_constraint(profile.kind, reference.kind)
    if mode == "strict":
        if not spec.satisfied(profile.params):
            raise ConstraintError(
                f"strict pairing of kind {profile.kind} with {reference.kind} needs "
                f"{spec.parameter_relation} (residual {spec.residual(profile.params):.6g})"
            )
        prof = replace(profile, shift=spec.shift)
        ref = reference
    elif mode == "scaled":
        lo1, hi1 = reference.domain
        mlo, mhi = mp.map_range(replace(profile, shift=0.0))
        a = (hi1 - lo1) / (mhi - mlo)
        ref = replace(reference, scale=a)
        prof = replace(profile, shift=spec.shift / a)
    else:
        raise ValidationError(f"mode must be 'strict' or 'scaled', got {mode!r}")
    return TargetSystem(prof, ref, mode, correction_coefficient)


def target_potential(ts: TargetSystem, z):
    """U_target = composed reference potential plus the mass correction.

    Defined only where m(z) >= 1e-300; raises SingularError otherwise.
    """
    scalar = np.asarray(z).ndim == 0
    za = np.atleast_1d(np.asarray(z, dtype=float))
    y = mp.map_forward(ts.profile, za)
    out = np.asarray(rm.ref_potential(ts.reference, y), dtype=float) + mass_correction(
        ts.profile, za, ts.correction_coefficient
    )
    return float(out[0]) if scalar else out


def target_energy(ts: TargetSystem, k: int) -> float:
    """Level k of the constructed system: identical to the reference level."""
    return rm.ref_energy(ts.reference, k)


@lru_cache(maxsize=256)
def _norm_constant(reference: rm.ReferenceModel, k: int) -> float:
    # the map has unit Jacobian between dz weighted by sqrt(m) and dy, so
    # the z-side normalization constant equals the y-side one
    return rm.ref_normalization(reference, k)


def transport_wavefunction(ts: TargetSystem, k: int, z):
    """Normalized k-th target state m^(1/4) N_k Phi_k(f(z) + shift).

    At isolated zeros of m the transported value is the limit 0 and is
    returned as such. Raises UnsupportedError for states whose reference
    closed form is not catalogued.
    """
    scalar = np.asarray(z).ndim == 0
    za = np.atleast_1d(np.asarray(z, dtype=float))
    m = np.atleast_1d(np.asarray(mp.mass_value(ts.profile, za), dtype=float))
    out = np.zeros_like(m)
    ok = m >= _MASS_FLOOR
    if np.any(ok):
        y = mp.map_forward(ts.profile, za[ok])
        raw = rm.ref_wavefunction_raw(ts.reference, k, y)
        out[ok] = m[ok] ** 0.25 * _norm_constant(ts.reference, k) * raw
    return float(out[0]) if scalar else out


# ----------------------------------------------------------------------
# verification pipeline


def _state_supported(ts: TargetSystem, k: int) -> bool:
    lo, hi = ts.reference.domain
    try:
        rm.ref_wavefunction_raw(ts.reference, k, 0.5 * (lo + hi))
    except Exception:
        return False
    return True


def resolve_window(ts: TargetSystem, eps_map: float | None = None):
    """Truncation window (z_lo, z_hi, eps) used by verification and export.

    The window ends eps inside the mapped interval boundaries, with eps
    defaulting to a per-family fraction of the interval length. Symmetric
    problems get an exactly symmetric window.
    """
    lo, hi = ts.reference.domain
    eps = eps_map if eps_map is not None else (hi - lo) * _EPS_FRAC[ts.profile.kind]
    if not 0 < eps < 0.25 * (hi - lo):
        raise ValidationError("eps_map must be positive and small against the interval")
    if ts.profile.kind == "II":
        z_lo = 0.0
        z_hi = float(mp.map_inverse(ts.profile, hi - eps))
    elif ts.profile.kind == "III" or ts.profile.params.beta == 0.0:
        z_hi = float(mp.map_inverse(ts.profile, hi - eps))
        z_lo = -z_hi
    else:
        z_lo = float(mp.map_inverse(ts.profile, lo + eps))
        z_hi = float(mp.map_inverse(ts.profile, hi - eps))
    return z_lo, z_hi, eps


def _node_potential(ts: TargetSystem):
    # at an isolated interior mass zero only the composed reference part has
    # a finite limit; the divergent correction is omitted at that one node
    def u(z):
        za = np.asarray(z, dtype=float)
        m = np.asarray(mp.mass_value(ts.profile, za), dtype=float)
        ok = m >= _MASS_FLOOR
        if ok.all():
            return target_potential(ts, za)
        out = np.empty_like(za)
        out[ok] = target_potential(ts, za[ok])
        out[~ok] = rm.ref_potential(ts.reference, mp.map_forward(ts.profile, za[~ok]))
        return out

    return u


def _ladder_sizes(kind: str, n: int):
    sizes = []
    for divisor in (8, 4, 2, 1):
        cand = max(15, n // divisor)
        if kind == "III" and cand % 2 == 0:
            cand += 1
        if cand not in sizes:
            sizes.append(cand)
    return sizes


def verify_target(
    ts: TargetSystem,
    levels: int = 4,
    grid_n: int | None = None,
    eps_map: float | None = None,
    quad: oracles.QuadratureSettings | None = None,
    ladder: bool = True,
    transport_checks: bool | None = None,
) -> oracles.VerificationReport:
    """Independent spectral confirmation of a constructed system.

    Truncates the line to a window reaching eps_map inside the mapped
    interval ends, discretizes the divided operator at N and 2N + 1 interior
    nodes, Richardson-extrapolates each level, and compares against the
    analytic energies. With ladder=True a sequence of plain single-grid
    solves at N/8, N/4, N/2, N is recorded as convergence evidence.

    transport_checks (default: only for kind I, where the mass is strictly
    positive) adds finite-difference residuals of the transported states,
    their Gram matrix defect, sampled node counts, and two-sided norm
    defects to the report.
    """
    if levels < 1:
        raise ValidationError("levels must be positive")
    profile, ref = ts.profile, ts.reference
    z_lo, z_hi, eps = resolve_window(ts, eps_map)
    n = grid_n if grid_n is not None else _N_DEFAULT[profile.kind]
    if profile.kind == "III" and n % 2 == 0:
        raise ValidationError(
            "kind III verification needs odd N so the mass zero falls on a node"
        )

    mass_f = lambda zz: mp.mass_value(profile, zz)  # noqa: E731
    pot_f = _node_potential(ts)
    notes = [
        f"window z in [{z_lo:.9g}, {z_hi:.9g}], boundary margin eps_map = {eps:.6g}"
    ]

    grid_nodes_have_zero = profile.kind == "III"
    if grid_nodes_have_zero:
        notes.append(
            "mass zero at z = 0 pinned to a grid node; correction term omitted there"
        )

    op_coarse = oracles.discretize_pdem(mass_f, pot_f, (z_lo, z_hi), n)
    e_coarse = oracles.lowest_eigenvalues(op_coarse, levels)
    op_fine = oracles.discretize_pdem(mass_f, pot_f, (z_lo, z_hi), 2 * n + 1)
    e_fine = oracles.lowest_eigenvalues(op_fine, levels)
    est = oracles.richardson(e_coarse, e_fine)

    analytic = np.asarray([target_energy(ts, k) for k in range(levels)], dtype=float)
    rows = []
    for k in range(levels):
        abs_err = abs(est[k] - analytic[k])
        rel_err = abs_err / max(abs(analytic[k]), 1.0)
        rows.append(oracles.LevelRow(k, float(analytic[k]), float(est[k]), abs_err, rel_err))

    convergence = []
    if ladder:
        for size in _ladder_sizes(profile.kind, n):
            op = oracles.discretize_pdem(mass_f, pot_f, (z_lo, z_hi), size)
            vals = oracles.lowest_eigenvalues(op, levels)
            worst = max(
                abs(v - a) / max(abs(a), 1.0) for v, a in zip(vals, analytic)
            )
            convergence.append((size, float(worst)))

    if profile.kind == "III" and est[0] < analytic[0] - max(1.0, 0.1 * abs(analytic[0])):
        vec = oracles.eigenvector(op_fine, float(e_fine[0]))
        zs = op_fine.grid.nodes()
        weight = vec * vec
        frac = float(np.sum(weight[np.abs(zs) <= 5 * op_fine.grid.h]) / np.sum(weight))
        notes.append(
            f"lowest numeric level {est[0]:.6g} holds {frac:.1%} of its norm within "
            "5 grid spacings of the mass zero; it is a spacing artifact of the "
            "discretized divided operator, which is unbounded below there"
        )

    do_transport = transport_checks if transport_checks is not None else profile.kind == "I"
    residuals = gram_defect = node_counts = norm_defects = None
    if do_transport:
        supported = [k for k in range(levels) if _state_supported(ts, k)]
        skipped = sorted(set(range(levels)) - set(supported))
        if skipped:
            notes.append(
                f"levels {skipped} have no catalogued closed-form state; "
                "transport checks cover the remaining levels"
            )
        states = [
            (lambda zz, kk=k: transport_wavefunction(ts, kk, zz)) for k in supported
        ]

        a_s = max(z_lo + 0.02 * (z_hi - z_lo), -20.0)
        b_s = min(z_hi - 0.02 * (z_hi - z_lo), 20.0)
        sample = np.linspace(a_s, b_s, 801)

        res = {}
        for k, psi in zip(supported, states):
            res[k] = oracles.residual_norm(
                lambda zz: target_potential(ts, zz), psi, analytic[k], sample, mass=mass_f
            )
        residuals = tuple(res.get(k) for k in range(levels))

        gram = oracles.orthonormality_matrix(states, (z_lo, z_hi), quad)
        gram_defect = float(np.max(np.abs(gram - np.eye(len(states)))))

        counts = []
        for k in range(levels):
            if k in supported:
                counts.append(oracles.count_nodes(transport_wavefunction(ts, k, sample)))
            else:
                counts.append(None)
        node_counts = tuple(counts)

        lo_y, hi_y = ref.domain
        defects = []
        for i, k in enumerate(supported):
            nk = _norm_constant(ref, k)
            y_side = nk * nk * oracles.integrate(
                lambda t, kk=k: (
                    0.0
                    if t <= lo_y or t >= hi_y
                    else rm.ref_wavefunction_raw(ref, kk, t) ** 2
                ),
                (lo_y, hi_y),
                quad,
            )
            defects.append(abs(float(gram[i, i]) - y_side))
        norm_defects = tuple(defects)
    else:
        notes.append("transport checks skipped for this run")

    return oracles.VerificationReport(
        rows=tuple(rows),
        n_used=n,
        richardson_estimate=tuple(float(v) for v in est),
        convergence=tuple(convergence),
        residual_norms=residuals,
        gram_defect=gram_defect,
        node_counts=node_counts,
        norm_defects=norm_defects,
        notes=tuple(notes),
    )


# ----------------------------------------------------------------------
# catalogued printed closed forms, kept verbatim as comparators
#
# These reproduce, symbol for symbol, the printed presentation this
# construction is usually quoted in. They are retained untouched, defects
# included, so that the engine's independently derived potentials can be
# diffed against them point by point. Tags are opaque identifiers.


def _printed_block_I(p: mp.MassParameters, z):
    q = p.alpha + p.beta * z + p.gamma * z * z
    bracket = -(7.0 * p.beta + 8.0 * p.gamma + 2.0 * p.gamma * z) + 8.0 * (
        p.beta + 2.0 * p.gamma * z
    ) ** 2 / q
    return bracket / (32.0 * q**4 * p.delta**2)


def _printed_block_II(p: mp.MassParameters, z):
    sigma = p.alpha**2 / (4.0 * p.beta**8 * p.gamma**8)
    return (
        (21.0 / (8.0 * p.alpha**2)) * z**4
        + (5.0 / (32.0 * sigma)) / z**4
        + (5.0 / (32.0 * sigma)) / (p.beta**4 * p.gamma**4)
    )


def _printed_block_III(p: mp.MassParameters, z):
    d = p.beta**2 + p.gamma**2 * z**6
    return (4.0 / z**6 * d * d - 3.0 * p.gamma**2 * d + 9.0 * p.gamma**4 * z**6) / p.alpha**2


def _mu_strength(ref: rm.ReferenceModel) -> float:
    return ref.mu * (ref.mu - 1.0)


def _ptp_strengths(ref: rm.ReferenceModel):
    # two-center well printed with an overall depth U0 = 2 in these units
    u0 = 2.0
    return u0, ref.chi * (ref.chi - 1.0), ref.lam * (ref.lam - 1.0)


def _c14(p, ref):
    kappa = 4.0 * p.delta**2 / p.Delta
    u0 = _mu_strength(ref)
    return {"U0": u0, "kappa": kappa, "Ubar0": kappa * u0}


def _p14(p, ref, z):
    c = _c14(p, ref)
    return c["Ubar0"] * (p.beta + 2.0 * p.gamma * z) ** 2 + _printed_block_I(p, z)


def _p19(p, ref, z):
    c = _c14(p, ref)
    return c["Ubar0"] * (p.beta + 2.0 * p.gamma * z) ** (-2.0) + _printed_block_I(p, z)


def _c24(p, ref):
    u0, u01, u02 = _ptp_strengths(ref)
    return {
        "U0": u0,
        "U01": u01,
        "U02": u02,
        "Ubar_omega": 1.0 + 4.0 * p.delta**2 * u0 / p.Delta,
    }


def _p24(p, ref, z):
    c = _c24(p, ref)
    s = p.beta + 2.0 * p.gamma * z
    return c["Ubar_omega"] * (c["U01"] / s**2 + c["U02"] * s**2) + _printed_block_I(p, z)


def _c27(p, ref):
    sigma = p.alpha**2 / (4.0 * p.beta**8 * p.gamma**8)
    u0 = _mu_strength(ref)
    return {"U0": u0, "sigma": sigma, "Utilde0": sigma * u0}


def _p27(p, ref, z):
    return _c27(p, ref)["Utilde0"] * z ** (-4.0) - _printed_block_II(p, z)


def _c29(p, ref):
    sigma = p.alpha**2 / (4.0 * p.beta**8 * p.gamma**8)
    u0, u01, u02 = _ptp_strengths(ref)
    return {"U0": u0, "U01": u01, "U02": u02, "sigma": sigma, "Utilde0": sigma * u0}


def _p29(p, ref, z):
    c = _c29(p, ref)
    return (
        -(c["U01"] / c["Utilde0"]) * z ** (-4.0)
        + c["U02"] * (1.0 + c["Utilde0"] * z**4)
        - _printed_block_II(p, z)
    )


def _c32(p, ref):
    kappa = 81.0 * p.beta**4 * p.gamma**4 / p.alpha**2
    u0 = _mu_strength(ref)
    return {"U0": u0, "kappa": kappa, "Uhat0": kappa * u0}


def _p32(p, ref, z):
    return _c32(p, ref)["Uhat0"] * z**6 - _printed_block_III(p, z)


def _p33(p, ref, z):
    return _c32(p, ref)["Uhat0"] * z ** (-6.0) - _printed_block_III(p, z)


def _c34(p, ref):
    omega = p.alpha**2 / (81.0 * p.beta**4 * p.gamma**4)
    u0, u01, u02 = _ptp_strengths(ref)
    return {"U0": u0, "U01": u01, "U02": u02, "omega": omega, "Utilde_omega": omega * u0}


def _p34(p, ref, z):
    c = _c34(p, ref)
    return (
        -(c["U01"] / c["Utilde_omega"]) * z ** (-6.0)
        + c["U02"] * (1.0 + c["Utilde_omega"] * z**6)
        - _printed_block_III(p, z)
    )


# tag -> (mass kind, reference kind, coefficients, potential, default z grid)
_PAPER_FORMS = {
    "Eq14": ("I", "STP", _c14, _p14, (-2.0, 2.0)),
    "Eq19": ("I", "SCP", _c14, _p19, (0.15, 2.0)),
    "Eq24": ("I", "PTP", _c24, _p24, (0.15, 2.0)),
    "Eq27": ("II", "STP", _c27, _p27, (0.2, 2.0)),
    "Eq28": ("II", "SCP", _c27, _p27, (0.2, 2.0)),
    "Eq29": ("II", "PTP", _c29, _p29, (0.2, 2.0)),
    "Eq32": ("III", "STP", _c32, _p32, (0.2, 2.0)),
    "Eq33": ("III", "SCP", _c32, _p33, (0.2, 2.0)),
    "Eq34": ("III", "PTP", _c34, _p34, (0.2, 2.0)),
}

PAPER_FORM_TAGS = tuple(sorted(_PAPER_FORMS))


def _lookup_tag(tag: str):
    try:
        return _PAPER_FORMS[tag]
    except KeyError:
        raise ValidationError(
            f"unknown tag {tag!r}; known tags: {', '.join(PAPER_FORM_TAGS)}"
        ) from None


def paper_form_coefficients(tag: str, profile: mp.MassProfile, reference: rm.ReferenceModel):
    """Scalar coefficients of the catalogued printed form, by name."""
    kind, refkind, coeffs, _, _ = _lookup_tag(tag)
    if profile.kind != kind or reference.kind != refkind:
        raise ValidationError(
            f"tag {tag} describes mass kind {kind} with a {refkind} reference; "
            f"got kind {profile.kind} with {reference.kind}"
        )
    return coeffs(profile.params, reference)


def paper_form_potential(tag: str, profile: mp.MassProfile, reference: rm.ReferenceModel, z):
    """The catalogued printed potential, evaluated exactly as printed."""
    kind, refkind, _, pot, _ = _lookup_tag(tag)
    if profile.kind != kind or reference.kind != refkind:
        raise ValidationError(
            f"tag {tag} describes mass kind {kind} with a {refkind} reference; "
            f"got kind {profile.kind} with {reference.kind}"
        )
    scalar = np.asarray(z).ndim == 0
    za = np.atleast_1d(np.asarray(z, dtype=float))
    out = pot(profile.params, reference, za)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class DeviationRow:
    z: float
    engine: float
    printed: float
    abs_dev: float


@dataclass(frozen=True)
class DeviationReport:
    """Pointwise diff between the engine potential and a printed form."""

    tag: str
    coefficients: dict
    rows: tuple
    max_abs_deviation: float
    mean_abs_deviation: float
    notes: tuple = field(default_factory=tuple)


def compare_paper_form(ts: TargetSystem, tag: str, z_grid=None) -> DeviationReport:
    """Diff the engine's target potential against a catalogued printed form.

    Informational by design: the report carries deviations, it does not
    judge them. The default grid for each tag avoids points where either
    expression is singular.
    """
    kind, refkind, _, _, default_grid = _lookup_tag(tag)
    if ts.profile.kind != kind or ts.reference.kind != refkind:
        raise ValidationError(
            f"tag {tag} describes mass kind {kind} with a {refkind} reference; "
            f"got kind {ts.profile.kind} with {ts.reference.kind}"
        )
    if z_grid is None:
        z_grid = np.linspace(default_grid[0], default_grid[1], 101)
    za = np.atleast_1d(np.asarray(z_grid, dtype=float))
    engine = np.atleast_1d(np.asarray(target_potential(ts, za), dtype=float))
    printed = np.atleast_1d(
        np.asarray(paper_form_potential(tag, ts.profile, ts.reference, za), dtype=float)
    )
    dev = np.abs(engine - printed)
    rows = tuple(
        DeviationRow(float(zz), float(ee), float(pp), float(dd))
        for zz, ee, pp, dd in zip(za, engine, printed, dev)
    )
    coeffs = paper_form_coefficients(tag, ts.profile, ts.reference)
    notes = []
    if float(np.max(dev)) > 1e-9 * max(1.0, float(np.max(np.abs(engine)))):
        notes.append(
            "printed form deviates from the engine potential; the engine value "
            "is the one the spectral verification confirms"
        )
    return DeviationReport(
        tag=tag,
        coefficients=coeffs,
        rows=rows,
        max_abs_deviation=float(np.max(dev)),
        mean_abs_deviation=float(np.mean(dev)),
        notes=tuple(notes),
    )
