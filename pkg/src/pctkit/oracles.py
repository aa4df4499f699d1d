"""Independent numerical machinery: quadrature, discretization, eigensolvers.

Nothing in this module knows about mass profiles or reference potentials. It
consumes plain callables and grids, so the eigenvalue route through here
shares no closed-form code with the construction it is used to check.

Design notes on the eigensolver. The divided-coefficient operators this
package produces have 1/m growing like a high power of z, so the discrete
matrices reach norms of 1e12 and beyond on the grids the tolerances demand.
Any float64 eigensolver then carries an absolute noise floor near
norm * eps, which is larger than the acceptance tolerances. The solver
below therefore runs the Sturm sequence bisection in numpy extended
precision (longdouble), where the unit roundoff is about 5.4e-20. Bisection
on a Sturm count is backward stable at any norm, needs no factorization,
and is deterministic, which the report contracts require.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceError,
    DomainError,
    QuadratureError,
    SingularError,
    ValidationError,
)

__all__ = [
    "QuadratureSettings",
    "integrate",
    "Grid",
    "TridiagonalOperator",
    "discretize_constant",
    "discretize_pdem",
    "sturm_count",
    "lowest_eigenvalues",
    "richardson",
    "eigenvector",
    "residual_norm",
    "orthonormality_matrix",
    "count_nodes",
    "LevelRow",
    "VerificationReport",
]

_LD = np.longdouble


# ----------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureSettings:
    """Integration control: absolute tolerance, refinement cap, rule name.

    rule is "adaptive-simpson" or "gauss-legendre" (composite 16-point
    panels with doubling).
    """

    tolerance: float = 1e-12
    max_refinements: int = 40
    rule: str = "adaptive-simpson"

    def __post_init__(self):
        if self.tolerance < 1e-14:
            raise ValidationError("tolerance below 1e-14 is not resolvable in float64")
        if self.max_refinements < 1:
            raise ValidationError("max_refinements must be positive")
        if self.rule not in ("adaptive-simpson", "gauss-legendre"):
            raise ValidationError(f"unknown quadrature rule {self.rule!r}")


_DEFAULT_QUAD = QuadratureSettings()


def _adaptive_simpson(f, a, b, tol, max_depth):
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(lo, hi, flo, fmid, fhi, approx, eps, depth):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - approx
        if abs(delta) <= 15.0 * eps:
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise QuadratureError(
                f"adaptive refinement stalled at depth {depth} on [{lo}, {hi}]"
            )
        half = 0.5 * eps
        return recurse(lo, mid, flo, flm, fmid, left, half, depth + 1) + recurse(
            mid, hi, fmid, frm, fhi, right, half, depth + 1
        )

    return recurse(a, b, fa, fm, fb, whole, tol, 0)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gauss_composite(f, a, b, tol, max_doublings):
    def panels(p):
        edges = np.linspace(a, b, p + 1)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            half = 0.5 * (hi - lo)
            mid = 0.5 * (hi + lo)
            xs = mid + half * _GL_NODES
            total += half * float(np.dot(_GL_WEIGHTS, [f(x) for x in xs]))
        return total

    prev = panels(1)
    p = 2
    for _ in range(max_doublings):
        cur = panels(p)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
        p *= 2
    raise QuadratureError(f"composite rule did not settle within {max_doublings} doublings")


def integrate(f, interval, settings: QuadratureSettings | None = None) -> float:
    """Integrate a scalar callable over a finite interval.

    Endpoint singularities must be at most integrable; the endpoints are
    evaluated, so the callable has to return finite values there. Raises
    QuadratureError when refinement stalls before the cap.
    """
    s = settings if settings is not None else _DEFAULT_QUAD
    a, b = float(interval[0]), float(interval[1])
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValidationError("integrate requires a finite interval; truncate first")
    if a == b:
        return 0.0
    if s.rule == "adaptive-simpson":
        return _adaptive_simpson(f, a, b, s.tolerance, s.max_refinements)
    return _gauss_composite(f, a, b, s.tolerance, s.max_refinements)


# ----------------------------------------------------------------------
# grids and discrete operators


@dataclass(frozen=True)
class Grid:
    """Uniform Dirichlet grid: interior nodes z_i = a + i h, h = (b-a)/(N+1)."""

    a: float
    b: float
    N: int

    def __post_init__(self):
        if self.N < 15:
            raise ValidationError("grid needs N >= 15 interior nodes")
        if not self.b > self.a:
            raise ValidationError("grid requires b > a")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.N + 1)

    def nodes(self) -> np.ndarray:
        z = self.a + self.h * np.arange(1, self.N + 1, dtype=float)
        # A symmetric odd-N grid has a node meant to sit at z = 0 exactly.
        # Rounding in a + i*h can leave it at ~1e-14, where inverse-mass
        # style potentials explode; pin it.
        if self.a == -self.b and self.N % 2 == 1:
            z[(self.N - 1) // 2] = 0.0
        return z

    def midpoints(self) -> np.ndarray:
        return self.a + self.h * (np.arange(0, self.N + 1, dtype=float) + 0.5)


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix with its generating grid attached."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray
    grid: Grid

    def __post_init__(self):
        if self.offdiagonal.shape[0] != self.diagonal.shape[0] - 1:
            raise ValidationError("offdiagonal must have length N - 1")


def discretize_constant(potential, interval, N: int) -> TridiagonalOperator:
    """Three-point discretization of -d2/dz2 + U with Dirichlet walls."""
    grid = Grid(float(interval[0]), float(interval[1]), int(N))
    z = grid.nodes()
    u = np.asarray(potential(z), dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError("potential is not finite at a grid node")
    h2 = grid.h * grid.h
    diag = 2.0 / h2 + u
    off = np.full(N - 1, -1.0 / h2)
    return TridiagonalOperator(diag, off, grid)


def discretize_pdem(mass, potential, interval, N: int) -> TridiagonalOperator:
    """Flux-conservative discretization of -(d/dz)((1/m) d/dz) + U.

    The inverse mass is sampled at cell midpoints, which keeps the matrix
    symmetric and the scheme second order even with strong mass variation.
    """
    grid = Grid(float(interval[0]), float(interval[1]), int(N))
    z = grid.nodes()
    zm = grid.midpoints()
    m = np.asarray(mass(zm), dtype=float)
    if np.any(m <= 0.0) or not np.all(np.isfinite(m)):
        raise SingularError("mass vanishes (or is not finite) at a cell midpoint")
    w = 1.0 / m
    u = np.asarray(potential(z), dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError("potential is not finite at a grid node")
    h2 = grid.h * grid.h
    diag = (w[:-1] + w[1:]) / h2 + u
    off = -w[1:-1] / h2
    return TridiagonalOperator(diag, off, grid)


# ----------------------------------------------------------------------
# Sturm-sequence eigenvalue machinery (extended precision)


def _sturm_counts(d, e2, lams):
    """Number of eigenvalues strictly below each shift in lams.

    d, e2: longdouble diagonal and squared offdiagonal. Uses the standard
    LDL^T pivot recurrence; zero pivots are nudged to the smallest normal
    number, the textbook-safe treatment.
    """
    n = d.shape[0]
    q = d[0] - lams
    cnt = (q < 0).astype(np.int64)
    tiny = np.finfo(_LD).tiny
    t = np.empty_like(lams)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        for i in range(1, n):
            q[q == 0] = tiny
            np.divide(e2[i - 1], q, out=t)
            np.subtract(d[i] - lams, t, out=q)
            cnt += q < 0
    return cnt


def sturm_count(operator: TridiagonalOperator, lam: float) -> int:
    """Eigenvalues of the operator strictly below lam."""
    d = np.asarray(operator.diagonal, dtype=_LD)
    e = np.asarray(operator.offdiagonal, dtype=_LD)
    return int(_sturm_counts(d, e * e, np.asarray([lam], dtype=_LD))[0])


def lowest_eigenvalues(
    operator: TridiagonalOperator,
    K: int,
    tol_scale: float = 1e-10,
    probes: int = 6,
    max_sweeps: int = 240,
) -> np.ndarray:
    """The K smallest eigenvalues by Sturm bisection, ascending.

    Each eigenvalue is bracketed to an absolute width of
    tol_scale * (1 + |lambda|). Brackets are first narrowed against a signed
    geometric ladder of probe shifts, then refined with multi-point
    sectioning, several probes per sweep, all counted in one fused Sturm
    pass. Deterministic: no randomness, no seed.
    """
    n = operator.diagonal.shape[0]
    if not 1 <= K <= n:
        raise ValidationError(f"K must be in [1, {n}]")
    d = np.asarray(operator.diagonal, dtype=_LD)
    e = np.asarray(operator.offdiagonal, dtype=_LD)
    e2 = e * e

    rad = np.zeros_like(d)
    np.add.at(rad, np.arange(n - 1), np.abs(e))
    np.add.at(rad, np.arange(1, n), np.abs(e))
    glo = np.min(d - rad)
    ghi = np.max(d + rad)

    ladder = np.concatenate(
        [
            np.asarray([glo], dtype=_LD),
            -np.power(_LD(10), np.arange(18, -3, -1, dtype=_LD)),
            np.asarray([_LD(0)], dtype=_LD),
            np.power(_LD(10), np.arange(-2, 19, dtype=_LD)),
            np.asarray([ghi], dtype=_LD),
        ]
    )
    ladder = np.unique(np.clip(ladder, glo, ghi))
    counts = _sturm_counts(d, e2, ladder)

    los = np.empty(K, dtype=_LD)
    his = np.empty(K, dtype=_LD)
    for k in range(K):
        below = ladder[counts <= k]
        above = ladder[counts > k]
        los[k] = below[-1] if below.size else glo
        his[k] = above[0] if above.size else ghi

    frac = np.arange(1, probes + 1, dtype=_LD) / (probes + 1)
    for _ in range(max_sweeps):
        mids = 0.5 * (los + his)
        done = (his - los) <= tol_scale * (1 + np.abs(mids))
        if done.all():
            return mids.astype(np.float64)
        idx = np.nonzero(~done)[0]
        pts = los[idx, None] + (his[idx] - los[idx])[:, None] * frac[None, :]
        cnt = _sturm_counts(d, e2, pts.ravel()).reshape(idx.size, probes)
        for j, k in enumerate(idx):
            below = cnt[j] <= k
            if below.any():
                los[k] = pts[j][below][-1]
            if (~below).any():
                his[k] = pts[j][~below][0]
    raise ConvergenceError(f"bisection did not converge within {max_sweeps} sweeps")


def richardson(coarse, fine, order: int = 2):
    """Extrapolate a pair of second-order (by default) approximations.

    coarse was computed at spacing h, fine at h/2; the leading h^order error
    term cancels in (2^order * fine - coarse) / (2^order - 1). Works
    elementwise on arrays.
    """
    w = float(2**order)
    return (w * np.asarray(fine) - np.asarray(coarse)) / (w - 1.0)


def _solve_shifted(d, e, shift, rhs):
    """Partial-pivot elimination for (T - shift I) x = rhs in longdouble.

    Row swaps introduce a second superdiagonal; the three working bands plus
    fill-in are carried explicitly.
    """
    n = d.shape[0]
    sub = np.asarray(e, dtype=_LD).copy()
    main = np.asarray(d, dtype=_LD) - _LD(shift)
    sup1 = np.empty(n, dtype=_LD)
    sup1[: n - 1] = np.asarray(e, dtype=_LD)
    sup1[n - 1] = 0
    sup2 = np.zeros(n, dtype=_LD)
    x = np.asarray(rhs, dtype=_LD).copy()

    tiny = np.finfo(_LD).tiny
    for i in range(n - 1):
        if abs(sub[i]) > abs(main[i]):
            main[i], sub[i] = sub[i], main[i]
            sup1[i], main[i + 1] = main[i + 1], sup1[i]
            if i + 1 < n - 1:
                sup2[i], sup1[i + 1] = sup1[i + 1], sup2[i]
            else:
                sup2[i], sup1[i + 1] = sup1[i + 1], _LD(0)
            x[i], x[i + 1] = x[i + 1], x[i]
        piv = main[i] if main[i] != 0 else tiny
        mult = sub[i] / piv
        main[i + 1] -= mult * sup1[i]
        sup1[i + 1] -= mult * sup2[i]
        x[i + 1] -= mult * x[i]
    if main[n - 1] == 0:
        main[n - 1] = tiny

    x[n - 1] /= main[n - 1]
    if n >= 2:
        x[n - 2] = (x[n - 2] - sup1[n - 2] * x[n - 1]) / main[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - sup1[i] * x[i + 1] - sup2[i] * x[i + 2]) / main[i]
    return x


def eigenvector(
    operator: TridiagonalOperator, eigenvalue: float, max_iterations: int = 50
) -> np.ndarray:
    """Inverse-iteration eigenvector for an already-converged eigenvalue.

    Normalized so that sum(v^2) * h = 1 (discrete L2), with the sign fixed
    positive at the first component whose magnitude reaches 1e-3 of the
    maximum. Deterministic start vector.
    """
    d = np.asarray(operator.diagonal, dtype=_LD)
    e = np.asarray(operator.offdiagonal, dtype=_LD)
    n = d.shape[0]
    h = _LD(operator.grid.h)

    rng = np.random.default_rng(1234)
    v = np.asarray(rng.standard_normal(n), dtype=_LD)
    v /= np.sqrt(np.sum(v * v) * h)

    for _ in range(max_iterations):
        w = _solve_shifted(d, e, eigenvalue, v)
        w /= np.sqrt(np.sum(w * w) * h)
        drift = min(float(np.max(np.abs(w - v))), float(np.max(np.abs(w + v))))
        v = w
        if drift < 1e-13:
            break
    else:
        raise ConvergenceError(f"inverse iteration hit the {max_iterations} cap")

    out = v.astype(np.float64)
    peak = np.max(np.abs(out))
    for val in out:
        if abs(val) >= 1e-3 * peak:
            if val < 0:
                out = -out
            break
    return out


# ----------------------------------------------------------------------
# independent checks on candidate eigenpairs


def residual_norm(potential, psi, energy, z, mass=None, stencil_scale=1e-3):
    """Scaled sup norm of (H psi - E psi) from finite differences alone.

    psi is a callable. Derivatives use five-point stencils at spacing
    stencil_scale * (1 + |z|), evaluated twice (h and h/2) and Richardson
    combined, so this check shares nothing with the discretized solve. When
    mass is given, H applies the divided form -(w psi')' + U psi with
    w = 1/mass, and w' is likewise formed by finite differences.

    Returns max_i |H psi - E psi|(z_i) / ((|E| + 1) * max_i |psi(z_i)|).
    """
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    psi_z = np.asarray(psi(zs), dtype=float)
    scale = (abs(float(energy)) + 1.0) * np.max(np.abs(psi_z))
    if scale == 0.0:
        raise ValidationError("psi vanishes on the whole sample grid")

    def apply_h(hs):
        pm2, pm1 = psi(zs - 2 * hs), psi(zs - hs)
        pp1, pp2 = psi(zs + hs), psi(zs + 2 * hs)
        d1 = (pm2 - 8.0 * pm1 + 8.0 * pp1 - pp2) / (12.0 * hs)
        d2 = (-pm2 + 16.0 * pm1 - 30.0 * psi_z + 16.0 * pp1 - pp2) / (12.0 * hs * hs)
        if mass is None:
            kinetic = -d2
        else:
            w = 1.0 / np.asarray(mass(zs), dtype=float)
            wm2 = 1.0 / np.asarray(mass(zs - 2 * hs), dtype=float)
            wm1 = 1.0 / np.asarray(mass(zs - hs), dtype=float)
            wp1 = 1.0 / np.asarray(mass(zs + hs), dtype=float)
            wp2 = 1.0 / np.asarray(mass(zs + 2 * hs), dtype=float)
            dw = (wm2 - 8.0 * wm1 + 8.0 * wp1 - wp2) / (12.0 * hs)
            kinetic = -(dw * d1 + w * d2)
        return kinetic + np.asarray(potential(zs), dtype=float) * psi_z

    hs = stencil_scale * (1.0 + np.abs(zs))
    r_h = apply_h(hs) - energy * psi_z
    r_h2 = apply_h(0.5 * hs) - energy * psi_z
    combined = (16.0 * r_h2 - r_h) / 15.0
    return float(np.max(np.abs(combined)) / scale)


def orthonormality_matrix(states, interval, settings: QuadratureSettings | None = None):
    """Gram matrix of callables under the plain L2 inner product."""
    k = len(states)
    g = np.empty((k, k), dtype=float)
    for i in range(k):
        for j in range(i, k):
            val = integrate(lambda t, a=states[i], b=states[j]: a(t) * b(t), interval, settings)
            g[i, j] = val
            g[j, i] = val
    return g


def count_nodes(samples) -> int:
    """Sign changes in a sampled function, ignoring near-zero samples.

    Samples with magnitude below 1e-12 of the peak are dropped first, so
    grazing zeros do not register.
    """
    s = np.asarray(samples, dtype=float)
    peak = np.max(np.abs(s))
    if peak == 0.0:
        return 0
    keep = s[np.abs(s) >= 1e-12 * peak]
    signs = np.sign(keep)
    return int(np.count_nonzero(signs[1:] * signs[:-1] < 0))


# ----------------------------------------------------------------------
# report container


@dataclass(frozen=True)
class LevelRow:
    """One spectral comparison line."""

    k: int
    energy_analytic: float
    energy_numeric: float
    abs_err: float
    rel_err: float


@dataclass(frozen=True)
class VerificationReport:
    """Everything a spectral verification run measured.

    rows compare analytic against extrapolated numeric energies, with
    rel_err = abs_err / max(|E_analytic|, 1). convergence holds
    (N, max rel err) pairs from plain single-grid solves at increasing N.
    richardson_estimate repeats the extrapolated energies that the rows use.
    Checks that a given run skips are None, with the reason recorded in
    notes.
    """

    rows: tuple
    n_used: int
    richardson_estimate: tuple
    convergence: tuple
    residual_norms: tuple | None = None
    gram_defect: float | None = None
    node_counts: tuple | None = None
    norm_defects: tuple | None = None
    notes: tuple = field(default_factory=tuple)

    @property
    def max_rel_err(self) -> float:
        return max(r.rel_err for r in self.rows)
