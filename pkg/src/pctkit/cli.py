"""Command line front end.

Five subcommands over one flat configuration format:

  validate        check mass parameters and the strict pairing relation
  spectrum        print the analytic level table of the configured system
  build-target    tabulate z, m, f, U_target and the transported states
  verify          run the independent spectral confirmation
  compare-paper   diff the engine potential against a catalogued printed form

Config files are line-oriented "dotted.key = value" text; unknown keys are
rejected. Every command accepts --config, --output, --format, --levels and
the falsification switch --debug-correction-eighth. Exit codes: 0 success,
1 configuration or validation problem, 2 a verification tolerance was
exceeded, 3 a numerical procedure failed to converge.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import massprofiles as mp
from . import oracles
from . import pct
from . import refmodels as rm
from .errors import (
    ConfigError,
    ConstraintError,
    ConvergenceError,
    DegreeError,
    DomainError,
    QuadratureError,
    RangeError,
    SingularError,
    UnsupportedError,
    ValidationError,
)

__all__ = ["RunConfig", "parse_config", "load_config", "main"]

_ISO_TOL_DEFAULT = {"I": 1e-5, "II": 5e-3, "III": 5e-3}
_BUILD_N_DEFAULT = 2001


@dataclass
class RunConfig:
    """Resolved run settings; field defaults give the canonical example."""

    mass_kind: str = "I"
    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 1.0
    delta: float = 1.0
    reference_kind: str = "STP"
    mu: float = 2.0
    chi: float = 2.0
    lam: float = 2.0
    mode: str = "strict"
    levels: int = 4
    grid_n: int | None = None
    eps_map: float | None = None
    tol_isospectral: float | None = None
    tol_residual: float = 1e-4
    tol_gram: float = 1e-6
    out_format: str = "csv"
    out_path: str | None = None

    def __post_init__(self):
        if self.mass_kind not in ("I", "II", "III"):
            raise ConfigError(f"mass.kind must be I, II or III, got {self.mass_kind!r}")
        if self.reference_kind not in ("STP", "SCP", "PTP"):
            raise ConfigError(
                f"reference.kind must be STP, SCP or PTP, got {self.reference_kind!r}"
            )
        if self.mode not in ("strict", "scaled"):
            raise ConfigError(f"mode must be strict or scaled, got {self.mode!r}")
        if self.levels < 1:
            raise ConfigError("levels must be a positive integer")
        if self.out_format not in ("csv", "json"):
            raise ConfigError(f"output.format must be csv or json, got {self.out_format!r}")
        if self.grid_n is not None and self.grid_n < 15:
            raise ConfigError("grid.N must be at least 15")
        for name, val in (
            ("grid.eps_map", self.eps_map),
            ("tolerances.isospectral_rel", self.tol_isospectral),
        ):
            if val is not None and not val > 0:
                raise ConfigError(f"{name} must be positive")
        if not self.tol_residual > 0 or not self.tol_gram > 0:
            raise ConfigError("tolerances must be positive")

    @property
    def iso_tolerance(self) -> float:
        if self.tol_isospectral is not None:
            return self.tol_isospectral
        return _ISO_TOL_DEFAULT[self.mass_kind]


# config key -> (RunConfig attribute, coercion)
_KEYS = {
    "mass.kind": ("mass_kind", str),
    "mass.alpha": ("alpha", float),
    "mass.beta": ("beta", float),
    "mass.gamma": ("gamma", float),
    "mass.delta": ("delta", float),
    "reference.kind": ("reference_kind", str),
    "reference.mu": ("mu", float),
    "reference.chi": ("chi", float),
    "reference.lambda": ("lam", float),
    "mode": ("mode", str),
    "levels": ("levels", int),
    "grid.N": ("grid_n", int),
    "grid.eps_map": ("eps_map", float),
    "tolerances.isospectral_rel": ("tol_isospectral", float),
    "tolerances.residual": ("tol_residual", float),
    "tolerances.gram": ("tol_gram", float),
    "output.format": ("out_format", str),
    "output.path": ("out_path", str),
}


def parse_config(text: str) -> RunConfig:
    """Parse flat dotted-key assignments into a RunConfig.

    One "key = value" per line; blank lines and lines starting with # are
    skipped. Unknown keys and uncoercible values raise ConfigError.
    """
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        attr, coerce = _KEYS[key]
        if attr in overrides:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            overrides[attr] = coerce(value)
        except ValueError:
            raise ConfigError(
                f"line {lineno}: cannot read {value!r} as {coerce.__name__} for {key}"
            ) from None
    return RunConfig(**overrides)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


# ----------------------------------------------------------------------
# shared construction and formatting helpers


def _make_system(cfg: RunConfig, coefficient: float) -> pct.TargetSystem:
    params = mp.MassParameters(cfg.alpha, cfg.beta, cfg.gamma, cfg.delta)
    profile = mp.MassProfile(cfg.mass_kind, params)
    if cfg.reference_kind == "PTP":
        ref = rm.ReferenceModel("PTP", chi=cfg.chi, lam=cfg.lam)
    else:
        ref = rm.ReferenceModel(cfg.reference_kind, mu=cfg.mu)
    return pct.build_target(profile, ref, cfg.mode, coefficient)


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{float(x):.17g}"


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ----------------------------------------------------------------------
# subcommands


def _cmd_validate(cfg: RunConfig, coefficient: float):
    params = mp.MassParameters(cfg.alpha, cfg.beta, cfg.gamma, cfg.delta)
    violations = mp.validate(params, cfg.mass_kind)
    spec = mp.strict_constraint(cfg.mass_kind, cfg.reference_kind)
    satisfied = not violations and spec.satisfied(params)
    ok = not violations and (cfg.mode != "strict" or satisfied)

    if cfg.out_format == "json":
        payload = {
            "kind": cfg.mass_kind,
            "reference": cfg.reference_kind,
            "mode": cfg.mode,
            "violations": violations,
            "strict_relation": spec.parameter_relation,
            "strict_shift": spec.shift,
            "strict_satisfied": satisfied,
            "ok": ok,
        }
        text = _json_text(payload)
    else:
        lines = [
            f"mass kind {cfg.mass_kind} with reference {cfg.reference_kind} ({cfg.mode} mode)",
            "violations: " + ("none" if not violations else "; ".join(violations)),
            f"strict relation: {spec.parameter_relation} "
            + ("[satisfied]" if satisfied else "[not satisfied]")
            + f", shift {_fmt(spec.shift)}",
            "result: " + ("ok" if ok else "invalid"),
        ]
        text = "\n".join(lines) + "\n"
    return (0 if ok else 1), text


def _cmd_spectrum(cfg: RunConfig, coefficient: float):
    ts = _make_system(cfg, coefficient)
    table = rm.ref_spectrum_table(ts.reference, cfg.levels)
    if cfg.out_format == "json":
        payload = {
            "mode": ts.mode,
            "levels": [
                {"k": e.k, "energy": e.energy, "parity": e.parity} for e in table.levels
            ],
        }
        return 0, _json_text(payload)
    rows = [(str(e.k), e.energy, e.parity) for e in table.levels]
    return 0, _csv(("k", "energy", "parity"), rows)


def _cmd_build_target(cfg: RunConfig, coefficient: float):
    ts = _make_system(cfg, coefficient)
    z_lo, z_hi, _ = pct.resolve_window(ts, cfg.eps_map)
    n = cfg.grid_n if cfg.grid_n is not None else _BUILD_N_DEFAULT
    grid = oracles.Grid(z_lo, z_hi, n)
    z = grid.nodes()

    m = np.asarray(mp.mass_value(ts.profile, z), dtype=float)
    keep = m >= 1e-300  # rows at mass zeros are omitted: U_target has no value there
    z = z[keep]
    m = m[keep]
    f = np.asarray(mp.map_forward(ts.profile, z), dtype=float)
    u = np.asarray(pct.target_potential(ts, z), dtype=float)

    supported = [k for k in range(cfg.levels) if _supported(ts, k)]
    psis = {k: np.asarray(pct.transport_wavefunction(ts, k, z), dtype=float) for k in supported}

    header = ["z", "m", "f", "U_target"] + [f"psi_{k}" for k in supported]
    if cfg.out_format == "json":
        payload = {
            "mode": ts.mode,
            "columns": header,
            "z": [float(v) for v in z],
            "m": [float(v) for v in m],
            "f": [float(v) for v in f],
            "U_target": [float(v) for v in u],
        }
        for k in supported:
            payload[f"psi_{k}"] = [float(v) for v in psis[k]]
        return 0, _json_text(payload)

    rows = []
    for i in range(z.size):
        row = [z[i], m[i], f[i], u[i]] + [psis[k][i] for k in supported]
        rows.append(row)
    return 0, _csv(header, rows)


def _supported(ts: pct.TargetSystem, k: int) -> bool:
    lo, hi = ts.reference.domain
    try:
        rm.ref_wavefunction_raw(ts.reference, k, 0.5 * (lo + hi))
    except UnsupportedError:
        return False
    return True


def _report_payload(report: oracles.VerificationReport) -> dict:
    return {
        "rows": [
            {
                "k": r.k,
                "E_analytic": r.energy_analytic,
                "E_numeric": r.energy_numeric,
                "abs_err": r.abs_err,
                "rel_err": r.rel_err,
            }
            for r in report.rows
        ],
        "n_used": report.n_used,
        "richardson_estimate": list(report.richardson_estimate),
        "convergence": [{"N": n, "max_rel_err": e} for n, e in report.convergence],
        "residual_norms": None
        if report.residual_norms is None
        else list(report.residual_norms),
        "gram_defect": report.gram_defect,
        "node_counts": None if report.node_counts is None else list(report.node_counts),
        "norm_defects": None if report.norm_defects is None else list(report.norm_defects),
        "notes": list(report.notes),
    }


def _cmd_verify(cfg: RunConfig, coefficient: float):
    ts = _make_system(cfg, coefficient)
    report = pct.verify_target(
        ts, levels=cfg.levels, grid_n=cfg.grid_n, eps_map=cfg.eps_map
    )

    failures = []
    worst = report.max_rel_err
    if worst > cfg.iso_tolerance:
        failures.append(
            f"isospectrality: max rel err {worst:.6g} exceeds {cfg.iso_tolerance:.6g}"
        )
    if report.residual_norms is not None:
        bad = [r for r in report.residual_norms if r is not None and r > cfg.tol_residual]
        if bad:
            failures.append(
                f"residual: worst {max(bad):.6g} exceeds {cfg.tol_residual:.6g}"
            )
    if report.gram_defect is not None and report.gram_defect > cfg.tol_gram:
        failures.append(
            f"orthonormality: Gram defect {report.gram_defect:.6g} exceeds {cfg.tol_gram:.6g}"
        )

    if cfg.out_format == "json":
        payload = _report_payload(report)
        payload["tolerance_failures"] = failures
        payload["passed"] = not failures
        text = _json_text(payload)
    else:
        rows = [
            (str(r.k), r.energy_analytic, r.energy_numeric, r.abs_err, r.rel_err)
            for r in report.rows
        ]
        text = _csv(("k", "E_analytic", "E_numeric", "abs_err", "rel_err"), rows)
    return (2 if failures else 0), text


def _cmd_compare_paper(cfg: RunConfig, tag: str, coefficient: float):
    ts = _make_system(cfg, coefficient)
    report = pct.compare_paper_form(ts, tag)
    if cfg.out_format == "json":
        payload = {
            "tag": report.tag,
            "coefficients": report.coefficients,
            "max_abs_deviation": report.max_abs_deviation,
            "mean_abs_deviation": report.mean_abs_deviation,
            "notes": list(report.notes),
            "rows": [
                {"z": r.z, "engine": r.engine, "printed": r.printed, "abs_dev": r.abs_dev}
                for r in report.rows
            ],
        }
        return 0, _json_text(payload)
    rows = [(r.z, r.engine, r.printed, r.abs_dev) for r in report.rows]
    return 0, _csv(("z", "engine", "printed", "abs_dev"), rows)


# ----------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    # argparse exits with its own code 2 on bad usage; route through the
    # config-error path so usage problems exit 1 like every other bad input
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat dotted-key config file")
    common.add_argument("--output", metavar="PATH", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), help="output format override")
    common.add_argument("--levels", type=int, metavar="K", help="number of levels override")
    common.add_argument(
        "--debug-correction-eighth",
        action="store_true",
        help="build with the halved correction coefficient (falsification probe)",
    )

    parser = _Parser(prog="pctkit", description="variable-mass target construction toolkit")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    sub.add_parser("validate", parents=[common], help="check parameters and pairing")
    sub.add_parser("spectrum", parents=[common], help="analytic level table")
    sub.add_parser("build-target", parents=[common], help="tabulate the constructed system")
    sub.add_parser("verify", parents=[common], help="independent spectral confirmation")
    cp = sub.add_parser("compare-paper", parents=[common], help="diff against a printed form")
    cp.add_argument("tag", help="printed-form tag, e.g. Eq14")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.levels is not None:
            if args.levels < 1:
                raise ConfigError("--levels must be positive")
            cfg.levels = args.levels
        if args.format is not None:
            cfg.out_format = args.format
        if args.output is not None:
            cfg.out_path = args.output
        coefficient = 0.125 if args.debug_correction_eighth else 0.25

        if args.command == "validate":
            code, text = _cmd_validate(cfg, coefficient)
        elif args.command == "spectrum":
            code, text = _cmd_spectrum(cfg, coefficient)
        elif args.command == "build-target":
            code, text = _cmd_build_target(cfg, coefficient)
        elif args.command == "verify":
            code, text = _cmd_verify(cfg, coefficient)
        else:
            code, text = _cmd_compare_paper(cfg, args.tag, coefficient)
        _emit(text, cfg.out_path)
        return code
    except (
        ConfigError,
        ConstraintError,
        ValidationError,
        DomainError,
        RangeError,
        DegreeError,
        UnsupportedError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (QuadratureError, ConvergenceError, SingularError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
