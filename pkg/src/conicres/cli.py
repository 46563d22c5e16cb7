"""Configuration-driven experiment runner.

Usage::

    conicres <subcommand> [--config FILE] [--out DIR] [--seed N] [--workers N] [--set key=value ...]

The config file holds one ``key = value`` per line; ``#`` starts a comment.
Keys are validated against :data:`SCHEMA`; unknown keys are an error.  Each
run writes into the output directory

* ``<subcommand>.csv`` (plus any extra tables), one row per computed item,
* ``<subcommand>_summary.csv`` holding every summary value as a row,
* ``summary.txt`` with the same values as indented ``key: value`` text,
* ``config.resolved`` with every setting after defaults were applied.

Exit status: 0 when every verdict passes, 2 when the run completed with a
failing verdict, 1 on configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .discretization import LogGrid, norm_selftests
from .estimates import EstimateForm, SweepConfig, rescale_check, sigma_sweep
from .grushin import (KERNEL_POWER_WINDOW, SV_RATIO_MAX, block_scaling, pairing_check,
                      tune_kernel)
from .indicial import End, central_interval, indicial_roots, mellin_symbol_eval
from .model import AngularMode, InvalidParameters, ModelParams
from .solve import lap_limit
from .symbols import verify_identities

SCHEMA_VERSION = 1
FAILING = {"FAIL", "SHARPNESS-NOT-OBSERVED"}


class ConfigError(ValueError):
    """A configuration key or value violates the schema."""


# ---------------------------------------------------------------------------
# value parsing and formatting


def _parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "").replace("I", "i")
    if s.endswith("i"):
        s = s[:-1] + "j"
        if s in ("j", "+j", "-j"):
            s = s.replace("j", "1j")
    return complex(s)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _list_of(conv: Callable[[str], Any]) -> Callable[[str], tuple]:
    def parse(text: str) -> tuple:
        items = [p for p in text.replace(";", ",").split(",") if p.strip()]
        if not items:
            raise ValueError("empty list")
        return tuple(conv(p.strip()) for p in items)
    return parse


def _optional(conv: Callable[[str], Any]) -> Callable[[str], Any]:
    def parse(text: str):
        return None if text.strip().lower() in ("", "none", "auto") else conv(text)
    return parse


def fmt(value) -> str:
    """Deterministic text for CSV cells and summaries (complex numbers as ``a+bi``)."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value) + 0.0)          # + 0.0 folds -0.0 into 0.0
    if isinstance(value, (complex, np.complexfloating)):
        z = complex(value)
        re, im = z.real + 0.0, z.imag + 0.0
        return f"{re!r}{'-' if im < 0 else '+'}{abs(im)!r}i"
    if isinstance(value, tuple):
        return "(" + ",".join(fmt(v) for v in value) + ")"
    if value is None:
        return "none"
    return str(value)


# ---------------------------------------------------------------------------
# schema


@dataclass(frozen=True)
class Key:
    name: str
    parse: Callable[[str], Any]
    default: Any
    help: str


def _k(name, parse, default, help_):
    return name, Key(name, parse, default, help_)


_ints = _list_of(int)
_floats = _list_of(float)

_MODEL = dict([
    _k("n", int, 3, "dimension"),
    _k("beta", _parse_complex, 0j, "first-order coefficient beta"),
    _k("beta_prime", _parse_complex, 0j, "zeroth-order coefficient beta'"),
    _k("gamma", _parse_complex, 0j, "coefficient gamma"),
    _k("varpi", float, 0.0, "real coefficient varpi"),
])
_COMMON = dict([
    _k("seed", int, 0, "random seed"),
    _k("workers", int, 1, "worker pool size"),
    _k("out", str, "conicres-out", "output directory"),
])
_MODES = dict([_k("modes", _ints, (0, 1, 2), "spherical-harmonic degrees k")])
_GRID_FIXED = dict([
    _k("h", _optional(float), None, "grid step in t (exclusive with N)"),
    _k("N", _optional(int), None, "number of grid points (exclusive with h)"),
])

SCHEMA: dict[str, dict[str, Key]] = {
    "indicial": {**_COMMON, **_MODEL, **_MODES},
    "verify-symbols": {**_COMMON, **dict([
        _k("draws", int, 20, "parameter draws"),
        _k("points", int, 100, "random points per draw"),
        _k("rtol", float, 1e-12, "relative tolerance"),
    ])},
    "sweep": {**_COMMON, **_MODEL, **_MODES, **dict([
        _k("form", str, "RemarkB", "estimate form: RemarkB | ThmMain | Normal0Rescaled"),
        _k("alpha", float, 0.0, "resolved weight exponent"),
        _k("s", int, 2, "differential order of the left norm"),
        _k("l", float, -0.75, "decay order of the left norm"),
        _k("r", _optional(float), None, "sc order of the left norm (must equal s + l)"),
        _k("sigmas", _floats, (1e-1, 1e-2, 1e-3, 1e-4), "decreasing sigma list"),
        _k("h", float, 0.05, "grid step in t"),
        _k("t_min", _optional(float), None, "inner grid end (default by form)"),
        _k("t_outer", _optional(float), None, "outer margin beyond log(1/sigma) (default by form)"),
        _k("timing", _parse_bool, False, "record wallclock times (breaks byte-identical output)"),
    ])},
    "lap": {**_COMMON, **_MODEL, **_MODES, **dict([
        _k("sigma_r", float, 0.1, "real part of sigma"),
        _k("eps", _floats, (1e-2, 1e-3, 1e-4), "decreasing imaginary parts"),
        _k("l", float, -0.75, "decay order of the distance norm (< -1/2)"),
        _k("h", float, 0.05, "grid step in t"),
        _k("t_min", float, -2.0, "inner grid end"),
        _k("t_outer", float, 5.0, "outer margin beyond log(1/sigma_r)"),
    ])},
    "rescale-check": {**_COMMON, **_MODES, **_GRID_FIXED, **dict([
        _k("n", int, 3, "dimension"),
        _k("sigma", _optional(float), None, "dilation parameter; log(1/sigma) must be a multiple of h"),
        _k("sigma_steps", int, 10, "sigma = exp(-sigma_steps h) when sigma is not given"),
        _k("t_min", float, -5.0, "grid start"),
        _k("t_max", float, 5.0, "grid end"),
        _k("s", int, 2, "differential order"),
        _k("l", float, -0.75, "decay order"),
        _k("nu", float, 0.0, "order at the far end"),
        _k("v_center", float, 0.0, "center in t of the Gaussian test function"),
        _k("v_width", float, 0.7, "width in t of the Gaussian test function"),
    ])},
    "grushin": {**_COMMON, **_GRID_FIXED, **dict([
        _k("n", int, 3, "dimension"),
        _k("t_min", float, -2.0, "grid start"),
        _k("t_max", float, 3.0, "grid end"),
        _k("c_lo", float, 0.0, "lower end of the coupling bracket"),
        _k("c_hi", float, 20.0, "upper end of the coupling bracket"),
        _k("sigmas", _floats, (1e-2, 10 ** -2.5, 1e-3, 10 ** -3.5, 1e-4), "sigma list (>= 2 decades)"),
        _k("basis_seed", _optional(int), None, "rotate complement bases by random unitaries"),
    ])},
    "norms-selftest": {**_COMMON},
}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    settings: dict

    def __getitem__(self, key):
        return self.settings[key]

    def resolved_text(self) -> str:
        lines = [f"# conicres {__version__} resolved configuration (schema v{SCHEMA_VERSION})",
                 f"subcommand = {self.subcommand}"]
        lines += [f"{k} = {_cfg_fmt(self.settings[k])}" for k in sorted(self.settings)]
        return "\n".join(lines) + "\n"


def _cfg_fmt(v) -> str:
    if isinstance(v, tuple):
        return ",".join(fmt(x) for x in v)
    return fmt(v)


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """``key = value`` lines to a raw dict; comments and blank lines are skipped."""
    raw: dict[str, str] = {}
    for num, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{source}:{num}: expected 'key = value', got {line.strip()!r}")
        key, value = (p.strip() for p in body.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{num}: empty key")
        if key in raw:
            raise ConfigError(f"{source}:{num}: duplicate key {key!r}")
        raw[key] = value
    return raw


def resolve(subcommand: str, raw: dict[str, str]) -> RunConfig:
    """Apply the schema of ``subcommand`` to raw string settings."""
    if subcommand not in SCHEMA:
        raise ConfigError(f"unknown subcommand {subcommand!r}; expected one of {sorted(SCHEMA)}")
    schema = SCHEMA[subcommand]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown key(s) for {subcommand}: {', '.join(unknown)} "
                          f"(allowed: {', '.join(sorted(schema))})")
    settings = {}
    for name, key in schema.items():
        if name in raw:
            try:
                settings[name] = key.parse(raw[name])
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"key {name!r}: cannot parse {raw[name]!r} ({key.help}): {exc}") from None
        else:
            settings[name] = key.default
    if settings.get("workers", 1) < 1:
        raise ConfigError("key 'workers': must be >= 1")
    if "modes" in settings and any(k < 0 for k in settings["modes"]):
        raise ConfigError("key 'modes': degrees must be nonnegative")
    if "N" in schema and settings["N"] is not None and settings["h"] is not None:
        raise ConfigError("keys 'h' and 'N' are mutually exclusive")
    return RunConfig(subcommand, settings)


# ---------------------------------------------------------------------------
# results


@dataclass
class Table:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple]


@dataclass
class Result:
    tables: list[Table]
    summary: dict            # ordered key -> value
    verdicts: dict           # label -> verdict string


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _params(cfg: RunConfig) -> ModelParams:
    return ModelParams(n=cfg["n"], beta=cfg["beta"], beta_prime=cfg["beta_prime"], gamma=cfg["gamma"],
                       varpi=cfg["varpi"])


def _fixed_grid(cfg: RunConfig, default_h: float) -> LogGrid:
    if cfg["N"] is not None:
        return LogGrid(cfg["t_min"], cfg["t_max"], cfg["N"])
    return LogGrid.from_spacing(cfg["t_min"], cfg["t_max"], cfg["h"] if cfg["h"] is not None else default_h)


def run_indicial(cfg: RunConfig) -> Result:
    p = _params(cfg)
    rows = []
    for k in cfg["modes"]:
        mode = AngularMode.sphere(k, p.n)
        r1, r2 = indicial_roots(p, mode)
        rows.append((k, mode.lam, r1, r2, abs(mellin_symbol_eval(p, mode, r1)),
                     abs(mellin_symbol_eval(p, mode, r2))))
    sc = central_interval(p, End.SCATTERING)
    cp = central_interval(p, End.CONIC)
    worst = max(max(r[4], r[5]) for r in rows)
    summary = {"interval_scattering": sc.as_tuple(), "interval_conic": cp.as_tuple(),
               "max_root_residual": worst, "verdict": _verdict(worst < 1e-12)}
    cols = ("mode_k", "lam", "root_1", "root_2", "residual_1", "residual_2")
    return Result([Table("indicial", cols, rows)], summary, {"roots": summary["verdict"]})


def run_verify_symbols(cfg: RunConfig) -> Result:
    checks = verify_identities(cfg["draws"], cfg["points"], cfg["seed"])
    rows = []
    for c in checks:
        d = c.draw
        rows.append((c.identity, c.draw_index, d.branch, d.l, d.rt, d.im_beta, d.im_gamma, d.nu,
                     d.re_sigma_over_abs2, c.points, c.max_rel_error, c.sign_violations,
                     _verdict(c.passed(cfg["rtol"]))))
    failures = sum(1 for c in checks if not c.passed(cfg["rtol"]))
    summary = {"identities": len({c.identity for c in checks}), "draws": cfg["draws"], "points": cfg["points"],
               "checks": len(checks), "failures": failures,
               "max_rel_error": max(c.max_rel_error for c in checks),
               "sign_violations": sum(c.sign_violations for c in checks),
               "rtol": cfg["rtol"], "verdict": _verdict(failures == 0)}
    cols = ("identity", "draw", "branch", "l", "rt", "im_beta", "im_gamma", "nu", "re_sigma_over_abs2",
            "points", "max_rel_error", "sign_violations", "verdict")
    return Result([Table("verify-symbols", cols, rows)], summary, {"identities": summary["verdict"]})


def run_sweep(cfg: RunConfig) -> Result:
    if cfg["r"] is not None and abs(cfg["r"] - (cfg["s"] + cfg["l"])) > 1e-12:
        raise ConfigError(f"key 'r': sweeps use r = s + l = {cfg['s'] + cfg['l']}, got {cfg['r']}")
    sc = SweepConfig.standard(EstimateForm.parse(cfg["form"]), ks=cfg["modes"], s=cfg["s"], l=cfg["l"],
                              alpha=cfg["alpha"], sigmas=cfg["sigmas"], h=cfg["h"], t_inner=cfg["t_min"],
                              t_outer=cfg["t_outer"], params=_params(cfg), seed=cfg["seed"],
                              workers=cfg["workers"], timing=cfg["timing"])
    rep = sigma_sweep(sc)
    rows = [(e.sigma, e.mode_k, e.C, e.residual, e.iterations, e.wallclock_ms, e.error) for e in rep.entries]
    cmax = [(s, c) for s, c in zip(rep.sigmas, rep.c_max)]
    summary = {"form": rep.form, "alpha": rep.alpha, "alpha_window": rep.alpha_window,
               "positive_config": rep.positive, "sigmas": rep.sigmas, "c_max": rep.c_max,
               "slope": rep.slope, "ratio": rep.ratio, **{f"threshold_{k}": v for k, v in rep.thresholds.items()},
               "failed_tasks": sum(1 for e in rep.entries if not e.ok),
               "wallclock_s": rep.runtime["wallclock_s"], "verdict": rep.verdict}
    tables = [Table("sweep", ("sigma", "mode_k", "C", "residual", "iterations", "wallclock_ms", "error"), rows),
              Table("sweep_cmax", ("sigma", "C_max"), cmax)]
    return Result(tables, summary, {"sweep": rep.verdict})


def run_lap(cfg: RunConfig) -> Result:
    p = _params(cfg)
    rows, fits, verdicts = [], [], {}
    for k in cfg["modes"]:
        tab = lap_limit(p, AngularMode.sphere(k, p.n), cfg["sigma_r"], cfg["eps"], l=cfg["l"],
                        t_inner=cfg["t_min"], t_outer=cfg["t_outer"], h=cfg["h"])
        rows += [(k, e, d) for e, d in tab.rows()]
        v = _verdict(tab.passed)
        fits.append((k, tab.decrease_factor, tab.monotone, tab.reference_error, v))
        verdicts[f"mode_{k}"] = v
    summary = {"sigma_r": cfg["sigma_r"], "eps": cfg["eps"]}
    for k, f, m, ref, v in fits:
        summary[f"mode_{k}_decrease_factor"] = f
        summary[f"mode_{k}_monotone"] = m
        summary[f"mode_{k}_reference_error"] = ref
        summary[f"mode_{k}_verdict"] = v
    summary["verdict"] = _verdict(all(v == "PASS" for v in verdicts.values()))
    tables = [Table("lap", ("mode_k", "eps", "distance"), rows),
              Table("lap_fits", ("mode_k", "decrease_factor", "monotone", "reference_error", "verdict"), fits)]
    return Result(tables, summary, verdicts)


def run_rescale_check(cfg: RunConfig) -> Result:
    grid = _fixed_grid(cfg, 0.05)
    sigma = cfg["sigma"] if cfg["sigma"] is not None else math.exp(-cfg["sigma_steps"] * grid.h)
    p = ModelParams(n=cfg["n"])
    v = np.exp(-((grid.t - cfg["v_center"]) / cfg["v_width"]) ** 2)
    rows, verdicts = [], {}
    for k in cfg["modes"]:
        mode = AngularMode.sphere(k, p.n)
        rep = rescale_check(p, mode, sigma, v, grid, s=cfg["s"], l=cfg["l"], nu=cfg["nu"])
        verdicts[f"mode_{k}"] = _verdict(rep.passed)
        rows.append((k, rep.sigma, rep.steps, rep.shift_error, rep.shift_tol, rep.chain_error, rep.chain_tol,
                     verdicts[f"mode_{k}"]))
    summary = {"sigma": sigma, "steps": rows[0][2],
               "max_shift_error": max(r[3] for r in rows), "max_chain_error": max(r[5] for r in rows),
               "verdict": _verdict(all(v == "PASS" for v in verdicts.values()))}
    cols = ("mode_k", "sigma", "steps", "shift_error", "shift_tol", "chain_error", "chain_tol", "verdict")
    return Result([Table("rescale-check", cols, rows)], summary, verdicts)


def run_grushin(cfg: RunConfig) -> Result:
    grid = _fixed_grid(cfg, 0.05)
    setup = tune_kernel(ModelParams(n=cfg["n"]), c_bracket=(cfg["c_lo"], cfg["c_hi"]), grid=grid)
    blocks = block_scaling(setup, cfg["sigmas"], basis_seed=cfg["basis_seed"], workers=cfg["workers"])
    pair = pairing_check(setup, cfg["sigmas"])
    rows = []
    for i, s in enumerate(blocks.sigmas):
        n00, n01, n10, n11 = blocks.inverse_norms[i]
        rows.append((s, n00, n01, n10, n11, blocks.block11[i], pair.block11[i], pair.pairing[i], pair.defect[i]))
    lo, hi = KERNEL_POWER_WINDOW
    fits = [
        ("sv_ratio", setup.sv_ratio, 0.0, SV_RATIO_MAX, _verdict(setup.is_kernel)),
        ("kernel_power", setup.kernel_power, 1.0, 0.5, _verdict(lo < setup.kernel_power < hi)),
    ]
    for name, val, exp in zip(("slope_inv_00", "slope_inv_01", "slope_inv_10", "slope_inv_11"),
                              blocks.slopes, blocks.expected):
        fits.append((name, val, exp, blocks.tol, _verdict(abs(val - exp) <= blocks.tol)))
    fits.append(("slope_block11", blocks.block11_slope, 1.0, blocks.tol,
                 _verdict(abs(blocks.block11_slope - 1.0) <= blocks.tol)))
    fits.append(("slope_defect", pair.defect_slope, 2.0, 0.1, _verdict(pair.defect_slope >= 1.9)))
    fits.append(("decay_gain", pair.decay_gain, 2.0, 1.1, _verdict(pair.decay_gain >= 0.9)))
    verdicts = {f[0]: f[4] for f in fits}
    summary = {"coupling": setup.coupling, "singular_values": setup.singular_values}
    summary.update({f[0]: f[1] for f in fits})
    summary["difference_power"] = pair.difference_power
    summary["verdict"] = _verdict(all(v == "PASS" for v in verdicts.values()))
    tables = [Table("grushin", ("sigma", "inv_norm_00", "inv_norm_01", "inv_norm_10", "inv_norm_11", "block11",
                                "block11_unnormalized", "pairing", "defect"), rows),
              Table("grushin_fits", ("quantity", "value", "expected", "tol", "verdict"), fits)]
    return Result(tables, summary, verdicts)


def run_norms_selftest(cfg: RunConfig) -> Result:
    tests = norm_selftests(cfg["seed"])
    rows = [(t.check, t.value, t.reference, t.error, t.tol, _verdict(t.passed)) for t in tests]
    failures = sum(not t.passed for t in tests)
    summary = {"checks": len(tests), "failures": failures, "verdict": _verdict(failures == 0)}
    return Result([Table("norms-selftest", ("check", "value", "reference", "error", "tol", "verdict"), rows)],
                  summary, {t.check: _verdict(t.passed) for t in tests})


RUNNERS: dict[str, Callable[[RunConfig], Result]] = {
    "indicial": run_indicial,
    "verify-symbols": run_verify_symbols,
    "sweep": run_sweep,
    "lap": run_lap,
    "rescale-check": run_rescale_check,
    "grushin": run_grushin,
    "norms-selftest": run_norms_selftest,
}


# ---------------------------------------------------------------------------
# emission


def write_table(path: Path, table: Table, subcommand: str):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# conicres {subcommand} table {table.name} schema=v{SCHEMA_VERSION}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([fmt(v) for v in row])


def summary_text(subcommand: str, result: Result) -> str:
    lines = [f"{subcommand}:"]
    lines += [f"  {k}: {fmt(v)}" for k, v in result.summary.items()]
    lines.append("  verdicts:")
    lines += [f"    {k}: {v}" for k, v in result.verdicts.items()]
    return "\n".join(lines) + "\n"


def emit(out: Path, cfg: RunConfig, result: Result):
    out.mkdir(parents=True, exist_ok=True)
    for t in result.tables:
        write_table(out / f"{t.name}.csv", t, cfg.subcommand)
    summ = Table(f"{cfg.subcommand}_summary", ("key", "value"),
                 [(k, v) for k, v in result.summary.items()] + [(f"verdict_{k}", v) for k, v in
                                                                result.verdicts.items()])
    write_table(out / f"{summ.name}.csv", summ, cfg.subcommand)
    (out / "summary.txt").write_text(summary_text(cfg.subcommand, result), encoding="utf-8")
    (out / "config.resolved").write_text(cfg.resolved_text(), encoding="utf-8")


def exit_code(result: Result) -> int:
    return 2 if any(v in FAILING for v in result.verdicts.values()) or result.summary.get("verdict") in FAILING \
        else 0


# ---------------------------------------------------------------------------
# entry points


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conicres", description="Low-energy resolvent experiments on conic spaces.")
    ap.add_argument("--version", action="version", version=f"conicres {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name in SCHEMA:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", type=Path, help="flat key = value file")
        sp.add_argument("--out", help="output directory (overrides the 'out' key)")
        sp.add_argument("--seed", type=int, help="random seed (overrides the 'seed' key)")
        sp.add_argument("--workers", type=int, help="worker pool size (overrides the 'workers' key)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="extra setting, may be repeated")
    return ap


def run(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:          # argparse already printed the message
        return 0 if exc.code == 0 else 1
    try:
        raw = {}
        if args.config is not None:
            raw.update(parse_config_text(args.config.read_text(encoding="utf-8"), str(args.config)))
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            k, v = (p.strip() for p in item.split("=", 1))
            raw[k] = v
        for flag in ("out", "seed", "workers"):
            val = getattr(args, flag)
            if val is not None:
                raw[flag] = str(val)
        cfg = resolve(args.subcommand, raw)
        result = RUNNERS[args.subcommand](cfg)
        emit(Path(cfg["out"]), cfg, result)
    except (ConfigError, InvalidParameters, OSError) as exc:
        print(f"conicres {args.subcommand}: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:   # module failure on a validated config: report, never a bare traceback
        print(f"conicres {args.subcommand}: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(summary_text(args.subcommand, result))
    return exit_code(result)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
