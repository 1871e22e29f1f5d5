"""Command-line front end: ``teo``, ``sweep``, ``verify`` and ``models``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .asymptotics import appendix_teo, weak_anisotropy_teo
from .background import NAMED_MODELS, Background, Mode
from .diagnostics import frobenius_error
from .errors import DomainError, IntegrationError, SpecfunError
from .exact_models import hypersurface_exact_teo, rw_exact_teo, stiff_teo_asymptotic
from .oracle import TeoMatrix, evolve_oracle, picard_teo
from .teo_core import closed_form_teo, conformal_exact_teo, short_time_teo
from .verification import SUITES, run_suite

__all__ = ["main", "RunConfig", "SweepRow", "compute_teo", "run_cells", "METHODS", "COLUMNS"]

METHODS = ("oracle", "picard", "closed", "short", "appendix", "weak", "model-exact")
COLUMNS = (
    "model", "mu", "nu", "delta", "k1", "k2", "k3", "tA", "t", "method",
    "k11_re", "k11_im", "k12_re", "k12_im", "defect", "err_vs_ref", "wall_us",
)  # fmt: skip
CLI_MODELS: dict[str, tuple[float, float]] = {**NAMED_MODELS, "conformal": (1.0, 0.0)}

_DEFAULTS: dict[str, Any] = {
    "model": None,
    "mu": None,
    "nu": None,
    "t_A": 0.0,
    "modes": None,
    "grid": None,
    "times": None,
    "time_grid": None,
    "taus": None,
    "methods": ["oracle"],
    "reference": None,
    "tol": 1e-10,
    "chirality": "minus",
    "format": "csv",
    "out": None,
    "threads": 1,
    "seed": 0,
    "timing": False,
}


class ConfigError(ValueError):
    """Invalid run configuration (usage error)."""


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration.

    ``modes`` and ``cells`` are fully expanded; ``times`` or ``taus`` per
    mode are resolved into ``cells`` of ``(mode, t)``.
    """

    model: str
    background: Background
    cells: tuple[tuple[Mode, float], ...]
    methods: tuple[str, ...]
    reference: str | None
    tol: float
    chirality: str
    fmt: str
    out: str | None
    threads: int
    seed: int
    timing: bool


@dataclass
class SweepRow:
    """One output row per ``(mode, t, method)``."""

    model: str
    bg: Background
    mode: Mode
    t: float
    method: str
    teo: TeoMatrix | None = None
    error: str | None = None
    err_vs_ref: float | None = None
    wall_us: float | None = None
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------- config


def _background(cfg: dict) -> tuple[str, Background]:
    name = cfg.get("model")
    t_a = float(cfg.get("t_A") or 0.0)
    if name is not None:
        if name not in CLI_MODELS:
            raise ConfigError(f"unknown model {name!r}; choose from {sorted(CLI_MODELS)}")
        mu, nu = CLI_MODELS[name]
        for key, val in (("mu", mu), ("nu", nu)):
            if cfg.get(key) is not None and float(cfg[key]) != val:
                raise ConfigError(f"model {name!r} pins {key}={val}; remove the override")
        return name, Background(mu, nu, t_a)
    if cfg.get("mu") is None or cfg.get("nu") is None:
        raise ConfigError("give a named model or both mu and nu")
    return "custom", Background(float(cfg["mu"]), float(cfg["nu"]), t_a)


def _axis(spec) -> np.ndarray:
    if isinstance(spec, (int, float)):
        return np.array([float(spec)])
    if isinstance(spec, dict):
        lo, hi, n = float(spec["start"]), float(spec["stop"]), int(spec["num"])
        log = spec.get("spacing", "lin") == "log"
    elif len(spec) == 3:
        lo, hi, n = float(spec[0]), float(spec[1]), int(spec[2])
        log = False
    else:
        raise ConfigError(f"bad axis spec {spec!r}")
    if n < 1:
        raise ConfigError("grid axes need at least one point")
    return np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)


def _modes(cfg: dict, rng: np.random.Generator) -> list[Mode]:
    modes: list[Mode] = []
    for k in cfg.get("modes") or []:
        if len(k) != 3:
            raise ConfigError(f"mode needs three components, got {k!r}")
        modes.append(Mode(*map(float, k)))
    grid = cfg.get("grid")
    if grid:
        if "random" in grid:
            n = int(grid["random"])
            box = float(grid.get("k_max", 10.0))
            for _ in range(n):
                k = rng.uniform(-box, box, 3)
                modes.append(Mode(*map(float, k)))
        else:
            for k1 in _axis(grid.get("k1", 0.0)):
                for k2 in _axis(grid.get("k2", 0.0)):
                    for k3 in _axis(grid.get("k3", 1.0)):
                        modes.append(Mode(float(k1), float(k2), float(k3)))
    if not modes:
        raise ConfigError("no modes given")
    return modes


def _times(cfg: dict, mode: Mode, bg: Background) -> list[float]:
    times: list[float] = [float(t) for t in (cfg.get("times") or [])]
    if cfg.get("time_grid"):
        times.extend(float(t) for t in _axis(cfg["time_grid"]))
    for tau in cfg.get("taus") or []:
        if mode.k3 == 0:
            raise ConfigError("tau grids need k3 != 0")
        times.append((float(tau) * bg.mu / (2.0 * abs(mode.k3))) ** (1.0 / bg.mu))
    if not times:
        raise ConfigError("no times given")
    return times


def build_config(cfg: dict) -> RunConfig:
    """Validate a raw configuration mapping."""
    unknown = set(cfg) - set(_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    full = {**_DEFAULTS, **{k: v for k, v in cfg.items() if v is not None}}
    name, bg = _background(full)
    methods = full["methods"]
    if isinstance(methods, str):
        methods = [m.strip() for m in methods.split(",") if m.strip()]
    if not methods:
        raise ConfigError("at least one method is required")
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise ConfigError(f"unknown methods {bad}; choose from {list(METHODS)}")
    ref = full["reference"] or methods[0]
    if ref not in methods:
        raise ConfigError(f"reference method {ref!r} must be among the methods")
    if full["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    rng = np.random.default_rng(int(full["seed"]))
    cells = tuple((m, t) for m in _modes(full, rng) for t in _times(full, m, bg))
    threads = int(full["threads"])
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    return RunConfig(
        model=name,
        background=bg,
        cells=cells,
        methods=tuple(methods),
        reference=ref,
        tol=float(full["tol"]),
        chirality=full["chirality"],
        fmt=full["format"],
        out=full["out"],
        threads=threads,
        seed=int(full["seed"]),
        timing=bool(full["timing"]),
    )


# ---------------------------------------------------------------- evaluation


def compute_teo(method: str, mode: Mode, bg: Background, t: float, tol: float = 1e-10, chirality: str = "minus") -> TeoMatrix:
    """Evaluate ``K(t | bg.t_A)`` with the named method."""
    t_a = bg.t_A
    if t == t_a:
        return TeoMatrix.identity(t, method)
    if method == "oracle":
        return evolve_oracle(mode, bg, chirality, t_from=t_a, t_to=t, tol=tol)
    if method == "picard":
        return picard_teo(mode, bg, t_a, t, chirality=chirality)
    if method == "closed":
        return closed_form_teo(mode, bg, chirality, t_A=t_a, t=t, tol=tol)
    if method == "short":
        return short_time_teo(mode, bg, t_a, t, chirality)
    if method == "appendix":
        if abs(bg.delta - 0.5) < 1e-12:
            if (bg.mu, bg.nu) != NAMED_MODELS["stiff"] or t_a != 0:
                raise DomainError("the delta = 1/2 large-time form needs the stiff background and t_A = 0")
            return stiff_teo_asymptotic(mode if chirality == "minus" else mode.flipped(), t)
        return appendix_teo(mode, bg, t_a, t, chirality)
    if method == "weak":
        return weak_anisotropy_teo(mode, bg, t_a, t, chirality, tol=min(tol, 1e-8))
    if method == "model-exact":
        if mode.k3 == 0:
            return hypersurface_exact_teo(mode if chirality == "minus" else mode.flipped(), bg, t_a, t)
        if bg.is_conformal:
            if (bg.mu, bg.nu) == NAMED_MODELS["rw"] and t_a == 0:
                return rw_exact_teo(mode, t, chirality)
            return conformal_exact_teo(mode, bg, t_a, t, chirality)
        raise DomainError("no exact TEO for this background and mode")
    raise DomainError(f"unknown method {method!r}")


def _run_cell(cfg: RunConfig, mode: Mode, t: float) -> list[SweepRow]:
    rows = []
    for method in cfg.methods:
        row = SweepRow(cfg.model, cfg.background, mode, t, method)
        t0 = time.perf_counter()
        try:
            row.teo = compute_teo(method, mode, cfg.background, t, cfg.tol, cfg.chirality)
        except (DomainError, SpecfunError, IntegrationError, ValueError, ArithmeticError) as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        if cfg.timing:
            row.wall_us = (time.perf_counter() - t0) * 1e6
        rows.append(row)
    ref = next((r for r in rows if r.method == cfg.reference), None)
    if ref is not None and ref.teo is not None:
        for r in rows:
            if r.teo is not None:
                r.err_vs_ref = frobenius_error(r.teo, ref.teo)
    return rows


def run_cells(cfg: RunConfig) -> list[SweepRow]:
    """Evaluate every cell; output order is mode-major, time-minor, then method."""
    if cfg.threads == 1:
        groups = [_run_cell(cfg, m, t) for m, t in cfg.cells]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            groups = list(pool.map(lambda c: _run_cell(cfg, *c), cfg.cells))
    return [r for g in groups for r in g]


# ---------------------------------------------------------------- output


def _num(x: float | None) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _row_values(r: SweepRow) -> list[float | str | None]:
    k = r.teo
    nan = float("nan")
    return [
        r.model, r.bg.mu, r.bg.nu, r.bg.delta, r.mode.k1, r.mode.k2, r.mode.k3, r.bg.t_A, r.t, r.method,
        k.k11.real if k else nan, k.k11.imag if k else nan, k.k12.real if k else nan, k.k12.imag if k else nan,
        k.unitarity_defect if k else nan, r.err_vs_ref, r.wall_us,
    ]  # fmt: skip


def format_rows(rows: Sequence[SweepRow], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([v if isinstance(v, str) else _num(v) for v in _row_values(r)])
        return buf.getvalue()
    out = []
    for r in rows:
        rec = {}
        for col, v in zip(COLUMNS, _row_values(r)):
            if isinstance(v, float) and not math.isfinite(v):
                v = None
            rec[col] = v
        rec["error"] = r.error
        out.append(rec)
    return json.dumps({"columns": list(COLUMNS) + ["error"], "rows": out}, indent=1) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- parser


def _float_list(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v.strip()]


def _mode_arg(s: str) -> list[float]:
    v = _float_list(s)
    if len(v) != 3:
        raise argparse.ArgumentTypeError("mode must be k1,k2,k3")
    return v


def _axis_arg(s: str) -> dict:
    parts = s.split(":")
    if len(parts) == 1:
        return {"start": float(parts[0]), "stop": float(parts[0]), "num": 1}
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError("axis must be start:stop:num[:log]")
    spec = {"start": float(parts[0]), "stop": float(parts[1]), "num": int(parts[2])}
    if len(parts) == 4:
        spec["spacing"] = parts[3]
    return spec


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--model", choices=sorted(CLI_MODELS))
    p.add_argument("--mu", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--tA", dest="t_A", type=float)
    p.add_argument("--methods", help="comma-separated list from " + ",".join(METHODS))
    p.add_argument("--reference", help="method used for err_vs_ref (default: first method)")
    p.add_argument("--chirality", choices=("minus", "plus"))
    p.add_argument("--tol", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--timing", action="store_true", default=None, help="fill wall_us (breaks byte-identical output)")
    p.add_argument("--t", dest="times", type=_float_list, help="comma-separated times")
    p.add_argument("--tau", dest="taus", type=_float_list, help="comma-separated tau values, converted per mode")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artifact", description="TEO of spin-1/2 modes in axisymmetric Bianchi I")
    sub = parser.add_subparsers(dest="command", required=True)
    p_teo = sub.add_parser("teo", help="evaluate TEOs for explicit modes and times")
    _common(p_teo)
    p_teo.add_argument("--mode", dest="modes", type=_mode_arg, action="append", help="k1,k2,k3 (repeatable)")
    p_sw = sub.add_parser("sweep", help="parameter sweep over mode and time grids")
    _common(p_sw)
    p_sw.add_argument("--mode", dest="modes", type=_mode_arg, action="append")
    p_sw.add_argument("--k1", type=_axis_arg)
    p_sw.add_argument("--k2", type=_axis_arg)
    p_sw.add_argument("--k3", type=_axis_arg)
    p_sw.add_argument("--random", type=int, help="number of random modes in |k_j| <= k-max")
    p_sw.add_argument("--k-max", dest="k_max", type=float)
    p_sw.add_argument("--t-grid", dest="time_grid", type=_axis_arg, help="start:stop:num[:log]")
    p_v = sub.add_parser("verify", help="run an acceptance suite")
    p_v.add_argument("suite", help="one of " + ", ".join(SUITES))
    sub.add_parser("models", help="list named models")
    return parser


def _gather(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    flags = {k: getattr(args, k, None) for k in _DEFAULTS if getattr(args, k, None) is not None}
    if args.command == "sweep":
        grid = dict(cfg.get("grid") or {})
        for key in ("k1", "k2", "k3", "k_max"):
            if getattr(args, key, None) is not None:
                grid[key] = getattr(args, key)
        if args.random is not None:
            grid["random"] = args.random
        if grid:
            flags["grid"] = grid
    cfg.update(flags)
    return cfg


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = build_config(_gather(args))
    rows = run_cells(cfg)
    _emit(format_rows(rows, cfg.fmt), cfg.out)
    for r in rows:
        if r.error:
            print(f"row error: {r.method} k={r.mode.as_tuple()} t={r.t!r}: {r.error}", file=sys.stderr)
    return 1 if rows and all(r.error for r in rows) else 0


def _cmd_verify(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.suite not in SUITES:
        parser.error(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    results = run_suite(args.suite)
    for res in results:
        print(res.line())
    if args.suite == "kasner":
        q = next(r for r in results if r.key == "C2").values["q1"]
        print(f"Kasner matching quotient {q:.9f}")
    return 0 if all(r.passed for r in results) else 1


def _cmd_models() -> int:
    for name, (mu, nu) in CLI_MODELS.items():
        print(f"{name:10s} mu={mu:.17g} nu={nu:.17g} delta={(1.0 - nu) / mu:.17g}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args, parser)
        if args.command == "models":
            return _cmd_models()
        return _cmd_run(args)
    except ConfigError as exc:
        parser.error(str(exc))
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
