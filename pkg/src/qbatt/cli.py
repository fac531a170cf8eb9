"""Command-line entry point: named studies, custom sweeps, and the validation suite.

Exit codes: 0 success, 1 validation failures, 2 configuration errors.
Flag values override config-file values, which override defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from ._svg import heatmap, line_chart
from .model import GhzSpec, ModelParams
from .noise import KINDS, NoiseSpec
from .optimizer import OptimizerConfig
from .protocol import Scenario, run_scenario
from .scenarios import (
    DEFAULT_ACCESSIBLE_K_GRID,
    DEFAULT_K_GRID,
    DEFAULT_L_GRID,
    DEFAULT_SPECTRA_K_GRID,
    DEFAULT_T_GRID,
    SpectraSweepReport,
    SweepResult,
    run_accessible_scenario,
    run_appendix_d,
    run_fig1,
    run_fig2,
    run_fig3_appendix,
    run_fig_accessible,
)

COMMANDS = ("fig1", "fig2", "fig3", "accessible", "appendixD", "custom", "validate")
FORMATS = ("csv", "svg")


class ConfigError(Exception):
    pass


# --- output writers -----------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return f"{float(value):.17g}"


def _metadata_lines(metadata: dict) -> list[str]:
    lines = [f"# seed: {metadata.get('seed')}", f"# version: {metadata.get('version', __version__)}"]
    params = metadata.get("params", {})
    if params:
        lines.append("# params: " + " ".join(f"{k}={_fmt(v)}" for k, v in params.items()))
    for axis, grid in metadata.get("grids", {}).items():
        lines.append(f"# grid {axis}: " + " ".join(_fmt(v) for v in grid))
    if "optimizer" in metadata:
        opt = metadata["optimizer"]
        lines.append("# optimizer: " + " ".join(f"{k}={_fmt(v)}" for k, v in opt.items()))
    return lines


def emit_csv(result: SweepResult, path) -> None:
    """UTF-8 CSV: '#' metadata lines, a header, then one row per grid point and family."""
    if not result.rows:
        raise ValueError("refusing to write an empty sweep result")
    lines = _metadata_lines(result.metadata)
    lines.append(",".join(result.columns))
    for row in result.rows:
        lines.append(",".join(_fmt(row.get(col)) for col in result.columns))
    _write_text(path, "\n".join(lines) + "\n")


def emit_report_csv(report: SpectraSweepReport, path) -> None:
    if not report.rows:
        raise ValueError("refusing to write an empty report")
    lines = _metadata_lines(report.metadata)
    header = ["k", "compatible", "max_gap"]
    header += [f"ae_{i}" for i in range(4)] + [f"ax_{i}" for i in range(4)]
    lines.append(",".join(header))
    for k, rep in report.rows:
        cells = [_fmt(k), _fmt(rep.compatible), _fmt(rep.max_gap)]
        cells += [_fmt(v) for v in rep.spectrum_left] + [_fmt(v) for v in rep.spectrum_right]
        lines.append(",".join(cells))
    _write_text(path, "\n".join(lines) + "\n")


def _write_text(path, text: str) -> None:
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _swept_axes(result: SweepResult) -> list[str]:
    axes = []
    for axis in ("k", "l", "t"):
        values = {row[axis] for row in result.rows if row[axis] is not None}
        if len(values) > 1:
            axes.append(axis)
    return axes


def _title(result: SweepResult, name: str) -> str:
    params = result.metadata.get("params", {})
    shown = " ".join(f"{k}={params[k]:g}" for k in ("h_b", "h_a", "j_ba", "t") if k in params)
    return f"{name} ({shown})"


def emit_svg(result: SweepResult, path, kind: str, name: str = "sweep") -> None:
    """Render a sweep as a line chart (one swept axis) or gap heatmap (two)."""
    if not result.rows:
        raise ValueError("refusing to plot an empty sweep result")
    axes = _swept_axes(result)
    if kind == "lines":
        if len(axes) != 1:
            raise ValueError(f"line chart needs exactly one swept axis, found {axes}")
        axis = axes[0]
        series = []
        for family in sorted({row["family"] for row in result.rows}):
            rows = sorted((r for r in result.rows if r["family"] == family), key=lambda r: r[axis])
            ys = [r["s_acc"] if r["s_acc"] is not None else r["s_max"] for r in rows]
            series.append((family, [r[axis] for r in rows], ys))
        y_label = "restricted extractable energy" if any(
            r["s_acc"] is not None for r in result.rows
        ) else "max extractable energy"
        svg = line_chart(series, _title(result, name), axis, y_label)
    elif kind == "heatmap":
        if sorted(axes) != ["k", "l"]:
            raise ValueError(f"heatmap needs swept k and l axes, found {axes}")
        by_gap = {}
        for row in result.rows:
            by_gap.setdefault(row["family"], []).append(abs(row["gap"] or 0.0))
        family = max(by_gap, key=lambda f: max(by_gap[f]))
        rows = [r for r in result.rows if r["family"] == family]
        ks = sorted({r["k"] for r in rows})
        ls = sorted({r["l"] for r in rows})
        grid = {(r["k"], r["l"]): r["gap"] for r in rows}
        values = [[grid[(k, l)] for k in ks] for l in ls]
        svg = heatmap(ks, ls, values, _title(result, f"{name}: gap to {family}"), "k", "l")
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    _write_text(path, svg + "\n")


# --- configuration ------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    out: Path
    seed: int
    workers: int
    formats: tuple[str, ...]
    k: float | None
    l: float | None
    t: float | None
    noise: str | None
    j: float | None
    h_b: float | None
    restarts: int | None
    custom: dict


def _merged(args, file_cfg: dict, key: str, flag_value, default):
    if flag_value is not None:
        return flag_value
    if key in file_cfg:
        return file_cfg[key]
    return default


def _build_config(args) -> RunConfig:
    file_cfg = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")

    seed = _merged(args, file_cfg, "seed", args.seed, None)
    if seed is None:
        seed = os.environ.get("QBATT_SEED", 0)
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ConfigError(f"seed must be an integer, got {seed!r}")

    fmt = _merged(args, file_cfg, "format", args.format, "csv,svg")
    if isinstance(fmt, str):
        formats = tuple(f for f in fmt.split(",") if f)
    else:
        formats = tuple(fmt)
    bad = set(formats) - set(FORMATS)
    if bad or not formats:
        raise ConfigError(f"formats must be a non-empty subset of {FORMATS}, got {formats}")

    workers = _merged(args, file_cfg, "workers", args.workers, 1)
    try:
        workers = int(workers)
    except (TypeError, ValueError):
        raise ConfigError(f"workers must be an integer, got {workers!r}")
    if workers < 1:
        raise ConfigError("workers must be >= 1")

    def number(key, flag_value, lo=None, hi=None):
        value = _merged(args, file_cfg, key, flag_value, None)
        if value is None:
            return None
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        if lo is not None and not (lo <= value <= hi):
            raise ConfigError(f"{key} must lie in [{lo}, {hi}], got {value}")
        return value

    noise = _merged(args, file_cfg, "noise", args.noise, None)
    if noise is not None and noise not in KINDS:
        raise ConfigError(f"noise must be one of {KINDS}, got {noise!r}")

    restarts = _merged(args, file_cfg, "restarts", args.restarts, None)
    if restarts is not None:
        try:
            restarts = int(restarts)
        except (TypeError, ValueError):
            raise ConfigError(f"restarts must be an integer, got {restarts!r}")
        if restarts < 1:
            raise ConfigError("restarts must be >= 1")

    out = Path(_merged(args, file_cfg, "out", args.out, "."))
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".qbatt-write-probe"
        probe.write_text("", encoding="utf-8")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {out} is not writable: {exc}")

    return RunConfig(
        command=args.command,
        out=out,
        seed=seed,
        workers=workers,
        formats=formats,
        k=number("k", args.k, 0.0, 1.0),
        l=number("l", args.l, -1.0, 1.0),
        t=number("t", args.t),
        noise=noise,
        j=number("J", args.J),
        h_b=number("hB", args.hB),
        restarts=restarts,
        custom=file_cfg,
    )


def _params(cfg: RunConfig) -> ModelParams:
    defaults = ModelParams()
    overrides = dict(cfg.custom.get("params", {}))
    if cfg.j is not None:
        overrides.update(j_ba=cfg.j, j_ae=cfg.j, j_ax=cfg.j)
    if cfg.h_b is not None:
        overrides["h_b"] = cfg.h_b
    if cfg.t is not None:
        overrides["t"] = cfg.t
    known = {f for f in defaults.__dataclass_fields__}
    bad = set(overrides) - known
    if bad:
        raise ConfigError(f"unknown model parameters {sorted(bad)}")
    try:
        return ModelParams(**{**{f: getattr(defaults, f) for f in known}, **overrides})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model parameters: {exc}")


# --- commands -----------------------------------------------------------------


def _write_outputs(cfg: RunConfig, name: str, result: SweepResult, kind: str) -> None:
    if "csv" in cfg.formats:
        emit_csv(result, cfg.out / f"{name}.csv")
    if "svg" in cfg.formats:
        emit_svg(result, cfg.out / f"{name}.svg", kind, name)


def _cmd_fig1(cfg: RunConfig) -> int:
    k_grid = [cfg.k] if cfg.k is not None else DEFAULT_K_GRID
    if "svg" in cfg.formats and len(k_grid) < 2:
        raise ConfigError("fig1 with a collapsed k axis cannot be plotted; use --format csv")
    result = run_fig1(_params(cfg), k_grid, seed=cfg.seed)
    _write_outputs(cfg, "fig1", result, "lines")
    return 0


def _cmd_fig2(cfg: RunConfig) -> int:
    k_grid = [cfg.k] if cfg.k is not None else DEFAULT_K_GRID
    l_grid = [cfg.l] if cfg.l is not None else DEFAULT_L_GRID
    kind = "heatmap" if len(k_grid) > 1 and len(l_grid) > 1 else "lines"
    if "svg" in cfg.formats and len(k_grid) < 2 and len(l_grid) < 2:
        raise ConfigError("fig2 with both axes collapsed cannot be plotted; use --format csv")
    result = run_fig2(_params(cfg), k_grid, l_grid, seed=cfg.seed)
    _write_outputs(cfg, "fig2", result, kind)
    return 0


def _cmd_fig3(cfg: RunConfig) -> int:
    t_grid = [cfg.t] if cfg.t is not None else DEFAULT_T_GRID
    if "svg" in cfg.formats and len(t_grid) < 2:
        raise ConfigError("fig3 with a collapsed t axis cannot be plotted; use --format csv")
    k = cfg.k if cfg.k is not None else 0.5
    params = _params(RunConfig(**{**cfg.__dict__, "t": None}))
    result = run_fig3_appendix(params, t_grid, k=k, seed=cfg.seed)
    _write_outputs(cfg, "fig3", result, "lines")
    return 0


def _cmd_accessible(cfg: RunConfig) -> int:
    k_grid = [cfg.k] if cfg.k is not None else DEFAULT_ACCESSIBLE_K_GRID
    if "svg" in cfg.formats and len(k_grid) < 2:
        raise ConfigError("accessible with a collapsed k axis cannot be plotted; use --format csv")
    opt = OptimizerConfig(restarts=cfg.restarts or 32, seed=cfg.seed)
    result = run_fig_accessible(_params(cfg), k_grid, cfg=opt, seed=cfg.seed)
    _write_outputs(cfg, "accessible", result, "lines")
    return 0


def _cmd_appendix_d(cfg: RunConfig) -> int:
    k_grid = [cfg.k] if cfg.k is not None else DEFAULT_SPECTRA_K_GRID
    report = run_appendix_d(_params(cfg), k_grid, seed=cfg.seed)
    if "csv" in cfg.formats:
        emit_report_csv(report, cfg.out / "appendixD.csv")
    if "svg" in cfg.formats:
        if len(report.rows) < 2:
            raise ConfigError("appendixD with a collapsed k axis cannot be plotted; use --format csv")
        ks = [k for k, _ in report.rows]
        gaps = [rep.max_gap for _, rep in report.rows]
        svg = line_chart([("spectrum gap", ks, gaps)], "appendixD: spectrum distance", "k", "max eigenvalue gap")
        _write_text(cfg.out / "appendixD.svg", svg + "\n")
    return 0


def _custom_point(task):
    """Evaluate one (family, axis values) grid point; top level for pickling."""
    family, point, params_fields, noise_kind, initial, ghz_nl, opt_fields = task
    params = ModelParams(**{**params_fields, **({"t": point["t"]} if point.get("t") is not None else {})})
    noise = NoiseSpec(noise_kind, point.get("k", 0.0))
    ghz = None
    if initial == "ghz":
        n = ghz_nl[0] if family != "npovm2" else 4
        ghz = GhzSpec(n, point.get("l", ghz_nl[1]))
    scenario = Scenario(initial=initial, params=params, noise=noise, measurement=family, ghz=ghz)
    if family.startswith("accessible"):
        acc, unrestricted, outcome = run_accessible_scenario(scenario, OptimizerConfig(**opt_fields))
        return {"s_max": unrestricted.s_max, "s_acc": acc.s_acc, "p": outcome.p, "delta_e": outcome.delta_e}
    res = run_scenario(scenario)
    return {"s_max": res.s_max, "s_acc": None, "p": res.outcome.p, "delta_e": res.outcome.delta_e}


def _cmd_custom(cfg: RunConfig) -> int:
    spec = cfg.custom
    axes_cfg = spec.get("axes")
    if not axes_cfg:
        raise ConfigError("custom sweeps need an 'axes' object in the config file")
    if not set(axes_cfg) <= {"k", "l", "t"}:
        raise ConfigError(f"axes limited to k, l, t; got {sorted(axes_cfg)}")
    axes = {}
    for name, desc in axes_cfg.items():
        if isinstance(desc, dict):
            try:
                grid = np.linspace(float(desc["start"]), float(desc["stop"]), int(desc["num"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"axis {name}: expected start/stop/num, got {desc!r} ({exc})")
        elif isinstance(desc, list) and desc:
            grid = np.asarray([float(v) for v in desc])
        else:
            raise ConfigError(f"axis {name}: expected start/stop/num or a list of values")
        if len(grid) == 0 or np.any(np.diff(grid) <= 0) and len(grid) > 1:
            raise ConfigError(f"axis {name}: grid must be non-empty and increasing")
        axes[name] = [float(v) for v in grid]

    families = spec.get("families", ["povm", "npovm1"])
    from .protocol import MEASUREMENTS

    bad = set(families) - set(MEASUREMENTS)
    if bad:
        raise ConfigError(f"unknown families {sorted(bad)}")
    initial = spec.get("initial", "product-excited")
    ghz_cfg = spec.get("ghz", {})
    ghz_nl = (int(ghz_cfg.get("n", 3)), float(ghz_cfg.get("l", 0.0)))
    noise_kind = cfg.noise or "amplitude-damping"
    params = _params(cfg)
    opt_fields = {"restarts": cfg.restarts or 32, "seed": cfg.seed}
    if "l" in axes and initial != "ghz":
        raise ConfigError("sweeping l requires the ghz initial state")

    names = list(axes)
    grids = [axes[n] for n in names]
    points = [{}] if not names else None
    if points is None:
        mesh = np.meshgrid(*grids, indexing="ij")
        points = [
            {names[j]: float(mesh[j].flat[i]) for j in range(len(names))}
            for i in range(mesh[0].size)
        ]

    params_fields = {f: getattr(params, f) for f in params.__dataclass_fields__}
    tasks = [
        (family, point, params_fields, noise_kind, initial, ghz_nl, opt_fields)
        for point in points
        for family in families
    ]
    try:
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                outcomes = list(pool.map(_custom_point, tasks, chunksize=max(1, len(tasks) // (cfg.workers * 4))))
        else:
            outcomes = [_custom_point(task) for task in tasks]
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid custom sweep: {exc}")

    rows = []
    for (family, point, *_), out in zip(tasks, outcomes):
        rows.append(
            {
                "k": point.get("k"),
                "l": point.get("l"),
                "t": point.get("t", params.t),
                "family": family,
                "s_max": out["s_max"],
                "s_acc": out["s_acc"],
                "p": out["p"],
                "delta_e": out["delta_e"],
                "gap": None,
            }
        )
    metadata = {
        "seed": cfg.seed,
        "version": __version__,
        "params": params_fields,
        "grids": axes,
    }
    result = SweepResult(rows, metadata)
    kind = "heatmap" if len(names) == 2 else "lines"
    if "svg" in cfg.formats and kind == "heatmap" and sorted(names) != ["k", "l"]:
        kind = "lines"  # two-axis sweeps other than (k, l) fall back to lines per k
    if "svg" in cfg.formats and kind == "lines" and len(_swept_axes(result)) != 1:
        raise ConfigError("custom sweep cannot be plotted as lines; request csv only")
    _write_outputs(cfg, "custom", result, kind)
    return 0


def _cmd_validate(cfg: RunConfig) -> int:
    from .validation import run_all

    checks = run_all(seed=cfg.seed, outdir=cfg.out)
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: {check.detail}")
    failures = [c for c in checks if not c.passed]
    if failures:
        print(f"\n{len(failures)} of {len(checks)} checks failed:", file=sys.stderr)
        for check in failures:
            print(f"  {check.name}\n    {check.detail}", file=sys.stderr)
        return 1
    print(f"\nall {len(checks)} checks passed")
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbatt", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qbatt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--out", default=None, help="output directory (default: current)")
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--seed", default=None, help="RNG seed (env QBATT_SEED as fallback)")
        p.add_argument("--workers", default=None, help="worker processes for grid evaluation")
        p.add_argument("--format", default=None, help="comma-separated subset of csv,svg")
        p.add_argument("--k", default=None, help="noise strength override")
        p.add_argument("--l", default=None, help="GHZ mixing parameter override")
        p.add_argument("--t", default=None, help="interaction time override")
        p.add_argument("--noise", default=None, help=f"noise kind: one of {', '.join(KINDS)}")
        p.add_argument("--J", default=None, help="coupling strength override")
        p.add_argument("--hB", default=None, help="battery field strength override")
        p.add_argument("--restarts", default=None, help="optimizer restarts override")
    return parser


_DISPATCH = {
    "fig1": _cmd_fig1,
    "fig2": _cmd_fig2,
    "fig3": _cmd_fig3,
    "accessible": _cmd_accessible,
    "appendixD": _cmd_appendix_d,
    "custom": _cmd_custom,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _build_config(args)
        return _DISPATCH[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
