"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 internal numeric error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from . import arrangement, bounds, netbuilder, verify
from .errors import NumericalError
from .geometry import load_units_csv

EXPERIMENTS = ("sandwich", "volume", "segments", "theorem5", "theorem11")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    experiment: Optional[str] = None
    dim: Optional[list[int]] = None
    k: Optional[int] = None
    m: Optional[list[int]] = None
    epsilon: Optional[list[float]] = None
    constant: float = 1.0
    radius: Optional[float] = None
    samples: int = 1_000_000
    seed: int = 42
    tolerance: float = 1e-9
    input: Optional[str] = None
    out: Optional[str] = None
    format: str = "text"
    threads: Optional[int] = None
    given: tuple[str, ...] = ()

    def one(self, name: str):
        v = getattr(self, name)
        if isinstance(v, list):
            if len(v) != 1:
                raise UsageError(f"--{name} takes a single value for '{self.subcommand}'")
            return v[0]
        return v

    def require(self, *names: str) -> None:
        for n in names:
            if getattr(self, n) is None:
                raise UsageError(f"'{self.subcommand}' needs --{n}")

    def validate(self) -> "RunConfig":
        if self.tolerance <= 0:
            raise UsageError("--tolerance must be positive")
        if self.threads is not None and self.threads < 1:
            raise UsageError("--threads must be >= 1")
        for d in self.dim or []:
            if d < 1:
                raise UsageError(f"--dim must be >= 1, got {d}")
        for e in self.epsilon or []:
            if not 0 < e < 1:
                raise UsageError(f"--epsilon must lie in (0, 1), got {e}")
        for m in self.m or []:
            if m < 1:
                raise UsageError(f"--m must be >= 1, got {m}")
        if self.k is not None and self.k < 2:
            raise UsageError("--k must be >= 2")
        if self.constant <= 0:
            raise UsageError("--constant must be positive")
        if self.samples < 1:
            raise UsageError("--samples must be >= 1")
        if self.radius is not None and self.radius < 0:
            raise UsageError("--radius must be non-negative")
        return self

    def invocation(self) -> str:
        skip = {"subcommand", "experiment", "format", "threads", "input", "given"}
        parts = [self.subcommand] + ([self.experiment] if self.experiment else [])
        if self.input:
            parts.append(self.input)
        for key, val in asdict(self).items():
            if key in skip or val is None or (self.given and key not in self.given):
                continue
            vals = val if isinstance(val, list) else [val]
            parts.append(f"--{key} " + " ".join(str(v) for v in vals))
        return "pwlboundary " + " ".join(parts)


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_bounds(cfg: RunConfig) -> int:
    cfg.require("dim")
    if cfg.epsilon is None and cfg.m is None:
        raise UsageError("'bounds' needs --epsilon and/or --m")
    reports = []
    for d, m, e in itertools.product(cfg.dim, cfg.m or [None], cfg.epsilon or [None]):
        if e is not None and d < 2:
            raise UsageError("--epsilon bounds need --dim >= 2")
        reports.append(bounds.bounds_report(d, e, m, cfg.constant))
    if cfg.format == "csv":
        _emit(bounds.format_csv(reports))
    elif cfg.format == "json":
        _emit(json.dumps({"config": cfg.invocation(), "reports": [r.as_dict() for r in reports]}, indent=1))
    else:
        _emit(f"# {cfg.invocation()}\n" + bounds.format_table(reports))
    return 0


def cmd_build(cfg: RunConfig) -> int:
    cfg.require("dim", "k", "out")
    d = cfg.one("dim")
    if d < 2:
        raise UsageError("--dim must be >= 2 for 'build'")
    net = netbuilder.build_norm_nd(d, cfg.k, cfg.radius or 0.0)
    netbuilder.save(net, cfg.out)
    info = {"out": cfg.out, "units": net.unit_count, "layers": net.layer_count}
    if cfg.format == "json":
        _emit(json.dumps(info))
    elif cfg.format == "csv":
        _emit("out,units,layers\n" + f"{cfg.out},{net.unit_count},{net.layer_count}")
    else:
        _emit(f"wrote {cfg.out}: {net.unit_count} units, {net.layer_count} layers")
    return 0


def _run_experiment(cfg: RunConfig) -> tuple[verify.ExperimentRow, str]:
    exp = cfg.experiment
    if exp == "sandwich":
        cfg.require("dim", "k")
        d = cfg.one("dim")
        if d < 2:
            raise UsageError("--dim must be >= 2")
        r = verify.sandwich_sweep(d, cfg.k, cfg.samples, cfg.seed, cfg.threads)
        row = verify.ExperimentRow("sandwich", d, cfg.k, None, cfg.samples, cfg.seed, r.min_ratio, None, r.lower, r.passed)
        return row, f"min_ratio={r.min_ratio:.6g} max_ratio={r.max_ratio:.6g} lower={r.lower:.6g}"
    if exp == "volume":
        cfg.require("dim", "k")
        d = cfg.one("dim")
        if not 2 <= d <= 6:
            raise UsageError("volume experiments need 2 <= --dim <= 6")
        net = netbuilder.build_norm_nd(d, cfg.k, cfg.radius or 1.0)
        r = verify.mc_volume_excess(net, d, cfg.k, cfg.samples, cfg.seed, cfg.threads)
        bound = bounds.error_bound(d, cfg.k)
        row = verify.ExperimentRow(
            "volume", d, cfg.k, None, cfg.samples, cfg.seed, r.estimate, r.ci95, bound, r.estimate - r.ci95 <= bound
        )
        return row, f"R={r.R:.6g} hits={r.hits}"
    if exp == "segments":
        cfg.require("k")
        n = verify.count_segments_2d(netbuilder.build_norm2d(cfg.k, cfg.radius or 1.0))
        row = verify.ExperimentRow("segments", 2, cfg.k, None, None, None, float(n), None, float(2**cfg.k), n == 2**cfg.k)
        return row, f"segments={n} expected={2**cfg.k}"
    if exp == "theorem5":
        cfg.require("dim", "m")
        d, m = cfg.one("dim"), cfg.one("m")
        r = arrangement.theorem5_experiment(d, m, cfg.seed, cfg.tolerance)
        row = verify.ExperimentRow("theorem5", d, None, None, None, cfg.seed, float(r.facets), None, float(r.upper), r.passed)
        return row, f"m={m} facets={r.facets} range=[{r.lower}, {r.upper}]"
    if exp == "theorem11":
        cfg.require("dim", "epsilon")
        d, e = cfg.one("dim"), cfg.one("epsilon")
        if not 2 <= d <= 6:
            raise UsageError("theorem11 needs 2 <= --dim <= 6")
        r = verify.reproduce_theorem11(d, e, cfg.samples, cfg.seed, cfg.threads)
        row = verify.ExperimentRow("theorem11", d, r.k_used, e, cfg.samples, cfg.seed, r.excess_estimate, r.ci95, e, r.passed)
        return row, f"units={r.units} layers={r.layers} analytic_bound={r.bound:.6g}"
    raise UsageError(f"unknown experiment {exp!r}")


def cmd_verify(cfg: RunConfig) -> int:
    row, detail = _run_experiment(cfg)
    if cfg.format == "csv":
        _emit(verify.rows_csv([row]))
    elif cfg.format == "json":
        _emit(json.dumps({"config": cfg.invocation(), "result": row.as_dict(), "detail": detail}, indent=1))
    else:
        _emit(f"# {cfg.invocation()}\n# rng: {verify.RNG_NAME}\n{verify.row_text(row)}\n  {detail}")
    return 0 if row.passed else 1


def cmd_cells(cfg: RunConfig) -> int:
    cfg.require("input")
    try:
        units = load_units_csv(cfg.input)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    d, m = units[0].dim, len(units)
    cells = arrangement.enumerate_cells(units, cfg.tolerance)
    nb, nu = arrangement.classify_cells(cells, units, cfg.tolerance)
    generic = arrangement.is_general_position(units, cfg.tolerance)
    G = bounds.regions_max(d, m)
    summary = f"{len(cells)}/{G} ({'general position' if generic else 'degenerate'}); bounded={nb} unbounded={nu}"
    if cfg.out:
        arrangement.write_cells_csv(cells, cfg.out)
        if cfg.format == "json":
            _emit(json.dumps({"cells": len(cells), "G": G, "general_position": generic, "bounded": nb, "unbounded": nu}))
        else:
            _emit(summary)
    else:
        arrangement.write_cells_csv(cells, sys.stdout)
        print(summary, file=sys.stderr)
    return 0


COMMANDS = {"bounds": cmd_bounds, "build": cmd_build, "verify": cmd_verify, "cells": cmd_cells}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--json", dest="format", action="store_const", const="json", help="same as --format json")
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--threads", type=int, default=None, help="cap on worker threads (default: all cores)")
    common.add_argument("--out", default=None)

    p = argparse.ArgumentParser(prog="pwlboundary", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)

    b = sub.add_parser("bounds", parents=[common], help="closed-form counts and size bounds")
    b.add_argument("--dim", type=int, nargs="+")
    b.add_argument("--m", type=int, nargs="+")
    b.add_argument("--epsilon", type=float, nargs="+")
    b.add_argument("--constant", type=float, default=1.0)

    bl = sub.add_parser("build", parents=[common], help="write a deep norm network as JSON")
    bl.add_argument("--dim", type=int, nargs=1)
    bl.add_argument("--k", type=int)
    bl.add_argument("--radius", type=float, default=0.0)

    v = sub.add_parser("verify", parents=[common], help="run a verification experiment")
    v.add_argument("experiment", choices=EXPERIMENTS)
    v.add_argument("--dim", type=int, nargs=1)
    v.add_argument("--k", type=int)
    v.add_argument("--m", type=int, nargs=1)
    v.add_argument("--epsilon", type=float, nargs=1)
    v.add_argument("--radius", type=float, default=None)
    v.add_argument("--samples", type=int, default=1_000_000)
    v.add_argument("--seed", type=int, default=42)

    c = sub.add_parser("cells", parents=[common], help="enumerate the cells of a hyperplane CSV")
    c.add_argument("input")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    known = {f for f in RunConfig.__dataclass_fields__}
    args = {k: v for k, v in vars(ns).items() if k in known}
    cfg = RunConfig(**args, given=tuple(args))
    return cfg.validate()


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        parser.error(str(exc))
    except NumericalError as exc:
        print(f"pwlboundary: numeric error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"pwlboundary: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
