"""Command line entry point: ``atomcorr <command> [--scenario NAME | --config FILE] [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .config import ConfigError, RunConfig, emit_config, parse_config
from .couplings import couplings_for
from .dynamics import RESIDUAL_TOL, SteadyStateError, build_liouvillian, steady_state
from .correlations import build_expectation_table
from .scanner import (
    AngleGrid,
    ScanResult,
    extract_contours,
    fields_from_table,
    rabi_ratio_experiment,
    ratio_regions,
    scaling_experiment,
)
from .scenarios import SCENARIOS

log = logging.getLogger("atomcorr")

COMMANDS = ("scan", "contours", "scaling", "rabi-ratio", "steady-state", "list-scenarios")


def _inputs(cfg: RunConfig) -> dict:
    s = cfg.effective_spec()
    return {
        "scenario": cfg.scenario,
        "n_atoms": s.n_atoms,
        "scheme": s.scheme.name,
        "positions": [list(p) for p in s.positions],
        "omega_p": s.omega_p,
        "omega_c": s.omega_c,
        "gamma_c": s.gamma_c,
        "interaction": s.interaction.value,
        "grid": cfg.grid,
        "workers": cfg.workers,
    }


def _solve(cfg: RunConfig, out: Path, manifest: dict):
    spec = cfg.effective_spec()
    t0 = time.perf_counter()
    L = build_liouvillian(spec, couplings_for(spec))
    report = steady_state(L)
    manifest["timings"]["steady_state"] = time.perf_counter() - t0
    manifest["solver"] = {
        "method": report.solver.value,
        "residual": report.residual,
        "null_space_dim": report.null_space_dim,
        "uniqueness_gap": report.uniqueness_gap,
        "liouvillian_storage": "sparse" if L.sparse else "dense",
        "hilbert_dim": spec.dim,
    }
    if cfg.dump_liouvillian:
        manifest["files"].append(io.write_complex_matrix(out / "liouvillian.txt", L.matrix).name)
    if cfg.dump_rho:
        manifest["files"].append(io.write_complex_matrix(out / "rho.txt", report.rho).name)
    return spec, report


def _contour_sets(cfg: RunConfig, fields: dict) -> list:
    sets = []
    for req in cfg.contours:
        if req.kind == "level":
            cs = extract_contours(fields[req.field], req.level)
        else:
            cs = ratio_regions(fields[req.field], fields["G2"], req.level)
        sets.append((req, cs))
    return sets


def _fields_needed(cfg: RunConfig, command: str) -> tuple:
    need = [] if command == "contours" else list(cfg.fields)
    for req in cfg.contours:
        for f in (req.field, "G2") if req.kind == "ratio" else (req.field,):
            if f not in need:
                need.append(f)
    return tuple(need)


def _scan_like(cfg: RunConfig, command: str, out: Path, manifest: dict):
    spec, report = _solve(cfg, out, manifest)
    t0 = time.perf_counter()
    table = build_expectation_table(report.rho, spec)
    grid = AngleGrid(cfg.grid)
    fields = fields_from_table(table, grid, _fields_needed(cfg, command), cfg.workers, spec.interaction)
    manifest["timings"]["fields"] = time.perf_counter() - t0
    result = ScanResult(spec, grid, fields, report, table)
    manifest["mask_stats"] = {k: int(f.mask.sum()) for k, f in fields.items()}
    manifest["field_meta"] = {k: f.meta for k, f in fields.items() if f.meta}
    if command == "scan":
        for name in cfg.fields:
            manifest["files"].append(io.write_field_csv(out / f"{name}.csv", fields[name]).name)
    t0 = time.perf_counter()
    sets = _contour_sets(cfg, fields)
    manifest["timings"]["contours"] = time.perf_counter() - t0
    manifest["contours"] = {}
    for req, cs in sets:
        fname = req.filename()
        manifest["files"].append(io.write_polylines(out / fname, cs.polylines).name)
        manifest["contours"][fname] = {
            "field": req.field,
            "kind": req.kind,
            "level": req.level,
            "polylines": len(cs.polylines),
            "vertices": int(sum(len(p) for p in cs.polylines)),
            "region_cells": cs.region_cells,
        }
    if cfg.heatmaps and command == "scan":
        overlays = [cs for _, cs in sets]
        for name in cfg.fields:
            manifest["files"].append(io.write_heatmap(out / f"{name}.png", fields[name], overlays).name)
    return result


def _ratio(cfg: RunConfig, command: str, out: Path, manifest: dict):
    spec = cfg.effective_spec()
    grid = AngleGrid(cfg.grid)
    t0 = time.perf_counter()
    if command == "scaling":
        s1, s2 = cfg.scaling or (1.0, 1.5)
        field = scaling_experiment(spec, s1, s2, grid, cfg.workers)
    else:
        if cfg.rabi is None:
            raise ConfigError("rabi_ratio.omega_c_1: no coupling-field pair configured")
        field = rabi_ratio_experiment(spec, *cfg.rabi, grid, cfg.workers)
    manifest["timings"]["experiment"] = time.perf_counter() - t0
    manifest["mask_stats"] = {"ratio": int(field.mask.sum())}
    vals = field.values[~field.mask]
    manifest["ratio_summary"] = {
        "min": float(vals.min()) if vals.size else None,
        "max": float(vals.max()) if vals.size else None,
        "max_abs_deviation_from_1": float(np.abs(vals - 1).max()) if vals.size else None,
    }
    manifest["field_meta"] = {"ratio": field.meta}
    manifest["files"].append(io.write_field_csv(out / "ratio.csv", field).name)
    if cfg.heatmaps:
        manifest["files"].append(io.write_heatmap(out / "ratio.png", field).name)
    return field


def run(cfg: RunConfig, command: str = "scan") -> int:
    """Execute ``command`` for ``cfg``; writes files and manifest.json, returns the exit status."""
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "config": emit_config(cfg),
        "inputs": _inputs(cfg),
        "timings": {},
        "files": [],
        "status": "error",
    }
    t0 = time.perf_counter()
    status = 1
    try:
        if command in ("scan", "contours"):
            _scan_like(cfg, command, out, manifest)
        elif command in ("scaling", "rabi-ratio"):
            _ratio(cfg, command, out, manifest)
        elif command == "steady-state":
            spec, report = _solve(cfg, out, manifest)
            manifest["populations"] = np.real(np.diag(report.rho)).tolist()
        else:
            raise ValueError(f"unknown command {command!r}")
        residual = manifest.get("solver", {}).get("residual", 0.0)
        if residual > RESIDUAL_TOL:
            manifest["error"] = f"solver residual {residual:.3e} above {RESIDUAL_TOL:.0e}"
        else:
            manifest["status"] = "ok"
            status = 0
    except SteadyStateError as exc:
        manifest["error"] = f"steady state failed: {exc}"
        status = 2
    except (ConfigError, ValueError) as exc:
        manifest["error"] = str(exc)
        status = 2
    manifest["timings"]["total"] = time.perf_counter() - t0
    manifest["files"].append("manifest.json")
    io.write_manifest(out / "manifest.json", manifest)
    if status:
        log.error(manifest.get("error", "failed"))
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="atomcorr", description="n-atom correlation scans of light scattered by an atom chain")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp_ = sub.add_parser(name)
        if name == "list-scenarios":
            continue
        sp_.add_argument("--config", type=Path, help="INI run configuration")
        sp_.add_argument("--scenario", help="named preset (see list-scenarios)")
        sp_.add_argument("--grid", type=int, help="points per angle axis (default 201)")
        sp_.add_argument("--fields", help="comma-separated field names")
        sp_.add_argument("--out", dest="output", help="output directory")
        sp_.add_argument("--workers", type=int)
        sp_.add_argument("--heatmaps", action="store_true", default=None)
        sp_.add_argument("--dump-liouvillian", action="store_true", default=None)
        sp_.add_argument("--dump-rho", action="store_true", default=None)
        sp_.add_argument("--no-interaction", action="store_true", default=None, help="zero all inter-atom couplings")
        sp_.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-scenarios":
        for name, sc in SCENARIOS.items():
            print(f"{name:16s} {sc.description}")
        return 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    text = args.config.read_text() if args.config else ""
    overrides = {
        k: getattr(args, k)
        for k in ("scenario", "grid", "fields", "output", "workers", "heatmaps", "dump_liouvillian", "dump_rho", "no_interaction")
    }
    try:
        cfg = parse_config(text, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg, args.command)


if __name__ == "__main__":
    sys.exit(main())
