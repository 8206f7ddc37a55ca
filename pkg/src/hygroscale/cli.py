"""Command line front end.

Every subcommand emits a delimited table (CSV by default, JSON with
--format json) to stdout or --out; the report family additionally
renders figures into a directory.  Output formatting is fixed at six
significant digits with scientific notation outside [1e-3, 1e4], so
identical invocations produce byte-identical output.
"""
import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from hygroscale.dimensionless import (
    DimensionlessNumbers,
    default_frame,
    distortion,
    numbers,
)
from hygroscale.materials import (
    CATEGORIES,
    CSV_FIELDS,
    MaterialProperties,
    _fmt as _table_fmt,
    find,
    load_database,
)
from hygroscale.similarity import (
    KINDS,
    check_similitude,
    dynamic_scale,
    equivalent_length,
    equivalent_time,
)
from hygroscale.solver import (
    load_simulation_config,
    parse_duration,
    simulate,
    verify_dynamic_similarity,
)
from hygroscale.thermo import DEFAULT_CONSTANTS, load_constants
from hygroscale.wall import compare, layer_numbers, parse_wall_config

# scatter axes: the eight numbers plus the two combined transport groups
AXES = ("fo_m", "fo_q", "delta", "delta_abs", "delta_fo_m", "gamma",
        "gamma_fo_q", "eta", "bi_q", "bi_m", "bi_qm")

NUMBER_COLUMNS = ("fo_m", "fo_q", "delta", "gamma", "eta",
                  "bi_q", "bi_m", "bi_qm")


def fmt(x) -> str:
    """Fixed output formatting; empty string for missing values."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return ""
    if x == 0.0:
        return "0"
    ax = abs(x)
    if 1e-3 <= ax <= 1e4:
        return f"{x:.6g}"
    return f"{x:.5e}"


def _jval(x):
    if x is None or isinstance(x, (bool, int, np.integer, str)):
        return int(x) if isinstance(x, np.integer) else x
    x = float(x)
    if math.isnan(x):
        return None
    return 0.0 if x == 0.0 else float(fmt(x))


def _axis_value(num: DimensionlessNumbers, name: str) -> float:
    if name == "delta_abs":
        return num.abs_delta
    if name == "delta_fo_m":
        return num.abs_delta * num.fo_m
    if name == "gamma_fo_q":
        return num.gamma * num.fo_q
    return getattr(num, name)


def _render_table(header: Sequence[str], rows: Sequence[Sequence],
                  format_: str) -> str:
    if format_ == "json":
        payload = [dict(zip(header, (_jval(x) for x in row))) for row in rows]
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _emit(header: Sequence[str], rows: Sequence[Sequence], args) -> None:
    """Write one table in the selected format to --out or stdout."""
    text = _render_table(header, rows, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _material_row(mat: MaterialProperties) -> List[str]:
    return [_table_fmt(getattr(mat, f)) if f not in ("name", "category")
            else getattr(mat, f) for f in CSV_FIELDS]


def _frame_for(args, mat: MaterialProperties):
    length = args.length if args.length is not None else mat.Lref_default
    return default_frame(length, args.time, args.side)


# ---------------------------------------------------------------- commands

def cmd_materials(args, constants) -> int:
    mats = load_database()
    if args.action == "show":
        mats = [find(mats, args.material)]
    _emit(CSV_FIELDS, [_material_row(m) for m in mats], args)
    return 0


def cmd_numbers(args, constants) -> int:
    mats = load_database()
    mat = find(mats, args.material)
    num = numbers(mat, _frame_for(args, mat), constants)
    header = ("id", "name") + NUMBER_COLUMNS
    row = [mat.id, mat.name] + [getattr(num, c) for c in NUMBER_COLUMNS]
    _emit(header, [row], args)
    return 0


def _map_rows(args, constants) -> List[Dict]:
    mats = load_database()
    if args.category:
        mats = [m for m in mats if m.category == args.category]
    rows = []
    for mat in mats:
        num = numbers(mat, _frame_for(args, mat), constants)
        rows.append({"id": mat.id, "name": mat.name, "category": mat.category,
                     args.x: _axis_value(num, args.x),
                     args.y: _axis_value(num, args.y)})
    return rows


def cmd_map(args, constants) -> int:
    if args.x == args.y:
        raise ValueError("map axes must differ")
    rows = _map_rows(args, constants)
    header = ("id", "name", "category", args.x, args.y)
    _emit(header, [[r[h] for h in header] for r in rows], args)
    return 0


def _distortion_rows(field):
    rows = []
    for iv, v in enumerate(field.v):
        for iu, u in enumerate(field.u):
            rows.append([u, v, bool(field.in_domain[iv, iu])]
                        + [field.fields[name][iv, iu] for name in field.fields])
    return rows


def cmd_distortion(args, constants) -> int:
    mats = load_database()
    mat = find(mats, args.material)
    field = distortion(mat, _frame_for(args, mat), args.grid, constants)
    header = ["u", "v", "in_domain"] + [f"{n}_star" for n in field.fields]
    _emit(header, _distortion_rows(field), args)
    return 0


_WALL_HEADER = ("layer", "material", "thickness_m", "surface") + NUMBER_COLUMNS


def _wall_rows(layers) -> List[List]:
    rows = []
    for ln in layers:
        rows.append([ln.index, ln.material.name, ln.thickness,
                     ln.surface or ""]
                    + [getattr(ln.numbers, c) for c in NUMBER_COLUMNS])
    return rows


def cmd_wall(args, constants) -> int:
    mats = load_database()
    frame = default_frame(1.0, args.time, "outside")
    if args.action == "analyze":
        if len(args.config) != 1:
            raise ValueError("wall analyze takes exactly one --config file")
        config = parse_wall_config(args.config[0])
        layers = layer_numbers(config, frame, mats, constants)
        _emit(_WALL_HEADER, _wall_rows(layers), args)
        return 0
    if len(args.config) != 2:
        raise ValueError("wall compare needs exactly two --config files")
    config_a = parse_wall_config(args.config[0], label="A")
    config_b = parse_wall_config(args.config[1], label="B")
    report = compare(config_a, config_b, frame, mats, constants)
    header = ("group", "layer", "value_a", "value_b", "larger", "group_mixed")
    rows = []
    for name, gc in report.groups.items():
        for i, (va, vb, side) in enumerate(zip(gc.values_a, gc.values_b,
                                               gc.ordering), start=1):
            rows.append([name, i, va, vb, side, gc.mixed])
    rows.append(["overall", 0, None, None,
                 "further simulation required" if report.needs_simulation
                 else "ordered", report.needs_simulation])
    _emit(header, rows, args)
    return 0


def cmd_similar(args, constants) -> int:
    mats = load_database()
    if args.action == "dynamic":
        cfg = load_simulation_config(args.design, mats, constants)
        scaled = dynamic_scale(cfg.design, args.pi)
        report = check_similitude(cfg.design, scaled.design, constants=constants)
        f0, f1 = cfg.design.frame, scaled.design.frame
        rows = [["pi", args.pi],
                ["length_m", f0.Lref], ["scaled_length_m", f1.Lref],
                ["time_s", f0.tref], ["scaled_time_s", f1.tref],
                ["period_s", cfg.design.period],
                ["scaled_period_s", scaled.design.period],
                ["hq", f0.hq], ["scaled_hq", f1.hq],
                ["hm", f0.hm], ["scaled_hm", f1.hm]]
        for name, diff in report["relative_differences"].items():
            rows.append([f"rel_diff_{name}", diff])
        rows.append(["worst", report["worst"]])
        rows.append(["worst_difference", report["worst_difference"]])
        rows.append(["similar", report["similar"]])
        _emit(("name", "value"), rows, args)
        return 0

    ref = find(mats, args.ref)
    target = find(mats, args.target)
    length = args.length if args.length is not None else ref.Lref_default
    frame = default_frame(length, args.time, args.side)
    if args.action == "length":
        value = equivalent_length(ref, target, frame, args.kind, constants)
        header = ("kind", "reference", "target", "length_m")
    else:
        value = equivalent_time(ref, target, frame, args.kind, constants)
        header = ("kind", "reference", "target", "time_s")
    _emit(header, [[args.kind, ref.name, target.name, value]], args)
    return 0


def _series_table(sol):
    cfg = sol.config
    tref = cfg.design.frame.tref
    probe_idx = [int(np.argmin(np.abs(sol.chi - p))) for p in cfg.probes]
    header = ["tau", "t_s"]
    for j in probe_idx:
        chi = fmt(float(sol.chi[j]))
        header += [f"u@{chi}", f"v@{chi}", f"T@{chi}", f"P1@{chi}",
                   f"phi@{chi}"]
    header += ["energy", "moisture"]
    rows = []
    for k, tau in enumerate(sol.tau):
        row = [tau, tau * tref]
        for j in probe_idx:
            row += [sol.u[k, j], sol.v[k, j], sol.T[k, j], sol.P1[k, j],
                    sol.phi[k, j]]
        row += [sol.energy[k], sol.moisture[k]]
        rows.append(row)
    return header, rows


def _write_snapshots(sol, prefix: str) -> List[str]:
    paths = []
    for name, data in (("u", sol.u), ("v", sol.v), ("T", sol.T),
                       ("P1", sol.P1), ("phi", sol.phi), ("omega", sol.omega)):
        path = f"{prefix}_{name}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["tau"] + [fmt(c) for c in sol.chi])
            for tau, row in zip(sol.tau, data):
                writer.writerow([fmt(tau)] + [fmt(x) for x in row])
        paths.append(path)
    return paths


def _verify_rows(report) -> List[List]:
    rows = [["pi", report["pi"]],
            ["dt", report["dt"]],
            ["structural_identical", report["structural_identical"]],
            ["max_diff_u", report["max_diff_u"]],
            ["max_diff_v", report["max_diff_v"]],
            ["dimensionless_tolerance", report["dimensionless_tolerance"]],
            ["dimensionless_ok", report["dimensionless_ok"]]]
    for i, p in enumerate(report["probes"], start=1):
        for key in ("chi", "tau", "x_m", "t_s", "x_scaled_m", "t_scaled_s",
                    "T", "T_scaled", "P1", "P1_scaled", "rel_T", "rel_P1"):
            rows.append([f"probe{i}_{key}", p[key]])
    rows += [["max_probe_relative_difference",
              report["max_probe_relative_difference"]],
             ["dimensional_tolerance", report["dimensional_tolerance"]],
             ["dimensional_ok", report["dimensional_ok"]]]
    return rows


def cmd_simulate(args, constants) -> int:
    mats = load_database()
    cfg = load_simulation_config(args.config, mats, constants)
    if args.verify_pi is not None:
        report = verify_dynamic_similarity(cfg.design, args.verify_pi,
                                           template=cfg, constants=constants)
        if args.snapshots:
            _write_snapshots(report["solution_original"], args.snapshots)
        _emit(("name", "value"), _verify_rows(report), args)
        return 0
    sol = simulate(cfg, constants)
    if args.snapshots:
        _write_snapshots(sol, args.snapshots)
    header, rows = _series_table(sol)
    _emit(header, rows, args)
    return 0


def _write_table(header, rows, path: str, format_: str) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_render_table(header, rows, format_))
    return path


def cmd_report(args, constants) -> int:
    from hygroscale import report as rendering
    os.makedirs(args.out_dir, exist_ok=True)
    ext = args.format
    written = []

    if args.target == "map":
        if args.x == args.y:
            raise ValueError("map axes must differ")
        rows = _map_rows(args, constants)
        header = ("id", "name", "category", args.x, args.y)
        written.append(_write_table(
            header, [[r[h] for h in header] for r in rows],
            os.path.join(args.out_dir, f"map.{ext}"), args.format))
        written.append(rendering.render_map(
            rows, args.x, args.y, os.path.join(args.out_dir, "map.png")))
    elif args.target == "distortion":
        mats = load_database()
        mat = find(mats, args.material)
        field = distortion(mat, _frame_for(args, mat), args.grid, constants)
        header = ["u", "v", "in_domain"] + [f"{n}_star" for n in field.fields]
        written.append(_write_table(
            header, _distortion_rows(field),
            os.path.join(args.out_dir, f"distortion.{ext}"), args.format))
        written.append(rendering.render_distortion(
            field, mat.name, os.path.join(args.out_dir, "distortion.png")))
    else:
        cfg = load_simulation_config(args.config, load_database(), constants)
        sol = simulate(cfg, constants)
        header, rows = _series_table(sol)
        written.append(_write_table(
            header, rows, os.path.join(args.out_dir, f"series.{ext}"),
            args.format))
        written.extend(rendering.render_simulation(sol, args.out_dir))

    for path in written:
        print(path)
    return 0


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="FILE",
                        help="write the table to FILE instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--constants", metavar="FILE",
                        help="physical-constants override file")

    frame_opts = argparse.ArgumentParser(add_help=False)
    frame_opts.add_argument("--length", type=float, metavar="M",
                            help="reference length in meters "
                                 "(default: the material's)")
    frame_opts.add_argument("--time", type=parse_duration, default=3600.0,
                            metavar="T", help="reference time, s/h/d suffixes "
                                              "(default 1h)")
    frame_opts.add_argument("--side", choices=("outside", "inside"),
                            default="outside",
                            help="surface exchange set (default outside)")

    parser = argparse.ArgumentParser(
        prog="hygroscale",
        description="Coupled heat and moisture scaling toolkit for porous "
                    "building materials.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("materials", parents=[common],
                       help="list the material database or show one row")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("material", nargs="?",
                   help="id or name (required for show)")
    p.set_defaults(func=cmd_materials)

    p = sub.add_parser("numbers", parents=[common, frame_opts],
                       help="dimensionless numbers of one material")
    p.add_argument("--material", required=True)
    p.set_defaults(func=cmd_numbers)

    p = sub.add_parser("map", parents=[common, frame_opts],
                       help="scatter data of one number against another")
    p.add_argument("--x", required=True, choices=AXES)
    p.add_argument("--y", required=True, choices=AXES)
    p.add_argument("--all", action="store_true",
                   help="all materials (the default)")
    p.add_argument("--category", choices=CATEGORIES)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("distortion", parents=[common, frame_opts],
                       help="starred coefficient fields over the state square")
    p.add_argument("--material", required=True)
    p.add_argument("--grid", type=int, default=101)
    p.set_defaults(func=cmd_distortion)

    p = sub.add_parser("wall", parents=[common],
                       help="per-layer analysis and comparison of walls")
    p.add_argument("action", choices=("analyze", "compare"))
    p.add_argument("--config", action="append", required=True, metavar="FILE",
                   help="wall file; give twice for compare")
    p.add_argument("--time", type=parse_duration, default=3600.0, metavar="T")
    p.set_defaults(func=cmd_wall)

    p = sub.add_parser("similar", parents=[common],
                       help="solve similarity problems between materials")
    p.add_argument("action", choices=("length", "time", "dynamic"))
    p.add_argument("--ref", help="reference material (length/time)")
    p.add_argument("--target", help="target material (length/time)")
    p.add_argument("--kind", choices=KINDS, default="fo_m")
    p.add_argument("--length", type=float, metavar="M",
                   help="reference length (default: ref material's)")
    p.add_argument("--time", type=parse_duration, default=3600.0, metavar="T")
    p.add_argument("--side", choices=("outside", "inside"), default="outside")
    p.add_argument("--pi", type=float, help="scale factor (dynamic)")
    p.add_argument("--design", metavar="FILE",
                   help="simulation config supplying the design (dynamic)")
    p.set_defaults(func=cmd_similar)

    p = sub.add_parser("simulate", parents=[common],
                       help="run the 1D coupled transient solver")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--verify-pi", type=float, metavar="P",
                   help="verify dynamic similitude at scale P instead of "
                        "emitting the plain series")
    p.add_argument("--snapshots", metavar="PREFIX",
                   help="also write full-field CSV matrices")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", parents=[common],
                       help="render figures next to the delimited output")
    rsub = p.add_subparsers(dest="target", metavar="TARGET")
    rp = rsub.add_parser("map", parents=[common, frame_opts])
    rp.add_argument("--x", required=True, choices=AXES)
    rp.add_argument("--y", required=True, choices=AXES)
    rp.add_argument("--category", choices=CATEGORIES)
    rp.add_argument("--out-dir", default=".", metavar="DIR")
    rp.set_defaults(func=cmd_report, target="map")
    rp = rsub.add_parser("distortion", parents=[common, frame_opts])
    rp.add_argument("--material", required=True)
    rp.add_argument("--grid", type=int, default=101)
    rp.add_argument("--out-dir", default=".", metavar="DIR")
    rp.set_defaults(func=cmd_report, target="distortion")
    rp = rsub.add_parser("simulate", parents=[common])
    rp.add_argument("--config", required=True, metavar="FILE")
    rp.add_argument("--out-dir", default=".", metavar="DIR")
    rp.set_defaults(func=cmd_report, target="simulate")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 2
    if args.command == "materials" and args.action == "show" \
            and not args.material:
        parser.error("materials show needs an id or name")
    if args.command == "similar":
        if args.action == "dynamic" and (args.pi is None or not args.design):
            parser.error("similar dynamic needs --pi and --design")
        if args.action in ("length", "time") and \
                (not args.ref or not args.target):
            parser.error(f"similar {args.action} needs --ref and --target")
    try:
        constants = load_constants(args.constants) if args.constants \
            else DEFAULT_CONSTANTS
        return args.func(args, constants)
    except LookupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
