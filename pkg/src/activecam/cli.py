"""``activecam`` command line: eval, smooth, select, simulate, render, axis.

Exit status is 0 on success, 2 for unreadable or invalid input and 1 for any
other failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from importlib import resources
from pathlib import Path

from activecam import ingest, perftable, selector, simcam
from activecam.errors import ValidationError

EXIT_OK, EXIT_FAILURE, EXIT_INPUT = 0, 1, 2
TABLE_SUFFIX = ".tbl"


class InputError(Exception):
    """Raised for missing or unreadable input files."""


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _write(path: str | None, data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(data)


def _range(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'low,high', got {text!r}") from None
    return a, b


def _axes(args) -> tuple[perftable.AxisSpec, perftable.AxisSpec]:
    return (
        perftable.AxisSpec(*args.shutter_range, n=args.grid, unit="ms"),
        perftable.AxisSpec(*args.gain_range, n=args.grid, unit="dB"),
    )


def load_table_dir(path: str) -> list[perftable.PerformanceTable]:
    d = Path(path)
    if not d.is_dir():
        raise InputError(f"{path}: not a directory")
    files = sorted(p for p in d.iterdir() if p.suffix == TABLE_SUFFIX)
    if not files:
        raise InputError(f"{path}: no {TABLE_SUFFIX} files")
    tables = []
    for f in files:
        try:
            tables.append(perftable.load_table(f.read_bytes()))
        except ValidationError as exc:
            raise ValidationError(f"{f.name}: {exc}") from None
    return tables


def table_filename(t: perftable.PerformanceTable) -> str:
    return f"{t.algorithm_id}_{t.illumination:g}lx{TABLE_SUFFIX}"


# ------------------------------------------------------------------ commands


def cmd_eval(args) -> int:
    manifest = ingest.parse_manifest(_read(args.manifest), n=args.grid)
    dets = ingest.parse_detections(_read(args.detections))
    gts = ingest.parse_annotations(_read(args.annotations))
    cells = ingest.group_cells(manifest, dets, gts, args.lux)
    shutter, gain = _axes(args)
    table = perftable.build_table(
        cells, args.algorithm, args.lux, shutter, gain, allow_missing=args.allow_missing
    )
    _write(args.out, perftable.save_table(table))
    return EXIT_OK


def cmd_smooth(args) -> int:
    table = perftable.load_table(_read(args.table))
    _write(args.out, perftable.save_table(perftable.gaussian_smooth(table, args.sigma)))
    return EXIT_OK


def cmd_select(args) -> int:
    sets = selector.table_sets(load_table_dir(args.tables))
    if args.lux is not None:
        readings = [args.lux]
    else:
        readings = ingest.parse_lux_stream(sys.stdin)
    for lux in readings:
        sel = selector.select_for_illumination(sets, selector.LightReading(lux))
        sys.stdout.write(sel.format_line() + "\n")
        sys.stdout.flush()
    return EXIT_OK


def _sim_config(args) -> simcam.SimConfig:
    if args.config is None:
        text = resources.files("activecam").joinpath("data/reference.cfg").read_text("utf-8")
    else:
        text = _read(args.config).decode("utf-8")
    cfg = simcam.SimConfig.from_text(text)
    if args.trials is not None:
        cfg = dataclasses.replace(cfg, trials=args.trials)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _sim_config(args)
    if args.tables:
        sets = selector.table_sets(load_table_dir(args.tables))
    else:
        sets = simcam.build_sim_tables(cfg, args.seed)
    if args.write_tables:
        out = Path(args.write_tables)
        out.mkdir(parents=True, exist_ok=True)
        for ts in sets:
            for t in ts.tables:
                (out / table_filename(t)).write_bytes(perftable.save_table(t))
    report = simcam.simulate(cfg, args.seed, sets)
    _write(args.out, report.format().encode("utf-8"))
    return EXIT_OK


def render_text(t: perftable.PerformanceTable) -> str:
    return "".join(" ".join(f"{v:6.3f}" for v in row) + "\n" for row in t.values)


def render_pgm(t: perftable.PerformanceTable) -> bytes:
    # darker is better: AP 1 -> 0 (black), AP 0 -> 255 (white)
    rows, cols = t.values.shape
    pixels = bytes(int(round(255 * (1.0 - float(v)))) for v in t.values.ravel())
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + pixels


def cmd_render(args) -> int:
    table = perftable.load_table(_read(args.table))
    if args.format == "pgm":
        _write(args.out, render_pgm(table))
    else:
        _write(args.out, render_text(table).encode("utf-8"))
    return EXIT_OK


def cmd_axis(args) -> int:
    axis = perftable.shutter_axis(args.grid) if args.axis == "shutter" else perftable.gain_axis(args.grid)
    i = args.index if args.index is not None else perftable.axis_nearest_index(axis, args.value)
    v = perftable.axis_value(axis, i)
    sys.stdout.write(f"{args.axis}\t{i}\t{v:.6f}\t{axis.unit}\n")
    return EXIT_OK


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="activecam", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def grid_opts(sp, ranges=False):
        sp.add_argument("--grid", type=int, default=perftable.GRID_SIZE, help="samples per axis")
        if ranges:
            sp.add_argument("--shutter-range", type=_range, default=perftable.SHUTTER_RANGE_MS, metavar="A,B")
            sp.add_argument("--gain-range", type=_range, default=perftable.GAIN_RANGE_DB, metavar="A,B")

    e = sub.add_parser("eval", help="build a performance table from detection results")
    e.add_argument("--manifest", required=True)
    e.add_argument("--detections", required=True)
    e.add_argument("--annotations", required=True)
    e.add_argument("--lux", type=float, required=True)
    e.add_argument("--algorithm", required=True)
    e.add_argument("--out")
    e.add_argument("--allow-missing", action="store_true", help="score missing cells as 0 and flag them")
    grid_opts(e, ranges=True)
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("smooth", help="3x3 Gaussian smoothing of a table")
    s.add_argument("table")
    s.add_argument("--sigma", type=float, default=1.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_smooth)

    q = sub.add_parser("select", help="camera parameters for an illumination reading")
    q.add_argument("tables", help=f"directory of {TABLE_SUFFIX} files")
    q.add_argument("--lux", type=float, help="single reading; otherwise one reading per stdin line")
    q.set_defaults(func=cmd_select)

    m = sub.add_parser("simulate", help="closed-loop active control vs auto-exposure")
    m.add_argument("--config", help="key=value scene/model file (default: shipped reference)")
    src = m.add_mutually_exclusive_group()
    src.add_argument("--tables", help=f"directory of {TABLE_SUFFIX} files")
    src.add_argument("--build-tables", action="store_true", help="build tables from a simulated training split")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--trials", type=int)
    m.add_argument("--write-tables", metavar="DIR")
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)

    r = sub.add_parser("render", help="table heatmap")
    r.add_argument("table")
    r.add_argument("--format", choices=("text", "pgm"), default="text")
    r.add_argument("--out")
    r.set_defaults(func=cmd_render)

    a = sub.add_parser("axis", help="convert between grid index and physical value")
    a.add_argument("--axis", choices=("shutter", "gain"), required=True)
    which = a.add_mutually_exclusive_group(required=True)
    which.add_argument("--index", type=int)
    which.add_argument("--value", type=float)
    grid_opts(a)
    a.set_defaults(func=cmd_axis)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, InputError) as exc:
        print(f"activecam {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"activecam {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
