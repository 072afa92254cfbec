"""Marginal AP trends of the simulator and a heatmap of one built table.

Sweeps shutter at a fixed lux and gain, then illumination at a fixed shutter
and gain, for every configured detector. Optionally writes the smoothed
table at ``--lux`` as PGM.

    python3 scripts/trends.py --lux 1600 --pgm /tmp/table.pgm
"""
import argparse

from activecam import cli, simcam
from activecam import perftable as pt


def row(label, values):
    return label + "\t" + "\t".join(f"{v:.3f}" for v in values)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--lux", type=float, default=1600.0)
    p.add_argument("--gain-idx", type=int, default=1)
    p.add_argument("--shutter-idx", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pgm", help="write the smoothed table at --lux for the first detector")
    args = p.parse_args(argv)

    cfg = simcam.SimConfig()
    gain = pt.axis_value(pt.gain_axis(), args.gain_idx)
    shutter = pt.axis_value(pt.shutter_axis(), args.shutter_idx)

    print(row(f"shutter_ms@{args.lux:g}lx", pt.shutter_axis().values()))
    for d, det in enumerate(cfg.detectors):
        sp = simcam.shutter_profile(cfg, args.lux, gain, args.seed, d)
        print(row(det.name, sp) + f"\tunimodal={simcam.is_unimodal(sp)}")
    print()
    print(row(f"lux@{shutter:g}ms", cfg.levels))
    for d, det in enumerate(cfg.detectors):
        ip = simcam.illumination_profile(cfg, shutter, gain, args.seed, d)
        print(row(det.name, ip) + f"\tunimodal={simcam.is_unimodal(ip)}")

    if args.pgm:
        sets = simcam.build_sim_tables(cfg, args.seed)
        table = min(sets[0].tables, key=lambda t: abs(t.illumination - args.lux))
        print()
        print(cli.render_text(table), end="")
        with open(args.pgm, "wb") as fh:
            fh.write(cli.render_pgm(table))


if __name__ == "__main__":
    main()
