#!/usr/bin/env python3
"""Dump the paths of a model's resonances as the coupling opens.

Follows every unit-circle resonance of the decoupled walk along a
geometric eps grid and prints one row per (eps, resonance) pair,
ready for plotting a spectral portrait.  CSV goes to stdout.

Example:
    python3 scripts/resonance_portrait.py --model ms \
        --eps-start 0.01 --eps-stop 0.5 --count 40
"""

import argparse
import csv
import sys

import numpy as np

from qwscatter.asymptotics import geometric_grid, track_resonances
from qwscatter.models import (
    crossing_family,
    cycle_family,
    matrix_schrodinger_family,
)


def build_family(args):
    if args.model == "ms":
        return matrix_schrodinger_family()
    if args.model == "crossing":
        return crossing_family(args.strength)
    strengths = [float(x) for x in args.c.split(",")] if args.c else [1.0]
    if len(strengths) == 1:
        strengths = strengths * args.n
    return cycle_family(args.n, strengths)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--model", choices=("ms", "cycle", "crossing"),
                        default="ms")
    parser.add_argument("--n", type=int, default=4)
    parser.add_argument("--c", default=None)
    parser.add_argument("--strength", type=float, default=0.8)
    parser.add_argument("--eps-start", type=float, default=0.01)
    parser.add_argument("--eps-stop", type=float, default=0.5)
    parser.add_argument("--count", type=int, default=40)
    args = parser.parse_args(argv)

    family = build_family(args)
    grid = np.concatenate(
        [[0.0], geometric_grid(args.eps_start, args.eps_stop, args.count)]
    )
    track = track_resonances(family, grid)

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("eps", "start_re", "start_im", "re", "im", "abs"))
    for j, start in enumerate(track.starts):
        for i, eps in enumerate(track.eps_grid):
            value = track.paths[i, j]
            writer.writerow(
                format(v, ".17g")
                for v in (
                    eps, start.real, start.imag,
                    value.real, value.imag, abs(value),
                )
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
