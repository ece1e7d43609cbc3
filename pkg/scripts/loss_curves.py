#!/usr/bin/env python3
"""Tabulate the margin losses and their first two derivatives on a z grid.

With no arguments this writes losscurves.csv for a representative set of
alphas; any arguments are forwarded to the ``losscurves`` subcommand.
"""
import sys

from alphaloss.cli import main

DEFAULTS = [
    "--alphas", "1,1.2,1.5,2,5,inf",
    "--z-min", "-6", "--z-max", "6", "--steps", "601",
    "--out", "losscurves.csv",
]

if __name__ == "__main__":
    extra = sys.argv[1:] or DEFAULTS
    sys.exit(main(["losscurves"] + extra))
