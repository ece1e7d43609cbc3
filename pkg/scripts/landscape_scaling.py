#!/usr/bin/env python3
"""Run the risk-gap scaling experiment on the symmetric synthetic task.

Writes per-trial gaps plus a summary with median gaps and the fitted log-log
slope per alpha (about -1/2 when the gap decays like 1/sqrt(n)).  Arguments
are forwarded to the ``landscape`` subcommand.
"""
import sys

from alphaloss.cli import main

DEFAULTS = [
    "--alphas", "2",
    "--ns", "100,1000,10000",
    "--trials", "21",
    "--dim", "5",
    "--radius", "1.0",
    "--mean-norm", "0.8",
    "--noise", "0.14",
    "--seed", "20240819",
    "--out", "landscape.csv",
]

if __name__ == "__main__":
    extra = sys.argv[1:] or DEFAULTS
    sys.exit(main(["landscape"] + extra))
