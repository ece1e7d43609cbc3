#!/usr/bin/env python3
"""Emit per-(alpha, eta) conditional-risk minima and calibration gaps.

The minimum-risk column traces the concave curves that characterize the loss
family across posteriors; the gap column certifies calibration numerically.
Arguments are forwarded to the ``calibration`` subcommand.
"""
import sys

from alphaloss.cli import main

DEFAULTS = [
    "--alphas", "1,1.2,1.5,2,5,inf",
    "--eta-grid", ",".join(f"{k / 100:.2f}" for k in range(1, 100) if k != 50),
    "--out", "calibration.csv",
]

if __name__ == "__main__":
    extra = sys.argv[1:] or DEFAULTS
    sys.exit(main(["calibration"] + extra))
