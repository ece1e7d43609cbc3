#!/usr/bin/env python3
"""Reproduce the 1-vs-7 accuracy table: per-alpha learning-rate sweep.

Needs the four official MNIST IDX files; point ALPHALOSS_MNIST_DIR (or pass
--mnist-dir) at the directory holding them, gzipped or plain.  Arguments are
forwarded to the ``sweep`` subcommand.
"""
import sys

from alphaloss.cli import main

DEFAULTS = [
    "--alphas", "1,1.1,1.2,1.5,2",
    "--lr-grid", "1.0,1.3,1.9,2.0",
    "--epochs", "200",
    "--seed", "0",
    "--out", "mnist_table.csv",
]

if __name__ == "__main__":
    extra = sys.argv[1:] or DEFAULTS
    sys.exit(main(["sweep"] + extra))
