"""Experiment command line.

Five subcommands write CSV artifacts: ``train`` and ``sweep`` run the 1-vs-7
logistic-regression benchmark, ``calibration`` emits the conditional-risk
minima behind the calibration claim, ``landscape`` runs the risk-gap scaling
experiment, and ``losscurves`` tabulates the margin losses and derivatives.

Every command writes a JSON run manifest next to its primary CSV; re-running
with the manifest's flags reproduces the CSV byte for byte.  Exit codes:
0 success, 1 data errors, 2 training divergence.  CSVs are UTF-8 with LF line
endings, a header row, and floats serialized to 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .calibration import check_calibration_at
from .landscape import (
    GenerationFailed,
    SymmetricDataSpec,
    log_log_slope,
    median_gaps,
    risk_gap_experiment,
)
from .logreg import TrainConfig, TrainingDiverged, evaluate, train
from .losses import (
    Alpha,
    margin_alpha_loss,
    margin_alpha_loss_d1,
    margin_alpha_loss_d2,
    min_conditional_risk,
    optimal_classifier,
)
from .mnist import BinaryTaskSplit, IdxFormatError, build_binary_task, load_mnist_dir

MNIST_DIR_ENV = "ALPHALOSS_MNIST_DIR"

DEFAULT_SWEEP_ALPHAS = "1,1.1,1.2,1.5,2"
DEFAULT_LR_GRID = "1.0,1.3,1.9,2.0"


@dataclass(frozen=True)
class RunManifest:
    command: str
    flags: dict
    seed: int
    version: str
    started_at: str
    finished_at: str
    outputs: list


def manifest_path_for(out: str) -> str:
    return out + ".manifest.json"


def load_manifest(path: str) -> RunManifest:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return RunManifest(**raw)


def replay(manifest_path: str) -> int:
    """Re-run the command recorded in a manifest with its exact flags."""
    manifest = load_manifest(manifest_path)
    argv = [manifest.command]
    for key, value in manifest.flags.items():
        argv.extend([f"--{key}", str(value)])
    return main(argv)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Alpha):
        return "%.17g" % value.value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def _write_csv(path: str, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_manifest(command: str, flags: dict, seed: int, outputs, started: str) -> None:
    manifest = RunManifest(
        command=command,
        flags=flags,
        seed=seed,
        version=__version__,
        started_at=started,
        finished_at=_now(),
        outputs=list(outputs),
    )
    with open(manifest_path_for(outputs[0]), "w", encoding="utf-8") as fh:
        json.dump(manifest.__dict__, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _parse_alphas(text: str) -> list[Alpha]:
    return [Alpha.parse(tok) for tok in text.split(",") if tok.strip()]


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _parse_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _resolve_mnist_dir(args) -> str:
    directory = args.mnist_dir or os.environ.get(MNIST_DIR_ENV)
    if not directory:
        raise FileNotFoundError(
            f"no MNIST directory: pass --mnist-dir or set {MNIST_DIR_ENV}"
        )
    return directory


def _load_task(directory: str, seed: int) -> BinaryTaskSplit:
    images, labels, test_images, test_labels = load_mnist_dir(directory)
    return build_binary_task(images, labels, test_images, test_labels, seed)


def cmd_train(args) -> int:
    started = _now()
    directory = _resolve_mnist_dir(args)
    alpha = Alpha.parse(args.alpha)
    flags = {
        "alpha": args.alpha,
        "lr": args.lr,
        "epochs": args.epochs,
        "seed": args.seed,
        "mnist-dir": directory,
        "out": args.out,
    }
    task = _load_task(directory, args.seed)
    cfg = TrainConfig(
        alpha=alpha, learning_rate=float(args.lr), epochs=int(args.epochs), seed=int(args.seed)
    )
    report = train(cfg, task.train)
    row = (
        alpha,
        float(args.lr),
        int(args.epochs),
        int(args.seed),
        report.train_accuracy,
        evaluate(report.final_model, task.validation),
        evaluate(report.final_model, task.test),
        report.empirical_risk_trace[-1],
    )
    _write_csv(
        args.out,
        ["alpha", "lr", "epochs", "seed", "train_acc", "val_acc", "test_acc", "final_risk"],
        [row],
    )
    _write_manifest("train", flags, int(args.seed), [args.out], started)
    return 0


def cmd_sweep(args) -> int:
    started = _now()
    directory = _resolve_mnist_dir(args)
    alphas = _parse_alphas(args.alphas)
    lr_grid = _parse_floats(args.lr_grid)
    if not alphas or not lr_grid:
        raise ValueError("alphas and lr-grid must be nonempty")
    flags = {
        "alphas": args.alphas,
        "lr-grid": args.lr_grid,
        "epochs": args.epochs,
        "seed": args.seed,
        "mnist-dir": directory,
        "out": args.out,
    }
    task = _load_task(directory, args.seed)
    rows = []
    for alpha in alphas:
        best = None
        for lr in lr_grid:
            cfg = TrainConfig(
                alpha=alpha, learning_rate=lr, epochs=int(args.epochs), seed=int(args.seed)
            )
            report = train(cfg, task.train)
            val_acc = evaluate(report.final_model, task.validation)
            if best is None or val_acc > best[1]:
                best = (lr, val_acc, evaluate(report.final_model, task.test))
        rows.append((alpha, best[0], best[1], best[2]))
    _write_csv(args.out, ["alpha", "best_lr", "val_acc", "test_acc"], rows)
    _write_manifest("sweep", flags, int(args.seed), [args.out], started)
    return 0


def cmd_calibration(args) -> int:
    started = _now()
    alphas = _parse_alphas(args.alphas)
    etas = _parse_floats(args.eta_grid)
    flags = {
        "alphas": args.alphas,
        "eta-grid": args.eta_grid,
        "f-range": args.f_range,
        "grid-step": args.grid_step,
        "out": args.out,
    }
    header = [
        "alpha",
        "eta",
        "unconstrained_min",
        "constrained_min",
        "gap",
        "argmin",
        "closed_form_argmin",
        "min_cond_risk_closed_form",
    ]
    rows = []
    for alpha in alphas:
        for eta in etas:
            if eta == 0.5:
                print(f"warning: skipping eta=0.5 for alpha={alpha} (excluded)", file=sys.stderr)
                continue
            rep = check_calibration_at(alpha, eta, float(args.f_range), float(args.grid_step))
            rows.append(
                (
                    alpha,
                    eta,
                    rep.unconstrained_min,
                    rep.constrained_min,
                    rep.gap,
                    rep.unconstrained_argmin,
                    optimal_classifier(alpha, eta),
                    min_conditional_risk(alpha, eta),
                )
            )
    _write_csv(args.out, header, rows)
    _write_manifest("calibration", flags, 0, [args.out], started)
    return 0


def _summary_path(out: str) -> str:
    stem, ext = os.path.splitext(out)
    return f"{stem}_summary{ext or '.csv'}"


def cmd_landscape(args) -> int:
    started = _now()
    alphas = _parse_alphas(args.alphas)
    sizes = _parse_ints(args.ns)
    flags = {
        "alphas": args.alphas,
        "ns": args.ns,
        "trials": args.trials,
        "dim": args.dim,
        "radius": args.radius,
        "mean-norm": args.mean_norm,
        "noise": args.noise,
        "holdout-n": args.holdout_n,
        "lr": args.lr,
        "epochs": args.epochs,
        "seed": args.seed,
        "out": args.out,
    }
    spec = SymmetricDataSpec.along_first_axis(
        dim=int(args.dim),
        radius=float(args.radius),
        mean_norm=float(args.mean_norm),
        noise_scale=float(args.noise),
        seed=int(args.seed),
    )
    template = TrainConfig(
        alpha=alphas[0],
        learning_rate=float(args.lr),
        epochs=int(args.epochs),
        seed=int(args.seed),
        projection=True,
    )
    result = risk_gap_experiment(
        spec, alphas, sizes, int(args.trials), int(args.holdout_n), template
    )
    trial_rows = [
        (rec.alpha, rec.n, rec.trial, rec.gap, rec.hoeffding_term, rec.zero_one_risk)
        for rec in result.records
    ]
    _write_csv(
        args.out,
        ["alpha", "n", "trial", "gap", "hoeffding_eps", "zero_one_test_risk"],
        trial_rows,
    )
    summary_rows = []
    for alpha in alphas:
        medians = median_gaps(result.records, alpha)
        slope = (
            log_log_slope(list(medians), list(medians.values())) if len(medians) >= 2 else None
        )
        n_diverged = sum(1 for a, _, _ in result.diverged if a == alpha.value)
        for n, med in medians.items():
            summary_rows.append((alpha, n, med, slope, n_diverged))
    summary = _summary_path(args.out)
    _write_csv(summary, ["alpha", "n", "median_gap", "loglog_slope", "diverged"], summary_rows)
    _write_manifest("landscape", flags, int(args.seed), [args.out, summary], started)
    return 0


def cmd_losscurves(args) -> int:
    started = _now()
    alphas = _parse_alphas(args.alphas)
    steps = int(args.steps)
    if steps < 2:
        raise ValueError("steps must be at least 2")
    flags = {
        "alphas": args.alphas,
        "z-min": args.z_min,
        "z-max": args.z_max,
        "steps": args.steps,
        "out": args.out,
    }
    grid = np.linspace(float(args.z_min), float(args.z_max), steps)
    rows = []
    for alpha in alphas:
        for z in grid:
            z = float(z)
            rows.append(
                (
                    alpha,
                    z,
                    margin_alpha_loss(alpha, z),
                    margin_alpha_loss_d1(alpha, z),
                    margin_alpha_loss_d2(alpha, z),
                )
            )
    _write_csv(args.out, ["alpha", "z", "loss", "d1", "d2"], rows)
    _write_manifest("losscurves", flags, 0, [args.out], started)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alphaloss", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train one model on the MNIST 1-vs-7 task")
    p_train.add_argument("--alpha", required=True, help="loss parameter; 'inf' allowed")
    p_train.add_argument("--lr", type=float, required=True)
    p_train.add_argument("--epochs", type=int, default=200)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--mnist-dir", default=None)
    p_train.add_argument("--out", required=True)
    p_train.set_defaults(func=cmd_train)

    p_sweep = sub.add_parser("sweep", help="tune the learning rate per alpha on validation")
    p_sweep.add_argument("--alphas", default=DEFAULT_SWEEP_ALPHAS)
    p_sweep.add_argument("--lr-grid", default=DEFAULT_LR_GRID)
    p_sweep.add_argument("--epochs", type=int, default=200)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--mnist-dir", default=None)
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_cal = sub.add_parser("calibration", help="conditional-risk minima per (alpha, eta)")
    p_cal.add_argument("--alphas", default="1,1.5,2,inf")
    p_cal.add_argument("--eta-grid", default="0.1,0.2,0.3,0.4,0.6,0.7,0.8,0.9")
    p_cal.add_argument("--f-range", type=float, default=50.0)
    p_cal.add_argument("--grid-step", type=float, default=1e-3)
    p_cal.add_argument("--out", required=True)
    p_cal.set_defaults(func=cmd_calibration)

    p_land = sub.add_parser("landscape", help="risk-gap scaling experiment")
    p_land.add_argument("--alphas", default="2")
    p_land.add_argument("--ns", default="100,1000,10000")
    p_land.add_argument("--trials", type=int, default=20)
    p_land.add_argument("--dim", type=int, default=5)
    p_land.add_argument("--radius", type=float, default=1.0)
    p_land.add_argument("--mean-norm", type=float, default=0.8)
    p_land.add_argument("--noise", type=float, default=0.14)
    p_land.add_argument("--holdout-n", type=int, default=100000)
    p_land.add_argument("--lr", type=float, default=1.0)
    p_land.add_argument("--epochs", type=int, default=300)
    p_land.add_argument("--seed", type=int, default=0)
    p_land.add_argument("--out", required=True)
    p_land.set_defaults(func=cmd_landscape)

    p_curves = sub.add_parser("losscurves", help="margin loss and derivatives on a z grid")
    p_curves.add_argument("--alphas", default="1,1.5,2,inf")
    p_curves.add_argument("--z-min", type=float, default=-10.0)
    p_curves.add_argument("--z-max", type=float, default=10.0)
    p_curves.add_argument("--steps", type=int, default=201)
    p_curves.add_argument("--out", required=True)
    p_curves.set_defaults(func=cmd_losscurves)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TrainingDiverged as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (IdxFormatError, GenerationFailed, FileNotFoundError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
