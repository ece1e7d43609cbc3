"""IDX-format MNIST ingestion and the binary 1-versus-7 task.

The IDX container is big-endian: images files carry magic 2051 then count,
rows, cols as u32 and raw u8 pixels; label files carry magic 2049, count, and
one u8 digit per item.  Parsing is bit-exact (serializing back reproduces the
input) and gzip inputs are detected by their two-byte prefix.

The binary task keeps digits 1 (label +1) and 7 (label -1), normalizes pixels
to [0, 1], appends a constant bias feature, subsamples to a 12,500-row
balanced training pool and a 2,050-row balanced test set, and splits the pool
into 11,500 training and 1,000 validation rows with both classes balanced.
"""

from __future__ import annotations

import gzip
import os
import struct
from dataclasses import dataclass

import numpy as np

from .logreg import LabeledDataset, row_norms

IMAGES_MAGIC = 2051
LABELS_MAGIC = 2049

POSITIVE_DIGIT = 1
NEGATIVE_DIGIT = 7
TRAIN_POOL_PER_CLASS = 6250
TEST_PER_CLASS = 1025
VALIDATION_PER_CLASS = 500

TRAIN_FILES = ("train-images-idx3-ubyte", "train-labels-idx1-ubyte")
TEST_FILES = ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte")


class IdxFormatError(ValueError):
    """Malformed IDX payload: bad magic, truncation, trailing bytes, bad label."""


class InsufficientClassError(ValueError):
    """Not enough samples of a digit to reach the required split sizes."""


@dataclass(frozen=True)
class IdxImages:
    count: int
    rows: int
    cols: int
    pixels: np.ndarray  # (count, rows*cols) uint8

    def __post_init__(self):
        if self.count < 0 or self.rows < 1 or self.cols < 1:
            raise ValueError("count must be >= 0 and rows/cols positive")
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.shape != (self.count, self.rows * self.cols):
            raise ValueError(f"pixels shape {px.shape} != ({self.count}, {self.rows * self.cols})")
        object.__setattr__(self, "pixels", px)


@dataclass(frozen=True)
class BinaryTaskSplit:
    train: LabeledDataset
    validation: LabeledDataset
    test: LabeledDataset


def load_idx_images(data: bytes) -> IdxImages:
    if len(data) < 16:
        raise IdxFormatError(f"images header needs 16 bytes, got {len(data)}")
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IMAGES_MAGIC:
        raise IdxFormatError(f"wrong magic for images: expected {IMAGES_MAGIC}, got {magic}")
    expected = 16 + count * rows * cols
    if len(data) < expected:
        raise IdxFormatError(f"truncated images payload: expected {expected} bytes, got {len(data)}")
    if len(data) > expected:
        raise IdxFormatError(f"{len(data) - expected} trailing bytes after images payload")
    pixels = np.frombuffer(data, dtype=np.uint8, offset=16).reshape(count, rows * cols).copy()
    return IdxImages(count=count, rows=rows, cols=cols, pixels=pixels)


def dump_idx_images(images: IdxImages) -> bytes:
    header = struct.pack(">IIII", IMAGES_MAGIC, images.count, images.rows, images.cols)
    return header + images.pixels.tobytes()


def load_idx_labels(data: bytes) -> np.ndarray:
    if len(data) < 8:
        raise IdxFormatError(f"labels header needs 8 bytes, got {len(data)}")
    magic, count = struct.unpack(">II", data[:8])
    if magic != LABELS_MAGIC:
        raise IdxFormatError(f"wrong magic for labels: expected {LABELS_MAGIC}, got {magic}")
    expected = 8 + count
    if len(data) < expected:
        raise IdxFormatError(f"truncated labels payload: expected {expected} bytes, got {len(data)}")
    if len(data) > expected:
        raise IdxFormatError(f"{len(data) - expected} trailing bytes after labels payload")
    labels = np.frombuffer(data, dtype=np.uint8, offset=8).copy()
    if labels.size and labels.max() > 9:
        raise IdxFormatError(f"label byte {labels.max()} outside 0..9")
    return labels


def dump_idx_labels(labels: np.ndarray) -> bytes:
    labels = np.asarray(labels, dtype=np.uint8)
    return struct.pack(">II", LABELS_MAGIC, labels.size) + labels.tobytes()


def read_idx_bytes(path: str) -> bytes:
    """Read a file, transparently decompressing gzip (0x1f 0x8b prefix)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] == b"\x1f\x8b":
        return gzip.decompress(data)
    return data


def _resolve(directory: str, name: str) -> str:
    for candidate in (name, name + ".gz"):
        path = os.path.join(directory, candidate)
        if os.path.exists(path):
            return path
    raise FileNotFoundError(f"neither {name} nor {name}.gz found in {directory}")


def load_mnist_dir(directory: str):
    """Load the four standard files; returns (images, labels, test_images, test_labels)."""
    images = load_idx_images(read_idx_bytes(_resolve(directory, TRAIN_FILES[0])))
    labels = load_idx_labels(read_idx_bytes(_resolve(directory, TRAIN_FILES[1])))
    test_images = load_idx_images(read_idx_bytes(_resolve(directory, TEST_FILES[0])))
    test_labels = load_idx_labels(read_idx_bytes(_resolve(directory, TEST_FILES[1])))
    return images, labels, test_images, test_labels


def _class_indices(labels: np.ndarray, digit: int, needed: int, what: str) -> np.ndarray:
    idx = np.flatnonzero(labels == digit)
    if idx.size < needed:
        raise InsufficientClassError(
            f"{what} has {idx.size} samples of digit {digit}, need {needed}"
        )
    return idx


def _features(images: IdxImages, indices: np.ndarray) -> np.ndarray:
    pixels = images.pixels[indices].astype(float) / 255.0
    bias = np.ones((indices.size, 1))
    return np.hstack([pixels, bias])


def build_binary_task(
    images: IdxImages,
    labels: np.ndarray,
    test_images: IdxImages,
    test_labels: np.ndarray,
    seed: int,
) -> BinaryTaskSplit:
    """Construct the balanced 1-vs-7 task from parsed MNIST train and test sets.

    Each class is subsampled (seeded, sorted-index selection) to exactly
    ``TRAIN_POOL_PER_CLASS`` pool rows and ``TEST_PER_CLASS`` test rows; a
    seeded shuffle then holds out ``VALIDATION_PER_CLASS`` rows per class.
    Identical inputs and seed reproduce the splits bit for bit.
    """
    if images.count != labels.size:
        raise ValueError(f"{images.count} train images but {labels.size} labels")
    if test_images.count != test_labels.size:
        raise ValueError(f"{test_images.count} test images but {test_labels.size} labels")

    rng = np.random.default_rng(seed)
    picks = {}
    for digit, source_labels, needed, what in (
        (POSITIVE_DIGIT, labels, TRAIN_POOL_PER_CLASS, "train set"),
        (NEGATIVE_DIGIT, labels, TRAIN_POOL_PER_CLASS, "train set"),
        (POSITIVE_DIGIT, test_labels, TEST_PER_CLASS, "test set"),
        (NEGATIVE_DIGIT, test_labels, TEST_PER_CLASS, "test set"),
    ):
        idx = _class_indices(source_labels, digit, needed, what)
        picks[(digit, what)] = np.sort(rng.choice(idx, size=needed, replace=False))

    pool_pos = _features(images, picks[(POSITIVE_DIGIT, "train set")])
    pool_neg = _features(images, picks[(NEGATIVE_DIGIT, "train set")])
    test_pos = _features(test_images, picks[(POSITIVE_DIGIT, "test set")])
    test_neg = _features(test_images, picks[(NEGATIVE_DIGIT, "test set")])

    n_train = TRAIN_POOL_PER_CLASS - VALIDATION_PER_CLASS
    perm_pos = rng.permutation(TRAIN_POOL_PER_CLASS)
    perm_neg = rng.permutation(TRAIN_POOL_PER_CLASS)

    radius = float(
        max(
            row_norms(pool_pos).max(),
            row_norms(pool_neg).max(),
            row_norms(test_pos).max(),
            row_norms(test_neg).max(),
        )
    )

    def assemble(pos: np.ndarray, neg: np.ndarray) -> LabeledDataset:
        features = np.vstack([pos, neg])
        lab = np.concatenate(
            [np.ones(pos.shape[0], dtype=np.int64), -np.ones(neg.shape[0], dtype=np.int64)]
        )
        return LabeledDataset(features=features, labels=lab, feature_radius=radius)

    return BinaryTaskSplit(
        train=assemble(pool_pos[perm_pos[:n_train]], pool_neg[perm_neg[:n_train]]),
        validation=assemble(pool_pos[perm_pos[n_train:]], pool_neg[perm_neg[n_train:]]),
        test=assemble(test_pos, test_neg),
    )
