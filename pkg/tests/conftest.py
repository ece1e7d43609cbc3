import gzip
import os

import numpy as np
import pytest
from hypothesis import settings

from alphaloss.mnist import IdxImages, dump_idx_images, dump_idx_labels

settings.register_profile("suite", deadline=None, max_examples=100)
settings.load_profile("suite")

MNIST_ENV = "ALPHALOSS_MNIST_DIR"


def find_real_mnist():
    """Directory with the four official IDX files, or None."""
    candidates = [os.environ.get(MNIST_ENV), os.path.join(os.path.dirname(__file__), "data", "mnist")]
    for directory in candidates:
        if not directory or not os.path.isdir(directory):
            continue
        names = set(os.listdir(directory))
        needed = ["train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                  "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"]
        if all(n in names or n + ".gz" in names for n in needed):
            return directory
    return None


@pytest.fixture(scope="session")
def real_mnist_dir():
    directory = find_real_mnist()
    if directory is None:
        pytest.skip(f"real MNIST IDX files not available (set {MNIST_ENV})")
    return directory


def _render_digit(rng, digit, rows, cols):
    img = rng.integers(0, 30, size=(rows, cols), dtype=np.int64)
    if digit == 1:
        img[4:24, 13:16] += rng.integers(180, 250)
    elif digit == 7:
        img[3:6, 6:22] += rng.integers(180, 250)
        for i in range(16):
            img[6 + i, max(0, 18 - i) : max(0, 18 - i) + 3] += 170
    else:
        img[8:20, 8:20] += rng.integers(60, 160)
    return np.clip(img, 0, 255).astype(np.uint8).ravel()


def synthetic_corpus(train_counts, test_counts, seed=1234, rows=28, cols=28):
    """A fake MNIST-shaped corpus with learnable 1/7 patterns.

    The first two pixels of every image carry its corpus index (test images
    offset by 0x8000) so that split membership can be traced exactly.
    """
    rng = np.random.default_rng(seed)

    def build(counts, tag_offset):
        digits = np.concatenate([np.full(c, d, dtype=np.uint8) for d, c in counts.items()])
        digits = digits[rng.permutation(digits.size)]
        pixels = np.empty((digits.size, rows * cols), dtype=np.uint8)
        for i, digit in enumerate(digits):
            pixels[i] = _render_digit(rng, int(digit), rows, cols)
            tag = i + tag_offset
            pixels[i, 0] = tag // 256
            pixels[i, 1] = tag % 256
        return IdxImages(count=digits.size, rows=rows, cols=cols, pixels=pixels), digits

    train_images, train_labels = build(train_counts, 0)
    test_images, test_labels = build(test_counts, 0x8000)
    return train_images, train_labels, test_images, test_labels


FULL_TRAIN_COUNTS = {1: 6742, 7: 6265, 3: 500, 0: 493}
FULL_TEST_COUNTS = {1: 1135, 7: 1028, 3: 100, 0: 100}


@pytest.fixture(scope="session")
def synthetic_full_corpus():
    return synthetic_corpus(FULL_TRAIN_COUNTS, FULL_TEST_COUNTS)


@pytest.fixture(scope="session")
def synthetic_mnist_dir(tmp_path_factory, synthetic_full_corpus):
    """The synthetic corpus written as IDX files (labels gzipped)."""
    train_images, train_labels, test_images, test_labels = synthetic_full_corpus
    directory = tmp_path_factory.mktemp("mnist")
    (directory / "train-images-idx3-ubyte").write_bytes(dump_idx_images(train_images))
    (directory / "train-labels-idx1-ubyte.gz").write_bytes(gzip.compress(dump_idx_labels(train_labels)))
    (directory / "t10k-images-idx3-ubyte").write_bytes(dump_idx_images(test_images))
    (directory / "t10k-labels-idx1-ubyte.gz").write_bytes(gzip.compress(dump_idx_labels(test_labels)))
    return str(directory)
