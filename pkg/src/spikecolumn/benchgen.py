"""Noisy-numeral benchmark: MNIST ingestion, exemplars and pattern streams."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .volley import BinaryImage, bits_to_volley, posneg_bits

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

# digit -> image number of the ten exemplars
DEFAULT_EXEMPLARS = {0: 157, 1: 9, 2: 17, 3: 51, 4: 151,
                     5: 220, 6: 63, 7: 423, 8: 344, 9: 163}
ODD_LABELS = (1, 3, 5, 7, 9)
EVEN_LABELS = (0, 2, 4, 6, 8)

UNIFORM = "uniform"
ODD_EVEN = "odd-even"

# how an exemplar "image number" is resolved against the file
INDEX_MODES = ("class0", "class1", "global0", "global1")

CHUNK = 1024


class IdxError(ValueError):
    """Base class for malformed IDX files."""


class IdxMagicError(IdxError):
    pass


class IdxTruncatedError(IdxError):
    def __init__(self, path, offset, msg):
        super().__init__(f"{path}: truncated at byte offset {offset}: {msg}")
        self.offset = offset


class IdxCountMismatchError(IdxError):
    pass


def _read_idx(path, magic: int, ndim: int) -> np.ndarray:
    path = Path(path)
    data = path.read_bytes()
    header = 4 + 4 * ndim
    if len(data) < 4:
        raise IdxTruncatedError(path, len(data), "missing magic number")
    (found,) = struct.unpack(">I", data[:4])
    if found != magic:
        raise IdxMagicError(
            f"{path}: magic number 0x{found:08x}, expected 0x{magic:08x}")
    if len(data) < header:
        raise IdxTruncatedError(path, len(data), "incomplete dimension header")
    dims = struct.unpack(f">{ndim}I", data[4:header])
    size = int(np.prod(dims))
    if len(data) < header + size:
        raise IdxTruncatedError(
            path, len(data), f"expected {header + size} bytes for dims {dims}")
    return np.frombuffer(data, dtype=np.uint8, count=size,
                         offset=header).reshape(dims)


def load_mnist_idx(images_path, labels_path):
    """Read an IDX image/label file pair.

    Returns ``(images, labels)`` with shapes (n, rows, cols) and (n,).
    """
    images = _read_idx(images_path, IMAGE_MAGIC, 3)
    labels = _read_idx(labels_path, LABEL_MAGIC, 1)
    if images.shape[0] != labels.shape[0]:
        raise IdxCountMismatchError(
            f"{images_path} has {images.shape[0]} images but "
            f"{labels_path} has {labels.shape[0]} labels")
    return images, labels


def crop_center(img, rf: int) -> np.ndarray:
    img = np.asarray(img)
    size = img.shape[0]
    if rf > size or rf < 1:
        raise ValueError(f"receptive field {rf} does not fit a {size}x{size} image")
    o = (size - rf) // 2
    return img[o:o + rf, o:o + rf]


def binarize_pixels(img, threshold: int = 128) -> BinaryImage:
    arr = np.asarray(img)
    return BinaryImage.from_array((arr >= threshold).astype(np.uint8))


def add_noise(img: BinaryImage, p: float, rng: np.random.Generator) -> BinaryImage:
    """Flip each pixel independently with probability ``p``."""
    if not 0 <= p <= 1:
        raise ValueError(f"noise probability {p} outside [0, 1]")
    flips = rng.random(img.pixels.size) < p
    return BinaryImage(img.pixels ^ flips, img.width, img.height)


@dataclass
class BaselineSet:
    images: list
    rf_size: int

    def __post_init__(self):
        if len(self.images) != 10:
            raise ValueError("a baseline set holds exactly 10 exemplars")
        for im in self.images:
            if (im.width, im.height) != (self.rf_size, self.rf_size):
                raise ValueError("exemplar size does not match rf_size")

    @property
    def bits(self) -> np.ndarray:
        return np.stack([im.pixels for im in self.images])


def resolve_exemplar(labels, digit: int, number: int, mode: str = "class0") -> int:
    """Map an exemplar image number to a record index in file order."""
    if mode not in INDEX_MODES:
        raise ValueError(f"unknown exemplar index mode {mode!r}")
    base = 1 if mode.endswith("1") else 0
    k = number - base
    if mode.startswith("class"):
        where = np.flatnonzero(np.asarray(labels) == digit)
        if not 0 <= k < where.size:
            raise IndexError(
                f"digit {digit} has {where.size} occurrences, asked for #{number}")
        return int(where[k])
    if not 0 <= k < len(labels):
        raise IndexError(f"image number {number} out of range")
    return k


def select_baselines(images, labels, pairs=None, rf: int = 8,
                     threshold: int = 128, mode: str = "class0") -> BaselineSet:
    pairs = DEFAULT_EXEMPLARS if pairs is None else pairs
    chosen = []
    for digit in range(10):
        idx = resolve_exemplar(labels, digit, pairs[digit], mode)
        chosen.append(binarize_pixels(crop_center(images[idx], rf), threshold))
    return BaselineSet(chosen, rf)


_SEGMENTS = {
    0: "abcdef", 1: "bc", 2: "abdeg", 3: "abcdg", 4: "bcfg",
    5: "acdfg", 6: "acdefg", 7: "abc", 8: "abcdefg", 9: "abcdfg",
}


def synthetic_baselines(rf: int = 8) -> BaselineSet:
    """Ten seven-segment style glyphs, for running without MNIST."""
    if rf < 5:
        raise ValueError("synthetic glyphs need rf >= 5")
    th = max(1, rf // 6)
    top, mid, bot = 0, rf // 2 - th // 2, rf - th
    left, right = 0, rf - th
    imgs = []
    for d in range(10):
        g = np.zeros((rf, rf), dtype=np.uint8)
        segs = _SEGMENTS[d]
        if "a" in segs:
            g[top:top + th, :] = 1
        if "g" in segs:
            g[mid:mid + th, :] = 1
        if "d" in segs:
            g[bot:bot + th, :] = 1
        if "f" in segs:
            g[:mid + th, left:left + th] = 1
        if "b" in segs:
            g[:mid + th, right:right + th] = 1
        if "e" in segs:
            g[mid:, left:left + th] = 1
        if "c" in segs:
            g[mid:, right:right + th] = 1
        if d == 1:
            # keep "1" distinct from "7" by a base serif
            g[bot:bot + th, rf // 2:] = 1
        imgs.append(BinaryImage.from_array(g))
    return BaselineSet(imgs, rf)


@dataclass
class StreamSpec:
    length: int = 70000
    noise_p: float = 0.30
    schedule: str = UNIFORM
    transition: int = 34916
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.noise_p <= 1:
            raise ValueError("noise_p must lie in [0, 1]")
        if self.schedule not in (UNIFORM, ODD_EVEN):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.schedule == ODD_EVEN and not 0 <= self.transition < self.length:
            raise ValueError("transition index must be inside the stream")


def _chunk_labels(rng, start, n, spec: StreamSpec) -> np.ndarray:
    if spec.schedule == UNIFORM:
        return rng.integers(0, 10, size=n)
    k = rng.integers(0, 5, size=n)
    pos = np.arange(start, start + n)
    return np.where(pos < spec.transition, 2 * k + 1, 2 * k)


def iter_chunks(baselines: BaselineSet, spec: StreamSpec):
    """Yield ``(posneg_bits, labels)`` blocks of at most CHUNK patterns."""
    rng = np.random.default_rng(spec.seed)
    base = baselines.bits
    n = base.shape[1]
    for start in range(0, spec.length, CHUNK):
        size = min(CHUNK, spec.length - start)
        labels = _chunk_labels(rng, start, size, spec)
        flips = rng.random((size, n)) < spec.noise_p
        yield posneg_bits(base[labels] ^ flips), labels


def stream_arrays(baselines: BaselineSet, spec: StreamSpec):
    """The whole stream materialized as arrays (bits, labels)."""
    parts = list(iter_chunks(baselines, spec))
    return (np.concatenate([b for b, _ in parts]),
            np.concatenate([lab for _, lab in parts]))


def gen_stream(baselines: BaselineSet, spec: StreamSpec) -> Iterator[tuple]:
    """Lazily yield ``(volley, label)`` pairs."""
    for bits, labels in iter_chunks(baselines, spec):
        for b, lab in zip(bits, labels):
            yield bits_to_volley(b), int(lab)
