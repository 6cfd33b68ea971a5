"""Datasets: synthetic generators and the IDX file format."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataFormatError

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


@dataclass
class Dataset:
    images: np.ndarray  # (N, C, H, W) in [0, 1]
    labels: np.ndarray  # (N,) int64
    num_classes: int

    def __len__(self):
        return len(self.labels)

    def split(self, n_first: int) -> tuple["Dataset", "Dataset"]:
        return (
            Dataset(self.images[:n_first], self.labels[:n_first], self.num_classes),
            Dataset(self.images[n_first:], self.labels[n_first:], self.num_classes),
        )


# ---------------------------------------------------------------------------
# synthetic generators
# ---------------------------------------------------------------------------


def _balanced_labels(size: int, num_classes: int, rng) -> np.ndarray:
    labels = np.arange(size) % num_classes
    return rng.permutation(labels)


def make_stripes(size: int, num_classes: int = 4, image_size: int = 16, seed: int = 0,
                 freq_range=(0.3, 0.45), noise: float = 0.1) -> Dataset:
    """Oriented high-frequency gratings; the label is the orientation bin.

    Orientations are ``pi * c / num_classes`` plus a small jitter. Spatial
    frequencies (cycles per pixel) are drawn from ``freq_range``, which sits
    above the 0.25 cycles/pixel limit of stride-2 subsampling, so most of
    each image's AC energy aliases under plain striding.
    """
    if num_classes < 2:
        raise ConfigError("stripes needs at least 2 classes")
    rng = np.random.default_rng(seed)
    labels = _balanced_labels(size, num_classes, rng)
    yy, xx = np.mgrid[0:image_size, 0:image_size].astype(np.float64)
    half_bin = np.pi / num_classes / 2
    images = np.empty((size, 1, image_size, image_size))
    for i, c in enumerate(labels):
        theta = np.pi * c / num_classes + rng.uniform(-0.3, 0.3) * half_bin
        f = rng.uniform(*freq_range)
        phase = rng.uniform(0, 2 * np.pi)
        amp = rng.uniform(0.8, 1.0)
        wave = np.cos(2 * np.pi * f * (xx * np.cos(theta) + yy * np.sin(theta)) + phase)
        # squared raised cosine: thin bright lines on a dark ground, so the mean
        # (DC) carries less energy than the grating itself
        img = amp * ((1 + wave) / 2) ** 2 + noise * rng.normal(size=wave.shape)
        images[i, 0] = np.clip(img, 0.0, 1.0)
    return Dataset(images, labels.astype(np.int64), num_classes)


def _polygon_mask(vertices: np.ndarray, image_size: int) -> np.ndarray:
    yy, xx = np.mgrid[0:image_size, 0:image_size] + 0.5
    inside = np.ones((image_size, image_size), dtype=bool)
    n = len(vertices)
    for i in range(n):
        (x0, y0), (x1, y1) = vertices[i], vertices[(i + 1) % n]
        inside &= (x1 - x0) * (yy - y0) - (y1 - y0) * (xx - x0) >= 0
    return inside


def make_shapes(size: int, num_classes: int = 4, image_size: int = 16, seed: int = 0,
                noise: float = 0.05) -> Dataset:
    """Translated, rotated regular polygons; the label selects the vertex count (3, 4, 5, ...)."""
    if num_classes < 2:
        raise ConfigError("shapes needs at least 2 classes")
    rng = np.random.default_rng(seed)
    labels = _balanced_labels(size, num_classes, rng)
    images = np.empty((size, 1, image_size, image_size))
    for i, c in enumerate(labels):
        sides = 3 + int(c)
        radius = rng.uniform(0.25, 0.4) * image_size
        cx, cy = rng.uniform(radius, image_size - radius, size=2)
        rot = rng.uniform(0, 2 * np.pi)
        ang = rot + 2 * np.pi * np.arange(sides) / sides
        verts = np.stack([cx + radius * np.cos(ang), cy + radius * np.sin(ang)], axis=1)
        mask = _polygon_mask(verts, image_size)
        img = 0.2 + 0.6 * mask + noise * rng.normal(size=mask.shape)
        images[i, 0] = np.clip(img, 0.0, 1.0)
    return Dataset(images, labels.astype(np.int64), num_classes)


GENERATORS = {"stripes": make_stripes, "shapes": make_shapes}


def make_synthetic(generator: str, size: int, num_classes: int, image_size: int, seed: int,
                   noise: float | None = None) -> Dataset:
    try:
        fn = GENERATORS[generator]
    except KeyError:
        raise ConfigError(f"unknown generator {generator!r}; choose from {sorted(GENERATORS)}") from None
    kw = {} if noise is None else {"noise": noise}
    return fn(size, num_classes=num_classes, image_size=image_size, seed=seed, **kw)


# ---------------------------------------------------------------------------
# IDX
# ---------------------------------------------------------------------------


def _read_idx(path, expected_magic: int) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 4:
        raise DataFormatError(f"{path}: file too short for an IDX header")
    (magic,) = struct.unpack(">I", raw[:4])
    if magic != expected_magic:
        raise DataFormatError(f"{path}: bad magic 0x{magic:08x}, expected 0x{expected_magic:08x}")
    ndim = magic & 0xFF
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise DataFormatError(f"{path}: truncated dimension header")
    dims = struct.unpack(f">{ndim}I", raw[4:header])
    count = int(np.prod(dims, dtype=np.int64))
    payload = raw[header:]
    if len(payload) != count:
        raise DataFormatError(f"{path}: payload has {len(payload)} bytes, header promises {count}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(dims)


def load_idx(images_path, labels_path) -> Dataset:
    """Read an IDX image/label file pair; pixels are scaled to [0, 1]."""
    images = _read_idx(images_path, IDX_IMAGES_MAGIC)
    labels = _read_idx(labels_path, IDX_LABELS_MAGIC)
    if images.shape[0] != labels.shape[0]:
        raise DataFormatError(f"{images.shape[0]} images but {labels.shape[0]} labels")
    x = images.astype(np.float64)[:, None, :, :] / 255.0
    y = labels.astype(np.int64)
    num_classes = int(y.max()) + 1 if y.size else 0
    return Dataset(x, y, num_classes)


def write_idx(images_path, labels_path, images: np.ndarray, labels: np.ndarray) -> None:
    """Write uint8 images (N, H, W) and labels (N,) as an IDX pair."""
    images = np.asarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    Path(images_path).write_bytes(
        struct.pack(">I", IDX_IMAGES_MAGIC) + struct.pack(">3I", *images.shape) + images.tobytes()
    )
    Path(labels_path).write_bytes(
        struct.pack(">I", IDX_LABELS_MAGIC) + struct.pack(">I", labels.shape[0]) + labels.tobytes()
    )
