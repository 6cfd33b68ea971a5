"""Aliasing diagnostics: above-Nyquist energy, spectral folding, shift consistency."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ArgumentError, DimensionError
from .tensor import PaddingMode, as_tensor, dft, dft2, pad


@dataclass(frozen=True)
class AliasReport:
    total_energy: float
    above_nyquist_energy: float
    fraction: float
    stride: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ConsistencyReport:
    pairs_evaluated: int
    agreement_rate: float
    mean_feature_cosine: float

    def to_dict(self) -> dict:
        return asdict(self)


def _check_divides(shape, stride):
    if int(stride) != stride or stride < 2:
        raise ArgumentError(f"stride must be an integer >= 2, got {stride!r}")
    if any(n % stride for n in shape):
        raise ArgumentError(f"stride {stride} does not divide dims {tuple(shape)}")


def above_nyquist_mask(h: int, w: int, stride: int) -> np.ndarray:
    """Bins whose wrapped frequency on either axis exceeds ``n / (2 * stride)``."""
    _check_divides((h, w), stride)

    def axis(n):
        k = np.arange(n)
        return np.minimum(k, n - k) > n / (2 * stride)

    rows, cols = axis(h), axis(w)
    return rows[:, None] | cols[None, :]


def _report(total, above, stride) -> AliasReport:
    fraction = above / total if total > 0 else 0.0
    return AliasReport(float(total), float(above), float(min(max(fraction, 0.0), 1.0)), int(stride))


def aliased_energy(plane, stride: int) -> AliasReport:
    """Spectral energy that subsampling by ``stride`` would fold onto lower bins."""
    x = np.asarray(plane, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"expected an H x W plane, got shape {x.shape}")
    mask = above_nyquist_mask(*x.shape, stride)
    power = np.abs(dft2(x)) ** 2
    return _report(power.sum(), power[mask].sum(), stride)


def aliased_energy_tensor(x, stride: int) -> AliasReport:
    """Energies of :func:`aliased_energy` summed over every plane of an NCHW tensor."""
    x = as_tensor(x)
    n, c, h, w = x.shape
    mask = above_nyquist_mask(h, w, stride)
    planes = x.reshape(n * c, h, w)
    # batched FFT; dft2 is the direct-summation reference for single planes
    power = np.abs(np.fft.fft2(planes)) ** 2
    return _report(power.sum(), power[:, mask].sum(), stride)


def folding_spectrum(signal, stride: int) -> np.ndarray:
    """Predicted DFT of ``signal[::stride]`` from the DFT of ``signal``.

    ``X_sub[k] = (1 / s) * sum_m X[k + m * N / s]``: every band above the new
    Nyquist limit adds onto a low-frequency bin.
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError(f"expected a 1-D signal, got shape {x.shape}")
    if int(stride) != stride or stride < 1 or x.size % stride:
        raise ArgumentError(f"stride {stride!r} does not divide signal length {x.size}")
    X = dft(x)
    m = x.size // stride
    return X.reshape(stride, m).sum(axis=0) / stride


def subsampling_profile(net, batch) -> list[tuple[str, AliasReport]]:
    """AliasReport for the input of every subsampling site, in execution order.

    For strided convolutions and pools the dense (stride-1) output is the
    signal being subsampled.
    """
    sites = []

    def hook(layer, x):
        if layer.stride > 1:
            dense = layer.dense(x)
            sites.append((layer.name, aliased_energy_tensor(dense, layer.stride)))

    mode = net.mode
    net.eval()
    try:
        net.forward(batch, hook=hook)
    finally:
        net.mode = mode
    return sites


def shift(x, dy: int, dx: int, padding: PaddingMode | str = PaddingMode.CIRCULAR) -> np.ndarray:
    """Translate the spatial content by ``(dy, dx)``; vacated samples come from ``padding``."""
    x = as_tensor(x)
    amount = max(abs(dy), abs(dx))
    if amount == 0:
        return x.copy()
    xp = pad(x, padding, amount)
    h, w = x.shape[2:]
    top, left = amount - dy, amount - dx
    return xp[:, :, top : top + h, left : left + w].copy()


def _cosine(a, b):
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    dot = (a * b).sum(axis=1)
    both_zero = (na == 0) & (nb == 0)
    denom = np.where(na * nb > 0, na * nb, 1.0)
    return np.where(both_zero, 1.0, dot / denom)


def shift_consistency(
    net,
    inputs,
    max_shift: int = 1,
    padding: PaddingMode | str = PaddingMode.CIRCULAR,
    shifts=None,
) -> ConsistencyReport:
    """Prediction agreement and feature cosine between inputs and shifted copies.

    By default every ``(dy, dx)`` with ``1 <= dy, dx <= max_shift`` is used;
    ``shifts`` overrides that list.
    """
    if shifts is None:
        if max_shift < 1:
            raise ArgumentError(f"max_shift must be >= 1, got {max_shift}")
        shifts = [(dy, dx) for dy in range(1, max_shift + 1) for dx in range(1, max_shift + 1)]
    shifts = list(shifts)
    x = as_tensor(inputs)
    if x.shape[0] == 0 or not shifts:
        raise DimensionError("shift_consistency needs at least one input and one shift")
    mode = net.mode
    net.eval()
    try:
        feats = net.features(x)
        preds = net.head.forward(feats, False).argmax(axis=1)
        agree, cos = [], []
        for dy, dx in shifts:
            f2 = net.features(shift(x, dy, dx, padding))
            p2 = net.head.forward(f2, False).argmax(axis=1)
            agree.append(preds == p2)
            cos.append(_cosine(feats, f2))
    finally:
        net.mode = mode
    agree = np.concatenate(agree)
    cos = np.concatenate(cos)
    return ConsistencyReport(int(agree.size), float(agree.mean()), float(np.clip(cos.mean(), -1.0, 1.0)))
