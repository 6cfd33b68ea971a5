"""Dense NCHW tensor primitives: padding, convolution, pooling, subsampling, DFT.

Tensors are plain ``numpy.ndarray`` objects of dtype float64 and rank 4
(batch, channels, height, width). Every function here is pure.
"""

from __future__ import annotations

import enum

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ArgumentError, DimensionError

#: Index kept by :func:`subsample` along each spatial axis.
SUBSAMPLE_PHASE = 0


class PaddingMode(str, enum.Enum):
    ZERO = "zero"
    CIRCULAR = "circular"
    REFLECT = "reflect"


_NP_MODE = {
    PaddingMode.ZERO: "constant",
    PaddingMode.CIRCULAR: "wrap",
    PaddingMode.REFLECT: "reflect",
}


def as_tensor(x) -> np.ndarray:
    """Return ``x`` as a float64 rank-4 array, raising DimensionError otherwise."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 4:
        raise DimensionError(f"expected a rank-4 NCHW tensor, got shape {arr.shape}")
    return arr


def _check_stride(stride: int) -> None:
    if int(stride) != stride or stride < 1:
        raise ArgumentError(f"stride must be a positive integer, got {stride!r}")


def pad(x: np.ndarray, mode: PaddingMode | str, amount: int) -> np.ndarray:
    """Pad both spatial axes by ``amount`` samples on each side.

    ``reflect`` mirrors without repeating the border sample and needs
    ``amount < axis length``; ``circular`` wraps modulo the axis length.
    """
    x = as_tensor(x)
    mode = PaddingMode(mode)
    if amount < 0:
        raise ArgumentError(f"pad amount must be >= 0, got {amount}")
    if amount == 0:
        return x.copy()
    if mode is PaddingMode.REFLECT and amount >= min(x.shape[2], x.shape[3]):
        raise ArgumentError(
            f"reflect padding of {amount} needs spatial dims > {amount}, got {x.shape[2:]}"
        )
    if mode is PaddingMode.CIRCULAR and 0 in x.shape[2:]:
        raise ArgumentError("cannot wrap an empty axis")
    width = ((0, 0), (0, 0), (amount, amount), (amount, amount))
    return np.pad(x, width, mode=_NP_MODE[mode])


def _source_index(n: int, mode: PaddingMode, amount: int) -> np.ndarray:
    """Source index for every padded position along one axis, -1 for zero fill."""
    idx = np.arange(n)
    if mode is PaddingMode.ZERO:
        return np.pad(idx, amount, mode="constant", constant_values=-1)
    return np.pad(idx, amount, mode=_NP_MODE[mode])


def pad_adjoint(g: np.ndarray, mode: PaddingMode | str, amount: int) -> np.ndarray:
    """Adjoint of :func:`pad`: fold gradients of padded samples back onto their sources."""
    mode = PaddingMode(mode)
    if amount == 0:
        return g.copy()
    n, c, hp, wp = g.shape
    h, w = hp - 2 * amount, wp - 2 * amount
    rows = _source_index(h, mode, amount)
    cols = _source_index(w, mode, amount)
    out_rows = np.zeros((n, c, h, wp))
    keep = rows >= 0
    np.add.at(out_rows, (slice(None), slice(None), rows[keep]), g[:, :, keep])
    out = np.zeros((n, c, h, w))
    keep = cols >= 0
    np.add.at(out, (slice(None), slice(None), slice(None), cols[keep]), out_rows[..., keep])
    return out


def output_size(size: int, window: int, stride: int, amount: int) -> int:
    return (size + 2 * amount - window) // stride + 1


def conv2d(
    x: np.ndarray,
    kernel: np.ndarray,
    stride: int = 1,
    padding: PaddingMode | str = PaddingMode.ZERO,
    pad_amount: int = 0,
) -> np.ndarray:
    """Cross-correlate ``x`` (N, C, H, W) with ``kernel`` (O, C, kH, kW).

    No kernel flip. Output spatial size is ``(H + 2*pad - kH) // stride + 1``.
    """
    x = as_tensor(x)
    kernel = as_tensor(kernel)
    _check_stride(stride)
    if x.shape[1] != kernel.shape[1]:
        raise DimensionError(
            f"input has {x.shape[1]} channels but kernel expects {kernel.shape[1]}"
        )
    kh, kw = kernel.shape[2:]
    xp = pad(x, padding, pad_amount)
    if kh > xp.shape[2] or kw > xp.shape[3]:
        raise DimensionError(f"kernel {kh}x{kw} larger than padded input {xp.shape[2:]}")
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    # (N, C, Ho, Wo, kh, kw) x (O, C, kh, kw) -> (N, Ho, Wo, O)
    out = np.tensordot(windows, kernel, axes=([1, 4, 5], [1, 2, 3]))
    return np.ascontiguousarray(out.transpose(0, 3, 1, 2))


def depthwise_conv2d(
    x: np.ndarray,
    kernel2d: np.ndarray,
    padding: PaddingMode | str,
    pad_amount: int,
) -> np.ndarray:
    """Apply one 2-D kernel independently to every channel, stride 1."""
    x = as_tensor(x)
    n, c, h, w = x.shape
    planes = x.reshape(n * c, 1, h, w)
    out = conv2d(planes, kernel2d[None, None], 1, padding, pad_amount)
    return out.reshape(n, c, out.shape[2], out.shape[3])


def subsample(x: np.ndarray, stride: int) -> np.ndarray:
    """Keep samples at indices 0, stride, 2*stride, ... on both spatial axes."""
    x = as_tensor(x)
    _check_stride(stride)
    return x[:, :, SUBSAMPLE_PHASE::stride, SUBSAMPLE_PHASE::stride].copy()


def _pair(v, what: str) -> tuple[int, int]:
    pair = (v, v) if np.ndim(v) == 0 else tuple(v)
    if len(pair) != 2 or any(int(p) != p or p < 1 for p in pair):
        raise ArgumentError(f"{what} must be a positive integer or a pair of them, got {v!r}")
    return int(pair[0]), int(pair[1])


def max_pool(
    x: np.ndarray,
    window: int | tuple[int, int],
    stride: int | tuple[int, int] = 1,
    padding: PaddingMode | str = PaddingMode.ZERO,
    pad_amount: int = 0,
) -> np.ndarray:
    """Per-window maximum with the same output-shape rule as :func:`conv2d`.

    ``window`` and ``stride`` may be given per axis as ``(rows, cols)``.
    """
    x = as_tensor(x)
    wh, ww = _pair(window, "window")
    sh, sw = _pair(stride, "stride")
    xp = pad(x, padding, pad_amount)
    if wh > xp.shape[2] or ww > xp.shape[3]:
        raise DimensionError(f"window {wh}x{ww} larger than padded input {xp.shape[2:]}")
    windows = sliding_window_view(xp, (wh, ww), axis=(2, 3))[:, :, ::sh, ::sw]
    return windows.max(axis=(4, 5))


def _dft_matrix(n: int, inverse: bool = False) -> np.ndarray:
    k = np.arange(n)
    # reduce k*m modulo n before the exponential to keep phases exact
    phase = (np.outer(k, k) % n) * (2.0 * np.pi / n)
    sign = 1.0 if inverse else -1.0
    return np.exp(sign * 1j * phase)


def dft(signal) -> np.ndarray:
    """1-D DFT by direct summation: ``X[k] = sum_n x[n] exp(-2 pi i k n / N)``."""
    x = np.asarray(signal, dtype=np.complex128)
    if x.ndim != 1 or x.size == 0:
        raise DimensionError(f"expected a non-empty 1-D signal, got shape {x.shape}")
    return _dft_matrix(x.size) @ x


def idft(spectrum) -> np.ndarray:
    X = np.asarray(spectrum, dtype=np.complex128)
    if X.ndim != 1 or X.size == 0:
        raise DimensionError(f"expected a non-empty 1-D spectrum, got shape {X.shape}")
    return (_dft_matrix(X.size, inverse=True) @ X) / X.size


def dft2(plane) -> np.ndarray:
    """2-D DFT of one H x W plane in standard (unshifted) frequency order.

    Returns a complex128 array; bin ``[k, l]`` holds frequency k on rows and
    l on columns.
    """
    x = np.asarray(plane, dtype=np.complex128)
    if x.ndim != 2 or 0 in x.shape:
        raise DimensionError(f"expected a non-empty H x W plane, got shape {x.shape}")
    h, w = x.shape
    return _dft_matrix(h) @ x @ _dft_matrix(w).T


def idft2(spectrum) -> np.ndarray:
    X = np.asarray(spectrum, dtype=np.complex128)
    if X.ndim != 2 or 0 in X.shape:
        raise DimensionError(f"expected a non-empty H x W spectrum, got shape {X.shape}")
    h, w = X.shape
    return _dft_matrix(h, inverse=True) @ X @ _dft_matrix(w, inverse=True).T / (h * w)


def conv2d_input_grad(
    grad_out: np.ndarray,
    kernel: np.ndarray,
    input_shape: tuple,
    stride: int = 1,
    padding: PaddingMode | str = PaddingMode.ZERO,
    pad_amount: int = 0,
) -> np.ndarray:
    """Adjoint of :func:`conv2d` with respect to its input (transposed convolution)."""
    n, c, h, w = input_shape
    _, _, kh, kw = kernel.shape
    _, _, ho, wo = grad_out.shape
    gxp = np.zeros((n, c, h + 2 * pad_amount, w + 2 * pad_amount))
    for i in range(kh):
        for j in range(kw):
            # (N, O, Ho, Wo) x (O, C) -> (N, Ho, Wo, C)
            contrib = np.tensordot(grad_out, kernel[:, :, i, j], axes=([1], [0]))
            gxp[:, :, i : i + stride * (ho - 1) + 1 : stride, j : j + stride * (wo - 1) + 1 : stride] += (
                contrib.transpose(0, 3, 1, 2)
            )
    return pad_adjoint(gxp, padding, pad_amount)


def conv2d_kernel_grad(
    grad_out: np.ndarray,
    x: np.ndarray,
    kernel_shape: tuple,
    stride: int = 1,
    padding: PaddingMode | str = PaddingMode.ZERO,
    pad_amount: int = 0,
) -> np.ndarray:
    """Gradient of ``sum(grad_out * conv2d(x, K))`` with respect to ``K``."""
    kh, kw = kernel_shape[2:]
    xp = pad(x, padding, pad_amount)
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    # (N, O, Ho, Wo) x (N, C, Ho, Wo, kh, kw) -> (O, C, kh, kw)
    return np.tensordot(grad_out, windows, axes=([0, 2, 3], [0, 2, 3]))


def max_pool_input_grad(
    grad_out: np.ndarray,
    x: np.ndarray,
    window: int | tuple[int, int],
    stride: int | tuple[int, int] = 1,
    padding: PaddingMode | str = PaddingMode.ZERO,
    pad_amount: int = 0,
) -> np.ndarray:
    """Route each output gradient to the first maximal element of its window."""
    wh, ww = _pair(window, "window")
    sh, sw = _pair(stride, "stride")
    xp = pad(x, padding, pad_amount)
    windows = sliding_window_view(xp, (wh, ww), axis=(2, 3))[:, :, ::sh, ::sw]
    n, c, ho, wo = windows.shape[:4]
    arg = windows.reshape(n, c, ho, wo, wh * ww).argmax(axis=-1)
    gxp = np.zeros_like(xp)
    for i in range(wh):
        for j in range(ww):
            hit = arg == i * ww + j
            gxp[:, :, i : i + sh * (ho - 1) + 1 : sh, j : j + sw * (wo - 1) + 1 : sw] += np.where(hit, grad_out, 0.0)
    return pad_adjoint(gxp, padding, pad_amount)
