"""Fixed binomial blur filters and the downsampling placement variants.

Every variant wraps one trainable convolution. The order of its stages is
described by :func:`variant_plan`; :func:`apply_variant` executes a plan
functionally and the network builder turns the same plan into layers, so
both paths share a single definition of each variant.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import comb

import numpy as np

from .activations import Activation, activate
from .errors import ArgumentError, ConfigError
from .tensor import PaddingMode, as_tensor, conv2d, depthwise_conv2d, subsample

BLUR_SIZES = (1, 3, 5, 7)


class Variant(str, enum.Enum):
    NONE = "none"
    BLUR_BEFORE = "blur_before"
    BLUR_AFTER = "blur_after"
    BLUR_BOTH = "blur_both"
    ERF = "erf"
    BLURPOOL_POST_ACTIVATION = "blurpool_post_activation"


def binomial_kernel(k: int) -> np.ndarray:
    """Row ``k - 1`` of Pascal's triangle normalised to unit sum.

    >>> binomial_kernel(3)
    array([0.25, 0.5 , 0.25])
    """
    if not isinstance(k, (int, np.integer)) or k not in BLUR_SIZES:
        raise ArgumentError(f"blur size must be one of {BLUR_SIZES}, got {k!r}")
    row = np.array([comb(k - 1, i) for i in range(k)], dtype=np.float64)
    return row / 2.0 ** (k - 1)


def frequency_response(k: int, omega) -> np.ndarray:
    """Magnitude response ``((1 + cos w) / 2) ** ((k - 1) / 2)`` of the 1-D kernel."""
    omega = np.asarray(omega, dtype=np.float64)
    return ((1.0 + np.cos(omega)) / 2.0) ** ((k - 1) / 2)


@dataclass(frozen=True)
class BlurSpec:
    k: int = 3
    padding: PaddingMode = PaddingMode.REFLECT

    def __post_init__(self):
        binomial_kernel(self.k)
        object.__setattr__(self, "padding", PaddingMode(self.padding))

    @property
    def kernel1d(self) -> np.ndarray:
        return binomial_kernel(self.k)

    @property
    def kernel2d(self) -> np.ndarray:
        row = self.kernel1d
        return np.outer(row, row)

    @property
    def pad_amount(self) -> int:
        return (self.k - 1) // 2

    def to_dict(self) -> dict:
        return {"k": self.k, "padding": self.padding.value}

    @classmethod
    def from_dict(cls, d: dict) -> "BlurSpec":
        unknown = set(d) - {"k", "padding"}
        if unknown:
            raise ConfigError(f"unknown blur keys: {sorted(unknown)}")
        return cls(k=d.get("k", 3), padding=PaddingMode(d.get("padding", "reflect")))


def blur(x: np.ndarray, spec: BlurSpec) -> np.ndarray:
    """Channel-wise blur with the outer-product binomial kernel; keeps spatial size."""
    x = as_tensor(x)
    if spec.k == 1:
        return x.copy()
    return depthwise_conv2d(x, spec.kernel2d, spec.padding, spec.pad_amount)


def variant_plan(variant: Variant | str, stride: int, kernel_size: int) -> tuple[tuple, ...]:
    """Ordered stages of one downsampling unit.

    Stages are ``("blur",)``, ``("conv", stride)``, ``("subsample", stride)``
    and ``("act",)``. Subsample stages are dropped when ``stride == 1``.
    """
    variant = Variant(variant)
    if int(stride) != stride or stride < 1:
        raise ArgumentError(f"stride must be a positive integer, got {stride!r}")
    if variant is Variant.ERF:
        if kernel_size <= 1:
            raise ArgumentError("erf variant needs a trainable kernel with spatial size > 1")
        if stride <= 1:
            raise ArgumentError("erf variant needs stride > 1")
    sub = (("subsample", stride),) if stride > 1 else ()
    plans = {
        Variant.NONE: (("conv", stride), ("act",)),
        Variant.BLUR_BEFORE: (("blur",), ("conv", stride), ("act",)),
        Variant.BLUR_AFTER: (("conv", 1), ("blur",), *sub, ("act",)),
        Variant.BLUR_BOTH: (("blur",), ("conv", 1), ("blur",), *sub, ("act",)),
        Variant.ERF: (("blur",), *sub, ("conv", 1), ("act",)),
        Variant.BLURPOOL_POST_ACTIVATION: (("conv", 1), ("act",), ("blur",), *sub),
    }
    return plans[variant]


def apply_variant(
    variant: Variant | str,
    trainable_kernel: np.ndarray,
    stride: int,
    spec: BlurSpec,
    activation: Activation | str,
    x: np.ndarray,
    conv_padding: PaddingMode | str = PaddingMode.ZERO,
) -> np.ndarray:
    """Run ``x`` through one anti-aliased downsampling unit.

    The trainable convolution uses "same" padding of ``(kH - 1) // 2``.
    """
    kernel = as_tensor(trainable_kernel)
    kh = kernel.shape[2]
    out = as_tensor(x)
    for stage in variant_plan(variant, stride, max(kernel.shape[2:])):
        if stage[0] == "blur":
            out = blur(out, spec)
        elif stage[0] == "conv":
            out = conv2d(out, kernel, stage[1], conv_padding, (kh - 1) // 2)
        elif stage[0] == "subsample":
            out = subsample(out, stage[1])
        else:
            out = activate(activation, out)
    return out
