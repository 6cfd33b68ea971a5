"""Pointwise activations with their derivatives."""

from __future__ import annotations

import enum

import numpy as np
from scipy.special import erf, expit

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


class Activation(str, enum.Enum):
    RELU = "relu"
    SWISH = "swish"
    GELU = "gelu"

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return activate(self, x)

    def derivative(self, x: np.ndarray) -> np.ndarray:
        return activation_grad(self, x)


def activate(kind: Activation | str, x: np.ndarray) -> np.ndarray:
    kind = Activation(kind)
    if kind is Activation.RELU:
        return np.maximum(x, 0.0)
    if kind is Activation.SWISH:
        # beta fixed at 1
        return x * expit(x)
    return x * 0.5 * (1.0 + erf(x * _INV_SQRT2))


def activation_grad(kind: Activation | str, x: np.ndarray) -> np.ndarray:
    """Elementwise derivative evaluated at the pre-activation ``x``."""
    kind = Activation(kind)
    if kind is Activation.RELU:
        return (x > 0).astype(np.float64)
    if kind is Activation.SWISH:
        s = expit(x)
        return s * (1.0 + x * (1.0 - s))
    cdf = 0.5 * (1.0 + erf(x * _INV_SQRT2))
    return cdf + x * _INV_SQRT2PI * np.exp(-0.5 * x * x)
