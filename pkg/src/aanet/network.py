"""Layer-based reverse-mode autodiff and the anti-aliased residual network builder.

Each primitive layer records what it needs during ``forward`` (the tape) and
consumes it in ``backward``. Containers replay their children in reverse.

The builder follows the four-group partition of a ResNet:

1. initial layers (stem convolution and max-pool),
2. residual-block convolutions without subsampling,
3. residual-block convolutions with subsampling,
4. strided 1x1 skip projections.

Each group gets a :class:`~aanet.antialias.Variant` and a
:class:`~aanet.antialias.BlurSpec` through :class:`PlacementConfig`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from .activations import Activation, activate, activation_grad
from .antialias import BlurSpec, Variant, variant_plan
from .errors import ArgumentError, ConfigError, DimensionError
from .tensor import (
    PaddingMode,
    as_tensor,
    conv2d,
    conv2d_input_grad,
    conv2d_kernel_grad,
    depthwise_conv2d,
    max_pool,
    max_pool_input_grad,
    subsample,
)

BN_MOMENTUM = 0.9
BN_EPS = 1e-5


# ---------------------------------------------------------------------------
# layers
# ---------------------------------------------------------------------------


class Layer:
    kind = "layer"
    #: rate reduction applied by this layer; >1 marks a subsampling site
    stride = 1

    def __init__(self, name: str = ""):
        self.name = name
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}
        self.buffers: dict[str, np.ndarray] = {}
        self._cache = None

    def run(self, x, train: bool, hook=None):
        if hook is not None:
            hook(self, x)
        return self.forward(x, train)

    def forward(self, x, train: bool):
        raise NotImplementedError

    def backward(self, g):
        raise NotImplementedError

    def dense(self, x):
        """The signal this layer subsamples, before subsampling."""
        return x

    def primitives(self):
        yield self

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


class Conv2d(Layer):
    kind = "conv"

    def __init__(self, in_ch, out_ch, k, stride=1, padding=PaddingMode.ZERO, *, rng, name=""):
        super().__init__(name)
        self.stride = stride
        self.padding = PaddingMode(padding)
        self.pad_amount = (k - 1) // 2
        std = np.sqrt(2.0 / (in_ch * k * k))
        self.params["weight"] = rng.normal(0.0, std, size=(out_ch, in_ch, k, k))

    def forward(self, x, train):
        self._cache = x
        return conv2d(x, self.params["weight"], self.stride, self.padding, self.pad_amount)

    def backward(self, g):
        x = self._cache
        w = self.params["weight"]
        self.grads["weight"] = conv2d_kernel_grad(g, x, w.shape, self.stride, self.padding, self.pad_amount)
        return conv2d_input_grad(g, w, x.shape, self.stride, self.padding, self.pad_amount)

    def dense(self, x):
        return conv2d(x, self.params["weight"], 1, self.padding, self.pad_amount)


class Blur(Layer):
    """Fixed depthwise binomial blur; holds no parameters."""

    kind = "blur"

    def __init__(self, spec: BlurSpec, name=""):
        super().__init__(name)
        self.spec = spec

    def forward(self, x, train):
        self._cache = x.shape
        if self.spec.k == 1:
            return x.copy()
        return depthwise_conv2d(x, self.spec.kernel2d, self.spec.padding, self.spec.pad_amount)

    def backward(self, g):
        if self.spec.k == 1:
            return g.copy()
        n, c, h, w = self._cache
        planes = g.reshape(n * c, 1, h, w)
        k2 = self.spec.kernel2d[None, None]
        gx = conv2d_input_grad(planes, k2, (n * c, 1, h, w), 1, self.spec.padding, self.spec.pad_amount)
        return gx.reshape(n, c, h, w)


class Subsample(Layer):
    kind = "subsample"

    def __init__(self, stride, name=""):
        super().__init__(name)
        self.stride = stride

    def forward(self, x, train):
        self._cache = x.shape
        return subsample(x, self.stride)

    def backward(self, g):
        out = np.zeros(self._cache)
        out[:, :, :: self.stride, :: self.stride] = g
        return out


class MaxPool(Layer):
    kind = "maxpool"

    def __init__(self, window=3, stride=2, pad_amount=1, padding=PaddingMode.ZERO, name=""):
        super().__init__(name)
        self.window = window
        self.stride = stride
        self.pad_amount = pad_amount
        self.padding = PaddingMode(padding)

    def forward(self, x, train):
        self._cache = x
        return max_pool(x, self.window, self.stride, self.padding, self.pad_amount)

    def backward(self, g):
        return max_pool_input_grad(g, self._cache, self.window, self.stride, self.padding, self.pad_amount)

    def dense(self, x):
        return max_pool(x, self.window, 1, self.padding, self.pad_amount)


class BatchNorm(Layer):
    kind = "batchnorm"

    def __init__(self, channels, name=""):
        super().__init__(name)
        self.params["gamma"] = np.ones(channels)
        self.params["beta"] = np.zeros(channels)
        self.buffers["running_mean"] = np.zeros(channels)
        self.buffers["running_var"] = np.ones(channels)

    def forward(self, x, train):
        gamma = self.params["gamma"][None, :, None, None]
        beta = self.params["beta"][None, :, None, None]
        if train:
            mean = x.mean(axis=(0, 2, 3))
            var = x.var(axis=(0, 2, 3))
            m = x.shape[0] * x.shape[2] * x.shape[3]
            unbiased = var * m / (m - 1) if m > 1 else var
            self.buffers["running_mean"] = BN_MOMENTUM * self.buffers["running_mean"] + (1 - BN_MOMENTUM) * mean
            self.buffers["running_var"] = BN_MOMENTUM * self.buffers["running_var"] + (1 - BN_MOMENTUM) * unbiased
        else:
            mean = self.buffers["running_mean"]
            var = self.buffers["running_var"]
        inv_std = 1.0 / np.sqrt(var + BN_EPS)
        xhat = (x - mean[None, :, None, None]) * inv_std[None, :, None, None]
        self._cache = (xhat, inv_std, train)
        return gamma * xhat + beta

    def backward(self, g):
        xhat, inv_std, train = self._cache
        self.grads["gamma"] = (g * xhat).sum(axis=(0, 2, 3))
        self.grads["beta"] = g.sum(axis=(0, 2, 3))
        dxhat = g * self.params["gamma"][None, :, None, None]
        scale = inv_std[None, :, None, None]
        if not train:
            return dxhat * scale
        m = g.shape[0] * g.shape[2] * g.shape[3]
        s1 = dxhat.sum(axis=(0, 2, 3), keepdims=True)
        s2 = (dxhat * xhat).sum(axis=(0, 2, 3), keepdims=True)
        return scale / m * (m * dxhat - s1 - xhat * s2)


class Act(Layer):
    kind = "activation"

    def __init__(self, activation: Activation | str, name=""):
        super().__init__(name)
        self.activation = Activation(activation)

    def forward(self, x, train):
        self._cache = x
        return activate(self.activation, x)

    def backward(self, g):
        return g * activation_grad(self.activation, self._cache)


class GlobalAvgPool(Layer):
    kind = "gap"

    def forward(self, x, train):
        self._cache = x.shape
        return x.mean(axis=(2, 3))

    def backward(self, g):
        n, c, h, w = self._cache
        return np.broadcast_to(g[:, :, None, None] / (h * w), (n, c, h, w)).copy()


class Linear(Layer):
    kind = "linear"

    def __init__(self, in_features, out_features, *, rng, name=""):
        super().__init__(name)
        std = np.sqrt(2.0 / in_features)
        self.params["weight"] = rng.normal(0.0, std, size=(out_features, in_features))
        self.params["bias"] = np.zeros(out_features)

    def forward(self, x, train):
        self._cache = x
        return x @ self.params["weight"].T + self.params["bias"]

    def backward(self, g):
        self.grads["weight"] = g.T @ self._cache
        self.grads["bias"] = g.sum(axis=0)
        return g @ self.params["weight"]


class Sequential(Layer):
    kind = "sequential"

    def __init__(self, layers=(), name=""):
        super().__init__(name)
        self.layers = list(layers)

    def run(self, x, train, hook=None):
        for layer in self.layers:
            x = layer.run(x, train, hook)
        return x

    def forward(self, x, train):
        return self.run(x, train)

    def backward(self, g):
        for layer in reversed(self.layers):
            g = layer.backward(g)
        return g

    def primitives(self):
        for layer in self.layers:
            yield from layer.primitives()


class ResidualBlock(Layer):
    """``act(main(x) + skip(x))``; ``skip`` of None is the identity."""

    kind = "residual"

    def __init__(self, main: Sequential, skip: Sequential | None, act: Act, name=""):
        super().__init__(name)
        self.main = main
        self.skip = skip
        self.act = act

    def run(self, x, train, hook=None):
        y = self.main.run(x, train, hook)
        s = x if self.skip is None else self.skip.run(x, train, hook)
        if y.shape != s.shape:
            raise DimensionError(f"{self.name}: main path {y.shape} vs skip {s.shape}")
        return self.act.run(y + s, train, hook)

    def forward(self, x, train):
        return self.run(x, train)

    def backward(self, g):
        g = self.act.backward(g)
        gx = self.main.backward(g)
        return gx + (g if self.skip is None else self.skip.backward(g))

    def primitives(self):
        yield from self.main.primitives()
        if self.skip is not None:
            yield from self.skip.primitives()
        yield self.act


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupPlacement:
    variant: Variant = Variant.NONE
    blur: BlurSpec = field(default_factory=BlurSpec)

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))


GROUPS = ("initial_conv", "block_conv_unstrided", "block_conv_strided", "skip_strided")


@dataclass(frozen=True)
class PlacementConfig:
    initial_conv: GroupPlacement = field(default_factory=GroupPlacement)
    block_conv_unstrided: GroupPlacement = field(default_factory=GroupPlacement)
    block_conv_strided: GroupPlacement = field(default_factory=GroupPlacement)
    skip_strided: GroupPlacement = field(default_factory=GroupPlacement)
    maxpool_blur: bool = False
    maxpool_blur_spec: BlurSpec = field(default_factory=BlurSpec)
    activation: Activation = Activation.RELU
    conv1_stride: int = 2

    def __post_init__(self):
        object.__setattr__(self, "activation", Activation(self.activation))
        if self.conv1_stride not in (1, 2):
            raise ConfigError(f"conv1_stride must be 1 or 2, got {self.conv1_stride}")
        if self.skip_strided.variant is Variant.ERF:
            raise ConfigError("erf is invalid on strided skip connections (1x1 kernels)")

    @classmethod
    def baseline(cls, activation=Activation.RELU) -> "PlacementConfig":
        return cls(activation=activation)

    @classmethod
    def best_model(cls, k: int = 3, padding=PaddingMode.REFLECT) -> "PlacementConfig":
        """Blur after strided block convs and strided skips, blurred max-pool, swish."""
        spec = BlurSpec(k, padding)
        after = GroupPlacement(Variant.BLUR_AFTER, spec)
        return cls(
            block_conv_strided=after,
            skip_strided=after,
            maxpool_blur=True,
            maxpool_blur_spec=spec,
            activation=Activation.SWISH,
        )

    def to_dict(self) -> dict:
        d = {g: {"variant": getattr(self, g).variant.value, "blur": getattr(self, g).blur.to_dict()} for g in GROUPS}
        d.update(
            maxpool_blur=self.maxpool_blur,
            maxpool_blur_spec=self.maxpool_blur_spec.to_dict(),
            activation=self.activation.value,
            conv1_stride=self.conv1_stride,
        )
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PlacementConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown placement keys: {sorted(unknown)}")
        kw = {}
        try:
            for g in GROUPS:
                if g in d:
                    gd = dict(d[g])
                    extra = set(gd) - {"variant", "blur"}
                    if extra:
                        raise ConfigError(f"unknown keys in {g}: {sorted(extra)}")
                    kw[g] = GroupPlacement(Variant(gd.get("variant", "none")), BlurSpec.from_dict(gd.get("blur", {})))
            if "maxpool_blur" in d:
                kw["maxpool_blur"] = bool(d["maxpool_blur"])
            if "maxpool_blur_spec" in d:
                kw["maxpool_blur_spec"] = BlurSpec.from_dict(d["maxpool_blur_spec"])
            if "activation" in d:
                kw["activation"] = Activation(d["activation"])
            if "conv1_stride" in d:
                kw["conv1_stride"] = int(d["conv1_stride"])
            return cls(**kw)
        except (ValueError, TypeError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class ArchSpec:
    """Desk-scale basic-block ResNet skeleton.

    The first stage keeps resolution, every later stage halves it once.
    With ``strided=False`` no stage, stem or pool subsamples at all.
    """

    stages: tuple = ((16, 2), (32, 2), (64, 2))
    input_shape: tuple = (3, 32, 32)
    num_classes: int = 10
    padding: PaddingMode = PaddingMode.ZERO
    stem_pool: bool = True
    strided: bool = True

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(tuple(int(v) for v in s) for s in self.stages))
        object.__setattr__(self, "input_shape", tuple(int(v) for v in self.input_shape))
        object.__setattr__(self, "padding", PaddingMode(self.padding))
        if not self.stages or any(c < 1 or b < 1 for c, b in self.stages):
            raise ConfigError(f"stages must be non-empty (channels, blocks) pairs, got {self.stages}")
        if len(self.input_shape) != 3:
            raise ConfigError(f"input_shape must be (C, H, W), got {self.input_shape}")
        if self.num_classes < 1:
            raise ConfigError("num_classes must be positive")

    def to_dict(self) -> dict:
        return {
            "stages": [list(s) for s in self.stages],
            "input_shape": list(self.input_shape),
            "num_classes": self.num_classes,
            "padding": self.padding.value,
            "stem_pool": self.stem_pool,
            "strided": self.strided,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArchSpec":
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown arch keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except (ValueError, TypeError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# builder
# ---------------------------------------------------------------------------


def build_unit(
    variant: Variant | str,
    in_ch: int,
    out_ch: int,
    kernel_size: int,
    stride: int,
    spec: BlurSpec,
    *,
    rng,
    tail=(),
    conv_padding=PaddingMode.ZERO,
    name: str = "unit",
) -> Sequential:
    """One trainable convolution wrapped by a placement variant.

    ``tail`` holds the layers that stand in for the plan's activation stage
    (typically batch-norm then activation, or batch-norm alone when the
    activation follows a residual add).
    """
    layers = []
    for stage in variant_plan(variant, stride, kernel_size):
        idx = len(layers)
        if stage[0] == "conv":
            layers.append(Conv2d(in_ch, out_ch, kernel_size, stage[1], conv_padding, rng=rng, name=f"{name}.conv"))
        elif stage[0] == "blur":
            layers.append(Blur(spec, name=f"{name}.blur{idx}"))
        elif stage[0] == "subsample":
            layers.append(Subsample(stage[1], name=f"{name}.sub{idx}"))
        else:
            layers.extend(tail)
    return Sequential(layers, name=name)


class LayerGraph:
    """A built network: ``head(gap(body(x)))`` plus parameter bookkeeping."""

    def __init__(self, arch: ArchSpec, placement: PlacementConfig, body: Sequential, head: Linear, seed: int):
        self.arch = arch
        self.placement = placement
        self.body = body
        self.pool = GlobalAvgPool(name="gap")
        self.head = head
        self.seed = seed
        self.mode = "train"
        self.velocity: dict[str, np.ndarray] = {}

    # -- structure ---------------------------------------------------------

    def primitives(self):
        yield from self.body.primitives()
        yield self.pool
        yield self.head

    def named_parameters(self) -> dict[str, np.ndarray]:
        return {f"{l.name}.{k}": v for l in self.primitives() for k, v in l.params.items()}

    def named_buffers(self) -> dict[str, np.ndarray]:
        return {f"{l.name}.{k}": v for l in self.primitives() for k, v in l.buffers.items()}

    def gradients(self) -> dict[str, np.ndarray]:
        return {f"{l.name}.{k}": v for l in self.primitives() for k, v in l.grads.items()}

    def parameter_count(self) -> int:
        return int(sum(v.size for v in self.named_parameters().values()))

    def state_dict(self) -> dict[str, np.ndarray]:
        return {**self.named_parameters(), **self.named_buffers()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        for layer in self.primitives():
            for store in (layer.params, layer.buffers):
                for key, value in store.items():
                    full = f"{layer.name}.{key}"
                    if full not in state:
                        raise KeyError(f"missing tensor {full!r}")
                    arr = np.asarray(state[full], dtype=np.float64)
                    if arr.shape != value.shape:
                        raise DimensionError(f"{full}: expected {value.shape}, got {arr.shape}")
                    store[key] = arr.copy()

    def describe(self) -> list[tuple[str, str]]:
        return [(l.name, l.kind) for l in self.primitives()]

    def train(self) -> "LayerGraph":
        self.mode = "train"
        return self

    def eval(self) -> "LayerGraph":
        self.mode = "eval"
        return self

    # -- computation -------------------------------------------------------

    def _check_input(self, batch):
        x = as_tensor(batch)
        if x.shape[1:] != self.arch.input_shape:
            raise DimensionError(f"expected inputs of shape (N, *{self.arch.input_shape}), got {x.shape}")
        return x

    def features(self, batch, hook=None) -> np.ndarray:
        """Pre-classifier (global-pooled) features."""
        x = self._check_input(batch)
        return self.pool.run(self.body.run(x, self.mode == "train", hook), self.mode == "train")

    def forward(self, batch, hook=None) -> np.ndarray:
        return self.head.run(self.features(batch, hook), self.mode == "train")

    __call__ = forward

    def backward(self, grad_logits: np.ndarray) -> np.ndarray:
        g = self.head.backward(grad_logits)
        g = self.pool.backward(g)
        return self.body.backward(g)


def build_network(arch: ArchSpec, placement: PlacementConfig, seed: int = 0) -> LayerGraph:
    """Instantiate ``arch`` with anti-aliasing installed per ``placement``.

    Parameters are drawn in a fixed traversal order from a generator seeded
    with ``seed`` so identical seeds give bitwise-identical networks.
    """
    if placement.skip_strided.variant is Variant.ERF:
        raise ConfigError("erf is invalid on strided skip connections (1x1 kernels)")
    if placement.block_conv_unstrided.variant is Variant.ERF:
        raise ConfigError("erf needs subsampling; it cannot be used on unstrided block convolutions")
    rng = np.random.default_rng(seed)
    act = placement.activation
    pad_mode = arch.padding
    in_ch = arch.input_shape[0]
    width = arch.stages[0][0]

    def unit(group: GroupPlacement, prefix, cin, cout, k, stride, with_act=True):
        if stride == 1 and group.variant is Variant.ERF:
            raise ConfigError(f"{prefix}: erf needs stride > 1")
        tail = [BatchNorm(cout, name=f"{prefix}.bn")]
        if with_act:
            tail.append(Act(act, name=f"{prefix}.act"))
        return build_unit(
            group.variant, cin, cout, k, stride, group.blur,
            rng=rng, tail=tail, conv_padding=pad_mode, name=prefix,
        )

    conv1_stride = placement.conv1_stride if arch.strided else 1
    layers: list[Layer] = [unit(placement.initial_conv, "stem", in_ch, width, 3, conv1_stride)]
    if arch.stem_pool and arch.strided:
        if placement.maxpool_blur:
            layers += [
                MaxPool(3, 1, 1, name="stem.maxpool"),
                Blur(placement.maxpool_blur_spec, name="stem.maxpool_blur"),
                Subsample(2, name="stem.maxpool_sub"),
            ]
        else:
            layers.append(MaxPool(3, 2, 1, name="stem.maxpool"))

    cin = width
    for si, (cout, blocks) in enumerate(arch.stages):
        for bi in range(blocks):
            stride = 2 if (si > 0 and bi == 0 and arch.strided) else 1
            prefix = f"stage{si + 1}.block{bi}"
            g1 = placement.block_conv_strided if stride > 1 else placement.block_conv_unstrided
            main = Sequential(
                [
                    unit(g1, f"{prefix}.conv1", cin, cout, 3, stride),
                    unit(placement.block_conv_unstrided, f"{prefix}.conv2", cout, cout, 3, 1, with_act=False),
                ],
                name=f"{prefix}.main",
            )
            skip = None
            if stride > 1 or cin != cout:
                group = placement.skip_strided if stride > 1 else GroupPlacement()
                skip = unit(group, f"{prefix}.skip", cin, cout, 1, stride, with_act=False)
            layers.append(ResidualBlock(main, skip, Act(act, name=f"{prefix}.act"), name=prefix))
            cin = cout

    body = Sequential(layers, name="body")
    head = Linear(cin, arch.num_classes, rng=rng, name="head")
    return LayerGraph(arch, placement, body, head, seed)


# ---------------------------------------------------------------------------
# training primitives
# ---------------------------------------------------------------------------


def softmax_cross_entropy(logits: np.ndarray, labels) -> tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient with respect to ``logits``."""
    labels = np.asarray(labels, dtype=np.int64)
    n, c = logits.shape
    if labels.shape != (n,):
        raise DimensionError(f"expected {n} labels, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= c):
        raise ArgumentError(f"labels must lie in [0, {c}), got range [{labels.min()}, {labels.max()}]")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_p = shifted - log_z
    loss = -log_p[np.arange(n), labels].mean()
    grad = np.exp(log_p)
    grad[np.arange(n), labels] -= 1.0
    return float(loss), grad / n


def loss_and_backward(net: LayerGraph, batch, labels) -> tuple[float, dict[str, np.ndarray]]:
    """Train-mode forward, mean softmax cross-entropy, full backward pass."""
    if net.mode != "train":
        raise ArgumentError("loss_and_backward needs a network in train mode")
    logits = net.forward(batch)
    loss, g = softmax_cross_entropy(logits, labels)
    net.backward(g)
    return loss, net.gradients()


def sgd_step(net: LayerGraph, lr: float, momentum: float = 0.0) -> LayerGraph:
    """In-place momentum SGD: ``v = momentum * v + g; p -= lr * v``."""
    if lr < 0:
        raise ArgumentError(f"learning rate must be >= 0, got {lr}")
    for layer in net.primitives():
        for key, p in layer.params.items():
            if key not in layer.grads:
                raise ArgumentError(f"no gradient for {layer.name}.{key}; run loss_and_backward first")
            full = f"{layer.name}.{key}"
            v = momentum * net.velocity.get(full, 0.0) + layer.grads[key]
            net.velocity[full] = v
            layer.params[key] = p - lr * v
    return net


# ---------------------------------------------------------------------------
# receptive-field probe
# ---------------------------------------------------------------------------


def receptive_field_probe(fragment: Layer, input_shape, output_position) -> int:
    """Side length of the input region that influences one output sample.

    All convolution weights of a copy of ``fragment`` are replaced by ones
    and the input by ones, so no cancellation can hide a path. A unit
    gradient is back-propagated from channel 0 at ``output_position`` and the
    bounding box of nonzero input gradients is measured.
    """
    import copy

    probe = copy.deepcopy(fragment)
    for layer in probe.primitives():
        if isinstance(layer, Conv2d):
            layer.params["weight"] = np.ones_like(layer.params["weight"])
    x = np.ones(tuple(input_shape))
    out = probe.run(x, train=False)
    g = np.zeros_like(out)
    y, xpos = output_position
    g[0, 0, y, xpos] = 1.0
    gx = probe.backward(g)
    rows, cols = np.nonzero(np.abs(gx).sum(axis=(0, 1)) > 0)
    if rows.size == 0:
        return 0
    return int(max(rows.max() - rows.min() + 1, cols.max() - cols.min() + 1))
