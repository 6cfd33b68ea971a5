import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aanet.errors import ArgumentError, DimensionError
from aanet.tensor import (
    PaddingMode,
    conv2d,
    dft,
    dft2,
    idft,
    idft2,
    max_pool,
    pad,
    pad_adjoint,
    subsample,
)
from oracles import conv2d_loops, dft2_direct


def row(values):
    return np.asarray(values, dtype=float).reshape(1, 1, 1, -1)


def test_conv_identity():
    out = conv2d(np.full((1, 1, 1, 1), 5.0), np.ones((1, 1, 1, 1)))
    assert out.shape == (1, 1, 1, 1)
    assert out[0, 0, 0, 0] == 5.0


def test_conv_unit_dc_gain_keeps_constants(rng):
    k = rng.random((1, 1, 3, 3))
    k /= k.sum()
    out = conv2d(np.ones((1, 1, 4, 4)), k, 1, "circular", 1)
    np.testing.assert_allclose(out, 1.0, atol=1e-15)


def test_conv_matches_loop_oracle(rng):
    x = rng.normal(size=(1, 2, 5, 5))
    k = rng.normal(size=(3, 2, 3, 3))
    out = conv2d(x, k, 2, "zero", 1)
    ref = conv2d_loops(x, k, 2, 1)
    assert out.shape == (1, 3, 3, 3)
    assert np.max(np.abs(out - ref)) < 1e-12


@pytest.mark.parametrize("h,k,s,p", [(7, 3, 1, 0), (8, 3, 2, 1), (9, 5, 3, 2), (6, 1, 2, 0)])
def test_conv_output_shape_rule(rng, h, k, s, p):
    out = conv2d(rng.normal(size=(2, 1, h, h + 1)), rng.normal(size=(4, 1, k, k)), s, "zero", p)
    assert out.shape == (2, 4, (h + 2 * p - k) // s + 1, (h + 1 + 2 * p - k) // s + 1)


def test_conv_errors(rng):
    with pytest.raises(DimensionError):
        conv2d(rng.normal(size=(1, 2, 4, 4)), rng.normal(size=(1, 3, 3, 3)))
    with pytest.raises(ArgumentError):
        conv2d(rng.normal(size=(1, 1, 4, 4)), rng.normal(size=(1, 1, 3, 3)), stride=0)


def test_conv_is_linear_in_both_arguments(rng):
    x, y = rng.normal(size=(2, 1, 2, 6, 6))
    k, j = rng.normal(size=(2, 3, 2, 3, 3))
    a, b = 0.7, -1.3
    np.testing.assert_allclose(
        conv2d(a * x + b * y, k, 1, "circular", 1),
        a * conv2d(x, k, 1, "circular", 1) + b * conv2d(y, k, 1, "circular", 1),
        atol=1e-12,
    )
    np.testing.assert_allclose(
        conv2d(x, a * k + b * j, 2, "zero", 1),
        a * conv2d(x, k, 2, "zero", 1) + b * conv2d(x, j, 2, "zero", 1),
        atol=1e-12,
    )


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**31),
    size=st.integers(3, 12),
    k=st.sampled_from([1, 3, 5]),
    stride=st.integers(1, 4),
    mode=st.sampled_from(list(PaddingMode)),
)
def test_strided_conv_decomposes_into_dense_conv_then_subsample(seed, size, k, stride, mode):
    r = np.random.default_rng(seed)
    x = r.normal(size=(2, 2, size, size))
    kern = r.normal(size=(3, 2, k, k))
    amount = min((k - 1) // 2, size - 1)
    a = conv2d(x, kern, stride, mode, amount)
    b = subsample(conv2d(x, kern, 1, mode, amount), stride)
    assert a.shape == b.shape
    assert np.max(np.abs(a - b)) <= 1e-12


def test_circular_convolutions_commute(rng):
    x = rng.normal(size=(1, 1, 9, 9))
    a = rng.normal(size=(1, 1, 3, 3))
    b = rng.normal(size=(1, 1, 5, 5))
    ab = conv2d(conv2d(x, a, 1, "circular", 1), b, 1, "circular", 2)
    ba = conv2d(conv2d(x, b, 1, "circular", 2), a, 1, "circular", 1)
    np.testing.assert_allclose(ab, ba, atol=1e-9)


def test_max_pool_definition():
    out = max_pool(row([1, 3, 2, 4]), (1, 2), (1, 2))
    np.testing.assert_array_equal(out[0, 0, 0], [3, 4])


def test_max_pool_constant():
    out = max_pool(np.full((1, 2, 6, 6), 0.4), 3, 2)
    assert out.shape == (1, 2, 2, 2)
    assert np.all(out == 0.4)


@pytest.mark.parametrize("window,stride,amount", [(3, 2, 1), (2, 2, 0), (3, 3, 1), (5, 2, 2), (1, 3, 0)])
def test_max_pool_decomposition_is_exact(rng, window, stride, amount):
    x = rng.normal(size=(2, 3, 8, 8))
    dense = max_pool(x, window, 1, "zero", amount)
    np.testing.assert_array_equal(max_pool(x, window, stride, "zero", amount), subsample(dense, stride))


def test_max_pool_window_too_large():
    with pytest.raises(DimensionError):
        max_pool(np.zeros((1, 1, 2, 2)), 3, 1)


def test_subsample_definition(rng):
    np.testing.assert_array_equal(subsample(row(range(8)), 2)[0, 0, 0], [0, 2, 4, 6])
    x = rng.normal(size=(1, 1, 6, 6))
    np.testing.assert_array_equal(subsample(x, 1), x)
    out = subsample(x, 3)
    assert out.shape == (1, 1, 2, 2)
    np.testing.assert_array_equal(out[0, 0], [[x[0, 0, 0, 0], x[0, 0, 0, 3]], [x[0, 0, 3, 0], x[0, 0, 3, 3]]])
    with pytest.raises(ArgumentError):
        subsample(x, 0)


def _pad_row(values, mode, amount):
    # pad acts on both spatial axes; read the middle row back
    x = np.tile(np.asarray(values, dtype=float), (len(values), 1))[None, None]
    return pad(x, mode, amount)[0, 0, amount]


def test_pad_modes():
    np.testing.assert_array_equal(_pad_row([1, 2, 3], "reflect", 1), [2, 1, 2, 3, 2])
    np.testing.assert_array_equal(_pad_row([1, 2, 3], "circular", 1), [3, 1, 2, 3, 1])
    np.testing.assert_array_equal(_pad_row([1, 2, 3], "zero", 2), [0, 0, 1, 2, 3, 0, 0])


def test_pad_reflect_too_wide():
    with pytest.raises(ArgumentError):
        pad(np.zeros((1, 1, 3, 3)), "reflect", 3)


@pytest.mark.parametrize("mode", list(PaddingMode))
def test_pad_adjoint(rng, mode):
    x = rng.normal(size=(2, 1, 5, 4))
    g = rng.normal(size=(2, 1, 9, 8))
    lhs = np.sum(pad(x, mode, 2) * g)
    rhs = np.sum(x * pad_adjoint(g, mode, 2))
    assert abs(lhs - rhs) < 1e-12


def test_dft2_impulse_and_constant():
    imp = np.zeros((4, 4))
    imp[0, 0] = 1.0
    np.testing.assert_allclose(dft2(imp), np.ones((4, 4)), atol=1e-15)
    spec = dft2(np.full((3, 5), 2.5))
    assert abs(spec[0, 0] - 2.5 * 15) < 1e-12
    spec[0, 0] = 0
    assert np.max(np.abs(spec)) < 1e-12


def test_dft2_matches_direct_summation(rng):
    x = rng.normal(size=(8, 8))
    assert np.max(np.abs(dft2(x) - dft2_direct(x))) < 1e-9


def test_dft_round_trip_and_parseval(rng):
    x = rng.normal(size=(6, 10))
    X = dft2(x)
    np.testing.assert_allclose(idft2(X).real, x, atol=1e-9)
    assert np.max(np.abs(idft2(X).imag)) < 1e-9
    energy = np.sum(x**2)
    assert abs(np.sum(np.abs(X) ** 2) - x.size * energy) <= 1e-9 * x.size * energy
    s = rng.normal(size=12)
    np.testing.assert_allclose(idft(dft(s)).real, s, atol=1e-9)
