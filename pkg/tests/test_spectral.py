import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aanet.errors import ArgumentError
from aanet.antialias import BlurSpec, Variant
from aanet.network import ArchSpec, GroupPlacement, PlacementConfig, build_network, build_unit
from aanet.spectral import (
    aliased_energy,
    aliased_energy_tensor,
    folding_spectrum,
    shift,
    shift_consistency,
    subsampling_profile,
)
from aanet.tensor import dft, subsample
from oracles import dft1_direct

SMALL = ArchSpec(stages=((4, 1), (8, 1)), input_shape=(1, 16, 16), num_classes=3)


def tone_plane(freq, n=8, rows=8):
    i = np.arange(n)
    return np.tile(np.cos(2 * np.pi * freq * i / n), (rows, 1))


def test_constant_plane_has_no_aliased_energy():
    rep = aliased_energy(np.full((8, 8), 0.7), 2)
    assert rep.fraction < 1e-15
    assert rep.total_energy > 0


def test_tone_above_new_nyquist_is_fully_aliased():
    rep = aliased_energy(tone_plane(3), 2)
    assert abs(rep.fraction - 1.0) < 1e-12


def test_tone_below_new_nyquist_is_not_aliased():
    assert aliased_energy(tone_plane(1), 2).fraction < 1e-12


def test_tone_at_new_nyquist_is_kept():
    # index exactly N / (2 s) is not above the limit
    assert aliased_energy(tone_plane(2), 2).fraction < 1e-12


def test_aliased_energy_rejects_bad_strides():
    with pytest.raises(ArgumentError):
        aliased_energy(np.zeros((6, 6)), 4)
    with pytest.raises(ArgumentError):
        aliased_energy(np.zeros((6, 6)), 1)


def test_tensor_form_agrees_with_plane_form(rng):
    x = rng.normal(size=(2, 3, 8, 8))
    reps = [aliased_energy(x[n, c], 2) for n in range(2) for c in range(3)]
    total = aliased_energy_tensor(x, 2)
    assert abs(total.total_energy - sum(r.total_energy for r in reps)) < 1e-9 * total.total_energy
    assert abs(total.above_nyquist_energy - sum(r.above_nyquist_energy for r in reps)) < 1e-9 * total.total_energy


def test_report_field_names():
    assert set(aliased_energy(np.ones((4, 4)), 2).to_dict()) == {
        "total_energy", "above_nyquist_energy", "fraction", "stride"}


def test_folding_of_frequency_three():
    s = np.cos(2 * np.pi * 3 * np.arange(8) / 8)
    spec = np.abs(folding_spectrum(s, 2))
    assert spec.shape == (4,)
    # 3 folds onto 1 (and its mirror bin 3); nothing at DC or at bin 2
    assert spec[0] < 1e-12 and spec[2] < 1e-12
    assert spec[1] > 0.5 and spec[3] > 0.5


def test_folding_of_constant():
    spec = folding_spectrum(np.full(12, 2.0), 3)
    assert abs(spec[0] - 8.0) < 1e-12
    assert np.max(np.abs(spec[1:])) < 1e-12


def test_folding_matches_direct_dft_of_subsampled(rng):
    s = rng.normal(size=16)
    np.testing.assert_allclose(folding_spectrum(s, 4), dft1_direct(s[::4]), atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**31), m=st.integers(1, 8), stride=st.integers(1, 5))
def test_folding_identity_property(seed, m, stride):
    s = np.random.default_rng(seed).normal(size=m * stride)
    assert np.max(np.abs(folding_spectrum(s, stride) - dft(s[::stride]))) <= 1e-9


def test_folding_rejects_non_dividing_stride():
    with pytest.raises(ArgumentError):
        folding_spectrum(np.zeros(10), 3)


def test_shift_is_circular_roll(rng):
    x = rng.normal(size=(1, 2, 5, 6))
    np.testing.assert_array_equal(shift(x, 1, 2), np.roll(x, (1, 2), axis=(2, 3)))
    np.testing.assert_array_equal(shift(x, -2, 1), np.roll(x, (-2, 1), axis=(2, 3)))


def test_constant_inputs_are_shift_consistent():
    net = build_network(SMALL, PlacementConfig.baseline(), 0).eval()
    rep = shift_consistency(net, np.full((4, 1, 16, 16), 0.3), max_shift=2)
    assert rep.agreement_rate == 1.0
    assert rep.pairs_evaluated == 4 * 4


def test_global_pooling_over_circular_stride_one_features_is_shift_invariant(rng):
    arch = ArchSpec(stages=((4, 1), (6, 1)), input_shape=(1, 12, 12), num_classes=5,
                    padding="circular", strided=False, stem_pool=False)
    net = build_network(arch, PlacementConfig.baseline(), 2).eval()
    x = rng.normal(size=(6, 1, 12, 12))
    rep = shift_consistency(net, x, max_shift=3)
    assert rep.agreement_rate == 1.0
    assert rep.mean_feature_cosine > 1 - 1e-12


def test_consistency_is_symmetric_in_the_pair(rng):
    net = build_network(SMALL, PlacementConfig.baseline(), 4).eval()
    x = rng.normal(size=(40, 1, 16, 16))
    for d in [(1, 1), (1, 2), (3, 1)]:
        fwd = shift_consistency(net, x, shifts=[d])
        back = shift_consistency(net, shift(x, *d), shifts=[(-d[0], -d[1])])
        assert fwd.agreement_rate == back.agreement_rate
        assert abs(fwd.mean_feature_cosine - back.mean_feature_cosine) < 1e-12


def test_consistency_requires_positive_max_shift(rng):
    net = build_network(SMALL, PlacementConfig.baseline(), 0)
    with pytest.raises(ArgumentError):
        shift_consistency(net, rng.normal(size=(2, 1, 16, 16)), max_shift=0)


def test_consistency_report_is_bounded(rng):
    net = build_network(SMALL, PlacementConfig.best_model(), 0)
    rep = shift_consistency(net, rng.normal(size=(5, 1, 16, 16)), max_shift=1)
    assert 0.0 <= rep.agreement_rate <= 1.0
    assert -1.0 <= rep.mean_feature_cosine <= 1.0
    assert set(rep.to_dict()) == {"pairs_evaluated", "agreement_rate", "mean_feature_cosine"}


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_blurred_stack_has_higher_feature_cosine_than_plain(rng, seed):
    # every subsampling site blurred, activation and weights unchanged
    after = GroupPlacement(Variant.BLUR_AFTER, BlurSpec(3))
    placement = PlacementConfig(initial_conv=after, block_conv_strided=after, skip_strided=after, maxpool_blur=True)
    x = rng.normal(size=(200, 1, 16, 16))
    plain = build_network(SMALL, PlacementConfig.baseline(), seed)
    blurred = build_network(SMALL, placement, seed)
    a = shift_consistency(plain, x, max_shift=1).mean_feature_cosine
    b = shift_consistency(blurred, x, max_shift=1).mean_feature_cosine
    assert b > a


def test_pointwise_strided_skip_preserves_aliased_fraction(rng):
    skip = build_unit("none", 1, 4, 1, 2, BlurSpec(3), rng=rng, tail=[])
    feeds = []
    x = rng.normal(size=(3, 1, 16, 16))
    skip.run(x, False, hook=lambda layer, inp: feeds.append(layer.dense(inp)) if layer.stride > 1 else None)
    before = aliased_energy_tensor(x, 2).fraction
    after = aliased_energy_tensor(feeds[0], 2).fraction
    assert abs(before - after) < 1e-9
    # the subsampled output is exactly the dense feed decimated
    np.testing.assert_array_equal(skip.forward(x, False), subsample(feeds[0], 2))


def test_subsampling_profile_on_baseline(rng):
    net = build_network(SMALL, PlacementConfig.baseline(), 0)
    names = [n for n, _ in subsampling_profile(net, rng.normal(size=(2, 1, 16, 16)))]
    assert names == ["stem.conv", "stem.maxpool", "stage2.block0.conv1.conv", "stage2.block0.skip.conv"]
    profile = subsampling_profile(net, rng.normal(size=(2, 1, 16, 16)))
    assert all(rep.fraction > 0 for _, rep in profile)
