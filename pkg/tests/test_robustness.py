import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aanet.errors import ArgumentError, DataFormatError, DegenerateBaselineError
from aanet.robustness import (
    CORRUPTIONS,
    SEVERITY_TABLE,
    CorruptionReport,
    ErrorTable,
    Severity,
    corrupt,
    corruption_error,
    corruption_report,
    disk_kernel,
    mean_corruption_error,
)


def table(errs, clean=0.1, name="gaussian_noise"):
    return ErrorTable({name: list(errs)}, clean)


@pytest.fixture
def image(rng):
    return rng.random((2, 1, 8, 8))


def test_zero_noise_is_identity(image):
    out = corrupt(image, "gaussian_noise", Severity(1, 0.0), seed=3)
    np.testing.assert_array_equal(out, image)


def test_unit_contrast_is_identity(image):
    np.testing.assert_array_equal(corrupt(image, "contrast", Severity(1, 1.0)), image)


def test_pixelate_hand_case():
    x = np.array([[0.0, 0.2, 0.4, 0.4],
                  [0.2, 0.2, 0.8, 0.0],
                  [1.0, 1.0, 0.1, 0.3],
                  [0.6, 0.6, 0.5, 0.3]])
    expected = np.array([[0.15, 0.15, 0.4, 0.4],
                         [0.15, 0.15, 0.4, 0.4],
                         [0.8, 0.8, 0.3, 0.3],
                         [0.8, 0.8, 0.3, 0.3]])
    np.testing.assert_allclose(corrupt(x, "pixelate", 1), expected, atol=1e-15)


def test_unknown_corruption():
    with pytest.raises(ArgumentError):
        corrupt(np.zeros((4, 4)), "fog", 1)
    with pytest.raises(ArgumentError):
        Severity.of("contrast", 6)


def test_out_of_range_image_rejected():
    with pytest.raises(ArgumentError):
        corrupt(np.full((4, 4), 1.5), "brightness", 1)


@pytest.mark.parametrize("name", CORRUPTIONS)
def test_severity_parameters_strictly_monotone(name):
    values = SEVERITY_TABLE[name]
    assert len(values) == 5
    diffs = np.diff(values)
    # contrast and shot noise get harsher as their parameter falls
    assert np.all(diffs < 0) or np.all(diffs > 0)


@pytest.mark.parametrize("name", CORRUPTIONS)
@pytest.mark.parametrize("level", [1, 5])
def test_corrupt_is_deterministic_and_clipped(image, name, level):
    a = corrupt(image, name, level, seed=11)
    b = corrupt(image, name, level, seed=11)
    np.testing.assert_array_equal(a, b)
    assert a.shape == image.shape
    assert a.min() >= 0.0 and a.max() <= 1.0


@pytest.mark.parametrize("name", ["gaussian_noise", "shot_noise", "impulse_noise"])
def test_noise_depends_on_seed(image, name):
    assert not np.array_equal(corrupt(image, name, 3, seed=1), corrupt(image, name, 3, seed=2))


def test_defocus_kernel_is_normalised_disk():
    k = disk_kernel(2)
    assert k.shape == (5, 5)
    assert abs(k.sum() - 1.0) < 1e-15
    assert k[0, 0] == 0 and k[2, 0] > 0


def test_defocus_keeps_constant_images():
    np.testing.assert_allclose(corrupt(np.full((6, 6), 0.4), "defocus_blur", 4), 0.4, atol=1e-15)


def test_brightness_shifts_and_clips():
    out = corrupt(np.array([[0.0, 0.9]]).repeat(2, 0), "brightness", 5)
    np.testing.assert_allclose(out[0], [0.3, 1.0])


def test_ce_of_table_against_itself():
    t = table([0.4, 0.5, 0.6, 0.7, 0.8])
    assert corruption_error(t, t, "gaussian_noise") == 100.0


def test_ce_of_half_errors():
    base = table([0.4, 0.5, 0.6, 0.7, 0.8])
    half = table([0.2, 0.25, 0.3, 0.35, 0.4])
    assert abs(corruption_error(half, base, "gaussian_noise") - 50.0) < 1e-9


def test_ce_direct_summation_fixture():
    f = table([0.2, 0.3, 0.4, 0.5, 0.6])
    base = table([0.4, 0.5, 0.6, 0.7, 0.8])
    assert abs(corruption_error(f, base, "gaussian_noise") - 100 * 2.0 / 3.0) < 1e-9


def test_ce_degenerate_baseline():
    with pytest.raises(DegenerateBaselineError):
        corruption_error(table([0.1] * 5), table([0.0] * 5), "gaussian_noise")


def test_ce_missing_corruption():
    with pytest.raises(ArgumentError):
        corruption_error(table([0.1] * 5), table([0.1] * 5, name="contrast"), "gaussian_noise")


@settings(max_examples=50, deadline=None)
@given(
    f=st.lists(st.floats(0.0, 0.5), min_size=5, max_size=5),
    base=st.lists(st.floats(0.01, 0.5), min_size=5, max_size=5),
    alpha=st.floats(0.1, 2.0),
)
def test_ce_is_scale_consistent(f, base, alpha):
    ce = corruption_error(table(f), table(base), "gaussian_noise")
    scaled = corruption_error(table([alpha * v for v in f]), table([alpha * v for v in base]), "gaussian_noise")
    assert abs(ce - scaled) <= 1e-9 * max(1.0, ce)


def test_mce_means():
    assert mean_corruption_error([100.0, 100.0]) == 100.0
    assert mean_corruption_error({"a": 50.0, "b": 150.0}) == 100.0
    with pytest.raises(ArgumentError):
        mean_corruption_error([])


def test_report_of_baseline_against_itself(rng):
    t = ErrorTable({c: list(rng.uniform(0.1, 0.9, 5)) for c in CORRUPTIONS}, 0.05)
    rep = corruption_report(t, t)
    assert rep.mce == 100.0
    assert set(rep.ce) == set(CORRUPTIONS)
    assert set(rep.to_dict()) == {"ce", "mce", "clean_error"}


def test_error_table_validation():
    with pytest.raises(DataFormatError):
        ErrorTable({"contrast": [0.1] * 4})
    with pytest.raises(DataFormatError):
        ErrorTable({"contrast": [0.1, 0.2, 0.3, 0.4, 1.2]})


def test_error_table_round_trips(rng):
    t = ErrorTable({c: list(rng.random(5)) for c in CORRUPTIONS[:3]}, 0.123456789)
    assert ErrorTable.from_dict(t.to_dict()) == t
    assert ErrorTable.from_csv(t.to_csv()) == t
    assert t.to_csv().splitlines()[0] == "corruption,severity,error"
    rep = corruption_report(t, t)
    assert CorruptionReport.from_dict(rep.to_dict()) == rep


def test_error_table_csv_rejects_missing_severity():
    text = "corruption,severity,error\ncontrast,1,0.1\ncontrast,2,0.2\n"
    with pytest.raises(DataFormatError):
        ErrorTable.from_csv(text)
