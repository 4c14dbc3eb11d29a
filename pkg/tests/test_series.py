import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from flair.series import (Freq, Horizon, IngestionError, TimeSeries, detect_integer_valued,
                          positivity_shift)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("values, shift", [
    ([-4.0, 0.0, 2.0], 5.0),
    ([3.0, 7.0], 1.0),
    ([0.0, 0.0, 0.0], 1.0),
])
def test_shift_examples(values, shift):
    s = positivity_shift(values)
    assert s.shift == shift
    assert s.values.min() >= 1.0


def test_zero_series_shifts_to_ones():
    np.testing.assert_array_equal(positivity_shift([0.0, 0.0, 0.0]).values, [1.0, 1.0, 1.0])


@pytest.mark.parametrize("values, expected", [
    ([1.0, 2.0, 5.0], True),
    ([1.0, 2.5], False),
    ([3.0000000001], True),
    ([3.001], False),
])
def test_integer_detection(values, expected):
    assert detect_integer_valued(values) is expected


@given(arrays(np.float64, st.integers(1, 50), elements=finite))
def test_shift_twice_gives_one(y):
    once = positivity_shift(y)
    assert positivity_shift(once.values).shift == 1.0


@given(arrays(np.float64, st.integers(1, 50), elements=finite))
def test_shift_round_trip(y):
    s = positivity_shift(y)
    back = s.unshift(s.values)
    # subtracting the stored shift undoes the addition up to float rounding
    np.testing.assert_allclose(back, y, rtol=0, atol=4 * np.spacing(np.abs(y).max() + s.shift))


def test_series_rejects_empty_and_nonfinite():
    with pytest.raises(IngestionError):
        TimeSeries([])
    with pytest.raises(IngestionError):
        TimeSeries([1.0, np.nan])
    with pytest.raises(IngestionError):
        TimeSeries([1.0, np.inf])


def test_series_is_read_only():
    ts = TimeSeries([1.0, 2.0])
    with pytest.raises(ValueError):
        ts.values[0] = 5.0


@pytest.mark.parametrize("code, freq", [
    ("H", Freq.HOURLY), ("30T", Freq.MINUTE_30), ("D", Freq.DAILY), ("W", Freq.WEEKLY),
    ("M", Freq.MONTHLY), ("Q", Freq.QUARTERLY), (None, Freq.UNKNOWN), ("??", Freq.UNKNOWN),
    ("hourly", Freq.HOURLY),
])
def test_freq_parse(code, freq):
    assert Freq.parse(code) is freq


@pytest.mark.parametrize("bad", [0, -3])
def test_horizon_must_be_positive(bad):
    with pytest.raises(ValueError):
        Horizon(bad)
