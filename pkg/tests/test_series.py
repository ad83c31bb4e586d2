import numpy as np
import pytest
from scipy import stats
from hypothesis import given, settings, strategies as st

from lobkn.errors import DegenerateRange, TooShort
from lobkn.series import (TickSeries, coarse_grain, default_fit_range, power_spectrum,
                          rolling_mean, spectral_exponent, velocity, weak_stationarity_report)

from oracles import block_means

SEEDS = st.integers(0, 2**32 - 1)


def test_velocity_examples():
    assert velocity([100, 100, 100]).values.tolist() == [0, 0]
    v = velocity(TickSeries([100, 101.5], origin_tick=3))
    assert v.values.tolist() == [1.5] and v.origin_tick == 4
    with pytest.raises(TooShort):
        velocity([1.0])


@pytest.mark.invariant
@settings(max_examples=100, deadline=None)
@given(SEEDS)
def test_velocity_cumsum_inverse_is_exact(seed):
    rng = np.random.default_rng(seed)
    half = 200_000 + np.cumsum(rng.integers(-3, 4, 1000))
    mid = half / 2
    v = velocity(mid)
    assert np.array_equal(np.cumsum(v.values), mid[1:] - mid[0])
    assert np.array_equal((2 * v.values).astype(np.int64), np.diff(half))


def test_coarse_grain_examples():
    assert coarse_grain([1, 2, 3, 4], 2).values.tolist() == [1.5, 3.5]
    x = np.arange(7.0)
    assert np.array_equal(coarse_grain(x, 1).values, x)
    with pytest.raises(TooShort):
        coarse_grain([1, 2], 3)
    with pytest.raises(ValueError):
        coarse_grain([1, 2], 0)


def test_coarse_grain_matches_sliced_means():
    x = np.random.default_rng(0).normal(size=10_000)
    np.testing.assert_allclose(coarse_grain(x, 20).values, block_means(x, 20), rtol=1e-12)


@pytest.mark.invariant
@settings(max_examples=100, deadline=None)
@given(SEEDS, st.integers(1, 40))
def test_block_mean_consistency(seed, k):
    x = np.random.default_rng(seed).normal(size=997)
    c = coarse_grain(x, k)
    n = len(c) * k
    assert abs(c.values.mean() - x[:n].mean()) <= 1e-12 * max(1.0, abs(x[:n]).mean())


def test_rolling_mean_examples():
    r = rolling_mean(np.full(50, 3.25), 2, 5)
    assert np.all(r.values == 3.25) and r.origin_tick == 9
    x = np.random.default_rng(1).normal(size=100)
    r1 = rolling_mean(x, 4, 1)
    # S = 1: equals the coarse blocks at the aligned ticks
    np.testing.assert_allclose(r1.values[::4][: len(coarse_grain(x, 4))],
                               coarse_grain(x, 4).values, rtol=1e-12)
    with pytest.raises(TooShort):
        rolling_mean(x, 4, 100)


def test_rolling_mean_matches_direct_sums():
    x = np.random.default_rng(2).normal(size=2000) + 5
    k, S = 4, 100
    r = rolling_mean(x, k, S)
    want = np.array([x[t - S * k + 1 : t + 1].sum() / (S * k) for t in range(S * k - 1, x.size)])
    np.testing.assert_allclose(r.values, want, rtol=1e-12)


@pytest.mark.invariant
@settings(max_examples=100, deadline=None)
@given(SEEDS, st.integers(1, 8), st.integers(1, 20))
def test_rolling_mean_first_value(seed, k, S):
    x = np.random.default_rng(seed).normal(size=S * k + 17)
    r = rolling_mean(x, k, S)
    assert r.values[0] == pytest.approx(x[: S * k].mean(), rel=1e-12, abs=1e-12)


def test_impulse_spectrum_is_flat():
    x = np.zeros(4096)
    x[1000] = 1.0
    om, S = power_spectrum(x, n_segments=1, taper=False)
    # the mean removal leaves a tiny constant offset; the spectrum stays flat
    assert np.ptp(S) <= 1e-9 * S.max()


def test_sinusoid_concentrates_power():
    n = 2**14
    t = np.arange(n)
    w0 = 2 * np.pi * 0.0625  # falls on a frequency bin of every segment length used
    om, S = power_spectrum(np.sin(w0 * t))
    j = np.argmin(np.abs(om - w0))
    near = S[max(j - 2, 0): j + 3].sum()
    assert near >= 0.9 * S.sum()
    om, S = power_spectrum(np.sin(w0 * t), n_segments=1, taper=False)
    assert S[np.argmin(np.abs(om - w0))] >= 0.9 * S.sum()


@pytest.mark.invariant
@pytest.mark.parametrize("n", [2**12, 5000, 2**15])
def test_parseval_raw_periodogram(n):
    x = np.random.default_rng(n).normal(size=n).cumsum()
    om, S = power_spectrum(x, n_segments=1, taper=False)
    d_omega = om[1] - om[0]
    assert S.sum() * d_omega == pytest.approx(x.var(), rel=0.01)


def test_white_and_integrated_noise_exponents():
    rng = np.random.default_rng(3)
    x = rng.normal(size=100_000)
    assert abs(spectral_exponent(*power_spectrum(x))) < 0.3
    assert abs(spectral_exponent(*power_spectrum(np.cumsum(x))) - 2) < 0.4


def test_exact_power_laws():
    om = np.linspace(0.01, 1, 200)
    assert spectral_exponent(om, np.full_like(om, 7.0), (0.01, 1.0)) == 0.0
    assert spectral_exponent(om, om**-2.0, (0.01, 1.0)) == pytest.approx(2.0, abs=1e-9)
    lo, hi = default_fit_range(om)
    assert lo == 0.01 and hi == pytest.approx(0.1)
    with pytest.raises(DegenerateRange):
        spectral_exponent(om, om**-2.0, (0.5, 0.52))
    with pytest.raises(TooShort):
        power_spectrum(np.zeros(10))


def test_stationarity_report():
    rng = np.random.default_rng(4)
    x = rng.normal(size=20_000)
    assert not weak_stationarity_report(x).flagged
    y = x.copy()
    y[10_000:] += 10.0
    r = weak_stationarity_report(y)
    assert r.flagged and r.segment_means.shape == (4,)
    assert r.segment_autocov.shape == (4, 11)
    assert weak_stationarity_report(np.cumsum(x)).flagged
    with pytest.raises(TooShort):
        weak_stationarity_report(x[:300])


def test_stationarity_false_alarm_rate():
    # the largest gap of 4 segment means is a studentized range; on i.i.d.
    # noise the flag rate should sit near its nominal tail probability (a
    # little above it, since the standard error is itself estimated)
    nominal = stats.studentized_range.sf(3 * np.sqrt(2), 4, 1e6)
    rng = np.random.default_rng(5)
    n = 2000
    rate = sum(weak_stationarity_report(rng.normal(size=4000)).flagged for _ in range(n)) / n
    assert nominal / 2 < rate < 2 * nominal


@pytest.mark.invariant
@settings(max_examples=100, deadline=None)
@given(SEEDS, st.integers(2**12, 3 * 2**12), st.booleans())
def test_parseval_over_seeds(seed, n, walk):
    x = np.random.default_rng(seed).normal(size=n)
    if walk:
        x = x.cumsum()
    om, S = power_spectrum(x, n_segments=1, taper=False)
    assert S.sum() * (om[1] - om[0]) == pytest.approx(x.var(), rel=0.01)
