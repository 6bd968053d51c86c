import numpy as np
import pytest

from weathervol import TrendSeasonalParams, VolSeasonalParams, eval_s, eval_sigma2


def test_paris_trend_at_zero(paris_params):
    # alpha0 + beta1 at t=0 (sin terms vanish, cos(0)=1)
    assert eval_s(0.0, paris_params.trend) == pytest.approx(3.875, abs=1e-12)


def test_all_zero_coefficients():
    p = TrendSeasonalParams(0.0, 0.0, (0.0,), (0.0,))
    for t in (0.0, 17.3, 365.0, 9999.0):
        assert eval_s(t, p) == 0.0


def test_pure_linear_trend():
    p = TrendSeasonalParams(0.0, 0.25, (), ())
    assert eval_s(10.0, p) == pytest.approx(2.5, rel=1e-15)


def test_trend_periodicity_plus_linear(paris_params):
    p = paris_params.trend
    t = np.linspace(0.0, 700.0, 41)
    shifted = eval_s(t + 365.0, p) - eval_s(t, p)
    assert np.allclose(shifted, 365.0 * p.beta0, rtol=0, atol=1e-9)


def test_paris_sigma2_at_zero(paris_params):
    # gamma0 + delta1 + delta2 at t=0
    assert eval_sigma2(0.0, paris_params.vol_seasonal) == pytest.approx(6.420, abs=1e-12)


def test_constant_sigma2():
    p = VolSeasonalParams(3.7, (), ())
    assert eval_sigma2(123.4, p) == 3.7


def test_sigma2_periodicity(paris_params):
    p = paris_params.vol_seasonal
    t = np.array([0.0, 1.5, 100.0, 364.9, 12345.0])
    assert np.allclose(eval_sigma2(t, p), eval_sigma2(t + 365.0, p), rtol=0, atol=1e-9)


def test_sigma2_nonnegativity_enforced():
    with pytest.raises(ValueError, match="negative"):
        VolSeasonalParams(0.1, (1.0,), (0.0,))


def test_sigma2_nonnegative_on_grid(paris_params):
    grid = np.arange(0.0, 365.25, 0.25)
    assert np.all(eval_sigma2(grid, paris_params.vol_seasonal) >= 0.0)


def test_mismatched_harmonic_lengths():
    with pytest.raises(ValueError):
        TrendSeasonalParams(0.0, 0.0, (1.0,), ())
    with pytest.raises(ValueError):
        VolSeasonalParams(1.0, (0.1,), ())
