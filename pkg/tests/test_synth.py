import math

import numpy as np
import pytest

from xcorr.spectrum import correlation_matrix, eigendecompose, mp_bounds, overlap_fraction
from xcorr.synth import (
    PRESET_NAMES,
    MarketModel,
    burst_profile,
    expected_lambda1,
    generate,
    preset,
)


class TestMarketModelValidation:
    def test_minimal_model(self):
        m = MarketModel(n_assets=1, t_length=2, bars_per_day=1)
        assert m.seed == 0

    def test_rejects_bad_dimensions(self):
        with pytest.raises(ValueError, match="n_assets"):
            MarketModel(n_assets=0, t_length=100, bars_per_day=10)
        with pytest.raises(ValueError, match="t_length"):
            MarketModel(n_assets=2, t_length=1, bars_per_day=10)
        with pytest.raises(ValueError, match="bars_per_day"):
            MarketModel(n_assets=2, t_length=100, bars_per_day=0)

    def test_rejects_bad_loadings(self):
        with pytest.raises(ValueError, match="market_loading"):
            MarketModel(n_assets=2, t_length=100, bars_per_day=10, market_loading=-0.1)
        with pytest.raises(ValueError, match="idiosyncratic_sigma"):
            MarketModel(n_assets=2, t_length=100, bars_per_day=10, idiosyncratic_sigma=0.0)

    def test_rejects_overfull_sectors(self):
        with pytest.raises(ValueError, match="exceed n_assets"):
            MarketModel(n_assets=10, t_length=100, bars_per_day=10, sector_spec=[(6, 0.5), (5, 0.5)])
        with pytest.raises(ValueError, match="sector"):
            MarketModel(n_assets=10, t_length=100, bars_per_day=10, sector_spec=[(0, 0.5)])

    def test_rejects_bad_intraday_profile(self):
        with pytest.raises(ValueError, match="length bars_per_day"):
            MarketModel(n_assets=2, t_length=100, bars_per_day=10, intraday_profile=np.ones(8))
        with pytest.raises(ValueError, match="strictly positive"):
            bad = np.ones(10)
            bad[0] = 0.0
            MarketModel(n_assets=2, t_length=100, bars_per_day=10, intraday_profile=bad)
        with pytest.raises(ValueError, match="geometric mean"):
            MarketModel(n_assets=2, t_length=100, bars_per_day=10, intraday_profile=np.full(10, 2.0))

    def test_rejects_bad_vol_clustering(self):
        with pytest.raises(ValueError, match="persistence"):
            MarketModel(n_assets=2, t_length=100, bars_per_day=10, vol_clustering=(1.0, 0.1))
        with pytest.raises(ValueError, match="vol-of-vol"):
            MarketModel(n_assets=2, t_length=100, bars_per_day=10, vol_clustering=(0.5, -0.1))

    def test_to_dict_round_trip_fields(self):
        m = MarketModel(
            n_assets=5,
            t_length=100,
            bars_per_day=10,
            market_loading=0.3,
            sector_spec=[(2, 0.4)],
            vol_clustering=(0.9, 0.1),
            seed=7,
        )
        d = m.to_dict()
        assert d["n_assets"] == 5
        assert d["sector_spec"] == [[2, 0.4]]
        assert d["vol_clustering"] == [0.9, 0.1]
        assert d["seed"] == 7
        assert d["intraday_profile"] is None


class TestGenerate:
    def test_deterministic_for_fixed_seed(self):
        m = MarketModel(n_assets=4, t_length=200, bars_per_day=20, market_loading=0.3, seed=5)
        a = generate(m)
        b = generate(m)
        assert np.array_equal(a.returns, b.returns)

    def test_seed_changes_output(self):
        kw = dict(n_assets=4, t_length=200, bars_per_day=20, market_loading=0.3)
        a = generate(MarketModel(seed=5, **kw))
        b = generate(MarketModel(seed=6, **kw))
        assert not np.allclose(a.returns, b.returns)

    def test_panel_is_standardized_with_metadata(self):
        m = MarketModel(n_assets=3, t_length=150, bars_per_day=15, dt_seconds=120.0, seed=1)
        p = generate(m)
        assert p.standardized
        assert p.assets == ["SYN000", "SYN001", "SYN002"]
        assert p.bars_per_day == 15
        assert p.dt_seconds == 120.0
        assert np.allclose(p.returns.var(axis=1), 1.0, atol=1e-10)

    def test_adding_assets_keeps_existing_rows(self):
        # Per-asset streams are keyed by asset index, so widening the universe
        # reproduces the previous assets' series bit for bit.
        kw = dict(t_length=500, bars_per_day=50, market_loading=0.4, seed=9)
        small = generate(MarketModel(n_assets=2, **kw))
        wide = generate(MarketModel(n_assets=3, **kw))
        assert np.allclose(small.returns, wide.returns[:2], atol=1e-12)

    def test_null_model_matches_random_band(self):
        p = generate(MarketModel(n_assets=30, t_length=3000, bars_per_day=100, seed=0))
        s = eigendecompose(correlation_matrix(p))
        b = mp_bounds(100.0)
        assert s.eigenvalues[0] < b.lambda_max + 0.1
        assert overlap_fraction(s, b) >= 0.95

    def test_one_factor_top_eigenvalue_matches_prediction(self):
        m = MarketModel(
            n_assets=50,
            t_length=5000,
            bars_per_day=100,
            market_loading=math.sqrt(0.18 / 0.82),
            seed=1,
        )
        s = eigendecompose(correlation_matrix(generate(m)))
        assert abs(s.eigenvalues[0] - expected_lambda1(m)) < 0.5
        assert s.eigenvalues[0] / s.eigenvalues[1] > 5.0

    def test_sector_modes_stand_above_the_band(self):
        m = preset("market_sectors", seed=2, n_assets=100, t_length=8000)
        s = eigendecompose(correlation_matrix(generate(m)))
        b = mp_bounds(80.0)
        assert s.eigenvalues[1] > 2.0 * b.lambda_max
        assert s.eigenvalues[2] > 2.0 * b.lambda_max
        assert s.eigenvalues[3] < b.lambda_max

    def test_vol_clustering_raises_magnitude_autocorrelation(self):
        def acf1_abs(row):
            a = np.abs(row)
            a = a - a.mean()
            return float((a[:-1] * a[1:]).mean() / (a * a).mean())

        kw = dict(n_assets=2, t_length=8000, bars_per_day=100, seed=3)
        plain = generate(MarketModel(**kw))
        clustered = generate(MarketModel(vol_clustering=(0.97, 0.2), **kw))
        assert acf1_abs(plain.returns[0]) < 0.05
        assert acf1_abs(clustered.returns[0]) > 0.2

    def test_intraday_profile_boosts_burst_bars(self):
        m = preset("intraday", seed=4, t_length=8000)
        p = generate(m)
        bar_idx = np.arange(p.t_length) % 100
        burst = np.isin(bar_idx, list(range(5)) + list(range(95, 100)))
        ratio = p.returns[:, burst].var() / p.returns[:, ~burst].var()
        assert ratio > 10.0


class TestExpectedLambda1:
    def test_no_coupling_gives_one(self):
        m = MarketModel(n_assets=100, t_length=1000, bars_per_day=10)
        assert expected_lambda1(m) == 1.0

    def test_equal_loading_and_noise(self):
        m = MarketModel(n_assets=100, t_length=1000, bars_per_day=10, market_loading=1.0)
        assert abs(expected_lambda1(m) - (1.0 + 99 * 0.5)) < 1e-12

    def test_rejects_structured_models(self):
        with pytest.raises(ValueError, match="single-factor"):
            expected_lambda1(
                MarketModel(n_assets=10, t_length=100, bars_per_day=10, sector_spec=[(5, 0.5)])
            )
        with pytest.raises(ValueError, match="single-factor"):
            expected_lambda1(
                MarketModel(n_assets=10, t_length=100, bars_per_day=10, vol_clustering=(0.9, 0.1))
            )

    def test_intraday_profile_is_allowed(self):
        m = preset("intraday")
        assert abs(expected_lambda1(m) - (1.0 + 99 * 0.18)) < 1e-12


class TestBurstProfile:
    def test_unit_geometric_mean(self):
        u = burst_profile(100, 10, 6.0)
        assert abs(np.log(u).mean()) < 1e-12

    def test_burst_to_quiet_ratio_is_level(self):
        u = burst_profile(100, 10, 6.0)
        assert abs(u[0] / u[50] - 6.0) < 1e-12

    def test_odd_burst_count_front_loaded(self):
        u = burst_profile(8, 5, 3.0)
        high = u > 1.0
        assert high[:3].all() and high[-2:].all() and not high[3:6].any()

    def test_validation(self):
        with pytest.raises(ValueError, match="n_burst"):
            burst_profile(10, 0, 2.0)
        with pytest.raises(ValueError, match="n_burst"):
            burst_profile(10, 10, 2.0)
        with pytest.raises(ValueError, match="level"):
            burst_profile(10, 4, 0.0)


class TestPresets:
    def test_preset_names_resolve(self):
        for name in PRESET_NAMES:
            m = preset(name)
            assert m.t_length / m.n_assets > 100

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError, match="unknown preset"):
            preset("levy_flights")

    def test_null_preset_is_uncoupled(self):
        m = preset("mp_null")
        assert m.market_loading == 0.0
        assert m.sector_spec == []

    def test_one_factor_coupling_level(self):
        m = preset("one_factor")
        rho = m.market_loading**2 / (m.market_loading**2 + 1.0)
        assert abs(rho - 0.18) < 1e-12

    def test_sector_preset_shape(self):
        m = preset("market_sectors")
        assert m.n_assets == 400
        assert m.sector_spec == [(20, 0.5), (20, 0.5)]

    def test_intraday_preset_profile(self):
        m = preset("intraday")
        assert m.intraday_profile is not None
        assert m.intraday_profile.size == 100

    def test_overrides_and_seed(self):
        m = preset("one_factor", seed=11, t_length=2000)
        assert m.seed == 11
        assert m.t_length == 2000
