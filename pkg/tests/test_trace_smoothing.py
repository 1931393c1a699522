"""Trace persistence round-trips and Savitzky-Golay smoothing."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gazedrill.config import Mode, default_config
from gazedrill.session import compute_metrics, run_session
from gazedrill.smoothing import smooth_trace, window_samples
from gazedrill.trace import (
    Metrics,
    read_metrics,
    read_trace,
    write_metrics,
    write_trace,
)


class TestSmoothing:
    def test_window_sample_rules(self):
        assert window_samples(1.0, 1000.0) % 2 == 1
        assert window_samples(0.001, 60.0) == 5  # floor of five samples
        assert window_samples(1.0, 60.0) == 61

    @pytest.mark.parametrize(
        "series",
        [
            np.full(500, 3.7),
            np.linspace(-2.0, 5.0, 500),
            0.5 * np.arange(500.0) ** 2 - 3.0 * np.arange(500.0) + 1.0,
        ],
        ids=["constant", "linear", "quadratic"],
    )
    def test_polynomials_reproduced_everywhere(self, series):
        out = smooth_trace(series, window=0.1, rate=1000.0)
        scale = max(1.0, np.abs(series).max())
        assert np.abs(out - series).max() < 1e-9 * scale

    def test_noise_is_attenuated(self):
        rng = np.random.default_rng(0)
        t = np.arange(2000) / 1000.0
        clean = np.sin(2 * np.pi * 0.5 * t)
        noisy = clean + rng.normal(0, 0.3, len(t))
        out = smooth_trace(noisy, window=0.2, rate=1000.0)
        assert np.std(out - clean) < 0.5 * np.std(noisy - clean)

    def test_short_series_returned_unfiltered(self, caplog):
        series = np.arange(5.0)
        with caplog.at_level("WARNING", logger="gazedrill.smoothing"):
            out = smooth_trace(series, window=1.0, rate=1000.0)
        assert_allclose(out, series)
        assert any("unfiltered" in rec.message for rec in caplog.records)


@pytest.fixture(scope="module")
def short_result():
    cfg = default_config()
    cfg.mode = Mode.SHARED
    cfg.seed = 4
    cfg.max_duration = 3.0
    return cfg, run_session(cfg)


class TestTraceRoundTrip:
    def test_records_round_trip_exactly(self, short_result, tmp_path):
        cfg, result = short_result
        path = tmp_path / "t.trace.ndjson"
        write_trace(path, result.meta, result.records)
        meta, records = read_trace(path)
        assert meta == result.meta
        assert len(records) == len(result.records)
        assert [r.to_json() for r in records] == [
            r.to_json() for r in result.records
        ]

    def test_metrics_recomputed_from_file_match_exactly(
        self, short_result, tmp_path
    ):
        cfg, result = short_result
        path = tmp_path / "t.trace.ndjson"
        write_trace(path, result.meta, result.records)
        meta, records = read_trace(path)
        interval = meta["distraction_interval"]
        again = compute_metrics(
            records,
            tuple(interval) if interval else None,
            target_depth=meta["config"]["bone"]["target_depth"],
        )
        assert again.to_dict() == result.metrics.to_dict()

    def test_metrics_file_round_trip(self, tmp_path):
        m = Metrics(
            distraction_movement=1.25e-4,
            distraction_position_std=3.1e-6,
            operator_impulse=0.73,
            completion_time=41.007,
            max_overshoot=2e-7,
            completed=True,
        )
        path = tmp_path / "m.json"
        write_metrics(path, m)
        assert read_metrics(path) == m

    def test_rejects_non_trace_file(self, tmp_path):
        path = tmp_path / "bogus.ndjson"
        path.write_text('{"schema":"something-else"}\n')
        with pytest.raises(ValueError):
            read_trace(path)
