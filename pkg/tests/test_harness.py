import numpy as np
import pytest

from ddchirp import (ExperimentConfig, ExperimentContext, emit_csv,
                     parse_config, run_sweep, run_trial, serialize_config)
from ddchirp.harness import CSV_COLUMNS, synthesize_trial
from ddchirp.errors import ConfigError

MINIMAL = {"grid": {"M": 31, "N": 37}}


class TestParseConfig:
    def test_defaults(self):
        cfg = parse_config(MINIMAL)
        assert cfg.M == 31 and cfg.N == 37
        assert cfg.nu_p_hz == 30e3
        assert cfg.nu_max_hz == 815.0
        assert cfg.num_roots == 1024
        assert cfg.users == 1
        assert cfg.shifts == (7, 12, 18, 23)
        assert cfg.snr_grid_db == (0.0, 4.0, 8.0, 12.0, 16.0, 20.0)
        assert cfg.trials == 100
        assert cfg.detector == "both"
        assert cfg.channel_profile == "veh-a"
        assert cfg.seed == 0

    def test_missing_field_names_path(self):
        with pytest.raises(ConfigError, match="grid.M"):
            parse_config({"grid": {"N": 37}})

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="snr_grid"):
            parse_config({**MINIMAL, "snr_grid": [0]})

    def test_bad_type_names_path(self):
        with pytest.raises(ConfigError, match="trials"):
            parse_config({**MINIMAL, "trials": "many"})

    def test_bad_detector(self):
        with pytest.raises(ConfigError, match="detector"):
            parse_config({**MINIMAL, "detector": "magic"})

    def test_from_file(self, tmp_path):
        import json
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({**MINIMAL, "trials": 7}))
        assert parse_config(p).trials == 7

    def test_round_trip_fixed_point(self):
        cfg = parse_config({**MINIMAL, "users": 5, "trials": 3,
                            "detector": "ost", "seed": 11})
        assert parse_config(serialize_config(cfg)) == cfg


class TestContext:
    def test_derived_grid(self):
        ctx = ExperimentContext(parse_config(MINIMAL))
        assert ctx.grid.mn == 1147
        assert ctx.grid.bandwidth_hz == pytest.approx(930e3)
        assert ctx.grid.duration_s == pytest.approx(37 / 30e3)
        # tau_max defaults to the longest Veh-A path
        assert ctx.grid.tau_max_s == pytest.approx(2.51e-6)

    def test_detector_selection(self):
        assert ExperimentContext(parse_config(MINIMAL)).detectors == ("alg1", "ost")
        multi = parse_config({**MINIMAL, "users": 3})
        assert ExperimentContext(multi).detectors == ("alg2", "ost")
        only = parse_config({**MINIMAL, "detector": "alg1"})
        ctx = ExperimentContext(only)
        assert ctx.detectors == ("alg1",)
        assert ctx.sensing is None

    def test_rejects_bad_shift(self):
        with pytest.raises(ConfigError, match="shifts"):
            ExperimentContext(parse_config({**MINIMAL, "shifts": [31]}))


class TestTrials:
    def test_synthesis_reproducible(self):
        ctx = ExperimentContext(parse_config({**MINIMAL, "detector": "alg1"}))
        tx1, y1 = synthesize_trial(ctx, 10.0, [0, 0, 5])
        tx2, y2 = synthesize_trial(ctx, 10.0, [0, 0, 5])
        assert tx1 == tx2
        assert np.array_equal(y1, y2)
        tx3, y3 = synthesize_trial(ctx, 10.0, [0, 0, 6])
        assert not np.array_equal(y1, y3)

    def test_run_trial_reports_all_detectors(self):
        ctx = ExperimentContext(parse_config({**MINIMAL, "trials": 1}))
        out = run_trial(ctx, 20.0, [0, 0, 0])
        assert set(out["hits"]) == {"alg1", "ost"}
        assert len(out["tx_roots"]) == 1
        assert all(len(v) == 1 for v in out["hits"].values())


@pytest.fixture(scope="module")
def small_sweep_cfg():
    return parse_config({**MINIMAL, "trials": 20,
                         "snr_grid_db": [8.0, 20.0], "seed": 3})


class TestSweep:
    def test_rows_and_counts(self, small_sweep_cfg):
        res = run_sweep(small_sweep_cfg)
        assert len(res.rows) == 4  # 2 detectors x 2 SNR points
        for row in res.rows:
            assert row.trials == 20
            assert 0.0 <= row.p_md <= 1.0
            assert row.misses == round(row.p_md * 20)

    def test_thread_count_invariance(self, small_sweep_cfg):
        cfg = small_sweep_cfg
        ctx = ExperimentContext(cfg)
        r1 = run_sweep(cfg, threads=1, ctx=ctx)
        r4 = run_sweep(cfg, threads=4, ctx=ctx)
        for a, b in zip(r1.rows, r4.rows):
            assert (a.detector, a.snr_db, a.misses, a.p_md) == \
                   (b.detector, b.snr_db, b.misses, b.p_md)

    def test_csv_format(self, small_sweep_cfg, tmp_path):
        res = run_sweep(small_sweep_cfg)
        path = tmp_path / "sweep.csv"
        emit_csv(res, path)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + len(res.rows)
        first = lines[1].split(",")
        assert first[0] in ("alg1", "ost")
        assert float(first[1]) == 8.0

    def test_no_timing_column_when_disabled(self, tmp_path):
        cfg = parse_config({**MINIMAL, "trials": 5, "snr_grid_db": [20.0],
                            "detector": "alg1", "measure_time": False})
        res = run_sweep(cfg)
        assert all(r.mean_ms_per_trial is None for r in res.rows)
        path = tmp_path / "s.csv"
        emit_csv(res, path)
        assert path.read_text().splitlines()[1].endswith(",")
