import json

import numpy as np
import pytest

from pwbifurc import (
    AllSamplesIllPosed,
    CHAOTIC,
    MapParams,
    SweepSpec,
    WrongRegime,
    annotate_markers,
    orbit_interval,
    run_sweep,
    write_diagram_csv,
    write_markers_json,
)

P21 = MapParams(nu=0.5, e=1.0, p=2, q=1)


def small_spec(**kw):
    base = dict(
        params=P21,
        mu_min=1e-4,
        mu_max=1e-2,
        n_samples=12,
        burn_in=2_000,
        n_keep=260,
        max_period=64,
    )
    base.update(kw)
    return SweepSpec(**base)


class TestSweepSpec:
    def test_grid_scales(self):
        lin = small_spec(scale="linear").grid()
        assert np.allclose(np.diff(lin), np.diff(lin)[0])
        log = small_spec().grid()
        ratios = log[1:] / log[:-1]
        assert np.allclose(ratios, ratios[0])

    @pytest.mark.parametrize(
        "kw",
        [
            dict(mu_min=0.0),
            dict(mu_min=2e-2),
            dict(n_samples=1),
            dict(scale="cubic"),
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            small_spec(**kw)


class TestRunSweep:
    def test_one_record_per_sample_ascending(self):
        spec = small_spec(n_samples=15)
        records = run_sweep(spec, workers=1)
        assert len(records) == 15
        mus = [r.mu for r in records]
        assert mus == sorted(mus)

    def test_deterministic_under_parallelism(self):
        spec = small_spec(n_samples=10)
        serial = run_sweep(spec, workers=1)
        parallel = run_sweep(spec, workers=3)
        for a, b in zip(serial, parallel):
            assert a.mu == b.mu
            assert a.period == b.period
            assert a.skipped == b.skipped
            assert np.array_equal(a.points, b.points)
            assert (a.lyapunov == b.lyapunov) or (
                np.isnan(a.lyapunov) and np.isnan(b.lyapunov)
            )

    def test_ill_posed_samples_kept_as_skipped(self):
        spec = small_spec(mu_min=0.5, mu_max=2.0, n_samples=8)
        records = run_sweep(spec, workers=1)
        assert len(records) == 8
        assert any(r.skipped for r in records)
        assert any(not r.skipped for r in records)
        for r in records:
            if r.skipped:
                assert len(r.points) == 0

    def test_all_ill_posed_raises(self):
        with pytest.raises(AllSamplesIllPosed):
            run_sweep(small_spec(mu_min=1.5, mu_max=2.0, n_samples=4), workers=1)

    def test_periods_match_interval_predictions(self):
        # sweep spanning counts 4 and 5 plus the gap between them
        i5, i4 = orbit_interval(P21, 5), orbit_interval(P21, 4)
        spec = small_spec(mu_min=i5.mu_low * 1.05, mu_max=i4.mu_high * 0.95, n_samples=14)
        records = run_sweep(spec, workers=1)
        for r in records:
            if i5.mu_low * 1.05 <= r.mu <= i5.mu_high * 0.98:
                assert r.period == 5
            elif i4.mu_low * 1.02 <= r.mu:
                assert r.period == 4

    def test_chaotic_regime_lyapunov_positive(self):
        chaos = MapParams(nu=0.75, e=1.0, p=2, q=1)
        spec = small_spec(params=chaos, mu_min=1e-6, mu_max=1e-3, n_samples=6)
        for r in run_sweep(spec, workers=1):
            assert not r.skipped
            assert r.lyapunov > 0
            assert r.period == CHAOTIC


class TestMarkers:
    def test_single_interval_range(self):
        i5 = orbit_interval(P21, 5)
        spec = small_spec(mu_min=i5.mu_low * 1.01, mu_max=i5.mu_high * 0.99)
        assert [iv.M for iv in annotate_markers(spec)] == [5]

    def test_spanning_range(self):
        i6, i4 = orbit_interval(P21, 6), orbit_interval(P21, 4)
        spec = small_spec(mu_min=i6.mu_low, mu_max=i4.mu_high)
        assert [iv.M for iv in annotate_markers(spec)] == [4, 5, 6]

    def test_gap_only_range_is_empty(self):
        i5, i4 = orbit_interval(P21, 5), orbit_interval(P21, 4)
        spec = small_spec(mu_min=i5.mu_high * 1.01, mu_max=i4.mu_low * 0.99)
        assert annotate_markers(spec) == []

    def test_wrong_regime(self):
        with pytest.raises(WrongRegime):
            annotate_markers(small_spec(params=MapParams(nu=0.75, e=1.0, p=2, q=1)))

    def test_marker_values_match_closed_forms(self):
        spec = small_spec()
        for iv in annotate_markers(spec):
            ref = orbit_interval(P21, iv.M)
            assert iv.mu_low == ref.mu_low
            assert iv.mu_high == ref.mu_high


class TestPersistence:
    def test_csv_layout(self, tmp_path):
        spec = small_spec(n_samples=5, mu_min=0.5, mu_max=1.2)  # includes skipped
        records = run_sweep(spec, workers=1)
        path = tmp_path / "diag.csv"
        write_diagram_csv(records, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "mu,point_index,x,period,lyapunov,skipped"
        kept = [r for r in records if not r.skipped]
        skipped = [r for r in records if r.skipped]
        assert len(lines) - 1 == sum(len(r.points) for r in kept) + len(skipped)
        skip_rows = [l for l in lines[1:] if l.endswith(",1")]
        assert len(skip_rows) == len(skipped)
        # 17 significant digits: every float round-trips bit for bit
        kept_rows = [l for l in lines[1:] if l.endswith(",0")]
        row = kept_rows[0].split(",")
        rec = kept[0]
        assert float(row[0]) == rec.mu
        assert float(row[2]) == rec.points[0]
        assert float(row[4]) == rec.lyapunov

    def test_markers_json_schema(self, tmp_path):
        spec = small_spec()
        markers = annotate_markers(spec)
        path = tmp_path / "m.json"
        write_markers_json(P21, markers, str(path))
        doc = json.loads(path.read_text())
        assert doc["params"] == {"nu": 0.5, "e": 1.0, "p": 2, "q": 1}
        assert all(set(m) == {"M", "mu_pd", "mu_1"} for m in doc["markers"])
        assert [m["M"] for m in doc["markers"]] == [iv.M for iv in markers]

    def test_rerun_byte_identical(self, tmp_path):
        spec = small_spec(n_samples=6)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_diagram_csv(run_sweep(spec, workers=1), str(a))
        write_diagram_csv(run_sweep(spec, workers=2), str(b))
        assert a.read_bytes() == b.read_bytes()


class TestWorkerCount:
    def test_env_variable_caps_parallelism(self, monkeypatch):
        from pwbifurc.sweep import THREADS_ENV, worker_count

        monkeypatch.setenv(THREADS_ENV, "3")
        assert worker_count() == 3
        assert worker_count(1) == 1  # explicit request wins
        monkeypatch.delenv(THREADS_ENV)
        assert worker_count() >= 1


class TestFigure:
    def test_renders_file(self, tmp_path):
        from pwbifurc.plotting import render_sweep_figure

        spec = small_spec(n_samples=6)
        records = run_sweep(spec, workers=1)
        markers = annotate_markers(spec)
        out = tmp_path / "diagram.png"
        render_sweep_figure(records, markers, str(out))
        assert out.exists()
        assert out.stat().st_size > 10_000
