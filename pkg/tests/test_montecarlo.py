import json

import numpy as np
import pytest
from scipy import stats

from rirs.core import test_rank
from rirs.errors import InvalidArgument
from rirs.models import ModelSpec
from rirs.montecarlo import (
    ExperimentReport, ExperimentSpec, _kolmogorov_sf, _replicate, aggregate, ks_normality,
    read_report, render_report, run_experiment, write_report,
)
from rirs.rank_select import mask_seed
from rirs.seeds import derive_seed

SMALL = ModelSpec("sbm", n=120, K=2, r=0.6)


def small_spec(**kw):
    base = dict(model=SMALL, k0_list=(1, 2), reps=6, master_seed=3)
    base.update(kw)
    return ExperimentSpec(**base)


class TestKS:
    def test_needs_20(self):
        with pytest.raises(InvalidArgument):
            ks_normality([])
        with pytest.raises(InvalidArgument):
            ks_normality(np.zeros(19))

    def test_matches_scipy(self):
        x = np.random.default_rng(2).normal(size=700)
        d, p = ks_normality(x)
        ref = stats.kstest(x, "norm", method="asymp")
        assert d == pytest.approx(ref.statistic, abs=1e-14)
        assert p == pytest.approx(stats.kstwobign.sf(np.sqrt(700) * d), abs=1e-12)

    def test_kolmogorov_sf_against_scipy(self):
        for lam in np.linspace(0.05, 3.0, 60):
            assert _kolmogorov_sf(lam) == pytest.approx(stats.kstwobign.sf(lam), abs=1e-12)

    def test_normal_draws_calibrated(self):
        passes = sum(ks_normality(np.random.default_rng(s).standard_normal(1000))[1] > 0.01 for s in range(100))
        assert passes >= 95

    def test_uniform_draws_rejected(self):
        assert ks_normality(np.random.default_rng(0).random(1000))[1] < 1e-6


class TestSpec:
    def test_reps_zero(self):
        with pytest.raises(InvalidArgument):
            small_spec(reps=0)

    def test_empty_k0_in_test_mode(self):
        with pytest.raises(InvalidArgument):
            small_spec(k0_list=())

    def test_bad_m_rule(self):
        with pytest.raises(InvalidArgument):
            small_spec(m_rule=0.5)

    def test_roundtrip(self):
        spec = small_spec(m_rule=4.0, variants=("subsampled", "fullsum_diagnostic"))
        assert ExperimentSpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec


class TestRun:
    def test_deterministic_modulo_clock(self):
        a, b = run_experiment(small_spec()), run_experiment(small_spec())
        da, db = a.to_dict(), b.to_dict()
        da.pop("wall_clock_seconds")
        db.pop("wall_clock_seconds")
        assert json.dumps(da) == json.dumps(db)

    def test_replicate_replay(self):
        spec = small_spec()
        rep = run_experiment(spec)
        r = 4
        X = SMALL.generate(derive_seed(3, r, 0))
        out = test_rank(X, 2, 0.05, None, mask_seed(derive_seed(3, r, 1), 2))
        row = [t for t in rep.records[r]["tests"] if t["k0"] == 2][0]
        assert row["statistic"] == out.statistic

    def test_order_independence(self):
        spec = small_spec()
        forward = [_replicate(spec, r) for r in range(spec.reps)]
        backward = [_replicate(spec, r) for r in reversed(range(spec.reps))][::-1]
        assert forward == backward

    def test_workers_match_serial(self):
        spec = small_spec(reps=4)
        assert run_experiment(spec, workers=2).records == run_experiment(spec).records

    def test_aggregates_recomputable(self):
        rep = run_experiment(small_spec())
        assert aggregate(rep.spec, rep.records) == rep.aggregates
        for k0 in (1, 2):
            rows = [t for rec in rep.records for t in rec["tests"] if t["k0"] == k0]
            assert rep.rejection_rate(k0) == sum(t["reject"] for t in rows) / len(rows)
            assert rep.aggregates["tests"][f"subsampled:{k0}"]["rejections"] <= rep.spec.reps

    def test_degenerate_excluded(self):
        spec = ExperimentSpec(ModelSpec("sbm", n=30, K=2, r=0.5), k0_list=(1,), reps=3)
        recs = [{"replicate": 0, "seed": 1, "tests": [{"variant": "subsampled", "k0": 1, "statistic": None,
                                                       "p_value": None, "reject": None, "degenerate": True}]},
                {"replicate": 1, "seed": 2, "tests": [{"variant": "subsampled", "k0": 1, "statistic": 3.0,
                                                       "p_value": 0.0027, "reject": True, "degenerate": False}]}]
        agg = aggregate(spec, recs)["tests"]["subsampled:1"]
        assert agg["valid"] == 1 and agg["degenerate"] == 1 and agg["rejection_rate"] == 1.0

    def test_estimate_mode(self):
        rep = run_experiment(small_spec(mode="estimate", k_max=4))
        agg = rep.aggregates["estimate"]
        assert agg["reps"] == 6 and 0 <= rep.correct_k_rate <= 1
        assert agg["correct"] == sum(r["k_hat"] == 2 for r in rep.records)

    def test_paired_variants(self):
        spec = ExperimentSpec(ModelSpec("sbm", n=100, K=2, selfloops=True), k0_list=(2,), reps=3,
                              variants=("diagonal", "subsampled"))
        rep = run_experiment(spec)
        assert set(rep.aggregates["tests"]) == {"diagonal:2", "subsampled:2"}
        with pytest.raises(InvalidArgument):
            rep.rejection_rate(2)


class TestReports:
    def test_json_roundtrip(self, tmp_path):
        rep = run_experiment(small_spec())
        write_report(rep, tmp_path / "r.json")
        back = read_report(tmp_path / "r.json")
        assert back.to_dict() == rep.to_dict()
        assert json.loads((tmp_path / "r.json").read_text())["schema_version"] == 1

    def test_csv_row_count(self, tmp_path):
        rep = run_experiment(small_spec())
        write_report(rep, tmp_path / "r.csv", "csv")
        lines = (tmp_path / "r.csv").read_text().splitlines()
        footer = [l for l in lines if l.startswith("#")]
        assert len(lines) == 6 * 2 + 1 + len(footer)
        assert len(footer) == 1 + len(rep.aggregates["tests"])

    def test_unknown_format(self):
        with pytest.raises(InvalidArgument):
            render_report(run_experiment(small_spec(reps=1)), "xml")

    def test_schema_version_checked(self):
        d = run_experiment(small_spec(reps=1)).to_dict()
        d["schema_version"] = 99
        with pytest.raises(InvalidArgument):
            ExperimentReport.from_dict(d)

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError):
            write_report(run_experiment(small_spec(reps=1)), tmp_path / "missing" / "r.json")


@pytest.mark.slow
def test_calibration_across_master_seeds():
    spec = ModelSpec("lowrank_uniform", n=200, K=2, selfloops=False)
    reps = 100
    band = 4 * np.sqrt(0.05 * 0.95 / reps)
    inside = 0
    for seed in range(10):
        rep = run_experiment(ExperimentSpec(spec, k0_list=(2,), reps=reps, master_seed=seed))
        inside += abs(rep.rejection_rate(2) - 0.05) <= band
    assert inside >= 9
