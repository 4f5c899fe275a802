"""Benchmark harness: config parsing, job matrix, report schema."""
import copy
import json

import numpy as np
import pytest

from sbetas import bench
from sbetas.bench import (
    SCHEMA_VERSION,
    BenchConfig,
    MethodSpec,
    format_table,
    load_config,
    run_bench,
    validate_report,
)
from sbetas.errors import ConfigError, ConvergenceError, DataError

SMALL_INI = """\
[dataset]
name = simu
n = 600
seed = 0

[bench]
runs = 2
align = argmax

[method argmax]
[method k-means]
[method k-sbetas]
[method k-sbetas biased]
pi = uniform
"""


def _write_ini(tmp_path, text=SMALL_INI):
    path = tmp_path / "bench.ini"
    path.write_text(text)
    return path


def _strip_timing(report):
    out = copy.deepcopy(report)
    for rec in out["runs"]:
        rec.pop("seconds", None)
    for agg in out["aggregates"].values():
        agg.pop("seconds_mean", None)
        agg.pop("seconds_std", None)
    return out


# ---------------------------------------------------------------- config


def test_load_config_parses_methods_and_labels(tmp_path):
    cfg = load_config(_write_ini(tmp_path))
    assert cfg.dataset == "simu"
    assert cfg.n == 600 and cfg.runs == 2 and cfg.align == "argmax"
    labels = [m.label for m in cfg.methods]
    assert labels == ["argmax", "k-means", "k-sbetas", "k-sbetas biased"]
    biased = cfg.methods[-1]
    assert biased.name == "k-sbetas"
    assert biased.options == {"pi": "uniform"}


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")


def test_unknown_method_rejected():
    with pytest.raises(ConfigError, match="unknown method"):
        MethodSpec(name="banana")


def test_unknown_option_rejected():
    with pytest.raises(ConfigError, match="unknown options"):
        MethodSpec(name="k-means", options={"bogus": "1"})


def test_bench_config_validation():
    m = (MethodSpec(name="argmax"),)
    with pytest.raises(ConfigError):
        BenchConfig(dataset="simu", methods=m, runs=-1)
    with pytest.raises(ConfigError):
        BenchConfig(dataset="simu", methods=())
    with pytest.raises(ConfigError):
        BenchConfig(dataset="simu", methods=m, align="nearest")


# ---------------------------------------------------------------- running


@pytest.fixture(scope="module")
def small_report(tmp_path_factory):
    cfg = load_config(_write_ini(tmp_path_factory.mktemp("bench")))
    return cfg, run_bench(cfg)


def test_report_validates_and_serializes(small_report):
    _, report = small_report
    validate_report(report)
    parsed = json.loads(json.dumps(report))
    assert parsed["schema_version"] == SCHEMA_VERSION
    assert parsed["tool"]["name"] == "sbetas"
    assert parsed["config"]["dataset"] == "simu"


def test_every_job_ran(small_report):
    cfg, report = small_report
    assert len(report["runs"]) == len(cfg.methods) * cfg.runs
    for rec in report["runs"]:
        assert rec["status"] == "ok"
        assert rec["nmi"] is not None and 0.0 <= rec["nmi"] <= 1.0
        assert rec["seconds"] >= 0.0


def test_aggregates_recompute_exactly(small_report):
    _, report = small_report
    for label, agg in report["aggregates"].items():
        recs = [r for r in report["runs"] if r["method"] == label]
        ok = [r for r in recs if r["status"] == "ok"]
        assert agg["runs"] == len(recs)
        assert agg["ok"] == len(ok)
        for key in ("nmi", "accuracy", "mean_iou"):
            vals = [r[key] for r in ok]
            assert agg[f"{key}_mean"] == float(np.mean(vals))
            assert agg[f"{key}_std"] == float(np.std(vals))


def test_rerun_is_identical_modulo_timing(small_report):
    cfg, report = small_report
    again = run_bench(cfg)
    a = json.dumps(_strip_timing(report), sort_keys=True)
    b = json.dumps(_strip_timing(again), sort_keys=True)
    assert a == b


def test_parallel_run_matches_sequential(small_report, monkeypatch):
    cfg, report = small_report
    monkeypatch.setenv(bench.WORKERS_ENV_VAR, "2")
    parallel = run_bench(cfg)
    a = json.dumps(_strip_timing(report), sort_keys=True)
    b = json.dumps(_strip_timing(parallel), sort_keys=True)
    assert a == b


def test_isimus_always_six_runs():
    cfg = BenchConfig(
        dataset="isimus",
        methods=(MethodSpec(name="argmax"),),
        runs=2,
        n=400,
        seed=50,
        align="argmax",
    )
    report = run_bench(cfg)
    assert cfg.effective_runs == 6
    assert len(report["runs"]) == 6
    assert [r["run"] for r in report["runs"]] == list(range(6))


def test_zero_runs_gives_empty_report():
    cfg = BenchConfig(
        dataset="simu", methods=(MethodSpec(name="argmax"),), runs=0, n=100
    )
    report = run_bench(cfg)
    validate_report(report)
    assert report["runs"] == []
    assert report["aggregates"] == {}


def test_method_failure_recorded_batch_continues(monkeypatch):
    real = bench.run_method

    def flaky(points, method, k):
        if method.name == "k-dirs":
            raise ConvergenceError("no fixed point", residual=1.0)
        return real(points, method, k)

    monkeypatch.setattr(bench, "run_method", flaky)
    cfg = BenchConfig(
        dataset="simu",
        methods=(MethodSpec(name="k-dirs"), MethodSpec(name="argmax")),
        runs=2,
        n=300,
        align="argmax",
    )
    report = run_bench(cfg)
    kd = [r for r in report["runs"] if r["method"] == "k-dirs"]
    ok = [r for r in report["runs"] if r["method"] == "argmax"]
    assert all(r["status"] == "fails" for r in kd)
    assert all("ConvergenceError" in r["error"] for r in kd)
    assert all(r["status"] == "ok" for r in ok)
    agg = report["aggregates"]["k-dirs"]
    assert agg["fails"] == 2 and agg["ok"] == 0
    assert "nmi_mean" not in agg


def test_file_dataset_runs(tmp_path):
    from sbetas import sample_dirichlet_mixture, save_csv, save_labels, simu_spec

    ds = sample_dirichlet_mixture(simu_spec(n=500, seed=2))
    points = tmp_path / "p.csv"
    labels = tmp_path / "y.txt"
    save_csv(points, ds.data)
    save_labels(labels, ds.labels)
    cfg = BenchConfig(
        dataset=str(points),
        methods=(MethodSpec(name="k-means"),),
        runs=1,
        labels_path=str(labels),
        align="argmax",
    )
    report = run_bench(cfg)
    assert report["runs"][0]["status"] == "ok"
    assert report["runs"][0]["nmi"] > 0.3


def test_file_dataset_without_labels_skips_scores(tmp_path):
    from sbetas import sample_dirichlet_mixture, save_csv, simu_spec

    ds = sample_dirichlet_mixture(simu_spec(n=400, seed=3))
    points = tmp_path / "p.csv"
    save_csv(points, ds.data)
    cfg = BenchConfig(
        dataset=str(points), methods=(MethodSpec(name="k-means"),), runs=1
    )
    report = run_bench(cfg)
    rec = report["runs"][0]
    assert rec["status"] == "ok"
    assert rec["nmi"] is None and rec["accuracy"] is None
    assert rec["seconds"] is not None


# ---------------------------------------------------------------- schema


def test_validate_report_rejects_bad_schema(small_report):
    _, report = small_report
    bad = copy.deepcopy(report)
    bad["schema_version"] = 999
    with pytest.raises(DataError, match="schema_version"):
        validate_report(bad)


def test_validate_report_rejects_missing_field(small_report):
    _, report = small_report
    bad = copy.deepcopy(report)
    del bad["runs"][0]["nmi"]
    with pytest.raises(DataError, match="missing"):
        validate_report(bad)


def test_validate_report_rejects_unknown_status(small_report):
    _, report = small_report
    bad = copy.deepcopy(report)
    bad["runs"][0]["status"] = "maybe"
    with pytest.raises(DataError, match="status"):
        validate_report(bad)


def test_format_table_lists_every_method(small_report):
    _, report = small_report
    table = format_table(report)
    for label in report["aggregates"]:
        assert label in table
    assert "NMI" in table and table.endswith("\n")
