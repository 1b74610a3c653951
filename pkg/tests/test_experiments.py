import csv
import json

import numpy as np
import pytest

from depthtvd.depth_transforms import transform_sample
from depthtvd.distributions import DomainError, Gaussian, SdReference, sample
from depthtvd.experiments import (
    CSV_COLUMNS,
    DEFAULT_SEED,
    HISTOGRAM_COLUMNS,
    TABLE1_COLUMNS,
    ExperimentConfig,
    ReportError,
    emit_figure_data,
    emit_histogram,
    emit_report,
    emit_table1,
    histogram_rows,
    load_report,
    run_reference_experiment,
    table1_rows,
)


@pytest.fixture(scope="module")
def report():
    return run_reference_experiment(ExperimentConfig())


def test_config_defaults_and_validation():
    cfg = ExperimentConfig()
    assert cfg.seed == DEFAULT_SEED
    assert (cfg.n, cfg.l_raw, cfg.l_depth) == (1000, 4.0, 20.0)
    assert cfg.seeds == {"P": DEFAULT_SEED, "Q": DEFAULT_SEED + 1}
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    for bad in ({"n": 1}, {"l_raw": 0}, {"refinement_factors": [0]}, {"histogram_bins": 0}, {"seed": -1}):
        with pytest.raises(DomainError):
            ExperimentConfig.from_dict(bad)
    with pytest.raises(DomainError):
        ExperimentConfig.from_dict({"sample_size": 10})
    with pytest.raises(DomainError):
        ExperimentConfig(distP={"kind": "cauchy"})


def test_report_values(report):
    assert report.ground_truth_tvd == pytest.approx(0.19358, abs=5e-4)
    for k in ("hd", "sd", "qt"):
        f, b, s = (getattr(report, f"{k}_{d}") for d in ("forward", "backward", "symmetrized"))
        assert s == (f + b) / 2
        truth = report.induced_ground_truth[k]
        assert truth["forward"] == pytest.approx(report.ground_truth_tvd, abs=1e-9)
    for t in [*report.refined.values(), report.one_sided]:
        assert t["symmetrized"] == (t["forward"] + t["backward"]) / 2
    assert set(report.refined) == {"2", "4"}
    assert report.seeds == {"P": DEFAULT_SEED, "Q": DEFAULT_SEED + 1}


def test_ordering_at_desk_scale(report):
    assert report.hd_symmetrized <= report.raw_lvtvd + 0.02
    assert report.sd_symmetrized <= report.raw_lvtvd + 0.02
    # QT keeps the full TVD, so it sits nearest to the raw estimate
    gap = lambda v: abs(v - report.raw_lvtvd)  # noqa: E731
    assert gap(report.qt_symmetrized) <= min(gap(report.hd_symmetrized), gap(report.sd_symmetrized))
    assert report.qt_symmetrized >= max(report.hd_symmetrized, report.sd_symmetrized) - 0.01


def test_report_is_byte_identical_across_runs(report, tmp_path):
    again = run_reference_experiment(ExperimentConfig())
    assert again.to_json() == report.to_json()
    p1 = emit_report(report, "json", tmp_path / "a.json")
    p2 = emit_report(again, "json", tmp_path / "b.json")
    assert p1.read_bytes() == p2.read_bytes()
    assert load_report(p1) == report


def test_seed_changes_results():
    a = run_reference_experiment(ExperimentConfig(n=200, seed=0))
    b = run_reference_experiment(ExperimentConfig(n=200, seed=1))
    assert a.raw_lvtvd != b.raw_lvtvd


def test_csv_schema(report, tmp_path):
    path = emit_report(report, "csv", tmp_path / "r.csv")
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == CSV_COLUMNS
    names = [r[0] for r in rows[1:]]
    assert names == ["ground_truth", "raw", "hd", "sd", "qt", "hd_refined_2n", "hd_refined_4n", "hd_one_sided"]
    hd = rows[3]
    assert float(hd[1]) == report.hd_forward and float(hd[2]) == report.hd_backward
    with pytest.raises(DomainError):
        emit_report(report, "xml", tmp_path / "r.xml")


def test_table1_layout(report, tmp_path):
    rows = table1_rows(report)
    assert [r[0] for r in rows] == [
        "Empirical samples of size N",
        "More refined samples of size M=2N",
        "More refined samples of size M=4N",
        "Density-based variational lower bound",
    ]
    # columns: D(Q||P), D(P||Q), symmetrized
    assert rows[0][1:] == (report.hd_backward, report.hd_forward, report.hd_symmetrized)
    assert rows[3][1:] == tuple(report.one_sided[k] for k in ("backward", "forward", "symmetrized"))
    out = list(csv.reader(emit_table1(report, tmp_path / "t.csv").open()))
    assert tuple(out[0]) == TABLE1_COLUMNS
    assert len(out) == 5


def test_io_errors_name_the_path(report, tmp_path):
    missing = tmp_path / "no" / "such" / "dir" / "r.json"
    with pytest.raises(ReportError, match="r.json"):
        emit_report(report, "json", missing)
    with pytest.raises(ReportError, match="nothing.json"):
        load_report(tmp_path / "nothing.json")


def test_null_case_is_small():
    same = {"kind": "gaussian", "mu": 0.0, "sigma": 1.0}
    r = run_reference_experiment(ExperimentConfig(distP=same, distQ=same))
    assert r.ground_truth_tvd == 0.0
    for v in (r.raw_lvtvd, r.hd_forward, r.hd_backward, r.sd_forward, r.sd_backward, r.qt_forward, r.qt_backward):
        assert v <= 0.03
    for t in [*r.refined.values(), r.one_sided]:
        assert t["forward"] <= 0.03 and t["backward"] <= 0.03


def _null_means(n):
    same = {"kind": "gaussian", "mu": 0.0, "sigma": 1.0}
    vals = []
    for s in range(4):
        r = run_reference_experiment(ExperimentConfig(distP=same, distQ=same, seed=s, n=n, refinement_factors=[]))
        vals.append([r.raw_lvtvd, r.hd_symmetrized, r.qt_symmetrized])
    return np.mean(vals, axis=0)


def test_null_case_shrinks_like_root_n():
    small, large = _null_means(250), _null_means(4000)
    ratio = large / small
    # sixteen times the data should shrink the bias by about four
    assert np.all((ratio > 0.15) & (ratio < 0.4))
    assert np.all(large < 0.05)


def test_histogram_of_hd_self_transform(tmp_path):
    n, bins = 1000, 20
    x = sample(Gaussian(0, 1), n, 9)
    d = transform_sample(x, x, "hd")
    rows = histogram_rows(d, bins)
    assert sum(r[2] for r in rows) == n
    # the grid k/N puts 50 +- 2 values in each bin depending on edge rounding
    p = 1 / bins
    band = 3 * np.sqrt(n * p * (1 - p)) / (n * 0.5 / bins)
    assert all(abs(r[3] - 2.0) <= band for r in rows)
    path = emit_histogram(d, 20, tmp_path / "h.csv")
    out = list(csv.reader(path.open()))
    assert tuple(out[0]) == HISTOGRAM_COLUMNS
    assert len(out) == 21


def test_histogram_of_analytic_hd_within_binomial_band():
    n, bins = 100_000, 20
    x = sample(Gaussian(0, 1), n, 12)
    rows = histogram_rows(transform_sample(x, Gaussian(0, 1), "hd"), bins)
    p = 1 / bins
    sd_density = 3 * np.sqrt(n * p * (1 - p)) / (n * 0.5 / bins)
    assert all(abs(r[3] - 2.0) <= 3 * sd_density for r in rows)


def test_histogram_of_sd_increases_toward_half():
    n = 100_000
    z = sample(SdReference(), n, 13).values
    rows = histogram_rows(z, 20, support=(0.0, 0.5))
    counts = np.array([r[2] for r in rows], dtype=float)
    edges = np.linspace(0.0, 0.5, 21)
    mass = np.diff(1 - np.sqrt(1 - 2 * edges))
    assert np.all(np.diff(mass) > 0)
    assert np.all(np.abs(counts - n * mass) <= 4 * np.sqrt(n * mass * (1 - mass)))
    assert counts[-1] == counts.max()


def test_histogram_allows_empty_bins():
    rows = histogram_rows(np.array([0.0, 0.0, 0.5]), 5, support=(0.0, 0.5))
    assert [r[2] for r in rows] == [2, 0, 0, 0, 1]
    with pytest.raises(DomainError):
        histogram_rows(np.array([0.1]), 0)


def test_figure_data(tmp_path):
    cfg = ExperimentConfig(n=100)
    paths = emit_figure_data(cfg, tmp_path / "fig")
    names = sorted(p.name for p in paths)
    assert names == sorted(
        ["samples.csv", "hd_x_vs_p.csv", "hd_y_vs_p.csv", "sd_x_vs_p.csv", "sd_y_vs_p.csv"]
    )
    rows = list(csv.reader((tmp_path / "fig" / "samples.csv").open()))
    assert rows[0] == ["x", "y"] and len(rows) == 101


def test_report_json_keys(report):
    d = json.loads(report.to_json())
    for key in (
        "ground_truth_tvd",
        "raw_lvtvd",
        "hd_forward",
        "hd_backward",
        "hd_symmetrized",
        "sd_forward",
        "sd_backward",
        "sd_symmetrized",
        "qt_forward",
        "qt_backward",
        "refined",
        "one_sided",
        "config",
        "seeds",
    ):
        assert key in d
