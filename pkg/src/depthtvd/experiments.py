"""Seeded reproduction of the Gaussian two-sample experiment and its variants.

Pipeline for a config (defaults: P = N(0, 1), Q = N(0, 1.5^2), n = 1000):

1. draw ``X ~ P`` with Philox key ``seed`` and ``Y ~ Q`` with key ``seed + 1``;
2. raw two-sample LV-TVD between X and Y with ``l_raw``;
3. for HD, SD and QT, two-sample LV-TVD with ``l_depth`` between the depths
   of X and Y against ``P_N`` (backward, estimating D(Q||P)) and against
   ``Q_N`` (forward, estimating D(P||Q));
4. HD variants: the self-depth side replaced by a refined uniform grid of
   size ``factor * n``, and the one-sided LP against U(0, 1/2);
5. quadrature ground truths for the true and induced TVDs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .depth_transforms import DepthKind, DepthSample, transform_sample
from .distributions import DomainError, from_dict, sample
from .divergence import induced_tvd, tvd_between_distributions
from .lvtvd import lvtvd_one_sided_uniform, lvtvd_two_sample, refined_uniform_sample

__all__ = [
    "DEFAULT_SEED",
    "ReportError",
    "ExperimentConfig",
    "ExperimentReport",
    "run_reference_experiment",
    "emit_report",
    "load_report",
    "table1_rows",
    "emit_table1",
    "histogram_rows",
    "emit_histogram",
]

DEFAULT_SEED = 2
MAX_SEED = 2**64 - 1


class ReportError(OSError):
    """Writing or reading a report failed; the message names the path."""


@dataclass
class ExperimentConfig:
    distP: dict = field(default_factory=lambda: {"kind": "gaussian", "mu": 0.0, "sigma": 1.0})
    distQ: dict = field(default_factory=lambda: {"kind": "gaussian", "mu": 0.0, "sigma": 1.5})
    n: int = 1000
    seed: int = DEFAULT_SEED
    l_raw: float = 4.0
    l_depth: float = 20.0
    refinement_factors: list = field(default_factory=lambda: [2, 4])
    histogram_bins: int = 20

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("n must be at least 2")
        if not (self.l_raw > 0 and self.l_depth > 0):
            raise DomainError("Lipschitz constants must be positive")
        if any(int(f) < 1 or (int(f) * self.n) % 2 for f in self.refinement_factors):
            raise DomainError("refinement factors must be >= 1 and give an even grid size")
        if self.histogram_bins < 1:
            raise DomainError("histogram_bins must be positive")
        if not 0 <= self.seed < MAX_SEED:
            raise DomainError("seed must fit in 64 bits (and leave room for seed + 1)")
        from_dict(self.distP), from_dict(self.distQ)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        unknown = set(d) - set(known)
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        return cls(**known)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def seeds(self) -> dict:
        return {"P": self.seed, "Q": self.seed + 1}


def _triple(forward: float, backward: float) -> dict:
    return {"forward": forward, "backward": backward, "symmetrized": (forward + backward) / 2}


@dataclass
class ExperimentReport:
    ground_truth_tvd: float
    raw_lvtvd: float
    hd_forward: float
    hd_backward: float
    hd_symmetrized: float
    sd_forward: float
    sd_backward: float
    sd_symmetrized: float
    qt_forward: float
    qt_backward: float
    qt_symmetrized: float
    refined: dict
    one_sided: dict
    induced_ground_truth: dict
    config: dict
    seeds: dict

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _lp(sx, sy, l):
    return lvtvd_two_sample(sx, sy, l).objective


def run_reference_experiment(cfg: ExperimentConfig | None = None) -> ExperimentReport:
    cfg = cfg or ExperimentConfig()
    P, Q = from_dict(cfg.distP), from_dict(cfg.distQ)
    X = sample(P, cfg.n, cfg.seeds["P"])
    Y = sample(Q, cfg.n, cfg.seeds["Q"])

    est = {}
    depth = {}
    for kind in (DepthKind.HD, DepthKind.SD, DepthKind.QT):
        xp = transform_sample(X, X, kind).values
        yp = transform_sample(Y, X, kind).values
        xq = transform_sample(X, Y, kind).values
        yq = transform_sample(Y, Y, kind).values
        depth[kind] = (xp, yp, xq, yq)
        est[kind] = _triple(_lp(xq, yq, cfg.l_depth), _lp(xp, yp, cfg.l_depth))

    xp, yp, xq, yq = depth[DepthKind.HD]
    refined = {}
    for factor in cfg.refinement_factors:
        grid = refined_uniform_sample(int(factor) * cfg.n, 0.5)
        refined[str(int(factor))] = _triple(_lp(xq, grid, cfg.l_depth), _lp(grid, yp, cfg.l_depth))
    one_sided = _triple(
        lvtvd_one_sided_uniform(xq, 0.0, 0.5, cfg.l_depth).objective,
        lvtvd_one_sided_uniform(yp, 0.0, 0.5, cfg.l_depth).objective,
    )
    truths = {k.value: induced_tvd(k, P, Q).as_dict() for k in (DepthKind.HD, DepthKind.SD, DepthKind.QT)}

    hd, sd, qt = est[DepthKind.HD], est[DepthKind.SD], est[DepthKind.QT]
    return ExperimentReport(
        ground_truth_tvd=tvd_between_distributions(P, Q),
        raw_lvtvd=_lp(X, Y, cfg.l_raw),
        hd_forward=hd["forward"],
        hd_backward=hd["backward"],
        hd_symmetrized=hd["symmetrized"],
        sd_forward=sd["forward"],
        sd_backward=sd["backward"],
        sd_symmetrized=sd["symmetrized"],
        qt_forward=qt["forward"],
        qt_backward=qt["backward"],
        qt_symmetrized=qt["symmetrized"],
        refined=refined,
        one_sided=one_sided,
        induced_ground_truth=truths,
        config=cfg.to_dict(),
        seeds=cfg.seeds,
    )


# --------------------------------------------------------------------------
# serialisation

CSV_COLUMNS = ("name", "forward", "backward", "symmetrized")


def report_rows(report: ExperimentReport) -> list[tuple]:
    """One row per estimator variant: (name, forward, backward, symmetrized)."""
    gt = report.ground_truth_tvd
    rows = [
        ("ground_truth", gt, gt, gt),
        ("raw", report.raw_lvtvd, report.raw_lvtvd, report.raw_lvtvd),
        ("hd", report.hd_forward, report.hd_backward, report.hd_symmetrized),
        ("sd", report.sd_forward, report.sd_backward, report.sd_symmetrized),
        ("qt", report.qt_forward, report.qt_backward, report.qt_symmetrized),
    ]
    for factor, t in sorted(report.refined.items(), key=lambda kv: int(kv[0])):
        rows.append((f"hd_refined_{factor}n", t["forward"], t["backward"], t["symmetrized"]))
    t = report.one_sided
    rows.append(("hd_one_sided", t["forward"], t["backward"], t["symmetrized"]))
    return rows


def _open(path: Path, mode: str):
    try:
        return path.open(mode, newline="")
    except OSError as exc:
        raise ReportError(f"{path}: {exc.strerror or exc}") from exc


def emit_report(report: ExperimentReport, fmt: str, path) -> Path:
    path = Path(path)
    if fmt not in ("json", "csv"):
        raise DomainError(f"unknown report format {fmt!r}")
    with _open(path, "w") as fh:
        if fmt == "json":
            fh.write(report.to_json())
        else:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for name, *vals in report_rows(report):
                w.writerow([name, *(repr(float(v)) for v in vals)])
    return path


def load_report(path) -> ExperimentReport:
    path = Path(path)
    with _open(path, "r") as fh:
        return ExperimentReport.from_dict(json.load(fh))


TABLE1_COLUMNS = ("technique", "tvd_hd_q_given_p", "tvd_hd_p_given_q", "tvd_hd_symmetrized")


def table1_rows(report: ExperimentReport) -> list[tuple]:
    """Rows laid out like the summary table: D(Q||P), D(P||Q), symmetrized."""
    rows = [("Empirical samples of size N", report.hd_backward, report.hd_forward, report.hd_symmetrized)]
    for factor, t in sorted(report.refined.items(), key=lambda kv: int(kv[0])):
        rows.append((f"More refined samples of size M={factor}N", t["backward"], t["forward"], t["symmetrized"]))
    t = report.one_sided
    rows.append(("Density-based variational lower bound", t["backward"], t["forward"], t["symmetrized"]))
    return rows


def emit_table1(report: ExperimentReport, path) -> Path:
    path = Path(path)
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE1_COLUMNS)
        for label, *vals in table1_rows(report):
            w.writerow([label, *(f"{v:.5f}" for v in vals)])
    return path


# --------------------------------------------------------------------------
# histogram plot data

HISTOGRAM_COLUMNS = ("bin_left", "bin_right", "count", "normalized_density")


def histogram_rows(values: DepthSample | np.ndarray, bins: int, support=None) -> list[tuple]:
    if bins < 1:
        raise DomainError("bins must be positive")
    if isinstance(values, DepthSample):
        support = support or values.support
        vals = values.values
    else:
        vals = np.asarray(values, dtype=float)
        support = support or (float(vals.min()), float(vals.max()))
    counts, edges = np.histogram(vals, bins=bins, range=support)
    dens = counts / (vals.size * np.diff(edges))
    return [(float(a), float(b), int(c), float(d)) for a, b, c, d in zip(edges[:-1], edges[1:], counts, dens)]


def emit_histogram(values: DepthSample, bins: int, path) -> Path:
    path = Path(path)
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HISTOGRAM_COLUMNS)
        for a, b, c, d in histogram_rows(values, bins):
            w.writerow([repr(a), repr(b), c, repr(d)])
    return path


def emit_figure_data(cfg: ExperimentConfig, directory) -> list[Path]:
    """Raw samples and depth histograms behind the experiment's figures."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportError(f"{directory}: {exc.strerror or exc}") from exc
    P, Q = from_dict(cfg.distP), from_dict(cfg.distQ)
    X = sample(P, cfg.n, cfg.seeds["P"])
    Y = sample(Q, cfg.n, cfg.seeds["Q"])
    written = []
    with _open(directory / "samples.csv", "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x", "y"))
        for a, b in zip(X.values, Y.values):
            w.writerow((repr(float(a)), repr(float(b))))
    written.append(directory / "samples.csv")
    for kind in (DepthKind.HD, DepthKind.SD):
        for label, pts in (("x", X), ("y", Y)):
            out = directory / f"{kind.value}_{label}_vs_p.csv"
            written.append(emit_histogram(transform_sample(pts, X, kind), cfg.histogram_bins, out))
    return written
