"""Halfspace, simplicial, quantile and kernel depth in one dimension.

Each depth can be taken against an analytic law (through its cdf) or against
an empirical sample.  Empirical evaluation uses binary search on the sorted
reference, so a batch of m points against n references costs O(m log n).
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .distributions import ContinuousDistribution, DomainError, SortedSample

__all__ = [
    "DepthKind",
    "KernelSpec",
    "DepthSample",
    "hd_analytic",
    "sd_analytic",
    "qt_analytic",
    "hd_empirical",
    "sd_empirical",
    "qt_empirical",
    "kd_empirical",
    "transform_sample",
    "read_sample_csv",
    "write_sample_csv",
    "write_depth_csv",
    "read_depth_csv",
]


class DepthKind(str, enum.Enum):
    HD = "hd"
    SD = "sd"
    QT = "qt"
    KD = "kd"

    @property
    def support(self) -> tuple[float, float]:
        if self is DepthKind.QT:
            return (0.0, 1.0)
        if self is DepthKind.KD:
            return (0.0, 1.0)
        return (0.0, 0.5)


@dataclass(frozen=True)
class KernelSpec:
    """Gaussian kernel ``exp(-(x - y)^2 / (2 h^2))``."""

    bandwidth: float = 1.0

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise DomainError("kernel bandwidth must be positive")

    def __call__(self, x, y):
        d = (np.asarray(x, dtype=float) - np.asarray(y, dtype=float)) / self.bandwidth
        return np.exp(-0.5 * d * d)

    def gram(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return self(xs[:, None], ys[None, :])


@dataclass(frozen=True)
class DepthSample:
    values: np.ndarray
    kind: DepthKind
    support: tuple[float, float]
    reference: str = ""
    kernel: KernelSpec | None = field(default=None, compare=False)

    def __len__(self):
        return len(self.values)

    def as_sorted_sample(self) -> SortedSample:
        return SortedSample(self.values, assume_sorted=True)


def _cdf_of(ref: ContinuousDistribution, x):
    x = np.asarray(x, dtype=float)
    return ref._cdf(x), ref._sf(x)


def _scalar_or(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def hd_analytic(x, ref: ContinuousDistribution):
    """Halfspace depth ``min(F(x), 1 - F(x))``."""
    lower, upper = _cdf_of(ref, x)
    return _scalar_or(np.minimum(lower, upper), x)


def sd_analytic(x, ref: ContinuousDistribution):
    """Simplicial depth ``2 F(x) (1 - F(x))``."""
    lower, upper = _cdf_of(ref, x)
    return _scalar_or(2.0 * lower * upper, x)


def qt_analytic(x, ref: ContinuousDistribution):
    """Quantile transform of ``x`` through the reference cdf."""
    lower, _ = _cdf_of(ref, x)
    return _scalar_or(lower, x)


def _counts(x, ref: SortedSample):
    vals = ref.values
    x = np.asarray(x, dtype=float)
    le = np.searchsorted(vals, x, side="right")
    ge = vals.size - np.searchsorted(vals, x, side="left")
    return le, ge, vals.size


def hd_empirical(x, ref: SortedSample):
    # ties count on both sides; the 0.5 cap only bites for x on a median atom
    le, ge, n = _counts(x, ref)
    return _scalar_or(np.minimum(np.minimum(le, ge) / n, 0.5), x)


def sd_empirical(x, ref: SortedSample):
    le, _, n = _counts(x, ref)
    return _scalar_or(2.0 * (le / n) * ((n - le) / n), x)


def qt_empirical(x, ref: SortedSample):
    le, _, n = _counts(x, ref)
    return _scalar_or(le / n, x)


def kd_empirical(x, ref: SortedSample, kernel: KernelSpec):
    """Kernel depth: mean kernel value between ``x`` and the reference points."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = kernel.gram(xs, ref.values).mean(axis=1)
    return _scalar_or(out.reshape(np.shape(x)), x)


_ANALYTIC = {DepthKind.HD: hd_analytic, DepthKind.SD: sd_analytic, DepthKind.QT: qt_analytic}
_EMPIRICAL = {DepthKind.HD: hd_empirical, DepthKind.SD: sd_empirical, DepthKind.QT: qt_empirical}


def transform_sample(
    points,
    ref: ContinuousDistribution | SortedSample,
    kind: DepthKind | str,
    kernel: KernelSpec | None = None,
) -> DepthSample:
    """Depth of every point with respect to ``ref``, returned sorted."""
    kind = DepthKind(kind)
    pts = points.values if isinstance(points, SortedSample) else np.asarray(points, dtype=float)
    if pts.size == 0:
        raise DomainError("no points to transform")
    if kind is DepthKind.KD:
        if kernel is None:
            kernel = KernelSpec()
        if not isinstance(ref, SortedSample):
            raise DomainError("kernel depth needs an empirical reference")
        vals = kd_empirical(pts, ref, kernel)
        label = f"kd(h={kernel.bandwidth:g}) vs sample n={len(ref)}"
    elif isinstance(ref, SortedSample):
        vals = _EMPIRICAL[kind](pts, ref)
        label = f"empirical n={len(ref)}"
    else:
        vals = _ANALYTIC[kind](pts, ref)
        label = repr(ref)
    vals = np.sort(np.asarray(vals, dtype=float))
    vals.setflags(write=False)
    return DepthSample(vals, kind, kind.support, label, kernel)


def read_sample_csv(path) -> SortedSample:
    """Single-column CSV of reals; an optional ``value`` or ``depth`` header is skipped."""
    vals = _read_column(Path(path))
    return SortedSample(vals)


def write_sample_csv(sample: SortedSample, path) -> None:
    _write_column(Path(path), "value", sample.values)


def write_depth_csv(depth: DepthSample, path) -> None:
    _write_column(Path(path), "depth", depth.values)


def read_depth_csv(path, kind: DepthKind | str = DepthKind.HD) -> DepthSample:
    kind = DepthKind(kind)
    vals = np.sort(np.array(_read_column(Path(path)), dtype=float))
    lo, hi = kind.support
    if vals.size and (vals[0] < lo or vals[-1] > hi):
        raise DomainError(f"depth values outside [{lo}, {hi}]")
    return DepthSample(vals, kind, kind.support, str(path))


_HEADERS = ("value", "depth")


def _read_column(path: Path) -> list[float]:
    out = []
    with path.open(newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or not row[0].strip():
                continue
            cell = row[0].strip()
            if i == 0 and cell.lower() in _HEADERS:
                continue
            try:
                out.append(float(cell))
            except ValueError as exc:
                raise DomainError(f"{path}:{i + 1}: not a number: {cell!r}") from exc
    return out


def _write_column(path: Path, header: str, values) -> None:
    with path.open("w", newline="") as fh:
        fh.write(header + "\n")
        for v in values:
            fh.write(repr(float(v)) + "\n")


def depth_range_ok(depth: DepthSample) -> bool:
    lo, hi = depth.support
    v = depth.values
    return bool(v.size == 0 or (v[0] >= lo and v[-1] <= hi and not math.isnan(v[0])))
