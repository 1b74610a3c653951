"""Univariate continuous distributions with pdf, cdf, quantile and seeded sampling.

Every distribution exposes vectorised ``pdf``, ``cdf``, ``sf`` (survival),
``quantile`` and ``isf`` (inverse survival) methods.  The survival pair is
kept separate from ``1 - cdf`` so that upper-tail probabilities and
quantiles stay accurate far from the median.

Random numbers come from numpy's Philox-4x64 counter-based bit generator
keyed directly by the user seed (``Philox(key=seed)``).  Uniform variates
are built from the raw 64-bit output stream as ``((r >> 11) + 0.5) / 2**53``,
which lies strictly inside (0, 1), and are pushed through the quantile
function.  Nothing else touches the stream, so a seed reproduces its sample
bit-for-bit on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

__all__ = [
    "DomainError",
    "ContinuousDistribution",
    "Gaussian",
    "UniformInterval",
    "SdReference",
    "Custom",
    "SortedSample",
    "eval_pdf",
    "eval_cdf",
    "eval_quantile",
    "sample",
    "uniform_stream",
    "from_dict",
]


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


def _out(values: np.ndarray, like):
    if np.ndim(like) == 0:
        return float(values)
    return values


def _check_unit(u: np.ndarray) -> None:
    if np.any(~((u >= 0.0) & (u <= 1.0))):
        raise DomainError("quantile level must lie in [0, 1]")


class ContinuousDistribution:
    """Base class; subclasses implement the ``_``-prefixed array kernels."""

    support: tuple[float, float] = (-math.inf, math.inf)

    def pdf(self, x):
        return _out(self._pdf(np.asarray(x, dtype=float)), x)

    def cdf(self, x):
        return _out(self._cdf(np.asarray(x, dtype=float)), x)

    def sf(self, x):
        return _out(self._sf(np.asarray(x, dtype=float)), x)

    def quantile(self, u):
        arr = np.asarray(u, dtype=float)
        _check_unit(arr)
        return _out(self._quantile(arr), u)

    def isf(self, u):
        """Inverse survival: the x with ``sf(x) = u``, i.e. ``quantile(1 - u)``."""
        arr = np.asarray(u, dtype=float)
        _check_unit(arr)
        return _out(self._isf(arr), u)

    def sample(self, n: int, seed: int) -> "SortedSample":
        return sample(self, n, seed)

    def affine(self, a: float, b: float) -> "ContinuousDistribution":
        """Law of ``a*X + b`` for ``X`` drawn from this distribution."""
        if a == 0:
            raise DomainError("affine scale must be nonzero")
        return _AffineCustom(self, a, b)

    # defaults for subclasses that only know their cdf and quantile
    def _sf(self, x):
        return 1.0 - self._cdf(x)

    def _isf(self, u):
        return self._quantile(1.0 - u)

    def to_dict(self) -> dict:
        raise TypeError(f"{type(self).__name__} has no JSON descriptor")


@dataclass(frozen=True)
class Gaussian(ContinuousDistribution):
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")

    def _pdf(self, x):
        z = (x - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))

    def _cdf(self, x):
        return special.ndtr((x - self.mu) / self.sigma)

    def _sf(self, x):
        return special.ndtr((self.mu - x) / self.sigma)

    def _quantile(self, u):
        return self.mu + self.sigma * special.ndtri(u)

    def _isf(self, u):
        return self.mu - self.sigma * special.ndtri(u)

    def affine(self, a, b):
        if a == 0:
            raise DomainError("affine scale must be nonzero")
        return Gaussian(a * self.mu + b, abs(a) * self.sigma)

    def to_dict(self):
        return {"kind": "gaussian", "mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class UniformInterval(ContinuousDistribution):
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not self.hi > self.lo:
            raise DomainError("uniform interval needs hi > lo")

    @property
    def support(self):
        return (self.lo, self.hi)

    def _pdf(self, x):
        inside = (x >= self.lo) & (x <= self.hi)
        return np.where(inside, 1.0 / (self.hi - self.lo), 0.0)

    def _cdf(self, x):
        return np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def _sf(self, x):
        return np.clip((self.hi - x) / (self.hi - self.lo), 0.0, 1.0)

    def _quantile(self, u):
        return self.lo + u * (self.hi - self.lo)

    def _isf(self, u):
        return self.hi - u * (self.hi - self.lo)

    def affine(self, a, b):
        if a == 0:
            raise DomainError("affine scale must be nonzero")
        ends = sorted((a * self.lo + b, a * self.hi + b))
        return UniformInterval(ends[0], ends[1])

    def to_dict(self):
        return {"kind": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class SdReference(ContinuousDistribution):
    """Law of the simplicial depth of a point drawn from its own distribution.

    ``Z`` lives on [0, 1/2] with cdf ``1 - sqrt(1 - 2z)``; ``2Z`` is Beta(1, 1/2).
    The density ``1/sqrt(1 - 2z)`` is unbounded at ``z = 1/2``; integrate it in
    ``y = sqrt(1 - 2z)`` where it becomes the constant 1 on [0, 1].
    """

    support = (0.0, 0.5)

    def _pdf(self, x):
        inside = (x >= 0.0) & (x <= 0.5)
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = 1.0 / np.sqrt(np.clip(1.0 - 2.0 * x, 0.0, None))
        return np.where(inside, dens, 0.0)

    def _cdf(self, x):
        xc = np.clip(x, 0.0, 0.5)
        # 1 - sqrt(1 - 2z) rewritten without cancellation near z = 0
        return 2.0 * xc / (1.0 + np.sqrt(1.0 - 2.0 * xc))

    def _sf(self, x):
        return np.sqrt(1.0 - 2.0 * np.clip(x, 0.0, 0.5))

    def _quantile(self, u):
        return u * (2.0 - u) / 2.0

    def _isf(self, u):
        return (1.0 - u * u) / 2.0

    def to_dict(self):
        return {"kind": "sd_reference"}


@dataclass(frozen=True, eq=False)
class Custom(ContinuousDistribution):
    """User-supplied law; the callables must accept and return numpy arrays."""

    pdf_fn: Callable
    cdf_fn: Callable
    quantile_fn: Callable
    support: tuple = (-math.inf, math.inf)
    sf_fn: Callable | None = None
    isf_fn: Callable | None = None

    def _pdf(self, x):
        lo, hi = self.support
        vals = np.asarray(self.pdf_fn(x), dtype=float)
        return np.where((x >= lo) & (x <= hi), vals, 0.0)

    def _cdf(self, x):
        return np.asarray(self.cdf_fn(x), dtype=float)

    def _sf(self, x):
        if self.sf_fn is None:
            return 1.0 - self._cdf(x)
        return np.asarray(self.sf_fn(x), dtype=float)

    def _quantile(self, u):
        return np.asarray(self.quantile_fn(u), dtype=float)

    def _isf(self, u):
        if self.isf_fn is None:
            return self._quantile(1.0 - u)
        return np.asarray(self.isf_fn(u), dtype=float)


class _AffineCustom(ContinuousDistribution):
    def __init__(self, base: ContinuousDistribution, a: float, b: float):
        self.base, self.a, self.b = base, a, b
        ends = sorted((a * base.support[0] + b, a * base.support[1] + b))
        self.support = (ends[0], ends[1])

    def _inv(self, x):
        return (x - self.b) / self.a

    def _pdf(self, x):
        return self.base._pdf(self._inv(x)) / abs(self.a)

    def _cdf(self, x):
        if self.a > 0:
            return self.base._cdf(self._inv(x))
        return self.base._sf(self._inv(x))

    def _sf(self, x):
        if self.a > 0:
            return self.base._sf(self._inv(x))
        return self.base._cdf(self._inv(x))

    def _quantile(self, u):
        if self.a > 0:
            return self.a * self.base._quantile(u) + self.b
        return self.a * self.base._isf(u) + self.b

    def _isf(self, u):
        if self.a > 0:
            return self.a * self.base._isf(u) + self.b
        return self.a * self.base._quantile(u) + self.b


class SortedSample:
    """Nondecreasing, immutable vector of observations (an empirical law)."""

    __slots__ = ("_values",)

    def __init__(self, values, *, assume_sorted: bool = False):
        arr = np.array(values, dtype=float).ravel()
        if arr.size == 0:
            raise DomainError("a sample needs at least one value")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample values must be finite")
        if not assume_sorted:
            arr = np.sort(arr, kind="stable")
        elif np.any(np.diff(arr) < 0):
            raise DomainError("values are not sorted")
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __len__(self):
        return self._values.size

    def __iter__(self):
        return iter(self._values)

    def __array__(self, dtype=None, copy=None):
        return self._values if dtype is None else self._values.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, SortedSample):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    def __repr__(self):
        return f"SortedSample(n={len(self)}, min={self._values[0]:g}, max={self._values[-1]:g})"

    def affine(self, a: float, b: float) -> "SortedSample":
        return SortedSample(a * self._values + b)


def eval_pdf(dist: ContinuousDistribution, x):
    return dist.pdf(x)


def eval_cdf(dist: ContinuousDistribution, x):
    return dist.cdf(x)


def eval_quantile(dist: ContinuousDistribution, u):
    """Inverse cdf; ``u`` in {0, 1} maps to -inf/+inf on unbounded supports."""
    return dist.quantile(u)


def uniform_stream(n: int, seed: int) -> np.ndarray:
    """``n`` doubles strictly inside (0, 1) from Philox keyed by ``seed``."""
    if n < 1:
        raise DomainError("n must be at least 1")
    bitgen = np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF)
    raw = bitgen.random_raw(n)
    return ((raw >> np.uint64(11)).astype(float) + 0.5) * 2.0**-53


def sample(dist: ContinuousDistribution, n: int, seed: int) -> SortedSample:
    """Draw ``n`` i.i.d. values by inverse transform; returned sorted."""
    u = uniform_stream(n, seed)
    return SortedSample(dist._quantile(u))


def from_dict(desc: dict) -> ContinuousDistribution:
    """Build a distribution from its JSON descriptor."""
    kind = desc.get("kind")
    if kind == "gaussian":
        return Gaussian(float(desc.get("mu", 0.0)), float(desc.get("sigma", 1.0)))
    if kind == "uniform":
        return UniformInterval(float(desc.get("lo", 0.0)), float(desc.get("hi", 1.0)))
    if kind == "sd_reference":
        return SdReference()
    raise DomainError(f"unknown distribution kind: {kind!r}")
