"""Lipschitz-variational TVD estimators as exact chain linear programs.

Every estimator here reduces to the same LP shape over node values
``a_i = f(Z_i)`` at sorted abscissas ``Z_1 <= ... <= Z_N``::

    maximize   1/2 * (sum_i c_i a_i + offset)
    subject to |a_{i+1} - a_i| <= l (Z_{i+1} - Z_i),   -1 <= a_i <= 1

Because the constraint graph is a path, the LP is solved exactly by dynamic
programming over concave piecewise-linear value functions
``V_i(a) = max { sum_{j<=i} c_j a_j : a_i = a }``.  Passing from ``V_i`` to
``V_{i+1}`` takes a sliding-window maximum of half-width ``d = l (Z_{i+1} - Z_i)``
(the increasing part moves left by ``d``, the decreasing part right by ``d``,
and a flat top is inserted), clips to [-1, 1] and adds ``c_{i+1} a``.  Each
step adds at most one breakpoint, so a solve costs O(N * K) with K <= N + 2
breakpoints.  Zero gaps (tied nodes) skip the window step, which is the
equality ``a_{i+1} = a_i``.

Ties among optimal solutions are broken deterministically: the last node
takes the smallest maximiser of ``V_N`` and every earlier node the point of
its feasible window nearest to the maximiser set of ``V_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import DomainError, SortedSample

__all__ = [
    "ChainLp",
    "LpSolution",
    "solve_chain_lp",
    "two_sample_lp",
    "one_sided_uniform_lp",
    "lvtvd_two_sample",
    "lvtvd_one_sided_uniform",
    "refined_uniform_sample",
    "collapse_duplicates",
]


@dataclass(frozen=True, eq=False)
class ChainLp:
    nodes: np.ndarray
    weights: np.ndarray
    lipschitz: float
    offset: float = 0.0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise DomainError("nodes and weights must be equal-length nonempty vectors")
        if np.any(np.diff(nodes) < 0):
            raise DomainError("nodes must be nondecreasing")
        if not self.lipschitz > 0:
            raise DomainError("Lipschitz constant must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def gaps(self) -> np.ndarray:
        """Allowed jump between consecutive node values."""
        return self.lipschitz * np.diff(self.nodes)

    def objective(self, values) -> float:
        return 0.5 * (float(np.dot(self.weights, values)) + self.offset)

    def to_debug_text(self) -> str:
        lines = [f"# chain-lp n={self.nodes.size} l={self.lipschitz!r} offset={self.offset!r}"]
        lines += [f"{z!r} {c!r}" for z, c in zip(self.nodes.tolist(), self.weights.tolist())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_debug_text(cls, text: str) -> "ChainLp":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        header = dict(tok.split("=", 1) for tok in rows[0][2:])
        body = np.array([[float(a), float(b)] for a, b in rows[1:]]).reshape(-1, 2)
        return cls(body[:, 0], body[:, 1], float(header["l"]), float(header["offset"]))


@dataclass(frozen=True, eq=False)
class LpSolution:
    values: np.ndarray
    objective: float


def _peak(xs: np.ndarray, slopes: np.ndarray) -> tuple[int, int]:
    # slopes are nonincreasing, so the positive ones form a prefix and the
    # negative ones a suffix; the maximiser set is the span between them
    ip = int(np.count_nonzero(slopes > 0))
    iq = xs.size - 1 - int(np.count_nonzero(slopes < 0))
    return ip, iq


def _window_max(xs, slopes, ip, iq, d):
    new_xs = np.concatenate((xs[: ip + 1] - d, xs[iq:] + d))
    new_slopes = np.concatenate((slopes[:ip], (0.0,), slopes[iq:]))
    jl = int(np.searchsorted(new_xs, -1.0, side="right")) - 1
    jr = int(np.searchsorted(new_xs, 1.0, side="left")) - 1
    xs = np.concatenate(((-1.0,), new_xs[jl + 1 : jr + 1], (1.0,)))
    return xs, new_slopes[jl : jr + 1]


def solve_chain_lp(lp: ChainLp) -> LpSolution:
    """Globally optimal solution of a chain LP."""
    c = lp.weights
    n = c.size
    gaps = lp.gaps
    xs = np.array([-1.0, 1.0])
    slopes = np.zeros(1)
    peaks = np.empty((n, 2))
    for i in range(n):
        if i > 0 and gaps[i - 1] > 0:
            ip, iq = _peak(xs, slopes)
            xs, slopes = _window_max(xs, slopes, ip, iq, gaps[i - 1])
        slopes = slopes + c[i]
        ip, iq = _peak(xs, slopes)
        peaks[i] = xs[ip], xs[iq]

    a = np.empty(n)
    a[-1] = peaks[-1, 0]
    for i in range(n - 2, -1, -1):
        lo, hi = peaks[i]
        nxt = a[i + 1]
        target = min(max(nxt, lo), hi)
        a[i] = min(max(target, nxt - gaps[i]), nxt + gaps[i])
    return LpSolution(a, lp.objective(a))


def collapse_duplicates(lp: ChainLp) -> ChainLp:
    """Merge tied nodes, summing their weights; the optimum is unchanged."""
    uniq, inverse = np.unique(lp.nodes, return_inverse=True)
    weights = np.zeros(uniq.size)
    np.add.at(weights, inverse, lp.weights)
    return ChainLp(uniq, weights, lp.lipschitz, lp.offset)


def _values(s) -> np.ndarray:
    arr = s.values if isinstance(s, SortedSample) else np.sort(np.asarray(s, dtype=float))
    if arr.size == 0:
        raise DomainError("LV-TVD needs nonempty samples")
    return arr


def two_sample_lp(sx, sy, l: float) -> ChainLp:
    """Merged-node LP for ``1/2 sup_f [mean f(X) - mean f(Y)]``."""
    x, y = _values(sx), _values(sy)
    nodes = np.concatenate((x, y))
    weights = np.concatenate((np.full(x.size, 1.0 / x.size), np.full(y.size, -1.0 / y.size)))
    order = np.argsort(nodes, kind="stable")
    return ChainLp(nodes[order], weights[order], l)


def lvtvd_two_sample(sx, sy, l: float) -> LpSolution:
    """Empirical LV-TVD between two samples with Lipschitz bound ``l``."""
    return solve_chain_lp(two_sample_lp(sx, sy, l))


def one_sided_uniform_lp(sz, a: float, b: float, l: float) -> ChainLp:
    """LP comparing a sample with U(a, b) through the piecewise-linear interpolant.

    The interpolant of the node values is extended as a constant below the
    first and above the last node, so its integral is a trapezoid sum.
    """
    if not b > a:
        raise DomainError("need b > a")
    z = _values(sz)
    if z[0] < a or z[-1] > b:
        raise DomainError(f"sample values must lie in [{a}, {b}]")
    n = z.size
    width = b - a
    gaps = np.diff(z)
    trap = np.zeros(n)
    trap[:-1] += gaps / 2.0
    trap[1:] += gaps / 2.0
    trap[0] += z[0] - a
    trap[-1] += b - z[-1]
    return ChainLp(z, 1.0 / n - trap / width, l)


def lvtvd_one_sided_uniform(sz, a: float, b: float, l: float) -> LpSolution:
    return solve_chain_lp(one_sided_uniform_lp(sz, a, b, l))


def refined_uniform_sample(m: int, hi: float = 0.5) -> SortedSample:
    """``{hi * 2k / m : k = 1..m/2}`` with every value taken twice."""
    if m < 2 or m % 2:
        raise DomainError("refined uniform sample needs an even size m >= 2")
    grid = hi * 2.0 * np.arange(1, m // 2 + 1) / m
    return SortedSample(np.repeat(grid, 2), assume_sorted=True)
