"""Closed-form laws of depth values evaluated across two distributions.

``CrossDepthLaw(kind, outer, inner)`` is the law of ``D(Y; inner)`` for
``Y ~ outer``.  With ``F``/``f`` the outer cdf/pdf and ``G``/``g`` the inner
ones, and the density ratio ``rho(u) = f(G^-1(u)) / g(G^-1(u))``:

* HD on [0, 1/2]:  cdf ``F(G^-1(z)) + 1 - F(G^-1(1 - z))``,
  pdf ``rho(z) + rho(1 - z)``.
* SD on [0, 1/2]:  with ``t = 1/2 - sqrt(1/4 - z/2)`` the cdf is the HD cdf at
  ``t`` and the pdf is ``(rho(t) + rho(1 - t)) / (2 sqrt(1 - 2z))``.
* QT on [0, 1]:    cdf ``F(G^-1(z))``, pdf ``rho(z)``.

Quantile levels are clamped to ``[1e-12, 1 - 1e-12]`` before inversion;
the cdf endpoints are returned exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .depth_transforms import DepthKind
from .distributions import ContinuousDistribution, DomainError, SdReference, UniformInterval

__all__ = ["SingularityError", "CrossDepthLaw", "reference_law", "QUANTILE_CLAMP", "PDF_FLOOR"]

QUANTILE_CLAMP = 1e-12
PDF_FLOOR = 1e-300


class SingularityError(ArithmeticError):
    """A density ratio or prefactor cannot be evaluated finitely."""


def reference_law(kind: DepthKind | str) -> ContinuousDistribution:
    """Law of ``D(X; P)`` for ``X ~ P``: U(0,1/2), the SD law, or U(0,1)."""
    kind = DepthKind(kind)
    if kind is DepthKind.HD:
        return UniformInterval(0.0, 0.5)
    if kind is DepthKind.SD:
        return SdReference()
    if kind is DepthKind.QT:
        return UniformInterval(0.0, 1.0)
    raise DomainError("no closed-form reference law for kernel depth")


def _hd_level(z):
    # 1/2 - sqrt(1/4 - z/2), written without cancellation near z = 0
    return z / (1.0 + np.sqrt(1.0 - 2.0 * z))


@dataclass(frozen=True, eq=False)
class CrossDepthLaw:
    kind: DepthKind
    outer: ContinuousDistribution
    inner: ContinuousDistribution

    def __post_init__(self):
        object.__setattr__(self, "kind", DepthKind(self.kind))
        if self.kind is DepthKind.KD:
            raise DomainError("cross laws are defined for HD, SD and QT only")

    @property
    def support(self) -> tuple[float, float]:
        return self.kind.support

    # --- building blocks -------------------------------------------------

    def _lower_tail(self, u):
        """``F(G^-1(u))`` for levels ``u`` in [0, 1/2]."""
        u = np.clip(u, QUANTILE_CLAMP, 1.0 - QUANTILE_CLAMP)
        return self.outer._cdf(self.inner._quantile(u))

    def _upper_tail(self, w):
        """``1 - F(G^-1(1 - w))`` for upper-tail levels ``w``."""
        w = np.clip(w, QUANTILE_CLAMP, 1.0 - QUANTILE_CLAMP)
        return self.outer._sf(self.inner._isf(w))

    def _ratio_at(self, x):
        num = self.outer._pdf(x)
        den = self.inner._pdf(x)
        if np.any(den < PDF_FLOOR):
            raise SingularityError("inner density underflows at an evaluation point")
        return num / den

    def ratio_lower(self, u):
        """Density ratio at the inner ``u``-quantile."""
        u = np.clip(np.asarray(u, dtype=float), QUANTILE_CLAMP, 1.0 - QUANTILE_CLAMP)
        return self._ratio_at(self.inner._quantile(u))

    def ratio_upper(self, w):
        """Density ratio at the inner ``(1 - w)``-quantile."""
        w = np.clip(np.asarray(w, dtype=float), QUANTILE_CLAMP, 1.0 - QUANTILE_CLAMP)
        return self._ratio_at(self.inner._isf(w))

    def _hd_cdf(self, t):
        return self._lower_tail(t) + self._upper_tail(t)

    def _check(self, z):
        lo, hi = self.support
        if np.any(~((z >= lo) & (z <= hi))):
            raise DomainError(f"{self.kind.value} law is supported on [{lo}, {hi}]")

    # --- public evaluation -----------------------------------------------

    def cdf(self, z):
        zz = np.asarray(z, dtype=float)
        self._check(zz)
        lo, hi = self.support
        if self.kind is DepthKind.HD:
            vals = self._hd_cdf(zz)
        elif self.kind is DepthKind.SD:
            vals = self._hd_cdf(_hd_level(zz))
        else:
            # QT: use the upper tail above the median for accuracy near 1
            vals = np.where(zz <= 0.5, self._lower_tail(zz), 1.0 - self._upper_tail(1.0 - zz))
        vals = np.where(zz <= lo, 0.0, np.where(zz >= hi, 1.0, np.clip(vals, 0.0, 1.0)))
        return float(vals) if np.ndim(z) == 0 else vals

    def pdf(self, z):
        zz = np.asarray(z, dtype=float)
        self._check(zz)
        if self.kind is DepthKind.HD:
            vals = self.ratio_lower(zz) + self.ratio_upper(zz)
        elif self.kind is DepthKind.SD:
            if np.any(zz >= 0.5 - np.finfo(float).eps):
                raise SingularityError("SD cross density is unbounded at z = 1/2")
            t = _hd_level(zz)
            vals = (self.ratio_lower(t) + self.ratio_upper(t)) / (2.0 * np.sqrt(1.0 - 2.0 * zz))
        else:
            vals = np.where(zz <= 0.5, self.ratio_lower(zz), self.ratio_upper(1.0 - zz))
        return float(vals) if np.ndim(z) == 0 else vals

    # --- regular coordinate -----------------------------------------------
    #
    # For HD and SD the natural coordinate is the halfspace level
    # t in [0, 1/2]; SD maps it to z = 2t(1 - t), which is exactly the
    # substitution y = sqrt(1 - 2z) = 1 - 2t.  In t both the cross density
    # and the reference density (2) are free of the SD prefactor.

    def regular_support(self) -> tuple[float, float]:
        return self.support if self.kind is DepthKind.QT else (0.0, 0.5)

    def to_depth(self, v):
        v = np.asarray(v, dtype=float)
        if self.kind is DepthKind.SD:
            return 2.0 * v * (1.0 - v)
        return v

    def regular_pdf(self, v):
        """Density of the law expressed in the regular coordinate."""
        v = np.asarray(v, dtype=float)
        if self.kind is DepthKind.QT:
            return np.where(v <= 0.5, self.ratio_lower(v), self.ratio_upper(1.0 - v))
        return self.ratio_lower(v) + self.ratio_upper(v)

    def regular_reference_pdf(self, v):
        """Density of the matching reference law in the regular coordinate."""
        return np.full(np.shape(v), 1.0 if self.kind is DepthKind.QT else 2.0)

    def cdf_regular(self, v):
        """cdf at ``to_depth(v)``, routed through the public ``cdf``."""
        z = np.clip(self.to_depth(v), *self.support)
        return self.cdf(z)

    def reduces_to_reference(self, grid: int = 257, tol: float = 1e-9) -> bool:
        ref = reference_law(self.kind)
        lo, hi = self.support
        z = np.linspace(lo, hi, grid)
        return bool(np.max(np.abs(self.cdf(z) - ref.cdf(z))) <= tol)
