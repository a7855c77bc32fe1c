"""Vector-lattice primitives on finite index sets.

Supports, entrywise lattice operations, and three numerically checkable
criteria for inclusion of the closed ideal generated by one nonnegative
vector in the ideal generated by another.  On a finite grid the measure
algebra degenerates to plain index sets, so all three criteria must agree
with simple mask inclusion; the slower criteria exist as cross-checks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import DimensionMismatchError, NegativeEntryError, SemanticsMismatchError

#: Relative threshold used to decide that an entry is zero.
DEFAULT_SUPPORT_RTOL = 1e-12

#: Acceptance threshold for the o(s) ideal-inclusion criterion.
LITTLE_O_TOL = 1e-6


class MaskSemantics(enum.Enum):
    """Reading of a support mask.

    ``ALMOST_EVERYWHERE`` is the integral-norm reading (null sets do not
    matter); ``OPEN`` is the sup-norm reading where the support is the open
    set of points at which the function is nonzero.  On a grid both reduce
    to the same index set, but masks of different semantics are never
    comparable.
    """

    ALMOST_EVERYWHERE = "ae"
    OPEN = "open"


@dataclass(frozen=True)
class SupportMask:
    """Set of grid indices carrying the nonzero mass of a vector."""

    indices: frozenset
    dim: int
    semantics: MaskSemantics = MaskSemantics.ALMOST_EVERYWHERE

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        idx = frozenset(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        for i in idx:
            if not 0 <= i < self.dim:
                raise ValueError(f"index {i} outside [0, {self.dim})")

    def _check_comparable(self, other: "SupportMask") -> None:
        if self.dim != other.dim:
            raise SemanticsMismatchError(
                f"mask dims differ: {self.dim} vs {other.dim}"
            )
        if self.semantics is not other.semantics:
            raise SemanticsMismatchError(
                f"mask semantics differ: {self.semantics} vs {other.semantics}"
            )

    def issubset(self, other: "SupportMask") -> bool:
        self._check_comparable(other)
        return self.indices <= other.indices

    def union(self, other: "SupportMask") -> "SupportMask":
        self._check_comparable(other)
        return SupportMask(self.indices | other.indices, self.dim, self.semantics)

    def intersection(self, other: "SupportMask") -> "SupportMask":
        self._check_comparable(other)
        return SupportMask(self.indices & other.indices, self.dim, self.semantics)

    def indicator(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[sorted(self.indices)] = 1.0
        return out

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(sorted(self.indices))


def as_vector(v, *, allow_complex: bool = True) -> np.ndarray:
    """Validate and return ``v`` as a 1-d array with finite entries."""
    arr = np.asarray(v)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-d vector, got shape {arr.shape}")
    if not allow_complex and np.iscomplexobj(arr):
        raise TypeError("real vector required")
    if arr.size and not np.all(np.isfinite(arr) if not np.iscomplexobj(arr)
                               else np.isfinite(arr.real) & np.isfinite(arr.imag)):
        raise ValueError("vector has non-finite entries")
    return arr


def _require_nonneg(v: np.ndarray, name: str) -> np.ndarray:
    arr = as_vector(v, allow_complex=False).astype(float)
    if arr.size and arr.min() < 0:
        i = int(np.argmin(arr))
        raise NegativeEntryError(arr[i], (name, i))
    return arr


def support_threshold(v: np.ndarray, tau: Optional[float] = None) -> float:
    """Resolve the zero threshold for ``v``: scale-invariant by default."""
    if tau is not None:
        if tau < 0:
            raise ValueError("threshold must be >= 0")
        return float(tau)
    mags = np.abs(np.asarray(v))
    return DEFAULT_SUPPORT_RTOL * float(mags.max()) if mags.size else 0.0


def support(v, tau: Optional[float] = None,
            semantics: MaskSemantics = MaskSemantics.ALMOST_EVERYWHERE) -> SupportMask:
    """Indices where ``|v_i|`` exceeds the zero threshold ``tau``.

    With ``tau=None`` the threshold is ``1e-12 * max|v_i|``, so scaling the
    vector never changes its support.
    """
    arr = as_vector(v)
    t = support_threshold(arr, tau)
    idx = np.flatnonzero(np.abs(arr) > t)
    return SupportMask(frozenset(int(i) for i in idx), arr.size, semantics)


def mask_subseteq(a: SupportMask, b: SupportMask) -> bool:
    """Mask inclusion; the grid-level meaning of closed-ideal inclusion."""
    return a.issubset(b)


def meet(f, g) -> np.ndarray:
    f, g = _pair(f, g)
    return np.minimum(f, g)


def join(f, g) -> np.ndarray:
    f, g = _pair(f, g)
    return np.maximum(f, g)


def pos_part(f) -> np.ndarray:
    return np.maximum(as_vector(f, allow_complex=False).astype(float), 0.0)


def neg_part(f) -> np.ndarray:
    return np.maximum(-as_vector(f, allow_complex=False).astype(float), 0.0)


def modulus(f) -> np.ndarray:
    return np.abs(as_vector(f))


def _pair(f, g):
    f = as_vector(f, allow_complex=False).astype(float)
    g = as_vector(g, allow_complex=False).astype(float)
    if f.shape != g.shape:
        raise DimensionMismatchError(f"vector dims differ: {f.size} vs {g.size}")
    return f, g


@dataclass(frozen=True)
class LatticeOps:
    """Entrywise lattice data for a pair (f, g); pos/neg/modulus refer to f."""

    inf: np.ndarray
    sup: np.ndarray
    pos: np.ndarray
    neg: np.ndarray
    modulus: np.ndarray


def lattice_ops(f, g) -> LatticeOps:
    """Entrywise min, max, positive/negative part and modulus.

    ``f == pos - neg`` and ``modulus == pos + neg`` hold exactly in floating
    point, since each entry comes from a single max() against zero.
    """
    f, g = _pair(f, g)
    return LatticeOps(
        inf=np.minimum(f, g),
        sup=np.maximum(f, g),
        pos=np.maximum(f, 0.0),
        neg=np.maximum(-f, 0.0),
        modulus=np.abs(f),
    )


def pnorm(v, p: float = 2.0) -> float:
    """Vector p-norm, with ``p = inf`` for the sup norm."""
    arr = np.abs(np.asarray(v, dtype=complex))
    if not arr.size:
        return 0.0
    if np.isinf(p):
        return float(arr.max())
    if p < 1:
        raise ValueError("p must be >= 1")
    return float((arr ** p).sum() ** (1.0 / p))


def ideal_inclusion_by_mask(f, g, tau: Optional[float] = None) -> bool:
    """Reference criterion: support(f) contained in support(g)."""
    f = _require_nonneg(f, "f")
    g = _require_nonneg(g, "g")
    return mask_subseteq(support(f, tau), support(g, tau))


def ideal_inclusion_by_truncation(f, g, t_max: float = 1e4, p: float = 2.0,
                                  tol: Optional[float] = None) -> bool:
    """Truncation criterion: ``f /\\ (t_max * g)`` recovers ``f``.

    On a finite grid the truncation is exact once ``t_max`` dominates every
    ratio ``f_i / g_i`` over the support of ``f``, so the residual norm is
    either ~0 or bounded below by the smallest unrecovered entry.
    """
    f = _require_nonneg(f, "f")
    g = _require_nonneg(g, "g")
    if f.shape != g.shape:
        raise DimensionMismatchError(f"vector dims differ: {f.size} vs {g.size}")
    if tol is None:
        tol = 1e-9 * (1.0 + pnorm(f, p))
    residual = pnorm(f - np.minimum(f, t_max * g), p)
    return residual <= tol


def ideal_inclusion_little_o(f, g, s_grid: Optional[Iterable[float]] = None,
                             p: float = 2.0, tol: float = LITTLE_O_TOL) -> bool:
    """Small-parameter criterion: ``|| (g - s f)^- || = o(s)`` as s -> 0.

    Evaluates the ratio ``||(g - s f)^-|| / s`` along a decreasing grid of
    s values and accepts iff the final ratio is <= ``tol`` and the ratios
    are non-increasing over the last three grid points.  On a finite grid
    the ratio becomes exactly 0 for small s whenever the inclusion holds.
    """
    f = _require_nonneg(f, "f")
    g = _require_nonneg(g, "g")
    if f.shape != g.shape:
        raise DimensionMismatchError(f"vector dims differ: {f.size} vs {g.size}")
    if s_grid is None:
        s_grid = np.geomspace(1.0, 1e-9, 19)
    s_values = [float(s) for s in s_grid]
    if not s_values:
        raise ValueError("s_grid must be nonempty")
    if any(s <= 0 for s in s_values) or any(
            b >= a for a, b in zip(s_values, s_values[1:])):
        raise ValueError("s_grid must be strictly decreasing and positive")
    ratios = [pnorm(np.maximum(s * f - g, 0.0), p) / s for s in s_values]
    tail = ratios[-3:]
    non_increasing = all(b <= a * (1 + 1e-12) + 1e-300 for a, b in zip(tail, tail[1:]))
    return ratios[-1] <= tol and non_increasing
