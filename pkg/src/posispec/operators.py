"""Construction and application of nonnegative matrix operators.

An :class:`Operator` is a dense nonnegative square matrix together with the
semantics of the space it acts on: an L^p grid with quadrature weights, a
grid of a compact interval with the sup norm, or a bare sequence space.
Builders cover dense input, discretized integral kernels, finite-rank sums
of tensor products, and block-partition averaging operators.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    NegativeEntryError,
    SolverFailure,
)
from .lattice import MaskSemantics, as_vector


class SpaceKind(enum.Enum):
    LP_GRID = "lp"
    CK_GRID = "ck"
    SEQUENCE = "seq"


@dataclass(frozen=True, eq=False)
class SpaceSemantics:
    """Which space a matrix is understood to act on.

    ``weights`` are quadrature weights (length ``dim``, strictly positive)
    and are present exactly for LP_GRID; ``coords`` are grid coordinates,
    present for both grid kinds.  Sequence spaces use counting measure.
    """

    kind: SpaceKind
    dim: int
    p: float = 2.0
    interval: Optional[tuple] = None
    weights: Optional[np.ndarray] = None
    coords: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.kind is not SpaceKind.CK_GRID and self.p < 1:
            raise ValueError("p must be >= 1")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (self.dim,):
                raise DimensionMismatchError("weights length must equal dim")
            if w.min() <= 0:
                raise ValueError("quadrature weights must be strictly positive")
            w.flags.writeable = False
            object.__setattr__(self, "weights", w)
        if self.coords is not None:
            x = np.asarray(self.coords, dtype=float)
            if x.shape != (self.dim,):
                raise DimensionMismatchError("coords length must equal dim")
            if x.size > 1 and np.any(np.diff(x) <= 0):
                raise ValueError("coords must be strictly increasing")
            x.flags.writeable = False
            object.__setattr__(self, "coords", x)

    @property
    def mask_semantics(self) -> MaskSemantics:
        return (MaskSemantics.OPEN if self.kind is SpaceKind.CK_GRID
                else MaskSemantics.ALMOST_EVERYWHERE)

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "p": None if math.isinf(self.p) else self.p}
        if self.interval is not None:
            out["a"], out["b"] = float(self.interval[0]), float(self.interval[1])
        return out


def lp_grid(dim: int, p: float = 2.0, interval: tuple = (0.0, 1.0)) -> SpaceSemantics:
    """Midpoint grid of ``interval`` with uniform quadrature weights."""
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError("interval must have positive length")
    h = (b - a) / dim
    coords = a + h * (np.arange(dim) + 0.5)
    weights = np.full(dim, h)
    return SpaceSemantics(SpaceKind.LP_GRID, dim, p, (a, b), weights, coords)


def ck_grid(dim: int, interval: tuple = (-1.0, 1.0)) -> SpaceSemantics:
    """Endpoint-inclusive grid of a compact interval, sup-norm semantics."""
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError("interval must have positive length")
    if dim < 2:
        raise ValueError("a CK grid needs at least both endpoints")
    coords = np.linspace(a, b, dim)
    return SpaceSemantics(SpaceKind.CK_GRID, dim, math.inf, (a, b), None, coords)


def sequence_space(dim: int, p: float = 2.0) -> SpaceSemantics:
    return SpaceSemantics(SpaceKind.SEQUENCE, dim, p)


@dataclass(frozen=True)
class Functional:
    """Nonnegative functional given by coefficients against the space measure.

    On an LP grid the pairing is ``sum_j c_j w_j v_j`` (integration against a
    density); on CK grids and sequence spaces it is the raw dot product, so
    point evaluations are coordinate functionals.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 1:
            raise DimensionMismatchError("coefficients must be a vector")
        if c.size and c.min() < 0:
            i = int(np.argmin(c))
            raise NegativeEntryError(c[i], ("coefficients", i))
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    def row(self, space: SpaceSemantics) -> np.ndarray:
        if self.coefficients.size != space.dim:
            raise DimensionMismatchError("functional dim does not match space")
        if space.kind is SpaceKind.LP_GRID:
            return self.coefficients * space.weights
        return self.coefficients.copy()

    def pair(self, v, space: SpaceSemantics) -> float:
        return float(self.row(space) @ as_vector(v, allow_complex=False))


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense nonnegative square matrix with space semantics."""

    matrix: np.ndarray
    space: SpaceSemantics
    label: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"matrix must be square, got {m.shape}")
        if m.shape[0] != self.space.dim:
            raise DimensionMismatchError(
                f"matrix dim {m.shape[0]} does not match space dim {self.space.dim}")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix has non-finite entries")
        if m.size and m.min() < 0:
            i, j = np.unravel_index(int(np.argmin(m)), m.shape)
            raise NegativeEntryError(m[i, j], (int(i), int(j)))
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.space.dim

    def with_label(self, label: str) -> "Operator":
        return Operator(self.matrix, self.space, label)


def from_dense(rows, space: Optional[SpaceSemantics] = None, label: str = "") -> Operator:
    """Build an operator from a dense array.

    Entries in ``(-clip, 0)`` with ``clip = 1e-12 * (1 + max|entry|)`` are
    treated as roundoff and clipped to 0; anything more negative raises
    :class:`NegativeEntryError`.
    """
    m = np.array(rows, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"matrix must be square, got {m.shape}")
    clip = 1e-12 * (1.0 + float(np.abs(m).max())) if m.size else 0.0
    low = m.min() if m.size else 0.0
    if low < -clip:
        i, j = np.unravel_index(int(np.argmin(m)), m.shape)
        raise NegativeEntryError(m[i, j], (int(i), int(j)))
    m[m < 0] = 0.0
    if space is None:
        space = sequence_space(m.shape[0])
    return Operator(m, space, label)


def kernel_on_grid(k_sampler: Callable, m: int, domain: tuple = (0.0, 1.0),
                   p: float = 2.0, label: str = "") -> Operator:
    """Discretize an integral kernel by the midpoint rule.

    Entry ``(i, j)`` is ``w_j * k(x_i, x_j)`` with uniform weights
    ``w_j = (b - a) / m``, so applying the matrix is the quadrature
    approximation of integrating the kernel against a function.
    """
    if m < 2:
        raise ValueError("grid size must be >= 2")
    space = lp_grid(m, p, domain)
    x = space.coords
    X, Y = np.meshgrid(x, x, indexing="ij")
    try:
        vals = np.asarray(k_sampler(X, Y), dtype=float)
        if vals.shape != (m, m):
            raise TypeError
    except TypeError:
        vals = np.array([[float(k_sampler(xi, xj)) for xj in x] for xi in x])
    if not np.all(np.isfinite(vals)):
        raise ValueError("kernel sampler returned non-finite values")
    if vals.min() < 0:
        i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
        raise NegativeEntryError(vals[i, j], (int(i), int(j)))
    return Operator(vals * space.weights[None, :], space,
                    label or f"kernel-m{m}")


def finite_rank(e_list: Sequence, alpha_list: Sequence[Functional],
                space: SpaceSemantics, label: str = "") -> Operator:
    """Sum of tensor products ``e_j (x) alpha_j`` as a dense operator."""
    if len(e_list) != len(alpha_list):
        raise DimensionMismatchError(
            f"{len(e_list)} vectors but {len(alpha_list)} functionals")
    if not e_list:
        raise ValueError("at least one (vector, functional) pair required")
    m = np.zeros((space.dim, space.dim))
    for e, alpha in zip(e_list, alpha_list):
        ev = as_vector(e, allow_complex=False).astype(float)
        if ev.size != space.dim:
            raise DimensionMismatchError("vector dim does not match space")
        if ev.size and ev.min() < 0:
            i = int(np.argmin(ev))
            raise NegativeEntryError(ev[i], ("e", i))
        m += np.outer(ev, alpha.row(space))
    return Operator(m, space, label or f"finite-rank-{len(e_list)}")


def partition_operator(num_blocks: int, block_size: int,
                       pairing: Optional[Sequence[int]] = None,
                       overlap: float = 0.0, label: str = "") -> Operator:
    """Block-averaging operator on a circle of ``num_blocks * block_size`` cells.

    The circle splits into blocks I_0, ..., I_{N-1} of measure 1 (cells of
    measure 1/block_size).  The operator integrates over each I_n and writes
    the result onto a target profile that overlaps I_n with the given mass
    and puts the remaining ``1 - overlap`` onto I_{pairing[n]}.  At overlap 0
    the target is exactly the indicator of I_{pairing[n]}; at overlap 1 it is
    the indicator of I_n, making the operator an idempotent block average.
    Fractional overlaps keep the target mass profile exact even when
    ``overlap * block_size`` is not an integer.
    """
    if num_blocks < 2:
        raise ValueError("need at least 2 blocks")
    if block_size < 1:
        raise ValueError("block_size must be >= 1")
    if not 0.0 <= overlap <= 1.0:
        raise ValueError("overlap must lie in [0, 1]")
    if pairing is None:
        pairing = [(n + 1) % num_blocks for n in range(num_blocks)]
    pairing = [int(t) for t in pairing]
    if sorted(pairing) != list(range(num_blocks)):
        raise ValueError(f"pairing must be a permutation of 0..{num_blocks - 1}")

    dim = num_blocks * block_size
    profiles = np.zeros((num_blocks, dim))
    for n, target in enumerate(pairing):
        profiles[n, n * block_size:(n + 1) * block_size] += overlap
        profiles[n, target * block_size:(target + 1) * block_size] += 1.0 - overlap
    block_of = np.repeat(np.arange(num_blocks), block_size)
    matrix = profiles[block_of].T / block_size
    space = lp_grid(dim, 2.0, (0.0, float(num_blocks)))
    return Operator(matrix, space,
                    label or f"partition-N{num_blocks}-b{block_size}")


def apply(T: Operator, f) -> np.ndarray:
    """Matrix-vector product ``T f`` (complex input allowed)."""
    v = as_vector(f)
    if v.size != T.dim:
        raise DimensionMismatchError(f"vector dim {v.size} != operator dim {T.dim}")
    return T.matrix @ v


def matrix_power(T: Operator, n: int) -> Operator:
    """``T^n`` with ``T^0`` the identity."""
    if n < 0:
        raise ValueError("power must be >= 0")
    return Operator(np.linalg.matrix_power(T.matrix, n), T.space,
                    f"{T.label or 'T'}^{n}")


def cesaro_mean(T: Operator, n: int) -> Operator:
    """Average ``(T^0 + ... + T^(n-1)) / n``; still nonnegative."""
    if n < 1:
        raise ValueError("Cesaro order must be >= 1")
    power = np.eye(T.dim)
    acc = power.copy()
    for _ in range(n - 1):
        power = power @ T.matrix
        acc += power
    return Operator(acc / n, T.space, f"cesaro-{n}({T.label or 'T'})")


def induced_inf_norm(m: np.ndarray) -> float:
    return float(np.abs(m).sum(axis=1).max()) if m.size else 0.0


def induced_one_norm(m: np.ndarray, weights: Optional[np.ndarray] = None) -> float:
    """Weighted induced 1-norm; counting measure when weights are absent."""
    if not m.size:
        return 0.0
    if weights is None:
        return float(np.abs(m).sum(axis=0).max())
    col = (weights[:, None] * np.abs(m)).sum(axis=0) / weights
    return float(col.max())


@dataclass(frozen=True)
class PowerBound:
    """Empirical power-boundedness estimate over a finite horizon."""

    sup_norm: float
    norm_used: str
    bounded_guess: bool
    norms_inf: tuple
    norms_one: tuple
    spectral_radius: float

    def to_dict(self) -> dict:
        return {
            "sup_norm": self.sup_norm,
            "norm_used": self.norm_used,
            "bounded_guess": self.bounded_guess,
            "spectral_radius": self.spectral_radius,
        }


def power_bound_estimate(T: Operator, horizon: int, tol: float = 1e-9) -> PowerBound:
    """Max induced norm of ``T^n`` for ``n <= horizon`` plus a boundedness guess.

    Sup-norm spaces (CK grids, sequence spaces with p = inf) use the induced
    inf-norm; for every other space the true induced weighted-p norm is
    bracketed by the induced (weighted) 1-norm and the inf-norm, and the
    larger of the two envelopes is reported.  ``bounded_guess`` is true when
    the norm sequence stops growing over the last quarter of the horizon or
    the spectral radius is ``<= 1 + tol``.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    weights = T.space.weights
    sup_space = (T.space.kind is SpaceKind.CK_GRID
                 or (T.space.kind is SpaceKind.SEQUENCE and math.isinf(T.space.p)))
    norms_inf, norms_one, used = [], [], []
    power = np.eye(T.dim)
    for _ in range(horizon):
        power = power @ T.matrix
        ninf = induced_inf_norm(power)
        none = induced_one_norm(power, weights)
        norms_inf.append(ninf)
        norms_one.append(none)
        used.append(ninf if sup_space else max(ninf, none))
        if not np.all(np.isfinite(power)):
            raise SolverFailure("power iteration overflowed", partial=None)
    try:
        spr = float(np.abs(np.linalg.eigvals(T.matrix)).max())
    except np.linalg.LinAlgError:
        spr = math.inf
    tail = max(2, math.ceil(horizon / 4) + 1)
    recent = used[-tail:]
    non_increasing = all(b <= a * (1 + 1e-12) for a, b in zip(recent, recent[1:]))
    return PowerBound(
        sup_norm=float(max(used)),
        norm_used="inf" if sup_space else "1/inf-envelope",
        bounded_guess=bool(non_increasing or spr <= 1 + tol),
        norms_inf=tuple(norms_inf),
        norms_one=tuple(norms_one),
        spectral_radius=spr,
    )


def sinkhorn_balance(T: Operator, tol: float = 1e-12, max_iter: int = 20000) -> Operator:
    """Rescale rows and columns until the matrix is doubly stochastic.

    Preserves the zero pattern.  Fails for matrices without total support.
    """
    m = T.matrix.copy()
    if m.min() < 0 or np.any((m.sum(axis=0) == 0) | (m.sum(axis=1) == 0)):
        raise ValueError("sinkhorn_balance needs a nonneg matrix with no zero line")
    for _ in range(max_iter):
        m /= m.sum(axis=1, keepdims=True)
        m /= m.sum(axis=0, keepdims=True)
        err = max(np.abs(m.sum(axis=1) - 1).max(), np.abs(m.sum(axis=0) - 1).max())
        if err <= tol:
            return Operator(m, T.space, T.label or "balanced")
    raise SolverFailure(f"sinkhorn balancing did not reach {tol}", partial=m)
