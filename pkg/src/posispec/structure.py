"""Hypothesis checkers on nonnegative matrices.

Support graphs, irreducibility and period, support-expansion checks (global,
band-restricted), lattice-homomorphism detection, identity/power domination,
and super-fixed points.  All functions are pure; randomized checks take an
explicit seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import NegativeEntryError, ReducibleOperatorError
from .lattice import SupportMask, mask_subseteq, support, support_threshold
from .operators import Operator, apply, matrix_power


def _matrix_tau(m: np.ndarray, tau: Optional[float]) -> float:
    if tau is not None:
        if tau < 0:
            raise ValueError("threshold must be >= 0")
        return float(tau)
    return 1e-12 * float(np.abs(m).max()) if m.size else 0.0


def support_graph(T: Operator, tau: Optional[float] = None) -> np.ndarray:
    """Boolean adjacency matrix ``edges[src, dst]`` of the support digraph.

    There is an edge j -> i exactly when ``T[i, j] > tau``, i.e. mass at
    coordinate j shows up at coordinate i after one application.
    """
    t = _matrix_tau(T.matrix, tau)
    return (T.matrix > t).T


def _reachable(edges: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(edges.shape[0], dtype=bool)
    seen[start] = True
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(edges[u]):
                if not seen[v]:
                    seen[v] = True
                    nxt.append(int(v))
        frontier = nxt
    return seen


def is_irreducible(T: Operator, tau: Optional[float] = None) -> bool:
    """Strong connectivity of the support graph."""
    edges = support_graph(T, tau)
    if edges.shape[0] == 1:
        return True
    return bool(_reachable(edges, 0).all() and _reachable(edges.T, 0).all())


def period(T: Operator, tau: Optional[float] = None) -> int:
    """Cycle-length gcd of the support graph of an irreducible operator.

    Computed from breadth-first levels: every edge (u, v) contributes
    ``level[u] + 1 - level[v]`` to the gcd.  Raises ReducibleOperatorError
    when the graph is not strongly connected.
    """
    edges = support_graph(T, tau)
    n = edges.shape[0]
    if not is_irreducible(T, tau):
        raise ReducibleOperatorError("period is defined for irreducible operators only")
    level = np.full(n, -1)
    level[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(edges[u]):
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(int(v))
        frontier = nxt
    g = 0
    for u in range(n):
        for v in np.flatnonzero(edges[u]):
            g = math.gcd(g, int(level[u] + 1 - level[v]))
    if g == 0:
        raise ReducibleOperatorError("support graph has no cycle")
    return g


def period_by_cycle_enumeration(T: Operator, tau: Optional[float] = None,
                                max_dim: int = 9) -> int:
    """Brute-force oracle: gcd of the lengths of all simple cycles.

    Exponential; guarded to small dimensions and meant for cross-checking
    :func:`period`.
    """
    edges = support_graph(T, tau)
    n = edges.shape[0]
    if n > max_dim:
        raise ValueError(f"cycle enumeration limited to dim <= {max_dim}")
    lengths = set()

    def walk(start: int, node: int, depth: int, visited: set) -> None:
        for v in np.flatnonzero(edges[node]):
            v = int(v)
            if v == start:
                lengths.add(depth + 1)
            elif v > start and v not in visited:
                walk(start, v, depth + 1, visited | {v})

    for s in range(n):
        walk(s, s, 0, {s})
    if not lengths:
        raise ReducibleOperatorError("support graph has no cycle")
    return math.gcd(*lengths) if len(lengths) > 1 else lengths.pop()


def _vector_support(T: Operator, v: np.ndarray, tau: Optional[float]) -> SupportMask:
    return support(v, tau, semantics=T.space.mask_semantics)


def expands_support(T: Operator, f, horizon: int,
                    tau: Optional[float] = None) -> Optional[int]:
    """Smallest n in [1, horizon] with supp(T^n f) >= supp(T^(n-1) f).

    Returns None when no such n exists within the horizon.  Supports are
    taken with a scale-invariant threshold per iterate unless ``tau`` is
    given.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    vec = np.asarray(f, dtype=float)
    if vec.size and vec.min() < 0:
        i = int(np.argmin(vec))
        raise NegativeEntryError(vec[i], ("f", i))
    prev_mask = _vector_support(T, vec, tau)
    for n in range(1, horizon + 1):
        vec = apply(T, vec).real
        cur_mask = _vector_support(T, vec, tau)
        if mask_subseteq(prev_mask, cur_mask):
            return n
        prev_mask = cur_mask
    return None


@dataclass(frozen=True)
class ExpansionResult:
    """Support-expansion indices per canonical basis vector and random sample.

    ``per_basis[i]`` is the first n at which basis vector i expands (None if
    never within the horizon); random samples are a heuristic widening of the
    quantifier over the whole cone and are reported as sampled, not proved.
    """

    per_basis: tuple
    per_sample: tuple
    horizon: int
    seed: int
    all_satisfied: bool

    @property
    def failing_basis_indices(self) -> tuple:
        return tuple(i for i, n in enumerate(self.per_basis) if n is None)

    def to_dict(self) -> dict:
        return {
            "per_basis_vector": [
                {"index": i, "first_n": n} for i, n in enumerate(self.per_basis)
            ],
            "samples_first_n": list(self.per_sample),
            "all_satisfied": self.all_satisfied,
            "horizon": self.horizon,
            "quantifier": "basis vectors + seeded samples (sampled, not proved)",
        }


def expands_support_everywhere(T: Operator, horizon: int, samples: int = 25,
                               seed: int = 0,
                               tau: Optional[float] = None) -> ExpansionResult:
    """Check support expansion on all basis vectors plus seeded random cones.

    For expansion at n = 1 the basis-vector check is equivalent to the full
    quantifier (supports add under positive operators on a grid); for larger
    n the random samples only raise confidence.
    """
    dim = T.dim
    per_basis = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        per_basis.append(expands_support(T, e, horizon, tau))
    rng = np.random.default_rng(seed)
    per_sample = []
    for _ in range(samples):
        f = rng.uniform(0.0, 1.0, size=dim) * (rng.uniform(size=dim) < 0.7)
        if not f.any():
            f[int(rng.integers(dim))] = 1.0
        per_sample.append(expands_support(T, f, horizon, tau))
    ok = all(n is not None for n in per_basis) and all(
        n is not None for n in per_sample)
    return ExpansionResult(tuple(per_basis), tuple(per_sample), horizon,
                           seed, ok)


def expands_support_on_band(T: Operator, band: SupportMask,
                            tau: Optional[float] = None) -> bool:
    """Support expansion for every vector living on ``band``.

    On a grid this reduces, by additivity of supports, to all diagonal
    entries over the band being nonzero.
    """
    if len(band) == 0:
        raise ValueError("band must be nonempty")
    if band.dim != T.dim:
        raise ValueError(f"band dim {band.dim} != operator dim {T.dim}")
    t = _matrix_tau(T.matrix, tau)
    return all(T.matrix[i, i] > t for i in band)


def is_lattice_homomorphism(T: Operator, tau: Optional[float] = None,
                            pairs: int = 20, seed: int = 0) -> bool:
    """Whether T preserves suprema: at most one entry above tau per row.

    The row criterion decides; as a belt-and-braces check, T(f v g) is
    compared against Tf v Tg on seeded random pairs.
    """
    t = _matrix_tau(T.matrix, tau)
    row_ok = bool(((T.matrix > t).sum(axis=1) <= 1).all())
    rng = np.random.default_rng(seed)
    scale = float(np.abs(T.matrix).max()) + 1.0
    sample_ok = True
    for _ in range(pairs):
        f = rng.uniform(-1.0, 1.0, size=T.dim)
        g = rng.uniform(-1.0, 1.0, size=T.dim)
        lhs = apply(T, np.maximum(f, g))
        rhs = np.maximum(apply(T, f), apply(T, g))
        if np.abs(lhs - rhs).max() > max(1e-9, 10 * t) * scale:
            sample_ok = False
            break
    return row_ok and sample_ok


def dominates_identity(T: Operator) -> float:
    """Largest eps with ``T >= eps * id``: the smallest diagonal entry."""
    return float(np.diag(T.matrix).min())


@dataclass(frozen=True)
class DominationResult:
    """Largest eps with ``T^n >= eps * T^(n-1)`` entrywise."""

    n: int
    epsilon_max: float
    witness_entry: Optional[Tuple[int, int]]

    def to_dict(self) -> dict:
        return {"n": self.n, "epsilon_max": self.epsilon_max,
                "witness_entry": self.witness_entry}


def power_domination(T: Operator, n: int,
                     tau: Optional[float] = None) -> DominationResult:
    """Entrywise ratio bound between consecutive powers.

    ``epsilon_max`` is the minimum of ``(T^n)_{ij} / (T^(n-1))_{ij}`` over
    the support of ``T^(n-1)``; exactly 0 when the higher power vanishes on
    a support entry.  For n = 1 this is :func:`dominates_identity`.  If the
    lower power is the zero matrix the constraint is vacuous and the result
    is ``inf``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    low = matrix_power(T, n - 1).matrix
    high = matrix_power(T, n).matrix
    t_low = _matrix_tau(low, tau)
    t_high = _matrix_tau(high, tau)
    mask = low > t_low
    if not mask.any():
        return DominationResult(n, math.inf, None)
    ratios = np.where(high > t_high, high / np.where(mask, low, 1.0), 0.0)
    ratios = np.where(mask, ratios, math.inf)
    i, j = np.unravel_index(int(np.argmin(ratios)), ratios.shape)
    return DominationResult(n, float(ratios[i, j]), (int(i), int(j)))


@dataclass(frozen=True)
class SuperFixedResult:
    super_fixed: bool
    fixed: bool


def is_super_fixed(T: Operator, f, tau: float = 1e-9) -> SuperFixedResult:
    """Pointwise super-fixed check: ``Tf >= f`` entrywise (and fixedness)."""
    vec = np.asarray(f, dtype=float)
    if vec.size and vec.min() < 0:
        i = int(np.argmin(vec))
        raise NegativeEntryError(vec[i], ("f", i))
    out = apply(T, vec).real
    sup = bool(np.all(out >= vec - tau))
    scale = float(np.abs(vec).max()) if vec.size else 0.0
    fixed = bool(np.abs(out - vec).max() <= tau * scale) if vec.size else True
    return SuperFixedResult(super_fixed=sup, fixed=fixed)


def positive_diagonal_band(T: Operator, tau: Optional[float] = None) -> Optional[SupportMask]:
    """Band of coordinates with nonzero diagonal entry, or None if empty.

    This is the canonical band on which one-step support expansion holds.
    """
    t = _matrix_tau(T.matrix, tau)
    idx = frozenset(int(i) for i in np.flatnonzero(np.diag(T.matrix) > t))
    if not idx:
        return None
    return SupportMask(idx, T.dim, T.space.mask_semantics)
