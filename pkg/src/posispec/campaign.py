"""Seeded random-matrix campaigns stratified by hypothesis family.

Each generator produces operators that satisfy the hypotheses of one engine
by construction; the campaign runs the matching engine on every instance and
collects soundness violations (all hypotheses passed, conclusion failed).
Instance seeds are spawned from the master seed, so results are reproducible
and independent of execution order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .fileio import operator_to_dict
from .lattice import SupportMask
from .operators import Operator, partition_operator, sequence_space
from .verdicts import (
    AnalysisOptions,
    TheoremVerdict,
    engine_dominates_identity,
    engine_lattice_homomorphism,
    engine_main_everywhere,
    engine_main_irreducible,
    engine_power_domination,
)

GENERATORS = (
    "StochasticPositiveDiag",
    "IrreducibleOneDiag",
    "DominatesId",
    "PowerDomination",
    "Unconstrained",
)


@dataclass(frozen=True)
class CampaignConfig:
    generator: str
    count: int = 100
    dim_min: int = 2
    dim_max: int = 10
    seed: int = 42
    epsilon: float = 0.3
    domination_n: int = 2
    options: AnalysisOptions = AnalysisOptions()

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r};"
                             f" choose from {GENERATORS}")
        if self.count < 1 or self.dim_min < 1 or self.dim_max < self.dim_min:
            raise ValueError("count and dim range must be positive and ordered")


def _random_stochastic(rng: np.random.Generator, dim: int,
                       density: float = 0.6) -> np.ndarray:
    m = rng.uniform(0.0, 1.0, size=(dim, dim))
    m *= rng.uniform(size=(dim, dim)) < density
    for i in range(dim):
        if m[i].sum() <= 0:
            m[i, rng.integers(dim)] = 1.0
    return m / m.sum(axis=1, keepdims=True)


def gen_stochastic_positive_diag(rng: np.random.Generator, dim: int) -> Operator:
    """Row-stochastic with strictly positive diagonal: spr = 1, power bounded,
    one-step support expansion everywhere."""
    m = _random_stochastic(rng, dim)
    np.fill_diagonal(m, np.diag(m) + rng.uniform(0.05, 1.0, size=dim))
    m /= m.sum(axis=1, keepdims=True)
    return Operator(m, sequence_space(dim), f"stoch-posdiag-d{dim}")


def gen_irreducible_one_diag(rng: np.random.Generator, dim: int) -> Operator:
    """Irreducible stochastic with exactly one nonzero diagonal entry."""
    m = np.zeros((dim, dim))
    order = rng.permutation(dim)
    for k in range(dim):
        m[order[k], order[(k + 1) % dim]] = rng.uniform(0.2, 1.0)
    extra = rng.uniform(size=(dim, dim)) < 0.3
    np.fill_diagonal(extra, False)
    m[extra] += rng.uniform(0.1, 1.0, size=int(extra.sum()))
    lazy = int(rng.integers(dim))
    m[lazy, lazy] = rng.uniform(0.2, 1.0)
    m /= m.sum(axis=1, keepdims=True)
    return Operator(m, sequence_space(dim), f"one-diag-d{dim}-lazy{lazy}")


def gen_dominates_id(rng: np.random.Generator, dim: int, eps: float) -> Operator:
    """Convex combination ``eps * I + (1 - eps) * S`` of the identity and a
    random stochastic matrix."""
    s = _random_stochastic(rng, dim)
    m = eps * np.eye(dim) + (1.0 - eps) * s
    return Operator(m, sequence_space(dim), f"dom-id-d{dim}-e{eps}")


def gen_power_domination(rng: np.random.Generator, dim_hint: int,
                         eps: float) -> Operator:
    """Random circular partition operator; its two-step domination constant
    is the overlap by construction."""
    num_blocks = int(rng.integers(2, 6))
    block_size = int(rng.integers(1, 5))
    pairing = list(rng.permutation(num_blocks))
    return partition_operator(num_blocks, block_size, pairing, eps)


def gen_unconstrained(rng: np.random.Generator, dim: int) -> Operator:
    """Random nonneg matrix rescaled to spectral radius near 1; hypotheses
    hold only by chance."""
    m = rng.uniform(0.0, 1.0, size=(dim, dim))
    m *= rng.uniform(size=(dim, dim)) < rng.uniform(0.3, 0.9)
    spr = float(np.abs(np.linalg.eigvals(m)).max())
    if spr > 0:
        m *= rng.uniform(0.7, 1.05) / spr
    return Operator(m, sequence_space(dim), f"unconstrained-d{dim}")


@dataclass(frozen=True)
class InstanceResult:
    index: int
    seed: int
    label: str
    verdicts: Tuple[TheoremVerdict, ...]
    payload: dict

    @property
    def all_passed(self) -> bool:
        return any(v.report.all_passed for v in self.verdicts)

    @property
    def violations(self) -> List[TheoremVerdict]:
        return [v for v in self.verdicts if not v.consistent]


@dataclass(frozen=True)
class CampaignSummary:
    config: CampaignConfig
    instances: int
    hypothesis_pass_count: int
    violations: Tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "generator": self.config.generator,
            "count": self.config.count,
            "dim_range": [self.config.dim_min, self.config.dim_max],
            "seed": self.config.seed,
            "instances": self.instances,
            "hypothesis_pass_count": self.hypothesis_pass_count,
            "violations": list(self.violations),
        }


def _build_instance(config: CampaignConfig, rng: np.random.Generator) -> Operator:
    dim = int(rng.integers(config.dim_min, config.dim_max + 1))
    if config.generator == "StochasticPositiveDiag":
        return gen_stochastic_positive_diag(rng, dim)
    if config.generator == "IrreducibleOneDiag":
        return gen_irreducible_one_diag(rng, dim)
    if config.generator == "DominatesId":
        return gen_dominates_id(rng, dim, config.epsilon)
    if config.generator == "PowerDomination":
        return gen_power_domination(rng, dim, config.epsilon)
    return gen_unconstrained(rng, dim)


def _run_instance(config: CampaignConfig, index: int,
                  child_seed: np.random.SeedSequence) -> InstanceResult:
    rng = np.random.default_rng(child_seed)
    T = _build_instance(config, rng)
    opts = config.options
    if config.generator == "StochasticPositiveDiag":
        verdicts = (engine_main_everywhere(T, opts),)
    elif config.generator == "IrreducibleOneDiag":
        diag = np.flatnonzero(np.diag(T.matrix) > 0)
        band = SupportMask(frozenset(int(i) for i in diag), T.dim,
                           T.space.mask_semantics)
        verdicts = (engine_main_irreducible(T, band, opts),)
    elif config.generator == "DominatesId":
        verdicts = (engine_dominates_identity(T, opts),)
    elif config.generator == "PowerDomination":
        verdicts = (engine_power_domination(T, config.domination_n, opts),)
    else:
        verdicts = (
            engine_main_everywhere(T, opts),
            engine_main_irreducible(T, None, opts),
            engine_lattice_homomorphism(T, opts),
            engine_dominates_identity(T, opts),
            engine_power_domination(T, config.domination_n, opts),
        )
    payload = None
    if any(not v.consistent for v in verdicts):
        payload = {
            "instance": index,
            "generator": config.generator,
            "seed": config.seed,
            "operator": operator_to_dict(T),
            "verdicts": [v.to_dict() for v in verdicts if not v.consistent],
        }
    return InstanceResult(index, config.seed, T.label, verdicts, payload or {})


def run_campaign(config: CampaignConfig, jobs: int = 1) -> CampaignSummary:
    """Run every instance and aggregate; deterministic by seed ordering."""
    children = np.random.SeedSequence(config.seed).spawn(config.count)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(
                lambda pair: _run_instance(config, pair[0], pair[1]),
                enumerate(children)))
    else:
        results = [_run_instance(config, i, c) for i, c in enumerate(children)]
    results.sort(key=lambda r: r.index)
    violations = tuple(r.payload for r in results if r.payload)
    return CampaignSummary(
        config=config,
        instances=len(results),
        hypothesis_pass_count=sum(1 for r in results if r.all_passed),
        violations=violations,
    )
