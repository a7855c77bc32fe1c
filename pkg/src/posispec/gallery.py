"""Named, parameterized scenario reproductions with golden assertions.

Each scenario builds a deterministic operator and a list of named
assertions that pin its expected behaviour: the weakly-expanding
counterexample on a compact interval grid, the positive finite-rank family
with a common fixed vector, the diagonal-strip kernel operator, banded
stochastic sequence operators, and circular block-partition operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from .errors import UnknownScenarioError
from .lattice import support
from .operators import (
    Functional,
    Operator,
    apply,
    ck_grid,
    finite_rank,
    kernel_on_grid,
    matrix_power,
    partition_operator,
    power_bound_estimate,
    sequence_space,
    sinkhorn_balance,
)
from .spectral import (
    PowerConvergence,
    classify_power_convergence,
    eigenvalues,
    mean_ergodic_projection,
    rank_tolerance,
    unimodular_point_spectrum,
)
from .structure import (
    expands_support_everywhere,
    is_irreducible,
    period,
    power_domination,
)
from .verdicts import AnalysisOptions, engine_convergence, engine_main_everywhere, \
    engine_main_irreducible, engine_power_domination
from .lattice import SupportMask


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    label: str
    parameters: dict
    assertions: tuple
    data: dict

    @property
    def all_passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "label": self.label,
            "parameters": self.parameters,
            "assertions": [a.to_dict() for a in self.assertions],
            "all_passed": self.all_passed,
            "data": self.data,
        }


def _assert_close(name: str, value: float, target: float, tol: float) -> Assertion:
    err = abs(value - target)
    return Assertion(name, err <= tol, f"|{value:.12g} - {target:.12g}| = {err:.3g} (tol {tol:g})")


def _grid_closure(indices: frozenset, dim: int) -> frozenset:
    """One grid-step topological closure of an index set."""
    out = set(indices)
    for i in indices:
        out.update(j for j in (i - 1, i + 1) if 0 <= j < dim)
    return frozenset(out)


def build_weakly_expanding(m: int = 201) -> Operator:
    """Finite-rank operator on C([-1, 1]) grid whose closed supports expand
    everywhere while the open supports do not, making -1 an eigenvalue."""
    if m % 2 == 0 or m < 5:
        raise ValueError("m must be odd and >= 5 so the grid holds -1, 0, 1")
    space = ck_grid(m, (-1.0, 1.0))
    x = space.coords
    hat = 1.0 - np.abs(x)
    left_ramp = np.where(x <= 0, np.abs(x), 0.0)
    right_ramp = np.where(x >= 0, np.abs(x), 0.0)
    half_integral = Functional(np.full(m, 0.5 * (2.0 / m)))
    eval_right = Functional(np.eye(m)[m - 1])
    eval_left = Functional(np.eye(m)[0])
    return finite_rank([hat, left_ramp, right_ramp],
                       [half_integral, eval_right, eval_left],
                       space, label=f"weakly-expanding-m{m}")


def _run_weakly_expanding(overrides: dict) -> ScenarioReport:
    m = int(overrides.get("m", 201))
    T = build_weakly_expanding(m)
    opts = AnalysisOptions(horizon=int(overrides.get("horizon", 2 * m)))
    spectrum = eigenvalues(T)
    ones = np.ones(m)
    fixed_defect = float(np.abs(apply(T, ones) - ones).max())
    nearest_minus_one = min(abs(v + 1.0) for v in spectrum.values)
    expansion = expands_support_everywhere(T, opts.horizon_for(T), samples=25, seed=0)
    witnesses = expansion.failing_basis_indices
    pb = power_bound_estimate(T, 8)
    verdict = engine_main_everywhere(T, opts, spectrum)

    e0 = np.zeros(m)
    e0[0] = 1.0
    image_mask = support(apply(T, e0).real, semantics=T.space.mask_semantics)
    closure = _grid_closure(image_mask.indices, m)
    gap = (0 not in image_mask.indices) and (0 in closure)

    assertions = (
        _assert_close("fixed_vector_one", fixed_defect, 0.0, 2.0 / m),
        _assert_close("eigenvalue_minus_one", nearest_minus_one, 0.0, 1e-8),
        Assertion("expansion_fails_exactly_at_endpoints",
                  witnesses == (0, m - 1) and all(
                      n is not None for n in expansion.per_sample),
                  f"failing basis indices: {list(witnesses)}"),
        _assert_close("operator_norm_one", pb.sup_norm, 1.0, 1e-12),
        _assert_close("spectral_radius_one", spectrum.spr, 1.0, 1e-9),
        Assertion("closed_vs_open_support_gap", gap,
                  "grid closure of supp(T e_0) reaches the endpoint the open "
                  "support misses"),
        Assertion("engine_consistent_with_failed_hypotheses",
                  verdict.consistent and not verdict.report.all_passed,
                  verdict.observed),
    )
    return ScenarioReport(
        "weakly_expanding", T.label, {"m": m}, assertions,
        {"fixed_defect": fixed_defect, "nearest_minus_one": nearest_minus_one,
         "spr": spectrum.spr},
    )


def _nagler_parts(dim: int, terms: int, seed: int):
    rng = np.random.default_rng(seed)
    vectors = [rng.uniform(0.1, 1.0, size=dim) for _ in range(terms)]
    e_total = np.sum(vectors, axis=0)
    functionals = []
    for _ in range(terms):
        raw = rng.uniform(0.1, 1.0, size=dim)
        functionals.append(Functional(raw / float(raw @ e_total)))
    return vectors, functionals, e_total


def build_nagler(dim: int = 8, terms: int = 4, seed: int = 7) -> Operator:
    """Random finite-rank sum e_j (x) alpha_j with a common fixed vector.

    The functionals are normalized so each one pairs to 1 against the sum of
    the range vectors, which makes that sum a fixed point.
    """
    vectors, functionals, _ = _nagler_parts(dim, terms, seed)
    return finite_rank(vectors, functionals, sequence_space(dim, 2.0),
                       label=f"nagler-d{dim}-r{terms}")


def _run_nagler(overrides: dict) -> ScenarioReport:
    dim = int(overrides.get("dim", 8))
    terms = int(overrides.get("terms", 4))
    seed = int(overrides.get("seed", 7))
    T = build_nagler(dim, terms, seed)
    _, _, e_total = _nagler_parts(dim, terms, seed)
    fixed_defect = float(np.abs(apply(T, e_total) - e_total).max())
    spectrum = eigenvalues(T)
    unimods = unimodular_point_spectrum(spectrum)
    verdict = engine_main_everywhere(T, AnalysisOptions(seed=seed), spectrum)
    assertions = (
        _assert_close("common_fixed_vector", fixed_defect, 0.0,
                      1e-12 * float(e_total.max())),
        Assertion("unimodular_spectrum_only_one",
                  all(abs(v - 1.0) <= 1e-6 for v in unimods),
                  f"unimodular eigenvalues: {[str(v) for v in unimods]}"),
        Assertion("hypotheses_pass_and_consistent",
                  verdict.report.all_passed and verdict.consistent,
                  verdict.observed),
    )
    return ScenarioReport("nagler", T.label,
                          {"dim": dim, "terms": terms, "seed": seed},
                          assertions, {"fixed_defect": fixed_defect})


def build_diagonal_strip(m: int = 100, delta: float = 0.2) -> Operator:
    """Doubly stochastic discretization of a kernel positive on |x-y| < delta."""
    raw = kernel_on_grid(lambda x, y: (np.abs(x - y) < delta).astype(float),
                         m, (0.0, 1.0), p=1.0, label=f"strip-m{m}-d{delta}")
    return sinkhorn_balance(raw, tol=1e-13).with_label(raw.label)


def powers_meet_target(T: Operator, target: np.ndarray, k_max: int,
                       tol: float = 1e-6):
    """First k <= k_max with ``||T^k - target||_inf <= tol`` (None if never)."""
    power = np.eye(T.dim)
    best = np.inf
    for k in range(1, k_max + 1):
        power = power @ T.matrix
        dist = float(np.abs(power - target).max())
        best = min(best, dist)
        if dist <= tol:
            return k, dist
    return None, best


def _run_diagonal_strip(overrides: dict) -> ScenarioReport:
    m = int(overrides.get("m", 100))
    delta = float(overrides.get("delta", 0.2))
    k_max = int(overrides.get("k_max", 5000))
    T = build_diagonal_strip(m, delta)
    row_err = float(np.abs(T.matrix.sum(axis=1) - 1.0).max())
    col_err = float(np.abs(T.matrix.sum(axis=0) - 1.0).max())
    spectrum = eigenvalues(T)
    verdict = classify_power_convergence(spectrum, T, k_max=k_max)
    projection = mean_ergodic_projection(T, k_max=k_max)
    if projection is None:
        k_hit, limit_defect, proj_rank = None, np.inf, -1
    else:
        k_hit, limit_defect = powers_meet_target(T, projection.matrix, k_max)
        proj_rank = int(np.linalg.matrix_rank(projection.matrix,
                                              tol=rank_tolerance(T)))
    opts = AnalysisOptions(k_max=k_max)
    engine = engine_convergence(T, "Everywhere", opts, spectrum, verdict)
    assertions = (
        _assert_close("row_sums_one", row_err, 0.0, 1e-9),
        _assert_close("column_sums_one", col_err, 0.0, 1e-9),
        Assertion("diagonal_strictly_positive",
                  bool(np.diag(T.matrix).min() > 0),
                  f"min diagonal {np.diag(T.matrix).min():.3g}"),
        Assertion("classified_convergent",
                  verdict.theoretical == PowerConvergence.CONVERGES,
                  verdict.theoretical),
        Assertion("powers_reach_projection",
                  k_hit is not None and limit_defect <= 1e-6,
                  f"k={k_hit}, ||T^k - P|| = {limit_defect:.3g}"),
        Assertion("limit_rank_one", proj_rank == 1, f"rank {proj_rank}"),
        Assertion("hypotheses_pass_and_consistent",
                  engine.report.all_passed and engine.consistent,
                  engine.observed),
    )
    return ScenarioReport("diagonal_strip", T.label,
                          {"m": m, "delta": delta, "k_max": k_max}, assertions,
                          {"row_err": row_err, "col_err": col_err,
                           "k_hit": k_hit, "projection_rank": proj_rank})


def build_sequence_positive_diagonal(dim: int = 30, p: float = 2.0) -> Operator:
    """Banded symmetric random-walk operator with lazy (diagonal) mass."""
    if dim < 3:
        raise ValueError("dim must be >= 3")
    m = np.zeros((dim, dim))
    for i in range(dim):
        m[i, i] = 0.5
        if i > 0:
            m[i, i - 1] = 0.25
        else:
            m[i, i] += 0.25
        if i < dim - 1:
            m[i, i + 1] = 0.25
        else:
            m[i, i] += 0.25
    return Operator(m, sequence_space(dim, p), f"lazy-walk-d{dim}")


def _run_sequence_positive_diagonal(overrides: dict) -> ScenarioReport:
    dim = int(overrides.get("dim", 30))
    T = build_sequence_positive_diagonal(dim)
    spectrum = eigenvalues(T)
    opts = AnalysisOptions(k_max=int(overrides.get("k_max", 20000)))
    verdict = classify_power_convergence(spectrum, T, k_max=opts.k_max)
    engine = engine_convergence(T, "Everywhere", opts, spectrum, verdict)
    assertions = (
        Assertion("all_diagonal_entries_positive",
                  bool(np.diag(T.matrix).min() > 0)),
        Assertion("hypotheses_pass_and_consistent",
                  engine.report.all_passed and engine.consistent,
                  engine.observed),
        Assertion("classified_convergent",
                  verdict.theoretical == PowerConvergence.CONVERGES,
                  verdict.theoretical),
    )
    return ScenarioReport("sequence_positive_diagonal", T.label, {"dim": dim},
                          assertions, {"k_star": verdict.k_star})


def build_irreducible_one_diagonal(dim: int = 7) -> Operator:
    """Stochastic cycle with a single lazy state, hence exactly one nonzero
    diagonal entry; irreducible and aperiodic."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    m = np.zeros((dim, dim))
    m[0, 0] = 0.5
    m[0, 1] = 0.5
    for i in range(1, dim):
        m[i, (i + 1) % dim] = 1.0
    return Operator(m, sequence_space(dim, 2.0), f"one-diagonal-d{dim}")


def _run_irreducible_one_diagonal(overrides: dict) -> ScenarioReport:
    dim = int(overrides.get("dim", 7))
    T = build_irreducible_one_diagonal(dim)
    spectrum = eigenvalues(T)
    unimods = unimodular_point_spectrum(spectrum)
    diag_count = int((np.diag(T.matrix) > 0).sum())
    band = SupportMask(frozenset({0}), dim, T.space.mask_semantics)
    engine = engine_main_irreducible(T, band, AnalysisOptions(), spectrum)
    assertions = (
        Assertion("irreducible", is_irreducible(T)),
        Assertion("exactly_one_positive_diagonal", diag_count == 1,
                  f"count {diag_count}"),
        Assertion("period_one", period(T) == 1, f"period {period(T)}"),
        Assertion("unimodular_spectrum_only_one",
                  all(abs(v - 1.0) <= 1e-6 for v in unimods),
                  f"unimodular: {[str(v) for v in unimods]}"),
        Assertion("hypotheses_pass_and_consistent",
                  engine.report.all_passed and engine.consistent,
                  engine.observed),
    )
    return ScenarioReport("irreducible_one_diagonal", T.label, {"dim": dim},
                          assertions, {"period": period(T)})


def _run_partition(overrides: dict) -> ScenarioReport:
    num_blocks = int(overrides.get("N", 6))
    block_size = int(overrides.get("block_size", 5))
    overlap = float(overrides.get("overlap", 0.2))
    pairing = overrides.get("pairing")
    T = partition_operator(num_blocks, block_size, pairing, overlap)
    spectrum = eigenvalues(T)
    data = {"overlap": overlap}
    if overlap == 0.0:
        cycle = period(T)
        roots = [np.exp(2j * np.pi * k / num_blocks) for k in range(num_blocks)]
        unimods = unimodular_point_spectrum(spectrum, 1e-8)
        roots_found = all(
            min(abs(v - r) for v in unimods) <= 1e-8 for r in roots)
        block0 = np.zeros(T.dim)
        block0[:block_size] = 1.0
        vec = block0.copy()
        pattern_exact = True
        value_err = 0.0
        for k in range(1, num_blocks + 2):
            vec = apply(T, vec).real
            target = (k % num_blocks) * block_size
            outside = np.delete(vec, slice(target, target + block_size))
            pattern_exact &= bool(np.all(outside == 0.0))
            value_err = max(value_err,
                            float(np.abs(vec[target:target + block_size] - 1).max()))
        verdict = classify_power_convergence(spectrum, T,
                                             k_max=int(overrides.get("k_max", 500)))
        assertions = (
            Assertion("period_equals_block_count", cycle == num_blocks,
                      f"period {cycle}"),
            Assertion("unimodular_spectrum_is_roots_of_unity", roots_found,
                      f"{len(unimods)} unimodular values"),
            Assertion("powers_permute_blocks_exactly",
                      pattern_exact and value_err <= 1e-12,
                      f"max value error {value_err:.3g}"),
            Assertion("classified_oscillating",
                      verdict.theoretical == PowerConvergence.DIVERGES,
                      verdict.theoretical),
            Assertion("empirical_residual_stays_large",
                      verdict.k_star is None and verdict.final_residual > 0.5,
                      f"residual {verdict.final_residual:.3g}"),
        )
        data.update(period=cycle, value_err=value_err)
    else:
        dom = power_domination(T, 2)
        k_max = int(overrides.get("k_max", 2000))
        verdict = classify_power_convergence(spectrum, T, k_max=k_max)
        opts = AnalysisOptions(k_max=k_max)
        engine_dom = engine_power_domination(T, 2, opts, spectrum)
        engine_cesaro = engine_convergence(T, "CesaroABLV", opts, spectrum, verdict)
        assertions = (
            _assert_close("power_domination_equals_overlap",
                          dom.epsilon_max, overlap, 1e-12),
            Assertion("classified_convergent",
                      verdict.theoretical == PowerConvergence.CONVERGES,
                      verdict.theoretical),
            Assertion("empirical_convergence",
                      verdict.k_star is not None and verdict.k_star <= k_max,
                      f"k*={verdict.k_star}"),
            Assertion("domination_engine_passes",
                      engine_dom.report.all_passed and engine_dom.consistent,
                      engine_dom.observed),
            Assertion("cesaro_engine_passes",
                      engine_cesaro.report.all_passed and engine_cesaro.consistent,
                      engine_cesaro.observed),
        )
        data.update(epsilon_max=dom.epsilon_max, k_star=verdict.k_star)
    return ScenarioReport(
        "partition", T.label,
        {"N": num_blocks, "block_size": block_size, "overlap": overlap,
         "pairing": pairing if pairing is None else list(pairing)},
        assertions, data)


SCENARIOS: Dict[str, Callable[[dict], ScenarioReport]] = {
    "weakly_expanding": _run_weakly_expanding,
    "nagler": _run_nagler,
    "diagonal_strip": _run_diagonal_strip,
    "sequence_positive_diagonal": _run_sequence_positive_diagonal,
    "irreducible_one_diagonal": _run_irreducible_one_diagonal,
    "partition": _run_partition,
}

BUILDERS: Dict[str, Callable] = {
    "weakly_expanding": build_weakly_expanding,
    "nagler": build_nagler,
    "diagonal_strip": build_diagonal_strip,
    "sequence_positive_diagonal": build_sequence_positive_diagonal,
    "irreducible_one_diagonal": build_irreducible_one_diagonal,
    "partition": partition_operator,
}


def list_scenarios() -> List[str]:
    return sorted(SCENARIOS)


def run_scenario(name: str, **overrides) -> ScenarioReport:
    try:
        runner = SCENARIOS[name]
    except KeyError:
        raise UnknownScenarioError(name) from None
    return runner(overrides)
