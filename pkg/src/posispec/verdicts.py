"""Verdict engines: bind hypothesis checks to predicted spectral conclusions.

Each engine evaluates a named list of hypothesis checks on an operator,
states the conclusion those hypotheses would force, reads the observed
conclusion off the computed spectrum, and reports whether the two are
consistent.  The master soundness property: a verdict must never have all
hypotheses passed and the conclusion violated.  Such an event is either a
tolerance bug or a genuine counterexample, and callers are expected to
serialize it and stop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, List, Optional

import numpy as np

from .errors import ReducibleOperatorError
from .lattice import SupportMask
from .operators import Operator, power_bound_estimate
from .spectral import (
    ConvergenceVerdict,
    PowerConvergence,
    Spectrum,
    UNIMODULAR_TOL,
    classify_power_convergence,
    disk_inclusion,
    eigenvalues,
    fixed_space_projection,
    is_cyclic,
    mean_ergodic_projection,
    peripheral_spectrum,
    unimodular_point_spectrum,
)
from .structure import (
    dominates_identity,
    expands_support_everywhere,
    expands_support_on_band,
    is_irreducible,
    is_lattice_homomorphism,
    period,
    positive_diagonal_band,
    power_domination,
)

FINITE_DIM_NOTE = "automatic in finite dimension"


class TheoremId:
    MAIN_EVERYWHERE = "MainEverywhere"
    MAIN_IRREDUCIBLE = "MainIrreducible"
    LATTICE_HOMOMORPHISM = "LatticeHomomorphism"
    DOMINATES_IDENTITY = "DominatesIdentity"
    POWER_DOMINATION = "PowerDomination"
    CONVERGENCE_EVERYWHERE = "ConvergenceEverywhere"
    CONVERGENCE_IRREDUCIBLE = "ConvergenceIrreducible"
    CESARO_ABLV = "CesaroABLV"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: Any = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if self.note:
            out["note"] = self.note
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass(frozen=True)
class HypothesisReport:
    theorem_id: str
    checks: tuple

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "checks": [c.to_dict() for c in self.checks],
            "all_passed": self.all_passed,
        }


@dataclass(frozen=True)
class TheoremVerdict:
    report: HypothesisReport
    predicted: str
    observed: str
    conclusion_holds: bool

    @property
    def consistent(self) -> bool:
        """Hypotheses-hold implies conclusion-holds; vacuously true otherwise."""
        return self.conclusion_holds or not self.report.all_passed

    def to_dict(self) -> dict:
        d = self.report.to_dict()
        d.update(predicted=self.predicted, observed=self.observed,
                 consistent=self.consistent)
        return d


@dataclass(frozen=True)
class AnalysisOptions:
    """One knob set shared by every engine."""

    tol_eig: Optional[float] = None
    tol_support: Optional[float] = None
    tol_unimodular: float = UNIMODULAR_TOL
    horizon: Optional[int] = None
    power_horizon: Optional[int] = None
    k_max: int = 5000
    samples: int = 25
    seed: int = 0
    domination_n: int = 2

    def horizon_for(self, T: Operator) -> int:
        return self.horizon if self.horizon is not None else max(2, 2 * T.dim)

    def power_horizon_for(self, T: Operator) -> int:
        """Horizon for matrix-power norm tracking; capped because each step
        is a full matrix product."""
        if self.power_horizon is not None:
            return self.power_horizon
        return min(self.horizon_for(T), 48)


def _fmt_complex(v: complex) -> str:
    return f"{v.real:+.9g}{v.imag:+.9g}j"


def _fmt_set(values) -> str:
    if not values:
        return "{}"
    return "{" + ", ".join(_fmt_complex(v) for v in values) + "}"


def _positivity_check(T: Operator) -> Check:
    ok = bool(T.matrix.min() >= 0) if T.matrix.size else True
    return Check("positivity", ok, note="guaranteed by construction")


def _power_bound_check(T: Operator, opts: AnalysisOptions) -> Check:
    pb = power_bound_estimate(T, opts.power_horizon_for(T))
    return Check("power_bounded", pb.bounded_guess, witness=pb.to_dict())


def _unimodular_conclusion(T: Operator, spectrum: Spectrum,
                           opts: AnalysisOptions):
    unimods = unimodular_point_spectrum(spectrum, opts.tol_unimodular)
    ok = all(abs(v - 1.0) <= opts.tol_unimodular for v in unimods)
    return unimods, ok


def engine_main_everywhere(T: Operator, opts: AnalysisOptions = AnalysisOptions(),
                           spectrum: Optional[Spectrum] = None) -> TheoremVerdict:
    """Power-bounded positive operator whose iterates eventually expand supports.

    Predicted conclusion: the only possible unimodular eigenvalue is 1.
    """
    if spectrum is None:
        spectrum = eigenvalues(T, opts.tol_eig)
    expansion = expands_support_everywhere(
        T, opts.horizon_for(T), opts.samples, opts.seed, opts.tol_support)
    checks = (
        _positivity_check(T),
        _power_bound_check(T, opts),
        Check("kb_space_surrogate", True, note=FINITE_DIM_NOTE),
        Check("support_expansion_everywhere", expansion.all_satisfied,
              witness=expansion.to_dict(),
              note="basis vectors proved; cone sampled"),
    )
    unimods, ok = _unimodular_conclusion(T, spectrum, opts)
    return TheoremVerdict(
        HypothesisReport(TheoremId.MAIN_EVERYWHERE, checks),
        predicted="unimodular point spectrum within {1}",
        observed=f"unimodular point spectrum = {_fmt_set(unimods)}",
        conclusion_holds=ok,
    )


def engine_main_irreducible(T: Operator, band: Optional[SupportMask] = None,
                            opts: AnalysisOptions = AnalysisOptions(),
                            spectrum: Optional[Spectrum] = None) -> TheoremVerdict:
    """Irreducible power-bounded operator expanding supports on a band.

    ``band`` defaults to the set of coordinates with nonzero diagonal; if that
    set is empty the band-expansion hypothesis fails on the full index set.
    """
    if spectrum is None:
        spectrum = eigenvalues(T, opts.tol_eig)
    if band is None:
        band = positive_diagonal_band(T, opts.tol_support)
    if band is not None and len(band) == 0:
        raise ValueError("band must be nonempty")
    if band is None:
        band_ok = False
        band_witness = None
    else:
        band_ok = expands_support_on_band(T, band, opts.tol_support)
        band_witness = sorted(band.indices)
    checks = (
        _positivity_check(T),
        _power_bound_check(T, opts),
        Check("irreducible", is_irreducible(T, opts.tol_support)),
        Check("support_expansion_on_band", band_ok, witness=band_witness),
    )
    unimods, ok = _unimodular_conclusion(T, spectrum, opts)
    return TheoremVerdict(
        HypothesisReport(TheoremId.MAIN_IRREDUCIBLE, checks),
        predicted="unimodular point spectrum within {1}",
        observed=f"unimodular point spectrum = {_fmt_set(unimods)}",
        conclusion_holds=ok,
    )


def engine_lattice_homomorphism(T: Operator,
                                opts: AnalysisOptions = AnalysisOptions(),
                                spectrum: Optional[Spectrum] = None) -> TheoremVerdict:
    """Sup-preserving operator with eventual support expansion.

    Predicted conclusion: every eigenvalue is a nonnegative real.
    """
    if spectrum is None:
        spectrum = eigenvalues(T, opts.tol_eig)
    expansion = expands_support_everywhere(
        T, opts.horizon_for(T), opts.samples, opts.seed, opts.tol_support)
    checks = (
        Check("lattice_homomorphism",
              is_lattice_homomorphism(T, opts.tol_support, seed=opts.seed)),
        Check("support_expansion_everywhere", expansion.all_satisfied,
              witness=expansion.to_dict(),
              note="basis vectors proved; cone sampled"),
    )
    tol = max(spectrum.tol, 1e-9)
    offenders = [v for v in spectrum.values
                 if abs(v.imag) > tol or v.real < -tol]
    return TheoremVerdict(
        HypothesisReport(TheoremId.LATTICE_HOMOMORPHISM, checks),
        predicted="point spectrum within [0, inf)",
        observed=("point spectrum within [0, inf)" if not offenders
                  else f"eigenvalues off the nonnegative axis: {_fmt_set(offenders)}"),
        conclusion_holds=not offenders,
    )


def engine_dominates_identity(T: Operator,
                              opts: AnalysisOptions = AnalysisOptions(),
                              spectrum: Optional[Spectrum] = None) -> TheoremVerdict:
    """Operator dominating a positive multiple of the identity.

    Predicted conclusion: the peripheral spectrum is the single point spr(T),
    and the whole spectrum lies in the disk of radius spr - eps centered at
    eps.
    """
    if spectrum is None:
        spectrum = eigenvalues(T, opts.tol_eig)
    eps = dominates_identity(T)
    checks = (
        _positivity_check(T),
        Check("dominates_identity", eps > 0, witness={"epsilon": eps}),
    )
    peripheral = peripheral_spectrum(spectrum)
    tol = max(spectrum.tol, 1e-8)
    singleton = all(abs(v - spectrum.spr) <= tol for v in peripheral)
    in_disk = disk_inclusion(spectrum, min(max(eps, 0.0), spectrum.spr), tol)
    return TheoremVerdict(
        HypothesisReport(TheoremId.DOMINATES_IDENTITY, checks),
        predicted="peripheral spectrum = {spr}; spectrum within disk(center=eps)",
        observed=(f"peripheral = {_fmt_set(peripheral)}; "
                  f"disk_inclusion={in_disk}"),
        conclusion_holds=singleton and in_disk,
    )


def engine_power_domination(T: Operator, n: Optional[int] = None,
                            opts: AnalysisOptions = AnalysisOptions(),
                            spectrum: Optional[Spectrum] = None) -> TheoremVerdict:
    """Power domination ``T^n >= eps T^(n-1)`` with a priori cyclic peripheral.

    Predicted conclusion: the peripheral spectrum is the single point spr(T).
    """
    if n is None:
        n = opts.domination_n
    if spectrum is None:
        spectrum = eigenvalues(T, opts.tol_eig)
    peripheral = peripheral_spectrum(spectrum)
    dom = power_domination(T, n, opts.tol_support)
    checks = (
        _positivity_check(T),
        Check("peripheral_cyclic", is_cyclic(peripheral),
              witness=_fmt_set(peripheral)),
        Check("power_domination", 0 < dom.epsilon_max, witness=dom.to_dict()),
    )
    tol = max(spectrum.tol, 1e-8)
    singleton = all(abs(v - spectrum.spr) <= tol for v in peripheral)
    return TheoremVerdict(
        HypothesisReport(TheoremId.POWER_DOMINATION, checks),
        predicted="peripheral spectrum = {spr}",
        observed=f"peripheral = {_fmt_set(peripheral)}",
        conclusion_holds=singleton,
    )


def _positive_fixed_vector_check(T: Operator, opts: AnalysisOptions,
                                 require_strict: bool) -> Check:
    """Nonzero (optionally strictly positive) fixed vector via the
    eigenvalue-1 projection applied to the constant vector."""
    proj, sdim = fixed_space_projection(T, opts.tol_unimodular)
    if sdim == 0:
        return Check("positive_fixed_vector", False, note="1 is not an eigenvalue")
    candidate = proj @ np.ones(T.dim)
    scale = float(np.abs(candidate).max())
    if scale <= 1e-9 * float(np.abs(proj).max()):
        j = int(np.argmax(np.abs(proj).sum(axis=0)))
        candidate = proj[:, j]
        scale = float(np.abs(candidate).max())
    if scale <= 0:
        return Check("positive_fixed_vector", False,
                     note="degenerate fixed-space projection")
    candidate = candidate * np.sign(candidate[int(np.argmax(np.abs(candidate)))])
    residual = float(np.abs(T.matrix @ candidate - candidate).max()) / scale
    if residual > 1e-6:
        return Check("positive_fixed_vector", False,
                     note=f"projection candidate not fixed (residual {residual:.2g})")
    if require_strict:
        ok = bool(candidate.min() > 1e-8 * scale)
        return Check("quasi_interior_fixed_vector", ok,
                     note="strictly positive fixed vector surrogate")
    return Check("nonzero_fixed_vector", True)


def engine_convergence(T: Operator, variant: str,
                       opts: AnalysisOptions = AnalysisOptions(),
                       spectrum: Optional[Spectrum] = None,
                       convergence: Optional[ConvergenceVerdict] = None) -> TheoremVerdict:
    """Strong convergence of the powers under one of three hypothesis sets.

    Variants: "Everywhere" (expansion everywhere + strictly positive fixed
    vector), "Irreducible" (irreducibility + band expansion + nonzero fixed
    vector), "CesaroABLV" (mean ergodicity + power domination).
    """
    if spectrum is None:
        spectrum = eigenvalues(T, opts.tol_eig)
    if variant == "Everywhere":
        theorem_id = TheoremId.CONVERGENCE_EVERYWHERE
        expansion = expands_support_everywhere(
            T, opts.horizon_for(T), opts.samples, opts.seed, opts.tol_support)
        checks = (
            _positivity_check(T),
            _power_bound_check(T, opts),
            _positive_fixed_vector_check(T, opts, require_strict=True),
            Check("am_compact_power", True, note=FINITE_DIM_NOTE),
            Check("support_expansion_everywhere", expansion.all_satisfied,
                  witness=expansion.to_dict(),
                  note="basis vectors proved; cone sampled"),
        )
    elif variant == "Irreducible":
        theorem_id = TheoremId.CONVERGENCE_IRREDUCIBLE
        band = positive_diagonal_band(T, opts.tol_support)
        band_ok = band is not None and expands_support_on_band(
            T, band, opts.tol_support)
        checks = (
            _positivity_check(T),
            _power_bound_check(T, opts),
            Check("irreducible", is_irreducible(T, opts.tol_support)),
            Check("support_expansion_on_band", band_ok,
                  witness=None if band is None else sorted(band.indices)),
            _positive_fixed_vector_check(T, opts, require_strict=False),
            Check("dominated_am_compact_operator", True, note=FINITE_DIM_NOTE),
        )
    elif variant == "CesaroABLV":
        theorem_id = TheoremId.CESARO_ABLV
        mep = mean_ergodic_projection(T, opts.k_max)
        dom = power_domination(T, opts.domination_n, opts.tol_support)
        checks = (
            _positivity_check(T),
            _power_bound_check(T, opts),
            Check("mean_ergodic", mep is not None),
            Check("power_domination", 0 < dom.epsilon_max, witness=dom.to_dict()),
        )
    else:
        raise ValueError(f"unknown convergence variant: {variant!r}")

    verdict = convergence if convergence is not None else classify_power_convergence(
        spectrum, T, unimodular_tol=opts.tol_unimodular, k_max=opts.k_max)
    return TheoremVerdict(
        HypothesisReport(theorem_id, checks),
        predicted=PowerConvergence.CONVERGES,
        observed=(f"{verdict.theoretical}"
                  f" (k*={verdict.k_star}, residual={verdict.final_residual:.3g})"),
        conclusion_holds=verdict.theoretical == PowerConvergence.CONVERGES,
    )


@dataclass(frozen=True)
class Report:
    """Full analysis of one operator, JSON-serializable."""

    label: str
    dim: int
    semantics: dict
    spectrum: Spectrum
    structure: dict
    engines: tuple
    convergence: ConvergenceVerdict

    @property
    def violations(self) -> List[TheoremVerdict]:
        return [v for v in self.engines if not v.consistent]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "dim": self.dim,
            "semantics": self.semantics,
            "spectrum": self.spectrum.to_dicts(),
            "spr": self.spectrum.spr,
            "structure": self.structure,
            "engines": [v.to_dict() for v in self.engines],
            "convergence": self.convergence.to_dict(),
        }


def analyze(T: Operator, opts: AnalysisOptions = AnalysisOptions()) -> Report:
    """Run every engine on one operator plus a structure summary.

    Deterministic given the options (including the seed).  Solver failures
    propagate; inconsistent verdicts are collected, not raised, so callers
    can serialize reproduction cases.
    """
    spectrum = eigenvalues(T, opts.tol_eig)
    irreducible = is_irreducible(T, opts.tol_support)
    try:
        cycle_gcd = period(T, opts.tol_support) if irreducible else None
    except ReducibleOperatorError:
        cycle_gcd = None
    structure = {
        "irreducible": irreducible,
        "period": cycle_gcd,
        "diagonal_epsilon": dominates_identity(T),
        "lattice_homomorphism": is_lattice_homomorphism(
            T, opts.tol_support, seed=opts.seed),
        "power_bound": power_bound_estimate(T, opts.power_horizon_for(T)).to_dict(),
    }
    convergence = classify_power_convergence(
        spectrum, T, unimodular_tol=opts.tol_unimodular, k_max=opts.k_max)
    engines = (
        engine_main_everywhere(T, opts, spectrum),
        engine_main_irreducible(T, None, opts, spectrum),
        engine_lattice_homomorphism(T, opts, spectrum),
        engine_dominates_identity(T, opts, spectrum),
        engine_power_domination(T, opts.domination_n, opts, spectrum),
        engine_convergence(T, "Everywhere", opts, spectrum, convergence),
        engine_convergence(T, "Irreducible", opts, spectrum, convergence),
        engine_convergence(T, "CesaroABLV", opts, spectrum, convergence),
    )
    return Report(
        label=T.label,
        dim=T.dim,
        semantics=T.space.to_dict(),
        spectrum=spectrum,
        structure=structure,
        engines=engines,
        convergence=convergence,
    )
