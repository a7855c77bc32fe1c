"""Eigenvalue computation and spectral conclusions.

Full spectra with residual certificates, peripheral and unimodular subsets,
cyclicity of finite sets, disk inclusion, the projection onto the span of
eigenvectors for unimodular eigenvalues (the reversible part of a power
bounded operator), the mean ergodic projection, and a classifier for strong
convergence of the power sequence.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .errors import PowerUnboundedError, SolverFailure
from .operators import Operator, induced_inf_norm, power_bound_estimate

#: Default tolerance for calling an eigenvalue unimodular.
UNIMODULAR_TOL = 1e-6


def default_eig_tol(T: Operator) -> float:
    return 1e-8 * (1.0 + induced_inf_norm(T.matrix))


def rank_tolerance(T: Operator) -> float:
    """Rank cutoff: dim * machine epsilon * a cheap largest-singular-value bound."""
    scale = max(np.abs(T.matrix).sum(axis=1).max(), 1.0)
    return T.dim * np.finfo(float).eps * float(scale)


@dataclass(frozen=True)
class EigenValue:
    value: complex
    multiplicity: int
    residual: float

    def to_dict(self) -> dict:
        return {"re": self.value.real, "im": self.value.imag,
                "mult": self.multiplicity, "residual": self.residual}


@dataclass(frozen=True)
class Spectrum:
    """Clustered eigenvalue multiset with per-cluster residual certificates.

    Each residual bounds ``||T v - lambda v||_2`` for some unit vector v, so
    it certifies the cluster value as an approximate eigenvalue.
    """

    entries: Tuple[EigenValue, ...]
    spr: float
    tol: float
    dim: int

    @property
    def values(self) -> List[complex]:
        return [e.value for e in self.entries]

    def total_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def to_dicts(self) -> List[dict]:
        return [e.to_dict() for e in self.entries]


def _cluster(values: np.ndarray, residuals: np.ndarray, tol: float) -> List[EigenValue]:
    order = np.lexsort((values.imag, values.real))
    used = np.zeros(values.size, dtype=bool)
    clusters = []
    for k in order:
        if used[k]:
            continue
        members = [k]
        used[k] = True
        for j in order:
            if not used[j] and abs(values[j] - values[k]) <= tol:
                used[j] = True
                members.append(j)
        center = complex(np.mean(values[members]))
        res = max(float(residuals[j]) + abs(values[j] - center) for j in members)
        clusters.append(EigenValue(center, len(members), res))
    clusters.sort(key=lambda e: (-abs(e.value), e.value.real, e.value.imag))
    return clusters


def _symmetrize_conjugates(clusters: List[EigenValue], tol: float) -> List[EigenValue]:
    out: List[Optional[EigenValue]] = list(clusters)
    for i, e in enumerate(out):
        if e is None or abs(e.value.imag) <= tol:
            if e is not None:
                out[i] = EigenValue(complex(e.value.real, 0.0), e.multiplicity,
                                    e.residual)
            continue
        for j in range(i + 1, len(out)):
            other = out[j]
            if other is None:
                continue
            if (abs(other.value - e.value.conjugate()) <= 2 * tol
                    and other.multiplicity == e.multiplicity):
                val = complex(
                    (e.value.real + other.value.real) / 2,
                    (abs(e.value.imag) + abs(other.value.imag)) / 2,
                )
                res = max(e.residual, other.residual) + abs(val - abs_pair(e.value))
                out[i] = EigenValue(val if e.value.imag > 0 else val.conjugate(),
                                    e.multiplicity, res)
                out[j] = EigenValue(val.conjugate() if e.value.imag > 0 else val,
                                    other.multiplicity, res)
                break
    return [e for e in out if e is not None]


def abs_pair(z: complex) -> complex:
    return complex(z.real, abs(z.imag))


def eigenvalues(T: Operator, tol: Optional[float] = None) -> Spectrum:
    """All eigenvalues of the matrix with residual certificates.

    Eigenvalues within ``tol`` of one another are merged into a cluster whose
    multiplicity is the cluster size; for real matrices the output is closed
    under complex conjugation.  Raises :class:`SolverFailure` when the
    underlying QR iteration does not converge.
    """
    if tol is None:
        tol = default_eig_tol(T)
    try:
        vals, vecs = np.linalg.eig(T.matrix)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(f"eigen solver failed: {exc}", partial=None) from exc
    residuals = np.linalg.norm(T.matrix @ vecs - vecs * vals[None, :], axis=0)
    norms = np.linalg.norm(vecs, axis=0)
    norms[norms == 0] = 1.0
    residuals = residuals / norms
    clusters = _cluster(vals, residuals, tol)
    clusters = _symmetrize_conjugates(clusters, tol)
    spr = max((abs(e.value) for e in clusters), default=0.0)
    spectrum = Spectrum(tuple(clusters), float(spr), float(tol), T.dim)
    if spectrum.total_multiplicity() != T.dim:
        raise SolverFailure(
            f"clustered multiplicities sum to {spectrum.total_multiplicity()}"
            f" != dim {T.dim}", partial=spectrum)
    return spectrum


def unimodular_point_spectrum(spectrum: Spectrum,
                              tol: float = UNIMODULAR_TOL) -> List[complex]:
    """Eigenvalues on the unit circle up to ``tol``."""
    return [v for v in spectrum.values if abs(abs(v) - 1.0) <= tol]


def peripheral_spectrum(spectrum: Spectrum,
                        tol: Optional[float] = None) -> List[complex]:
    """Eigenvalues of maximal modulus up to ``tol``."""
    if tol is None:
        tol = max(spectrum.tol, 1e-9)
    return [v for v in spectrum.values if abs(v) >= spectrum.spr - tol]


def is_cyclic(peripheral: Sequence[complex], tol: float = 1e-8) -> bool:
    """Whether a finite set is closed under ``r e^{i theta} -> r e^{i n theta}``.

    Checks all integer powers n with ``|n| <= len(set) + 1``, which suffices
    for finite sets since the rotations generated by each angle form a finite
    subgroup if and only if these small powers already stay inside the set.
    """
    pts = list(peripheral)
    if not pts:
        return True
    bound = len(pts) + 1
    for z in pts:
        r, theta = abs(z), cmath.phase(z)
        for n in range(-bound, bound + 1):
            w = r * cmath.exp(1j * n * theta)
            if not any(abs(w - q) <= tol * (1 + r) for q in pts):
                return False
    return True


def disk_inclusion(spectrum: Spectrum, eps: float, tol: float = 1e-8) -> bool:
    """Whether spec(T) lies in the closed disk of radius spr - eps at center eps."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if eps > spectrum.spr + tol:
        raise ValueError(f"eps={eps} exceeds spectral radius {spectrum.spr}")
    radius = spectrum.spr - eps
    return all(abs(v - eps) <= radius + tol for v in spectrum.values)


def _spectral_projection(matrix: np.ndarray, select) -> Tuple[np.ndarray, int]:
    """Projection onto the invariant subspace of eigenvalues with select(lam).

    Uses an ordered Schur form: with the selected block leading, the
    projection is Z [[I, Y], [0, 0]] Z* where Y solves the Sylvester
    equation U11 Y - Y U22 = U12.
    """
    dim = matrix.shape[0]
    U, Z, sdim = scipy.linalg.schur(matrix.astype(complex), output="complex",
                                    sort=select)
    if sdim == 0:
        return np.zeros_like(matrix, dtype=float), 0
    if sdim == dim:
        return np.eye(dim), dim
    u11 = U[:sdim, :sdim]
    u12 = U[:sdim, sdim:]
    u22 = U[sdim:, sdim:]
    y = scipy.linalg.solve_sylvester(u11, -u22, u12)
    r = np.zeros((dim, dim), dtype=complex)
    r[:sdim, :sdim] = np.eye(sdim)
    r[:sdim, sdim:] = y
    proj = Z @ r @ Z.conj().T
    imag = float(np.abs(proj.imag).max())
    if imag > 1e-7 * (1 + np.abs(proj.real).max()):
        raise SolverFailure(f"spectral projection has imaginary residue {imag}",
                            partial=proj)
    return proj.real, sdim


@dataclass(frozen=True)
class ReversiblePart:
    """Spectral projection onto the span of unimodular eigenvectors."""

    projection: np.ndarray
    reversible_dim: int
    positive: bool
    idempotency_defect: float
    commutation_defect: float

    def to_dict(self) -> dict:
        return {
            "reversible_dim": self.reversible_dim,
            "positive": self.positive,
            "idempotency_defect": self.idempotency_defect,
            "commutation_defect": self.commutation_defect,
        }


def jdlg_projection(T: Operator, tol: float = UNIMODULAR_TOL,
                    horizon: Optional[int] = None) -> ReversiblePart:
    """Projection onto the invariant subspace of near-unimodular eigenvalues.

    Requires ``spr(T) <= 1 + tol`` and a power-boundedness guess over the
    horizon (default ``2 * dim``); otherwise the reversible/stable splitting
    is meaningless and :class:`PowerUnboundedError` is raised.  The result
    records idempotency and commutation defects and whether the projection
    is entrywise nonnegative (up to -1e-8), which holds whenever the
    operator has a strictly positive fixed vector.
    """
    bound = power_bound_estimate(T, horizon or min(max(2, 2 * T.dim), 48))
    if bound.spectral_radius > 1 + tol or not bound.bounded_guess:
        raise PowerUnboundedError(
            f"spr={bound.spectral_radius:.6g}, bounded_guess={bound.bounded_guess}")
    proj, sdim = _spectral_projection(T.matrix, lambda lam: abs(lam) >= 1 - tol)
    idem = float(np.abs(proj @ proj - proj).max())
    comm = float(np.abs(proj @ T.matrix - T.matrix @ proj).max())
    if max(idem, comm) > 1e-8 * (1 + induced_inf_norm(T.matrix)) * 10:
        raise SolverFailure(
            f"projection certificates too weak: idem={idem:.3g} comm={comm:.3g}",
            partial=proj)
    positive = bool(proj.min() >= -1e-8)
    return ReversiblePart(proj, sdim, positive, idem, comm)


def fixed_space_projection(T: Operator, tol: float = UNIMODULAR_TOL) -> Tuple[np.ndarray, int]:
    """Spectral projection for the eigenvalue cluster at 1."""
    return _spectral_projection(T.matrix, lambda lam: abs(lam - 1.0) <= tol)


def mean_ergodic_projection(T: Operator, k_max: int = 5000,
                            tol: Optional[float] = None) -> Optional[Operator]:
    """Limit of the Cesaro means, or None when they have not settled.

    Mean ergodicity is detected by comparing the Cesaro means at ``k_max/2``
    and ``k_max`` entrywise; those averages converge only at rate 1/k, so the
    default agreement tolerance scales like ``50 / k_max`` and the returned
    operator is the sharper spectral projection for the eigenvalue 1,
    cross-checked against the late Cesaro mean within ``10 * tol``.
    """
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    if tol is None:
        tol = max(1e-6, 50.0 / k_max)
    half = k_max // 2
    power = np.eye(T.dim)
    acc = power.copy()
    mean_half = None
    for k in range(1, k_max):
        power = power @ T.matrix
        acc += power
        if not np.all(np.isfinite(acc)):
            return None
        if k + 1 == half:
            mean_half = acc / half
    mean_full = acc / k_max
    if mean_half is None or np.abs(mean_full - mean_half).max() > tol:
        return None
    proj, _ = fixed_space_projection(T)
    defect = float(np.abs(mean_full - proj).max())
    if defect > 10 * tol:
        raise SolverFailure(
            f"Cesaro limit disagrees with eigenvalue-1 projection by {defect:.3g}",
            partial=proj)
    if proj.size and proj.min() < -1e-8 * (1 + float(np.abs(proj).max())):
        raise SolverFailure(
            f"mean ergodic projection has negative entry {proj.min():.3g}",
            partial=proj)
    return Operator(np.maximum(proj, 0.0), T.space,
                    f"mean-ergodic({T.label or 'T'})")


class PowerConvergence:
    CONVERGES = "ConvergesStrongly"
    DIVERGES = "DivergesOrOscillates"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ConvergenceVerdict:
    theoretical: str
    k_star: Optional[int]
    final_residual: float
    limit: Optional[Operator]

    def to_dict(self) -> dict:
        return {
            "theoretical": self.theoretical,
            "k_star": self.k_star,
            "final_residual": self.final_residual,
        }


def _one_is_semisimple(T: Operator) -> bool:
    a = T.matrix - np.eye(T.dim)
    cut = rank_tolerance(T)
    r1 = np.linalg.matrix_rank(a, tol=cut)
    r2 = np.linalg.matrix_rank(a @ a, tol=cut)
    return bool(r1 == r2)


def classify_power_convergence(spectrum: Spectrum, T: Operator,
                               tol: float = 1e-9,
                               unimodular_tol: float = UNIMODULAR_TOL,
                               k_max: int = 5000,
                               residual_tol: float = 1e-6) -> ConvergenceVerdict:
    """Spectral classification of the power sequence plus an empirical run.

    Strong convergence in finite dimension holds exactly when the spectral
    radius is at most 1, the only near-unimodular eigenvalue is 1, and 1 is
    semisimple.  The empirical part iterates the powers up to ``k_max`` and
    records the first k with ``||T^(k+1) - T^k||_inf <= residual_tol``.
    """
    unimods = unimodular_point_spectrum(spectrum, unimodular_tol)
    bad_unimods = [v for v in unimods if abs(v - 1.0) > unimodular_tol]
    if spectrum.spr > 1 + tol or bad_unimods:
        theoretical = PowerConvergence.DIVERGES
    elif spectrum.spr <= 1 + tol and not bad_unimods:
        if not unimods or _one_is_semisimple(T):
            theoretical = PowerConvergence.CONVERGES
        else:
            theoretical = PowerConvergence.INCONCLUSIVE
    else:
        theoretical = PowerConvergence.INCONCLUSIVE

    power = np.eye(T.dim)
    k_star = None
    final_residual = math.inf
    limit = None
    for k in range(1, k_max + 1):
        nxt = power @ T.matrix
        final_residual = float(np.abs(nxt - power).max())
        power = nxt
        if final_residual <= residual_tol:
            k_star = k
            limit = Operator(power, T.space, f"powerlimit({T.label or 'T'})")
            break
        if not np.isfinite(final_residual) or final_residual > 1e12:
            break
    return ConvergenceVerdict(theoretical, k_star, final_residual, limit)
