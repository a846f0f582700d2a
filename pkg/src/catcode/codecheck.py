"""Error-correction conditions for the cat code under amplitude damping."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import kraus_operator
from .errors import InputError
from .hilbert import CatParity, FockSpace, Operator, StateVector, cat_state, default_dim

DEFAULT_TOLERANCE = 1e-3
# Probability ratios feel the cutoff at the 1e-11 level with the bare
# default_dim; the margin pushes that below double precision.
CUTOFF_MARGIN = 16


def codecheck_space(alpha: float) -> FockSpace:
    return FockSpace(default_dim(alpha) + CUTOFF_MARGIN)


@dataclass(frozen=True, eq=False)
class KLReport:
    """Knill-Laflamme matrix <p|K_k^+ K_l|q> with rows and columns flattened as p * n_kraus + k."""

    condition_matrix: np.ndarray
    n_codewords: int
    n_kraus: int
    off_diag_max: float
    orthogonality_max: float
    cross_max: float
    uniformity_gap_per_k: list[float]
    relative_gap_per_k: list[float]
    tolerance: float

    def _uniform(self) -> bool:
        return all(g <= self.tolerance for g in self.relative_gap_per_k)

    @property
    def passed(self) -> bool:
        """Conditions hold up to a logical bit flip.

        Entries with p != q and k != l are exempt: for the cat code a single
        loss maps one code word onto the other, so those entries measure
        the flip that the repetition layer corrects.
        """
        return self.orthogonality_max <= self.tolerance and self._uniform()

    @property
    def strict_passed(self) -> bool:
        """Every entry with p != q or k != l vanishes."""
        return self.off_diag_max <= self.tolerance and self._uniform()

    def entry(self, p: int, k: int, q: int, l: int) -> complex:
        nk = self.n_kraus
        return complex(self.condition_matrix[p * nk + k, q * nk + l])

    def ratio(self, k: int) -> float:
        """<0|K_k^+ K_k|0> / <1|K_k^+ K_k|1>."""
        return self.entry(0, k, 0, k).real / self.entry(1, k, 1, k).real


def kl_condition_matrix(
    codewords: list[StateVector],
    kraus: list[Operator],
    tolerance: float = DEFAULT_TOLERANCE,
) -> KLReport:
    """Evaluate the Knill-Laflamme conditions for a code and an error set.

    ``off_diag_max`` covers every entry with p != q or k != l; it splits
    into ``orthogonality_max`` (exactly one of the pairs differs) and
    ``cross_max`` (both differ). Uniformity is judged on the probability
    gap relative to its mean, which matches |ratio - 1| to first order.
    """
    for i, c in enumerate(codewords):
        if abs(c.norm() - 1.0) > 1e-10:
            raise InputError(f"code word {i} is not normalized")
        for j in range(i):
            if abs(codewords[j].inner(c)) > 1e-10:
                raise InputError(f"code words {j} and {i} are not orthogonal")
    nk = len(kraus)
    vecs = np.array([(K @ c).amplitudes for c in codewords for K in kraus])
    mat = vecs.conj() @ vecs.T
    p_idx = np.repeat(np.arange(len(codewords)), nk)
    k_idx = np.tile(np.arange(nk), len(codewords))
    p_diff = p_idx[:, None] != p_idx[None, :]
    k_diff = k_idx[:, None] != k_idx[None, :]
    mags = np.abs(mat)
    diag = np.diag(mat).real.reshape(len(codewords), nk)
    gaps = (diag.max(axis=0) - diag.min(axis=0)).tolist()
    means = diag.mean(axis=0)
    rel = [g / m if m > 0 else 0.0 for g, m in zip(gaps, means)]
    return KLReport(
        condition_matrix=mat,
        n_codewords=len(codewords),
        n_kraus=nk,
        off_diag_max=float(np.max(mags[p_diff | k_diff], initial=0.0)),
        orthogonality_max=float(np.max(mags[p_diff ^ k_diff], initial=0.0)),
        cross_max=float(np.max(mags[p_diff & k_diff], initial=0.0)),
        uniformity_gap_per_k=gaps,
        relative_gap_per_k=rel,
        tolerance=tolerance,
    )


def cat_code_report(
    alpha: float, eta: float, kmax: int = 1, tolerance: float = DEFAULT_TOLERANCE,
    space: FockSpace | None = None,
) -> KLReport:
    space = space or codecheck_space(alpha)
    words = [cat_state(space, alpha, CatParity.EVEN), cat_state(space, alpha, CatParity.ODD)]
    ops = [kraus_operator(space, k, eta) for k in range(kmax + 1)]
    return kl_condition_matrix(words, ops, tolerance)


def _check_ratio_args(alpha: float, eta: float) -> None:
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")


def kl_ratio_no_jump(alpha: float, eta: float) -> float:
    """(1 + e^{-2 eta a^2}) / (1 - e^{-2 eta a^2}), the no-decay probability ratio
    between the code words with the cat normalizations left out."""
    _check_ratio_args(alpha, eta)
    x = -2.0 * eta * alpha**2
    return (1.0 + math.exp(x)) / -math.expm1(x)


def kl_ratio_jump(alpha: float, eta: float) -> float:
    """Single-decay counterpart of :func:`kl_ratio_no_jump`; its reciprocal."""
    _check_ratio_args(alpha, eta)
    x = -2.0 * eta * alpha**2
    return -math.expm1(x) / (1.0 + math.exp(x))


def kl_ratio_exact(alpha: float, eta: float, k: int, space: FockSpace | None = None) -> float:
    """<0_L|K_k^+ K_k|0_L> / <1_L|K_k^+ K_k|1_L> from matrix elements of normalized code words."""
    _check_ratio_args(alpha, eta)
    space = space or codecheck_space(alpha)
    K = kraus_operator(space, k, eta)
    even = K @ cat_state(space, alpha, CatParity.EVEN)
    odd = K @ cat_state(space, alpha, CatParity.ODD)
    return even.norm() ** 2 / odd.norm() ** 2


def normalization_correction(alpha: float) -> float:
    """(1 - e^{-2a^2}) / (1 + e^{-2a^2}): exact ratio divided by the closed form."""
    x = -2.0 * alpha**2
    return -math.expm1(x) / (1.0 + math.exp(x))


@dataclass(frozen=True)
class ResetBudget:
    alpha0: float
    gamma: float
    tolerance: float
    L: float
    t_max: float

    @property
    def usable(self) -> bool:
        return self.t_max > 0


def reset_budget(alpha0: float, gamma: float, tolerance: float) -> ResetBudget:
    """Time before eta * alpha0^2 drops to the bound L set by ``tolerance``.

    The no-decay ratio deviates from 1 by about 2 exp(-2 eta alpha^2), so
    keeping it within ``tolerance`` needs eta alpha^2 >= L = ln(2/tol) / 2.
    With eta = exp(-gamma t) this holds until t_max = ln(alpha0^2 / L) / gamma.
    """
    if not 0.0 < tolerance < 1.0:
        raise ValueError(f"tolerance must lie in (0, 1), got {tolerance}")
    if alpha0 <= 0 or gamma <= 0:
        raise ValueError("alpha0 and gamma must be positive")
    L = 0.5 * math.log(2.0 / tolerance)
    a2 = alpha0 * alpha0
    # relative guard so a tolerance placed exactly on the boundary gives 0
    t_max = math.log(a2 / L) / gamma if a2 > L * (1 + 1e-12) else 0.0
    return ResetBudget(alpha0, gamma, tolerance, L, t_max)
