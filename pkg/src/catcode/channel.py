"""Zero-temperature amplitude damping of a single bosonic mode.

The channel is applied through its exact Kraus decomposition; an
independent fixed-step integration of the master equation

    d rho / dt = (gamma / 2) (2 a rho a^+ - a^+ a rho - rho a^+ a)

is provided as a cross-check.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import CompletenessError, StepSizeError, ZeroProbabilityError
from .hilbert import CompositeSpace, FockSpace, Operator, StateVector, annihilation

log = logging.getLogger(__name__)

COMPLETENESS_TOL = 1e-8
_ZERO_PROBABILITY = 1e-300


def kraus_operator(space: FockSpace, k: int, eta: float) -> Operator:
    """Kraus operator for losing exactly ``k`` quanta.

    <n-k|U_k|n> = sqrt(C(n, k)) eta^((n-k)/2) (1-eta)^(k/2), with
    ``eta`` the probability that a single quantum survives.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"survival probability must lie in (0, 1], got {eta}")
    dim = space.dim
    if not 0 <= k < dim:
        raise ValueError(f"Kraus index {k} outside 0..{dim - 1}")
    mat = np.zeros((dim, dim))
    if k > 0 and eta == 1.0:
        return Operator(space, mat)
    n = np.arange(k, dim)
    log_binom = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    log_amp = 0.5 * log_binom + 0.5 * (n - k) * math.log(eta)
    if k:
        log_amp += 0.5 * k * math.log1p(-eta)
    mat[n - k, n] = np.exp(log_amp)
    return Operator(space, mat)


@dataclass(frozen=True)
class DampingChannel:
    """Amplitude damping with survival probability ``eta``.

    ``kmax`` is the highest Kraus index kept; ``None`` keeps all of them,
    which is exact on the truncated space.
    """

    eta: float
    gamma: float | None = None
    t: float | None = None
    kmax: int | None = None

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"survival probability must lie in (0, 1], got {self.eta}")

    @classmethod
    def from_decay(cls, gamma: float, t: float, kmax: int | None = None) -> DampingChannel:
        if gamma < 0 or t < 0:
            raise ValueError("decay rate and time must be non-negative")
        return cls(eta=math.exp(-gamma * t), gamma=gamma, t=t, kmax=kmax)

    def kraus(self, space: FockSpace) -> list[Operator]:
        top = space.dim - 1 if self.kmax is None else min(self.kmax, space.dim - 1)
        return [kraus_operator(space, k, self.eta) for k in range(top + 1)]

    def completeness_error(self, space: FockSpace) -> float:
        acc = sum(K.matrix.conj().T @ K.matrix for K in self.kraus(space))
        return float(np.max(np.abs(acc - np.eye(space.dim))))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: CompositeSpace
    matrix: np.ndarray
    # trace removed by renormalization when built from a lossy map
    trace_deficit: float = 0.0

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        n = self.space.size
        if mat.shape != (n, n):
            raise ValueError(f"matrix shape {mat.shape} does not match space size {n}")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > 1e-10:
            raise ValueError(f"density matrix has trace {np.trace(mat).real!r}")
        if np.linalg.eigvalsh(mat).min() < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_state(cls, psi: StateVector) -> DensityMatrix:
        v = psi.amplitudes / psi.norm()
        return cls(psi.space, np.outer(v, v.conj()))

    def trace_distance(self, other: DensityMatrix) -> float:
        diff = self.matrix - other.matrix
        return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))

    def expectation(self, op: Operator) -> complex:
        return complex(np.trace(self.matrix @ op.matrix))


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def apply_channel(
    rho: DensityMatrix, channel: DampingChannel, completeness_tol: float = COMPLETENESS_TOL
) -> DensityMatrix:
    """sum_k U_k rho U_k^+ over the retained Kraus operators."""
    if len(rho.space.dims) != 1:
        raise ValueError("apply_channel acts on a single mode")
    space = FockSpace(rho.space.size)
    out = np.zeros_like(rho.matrix)
    for K in channel.kraus(space):
        out += K.matrix @ rho.matrix @ K.matrix.conj().T
    out = _hermitize(out)
    deficit = 1.0 - float(np.trace(out).real)
    if abs(deficit) > completeness_tol:
        raise CompletenessError(
            f"Kraus set up to k={channel.kmax} loses trace {deficit:.3e} "
            f"(tolerance {completeness_tol:.1e})"
        )
    return DensityMatrix(rho.space, out / (1.0 - deficit), trace_deficit=deficit)


def jump_conditional(psi: StateVector, eta: float, k: int) -> tuple[StateVector, float]:
    """State and probability of the branch in which exactly ``k`` quanta were lost."""
    K = kraus_operator(FockSpace(psi.space.size), k, eta)
    out = K.matrix @ psi.amplitudes
    prob = float(np.vdot(out, out).real)
    if prob < _ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"branch k={k} has vanishing probability")
    return StateVector(psi.space, out / math.sqrt(prob)), prob


def lindblad_evolve(
    rho0: DensityMatrix, gamma: float, t: float, dt: float
) -> DensityMatrix:
    """Integrate the damping master equation with fixed-step RK4.

    The state is re-Hermitized and its trace renormalized after every step;
    the accumulated trace correction must stay below 1e-6.
    """
    if gamma < 0 or t < 0:
        raise ValueError("decay rate and time must be non-negative")
    if gamma > 0 and dt > 0.01 / gamma:
        raise StepSizeError(f"dt={dt} exceeds 0.01/gamma={0.01 / gamma}")
    if gamma == 0 or t == 0:
        return rho0
    steps = max(1, math.ceil(t / dt - 1e-12))
    h = t / steps
    a = annihilation(FockSpace(rho0.space.size)).matrix
    ad = a.conj().T
    n_op = ad @ a

    def rhs(r):
        return 0.5 * gamma * (2 * a @ r @ ad - n_op @ r - r @ n_op)

    rho = rho0.matrix.copy()
    drift = 0.0
    asym = 0.0
    for _ in range(steps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * h * k1)
        k3 = rhs(rho + 0.5 * h * k2)
        k4 = rhs(rho + h * k3)
        rho = rho + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        asym = max(asym, float(np.max(np.abs(rho - rho.conj().T))))
        rho = _hermitize(rho)
        tr = float(np.trace(rho).real)
        drift += abs(tr - 1.0)
        rho /= tr
    log.debug("lindblad_evolve: %d steps, max asymmetry %.2e, trace drift %.2e", steps, asym, drift)
    if drift > 1e-6:
        raise StepSizeError(f"trace drifted by {drift:.3e} over the run; reduce dt")
    return DensityMatrix(rho0.space, rho)
