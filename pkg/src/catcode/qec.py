"""Three-qubit bit-flip protection of a cat qubit by two ion ancillas.

Layout is ``mode (x) ancilla_1 (x) ancilla_2``. The mode parity is copied
onto both ancillas, the mode is damped, the parity is copied again, the
ancillas are read out in the {|g>, |e>} basis, and syndrome (1, 1) triggers
a logical flip of the mode. Since damping also shrinks the cat amplitude,
fidelities are scored against code words at amplitude sqrt(eta) * alpha.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import config
from .channel import kraus_operator
from .errors import InvalidSyndromeError, ZeroProbabilityError
from .gates import ion_gate, parity_cn
from .hilbert import (
    CatParity,
    CompositeSpace,
    FockSpace,
    Operator,
    StateVector,
    basis,
    cat_state,
    default_dim,
    fidelity,
    tensor,
)

GATE_MODES = ("exact", "ion")
SYNDROMES = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class LogicalQubitState:
    c0: complex
    c1: complex
    alpha_ref: float

    def __post_init__(self):
        norm = abs(self.c0) ** 2 + abs(self.c1) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"logical amplitudes have norm^2 {norm!r}, expected 1")
        if self.alpha_ref <= 0:
            raise ValueError("alpha_ref must be positive")

    def mode_state(self, space: FockSpace, alpha: float | None = None) -> StateVector:
        """c0 |0_L> + c1 |1_L> with code words at ``alpha`` (default alpha_ref)."""
        alpha = self.alpha_ref if alpha is None else alpha
        even = cat_state(space, alpha, CatParity.EVEN)
        odd = cat_state(space, alpha, CatParity.ODD)
        return even * self.c0 + odd * self.c1


@dataclass(frozen=True, eq=False)
class CircuitOutcome:
    syndrome: tuple[int, int]
    corrected_state: StateVector
    logical_fidelity: float
    jump_count_injected: int
    probability: float


def circuit_space(space: FockSpace) -> CompositeSpace:
    return CompositeSpace(space.dims + (2, 2))


def _mode_qubit_gate(space: FockSpace, gate_mode: str, eta_ld: float, coefficient: float):
    if gate_mode == "exact":
        return parity_cn(space)
    if gate_mode == "ion":
        return ion_gate(space, eta_ld, coefficient)
    raise ValueError(f"unknown gate mode {gate_mode!r}; expected one of {GATE_MODES}")


@lru_cache(maxsize=32)
def _double_cn(dim: int, gate_mode: str, eta_ld: float, coefficient: float) -> Operator:
    """CN from the mode onto ancilla 1, then onto ancilla 2."""
    space = FockSpace(dim)
    u = _mode_qubit_gate(space, gate_mode, eta_ld, coefficient).matrix.reshape(dim, 2, dim, 2)
    eye = np.eye(2)
    on_first = np.einsum("iajc,bd->iabjcd", u, eye).reshape(4 * dim, 4 * dim)
    on_second = np.einsum("ibjd,ac->iabjcd", u, eye).reshape(4 * dim, 4 * dim)
    return Operator(circuit_space(space), on_second @ on_first)


def _gate_args(gate_mode, eta_ld, coefficient):
    return (gate_mode, float(eta_ld), float(coefficient))


def encode(
    logical: LogicalQubitState,
    space: FockSpace | None = None,
    gate_mode: str = "exact",
    eta_ld: float = config.ETA_LD,
    coefficient: float = config.ION_COEFFICIENT,
) -> StateVector:
    """Prepare the cat qubit with both ancillas in |g> and copy its parity onto them."""
    space = space or FockSpace(default_dim(logical.alpha_ref))
    ground = basis(CompositeSpace((2,)), 0)
    start = tensor(logical.mode_state(space), ground, ground)
    return _double_cn(space.dim, *_gate_args(gate_mode, eta_ld, coefficient)) @ start


def inject_error(psi: StateVector, eta: float, k: int) -> tuple[StateVector, float]:
    """Apply the k-quanta loss branch to the mode; returns the normalized state and its probability."""
    dim = psi.space.dims[0]
    K = kraus_operator(FockSpace(dim), k, eta).matrix
    out = np.einsum("ij,jab->iab", K, psi.amplitudes.reshape(dim, 2, 2)).reshape(-1)
    prob = float(np.vdot(out, out).real)
    if prob < 1e-300:
        raise ZeroProbabilityError(f"loss branch k={k} has vanishing probability")
    return StateVector(psi.space, out / math.sqrt(prob)), prob


def branch_probabilities(psi: StateVector, eta: float) -> np.ndarray:
    """Probability of losing k quanta from the mode, for k = 0 .. dim-1."""
    dim = psi.space.dims[0]
    amps = psi.amplitudes.reshape(dim, 2, 2)
    probs = []
    for k in range(dim):
        out = np.einsum("ij,jab->iab", kraus_operator(FockSpace(dim), k, eta).matrix, amps)
        probs.append(float(np.vdot(out, out).real))
    return np.array(probs)


def recovery_operator(space: FockSpace, alpha: float) -> Operator:
    """Swap the even and odd cats of amplitude ``alpha``; identity on their complement."""
    even = cat_state(space, alpha, CatParity.EVEN).amplitudes
    odd = cat_state(space, alpha, CatParity.ODD).amplitudes
    mat = (
        np.eye(space.dim)
        - np.outer(even, even.conj())
        - np.outer(odd, odd.conj())
        + np.outer(even, odd.conj())
        + np.outer(odd, even.conj())
    )
    return Operator(space, mat)


def syndrome_and_correct(
    psi: StateVector,
    eta: float,
    logical: LogicalQubitState,
    rng: np.random.Generator | None = None,
    jump_count: int = 0,
    gate_mode: str = "exact",
    eta_ld: float = config.ETA_LD,
    coefficient: float = config.ION_COEFFICIENT,
    strict: bool = True,
) -> CircuitOutcome:
    """Decode, read out the ancillas, and undo a detected bit flip.

    With ``rng`` the syndrome is sampled from its Born probabilities;
    without one the most likely syndrome is taken. Syndromes (0, 1) and
    (1, 0) raise :class:`InvalidSyndromeError` unless ``strict`` is off,
    in which case the mode is left alone.
    """
    dim = psi.space.dims[0]
    space = FockSpace(dim)
    decoded = _double_cn(dim, *_gate_args(gate_mode, eta_ld, coefficient)) @ psi
    amps = decoded.amplitudes.reshape(dim, 2, 2)
    probs = np.array([np.sum(np.abs(amps[:, s1, s2]) ** 2) for s1, s2 in SYNDROMES])
    probs = probs / probs.sum()
    if rng is None:
        pick = int(np.argmax(probs))
    else:
        pick = int(rng.choice(len(SYNDROMES), p=probs))
    syndrome = SYNDROMES[pick]
    if syndrome in ((0, 1), (1, 0)) and strict:
        raise InvalidSyndromeError(syndrome)
    mode = amps[:, syndrome[0], syndrome[1]]
    mode = StateVector(space, mode / np.linalg.norm(mode))
    decayed_alpha = math.sqrt(eta) * logical.alpha_ref
    if syndrome == (1, 1):
        mode = recovery_operator(space, decayed_alpha) @ mode
    target = logical.mode_state(space, decayed_alpha)
    ancillas = basis(CompositeSpace((2, 2)), syndrome)
    return CircuitOutcome(
        syndrome=syndrome,
        corrected_state=tensor(mode, ancillas),
        logical_fidelity=fidelity(target, mode),
        jump_count_injected=jump_count,
        probability=float(probs[pick]),
    )


def unprotected_fidelity(logical: LogicalQubitState, eta: float, k: int, space: FockSpace | None = None) -> float:
    """Logical fidelity of the bare mode after the k-loss branch, with no correction."""
    space = space or FockSpace(default_dim(logical.alpha_ref))
    K = kraus_operator(space, k, eta)
    out = (K @ logical.mode_state(space)).normalized()
    return fidelity(logical.mode_state(space, math.sqrt(eta) * logical.alpha_ref), out)


@dataclass
class ProtectionSummary:
    mean_fidelity: float
    min_fidelity: float
    syndrome_histogram: dict[str, int]
    jump_histogram: dict[str, int]
    branch_probabilities: dict[str, float]
    eta: float
    trials: int
    seed: int
    gate_mode: str
    fidelities: list[float] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mean_fidelity": self.mean_fidelity,
            "min_fidelity": self.min_fidelity,
            "syndrome_histogram": self.syndrome_histogram,
            "jump_histogram": self.jump_histogram,
            "branch_probabilities": self.branch_probabilities,
            "eta": self.eta,
            "trials": self.trials,
            "seed": self.seed,
            "gate_mode": self.gate_mode,
        }


def monte_carlo_protection(
    logical: LogicalQubitState,
    alpha: float,
    gamma: float,
    t: float,
    trials: int,
    seed: int,
    gate_mode: str = "exact",
    space: FockSpace | None = None,
    eta_ld: float = config.ETA_LD,
    coefficient: float = config.ION_COEFFICIENT,
) -> ProtectionSummary:
    """Run the protection circuit ``trials`` times with at most one loss per trial.

    Each trial draws k in {0, 1} from the loss-branch probabilities
    conditioned on k <= 1, then samples the syndrome. Trial i uses the
    i-th child of ``SeedSequence(seed)``, so the summary depends only on
    the arguments. The full branch distribution, including the discarded
    k >= 2 mass, is reported alongside.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if gamma < 0 or t < 0:
        raise ValueError("gamma and t must be non-negative")
    logical = replace(logical, alpha_ref=alpha)
    space = space or FockSpace(default_dim(alpha))
    eta = math.exp(-gamma * t)
    encoded = encode(logical, space, gate_mode, eta_ld, coefficient)
    probs = branch_probabilities(encoded, eta)
    p0, p1 = float(probs[0]), float(probs[1])
    p_jump = p1 / (p0 + p1)

    injected = {}
    fids = []
    syndromes = Counter()
    jumps = Counter()
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        k = int(rng.random() < p_jump)
        if k not in injected:
            injected[k] = inject_error(encoded, eta, k)[0]
        outcome = syndrome_and_correct(
            injected[k], eta, logical, rng, k, gate_mode, eta_ld, coefficient, strict=False
        )
        fids.append(outcome.logical_fidelity)
        syndromes["".join(map(str, outcome.syndrome))] += 1
        jumps[str(k)] += 1

    return ProtectionSummary(
        mean_fidelity=math.fsum(fids) / trials,
        min_fidelity=min(fids),
        syndrome_histogram={"".join(map(str, s)): syndromes.get("".join(map(str, s)), 0) for s in SYNDROMES},
        jump_histogram={"0": jumps.get("0", 0), "1": jumps.get("1", 0)},
        branch_probabilities={"0": p0, "1": p1, "2+": max(0.0, 1.0 - p0 - p1)},
        eta=eta,
        trials=trials,
        seed=seed,
        gate_mode=gate_mode,
        fidelities=fids,
    )
