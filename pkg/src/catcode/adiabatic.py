"""Adiabatic cat-state preparation.

A Kerr mode H_NL = chi a^+2 a^2 has the degenerate ground states |0> and
|1>. Switching on a two-photon drive,

    H_C(t) = H_NL - kappa(t) (a^2 + a^+2),

carries them into the even and odd cats of amplitude sqrt(kappa / chi),
both with energy -kappa^2 / chi. Parity is conserved throughout.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import config
from .errors import InsufficientSamplesError, NormDriftError, TruncationError
from .hilbert import (
    CatParity,
    FockSpace,
    Operator,
    StateVector,
    annihilation,
    basis,
    cat_state,
)

NORM_TOL = 1e-8
EDGE_POPULATION_TOL = 1e-8


@dataclass(frozen=True)
class LinearRamp:
    """kappa(t) = rate * t."""

    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("ramp rate must be non-negative")

    def __call__(self, t: float) -> float:
        return self.rate * t

    def spec(self) -> str:
        return f"linear:rate={self.rate!r}"


@dataclass(frozen=True)
class TanhSqRamp:
    """kappa(t) = k0 tanh^2(lam * t)."""

    k0: float
    lam: float

    def __post_init__(self):
        if self.k0 < 0 or self.lam < 0:
            raise ValueError("k0 and lambda must be non-negative")

    def __call__(self, t: float) -> float:
        return self.k0 * math.tanh(self.lam * t) ** 2

    def spec(self) -> str:
        return f"tanh:k0={self.k0!r},lambda={self.lam!r}"


RampSchedule = LinearRamp | TanhSqRamp

_SCHEDULE_RE = re.compile(r"^\s*(linear|tanh)\s*:\s*(.*?)\s*$")


def parse_schedule(text: str) -> RampSchedule:
    """Parse ``linear:rate=<f>`` or ``tanh:k0=<f>,lambda=<f>``."""
    m = _SCHEDULE_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse schedule {text!r}")
    kind, body = m.groups()
    params = {}
    for item in filter(None, (p.strip() for p in body.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value in schedule, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ValueError(f"bad number {value!r} in schedule") from None
    expected = {"linear": {"rate"}, "tanh": {"k0", "lambda"}}[kind]
    if set(params) != expected:
        raise ValueError(f"{kind} schedule needs exactly {sorted(expected)}, got {sorted(params)}")
    if kind == "linear":
        return LinearRamp(params["rate"])
    return TanhSqRamp(params["k0"], params["lambda"])


def kerr_hamiltonian(space: FockSpace, chi: float) -> Operator:
    """chi a^+2 a^2 = chi n (n - 1)."""
    if chi <= 0:
        raise ValueError("chi must be positive")
    n = np.arange(space.dim, dtype=float)
    return Operator(space, np.diag(chi * n * (n - 1)), diagonal_hint=True)


def two_photon_drive(space: FockSpace) -> Operator:
    """a^2 + a^+2."""
    a = annihilation(space).matrix
    a2 = a @ a
    return Operator(space, a2 + a2.T)


def cat_hamiltonian(space: FockSpace, chi: float, kappa: float) -> Operator:
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    return kerr_hamiltonian(space, chi) - kappa * two_photon_drive(space)


def target_state(space: FockSpace, chi: float, kappa: float, parity: CatParity) -> StateVector:
    """Cat of amplitude sqrt(kappa / chi); the Fock state |0> or |1> at kappa = 0."""
    parity = CatParity.parse(parity)
    if kappa == 0:
        return basis(space, parity.value)
    return cat_state(space, math.sqrt(kappa / chi), parity)


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    kappa: float
    state: StateVector
    fidelity: float
    norm_error: float
    parity_leakage: float


@dataclass(frozen=True)
class Trajectory:
    samples: list[TrajectorySample]
    schedule: RampSchedule
    chi: float
    parity: CatParity
    dt: float

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def fidelities(self) -> np.ndarray:
        return np.array([s.fidelity for s in self.samples])

    @property
    def final(self) -> TrajectorySample:
        return self.samples[-1]


def evolve_schedule(
    space: FockSpace,
    chi: float,
    schedule: RampSchedule,
    parity: CatParity,
    t_final: float,
    dt: float = config.ADIABATIC_DT,
    sample_every: int = config.SAMPLE_EVERY,
    initial: StateVector | None = None,
) -> Trajectory:
    """Integrate i d psi/dt = H_C(t) psi with classical RK4.

    Starts from Fock |0> (even) or |1> (odd) unless ``initial`` is given.
    Every ``sample_every`` steps, and at the end, the state is compared with
    the cat of the instantaneous amplitude. Raises :class:`NormDriftError`
    if the norm drifts past 1e-8 and :class:`TruncationError` if the top
    three Fock levels hold more than 1e-8 of the population.
    """
    parity = CatParity.parse(parity)
    if t_final < 0 or dt <= 0 or sample_every < 1:
        raise ValueError("need t_final >= 0, dt > 0 and sample_every >= 1")
    steps = max(1, math.ceil(t_final / dt - 1e-9))
    h = t_final / steps
    diag = np.diag(kerr_hamiltonian(space, chi).matrix).real.astype(complex)
    drive = two_photon_drive(space).matrix.astype(complex)
    wrong = np.arange(space.dim) % 2 != parity.value

    psi = (initial if initial is not None else basis(space, parity.value)).amplitudes.copy()

    def rhs(kappa, y):
        return -1j * (diag * y - kappa * (drive @ y))

    samples = []

    def record(t):
        kappa = schedule(t)
        norm = float(np.linalg.norm(psi))
        norm_err = abs(norm - 1.0)
        if norm_err > NORM_TOL:
            raise NormDriftError(f"norm drifted by {norm_err:.3e} at t={t:.6g}; reduce dt")
        edge = float(np.sum(np.abs(psi[-3:]) ** 2))
        if edge > EDGE_POPULATION_TOL:
            raise TruncationError(f"top Fock levels hold {edge:.3e} at t={t:.6g}; raise dim")
        state = StateVector(space, psi)
        target = target_state(space, chi, kappa, parity)
        fid = abs(np.vdot(target.amplitudes, psi)) ** 2 / norm**2
        leak = float(np.sum(np.abs(psi[wrong]) ** 2))
        samples.append(TrajectorySample(t, kappa, state, min(1.0, fid), norm_err, leak))

    record(0.0)
    for i in range(steps):
        t = i * h
        k_start, k_mid, k_end = schedule(t), schedule(t + 0.5 * h), schedule(t + h)
        k1 = rhs(k_start, psi)
        k2 = rhs(k_mid, psi + 0.5 * h * k1)
        k3 = rhs(k_mid, psi + 0.5 * h * k2)
        k4 = rhs(k_end, psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if (i + 1) % sample_every == 0 or i + 1 == steps:
            record((i + 1) * h)
    return Trajectory(samples, schedule, chi, parity, h)


def steady_state_fidelity(traj: Trajectory, tail_fraction: float = config.TAIL_FRACTION):
    """Mean and max - min of the fidelity over the last ``tail_fraction`` of samples."""
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    fids = traj.fidelities
    count = int(math.floor(len(fids) * tail_fraction))
    if count < 20:
        raise InsufficientSamplesError(
            f"tail window holds {count} samples, need at least 20"
        )
    tail = fids[-count:]
    return float(tail.mean()), float(tail.max() - tail.min())


@dataclass(frozen=True)
class SweepRow:
    lam: float
    saturated: bool
    mean: float
    oscillation: float


def tune_tanh(
    space: FockSpace,
    chi: float = config.CHI,
    k0: float = config.K0,
    lambdas=config.TANH_LAMBDA_GRID,
    t_final: float = config.ADIABATIC_T_FINAL,
    parity: CatParity = CatParity.ODD,
    dt: float = config.ADIABATIC_DT,
    sample_every: int = config.SAMPLE_EVERY,
    tail_fraction: float = config.TAIL_FRACTION,
    saturation: float = 0.99,
):
    """Pick lambda for the tanh^2 ramp by sweeping a grid.

    A candidate counts only if kappa has reached ``saturation * k0`` when
    the tail window opens, so the steady state is judged at the target
    amplitude. Among those the highest tail-mean fidelity wins.
    Returns ``(best_lambda, rows)``.
    """
    tail_start = t_final * (1 - tail_fraction)
    rows = []
    for lam in lambdas:
        ramp = TanhSqRamp(k0, lam)
        traj = evolve_schedule(space, chi, ramp, parity, t_final, dt, sample_every)
        mean, osc = steady_state_fidelity(traj, tail_fraction)
        rows.append(SweepRow(lam, ramp(tail_start) >= saturation * k0, mean, osc))
    eligible = [r for r in rows if r.saturated]
    if not eligible:
        raise ValueError("no lambda on the grid saturates the ramp before the tail window")
    best = max(eligible, key=lambda r: r.mean)
    return best.lam, rows
