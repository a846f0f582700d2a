"""Logical gates on cat-code qubits.

Mode-mode gates act on ``mode_a (x) mode_b``; mode-ion gates act on
``mode (x) qubit`` with the electronic qubit ordered |g> = 0, |e> = 1.
"""
from __future__ import annotations

import math

import numpy as np

from .hilbert import (
    QUBIT,
    CompositeSpace,
    FockSpace,
    Operator,
    annihilation,
    identity,
    propagator,
    tensor,
)

__all__ = [
    "drive_hamiltonian",
    "hgate",
    "cross_kerr_hamiltonian",
    "pgate",
    "cn_gate",
    "parity_cn",
    "ion_cn",
    "ion_hamiltonian",
    "ion_gate",
]


def drive_hamiltonian(space: FockSpace, beta: complex) -> Operator:
    """beta a^+ + beta^* a."""
    a = annihilation(space).matrix
    return Operator(space, beta * a.conj().T + np.conj(beta) * a)


def hgate(space: FockSpace, alpha: float, theta: float) -> Operator:
    """Displacement gate rotating a real-amplitude cat qubit by ``theta``.

    Drives with real beta for a time such that beta * t = theta / (2 alpha).
    The drive displaces the cat by -i beta t, and each coherent branch
    picks up the phase exp(-+ 2 i alpha beta t), so on the code space this
    approximates cos(theta) - i sin(theta) X. Leakage out of the code space
    is about (theta / 2 alpha)^2.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return propagator(drive_hamiltonian(space, theta / (2.0 * alpha)), 1.0)


def cross_kerr_hamiltonian(space_a: FockSpace, space_b: FockSpace, chi: float) -> Operator:
    na = np.arange(space_a.dim, dtype=float)
    nb = np.arange(space_b.dim, dtype=float)
    space = CompositeSpace(space_a.dims + space_b.dims)
    return Operator(space, np.diag(chi * np.kron(na, nb)), diagonal_hint=True)


def pgate(space_a: FockSpace, space_b: FockSpace, chi_t: float = math.pi) -> Operator:
    """exp(-i chi t n_a n_b); at chi t = pi this is the sign (-1)^(n_a n_b)."""
    na = np.arange(space_a.dim)
    nb = np.arange(space_b.dim)
    prod = np.kron(na, nb)
    if chi_t == math.pi:
        phases = np.where(prod % 2 == 0, 1.0, -1.0).astype(complex)
    else:
        phases = np.exp(-1j * chi_t * prod)
    space = CompositeSpace(space_a.dims + space_b.dims)
    return Operator(space, np.diag(phases), diagonal_hint=True)


def cn_gate(space_a: FockSpace, space_b: FockSpace, alpha: float) -> Operator:
    """Controlled-NOT from displacements and the P-gate, mode a controlling mode b.

    The target is rotated by +pi/4, the P-gate applied, and the target
    rotated back by -pi/4. Reversing the second rotation is what makes the
    sequence a controlled flip: two equal rotations around a parity sign
    cancel it instead. On logical basis states the result is a CN up to
    phases (the flip acts as Y rather than X).
    """
    id_a = identity(space_a)
    first = tensor(id_a, hgate(space_b, alpha, math.pi / 4))
    second = tensor(id_a, hgate(space_b, alpha, -math.pi / 4))
    return second @ pgate(space_a, space_b) @ first


def _number_controlled_x(space: FockSpace, angles: np.ndarray) -> Operator:
    """sum_n |n><n| (x) exp(-i angle_n sigma_x)."""
    dim = space.dim
    c = np.cos(angles)
    s = -1j * np.sin(angles)
    mat = np.zeros((2 * dim, 2 * dim), dtype=complex)
    idx = 2 * np.arange(dim)
    mat[idx, idx] = c
    mat[idx + 1, idx + 1] = c
    mat[idx, idx + 1] = s
    mat[idx + 1, idx] = s
    return Operator(CompositeSpace(space.dims + QUBIT.dims), mat)


def parity_cn(space: FockSpace) -> Operator:
    """Pi_even (x) I + Pi_odd (x) X: flips the qubit iff the mode parity is odd."""
    dim = space.dim
    mat = np.zeros((2 * dim, 2 * dim))
    for n in range(dim):
        if n % 2 == 0:
            mat[2 * n, 2 * n] = mat[2 * n + 1, 2 * n + 1] = 1.0
        else:
            mat[2 * n, 2 * n + 1] = mat[2 * n + 1, 2 * n] = 1.0
    return Operator(CompositeSpace(space.dims + QUBIT.dims), mat)


def ion_cn(space: FockSpace, coefficient: float = math.pi) -> Operator:
    """exp(-i c a^+a sigma_x).

    With c = pi every Fock block gets exp(-i pi n sigma_x) = (-1)^n, a
    parity phase and no flip. With c = pi/2 odd blocks apply -i^n X and
    even blocks i^n, i.e. a parity-controlled flip combined with the mode
    rotation alpha -> i alpha.
    """
    return _number_controlled_x(space, coefficient * np.arange(space.dim, dtype=float))


def ion_hamiltonian(space: FockSpace, Omega: float, eta_ld: float) -> Operator:
    """Carrier-driven trapped-ion coupling with Lamb-Dicke parameter ``eta_ld``:
    -Omega eta^2 n sigma_x + (Omega eta^4 / 4) n (n - 1) sigma_x."""
    if not 0.0 <= eta_ld < 1.0:
        raise ValueError(f"Lamb-Dicke parameter must lie in [0, 1), got {eta_ld}")
    n = np.arange(space.dim, dtype=float)
    f = -Omega * eta_ld**2 * n + 0.25 * Omega * eta_ld**4 * n * (n - 1)
    return Operator(
        CompositeSpace(space.dims + QUBIT.dims),
        np.kron(np.diag(f), np.array([[0.0, 1.0], [1.0, 0.0]])),
    )


def ion_gate(
    space: FockSpace, eta_ld: float, coefficient: float = math.pi / 2, Omega: float = 1.0
) -> Operator:
    """exp(-i t H_I) for the time with Omega eta_ld^2 t = ``coefficient``.

    The first term alone would give ion_cn(-coefficient) (the Hamiltonian
    carries a minus sign); the second adds the per-level angle error
    (eta_ld^2 / 4) coefficient n (n - 1).
    """
    if not 0.0 < eta_ld < 1.0:
        raise ValueError(f"Lamb-Dicke parameter must lie in (0, 1), got {eta_ld}")
    t = coefficient / (Omega * eta_ld**2)
    n = np.arange(space.dim, dtype=float)
    f = -Omega * eta_ld**2 * n + 0.25 * Omega * eta_ld**4 * n * (n - 1)
    return _number_controlled_x(space, t * f)
