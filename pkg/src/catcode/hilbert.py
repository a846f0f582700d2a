"""Truncated Fock spaces, states, operators and the cat code words.

Units have hbar = 1 throughout, so Hamiltonians are angular frequencies.
Everything is written in the interaction picture of the free oscillator;
the mode frequency never appears.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import (
    DegenerateCatError,
    NonHermitianError,
    SpaceMismatchError,
    TruncationError,
)

LEAKAGE_TOL = 1e-10
HERMITIAN_TOL = 1e-10

__all__ = [
    "CompositeSpace",
    "FockSpace",
    "QUBIT",
    "StateVector",
    "Operator",
    "CatParity",
    "default_dim",
    "basis",
    "identity",
    "annihilation",
    "creation",
    "number",
    "parity_operator",
    "sigma_x",
    "coherent_state",
    "cat_normalization",
    "cat_state",
    "tensor",
    "fidelity",
    "expectation",
    "parity_expectation",
    "partial_trace",
    "propagator",
    "evolve_static",
]


@dataclass(frozen=True)
class CompositeSpace:
    """Ordered tensor product of finite factors, flattened row-major."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise ValueError(f"every factor needs dimension >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    def flat_index(self, multi_index) -> int:
        return int(np.ravel_multi_index(tuple(multi_index), self.dims))

    def multi_index(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.dims))

    def same_shape(self, other: CompositeSpace) -> bool:
        return self.dims == other.dims


class FockSpace(CompositeSpace):
    """Single bosonic mode keeping levels |0>, ..., |dim-1>."""

    def __init__(self, dim: int):
        super().__init__((dim,))

    @property
    def dim(self) -> int:
        return self.dims[0]

    def __repr__(self):
        return f"FockSpace(dim={self.dim})"


QUBIT = CompositeSpace((2,))


class CatParity(enum.Enum):
    EVEN = 0
    ODD = 1

    @property
    def logical(self) -> int:
        return self.value

    @property
    def sign(self) -> int:
        return 1 if self is CatParity.EVEN else -1

    @classmethod
    def parse(cls, value) -> CatParity:
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            return cls[value.upper()]
        return cls(int(value))


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StateVector:
    space: CompositeSpace
    amplitudes: np.ndarray
    # weight discarded by the Fock cutoff before renormalization
    leakage: float = 0.0

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape != (self.space.size,):
            raise SpaceMismatchError(
                f"{amps.shape[0]} amplitudes for a space of size {self.space.size}"
            )
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> StateVector:
        return StateVector(self.space, self.amplitudes / self.norm(), self.leakage)

    def inner(self, other: StateVector) -> complex:
        """<self|other>."""
        _check_same(self.space, other.space)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __add__(self, other: StateVector) -> StateVector:
        _check_same(self.space, other.space)
        return StateVector(self.space, self.amplitudes + other.amplitudes)

    def __sub__(self, other: StateVector) -> StateVector:
        _check_same(self.space, other.space)
        return StateVector(self.space, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar) -> StateVector:
        return StateVector(self.space, self.amplitudes * scalar, self.leakage)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class Operator:
    space: CompositeSpace
    matrix: np.ndarray
    diagonal_hint: bool = False

    def __post_init__(self):
        mat = _frozen(self.matrix)
        n = self.space.size
        if mat.shape != (n, n):
            raise SpaceMismatchError(f"matrix shape {mat.shape} does not match space size {n}")
        if self.diagonal_hint and np.count_nonzero(mat - np.diag(np.diag(mat))):
            raise ValueError("diagonal_hint set on an operator with off-diagonal entries")
        object.__setattr__(self, "matrix", mat)

    @property
    def dag(self) -> Operator:
        return Operator(self.space, self.matrix.conj().T, self.diagonal_hint)

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            _check_same(self.space, other.space)
            if self.diagonal_hint:
                return StateVector(self.space, np.diag(self.matrix) * other.amplitudes)
            return StateVector(self.space, self.matrix @ other.amplitudes)
        if isinstance(other, Operator):
            _check_same(self.space, other.space)
            return Operator(
                self.space,
                self.matrix @ other.matrix,
                self.diagonal_hint and other.diagonal_hint,
            )
        return NotImplemented

    def __add__(self, other: Operator) -> Operator:
        _check_same(self.space, other.space)
        return Operator(
            self.space, self.matrix + other.matrix, self.diagonal_hint and other.diagonal_hint
        )

    def __sub__(self, other: Operator) -> Operator:
        return self + (-1.0) * other

    def __mul__(self, scalar) -> Operator:
        return Operator(self.space, self.matrix * scalar, self.diagonal_hint)

    __rmul__ = __mul__

    def __neg__(self) -> Operator:
        return -1.0 * self

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def _check_same(a: CompositeSpace, b: CompositeSpace) -> None:
    if not a.same_shape(b):
        raise SpaceMismatchError(f"space {a.dims} does not match {b.dims}")


def default_dim(alpha: complex) -> int:
    """Cutoff ceil(|a|^2 + 6|a| + 10); keeps the Poisson tail below 1e-10 for |a| <= 6."""
    r = abs(alpha)
    return math.ceil(r * r + 6 * r + 10)


def basis(space: CompositeSpace, index) -> StateVector:
    """Basis ket; ``index`` is a flat index or one index per factor."""
    flat = space.flat_index(index) if isinstance(index, (tuple, list)) else int(index)
    amps = np.zeros(space.size, dtype=complex)
    amps[flat] = 1.0
    return StateVector(space, amps)


def identity(space: CompositeSpace) -> Operator:
    return Operator(space, np.eye(space.size), diagonal_hint=True)


def annihilation(space: FockSpace) -> Operator:
    n = space.dim
    return Operator(space, np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1))


def creation(space: FockSpace) -> Operator:
    return annihilation(space).dag


def number(space: FockSpace) -> Operator:
    return Operator(space, np.diag(np.arange(space.dim, dtype=float)), diagonal_hint=True)


def parity_operator(space: FockSpace) -> Operator:
    signs = np.where(np.arange(space.dim) % 2 == 0, 1.0, -1.0)
    return Operator(space, np.diag(signs), diagonal_hint=True)


def sigma_x() -> Operator:
    return Operator(QUBIT, np.array([[0.0, 1.0], [1.0, 0.0]]))


def _coherent_coefficients(dim: int, alpha: complex) -> np.ndarray:
    # c_n = e^{-|a|^2/2} a^n / sqrt(n!) by recursion; stable for complex a and a = 0
    ratios = np.empty(dim, dtype=complex)
    ratios[0] = math.exp(-abs(alpha) ** 2 / 2)
    ratios[1:] = alpha / np.sqrt(np.arange(1, dim))
    return np.cumprod(ratios)


def _poisson_tail(mean: float, start: int, parity: int | None = None) -> float:
    """P(N >= start) for N ~ Poisson(mean), optionally restricted to N % 2 == parity."""
    if mean == 0.0:
        return 0.0
    if parity is None:
        return float(gammainc(start, mean))
    stop = start + int(mean + 40 * math.sqrt(mean) + 200)
    n = np.arange(start, stop)
    n = n[n % 2 == parity]
    logs = -mean + n * math.log(mean) - gammaln(n + 1)
    return float(np.sum(np.exp(logs)))


def coherent_state(space: FockSpace, alpha: complex, max_leakage: float = LEAKAGE_TOL) -> StateVector:
    """Coherent state |alpha>, renormalized on the truncated space.

    The discarded Poisson weight is kept in ``leakage``. Raises
    :class:`TruncationError` if it exceeds ``max_leakage``.
    """
    alpha = complex(alpha)
    leakage = _poisson_tail(abs(alpha) ** 2, space.dim)
    if leakage > max_leakage:
        raise TruncationError(
            f"cutoff {space.dim} drops {leakage:.3e} of |alpha={alpha}>; "
            f"use dim >= {default_dim(alpha)}"
        )
    c = _coherent_coefficients(space.dim, alpha)
    return StateVector(space, c / np.linalg.norm(c), leakage)


def cat_normalization(alpha: complex, parity: CatParity) -> float:
    """N_+- = (2 +- 2 exp(-2|a|^2))^(-1/2)."""
    x = -2.0 * abs(alpha) ** 2
    if CatParity.parse(parity) is CatParity.EVEN:
        return (2.0 + 2.0 * math.exp(x)) ** -0.5
    if x == 0.0:
        raise DegenerateCatError("the odd cat does not exist at alpha = 0")
    return (-2.0 * math.expm1(x)) ** -0.5


def cat_state(
    space: FockSpace, alpha: complex, parity: CatParity, max_leakage: float = LEAKAGE_TOL
) -> StateVector:
    """Normalized N_+-(|alpha> +- |-alpha>).

    Built by keeping the coherent amplitudes of one photon-number parity,
    which equals the superposition exactly and avoids the cancellation in
    |alpha> - |-alpha> at small alpha. The cutoff may drop at most
    ``max_leakage`` of the norm.
    """
    parity = CatParity.parse(parity)
    alpha = complex(alpha)
    norm = cat_normalization(alpha, parity)
    mean = abs(alpha) ** 2
    leakage = 4 * norm**2 * _poisson_tail(mean, space.dim, parity.value)
    if leakage > max_leakage:
        raise TruncationError(
            f"cutoff {space.dim} drops {leakage:.3e} of the cat at alpha={alpha}; "
            f"use dim >= {default_dim(alpha)}"
        )
    c = _coherent_coefficients(space.dim, alpha)
    c[np.arange(space.dim) % 2 != parity.value] = 0.0
    return StateVector(space, c / np.linalg.norm(c), leakage)


def _tensor2(x, y):
    space = CompositeSpace(x.space.dims + y.space.dims)
    if isinstance(x, StateVector) and isinstance(y, StateVector):
        return StateVector(space, np.kron(x.amplitudes, y.amplitudes), x.leakage + y.leakage)
    if isinstance(x, Operator) and isinstance(y, Operator):
        return Operator(space, np.kron(x.matrix, y.matrix), x.diagonal_hint and y.diagonal_hint)
    raise TypeError("tensor needs two states or two operators")


def tensor(*items):
    """Kronecker product of states or operators, factors concatenated in order."""
    if not items:
        raise TypeError("tensor needs at least one operand")
    return reduce(_tensor2, items)


def fidelity(psi: StateVector, phi: StateVector) -> float:
    """|<psi|phi>|^2 for normalized states."""
    return min(1.0, abs(psi.inner(phi)) ** 2)


def expectation(op: Operator, psi: StateVector) -> complex:
    return psi.inner(op @ psi)


def parity_expectation(psi: StateVector) -> float:
    if len(psi.space.dims) != 1:
        raise SpaceMismatchError("parity_expectation needs a single-mode state")
    signs = np.where(np.arange(psi.space.size) % 2 == 0, 1.0, -1.0)
    return float(np.sum(signs * np.abs(psi.amplitudes) ** 2))


def partial_trace(psi: StateVector, keep) -> np.ndarray:
    """Reduced density matrix on the factors listed in ``keep``."""
    keep = sorted(keep)
    dims = psi.space.dims
    traced = [i for i in range(len(dims)) if i not in keep]
    t = psi.amplitudes.reshape(dims)
    t = np.moveaxis(t, keep + traced, list(range(len(dims))))
    kept = math.prod(dims[i] for i in keep)
    m = t.reshape(kept, -1)
    return m @ m.conj().T


def propagator(H: Operator, t: float) -> Operator:
    """exp(-i H t) for Hermitian H."""
    err = H.hermiticity_error()
    if err > HERMITIAN_TOL:
        raise NonHermitianError(f"Hamiltonian is not Hermitian (max |H - H^+| = {err:.3e})")
    if H.diagonal_hint:
        return Operator(H.space, np.diag(np.exp(-1j * t * np.diag(H.matrix).real)), True)
    herm = 0.5 * (H.matrix + H.matrix.conj().T)
    w, v = np.linalg.eigh(herm)
    return Operator(H.space, (v * np.exp(-1j * t * w)) @ v.conj().T)


def evolve_static(H: Operator, t: float, psi: StateVector) -> StateVector:
    """exp(-i H t)|psi> for time-independent H."""
    return propagator(H, t) @ psi
