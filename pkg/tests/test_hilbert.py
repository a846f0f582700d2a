import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catcode.errors import DegenerateCatError, NonHermitianError, SpaceMismatchError, TruncationError
from catcode.gates import hgate
from catcode.hilbert import (
    CatParity,
    CompositeSpace,
    FockSpace,
    Operator,
    StateVector,
    annihilation,
    basis,
    cat_state,
    coherent_state,
    creation,
    default_dim,
    evolve_static,
    fidelity,
    identity,
    number,
    parity_expectation,
    tensor,
)

EVEN, ODD = CatParity.EVEN, CatParity.ODD


def random_state(space, rng):
    v = rng.normal(size=space.size) + 1j * rng.normal(size=space.size)
    return StateVector(space, v / np.linalg.norm(v))


class TestLadder:
    def test_dim2(self):
        a = annihilation(FockSpace(2)).matrix
        assert a[0, 1] == 1.0
        assert np.count_nonzero(a) == 1

    def test_matrix_element(self):
        a = annihilation(FockSpace(4)).matrix
        assert a[2, 3] == pytest.approx(math.sqrt(3), abs=1e-15)

    def test_number_operator_on_basis(self):
        space = FockSpace(7)
        n_op = creation(space) @ annihilation(space)
        for n in range(space.dim):
            out = n_op @ basis(space, n)
            assert np.allclose(out.amplitudes, n * basis(space, n).amplitudes, atol=1e-14)

    def test_commutator_below_cutoff(self):
        space = FockSpace(30)
        a = annihilation(space).matrix
        comm = a @ a.conj().T - a.conj().T @ a
        assert np.max(np.abs(comm - np.eye(30))[:-1]) <= 1e-12


class TestCoherent:
    def test_vacuum(self):
        psi = coherent_state(FockSpace(10), 0)
        assert psi.leakage == 0
        assert np.array_equal(psi.amplitudes, basis(FockSpace(10), 0).amplitudes)

    def test_overlap_of_opposite_amplitudes(self):
        space = FockSpace(default_dim(1))
        overlap = coherent_state(space, 1).inner(coherent_state(space, -1))
        assert overlap.real == pytest.approx(math.exp(-2), abs=1e-12)

    def test_leakage_against_poisson_tail(self):
        mp.mp.dps = 30
        oracle = mp.nsum(lambda n: mp.exp(-9) * mp.mpf(9) ** n / mp.factorial(n), [40, mp.inf])
        psi = coherent_state(FockSpace(40), 3)
        assert psi.leakage < 1e-10
        assert psi.leakage == pytest.approx(float(oracle), rel=1e-8)

    def test_truncation_error(self):
        with pytest.raises(TruncationError):
            coherent_state(FockSpace(15), 3)

    def test_is_annihilation_eigenstate(self):
        space = FockSpace(60)
        alpha = 1.3 - 0.7j
        psi = coherent_state(space, alpha)
        out = (annihilation(space) @ psi).amplitudes
        assert np.max(np.abs(out[:-1] - alpha * psi.amplitudes[:-1])) < 1e-12


class TestCat:
    def test_even_at_zero_is_vacuum(self):
        psi = cat_state(FockSpace(8), 0, EVEN)
        assert fidelity(psi, basis(FockSpace(8), 0)) == 1.0

    def test_odd_at_zero_raises(self):
        with pytest.raises(DegenerateCatError):
            cat_state(FockSpace(8), 0, ODD)

    def test_orthogonal(self):
        space = FockSpace(default_dim(2))
        assert abs(cat_state(space, 2, EVEN).inner(cat_state(space, 2, ODD))) <= 1e-12

    def test_normalization_constant(self):
        # vacuum amplitude of N_+(|a> + |-a>) is 2 N_+ e^{-|a|^2/2}
        mp.mp.dps = 30
        n_plus = float((2 + 2 * mp.exp(-8)) ** -0.5)
        psi = cat_state(FockSpace(default_dim(2)), 2, EVEN)
        implied = psi.amplitudes[0].real * math.sqrt(1 - psi.leakage) / (2 * math.exp(-2))
        assert implied == pytest.approx(n_plus, abs=1e-12)

    def test_matches_coherent_superposition(self):
        space = FockSpace(default_dim(2.5))
        for parity in (EVEN, ODD):
            direct = coherent_state(space, 2.5j) + parity.sign * coherent_state(space, -2.5j)
            assert fidelity(direct.normalized(), cat_state(space, 2.5j, parity)) == pytest.approx(1, abs=1e-12)

    @given(st.floats(0.5, 5.0), st.floats(0, 2 * math.pi))
    @settings(max_examples=40, deadline=None)
    def test_parity_purity(self, r, phase):
        alpha = r * complex(math.cos(phase), math.sin(phase))
        space = FockSpace(default_dim(alpha))
        n = np.arange(space.dim)
        even = cat_state(space, alpha, EVEN).amplitudes
        odd = cat_state(space, alpha, ODD).amplitudes
        assert np.max(np.abs(even[n % 2 == 1])) <= 1e-14
        assert np.max(np.abs(odd[n % 2 == 0])) <= 1e-14

    @pytest.mark.parametrize("alpha", [0.5, 1, 2, 3, 5])
    def test_orthonormal_sweep(self, alpha):
        space = FockSpace(default_dim(alpha))
        s, a = cat_state(space, alpha, EVEN), cat_state(space, alpha, ODD)
        assert abs(s.inner(s) - 1) <= 1e-12
        assert abs(a.inner(a) - 1) <= 1e-12
        assert abs(s.inner(a)) <= 1e-12


class TestTensor:
    def test_vacuum_product(self):
        v = tensor(basis(FockSpace(3), 0), basis(FockSpace(4), 0))
        assert v.space.dims == (3, 4)
        assert v.amplitudes[0] == 1 and np.count_nonzero(v.amplitudes) == 1

    def test_number_on_first_factor(self):
        fa, fb = FockSpace(5), FockSpace(4)
        op = tensor(number(fa), identity(fb))
        assert op.diagonal_hint
        for n in range(5):
            for m in range(4):
                ket = tensor(basis(fa, n), basis(fb, m))
                assert np.allclose((op @ ket).amplitudes, n * ket.amplitudes)

    def test_associative(self):
        rng = np.random.default_rng(3)
        x, y, z = (random_state(CompositeSpace((d,)), rng) for d in (2, 3, 4))
        left = tensor(tensor(x, y), z).amplitudes
        right = tensor(x, tensor(y, z)).amplitudes
        assert np.max(np.abs(left - right)) <= 1e-14

    @given(st.lists(st.integers(2, 5), min_size=1, max_size=4), st.data())
    def test_index_round_trip(self, dims, data):
        space = CompositeSpace(tuple(dims))
        flat = data.draw(st.integers(0, space.size - 1))
        assert space.flat_index(space.multi_index(flat)) == flat

    def test_row_major_layout(self):
        space = CompositeSpace((3, 2, 2))
        ket = tensor(basis(FockSpace(3), 2), basis(CompositeSpace((2,)), 1), basis(CompositeSpace((2,)), 0))
        assert int(np.argmax(np.abs(ket.amplitudes))) == space.flat_index((2, 1, 0)) == 10


class TestFidelity:
    def test_self(self):
        psi = cat_state(FockSpace(30), 2, ODD)
        assert fidelity(psi, psi) == pytest.approx(1, abs=1e-14)

    def test_opposite_parity(self):
        space = FockSpace(30)
        assert fidelity(cat_state(space, 2, EVEN), cat_state(space, 2, ODD)) <= 1e-12

    def test_neighbouring_cats(self):
        # |<S(a)|S(b)>|^2 from coherent overlaps, evaluated in mpmath
        frozen = 0.99001670750444235690
        space = FockSpace(40)
        f = fidelity(cat_state(space, 2, EVEN), cat_state(space, 2.1, EVEN))
        assert f == pytest.approx(frozen, abs=1e-11)

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            fidelity(basis(FockSpace(3), 0), basis(FockSpace(4), 0))


class TestParity:
    @pytest.mark.parametrize("alpha", [0.5, 2, 4])
    def test_even_cat(self, alpha):
        psi = cat_state(FockSpace(default_dim(alpha)), alpha, EVEN)
        assert parity_expectation(psi) == pytest.approx(1, abs=1e-12)

    def test_odd_cat(self):
        assert parity_expectation(cat_state(FockSpace(30), 2, ODD)) == pytest.approx(-1, abs=1e-12)

    def test_coherent(self):
        psi = coherent_state(FockSpace(default_dim(1)), 1)
        assert parity_expectation(psi) == pytest.approx(math.exp(-2), abs=1e-12)


def rk4_oracle(H, psi, t, dt):
    y = psi.copy()
    f = lambda v: -1j * (H @ v)
    for _ in range(int(round(t / dt))):
        k1 = f(y)
        k2 = f(y + dt / 2 * k1)
        k3 = f(y + dt / 2 * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


class TestEvolveStatic:
    def test_zero_time(self):
        space = FockSpace(10)
        psi = random_state(space, np.random.default_rng(0))
        H = annihilation(space) + creation(space)
        assert np.allclose(evolve_static(H, 0.0, psi).amplitudes, psi.amplitudes, atol=1e-14)

    def test_number_operator_full_period(self):
        space = FockSpace(12)
        psi = random_state(space, np.random.default_rng(1))
        out = evolve_static(number(space), 2 * math.pi, psi)
        assert fidelity(out, psi) == pytest.approx(1, abs=1e-10)

    def test_drive_against_rk4(self):
        alpha, theta = 4.0, math.pi / 4
        space = FockSpace(default_dim(alpha))
        beta = theta / (2 * alpha)
        a = annihilation(space).matrix
        H = Operator(space, beta * (a + a.T))
        psi = cat_state(space, alpha, EVEN)
        oracle = rk4_oracle(H.matrix, psi.amplitudes, 1.0, 1e-4)
        out = evolve_static(H, 1.0, psi)
        assert np.max(np.abs(out.amplitudes - oracle)) <= 1e-8
        assert np.max(np.abs((hgate(space, alpha, theta) @ psi).amplitudes - oracle)) <= 1e-8

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            evolve_static(annihilation(FockSpace(5)), 1.0, basis(FockSpace(5), 0))

    @given(st.integers(0, 2**32 - 1), st.floats(0.0, 10.0))
    @settings(max_examples=25, deadline=None)
    def test_unitary(self, seed, t):
        rng = np.random.default_rng(seed)
        space = FockSpace(8)
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        H = Operator(space, m + m.conj().T)
        psi, phi = random_state(space, rng), random_state(space, rng)
        before = fidelity(psi, phi)
        after = fidelity(evolve_static(H, t, psi), evolve_static(H, t, phi))
        assert abs(after - before) <= 1e-10
        assert abs(evolve_static(H, t, psi).norm() - 1) <= 1e-10

    def test_diagonal_fast_path(self):
        space = FockSpace(6)
        H = Operator(space, np.diag(np.arange(6.0) ** 2), diagonal_hint=True)
        psi = random_state(space, np.random.default_rng(5))
        expected = np.exp(-1j * 0.3 * np.arange(6.0) ** 2) * psi.amplitudes
        assert np.allclose(evolve_static(H, 0.3, psi).amplitudes, expected, atol=1e-14)


def test_diagonal_hint_validated():
    with pytest.raises(ValueError):
        Operator(FockSpace(2), np.ones((2, 2)), diagonal_hint=True)


def test_states_are_immutable():
    psi = basis(FockSpace(3), 1)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 1.0
