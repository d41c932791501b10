import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian
from scrambletop.numerics import (
    EigenSystem,
    adjoint,
    expm_i_hermitian,
    hermitian_eig,
    unitary_eig,
)
from scrambletop.spin import make_spin


class TestHermitianEig:
    def test_already_diagonal(self):
        eig = hermitian_eig(np.diag([1.0, 2.0, 3.0]).astype(complex))
        assert np.allclose(eig.values, [1.0, 2.0, 3.0], atol=1e-14)
        assert np.allclose(np.abs(eig.vectors), np.eye(3), atol=1e-14)

    def test_half_pauli_x(self):
        jx = make_spin(0.5).jx
        eig = hermitian_eig(jx)
        assert np.allclose(eig.values, [-0.5, 0.5], atol=1e-14)

    def test_reconstruction_random(self, rng):
        a = random_hermitian(rng, 8, scale=2.0)
        eig = hermitian_eig(a)
        rebuilt = (eig.vectors * eig.values) @ adjoint(eig.vectors)
        assert np.abs(rebuilt - a).max() < 1e-10 * np.abs(a).max()

    def test_orthonormal_columns(self, rng):
        eig = hermitian_eig(random_hermitian(rng, 11))
        gram = adjoint(eig.vectors) @ eig.vectors
        assert np.abs(gram - np.eye(11)).max() < 1e-10

    def test_eigen_residual(self, rng):
        a = random_hermitian(rng, 9, scale=3.0)
        eig = hermitian_eig(a)
        residual = np.abs(a @ eig.vectors - eig.vectors * eig.values).max()
        assert residual < 1e-10 * np.abs(a).max()

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            hermitian_eig(np.ones((2, 3), dtype=complex))

    def test_rejects_non_hermitian(self, rng):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        with pytest.raises(ValueError, match="Hermitian"):
            hermitian_eig(m)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**31), d=st.integers(2, 12))
    def test_reconstruction_property(self, seed, d):
        local = np.random.default_rng(seed)
        a = random_hermitian(local, d, scale=local.uniform(0.1, 5.0))
        eig = hermitian_eig(a)
        rebuilt = (eig.vectors * eig.values) @ adjoint(eig.vectors)
        assert np.abs(rebuilt - a).max() < 1e-10 * max(1e-30, np.abs(a).max())
        assert np.all(np.diff(eig.values) >= 0)
        assert np.all(np.isreal(eig.values))


class TestExpmIHermitian:
    def test_zero_generator(self):
        u = expm_i_hermitian(np.zeros((4, 4), dtype=complex), 1.7)
        assert np.abs(u - np.eye(4)).max() < 1e-14

    def test_diagonal_generator(self):
        energies = np.array([0.3, -1.2, 2.5])
        u = expm_i_hermitian(np.diag(energies).astype(complex), 0.8)
        assert np.abs(np.diag(u) - np.exp(-1j * energies * 0.8)).max() < 1e-14

    def test_half_turn_composition(self):
        # two quarter-turn exponentials must compose into the half turn
        jy = make_spin(0.5).jy
        half = expm_i_hermitian(jy, np.pi)
        quarter = expm_i_hermitian(jy, np.pi / 2)
        assert np.abs(quarter @ quarter - half).max() < 1e-12

    def test_group_composition_random(self, rng):
        h = random_hermitian(rng, 6)
        a, b = 0.37, 1.44
        lhs = expm_i_hermitian(h, a) @ expm_i_hermitian(h, b)
        rhs = expm_i_hermitian(h, a + b)
        assert np.abs(lhs - rhs).max() < 1e-9

    def test_result_is_unitary(self, rng):
        h = random_hermitian(rng, 7, scale=4.0)
        u = expm_i_hermitian(h, 2.1)
        assert np.abs(adjoint(u) @ u - np.eye(7)).max() < 1e-10


class TestUnitaryEig:
    def test_identity(self):
        eig = unitary_eig(np.eye(5, dtype=complex))
        assert np.abs(eig.values).max() < 1e-12
        gram = adjoint(eig.vectors) @ eig.vectors
        assert np.abs(gram - np.eye(5)).max() < 1e-10

    def test_known_phase_pair(self):
        u = np.diag([np.exp(1j * np.pi / 3), np.exp(-1j * np.pi / 3)])
        eig = unitary_eig(u)
        assert np.allclose(sorted(eig.values), [-np.pi / 3, np.pi / 3], atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="unitary"):
            unitary_eig(np.diag([1.0, 2.0]).astype(complex))

    def test_degenerate_cosine_split(self):
        # +phi/-phi pairs share a cosine; the sine part must separate them
        phases = np.array([0.7, -0.7, 0.7, 2.1])
        u = np.diag(np.exp(-1j * phases))
        eig = unitary_eig(u)
        residual = np.abs(u @ eig.vectors - eig.vectors * np.exp(-1j * eig.values)).max()
        assert residual < 1e-9
        assert np.allclose(sorted(eig.values), sorted(phases), atol=1e-12)

    def test_phase_multiset_matches_generator(self, rng):
        h = random_hermitian(rng, 8, scale=1.5)
        dt = 0.93
        u = expm_i_hermitian(h, dt)
        eig = unitary_eig(u)
        expected = hermitian_eig(h).values * dt
        wrapped = ((expected + np.pi) % (2 * np.pi)) - np.pi
        wrapped[wrapped <= -np.pi] = np.pi
        assert np.abs(np.sort(eig.values) - np.sort(wrapped)).max() < 1e-8

    def test_residual_random(self, rng):
        from conftest import random_unitary

        u = random_unitary(rng, 10)
        eig = unitary_eig(u)
        residual = np.abs(u @ eig.vectors - eig.vectors * np.exp(-1j * eig.values)).max()
        assert residual < 1e-9
        assert np.abs(np.abs(np.exp(-1j * eig.values)) - 1.0).max() < 1e-9
        assert np.all(np.diff(eig.values) >= 0)


def test_eigensystem_dim():
    eig = EigenSystem(values=np.zeros(3), vectors=np.eye(3, dtype=complex))
    assert eig.dim == 3
