import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian, random_state, random_unitary
from scrambletop import floquet as fl, otoc
from scrambletop.numerics import adjoint
from scrambletop.spin import make_spin, scs, w_rotation


def projector(psi):
    return np.outer(psi, psi.conj())


class TestOtocConfig:
    def test_rejects_decreasing_times(self):
        with pytest.raises(ValueError, match="increasing"):
            otoc.OtocConfig(theta=0.1, phi=0.0, epsilon=0.1, times=[2.0, 1.0])

    def test_rejects_negative_times(self):
        with pytest.raises(ValueError, match="increasing|nonnegative"):
            otoc.OtocConfig(theta=0.1, phi=0.0, epsilon=0.1, times=[-1.0, 1.0])

    def test_rejects_zero_shots(self):
        with pytest.raises(ValueError, match="shots"):
            otoc.OtocConfig(theta=0.1, phi=0.0, epsilon=0.1, times=[1.0], shots=0)


class TestOtocPure:
    def test_initial_value_is_unity(self, params72, sys72, flo72):
        cfg = otoc.OtocConfig(theta=0.6 * np.pi, phi=0.3, epsilon=np.pi / 40, times=[0.0, 1.0])
        res = otoc.otoc_pure(cfg, params72, sys72, flo72)
        assert abs(res.f[0] - 1.0) < 1e-12

    def test_zero_angle_probe_is_trivial(self, params72, sys72, flo72):
        cfg = otoc.OtocConfig(theta=0.6 * np.pi, phi=0.0, epsilon=0.0, times=[1.0, 5.0, 9.0])
        res = otoc.otoc_pure(cfg, params72, sys72, flo72)
        # F = (sum of populations)^2; unitary roundoff drifts the norm by ~1e-13/period
        assert np.abs(res.f - 1.0).max() < 1e-11

    def test_result_invariants(self, params72, sys72, flo72):
        cfg = otoc.OtocConfig(
            theta=0.6 * np.pi, phi=0.0, epsilon=np.pi / 40, times=np.arange(1.0, 21.0)
        )
        res = otoc.otoc_pure(cfg, params72, sys72, flo72)
        assert np.abs(res.populations.sum(axis=1) - 1.0).max() < 1e-9
        assert np.abs(res.f - np.abs(res.expectation_w) ** 2).max() < 1e-12
        assert np.all(res.f >= 0.0) and np.all(res.f <= 1.0 + 1e-12)
        assert np.abs(res.c - (1.0 - res.f)).max() == 0.0

    def test_matches_trace_oracle(self, params72, sys72, flo72, rng):
        prop = fl.propagator(flo72, params72, sys72)
        for _ in range(3):
            th = float(np.arccos(rng.uniform(-1, 1)))
            ph = float(rng.uniform(0, 2 * np.pi))
            cfg = otoc.OtocConfig(theta=th, phi=ph, epsilon=np.pi / 40, times=[1.0, 4.0, 11.0])
            res = otoc.otoc_pure(cfg, params72, sys72, flo72)
            w, _ = w_rotation(sys72, th, ph, np.pi / 40)
            rho0 = projector(scs(sys72, th, ph).amplitudes)
            for k, t in enumerate(cfg.times):
                oracle = otoc.otoc_trace_oracle(rho0, rho0, w, t * params72.tau, prop)
                assert abs(res.f[k] - oracle) < 1e-10

    def test_population_reuse_is_bitwise(self, params72, sys72, flo72):
        times = np.arange(1.0, 13.0)
        base = otoc.otoc_pure(
            otoc.OtocConfig(theta=0.6 * np.pi, phi=0.0, epsilon=np.pi / 400, times=times),
            params72,
            sys72,
            flo72,
        )
        fresh = otoc.otoc_pure(
            otoc.OtocConfig(theta=0.6 * np.pi, phi=0.0, epsilon=np.pi / 8, times=times),
            params72,
            sys72,
            flo72,
        )
        reused = otoc.reweight_epsilon(base, np.pi / 8, sys72)
        assert np.array_equal(reused.f, fresh.f)
        assert np.array_equal(reused.expectation_w, fresh.expectation_w)
        assert np.array_equal(base.populations, fresh.populations)

    @settings(max_examples=10, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_f_stays_in_unit_interval(self, params32, sys32, flo32, seed):
        local = np.random.default_rng(seed)
        cfg = otoc.OtocConfig(
            theta=float(local.uniform(0, np.pi)),
            phi=float(local.uniform(0, 2 * np.pi)),
            epsilon=float(local.uniform(0, np.pi)),
            times=[1.0, 3.0, 8.0],
        )
        res = otoc.otoc_pure(cfg, params32, sys32, flo32)
        assert np.all(res.f >= 0.0) and np.all(res.f <= 1.0 + 1e-12)


class TestShots:
    def test_sampled_populations_are_counts(self, params72, sys72, flo72):
        cfg = otoc.OtocConfig(
            theta=0.6 * np.pi, phi=0.0, epsilon=np.pi / 40, times=[1.0, 5.0], shots=64, rng_seed=5
        )
        res = otoc.otoc_pure(cfg, params72, sys72, flo72)
        counts = res.populations * 64
        assert np.abs(counts - np.round(counts)).max() < 1e-9
        assert np.abs(res.populations.sum(axis=1) - 1.0).max() < 1e-12

    def test_seeded_runs_are_identical(self, params72, sys72, flo72):
        cfg = otoc.OtocConfig(
            theta=0.6 * np.pi, phi=0.0, epsilon=np.pi / 40, times=[1.0, 5.0], shots=500, rng_seed=9
        )
        a = otoc.otoc_pure(cfg, params72, sys72, flo72)
        b = otoc.otoc_pure(cfg, params72, sys72, flo72)
        assert np.array_equal(a.populations, b.populations)

    def test_estimator_is_unbiased(self, params32, sys32, flo32):
        times = [3.0]
        exact = otoc.otoc_pure(
            otoc.OtocConfig(theta=0.6 * np.pi, phi=0.0, epsilon=np.pi / 10, times=times),
            params32,
            sys32,
            flo32,
        ).expectation_w[0]
        replicas = np.empty(200, dtype=complex)
        for k in range(200):
            cfg = otoc.OtocConfig(
                theta=0.6 * np.pi,
                phi=0.0,
                epsilon=np.pi / 10,
                times=times,
                shots=256,
                rng_seed=1000 + k,
            )
            replicas[k] = otoc.otoc_pure(cfg, params32, sys32, flo32).expectation_w[0]
        for part in (np.real, np.imag):
            mean = part(replicas).mean()
            stderr = part(replicas).std(ddof=1) / np.sqrt(len(replicas))
            assert abs(mean - part(exact)) < 3 * max(stderr, 1e-12)


class TestTraceOracle:
    def test_identity_operators(self, rng):
        psi = random_state(rng, 5)
        prop = fl.static_propagator(random_hermitian(rng, 5))
        value = otoc.otoc_trace_oracle(projector(psi), np.eye(5), np.eye(5), 2.0, prop)
        assert abs(value - 1.0) < 1e-12

    def test_rejects_unnormalised_rho(self, rng):
        prop = fl.static_propagator(random_hermitian(rng, 4))
        with pytest.raises(ValueError, match="unit trace"):
            otoc.otoc_trace_oracle(np.eye(4, dtype=complex), np.eye(4), np.eye(4), 1.0, prop)

    def test_rejects_dimension_mismatch(self, rng):
        prop = fl.static_propagator(random_hermitian(rng, 4))
        rho = projector(random_state(rng, 4))
        with pytest.raises(ValueError, match="mismatch"):
            otoc.otoc_trace_oracle(rho, np.eye(3), np.eye(4), 1.0, prop)


class TestLoschmidt:
    def test_identity_probe(self, rng):
        psi = random_state(rng, 6)
        prop = fl.static_propagator(random_hermitian(rng, 6))
        assert abs(otoc.loschmidt_fidelity(projector(psi), np.eye(6), 3.0, prop) - 1.0) < 1e-12

    def test_commuting_probe_at_time_zero(self, rng):
        psi = np.zeros(5, dtype=complex)
        psi[2] = 1.0
        w = np.diag(np.exp(-1j * np.arange(5) * 0.3))
        prop = fl.static_propagator(random_hermitian(rng, 5))
        assert abs(otoc.loschmidt_fidelity(projector(psi), w, 0.0, prop) - 1.0) < 1e-12

    def test_equals_trace_oracle(self, rng):
        for _ in range(25):
            d = int(rng.integers(2, 9))
            prop = fl.static_propagator(random_hermitian(rng, d))
            rho0 = projector(random_state(rng, d))
            w = random_unitary(rng, d)
            t = float(rng.uniform(0, 8))
            echo = otoc.loschmidt_fidelity(rho0, w, t, prop)
            oracle = otoc.otoc_trace_oracle(rho0, rho0, w, t, prop)
            assert abs(echo - oracle.real) < 1e-12
            assert abs(oracle.imag) < 1e-12

    def test_rejects_mixed_state(self, rng):
        prop = fl.static_propagator(random_hermitian(rng, 4))
        with pytest.raises(ValueError, match="pure"):
            otoc.loschmidt_fidelity(np.eye(4) / 4, np.eye(4), 1.0, prop)


class TestPolarization:
    def test_identity_probe_gives_zero(self):
        e0 = np.array([1.0, 0.0, 0.0], dtype=complex)
        e1 = np.array([0.0, 1.0, 0.0], dtype=complex)
        assert abs(otoc.polarization_element(e0, e1, np.eye(3))) < 1e-15

    def test_diagonal_probe_offdiagonal_vanishes(self):
        e0 = np.array([1.0, 0.0], dtype=complex)
        e1 = np.array([0.0, 1.0], dtype=complex)
        w = np.diag([np.exp(-0.4j), np.exp(0.9j)])
        assert abs(otoc.polarization_element(e0, e1, w)) < 1e-15

    def test_matches_direct_element(self, rng):
        for _ in range(20):
            d = int(rng.integers(2, 9))
            basis = random_unitary(rng, d)
            w = random_unitary(rng, d)
            i, k = rng.choice(d, size=2, replace=False)
            rebuilt = otoc.polarization_element(basis[:, i], basis[:, k], w)
            direct = basis[:, k].conj() @ (w @ basis[:, i])
            assert abs(rebuilt - direct) < 1e-10

    def test_rejects_non_orthogonal(self):
        v = np.array([1.0, 0.0], dtype=complex)
        with pytest.raises(ValueError, match="orthogonal"):
            otoc.polarization_element(v, v, np.eye(2))


class TestMixedState:
    def test_weight_validation(self):
        with pytest.raises(ValueError, match="sum to 1"):
            otoc.MixedState(weights=np.array([0.5, 0.4]), basis=np.eye(2, dtype=complex))

    def test_basis_validation(self):
        basis = np.array([[1.0, 1.0], [0.0, 0.0]], dtype=complex)
        with pytest.raises(ValueError, match="orthonormal"):
            otoc.MixedState(weights=np.array([0.5, 0.5]), basis=basis)

    def test_density_matrix(self):
        ms = otoc.MixedState(weights=np.array([0.7, 0.3]), basis=np.eye(2, dtype=complex))
        assert np.allclose(ms.density_matrix, np.diag([0.7, 0.3]))


class TestOtocMixed:
    def test_pure_component_reduces_to_protocol(self, params32, sys32, flo32):
        # weight 1 on the coherent state reproduces the pure-state series
        th, ph, eps = 0.6 * np.pi, 0.0, np.pi / 40
        psi = scs(sys32, th, ph).amplitudes
        basis = np.linalg.qr(
            np.column_stack([psi, np.eye(sys32.dim, dtype=complex)[:, : sys32.dim - 1]])
        )[0]
        # keep the first column exactly aligned with the coherent state
        basis[:, 0] = psi
        weights = np.zeros(sys32.dim)
        weights[0] = 1.0
        ms = otoc.MixedState(weights=weights, basis=basis)
        times = [1.0, 3.0, 7.0]
        cfg = otoc.OtocConfig(theta=th, phi=ph, epsilon=eps, times=times)
        prop = fl.propagator(flo32, params32, sys32)
        mixed = otoc.otoc_mixed(ms, cfg, prop, sys32, period=params32.tau)
        pure = otoc.otoc_pure(cfg, params32, sys32, flo32)
        assert np.abs(mixed - pure.f).max() < 1e-10

    def test_two_level_toy_against_brute_force(self):
        sys = make_spin(0.5)
        ms = otoc.MixedState(weights=np.array([0.5, 0.5]), basis=np.eye(2, dtype=complex))
        prop = fl.static_propagator(sys.jx)  # H = sigma_x / 2
        cfg = otoc.OtocConfig(theta=0.0, phi=0.0, epsilon=0.4, times=[0.7, 2.1, 5.3])
        protocol = otoc.otoc_mixed(ms, cfg, prop, sys)
        w, _ = w_rotation(sys, 0.0, 0.0, 0.4)
        rho0 = ms.density_matrix
        for k, t in enumerate(cfg.times):
            brute = otoc.otoc_trace_oracle(rho0, rho0, w, t, prop)
            assert abs(protocol[k] - brute.real) < 1e-9

    def test_random_mixture_against_brute_force(self, rng):
        d = 4
        basis = random_unitary(rng, d)
        ms = otoc.MixedState(weights=np.array([0.7, 0.3, 0.0, 0.0]), basis=basis)
        sys = make_spin((d - 1) / 2)
        prop = fl.static_propagator(random_hermitian(rng, d))
        cfg = otoc.OtocConfig(theta=0.9, phi=0.4, epsilon=0.25, times=[1.5])
        protocol = otoc.otoc_mixed(ms, cfg, prop, sys)[0]
        w, _ = w_rotation(sys, 0.9, 0.4, 0.25)
        brute = otoc.otoc_trace_oracle(ms.density_matrix, ms.density_matrix, w, 1.5, prop)
        assert abs(protocol - brute.real) < 1e-9


class TestGeneralV:
    def test_density_matrix_coefficients_reduce_to_mixed(self, rng):
        d = 4
        basis = random_unitary(rng, d)
        weights = rng.uniform(0.1, 1.0, size=d)
        weights /= weights.sum()
        ms = otoc.MixedState(weights=weights, basis=basis)
        sys = make_spin((d - 1) / 2)
        prop = fl.static_propagator(random_hermitian(rng, d))
        cfg = otoc.OtocConfig(theta=0.8, phi=0.1, epsilon=0.3, times=[2.0])
        general = otoc.otoc_general_v(ms, np.diag(weights), cfg, prop, sys)
        mixed = otoc.otoc_mixed(ms, cfg, prop, sys)
        assert abs(general.values[0] - mixed[0]) < 1e-10
        assert abs(general.values[0].imag) < 1e-10

    def test_identity_v_matches_trace_oracle(self, rng):
        d = 4
        basis = random_unitary(rng, d)
        weights = rng.uniform(0.1, 1.0, size=d)
        weights /= weights.sum()
        ms = otoc.MixedState(weights=weights, basis=basis)
        sys = make_spin((d - 1) / 2)
        prop = fl.static_propagator(random_hermitian(rng, d))
        cfg = otoc.OtocConfig(theta=0.8, phi=0.1, epsilon=0.3, times=[2.0])
        v_coeff = np.eye(d, dtype=complex)
        general = otoc.otoc_general_v(ms, v_coeff, cfg, prop, sys)
        w, _ = w_rotation(sys, 0.8, 0.1, 0.3)
        oracle = otoc.otoc_trace_oracle(ms.density_matrix, np.eye(d), w, 2.0, prop)
        assert abs(general.values[0] - oracle) < 1e-9

    def test_random_v_matches_trace_oracle_driven(self, params32, sys32, flo32, rng):
        d = sys32.dim
        basis = random_unitary(rng, d)
        weights = rng.uniform(0.1, 1.0, size=d)
        weights /= weights.sum()
        ms = otoc.MixedState(weights=weights, basis=basis)
        v_coeff = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        cfg = otoc.OtocConfig(theta=0.6 * np.pi, phi=0.0, epsilon=np.pi / 10, times=[1.0, 4.0])
        prop = fl.propagator(flo32, params32, sys32)
        general = otoc.otoc_general_v(ms, v_coeff, cfg, prop, sys32, period=params32.tau)
        w, _ = w_rotation(sys32, 0.6 * np.pi, 0.0, np.pi / 10)
        v_op = basis @ v_coeff @ adjoint(basis)
        for k, t in enumerate(cfg.times):
            oracle = otoc.otoc_trace_oracle(
                ms.density_matrix, v_op, w, t * params32.tau, prop
            )
            assert abs(general.values[k] - oracle) < 1e-9

    def test_measurement_budget(self, rng):
        d = 4
        ms = otoc.MixedState(
            weights=np.full(d, 1.0 / d), basis=random_unitary(rng, d)
        )
        sys = make_spin((d - 1) / 2)
        prop = fl.static_propagator(random_hermitian(rng, d))
        cfg = otoc.OtocConfig(theta=0.2, phi=0.0, epsilon=0.1, times=[1.0])
        general = otoc.otoc_general_v(ms, np.eye(d, dtype=complex), cfg, prop, sys)
        assert general.expectation_count == 2 * d * d - d
        assert general.expectation_count <= 2 * d * d

    def test_rejects_bad_shapes(self, rng):
        ms = otoc.MixedState(weights=np.array([0.5, 0.5]), basis=np.eye(2, dtype=complex))
        sys = make_spin(0.5)
        prop = fl.static_propagator(random_hermitian(rng, 2))
        cfg = otoc.OtocConfig(theta=0.2, phi=0.0, epsilon=0.1, times=[1.0])
        with pytest.raises(ValueError, match="2 x 2"):
            otoc.otoc_general_v(ms, np.eye(3, dtype=complex), cfg, prop, sys)


class TestScramblingSeries:
    def test_unit_f_gives_zero(self, params72, sys72, flo72):
        cfg = otoc.OtocConfig(theta=0.5, phi=0.0, epsilon=0.0, times=[1.0, 2.0])
        res = otoc.otoc_pure(cfg, params72, sys72, flo72)
        assert np.abs(otoc.scrambling_series(res)).max() < 1e-12

    def test_matches_commutator_oracle(self, params32, sys32, flo32):
        # C(t) = Tr[rho0 [V, W(t)]^dag [V, W(t)]] for pure rho0, unitary W
        th, ph, eps = 0.6 * np.pi, 0.0, np.pi / 10
        cfg = otoc.OtocConfig(theta=th, phi=ph, epsilon=eps, times=[1.0, 3.0, 6.0])
        res = otoc.otoc_pure(cfg, params32, sys32, flo32)
        c_series = otoc.scrambling_series(res)
        prop = fl.propagator(flo32, params32, sys32)
        w, _ = w_rotation(sys32, th, ph, eps)
        rho0 = projector(scs(sys32, th, ph).amplitudes)
        for k, t in enumerate(cfg.times):
            u = prop(t * params32.tau)
            w_t = adjoint(u) @ w @ u
            comm = rho0 @ w_t - w_t @ rho0
            direct = np.trace(rho0 @ adjoint(comm) @ comm).real
            assert abs(c_series[k] - direct) < 1e-10


class TestVarianceCheck:
    def test_initial_point_has_zero_variance(self, params72, sys72, flo72):
        cfg = otoc.OtocConfig(
            theta=0.6 * np.pi, phi=0.0, epsilon=np.pi / 400, times=[0.0, 1.0]
        )
        sigma_sq, ratio = otoc.variance_check(cfg, params72, sys72, flo72)
        assert abs(sigma_sq[0]) < 1e-9
        assert abs(ratio[0]) < 1e-9

    def test_small_angle_law(self, params72, sys72, flo72):
        cfg = otoc.OtocConfig(
            theta=0.6 * np.pi, phi=0.0, epsilon=np.pi / 400, times=np.arange(1.0, 21.0)
        )
        sigma_sq, ratio = otoc.variance_check(cfg, params72, sys72, flo72)
        assert np.abs(ratio - sigma_sq).max() / sigma_sq.max() < 0.05
