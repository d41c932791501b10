"""Forward-only OTOC evaluation and its independent oracles.

The protocol path never touches Heisenberg operators directly: it evolves a
state forward, reads populations in the probe eigenbasis (rotate back, then
project onto J_z), and averages the known unit-modulus eigenvalues.  The
trace and Loschmidt-echo oracles evaluate the same correlator by explicit
operator algebra and exist purely to check the protocol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import tolerances as tol
from .floquet import FloquetOperator, QuantumParams, evolve
from .numerics import NumericsError, adjoint
from .spin import SpinSystem, axis_operator, probe_eigenvalues, rotation

Propagator = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class OtocConfig:
    """Coherent-state axis, probe rotation angle, and evaluation times.

    ``times`` are in units of the drive period.  With ``shots`` set, the
    populations at each time are multinomial samples of that size drawn from
    a counter-based generator seeded with ``rng_seed``; otherwise populations
    are exact.
    """

    theta: float
    phi: float
    epsilon: float
    times: Sequence[float] = field(default_factory=tuple)
    shots: int | None = None
    rng_seed: int = 0

    def __post_init__(self):
        times = np.asarray(list(self.times), dtype=float)
        if times.size and (np.any(times < 0) or np.any(np.diff(times) <= 0)):
            raise ValueError("times must be nonnegative and strictly increasing")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be a positive count")
        object.__setattr__(self, "times", times)


@dataclass(frozen=True)
class OtocResult:
    """Time series produced by the measurement protocol."""

    times: np.ndarray
    f: np.ndarray
    c: np.ndarray
    expectation_w: np.ndarray
    populations: np.ndarray  # shape (n_times, d), rows sum to 1


class GeneralVResult(NamedTuple):
    """Arbitrary-V OTOC series plus the measurement budget used per time."""

    values: np.ndarray
    expectation_count: int


@dataclass(frozen=True)
class MixedState:
    """Statistical mixture sum_n p_n |Psi_n><Psi_n| over an orthonormal set."""

    weights: np.ndarray
    basis: np.ndarray  # columns are |Psi_n>

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        b = np.asarray(self.basis, dtype=np.complex128)
        if w.ndim != 1 or b.ndim != 2 or b.shape[1] != w.size:
            raise ValueError("weights must match the number of basis columns")
        if np.any(w < 0) or np.any(w > 1):
            raise ValueError("weights must lie in [0, 1]")
        if abs(w.sum() - 1.0) > tol.MIXTURE_WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
        gram = adjoint(b) @ b
        defect = np.abs(gram - np.eye(w.size)).max()
        if defect > tol.BASIS_GRAM_TOL:
            raise ValueError(f"basis is not orthonormal: max|G - I| = {defect:.3e}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "basis", b)

    @property
    def density_matrix(self) -> np.ndarray:
        return (self.basis * self.weights) @ adjoint(self.basis)


def _population_readout(
    psi_t: np.ndarray, r_back: np.ndarray, rng: np.random.Generator | None, shots: int | None
) -> np.ndarray:
    """Step-2 readout: rotate back and project onto the J_z basis."""
    amps = r_back @ psi_t
    pops = np.abs(amps) ** 2
    total = pops.sum()
    if abs(total - 1.0) > tol.STATE_NORM_GUARD:
        raise NumericsError(f"evolved state lost normalisation: sum(populations) = {total!r}")
    if shots is None:
        return pops
    clipped = np.clip(pops, 0.0, None)
    counts = rng.multinomial(shots, clipped / clipped.sum())
    return counts / shots


def otoc_pure(
    cfg: OtocConfig,
    p: QuantumParams,
    sys: SpinSystem,
    f: FloquetOperator,
) -> OtocResult:
    """Measurement-protocol OTOC for the coherent state at cfg's axis.

    Prepares |theta, phi>, evolves forward to each time, samples the probe
    eigenbasis populations, and forms <W(t)> as the population-weighted sum
    of exp(-i m epsilon); F = |<W>|^2.
    """
    r = rotation(sys, cfg.theta, cfg.phi)
    r_back = adjoint(r)
    psi0 = r[:, 0]
    rng = np.random.Generator(np.random.Philox(cfg.rng_seed)) if cfg.shots else None
    populations = np.empty((len(cfg.times), sys.dim))
    for k, t in enumerate(cfg.times):
        psi_t = evolve(psi0, t * p.tau, f, p, sys)
        populations[k] = _population_readout(psi_t, r_back, rng, cfg.shots)
    return result_from_populations(cfg.times, populations, cfg.epsilon, sys)


def result_from_populations(
    times: np.ndarray, populations: np.ndarray, epsilon: float, sys: SpinSystem
) -> OtocResult:
    """Assemble an OtocResult from stored populations and a probe angle.

    Because the probe eigenstates do not depend on epsilon, one measured
    population set serves every rotation angle; this is the reuse path.
    """
    mu = probe_eigenvalues(sys, epsilon)
    expectation_w = populations @ mu
    f_series = np.abs(expectation_w) ** 2
    return OtocResult(
        times=np.asarray(times, dtype=float),
        f=f_series,
        c=1.0 - f_series,
        expectation_w=expectation_w,
        populations=populations,
    )


def reweight_epsilon(result: OtocResult, epsilon: float, sys: SpinSystem) -> OtocResult:
    """Re-evaluate a stored result at a different probe angle (no re-run)."""
    return result_from_populations(result.times, result.populations, epsilon, sys)


def scrambling_series(result: OtocResult) -> np.ndarray:
    """Scrambling commutator series C(t) = 1 - F(t)."""
    f = np.asarray(result.f, dtype=float)
    if np.any(f < -1e-12) or np.any(f > 1.0 + 1e-12):
        raise ValueError("F series must lie in [0, 1]")
    return 1.0 - f


def otoc_trace_oracle(
    rho0: np.ndarray,
    v: np.ndarray,
    w: np.ndarray,
    t: float,
    u_of_t: Propagator,
) -> complex:
    """Brute-force correlator Tr[rho0 W^dag(t) V^dag W(t) V].

    Builds the Heisenberg-picture W(t) = U^dag W U explicitly; this is the
    reference every protocol path is checked against.
    """
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if abs(np.trace(rho0) - 1.0) > 1e-9:
        raise ValueError("rho0 must have unit trace")
    u = u_of_t(t)
    if u.shape != rho0.shape or v.shape != rho0.shape or w.shape != rho0.shape:
        raise ValueError("dimension mismatch between state, operators, and propagator")
    w_t = adjoint(u) @ w @ u
    return complex(np.trace(rho0 @ adjoint(w_t) @ adjoint(v) @ w_t @ v))


def loschmidt_fidelity(
    rho0: np.ndarray,
    w: np.ndarray,
    t: float,
    u_of_t: Propagator,
) -> float:
    """Echo fidelity Tr[rho0 W(t) rho0 W^dag(t)] for a pure rho0.

    Forward-evolve, perturb, evolve back, compare with the start; equals the
    trace-oracle OTOC with V chosen as the initial-state projector.
    """
    rho0 = np.asarray(rho0, dtype=np.complex128)
    purity = np.trace(rho0 @ rho0).real
    if abs(purity - 1.0) > tol.PURITY_TOL:
        raise ValueError(f"rho0 must be pure, Tr[rho^2] = {purity!r}")
    u = u_of_t(t)
    w_t = adjoint(u) @ w @ u
    echoed = w_t @ rho0 @ adjoint(w_t)
    return float(np.trace(rho0 @ echoed).real)


def polarization_element(
    n_state: np.ndarray,
    m_state: np.ndarray,
    w_heis: np.ndarray,
) -> complex:
    """Off-diagonal element <Psi_m| W(t) |Psi_n> from four expectation values.

    Measures W(t) in the superpositions (|n> +- |m>)/sqrt2 and
    (|n> +- i|m>)/sqrt2 and combines them; only expectation values in pure
    states are used, exactly as an experiment would.
    """
    n_state = np.asarray(n_state, dtype=np.complex128)
    m_state = np.asarray(m_state, dtype=np.complex128)
    for name, s in (("n_state", n_state), ("m_state", m_state)):
        if abs(np.linalg.norm(s) - 1.0) > 1e-10:
            raise ValueError(f"{name} must be normalised")
    overlap = abs(np.vdot(n_state, m_state))
    if overlap > tol.ORTHOGONALITY_TOL:
        raise ValueError(f"input states must be orthogonal, |<n|m>| = {overlap:.3e}")
    a_plus = (n_state + m_state) / np.sqrt(2.0)
    a_minus = (n_state - m_state) / np.sqrt(2.0)
    b_plus = (n_state + 1j * m_state) / np.sqrt(2.0)
    b_minus = (n_state - 1j * m_state) / np.sqrt(2.0)

    def ev(s: np.ndarray) -> complex:
        return complex(s.conj() @ (w_heis @ s))

    return (ev(a_plus) - ev(a_minus) + 1j * ev(b_plus) - 1j * ev(b_minus)) / 2.0


def _w_matrix(cfg: OtocConfig, sys: SpinSystem) -> np.ndarray:
    r = rotation(sys, cfg.theta, cfg.phi)
    return (r * probe_eigenvalues(sys, cfg.epsilon)) @ adjoint(r)


def _protocol_elements(
    basis: np.ndarray, w_heis: np.ndarray
) -> tuple[np.ndarray, int]:
    """All matrix elements <Psi_k| W(t) |Psi_i> via protocol measurements.

    Diagonal entries are direct expectation values; each off-diagonal pair
    (k, i), (i, k) shares the four superposition measurements, so the
    distinct expectation-value count is d + 2 d (d - 1) = 2 d^2 - d.
    """
    d = basis.shape[1]
    elements = np.empty((d, d), dtype=np.complex128)
    count = 0
    for i in range(d):
        elements[i, i] = basis[:, i].conj() @ (w_heis @ basis[:, i])
        count += 1
    for i in range(d):
        for k in range(i + 1, d):
            # four expectation values give both (k, i) and (i, k)
            elements[k, i] = polarization_element(basis[:, i], basis[:, k], w_heis)
            elements[i, k] = polarization_element(basis[:, k], basis[:, i], w_heis)
            count += 4
    return elements, count


def otoc_mixed(
    ms: MixedState,
    cfg: OtocConfig,
    u_of_t: Propagator,
    sys: SpinSystem,
    period: float = 1.0,
) -> np.ndarray:
    """Protocol OTOC for a mixed initial state, one value per cfg time.

    F(t) = sum_{m,n} p_n^2 p_m |<Psi_m|W(t)|Psi_n>|^2 with every matrix
    element reconstructed from measurable expectation values.
    ``period`` converts cfg times to absolute time (drive period, or 1.0
    for a time-independent system).
    """
    w = _w_matrix(cfg, sys)
    p_n = ms.weights
    out = np.empty(len(cfg.times))
    for idx, t in enumerate(cfg.times):
        u = u_of_t(t * period)
        w_heis = adjoint(u) @ w @ u
        elements, _ = _protocol_elements(ms.basis, w_heis)
        out[idx] = float(np.einsum("n,m,mn->", p_n**2, p_n, np.abs(elements) ** 2))
    return out


def otoc_general_v(
    ms: MixedState,
    v_coefficients: np.ndarray,
    cfg: OtocConfig,
    u_of_t: Propagator,
    sys: SpinSystem,
    period: float = 1.0,
) -> GeneralVResult:
    """Protocol OTOC for an arbitrary operator V = sum v_ij |Psi_i><Psi_j|.

    Every W(t) matrix element comes from the polarization reconstruction and
    the conjugation identity <Psi_j|W^dag|Psi_l> = <Psi_l|W|Psi_j>*; at most
    2 d^2 distinct expectation values are measured per time.
    """
    v = np.asarray(v_coefficients, dtype=np.complex128)
    d = ms.weights.size
    if v.shape != (d, d):
        raise ValueError(f"v coefficients must be {d} x {d}, got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("v coefficients must be finite")
    w = _w_matrix(cfg, sys)
    values = np.empty(len(cfg.times), dtype=np.complex128)
    count = 0
    for idx, t in enumerate(cfg.times):
        u = u_of_t(t * period)
        w_heis = adjoint(u) @ w @ u
        elements, count = _protocol_elements(ms.basis, w_heis)
        # F = sum_{ijkl} v_ij v*_kl p_j <Psi_j|W^dag|Psi_l> <Psi_k|W|Psi_i>
        values[idx] = np.einsum(
            "ij,kl,j,lj,ki->", v, v.conj(), ms.weights, elements.conj(), elements
        )
    return GeneralVResult(values=values, expectation_count=count)


def variance_check(
    cfg: OtocConfig,
    p: QuantumParams,
    sys: SpinSystem,
    f: FloquetOperator,
) -> tuple[np.ndarray, np.ndarray]:
    """Small-angle consistency data: (variance series, C(t)/epsilon^2 series).

    In the perturbative regime the scrambling commutator divided by the
    squared probe angle tracks the variance of the spin component along the
    coherent-state axis in the evolved state.
    """
    j_axis = axis_operator(sys, cfg.theta, cfg.phi)
    j_axis_sq = j_axis @ j_axis
    r = rotation(sys, cfg.theta, cfg.phi)
    psi0 = r[:, 0]
    sigma_sq = np.empty(len(cfg.times))
    for k, t in enumerate(cfg.times):
        psi_t = evolve(psi0, t * p.tau, f, p, sys)
        mean = (psi_t.conj() @ (j_axis @ psi_t)).real
        mean_sq = (psi_t.conj() @ (j_axis_sq @ psi_t)).real
        sigma_sq[k] = mean_sq - mean**2
    exact_cfg = OtocConfig(
        theta=cfg.theta, phi=cfg.phi, epsilon=cfg.epsilon, times=cfg.times
    )
    c_series = scrambling_series(otoc_pure(exact_cfg, p, sys, f))
    return sigma_sq, c_series / cfg.epsilon**2
