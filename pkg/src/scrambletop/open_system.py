"""Markovian open-system evolution and the product-form OTOC approximation.

The master equation is the standard Lindblad form
rho_dot = -i[H, rho] + sum_k gamma_k (L rho L^dag - {L^dag L, rho}/2);
the reference baths are pure dephasing (L = Jz) and amplitude damping
(L = J-).  The protocol quantity for open systems multiplies the measured
probe expectation values, F_approx(t) = |Tr[rho(t) W]|^2, which equals the
true correlator whenever the doubled-object dynamics stays a product; the
``doubled_evolution_check`` verifies that structure directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import tolerances as tol
from .floquet import QuantumParams, static_hamiltonian
from .numerics import NumericsError, adjoint
from .otoc import OtocConfig
from .spin import SpinSystem, probe_eigenvalues, rotation

DEFAULT_STEP = 1e-3


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian (optionally driven) plus jump operators with rates.

    The Hamiltonian at time t is ``h_static + drive(t) * h_drive``; for the
    driven top ``drive`` is gamma*cos(omega t) on Jy and ``period`` the drive
    period.  ``period`` converts protocol time grids (in periods) to
    absolute time and defaults to 1.0 for time-independent models.
    """

    h_static: np.ndarray
    jumps: tuple[tuple[np.ndarray, float], ...] = ()
    h_drive: np.ndarray | None = None
    drive: Callable[[float], float] | None = None
    period: float = 1.0

    def __post_init__(self):
        h = np.asarray(self.h_static, dtype=np.complex128)
        if np.abs(h - adjoint(h)).max() > tol.HERMITIAN_INPUT_ATOL:
            raise ValueError("static Hamiltonian must be Hermitian")
        for _, rate in self.jumps:
            if rate < 0:
                raise ValueError(f"jump rates must be nonnegative, got {rate}")
        if (self.h_drive is None) != (self.drive is None):
            raise ValueError("h_drive and drive must be provided together")

    def hamiltonian(self, t: float) -> np.ndarray:
        if self.h_drive is None:
            return self.h_static
        return self.h_static + self.drive(t) * self.h_drive

    @property
    def dim(self) -> int:
        return self.h_static.shape[0]


@dataclass(frozen=True)
class Superoperator:
    """Generator acting on row-major vectorised density matrices."""

    m: np.ndarray
    dim: int


def driven_top_model(
    p: QuantumParams, sys: SpinSystem, jumps: Sequence[tuple[np.ndarray, float]]
) -> LindbladModel:
    """Driven-top Hamiltonian with the given jump operators."""
    return LindbladModel(
        h_static=static_hamiltonian(p, sys),
        jumps=tuple((np.asarray(op, dtype=np.complex128), float(rate)) for op, rate in jumps),
        h_drive=sys.jy,
        drive=lambda t: p.gamma * np.cos(p.omega * t),
        period=p.tau,
    )


def dephasing_model(p: QuantumParams, sys: SpinSystem, rate: float) -> LindbladModel:
    """Driven top with pure dephasing along z (L = Jz)."""
    return driven_top_model(p, sys, [(sys.jz, rate)])


def damping_model(p: QuantumParams, sys: SpinSystem, rate: float) -> LindbladModel:
    """Driven top with amplitude damping (L = J- = Jx - i Jy)."""
    lowering = sys.jx - 1j * sys.jy
    return driven_top_model(p, sys, [(lowering, rate)])


def _superoperator_parts(model: LindbladModel) -> tuple[np.ndarray, np.ndarray | None]:
    """Static generator and the drive generator multiplying drive(t)."""
    d = model.dim
    eye = np.eye(d)
    h = np.asarray(model.h_static, dtype=np.complex128)
    m_static = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for op, rate in model.jumps:
        k = adjoint(op) @ op
        m_static += rate * (
            np.kron(op, op.conj()) - 0.5 * (np.kron(k, eye) + np.kron(eye, k.T))
        )
    m_drive = None
    if model.h_drive is not None:
        hd = np.asarray(model.h_drive, dtype=np.complex128)
        m_drive = -1j * (np.kron(hd, eye) - np.kron(eye, hd.T))
    return m_static, m_drive


def build_superoperator(model: LindbladModel, t: float = 0.0) -> Superoperator:
    """Master-equation generator at time t, acting on vec(rho) (row-major)."""
    m_static, m_drive = _superoperator_parts(model)
    m = m_static if m_drive is None else m_static + model.drive(t) * m_drive
    return Superoperator(m=m, dim=model.dim)


def _lindblad_rhs(rho: np.ndarray, t: float, model: LindbladModel, prepared) -> np.ndarray:
    h = model.hamiltonian(t)
    out = -1j * (h @ rho - rho @ h)
    for op, op_dag, k, rate in prepared:
        out += rate * (op @ rho @ op_dag - 0.5 * (k @ rho + rho @ k))
    return out


def _prepare_jumps(model: LindbladModel):
    return [
        (op, adjoint(op), adjoint(op) @ op, rate) for op, rate in model.jumps
    ]


def _check_density(rho: np.ndarray) -> None:
    if np.abs(rho - adjoint(rho)).max() > 1e-10:
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise ValueError("density matrix must have unit trace")
    if np.linalg.eigvalsh((rho + adjoint(rho)) / 2).min() < -1e-10:
        raise ValueError("density matrix must be positive semidefinite")


def evolve_density(
    rho0: np.ndarray,
    model: LindbladModel,
    t: float,
    dt: float = DEFAULT_STEP,
) -> np.ndarray:
    """Integrate the master equation to time t with fixed-step RK4.

    The Hamiltonian part is rebuilt at every stage, so periodic driving is
    handled exactly at the sampled times.  Raises NumericsError when the
    result loses positivity beyond tolerance (use a smaller dt).
    """
    rho = np.asarray(rho0, dtype=np.complex128).copy()
    _check_density(rho)
    if t == 0.0:
        return rho
    if t < 0:
        raise ValueError("evolution time must be nonnegative")
    prepared = _prepare_jumps(model)
    n_steps = max(1, int(round(t / dt)))
    h = t / n_steps
    for s in range(n_steps):
        ts = s * h
        k1 = _lindblad_rhs(rho, ts, model, prepared)
        k2 = _lindblad_rhs(rho + 0.5 * h * k1, ts + 0.5 * h, model, prepared)
        k3 = _lindblad_rhs(rho + 0.5 * h * k2, ts + 0.5 * h, model, prepared)
        k4 = _lindblad_rhs(rho + h * k3, ts + h, model, prepared)
        rho += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    herm = np.abs(rho - adjoint(rho)).max()
    trace_err = abs(np.trace(rho).real - 1.0)
    if herm > tol.DENSITY_HERMITICITY_TOL or trace_err > tol.DENSITY_TRACE_TOL:
        raise NumericsError(
            f"density matrix degraded: hermiticity {herm:.3e}, trace error {trace_err:.3e}"
        )
    min_eig = np.linalg.eigvalsh((rho + adjoint(rho)) / 2).min()
    if min_eig < tol.DENSITY_POSITIVITY_FLOOR:
        raise NumericsError(
            f"positivity violated (min eigenvalue {min_eig:.3e}); use a smaller step"
        )
    return rho


def otoc_open_approx(
    rho0: np.ndarray,
    cfg: OtocConfig,
    model: LindbladModel,
    sys: SpinSystem,
    dt: float = DEFAULT_STEP,
) -> np.ndarray:
    """Product-form OTOC approximation |Tr[rho(t) W]|^2 over cfg.times.

    Uses the same readout as the closed protocol: rotate back, take the
    J_z-basis populations of the evolved density matrix, and weight them by
    the probe eigenvalues.  cfg.times are in units of ``model.period``.
    """
    rho0 = np.asarray(rho0, dtype=np.complex128)
    purity = np.trace(rho0 @ rho0).real
    if abs(purity - 1.0) > tol.PURITY_TOL:
        raise ValueError(f"initial state must be pure, Tr[rho^2] = {purity!r}")
    r = rotation(sys, cfg.theta, cfg.phi)
    r_back = adjoint(r)
    mu = probe_eigenvalues(sys, cfg.epsilon)
    prepared = _prepare_jumps(model)
    out = np.empty(len(cfg.times))
    rho = rho0.copy()
    t_prev = 0.0
    for idx, t_periods in enumerate(cfg.times):
        t_abs = t_periods * model.period
        span = t_abs - t_prev
        if span > 0:
            n_steps = max(1, int(round(span / dt)))
            h = span / n_steps
            for s in range(n_steps):
                ts = t_prev + s * h
                k1 = _lindblad_rhs(rho, ts, model, prepared)
                k2 = _lindblad_rhs(rho + 0.5 * h * k1, ts + 0.5 * h, model, prepared)
                k3 = _lindblad_rhs(rho + 0.5 * h * k2, ts + 0.5 * h, model, prepared)
                k4 = _lindblad_rhs(rho + h * k3, ts + h, model, prepared)
                rho += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        t_prev = t_abs
        populations = np.real(np.diag(r_back @ rho @ r))
        out[idx] = abs(populations @ mu) ** 2
    return out


def doubled_evolution_check(
    rho0: np.ndarray,
    model: LindbladModel,
    t: float,
    dt: float = DEFAULT_STEP,
) -> float:
    """Integrate the doubled object under two commuting generator copies.

    Starting from the product X(0) = vec(rho0) vec(rho0)^T, the noise-free
    doubled dynamics X_dot = M X + X M^T must keep X a product of density
    matrix elements; returns max|X(t) - vec(rho(t)) vec(rho(t))^T|.
    Refuses dimensions above 16 (the object scales as d^4).
    """
    rho0 = np.asarray(rho0, dtype=np.complex128)
    d = rho0.shape[0]
    if d > 16:
        raise ValueError(f"doubled evolution limited to dimension 16, got {d}")
    _check_density(rho0)
    m_static, m_drive = _superoperator_parts(model)
    vec0 = rho0.reshape(-1)
    x = np.outer(vec0, vec0)
    if t == 0.0:
        rho_t = rho0
    else:
        n_steps = max(1, int(round(t / dt)))
        h = t / n_steps

        def xdot(xm: np.ndarray, ts: float) -> np.ndarray:
            m = m_static if m_drive is None else m_static + model.drive(ts) * m_drive
            return m @ xm + xm @ m.T

        for s in range(n_steps):
            ts = s * h
            k1 = xdot(x, ts)
            k2 = xdot(x + 0.5 * h * k1, ts + 0.5 * h)
            k3 = xdot(x + 0.5 * h * k2, ts + 0.5 * h)
            k4 = xdot(x + h * k3, ts + h)
            x += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        rho_t = evolve_density(rho0, model, t, dt)
    vec_t = rho_t.reshape(-1)
    return float(np.abs(x - np.outer(vec_t, vec_t)).max())
