"""Classical driven top: flow, tangent dynamics, and Lyapunov estimation.

The Hamiltonian is alpha*Lz + beta*Lx^2/|L| + gamma*cos(omega t)*Ly, whose
angular-momentum Poisson brackets give the flow Ldot = grad(H) x L with
grad(H) = (2 beta Lx/|L|, gamma cos(omega t), alpha).  |L| is conserved and
trajectories are normalised to the unit sphere.

All rates returned by this module are per drive period (units 1/tau).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from . import tolerances as tol

DEFAULT_STEPS_PER_PERIOD = 3000


@dataclass(frozen=True)
class ClassicalParams:
    alpha: float = 1.0
    beta: float = 1.5
    gamma: float = 0.05
    omega: float = 1.5

    @property
    def tau(self) -> float:
        if self.omega <= 0:
            raise ValueError("drive frequency omega must be positive")
        return 2.0 * np.pi / self.omega


@dataclass
class VariationalState:
    """Phase point with the fundamental matrix of the tangent flow.

    ``phi`` is stored renormalised; the true fundamental matrix is
    ``exp(log_scale) * phi``.
    """

    l: np.ndarray
    phi: np.ndarray
    t: float
    log_scale: float = 0.0


# State layout for the combined kernel: y[0:3] = L, y[3 + 3i + k] = Phi[i, k].
@njit(cache=True, nogil=True)
def _deriv12(dy, y, t, alpha, two_beta, gamma, omega):
    lx, ly, lz = y[0], y[1], y[2]
    r2 = lx * lx + ly * ly + lz * lz
    r = np.sqrt(r2)
    gx = two_beta * lx / r
    gy = gamma * np.cos(omega * t)
    gz = alpha
    dy[0] = gy * lz - gz * ly
    dy[1] = gz * lx - gx * lz
    dy[2] = gx * ly - gy * lx
    # Jacobian of the flow: cross-matrix of g plus the |L|-aware gradient of gx.
    c = two_beta / r
    ir2 = 1.0 / r2
    dgx_x = c * (1.0 - lx * lx * ir2)
    dgx_y = -c * lx * ly * ir2
    dgx_z = -c * lx * lz * ir2
    d01 = -gz
    d02 = gy
    d10 = gz - lz * dgx_x
    d11 = -lz * dgx_y
    d12 = -gx - lz * dgx_z
    d20 = -gy + ly * dgx_x
    d21 = gx + ly * dgx_y
    d22 = ly * dgx_z
    for j in range(3):
        p0 = y[3 + j]
        p1 = y[6 + j]
        p2 = y[9 + j]
        dy[3 + j] = d01 * p1 + d02 * p2
        dy[6 + j] = d10 * p0 + d11 * p1 + d12 * p2
        dy[9 + j] = d20 * p0 + d21 * p1 + d22 * p2


@njit(cache=True, nogil=True)
def _rk4_12(y, t0, dt, n_steps, alpha, two_beta, gamma, omega):
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)
    sixth = dt / 6.0
    half = dt / 2.0
    for s in range(n_steps):
        t = t0 + s * dt
        _deriv12(k1, y, t, alpha, two_beta, gamma, omega)
        for i in range(12):
            tmp[i] = y[i] + half * k1[i]
        _deriv12(k2, tmp, t + half, alpha, two_beta, gamma, omega)
        for i in range(12):
            tmp[i] = y[i] + half * k2[i]
        _deriv12(k3, tmp, t + half, alpha, two_beta, gamma, omega)
        for i in range(12):
            tmp[i] = y[i] + dt * k3[i]
        _deriv12(k4, tmp, t + dt, alpha, two_beta, gamma, omega)
        for i in range(12):
            y[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
    return t0 + n_steps * dt


@njit(cache=True, nogil=True)
def _deriv3(dy, y, t, alpha, two_beta, gamma, omega):
    lx, ly, lz = y[0], y[1], y[2]
    r = np.sqrt(lx * lx + ly * ly + lz * lz)
    gx = two_beta * lx / r
    gy = gamma * np.cos(omega * t)
    gz = alpha
    dy[0] = gy * lz - gz * ly
    dy[1] = gz * lx - gx * lz
    dy[2] = gx * ly - gy * lx


@njit(cache=True, nogil=True)
def _rk4_3(y, t0, dt, n_steps, alpha, two_beta, gamma, omega):
    k1 = np.empty(3)
    k2 = np.empty(3)
    k3 = np.empty(3)
    k4 = np.empty(3)
    tmp = np.empty(3)
    sixth = dt / 6.0
    half = dt / 2.0
    for s in range(n_steps):
        t = t0 + s * dt
        _deriv3(k1, y, t, alpha, two_beta, gamma, omega)
        for i in range(3):
            tmp[i] = y[i] + half * k1[i]
        _deriv3(k2, tmp, t + half, alpha, two_beta, gamma, omega)
        for i in range(3):
            tmp[i] = y[i] + half * k2[i]
        _deriv3(k3, tmp, t + half, alpha, two_beta, gamma, omega)
        for i in range(3):
            tmp[i] = y[i] + dt * k3[i]
        _deriv3(k4, tmp, t + dt, alpha, two_beta, gamma, omega)
        for i in range(3):
            y[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
    return t0 + n_steps * dt


def direction(theta: float, phi: float) -> np.ndarray:
    """Unit vector with polar angle theta and azimuth phi."""
    return np.array(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )


def eom(l: np.ndarray, t: float, p: ClassicalParams) -> np.ndarray:
    """Time derivative of the angular momentum vector."""
    l = np.asarray(l, dtype=float)
    if np.linalg.norm(l) == 0.0:
        raise ValueError("angular momentum must be nonzero")
    y = np.zeros(12)
    y[:3] = l
    dy = np.empty(12)
    _deriv12(dy, y, t, p.alpha, 2.0 * p.beta, p.gamma, p.omega)
    return dy[:3].copy()


def jacobian(l: np.ndarray, t: float, p: ClassicalParams) -> np.ndarray:
    """Derivative of ``eom`` with respect to L (evaluated analytically)."""
    l = np.asarray(l, dtype=float)
    if np.linalg.norm(l) == 0.0:
        raise ValueError("angular momentum must be nonzero")
    y = np.zeros(12)
    y[:3] = l
    y[3] = y[7] = y[11] = 1.0  # Phi = identity makes dPhi the Jacobian itself
    dy = np.empty(12)
    _deriv12(dy, y, t, p.alpha, 2.0 * p.beta, p.gamma, p.omega)
    return dy[3:].reshape(3, 3).copy()


def _steps_for(p: ClassicalParams, steps_per_period: int | None) -> int:
    n = DEFAULT_STEPS_PER_PERIOD if steps_per_period is None else int(steps_per_period)
    if n < 100:
        raise ValueError("steps_per_period below 100 is too coarse for the accuracy gates")
    return n


def _n_periods(t_total: float, tau: float) -> int:
    n = int(round(t_total / tau))
    if n < 1 or abs(t_total - n * tau) > 1e-9 * tau:
        raise ValueError(f"duration {t_total} is not a positive multiple of the period {tau}")
    return n


def trajectory(
    l0: np.ndarray,
    p: ClassicalParams,
    n_periods: int,
    steps_per_period: int | None = None,
) -> np.ndarray:
    """Stroboscopic samples L(k tau), k = 0..n_periods, shape (n+1, 3)."""
    n_steps = _steps_for(p, steps_per_period)
    dt = p.tau / n_steps
    y = np.asarray(l0, dtype=float).copy()
    out = np.empty((n_periods + 1, 3))
    out[0] = y
    for k in range(n_periods):
        _rk4_3(y, k * p.tau, dt, n_steps, p.alpha, 2.0 * p.beta, p.gamma, p.omega)
        out[k + 1] = y
    return out


def integrate_variational(
    l0: np.ndarray,
    p: ClassicalParams,
    t_total: float,
    steps_per_period: int | None = None,
) -> VariationalState:
    """Co-integrate the flow and its fundamental matrix from Phi(0) = identity.

    Phi is renormalised whenever its largest entry exceeds the overflow
    threshold; the factored-out growth accumulates in ``log_scale``.
    """
    n_periods = _n_periods(t_total, p.tau)
    n_steps = _steps_for(p, steps_per_period)
    dt = p.tau / n_steps
    y = np.zeros(12)
    y[:3] = np.asarray(l0, dtype=float)
    y[3] = y[7] = y[11] = 1.0
    log_scale = 0.0
    for k in range(n_periods):
        _rk4_12(y, k * p.tau, dt, n_steps, p.alpha, 2.0 * p.beta, p.gamma, p.omega)
        peak = np.abs(y[3:]).max()
        if peak > tol.PHI_RENORM_THRESHOLD:
            y[3:] /= peak
            log_scale += np.log(peak)
    return VariationalState(
        l=y[:3].copy(), phi=y[3:].reshape(3, 3).copy(), t=n_periods * p.tau, log_scale=log_scale
    )


def integrate_pair(
    l0: np.ndarray,
    delta0: np.ndarray,
    t_total: float,
    dt: float,
    p: ClassicalParams,
) -> tuple[np.ndarray, np.ndarray]:
    """Distance between two trajectories started at l0 and l0 + delta0.

    Returns (times in periods, |difference|) sampled once per period.
    The step must resolve the drive: dt > tau/100 is rejected.
    """
    if dt > p.tau / 100.0:
        raise ValueError(f"step size {dt} exceeds tau/100; refusing inaccurate integration")
    n_periods = _n_periods(t_total, p.tau)
    n_steps = int(round(p.tau / dt))
    step = p.tau / n_steps
    ya = np.asarray(l0, dtype=float).copy()
    yb = ya + np.asarray(delta0, dtype=float)
    dist = np.empty(n_periods + 1)
    dist[0] = np.linalg.norm(yb - ya)
    args = (p.alpha, 2.0 * p.beta, p.gamma, p.omega)
    for k in range(n_periods):
        _rk4_3(ya, k * p.tau, step, n_steps, *args)
        _rk4_3(yb, k * p.tau, step, n_steps, *args)
        dist[k + 1] = np.linalg.norm(yb - ya)
    return np.arange(n_periods + 1, dtype=float), dist


def variational_divergence(
    l0: np.ndarray,
    delta0: np.ndarray,
    t_total: float,
    p: ClassicalParams,
    steps_per_period: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """|Phi(k tau) delta0| per period: tangent-space separation growth.

    Unlike ``integrate_pair`` this is not limited by the phase-space size,
    so the exponential growth continues past the pair-saturation plateau.
    """
    n_periods = _n_periods(t_total, p.tau)
    n_steps = _steps_for(p, steps_per_period)
    dt = p.tau / n_steps
    delta0 = np.asarray(delta0, dtype=float)
    y = np.zeros(12)
    y[:3] = np.asarray(l0, dtype=float)
    y[3] = y[7] = y[11] = 1.0
    log_scale = 0.0
    out = np.empty(n_periods + 1)
    out[0] = np.linalg.norm(delta0)
    for k in range(n_periods):
        _rk4_12(y, k * p.tau, dt, n_steps, p.alpha, 2.0 * p.beta, p.gamma, p.omega)
        phi = y[3:].reshape(3, 3)
        out[k + 1] = np.exp(np.log(np.linalg.norm(phi @ delta0)) + log_scale)
        peak = np.abs(y[3:]).max()
        if peak > tol.PHI_RENORM_THRESHOLD:
            y[3:] /= peak
            log_scale += np.log(peak)
    return np.arange(n_periods + 1, dtype=float), out


def orthogonal_plane(x0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal basis of the plane orthogonal to x0."""
    x0 = np.asarray(x0, dtype=float)
    ref = np.array([0.0, 0.0, 1.0])
    if abs(np.dot(x0, ref)) > 0.9 * np.linalg.norm(x0):
        ref = np.array([1.0, 0.0, 0.0])
    e1 = np.cross(x0, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(x0, e1)
    e2 /= np.linalg.norm(e2)
    return e1, e2


def lyapunov(
    theta: float,
    phi: float,
    p: ClassicalParams,
    t_total: float,
    n_dirs: int = 360,
    steps_per_period: int | None = None,
) -> float:
    """Average Lyapunov exponent (1/period) at the initial direction (theta, phi).

    Applies the fundamental matrix at time T to ``n_dirs`` perturbations of
    magnitude 1e-9 equally spaced in the plane orthogonal to the initial
    point, and averages the per-direction exponents.  The raw value is
    returned; the display floor is applied only when maps are emitted.
    """
    if n_dirs < 1:
        raise ValueError("n_dirs must be at least 1")
    x0 = direction(theta, phi)
    state = integrate_variational(x0, p, t_total, steps_per_period)
    n_periods = int(round(t_total / p.tau))
    e1, e2 = orthogonal_plane(x0)
    angles = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
    dirs = np.outer(np.cos(angles), e1) + np.outer(np.sin(angles), e2)
    mag = 1e-9
    grown = (state.phi @ (mag * dirs.T)).T
    norms = np.linalg.norm(grown, axis=1)
    exponents = (np.log(norms / mag) + state.log_scale) / n_periods
    return float(exponents.mean())


def lyapunov_map(
    p: ClassicalParams,
    n_theta: int,
    n_phi: int,
    t_total: float,
    n_dirs: int = 360,
    steps_per_period: int | None = None,
    progress=None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Raw Lyapunov exponents on a (theta, phi) grid of initial directions.

    theta spans [0, pi] inclusive, phi spans [0, 2 pi) in n_phi cells.
    Returns (thetas, phis, matrix) with matrix[i, j] = lyapunov(theta_i, phi_j).
    """
    if n_theta < 2 or n_phi < 2:
        raise ValueError("map resolution must be at least 2 x 2")
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = 2.0 * np.pi * np.arange(n_phi) / n_phi
    out = np.empty((n_theta, n_phi))
    for i, th in enumerate(thetas):
        for jj, ph in enumerate(phis):
            out[i, jj] = lyapunov(th, ph, p, t_total, n_dirs, steps_per_period)
        if progress is not None:
            progress(i + 1, n_theta)
    return thetas, phis, out
