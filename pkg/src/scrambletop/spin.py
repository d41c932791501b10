"""Spin-J operator algebra, coherent states, and axis rotations.

Basis convention: the J_z eigenbasis ordered m = J, J-1, ..., -J, so the
stretched state |J, J> is the first unit vector.  hbar = 1 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import EigenSystem, adjoint, expm_i_hermitian


@dataclass(frozen=True)
class SpinSystem:
    """Spin quantum number, Hilbert dimension, and the three J operators."""

    j: float
    dim: int
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def m_values(self) -> np.ndarray:
        """J_z eigenvalues in basis order (J down to -J)."""
        return self.j - np.arange(self.dim)


@dataclass(frozen=True)
class SpinCoherentState:
    """Maximally aligned spin state along (theta, phi)."""

    theta: float
    phi: float
    amplitudes: np.ndarray


def make_spin(j: float) -> SpinSystem:
    """Build the spin-j operators from the ladder construction.

    ``2 j`` must be a positive integer (j = 1/2, 1, 3/2, ...).
    """
    two_j = 2 * j
    if two_j <= 0 or abs(two_j - round(two_j)) > 1e-12:
        raise ValueError(f"spin must be a positive half-integer, got j = {j}")
    j = round(two_j) / 2.0
    dim = int(round(two_j)) + 1
    m = j - np.arange(dim)
    jz = np.diag(m).astype(np.complex128)
    # <m+1| J+ |m> = sqrt(j(j+1) - m(m+1)); row order puts m+1 above m.
    raising = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(1, dim):
        raising[i - 1, i] = np.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
    lowering = adjoint(raising)
    jx = (raising + lowering) / 2.0
    jy = (raising - lowering) / 2j
    return SpinSystem(j=j, dim=dim, jx=jx, jy=jy, jz=jz)


def axis_unit_vector(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )


def axis_operator(sys: SpinSystem, theta: float, phi: float) -> np.ndarray:
    """Angular momentum component n(theta, phi) . J."""
    n = axis_unit_vector(theta, phi)
    return n[0] * sys.jx + n[1] * sys.jy + n[2] * sys.jz


def rotation(sys: SpinSystem, theta: float, phi: float) -> np.ndarray:
    """Unitary taking the +z axis onto (theta, phi).

    Rotation by angle theta about the in-plane axis (-sin phi, cos phi, 0),
    i.e. exp(-i theta (-sin(phi) Jx + cos(phi) Jy)).
    """
    if not (np.isfinite(theta) and np.isfinite(phi)):
        raise ValueError("rotation angles must be finite")
    if theta == 0.0:
        return np.eye(sys.dim, dtype=np.complex128)
    generator = -np.sin(phi) * sys.jx + np.cos(phi) * sys.jy
    return expm_i_hermitian(generator, theta)


def scs(sys: SpinSystem, theta: float, phi: float) -> SpinCoherentState:
    """Spin coherent state: the rotated stretched state R(theta, phi)|J, J>."""
    amplitudes = rotation(sys, theta, phi)[:, 0].copy()
    return SpinCoherentState(theta=theta, phi=phi, amplitudes=amplitudes)


def w_rotation(
    sys: SpinSystem, theta: float, phi: float, epsilon: float
) -> tuple[np.ndarray, EigenSystem]:
    """Rotation by angle epsilon about the (theta, phi) axis, with spectrum.

    This is the standard OTOC probe W: it commutes with the coherent-state
    projector on the same axis at time zero.  Returns (W, eigensystem) where
    W = R exp(-i epsilon Jz) R^dag; the eigensystem is built analytically
    from the rotated J_z basis, so eigenvectors are identical for every
    epsilon.  Eigen-system entries are ordered by m ascending (-J .. J),
    i.e. phase m*epsilon ascending for positive epsilon, with
    W psi_m = exp(-i m epsilon) psi_m.
    """
    if not np.isfinite(epsilon):
        raise ValueError("rotation angle epsilon must be finite")
    r = rotation(sys, theta, phi)
    mu = np.exp(-1j * epsilon * sys.m_values)
    w = (r * mu) @ adjoint(r)
    spectrum = EigenSystem(values=epsilon * sys.m_values[::-1], vectors=r[:, ::-1])
    return w, spectrum


def probe_eigenvalues(sys: SpinSystem, epsilon: float) -> np.ndarray:
    """exp(-i m epsilon) for m = J .. -J (basis order)."""
    return np.exp(-1j * epsilon * sys.m_values)


def expectation(state: np.ndarray, op: np.ndarray) -> complex:
    return complex(state.conj() @ (op @ state))


def transverse_variance(state: SpinCoherentState, sys: SpinSystem) -> tuple[float, float]:
    """Variances of the two rotated transverse components in ``state``.

    For an exact coherent state both equal J/2 (minimum uncertainty).
    """
    r = rotation(sys, state.theta, state.phi)
    psi = state.amplitudes
    out = []
    for op in (sys.jx, sys.jy):
        rotated = r @ op @ adjoint(r)
        mean = expectation(psi, rotated).real
        mean_sq = expectation(psi, rotated @ rotated).real
        out.append(mean_sq - mean**2)
    return out[0], out[1]
