"""Dense complex linear algebra shared by all quantum modules.

Everything operates on plain ``numpy.ndarray`` matrices (complex128,
row-major).  Eigendecompositions are deterministic: fixed ascending order
with a lexicographic eigenvector tie-break for exactly degenerate values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances as tol


class NumericsError(RuntimeError):
    """Eigensolver failure or other numerical breakdown."""


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def adjoint(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def _require_square(a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")


def _tie_break(values: np.ndarray, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Order eigenvector columns within exactly-equal eigenvalue groups.

    Key: lexicographic on (real, imag) of the first component whose modulus
    exceeds half the column maximum, after fixing its phase to be real
    positive.  Exact ties are rare; this only makes them reproducible.
    """
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    start = 0
    n = values.shape[0]
    while start < n:
        stop = start
        while stop + 1 < n and values[stop + 1] == values[start]:
            stop += 1
        if stop > start:
            cols = vectors[:, start : stop + 1]
            keys = []
            for k in range(cols.shape[1]):
                col = cols[:, k]
                j = int(np.argmax(np.abs(col) > 0.5 * np.abs(col).max()))
                phase = col[j] / abs(col[j]) if col[j] != 0 else 1.0
                fixed = col / phase
                keys.append(tuple(np.round(fixed.view(np.float64), 12)))
            sub = sorted(range(cols.shape[1]), key=lambda k: keys[k])
            vectors[:, start : stop + 1] = cols[:, sub]
        start = stop + 1
    return values, vectors


def hermitian_eig(a: np.ndarray, check: bool = True) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises ValueError if the input is not square or not Hermitian within
    the shared tolerance, NumericsError if the solver fails to converge.
    """
    _require_square(a)
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if check:
        asym = np.abs(a - adjoint(a)).max()
        if asym > tol.HERMITIAN_INPUT_ATOL:
            raise ValueError(f"matrix is not Hermitian: max|A - A^dag| = {asym:.3e}")
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericsError(f"Hermitian eigensolver did not converge: {exc}") from exc
    values, vectors = _tie_break(values, vectors)
    return EigenSystem(values=values, vectors=vectors)


def expm_i_hermitian(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i h dt) for Hermitian h, via the spectral decomposition."""
    eig = hermitian_eig(h)
    phases = np.exp(-1j * eig.values * dt)
    return (eig.vectors * phases) @ adjoint(eig.vectors)


def unitary_eig(u: np.ndarray) -> EigenSystem:
    """Spectral decomposition of a unitary matrix.

    Returns phases ``phi`` in (-pi, pi], ascending, with ``u v = exp(-i phi) v``
    for each eigenvector column ``v``.  Works by diagonalising the Hermitian
    part (u + u^dag)/2 and splitting clustered cosine eigenvalues with the
    anti-Hermitian part (u - u^dag)/(2i); valid because u is normal.
    """
    _require_square(u)
    u = np.ascontiguousarray(u, dtype=np.complex128)
    defect = np.abs(adjoint(u) @ u - np.eye(u.shape[0])).max()
    if defect > tol.UNITARY_INPUT_TOL:
        raise ValueError(f"matrix is not unitary: max|U^dag U - I| = {defect:.3e}")

    cos_part = (u + adjoint(u)) / 2.0
    sin_part = (u - adjoint(u)) / 2j
    cos_eig = hermitian_eig(cos_part, check=False)
    values, vectors = cos_eig.values, cos_eig.vectors.copy()

    # Split clusters of (nearly) equal cosines using the sine part.
    start = 0
    n = values.shape[0]
    while start < n:
        stop = start
        while stop + 1 < n and values[stop + 1] - values[stop] < tol.UNITARY_COS_CLUSTER_TOL:
            stop += 1
        if stop > start:
            block = vectors[:, start : stop + 1]
            sub = hermitian_eig(adjoint(block) @ sin_part @ block, check=False)
            vectors[:, start : stop + 1] = block @ sub.vectors
        start = stop + 1

    # Rayleigh quotients give the unit-circle eigenvalues; map to phases.
    f = np.einsum("ij,ik,kj->j", vectors.conj(), u, vectors)
    moduli = np.abs(f)
    if np.abs(moduli - 1.0).max() > tol.UNITARY_MODULUS_TOL:
        raise NumericsError(
            f"unitary eigenvalues left the unit circle by {np.abs(moduli - 1.0).max():.3e}"
        )
    phases = -np.angle(f)
    phases[phases <= -np.pi] = np.pi  # branch (-pi, pi]
    order = np.argsort(phases, kind="stable")
    phases, vectors = _tie_break(phases[order], vectors[:, order])
    return EigenSystem(values=phases, vectors=vectors)
