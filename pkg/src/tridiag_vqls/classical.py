"""Classical reference solution of the tridiagonal system by the Thomas algorithm."""

import numpy as np
import structlog

from tridiag_vqls.decomposition import TridiagonalSpec
from tridiag_vqls.errors import DimensionMismatchError, VqlsError
from tridiag_vqls.statevector import StateVector

logger = structlog.get_logger()

PIVOT_TOL = 1e-12


class SingularMatrixError(VqlsError):
    """Raised when elimination meets a pivot too small to divide by."""
    pass


def thomas_solve(lower: np.ndarray, diagonal: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a tridiagonal system by forward elimination and back substitution.

    ``lower`` and ``upper`` have one entry fewer than ``diagonal``.
    """
    size = diagonal.size
    if rhs.size != size or lower.size != size - 1 or upper.size != size - 1:
        raise DimensionMismatchError("Tridiagonal bands and right-hand side have inconsistent sizes")
    dtype = np.result_type(lower, diagonal, upper, rhs, np.complex128)
    factors = np.zeros(max(size - 1, 0), dtype=dtype)
    partial = np.zeros(size, dtype=dtype)

    pivot = diagonal[0]
    for i in range(size):
        if i > 0:
            pivot = diagonal[i] - lower[i - 1] * factors[i - 1]
        if abs(pivot) <= PIVOT_TOL:
            raise SingularMatrixError(f"Pivot {abs(pivot):.3e} at row {i} is too small")
        if i < size - 1:
            factors[i] = upper[i] / pivot
        previous = lower[i - 1] * partial[i - 1] if i > 0 else 0.0
        partial[i] = (rhs[i] - previous) / pivot

    solution = partial.copy()
    for i in range(size - 2, -1, -1):
        solution[i] -= factors[i] * solution[i + 1]
    return solution


def classical_solve(spec: TridiagonalSpec, b: StateVector) -> StateVector:
    """Normalized ``A^{-1} b`` for the constant-coefficient tridiagonal ``A``.

    Args:
        spec (TridiagonalSpec): The matrix.
        b (StateVector): Right-hand side on ``spec.n`` qubits.

    Returns:
        StateVector: The unit-norm solution direction.

    Raises:
        DimensionMismatchError: If ``b`` has the wrong number of qubits.
        SingularMatrixError: If elimination meets a zero pivot or the solution vanishes.
    """
    if b.n != spec.n:
        raise DimensionMismatchError(f"Right-hand side has {b.n} qubits, the matrix {spec.n}")
    dim = spec.dim
    off = np.full(dim - 1, spec.beta, dtype=float)
    solution = thomas_solve(off, np.full(dim, spec.alpha, dtype=float), off, b.amplitudes)
    norm = np.linalg.norm(solution)
    if norm <= PIVOT_TOL:
        raise SingularMatrixError("Solution vanishes")
    logger.debug("Classical solution computed", n=spec.n, norm=float(norm))
    return StateVector.from_amplitudes(solution / norm)
