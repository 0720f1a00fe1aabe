"""Dense statevector kernel.

Basis index ``j = sum(q_k * 2**k)``: qubit 0 is the least significant bit. Amplitudes are
stored as a read-only ``complex128`` array; every operation returns a new value.
"""

from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tridiag_vqls.circuits import Circuit
from tridiag_vqls.errors import DimensionMismatchError, StateSizeError
from tridiag_vqls.gates import Gate, GatePlacementError

EXACT_TOL = 1e-12
PIPELINE_TOL = 1e-10

MAX_QUBITS = 12
MAX_MATRIX_QUBITS = 10
# Hadamard tests add an ancilla to the largest supported register.
MAX_STATE_QUBITS = MAX_QUBITS + 1


class StateVector(BaseModel):
    """``2**n`` complex amplitudes of an ``n``-qubit state.

    States produced by preparation or unitary application are normalized. The same type
    also carries unnormalized vectors such as ``A|x>``; callers that need a unit vector say so.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1, description="Qubit count")
    amplitudes: np.ndarray = Field(..., description="Complex amplitudes, little-endian basis order")

    @model_validator(mode="after")
    def _check_length(self) -> "StateVector":
        if self.n > MAX_STATE_QUBITS:
            raise StateSizeError(f"States are limited to {MAX_STATE_QUBITS} qubits, got {self.n}")
        if self.amplitudes.shape != (2 ** self.n,):
            raise StateSizeError(
                f"A {self.n}-qubit state needs {2 ** self.n} amplitudes, got shape {self.amplitudes.shape}"
            )
        return self

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> "StateVector":
        values = np.array(amplitudes, dtype=np.complex128)
        if values.ndim != 1 or values.size < 2 or values.size & (values.size - 1):
            raise StateSizeError(f"Amplitude count must be a power of two >= 2, got {values.size}")
        values.setflags(write=False)
        return cls(n=values.size.bit_length() - 1, amplitudes=values)

    @property
    def dim(self) -> int:
        return 2 ** self.n

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "StateVector":
        norm = np.sqrt(self.norm_sq())
        if norm == 0.0:
            raise StateSizeError("Cannot normalize the zero vector")
        return StateVector.from_amplitudes(self.amplitudes / norm)


def _zero_amplitudes(n: int) -> np.ndarray:
    amplitudes = np.zeros(2 ** n, dtype=np.complex128)
    amplitudes[0] = 1.0
    return amplitudes


def new_zero_state(n: int) -> StateVector:
    """The computational basis state ``|0...0>`` on ``n`` qubits, ``1 <= n <= 12``."""
    if not 1 <= n <= MAX_QUBITS:
        raise StateSizeError(f"Qubit count must be between 1 and {MAX_QUBITS}, got {n}")
    return StateVector.from_amplitudes(_zero_amplitudes(n))


def _apply_local(tensor: np.ndarray, unitary: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    # Axis a of the tensor holds qubit n-1-a; trailing axes, if any, are carried along.
    k = len(qubits)
    axes = [n - 1 - q for q in reversed(qubits)]
    local = unitary.reshape((2,) * (2 * k))
    result = np.tensordot(local, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(result, list(range(k)), axes)


def _check_placement(gate: Gate, n: int) -> None:
    if max(gate.qubits) >= n:
        raise GatePlacementError(f"Gate '{gate.describe()}' does not fit on {n} qubits")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """``U|state>`` for the gate embedded on the state's register."""
    _check_placement(gate, state.n)
    tensor = state.amplitudes.reshape((2,) * state.n)
    result = _apply_local(tensor, gate.matrix(), gate.qubits, state.n)
    return StateVector.from_amplitudes(result.reshape(-1))


def apply_circuit(circuit: Circuit, state: Optional[StateVector] = None) -> StateVector:
    """Run ``circuit`` on ``state``, or on ``|0...0>`` when no state is given."""
    if state is None:
        amplitudes = _zero_amplitudes(circuit.n)
    elif state.n != circuit.n:
        raise DimensionMismatchError(f"Circuit acts on {circuit.n} qubits but the state has {state.n}")
    else:
        amplitudes = state.amplitudes
    tensor = amplitudes.reshape((2,) * circuit.n)
    for gate in circuit.gates:
        tensor = _apply_local(tensor, gate.matrix(), gate.qubits, circuit.n)
    return StateVector.from_amplitudes(tensor.reshape(-1))


def circuit_to_matrix(circuit: Circuit) -> np.ndarray:
    """The dense unitary of ``circuit``: column ``j`` is the circuit applied to basis state ``j``."""
    n = circuit.n
    if n > MAX_MATRIX_QUBITS:
        raise StateSizeError(f"Dense circuit matrices are limited to {MAX_MATRIX_QUBITS} qubits, got {n}")
    dim = 2 ** n
    tensor = np.eye(dim, dtype=np.complex128).reshape((2,) * n + (dim,))
    for gate in circuit.gates:
        tensor = _apply_local(tensor, gate.matrix(), gate.qubits, n)
    return tensor.reshape(dim, dim)


def mat_apply(m: np.ndarray, v: StateVector) -> StateVector:
    """Ordinary matrix-vector product; the result is generally unnormalized."""
    if m.ndim != 2 or m.shape != (v.dim, v.dim):
        raise DimensionMismatchError(f"Cannot apply a {m.shape} matrix to a {v.dim}-dimensional vector")
    return StateVector.from_amplitudes(m @ v.amplitudes)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b> = sum(conj(a_j) * b_j)``."""
    if a.n != b.n:
        raise DimensionMismatchError(f"Inner product of {a.n}-qubit and {b.n}-qubit states")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, tol: float = PIPELINE_TOL) -> bool:
    """Compare arrays after removing the phase of ``a``'s first non-negligible entry from both."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        return False
    flat_a = a.reshape(-1)
    flat_b = b.reshape(-1)
    significant = np.flatnonzero(np.abs(flat_a) > tol)
    if significant.size == 0:
        return bool(np.allclose(flat_b, 0.0, atol=tol))
    pivot = significant[0]
    if abs(flat_b[pivot]) <= tol:
        return False
    phase_a = flat_a[pivot] / abs(flat_a[pivot])
    phase_b = flat_b[pivot] / abs(flat_b[pivot])
    return bool(np.allclose(flat_a / phase_a, flat_b / phase_b, atol=tol, rtol=0.0))
