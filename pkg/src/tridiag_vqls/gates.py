"""Typed gate set and Pauli strings.

Every gate knows the qubits it acts on and its local unitary. The local unitary is
ordered little-endian over ``gate.qubits``: bit ``i`` of a local basis index is the
state of ``gate.qubits[i]``. The same convention holds globally, so basis index
``j = sum(q_k * 2**k)`` and qubit 0 is the least significant bit.
"""

import abc
from functools import reduce
from typing import Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tridiag_vqls.errors import StateSizeError, VqlsError

MAX_PAULI_LENGTH = 10
MAX_CENTER_SWITCH_SPAN = 12

PAULI_MATRICES = {
    "I": np.array([[1, 0], [0, 1]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

HADAMARD_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)

for _table in (*PAULI_MATRICES.values(), HADAMARD_MATRIX):
    _table.setflags(write=False)


class GatePlacementError(VqlsError):
    """Raised when a gate's qubits collide or do not fit the register."""
    pass


class GateDefinitionError(VqlsError):
    """Raised when a gate is structurally invalid (span, controls, letters)."""
    pass


class UnknownGateError(VqlsError):
    """Raised when an operation meets a gate variant it has no rule for."""
    pass


def _format_angle(angle: float) -> str:
    return f"{angle:.17g}"


def _require_distinct(qubits: Tuple[int, ...]) -> None:
    if len(set(qubits)) != len(qubits):
        raise GatePlacementError(f"Gate qubits must be distinct, got {list(qubits)}")


class Gate(BaseModel, abc.ABC):
    """A quantum gate acting on a fixed set of qubits."""
    model_config = ConfigDict(frozen=True)

    @property
    @abc.abstractmethod
    def qubits(self) -> Tuple[int, ...]:
        """The qubits the gate acts on, in local little-endian order."""
        pass

    @abc.abstractmethod
    def matrix(self) -> np.ndarray:
        """The local unitary of size ``2**len(self.qubits)``."""
        pass

    @abc.abstractmethod
    def adjoint(self) -> "Gate":
        """The inverse gate."""
        pass

    @abc.abstractmethod
    def describe(self) -> str:
        """One-line textual form: ``GATE q... [angle] [polarities]``."""
        pass


class PauliGate(Gate):
    """A single-qubit Pauli operator (I, X, Y or Z)."""
    letter: Literal["I", "X", "Y", "Z"] = Field(..., description="Pauli letter")
    qubit: int = Field(..., ge=0, description="Target qubit")

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.qubit,)

    def matrix(self) -> np.ndarray:
        return PAULI_MATRICES[self.letter].copy()

    def adjoint(self) -> "PauliGate":
        return self

    def describe(self) -> str:
        return f"{self.letter} {self.qubit}"


class Hadamard(Gate):
    qubit: int = Field(..., ge=0, description="Target qubit")

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.qubit,)

    def matrix(self) -> np.ndarray:
        return HADAMARD_MATRIX.copy()

    def adjoint(self) -> "Hadamard":
        return self

    def describe(self) -> str:
        return f"H {self.qubit}"


class RY(Gate):
    """Rotation about the Y axis, ``[[cos a/2, -sin a/2], [sin a/2, cos a/2]]``."""
    qubit: int = Field(..., ge=0, description="Target qubit")
    angle: float = Field(..., description="Rotation angle in radians")

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.qubit,)

    def matrix(self) -> np.ndarray:
        c = np.cos(self.angle / 2.0)
        s = np.sin(self.angle / 2.0)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)

    def adjoint(self) -> "RY":
        return RY(qubit=self.qubit, angle=-self.angle)

    def describe(self) -> str:
        return f"RY {self.qubit} {_format_angle(self.angle)}"


class Phase(Gate):
    """Relative phase gate ``diag(1, exp(i*angle))``; S, S-dagger, T and T-dagger are instances."""
    qubit: int = Field(..., ge=0, description="Target qubit")
    angle: float = Field(..., description="Phase angle in radians")

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.qubit,)

    def matrix(self) -> np.ndarray:
        return np.array([[1, 0], [0, np.exp(1j * self.angle)]], dtype=np.complex128)

    def adjoint(self) -> "Phase":
        return Phase(qubit=self.qubit, angle=-self.angle)

    def describe(self) -> str:
        return f"P {self.qubit} {_format_angle(self.angle)}"


class Swap(Gate):
    qubit_a: int = Field(..., ge=0, description="First qubit")
    qubit_b: int = Field(..., ge=0, description="Second qubit")

    @model_validator(mode="after")
    def _check_qubits(self) -> "Swap":
        _require_distinct(self.qubits)
        return self

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.qubit_a, self.qubit_b)

    def matrix(self) -> np.ndarray:
        return center_switch_matrix(2)

    def adjoint(self) -> "Swap":
        return self

    def describe(self) -> str:
        return f"SWAP {self.qubit_a} {self.qubit_b}"


class CenterSwitch(Gate):
    """Center-switch gate of order ``span - 2`` on the contiguous qubits ``low .. low+span-1``.

    It exchanges the two middle basis states ``011...1`` and ``100...0`` of its span and
    leaves every other basis state alone. Span 2 is the SWAP gate.
    """
    low: int = Field(0, ge=0, description="Least significant qubit of the span")
    span: int = Field(..., description="Number of contiguous qubits")

    @model_validator(mode="after")
    def _check_span(self) -> "CenterSwitch":
        if self.span < 2:
            raise GateDefinitionError(f"Center-switch span must be at least 2, got {self.span}")
        return self

    @property
    def order(self) -> int:
        return self.span - 2

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(range(self.low, self.low + self.span))

    def matrix(self) -> np.ndarray:
        return center_switch_matrix(self.span)

    def adjoint(self) -> "CenterSwitch":
        return self

    def describe(self) -> str:
        return "CS " + " ".join(str(q) for q in reversed(self.qubits))


class MultiControlledX(Gate):
    """X on ``target`` when every control qubit is in its polarity state (1 full dot, 0 empty dot)."""
    controls: Tuple[Tuple[int, Literal[0, 1]], ...] = Field(..., description="(qubit, polarity) pairs")
    target: int = Field(..., ge=0, description="Target qubit")

    @model_validator(mode="after")
    def _check_controls(self) -> "MultiControlledX":
        if not self.controls:
            raise GateDefinitionError("A multi-controlled X needs at least one control")
        if any(qubit < 0 for qubit, _ in self.controls):
            raise GatePlacementError("Control qubits must be non-negative")
        _require_distinct(self.qubits)
        return self

    @property
    def control_qubits(self) -> Tuple[int, ...]:
        return tuple(qubit for qubit, _ in self.controls)

    @property
    def polarities(self) -> Tuple[int, ...]:
        return tuple(polarity for _, polarity in self.controls)

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.control_qubits + (self.target,)

    def matrix(self) -> np.ndarray:
        k = len(self.controls)
        dim = 2 ** (k + 1)
        pattern = sum(polarity << i for i, polarity in enumerate(self.polarities))
        mask = (1 << k) - 1
        permutation = np.arange(dim)
        hits = (permutation & mask) == pattern
        permutation[hits] ^= 1 << k
        unitary = np.zeros((dim, dim), dtype=np.complex128)
        unitary[permutation, np.arange(dim)] = 1
        return unitary

    def adjoint(self) -> "MultiControlledX":
        return self

    def describe(self) -> str:
        qubits = " ".join(str(q) for q in self.qubits)
        polarities = "".join(str(p) for p in self.polarities)
        return f"MCX {qubits} {polarities}"


def cx(control: int, target: int) -> MultiControlledX:
    """The CNOT gate as a singly, positively controlled X."""
    return MultiControlledX(controls=((control, 1),), target=target)


class Controlled(Gate):
    """Applies ``inner`` only when ``control`` is in state 1."""
    control: int = Field(..., ge=0, description="Control qubit")
    inner: Gate = Field(..., description="Gate applied when the control is set")

    @model_validator(mode="after")
    def _check_control(self) -> "Controlled":
        _require_distinct(self.qubits)
        return self

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.inner.qubits + (self.control,)

    def matrix(self) -> np.ndarray:
        inner = self.inner.matrix()
        dim = inner.shape[0]
        unitary = np.eye(2 * dim, dtype=np.complex128)
        unitary[dim:, dim:] = inner
        return unitary

    def adjoint(self) -> "Controlled":
        return Controlled(control=self.control, inner=self.inner.adjoint())

    def describe(self) -> str:
        name, _, rest = self.inner.describe().partition(" ")
        return f"C-{name} {self.control} {rest}".rstrip()


class PauliString(BaseModel):
    """A tensor product of Pauli letters, written most significant qubit first.

    ``PauliString(letters="IX")`` is ``I1 X0``: X acts on qubit 0.
    """
    model_config = ConfigDict(frozen=True)

    letters: str = Field(..., min_length=1, pattern=r"^[IXYZ]+$", description="Letters, qubit n-1 first")

    @property
    def n(self) -> int:
        return len(self.letters)

    def letter_on(self, qubit: int) -> str:
        return self.letters[self.n - 1 - qubit]

    @property
    def x_mask(self) -> int:
        return sum(1 << q for q in range(self.n) if self.letter_on(q) in "XY")

    @property
    def z_mask(self) -> int:
        return sum(1 << q for q in range(self.n) if self.letter_on(q) in "ZY")

    @property
    def y_count(self) -> int:
        return self.letters.count("Y")

    @classmethod
    def from_masks(cls, n: int, x_mask: int, z_mask: int) -> "PauliString":
        """Build the string with X where only x is set, Z where only z is set and Y where both are."""
        table = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
        letters = "".join(table[((x_mask >> q) & 1, (z_mask >> q) & 1)] for q in reversed(range(n)))
        return cls(letters=letters)

    def label(self) -> str:
        return " ".join(f"{letter}{self.n - 1 - i}" for i, letter in enumerate(self.letters))

    def gates(self) -> Tuple[PauliGate, ...]:
        return tuple(
            PauliGate(letter=self.letter_on(q), qubit=q)
            for q in range(self.n)
            if self.letter_on(q) != "I"
        )


def pauli_string_matrix(pauli: PauliString) -> np.ndarray:
    """Kronecker product of the letters with qubit 0 as the least significant factor."""
    if pauli.n > MAX_PAULI_LENGTH:
        raise StateSizeError(f"Pauli strings are limited to {MAX_PAULI_LENGTH} letters, got {pauli.n}")
    return reduce(np.kron, (PAULI_MATRICES[letter] for letter in pauli.letters), np.eye(1, dtype=np.complex128))


def center_switch_matrix(span: int) -> np.ndarray:
    """Identity on ``2**span`` states except the transposition ``(2**(span-1) - 1, 2**(span-1))``."""
    if span < 2:
        raise GateDefinitionError(f"Center-switch span must be at least 2, got {span}")
    if span > MAX_CENTER_SWITCH_SPAN:
        raise StateSizeError(f"Center-switch span is limited to {MAX_CENTER_SWITCH_SPAN}, got {span}")
    dim = 2 ** span
    low, high = dim // 2 - 1, dim // 2
    unitary = np.eye(dim, dtype=np.complex128)
    unitary[[low, high]] = unitary[[high, low]]
    return unitary
