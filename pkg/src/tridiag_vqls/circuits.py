"""Circuits: ordered gate lists over a fixed register, plus depth and gate-count metrics."""

from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from tridiag_vqls.errors import DimensionMismatchError
from tridiag_vqls.gates import Controlled, Gate, GatePlacementError


class Circuit(BaseModel):
    """An ordered list of gates on ``n`` qubits, applied first to last."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="Qubit count")
    gates: Tuple[Gate, ...] = Field((), description="Gates in application order")

    @model_validator(mode="after")
    def _check_fit(self) -> "Circuit":
        for gate in self.gates:
            if max(gate.qubits) >= self.n:
                raise GatePlacementError(
                    f"Gate '{gate.describe()}' does not fit in a {self.n}-qubit circuit"
                )
        return self

    def compose(self, other: "Circuit") -> "Circuit":
        """This circuit followed by ``other``; both must act on the same register."""
        if other.n != self.n:
            raise DimensionMismatchError(f"Cannot compose a {self.n}-qubit circuit with a {other.n}-qubit one")
        return Circuit(n=self.n, gates=self.gates + other.gates)

    def adjoint(self) -> "Circuit":
        return Circuit(n=self.n, gates=tuple(gate.adjoint() for gate in reversed(self.gates)))

    def widen(self, n: int) -> "Circuit":
        """The same gates on a register of ``n >= self.n`` qubits."""
        if n < self.n:
            raise DimensionMismatchError(f"Cannot narrow a {self.n}-qubit circuit to {n} qubits")
        return Circuit(n=n, gates=self.gates)

    def __len__(self) -> int:
        return len(self.gates)


def controlled(circuit: Circuit, control: int) -> Circuit:
    """Wrap every gate so the whole circuit acts only when ``control`` is in state 1.

    The result acts on ``max(circuit.n, control + 1)`` qubits.
    """
    used = {q for gate in circuit.gates for q in gate.qubits}
    if control in used:
        raise GatePlacementError(f"Control qubit {control} is already used by the circuit")
    n = max(circuit.n, control + 1)
    return Circuit(n=n, gates=tuple(Controlled(control=control, inner=gate) for gate in circuit.gates))


def depth(circuit: Circuit) -> int:
    """Length of the longest chain of gates that pairwise share a qubit."""
    levels: Dict[int, int] = {}
    deepest = 0
    for gate in circuit.gates:
        level = 1 + max(levels.get(q, 0) for q in gate.qubits)
        for q in gate.qubits:
            levels[q] = level
        deepest = max(deepest, level)
    return deepest


def gate_count(circuit: Circuit) -> int:
    """Number of gates, each counted once whatever its width.

    Args:
        circuit (Circuit): The circuit to measure, usually after lowering.

    Returns:
        int: The gate count.
    """
    return len(circuit.gates)


def dump_circuit(circuit: Circuit) -> str:
    """One gate per line in ``GATE q... [angle] [polarities]`` form."""
    return "".join(gate.describe() + "\n" for gate in circuit.gates)
