"""Tests for circuits, control wrapping and depth metrics."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tridiag_vqls.circuits import Circuit, controlled, depth, dump_circuit, gate_count
from tridiag_vqls.errors import DimensionMismatchError
from tridiag_vqls.gates import RY, GatePlacementError, Hadamard, PauliGate, Swap, cx
from tridiag_vqls.statevector import circuit_to_matrix


def fredkin():
    """Controlled SWAP of qubits 1,0 with control 2."""
    permutation = list(range(8))
    permutation[5], permutation[6] = 6, 5
    return np.eye(8)[permutation]


class DescribeCircuit:
    """Tests for circuit construction and algebra."""

    def should_reject_gates_outside_the_register(self):
        with pytest.raises(GatePlacementError):
            Circuit(n=1, gates=(Hadamard(qubit=1),))

    def should_compose_in_application_order(self):
        first = Circuit(n=2, gates=(Hadamard(qubit=0),))
        second = Circuit(n=2, gates=(cx(0, 1),))

        composed = first.compose(second)

        assert [g.describe() for g in composed.gates] == ["H 0", "MCX 0 1 1"]

    def should_refuse_to_compose_different_registers(self):
        with pytest.raises(DimensionMismatchError):
            Circuit(n=1).compose(Circuit(n=2))

    def should_reverse_and_invert_on_adjoint(self):
        circuit = Circuit(n=2, gates=(RY(qubit=0, angle=0.4), cx(0, 1), RY(qubit=1, angle=-1.2)))

        product = circuit_to_matrix(circuit.compose(circuit.adjoint()))

        assert_allclose(product, np.eye(4), atol=1e-12)

    def should_widen_without_changing_gates(self):
        widened = Circuit(n=1, gates=(Hadamard(qubit=0),)).widen(3)

        assert widened.n == 3
        assert len(widened) == 1

    def should_not_narrow(self):
        with pytest.raises(DimensionMismatchError):
            Circuit(n=3).widen(2)


class DescribeControlled:
    """Tests for wrapping a circuit in a control qubit."""

    def should_give_identity_for_empty_circuit(self):
        wrapped = controlled(Circuit(n=2), control=2)

        assert wrapped.n == 3
        assert_allclose(circuit_to_matrix(wrapped), np.eye(8))

    def should_make_controlled_x(self):
        wrapped = controlled(Circuit(n=1, gates=(PauliGate(letter="X", qubit=0),)), control=1)

        expected = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        assert_allclose(circuit_to_matrix(wrapped), expected)

    def should_make_fredkin_from_swap(self):
        wrapped = controlled(Circuit(n=2, gates=(Swap(qubit_a=1, qubit_b=0),)), control=2)

        assert_allclose(circuit_to_matrix(wrapped), fredkin())

    def should_be_block_diagonal(self):
        inner = Circuit(n=2, gates=(Hadamard(qubit=0), cx(0, 1), RY(qubit=1, angle=0.9)))

        u = circuit_to_matrix(inner)
        wrapped = circuit_to_matrix(controlled(inner, control=2))

        assert_allclose(wrapped[:4, :4], np.eye(4), atol=1e-12)
        assert_allclose(wrapped[4:, 4:], u, atol=1e-12)
        assert_allclose(wrapped[:4, 4:], 0, atol=1e-12)

    def should_reject_control_collision(self):
        with pytest.raises(GatePlacementError):
            controlled(Circuit(n=2, gates=(Hadamard(qubit=1),)), control=1)


class DescribeMetrics:
    """Tests for depth and gate count."""

    def should_count_disjoint_gates_as_one_layer(self):
        circuit = Circuit(n=2, gates=(Hadamard(qubit=0), Hadamard(qubit=1)))

        assert depth(circuit) == 1
        assert gate_count(circuit) == 2

    def should_stack_gates_on_the_same_qubit(self):
        circuit = Circuit(n=1, gates=(Hadamard(qubit=0), PauliGate(letter="X", qubit=0)))

        assert depth(circuit) == 2

    def should_give_zero_for_empty_circuit(self):
        assert depth(Circuit(n=3)) == 0

    def should_be_invariant_under_relabelling(self):
        gates = (Hadamard(qubit=0), cx(0, 1), Hadamard(qubit=2), cx(1, 2), RY(qubit=0, angle=1.0))
        relabel = {0: 2, 1: 0, 2: 1}
        relabelled = (
            Hadamard(qubit=relabel[0]),
            cx(relabel[0], relabel[1]),
            Hadamard(qubit=relabel[2]),
            cx(relabel[1], relabel[2]),
            RY(qubit=relabel[0], angle=1.0),
        )

        assert depth(Circuit(n=3, gates=gates)) == depth(Circuit(n=3, gates=relabelled))

    def should_dump_one_gate_per_line(self):
        circuit = Circuit(n=2, gates=(Hadamard(qubit=0), Swap(qubit_a=1, qubit_b=0)))

        assert dump_circuit(circuit) == "H 0\nSWAP 1 0\n"
