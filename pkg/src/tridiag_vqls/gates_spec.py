"""Tests for the gate set and Pauli strings."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tridiag_vqls.errors import StateSizeError
from tridiag_vqls.gates import (
    HADAMARD_MATRIX,
    PAULI_MATRICES,
    RY,
    CenterSwitch,
    Controlled,
    GateDefinitionError,
    GatePlacementError,
    Hadamard,
    MultiControlledX,
    PauliGate,
    PauliString,
    Phase,
    Swap,
    center_switch_matrix,
    cx,
    pauli_string_matrix,
)

THREE_QUBIT_CENTER_SWITCH = np.array([
    [1, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 1],
])

SWAP = np.array([
    [1, 0, 0, 0],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
])


def all_gate_variants():
    return [
        PauliGate(letter="I", qubit=0),
        PauliGate(letter="X", qubit=1),
        PauliGate(letter="Y", qubit=0),
        PauliGate(letter="Z", qubit=2),
        Hadamard(qubit=0),
        RY(qubit=1, angle=0.7),
        Phase(qubit=0, angle=-1.1),
        Swap(qubit_a=1, qubit_b=0),
        CenterSwitch(low=0, span=3),
        MultiControlledX(controls=((0, 1), (2, 0)), target=1),
        Controlled(control=2, inner=RY(qubit=0, angle=0.3)),
    ]


class DescribeGateMatrices:
    """Tests for local gate unitaries."""

    @pytest.mark.parametrize("gate", all_gate_variants(), ids=lambda g: g.describe())
    def should_be_unitary(self, gate):
        """Every gate variant has a unitary local matrix."""
        u = gate.matrix()

        assert_allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-12)

    @pytest.mark.parametrize("gate", all_gate_variants(), ids=lambda g: g.describe())
    def should_invert_with_adjoint(self, gate):
        """The adjoint's matrix is the inverse."""
        u = gate.matrix()
        v = gate.adjoint().matrix()

        assert_allclose(v @ u, np.eye(u.shape[0]), atol=1e-12)

    def should_build_ry_matrix(self):
        """RY(pi/2) sends |0> to (cos pi/4, sin pi/4)."""
        u = RY(qubit=0, angle=math.pi / 2).matrix()

        assert_allclose(u[:, 0], [math.cos(math.pi / 4), math.sin(math.pi / 4)])

    def should_place_control_as_most_significant_local_bit(self):
        """Controlled X with the control last has 1s at (0,0),(1,1),(2,3),(3,2)."""
        u = Controlled(control=1, inner=PauliGate(letter="X", qubit=0)).matrix()

        expected = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        assert_allclose(u, expected)

    def should_honour_negative_control_polarity(self):
        """An empty-dot control fires when its qubit is 0."""
        u = MultiControlledX(controls=((0, 0),), target=1).matrix()

        expected = np.array([[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]])
        assert_allclose(u, expected)

    def should_match_cx_helper(self):
        """cx() is the positively controlled single-control X."""
        gate = cx(0, 1)

        assert gate.controls == ((0, 1),)
        assert gate.target == 1


class DescribeGateValidation:
    """Tests for gate construction invariants."""

    def should_reject_repeated_qubits_in_swap(self):
        with pytest.raises(GatePlacementError):
            Swap(qubit_a=1, qubit_b=1)

    def should_reject_control_equal_to_target(self):
        with pytest.raises(GatePlacementError):
            MultiControlledX(controls=((1, 1),), target=1)

    def should_reject_mcx_without_controls(self):
        with pytest.raises(GateDefinitionError):
            MultiControlledX(controls=(), target=0)

    def should_reject_center_switch_span_below_two(self):
        with pytest.raises(GateDefinitionError):
            CenterSwitch(span=1)

    def should_reject_controlled_wrapper_on_its_own_qubit(self):
        with pytest.raises(GatePlacementError):
            Controlled(control=0, inner=Hadamard(qubit=0))


class DescribeGateDescriptions:
    """Tests for the one-line gate dump."""

    @pytest.mark.parametrize("gate, text", [
        (Hadamard(qubit=0), "H 0"),
        (RY(qubit=1, angle=math.pi / 2), "RY 1 1.5707963267948966"),
        (Swap(qubit_a=1, qubit_b=0), "SWAP 1 0"),
        (CenterSwitch(span=3), "CS 2 1 0"),
        (MultiControlledX(controls=((0, 0), (1, 1)), target=2), "MCX 0 1 2 01"),
        (Controlled(control=2, inner=PauliGate(letter="X", qubit=0)), "C-X 2 0"),
        (Phase(qubit=0, angle=-math.pi / 2), "P 0 -1.5707963267948966"),
    ])
    def should_describe_gate(self, gate, text):
        assert gate.describe() == text


class DescribePauliString:
    """Tests for Pauli strings and their matrices."""

    def should_put_qubit_zero_last_in_letters(self):
        """'IX' is X on qubit 0."""
        pauli = PauliString(letters="IX")

        assert pauli.letter_on(0) == "X"
        assert pauli.letter_on(1) == "I"
        assert pauli.label() == "I1 X0"

    def should_build_ix_matrix(self):
        """I1 X0 has 1s at (0,1),(1,0),(2,3),(3,2)."""
        m = pauli_string_matrix(PauliString(letters="IX"))

        expected = np.zeros((4, 4))
        for r, c in [(0, 1), (1, 0), (2, 3), (3, 2)]:
            expected[r, c] = 1
        assert_allclose(m, expected)

    def should_build_z_matrix(self):
        assert_allclose(pauli_string_matrix(PauliString(letters="Z")), np.diag([1, -1]))

    def should_return_a_fresh_matrix_for_a_single_letter(self):
        m = pauli_string_matrix(PauliString(letters="Z"))

        m *= 3

        assert_allclose(pauli_string_matrix(PauliString(letters="Z")), np.diag([1, -1]))
        assert_allclose(PauliGate(letter="Z", qubit=0).matrix(), np.diag([1, -1]))

    def should_keep_shared_gate_tables_read_only(self):
        with pytest.raises(ValueError):
            PAULI_MATRICES["X"][0, 0] = 5
        with pytest.raises(ValueError):
            HADAMARD_MATRIX[0, 0] = 5

    def should_combine_xx_and_yy_into_middle_exchange(self):
        """X1X0 + Y1Y0 is nonzero only at (1,2) and (2,1)."""
        m = pauli_string_matrix(PauliString(letters="XX")) + pauli_string_matrix(PauliString(letters="YY"))

        expected = np.zeros((4, 4))
        expected[1, 2] = expected[2, 1] = 2
        assert_allclose(m, expected, atol=1e-12)

    def should_be_hermitian_and_unitary(self):
        m = pauli_string_matrix(PauliString(letters="XYZI"))

        assert_allclose(m, m.conj().T)
        assert_allclose(m @ m, np.eye(16))

    def should_round_trip_through_masks(self):
        pauli = PauliString(letters="YXZI")

        rebuilt = PauliString.from_masks(pauli.n, pauli.x_mask, pauli.z_mask)

        assert rebuilt == pauli

    def should_list_non_identity_gates(self):
        gates = PauliString(letters="ZIX").gates()

        assert [g.describe() for g in gates] == ["X 0", "Z 2"]

    def should_reject_unknown_letters(self):
        with pytest.raises(ValueError):
            PauliString(letters="XQ")

    def should_reject_overlong_strings(self):
        with pytest.raises(StateSizeError):
            pauli_string_matrix(PauliString(letters="I" * 11))


class DescribeCenterSwitchMatrix:
    """Tests for the center-switch permutation."""

    def should_be_swap_for_span_two(self):
        assert_allclose(center_switch_matrix(2), SWAP)

    def should_match_three_qubit_permutation(self):
        assert_allclose(center_switch_matrix(3), THREE_QUBIT_CENTER_SWITCH)

    def should_swap_rows_seven_and_eight_for_span_four(self):
        expected = np.eye(16)[[0, 1, 2, 3, 4, 5, 6, 8, 7, 9, 10, 11, 12, 13, 14, 15]]

        assert_allclose(center_switch_matrix(4), expected)

    @pytest.mark.parametrize("span", range(2, 8))
    def should_be_an_involution(self, span):
        u = center_switch_matrix(span)

        assert np.array_equal(u @ u, np.eye(2 ** span))
        assert np.array_equal(u, u.T)

    def should_reject_span_below_two(self):
        with pytest.raises(GateDefinitionError):
            center_switch_matrix(1)
