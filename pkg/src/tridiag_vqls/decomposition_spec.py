"""Tests for the tridiagonal decompositions."""

from functools import reduce

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tridiag_vqls.decomposition import (
    CenterSwitchTerm,
    Decomposition,
    DecompositionError,
    NonHermitianError,
    PauliTerm,
    TridiagonalSpec,
    WeightedTerm,
    assemble_tridiagonal,
    decompose,
    dump_decomposition,
    multiqubit_decompose_tridiagonal,
    off_diagonal_cover,
    pauli_decompose_general,
    pauli_decompose_tridiagonal,
    reconstruct,
    term_counts,
    term_index,
    walsh_hadamard,
)
from tridiag_vqls.gates import PauliString
from tridiag_vqls.statevector import circuit_to_matrix

TABLE_PAULI = {
    2: {"I1 I0", "I1 X0", "X1 X0", "Y1 Y0"},
    3: {"I2 I1 I0", "I2 I1 X0", "I2 X1 X0", "I2 Y1 Y0", "X2 X1 X0", "X2 Y1 Y0", "Y2 X1 Y0", "Y2 Y1 X0"},
    4: {
        "I3 I2 I1 I0", "I3 I2 I1 X0", "I3 I2 X1 X0", "I3 I2 Y1 Y0",
        "I3 X2 X1 X0", "I3 X2 Y1 Y0", "I3 Y2 X1 Y0", "I3 Y2 Y1 X0",
        "X3 X2 X1 X0", "X3 X2 Y1 Y0", "X3 Y2 X1 Y0", "X3 Y2 Y1 X0",
        "Y3 X2 X1 Y0", "Y3 X2 Y1 X0", "Y3 Y2 X1 X0", "Y3 Y2 Y1 Y0",
    },
}

TABLE_MULTIQUBIT = {
    2: {"SWAP_(1-0)", "I1 I0", "Z1 Z0", "I1 X0"},
    3: {"I2 SWAP_(1-0)", "I2 I1 I0", "I2 Z1 Z0", "I2 I1 X0", "CS_(2-0)", "Z2 I1 Z0", "Z2 Z1 I0"},
    4: {
        "I3 I2 I1 I0", "I3 I2 Z1 Z0", "I3 I2 I1 X0", "I3 I2 SWAP_(1-0)",
        "I3 CS_(2-0)", "I3 Z2 I1 Z0", "I3 Z2 Z1 I0", "CS^(2)_(3-0)",
        "Z3 I2 I1 Z0", "Z3 I2 Z1 I0", "Z3 Z2 I1 I0", "Z3 Z2 Z1 Z0",
    },
}


def random_specs(n, count=20, seed=0):
    rng = np.random.default_rng(seed + n)
    return [TridiagonalSpec(n=n, alpha=float(a), beta=float(b)) for a, b in rng.uniform(-3, 3, size=(count, 2))]


class DescribeAssembleTridiagonal:
    """Tests for dense tridiagonal assembly."""

    def should_build_two_by_two(self):
        assert_allclose(assemble_tridiagonal(TridiagonalSpec(n=1, alpha=2, beta=-1)), [[2, -1], [-1, 2]])

    def should_give_identity_without_off_diagonal(self):
        assert_allclose(assemble_tridiagonal(TridiagonalSpec(n=2, alpha=1, beta=0)), np.eye(4))

    def should_build_second_difference_matrix(self):
        expected = 2 * np.eye(4) - np.eye(4, k=1) - np.eye(4, k=-1)

        assert_allclose(assemble_tridiagonal(TridiagonalSpec(n=2, alpha=2, beta=-1)), expected)

    def should_reject_non_finite_coefficients(self):
        with pytest.raises(ValueError):
            TridiagonalSpec(n=2, alpha=float("nan"), beta=1)


class DescribeWalshHadamard:
    """Tests for the fast Walsh-Hadamard transform."""

    def should_match_dense_sylvester_matrix(self):
        rng = np.random.default_rng(1)
        values = rng.normal(size=16)
        sylvester = reduce(np.kron, [np.array([[1, 1], [1, -1]])] * 4)

        assert_allclose(walsh_hadamard(values), sylvester @ values, atol=1e-12)

    def should_transform_rows_independently(self):
        values = np.array([[1.0, 0.0], [0.0, 1.0]])

        assert_allclose(walsh_hadamard(values), [[1, 1], [1, -1]])


class DescribePauliDecomposeGeneral:
    """Tests for the trace-formula Pauli decomposition."""

    def should_give_single_identity_term(self):
        d = pauli_decompose_general(np.eye(4))

        assert d.labels == ["I1 I0"]
        assert d.coefficients == [1]

    def should_reproduce_two_qubit_tridiagonal_coefficients(self):
        alpha, beta = 0.7, 1.9

        d = pauli_decompose_general(assemble_tridiagonal(TridiagonalSpec(n=2, alpha=alpha, beta=beta)))

        coefficients = term_index(d)
        assert set(coefficients) == {"I1 I0", "I1 X0", "X1 X0", "Y1 Y0"}
        assert coefficients["I1 I0"] == pytest.approx(alpha)
        assert coefficients["I1 X0"] == pytest.approx(beta)
        assert coefficients["X1 X0"] == pytest.approx(beta / 2)
        assert coefficients["Y1 Y0"] == pytest.approx(beta / 2)

    def should_give_laplacian_coefficients_in_order(self):
        d = pauli_decompose_general(assemble_tridiagonal(TridiagonalSpec(n=2, alpha=2, beta=-1)))

        assert d.labels == ["I1 I0", "I1 X0", "X1 X0", "Y1 Y0"]
        assert_allclose(d.coefficients, [2, -1, -0.5, -0.5], atol=1e-15)

    def should_decompose_random_hermitian_matrix(self):
        rng = np.random.default_rng(2)
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        hermitian = m + m.conj().T

        d = pauli_decompose_general(hermitian)

        assert d.residual <= 1e-12 * np.linalg.norm(hermitian)
        assert all(c.imag == 0 for c in d.coefficients)

    def should_zero_odd_y_strings_of_real_symmetric_matrix(self):
        rng = np.random.default_rng(4)
        m = rng.normal(size=(8, 8))

        d = pauli_decompose_general(m + m.T)

        assert all(t.term.pauli.y_count % 2 == 0 for t in d.terms)

    def should_reject_non_hermitian_input(self):
        with pytest.raises(NonHermitianError):
            pauli_decompose_general(np.array([[0, 1], [0, 0]]))


class DescribePauliDecomposeTridiagonal:
    """Tests for the closed-form Pauli decomposition."""

    @pytest.mark.parametrize("n", range(1, 7))
    def should_match_general_decomposition(self, n):
        for spec in random_specs(n, count=3):
            closed = pauli_decompose_tridiagonal(spec)
            general = pauli_decompose_general(assemble_tridiagonal(spec))

            assert closed.labels == general.labels
            assert_allclose(closed.coefficients, general.coefficients, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def should_match_table_term_sets(self, n):
        d = pauli_decompose_tridiagonal(TridiagonalSpec(n=n, alpha=2, beta=-1))

        assert set(d.labels) == TABLE_PAULI[n]
        assert len(d) == term_counts("pauli", n)

    def should_scale_three_qubit_coefficients(self):
        beta = -1.0
        coefficients = term_index(pauli_decompose_tridiagonal(TridiagonalSpec(n=3, alpha=2, beta=beta)))

        assert coefficients["I2 I1 X0"] == beta
        assert coefficients["I2 X1 X0"] == beta / 2
        assert coefficients["I2 Y1 Y0"] == beta / 2
        for label in ["X2 X1 X0", "X2 Y1 Y0", "Y2 X1 Y0", "Y2 Y1 X0"]:
            assert abs(coefficients[label]) == abs(beta) / 4

    def should_decompose_single_qubit(self):
        coefficients = term_index(pauli_decompose_tridiagonal(TridiagonalSpec(n=1, alpha=2, beta=-1)))

        assert coefficients == {"I0": 2, "X0": -1}

    def should_drop_identity_when_alpha_is_zero(self):
        d = pauli_decompose_tridiagonal(TridiagonalSpec(n=2, alpha=0, beta=1))

        assert "I1 I0" not in d.labels
        assert len(d) == 3


class DescribeMultiqubitDecomposeTridiagonal:
    """Tests for the SWAP/center-switch decomposition."""

    def should_decompose_two_qubit_experiment(self):
        coefficients = term_index(multiqubit_decompose_tridiagonal(TridiagonalSpec(n=2, alpha=2, beta=-1)))

        assert set(coefficients) == {"SWAP_(1-0)", "I1 X0", "I1 I0", "Z1 Z0"}
        assert coefficients["SWAP_(1-0)"] == -1
        assert coefficients["I1 X0"] == -1
        assert coefficients["I1 I0"] == pytest.approx(2.5)
        assert coefficients["Z1 Z0"] == pytest.approx(0.5)

    def should_decompose_three_qubit_experiment(self):
        d = multiqubit_decompose_tridiagonal(TridiagonalSpec(n=3, alpha=2, beta=-1))

        coefficients = term_index(d)
        assert coefficients["I2 I1 X0"] == -1
        assert coefficients["I2 SWAP_(1-0)"] == -1
        assert coefficients["CS_(2-0)"] == -1
        assert coefficients["I2 I1 I0"] == pytest.approx(3.25)
        for label in ["I2 Z1 Z0", "Z2 I1 Z0", "Z2 Z1 I0"]:
            assert coefficients[label] == pytest.approx(0.25)
        assert d.residual <= 1e-12

    def should_emit_canonical_order(self):
        d = multiqubit_decompose_tridiagonal(TridiagonalSpec(n=3, alpha=2, beta=-1))

        assert d.labels == ["I2 I1 X0", "I2 SWAP_(1-0)", "CS_(2-0)", "I2 I1 I0", "I2 Z1 Z0", "Z2 I1 Z0", "Z2 Z1 I0"]

    @pytest.mark.parametrize("n", [2, 3, 4])
    def should_match_table_term_sets(self, n):
        d = multiqubit_decompose_tridiagonal(TridiagonalSpec(n=n, alpha=2, beta=-1))

        assert set(d.labels) == TABLE_MULTIQUBIT[n]
        assert len(d) == term_counts("multiqubit", n)

    @pytest.mark.parametrize("n", range(2, 7))
    def should_use_only_even_weight_z_strings_on_the_diagonal(self, n):
        d = multiqubit_decompose_tridiagonal(random_specs(n, count=1)[0])

        for weighted in d.terms:
            if isinstance(weighted.term, PauliTerm) and weighted.term.pauli.x_mask == 0:
                assert bin(weighted.term.pauli.z_mask).count("1") % 2 == 0
        assert len(d) <= 2 ** (n - 1) + n

    def should_keep_only_diagonal_terms_when_beta_is_zero(self):
        d = multiqubit_decompose_tridiagonal(TridiagonalSpec(n=3, alpha=1.5, beta=0))

        assert d.labels == ["I2 I1 I0"]

    def should_reject_single_qubit(self):
        with pytest.raises(DecompositionError, match="multiqubit scheme requires n ≥ 2"):
            multiqubit_decompose_tridiagonal(TridiagonalSpec(n=1, alpha=2, beta=-1))


class DescribeOffDiagonalCover:
    """Tests for which off-diagonal term supplies each superdiagonal entry."""

    @pytest.mark.parametrize("n", range(2, 7))
    def should_assign_every_superdiagonal_entry_to_exactly_one_term(self, n):
        terms = {1: PauliTerm(pauli=PauliString(letters="I" * (n - 1) + "X"))}
        terms.update({span: CenterSwitchTerm(n_qubits=n, span=span) for span in range(2, n + 1)})
        matrices = {span: term.matrix() for span, term in terms.items()}

        for j in range(2 ** n - 1):
            covering = [span for span, m in matrices.items() if m[j, j + 1] != 0]
            assert covering == [off_diagonal_cover(n, j)]

    def should_use_x_term_for_even_indices(self):
        assert off_diagonal_cover(3, 0) == 1
        assert off_diagonal_cover(3, 4) == 1

    def should_use_widest_switch_in_the_middle(self):
        assert off_diagonal_cover(3, 3) == 3


class DescribeReconstruct:
    """Tests for dense reconstruction and the residual invariant."""

    def should_give_zero_matrix_for_empty_decomposition(self):
        assert_allclose(reconstruct(Decomposition(scheme="pauli", n=2)), np.zeros((4, 4)))

    def should_reconstruct_two_qubit_pauli_decomposition_exactly(self):
        spec = TridiagonalSpec(n=2, alpha=0.3, beta=-1.7)

        assert_allclose(reconstruct(pauli_decompose_tridiagonal(spec)), assemble_tridiagonal(spec), atol=1e-15)

    @pytest.mark.parametrize("n", range(1, 7))
    def should_keep_pauli_residual_tiny(self, n):
        for spec in random_specs(n):
            assert pauli_decompose_tridiagonal(spec).residual <= 1e-12

    @pytest.mark.parametrize("n", range(2, 7))
    def should_keep_multiqubit_residual_tiny(self, n):
        for spec in random_specs(n):
            assert multiqubit_decompose_tridiagonal(spec).residual <= 1e-12

    @pytest.mark.parametrize("scheme, n", [("pauli", 3), ("multiqubit", 3), ("multiqubit", 4)])
    def should_agree_with_term_circuits(self, scheme, n):
        d = decompose(TridiagonalSpec(n=n, alpha=1.1, beta=0.4), scheme)

        for weighted in d.terms:
            assert_allclose(circuit_to_matrix(weighted.term.circuit()), weighted.term.matrix(), atol=1e-12)

    @pytest.mark.parametrize("scheme, n", [("pauli", 1), ("pauli", 3), ("multiqubit", 2), ("multiqubit", 3)])
    def should_reproduce_norm_of_a_times_x(self, scheme, n):
        rng = np.random.default_rng(9)
        spec = TridiagonalSpec(n=n, alpha=2, beta=-1)
        d = decompose(spec, scheme)
        x = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
        x /= np.linalg.norm(x)

        total = sum(
            np.conj(a.coefficient) * b.coefficient * np.vdot(a.term.matrix() @ x, b.term.matrix() @ x)
            for a in d.terms
            for b in d.terms
        )

        assert total == pytest.approx(np.linalg.norm(assemble_tridiagonal(spec) @ x) ** 2, abs=1e-10)

    @pytest.mark.parametrize("scheme", ["pauli", "multiqubit"])
    def should_scale_coefficients_with_the_matrix(self, scheme):
        base = decompose(TridiagonalSpec(n=3, alpha=1.3, beta=0.8), scheme)
        scaled = decompose(TridiagonalSpec(n=3, alpha=-3.9, beta=-2.4), scheme)

        assert scaled.labels == base.labels
        assert_allclose(scaled.coefficients, [-3 * c for c in base.coefficients], atol=1e-12)


class DescribeDecompositionInvariants:
    """Tests for the decomposition record."""

    def should_reject_repeated_terms(self):
        term = PauliTerm(pauli=PauliString(letters="XX"))

        with pytest.raises(DecompositionError):
            Decomposition(
                scheme="pauli",
                n=2,
                terms=(WeightedTerm(coefficient=1, term=term), WeightedTerm(coefficient=2, term=term)),
            )

    def should_reject_zero_coefficients(self):
        with pytest.raises(DecompositionError):
            Decomposition(
                scheme="pauli",
                n=1,
                terms=(WeightedTerm(coefficient=0, term=PauliTerm(pauli=PauliString(letters="X"))),),
            )

    def should_reject_unknown_scheme(self):
        with pytest.raises(DecompositionError):
            decompose(TridiagonalSpec(n=2, alpha=1, beta=1), "banded")


class DescribeTermCounts:
    """Tests for generic term counts."""

    @pytest.mark.parametrize("scheme, n, expected", [
        ("pauli", 3, 8),
        ("multiqubit", 4, 12),
        ("multiqubit", 2, 4),
        ("pauli", 1, 2),
    ])
    def should_count_terms(self, scheme, n, expected):
        assert term_counts(scheme, n) == expected

    def should_reject_single_qubit_multiqubit(self):
        with pytest.raises(DecompositionError):
            term_counts("multiqubit", 1)


class DescribeDumpDecomposition:
    """Tests for the textual decomposition dump."""

    def should_print_one_line_per_term(self):
        text = dump_decomposition(pauli_decompose_tridiagonal(TridiagonalSpec(n=2, alpha=2, beta=-1)))

        assert text == "2 I1 I0\n-1 I1 X0\n-0.5 X1 X0\n-0.5 Y1 Y0\n"
