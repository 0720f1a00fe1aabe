"""Unitary decompositions of the constant-coefficient tridiagonal matrix.

Two schemes are supported:

* ``pauli``: the matrix as a weighted sum of Pauli strings, ``2**n`` terms.
* ``multiqubit``: ``X`` on qubit 0, SWAP and the center-switch family cover the
  off-diagonal, and even-weight ``Z`` strings correct the diagonal, ``2**(n-1) + n`` terms.

Every term is a monomial matrix (one nonzero per column), so reconstruction scatters
each term straight into the dense result instead of assembling full Kronecker products.
"""

import abc
from typing import Dict, List, Literal, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tridiag_vqls.circuits import Circuit
from tridiag_vqls.errors import StateSizeError, VqlsError
from tridiag_vqls.gates import CenterSwitch, PauliString, Swap, center_switch_matrix, pauli_string_matrix
from tridiag_vqls.statevector import EXACT_TOL, MAX_MATRIX_QUBITS, PIPELINE_TOL

logger = structlog.get_logger()

MAX_GENERAL_QUBITS = 8
PRUNE_RATIO = 1e-12

Scheme = Literal["pauli", "multiqubit"]


class NonHermitianError(VqlsError):
    """Raised when a Pauli decomposition is requested for a non-Hermitian matrix."""
    pass


class DecompositionError(VqlsError):
    """Raised when a decomposition cannot be built or fails its reconstruction check."""
    pass


class TridiagonalSpec(BaseModel):
    """``alpha`` on the diagonal and ``beta`` on both first off-diagonals of a ``2**n`` square matrix."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="Qubit count")
    alpha: float = Field(..., allow_inf_nan=False, description="Diagonal coefficient")
    beta: float = Field(..., allow_inf_nan=False, description="Off-diagonal coefficient")

    @property
    def dim(self) -> int:
        return 2 ** self.n


def _parity(values: np.ndarray) -> np.ndarray:
    bits = np.zeros_like(values)
    remaining = values.copy()
    while np.any(remaining):
        bits ^= remaining & 1
        remaining >>= 1
    return bits


class UnitaryTerm(BaseModel, abc.ABC):
    """One unitary ``A_l`` of a decomposition."""
    model_config = ConfigDict(frozen=True)

    @property
    @abc.abstractmethod
    def n(self) -> int:
        pass

    @abc.abstractmethod
    def label(self) -> str:
        """Name in table notation, qubit ``n-1`` first, e.g. ``Z2 Z1 I0`` or ``I3 CS_(2-0)``."""
        pass

    @abc.abstractmethod
    def circuit(self) -> Circuit:
        pass

    @abc.abstractmethod
    def matrix(self) -> np.ndarray:
        pass

    @abc.abstractmethod
    def monomial(self) -> Tuple[np.ndarray, np.ndarray]:
        """``(rows, values)`` with ``matrix[rows[c], c] == values[c]`` and zeros elsewhere."""
        pass

    @property
    def is_diagonal(self) -> bool:
        rows, _ = self.monomial()
        return bool(np.array_equal(rows, np.arange(rows.size)))


class PauliTerm(UnitaryTerm):
    pauli: PauliString = Field(..., description="The Pauli string")

    @property
    def n(self) -> int:
        return self.pauli.n

    def label(self) -> str:
        return self.pauli.label()

    def circuit(self) -> Circuit:
        return Circuit(n=self.n, gates=self.pauli.gates())

    def matrix(self) -> np.ndarray:
        return pauli_string_matrix(self.pauli)

    def monomial(self) -> Tuple[np.ndarray, np.ndarray]:
        x, z = self.pauli.x_mask, self.pauli.z_mask
        cols = np.arange(2 ** self.n)
        signs = 1 - 2 * _parity(cols & z)
        phase = 1j ** bin(x & z).count("1")
        return cols ^ x, phase * signs.astype(np.complex128)


class CenterSwitchTerm(UnitaryTerm):
    """Identity on the top ``n - span`` qubits, center-switch of ``span`` on qubits ``span-1 .. 0``."""
    n_qubits: int = Field(..., ge=2, description="System qubit count")
    span: int = Field(..., ge=2, description="Center-switch span, 2 for SWAP")

    @model_validator(mode="after")
    def _check_span(self) -> "CenterSwitchTerm":
        if self.span > self.n_qubits:
            raise DecompositionError(f"Span {self.span} does not fit on {self.n_qubits} qubits")
        return self

    @property
    def n(self) -> int:
        return self.n_qubits

    def label(self) -> str:
        padding = "".join(f"I{q} " for q in reversed(range(self.span, self.n)))
        if self.span == 2:
            core = "SWAP_(1-0)"
        elif self.span == 3:
            core = "CS_(2-0)"
        else:
            core = f"CS^({self.span - 2})_({self.span - 1}-0)"
        return padding + core

    def circuit(self) -> Circuit:
        gate = Swap(qubit_a=1, qubit_b=0) if self.span == 2 else CenterSwitch(low=0, span=self.span)
        return Circuit(n=self.n, gates=(gate,))

    def matrix(self) -> np.ndarray:
        if self.n > MAX_MATRIX_QUBITS:
            raise StateSizeError(f"Dense term matrices are limited to {MAX_MATRIX_QUBITS} qubits, got {self.n}")
        return np.kron(np.eye(2 ** (self.n - self.span)), center_switch_matrix(self.span))

    def monomial(self) -> Tuple[np.ndarray, np.ndarray]:
        cols = np.arange(2 ** self.n)
        half = 2 ** (self.span - 1)
        local = cols % (2 * half)
        switched = (local == half - 1) | (local == half)
        rows = np.where(switched, cols ^ (2 * half - 1), cols)
        return rows, np.ones(cols.size, dtype=np.complex128)


class WeightedTerm(BaseModel):
    model_config = ConfigDict(frozen=True)

    coefficient: complex = Field(..., description="Coefficient c_l")
    term: UnitaryTerm = Field(..., description="Unitary A_l")


class Decomposition(BaseModel):
    """``A = sum(c_l * A_l)`` with the Frobenius norm of what is left over."""
    model_config = ConfigDict(frozen=True)

    scheme: Scheme = Field(..., description="Decomposition scheme")
    n: int = Field(..., ge=1, description="Qubit count")
    terms: Tuple[WeightedTerm, ...] = Field((), description="Weighted terms in canonical order")
    residual: float = Field(0.0, ge=0.0, description="Frobenius norm of A - sum(c_l * A_l)")

    @model_validator(mode="after")
    def _check_terms(self) -> "Decomposition":
        labels = [t.term.label() for t in self.terms]
        if len(set(labels)) != len(labels):
            raise DecompositionError("A decomposition must not repeat a term")
        if any(t.term.n != self.n for t in self.terms):
            raise DecompositionError(f"Every term must act on {self.n} qubits")
        if any(t.coefficient == 0 for t in self.terms):
            raise DecompositionError("Zero-coefficient terms must be pruned")
        return self

    @property
    def coefficients(self) -> List[complex]:
        return [t.coefficient for t in self.terms]

    @property
    def labels(self) -> List[str]:
        return [t.term.label() for t in self.terms]

    def __len__(self) -> int:
        return len(self.terms)


def assemble_tridiagonal(spec: TridiagonalSpec) -> np.ndarray:
    """Dense ``2**n`` square matrix with ``alpha`` on the diagonal and ``beta`` beside it."""
    if spec.n > MAX_MATRIX_QUBITS:
        raise StateSizeError(f"Dense matrices are limited to {MAX_MATRIX_QUBITS} qubits, got {spec.n}")
    dim = spec.dim
    return (
        spec.alpha * np.eye(dim, dtype=np.complex128)
        + spec.beta * np.eye(dim, k=1, dtype=np.complex128)
        + spec.beta * np.eye(dim, k=-1, dtype=np.complex128)
    )


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis.

    ``out[..., s] = sum_j (-1)**popcount(s & j) * values[..., j]``.
    """
    result = np.array(values, copy=True)
    size = result.shape[-1]
    if size & (size - 1):
        raise StateSizeError(f"Walsh-Hadamard transform needs a power-of-two length, got {size}")
    batch = result.shape[:-1]
    h = 1
    while h < size:
        blocks = result.reshape(batch + (-1, 2, h))
        low, high = blocks[..., 0, :], blocks[..., 1, :]
        result = np.stack((low + high, low - high), axis=-2).reshape(batch + (size,))
        h *= 2
    return result


def reconstruct(d: Decomposition) -> np.ndarray:
    """``sum(c_l * A_l)`` as a dense matrix."""
    dim = 2 ** d.n
    if d.n > MAX_MATRIX_QUBITS:
        raise StateSizeError(f"Dense matrices are limited to {MAX_MATRIX_QUBITS} qubits, got {d.n}")
    result = np.zeros((dim, dim), dtype=np.complex128)
    cols = np.arange(dim)
    for weighted in d.terms:
        rows, values = weighted.term.monomial()
        result[rows, cols] += weighted.coefficient * values
    return result


def _prune(candidates: List[Tuple[complex, UnitaryTerm]]) -> List[WeightedTerm]:
    scale = max((abs(c) for c, _ in candidates), default=0.0)
    return [
        WeightedTerm(coefficient=c, term=term)
        for c, term in candidates
        if scale > 0 and abs(c) > PRUNE_RATIO * scale
    ]


def _finish(scheme: Scheme, n: int, target: np.ndarray, candidates: List[Tuple[complex, UnitaryTerm]]) -> Decomposition:
    unchecked = Decomposition(scheme=scheme, n=n, terms=tuple(_prune(candidates)))
    residual = float(np.linalg.norm(target - reconstruct(unchecked)))
    if residual > EXACT_TOL * max(1.0, float(np.linalg.norm(target))):
        raise DecompositionError(f"{scheme} decomposition reconstructs with residual {residual:.3e}")
    decomposition = unchecked.model_copy(update={"residual": residual})
    logger.info("Decomposition built", scheme=scheme, n=n, terms=len(decomposition), residual=residual)
    return decomposition


def pauli_decompose_general(a: np.ndarray) -> Decomposition:
    """Pauli-string coefficients ``trace(P a) / 2**n`` of a Hermitian matrix, zeros pruned.

    For each X-mask ``x`` the entries ``a[r ^ x, r]`` are Walsh-Hadamard transformed; that
    yields every Z-mask at once, so the cost is ``O(4**n * n)`` rather than ``O(8**n)``.

    Args:
        a (np.ndarray): Square Hermitian matrix whose size is a power of two.

    Returns:
        Decomposition: One Pauli-string term per non-zero coefficient.

    Raises:
        StateSizeError: If ``a`` is not square, not a power of two in size, or too large.
        NonHermitianError: If ``a`` differs from its conjugate transpose.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2 or a.shape[0] & (a.shape[0] - 1):
        raise StateSizeError(f"Expected a square matrix with power-of-two size, got shape {a.shape}")
    dim = a.shape[0]
    n = dim.bit_length() - 1
    if n > MAX_GENERAL_QUBITS:
        raise StateSizeError(f"General Pauli decomposition is limited to {MAX_GENERAL_QUBITS} qubits, got {n}")
    if not np.allclose(a, a.conj().T, atol=PIPELINE_TOL, rtol=0.0):
        raise NonHermitianError("Pauli decomposition requires a Hermitian matrix")

    idx = np.arange(dim)
    shifted = a[idx[:, None] ^ idx[None, :], idx[None, :]]
    spectra = walsh_hadamard(shifted) / dim

    candidates = []
    for x in range(dim):
        for z in range(dim):
            coefficient = (-1j) ** bin(x & z).count("1") * spectra[x, z]
            candidates.append((x, PauliString.from_masks(n, x, z), complex(coefficient.real)))
    candidates.sort(key=lambda item: (item[0], item[1].letters))
    return _finish("pauli", n, a, [(c, PauliTerm(pauli=p)) for _, p, c in candidates])


def _pauli_tridiagonal_candidates(spec: TridiagonalSpec) -> List[Tuple[complex, UnitaryTerm]]:
    n = spec.n
    candidates: List[Tuple[complex, UnitaryTerm]] = [(complex(spec.alpha), PauliTerm(pauli=PauliString(letters="I" * n)))]
    for k in range(n):
        x = (1 << (k + 1)) - 1
        block = []
        for z in range(1 << (k + 1)):
            weight = bin(z).count("1")
            if weight % 2:
                continue
            sign = (-1) ** (weight // 2 + ((z >> k) & 1))
            block.append((PauliString.from_masks(n, x, z), complex(spec.beta * sign / 2 ** k)))
        block.sort(key=lambda item: item[0].letters)
        candidates.extend((c, PauliTerm(pauli=p)) for p, c in block)
    return candidates


def pauli_decompose_tridiagonal(spec: TridiagonalSpec) -> Decomposition:
    """Pauli decomposition of the tridiagonal matrix from its closed form.

    Only the X-masks ``0`` and ``2**(k+1) - 1`` occur. For mask ``2**(k+1) - 1`` the Z-mask
    ranges over even-weight subsets of the low ``k+1`` bits with coefficient
    ``beta * 2**-k * (-1)**(weight/2 + z_k)``; odd-weight Z-masks (odd Y count) vanish.
    """
    if spec.n > MAX_MATRIX_QUBITS:
        raise StateSizeError(f"Tridiagonal decomposition is limited to {MAX_MATRIX_QUBITS} qubits, got {spec.n}")
    return _finish("pauli", spec.n, assemble_tridiagonal(spec), _pauli_tridiagonal_candidates(spec))


def off_diagonal_cover(n: int, j: int) -> int:
    """Span of the term that supplies superdiagonal entry ``(j, j+1)``: 1 for the X term, else ``k+1``.

    ``k`` is the number of trailing one bits of ``j``; the span-``k+1`` center-switch swaps
    exactly the indices ``j`` and ``j+1`` with ``j = 2**k - 1 (mod 2**(k+1))``.
    """
    if not 0 <= j < 2 ** n - 1:
        raise DecompositionError(f"No superdiagonal entry at {j} for n={n}")
    k = 0
    while (j >> k) & 1:
        k += 1
    return k + 1


def _center_switch_diagonal(n: int, span: int) -> np.ndarray:
    local = np.arange(2 ** n) % (2 ** span)
    half = 2 ** (span - 1)
    return np.where((local == half - 1) | (local == half), 0.0, 1.0)


def multiqubit_decompose_tridiagonal(spec: TridiagonalSpec) -> Decomposition:
    """SWAP/center-switch decomposition of the tridiagonal matrix.

    The off-diagonal is ``beta`` times ``X0`` plus the padded center-switch of every span
    from 2 to ``n``. Their diagonals leave ``d = alpha - beta * sum(diag(CS_span))``, which
    is expanded in Z strings by a Walsh-Hadamard transform. ``d`` is symmetric under bit
    complement, so odd-weight Z strings come out zero; that is checked.
    """
    n = spec.n
    if n < 2:
        raise DecompositionError("multiqubit scheme requires n ≥ 2")
    if n > MAX_MATRIX_QUBITS:
        raise StateSizeError(f"Tridiagonal decomposition is limited to {MAX_MATRIX_QUBITS} qubits, got {n}")

    candidates: List[Tuple[complex, UnitaryTerm]] = [
        (complex(spec.beta), PauliTerm(pauli=PauliString(letters="I" * (n - 1) + "X")))
    ]
    candidates.extend(
        (complex(spec.beta), CenterSwitchTerm(n_qubits=n, span=span)) for span in range(2, n + 1)
    )

    residual_diagonal = spec.alpha - spec.beta * sum(_center_switch_diagonal(n, span) for span in range(2, n + 1))
    z_coefficients = walsh_hadamard(residual_diagonal) / 2 ** n
    scale = max(abs(spec.alpha), abs(spec.beta), 1.0)
    for z, coefficient in enumerate(z_coefficients):
        if bin(z).count("1") % 2 and abs(coefficient) > PIPELINE_TOL * scale:
            raise DecompositionError(f"Odd-weight Z string {z:0{n}b} has coefficient {coefficient:.3e}")
    candidates.extend(
        (complex(c), PauliTerm(pauli=PauliString.from_masks(n, 0, z)))
        for z, c in enumerate(z_coefficients)
        if bin(z).count("1") % 2 == 0
    )
    return _finish("multiqubit", n, assemble_tridiagonal(spec), candidates)


_DECOMPOSERS = {
    "pauli": pauli_decompose_tridiagonal,
    "multiqubit": multiqubit_decompose_tridiagonal,
}


def decompose(spec: TridiagonalSpec, scheme: Scheme) -> Decomposition:
    """Decompose the tridiagonal matrix into weighted unitaries.

    Args:
        spec (TridiagonalSpec): Size and band values of the matrix.
        scheme (Scheme): ``"pauli"`` for Pauli strings or ``"multiqubit"`` for the SWAP and
            center-switch set.

    Returns:
        Decomposition: Terms with non-negligible coefficients, in canonical order.

    Raises:
        DecompositionError: If the scheme is unknown or does not fit ``spec.n``.
        StateSizeError: If ``spec.n`` exceeds the dense limit.
    """
    if scheme not in _DECOMPOSERS:
        raise DecompositionError(f"Unknown decomposition scheme: {scheme}")
    return _DECOMPOSERS[scheme](spec)


def term_counts(scheme: Scheme, n: int) -> int:
    """Generic term count (``alpha != 0``, ``beta != 0``) of a scheme on ``n`` qubits."""
    if scheme == "pauli":
        if n < 1:
            raise DecompositionError(f"pauli scheme requires n ≥ 1, got {n}")
        return 2 ** n
    if scheme == "multiqubit":
        if n < 2:
            raise DecompositionError("multiqubit scheme requires n ≥ 2")
        return 2 ** (n - 1) + n
    raise DecompositionError(f"Unknown decomposition scheme: {scheme}")


def format_coefficient(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:.17g}"
    return f"{c.real:.17g}{c.imag:+.17g}j"


def dump_decomposition(d: Decomposition) -> str:
    """One ``<coefficient> <term-name>`` line per term."""
    return "".join(f"{format_coefficient(t.coefficient)} {t.term.label()}\n" for t in d.terms)


def term_index(d: Decomposition) -> Dict[str, complex]:
    """Coefficients keyed by term label."""
    return {t.term.label(): t.coefficient for t in d.terms}
