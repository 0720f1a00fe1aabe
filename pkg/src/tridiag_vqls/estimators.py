"""Overlap estimators for ``<0|prep^dagger u prep|0>``.

The exact estimator reads the overlap off the simulated statevector. The shot estimator
simulates the ancilla-based Hadamard test and samples the ancilla outcome ``shots`` times.
Each sample batch draws from its own Philox stream, keyed by the run seed and a
caller-supplied stream index, so results do not depend on evaluation order.
"""

import abc
import math
from typing import Literal, Optional, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from tridiag_vqls.circuits import Circuit, controlled
from tridiag_vqls.errors import DimensionMismatchError
from tridiag_vqls.gates import Hadamard, Phase
from tridiag_vqls.statevector import StateVector, apply_circuit, inner_product

logger = structlog.get_logger()

Part = Literal["re", "im"]
Stream = Tuple[int, ...]

_PART_INDEX = {"re": 0, "im": 1}


class EvalMode(BaseModel):
    """How cost terms are evaluated: exactly, or by sampling ``shots`` Hadamard-test outcomes."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["exact", "shots"] = Field("exact", description="Evaluation mode")
    shots: int = Field(8192, ge=1, description="Samples per Hadamard test")
    seed: int = Field(0, ge=0, lt=2 ** 64, description="Seed for the sampling streams")


def hadamard_test_circuit(prep: Circuit, u: Circuit, part: Part = "re") -> Circuit:
    """The Hadamard test on ``prep.n + 1`` qubits with the ancilla as the top qubit.

    ``P(ancilla = 0)`` is ``(1 + Re z) / 2`` for ``part="re"`` and ``(1 + Im z) / 2`` for
    ``part="im"``, where ``z = <0|prep^dagger u prep|0>``.
    """
    if prep.n != u.n:
        raise DimensionMismatchError(f"Preparation acts on {prep.n} qubits but the unitary on {u.n}")
    ancilla = prep.n
    gates = (Hadamard(qubit=ancilla),) + prep.gates + controlled(u, ancilla).gates
    if part == "im":
        gates += (Phase(qubit=ancilla, angle=-math.pi / 2),)
    gates += (Hadamard(qubit=ancilla),)
    return Circuit(n=prep.n + 1, gates=gates)


def ancilla_zero_probability(state: StateVector) -> float:
    """Probability that the top qubit of ``state`` reads 0."""
    half = state.dim // 2
    probability = float(np.sum(np.abs(state.amplitudes[:half]) ** 2))
    return min(1.0, max(0.0, probability))


class OverlapEstimator(abc.ABC):
    """Estimates ``<0|prep^dagger u prep|0>`` for a pair of circuits."""

    @abc.abstractmethod
    def estimate(self, prep: Circuit, u: Circuit, stream: Stream = ()) -> complex:
        """Estimate the overlap.

        Args:
            prep: Circuit preparing the state from ``|0...0>``.
            u: Unitary whose expectation value is wanted.
            stream: Key that selects the random stream, e.g. ``(evaluation, circuit_index)``.

        Returns:
            The complex estimate.
        """
        pass

    @property
    def shots_used(self) -> int:
        return 0


class ExactOverlapEstimator(OverlapEstimator):
    """Statevector evaluation, accurate to rounding."""

    def __init__(self):
        self._prep: Optional[Circuit] = None
        self._state: Optional[StateVector] = None

    def _prepared(self, prep: Circuit) -> StateVector:
        if self._prep is None or self._prep != prep:
            self._prep = prep
            self._state = apply_circuit(prep)
        return self._state

    def estimate(self, prep: Circuit, u: Circuit, stream: Stream = ()) -> complex:
        if prep.n != u.n:
            raise DimensionMismatchError(f"Preparation acts on {prep.n} qubits but the unitary on {u.n}")
        state = self._prepared(prep)
        return inner_product(state, apply_circuit(u, state))


class ShotOverlapEstimator(OverlapEstimator):
    """Sampled Hadamard tests: each part is ``2k/shots - 1`` with ``k ~ Binomial(shots, P(0))``."""

    def __init__(self, shots: int, seed: int):
        """Initialize the shot estimator.

        Args:
            shots (int): Samples drawn per Hadamard-test part.
            seed (int): Root of every sampling stream; streams are spawned from it by key.
        """
        self.shots = shots
        self.seed = seed
        self._shots_used = 0

    @property
    def shots_used(self) -> int:
        return self._shots_used

    def generator(self, stream: Stream, part: Part) -> np.random.Generator:
        key = tuple(stream) + (_PART_INDEX[part],)
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(self.seed, spawn_key=key)))

    def sample_part(self, prep: Circuit, u: Circuit, part: Part, stream: Stream = ()) -> float:
        probability = ancilla_zero_probability(apply_circuit(hadamard_test_circuit(prep, u, part)))
        zeros = self.generator(stream, part).binomial(self.shots, probability)
        self._shots_used += self.shots
        return 2.0 * zeros / self.shots - 1.0

    def estimate(self, prep: Circuit, u: Circuit, stream: Stream = ()) -> complex:
        real = self.sample_part(prep, u, "re", stream)
        imag = self.sample_part(prep, u, "im", stream)
        logger.debug("Sampled overlap", stream=stream, real=real, imag=imag)
        return complex(real, imag)


def estimator_for(mode: EvalMode) -> OverlapEstimator:
    """Build the estimator for an evaluation mode.

    Args:
        mode (EvalMode): ``exact``, or ``shots`` with its shot count and seed.

    Returns:
        OverlapEstimator: A fresh estimator; a shot estimator counts the samples it draws.
    """
    if mode.kind == "exact":
        return ExactOverlapEstimator()
    return ShotOverlapEstimator(shots=mode.shots, seed=mode.seed)


def estimate_overlap_re_im(prep: Circuit, u: Circuit, mode: EvalMode, stream: Stream = ()) -> complex:
    """One-off estimate of ``<0|prep^dagger u prep|0>`` under ``mode``.

    Args:
        prep (Circuit): State preparation.
        u (Circuit): Unitary whose expectation is estimated, on the same register.
        mode (EvalMode): Exact or sampled evaluation.
        stream (Stream, optional): Key of the sampling stream in shots mode. Defaults to ``()``.

    Returns:
        complex: Real part plus ``1j`` times the imaginary part, each from its own Hadamard test.

    Raises:
        DimensionMismatchError: If ``prep`` and ``u`` act on different registers.
    """
    return estimator_for(mode).estimate(prep, u, stream)
