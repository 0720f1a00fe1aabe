"""Variational quantum linear solver with the global cost.

For ``|psi> = A V(theta)|0>`` and ``A = sum(c_l A_l)`` the cost is built from

* ``<psi|psi> = sum_{l,l'} conj(c_l) c_l' <0|V^dagger A_l^dagger A_l' V|0>``
* ``|<b|psi>|**2 = |sum_l c_l gamma_l|**2`` with ``gamma_l = <0|B^dagger A_l V|0>``

The normalized cost is ``1 - |<b|psi>|**2 / <psi|psi>``; the non-normalized cost is
``<psi|psi> - |<b|psi>|**2``. Both vanish exactly at the solution.
"""

import math
from typing import Callable, List, Literal, Optional, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tridiag_vqls.circuits import Circuit
from tridiag_vqls.classical import classical_solve
from tridiag_vqls.decomposition import Decomposition, Scheme, TridiagonalSpec, decompose, reconstruct
from tridiag_vqls.errors import DimensionMismatchError, StateSizeError, VqlsError
from tridiag_vqls.estimators import EvalMode, OverlapEstimator, estimator_for
from tridiag_vqls.gates import RY, Hadamard, cx
from tridiag_vqls.optimizer import NonFiniteObjectiveError, OptimizerSettings, nelder_mead
from tridiag_vqls.statevector import PIPELINE_TOL, StateVector, apply_circuit, inner_product

logger = structlog.get_logger()

MAX_HAMILTONIAN_QUBITS = 8
DEGENERATE_NORM_SQ = 1e-14

CostKind = Literal["normalized", "nonnormalized"]
OverlapForm = Literal["single_sum", "double_sum"]


class DegenerateStateError(VqlsError):
    """Raised when ``<psi|psi>`` is too small to normalize the cost by."""
    pass


class ProblemSpec(BaseModel):
    """A tridiagonal system, its unitary decomposition and the right-hand-side preparation ``B``."""
    model_config = ConfigDict(frozen=True)

    spec: TridiagonalSpec = Field(..., description="Matrix definition")
    decomposition: Decomposition = Field(..., description="Unitary decomposition of the matrix")
    b_prep: Circuit = Field(..., description="Circuit B with |b> = B|0>")

    @model_validator(mode="after")
    def _check_sizes(self) -> "ProblemSpec":
        if not self.spec.n == self.decomposition.n == self.b_prep.n:
            raise DimensionMismatchError(
                f"Matrix ({self.spec.n}), decomposition ({self.decomposition.n}) and B ({self.b_prep.n}) disagree"
            )
        return self

    @property
    def n(self) -> int:
        return self.spec.n


def uniform_b_prep(n: int) -> Circuit:
    """``B = H`` on every qubit, so ``|b>`` is the uniform superposition."""
    return Circuit(n=n, gates=tuple(Hadamard(qubit=q) for q in range(n)))


def build_problem(spec: TridiagonalSpec, scheme: Scheme = "pauli") -> ProblemSpec:
    """Pair the decomposed matrix with the uniform right-hand side ``H^{(x)n}|0>``.

    Args:
        spec (TridiagonalSpec): The tridiagonal matrix.
        scheme (Scheme, optional): Decomposition scheme. Defaults to ``"pauli"``.

    Returns:
        ProblemSpec: The problem the cost and the optimizer work on.
    """
    return ProblemSpec(spec=spec, decomposition=decompose(spec, scheme), b_prep=uniform_b_prep(spec.n))


class AnsatzSpec(BaseModel):
    """Shape of ``V(theta)``."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["product_ry", "layered_ry_cx"] = Field("product_ry", description="Ansatz family")
    n: int = Field(..., ge=1, description="Qubit count")
    layers: int = Field(1, ge=1, description="Entangling layers for layered_ry_cx")

    @property
    def parameter_count(self) -> int:
        if self.kind == "product_ry":
            return self.n
        return self.n * (self.layers + 1)


class Params(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta: Tuple[float, ...] = Field(..., description="Rotation angles in radians")

    @model_validator(mode="after")
    def _check_finite(self) -> "Params":
        if not all(math.isfinite(t) for t in self.theta):
            raise VqlsError("Ansatz angles must be finite")
        return self


def ansatz_circuit(a: AnsatzSpec, p: Params) -> Circuit:
    """``V(theta)``: one RY per qubit, then for the layered form a CNOT chain and another RY layer per layer."""
    if len(p.theta) != a.parameter_count:
        raise DimensionMismatchError(f"Ansatz needs {a.parameter_count} angles, got {len(p.theta)}")
    angles = iter(p.theta)
    gates = [RY(qubit=q, angle=next(angles)) for q in range(a.n)]
    if a.kind == "layered_ry_cx":
        for _ in range(a.layers):
            gates.extend(cx(q, q + 1) for q in range(a.n - 1))
            gates.extend(RY(qubit=q, angle=next(angles)) for q in range(a.n))
    return Circuit(n=a.n, gates=tuple(gates))


def hamiltonian_global(prob: ProblemSpec) -> np.ndarray:
    """``H_G = A^dagger (I - |b><b|) A``; its expectation in ``|x>`` is the non-normalized cost."""
    if prob.n > MAX_HAMILTONIAN_QUBITS:
        raise StateSizeError(f"Dense Hamiltonians are limited to {MAX_HAMILTONIAN_QUBITS} qubits, got {prob.n}")
    a = reconstruct(prob.decomposition)
    b = apply_circuit(prob.b_prep).amplitudes
    projector = np.eye(b.size, dtype=np.complex128) - np.outer(b, b.conj())
    return a.conj().T @ projector @ a


class CostCircuit(BaseModel):
    """One overlap the cost needs: ``<0|prep^dagger unitary prep|0>``."""
    model_config = ConfigDict(frozen=True)

    index: int = Field(..., ge=0, description="Stable position, used as the random stream index")
    kind: Literal["pair", "overlap"] = Field(..., description="A_l^dagger A_l' pair or gamma_l overlap")
    left: int = Field(..., ge=0, description="Term l")
    right: int = Field(..., ge=0, description="Term l' (equal to l for overlaps)")
    prep: Circuit = Field(..., description="State preparation")
    unitary: Circuit = Field(..., description="Unitary whose expectation is taken")


def cost_circuits(prob: ProblemSpec, a: AnsatzSpec, p: Params) -> List[CostCircuit]:
    """Every overlap the cost needs, pairs ``l < l'`` first, then the ``gamma_l``.

    Diagonal pairs are ``<x|A_l^dagger A_l|x> = 1`` and need no circuit.
    """
    if a.n != prob.n:
        raise DimensionMismatchError(f"Ansatz acts on {a.n} qubits, the problem on {prob.n}")
    v = ansatz_circuit(a, p)
    term_circuits = [t.term.circuit() for t in prob.decomposition.terms]
    b_adjoint = prob.b_prep.adjoint()
    empty = Circuit(n=prob.n)

    circuits = []
    for left in range(len(term_circuits)):
        for right in range(left + 1, len(term_circuits)):
            circuits.append(dict(
                kind="pair", left=left, right=right, prep=v,
                unitary=term_circuits[right].compose(term_circuits[left].adjoint()),
            ))
    for l, term in enumerate(term_circuits):
        circuits.append(dict(kind="overlap", left=l, right=l, prep=empty, unitary=v.compose(term).compose(b_adjoint)))
    return [CostCircuit(index=i, **fields) for i, fields in enumerate(circuits)]


class CostReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float = Field(..., description="Cost value")
    psi_norm_sq: float = Field(..., description="<psi|psi>")
    overlap_sq: float = Field(..., description="|<b|psi>|^2")
    per_term_overlaps: Tuple[complex, ...] = Field(..., description="gamma_l = <0|B^dagger A_l V|0>")
    shots_used: int = Field(0, ge=0, description="Hadamard-test samples drawn")


def cost(
    prob: ProblemSpec,
    a: AnsatzSpec,
    p: Params,
    kind: CostKind,
    mode: EvalMode,
    evaluation: int = 0,
    overlap_form: OverlapForm = "single_sum",
    estimator: Optional[OverlapEstimator] = None,
) -> CostReport:
    """Evaluate the global cost at ``p``.

    ``evaluation`` keys the random streams in shots mode so that repeated evaluations of
    the same point draw fresh samples. ``overlap_form="double_sum"`` evaluates
    ``|<b|psi>|**2`` as the explicit ``L**2`` double sum instead of ``|sum_l c_l gamma_l|**2``.

    Args:
        prob (ProblemSpec): Decomposed matrix and right-hand side.
        a (AnsatzSpec): Shape of the ansatz.
        p (Params): Angles to evaluate at.
        kind (CostKind): ``"normalized"`` or ``"nonnormalized"``.
        mode (EvalMode): Exact overlaps or sampled Hadamard tests.
        evaluation (int, optional): Evaluation counter for the random streams. Defaults to 0.
        overlap_form (OverlapForm, optional): How ``|<b|psi>|**2`` is assembled. Defaults to ``"single_sum"``.
        estimator (OverlapEstimator, optional): Estimator to reuse across evaluations; one is
            built from ``mode`` when omitted.

    Returns:
        CostReport: The cost with ``<psi|psi>``, ``|<b|psi>|**2`` and the shots spent.

    Raises:
        DegenerateStateError: If ``<psi|psi>`` is below ``1e-14`` for the normalized cost.
    """
    estimator = estimator or estimator_for(mode)
    shots_before = estimator.shots_used
    c = np.array(prob.decomposition.coefficients, dtype=np.complex128)

    psi_norm_sq = float(np.sum(np.abs(c) ** 2))
    gammas = np.zeros(c.size, dtype=np.complex128)
    for circuit in cost_circuits(prob, a, p):
        value = estimator.estimate(circuit.prep, circuit.unitary, (evaluation, circuit.index))
        if circuit.kind == "pair":
            psi_norm_sq += 2.0 * (np.conj(c[circuit.left]) * c[circuit.right] * value).real
        else:
            gammas[circuit.left] = value

    weighted = c * gammas
    if overlap_form == "double_sum":
        overlap_sq = float(sum((weighted[l] * np.conj(weighted[m])).real for l in range(c.size) for m in range(c.size)))
    else:
        overlap_sq = float(abs(np.sum(weighted)) ** 2)

    if kind == "normalized":
        if psi_norm_sq <= DEGENERATE_NORM_SQ:
            raise DegenerateStateError(f"<psi|psi> = {psi_norm_sq:.3e} is too small to normalize by")
        value = 1.0 - overlap_sq / psi_norm_sq
        if mode.kind == "shots" and not 0.0 <= value <= 1.0:
            logger.warning("Sampled cost outside [0, 1]", value=value, evaluation=evaluation)
    else:
        value = psi_norm_sq - overlap_sq

    return CostReport(
        value=value,
        psi_norm_sq=psi_norm_sq,
        overlap_sq=overlap_sq,
        per_term_overlaps=tuple(complex(g) for g in gammas),
        shots_used=estimator.shots_used - shots_before,
    )


def fidelity(x_num: StateVector, x_ref: StateVector) -> float:
    """``|<x_ref|x_num>|**2`` for normalized states, clipped to ``[0, 1]``."""
    return min(1.0, max(0.0, abs(inner_product(x_ref, x_num)) ** 2))


class TraceEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    iteration: int = Field(..., ge=0, description="Simplex update index")
    params: Params = Field(..., description="Best parameters after the update")
    cost: float = Field(..., description="Cost at params")
    fidelity: float = Field(..., description="Fidelity of V(params)|0> against the classical solution")


class OptimizationTrace(BaseModel):
    model_config = ConfigDict(frozen=True)

    iterations: Tuple[TraceEntry, ...] = Field(..., min_length=1, description="Accepted iterates")
    final: Params = Field(..., description="Final parameters")
    final_cost: float = Field(..., description="Cost at the final parameters")
    final_fidelity: float = Field(..., description="Fidelity at the final parameters")
    best_fidelity: float = Field(..., description="Highest fidelity over the iterates")
    evaluations: int = Field(..., ge=1, description="Cost evaluations used")
    converged: bool = Field(..., description="Whether the optimizer met its tolerance")
    seed: int = Field(..., ge=0, description="Seed of the starting point")

    @model_validator(mode="after")
    def _check_counts(self) -> "OptimizationTrace":
        if self.evaluations < len(self.iterations):
            raise VqlsError("A trace cannot hold more iterates than evaluations")
        return self


class OptimizerAbortError(VqlsError):
    """Raised when optimization cannot continue; carries the iterates recorded so far."""

    def __init__(self, message: str, trace: Optional[OptimizationTrace] = None):
        self.trace = trace
        super().__init__(message)


IterationListener = Callable[[TraceEntry], None]


def initial_params(a: AnsatzSpec, seed: int) -> Params:
    """Angles drawn uniformly from ``[0, 2*pi)``."""
    rng = np.random.default_rng(seed)
    return Params(theta=tuple(float(t) for t in rng.uniform(0.0, 2.0 * math.pi, a.parameter_count)))


def optimize(
    prob: ProblemSpec,
    a: AnsatzSpec,
    kind: CostKind,
    mode: EvalMode,
    settings: OptimizerSettings,
    listener: Optional[IterationListener] = None,
) -> OptimizationTrace:
    """Minimise the cost with Nelder-Mead from a seeded start and score each iterate against the classical solution.

    Args:
        prob (ProblemSpec): The problem to solve.
        a (AnsatzSpec): Shape of the ansatz being optimized.
        kind (CostKind): Cost variant to minimise.
        mode (EvalMode): Exact or shot-sampled overlaps.
        settings (OptimizerSettings): Budget, tolerances and the start-point seed.
        listener (IterationListener, optional): Called with every recorded iterate as it happens.

    Returns:
        OptimizationTrace: Every accepted iterate with its cost and fidelity, plus the final point.

    Raises:
        OptimizerAbortError: If a cost evaluation is non-finite or degenerate.
    """
    reference = classical_solve(prob.spec, apply_circuit(prob.b_prep))
    estimator = estimator_for(mode)
    entries: List[TraceEntry] = []
    evaluations = 0

    def objective(theta: np.ndarray) -> float:
        nonlocal evaluations
        report = cost(prob, a, Params(theta=tuple(theta)), kind, mode, evaluation=evaluations, estimator=estimator)
        evaluations += 1
        logger.debug("Cost evaluated", evaluation=evaluations, cost=report.value)
        return report.value

    def record(iteration: int, x_best: np.ndarray, f_best: float) -> None:
        params = Params(theta=tuple(float(t) for t in x_best))
        entry = TraceEntry(
            iteration=iteration,
            params=params,
            cost=f_best,
            fidelity=fidelity(apply_circuit(ansatz_circuit(a, params)), reference),
        )
        entries.append(entry)
        if listener is not None:
            listener(entry)

    def partial_trace(converged: bool = False) -> Optional[OptimizationTrace]:
        if not entries:
            return None
        last = entries[-1]
        return OptimizationTrace(
            iterations=tuple(entries),
            final=last.params,
            final_cost=last.cost,
            final_fidelity=last.fidelity,
            best_fidelity=max(e.fidelity for e in entries),
            evaluations=max(evaluations, len(entries)),
            converged=converged,
            seed=settings.seed,
        )

    start = initial_params(a, settings.seed)
    logger.info("Optimizer started", n=prob.n, scheme=prob.decomposition.scheme, cost=kind, mode=mode.kind,
                seed=settings.seed, max_evals=settings.max_evals)
    try:
        result = nelder_mead(objective, start.theta, settings, callback=record)
    except NonFiniteObjectiveError as e:
        logger.error("Non-finite cost", evaluations=evaluations, exc_info=True)
        raise OptimizerAbortError(str(e), partial_trace()) from e
    except DegenerateStateError as e:
        logger.error("Degenerate state during optimization", evaluations=evaluations, exc_info=True)
        raise OptimizerAbortError(str(e), partial_trace()) from e

    trace = partial_trace(converged=result.converged)
    if trace is None:
        raise OptimizerAbortError("The evaluation budget ended before the first simplex was complete")
    if abs(trace.final_cost - result.fun) > PIPELINE_TOL * max(1.0, abs(result.fun)):
        logger.warning("Final iterate and optimizer result differ", trace_cost=trace.final_cost, result=result.fun)
    logger.info("Optimizer finished", converged=result.converged, evaluations=result.evaluations,
                cost=trace.final_cost, fidelity=trace.final_fidelity)
    return trace
