"""Solver operations exposed as Mojentic tools, for serving over MCP.

Requires the ``mcp`` extra.
"""

from typing import Any, Dict, List

import structlog
from mojentic.llm.tools.llm_tool import LLMTool

from tridiag_vqls.decomposition import TridiagonalSpec, decompose, format_coefficient
from tridiag_vqls.estimators import EvalMode
from tridiag_vqls.experiments import depth_report
from tridiag_vqls.optimizer import OptimizerSettings
from tridiag_vqls.vqls import AnsatzSpec, build_problem, optimize

logger = structlog.get_logger()

_MATRIX_PROPERTIES = {
    "n": {"type": "integer", "description": "Qubit count; the matrix is 2**n square"},
    "alpha": {"type": "number", "description": "Diagonal entry"},
    "beta": {"type": "number", "description": "Off-diagonal entry"},
}
_SCHEME_PROPERTY = {
    "type": "string",
    "enum": ["pauli", "multiqubit"],
    "description": "Unitary decomposition scheme",
}


def _descriptor(name: str, description: str, properties: Dict[str, Any], required: List[str]) -> Dict[str, Any]:
    return {
        "type": "function",
        "function": {
            "name": name,
            "description": description,
            "parameters": {
                "type": "object",
                "properties": properties,
                "required": required,
            },
        },
    }


class DecomposeTridiagonalTool(LLMTool):
    """Unitary decomposition of ``tridiag(beta, alpha, beta)``."""

    def run(self, n: int, alpha: float, beta: float, scheme: str = "pauli") -> Dict[str, Any]:
        d = decompose(TridiagonalSpec(n=n, alpha=alpha, beta=beta), scheme)
        logger.info("Decomposition requested", n=n, scheme=scheme, terms=len(d))
        return {
            "scheme": d.scheme,
            "terms": [{"coefficient": format_coefficient(t.coefficient), "term": t.term.label()} for t in d.terms],
            "term_count": len(d),
            "residual": d.residual,
        }

    @property
    def descriptor(self) -> Dict[str, Any]:
        return _descriptor(
            "decompose_tridiagonal",
            "Decompose a constant-coefficient tridiagonal matrix of size 2**n into weighted unitary terms.",
            {**_MATRIX_PROPERTIES, "scheme": _SCHEME_PROPERTY},
            ["n", "alpha", "beta"],
        )


class CostCircuitDepthTool(LLMTool):
    """Lowered Hadamard-test depths of the cost for one decomposition scheme."""

    def run(self, n: int, alpha: float, beta: float, scheme: str = "pauli") -> Dict[str, Any]:
        return depth_report(TridiagonalSpec(n=n, alpha=alpha, beta=beta), scheme).model_dump()

    @property
    def descriptor(self) -> Dict[str, Any]:
        return _descriptor(
            "cost_circuit_depth",
            "Lower every Hadamard-test circuit of the variational cost to CNOT and single-qubit gates "
            "and report the maximum depth and total gate count.",
            {**_MATRIX_PROPERTIES, "scheme": _SCHEME_PROPERTY},
            ["n", "alpha", "beta"],
        )


class SolveTridiagonalTool(LLMTool):
    """Variational solve of ``A x = b`` with ``b`` the uniform superposition, in exact mode."""

    def run(self, n: int, alpha: float, beta: float, scheme: str = "pauli", seed: int = 0,
            max_evals: int = 500) -> Dict[str, Any]:
        prob = build_problem(TridiagonalSpec(n=n, alpha=alpha, beta=beta), scheme)
        trace = optimize(prob, AnsatzSpec(n=n), "normalized", EvalMode(kind="exact"),
                         OptimizerSettings(seed=seed, max_evals=max_evals))
        return {
            "theta": list(trace.final.theta),
            "final_cost": trace.final_cost,
            "final_fidelity": trace.final_fidelity,
            "evaluations": trace.evaluations,
            "converged": trace.converged,
        }

    @property
    def descriptor(self) -> Dict[str, Any]:
        return _descriptor(
            "solve_tridiagonal",
            "Solve a tridiagonal system with the variational linear solver, starting from a seeded "
            "point, and report the final cost and the fidelity against the classical solution.",
            {
                **_MATRIX_PROPERTIES,
                "scheme": _SCHEME_PROPERTY,
                "seed": {"type": "integer", "description": "Seed of the starting angles"},
                "max_evals": {"type": "integer", "description": "Cost evaluation budget"},
            },
            ["n", "alpha", "beta"],
        )


def solver_tools() -> List[LLMTool]:
    return [DecomposeTridiagonalTool(), CostCircuitDepthTool(), SolveTridiagonalTool()]
