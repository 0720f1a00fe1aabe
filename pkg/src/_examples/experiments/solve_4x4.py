import logging

import structlog

from tridiag_vqls.decomposition import TridiagonalSpec
from tridiag_vqls.estimators import EvalMode
from tridiag_vqls.optimizer import OptimizerSettings
from tridiag_vqls.vqls import AnsatzSpec, build_problem, optimize

structlog.configure(wrapper_class=structlog.make_filtering_bound_logger(logging.INFO))
logger = structlog.get_logger()

# The solution (2, 3, 3, 2)/sqrt(26) is entangled, so a product ansatz tops out at 25/26 fidelity
problem = build_problem(TridiagonalSpec(n=2, alpha=2.0, beta=-1.0), scheme="pauli")

for ansatz in (AnsatzSpec(kind="product_ry", n=2), AnsatzSpec(kind="layered_ry_cx", n=2, layers=1)):
    trace = optimize(problem, ansatz, "nonnormalized", EvalMode(kind="exact"), OptimizerSettings(seed=0))
    logger.info(
        "4x4 solve",
        ansatz=ansatz.kind,
        cost=trace.final_cost,
        final_fidelity=trace.final_fidelity,
        best_fidelity=trace.best_fidelity,
        iterations=len(trace.iterations),
    )
