import logging

import structlog

from tridiag_vqls.decomposition import TridiagonalSpec
from tridiag_vqls.estimators import EvalMode
from tridiag_vqls.optimizer import OptimizerSettings
from tridiag_vqls.vqls import AnsatzSpec, build_problem, optimize

structlog.configure(wrapper_class=structlog.make_filtering_bound_logger(logging.INFO))
logger = structlog.get_logger()

# A = [[2, -1], [-1, 2]], |b> = |+>; the solution is |+> as well
problem = build_problem(TridiagonalSpec(n=1, alpha=2.0, beta=-1.0), scheme="pauli")

for mode in (EvalMode(kind="exact"), EvalMode(kind="shots", shots=8192, seed=1)):
    trace = optimize(
        problem,
        AnsatzSpec(kind="product_ry", n=1),
        "normalized",
        mode,
        OptimizerSettings(seed=1, tol=1e-6 if mode.kind == "exact" else 1e-5),
    )
    logger.info(
        "2x2 solve",
        mode=mode.kind,
        theta=trace.final.theta,
        cost=trace.final_cost,
        fidelity=trace.final_fidelity,
        evaluations=trace.evaluations,
    )
