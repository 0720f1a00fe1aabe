import logging
import os
import sys

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

from mojentic_mcp.client import McpClient
from mojentic_mcp.transports import StdioTransport

# Runs the solver server next door as a subprocess
script_dir = os.path.dirname(os.path.abspath(__file__))
server_path = os.path.join(script_dir, "..", "server", "solver_stdio.py")
transport = StdioTransport(command=[sys.executable, server_path])

with McpClient(transports=[transport]) as client:
    for tool in client.list_tools():
        logger.info(f"  - {tool['name']}: {tool.get('description', 'No description')}")

    decomposition = client.tools.decompose_tridiagonal(n=2, alpha=2.0, beta=-1.0, scheme="multiqubit")
    logger.info(f"Decomposition: {decomposition}")

    depths = client.tools.cost_circuit_depth(n=2, alpha=2.0, beta=-1.0, scheme="multiqubit")
    logger.info(f"Depths: {depths}")

    solution = client.tools.solve_tridiagonal(n=1, alpha=2.0, beta=-1.0, seed=3)
    logger.info(f"Solution: {solution}")

    try:
        client.tools.decompose_tridiagonal(n=1, alpha=2.0, beta=-1.0, scheme="multiqubit")
    except Exception as e:
        logger.error(f"Expected error for a one-qubit multiqubit decomposition: {e}")
