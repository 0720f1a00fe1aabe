import logging
import sys

logging.basicConfig(level=logging.CRITICAL)

from mojentic_mcp.mcp_stdio import StdioMcpServer
from mojentic_mcp.rpc import JsonRpcHandler

from tridiag_vqls.tools import solver_tools

sys.stderr.write("Starting tridiagonal solver MCP server on STDIO...\n")
rpc_handler = JsonRpcHandler(tools=solver_tools())
server = StdioMcpServer(rpc_handler)
server.run()
