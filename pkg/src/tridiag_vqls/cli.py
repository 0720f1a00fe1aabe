"""Command-line driver: ``decomp``, ``depth``, ``run``, ``sweep`` and ``serve``."""

import argparse
import logging
import sys
from enum import IntEnum
from typing import Callable, Dict, List, Optional, TextIO

import structlog
from pydantic import ValidationError

from tridiag_vqls.config import CONFIG_KEYS, ExperimentConfig, load_config
from tridiag_vqls.decomposition import TridiagonalSpec, decompose, dump_decomposition
from tridiag_vqls.errors import VqlsError
from tridiag_vqls.experiments import RunSummary, SweepAbortError, depth_report, run_experiment, run_sweep
from tridiag_vqls.gateways import ArtifactGateway
from tridiag_vqls.vqls import AnsatzSpec, OptimizerAbortError

logger = structlog.get_logger()


class ExitCode(IntEnum):
    """Process exit codes."""
    SUCCESS = 0
    OPTIMIZER_ABORT = 1
    USAGE_ERROR = 2
    IO_ERROR = 3


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Render structlog events to stderr at DEBUG with ``-v``, WARNING with ``-q`` and INFO otherwise."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def _add_matrix_flags(parser: argparse.ArgumentParser, defaults: bool) -> None:
    parser.add_argument("--n", type=int, default=1 if defaults else None, help="qubit count")
    parser.add_argument("--alpha", type=float, default=2.0 if defaults else None, help="diagonal entry")
    parser.add_argument("--beta", type=float, default=-1.0 if defaults else None, help="off-diagonal entry")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value configuration file; flags override its values")
    _add_matrix_flags(parser, defaults=False)
    parser.add_argument("--scheme", choices=["pauli", "multiqubit"])
    parser.add_argument("--cost", choices=["normalized", "nonnormalized"])
    parser.add_argument("--mode", choices=["exact", "shots"])
    parser.add_argument("--shots", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--ansatz", choices=["product_ry", "layered_ry_cx"])
    parser.add_argument("--layers", type=int)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--xtol", type=float)
    parser.add_argument("--max-evals", dest="max_evals", type=int)
    parser.add_argument("--output", help="artifact directory (default: $VQLS_OUT or ./runs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tridiag-vqls", description="Variational solver for tridiagonal linear systems.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug detail to stderr")
    parser.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    decomp = commands.add_parser("decomp", help="print the unitary decomposition of the matrix")
    _add_matrix_flags(decomp, defaults=True)
    decomp.add_argument("--scheme", choices=["pauli", "multiqubit"], default="pauli")

    depth = commands.add_parser("depth", help="compare lowered cost-circuit depths of both schemes")
    _add_matrix_flags(depth, defaults=True)
    depth.add_argument("--scheme", choices=["pauli", "multiqubit"], action="append",
                       help="scheme to report (repeatable, default: both)")
    depth.add_argument("--ansatz", choices=["product_ry", "layered_ry_cx"], default="product_ry")
    depth.add_argument("--layers", type=int, default=1)

    run = commands.add_parser("run", help="optimize one configuration and write its artifacts")
    _add_run_flags(run)

    sweep = commands.add_parser("sweep", help="run several seeds and aggregate their results")
    _add_run_flags(sweep)
    sweep.add_argument("--seeds", type=int, default=5, help="number of consecutive seeds from --seed")
    sweep.add_argument("--seed-list", dest="seed_list", help="comma-separated seeds, overrides --seeds")
    sweep.add_argument("--jobs", type=int, default=1, help="runs executed concurrently")

    commands.add_parser("serve", help="serve the solver as MCP tools over STDIO (needs the mcp extra)")
    return parser


class CommandHandler:
    """Dispatches parsed arguments to subcommands and maps failures to exit codes."""

    def __init__(self, gateway: Optional[ArtifactGateway] = None, stdout: Optional[TextIO] = None,
                 stderr: Optional[TextIO] = None):
        """Initialize the command handler.

        Args:
            gateway (ArtifactGateway, optional): Artifact gateway for config files and run output.
                Defaults to a filesystem gateway.
            stdout (TextIO, optional): Stream for command output. Defaults to ``sys.stdout``.
            stderr (TextIO, optional): Stream for ``error: ...`` lines. Defaults to ``sys.stderr``.
        """
        self.gateway = gateway or ArtifactGateway()
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        self.commands: Dict[str, Callable[[argparse.Namespace], ExitCode]] = {
            "decomp": self._handle_decomp,
            "depth": self._handle_depth,
            "run": self._handle_run,
            "sweep": self._handle_sweep,
            "serve": self._handle_serve,
        }

    def handle(self, args: argparse.Namespace) -> ExitCode:
        """Run a parsed command and map its failure to an exit code.

        Args:
            args (argparse.Namespace): Arguments from ``build_parser()``, with ``command`` set.

        Returns:
            ExitCode: ``OPTIMIZER_ABORT`` for aborted runs, ``USAGE_ERROR`` for invalid flags or
            configuration, ``IO_ERROR`` for artifact failures, else the command's own code.
        """
        logger.debug("Handling command", command=args.command)
        try:
            return self.commands[args.command](args)
        except OptimizerAbortError as e:
            logger.error("Optimizer aborted", reason=str(e), exc_info=True)
            self._fail(f"optimizer aborted: {e}")
            return ExitCode.OPTIMIZER_ABORT
        except (ValidationError, VqlsError) as e:
            self._fail(str(e))
            return ExitCode.USAGE_ERROR
        except OSError as e:
            logger.error("Artifact I/O failed", exc_info=True)
            self._fail(str(e))
            return ExitCode.IO_ERROR

    def _fail(self, message: str) -> None:
        self.stderr.write(f"error: {message}\n")

    def _handle_decomp(self, args: argparse.Namespace) -> ExitCode:
        spec = TridiagonalSpec(n=args.n, alpha=args.alpha, beta=args.beta)
        d = decompose(spec, args.scheme)
        self.stdout.write(dump_decomposition(d))
        self.stdout.write(f"# terms: {len(d)}\n")
        self.stdout.write(f"# residual: {d.residual:.3e}\n")
        return ExitCode.SUCCESS

    def _handle_depth(self, args: argparse.Namespace) -> ExitCode:
        spec = TridiagonalSpec(n=args.n, alpha=args.alpha, beta=args.beta)
        ansatz = AnsatzSpec(kind=args.ansatz, n=args.n, layers=args.layers)
        schemes = args.scheme or (["pauli", "multiqubit"] if args.n >= 2 else ["pauli"])
        for scheme in schemes:
            self.stdout.write(depth_report(spec, scheme, ansatz).line() + "\n")
        return ExitCode.SUCCESS

    def _config(self, args: argparse.Namespace) -> ExperimentConfig:
        overrides = {key: getattr(args, key, None) for key in CONFIG_KEYS}
        return load_config(args.config, overrides, self.gateway)

    def _handle_run(self, args: argparse.Namespace) -> ExitCode:
        summary = run_experiment(self._config(args), self.gateway)
        self.stdout.write(f"final_cost={summary.final_cost:.17g} final_fidelity={summary.final_fidelity:.17g} "
                          f"evaluations={summary.evaluations}\n")
        return ExitCode.SUCCESS

    def _handle_sweep(self, args: argparse.Namespace) -> ExitCode:
        config = self._config(args)
        if args.seed_list:
            try:
                seeds = [int(s) for s in args.seed_list.split(",")]
            except ValueError:
                self._fail(f"--seed-list must be comma-separated integers, got {args.seed_list!r}")
                return ExitCode.USAGE_ERROR
        else:
            if args.seeds < 1:
                self._fail("--seeds must be at least 1")
                return ExitCode.USAGE_ERROR
            seeds = list(range(config.seed, config.seed + args.seeds))
        if args.jobs < 1:
            self._fail("--jobs must be at least 1")
            return ExitCode.USAGE_ERROR
        try:
            summaries = run_sweep(config, seeds, self.gateway, jobs=args.jobs)
        except SweepAbortError as e:
            self._write_sweep_rows(e.summaries)
            raise
        self._write_sweep_rows(summaries)
        return ExitCode.SUCCESS

    def _write_sweep_rows(self, summaries: List[RunSummary]) -> None:
        for s in summaries:
            self.stdout.write(f"seed={s.seed} final_cost={s.final_cost:.17g} final_fidelity={s.final_fidelity:.17g}\n")

    def _handle_serve(self, args: argparse.Namespace) -> ExitCode:
        try:
            from mojentic_mcp.mcp_stdio import StdioMcpServer
            from mojentic_mcp.rpc import JsonRpcHandler

            from tridiag_vqls.tools import solver_tools
        except ImportError:
            self._fail("serve needs the mcp extra: pip install 'tridiag-vqls[mcp]'")
            return ExitCode.USAGE_ERROR
        logger.info("Serving solver tools over STDIO")
        StdioMcpServer(JsonRpcHandler(tools=solver_tools())).run()
        return ExitCode.SUCCESS


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point of the ``tridiag-vqls`` command.

    Args:
        argv (List[str], optional): Arguments without the program name. Defaults to ``sys.argv[1:]``.

    Returns:
        int: The process exit code, or argparse's own code when parsing stops.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    configure_logging(args.verbose, args.quiet)
    return int(CommandHandler().handle(args))
