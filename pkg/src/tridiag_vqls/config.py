"""Experiment configuration read from flat ``key=value`` files and command-line overrides."""

import os
from typing import Any, Dict, Literal, Mapping, Optional

import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tridiag_vqls.decomposition import Scheme, TridiagonalSpec
from tridiag_vqls.errors import VqlsError
from tridiag_vqls.estimators import EvalMode
from tridiag_vqls.gateways import ArtifactGateway
from tridiag_vqls.optimizer import OptimizerSettings
from tridiag_vqls.vqls import AnsatzSpec, CostKind

logger = structlog.get_logger()

OUTPUT_ENV = "VQLS_OUT"
DEFAULT_OUTPUT_ROOT = "runs"
EXACT_MODE_TOL = 1e-6
SHOTS_MODE_TOL = 1e-5


class ConfigError(VqlsError):
    """Raised for configuration text or values that cannot describe a run."""
    pass


def default_output_root() -> str:
    return os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT_ROOT)


class ExperimentConfig(BaseModel):
    """Everything a single VQLS run depends on.

    ``tol`` defaults to 1e-6 in exact mode and 1e-5 in shots mode when left unset.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(1, ge=1, le=11, description="Qubit count; the matrix is 2**n square")
    alpha: float = Field(2.0, allow_inf_nan=False, description="Diagonal entry")
    beta: float = Field(-1.0, allow_inf_nan=False, description="Off-diagonal entry")
    scheme: Scheme = Field("pauli", description="Unitary decomposition scheme")
    cost: CostKind = Field("normalized", description="Global cost variant")
    mode: Literal["exact", "shots"] = Field("exact", description="Overlap evaluation mode")
    shots: int = Field(8192, ge=1, description="Samples per Hadamard test in shots mode")
    seed: int = Field(0, ge=0, description="Seed for the start point and the sampling streams")
    ansatz: Literal["product_ry", "layered_ry_cx"] = Field("product_ry", description="Ansatz family")
    layers: int = Field(1, ge=1, description="Entangling layers for layered_ry_cx")
    tol: float = Field(..., gt=0, description="Simplex cost-spread tolerance")
    xtol: float = Field(1e-4, gt=0, description="Simplex size tolerance")
    max_evals: int = Field(500, ge=1, description="Cost evaluation budget")
    output: str = Field(default_factory=default_output_root, description="Artifact directory")

    @model_validator(mode="before")
    @classmethod
    def _default_tol(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("tol") in (None, ""):
            data = dict(data)
            data["tol"] = SHOTS_MODE_TOL if data.get("mode") == "shots" else EXACT_MODE_TOL
        return data

    @model_validator(mode="after")
    def _check_scheme_size(self) -> "ExperimentConfig":
        if self.scheme == "multiqubit" and self.n < 2:
            raise ConfigError("multiqubit scheme requires n ≥ 2")
        return self

    def tridiagonal_spec(self) -> TridiagonalSpec:
        return TridiagonalSpec(n=self.n, alpha=self.alpha, beta=self.beta)

    def ansatz_spec(self) -> AnsatzSpec:
        return AnsatzSpec(kind=self.ansatz, n=self.n, layers=self.layers)

    def eval_mode(self) -> EvalMode:
        return EvalMode(kind=self.mode, shots=self.shots, seed=self.seed)

    def optimizer_settings(self) -> OptimizerSettings:
        return OptimizerSettings(max_evals=self.max_evals, tol=self.tol, xtol=self.xtol, seed=self.seed)


CONFIG_KEYS = tuple(ExperimentConfig.model_fields)


def parse_config_text(text: str) -> Dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment and blank lines are skipped.

    Raises:
        ConfigError: On a line without ``=``, an unknown key or a repeated key.
    """
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"Line {number}: expected key=value, got {raw.strip()!r}")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"Line {number}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"Line {number}: duplicate key {key!r}")
        values[key] = value
    return values


def load_config(
    path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    gateway: Optional[ArtifactGateway] = None,
) -> ExperimentConfig:
    """Build the effective configuration: file values first, then every override that is not ``None``.

    Args:
        path (str, optional): A ``key=value`` file to start from.
        overrides (Mapping[str, Any], optional): Values from command-line flags, keyed like the file.
        gateway (ArtifactGateway, optional): Gateway that reads ``path``. Defaults to a filesystem gateway.

    Returns:
        ExperimentConfig: The validated configuration.

    Raises:
        ConfigError: If the file is malformed or the combination is invalid.
        ValidationError: If a value has the wrong type or range.
        OSError: If ``path`` cannot be read.
    """
    values: Dict[str, Any] = {}
    if path is not None:
        values.update(parse_config_text((gateway or ArtifactGateway()).read_text(path)))
        logger.debug("Configuration file read", path=path, keys=sorted(values))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ExperimentConfig(**values)


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def dump_config(config: ExperimentConfig) -> str:
    """The effective configuration as sorted ``key=value`` lines; parsing it back gives an equal config."""
    return "".join(f"{key}={_format_value(getattr(config, key))}\n" for key in sorted(CONFIG_KEYS))
