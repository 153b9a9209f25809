"""
Experiment configuration: YAML files with one section per pydantic model, and
environment settings for the output root and worker count.
"""

from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..channel import ChannelModel
from ..errors import ConfigError
from ..gnn import GnnArchitecture
from ..policy import AllocationProblem

# ============== CONFIGURATION ==============
DESK_SCALES = [100, 196, 289, 400]
FULL_SCALES = [500 + 100 * k for k in range(8)]
FULL_GRAPHS = 100
FULL_TRIALS = 10


class DatasetSpec(BaseModel):
    """Per-scale RGG datasets built as Gaussian perturbations of grids."""
    scales: list[int] = Field(default_factory=lambda: list(DESK_SCALES), min_length=1, description="Target node counts n_k; each uses the nearest B*B grid")
    graphs_per_scale: int = Field(default=20, ge=1, description="Training graphs generated per scale")
    eval_graphs: int = Field(default=20, ge=0, description="Held-out evaluation graphs generated per scale")
    sigma: float = Field(default=0.3, ge=0, description="Perturbation std per coordinate (meters)")
    spacing: float = Field(default=1.0, gt=0, description="Grid spacing a in meters (a = sqrt(rho))")
    radius: float = Field(default=1.2, gt=0, description="Connection radius r_c in meters")
    torus: bool = Field(default=False, description="Toroidal parent grids")

    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def _positive_scales(self):
        if any(s < 1 for s in self.scales):
            raise ValueError("scales must be positive node counts")
        return self


class ExperimentConfig(BaseModel):
    """Training scale, evaluation scales and evaluation protocol."""
    train_scale: int = Field(default=100, description="Scale (one of dataset.scales) the transferred model is trained at")
    eval_scales: Optional[list[int]] = Field(default=None, description="Scales evaluated; unset evaluates every dataset scale")
    trials: int = Field(default=3, ge=1, description="Bernoulli sampling repetitions per evaluation")
    in_distribution: bool = Field(default=True, description="Also train one model per evaluation scale")
    wmmse: bool = Field(default=True, description="Evaluate the WMMSE-sampled baseline")
    wmmse_iters: int = Field(default=50, ge=1, description="WMMSE iterations per channel")
    gap_tolerance: float = Field(default=0.15, ge=0, description="Relative per-node sum-rate gap counted as on par")
    histogram_bins: int = Field(default=30, ge=1, description="Bins of the sum-rate histogram files")
    svg: bool = Field(default=False, description="Also write SVG plots")

    model_config = {"extra": "forbid"}


class BoundsSuiteConfig(BaseModel):
    """Randomized bound-verification suite."""
    instances: int = Field(default=100, ge=0, description="Random RGG-vs-grid filter and GNN instances")
    sides: list[int] = Field(default_factory=lambda: [8, 12, 16], description="Grid sides B drawn for random instances")
    sigma_max: float = Field(default=0.1, ge=0, description="Largest perturbation std, in units of the spacing")
    max_taps: int = Field(default=3, ge=0, description="Largest filter order K of random instances")
    spacing: float = Field(default=1.0, gt=0, description="Grid spacing a (meters)")
    radius: float = Field(default=1.2, gt=0, description="Connection radius r_c (meters)")
    trials: int = Field(default=20, ge=1, description="RGG draws per RGG-vs-grid instance")
    gnn_width: int = Field(default=2, ge=1, description="Feature count F of random multi-feature GNNs")
    gnn_depth: int = Field(default=2, ge=1, description="Layer count L of random multi-feature GNNs")
    prop1_instances: int = Field(default=10, ge=0, description="Random in-regime grid filter truncation instances")
    prop1_trials: int = Field(default=200, ge=1, description="Field draws per truncation instance")
    thm1_instances: int = Field(default=10, ge=0, description="Random grid-to-grid GNN loss instances")
    thm1_trials: int = Field(default=20, ge=1, description="Input draws per grid loss evaluation")
    loss_instances: int = Field(default=3, ge=0, description="RGG-vs-grid loss and cross-scale loss instances")
    cross_scale_sides: list[int] = Field(default_factory=lambda: [12, 20], min_length=2, max_length=2, description="Grid sides (B_n, B_m) of the cross-scale check")
    student_layers: int = Field(default=2, ge=1, description="Layers of the fitted student GNN")
    student_taps: int = Field(default=2, ge=0, description="Filter order K of the fitted student GNN")
    student_iters: int = Field(default=300, ge=1, description="Gradient steps when fitting the student")
    degenerate: bool = Field(default=True, description="Include the degenerate sanity instances")

    model_config = {"extra": "forbid"}

    @classmethod
    def empty(cls) -> "BoundsSuiteConfig":
        return cls(instances=0, prop1_instances=0, thm1_instances=0, loss_instances=0, degenerate=False)


class AlphaConfig(BaseModel):
    """Discrepancy decay-rate measurement."""
    sigma: float = Field(default=0.05, ge=0, description="Perturbation std (meters)")
    sides: list[int] = Field(default_factory=lambda: [8, 12, 16, 20], min_length=3, description="Grid sides B; at least three")
    seeds_per_size: int = Field(default=50, ge=1, description="RGG draws per size")
    spacing: float = Field(default=1.0, gt=0, description="Grid spacing a (meters)")
    radius: float = Field(default=1.2, gt=0, description="Connection radius r_c (meters)")

    model_config = {"extra": "forbid"}


class Config(BaseModel):
    """Top-level config file; every section is optional."""
    seed: int = Field(default=0, description="Master seed every other seed is derived from")
    dataset: DatasetSpec = Field(default_factory=DatasetSpec)
    channel: ChannelModel = Field(default_factory=ChannelModel)
    problem: AllocationProblem = Field(default_factory=AllocationProblem)
    gnn: GnnArchitecture = Field(default_factory=GnnArchitecture)
    experiment: ExperimentConfig = Field(default_factory=ExperimentConfig)
    bounds: BoundsSuiteConfig = Field(default_factory=BoundsSuiteConfig)
    alpha: AlphaConfig = Field(default_factory=AlphaConfig)

    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def _train_scale_known(self):
        if self.experiment.train_scale not in self.dataset.scales:
            raise ValueError(f"experiment.train_scale {self.experiment.train_scale} not in dataset.scales {self.dataset.scales}")
        unknown = set(self.experiment.eval_scales or []) - set(self.dataset.scales)
        if unknown:
            raise ValueError(f"experiment.eval_scales {sorted(unknown)} not in dataset.scales")
        return self

    @property
    def eval_scales(self) -> list[int]:
        return list(self.experiment.eval_scales or self.dataset.scales)


class Settings(BaseSettings):
    """Environment: GNNTRANSFER_OUT and GNNTRANSFER_WORKERS."""
    out: Path = Path("output")
    workers: int = 1

    model_config = SettingsConfigDict(env_prefix="GNNTRANSFER_", env_file=".env", extra="ignore")


def load_config(path: Path) -> Config:
    """Parse and validate a YAML config; any failure becomes ConfigError."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping of sections")
    try:
        return Config.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}:\n{e}") from e


def full_scale(config: Config) -> Config:
    """Swap the desk dataset for the full-size one (n_k = 500 + 100k, 100 graphs, 10 trials)."""
    dataset = config.dataset.model_copy(update={"scales": list(FULL_SCALES), "graphs_per_scale": FULL_GRAPHS, "eval_graphs": FULL_GRAPHS})
    experiment = config.experiment.model_copy(update={"train_scale": FULL_SCALES[0], "eval_scales": None, "trials": FULL_TRIALS})
    return config.model_copy(update={"dataset": dataset, "experiment": experiment})


def config_reference() -> str:
    """Every config key with its description, one paragraph per section."""
    sections = {name: field.annotation for name, field in Config.model_fields.items() if name != "seed"}
    paragraphs = ["Config keys (YAML, one section per heading; unknown keys are rejected):"]
    paragraphs.append(f"seed: {Config.model_fields['seed'].description}")
    for name, model in sections.items():
        keys = [f"{name}.{key}: {field.description}" for key, field in model.model_fields.items()]
        paragraphs.append("\n".join(keys))
    return "\n\n".join(paragraphs)
