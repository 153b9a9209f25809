# GNN parameter containers and architecture config

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np
from pydantic import BaseModel, Field, field_validator
from scipy.special import expit

from ..errors import DimensionError


# ============== CONFIGURATION ==============
DEFAULT_LAYERS = 3
DEFAULT_TAPS = 4  # K; filters carry K+1 coefficients h_0..h_K
DEFAULT_INIT_SCALE = 0.1
DEFAULT_LEAKY_SLOPE = 0.1


class NonlinearityKind(str, Enum):
    RELU = "relu"
    LEAKY_RELU = "leaky_relu"
    ABS = "abs"


class OutputSquash(str, Enum):
    SIGMOID = "sigmoid"
    NONE = "none"


@dataclass(frozen=True)
class Nonlinearity:
    """Pointwise normalized-Lipschitz activation with sigma(0) = 0."""
    kind: NonlinearityKind = NonlinearityKind.RELU
    slope: float = DEFAULT_LEAKY_SLOPE

    def __post_init__(self):
        if self.kind is NonlinearityKind.LEAKY_RELU and abs(self.slope) > 1:
            raise ValueError(f"leaky slope {self.slope} is not 1-Lipschitz")

    def __call__(self, z: np.ndarray) -> np.ndarray:
        if self.kind is NonlinearityKind.RELU:
            return np.maximum(z, 0.0)
        if self.kind is NonlinearityKind.LEAKY_RELU:
            return np.where(z > 0, z, self.slope * z)
        return np.abs(z)

    def derivative(self, z: np.ndarray) -> np.ndarray:
        # Subgradient 0 at the kink
        if self.kind is NonlinearityKind.RELU:
            return (z > 0).astype(float)
        if self.kind is NonlinearityKind.LEAKY_RELU:
            return np.where(z > 0, 1.0, np.where(z < 0, self.slope, 0.0))
        return np.sign(z)


@dataclass(frozen=True, eq=False)
class FilterTaps:
    """Coefficients h_0..h_K of one polynomial graph filter."""
    h: np.ndarray

    def __post_init__(self):
        h = np.atleast_1d(np.asarray(self.h, dtype=float))
        if h.ndim != 1 or h.size == 0:
            raise DimensionError(f"filter taps must be a nonempty vector, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ValueError("filter taps must be finite")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def order(self) -> int:
        """K, the highest power of S."""
        return self.h.size - 1


TapsLike = Union[FilterTaps, np.ndarray, list, tuple]


def as_taps(taps: TapsLike) -> FilterTaps:
    return taps if isinstance(taps, FilterTaps) else FilterTaps(np.asarray(taps, dtype=float))


@dataclass(frozen=True, eq=False)
class GnnParams:
    """
    Single-feature GNN: one filter per layer, taps[l, k] = h_{lk}.

    The number of parameters depends only on (L, K), never on the graph.
    """
    taps: np.ndarray
    nonlinearity: Nonlinearity = field(default_factory=Nonlinearity)
    output_squash: OutputSquash = OutputSquash.SIGMOID

    def __post_init__(self):
        taps = np.array(self.taps, dtype=float, ndmin=2)
        if taps.ndim != 2:
            raise DimensionError(f"taps must be (layers, K+1), got shape {taps.shape}")
        if not np.all(np.isfinite(taps)):
            raise ValueError("GNN taps must be finite")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @property
    def n_layers(self) -> int:
        return self.taps.shape[0]

    @property
    def order(self) -> int:
        return self.taps.shape[1] - 1

    @property
    def layers(self) -> list[FilterTaps]:
        return [FilterTaps(row) for row in self.taps]

    def with_taps(self, taps: np.ndarray) -> "GnnParams":
        return GnnParams(taps=taps, nonlinearity=self.nonlinearity, output_squash=self.output_squash)

    def squash(self, z: np.ndarray) -> np.ndarray:
        return expit(z) if self.output_squash is OutputSquash.SIGMOID else self.nonlinearity(z)


class GnnArchitecture(BaseModel):
    """Architecture of the single-feature policy GNN."""
    layers: int = Field(default=DEFAULT_LAYERS, ge=1, description="Number of GNN layers L")
    taps: int = Field(default=DEFAULT_TAPS, ge=0, description="Filter order K (K+1 coefficients per layer)")
    nonlinearity: NonlinearityKind = Field(default=NonlinearityKind.RELU, description="Pointwise activation: relu, leaky_relu or abs")
    leaky_slope: float = Field(default=DEFAULT_LEAKY_SLOPE, description="Negative-side slope of leaky_relu (|slope| <= 1)")
    output_squash: OutputSquash = Field(default=OutputSquash.SIGMOID, description="Final-layer squash: sigmoid (probabilities) or none")
    init_scale: float = Field(default=DEFAULT_INIT_SCALE, gt=0, description="Std of the Gaussian tap initialization")

    model_config = {"extra": "forbid"}

    @field_validator("leaky_slope")
    @classmethod
    def _slope_is_contractive(cls, v: float) -> float:
        if abs(v) > 1:
            raise ValueError("leaky_slope must satisfy |slope| <= 1")
        return v

    def init_params(self, seed: int) -> GnnParams:
        """Gaussian taps; h_{l0} starts at 1 so the untrained network passes its input through."""
        rng = np.random.default_rng(seed)
        taps = rng.normal(0.0, self.init_scale, size=(self.layers, self.taps + 1))
        taps[:, 0] += 1.0
        return GnnParams(
            taps=taps,
            nonlinearity=Nonlinearity(self.nonlinearity, self.leaky_slope),
            output_squash=self.output_squash,
        )
