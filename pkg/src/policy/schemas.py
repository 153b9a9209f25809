# Allocation problem config and policy-learning records

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from ..errors import InvalidPower

# ============== CONFIGURATION ==============
DEFAULT_P0 = 1.0
DEFAULT_BUDGET_RATIO = 0.3  # Pmax = ratio * n * p0
DEFAULT_PRIMAL_STEP = 1e-2
DEFAULT_DUAL_STEP = 1e-3
DEFAULT_BATCH = 8
DEFAULT_ITERS = 500
DEFAULT_GRAD_CLIP = 1.0

TRACE_COLUMNS = ["iter", "mean_sum_rate", "mean_violation", "lambda", "grad_norm"]


class AllocationProblem(BaseModel):
    """Binary power allocation under an expected total-power budget."""
    p0: float = Field(default=DEFAULT_P0, gt=0, description="On-power level p0 of an active transmitter")
    budget_ratio: float = Field(default=DEFAULT_BUDGET_RATIO, gt=0, le=1, description="Pmax = budget_ratio * n * p0 when pmax is unset")
    pmax: Optional[float] = Field(default=None, gt=0, description="Absolute power budget Pmax; overrides budget_ratio")
    primal_step: float = Field(default=DEFAULT_PRIMAL_STEP, ge=0, description="Primal step mu_H on the GNN taps")
    dual_step: float = Field(default=DEFAULT_DUAL_STEP, ge=0, description="Dual step mu_lambda on the multiplier")
    batch: int = Field(default=DEFAULT_BATCH, ge=1, description="Channel draws per primal-dual update")
    iters: int = Field(default=DEFAULT_ITERS, ge=0, description="Number of primal-dual updates")
    grad_clip: float = Field(default=DEFAULT_GRAD_CLIP, gt=0, description="Max Euclidean norm of the primal gradient")
    dual_init: float = Field(default=0.0, ge=0, description="Initial multiplier lambda")

    model_config = {"extra": "forbid"}

    def budget(self, n: int) -> float:
        """Pmax for an n-node network; must lie in (0, n * p0]."""
        pmax = self.pmax if self.pmax is not None else self.budget_ratio * n * self.p0
        if not 0 < pmax <= n * self.p0:
            raise InvalidPower(f"Pmax={pmax} outside (0, {n * self.p0}] for n={n}")
        return pmax


@dataclass(frozen=True, eq=False)
class PolicySample:
    probs: np.ndarray
    allocation: np.ndarray
    rates: np.ndarray
    sum_rate: float
    total_power: float
    log_prob: float
    clamped: int = 0  # probabilities moved into [eps, 1 - eps]

    @property
    def bits(self) -> np.ndarray:
        return self.allocation > 0


@dataclass(frozen=True)
class DualState:
    lam: float = 0.0

    def ascend(self, mean_total_power: float, pmax: float, step: float) -> "DualState":
        """Projected ascent lambda <- max(0, lambda + step * (mean power - Pmax))."""
        return DualState(max(0.0, self.lam + step * (mean_total_power - pmax)))


@dataclass(frozen=True)
class StepDiagnostics:
    mean_sum_rate: float
    mean_violation: float  # per node, (1^T p - Pmax) / n
    lam: float
    grad_norm: float
    aborted: bool = False


@dataclass
class TrainingTrace:
    rows: list = field(default_factory=list)
    aborted_steps: int = 0

    def append(self, it: int, diag: StepDiagnostics):
        self.rows.append({
            "iter": it,
            "mean_sum_rate": diag.mean_sum_rate,
            "mean_violation": diag.mean_violation,
            "lambda": diag.lam,
            "grad_norm": diag.grad_norm,
        })
        self.aborted_steps += int(diag.aborted)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=TRACE_COLUMNS)

    def __len__(self) -> int:
        return len(self.rows)

    def __str__(self) -> str:
        if not self.rows:
            return "Training trace: empty"
        last = self.rows[-1]
        return (
            f"Training trace: {len(self.rows)} iterations, {self.aborted_steps} aborted\n"
            f"  final sum rate:  {last['mean_sum_rate']:.4f}\n"
            f"  final violation: {last['mean_violation']:+.4e}\n"
            f"  final lambda:    {last['lambda']:.4e}"
        )
