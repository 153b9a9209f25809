# Policy module - primal-dual Bernoulli policy learning, WMMSE baseline, evaluation

from .schemas import (
    AllocationProblem,
    PolicySample,
    DualState,
    StepDiagnostics,
    TrainingTrace,
    TRACE_COLUMNS,
)
from .primal_dual import (
    sample_policy,
    lagrangian,
    score_gradient,
    baseline_weights,
    reinforce_gradient,
    reinforce_step,
    train,
    expected_lagrangian,
    enumerate_lagrangian_gradient,
    expected_score_estimate,
)
from .wmmse import WmmseResult, wmmse_solve, wmmse_policy
from .evaluation import (
    Policy,
    GnnPolicy,
    WmmsePolicy,
    FixedPolicy,
    MetricsRecord,
    evaluate_policy,
    METRICS_COLUMNS,
)
