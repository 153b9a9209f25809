# GNN power allocation on random geometric graphs and transferability bound checks

# Geometry - grids, RGGs, discrepancy
from .geometry import (
    GridSpec,
    GeometricGraph,
    Discrepancy,
    make_grid,
    perturb_to_rgg,
    uniform_rgg,
    drop_isolated,
    discrepancy,
    mask_matrix,
    mask_l1_norm,
)

# GNN - filters and networks
from .gnn import (
    FilterTaps,
    GnnParams,
    GnnArchitecture,
    MultiFeatureGnn,
    filter_apply,
    grid_filter_apply,
    gnn_forward,
    gnn_backward,
)

# Spectral - responses and integral-Lipschitz constants
from .spectral import decompose, frequency_response, integral_lipschitz_constant

# Channel and policy - power allocation
from .channel import ChannelModel, ChannelRealization, draw_channel, rates
from .policy import (
    AllocationProblem,
    GnnPolicy,
    WmmsePolicy,
    MetricsRecord,
    train,
    wmmse_solve,
    evaluate_policy,
)

# Bounds - constants and numerical checks
from .bounds import (
    BoundName,
    BoundReport,
    verify_prop1,
    verify_thm1,
    verify_filter_rgg_dgg,
    verify_gnn_rgg_dgg,
    verify_thm2,
    verify_thm3,
    estimate_alpha,
)

# IO - Results and visualization
from .io import save_metrics, save_bound_reports, save_checkpoint, load_checkpoint

# Tracking
from .tracking import Tracker

# Analysis
from .analysis import analyze_transfer, summarize_bounds

# Harness - config and experiment drivers
from .harness import (
    Config,
    load_config,
    generate_dataset,
    run_training,
    run_evaluation,
    run_transfer_experiment,
    run_bounds_suite,
    run_alpha,
)
