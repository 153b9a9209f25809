# GNN module - polynomial graph filters, GNN forward/backward, grid convolution path

from .schemas import (
    FilterTaps,
    GnnParams,
    GnnArchitecture,
    Nonlinearity,
    NonlinearityKind,
    OutputSquash,
    TapsLike,
    as_taps,
)
from .filters import (
    filter_apply,
    filter_apply_transpose,
    shifted_signals,
    grid_filter_apply,
    plane_filter_apply,
    reshape_signal,
    field_to_signal,
    side_of,
)
from .network import (
    GnnTape,
    gnn_forward,
    gnn_backward,
    MultiFeatureGnn,
    mse_loss,
    fit_supervised,
)
