# Bounds module - transferability constants and numerical bound checks

from .constants import h_k_constant, c_m_constant, c_k_constant
from .verification import (
    BoundName,
    BoundReport,
    BOUNDS_COLUMNS,
    reference_targets,
    graph_loss,
    fit_student,
    verify_prop1,
    verify_thm1,
    verify_filter_rgg_dgg,
    verify_gnn_rgg_dgg,
    verify_thm2,
    verify_thm3,
)
from .alpha import AlphaFit, fit_alpha, estimate_alpha
