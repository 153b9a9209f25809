# IO module - CSV results, JSON containers, plots

from .results import (
    SCHEMA_VERSION,
    HISTOGRAM_COLUMNS,
    TRANSFER_COLUMNS,
    save_metrics,
    save_bound_reports,
    save_trace,
    save_histogram,
    save_transfer_curve,
    read_csv_header,
)
from .serialization import (
    json_serial,
    save_json,
    load_json,
    graph_to_dict,
    graph_from_dict,
    save_graph,
    load_graph,
    params_to_dict,
    params_from_dict,
    save_checkpoint,
    load_checkpoint,
    channel_to_dict,
    channel_from_dict,
)
from .visualization import plot_sum_rate_histograms, plot_transfer_curve, plot_alpha_fit
