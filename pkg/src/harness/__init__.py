# Harness module - config files, dataset generation, experiment drivers

from .config import (
    DESK_SCALES,
    FULL_SCALES,
    DatasetSpec,
    ExperimentConfig,
    BoundsSuiteConfig,
    AlphaConfig,
    Config,
    Settings,
    load_config,
    full_scale,
    config_reference,
)
from .dataset import DATASET_DIR, dataset_tracker, dataset_signature, dataset_is_current, generate_dataset, load_split
from .experiment import (
    TRANSFERRED_MODEL,
    IN_DISTRIBUTION_MODEL,
    WMMSE_MODEL,
    TransferResult,
    checkpoint_path,
    trace_path,
    run_training,
    run_evaluation,
    run_transfer_experiment,
    run_bounds_suite,
    run_alpha,
)
