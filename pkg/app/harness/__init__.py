from app.harness.experiment import (
    ExperimentResult,
    SeedContext,
    derive_seed,
    load_config,
    resolve_unlearn_config,
    run_experiment,
)
from app.harness.sweep import run_sweep

__all__ = [
    "ExperimentResult",
    "SeedContext",
    "derive_seed",
    "load_config",
    "resolve_unlearn_config",
    "run_experiment",
    "run_sweep",
]
