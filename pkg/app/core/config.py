import math

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True)

    PROJECT_NAME: str = "Forgetting-Gradient Unlearning Toolkit"
    VERSION: str = "0.1.0"

    # Worker threads for independent (seed) runs inside one experiment
    UNLEARN_THREADS: int = 1


settings = Settings()


# ---------------------------------------------------------------------------
# Hyperparameter defaults
# ---------------------------------------------------------------------------
# Fine-tuning based unlearning uses lr 0.01 and 10 epochs; GA gets its own budget.

DEFAULT_UNLEARN_ETA = 0.01
DEFAULT_UNLEARN_EPOCHS = 10
DEFAULT_UNLEARN_BATCH_SIZE = 32
DEFAULT_GA_ETA = 0.01
DEFAULT_GA_EPOCHS = 5
DEFAULT_GAMMA = math.pi / 3
DEFAULT_N_CRITERIA = 3

# Original-model / Retrain training
DEFAULT_TRAIN_ETA = 0.05
DEFAULT_TRAIN_EPOCHS = 100
DEFAULT_TRAIN_BATCH_SIZE = 32

# Membership inference attack classifier
DEFAULT_MIA_EPOCHS = 30
DEFAULT_MIA_ETA = 0.1
DEFAULT_MIA_BATCH_SIZE = 64

DEFAULT_HISTOGRAM_BINS = 20

DEFAULT_GAMMA_GRID: tuple[float, ...] = (
    math.pi / 12,
    math.pi / 6,
    math.pi / 4,
    math.pi / 3,
    5 * math.pi / 12,
)


def default_cufg_epochs(n_criteria: int) -> int:
    """Default CUFG budget: the multiple of n closest to the unlearning default.

    Every criterion gets the same number of epochs, at least one.
    """
    per_criterion = max(1, math.floor(DEFAULT_UNLEARN_EPOCHS / n_criteria + 0.5))
    return per_criterion * n_criteria
