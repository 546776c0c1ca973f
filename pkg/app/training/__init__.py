from app.training.checkpoint import load_checkpoint, save_checkpoint
from app.training.trainer import batch_order, iter_batches, retrain, sgd_epoch, train_erm

__all__ = [
    "batch_order",
    "iter_batches",
    "sgd_epoch",
    "train_erm",
    "retrain",
    "save_checkpoint",
    "load_checkpoint",
]
