from app.data.datasets import LabeledDataset, load_csv, make_blobs, save_csv
from app.data.splits import ForgetSplit, split_classwise, split_random

__all__ = [
    "LabeledDataset",
    "ForgetSplit",
    "make_blobs",
    "load_csv",
    "save_csv",
    "split_random",
    "split_classwise",
]
