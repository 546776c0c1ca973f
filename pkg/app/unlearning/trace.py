"""Per-epoch unlearning traces (unlearning curves, weight similarity to Retrain)."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import pandas as pd

logger = logging.getLogger(__name__)

TRACE_COLUMNS = [
    "epoch",
    "criterion_index",
    "retain_loss",
    "forget_loss",
    "corrections_fired",
    "cos_sim_to_reference",
]


@dataclass
class TraceRecord:
    """One completed epoch.

    ``angles`` holds the corrector angle of every batch (nan where the angle
    was undefined); it stays in memory and is not exported.
    """

    epoch: int
    criterion_index: int
    retain_loss: float
    forget_loss: float
    corrections_fired: int
    cos_sim_to_reference: float = math.nan
    angles: list[float] = field(default_factory=list)


@dataclass
class UnlearnTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def append(self, record: TraceRecord) -> None:
        self.records.append(record)

    @property
    def total_corrections(self) -> int:
        return sum(r.corrections_fired for r in self.records)

    def criterion_boundaries(self) -> list[int]:
        """Epoch numbers after which the criterion index changes."""
        return [
            prev.epoch
            for prev, cur in zip(self.records, self.records[1:])
            if cur.criterion_index != prev.criterion_index
        ]

    def final(self) -> Optional[TraceRecord]:
        return self.records[-1] if self.records else None

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "epoch": r.epoch,
                "criterion_index": r.criterion_index,
                "retain_loss": r.retain_loss,
                "forget_loss": r.forget_loss,
                "corrections_fired": r.corrections_fired,
                "cos_sim_to_reference": r.cos_sim_to_reference,
            }
            for r in self.records
        ]
        return pd.DataFrame(rows, columns=TRACE_COLUMNS)

    def write_csv(self, path: Union[str, Path]) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(target, index=False, float_format="%.17g", na_rep="")
        logger.info("Wrote %s", target)
        return target
