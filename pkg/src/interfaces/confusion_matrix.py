from dataclasses import dataclass

import numpy as np

from ..utils.error_handler import InvalidParams


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary confusion counts; rows are actual classes, columns predictions."""

    tn: int = 0
    fp: int = 0
    fn: int = 0
    tp: int = 0

    def __post_init__(self):
        if min(self.tn, self.fp, self.fn, self.tp) < 0:
            raise InvalidParams("Confusion counts must be non-negative")

    @classmethod
    def from_predictions(cls, actual, predicted) -> "ConfusionMatrix":
        actual = np.asarray(actual, dtype=np.int64)
        predicted = np.asarray(predicted, dtype=np.int64)
        return cls(
            tn=int(np.sum((actual == 0) & (predicted == 0))),
            fp=int(np.sum((actual == 0) & (predicted == 1))),
            fn=int(np.sum((actual == 1) & (predicted == 0))),
            tp=int(np.sum((actual == 1) & (predicted == 1))),
        )

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp

    @property
    def correct(self) -> int:
        return self.tp + self.tn
