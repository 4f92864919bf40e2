from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .confusion_matrix import ConfusionMatrix

CSV_COLUMNS = [
    "dataset",
    "method",
    "k",
    "fuzzifier",
    "classifier",
    "fold_accuracies",
    "mean_accuracy",
    "std_accuracy",
    "seed",
    "status",
]


def format_float(value: float) -> str:
    return repr(float(value))


@dataclass(frozen=True)
class CvReport:
    confusions: Tuple[ConfusionMatrix, ...]
    fold_accuracies: Tuple[float, ...]
    classifier: str
    method: str
    k: int
    fuzzifier: Optional[float] = None
    seed: int = 0
    dataset: str = "corpus"
    dr_fingerprints: Tuple[str, ...] = field(default=(), compare=False)
    classifier_fingerprints: Tuple[str, ...] = field(default=(), compare=False)

    @property
    def folds(self) -> int:
        return len(self.fold_accuracies)

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracies))

    @property
    def std_accuracy(self) -> float:
        return float(np.std(self.fold_accuracies))

    @property
    def variant(self) -> str:
        if self.method == "FC":
            return f"FC-{self.fuzzifier:g}"
        return self.method

    def to_csv_row(self) -> List[str]:
        return [
            self.dataset,
            self.method,
            str(self.k),
            "NA" if self.fuzzifier is None else f"{self.fuzzifier:g}",
            self.classifier,
            ";".join(format_float(a) for a in self.fold_accuracies),
            format_float(self.mean_accuracy),
            format_float(self.std_accuracy),
            str(self.seed),
            "ok",
        ]
