from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from .cv_report import CSV_COLUMNS

TABLE_COLUMNS = CSV_COLUMNS + ["variant", "wall_time"]
AVERAGED_COLUMNS = ["dataset", "variant", "k", "mean_accuracy", "classifiers"]


def variant_of(method: str, fuzzifier: str) -> str:
    return f"FC-{fuzzifier}" if method == "FC" else method


@dataclass(frozen=True)
class ResultsTable:
    """Per-classifier sweep rows plus the wall time of the cell that produced them.

    `frame` holds one row per (dataset, variant, k, classifier); numeric columns
    are parsed, failed cells keep NaN accuracies and status "failed".
    """

    frame: pd.DataFrame

    @classmethod
    def from_rows(cls, rows: pd.DataFrame, timings: pd.DataFrame = None) -> "ResultsTable":
        frame = rows.copy()
        frame["k"] = frame["k"].astype(int)
        frame["seed"] = frame["seed"].astype(int)
        for column in ("mean_accuracy", "std_accuracy"):
            frame[column] = pd.to_numeric(frame[column], errors="coerce")
        frame["variant"] = [variant_of(m, f) for m, f in zip(frame["method"], frame["fuzzifier"])]
        frame["wall_time"] = np.nan
        if timings is not None and not timings.empty:
            seconds = timings.drop_duplicates(["dataset", "variant", "k"], keep="last").set_index(
                ["dataset", "variant", "k"]
            )["seconds"]
            keys = list(zip(frame["dataset"], frame["variant"], frame["k"]))
            frame["wall_time"] = [float(seconds.get(key, np.nan)) for key in keys]
        return cls(frame[TABLE_COLUMNS].reset_index(drop=True))

    @classmethod
    def from_series(cls, dataset: str, series: Dict[str, Sequence[Tuple[int, float]]]) -> "ResultsTable":
        """Table with one pseudo-classifier row per point of each averaged series."""
        rows = []
        for variant, points in series.items():
            method, _, fuzzifier = variant.partition("-")
            for k, value in points:
                rows.append(
                    [dataset, method, str(k), fuzzifier or "NA", "reference", repr(float(value)),
                     repr(float(value)), "0.0", "0", "ok"]
                )
        return cls.from_rows(pd.DataFrame(rows, columns=CSV_COLUMNS))

    @property
    def ok(self) -> pd.DataFrame:
        return self.frame[self.frame["status"] == "ok"]

    def is_empty(self) -> bool:
        return self.ok.empty

    def variants(self) -> List[str]:
        return list(dict.fromkeys(self.frame["variant"]))

    def averaged(self) -> pd.DataFrame:
        """Classifier-averaged accuracy per (dataset, variant, k).

        A (variant, k) point appears only when every classifier that ran on it succeeded.
        """
        rows = []
        for (dataset, variant, k), group in self.frame.groupby(["dataset", "variant", "k"], sort=False):
            if (group["status"] != "ok").any():
                continue
            rows.append(
                {
                    "dataset": dataset,
                    "variant": variant,
                    "k": int(k),
                    "mean_accuracy": float(np.mean(group["mean_accuracy"].to_numpy())),
                    "classifiers": len(group),
                }
            )
        return pd.DataFrame(rows, columns=AVERAGED_COLUMNS)

    def series(self, variant: str, dataset: str = None) -> List[Tuple[int, float]]:
        averaged = self.averaged()
        selected = averaged[averaged["variant"] == variant]
        if dataset is not None:
            selected = selected[selected["dataset"] == dataset]
        selected = selected.sort_values("k", kind="stable")
        return [(int(k), float(a)) for k, a in zip(selected["k"], selected["mean_accuracy"])]
