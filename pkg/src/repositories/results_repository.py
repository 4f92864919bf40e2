import csv
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import pandas as pd

from ..interfaces.cv_report import CSV_COLUMNS, format_float
from ..utils.error_handler import ParseError, raise_domain_error
from ..utils.logger import get_logger

logger = get_logger(__name__)

TIMING_COLUMNS = ["dataset", "variant", "k", "seconds"]


class ResultsRepository:
    """Files of one sweep output directory.

    results.csv only holds deterministic fields; wall times live in
    timings.csv. Rows are appended by a single writer.
    """

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.results_path = self.out_dir / "results.csv"
        self.timings_path = self.out_dir / "timings.csv"
        self.averaged_path = self.out_dir / "averaged.csv"
        self.plot_dir = self.out_dir / "plot"

    def _append(self, path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]):
        path.parent.mkdir(parents=True, exist_ok=True)
        new_file = not path.exists() or path.stat().st_size == 0
        with open(path, "a", encoding="utf-8", newline="") as stream:
            writer = csv.writer(stream, lineterminator="\n")
            if new_file:
                writer.writerow(header)
            writer.writerows(rows)

    def load_rows(self) -> pd.DataFrame:
        if not self.results_path.exists():
            return pd.DataFrame(columns=CSV_COLUMNS, dtype=str)
        frame = pd.read_csv(self.results_path, dtype=str, keep_default_na=False)
        missing = [c for c in CSV_COLUMNS if c not in frame.columns]
        if missing:
            raise_domain_error(ParseError, f"{self.results_path}: missing columns {missing}", offset=0)
        return frame[CSV_COLUMNS]

    def append_rows(self, rows: List[List[str]]):
        self._append(self.results_path, CSV_COLUMNS, rows)

    def rewrite_rows(self, frame: pd.DataFrame):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        frame[CSV_COLUMNS].to_csv(self.results_path, index=False, lineterminator="\n")
        logger.info(f"Wrote {len(frame)} result rows to {self.results_path}")

    def append_timing(self, dataset: str, variant: str, k: int, seconds: float):
        self._append(self.timings_path, TIMING_COLUMNS, [[dataset, variant, str(k), format_float(seconds)]])

    def load_timings(self) -> pd.DataFrame:
        if not self.timings_path.exists():
            return pd.DataFrame(columns=TIMING_COLUMNS)
        frame = pd.read_csv(self.timings_path, dtype={"dataset": str, "variant": str})
        frame["k"] = frame["k"].astype(int)
        return frame

    def write_averaged(self, averaged: pd.DataFrame) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        frame = averaged.copy()
        frame["mean_accuracy"] = [format_float(v) for v in frame["mean_accuracy"]]
        frame.to_csv(self.averaged_path, index=False, lineterminator="\n")
        return self.averaged_path


def write_series(path, points: Sequence[Tuple[int, float]]) -> Path:
    """Whitespace-delimited `k accuracy` lines, one per point."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as stream:
        for k, value in points:
            stream.write(f"{int(k)} {format_float(value)}\n")
    return path


def read_series(path) -> List[Tuple[int, float]]:
    points = []
    with open(path, "r", encoding="ascii") as stream:
        for number, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            fields = line.split()
            try:
                points.append((int(fields[0]), float(fields[1])))
            except (ValueError, IndexError):
                raise_domain_error(ParseError, f"{path}:{number}: expected `k accuracy`", offset=number)
    return points
