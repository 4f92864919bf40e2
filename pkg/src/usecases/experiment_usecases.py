import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from joblib import Parallel, delayed
from pydantic import ValidationError
from scipy.stats import linregress
from tqdm import tqdm

from ..config.settings import settings
from ..config.reference_accuracy import REFERENCE_ACCURACY, REFERENCE_TOLERANCE
from ..interfaces.cv_report import format_float
from ..interfaces.experiment_config import DatasetSpec, ExperimentConfig
from ..interfaces.labeled_corpus import LabeledCorpus
from ..interfaces.reducer_spec import ReducerSpec
from ..interfaces.results_table import ResultsTable
from ..interfaces.sparse_doc_matrix import SparseDocMatrix
from ..interfaces.vocabulary import Vocabulary
from ..repositories.corpus_repository import read_stopwords
from ..repositories.results_repository import ResultsRepository, read_series, write_series
from ..repositories.synthetic_repository import synthetic_count_matrix
from ..utils.error_handler import (
    FuzzyDrError,
    InsufficientPoints,
    InvalidK,
    InvalidParams,
    raise_domain_error,
)
from ..utils.logger import get_logger
from . import fuzzy_usecases
from .corpus_usecases import CorpusUseCases, l2_normalize_rows
from .validation_usecases import cross_validate_many

logger = get_logger(__name__)

CELL_KEY = ["dataset", "method", "k", "fuzzifier", "classifier"]


def fuzzifier_label(spec: ReducerSpec) -> str:
    return f"{spec.q:g}" if spec.method == "FC" else "NA"


def sweep_reducers(cfg: ExperimentConfig) -> List[ReducerSpec]:
    """Sweep cells in canonical order: method, then fuzzifier, then dimension."""
    specs = []
    for method in cfg.methods:
        if method == "FC":
            for q in cfg.fuzzifiers:
                specs.extend(ReducerSpec(method="FC", k=k, q=q) for k in cfg.dims)
        else:
            specs.extend(
                ReducerSpec(method=method, k=k, normalize_rows=cfg.normalize_linear_rows) for k in cfg.dims
            )
    return specs


def _cell_key(dataset: str, spec: ReducerSpec, classifier: str) -> Tuple[str, ...]:
    return (dataset, spec.method, str(spec.k), fuzzifier_label(spec), classifier)


def _failed_row(dataset: str, spec: ReducerSpec, classifier: str, seed: int) -> List[str]:
    return list(_cell_key(dataset, spec, classifier)) + ["", "NA", "NA", str(seed), "failed"]


def _run_cell(
    X: SparseDocMatrix,
    y: np.ndarray,
    spec: ReducerSpec,
    classifiers: Tuple[str, ...],
    cfg: ExperimentConfig,
    dataset: str,
):
    params = {"forest": cfg.forest, "adaboost": cfg.boost, "linear": cfg.linear}
    start = time.perf_counter()
    try:
        reports = cross_validate_many(X, y, spec, classifiers, params, cfg.folds, cfg.seed, dataset)
    except (FuzzyDrError, ValueError, np.linalg.LinAlgError) as e:
        logger.error(f"Cell {spec.variant} k={spec.k} failed: {e}")
        return spec, [_failed_row(dataset, spec, name, cfg.seed) for name in classifiers], time.perf_counter() - start
    rows = [reports[name].to_csv_row() for name in classifiers]
    return spec, rows, time.perf_counter() - start


def _canonical(rows: pd.DataFrame, order: Sequence[Tuple[str, ...]]) -> pd.DataFrame:
    rank = {key: i for i, key in enumerate(order)}
    keys = [tuple(r) for r in rows[CELL_KEY].itertuples(index=False)]
    position = [rank.get(key, len(rank) + i) for i, key in enumerate(keys)]
    return rows.assign(_position=position).sort_values("_position", kind="stable").drop(columns="_position")


def run_experiment(cfg: ExperimentConfig, corpus_usecases: CorpusUseCases = None, progress: bool = True) -> ResultsTable:
    """Runs every (variant, k, classifier) cell not already in the output directory.

    A cell (variant, k) fits its reduction once per fold and evaluates all of
    its pending classifiers. results.csv is rewritten in canonical order at the
    end, so a resumed sweep produces the same file as an uninterrupted one.
    """
    repository = ResultsRepository(cfg.out_dir)
    corpus, _, X = (corpus_usecases or CorpusUseCases()).ingest(cfg.dataset, cfg.tokenizer, cfg.n_jobs)
    y = corpus.label_array()
    dataset = cfg.dataset.label

    limit = min(X.n_rows, X.n_cols)
    too_large = [k for k in cfg.dims if k > limit]
    if too_large:
        raise_domain_error(InvalidK, f"Dimensions {too_large} exceed min(n, m) = {limit}")

    reducers = sweep_reducers(cfg)
    order = [_cell_key(dataset, spec, name) for spec in reducers for name in cfg.classifiers]

    existing = repository.load_rows()
    done = {
        tuple(r) for r in existing[existing["status"] == "ok"][CELL_KEY].itertuples(index=False)
    }
    cells = []
    for spec in reducers:
        pending = tuple(name for name in cfg.classifiers if _cell_key(dataset, spec, name) not in done)
        if pending:
            cells.append((spec, pending))

    stale = {_cell_key(dataset, spec, name) for spec, pending in cells for name in pending}
    is_stale = [tuple(r) in stale for r in existing[CELL_KEY].itertuples(index=False)]
    if any(is_stale):
        repository.rewrite_rows(existing[~np.asarray(is_stale)])
    logger.info(f"{dataset}: {len(cells)} of {len(reducers)} sweep cells pending")

    if cfg.n_jobs == 1:
        outcomes = (_run_cell(X, y, spec, pending, cfg, dataset) for spec, pending in cells)
    else:
        outcomes = Parallel(n_jobs=cfg.n_jobs, return_as="generator")(
            delayed(_run_cell)(X, y, spec, pending, cfg, dataset) for spec, pending in cells
        )
    for spec, rows, seconds in tqdm(outcomes, total=len(cells), desc=dataset, disable=not progress):
        repository.append_rows(rows)
        repository.append_timing(dataset, spec.variant, spec.k, seconds)

    rows = _canonical(repository.load_rows(), order)
    repository.rewrite_rows(rows)
    table = ResultsTable.from_rows(rows, repository.load_timings())
    repository.write_averaged(table.averaged())
    if not table.is_empty():
        emit_plot_data(table, repository.plot_dir)
    compare_with_reference(table, reference_key(cfg.dataset), dataset)
    return table


def stability_summary(table: ResultsTable, dataset: str = None) -> Dict[str, float]:
    """Population std of the classifier-averaged accuracy across dimensions, per variant."""
    summary = {}
    for variant in table.variants():
        series = table.series(variant, dataset)
        if len(series) < 2:
            raise_domain_error(
                InsufficientPoints,
                f"{variant}: stability needs at least 2 dimensions, got {len(series)}",
            )
        summary[variant] = float(np.std([accuracy for _, accuracy in series]))
    return summary


def rank_by_stability(table: ResultsTable, dataset: str = None) -> List[Tuple[str, float]]:
    """Variants from most to least stable; ties by name."""
    summary = stability_summary(table, dataset)
    return sorted(summary.items(), key=lambda item: (item[1], item[0]))


@dataclass(frozen=True)
class BenchmarkReport:
    ns: Tuple[int, ...]
    seconds_per_iteration: Tuple[float, ...]
    slope: float
    intercept: float
    r_squared: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"n": self.ns, "seconds_per_iteration": self.seconds_per_iteration})

    def ratios(self) -> List[float]:
        times = self.seconds_per_iteration
        return [b / a for a, b in zip(times, times[1:])]


def _time_iterations(X: SparseDocMatrix, k: int, q: float, iterations: int, seed: int) -> float:
    Xn = l2_normalize_rows(X)
    V = fuzzy_usecases.initial_prototypes(Xn, k, np.random.default_rng(seed))
    U = fuzzy_usecases.update_memberships(Xn, V, q)
    start = time.perf_counter()
    for _ in range(iterations):
        V, _ = fuzzy_usecases.update_prototypes(Xn, U, q, previous=V)
        U = fuzzy_usecases.update_memberships(Xn, V, q)
    return (time.perf_counter() - start) / iterations


def scaling_benchmark(
    ns: Sequence[int],
    k: int,
    m: int,
    nnz_per_row: int,
    seed: int = 0,
    q: float = 1.5,
    iterations: int = 5,
    repeats: int = 3,
) -> BenchmarkReport:
    """Mean wall time of one membership + prototype pass at each corpus size.

    The best of `repeats` runs is kept per size; a least-squares line over
    (n, seconds) gives the R^2.
    """
    times = []
    for n in ns:
        X = synthetic_count_matrix(n, m, nnz_per_row, seed=seed + n)
        best = min(_time_iterations(X, k, q, iterations, seed) for _ in range(repeats))
        times.append(best)
        logger.info(f"n={n}: {best:.6f} s per iteration (k={k}, m={m}, nnz/row={nnz_per_row})")

    if len(ns) >= 2:
        fit = linregress(np.asarray(ns, dtype=np.float64), np.asarray(times))
        slope, intercept, r_squared = float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2)
    else:
        slope = intercept = r_squared = float("nan")
    return BenchmarkReport(tuple(int(n) for n in ns), tuple(times), slope, intercept, r_squared)


def emit_plot_data(table: ResultsTable, directory) -> Dict[Tuple[str, str], Path]:
    """One `k accuracy` series file per (dataset, variant) plus a combined plot_data.csv."""
    directory = Path(directory)
    averaged = table.averaged()
    if averaged.empty:
        logger.warning("No completed cells, nothing to plot")
        return {}

    written = {}
    for (dataset, variant), _ in averaged.groupby(["dataset", "variant"], sort=False):
        written[(dataset, variant)] = write_series(
            directory / f"{dataset}_{variant}.dat", table.series(variant, dataset)
        )
    combined = averaged.sort_values(["dataset", "variant", "k"], kind="stable")[["dataset", "variant", "k"]].copy()
    combined["accuracy"] = [format_float(v) for v in averaged.loc[combined.index, "mean_accuracy"]]
    combined.to_csv(directory / "plot_data.csv", index=False, lineterminator="\n")
    logger.info(f"Wrote {len(written)} plot series to {directory}")
    return written


def parse_plot_data(path) -> List[Tuple[int, float]]:
    return read_series(path)


def reference_key(spec: DatasetSpec) -> Optional[str]:
    source = {"reuters": "reuters", "dirs": "ohsumed"}.get(spec.loader)
    return f"{source}-{spec.positive.lower()}" if source else None


def compare_with_reference(table: ResultsTable, reference: Optional[str], dataset: str = None) -> pd.DataFrame:
    """Gap between measured and published averaged accuracy at each shared dimension. Logged, never gating."""
    columns = ["variant", "k", "measured", "reference", "gap"]
    if reference not in REFERENCE_ACCURACY:
        return pd.DataFrame(columns=columns)

    rows = []
    for variant, points in REFERENCE_ACCURACY[reference].items():
        measured = dict(table.series(variant, dataset))
        for k, expected in points:
            if k in measured:
                rows.append([variant, k, measured[k], expected, measured[k] - expected])
    comparison = pd.DataFrame(rows, columns=columns)

    first = comparison[(comparison["variant"] == "FC-1.5") & (comparison["k"] == 10)]
    if not first.empty:
        gap = float(first["gap"].iloc[0])
        within = abs(gap) <= REFERENCE_TOLERANCE[reference]
        logger.info(f"{reference} FC-1.5 k=10: gap {gap:+.5f} to reference ({'within' if within else 'outside'} tolerance)")
    for row in comparison.itertuples(index=False):
        logger.debug(f"{reference} {row.variant} k={row.k}: {row.measured:.5f} vs {row.reference:.5f}")
    return comparison


def _split(value) -> List[str]:
    return [part.strip() for part in str(value).split(",") if part.strip()]


def parse_dims(value) -> List[int]:
    """`10,20,30` or an inclusive range `start:stop:step`."""
    text = str(value).strip()
    try:
        if ":" in text:
            start, stop, *step = (int(v) for v in text.split(":"))
            return list(range(start, stop + 1, step[0] if step else 1))
        return [int(v) for v in _split(text)]
    except ValueError:
        raise_domain_error(InvalidParams, f"Cannot parse dimensions from {value!r}")


def parse_dataset(value: str) -> Dict[str, object]:
    """`loader[:path[,path...]]`, e.g. `reuters:data/reuters21578`."""
    loader, _, paths = str(value).partition(":")
    return {"loader": loader.strip(), "paths": _split(paths)}


_DATASET_KEYS = {
    "loader", "paths", "positive", "negative_label", "negative_sample", "name",
    "synthetic_n", "synthetic_positive_fraction", "synthetic_vocabulary",
    "synthetic_doc_length", "synthetic_shared_fraction", "synthetic_cross_fraction",
}
_TOKENIZER_KEYS = {"lowercase": "lowercase", "min_length": "min_length", "min_df": "min_df", "token_pattern": "token_pattern"}
_NESTED = {
    "trees": ("forest", "n_trees"),
    "max_depth": ("forest", "max_depth"),
    "max_features": ("forest", "max_features"),
    "rounds": ("boost", "n_rounds"),
    "penalty": ("linear", "penalty"),
    "linear_max_iterations": ("linear", "max_iterations"),
    "linear_tolerance": ("linear", "tolerance"),
}


def load_experiment_config(path=None, overrides: Mapping[str, object] = None) -> ExperimentConfig:
    """Flat key=value file plus overrides; overrides win. Unset overrides (None) are ignored."""
    values: Dict[str, object] = {}
    if path is not None:
        if not Path(path).is_file():
            raise_domain_error(InvalidParams, f"Config file {path} does not exist")
        values.update({key.lower(): v for key, v in dotenv_values(path).items() if v is not None})
    values.update({key: v for key, v in (overrides or {}).items() if v is not None})

    config: Dict[str, object] = {}
    dataset: Dict[str, object] = {}
    tokenizer: Dict[str, object] = {}
    nested: Dict[str, Dict[str, object]] = {"forest": {}, "boost": {}, "linear": {}}

    if "dataset" in values:
        dataset.update(parse_dataset(values.pop("dataset")))
    for key, value in values.items():
        if key in _DATASET_KEYS:
            dataset[key] = _split(value) if key == "paths" and isinstance(value, str) else value
        elif key in _TOKENIZER_KEYS:
            tokenizer[_TOKENIZER_KEYS[key]] = value
        elif key == "stopwords":
            tokenizer["stopwords"] = read_stopwords(value)
        elif key in _NESTED:
            group, field = _NESTED[key]
            nested[group][field] = value
        elif key == "dims":
            config["dims"] = parse_dims(value)
        elif key in ("methods", "classifiers"):
            config[key] = _split(value) if isinstance(value, str) else list(value)
        elif key in ("fuzzifier", "fuzzifiers"):
            config["fuzzifiers"] = [float(q) for q in (_split(value) if isinstance(value, str) else value)]
        elif key in ("out", "out_dir"):
            config["out_dir"] = str(value)
        elif key in ("folds", "seed", "n_jobs", "normalize_linear_rows"):
            config[key] = value
        else:
            logger.warning(f"Ignoring unknown config key {key!r}")

    if "seed" in config:
        dataset.setdefault("seed", config["seed"])
    if "stopwords" not in tokenizer and settings.STOPWORDS_FILE:
        tokenizer["stopwords"] = read_stopwords(settings.STOPWORDS_FILE)
    try:
        return ExperimentConfig(
            dataset=DatasetSpec(**dataset),
            **({"tokenizer": tokenizer} if tokenizer else {}),
            **{group: fields for group, fields in nested.items() if fields},
            **config,
        )
    except ValidationError as e:
        raise_domain_error(InvalidParams, f"Invalid experiment configuration: {e.errors()[0]['msg']}")


class ExperimentUseCases:
    def __init__(self, corpus_usecases: CorpusUseCases = None):
        self.corpus_usecases = corpus_usecases or CorpusUseCases()

    def ingest(self, cfg: ExperimentConfig) -> Tuple[LabeledCorpus, Vocabulary, SparseDocMatrix]:
        return self.corpus_usecases.ingest(cfg.dataset, cfg.tokenizer, cfg.n_jobs)

    def run(self, cfg: ExperimentConfig, progress: bool = True) -> ResultsTable:
        return run_experiment(cfg, self.corpus_usecases, progress)

    def stability_ranking(self, table: ResultsTable, dataset: str = None) -> List[Tuple[str, float]]:
        return rank_by_stability(table, dataset)

    def benchmark(
        self, ns: Sequence[int], k: int, m: int, nnz_per_row: int, seed: int = 0, iterations: int = 5
    ) -> BenchmarkReport:
        return scaling_benchmark(ns, k, m, nnz_per_row, seed=seed, iterations=iterations)
