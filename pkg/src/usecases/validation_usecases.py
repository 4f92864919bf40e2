from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from sklearn.model_selection import KFold, StratifiedKFold

from ..adapters.seed_adapter import derive_seed
from ..interfaces.classifier_params import BoostParams, ClassifierName, ForestParams, LinearParams
from ..interfaces.confusion_matrix import ConfusionMatrix
from ..interfaces.cv_report import CvReport
from ..interfaces.fuzzy_params import FuzzyParams
from ..interfaces.labeled_corpus import LabeledCorpus
from ..interfaces.reduced_matrix import ReducedMatrix
from ..interfaces.reducer_spec import ReducerSpec
from ..interfaces.sparse_doc_matrix import SparseDocMatrix
from ..interfaces.tokenizer_config import TokenizerConfig
from ..utils.error_handler import InvalidParams, TooFewPerClass, raise_domain_error
from ..utils.logger import get_logger
from . import fuzzy_usecases
from .classifier_usecases import accuracy, evaluate, train_adaboost, train_linear, train_random_forest
from .corpus_usecases import CorpusUseCases
from .linear_usecases import PcaModel, SvdModel, pca_reduce, svd_reduce

logger = get_logger(__name__)

TRAINERS: Dict[str, Callable] = {
    "forest": train_random_forest,
    "adaboost": train_adaboost,
    "linear": train_linear,
}

DEFAULT_PARAMS = {
    "forest": ForestParams,
    "adaboost": BoostParams,
    "linear": LinearParams,
}


def stratified_kfold(labels, folds: int, seed: int) -> np.ndarray:
    """Fold id per instance.

    Per-fold class counts differ by at most one. folds == n gives
    leave-one-out in a seeded order.
    """
    y = np.asarray(labels, dtype=np.int64).ravel()
    n = y.size
    if folds < 2 or folds > n:
        raise_domain_error(InvalidParams, f"folds={folds} must lie in [2, {n}]")

    if folds == n:
        splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    else:
        classes, counts = np.unique(y, return_counts=True)
        if counts.min() < folds:
            sparse_class = int(classes[np.argmin(counts)])
            raise_domain_error(
                TooFewPerClass,
                f"Class {sparse_class} has {int(counts.min())} members, fewer than folds={folds}",
            )
        splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)

    assignment = np.empty(n, dtype=np.int64)
    for fold, (_, test) in enumerate(splitter.split(np.zeros((n, 1)), y)):
        assignment[test] = fold
    return assignment


def fold_splits(assignment: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
    """(train rows, test rows) per fold, in fold order."""
    return [
        (np.flatnonzero(assignment != fold), np.flatnonzero(assignment == fold))
        for fold in range(int(assignment.max()) + 1)
    ]


@dataclass(frozen=True)
class FittedReducer:
    train_features: ReducedMatrix
    transform: Callable[[SparseDocMatrix], ReducedMatrix]
    fingerprint: str


def fit_reducer(X_train: SparseDocMatrix, spec: ReducerSpec, seed: int) -> FittedReducer:
    """Fits the reduction on training rows only; `transform` is the frozen projection."""
    if spec.method == "FC":
        params = FuzzyParams(
            k=spec.k,
            q=spec.q,
            max_iterations=spec.max_iterations,
            epsilon=spec.epsilon,
            seed=seed,
            n_restarts=spec.n_restarts,
        )
        model, U = fuzzy_usecases.fit(X_train, params)
        return FittedReducer(
            train_features=ReducedMatrix(U.values, method="FC"),
            transform=lambda X: fuzzy_usecases.reduce(X, model),
            fingerprint=model.fingerprint(),
        )
    if spec.method == "SVD":
        reduced, factors = svd_reduce(X_train, spec.k, seed, spec.normalize_rows)
        model = SvdModel(factors, spec.normalize_rows)
    else:
        reduced, factors = pca_reduce(X_train, spec.k, seed, spec.normalize_rows)
        model = PcaModel(factors, spec.normalize_rows)
    return FittedReducer(train_features=reduced, transform=model.transform, fingerprint=model.fingerprint())


def _classifier_params(name: str, params: Optional[Mapping], seed: int):
    chosen = (params or {}).get(name) or DEFAULT_PARAMS[name]()
    if "seed" in type(chosen).model_fields:
        chosen = chosen.model_copy(update={"seed": seed})
    return chosen


def _run_fold(
    X_raw: SparseDocMatrix,
    y: np.ndarray,
    train: np.ndarray,
    test: np.ndarray,
    fold: int,
    reducer: ReducerSpec,
    classifiers: Sequence[str],
    params: Optional[Mapping],
    seed: int,
):
    dr = fit_reducer(X_raw.take_rows(train), reducer, derive_seed(seed, "dr", reducer.variant, reducer.k, fold))
    test_features = dr.transform(X_raw.take_rows(test))

    outcome = {}
    for name in classifiers:
        clf_seed = derive_seed(seed, "clf", name, reducer.variant, reducer.k, fold)
        model = TRAINERS[name](dr.train_features, y[train], _classifier_params(name, params, clf_seed))
        outcome[name] = (evaluate(model, test_features, y[test]), model.fingerprint())
    return dr.fingerprint, outcome


def cross_validate_many(
    X_raw: SparseDocMatrix,
    y,
    reducer: ReducerSpec,
    classifiers: Sequence[ClassifierName],
    params: Optional[Mapping[str, object]] = None,
    folds: int = 5,
    seed: int = 0,
    dataset: str = "corpus",
    n_jobs: int = 1,
) -> Dict[str, CvReport]:
    """k-fold CV where each fold fits the reduction once and evaluates every classifier on it."""
    y = np.asarray(y, dtype=np.int64).ravel()
    if y.size != X_raw.n_rows:
        raise_domain_error(InvalidParams, f"{y.size} labels for {X_raw.n_rows} documents")
    unknown = [name for name in classifiers if name not in TRAINERS]
    if unknown or not classifiers:
        raise_domain_error(InvalidParams, f"Unknown classifiers: {unknown}")

    splits = fold_splits(stratified_kfold(y, folds, seed))
    tasks = [
        (X_raw, y, train, test, fold, reducer, classifiers, params, seed)
        for fold, (train, test) in enumerate(splits)
    ]
    if n_jobs == 1:
        results = [_run_fold(*task) for task in tasks]
    else:
        results = Parallel(n_jobs=n_jobs)(delayed(_run_fold)(*task) for task in tasks)

    dr_fingerprints = tuple(fp for fp, _ in results)
    reports: Dict[str, CvReport] = {}
    for name in classifiers:
        confusions: Tuple[ConfusionMatrix, ...] = tuple(outcome[name][0] for _, outcome in results)
        reports[name] = CvReport(
            confusions=confusions,
            fold_accuracies=tuple(accuracy(cm) for cm in confusions),
            classifier=name,
            method=reducer.method,
            k=reducer.k,
            fuzzifier=reducer.q,
            seed=seed,
            dataset=dataset,
            dr_fingerprints=dr_fingerprints,
            classifier_fingerprints=tuple(outcome[name][1] for _, outcome in results),
        )
        logger.info(
            f"{dataset} {reducer.variant} k={reducer.k} {name}: "
            f"mean accuracy {reports[name].mean_accuracy:.5f} over {len(splits)} folds"
        )
    return reports


def cross_validate(
    X_raw: SparseDocMatrix,
    y,
    reducer: ReducerSpec,
    classifier: ClassifierName,
    params=None,
    folds: int = 5,
    seed: int = 0,
    dataset: str = "corpus",
    n_jobs: int = 1,
) -> CvReport:
    """Single-classifier cross-validation; `params` is that classifier's parameter object."""
    by_name = {classifier: params} if params is not None else None
    return cross_validate_many(X_raw, y, reducer, [classifier], by_name, folds, seed, dataset, n_jobs)[classifier]


class EvaluationUseCases:
    def __init__(self, corpus_usecases: CorpusUseCases = None):
        self.corpus_usecases = corpus_usecases or CorpusUseCases()

    def evaluate(
        self,
        X_raw: SparseDocMatrix,
        y,
        reducer: ReducerSpec,
        classifiers: Sequence[ClassifierName],
        params: Optional[Mapping[str, object]] = None,
        folds: int = 5,
        seed: int = 0,
        dataset: str = "corpus",
        n_jobs: int = 1,
    ) -> Dict[str, CvReport]:
        return cross_validate_many(X_raw, y, reducer, classifiers, params, folds, seed, dataset, n_jobs)

    def evaluate_corpus(
        self,
        corpus: LabeledCorpus,
        tokenizer: TokenizerConfig,
        reducer: ReducerSpec,
        classifiers: Sequence[ClassifierName],
        folds: int = 5,
        seed: int = 0,
        dataset: str = "corpus",
    ) -> Dict[str, CvReport]:
        """Vocabulary and counts come from the whole corpus; reductions are fitted per fold."""
        _, X = self.corpus_usecases.matrix(corpus, tokenizer)
        return self.evaluate(X, corpus.label_array(), reducer, classifiers, folds=folds, seed=seed, dataset=dataset)
