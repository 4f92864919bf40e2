import hashlib
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import minimize
from scipy.special import expit

from ..config.settings import settings
from ..interfaces.classifier_params import BoostParams, ForestParams, LinearParams
from ..interfaces.confusion_matrix import ConfusionMatrix
from ..interfaces.reduced_matrix import ReducedMatrix
from ..utils.error_handler import (
    DimensionMismatch,
    EmptyMatrix,
    NonConvergence,
    SingleClass,
    raise_domain_error,
)
from ..utils.logger import get_logger

logger = get_logger(__name__)

Features = Union[ReducedMatrix, np.ndarray]

ZERO_ERROR = 1e-10
ALPHA_CAP = 0.5 * np.log((1.0 - ZERO_ERROR) / ZERO_ERROR)


def _features(X: Features) -> np.ndarray:
    values = X.values if isinstance(X, ReducedMatrix) else X
    values = np.asarray(values, dtype=np.float64)
    return values.reshape(-1, 1) if values.ndim == 1 else values


def _labels(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.int64).ravel()
    if np.unique(y).size < 2:
        raise_domain_error(SingleClass, "Training labels hold a single class")
    return y


def _majority(y: np.ndarray) -> int:
    """Majority label; ties go to the negative class."""
    return 1 if 2 * int(y.sum()) > y.size else 0


def _fingerprint(*arrays) -> str:
    digest = hashlib.sha256()
    for array in arrays:
        digest.update(np.ascontiguousarray(array, dtype=np.float64).tobytes())
    return digest.hexdigest()


def _best_threshold(column: np.ndarray, y: np.ndarray):
    """Gini-optimal split of one feature: (weighted impurity, threshold) or None if constant."""
    order = np.argsort(column, kind="stable")
    xs, ys = column[order], y[order]
    n = xs.size
    distinct = xs[1:] > xs[:-1]
    if not distinct.any():
        return None

    left_n = np.arange(1, n, dtype=np.float64)
    right_n = n - left_n
    left_pos = np.cumsum(ys)[:-1].astype(np.float64)
    right_pos = ys.sum() - left_pos
    p_left = left_pos / left_n
    p_right = right_pos / right_n
    impurity = (left_n * 2 * p_left * (1 - p_left) + right_n * 2 * p_right * (1 - p_right)) / n
    impurity[~distinct] = np.inf

    i = int(np.argmin(impurity))
    threshold = 0.5 * (xs[i] + xs[i + 1])
    if threshold >= xs[i + 1]:
        threshold = xs[i]
    return float(impurity[i]), float(threshold)


@dataclass(frozen=True)
class DecisionTree:
    """CART tree in flat arrays; leaves have feature == -1."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @classmethod
    def grow(
        cls,
        X: np.ndarray,
        y: np.ndarray,
        rng: np.random.Generator,
        max_depth: Optional[int],
        max_features: int,
        min_samples_split: int,
    ) -> "DecisionTree":
        feature: List[int] = [-1]
        threshold: List[float] = [0.0]
        left: List[int] = [-1]
        right: List[int] = [-1]
        value: List[int] = [0]

        stack = [(0, np.arange(y.size), 0)]
        while stack:
            node, rows, depth = stack.pop()
            labels = y[rows]
            positives = int(labels.sum())
            value[node] = _majority(labels)
            if positives in (0, rows.size) or rows.size < min_samples_split:
                continue
            if max_depth is not None and depth >= max_depth:
                continue

            split = cls._best_split(X[rows], labels, rng, max_features)
            if split is None:
                continue
            f, thr = split
            goes_left = X[rows, f] <= thr

            for _ in range(2):
                feature.append(-1)
                threshold.append(0.0)
                left.append(-1)
                right.append(-1)
                value.append(0)
            left_id, right_id = len(value) - 2, len(value) - 1
            feature[node], threshold[node] = f, thr
            left[node], right[node] = left_id, right_id
            stack.append((right_id, rows[~goes_left], depth + 1))
            stack.append((left_id, rows[goes_left], depth + 1))

        return cls(
            feature=np.asarray(feature, dtype=np.int64),
            threshold=np.asarray(threshold, dtype=np.float64),
            left=np.asarray(left, dtype=np.int64),
            right=np.asarray(right, dtype=np.int64),
            value=np.asarray(value, dtype=np.int64),
        )

    @staticmethod
    def _best_split(X: np.ndarray, y: np.ndarray, rng: np.random.Generator, max_features: int):
        # constant features do not count toward max_features
        best = None
        tried = 0
        for f in rng.permutation(X.shape[1]):
            found = _best_threshold(X[:, f], y)
            if found is None:
                continue
            tried += 1
            if best is None or found[0] < best[0]:
                best = (found[0], int(f), found[1])
            if tried >= max_features:
                break
        return None if best is None else (best[1], best[2])

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            current = node[idx]
            goes_left = X[idx, self.feature[current]] <= self.threshold[current]
            node[idx] = np.where(goes_left, self.left[current], self.right[current])
            active = self.feature[node] >= 0
        return self.value[node]


class RandomForestClassifier:
    def __init__(self, params: ForestParams, n_jobs: int = None):
        self.params = params
        self.n_jobs = settings.N_JOBS if n_jobs is None else n_jobs
        self.trees: List[DecisionTree] = []
        self.n_features = 0

    def fit(self, X: Features, y) -> "RandomForestClassifier":
        X = _features(X)
        y = _labels(y)
        self.n_features = X.shape[1]
        max_features = self.params.max_features or max(1, int(np.sqrt(self.n_features)))
        max_features = min(max_features, self.n_features)
        seeds = np.random.SeedSequence(self.params.seed).spawn(self.params.n_trees)

        def grow(seed_seq):
            rng = np.random.default_rng(seed_seq)
            rows = rng.integers(0, y.size, size=y.size) if self.params.bootstrap else np.arange(y.size)
            return DecisionTree.grow(
                X[rows], y[rows], rng, self.params.max_depth, max_features, self.params.min_samples_split
            )

        if self.n_jobs == 1:
            self.trees = [grow(s) for s in seeds]
        else:
            self.trees = Parallel(n_jobs=self.n_jobs, prefer="threads")(delayed(grow)(s) for s in seeds)
        return self

    def predict(self, X: Features) -> np.ndarray:
        X = _features(X)
        votes = np.mean([tree.predict(X) for tree in self.trees], axis=0)
        return (votes > 0.5).astype(np.int64)

    def fingerprint(self) -> str:
        return _fingerprint(*[a for t in self.trees for a in (t.feature, t.threshold, t.value)])


@dataclass(frozen=True)
class Stump:
    """Predicts +polarity where x[feature] > threshold, -polarity elsewhere."""

    feature: int
    threshold: float
    polarity: int
    error: float

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.where(X[:, self.feature] > self.threshold, self.polarity, -self.polarity)


def best_stump(X: np.ndarray, y_pm: np.ndarray, w: np.ndarray) -> Stump:
    """Minimal weighted-error stump over every (feature, threshold, polarity).

    Ties go to the lower feature index, then the lower threshold, then +1.
    """
    X = _features(X)
    total = float(w.sum())
    best: Optional[Stump] = None
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs, ys, ws = X[order, f], y_pm[order], w[order]
        cum_pos = np.concatenate([[0.0], np.cumsum(np.where(ys > 0, ws, 0.0))])
        cum_neg = np.concatenate([[0.0], np.cumsum(np.where(ys < 0, ws, 0.0))])
        cuts = np.concatenate([[0], np.flatnonzero(xs[1:] > xs[:-1]) + 1])

        # polarity +1: items before the cut are predicted -1
        err_plus = cum_pos[cuts] + (cum_neg[-1] - cum_neg[cuts])
        err_minus = total - err_plus
        thresholds = np.empty(cuts.size)
        thresholds[0] = xs[0] - 1.0
        if cuts.size > 1:
            lo, hi = xs[cuts[1:] - 1], xs[cuts[1:]]
            mid = 0.5 * (lo + hi)
            thresholds[1:] = np.where(mid >= hi, lo, mid)

        errors = np.column_stack([err_plus, err_minus]).ravel()
        i = int(np.argmin(errors))
        if best is None or errors[i] < best.error:
            best = Stump(feature=f, threshold=float(thresholds[i // 2]), polarity=1 if i % 2 == 0 else -1, error=float(errors[i]))
    return best


def reweight(w: np.ndarray, y_pm: np.ndarray, predictions: np.ndarray, alpha: float) -> np.ndarray:
    w = w * np.exp(-alpha * y_pm * predictions)
    return w / w.sum()


class AdaBoostClassifier:
    """Discrete AdaBoost over depth-1 stumps."""

    def __init__(self, params: BoostParams):
        self.params = params
        self.stumps: List[Stump] = []
        self.alphas: List[float] = []
        self.fallback = 0
        self.n_features = 0

    def fit(self, X: Features, y) -> "AdaBoostClassifier":
        X = _features(X)
        y = _labels(y)
        self.n_features = X.shape[1]
        self.fallback = _majority(y)
        y_pm = 2 * y - 1
        w = np.full(y.size, 1.0 / y.size)

        for round_ in range(self.params.n_rounds):
            stump = best_stump(X, y_pm, w)
            if stump.error < ZERO_ERROR:
                self.stumps.append(stump)
                self.alphas.append(float(ALPHA_CAP))
                break
            if stump.error >= 0.5 - ZERO_ERROR:
                logger.debug(f"AdaBoost stopped at round {round_}: weighted error {stump.error:.4f}")
                break
            alpha = 0.5 * np.log((1.0 - stump.error) / stump.error)
            self.stumps.append(stump)
            self.alphas.append(float(alpha))
            w = reweight(w, y_pm, stump.predict(X), alpha)
        return self

    def decision_function(self, X: Features) -> np.ndarray:
        X = _features(X)
        score = np.zeros(X.shape[0])
        for stump, alpha in zip(self.stumps, self.alphas):
            score += alpha * stump.predict(X)
        return score

    def predict(self, X: Features) -> np.ndarray:
        if not self.stumps:
            return np.full(_features(X).shape[0], self.fallback, dtype=np.int64)
        return (self.decision_function(X) > 0).astype(np.int64)

    def fingerprint(self) -> str:
        rows = [(s.feature, s.threshold, s.polarity, a) for s, a in zip(self.stumps, self.alphas)]
        return _fingerprint(np.asarray(rows, dtype=np.float64))


def loss_and_gradient(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, penalty: float):
    """Mean logistic loss plus (penalty / 2) ||w||^2, and its gradient in (w, b)."""
    z = X @ w + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * penalty * (w @ w))
    residual = expit(z) - y
    grad_w = X.T @ residual / y.size + penalty * w
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


class LogisticClassifier:
    """L2-regularized logistic regression on standardized features."""

    def __init__(self, params: LinearParams):
        self.params = params
        self.weights = np.zeros(0)
        self.intercept = 0.0
        self.center = np.zeros(0)
        self.scale = np.ones(0)
        self.fallback = 0
        self.gradient_norm = 0.0
        self.n_features = 0

    def _standardize(self, X: np.ndarray) -> np.ndarray:
        return (X - self.center) / self.scale

    def fit(self, X: Features, y) -> "LogisticClassifier":
        X = _features(X)
        y = _labels(y)
        self.n_features = X.shape[1]
        self.fallback = _majority(y)
        if self.params.standardize:
            self.center = X.mean(axis=0)
            scale = X.std(axis=0)
            self.scale = np.where(scale > 0, scale, 1.0)
        else:
            self.center = np.zeros(X.shape[1])
            self.scale = np.ones(X.shape[1])
        Xs = self._standardize(X)
        yf = y.astype(np.float64)
        d = X.shape[1]
        self.weights, self.intercept = np.zeros(d), 0.0
        if self.params.max_iterations == 0:
            return self

        def fun(theta):
            loss, grad_w, grad_b = loss_and_gradient(theta[:d], theta[d], Xs, yf, self.params.penalty)
            return loss, np.append(grad_w, grad_b)

        result = minimize(
            fun,
            np.zeros(d + 1),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": self.params.max_iterations, "gtol": self.params.tolerance, "ftol": 0.0},
        )
        self.weights, self.intercept = result.x[:d], float(result.x[d])
        _, grad_w, grad_b = loss_and_gradient(self.weights, self.intercept, Xs, yf, self.params.penalty)
        self.gradient_norm = float(np.max(np.abs(np.append(grad_w, grad_b))))
        if self.gradient_norm > self.params.tolerance:
            if result.nit >= self.params.max_iterations:
                raise_domain_error(
                    NonConvergence,
                    f"Logistic fit hit {self.params.max_iterations} iterations with gradient norm {self.gradient_norm:.3g}",
                    gradient_norm=self.gradient_norm,
                )
            logger.warning(f"Logistic fit stopped at gradient norm {self.gradient_norm:.3g}: {result.message}")
        return self

    def decision_function(self, X: Features) -> np.ndarray:
        return self._standardize(_features(X)) @ self.weights + self.intercept

    def predict(self, X: Features) -> np.ndarray:
        z = self.decision_function(X)
        return np.where(z > 0, 1, np.where(z < 0, 0, self.fallback)).astype(np.int64)

    def fingerprint(self) -> str:
        return _fingerprint(self.weights, [self.intercept], self.center, self.scale)


def train_random_forest(X_train: Features, y, params: ForestParams = None) -> RandomForestClassifier:
    return RandomForestClassifier(params or ForestParams()).fit(X_train, y)


def train_adaboost(X_train: Features, y, params: BoostParams = None) -> AdaBoostClassifier:
    return AdaBoostClassifier(params or BoostParams()).fit(X_train, y)


def train_linear(X_train: Features, y, params: LinearParams = None) -> LogisticClassifier:
    return LogisticClassifier(params or LinearParams()).fit(X_train, y)


def evaluate(model, X_test: Features, y_test) -> ConfusionMatrix:
    X_test = _features(X_test)
    if X_test.shape[1] != model.n_features:
        raise_domain_error(
            DimensionMismatch,
            f"Test features have {X_test.shape[1]} columns, model trained on {model.n_features}",
        )
    return ConfusionMatrix.from_predictions(y_test, model.predict(X_test))


def accuracy(cm: ConfusionMatrix) -> float:
    """(TP + TN) / (TP + TN + FP + FN)."""
    if cm.total == 0:
        raise_domain_error(EmptyMatrix, "Accuracy of an empty confusion matrix is undefined")
    return cm.correct / cm.total
