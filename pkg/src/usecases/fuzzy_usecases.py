from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..config.settings import settings
from ..interfaces.fuzzy_model import FuzzyModel
from ..interfaces.fuzzy_params import FuzzyParams
from ..interfaces.membership_matrix import MembershipMatrix
from ..interfaces.reduced_matrix import ReducedMatrix
from ..interfaces.sparse_doc_matrix import SparseDocMatrix
from ..interfaces.tokenizer_config import TokenizerConfig
from ..interfaces.vocabulary import Vocabulary
from ..utils.error_handler import (
    DimensionMismatch,
    IdenticalPrototypes,
    InvalidParams,
    TooFewDocuments,
    raise_domain_error,
)
from ..utils.logger import get_logger
from .corpus_usecases import CorpusUseCases, l2_normalize_rows

logger = get_logger(__name__)

SEPARATION_TOL = 1e-12


def cosine_dissimilarity(x, v) -> float:
    """1 - <x, v> for unit vectors; an empty x is at distance 1 from everything."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if isinstance(x, SparseDocMatrix):
        x = x.matrix
    if sp.issparse(x):
        if x.nnz == 0:
            return 1.0
        dot = float(np.asarray(x @ v).sum())
    else:
        x = np.asarray(x, dtype=np.float64).ravel()
        if not np.any(x):
            return 1.0
        dot = float(x @ v)
    return float(np.clip(1.0 - dot, 0.0, 2.0))


def dissimilarities(X: SparseDocMatrix, V: np.ndarray) -> np.ndarray:
    """n x k matrix of cosine dissimilarities between rows of X and prototypes."""
    V = np.asarray(V, dtype=np.float64)
    D = 1.0 - np.asarray(X.matrix @ V.T)
    D[X.row_nnz() == 0, :] = 1.0
    return np.clip(D, 0.0, 2.0)


def memberships_from_dissimilarities(D: np.ndarray, q: float, tol: float = None) -> np.ndarray:
    """Closed-form membership update for a fixed dissimilarity matrix.

    Rows with a dissimilarity at or below `tol` put all their mass, split
    evenly, on those clusters.
    """
    tol = settings.FUZZY_SINGULARITY_TOL if tol is None else tol
    U = np.empty_like(D, dtype=np.float64)
    singular = D <= tol
    singular_rows = singular.any(axis=1)
    if singular_rows.any():
        hits = singular[singular_rows].astype(np.float64)
        U[singular_rows] = hits / hits.sum(axis=1, keepdims=True)

    regular = ~singular_rows
    if regular.any():
        # mu_f = D_f^(-1/(q-1)) / sum_g D_g^(-1/(q-1)), evaluated in log space
        logits = -np.log(D[regular]) / (q - 1.0)
        logits -= logits.max(axis=1, keepdims=True)
        weights = np.exp(logits)
        U[regular] = weights / weights.sum(axis=1, keepdims=True)
    return U


def update_memberships(X: SparseDocMatrix, V: np.ndarray, q: float, tol: float = None) -> MembershipMatrix:
    D = dissimilarities(X, V)
    U = memberships_from_dissimilarities(D, q, tol)
    empty = X.row_nnz() == 0
    if empty.any():
        U[empty, :] = 1.0 / U.shape[1]
    return MembershipMatrix(U)


def update_prototypes(
    X: SparseDocMatrix,
    U: MembershipMatrix,
    q: float,
    previous: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, List[int]]:
    """Concept vectors v_f = normalize(sum_j mu_fj^q d_j).

    A cluster whose weighted sum vanishes is re-seeded on the document worst
    served by the current prototypes; its index is returned in the second
    element.
    """
    weights = np.asarray(U.values, dtype=np.float64) ** q
    sums = np.asarray(X.matrix.T @ weights).T
    norms = np.linalg.norm(sums, axis=1)
    degenerate = np.flatnonzero(norms <= np.finfo(np.float64).tiny)

    V = np.zeros_like(sums)
    healthy = norms > np.finfo(np.float64).tiny
    V[healthy] = sums[healthy] / norms[healthy, None]

    if degenerate.size:
        candidates = _reseed_order(X, U, previous)
        for cluster, doc in zip(degenerate, candidates):
            row = X.matrix[doc].toarray().ravel()
            V[cluster] = row / np.linalg.norm(row)
            logger.warning(f"Cluster {cluster} lost all membership mass; re-seeded on document {doc}")
    return V, [int(c) for c in degenerate]


def _reseed_order(X: SparseDocMatrix, U: MembershipMatrix, previous: Optional[np.ndarray]) -> np.ndarray:
    nonempty = X.row_nnz() > 0
    if previous is not None:
        badness = dissimilarities(X, previous).min(axis=1)
    else:
        badness = 1.0 - U.values.max(axis=1)
    badness = np.where(nonempty, badness, -np.inf)
    order = np.argsort(-badness, kind="stable")
    return order[nonempty[order]]


def objective(X: SparseDocMatrix, V: np.ndarray, U: MembershipMatrix, q: float) -> float:
    """J = sum_f sum_j mu_fj^q D_fj."""
    values = U.values if isinstance(U, MembershipMatrix) else np.asarray(U)
    return float(np.sum(values ** q * dissimilarities(X, V)))


def initial_prototypes(X: SparseDocMatrix, k: int, rng: np.random.Generator) -> np.ndarray:
    """k distinct non-empty rows picked with D^2 weighting on cosine dissimilarity."""
    candidates = X.nonempty_rows()
    Xc = X.matrix[candidates]
    chosen = [int(rng.integers(len(candidates)))]
    first = Xc[chosen[0]].toarray().ravel()
    closest = np.clip(1.0 - Xc @ first, 0.0, 2.0)

    for _ in range(1, k):
        weights = closest ** 2
        weights[chosen] = 0.0
        total = weights.sum()
        if total > 0:
            pick = int(rng.choice(len(candidates), p=weights / total))
        else:
            pool = np.setdiff1d(np.arange(len(candidates)), chosen)
            pick = int(pool[rng.integers(len(pool))])
        chosen.append(pick)
        row = Xc[pick].toarray().ravel()
        closest = np.minimum(closest, np.clip(1.0 - Xc @ row, 0.0, 2.0))

    V = Xc[chosen].toarray()
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def _fit_once(X: SparseDocMatrix, params: FuzzyParams, seed: int) -> Tuple[FuzzyModel, MembershipMatrix]:
    rng = np.random.default_rng(seed)
    V = initial_prototypes(X, params.k, rng)
    U = update_memberships(X, V, params.q)
    trace = [objective(X, V, U, params.q)]
    reseeded: List[Tuple[int, int]] = []
    converged = False
    iterations = 0

    for iteration in range(1, params.max_iterations + 1):
        V, degenerate = update_prototypes(X, U, params.q, previous=V)
        reseeded.extend((iteration, cluster) for cluster in degenerate)
        U = update_memberships(X, V, params.q)
        trace.append(objective(X, V, U, params.q))
        iterations = iteration
        if trace[-2] - trace[-1] < params.epsilon:
            converged = True
            break

    model = FuzzyModel(
        prototypes=V,
        params=params,
        objective_trace=tuple(trace),
        converged=converged,
        iterations_run=iterations,
        reseeded=tuple(reseeded),
        seed_used=seed,
    )
    return model, U


def fit(X: SparseDocMatrix, params: FuzzyParams) -> Tuple[FuzzyModel, MembershipMatrix]:
    """Soft spherical k-means, alternating membership and prototype updates.

    Rows are L2-normalized first. With n_restarts > 1, restart r runs with
    seed + r and the lowest final objective wins (ties: lowest seed).
    """
    if params.k > X.n_rows:
        raise_domain_error(InvalidParams, f"k={params.k} exceeds the {X.n_rows} documents")
    nonempty = len(X.nonempty_rows())
    if nonempty < params.k:
        raise_domain_error(TooFewDocuments, f"k={params.k} needs at least {params.k} non-empty documents, got {nonempty}")

    Xn = l2_normalize_rows(X)
    best: Optional[Tuple[FuzzyModel, MembershipMatrix]] = None
    for restart in range(params.n_restarts):
        model, U = _fit_once(Xn, params, params.seed + restart)
        if best is None or model.final_objective < best[0].final_objective:
            best = (model, U)

    model = best[0]
    logger.info(
        f"Fuzzy fit k={params.k} q={params.q}: J={model.final_objective:.6g} after "
        f"{model.iterations_run} iterations (converged={model.converged}, seed={model.seed_used})"
    )
    return best


def reduce(X: SparseDocMatrix, model: FuzzyModel) -> ReducedMatrix:
    """Membership features of X under frozen prototypes; valid for unseen documents."""
    if X.n_cols != model.n_terms:
        raise_domain_error(
            DimensionMismatch,
            f"Matrix has {X.n_cols} terms, the model was fitted on {model.n_terms}",
        )
    U = update_memberships(l2_normalize_rows(X), model.prototypes, model.params.q)
    return ReducedMatrix(U.values, method="FC")


def prototype_separation(V: np.ndarray) -> float:
    V = np.asarray(V, dtype=np.float64)
    similarity = V @ V.T
    k = V.shape[0]
    off_diagonal = ~np.eye(k, dtype=bool)
    return float(np.min(1.0 - similarity[off_diagonal]))


def xie_beni(X: SparseDocMatrix, V: np.ndarray, U: MembershipMatrix, q: float) -> float:
    """Compactness over separation: J / (n * min_{f != g} D(v_f, v_g))."""
    V = np.asarray(V, dtype=np.float64)
    if V.shape[0] < 2:
        raise_domain_error(InvalidParams, "Xie-Beni index needs k >= 2")
    separation = prototype_separation(V)
    if separation <= SEPARATION_TOL:
        raise_domain_error(IdenticalPrototypes, f"Prototype separation {separation:.3g} is below tolerance")
    return objective(X, V, U, q) / (X.n_rows * separation)


def validity_scan(X: SparseDocMatrix, ks: Iterable[int], params: FuzzyParams) -> Tuple[Dict[int, float], int]:
    """Xie-Beni index for each k; returns the scores and the k minimizing it."""
    Xn = l2_normalize_rows(X)
    scores: Dict[int, float] = {}
    for k in ks:
        model, U = fit(Xn, params.model_copy(update={"k": int(k)}))
        try:
            scores[int(k)] = xie_beni(Xn, model.prototypes, U, params.q)
        except IdenticalPrototypes:
            logger.warning(f"k={k}: prototypes collapsed, index undefined")
            scores[int(k)] = float("inf")
    best_k = min(scores, key=lambda k: (scores[k], k))
    logger.info(f"Xie-Beni scan over k={sorted(scores)}: best k={best_k}")
    return scores, best_k


def euclidean_fcm(
    X: np.ndarray,
    k: int,
    q: float,
    max_iterations: int = 100,
    epsilon: float = 1e-5,
    seed: int = 0,
) -> Tuple[np.ndarray, MembershipMatrix, List[float]]:
    """Fuzzy c-means with squared Euclidean distances on small dense data.

    Returns (centers, memberships, objective trace).
    """
    X = np.asarray(X, dtype=np.float64)
    rng = np.random.default_rng(seed)
    U = rng.dirichlet(np.ones(k), size=X.shape[0])
    trace: List[float] = []
    centers = np.zeros((k, X.shape[1]))
    for _ in range(max_iterations):
        weights = U ** q
        centers = (weights.T @ X) / weights.sum(axis=0)[:, None]
        D = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        U = memberships_from_dissimilarities(D, q)
        trace.append(float(np.sum(U ** q * D)))
        if len(trace) > 1 and trace[-2] - trace[-1] < epsilon:
            break
    return centers, MembershipMatrix(U), trace


class FuzzyUseCases:
    def __init__(self, corpus_usecases: CorpusUseCases = None):
        self.corpus_usecases = corpus_usecases or CorpusUseCases()

    def fit_reduce(self, X: SparseDocMatrix, params: FuzzyParams) -> Tuple[FuzzyModel, ReducedMatrix]:
        """Fits on X and returns the model with the training rows' membership features."""
        model, U = fit(X, params)
        return model, ReducedMatrix(U.values, method="FC")

    def reduce_documents(
        self, documents: Sequence[str], tokenizer: TokenizerConfig, params: FuzzyParams
    ) -> Tuple[Vocabulary, FuzzyModel, ReducedMatrix]:
        vocab, X = self.corpus_usecases.matrix(documents, tokenizer)
        model, reduced = self.fit_reduce(X, params)
        return vocab, model, reduced

    def scan(self, X: SparseDocMatrix, ks: Iterable[int], q: float, seed: int) -> Tuple[Dict[int, float], int]:
        return validity_scan(X, ks, FuzzyParams(k=1, q=q, seed=seed))

    def scan_documents(
        self, documents: Sequence[str], tokenizer: TokenizerConfig, ks: Iterable[int], q: float, seed: int
    ) -> Tuple[Dict[int, float], int]:
        _, X = self.corpus_usecases.matrix(documents, tokenizer)
        return self.scan(X, ks, q, seed)
