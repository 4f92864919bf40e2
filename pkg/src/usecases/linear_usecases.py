import hashlib
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, svds

from ..adapters.operator_adapter import centered_operator, sparse_operator
from ..config.settings import settings
from ..interfaces.factors import PcaFactors, SvdFactors
from ..interfaces.reduced_matrix import ReducedMatrix
from ..interfaces.sparse_doc_matrix import SparseDocMatrix
from ..interfaces.tokenizer_config import TokenizerConfig
from ..interfaces.vocabulary import Vocabulary
from ..utils.error_handler import (
    ConvergenceFailure,
    DimensionMismatch,
    InvalidK,
    InvalidParams,
    raise_domain_error,
)
from ..utils.logger import get_logger
from .corpus_usecases import CorpusUseCases, l2_normalize_rows

logger = get_logger(__name__)

ORACLE_MAX_DIM = 64


def canonicalize_signs(U: np.ndarray, Vt: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Flips each direction so the largest-magnitude entry of its Vt row is positive."""
    U = np.array(U, dtype=np.float64)
    Vt = np.array(Vt, dtype=np.float64)
    for i in range(Vt.shape[0]):
        pivot = Vt[i, np.argmax(np.abs(Vt[i]))]
        if pivot < 0:
            Vt[i] *= -1.0
            U[:, i] *= -1.0
    return U, Vt


def partial_svd(
    op: LinearOperator,
    k: int,
    seed: int,
    dense_margin: int = None,
    max_iterations: Optional[int] = None,
    tol: float = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top-k SVD of a linear operator, singular values in non-increasing order.

    Runs ARPACK through svds with a seeded start vector. When k + dense_margin
    reaches min(n, m) the operator is materialized through its products and
    decomposed exactly. The result is checked against ||A^T u_i - s_i v_i|| / s_1.
    """
    dense_margin = settings.SVD_DENSE_MARGIN if dense_margin is None else dense_margin
    max_iterations = settings.SVD_MAX_ITERATIONS if max_iterations is None else max_iterations
    tol = settings.SVD_TOL if tol is None else tol

    n, m = op.shape
    if k + dense_margin >= min(n, m):
        dense = op.matmat(np.eye(m)) if m <= n else op.rmatmat(np.eye(n)).T
        U, s, Vt = la.svd(np.asarray(dense, dtype=np.float64), full_matrices=False)
        return U[:, :k], s[:k], Vt[:k]

    try:
        U, s, Vt = svds(op, k=k, tol=tol, maxiter=max_iterations, random_state=seed)
    except ArpackNoConvergence as e:
        raise_domain_error(ConvergenceFailure, f"ARPACK stopped before k={k} triplets converged: {e}", residual=float("nan"))

    order = np.argsort(-s, kind="stable")
    U, s, Vt = U[:, order], s[order], Vt[order]
    residual = 0.0
    if s[0] > 0.0:
        residual = float(np.max(np.linalg.norm(op.rmatmat(U) - Vt.T * s, axis=0)) / s[0])
    if residual > settings.SVD_RESIDUAL_TOL:
        raise_domain_error(
            ConvergenceFailure,
            f"Partial SVD k={k} left relative residual {residual:.3g}",
            residual=residual,
        )
    logger.debug(f"partial_svd k={k}: relative residual {residual:.3g}")
    return U, s, Vt


def _truncate_rank(U: np.ndarray, S: np.ndarray, Vt: np.ndarray, label: str):
    S = np.array(S, dtype=np.float64)
    if S.size == 0:
        return U, S, Vt, False
    cutoff = settings.SVD_RANK_TOL * S[0]
    tiny = S <= cutoff
    if tiny.any():
        logger.warning(f"{label}: {int(tiny.sum())} trailing singular values below numerical rank, zero-filled")
        S[tiny] = 0.0
    return U, S, Vt, bool(tiny.any())


def _check_k(k: int, limit: int, label: str):
    if k < 1 or k > limit:
        raise_domain_error(InvalidK, f"{label}: k={k} must lie in [1, {limit}]")


def truncated_svd(X: SparseDocMatrix, k: int, seed: int = 0) -> SvdFactors:
    """Top-k factors of the sparse matrix, signs canonicalized."""
    _check_k(k, min(X.n_rows, X.n_cols), "SVD")
    U, S, Vt = partial_svd(sparse_operator(X.matrix), k, seed)
    U, Vt = canonicalize_signs(U, Vt)
    U, S, Vt, deficient = _truncate_rank(U, S, Vt, "SVD")
    return SvdFactors(U=U, S=S, Vt=Vt, rank_deficient=deficient)


@dataclass(frozen=True)
class SvdModel:
    """Frozen SVD projection: unseen rows map to x V."""

    factors: SvdFactors
    normalize_rows: bool = False

    def transform(self, X: SparseDocMatrix) -> ReducedMatrix:
        if X.n_cols != self.factors.Vt.shape[1]:
            raise_domain_error(DimensionMismatch, f"Matrix has {X.n_cols} terms, SVD fitted on {self.factors.Vt.shape[1]}")
        if self.normalize_rows:
            X = l2_normalize_rows(X)
        features = np.asarray(X.matrix @ self.factors.Vt.T)
        features[:, self.factors.S == 0.0] = 0.0
        return ReducedMatrix(features, method="SVD", rank_deficient=self.factors.rank_deficient)

    def fingerprint(self) -> str:
        return _fingerprint(self.factors.Vt, self.factors.S)


def svd_reduce(X: SparseDocMatrix, k: int, seed: int = 0, normalize_rows: bool = False) -> Tuple[ReducedMatrix, SvdFactors]:
    """LSA features U diag(S) for the training rows; unseen rows go through SvdModel."""
    source = l2_normalize_rows(X) if normalize_rows else X
    factors = truncated_svd(source, k, seed)
    reduced = ReducedMatrix(factors.U * factors.S, method="SVD", rank_deficient=factors.rank_deficient)
    return reduced, factors


@dataclass(frozen=True)
class PcaModel:
    """Frozen PCA projection: unseen rows map to (x - mean) P^T."""

    factors: PcaFactors
    normalize_rows: bool = False

    def transform(self, X: SparseDocMatrix) -> ReducedMatrix:
        P = self.factors.components
        if X.n_cols != P.shape[1]:
            raise_domain_error(DimensionMismatch, f"Matrix has {X.n_cols} terms, PCA fitted on {P.shape[1]}")
        if self.normalize_rows:
            X = l2_normalize_rows(X)
        features = np.asarray(X.matrix @ P.T) - self.factors.mean @ P.T
        features[:, self.factors.singular_values == 0.0] = 0.0
        return ReducedMatrix(features, method="PCA", rank_deficient=self.factors.rank_deficient)

    def fingerprint(self) -> str:
        return _fingerprint(self.factors.components, self.factors.mean)


def pca_reduce(X: SparseDocMatrix, k: int, seed: int = 0, normalize_rows: bool = False) -> Tuple[ReducedMatrix, PcaFactors]:
    """PCA scores through an implicitly centered operator; X is never densified."""
    _check_k(k, min(X.n_rows - 1, X.n_cols), "PCA")
    source = l2_normalize_rows(X) if normalize_rows else X
    mean = np.asarray(source.matrix.mean(axis=0)).ravel()
    U, S, Vt = partial_svd(centered_operator(source.matrix, mean), k, seed)
    U, Vt = canonicalize_signs(U, Vt)
    U, S, Vt, deficient = _truncate_rank(U, S, Vt, "PCA")
    factors = PcaFactors(mean=mean, components=Vt, scores=U * S, singular_values=S, rank_deficient=deficient)
    return ReducedMatrix(factors.scores, method="PCA", rank_deficient=deficient), factors


def reconstruction_error(X: SparseDocMatrix, factors: SvdFactors) -> float:
    """Frobenius norm of X - U S Vt, computed densely (small matrices only)."""
    return float(np.linalg.norm(X.to_dense() - factors.reconstruct()))


def dense_svd_oracle(X, max_sweeps: int = 100, tol: float = 1e-15) -> SvdFactors:
    """Full SVD by one-sided Jacobi rotations. Test oracle for matrices up to 64 x 64."""
    A = np.array(X.to_dense() if isinstance(X, SparseDocMatrix) else X, dtype=np.float64)
    if A.ndim != 2 or max(A.shape) > ORACLE_MAX_DIM:
        raise_domain_error(InvalidParams, f"Dense oracle accepts matrices up to {ORACLE_MAX_DIM}x{ORACLE_MAX_DIM}")

    n, m = A.shape
    V = np.eye(m)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(m - 1):
            for r in range(p + 1, m):
                alpha = A[:, p] @ A[:, p]
                beta = A[:, r] @ A[:, r]
                gamma = A[:, p] @ A[:, r]
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                Ap, Ar = A[:, p].copy(), A[:, r].copy()
                A[:, p], A[:, r] = c * Ap - s * Ar, s * Ap + c * Ar
                Vp, Vr = V[:, p].copy(), V[:, r].copy()
                V[:, p], V[:, r] = c * Vp - s * Vr, s * Vp + c * Vr
        if not rotated:
            break

    singular = np.linalg.norm(A, axis=0)
    order = np.argsort(-singular, kind="stable")[: min(n, m)]
    S = singular[order]
    V = V[:, order]
    U = np.zeros((n, len(order)))
    positive = S > 0
    U[:, positive] = A[:, order[positive]] / S[positive]
    if not positive.all():
        U = _complete_orthonormal(U, positive)
    U, Vt = canonicalize_signs(U, V.T)
    return SvdFactors(U=U, S=S, Vt=Vt)


def _complete_orthonormal(U: np.ndarray, filled: np.ndarray) -> np.ndarray:
    n = U.shape[0]
    basis = U[:, filled]
    Q, _ = la.qr(np.hstack([basis, np.eye(n)]), mode="economic")
    extra = Q[:, basis.shape[1]:]
    U = U.copy()
    U[:, ~filled] = extra[:, : int((~filled).sum())]
    return U


def _fingerprint(*arrays) -> str:
    digest = hashlib.sha256()
    for array in arrays:
        digest.update(np.ascontiguousarray(array, dtype=np.float64).tobytes())
    return digest.hexdigest()


class LinearUseCases:
    def __init__(self, corpus_usecases: CorpusUseCases = None):
        self.corpus_usecases = corpus_usecases or CorpusUseCases()

    def reduce(self, X: SparseDocMatrix, method: str, k: int, seed: int = 0, normalize_rows: bool = False) -> ReducedMatrix:
        if method == "SVD":
            return svd_reduce(X, k, seed, normalize_rows)[0]
        if method == "PCA":
            return pca_reduce(X, k, seed, normalize_rows)[0]
        raise_domain_error(InvalidParams, f"Unknown linear reduction {method!r}")

    def reduce_documents(
        self,
        documents: Sequence[str],
        tokenizer: TokenizerConfig,
        method: str,
        k: int,
        seed: int = 0,
        normalize_rows: bool = False,
    ) -> Tuple[Vocabulary, ReducedMatrix]:
        vocab, X = self.corpus_usecases.matrix(documents, tokenizer)
        return vocab, self.reduce(X, method, k, seed, normalize_rows)
