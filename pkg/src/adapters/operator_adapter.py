import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator


def sparse_operator(X: sp.csr_matrix) -> LinearOperator:
    """Wraps X so products go through the sparse kernels only."""
    Xt = X.T.tocsr()
    return LinearOperator(
        shape=X.shape,
        dtype=np.float64,
        matvec=lambda v: X @ v,
        matmat=lambda V: X @ V,
        rmatvec=lambda u: Xt @ u,
        rmatmat=lambda U: Xt @ U,
    )


def centered_operator(X: sp.csr_matrix, mean: np.ndarray) -> LinearOperator:
    """Implicitly column-centered X: y -> X y - 1 (mean . y).

    The centered matrix is never formed.
    """
    n = X.shape[0]
    Xt = X.T.tocsr()
    mean = np.asarray(mean, dtype=np.float64).ravel()

    def matmat(V):
        V = np.asarray(V, dtype=np.float64)
        if V.ndim == 1:
            return X @ V - mean @ V
        return X @ V - np.outer(np.ones(n), mean @ V)

    def rmatmat(U):
        U = np.asarray(U, dtype=np.float64)
        if U.ndim == 1:
            return Xt @ U - mean * U.sum()
        return Xt @ U - np.outer(mean, U.sum(axis=0))

    return LinearOperator(
        shape=X.shape,
        dtype=np.float64,
        matvec=matmat,
        matmat=matmat,
        rmatvec=rmatmat,
        rmatmat=rmatmat,
    )
