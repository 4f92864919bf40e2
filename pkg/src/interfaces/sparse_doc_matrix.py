from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import scipy.sparse as sp

from ..utils.error_handler import InvalidParams


@dataclass(frozen=True)
class SparseDocMatrix:
    """CSR document-term matrix. Zeros are never stored, columns sorted per row."""

    matrix: sp.csr_matrix

    def __post_init__(self):
        matrix = sp.csr_matrix(self.matrix, dtype=np.float64, copy=True)
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        matrix.sort_indices()
        if matrix.nnz and np.any(matrix.data < 0):
            raise InvalidParams("Document-term values must be non-negative")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_dense(cls, values) -> "SparseDocMatrix":
        return cls(sp.csr_matrix(np.asarray(values, dtype=np.float64)))

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    def row(self, j: int) -> List[Tuple[int, float]]:
        start, end = self.matrix.indptr[j], self.matrix.indptr[j + 1]
        return [
            (int(col), float(value))
            for col, value in zip(self.matrix.indices[start:end], self.matrix.data[start:end])
        ]

    def row_nnz(self) -> np.ndarray:
        return np.diff(self.matrix.indptr)

    def nonempty_rows(self) -> np.ndarray:
        return np.flatnonzero(self.row_nnz() > 0)

    def take_rows(self, rows) -> "SparseDocMatrix":
        return SparseDocMatrix(self.matrix[np.asarray(rows, dtype=np.int64)])

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()
