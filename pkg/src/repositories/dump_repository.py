from pathlib import Path
from typing import Tuple, Union

import numpy as np
import scipy.sparse as sp

from ..interfaces.fuzzy_model import FuzzyModel
from ..interfaces.sparse_doc_matrix import SparseDocMatrix
from ..utils.error_handler import ParseError, raise_domain_error
from ..utils.logger import get_logger

logger = get_logger(__name__)

MatrixLike = Union[SparseDocMatrix, sp.spmatrix, np.ndarray]


def _fmt(value: float) -> str:
    return repr(float(value))


def _as_coo(matrix: MatrixLike) -> sp.coo_matrix:
    if isinstance(matrix, SparseDocMatrix):
        matrix = matrix.matrix
    coo = sp.csr_matrix(matrix, dtype=np.float64)
    coo.eliminate_zeros()
    coo.sort_indices()
    return coo.tocoo()


def write_matrix_dump(path, matrix: MatrixLike, header: str = None) -> Path:
    """ASCII dump: `n m nnz` then `row col value` sorted by (row, col)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    coo = _as_coo(matrix)
    with open(path, "w", encoding="ascii", newline="\n") as stream:
        if header:
            stream.write(f"# {header}\n")
        stream.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for row, col, value in zip(coo.row, coo.col, coo.data):
            stream.write(f"{row} {col} {_fmt(value)}\n")
    logger.info(f"Wrote {coo.shape[0]}x{coo.shape[1]} matrix ({coo.nnz} entries) to {path}")
    return path


def _read_triples(path):
    with open(path, "r", encoding="ascii") as stream:
        lines = [line for line in stream if line.strip() and not line.startswith("#")]
    if not lines:
        raise_domain_error(ParseError, f"{path}: empty matrix dump", offset=0)
    try:
        n, m, nnz = (int(v) for v in lines[0].split())
        triples = [line.split() for line in lines[1:]]
        rows = np.array([int(t[0]) for t in triples], dtype=np.int64)
        cols = np.array([int(t[1]) for t in triples], dtype=np.int64)
        values = np.array([float(t[2]) for t in triples], dtype=np.float64)
    except (ValueError, IndexError) as e:
        raise_domain_error(ParseError, f"{path}: malformed matrix dump ({e})", offset=0)
    if len(triples) != nnz:
        raise_domain_error(ParseError, f"{path}: header announces {nnz} entries, found {len(triples)}", offset=0)
    return sp.csr_matrix((values, (rows, cols)), shape=(n, m))


def read_matrix_dump(path) -> SparseDocMatrix:
    return SparseDocMatrix(_read_triples(path))


def write_factor_dump(path, method: str, k: int, matrix: MatrixLike) -> Path:
    """Matrix dump preceded by a `# method k` line."""
    return write_matrix_dump(path, matrix, header=f"{method} {k}")


def read_factor_header(path) -> Tuple[str, int]:
    with open(path, "r", encoding="ascii") as stream:
        first = stream.readline()
    if not first.startswith("#"):
        raise_domain_error(ParseError, f"{path}: missing factor header", offset=0)
    method, k = first[1:].split()
    return method, int(k)


def write_model_dump(path, model: FuzzyModel) -> Path:
    """`k m q` header then `cluster col value` for every non-zero prototype entry."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as stream:
        stream.write(f"{model.k} {model.n_terms} {_fmt(model.params.q)}\n")
        clusters, cols = np.nonzero(model.prototypes)
        for cluster, col in zip(clusters, cols):
            stream.write(f"{cluster} {col} {_fmt(model.prototypes[cluster, col])}\n")
    logger.info(f"Wrote fuzzy model (k={model.k}, m={model.n_terms}) to {path}")
    return path


def read_model_dump(path) -> Tuple[np.ndarray, float]:
    """Returns (prototypes, q)."""
    with open(path, "r", encoding="ascii") as stream:
        lines = [line.split() for line in stream if line.strip()]
    try:
        k, m, q = int(lines[0][0]), int(lines[0][1]), float(lines[0][2])
        prototypes = np.zeros((k, m))
        for cluster, col, value in lines[1:]:
            prototypes[int(cluster), int(col)] = float(value)
    except (ValueError, IndexError) as e:
        raise_domain_error(ParseError, f"{path}: malformed model dump ({e})", offset=0)
    return prototypes, q


def read_factor_dump(path) -> Tuple[str, int, np.ndarray]:
    """Returns (method, k, dense values); factor entries may be negative."""
    method, k = read_factor_header(path)
    return method, k, _read_triples(path).toarray()


def write_lines(path, items) -> Path:
    """One item per line: vocabulary terms or labels next to a matrix dump."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as stream:
        for item in items:
            stream.write(f"{item}\n")
    return path


def read_labels(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as stream:
        try:
            return np.array([int(line) for line in stream if line.strip()], dtype=np.int64)
        except ValueError as e:
            raise_domain_error(ParseError, f"{path}: labels must be 0 or 1 ({e})", offset=0)
