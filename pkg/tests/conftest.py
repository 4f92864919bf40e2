import numpy as np
import pytest
import scipy.sparse as sp

from src.interfaces.sparse_doc_matrix import SparseDocMatrix
from src.interfaces.tokenizer_config import TokenizerConfig
from src.repositories.synthetic_repository import load_synthetic
from src.usecases.corpus_usecases import build_vocabulary, vectorize

# five documents over ten terms; d2/d4 and d1/d3 share most of their words
SMALL_COUNTS = np.array(
    [
        [1, 0, 0, 1, 0, 0, 1, 2, 1, 0],
        [2, 0, 1, 0, 0, 1, 0, 0, 0, 1],
        [1, 0, 0, 2, 1, 0, 0, 1, 1, 0],
        [1, 1, 0, 0, 0, 1, 1, 1, 0, 1],
        [0, 0, 0, 1, 0, 1, 0, 0, 0, 0],
    ],
    dtype=np.float64,
)


@pytest.fixture
def small_matrix():
    return SparseDocMatrix.from_dense(SMALL_COUNTS)


@pytest.fixture
def separable_corpus():
    return load_synthetic(n=100, positive_fraction=0.5, vocabulary_size=50, doc_length=30, seed=7)


@pytest.fixture
def separable_matrix(separable_corpus):
    cfg = TokenizerConfig()
    vocab = build_vocabulary(separable_corpus, cfg)
    return vectorize(separable_corpus, vocab, cfg), separable_corpus.label_array()


@pytest.fixture
def random_matrix():
    """Factory for seeded random non-negative sparse matrices."""

    def make(n: int, m: int, density: float = 0.3, seed: int = 0, counts: bool = True) -> SparseDocMatrix:
        rng = np.random.default_rng(seed)
        mask = rng.random((n, m)) < density
        values = rng.integers(1, 6, size=(n, m)) if counts else rng.random((n, m))
        return SparseDocMatrix(sp.csr_matrix(np.where(mask, values, 0.0)))

    return make
