from typing import List

import numpy as np
import scipy.sparse as sp

from ..interfaces.labeled_corpus import LabeledCorpus, NEGATIVE, POSITIVE
from ..interfaces.sparse_doc_matrix import SparseDocMatrix
from ..utils.error_handler import InvalidParams, raise_domain_error
from ..utils.logger import get_logger

logger = get_logger(__name__)

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _word(prefix: str, index: int) -> str:
    suffix = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        suffix = _LETTERS[rem] + suffix
    return prefix + suffix


def topic_vocabulary(prefix: str, size: int) -> List[str]:
    return [_word(prefix, i) for i in range(size)]


def load_synthetic(
    n: int,
    positive_fraction: float = 0.5,
    vocabulary_size: int = 50,
    doc_length: int = 30,
    shared_fraction: float = 0.0,
    cross_fraction: float = 0.0,
    seed: int = 0,
) -> LabeledCorpus:
    """Seeded two-topic text corpus.

    Each document draws `doc_length` words: a `shared_fraction` share from a
    vocabulary common to both classes, a `cross_fraction` share from the other
    class's topic words, the rest from its own topic words.
    """
    if not 0.0 < positive_fraction < 1.0:
        raise_domain_error(InvalidParams, "positive_fraction must lie strictly between 0 and 1")
    if shared_fraction + cross_fraction > 1.0:
        raise_domain_error(InvalidParams, "shared_fraction + cross_fraction must not exceed 1")

    rng = np.random.default_rng(seed)
    n_positive = min(max(1, int(round(n * positive_fraction))), n - 1)
    labels = np.array([POSITIVE] * n_positive + [NEGATIVE] * (n - n_positive))
    labels = labels[rng.permutation(n)]

    vocabularies = {
        POSITIVE: topic_vocabulary("pos", vocabulary_size),
        NEGATIVE: topic_vocabulary("neg", vocabulary_size),
    }
    shared = topic_vocabulary("com", vocabulary_size)

    documents = []
    for label in labels:
        other = NEGATIVE if label == POSITIVE else POSITIVE
        source = rng.choice(3, size=doc_length, p=[1.0 - shared_fraction - cross_fraction, shared_fraction, cross_fraction])
        picks = rng.integers(0, vocabulary_size, size=doc_length)
        words = []
        for kind, pick in zip(source, picks):
            if kind == 0:
                words.append(vocabularies[label][pick])
            elif kind == 1:
                words.append(shared[pick])
            else:
                words.append(vocabularies[other][pick])
        documents.append(" ".join(words))

    logger.info(f"Generated synthetic corpus: n={n}, positives={n_positive}, seed={seed}")
    return LabeledCorpus(tuple(documents), tuple(int(l) for l in labels), name=f"synthetic-{seed}")


def synthetic_count_matrix(
    n: int,
    m: int,
    nnz_per_row: int,
    seed: int = 0,
    max_count: int = 5,
) -> SparseDocMatrix:
    """Random sparse count matrix with about `nnz_per_row` entries per row.

    Column collisions inside a row are merged, so a row can hold slightly fewer.
    """
    if nnz_per_row > m:
        raise_domain_error(InvalidParams, f"nnz_per_row={nnz_per_row} exceeds m={m}")
    rng = np.random.default_rng(seed)
    rows = np.repeat(np.arange(n), nnz_per_row)
    cols = rng.integers(0, m, size=n * nnz_per_row)
    values = rng.integers(1, max_count + 1, size=n * nnz_per_row).astype(np.float64)
    return SparseDocMatrix(sp.csr_matrix((values, (rows, cols)), shape=(n, m)))
