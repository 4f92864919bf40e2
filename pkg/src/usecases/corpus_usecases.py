from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from joblib import Parallel, delayed
from sklearn.feature_extraction.text import CountVectorizer

from ..adapters.tokenizer_adapter import TokenizerAdapter
from ..interfaces.experiment_config import DatasetSpec
from ..interfaces.labeled_corpus import LabeledCorpus
from ..interfaces.sparse_doc_matrix import SparseDocMatrix
from ..interfaces.tokenizer_config import TokenizerConfig
from ..interfaces.vocabulary import Vocabulary
from ..repositories.corpus_repository import CorpusRepository, reuters_files
from ..repositories.synthetic_repository import load_synthetic
from ..utils.error_handler import EmptyVocabulary, InvalidParams, raise_domain_error
from ..utils.logger import get_logger

logger = get_logger(__name__)

Documents = Union[LabeledCorpus, Sequence[str]]


def _documents(corpus: Documents) -> Sequence[str]:
    return corpus.documents if isinstance(corpus, LabeledCorpus) else corpus


def tokenize(text: str, cfg: TokenizerConfig) -> List[str]:
    return TokenizerAdapter(cfg).tokenize(text)


def tokenize_all(corpus: Documents, cfg: TokenizerConfig, n_jobs: int = 1) -> List[List[str]]:
    """Tokenizes every document; output order is input order for any n_jobs."""
    adapter = TokenizerAdapter(cfg)
    documents = _documents(corpus)
    if n_jobs == 1 or len(documents) < 1000:
        return [adapter.tokenize(doc) for doc in documents]
    return Parallel(n_jobs=n_jobs)(delayed(adapter.tokenize)(doc) for doc in documents)


def _pretokenized(tokens: List[str]) -> List[str]:
    return tokens


def _count_vectorizer(cfg: TokenizerConfig, vocabulary=None) -> CountVectorizer:
    """Counts over documents already split by TokenizerAdapter."""
    return CountVectorizer(analyzer=_pretokenized, min_df=cfg.min_df, vocabulary=vocabulary, dtype=np.float64)


def build_vocabulary(corpus: Documents, cfg: TokenizerConfig, n_jobs: int = 1) -> Vocabulary:
    """Distinct tokens with document frequency >= cfg.min_df, ids in lexicographic order."""
    documents = _documents(corpus)
    if not documents:
        raise_domain_error(InvalidParams, "Cannot build a vocabulary from an empty corpus")

    vectorizer = _count_vectorizer(cfg)
    try:
        vectorizer.fit(tokenize_all(documents, cfg, n_jobs))
    except ValueError as e:
        raise_domain_error(
            EmptyVocabulary,
            f"No token reaches min_df={cfg.min_df} across {len(documents)} documents: {e}",
        )
    terms = tuple(str(term) for term in vectorizer.get_feature_names_out())
    logger.info(f"Vocabulary: {len(terms)} terms kept at min_df={cfg.min_df}")
    return Vocabulary(terms)


def vectorize(corpus: Documents, vocab: Vocabulary, cfg: TokenizerConfig, n_jobs: int = 1) -> SparseDocMatrix:
    """Raw term counts; out-of-vocabulary tokens are dropped."""
    counts = _count_vectorizer(cfg, vocabulary=vocab.index).transform(tokenize_all(corpus, cfg, n_jobs))
    X = SparseDocMatrix(sp.csr_matrix(counts, dtype=np.float64))
    n = X.n_rows
    empty = n - len(X.nonempty_rows())
    if empty:
        logger.info(f"{empty} of {n} documents have no in-vocabulary token")
    return X


def l2_normalize_rows(X: SparseDocMatrix) -> SparseDocMatrix:
    """Scales every non-empty row to unit Euclidean norm. Empty rows stay empty."""
    M = X.matrix
    norms = np.sqrt(np.asarray(M.multiply(M).sum(axis=1)).ravel())
    scale = np.ones_like(norms)
    nonzero = norms > 0
    scale[nonzero] = 1.0 / norms[nonzero]
    return SparseDocMatrix(sp.diags(scale).tocsr() @ M)


class CorpusUseCases:
    def __init__(self, repository: CorpusRepository = None):
        self.repository = repository or CorpusRepository()

    def load(self, spec: DatasetSpec) -> LabeledCorpus:
        """Loads the corpus a DatasetSpec describes."""
        if spec.loader == "lines":
            if len(spec.paths) != 1:
                raise_domain_error(InvalidParams, "The lines loader takes exactly one path")
            return self.repository.load_labeled_lines(spec.paths[0], spec.positive, spec.negative_label)
        if spec.loader == "reuters":
            paths = []
            for path in spec.paths:
                paths.extend(reuters_files(path) if Path(path).is_dir() else [path])
            return self.repository.load_reuters_sgml(paths, spec.positive)
        if spec.loader == "dirs":
            if len(spec.paths) != 1:
                raise_domain_error(InvalidParams, "The dirs loader takes exactly one root directory")
            return self.repository.load_class_dirs(spec.paths[0], spec.positive, spec.negative_sample, spec.seed)
        return load_synthetic(
            n=spec.synthetic_n,
            positive_fraction=spec.synthetic_positive_fraction,
            vocabulary_size=spec.synthetic_vocabulary,
            doc_length=spec.synthetic_doc_length,
            shared_fraction=spec.synthetic_shared_fraction,
            cross_fraction=spec.synthetic_cross_fraction,
            seed=spec.seed,
        )

    def matrix(self, documents: Documents, cfg: TokenizerConfig, n_jobs: int = 1) -> Tuple[Vocabulary, SparseDocMatrix]:
        """Vocabulary and count matrix of in-memory documents."""
        vocab = build_vocabulary(documents, cfg, n_jobs)
        return vocab, vectorize(documents, vocab, cfg, n_jobs)

    def ingest(self, spec: DatasetSpec, cfg: TokenizerConfig, n_jobs: int = 1) -> Tuple[LabeledCorpus, Vocabulary, SparseDocMatrix]:
        corpus = self.load(spec)
        vocab, X = self.matrix(corpus, cfg, n_jobs)
        logger.info(f"Ingested {spec.label}: n={X.n_rows}, m={X.n_cols}, nnz={X.nnz}")
        return corpus, vocab, X
