from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..utils.error_handler import InvalidParams, SingleClass, TooFewDocuments

POSITIVE = 1
NEGATIVE = 0


@dataclass(frozen=True)
class LabeledCorpus:
    """Raw documents with binary labels (1 positive, 0 negative).

    `skipped` counts records the loader dropped, so that
    accepted + skipped equals the records seen in the source.
    """

    documents: Tuple[str, ...]
    labels: Tuple[int, ...]
    skipped: int = 0
    name: Optional[str] = None

    def __post_init__(self):
        if len(self.documents) != len(self.labels):
            raise InvalidParams(
                f"{len(self.documents)} documents but {len(self.labels)} labels"
            )
        if len(self.documents) < 2:
            raise TooFewDocuments("A labeled corpus needs at least 2 documents")
        if any(label not in (POSITIVE, NEGATIVE) for label in self.labels):
            raise InvalidParams("Labels must be binary (0 or 1)")
        if len(set(self.labels)) < 2:
            raise SingleClass("Both classes must be present in the corpus")

    @property
    def n(self) -> int:
        return len(self.documents)

    def label_array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)

    def positives(self) -> int:
        return int(sum(self.labels))
