from dataclasses import dataclass, field
from typing import Dict, Tuple

from ..utils.error_handler import EmptyVocabulary, InvalidParams


@dataclass(frozen=True)
class Vocabulary:
    """Ordered distinct terms with the bijection term -> column id."""

    terms: Tuple[str, ...]
    index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.terms:
            raise EmptyVocabulary("Vocabulary must hold at least one term")
        index = {term: i for i, term in enumerate(self.terms)}
        if len(index) != len(self.terms):
            raise InvalidParams("Vocabulary terms must be distinct")
        object.__setattr__(self, "index", index)

    @property
    def size(self) -> int:
        return len(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index
