import re
from functools import lru_cache
from typing import List

from ..interfaces.tokenizer_config import TokenizerConfig


@lru_cache(maxsize=16)
def _compile(pattern: str):
    return re.compile(pattern)


class TokenizerAdapter:
    """Regex tokenizer driven by a TokenizerConfig."""

    def __init__(self, cfg: TokenizerConfig):
        self.cfg = cfg
        self.pattern = _compile(cfg.token_pattern)
        self.stopwords = frozenset(w.lower() if cfg.lowercase else w for w in (cfg.stopwords or ()))

    def tokenize(self, text: str) -> List[str]:
        if not text:
            return []
        tokens = self.pattern.findall(text.lower() if self.cfg.lowercase else text)
        return [
            token for token in tokens
            if len(token) >= self.cfg.min_length and token not in self.stopwords
        ]
