from pydantic import BaseModel, Field
from typing import List

from ..config.settings import settings
from .tokenizer_config import TokenizerConfig


class ValidityRequest(BaseModel):
    documents: List[str] = Field(min_length=2)
    ks: List[int] = Field(min_length=1)
    q: float = Field(default=1.5, gt=1.0)
    seed: int = settings.DEFAULT_SEED
    tokenizer: TokenizerConfig = TokenizerConfig()
