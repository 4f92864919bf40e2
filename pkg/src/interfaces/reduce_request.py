from pydantic import BaseModel, Field
from typing import List, Literal, Optional

from ..config.settings import settings
from .tokenizer_config import TokenizerConfig


class ReduceRequest(BaseModel):
    documents: List[str] = Field(min_length=2)
    method: Literal["FC", "PCA", "SVD"] = "FC"
    k: int = Field(ge=1)
    q: Optional[float] = Field(default=None, gt=1.0)
    normalize_rows: bool = False
    seed: int = settings.DEFAULT_SEED
    tokenizer: TokenizerConfig = TokenizerConfig()
