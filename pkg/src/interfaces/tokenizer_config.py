from pydantic import BaseModel, ConfigDict, Field
from typing import FrozenSet, Optional

from ..config.settings import settings


class TokenizerConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    lowercase: bool = settings.TOKEN_LOWERCASE
    min_length: int = Field(default=settings.TOKEN_MIN_LENGTH, ge=1)
    token_pattern: str = r"[^\W\d_]+"
    stopwords: Optional[FrozenSet[str]] = None
    min_df: int = Field(default=settings.TOKEN_MIN_DF, ge=1)
