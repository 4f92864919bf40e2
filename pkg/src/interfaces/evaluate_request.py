from pydantic import BaseModel, Field
from typing import List, Literal, Optional

from ..config.settings import settings
from .classifier_params import ClassifierName
from .tokenizer_config import TokenizerConfig


class EvaluateRequest(BaseModel):
    documents: List[str] = Field(min_length=2)
    labels: List[int] = Field(min_length=2)
    method: Literal["FC", "PCA", "SVD"] = "FC"
    k: int = Field(ge=1)
    q: Optional[float] = Field(default=None, gt=1.0)
    classifiers: List[ClassifierName] = Field(default_factory=lambda: ["forest", "adaboost", "linear"], min_length=1)
    folds: int = Field(default=settings.CV_FOLDS, ge=2)
    seed: int = settings.DEFAULT_SEED
    tokenizer: TokenizerConfig = TokenizerConfig()
