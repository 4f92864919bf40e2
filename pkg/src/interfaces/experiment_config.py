from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing import List, Literal, Optional

from ..config.settings import settings
from .classifier_params import BoostParams, ClassifierName, ForestParams, LinearParams
from .tokenizer_config import TokenizerConfig


class DatasetSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    loader: Literal["lines", "reuters", "dirs", "synthetic"] = "synthetic"
    paths: List[str] = []
    positive: str = "grain"
    negative_label: Optional[str] = None
    negative_sample: Optional[int] = Field(default=None, ge=1)
    seed: int = settings.DEFAULT_SEED
    name: Optional[str] = None

    synthetic_n: int = Field(default=400, ge=2)
    synthetic_positive_fraction: float = Field(default=0.5, gt=0.0, lt=1.0)
    synthetic_vocabulary: int = Field(default=50, ge=1)
    synthetic_doc_length: int = Field(default=30, ge=1)
    synthetic_shared_fraction: float = Field(default=0.0, ge=0.0, le=1.0)
    synthetic_cross_fraction: float = Field(default=0.0, ge=0.0, le=1.0)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.loader == "synthetic":
            return f"synthetic-{self.seed}"
        return f"{self.loader}-{self.positive.lower()}"


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    dataset: DatasetSpec = DatasetSpec()
    tokenizer: TokenizerConfig = TokenizerConfig()
    dims: List[int] = Field(default_factory=lambda: list(range(10, 101, 10)), min_length=1)
    methods: List[Literal["FC", "PCA", "SVD"]] = Field(default_factory=lambda: ["FC", "PCA", "SVD"], min_length=1)
    fuzzifiers: List[float] = Field(default_factory=lambda: [1.5, 2.0], min_length=1)
    classifiers: List[ClassifierName] = Field(
        default_factory=lambda: ["forest", "adaboost", "linear"], min_length=1
    )
    folds: int = Field(default=settings.CV_FOLDS, ge=2)
    seed: int = settings.DEFAULT_SEED
    out_dir: str = settings.OUTPUT_DIR
    n_jobs: int = settings.N_JOBS
    normalize_linear_rows: bool = False
    forest: ForestParams = ForestParams()
    boost: BoostParams = BoostParams()
    linear: LinearParams = LinearParams()

    @field_validator("dims")
    @classmethod
    def check_dims(cls, dims: List[int]) -> List[int]:
        if any(k < 1 for k in dims):
            raise ValueError("dimensions must be >= 1")
        return sorted(set(dims))

    @field_validator("fuzzifiers")
    @classmethod
    def check_fuzzifiers(cls, fuzzifiers: List[float]) -> List[float]:
        if any(q <= 1.0 for q in fuzzifiers):
            raise ValueError("fuzzifiers must be > 1")
        return list(dict.fromkeys(fuzzifiers))
