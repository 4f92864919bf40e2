from pydantic import BaseModel, ConfigDict, Field
from typing import Literal, Optional

from ..config.settings import settings

ClassifierName = Literal["forest", "adaboost", "linear"]


class ForestParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_trees: int = Field(default=settings.FOREST_TREES, ge=1)
    max_depth: Optional[int] = Field(default=None, ge=1)
    max_features: Optional[int] = Field(default=None, ge=1)
    min_samples_split: int = Field(default=2, ge=2)
    bootstrap: bool = True
    seed: int = settings.DEFAULT_SEED


class BoostParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_rounds: int = Field(default=settings.BOOST_ROUNDS, ge=1)
    seed: int = settings.DEFAULT_SEED


class LinearParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    penalty: float = Field(default=settings.LINEAR_PENALTY, ge=0.0)
    max_iterations: int = Field(default=settings.LINEAR_MAX_ITERATIONS, ge=0)
    tolerance: float = Field(default=settings.LINEAR_TOL, gt=0.0)
    standardize: bool = True
