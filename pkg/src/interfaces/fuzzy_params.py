from pydantic import BaseModel, ConfigDict, Field

from ..config.settings import settings


class FuzzyParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    q: float = Field(default=1.5, gt=1.0)
    max_iterations: int = Field(default=settings.FUZZY_MAX_ITERATIONS, ge=1)
    epsilon: float = Field(default=settings.FUZZY_EPSILON, gt=0.0)
    seed: int = settings.DEFAULT_SEED
    n_restarts: int = Field(default=1, ge=1)
