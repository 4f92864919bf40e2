from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):

    LOG_LEVEL: str = "INFO"
    N_JOBS: int = 1
    OUTPUT_DIR: str = "results"
    DEFAULT_SEED: int = 42


    TOKEN_LOWERCASE: bool = True
    TOKEN_MIN_LENGTH: int = 2
    TOKEN_MIN_DF: int = 3
    STOPWORDS_FILE: Optional[str] = None


    FUZZY_MAX_ITERATIONS: int = 100
    FUZZY_EPSILON: float = 1e-5
    FUZZY_SINGULARITY_TOL: float = 1e-12


    SVD_DENSE_MARGIN: int = 10
    SVD_MAX_ITERATIONS: Optional[int] = None
    SVD_TOL: float = 0.0
    SVD_RESIDUAL_TOL: float = 1e-6
    SVD_RANK_TOL: float = 1e-12


    FOREST_TREES: int = 100
    BOOST_ROUNDS: int = 50
    LINEAR_PENALTY: float = 1e-3
    LINEAR_TOL: float = 1e-6
    LINEAR_MAX_ITERATIONS: int = 1000


    CV_FOLDS: int = 5


    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"


settings = Settings()
