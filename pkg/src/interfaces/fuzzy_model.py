from dataclasses import dataclass
import hashlib
from typing import Tuple

import numpy as np

from .fuzzy_params import FuzzyParams


@dataclass(frozen=True)
class FuzzyModel:
    """Fitted soft spherical k-means: unit prototypes plus the fit history."""

    prototypes: np.ndarray
    params: FuzzyParams
    objective_trace: Tuple[float, ...]
    converged: bool
    iterations_run: int
    reseeded: Tuple[Tuple[int, int], ...] = ()
    seed_used: int = 0

    def __post_init__(self):
        prototypes = np.array(self.prototypes, dtype=np.float64)
        prototypes.setflags(write=False)
        object.__setattr__(self, "prototypes", prototypes)

    @property
    def k(self) -> int:
        return self.prototypes.shape[0]

    @property
    def n_terms(self) -> int:
        return self.prototypes.shape[1]

    @property
    def final_objective(self) -> float:
        return self.objective_trace[-1]

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.prototypes).tobytes())
        digest.update(repr(self.params.q).encode())
        return digest.hexdigest()
