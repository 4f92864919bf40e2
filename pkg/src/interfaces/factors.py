from dataclasses import dataclass

import numpy as np


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SvdFactors:
    """Rank-k factors X ~ U diag(S) Vt."""

    U: np.ndarray
    S: np.ndarray
    Vt: np.ndarray
    rank_deficient: bool = False

    def __post_init__(self):
        for name in ("U", "S", "Vt"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def k(self) -> int:
        return self.S.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.S) @ self.Vt


@dataclass(frozen=True)
class PcaFactors:
    """Column means, row-orthonormal loadings P and scores t, X ~ t P^T + mean."""

    mean: np.ndarray
    components: np.ndarray
    scores: np.ndarray
    singular_values: np.ndarray
    rank_deficient: bool = False

    def __post_init__(self):
        for name in ("mean", "components", "scores", "singular_values"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def k(self) -> int:
        return self.components.shape[0]

    def explained_variance(self) -> np.ndarray:
        n = self.scores.shape[0]
        return self.singular_values ** 2 / max(n - 1, 1)
