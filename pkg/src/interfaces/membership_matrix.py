from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MembershipMatrix:
    """Dense n x k row-stochastic fuzzy memberships."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def row_sums(self) -> np.ndarray:
        return self.values.sum(axis=1)

    def hard_assignment(self) -> np.ndarray:
        return np.argmax(self.values, axis=1)
