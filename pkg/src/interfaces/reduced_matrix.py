from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..utils.error_handler import InvalidParams

Method = Literal["FC", "PCA", "SVD"]


@dataclass(frozen=True)
class ReducedMatrix:
    """n x k features produced by any reduction method."""

    values: np.ndarray
    method: Method
    rank_deficient: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise InvalidParams("Reduced features must form a 2-D matrix")
        if not np.all(np.isfinite(values)):
            raise InvalidParams(f"{self.method} produced non-finite features")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]
