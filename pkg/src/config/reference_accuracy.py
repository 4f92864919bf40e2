"""Published classifier-averaged accuracy per dimension, used as soft comparison targets."""

from typing import Dict, Tuple

Series = Tuple[Tuple[int, float], ...]

REFERENCE_DIMS = (10, 20, 30, 40, 50, 60, 70, 80, 90)


def _series(values) -> Series:
    return tuple(zip(REFERENCE_DIMS, values))


REFERENCE_ACCURACY: Dict[str, Dict[str, Series]] = {
    "reuters-grain": {
        "FC-1.5": _series((0.95531, 0.95528, 0.95531, 0.95519, 0.95519, 0.95525, 0.95519, 0.95525, 0.95519)),
        "FC-2": _series((0.95525, 0.95519, 0.95525, 0.95519, 0.95528, 0.95522, 0.95504, 0.95528, 0.95522)),
        "PCA": _series((0.95388, 0.95283, 0.95274, 0.95338, 0.95326, 0.95333, 0.95344, 0.95336, 0.95330)),
        "SVD": _series((0.95374, 0.95271, 0.95274, 0.95304, 0.95307, 0.95310, 0.95298, 0.95316, 0.95319)),
    },
    "ohsumed-virus": {
        "FC-1.5": _series((0.92283, 0.92147, 0.92209, 0.92141, 0.92296, 0.92154, 0.92271, 0.92234, 0.92296)),
        "FC-2": _series((0.92178, 0.92333, 0.92290, 0.92203, 0.92234, 0.92049, 0.92259, 0.92135, 0.91999)),
        "PCA": _series((0.92079, 0.92339, 0.92079, 0.91956, 0.91702, 0.91721, 0.91609, 0.91622, 0.91603)),
        "SVD": _series((0.92253, 0.92265, 0.92055, 0.91894, 0.91844, 0.91733, 0.91764, 0.91473, 0.91548)),
    },
}

# ballpark tolerance at the first reference dimension, per dataset
REFERENCE_TOLERANCE = {"reuters-grain": 0.02, "ohsumed-virus": 0.03}
