"""
datasets.py - Builtin data sets.

galaxies: velocities (km/sec) of 82 galaxies in the Corona Borealis region,
as distributed with the R package MASS (Roeder, 1990, JASA 85, 617-624).
Returned in units of 1000 km/sec.
"""

import numpy as np

from pypolya.errors import ValidationError

_GALAXIES_KM_S = (
    9172, 9350, 9483, 9558, 9775, 10227, 10406, 16084, 16170, 18419,
    18552, 18600, 18927, 19052, 19070, 19330, 19343, 19349, 19440, 19473,
    19529, 19541, 19547, 19663, 19846, 19856, 19863, 19914, 19918, 19973,
    19989, 20166, 20175, 20179, 20196, 20215, 20221, 20415, 20629, 20795,
    20821, 20846, 20875, 20986, 21137, 21492, 21701, 21814, 21921, 21960,
    22185, 22209, 22242, 22249, 22314, 22374, 22495, 22746, 22747, 22888,
    22914, 23206, 23241, 23263, 23484, 23538, 23542, 23666, 23706, 23711,
    24129, 24285, 24289, 24366, 24717, 24990, 25633, 26690, 26995, 32065,
    32789, 34279,
)  # fmt: skip


def galaxies() -> np.ndarray:
    return np.asarray(_GALAXIES_KM_S, dtype=float) / 1000.0


BUILTIN = {'galaxies': galaxies}


def load_builtin(name: str) -> np.ndarray:
    try:
        return BUILTIN[name]()
    except KeyError:
        raise ValidationError(
            f'Unknown builtin dataset {name!r}; choose from {sorted(BUILTIN)}'
        ) from None
