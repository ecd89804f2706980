"""Named process models used by the worked examples, tests and scripts."""
from __future__ import annotations

import numpy as np

from .var1 import Var1Model

# Furnace process: LS estimates fitted to a 186-point industrial series.
FURNACE_MU = (10.421, 20.189)
FURNACE_PHI = ((0.733, 0.474), (0.410, -0.561))
FURNACE_SIGMA_EPS = ((1.232, 0.588), (0.588, 1.072))
FURNACE_N = 5

# Food filling line: ratio of pumpkin-seed to flaxseed weight in muesli packs.
FOOD_MU = (25.0, 25.0)
FOOD_PHI = ((0.5, 0.0), (0.0, 0.5))
FOOD_SIGMA_EPS = ((0.0625, 0.01), (0.01, 0.0625))
FOOD_N = 5
FOOD_ALPHA = 0.005


def furnace_model() -> Var1Model:
    return Var1Model(np.array(FURNACE_MU), np.array(FURNACE_PHI), np.array(FURNACE_SIGMA_EPS))


def food_model() -> Var1Model:
    return Var1Model(np.array(FOOD_MU), np.array(FOOD_PHI), np.array(FOOD_SIGMA_EPS))
