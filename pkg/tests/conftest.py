import os

import numpy as np
import pytest

FIXED_SEEDS = [0, 1, 2, 3, 4]
# Set CAUSALINFO_EXTRA_SEED to add one rotating seed to every seeded test.
if os.environ.get("CAUSALINFO_EXTRA_SEED"):
    FIXED_SEEDS.append(int(os.environ["CAUSALINFO_EXTRA_SEED"]))


@pytest.fixture(params=FIXED_SEEDS)
def rng(request):
    return np.random.default_rng(request.param)

