import numpy as np
import pytest

import growbeam as gb


@pytest.fixture
def paper_config():
    """Reference geometry: l = 20 dm, E = 1e5 N/dm^2, N = 200 cells."""
    return gb.BeamConfig(length=20.0, young_modulus=1.0e5, n_cells=200)


@pytest.fixture
def uniform_load():
    return gb.LoadCase(gb.LoadKind.UNIFORM, 0.02)


@pytest.fixture
def moment_load():
    return gb.LoadCase(gb.LoadKind.MOMENT, 20.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_stack(rng, config, n_layers):
    """Random nondecreasing layer stack with scalar prestrain pairs."""
    n = config.n_cells
    heights = [gb.HeightField(rng.uniform(0.1, 0.5, size=n))]
    prestrains = []
    for _ in range(n_layers):
        heights.append(gb.HeightField(heights[-1].values + rng.uniform(0.0, 0.3, size=n)))
        prestrains.append(gb.PrestrainPair(rng.uniform(-0.05, 0.05),
                                           rng.uniform(-0.2, 0.2)))
    return gb.LayerStack(tuple(heights), tuple(prestrains))
