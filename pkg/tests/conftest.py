"""Shared fixtures and a generator of random valid scenarios."""

from __future__ import annotations

import numpy as np
import pytest

from covertsig.model import (
    Alphabet,
    Channel,
    InputProcess,
    Scenario,
    SystemMap,
    UtilityTable,
)
from covertsig.presets import get_preset, preset_document

#: minimum sup-distance between any two channel rows in generated scenarios;
#: keeps every non-benign action detectably informative
ROW_GAP = 0.05


@pytest.fixture
def preset() -> Scenario:
    return get_preset("binary")


@pytest.fixture
def preset_doc() -> dict:
    return preset_document("binary")


def _channel_rows(rng: np.random.Generator, n_x: int, n_y: int) -> np.ndarray:
    for _ in range(200):
        mat = rng.dirichlet(np.ones(n_y), size=n_x)
        gaps = [
            np.max(np.abs(mat[i] - mat[j]))
            for i in range(n_x)
            for j in range(i + 1, n_x)
        ]
        if not gaps or min(gaps) >= ROW_GAP:
            return mat
    raise RuntimeError("could not draw well-separated channel rows")


def random_scenario(rng: np.random.Generator, horizon: int = 6) -> Scenario:
    """Random scenario satisfying every standing assumption by construction.

    Alphabet sizes stay small (<= 4); each non-benign action moves the
    state away from the benign one, channel rows are pairwise separated,
    and the benign type strictly prefers the benign action everywhere.
    """
    n_u = int(rng.integers(1, 4))
    n_x = int(rng.integers(2, 5))
    n_y = int(rng.integers(2, 5))
    n_a = int(rng.integers(2, min(n_x, 4) + 1))
    n_r = int(rng.integers(1, 4))
    ab = int(rng.integers(0, n_a))

    table = np.empty((n_u, n_a), dtype=np.intp)
    for ui in range(n_u):
        xb = int(rng.integers(0, n_x))
        table[ui, ab] = xb
        others = [x for x in range(n_x) if x != xb]
        for ai in range(n_a):
            if ai != ab:
                table[ui, ai] = int(rng.choice(others))

    sender = rng.uniform(0.0, 2.0, size=(2, n_x, n_a, n_r))
    # benign type: the benign action strictly dominates at every tuple
    sender[0, :, ab, :] = 3.0 + rng.uniform(0.0, 1.0, size=(n_x, n_r))
    receiver = rng.uniform(0.0, 1.0, size=(2, n_x, n_a, n_r))

    return Scenario(
        inputs_alphabet=Alphabet(tuple(range(n_u))),
        states_alphabet=Alphabet(tuple(range(n_x))),
        observations_alphabet=Alphabet(tuple(range(n_y))),
        actions_alphabet=Alphabet(tuple(range(n_a))),
        reactions_alphabet=Alphabet(tuple(range(n_r))),
        system_map=SystemMap(table),
        channel=Channel(_channel_rows(rng, n_x, n_y)),
        inputs=InputProcess(rng.dirichlet(np.ones(n_u))),
        utilities=UtilityTable(sender, receiver),
        benign_action=ab,
        pi0_malicious=float(rng.uniform(0.05, 0.95)),
        horizon=horizon,
        merge_tolerance=1e-9,
        seed=int(rng.integers(0, 2**31)),
    )
