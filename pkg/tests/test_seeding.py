"""Deterministic seed derivation."""

import numpy as np

from gridcrc._seeding import derive_rng, derive_seed


def test_frozen_anchor_values():
    # pinned so the stream layout can never drift silently
    assert derive_seed(0, "x", 0) == 324491132517618889576825088639734858753
    assert derive_seed(1, "x", 0) == 200630328972308451320138372168056026696


def test_components_and_indices_separate_streams():
    seeds = {
        derive_seed(7, "trial", 0),
        derive_seed(7, "trial", 1),
        derive_seed(7, "select:crc", 0),
        derive_seed(8, "trial", 0),
    }
    assert len(seeds) == 4


def test_derive_rng_reproducible_and_isolated():
    a = derive_rng(3, "gen", 2).random(5)
    np.random.seed(0)  # global state must not matter
    b = derive_rng(3, "gen", 2).random(5)
    np.testing.assert_array_equal(a, b)
