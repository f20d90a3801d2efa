"""Shared fixtures: synthetic datasets reused across test modules."""

import pytest

from jsmc.data import SyntheticSpec, generate_synthetic


@pytest.fixture(scope="session")
def standard_dataset():
    # 3 well-separated clusters, 2 clean views; the main correctness fixture.
    return generate_synthetic(SyntheticSpec(seed=42))


@pytest.fixture(scope="session")
def noisy_dataset():
    # High noise plus a corrupted second view; exercises the inconsistency term.
    return generate_synthetic(
        SyntheticSpec(noise_sigma=1.5, inconsistent_view_fraction=0.5, seed=7)
    )
