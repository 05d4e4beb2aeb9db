import random

import pytest
from hypothesis import HealthCheck, settings

from dvrhodge.ring import KINDS, make_ring

settings.register_profile(
    "exact",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")


@pytest.fixture(params=[("p-local-int", 5), ("t-local-poly", 3), ("ramified-quadratic", 5)],
                ids=lambda k: f"{k[0]}-{k[1]}")
def ring(request):
    kind, p = request.param
    return make_ring(kind, p)


@pytest.fixture
def Z5():
    return make_ring("p-local-int", 5)


def rng_for(seed: int) -> random.Random:
    return random.Random(seed)


def ring_for(seed: int):
    kind = KINDS[seed % len(KINDS)]
    return make_ring(kind, {"p-local-int": 5, "t-local-poly": 3, "ramified-quadratic": 5}[kind])


def rngs():
    """Seeded ``random.Random`` instances; seeds shrink, generator state does not."""
    from hypothesis import strategies as st

    return st.integers(0, 2**32 - 1).map(random.Random)
