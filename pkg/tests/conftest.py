import random

import pytest

from modconv import FourierPrime

SMALL_PRIME = 257
LARGE_PRIME = 998244353


@pytest.fixture(scope="session")
def fp17():
    return FourierPrime.from_modulus(17)


@pytest.fixture(scope="session")
def fp257():
    return FourierPrime.from_modulus(SMALL_PRIME)


@pytest.fixture(scope="session")
def fp998():
    return FourierPrime.from_modulus(LARGE_PRIME)


@pytest.fixture()
def rng():
    return random.Random(0xC0FFEE)


def random_vec(rng, fp, length):
    return [rng.randrange(fp.p) for _ in range(length)]
