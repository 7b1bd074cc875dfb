import random

import pytest

from sapkit import bfv, engine, paillier
from sapkit.engine import SchemeId


def make_rng(label: str = "sapkit-tests") -> random.Random:
    return random.Random(label)


@pytest.fixture
def rng() -> random.Random:
    return make_rng()


@pytest.fixture(scope="session")
def paillier_key_2048():
    return paillier.keygen(2048, make_rng("paillier-session-key"))


@pytest.fixture(scope="session")
def tiny_paillier_key():
    return paillier._keypair_from_primes(5, 7)


@pytest.fixture(scope="session")
def desk_params():
    return bfv.setup("desk-128bit")


@pytest.fixture(scope="session")
def tiny_params():
    return bfv.setup("test-tiny")


@pytest.fixture(scope="session")
def desk_bfv_key(desk_params):
    return bfv.keygen(desk_params, make_rng("bfv-session-key"))


@pytest.fixture(scope="session")
def paillier_setup():
    return engine.receiver_setup(SchemeId.HE_PAILLIER, make_rng("engine-paillier"))


@pytest.fixture(scope="session")
def bfv_setup():
    return engine.receiver_setup(SchemeId.FHE_BFV, make_rng("engine-bfv"))
