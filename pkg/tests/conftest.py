import pytest

from hamsys import brst, dirac, embedding, legendre, models


@pytest.fixture
def nhcs():
    # fresh parse per test: analyses mutate the registry (multipliers, ghosts)
    return models.load("nonholonomic")


@pytest.fixture
def leg(nhcs):
    return legendre.analyze(nhcs)


@pytest.fixture
def chain(leg):
    return dirac.run_chain(leg)


@pytest.fixture
def emb(chain):
    return embedding.bft_embed(chain)


@pytest.fixture
def cx(emb):
    return brst.build_complex(emb, gauge="unitary")


@pytest.fixture
def gauged():
    return models.load("nonholonomic_gauged")


@pytest.fixture
def gauged_leg(gauged):
    return legendre.analyze(gauged)
