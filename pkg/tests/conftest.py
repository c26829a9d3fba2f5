import pytest

from phononet.datasets import make_desk_lexicon, toy_lexicon


@pytest.fixture(scope="session")
def toy():
    return toy_lexicon()


@pytest.fixture(scope="session")
def desk600():
    return make_desk_lexicon(600, random_state=0)


@pytest.fixture(scope="session")
def desk1000():
    return make_desk_lexicon(1000, random_state=0)


@pytest.fixture(scope="session")
def desk2000():
    return make_desk_lexicon(2000, random_state=0)
