import pytest

import discount_strategy as ds


@pytest.fixture(scope="session")
def paper_config():
    return ds.load_config()


@pytest.fixture(scope="session")
def paper_model(paper_config):
    """Session-wide decision model; its memo caches warm up across tests."""
    return paper_config.decision_model()


@pytest.fixture(scope="session")
def market(paper_model):
    return paper_model.market


@pytest.fixture(scope="session")
def kernel(paper_model):
    return paper_model.first_mover


@pytest.fixture(scope="session")
def v0(paper_model):
    result = ds.find_threshold(paper_model)
    assert result.kind == "root"
    return result.value
