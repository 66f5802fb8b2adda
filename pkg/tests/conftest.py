import pytest

import helpers


@pytest.fixture
def smokers():
    return helpers.load_fixture("smokers.lcn")


@pytest.fixture
def smokers_variant():
    return helpers.load_fixture("smokers_variant.lcn")


@pytest.fixture
def quad_mixed_model():
    return helpers.load_fixture("quad_mixed.lcn")


@pytest.fixture
def cycle6_model():
    return helpers.load_fixture("cycle6.lcn")


@pytest.fixture
def undirected_block_model():
    return helpers.load_fixture("undirected_block.lcn")


@pytest.fixture
def bidirected_block_model():
    return helpers.load_fixture("bidirected_block.lcn")
