import pytest

from helpers import Ctx, greek_ctx


@pytest.fixture
def xy():
    return Ctx(vectors=("x", "y"))


@pytest.fixture
def xyz():
    return Ctx(vectors=("x", "y", "z"))


@pytest.fixture
def greek():
    return greek_ctx()


@pytest.fixture
def lin_ctx():
    return Ctx(scalars=("alpha", "beta"), vectors=("x", "y", "z1", "z2", "z3", "z4"))
