import pytest

from arbor.algebra.numberfield import NumberFieldSpec, rationals
from arbor.dynamics import RationalMap


@pytest.fixture(scope="session")
def QQ():
    return rationals()


@pytest.fixture(scope="session")
def rabbit_field():
    return NumberFieldSpec([1, 1, 2, 1])


@pytest.fixture(scope="session")
def rabbit(rabbit_field):
    K = rabbit_field
    c = K.gen()
    return RationalMap.from_affine(K, [c, K.zero(), K.one()], [K.one()])


@pytest.fixture(scope="session")
def x2_plus_1(QQ):
    return RationalMap.from_affine(QQ, [1, 0, 1], [1])


@pytest.fixture(scope="session")
def x2_plus_7(QQ):
    return RationalMap.from_affine(QQ, [7, 0, 1], [1])


@pytest.fixture(scope="session")
def seven_over_one(QQ):
    """(x^2+7)/(x^2+1), resultant 36."""
    return RationalMap.from_affine(QQ, [7, 0, 1], [1, 0, 1])
