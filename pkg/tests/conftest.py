import pytest

from flowmcg.substitution import Substitution


@pytest.fixture(scope="session")
def tm() -> Substitution:
    return Substitution.from_rules({"0": "01", "1": "10"})


@pytest.fixture(scope="session")
def fib() -> Substitution:
    return Substitution.from_rules({"0": "01", "1": "0"})


@pytest.fixture(scope="session")
def tribonacci() -> Substitution:
    return Substitution.from_rules({"0": "01", "1": "02", "2": "0"})


@pytest.fixture(scope="session")
def cyclic4() -> Substitution:
    # four-letter substitution of constant length 6 with an order-4
    # cyclic letter symmetry
    return Substitution.from_rules(
        {
            "0": "012230",
            "1": "123301",
            "2": "230012",
            "3": "301123",
        }
    )
