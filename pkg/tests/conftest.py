import pytest

from mosmc import benchmarks, lss


@pytest.fixture(scope="session")
def mr():
    return benchmarks.model_mr()


def find_strategy_id(model, wanted, start=0):
    """Smallest strategy id inducing the given action choice on the listed
    states (dict state -> action index)."""
    sigma = start
    while True:
        if all(lss.lss_action(sigma, s, len(model.actions[s])) == a for s, a in wanted.items()):
            return sigma
        sigma += 1
        if sigma > 10 ** 6:
            raise AssertionError("no strategy id found")
