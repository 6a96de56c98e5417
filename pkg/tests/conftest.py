import pytest
from mpmath import mp

from newton_boson.findiff import ScalarFunction


def _mpf(x):
    return mp.mpf(x)


CORPUS = [
    ScalarFunction(lambda n: mp.mpf(1), name="one"),
    ScalarFunction(lambda n: mp.mpf(n), name="linear"),
    ScalarFunction(lambda n: mp.mpf(n) ** 2, name="square"),
    ScalarFunction(lambda n: mp.mpf(n) ** 3 - 2 * mp.mpf(n), name="cubic"),
    ScalarFunction(lambda n: mp.sqrt(mp.mpf(n)), name="sqrt"),
    ScalarFunction(lambda n: mp.sqrt(mp.mpf(n) + 1), name="sqrt1p"),
    ScalarFunction(lambda n: mp.mpf(2) ** n, name="pow2"),
    ScalarFunction(lambda n: mp.mpf("0.75") ** n, name="geom34"),
    ScalarFunction(lambda n: 1 / (mp.mpf(n) + 1), name="recip1p"),
    ScalarFunction(lambda n: mp.log(mp.mpf(n) + 1), name="log1p"),
]


@pytest.fixture(scope="session")
def corpus():
    """Ten scalar functions defined at every non-negative integer."""
    return CORPUS
