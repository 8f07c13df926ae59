import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nclp.algebra import Algebra

settings.register_profile("desk", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("desk")

ALGEBRAS = [
    Algebra.matrix(1),
    Algebra.matrix(2),
    Algebra.matrix(3, weight=0.5),
    Algebra.of([1, 2], [2.0, 1.0]),
    Algebra.of([1, 3], [0.25, 3.0]),
]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
