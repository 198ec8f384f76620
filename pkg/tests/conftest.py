import numpy as np
import pytest

from condlab import BulkWeights, ModelSpec, PerturbationParams


def geometric_model(kappa=0.0, L=512, N=1024, theta=0.1, gamma=1.0, **kw):
    return ModelSpec(BulkWeights.geometric(0.5), PerturbationParams(theta, gamma, kappa, **kw), L, N)


@pytest.fixture
def meso_model():
    return geometric_model()


@pytest.fixture
def tiny_model():
    return geometric_model(L=3, N=5)


def tv(p, q):
    n = max(len(p), len(q))
    p = np.pad(np.asarray(p, float), (0, n - len(p)))
    q = np.pad(np.asarray(q, float), (0, n - len(q)))
    return 0.5 * np.abs(p - q).sum()


ACCEPTANCE_LINES = []


def report(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
