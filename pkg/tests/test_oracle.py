import math

import numpy as np
import pytest

from condlab.errors import BudgetError
from condlab.oracle import brute_measure, brute_theorem1_check, count_states, enumerate_states
from condlab.verify import run_oracle_suite

from conftest import geometric_model


def test_enumeration_order_and_count():
    assert list(enumerate_states(2, 1)) == [(0, 1), (1, 0)]
    assert list(enumerate_states(1, 5)) == [(5,)]
    states = list(enumerate_states(4, 6))
    assert len(states) == 84 == count_states(4, 6)
    assert states == sorted(states) and len(set(states)) == 84
    assert all(sum(s) == 6 for s in states)


def test_budget():
    with pytest.raises(BudgetError):
        next(iter(enumerate_states(30, 30)))


def test_brute_measure_basics():
    bm = brute_measure(geometric_model(L=2, N=1))
    np.testing.assert_allclose(bm.probs, [0.5, 0.5], rtol=1e-15)
    bm = brute_measure(geometric_model(L=3, N=5, kappa=0.5))
    assert math.fsum(bm.probs) == pytest.approx(1.0, abs=1e-14)
    for x in range(3):
        assert math.fsum(bm.site_marginals[x]) == pytest.approx(1.0, abs=1e-12)
    assert math.fsum(bm.size_biased_first) == pytest.approx(1.0, abs=1e-12)
    assert bm.size_biased_pair.sum() == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(bm.size_biased_pair.sum(axis=1), bm.size_biased_first, atol=1e-14)


def test_theorem1_small_scale():
    tvs = brute_theorem1_check(geometric_model(), [0.0, 0.5, 2.0])
    assert tvs[0.0] == [0.0, 0.0, 0.0]
    for rho in (0.5, 2.0):
        assert all(b < a for a, b in zip(tvs[rho], tvs[rho][1:]))


def test_full_suite_passes():
    results = run_oracle_suite(geometric_model(L=3, N=5))
    assert all(r["passed"] for r in results), [r for r in results if not r["passed"]]
    with pytest.raises(BudgetError):
        run_oracle_suite(geometric_model(L=40, N=40))
