import math

import numpy as np
import pytest
from scipy.special import comb, logsumexp

from condlab import BulkWeights, ModelSpec, PerturbationParams
from condlab.errors import RegimeError
from condlab.oracle import brute_measure, enumerate_states
from condlab.observables import cluster_scale
from condlab.partition import (
    a_ell_asymptotic,
    a_ell_brute,
    build_bulk_table,
    build_table,
    decomposition_partial,
    log_z_asymptotic,
    rate_function,
    saddle_objective,
    saddle_point,
    site_marginal,
    size_biased_marginal,
    z_ratio_asymptotic,
    z_ratio_exact,
)

from conftest import geometric_model


def enumerated_log_z(log_w, l, m):
    if l == 0:
        return 0.0 if m == 0 else -np.inf
    return logsumexp([log_w[list(s)].sum() for s in enumerate_states(l, m)])


def test_table_boundary_rows():
    m = geometric_model(kappa=0.5, L=4, N=6)
    t = build_table(m)
    assert t.log_z[0, 0] == 0.0
    assert np.all(np.isneginf(t.log_z[0, 1:]))
    np.testing.assert_allclose(t.log_z[1], np.log(m.weights(6)), rtol=1e-15)
    w = m.weights(1)
    assert math.exp(t.log_z[2, 1]) == pytest.approx(2 * w[0] * w[1], rel=1e-15)


@pytest.mark.parametrize("kappa", [0.0, 0.5])
def test_table_against_enumeration_with_fixed_weights(kappa):
    m = geometric_model(kappa=kappa, L=6, N=10)
    t = build_table(m)
    for l in range(1, 7):
        for n in range(11):
            ref = enumerated_log_z(t.log_weights, l, n)
            assert abs(math.expm1(t.log_z[l, n] - ref)) < 1e-10


def test_table_matches_brute_measure():
    m = geometric_model(kappa=0.5, L=4, N=6)
    assert math.exp(build_table(m).log_z[4, 6]) == pytest.approx(brute_measure(m).Z, rel=1e-10)


def test_size_biased_normalization_large(meso_model):
    t = build_table(meso_model)
    assert math.fsum(size_biased_marginal(t, 512, 1024)) == pytest.approx(1.0, abs=1e-8)
    assert math.fsum(site_marginal(t, 512, 1024)) == pytest.approx(1.0, abs=1e-10)


def test_ratio_trivial_case():
    m = geometric_model(L=2, N=5)
    t = build_table(m)
    assert z_ratio_exact(t, 2, 5, 5) == pytest.approx(m.weights(0)[0] / math.exp(t.log_z[2, 5]), rel=1e-14)


def test_tilt_invariance_of_marginal():
    m = geometric_model(kappa=0.5, L=8, N=12)
    t = build_table(m)
    a, b = 3.0, 0.7
    n = np.arange(13)
    tilted = t.log_weights + math.log(a) + n * math.log(b)
    from condlab.partition import LogPartitionTable, _log_partition_rows

    t2 = LogPartitionTable(_log_partition_rows(tilted, 8), tilted, t.model_hash)
    assert t2.log_z[8, 12] - t.log_z[8, 12] == pytest.approx(8 * math.log(a) + 12 * math.log(b), rel=1e-12)
    np.testing.assert_allclose(site_marginal(t2, 8, 12), site_marginal(t, 8, 12), rtol=1e-10, atol=1e-14)


def test_ratio_asymptotic_values(meso_model):
    c = cluster_scale(meso_model)
    assert z_ratio_asymptotic(meso_model, 0) == 1.0
    assert z_ratio_asymptotic(meso_model, c) == pytest.approx(math.exp(-1), rel=1e-14)
    assert z_ratio_asymptotic(meso_model, 10 * c) == pytest.approx(math.exp(-10), rel=1e-12)
    with pytest.raises(RegimeError):
        z_ratio_asymptotic(geometric_model(N=256), 3)


def test_ratio_convergence_trend():
    errs = []
    for L in (128, 256, 512, 1024):
        m = geometric_model(L=L, N=2 * L)
        t = build_table(m)
        r = z_ratio_exact(t, L, 2 * L, int(cluster_scale(m)))
        errs.append(abs(r / math.exp(-1) - 1))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.15


def test_a_ell_small_values():
    assert a_ell_brute(2, 3, 0.0) == pytest.approx(4.0, rel=1e-14)
    assert a_ell_brute(3, 4, 0.0) == pytest.approx(15.0, rel=1e-14)
    assert a_ell_brute(2, 2, 1.0) == pytest.approx(10.0, rel=1e-14)
    for l in range(1, 5):
        for n in range(15):
            assert a_ell_brute(l, n, 0.0) == pytest.approx(comb(n + l - 1, l - 1, exact=True), rel=1e-13)


def test_a_ell_sparse():
    for n in (5, 50, 500):
        assert a_ell_asymptotic(2, n, 0.0) == pytest.approx(n, rel=1e-12)
    e300 = abs(a_ell_asymptotic(3, 300, 0.5) / a_ell_brute(3, 300, 0.5) - 1)
    e600 = abs(a_ell_asymptotic(3, 600, 0.5) / a_ell_brute(3, 600, 0.5) - 1)
    assert e300 < 0.1 and e600 < e300


def test_a_ell_dense():
    est = a_ell_asymptotic(50, 50, 0.0, regime="dense")
    assert est == pytest.approx(comb(99, 49, exact=True), rel=0.1)


def _grid_rate(u, phis):
    bulk = BulkWeights.geometric(0.5)
    return max(u * math.log(p) - math.log(bulk.z(p)) for p in phis)


def closed_form_rate(u):
    return (u + 1) * math.log(2) + (u * math.log(u) if u > 0 else 0.0) - (u + 1) * math.log1p(u)


def test_rate_function_values():
    m = geometric_model()
    assert rate_function(m, 1.0).I == pytest.approx(0.0, abs=1e-10)
    assert rate_function(m, 0.0).I == pytest.approx(math.log(2), rel=1e-12)
    assert rate_function(m, 2.0).I == pytest.approx(5 * math.log(2) - 3 * math.log(3), rel=1e-10)
    phis = np.linspace(1e-4, 2 - 1e-4, 20001)
    for u in (0.2, 0.7, 1.5, 2.5):
        assert rate_function(m, u).I == pytest.approx(_grid_rate(u, phis), abs=1e-6)


def test_rate_function_shape():
    m = geometric_model()
    u = np.linspace(0.05, 3.0, 60)
    I = np.array([rate_function(m, x).I for x in u])
    assert np.all(I >= -1e-12)
    assert np.all(I[np.abs(u - 1.0) >= 0.05] > 0)
    assert np.all(np.diff(I, 2) >= -1e-8)


def test_decomposition():
    m = geometric_model(L=6, N=8)
    exact = build_table(m).log_z[6, 8]
    assert abs(math.expm1(decomposition_partial(m, 6) - exact)) < 1e-9
    partials = [decomposition_partial(m, l) for l in range(7)]
    assert all(b > a for a, b in zip(partials, partials[1:]))
    bulk = build_bulk_table(m.bulk, 6, 8).log_z[6, 8]
    assert decomposition_partial(m, 3, theta=0.0) == bulk


def test_chernoff_bound_on_bulk_table():
    t = build_bulk_table(BulkWeights.geometric(0.5), 40, 40)
    eps = 0.05
    for M in range(1, 41):
        k = int(math.floor(eps * M))
        below = logsumexp(t.log_z[M, : k + 1])
        assert below <= M * math.log(1 / 1.5) - eps * M * math.log(2) + 1e-12


def test_saddle_point_values():
    sp = saddle_point(0.0, 1.0, 0.1, 1.0, 512)
    assert sp.alpha == 0.5
    assert sp.s_star == pytest.approx(math.sqrt(0.1), rel=1e-14)
    assert sp.leading_log_z == pytest.approx(math.sqrt(512) * 2 * math.sqrt(0.1), rel=1e-14)
    sp = saddle_point(0.5, 1.0, 1 / math.gamma(2.5), 1.0, 100)
    assert sp.c_kappa_theta == pytest.approx(1 / 1.5, rel=1e-14)
    assert sp.s_star == pytest.approx(1 / 1.5, rel=1e-14)


@pytest.mark.parametrize("kappa,theta,excess", [(0.0, 0.1, 1.0), (0.5, 0.3, 2.0), (1.0, 0.1, 0.5)])
def test_saddle_point_maximizes_objective(kappa, theta, excess):
    from scipy.optimize import minimize_scalar

    sp = saddle_point(kappa, 1.0, theta, excess, 1000)
    res = minimize_scalar(lambda s: -saddle_objective(s, kappa, theta, excess), bounds=(1e-6, 50), method="bounded",
                          options={"xatol": 1e-12})
    assert res.x == pytest.approx(sp.s_star, rel=1e-6)
    assert -res.fun == pytest.approx((kappa + 2) * sp.s_star, rel=1e-10)


def test_log_z_mesoscopic_trend():
    # log Z_{L,N} / L^alpha approaches (kappa+2) s* as L grows
    gaps = []
    for L in (128, 256, 512, 1024):
        m = geometric_model(L=L, N=2 * L)
        asym = log_z_asymptotic(m)
        exact = build_table(m).log_z[L, 2 * L]
        gaps.append(abs(exact - asym.log_z) / L**asym.saddle.alpha)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_log_z_macroscopic():
    m = geometric_model(kappa=-0.5, gamma=2.0, N=1024)
    asym = log_z_asymptotic(m)
    assert asym.log_z == pytest.approx(math.log(0.1) - 1.5 * math.log(512), rel=1e-12)
    exact = build_table(m).log_z[512, 1024]
    assert abs(exact - asym.log_z) < 0.5


def test_log_z_regime_errors():
    with pytest.raises(RegimeError):
        log_z_asymptotic(geometric_model(gamma=2.0))
    with pytest.raises(RegimeError):
        log_z_asymptotic(geometric_model(N=100))
