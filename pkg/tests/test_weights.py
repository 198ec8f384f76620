import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma as gamma_fn

from condlab import BulkWeights, ModelSpec, PerturbationParams
from condlab.errors import DomainError, ModelError
from condlab.weights import (
    bulk_pmf,
    grand_canonical,
    invert_density,
    perturbed_pmf,
    power_series_moments,
    tilt_fugacity,
    truncated_rho_c,
)

from conftest import geometric_model


def test_geometric_pmf_values(meso_model):
    assert bulk_pmf(meso_model, 0) == 0.5
    assert bulk_pmf(meso_model, 3) == 0.0625
    assert abs(math.fsum(bulk_pmf(meso_model, np.arange(1001))) - 1.0) < 1e-12


def test_perturbed_pmf_values():
    m = geometric_model(kappa=0.0)
    assert perturbed_pmf(m, 0) == pytest.approx(0.5 + 0.1 / 512, rel=1e-15)
    m = geometric_model(kappa=0.5)
    assert perturbed_pmf(m, 8) == pytest.approx(2.0**-9 + 0.1 / 512 * 3.0, rel=1e-14)
    n = np.arange(200)
    assert np.all(perturbed_pmf(m, n) >= bulk_pmf(m, n))


def test_small_theta_recovers_bulk():
    m = geometric_model(theta=1e-300)
    n = np.arange(50)
    np.testing.assert_allclose(perturbed_pmf(m, n), bulk_pmf(m, n), rtol=1e-15)


def test_constructor_rejections():
    with pytest.raises(ModelError):
        BulkWeights.geometric(1.0)
    with pytest.raises(ModelError):
        PerturbationParams(0.1, 1.0, -1.0)
    with pytest.raises(ModelError):
        PerturbationParams(-0.1, 1.0, 0.0)
    with pytest.raises(ModelError):
        PerturbationParams(0.1, 0.0, 0.0)
    PerturbationParams(0.1, 2.0, -1.0, allow_boundary_kappa=True)
    with pytest.raises(ModelError):
        BulkWeights((0.5, 0.2), 0.5, "table")


def test_table_bulk_matches_geometric():
    table = BulkWeights.table([0.5, 0.25, 0.125], 0.5)
    geo = BulkWeights.geometric(0.5)
    n = np.arange(40)
    np.testing.assert_allclose(table.pmf(n), geo.pmf(n), rtol=1e-14)
    assert table.phi_bar == 2.0
    assert table.rho_c == pytest.approx(1.0, rel=1e-14)


def test_table_bulk_rescales_to_unit_mass():
    table = BulkWeights.table([1.0, 1.0, 1.0], 0.25)
    total = math.fsum(table.pmf(np.arange(200)))
    assert total == pytest.approx(1.0, abs=1e-12)
    assert table.phi_bar == 4.0


def test_grand_canonical_geometric():
    m = geometric_model()
    gc = grand_canonical(m, 0.0)
    assert (gc.z, gc.R) == (0.5, 0.0)
    gc = grand_canonical(m, 1.0, size_dependent=False)
    assert gc.z == pytest.approx(1.0, rel=1e-14)
    assert gc.R == pytest.approx(1.0, rel=1e-14)
    gc = grand_canonical(m, 2 / 3)
    assert gc.R == pytest.approx(0.5, rel=1e-13)
    # size-dependent sums against a brute series
    n = np.arange(4000)
    w = perturbed_pmf(m, n) * (2 / 3) ** n
    assert gc.z_L == pytest.approx(math.fsum(w), rel=1e-13)
    assert gc.R_L == pytest.approx(math.fsum(n * w) / math.fsum(w), rel=1e-12)


def test_grand_canonical_domain():
    m = geometric_model()
    with pytest.raises(DomainError):
        grand_canonical(m, 1.2)
    with pytest.raises(DomainError):
        grand_canonical(m, -0.1)
    with pytest.raises(DomainError, match="truncated_rho_c"):
        grand_canonical(m, 1.0)


@pytest.mark.parametrize("kappa", [0.0, 0.5, 1.0])
def test_size_dependent_fugacity_bound(kappa):
    # |z_L - z| <= 2 theta Gamma(kappa+1) L^-gamma (1-phi)^-(kappa+1)
    for L in (16, 128, 1024):
        m = geometric_model(kappa=kappa, L=L, N=2 * L)
        for phi in (0.1, 0.5, 0.9, 0.99):
            gc = grand_canonical(m, phi)
            bound = 2 * 0.1 * gamma_fn(kappa + 1) * L**-1.0 * (1 - phi) ** -(kappa + 1)
            assert 0 < gc.z_L - gc.z <= bound


def test_power_series_moments_closed_forms():
    np.testing.assert_allclose(power_series_moments(0.0, 0.5), [2.0, 2.0, 6.0], rtol=1e-14)
    # sum (n+1) phi^n = 1/(1-phi)^2
    assert power_series_moments(1.0, 0.9, moments=1)[0] == pytest.approx(100.0, rel=1e-13)


def test_invert_density():
    m = geometric_model()
    assert invert_density(m, 0.0) == 0.0
    assert invert_density(m, 0.5) == pytest.approx(2 / 3, abs=1e-11)
    assert invert_density(m, 2.0) == 1.0
    for rho in np.arange(0.1, 0.95, 0.2):
        phi = invert_density(m, rho)
        assert m.bulk.R(phi) == pytest.approx(rho, abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 0.999), st.floats(0.0, 0.999))
def test_density_strictly_increasing(a, b):
    bulk = BulkWeights.geometric(0.5)
    if a < b:
        assert bulk.R(a) < bulk.R(b)


def test_tilt_beyond_one():
    bulk = BulkWeights.geometric(0.5)
    phi = tilt_fugacity(bulk, 3.0)
    assert phi > 1.0
    assert bulk.R(phi) == pytest.approx(3.0, rel=1e-10)


def test_truncated_rho_c():
    m = geometric_model(theta=1e-300)
    assert truncated_rho_c(m, 5000) == pytest.approx(1.0, rel=1e-12)
    m = geometric_model()
    n = np.arange(1025)
    w = perturbed_pmf(m, n)
    assert truncated_rho_c(m, 1024) == pytest.approx(math.fsum(n * w) / math.fsum(w), rel=1e-13)


def test_model_spec_validation():
    with pytest.raises(ModelError):
        ModelSpec(BulkWeights.geometric(0.5), PerturbationParams(0.1, 1.0, 0.0), 0, 3)
    with pytest.raises(ModelError):
        ModelSpec(BulkWeights.geometric(0.5), PerturbationParams(0.1, 1.0, 0.0), 3, -1)
    m = geometric_model()
    assert m.rho == 2.0 and m.rho_c == pytest.approx(1.0)
    assert m.with_size(4, 6).hash != m.hash
    assert m.with_size(512, 1024).hash == m.hash
