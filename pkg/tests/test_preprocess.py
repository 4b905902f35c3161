"""Deep-segment regressions and reduced temperatures."""

import numpy as np
import pytest

from borehole_gst import (
    BoreholeProfile,
    default_cutoff,
    estimate_intercept_and_flow,
    reduced_estimates,
    thermal_resistance,
)


def linear_profile(T0=12.0, q0=0.05, noise=None, region="desert", n=40):
    depths = np.linspace(20.0, 410.0, n)
    layer_bottoms = np.array([150.0, 410.0])
    conductivities = np.array([2.5, 4.0])
    p = BoreholeProfile(
        site_id="L-1",
        region=region,
        depths=depths,
        temps=np.zeros(n),
        layer_bottoms=layer_bottoms,
        conductivities=conductivities,
        T0=T0,
        log_year=1980.0,
    )
    temps = T0 + q0 * thermal_resistance(p)
    if noise is not None:
        temps = temps + noise
    return BoreholeProfile(
        site_id="L-1",
        region=region,
        depths=depths,
        temps=temps,
        layer_bottoms=layer_bottoms,
        conductivities=conductivities,
        T0=T0,
        log_year=1980.0,
    )


def test_noiseless_profile_recovered_exactly():
    p = linear_profile(T0=12.34, q0=0.061)
    fit = estimate_intercept_and_flow(p)
    assert abs(fit.T0_hat - 12.34) < 1e-12
    assert abs(fit.q0_hat - 0.061) < 1e-12
    assert fit.se_T0 < 1e-12 and fit.se_q0 < 1e-12


def test_default_cutoffs_by_region():
    assert default_cutoff(linear_profile(region="desert")) == 150.0
    assert default_cutoff(linear_profile(region="swell")) == 200.0


def test_cutoff_is_strict():
    p = linear_profile()
    fit = estimate_intercept_and_flow(p, cutoff=200.0)
    assert fit.cutoff == 200.0
    assert fit.n_used == int(np.sum(p.depths > 200.0))


def test_se_matches_dense_ols_formula():
    rng = np.random.default_rng(3)
    p = linear_profile(noise=0.05 * rng.standard_normal(40))
    fit = estimate_intercept_and_flow(p, cutoff=100.0)
    # independent computation: explicit normal equations and residual variance
    R = thermal_resistance(p)
    keep = p.depths > 100.0
    X = np.column_stack([np.ones(keep.sum()), R[keep]])
    y = p.temps[keep]
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    s2 = resid @ resid / (keep.sum() - 2)
    cov = s2 * np.linalg.inv(X.T @ X)
    assert np.allclose([fit.T0_hat, fit.q0_hat], beta, rtol=1e-10)
    assert np.allclose([fit.se_T0, fit.se_q0], np.sqrt(np.diag(cov)), rtol=1e-8)


def test_reduced_estimates_identity():
    p = linear_profile(noise=0.1 * np.sin(np.arange(40)))
    tr = reduced_estimates(p, T0=12.0, q0=0.05)
    assert np.allclose(tr, p.temps - 12.0 - 0.05 * thermal_resistance(p), atol=1e-15)


def test_too_few_deep_points_raises():
    p = linear_profile()
    with pytest.raises(ValueError, match="at least 3"):
        estimate_intercept_and_flow(p, cutoff=405.0)
