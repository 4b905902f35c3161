"""Deep-segment regression and reduced-temperature estimates.

Below a region-dependent cutoff depth the transient surface signal has
died out and the profile is linear in thermal resistance:
``Y(z) = T0 + q0 * R(z)``.  Ordinary least squares on the deep segment
gives the fixed intercept ``T0`` and a provisional heat flow used to
initialize the sampler.  Subtracting the background trend yields the
reduced-temperature estimates that carry the climate signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forward import BoreholeProfile, thermal_resistance

#: Default deep-segment cutoffs by region, meters.
DEFAULT_CUTOFFS = {"desert": 150.0, "swell": 200.0}


@dataclass(frozen=True)
class DeepRegressionResult:
    """OLS fit of temperature on thermal resistance over the deep segment."""

    T0_hat: float
    q0_hat: float
    se_T0: float
    se_q0: float
    cutoff: float
    n_used: int


def default_cutoff(profile: BoreholeProfile) -> float:
    """Region-dependent default cutoff depth for the deep segment."""
    return DEFAULT_CUTOFFS[profile.region]


def estimate_intercept_and_flow(
    profile: BoreholeProfile, cutoff: float | None = None
) -> DeepRegressionResult:
    """Regress ``Y`` on ``R`` over depths strictly below ``cutoff``.

    Parameters
    ----------
    profile : BoreholeProfile
    cutoff : float, optional
        Cutoff depth in meters; points with ``z > cutoff`` enter the
        regression.  Defaults to 150 m for desert sites and 200 m for
        swell sites.

    Returns
    -------
    DeepRegressionResult
        Intercept ``T0_hat`` (deg C), slope ``q0_hat`` (W/m^2), and their
        usual least-squares standard errors.

    Raises
    ------
    ValueError
        If fewer than 3 measurements lie below the cutoff, or the design
        is degenerate (all deep resistances equal).
    """
    if cutoff is None:
        cutoff = default_cutoff(profile)
    cutoff = float(cutoff)
    R = thermal_resistance(profile)
    deep = profile.depths > cutoff
    n = int(deep.sum())
    if n < 3:
        raise ValueError(
            f"{profile.site_id}: only {n} measurements below {cutoff} m; need at least 3"
        )
    Rd = R[deep]
    Yd = profile.temps[deep]
    if np.ptp(Rd) == 0.0:
        raise ValueError(f"{profile.site_id}: degenerate deep segment (all R equal)")
    X = np.column_stack([np.ones(n), Rd])
    XtX = X.T @ X
    beta = np.linalg.solve(XtX, X.T @ Yd)
    resid = Yd - X @ beta
    # classical OLS standard errors; s^2 = RSS / (n - 2)
    s2 = float(resid @ resid) / (n - 2)
    cov = s2 * np.linalg.inv(XtX)
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    return DeepRegressionResult(
        T0_hat=float(beta[0]),
        q0_hat=float(beta[1]),
        se_T0=float(se[0]),
        se_q0=float(se[1]),
        cutoff=cutoff,
        n_used=n,
    )


def reduced_estimates(profile: BoreholeProfile, T0: float, q0: float) -> np.ndarray:
    """Reduced temperatures ``Y(z_i) - T0 - q0 * R(z_i)``, deg C."""
    R = thermal_resistance(profile)
    return profile.temps - float(T0) - float(q0) * R
