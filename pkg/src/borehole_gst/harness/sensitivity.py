"""Prior- and input-sensitivity sweeps over the hierarchical fit.

Each named plan is a list of variants; ``sensitivity_sweep`` runs the
fit once per variant and reports how the flow-related posterior moves.
Failures are isolated per variant: a variant that errors contributes an
error record instead of aborting the sweep.

Plans
-----
``flow-prior``
    Widen the regional heat-flow prior.  Variants set (eta2_D = eta2_S,
    eta2_0); the implied prior sd of each regional mean flow is
    sqrt(eta2 + eta2_0) and the implied prior correlation between the
    two regional means is eta2_0 / (eta2 + eta2_0).
``history-prior``
    Same exercise for the regional history means via (sigma2_D =
    sigma2_S, sigma2_0).
``error-correlation``
    AR(1) model-error correlation with phi in {0, 0.65, 0.85}.
``t0-shift``
    Perturb every site's surface intercept T0 by -3, 0, +3 times its
    own deep-regression standard error.  Warming the assumed intercept
    cools the apparent anomaly profile, so inferred flows move opposite
    to the shift.
"""

from __future__ import annotations

import dataclasses
import traceback

import numpy as np

from ..gibbs import GibbsConfig, run_chain
from ..preprocess import estimate_intercept_and_flow
from ..priors import HyperParameters, build_joint_mu_prior, build_joint_nu_prior

#: (eta2 = eta2_D = eta2_S, eta2_0) in (W/m^2)^2; 10 mW/m^2 = 0.01 W/m^2.
FLOW_PRIOR_VARIANTS = (
    (0.010**2, 0.020**2),
    (0.020**2, 0.020**2),
    (0.030**2, 0.020**2),
    (0.100**2, 0.000**2),
    (0.100**2, 0.067**2),
)

#: (sigma2 = sigma2_D = sigma2_S, sigma2_0) in K^2.
HISTORY_PRIOR_VARIANTS = (
    (0.2, 0.1),
    (0.1, 0.1),
    (0.2, 0.0),
    (0.3, 0.15),
)

PHI_VARIANTS = (0.0, 0.65, 0.85)

PLANS = ("flow-prior", "history-prior", "error-correlation", "t0-shift")


def flow_prior_descriptors(hyper: HyperParameters) -> dict:
    """Implied prior sd (mW/m^2) and correlation of the regional flow means."""
    spec = build_joint_nu_prior(hyper)
    return {
        "prior_sd_mW": 1e3 * spec.sd[0],
        "prior_corr": spec.correlation(0, 1),
    }


def history_prior_descriptors(hyper: HyperParameters) -> dict:
    """Implied prior sd (K) and correlation of paired history-mean components."""
    spec = build_joint_mu_prior(hyper, K=1)
    return {"prior_sd_K": float(spec.sd[0]), "prior_corr": spec.correlation(0, 1)}


def _flow_posterior_summary(chain) -> dict:
    out = {}
    for key in ("nu_D", "nu_S"):
        x = chain.draws[key]
        out[f"{key}_mean_mW"] = 1e3 * float(np.mean(x))
        out[f"{key}_sd_mW"] = 1e3 * float(np.std(x, ddof=1))
    out["q0_mean_mW"] = {
        site: 1e3 * float(np.mean(chain.draws[f"q0:{site}"])) for site in chain.site_ids
    }
    return out


def _run_variant(profiles, hyper, config) -> dict:
    chain = run_chain(profiles, hyper, config)
    return _flow_posterior_summary(chain)


def sensitivity_sweep(
    profiles,
    hyper: HyperParameters,
    config: GibbsConfig,
    plan: str,
    t0_scale: float = 3.0,
) -> list:
    """Run one named sensitivity plan; one result record per variant.

    Every record carries ``name`` and ``params``; successful fits add
    prior descriptors and posterior flow summaries, failed ones an
    ``error`` entry with the exception type, message, and traceback.
    """
    if plan not in PLANS:
        raise ValueError(f"unknown plan {plan!r}; available: {PLANS}")
    variants = []
    if plan == "flow-prior":
        for eta2, eta2_0 in FLOW_PRIOR_VARIANTS:
            h = hyper.with_updates(eta2_D=eta2, eta2_S=eta2, eta2_0=eta2_0)
            variants.append(
                (
                    f"eta={1e3 * np.sqrt(eta2):.0f}mW,eta0={1e3 * np.sqrt(eta2_0):.0f}mW",
                    {"eta2": eta2, "eta2_0": eta2_0},
                    flow_prior_descriptors(h),
                    profiles,
                    h,
                    config,
                )
            )
    elif plan == "history-prior":
        for s2, s2_0 in HISTORY_PRIOR_VARIANTS:
            h = hyper.with_updates(sigma2_D=s2, sigma2_S=s2, sigma2_0=s2_0)
            variants.append(
                (
                    f"sigma2={s2:g},sigma2_0={s2_0:g}",
                    {"sigma2": s2, "sigma2_0": s2_0},
                    history_prior_descriptors(h),
                    profiles,
                    h,
                    config,
                )
            )
    elif plan == "error-correlation":
        for phi in PHI_VARIANTS:
            h = hyper.with_updates(phi=phi)
            variants.append((f"phi={phi:g}", {"phi": phi}, {}, profiles, h, config))
    else:  # t0-shift: +/- 3 standard errors of each site's own T0 regression
        se = {
            p.site_id: estimate_intercept_and_flow(p, config.cutoffs.get(p.site_id)).se_T0
            for p in profiles
        }
        for scale in (-t0_scale, 0.0, +t0_scale):
            shifted = [
                dataclasses.replace(p, T0=p.T0 + scale * se[p.site_id]) for p in profiles
            ]
            variants.append(
                (
                    f"T0{scale:+g}se",
                    {"t0_scale": scale, "se_T0": {k: float(v) for k, v in se.items()}},
                    {},
                    shifted,
                    hyper,
                    config,
                )
            )

    records = []
    for name, params, descriptors, profs, h, cfg in variants:
        record = {"name": name, "params": params, **descriptors}
        try:
            record.update(_run_variant(profs, h, cfg))
        except Exception as err:  # per-variant isolation
            record["error"] = {
                "type": type(err).__name__,
                "message": str(err),
                "traceback": traceback.format_exc(),
            }
        records.append(record)
    return records
