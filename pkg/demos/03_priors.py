"""Prior elicitation and the implied scales of the hierarchy.

The hierarchical model's inverse-gamma priors are elicited by moment
matching: give a mean and a (large) variance for each variance
parameter, get back (shape, rate).  This script reproduces the default
elicitations, translates them into central 90% intervals on the sd
scale, tabulates the joint priors implied for the regional means, and
collapses the hierarchy to the marginal prior a single site sees.
"""

import numpy as np

from borehole_gst import (
    HyperParameters,
    build_joint_mu_prior,
    build_joint_nu_prior,
    elicit_inverse_gamma,
    ig_sd_quantiles,
    marginalize_single_site,
)


def main():
    print("moment-matched inverse-gamma elicitations (mean, variance) -> (a, b):")
    settings = [
        ("measurement error var (K^2)", 0.0121, 1.0),
        ("model error var (K^2)", 0.25, 100.0),
        ("flow variation var (W^2/m^4)", 0.01, 1.0),
        ("history variation var (K^2)", 0.8, 10.0),
    ]
    for name, mean, var in settings:
        a, b = elicit_inverse_gamma(mean, var)
        lo, hi = ig_sd_quantiles(a, b)
        print(f"  {name:<30} a={a:.6f} b={b:.6f}  sd 90% in [{lo:.4f}, {hi:.4f}]")

    hyper = HyperParameters()
    print("\njoint prior on the regional flow means (nu_D, nu_S):")
    spec = build_joint_nu_prior(hyper)
    print(f"  mean {spec.mean} W/m^2")
    print(f"  sd {1e3 * spec.sd[0]:.2f} mW/m^2, cross-region corr {spec.correlation(0, 1):.2f}")

    print("\nthe cross-region correlation is the share of prior variance held")
    print("by the common component:")
    print(f"  {'eta (mW)':>9} {'eta0 (mW)':>10} {'sd (mW)':>8} {'corr':>6}")
    for eta, eta0 in ((10, 20), (20, 20), (30, 20), (100, 0), (100, 67)):
        h = hyper.with_updates(eta2_D=(eta / 1e3) ** 2, eta2_S=(eta / 1e3) ** 2, eta2_0=(eta0 / 1e3) ** 2)
        s = build_joint_nu_prior(h)
        print(f"  {eta:9d} {eta0:10d} {1e3 * s.sd[0]:8.2f} {s.correlation(0, 1):6.2f}")

    print("\njoint prior on paired history-mean components (mu_D[k], mu_S[k]):")
    mu_spec = build_joint_mu_prior(hyper, K=1)
    print(f"  sd {mu_spec.sd[0]:.4f} K, corr {mu_spec.correlation(0, 1):.3f}")

    print("\nmarginal prior a single desert site sees once the hierarchy is")
    print("integrated out (used by the single-site sampler):")
    prior = marginalize_single_site(hyper, "desert", K=11)
    print(f"  history: N(mu, Gamma) with mu = 0 and Gamma = {prior.Gamma[0, 0]:.1f} I")
    print(f"  heat flow: N({prior.q0_mean:.2f}, {prior.q0_var:.4f}) W/m^2")
    print(f"  (prior sd {1e3 * np.sqrt(prior.q0_var):.1f} mW/m^2 around {1e3 * prior.q0_mean:.0f} mW/m^2)")


if __name__ == "__main__":
    main()
