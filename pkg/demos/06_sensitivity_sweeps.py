"""Sensitivity sweeps: how the conclusions move when the inputs move.

Runs two of the built-in sweep plans on the bundled dataset at reduced
chain length: the flow-mean prior sweep (posterior uncertainty should
track prior uncertainty) and the error-correlation sweep (an AR(1)
model-error structure with increasing phi).  Each variant is an
independent fit; failures would be isolated into per-variant error
records rather than aborting the sweep.
"""

import argparse
from pathlib import Path

from borehole_gst import GibbsConfig, HyperParameters
from borehole_gst.harness import load_site_table, sensitivity_sweep

DATA_DIR = Path(__file__).resolve().parents[1] / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-iter", type=int, default=4000)
    ap.add_argument("--n-burn", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    profiles = load_site_table(DATA_DIR)
    hyper = HyperParameters()
    config = GibbsConfig(n_iter=args.n_iter, n_burn=args.n_burn, seed=args.seed)

    print("flow-mean prior sweep (regional flow posteriors, mW/m^2):")
    print(f"{'variant':>22} {'prior sd':>9} {'nu_D':>14} {'nu_S':>14}")
    for r in sensitivity_sweep(profiles, hyper, config, "flow-prior"):
        if "error" in r:
            print(f"{r['name']:>22}  FAILED: {r['error']['type']}")
            continue
        print(
            f"{r['name']:>22} {r['prior_sd_mW']:9.2f} "
            f"{r['nu_D_mean_mW']:6.1f} sd {r['nu_D_sd_mW']:4.1f} "
            f"{r['nu_S_mean_mW']:6.1f} sd {r['nu_S_sd_mW']:4.1f}"
        )
    print("  -> the posterior sd of the regional means rises with the prior sd")

    print("\nerror-correlation sweep (AR(1) model error in depth):")
    print(f"{'variant':>22} {'nu_D':>14} {'nu_S':>14}")
    for r in sensitivity_sweep(profiles, hyper, config, "error-correlation"):
        if "error" in r:
            print(f"{r['name']:>22}  FAILED: {r['error']['type']}")
            continue
        print(
            f"{r['name']:>22} "
            f"{r['nu_D_mean_mW']:6.1f} sd {r['nu_D_sd_mW']:4.1f} "
            f"{r['nu_S_mean_mW']:6.1f} sd {r['nu_S_sd_mW']:4.1f}"
        )
    print("  -> conclusions that survive phi = 0.65 and 0.85 are robust to the")
    print("     independence assumption on the model error")


if __name__ == "__main__":
    main()
