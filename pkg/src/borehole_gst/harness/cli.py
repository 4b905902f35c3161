"""Command-line front end.

Subcommands: ``simulate``, ``preprocess``, ``fit-multi``, ``fit-single``,
``sensitivity``, ``summarize``.  Shared flags: ``--config`` (TOML path or
packaged preset name), ``--seed`` (overrides the config seed), ``--out``
(output directory).  Exit status 0 on success; on failure a one-line
JSON error record goes to stderr and the status is nonzero.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from ..posterior import flow_report, summarize, temperature_change
from ..preprocess import estimate_intercept_and_flow
from ..priors import marginalize_single_site
from ..gibbs import run_chain, run_single_site
from .dataio import load_chain, load_site_table, save_chain, write_summary_csv
from .runconfig import RunConfig, load_run_config
from .sensitivity import PLANS, sensitivity_sweep
from .synthetic import generate_dataset

_CHANGE_BASELINES = (1600.0, 1700.0, 1800.0, 1900.0)


def _load_config(args) -> RunConfig:
    name = args.config if args.config else "sanrafael-default"
    return load_run_config(name)


def _out_dir(args, default: str) -> Path:
    out = Path(args.out) if args.out else Path(default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_profiles(cfg: RunConfig):
    if cfg.data_dir is None:
        raise ValueError("config has no [data].dir; cannot locate sites.csv")
    return load_site_table(cfg.data_dir)


def _write_chain_outputs(chain, out: Path):
    save_chain(chain, out)
    table = summarize(chain)
    write_summary_csv(table, out / "summary.csv")
    with open(out / "flows.txt", "w") as fh:
        for name, line in flow_report(chain).items():
            fh.write(f"{name}  {line}  mW/m^2\n")
    _write_changes_csv(chain, out / "changes.csv")
    print(f"wrote {out}/: manifest.json, draws, summary.csv, flows.txt, changes.csv")


def _write_changes_csv(chain, path: Path):
    keys = chain.site_keys("th") + [k for k in ("mu_D", "mu_S") if k in chain.draws]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "baseline", "mean", "sd", "ci90_lo", "ci90_hi"])
        for key in keys:
            for baseline in _CHANGE_BASELINES:
                d = temperature_change(chain, key, baseline)
                lo, hi = np.quantile(d, [0.05, 0.95])
                writer.writerow(
                    [
                        key,
                        f"{baseline:.0f}",
                        f"{np.mean(d):.6g}",
                        f"{np.std(d, ddof=1):.6g}",
                        f"{lo:.6g}",
                        f"{hi:.6g}",
                    ]
                )


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, "data")
    noise_seed = args.seed if args.seed is not None else cfg.noise_seed
    truth = generate_dataset(out, truth_seed=cfg.truth_seed, noise_seed=noise_seed)
    print(
        f"simulate: preset {truth.preset!r}, truth seed {truth.seed}, "
        f"noise seed {noise_seed}, {len(truth.sites)} sites"
    )
    print(f"wrote {out}/sites.csv, per-site CSVs, truth.json")
    return 0


def cmd_preprocess(args) -> int:
    cfg = _load_config(args)
    profiles = _load_profiles(cfg)
    rows = []
    for p in profiles:
        fit = estimate_intercept_and_flow(p, cfg.cutoffs.get(p.site_id))
        rows.append((p.site_id, p.region, fit))
        print(
            f"{p.site_id:8s} {p.region:7s} cutoff {fit.cutoff:5.0f} m  n {fit.n_used:3d}  "
            f"T0_hat {fit.T0_hat:6.2f} C (se {fit.se_T0:.3f})  "
            f"q0_hat {1e3 * fit.q0_hat:6.2f} mW/m^2 (se {1e3 * fit.se_q0:.2f})"
        )
    if args.out:
        out = _out_dir(args, "preprocess")
        with open(out / "preprocess.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                ["site_id", "region", "cutoff_m", "n_used", "T0_hat_C", "se_T0",
                 "q0_hat_W_m2", "se_q0"]
            )
            for site_id, region, fit in rows:
                writer.writerow(
                    [site_id, region, fit.cutoff, fit.n_used,
                     repr(fit.T0_hat), repr(fit.se_T0), repr(fit.q0_hat), repr(fit.se_q0)]
                )
        print(f"wrote {out}/preprocess.csv")
    return 0


def cmd_fit_multi(args) -> int:
    cfg = _load_config(args)
    profiles = _load_profiles(cfg)
    gibbs_cfg = cfg.gibbs_config(seed=args.seed)
    print(
        f"fit-multi: {len(profiles)} sites, K={len(gibbs_cfg.breakpoints)}, "
        f"n_iter={gibbs_cfg.n_iter} (burn {gibbs_cfg.n_burn}, thin {gibbs_cfg.thin}), "
        f"phi={cfg.hyper().phi:g}, seed {gibbs_cfg.seed}"
    )
    chain = run_chain(profiles, cfg.hyper(), gibbs_cfg)
    print(f"chain finished in {chain.wall_time_s:.1f} s")
    _write_chain_outputs(chain, _out_dir(args, "chain-multi"))
    return 0


def cmd_fit_single(args) -> int:
    cfg = _load_config(args)
    profiles = _load_profiles(cfg)
    site_id = args.site or cfg.single_site
    if not site_id:
        raise ValueError("fit-single needs [single].site in the config or --site")
    matches = [p for p in profiles if p.site_id == site_id]
    if not matches:
        raise ValueError(f"site {site_id!r} not in {[p.site_id for p in profiles]}")
    profile = matches[0]
    gibbs_cfg = cfg.gibbs_config(seed=args.seed)
    hyper = cfg.hyper()
    prior = marginalize_single_site(hyper, profile.region, len(gibbs_cfg.breakpoints))
    print(
        f"fit-single: site {site_id} ({profile.region}), "
        f"n_iter={gibbs_cfg.n_iter} (burn {gibbs_cfg.n_burn}), seed {gibbs_cfg.seed}"
    )
    chain = run_single_site(profile, prior, hyper, gibbs_cfg)
    print(f"chain finished in {chain.wall_time_s:.1f} s")
    _write_chain_outputs(chain, _out_dir(args, f"chain-{site_id}"))
    return 0


def cmd_sensitivity(args) -> int:
    cfg = _load_config(args)
    profiles = _load_profiles(cfg)
    plan = args.plan or cfg.sensitivity_plan
    if not plan:
        raise ValueError(f"no plan given; use --plan or [sensitivity].plan (one of {PLANS})")
    gibbs_cfg = cfg.gibbs_config(seed=args.seed)
    print(f"sensitivity: plan {plan!r}, seed {gibbs_cfg.seed}")
    records = sensitivity_sweep(profiles, cfg.hyper(), gibbs_cfg, plan)
    out = _out_dir(args, f"sensitivity-{plan}")
    with open(out / "sensitivity.json", "w") as fh:
        json.dump({"plan": plan, "variants": records}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    failed = [r["name"] for r in records if "error" in r]
    for r in records:
        status = "FAILED" if "error" in r else "ok"
        print(f"  {r['name']:28s} {status}")
    print(f"wrote {out}/sensitivity.json")
    return 1 if failed else 0


def cmd_summarize(args) -> int:
    if not args.chain:
        raise ValueError("summarize needs --chain <dir> (a saved chain directory)")
    chain = load_chain(args.chain)
    out = _out_dir(args, Path(args.chain) / "summary")
    write_summary_csv(summarize(chain), out / "summary.csv")
    with open(out / "flows.txt", "w") as fh:
        for name, line in flow_report(chain).items():
            fh.write(f"{name}  {line}  mW/m^2\n")
    _write_changes_csv(chain, out / "changes.csv")
    print(f"summarize: {chain.variant} chain, {chain.n_stored} stored draws")
    print(f"wrote {out}/summary.csv, flows.txt, changes.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="borehole-gst",
        description="Ground-surface temperature reconstruction from boreholes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config path or packaged preset name")
        p.add_argument("--seed", type=int, help="seed override (unsigned integer)")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("simulate", help="generate a synthetic dataset")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("preprocess", help="deep-segment intercept/flow regressions")
    common(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("fit-multi", help="fit the two-region hierarchical model")
    common(p)
    p.set_defaults(func=cmd_fit_multi)

    p = sub.add_parser("fit-single", help="fit one site with its marginal prior")
    common(p)
    p.add_argument("--site", help="site id (defaults to [single].site)")
    p.set_defaults(func=cmd_fit_single)

    p = sub.add_parser("sensitivity", help="run a named sensitivity plan")
    common(p)
    p.add_argument("--plan", choices=PLANS, help="plan name (defaults to [sensitivity].plan)")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("summarize", help="summarize a saved chain directory")
    common(p)
    p.add_argument("--chain", help="chain directory written by a fit command")
    p.set_defaults(func=cmd_summarize)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as err:  # one-line machine-readable error record
        record = {
            "error": type(err).__name__,
            "message": str(err),
            "command": args.command,
        }
        print(json.dumps(record), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
