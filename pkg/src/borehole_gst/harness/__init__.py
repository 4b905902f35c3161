"""Data I/O, synthetic-data generation, validation oracles, and the CLI."""

from .dataio import (
    load_borehole,
    load_chain,
    load_site_table,
    save_chain,
    write_borehole,
    write_site_table,
)
from .oracles import oracle_posterior_tiny
from .runconfig import RunConfig, load_run_config
from .sensitivity import sensitivity_sweep
from .synthetic import SiteSpec, SyntheticTruth, make_truth, simulate_borehole

__all__ = [
    "RunConfig",
    "SiteSpec",
    "SyntheticTruth",
    "load_borehole",
    "load_chain",
    "load_run_config",
    "load_site_table",
    "make_truth",
    "oracle_posterior_tiny",
    "save_chain",
    "sensitivity_sweep",
    "simulate_borehole",
    "write_borehole",
    "write_site_table",
]
