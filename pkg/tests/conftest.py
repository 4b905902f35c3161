import dataclasses
from pathlib import Path

import pytest

from borehole_gst.harness import synthetic

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def truth():
    return synthetic.make_truth()


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


def tiny_profile(truth, site_id, seed, n_obs=6):
    """A simulated profile truncated to its first n_obs depths."""
    p = synthetic.simulate_borehole(truth, site_id, seed)
    return dataclasses.replace(p, depths=p.depths[:n_obs], temps=p.temps[:n_obs])
