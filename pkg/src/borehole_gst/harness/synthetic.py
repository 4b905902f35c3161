"""Synthetic borehole generation for a two-region desert/swell study.

The built-in ``san-rafael`` preset mirrors a nine-borehole field
campaign: five desert-flank holes (SRD-*) and four swell holes (SRS-*,
WSR-1), each with its logged surface temperature, logging year, and
stratigraphic conductivity column.  True ground-surface histories are
drawn once per truth seed: desert sites share a common warming ramp
with small site wiggles, swell sites get individually distinct smooth
curves, so the two regions exercise both the "similar histories" and
"diverse histories" regimes of the hierarchical model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..forward import (
    BoreholeProfile,
    TimeGrid,
    build_forward_operator,
    thermal_resistance,
)
from ..gibbs import DEFAULT_BREAKPOINTS
from .dataio import write_site_table


@dataclass(frozen=True)
class SiteSpec:
    """Fixed metadata for one synthetic borehole."""

    site_id: str
    region: str
    T0: float                # logged surface temperature, deg C
    log_year: float
    layers: tuple            # ((bottom_depth_m, conductivity_W_mK), ...)
    q0_true: float           # true basal heat flow, W/m^2


#: Nine-site preset: five desert-flank holes, four swell holes.
SAN_RAFAEL_SITES = (
    SiteSpec("SRD-1", "desert", 13.72, 1979.0,
             ((60.0, 2.91), (225.0, 4.09), (260.0, 3.96), (395.0, 3.86)), 0.056),
    SiteSpec("SRD-2", "desert", 15.12, 1976.0,
             ((25.0, 2.91), (215.0, 4.09), (275.0, 3.96), (365.0, 3.86)), 0.047),
    SiteSpec("SRD-3", "desert", 15.38, 1979.0,
             ((140.0, 4.09), (200.0, 3.96), (320.0, 3.86)), 0.045),
    SiteSpec("SRD-4", "desert", 15.51, 1979.0,
             ((145.0, 4.09), (210.0, 3.96), (320.0, 3.86)), 0.050),
    SiteSpec("SRD-7", "desert", 13.16, 1980.0,
             ((185.0, 4.09), (260.0, 3.96), (375.0, 3.86)), 0.045),
    SiteSpec("SRS-3", "swell", 10.76, 1979.0,
             ((250.0, 5.01), (390.0, 4.35), (400.0, 4.82)), 0.052),
    SiteSpec("SRS-4", "swell", 11.82, 1979.0,
             ((135.0, 2.91), (375.0, 4.18), (410.0, 3.86), (510.0, 4.17)), 0.057),
    SiteSpec("SRS-5", "swell", 11.82, 1979.0,
             ((55.0, 2.91), (350.0, 4.18), (400.0, 3.86), (480.0, 4.17)), 0.075),
    SiteSpec("WSR-1", "swell", 12.87, 1980.0,
             ((50.0, 4.10), (105.0, 3.96), (245.0, 3.43), (320.0, 2.91),
              (455.0, 4.18), (515.0, 3.86), (575.0, 4.17)), 0.068),
)

#: Desert-region warming ramp shared by all SRD histories (deg C relative
#: to the long-term surface mean), one value per default time interval.
_DESERT_RAMP = np.array(
    [-0.10, -0.15, -0.10, 0.00, -0.05, 0.10, 0.20, 0.35, 0.60, 0.90, 1.20]
)


@dataclass
class SyntheticTruth:
    """Ground truth behind one synthetic dataset."""

    preset: str
    seed: int
    sites: tuple
    breakpoints: np.ndarray
    histories: dict          # site_id -> (K,) true history
    sigma_Y: float           # measurement noise sd, K
    sigma: float             # model error sd, K
    depth_start: float = 20.0
    depth_step: float = 5.0

    def site(self, site_id: str) -> SiteSpec:
        for s in self.sites:
            if s.site_id == site_id:
                return s
        raise KeyError(site_id)

    @property
    def q0(self) -> dict:
        return {s.site_id: s.q0_true for s in self.sites}


def _smooth(x: np.ndarray) -> np.ndarray:
    """One pass of a 1-2-1 moving average with edge replication."""
    padded = np.r_[x[0], x, x[-1]]
    return np.convolve(padded, [0.25, 0.5, 0.25], mode="valid")


def make_truth(preset: str = "san-rafael", seed: int = 1979) -> SyntheticTruth:
    """Draw true histories for a preset; deterministic in the seed.

    Desert sites: common ramp plus ~0.15 K site wiggles.  Swell sites:
    a damped version of the ramp plus smooth ~0.5 K site-specific
    departures.
    """
    if preset != "san-rafael":
        raise ValueError(f"unknown preset {preset!r}")
    rng = np.random.default_rng(seed)
    breakpoints = np.asarray(DEFAULT_BREAKPOINTS)
    K = breakpoints.size
    histories = {}
    for spec in SAN_RAFAEL_SITES:
        if spec.region == "desert":
            histories[spec.site_id] = _DESERT_RAMP + 0.15 * rng.standard_normal(K)
        else:
            bump = _smooth(_smooth(rng.standard_normal(K)))
            histories[spec.site_id] = 0.6 * _DESERT_RAMP + 0.5 * bump
    return SyntheticTruth(
        preset=preset,
        seed=seed,
        sites=SAN_RAFAEL_SITES,
        breakpoints=breakpoints,
        histories=histories,
        sigma_Y=0.04,
        sigma=0.10,
    )


def blank_profile(truth: SyntheticTruth, site_id: str) -> BoreholeProfile:
    """The site's geometry with zeroed temperatures (for operators only)."""
    spec = truth.site(site_id)
    bottom = spec.layers[-1][0]
    depths = np.arange(truth.depth_start, bottom + 0.5 * truth.depth_step, truth.depth_step)
    return BoreholeProfile(
        site_id=spec.site_id,
        region=spec.region,
        depths=depths,
        temps=np.zeros_like(depths),
        layer_bottoms=np.array([b for b, _ in spec.layers]),
        conductivities=np.array([k for _, k in spec.layers]),
        T0=spec.T0,
        log_year=spec.log_year,
    )


def simulate_borehole(truth: SyntheticTruth, site_id: str, rng) -> BoreholeProfile:
    """Simulate one borehole's temperature profile from the truth.

    ``Y = A th + model_error + T0 + q0 R + measurement_error`` with
    independent N(0, sigma^2) and N(0, sigma_Y^2) errors, drawn in that
    order from ``rng`` (an integer seed or a Generator).
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    spec = truth.site(site_id)
    base = blank_profile(truth, site_id)
    grid = TimeGrid(breakpoints=truth.breakpoints, terminal=spec.log_year)
    A = build_forward_operator(base.depths, grid).A
    R = thermal_resistance(base)
    n = base.depths.size
    tr = A @ truth.histories[site_id] + truth.sigma * rng.standard_normal(n)
    temps = tr + spec.T0 + spec.q0_true * R + truth.sigma_Y * rng.standard_normal(n)
    return replace(base, temps=temps)


def simulate_all(truth: SyntheticTruth, seed: int) -> list:
    """Simulate every site in preset order from a single seeded stream."""
    rng = np.random.default_rng(seed)
    return [simulate_borehole(truth, s.site_id, rng) for s in truth.sites]


def write_truth(truth: SyntheticTruth, path):
    """Record the ground truth as JSON next to the generated dataset."""
    doc = {
        "preset": truth.preset,
        "seed": truth.seed,
        "sigma_Y": truth.sigma_Y,
        "sigma": truth.sigma,
        "depth_start": truth.depth_start,
        "depth_step": truth.depth_step,
        "breakpoints": [float(t) for t in truth.breakpoints],
        "sites": {
            s.site_id: {
                "region": s.region,
                "T0_C": s.T0,
                "log_year": s.log_year,
                "q0_true_W_m2": s.q0_true,
                "history_C": [float(v) for v in truth.histories[s.site_id]],
            }
            for s in truth.sites
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_truth(path) -> SyntheticTruth:
    """Read a truth JSON written by :func:`write_truth`."""
    with open(path) as fh:
        doc = json.load(fh)
    preset_layers = {s.site_id: s.layers for s in SAN_RAFAEL_SITES}
    sites = tuple(
        SiteSpec(
            site_id=sid,
            region=rec["region"],
            T0=rec["T0_C"],
            log_year=rec["log_year"],
            layers=preset_layers[sid],
            q0_true=rec["q0_true_W_m2"],
        )
        for sid, rec in doc["sites"].items()
    )
    return SyntheticTruth(
        preset=doc["preset"],
        seed=doc["seed"],
        sites=sites,
        breakpoints=np.asarray(doc["breakpoints"]),
        histories={sid: np.asarray(rec["history_C"]) for sid, rec in doc["sites"].items()},
        sigma_Y=doc["sigma_Y"],
        sigma=doc["sigma"],
        depth_start=doc["depth_start"],
        depth_step=doc["depth_step"],
    )


def generate_dataset(data_dir, truth_seed: int = 1979, noise_seed: int = 20) -> SyntheticTruth:
    """Write a complete synthetic dataset (CSVs plus truth.json)."""
    truth = make_truth(seed=truth_seed)
    profiles = simulate_all(truth, seed=noise_seed)
    data_dir = Path(data_dir)
    write_site_table(profiles, data_dir)
    write_truth(truth, data_dir / "truth.json")
    return truth
