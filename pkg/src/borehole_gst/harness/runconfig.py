"""Run configuration: TOML files mapping onto sampler settings.

Schema (all sections optional unless noted)::

    [run]
    variant = "multi"        # "multi" | "single"
    n_iter = 30000
    n_burn = 2000
    thin = 1
    seed = 20260815          # required here or via --seed
    phi = 0.0
    depth_unit = 5.0

    [data]
    dir = "data"             # directory containing sites.csv

    [grid]
    breakpoints = [1600.0, 1650.0, ...]

    [hyper]                  # overrides of HyperParameters fields
    nu0 = 0.06

    [single]                 # variant = "single" only
    site = "SRD-1"

    [cutoffs]                # per-site deep-segment cutoffs, metres
    "SRD-1" = 150.0

    [sensitivity]
    plan = "flow-prior"      # see sensitivity.PLANS

    [simulate]
    truth_seed = 1979
    noise_seed = 20

Relative paths are resolved against the config file's directory.  A
bare name ("sanrafael-default") loads the packaged preset of the same
name instead of a file on disk.
"""

from __future__ import annotations

import dataclasses
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from ..gibbs import DEFAULT_BREAKPOINTS, GibbsConfig
from ..priors import HyperParameters

_HYPER_FIELDS = {f.name for f in dataclasses.fields(HyperParameters)}


@dataclasses.dataclass
class RunConfig:
    """Parsed run configuration; see the module docstring for the schema."""

    variant: str = "multi"
    n_iter: int = 30_000
    n_burn: int = 2_000
    thin: int = 1
    seed: int | None = None
    phi: float = 0.0
    depth_unit: float = 5.0
    data_dir: Path | None = None
    breakpoints: tuple = DEFAULT_BREAKPOINTS
    hyper_overrides: dict = dataclasses.field(default_factory=dict)
    single_site: str | None = None
    cutoffs: dict = dataclasses.field(default_factory=dict)
    sensitivity_plan: str | None = None
    truth_seed: int = 1979
    noise_seed: int = 20

    def hyper(self) -> HyperParameters:
        overrides = dict(self.hyper_overrides)
        overrides.setdefault("phi", self.phi)
        return HyperParameters().with_updates(**overrides)

    def gibbs_config(self, seed: int | None = None, **extra) -> GibbsConfig:
        seed = self.seed if seed is None else seed
        if seed is None:
            raise ValueError("a seed is required (config [run].seed or --seed)")
        kwargs = {
            "n_iter": self.n_iter,
            "n_burn": self.n_burn,
            "thin": self.thin,
            "seed": int(seed),
            "breakpoints": tuple(self.breakpoints),
            "depth_unit": self.depth_unit,
            "cutoffs": dict(self.cutoffs),
        }
        kwargs.update(extra)
        return GibbsConfig(**kwargs)


def _parse(doc: dict, base_dir: Path | None) -> RunConfig:
    cfg = RunConfig()
    run = doc.get("run", {})
    for name in ("variant", "n_iter", "n_burn", "thin", "seed", "phi", "depth_unit"):
        if name in run:
            setattr(cfg, name, run[name])
    if cfg.variant not in ("multi", "single"):
        raise ValueError(f"[run].variant must be 'multi' or 'single', got {cfg.variant!r}")
    if cfg.variant == "single" and "n_iter" not in run:
        cfg.n_iter = 10_000  # the shorter standard single-site protocol

    data = doc.get("data", {})
    if "dir" in data:
        path = Path(data["dir"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        cfg.data_dir = path

    grid = doc.get("grid", {})
    if "breakpoints" in grid:
        cfg.breakpoints = tuple(float(t) for t in grid["breakpoints"])

    hyper = doc.get("hyper", {})
    unknown = set(hyper) - _HYPER_FIELDS
    if unknown:
        raise ValueError(f"[hyper]: unknown fields {sorted(unknown)}")
    cfg.hyper_overrides = dict(hyper)

    cfg.single_site = doc.get("single", {}).get("site")
    if cfg.variant == "single" and not cfg.single_site:
        raise ValueError("variant 'single' requires [single].site")

    cfg.cutoffs = {k: float(v) for k, v in doc.get("cutoffs", {}).items()}
    cfg.sensitivity_plan = doc.get("sensitivity", {}).get("plan")

    sim = doc.get("simulate", {})
    cfg.truth_seed = int(sim.get("truth_seed", cfg.truth_seed))
    cfg.noise_seed = int(sim.get("noise_seed", cfg.noise_seed))
    return cfg


def load_run_config(path_or_name) -> RunConfig:
    """Load a TOML run config from a path, or a packaged preset by name."""
    path = Path(path_or_name)
    if path.exists():
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
        return _parse(doc, path.resolve().parent)
    name = str(path_or_name)
    if "/" not in name and not name.endswith(".toml"):
        ref = resources.files("borehole_gst").joinpath("presets", f"{name}.toml")
        if ref.is_file():
            doc = tomllib.loads(ref.read_text())
            return _parse(doc, None)
    raise FileNotFoundError(f"no config file or packaged preset named {path_or_name!r}")
