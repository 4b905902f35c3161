"""Reading and writing borehole data and stored chains.

File formats
------------
* profile CSV: header ``depth_m,temp_C``, one measurement per row,
  depths increasing.
* layers CSV: header ``bottom_depth_m,conductivity_W_mK``, one
  stratigraphic layer per row, bottom depths increasing.
* site table CSV (``sites.csv``): one borehole per row with columns
  ``site_id,region,T0_C,log_year,profile_file,layers_file``; file
  columns are paths relative to the table's directory.

A stored chain is a directory: ``manifest.json`` (run metadata plus a
config hash), one ``th_<site>.csv`` of history draws per site,
``site_scalars.csv`` (q0 / sigma2_Y / sigma2 draws for every site),
``region_params.csv`` (hierarchical parameters; multi-site runs only),
and ``tr_draws.npz`` with the reduced-temperature draws.  All writers
are byte-deterministic: floats are written with ``%.17g`` (which
round-trips float64) and the npz member timestamps are pinned, so two
runs with the same config and seed produce identical bytes everywhere
except the manifest's ``wall_time_s`` entry.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import zipfile
from pathlib import Path

import numpy as np
from numpy.lib import format as npy_format

from .. import __version__
from ..forward import BoreholeProfile
from ..gibbs import Chain

_FLOAT_FMT = "%.17g"


def _fmt(x: float) -> str:
    return _FLOAT_FMT % float(x)


# ---------------------------------------------------------------------------
# borehole profiles
# ---------------------------------------------------------------------------


def load_borehole(
    profile_path,
    layers_path,
    *,
    site_id: str,
    region: str,
    T0: float,
    log_year: float,
) -> BoreholeProfile:
    """Read one borehole from a profile CSV and a layers CSV."""
    depths, temps = _read_two_column(profile_path, ("depth_m", "temp_C"))
    bottoms, conds = _read_two_column(layers_path, ("bottom_depth_m", "conductivity_W_mK"))
    return BoreholeProfile(
        site_id=site_id,
        region=region,
        depths=depths,
        temps=temps,
        layer_bottoms=bottoms,
        conductivities=conds,
        T0=T0,
        log_year=log_year,
    )


def _read_two_column(path, expected_header):
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != list(expected_header):
            raise ValueError(
                f"{path}: expected header {','.join(expected_header)!r}, got {header!r}"
            )
        col0, col1 = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                col0.append(float(row[0]))
                col1.append(float(row[1]))
            except ValueError as err:
                raise ValueError(f"{path}:{lineno}: {err}") from None
    return np.array(col0), np.array(col1)


def write_borehole(profile: BoreholeProfile, profile_path, layers_path):
    """Write one borehole's profile and layers CSVs."""
    _write_two_column(
        profile_path, ("depth_m", "temp_C"), profile.depths, profile.temps
    )
    _write_two_column(
        layers_path,
        ("bottom_depth_m", "conductivity_W_mK"),
        profile.layer_bottoms,
        profile.conductivities,
    )


def _write_two_column(path, header, col0, col1):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for a, b in zip(col0, col1):
            writer.writerow([_fmt(a), _fmt(b)])


def load_site_table(data_dir) -> list:
    """Read every borehole listed in ``<data_dir>/sites.csv``."""
    data_dir = Path(data_dir)
    table = data_dir / "sites.csv"
    profiles = []
    with open(table, newline="") as fh:
        for row in csv.DictReader(fh):
            profiles.append(
                load_borehole(
                    data_dir / row["profile_file"],
                    data_dir / row["layers_file"],
                    site_id=row["site_id"],
                    region=row["region"],
                    T0=float(row["T0_C"]),
                    log_year=float(row["log_year"]),
                )
            )
    if not profiles:
        raise ValueError(f"{table}: no sites listed")
    return profiles


def write_site_table(profiles, data_dir):
    """Write ``sites.csv`` plus per-site profile/layer CSVs under ``data_dir``."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    with open(data_dir / "sites.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["site_id", "region", "T0_C", "log_year", "profile_file", "layers_file"]
        )
        for p in profiles:
            prof_name = f"{p.site_id}_profile.csv"
            lay_name = f"{p.site_id}_layers.csv"
            write_borehole(p, data_dir / prof_name, data_dir / lay_name)
            writer.writerow(
                [p.site_id, p.region, _fmt(p.T0), _fmt(p.log_year), prof_name, lay_name]
            )


# ---------------------------------------------------------------------------
# stored chains
# ---------------------------------------------------------------------------


def config_hash(metadata: dict) -> str:
    """sha256 of the canonical (sorted-key) JSON encoding of run metadata."""
    canon = json.dumps(metadata, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _write_npz_deterministic(path, arrays: dict):
    """npz writer with pinned member timestamps (np.savez stamps wall time)."""
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        for name in sorted(arrays):
            buf = io.BytesIO()
            npy_format.write_array(buf, np.ascontiguousarray(arrays[name]))
            info = zipfile.ZipInfo(name + ".npy", date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, buf.getvalue())


def _write_draw_csv(path, columns: dict):
    names = list(columns)
    data = np.column_stack([columns[n] for n in names])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(names) + "\n")
        np.savetxt(fh, data, fmt=_FLOAT_FMT, delimiter=",")


def _read_draw_csv(path):
    with open(path, newline="") as fh:
        names = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return names, data


def save_chain(chain: Chain, out_dir) -> Path:
    """Write a chain directory (see the module docstring for the layout)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    meta = chain.metadata()
    manifest = {
        "format": "chain-dir-v1",
        "version": __version__,
        "config_hash": config_hash(meta),
        **meta,
        "wall_time_s": chain.wall_time_s,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    year_labels = [f"{int(t)}" for t in chain.breakpoints]
    for site in chain.site_ids:
        key = f"th:{site}"
        if key in chain.draws:
            _write_draw_csv(
                out_dir / f"th_{site}.csv",
                {y: chain.draws[key][:, i] for i, y in enumerate(year_labels)},
            )

    scalar_cols = {}
    for group in ("q0", "sigma2_Y", "sigma2"):
        for site in chain.site_ids:
            key = f"{group}:{site}"
            if key in chain.draws:
                scalar_cols[key] = chain.draws[key]
    if scalar_cols:
        _write_draw_csv(out_dir / "site_scalars.csv", scalar_cols)

    region_cols = {}
    for key in ("mu_D", "mu_S"):
        if key in chain.draws:
            for i, y in enumerate(year_labels):
                region_cols[f"{key}:{y}"] = chain.draws[key][:, i]
    for key in ("gamma2_D", "gamma2_S", "nu_D", "nu_S", "tau2_D", "tau2_S"):
        if key in chain.draws:
            region_cols[key] = chain.draws[key]
    if region_cols:
        _write_draw_csv(out_dir / "region_params.csv", region_cols)

    tr_arrays = {
        f"tr:{site}": chain.draws[f"tr:{site}"]
        for site in chain.site_ids
        if f"tr:{site}" in chain.draws
    }
    if tr_arrays:
        _write_npz_deterministic(out_dir / "tr_draws.npz", tr_arrays)
    return out_dir


def load_chain(chain_dir) -> Chain:
    """Read a chain directory written by :func:`save_chain`."""
    chain_dir = Path(chain_dir)
    with open(chain_dir / "manifest.json") as fh:
        manifest = json.load(fh)

    draws = {}
    site_ids = list(manifest["sites"])
    for site in site_ids:
        path = chain_dir / f"th_{site}.csv"
        if path.exists():
            _, data = _read_draw_csv(path)
            draws[f"th:{site}"] = data

    path = chain_dir / "site_scalars.csv"
    if path.exists():
        names, data = _read_draw_csv(path)
        for i, name in enumerate(names):
            draws[name] = data[:, i]

    path = chain_dir / "region_params.csv"
    if path.exists():
        names, data = _read_draw_csv(path)
        vec = {}
        for i, name in enumerate(names):
            if ":" in name:
                key, year = name.split(":")
                vec.setdefault(key, []).append(data[:, i])
            else:
                draws[name] = data[:, i]
        for key, cols in vec.items():
            draws[key] = np.column_stack(cols)

    path = chain_dir / "tr_draws.npz"
    if path.exists():
        with np.load(path) as npz:
            for name in npz.files:
                draws[name] = npz[name]

    return Chain(
        draws=draws,
        site_ids=site_ids,
        regions=dict(manifest["regions"]),
        breakpoints=np.asarray(manifest["breakpoints"], dtype=float),
        terminals={k: float(v) for k, v in manifest["terminals"].items()},
        K=len(manifest["breakpoints"]),
        seed=manifest["seed"],
        n_iter=manifest["n_iter"],
        n_burn=manifest["n_burn"],
        thin=manifest["thin"],
        variant=manifest["variant"],
        phi=manifest["phi"],
        kappa=manifest["kappa_m2_s"],
        year_seconds=manifest["year_seconds"],
        wall_time_s=manifest.get("wall_time_s", 0.0),
    )


def write_summary_csv(table, path):
    """Write a :class:`~borehole_gst.posterior.SummaryTable` as CSV."""
    fields = ["name", "mean", "sd", "median", "ci50_lo", "ci50_hi", "ci90_lo", "ci90_hi"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for row in table:
            d = row.as_dict()
            writer.writerow([d["name"]] + [_fmt(d[f]) for f in fields[1:]])
