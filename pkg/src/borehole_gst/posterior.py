"""Posterior summaries, densities, and residual diagnostics for chains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import gaussian_kde

from .forward import BoreholeProfile, thermal_resistance
from .gibbs import Chain


@dataclass(frozen=True)
class SummaryRow:
    """Posterior mean, sd, median, and central 50%/90% intervals."""

    name: str
    mean: float
    sd: float
    median: float
    ci50: tuple
    ci90: tuple

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "mean": self.mean,
            "sd": self.sd,
            "median": self.median,
            "ci50_lo": self.ci50[0],
            "ci50_hi": self.ci50[1],
            "ci90_lo": self.ci90[0],
            "ci90_hi": self.ci90[1],
        }


@dataclass
class SummaryTable:
    """Named summary rows in chain-key order."""

    rows: list

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def names(self) -> list:
        return [r.name for r in self.rows]

    def __getitem__(self, name: str) -> SummaryRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


def _summary_row(name: str, x: np.ndarray) -> SummaryRow:
    q = np.quantile(x, [0.25, 0.75, 0.05, 0.95, 0.5])
    return SummaryRow(
        name=name,
        mean=float(np.mean(x)),
        sd=float(np.std(x, ddof=1)),
        median=float(q[4]),
        ci50=(float(q[0]), float(q[1])),
        ci90=(float(q[2]), float(q[3])),
    )


def _column_labels(chain: Chain, key: str) -> list:
    group = key.split(":", 1)[0]
    if group in ("th", "mu_D", "mu_S"):
        return [f"{int(t)}" for t in chain.breakpoints]
    # reduced temperatures (or anything else vector-valued): index labels
    return [str(i) for i in range(chain.draws[key].shape[1])]


def summarize(chain: Chain, keys=None) -> SummaryTable:
    """Summary table over the requested chain keys (all stored by default).

    Vector-valued keys expand to one row per component; history and
    region-mean components are labelled by the start year of their time
    interval, e.g. ``th:SRD-1:1750`` or ``mu_D:1600``.  Quantiles use
    linear interpolation on the sorted draws.
    """
    if keys is None:
        keys = list(chain.draws)
    rows = []
    for key in keys:
        x = chain.draws[key]
        if x.ndim == 1:
            rows.append(_summary_row(key, x))
        else:
            for i, label in enumerate(_column_labels(chain, key)):
                rows.append(_summary_row(f"{key}:{label}", x[:, i]))
    return SummaryTable(rows)


def kde_density(samples, grid=None, n_grid: int = 256, cut: float = 3.0):
    """Gaussian kernel density of a marginal, Silverman bandwidth.

    Returns ``(grid, density)``.  If ``grid`` is omitted it spans the
    sample range padded by ``cut`` bandwidths on each side.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2 or np.ptp(x) == 0.0:
        raise ValueError("kde_density needs at least two distinct samples")
    kde = gaussian_kde(x, bw_method="silverman")
    if grid is None:
        bw = kde.factor * x.std(ddof=1)
        grid = np.linspace(x.min() - cut * bw, x.max() + cut * bw, n_grid)
    else:
        grid = np.asarray(grid, dtype=float)
    return grid, kde(grid)


def temperature_change(chain: Chain, key: str, baseline: float) -> np.ndarray:
    """Draws of the terminal-interval temperature minus a baseline interval.

    ``key`` names a history-shaped chain entry (``th:<site>``, ``mu_D``,
    ``mu_S``); ``baseline`` is a calendar year, mapped to the time
    interval containing it.
    """
    draws = chain.draws[key]
    if draws.ndim != 2 or draws.shape[1] != chain.K:
        raise ValueError(f"{key!r} is not a history-shaped chain entry")
    idx = int(np.searchsorted(chain.breakpoints, baseline, side="right")) - 1
    if idx < 0:
        raise ValueError(
            f"baseline {baseline} precedes the first interval "
            f"({chain.breakpoints[0]:.0f})"
        )
    return draws[:, -1] - draws[:, idx]


def residuals(chain: Chain, profiles) -> dict:
    """Posterior-mean data residuals per site.

    For each profile: ``Y - (E[T_r] + T0 + E[q0] R)``, in depth order.
    Requires the chain to have stored the ``tr`` and ``q0`` groups.
    """
    out = {}
    for p in profiles:
        tr_key, q_key = f"tr:{p.site_id}", f"q0:{p.site_id}"
        if tr_key not in chain.draws or q_key not in chain.draws:
            raise KeyError(f"chain did not store tr/q0 for site {p.site_id}")
        tr_mean = chain.draws[tr_key].mean(axis=0)
        q_mean = chain.draws[q_key].mean()
        out[p.site_id] = p.temps - (tr_mean + p.T0 + q_mean * thermal_resistance(p))
    return out


def ar1_fit(x) -> float:
    """Lag-1 sample autocorrelation of a sequence (e.g. residuals in depth)."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 3:
        raise ValueError("need at least 3 values for a lag-1 autocorrelation")
    d = x - x.mean()
    denom = float(d @ d)
    if denom == 0.0:
        raise ValueError("zero variance sequence")
    return float(d[:-1] @ d[1:]) / denom


def format_flow_mw(mean_W: float, lo_W: float, hi_W: float) -> str:
    """Format a heat flow and interval in mW/m^2, e.g. ``55.91 (55.51, 56.32)``."""
    return f"{1e3 * mean_W:.2f} ({1e3 * lo_W:.2f}, {1e3 * hi_W:.2f})"


def flow_report(chain: Chain) -> dict:
    """Formatted mW/m^2 posterior mean and 95% interval per flow quantity.

    Covers every ``q0:<site>`` entry plus ``nu_D``/``nu_S`` when stored.
    """
    out = {}
    keys = chain.site_keys("q0") + [k for k in ("nu_D", "nu_S") if k in chain.draws]
    for key in keys:
        x = chain.draws[key]
        lo, hi = np.quantile(x, [0.025, 0.975])
        out[key] = format_flow_mw(float(np.mean(x)), float(lo), float(hi))
    return out
