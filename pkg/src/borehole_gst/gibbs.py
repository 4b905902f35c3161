"""Gibbs sampler for the single-site and two-region hierarchical models.

Model structure (per site j, all conditionally Gaussian / inverse gamma):

* measurement:  Y_j | T_rj, q_j      ~ N(T_rj + T0_j 1 + q_j R_j, sigma2_Yj I)
* model error:  T_rj | T_hj          ~ N(A_j T_hj, sigma2_j C(phi))
* history:      T_hj                 ~ N(mu_region, gamma2_region I)   (multi)
                T_hj                 ~ N(mu, Gamma)                    (single)
* heat flow:    q_j                  ~ N(nu_region, tau2_region)       (multi)
                q_j                  ~ N(q0_mean, q0_var)              (single)
* region level: (mu_D, mu_S), (nu_D, nu_S) joint normal pairs;
  gamma2, tau2, sigma2_Y, sigma2 inverse gamma.

Every full conditional is conjugate, so a sweep is a fixed sequence of
exact draws.  The (T_r, T_h) block is sampled jointly as
[T_r | Y, rest][T_h | T_r, rest] with T_h integrated out of the first
factor: T_r | rest ~ N(Dd, D) where

    Sigma~ = sigma2 C + A Gamma A',   D = (I/sigma2_Y + Sigma~^-1)^-1,
    d = (Y - T0 1 - q R)/sigma2_Y + Sigma~^-1 A mu,

and T_h | T_r ~ N(mu + G^-1 A'(sigma2 C)^-1 (T_r - A mu), G^-1) with
G = Gamma^-1 + A'(sigma2 C)^-1 A (a push-through identity applied to
the covariance form Gamma - Gamma A' Sigma~^-1 A Gamma).

Per-iteration cost: C(phi) is fixed for a run, so each site caches the
eigendecomposition C = V diag(lam_c) V' and works in the eigenbasis,
where (sigma2 C)^-1 and the measurement precision are both diagonal.
With F = (sigma2 C)^-1 A and P0 = I/sigma2_Y + (sigma2 C)^-1 (diagonal
here), two Woodbury applications give

    Sigma~^-1 = (sigma2 C)^-1 - F G^-1 F',
    D = P0^-1 + P0^-1 F H^-1 F' P0^-1,   H = G - F' P0^-1 F,

so each iteration touches only K x K factorizations and N x K products.
H is positive definite because P0^-1 < sigma2 C (in the Loewner order)
implies F' P0^-1 F < G - Gamma^-1.  A draw from N(Dd, D) is assembled
from two independent pieces: xi1/sqrt(p) with p = diag(P0), plus
P0^-1 F L_H'^-1 xi2 where H = L_H L_H'.

With phi = 0 the correlation matrix is the identity and the eigenbasis
step is skipped (V = None); the AR(1) variant at phi = 0 therefore runs
the identical arithmetic as the baseline, draw for draw.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .forward import (
    DEFAULT_KAPPA,
    YEAR_SECONDS,
    BoreholeProfile,
    TimeGrid,
    build_forward_operator,
    thermal_resistance,
)
from .preprocess import estimate_intercept_and_flow, reduced_estimates
from .priors import HyperParameters, SingleSitePrior

#: Calendar breakpoints of the default analysis grid (K = 11 intervals).
DEFAULT_BREAKPOINTS = (
    1600.0, 1650.0, 1700.0, 1750.0, 1800.0, 1850.0,
    1875.0, 1900.0, 1925.0, 1950.0, 1965.0,
)

#: Parameter groups that can be stored, frozen, or initialized by name.
PARAM_GROUPS = ("th", "tr", "q0", "sigma2_Y", "sigma2", "mu", "gamma2", "nu", "tau2")

_REGION_GROUPS = ("mu", "gamma2", "nu", "tau2")


class NumericalError(RuntimeError):
    """A covariance factorization failed beyond the jitter policy."""


@dataclass(frozen=True)
class CorrelationSpec:
    """AR(1)-in-depth correlation of the model error.

    ``C[i, j] = phi ** (|z_i - z_j| / depth_unit)``; the exponent is the
    (possibly non-integer) separation in depth units, which keeps the
    kernel well-defined on irregular grids.  ``phi = 0`` is the
    independence baseline.
    """

    phi: float = 0.0
    depth_unit: float = 5.0

    def __post_init__(self):
        if not 0.0 <= self.phi < 1.0:
            raise ValueError("phi must lie in [0, 1)")
        if self.depth_unit <= 0.0:
            raise ValueError("depth_unit must be positive")


def ar1_correlation(depths, spec: CorrelationSpec) -> np.ndarray:
    """Correlation matrix C(phi) for the given measurement depths.

    Returns the identity exactly when ``phi == 0``.  Raises
    :class:`NumericalError` if the matrix is not positive definite.
    """
    z = np.asarray(depths, dtype=float)
    n = z.size
    if spec.phi == 0.0:
        return np.eye(n)
    k = np.abs(z[:, None] - z[None, :]) / spec.depth_unit
    C = spec.phi**k
    try:
        np.linalg.cholesky(C)
    except np.linalg.LinAlgError:
        w = np.linalg.eigvalsh(C)
        raise NumericalError(
            f"C(phi={spec.phi}) is not positive definite "
            f"(min eigenvalue {w.min():.3e}) for n={n} depths"
        ) from None
    return C


def _chol_lower(M: np.ndarray, what: str) -> np.ndarray:
    """Lower Cholesky factor with escalating diagonal jitter.

    Jitter escalates from 1e-10 to 1e-6 of trace/n; anything beyond
    that is treated as a genuine numerical failure and aborted with
    diagnostics rather than papered over.
    """
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        pass
    n = M.shape[0]
    base = float(np.trace(M)) / n
    for eps in (1e-10, 1e-9, 1e-8, 1e-7, 1e-6):
        try:
            return np.linalg.cholesky(M + (eps * base) * np.eye(n))
        except np.linalg.LinAlgError:
            continue
    w = np.linalg.eigvalsh(M)
    raise NumericalError(
        f"{what}: not positive definite after jitter up to 1e-6*trace/n "
        f"(min eigenvalue {w.min():.3e}, trace/n {base:.3e})"
    )


def _draw_inverse_gamma(rng: np.random.Generator, shape: float, rate: float) -> float:
    """One draw from IG(shape, rate) via the reciprocal gamma."""
    if not rate > 0.0:
        raise NumericalError(f"inverse-gamma rate must be positive, got {rate}")
    return 1.0 / rng.gamma(shape, 1.0 / rate)


# ---------------------------------------------------------------------------
# per-site precomputation
# ---------------------------------------------------------------------------


@dataclass
class SiteModel:
    """Per-site fixed quantities and eigenbasis caches for one run."""

    profile: BoreholeProfile
    time_grid: TimeGrid
    A: np.ndarray          # (N, K) forward operator
    R: np.ndarray          # (N,) thermal resistance
    Y: np.ndarray          # (N,) measured temperatures
    T0: float
    C: np.ndarray          # (N, N) model-error correlation
    V: np.ndarray | None   # eigenvectors of C; None when C is the identity
    lamc: np.ndarray       # (N,) eigenvalues of C (ones when identity)
    Ahat: np.ndarray       # V'A  (A itself when identity)
    yhat0: np.ndarray      # V'(Y - T0 1)
    Rhat: np.ndarray       # V'R
    G0: np.ndarray         # (K, K) A' C^-1 A
    RtR: float
    q0_init: float
    tr_init: np.ndarray

    @property
    def site_id(self) -> str:
        return self.profile.site_id

    @property
    def region(self) -> str:
        return self.profile.region

    @property
    def N(self) -> int:
        return self.Y.size

    @property
    def K(self) -> int:
        return self.A.shape[1]

    def hat(self, x: np.ndarray) -> np.ndarray:
        return x if self.V is None else self.V.T @ x

    def unhat(self, x: np.ndarray) -> np.ndarray:
        return x if self.V is None else self.V @ x


def build_site_model(
    profile: BoreholeProfile,
    breakpoints,
    corr: CorrelationSpec,
    kappa: float = DEFAULT_KAPPA,
    year_seconds: float = YEAR_SECONDS,
    cutoff: float | None = None,
) -> SiteModel:
    """Precompute one site's operator, resistances, and eigenbasis caches.

    The initializing heat flow is the deep-segment OLS slope; if the
    profile has no usable deep segment the regression falls back to all
    depths, and failing that to zero.
    """
    tg = TimeGrid(breakpoints=np.asarray(breakpoints, dtype=float), terminal=profile.log_year)
    op = build_forward_operator(profile.depths, tg, kappa=kappa, year_seconds=year_seconds)
    A = op.A
    R = thermal_resistance(profile)
    Y = profile.temps
    n = Y.size

    try:
        fit = estimate_intercept_and_flow(profile, cutoff)
        q0_init = fit.q0_hat
    except ValueError:
        try:
            fit = estimate_intercept_and_flow(profile, cutoff=0.0)
            q0_init = fit.q0_hat
        except ValueError:
            q0_init = 0.0
    tr_init = reduced_estimates(profile, profile.T0, q0_init)

    C = ar1_correlation(profile.depths, corr)
    if corr.phi == 0.0:
        V = None
        lamc = np.ones(n)
        Ahat = A
        yhat0 = Y - profile.T0
        Rhat = R
    else:
        lamc, V = np.linalg.eigh(C)
        if lamc.min() <= 0.0:
            raise NumericalError(
                f"{profile.site_id}: C(phi={corr.phi}) eigenvalues not all positive "
                f"(min {lamc.min():.3e})"
            )
        Ahat = V.T @ A
        yhat0 = V.T @ (Y - profile.T0)
        Rhat = V.T @ R
    G0 = Ahat.T @ (Ahat / lamc[:, None])

    return SiteModel(
        profile=profile,
        time_grid=tg,
        A=A,
        R=R,
        Y=Y,
        T0=profile.T0,
        C=C,
        V=V,
        lamc=lamc,
        Ahat=Ahat,
        yhat0=yhat0,
        Rhat=Rhat,
        G0=G0,
        RtR=float(R @ R),
        q0_init=q0_init,
        tr_init=tr_init,
    )


# ---------------------------------------------------------------------------
# model bundles and chain state
# ---------------------------------------------------------------------------


@dataclass
class GibbsModel:
    """Everything fixed for a run: sites, hyperparameters, and mode."""

    mode: str  # "multi" | "single"
    sites: list[SiteModel]
    hyper: HyperParameters
    corr: CorrelationSpec
    breakpoints: np.ndarray
    kappa: float
    year_seconds: float
    desert: list[int] = field(default_factory=list)
    swell: list[int] = field(default_factory=list)
    single_prior: SingleSitePrior | None = None
    single_Gamma_inv: np.ndarray | None = None

    @property
    def K(self) -> int:
        return self.breakpoints.size

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def region_indices(self, region: str) -> list[int]:
        return self.desert if region == "desert" else self.swell

    def history_prior(self, state: "ChainState", j: int):
        """(mu, Gamma^-1) for site j's history; Gamma^-1 may be a scalar (times I)."""
        if self.mode == "single":
            return self.single_prior.mu, self.single_Gamma_inv
        if self.sites[j].region == "desert":
            return state.mu_D, 1.0 / state.gamma2_D
        return state.mu_S, 1.0 / state.gamma2_S

    def flow_prior(self, state: "ChainState", j: int):
        """(nu, tau2) for site j's heat flow."""
        if self.mode == "single":
            return self.single_prior.q0_mean, self.single_prior.q0_var
        if self.sites[j].region == "desert":
            return state.nu_D, state.tau2_D
        return state.nu_S, state.tau2_S


@dataclass
class ChainState:
    """One Gibbs iteration's value of every unknown."""

    th: list[np.ndarray]
    tr: list[np.ndarray]
    q0: np.ndarray
    sigma2_Y: np.ndarray
    sigma2: np.ndarray
    mu_D: np.ndarray | None = None
    mu_S: np.ndarray | None = None
    gamma2_D: float | None = None
    gamma2_S: float | None = None
    nu_D: float | None = None
    nu_S: float | None = None
    tau2_D: float | None = None
    tau2_S: float | None = None

    def copy(self) -> "ChainState":
        return ChainState(
            th=[x.copy() for x in self.th],
            tr=[x.copy() for x in self.tr],
            q0=self.q0.copy(),
            sigma2_Y=self.sigma2_Y.copy(),
            sigma2=self.sigma2.copy(),
            mu_D=None if self.mu_D is None else self.mu_D.copy(),
            mu_S=None if self.mu_S is None else self.mu_S.copy(),
            gamma2_D=self.gamma2_D,
            gamma2_S=self.gamma2_S,
            nu_D=self.nu_D,
            nu_S=self.nu_S,
            tau2_D=self.tau2_D,
            tau2_S=self.tau2_S,
        )


@dataclass
class GibbsConfig:
    """Sampler settings for one chain.

    ``frozen`` maps a parameter group name to a fixed value; frozen
    groups are set at initialization and skipped in every sweep.
    ``init`` overrides starting values without freezing.  Group names
    are listed in :data:`PARAM_GROUPS`; region-level pairs are given as
    ``(desert_value, swell_value)`` and per-site groups as arrays in
    site order.
    """

    n_iter: int = 30_000
    n_burn: int = 2_000
    thin: int = 1
    seed: int | None = None
    breakpoints: tuple = DEFAULT_BREAKPOINTS
    kappa: float = DEFAULT_KAPPA
    year_seconds: float = YEAR_SECONDS
    depth_unit: float = 5.0
    store: tuple = PARAM_GROUPS
    frozen: dict = field(default_factory=dict)
    init: dict = field(default_factory=dict)
    cutoffs: dict = field(default_factory=dict)

    def validate(self):
        if self.seed is None:
            raise ValueError("config.seed is required (no wall-clock seeding)")
        if self.n_iter <= self.n_burn:
            raise ValueError("n_iter must exceed n_burn")
        if self.thin < 1 or (self.n_iter - self.n_burn) % self.thin != 0:
            raise ValueError("thin must be >= 1 and divide n_iter - n_burn")
        unknown = set(self.store) - set(PARAM_GROUPS)
        if unknown:
            raise ValueError(f"unknown store groups: {sorted(unknown)}")
        unknown = set(self.frozen) - set(PARAM_GROUPS)
        if unknown:
            raise ValueError(f"unknown frozen groups: {sorted(unknown)}")

    @property
    def n_stored(self) -> int:
        return (self.n_iter - self.n_burn) // self.thin


@dataclass
class Chain:
    """Stored post-burn-in draws plus run metadata."""

    draws: dict
    site_ids: list[str]
    regions: dict
    breakpoints: np.ndarray
    terminals: dict
    K: int
    seed: int
    n_iter: int
    n_burn: int
    thin: int
    variant: str  # "multi" | "single"
    phi: float
    kappa: float
    year_seconds: float
    wall_time_s: float = 0.0

    @property
    def n_stored(self) -> int:
        return (self.n_iter - self.n_burn) // self.thin

    def array(self, key: str) -> np.ndarray:
        return self.draws[key]

    def has(self, key: str) -> bool:
        return key in self.draws

    def site_keys(self, group: str) -> list[str]:
        return [f"{group}:{s}" for s in self.site_ids if f"{group}:{s}" in self.draws]

    def metadata(self) -> dict:
        return {
            "variant": self.variant,
            "phi": self.phi,
            "seed": self.seed,
            "n_iter": self.n_iter,
            "n_burn": self.n_burn,
            "thin": self.thin,
            "sites": list(self.site_ids),
            "regions": dict(self.regions),
            "breakpoints": [float(t) for t in self.breakpoints],
            "terminals": {k: float(v) for k, v in self.terminals.items()},
            "kappa_m2_s": self.kappa,
            "year_seconds": self.year_seconds,
        }


# ---------------------------------------------------------------------------
# full conditionals
# ---------------------------------------------------------------------------


def _draw_site_block(
    site: SiteModel,
    mu: np.ndarray,
    inv_Gamma,
    sigma2: float,
    sigma2_Y: float,
    q: float,
    rng: np.random.Generator,
):
    """Joint draw of (T_r, T_h) for one site; see the module docstring.

    ``inv_Gamma`` is the history prior precision, either a scalar
    (meaning that multiple of the identity) or a full K x K matrix.
    """
    lam = sigma2 * site.lamc                      # eigenvalues of sigma2 C
    Ahat = site.Ahat
    G = site.G0 / sigma2
    if np.isscalar(inv_Gamma):
        G = G.copy()
        G.flat[:: site.K + 1] += inv_Gamma
    else:
        G = inv_Gamma + G
    LG = _chol_lower(G, f"{site.site_id}: history conditional precision G")

    p = 1.0 / sigma2_Y + 1.0 / lam                # diag of P0 in the eigenbasis
    Fhat = Ahat / lam[:, None]                    # (sigma2 C)^-1 A
    W = Fhat / p[:, None]                         # P0^-1 F
    H = G - Fhat.T @ W
    LH = _chol_lower(H, f"{site.site_id}: reduced-temperature Woodbury core H")

    # d = (Y - T0 1 - q R)/sigma2_Y + Sigma~^-1 A mu, all in the eigenbasis
    yhat = site.yhat0 - q * site.Rhat
    mhat = Ahat @ mu
    smu = mhat / lam - Fhat @ cho_solve((LG, True), Fhat.T @ mhat)
    d = yhat / sigma2_Y + smu

    dp = d / p
    mean = dp + W @ cho_solve((LH, True), Fhat.T @ dp)
    xi1 = rng.standard_normal(site.N)
    xi2 = rng.standard_normal(site.K)
    tr_hat = mean + xi1 / np.sqrt(p) + W @ solve_triangular(LH.T, xi2, lower=False)

    # T_h | T_r ~ N(mu + G^-1 u, G^-1), u = A'(sigma2 C)^-1 (T_r - A mu)
    u = Ahat.T @ ((tr_hat - mhat) / lam)
    xi3 = rng.standard_normal(site.K)
    th = mu + cho_solve((LG, True), u) + solve_triangular(LG.T, xi3, lower=False)

    return site.unhat(tr_hat), th


def sample_block_Tr_Th(state: ChainState, j: int, model: GibbsModel, rng):
    """Draw (T_r[j], T_h[j]) from their joint full conditional."""
    mu, inv_Gamma = model.history_prior(state, j)
    return _draw_site_block(
        model.sites[j], mu, inv_Gamma, state.sigma2[j], state.sigma2_Y[j], state.q0[j], rng
    )


def sample_error_variances(state: ChainState, j: int, model: GibbsModel, rng):
    """Draw (sigma2_Y[j], sigma2[j]) from their inverse-gamma conditionals.

    The model-error quadratic form is C(phi)^-1-weighted, evaluated in
    the eigenbasis; with phi = 0 it is the plain sum of squares.
    """
    site = model.sites[j]
    h = model.hyper
    res_Y = site.Y - state.tr[j] - site.T0 - state.q0[j] * site.R
    s2Y = _draw_inverse_gamma(rng, site.N / 2.0 + h.a_Y, h.b_Y + 0.5 * float(res_Y @ res_Y))
    rhat = site.hat(state.tr[j]) - site.Ahat @ state.th[j]
    qf = float(np.sum(rhat * rhat / site.lamc))
    s2 = _draw_inverse_gamma(rng, site.N / 2.0 + h.a, h.b + 0.5 * qf)
    return s2Y, s2


def _draw_coupled_pair(
    prior_var_D: float,
    prior_var_S: float,
    coupling: float,
    prior_mean: np.ndarray,
    data_prec: np.ndarray,
    data_term: np.ndarray,
    rng,
    what: str,
):
    """Joint conditional draw of a coupled (desert, swell) mean pair.

    The prior covariance is ``[[prior_var_D + coupling, coupling],
    [coupling, prior_var_S + coupling]]`` (blockwise for vector means;
    the blocks are multiples of the identity, so each component index
    decouples into an independent 2 x 2 problem sharing one precision
    matrix).  ``data_prec`` is the diagonal (n_D/var_D, n_S/var_S) and
    ``data_term`` the stacked (2, K) data sums divided by variances.
    """
    vD = prior_var_D + coupling
    vS = prior_var_S + coupling
    det = vD * vS - coupling * coupling
    if det <= 0.0:
        raise NumericalError(f"{what}: singular prior covariance (det {det:.3e})")
    prior_prec = np.array([[vS, -coupling], [-coupling, vD]]) / det
    # prior precision times the (equal-component) prior mean simplifies
    # to (prior_var_S * m0, prior_var_D * m0) / det
    prior_term = np.vstack(
        [prior_var_S * prior_mean / det, prior_var_D * prior_mean / det]
    )
    P = prior_prec + np.diag(data_prec)
    L = _chol_lower(P, what)
    mean = cho_solve((L, True), prior_term + data_term)
    noise = solve_triangular(L.T, rng.standard_normal(mean.shape), lower=False)
    return mean + noise


def sample_region_history_means(state: ChainState, model: GibbsModel, rng):
    """Draw (mu_D, mu_S) from their joint 2K-dimensional full conditional."""
    h = model.hyper
    K = model.K
    sum_D = np.sum([state.th[j] for j in model.desert], axis=0)
    sum_S = np.sum([state.th[j] for j in model.swell], axis=0)
    draw = _draw_coupled_pair(
        prior_var_D=h.sigma2_D,
        prior_var_S=h.sigma2_S,
        coupling=h.sigma2_0,
        prior_mean=np.full(K, h.mu0),
        data_prec=np.array(
            [len(model.desert) / state.gamma2_D, len(model.swell) / state.gamma2_S]
        ),
        data_term=np.vstack([sum_D / state.gamma2_D, sum_S / state.gamma2_S]),
        rng=rng,
        what="region history means",
    )
    return draw[0], draw[1]


def sample_history_variances(state: ChainState, model: GibbsModel, rng):
    """Draw (gamma2_D, gamma2_S) from their inverse-gamma conditionals."""
    h = model.hyper
    K = model.K
    out = []
    for idx, mu in ((model.desert, state.mu_D), (model.swell, state.mu_S)):
        dev = 0.0
        for j in idx:
            r = state.th[j] - mu
            dev += float(r @ r)
        out.append(
            _draw_inverse_gamma(rng, len(idx) * K / 2.0 + h.a_gamma, h.b_gamma + 0.5 * dev)
        )
    return out[0], out[1]


def sample_heat_flows(state: ChainState, j: int, model: GibbsModel, rng) -> float:
    """Draw q0[j] from its conjugate normal full conditional."""
    site = model.sites[j]
    nu, tau2 = model.flow_prior(state, j)
    resid = site.Y - state.tr[j] - site.T0
    denom = tau2 * site.RtR + state.sigma2_Y[j]
    mean = (tau2 * float(site.R @ resid) + state.sigma2_Y[j] * nu) / denom
    var = tau2 * state.sigma2_Y[j] / denom
    return mean + np.sqrt(var) * rng.standard_normal()


def sample_flow_means(state: ChainState, model: GibbsModel, rng):
    """Draw (nu_D, nu_S) from their joint bivariate full conditional."""
    h = model.hyper
    sum_D = float(np.sum([state.q0[j] for j in model.desert]))
    sum_S = float(np.sum([state.q0[j] for j in model.swell]))
    draw = _draw_coupled_pair(
        prior_var_D=h.eta2_D,
        prior_var_S=h.eta2_S,
        coupling=h.eta2_0,
        prior_mean=np.array([h.nu0]),
        data_prec=np.array(
            [len(model.desert) / state.tau2_D, len(model.swell) / state.tau2_S]
        ),
        data_term=np.array([[sum_D / state.tau2_D], [sum_S / state.tau2_S]]),
        rng=rng,
        what="region flow means",
    )
    return float(draw[0, 0]), float(draw[1, 0])


def sample_flow_variances(state: ChainState, model: GibbsModel, rng):
    """Draw (tau2_D, tau2_S) from their inverse-gamma conditionals."""
    h = model.hyper
    out = []
    for idx, nu in ((model.desert, state.nu_D), (model.swell, state.nu_S)):
        dev = float(np.sum([(state.q0[j] - nu) ** 2 for j in idx]))
        out.append(_draw_inverse_gamma(rng, len(idx) / 2.0 + h.a_tau, h.b_tau + 0.5 * dev))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# chain orchestration
# ---------------------------------------------------------------------------


def _build_model(profiles, hyper, config, mode, single_prior=None) -> GibbsModel:
    corr = CorrelationSpec(phi=hyper.phi, depth_unit=config.depth_unit)
    breakpoints = np.asarray(config.breakpoints, dtype=float)
    sites = [
        build_site_model(
            p,
            breakpoints,
            corr,
            kappa=config.kappa,
            year_seconds=config.year_seconds,
            cutoff=config.cutoffs.get(p.site_id),
        )
        for p in profiles
    ]
    ids = [s.site_id for s in sites]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate site ids: {ids}")
    model = GibbsModel(
        mode=mode,
        sites=sites,
        hyper=hyper,
        corr=corr,
        breakpoints=breakpoints,
        kappa=config.kappa,
        year_seconds=config.year_seconds,
        desert=[j for j, s in enumerate(sites) if s.region == "desert"],
        swell=[j for j, s in enumerate(sites) if s.region == "swell"],
        single_prior=single_prior,
    )
    if mode == "multi":
        if not model.desert or not model.swell:
            raise ValueError("the hierarchical model needs at least one site per region")
    else:
        if single_prior.mu.size != model.K:
            raise ValueError("single-site prior dimension does not match the time grid")
        model.single_Gamma_inv = np.linalg.inv(single_prior.Gamma)
    return model


def _init_state(model: GibbsModel, config: GibbsConfig) -> ChainState:
    h = model.hyper
    K = model.K
    n = model.n_sites
    state = ChainState(
        th=[np.zeros(K) for _ in model.sites],
        tr=[s.tr_init.copy() for s in model.sites],
        q0=np.array([s.q0_init for s in model.sites]),
        sigma2_Y=np.full(n, h.b_Y / (h.a_Y - 1.0)),
        sigma2=np.full(n, h.b / (h.a - 1.0)),
    )
    if model.mode == "multi":
        state.mu_D = np.full(K, h.mu0)
        state.mu_S = np.full(K, h.mu0)
        state.gamma2_D = state.gamma2_S = h.b_gamma / (h.a_gamma - 1.0)
        state.nu_D = state.nu_S = h.nu0
        state.tau2_D = state.tau2_S = h.b_tau / (h.a_tau - 1.0)
    for source in (config.init, config.frozen):
        for group, value in source.items():
            _assign_group(state, model, group, value)
    return state


def _assign_group(state: ChainState, model: GibbsModel, group: str, value):
    n = model.n_sites
    if group in ("th", "tr"):
        vecs = [np.asarray(v, dtype=float).copy() for v in value]
        if len(vecs) != n:
            raise ValueError(f"{group}: expected {n} site vectors")
        setattr(state, group, vecs)
    elif group in ("q0", "sigma2_Y", "sigma2"):
        arr = np.broadcast_to(np.asarray(value, dtype=float), (n,)).copy()
        setattr(state, group, arr)
    elif group == "mu":
        d, s = value
        state.mu_D = np.broadcast_to(np.asarray(d, dtype=float), (model.K,)).copy()
        state.mu_S = np.broadcast_to(np.asarray(s, dtype=float), (model.K,)).copy()
    elif group in ("gamma2", "nu", "tau2"):
        d, s = (float(value[0]), float(value[1])) if np.ndim(value) else (float(value),) * 2
        setattr(state, f"{group}_D", d)
        setattr(state, f"{group}_S", s)
    else:
        raise ValueError(f"unknown parameter group {group!r}")


def _sweep(state: ChainState, model: GibbsModel, rng, frozen: frozenset):
    """One full Gibbs sweep, in the fixed documented order.

    Per site: (T_r, T_h) block, then the two error variances.  Then, in
    the hierarchical model: (mu_D, mu_S); (gamma2_D, gamma2_S); each
    site's q0; (nu_D, nu_S); (tau2_D, tau2_S).  In the single-site
    model the site loop is followed by q0 only.
    """
    block_frozen = "tr" in frozen and "th" in frozen
    var_frozen_Y = "sigma2_Y" in frozen
    var_frozen = "sigma2" in frozen
    for j in range(model.n_sites):
        if not block_frozen:
            tr, th = sample_block_Tr_Th(state, j, model, rng)
            if "tr" not in frozen:
                state.tr[j] = tr
            if "th" not in frozen:
                state.th[j] = th
        if not (var_frozen_Y and var_frozen):
            s2Y, s2 = sample_error_variances(state, j, model, rng)
            if not var_frozen_Y:
                state.sigma2_Y[j] = s2Y
            if not var_frozen:
                state.sigma2[j] = s2
    if model.mode == "multi":
        if "mu" not in frozen:
            state.mu_D, state.mu_S = sample_region_history_means(state, model, rng)
        if "gamma2" not in frozen:
            state.gamma2_D, state.gamma2_S = sample_history_variances(state, model, rng)
    if "q0" not in frozen:
        for j in range(model.n_sites):
            state.q0[j] = sample_heat_flows(state, j, model, rng)
    if model.mode == "multi":
        if "nu" not in frozen:
            state.nu_D, state.nu_S = sample_flow_means(state, model, rng)
        if "tau2" not in frozen:
            state.tau2_D, state.tau2_S = sample_flow_variances(state, model, rng)


def _allocate(model: GibbsModel, config: GibbsConfig) -> dict:
    M = config.n_stored
    draws = {}
    store = set(config.store)
    for s in model.sites:
        if "th" in store:
            draws[f"th:{s.site_id}"] = np.empty((M, s.K))
        if "tr" in store:
            draws[f"tr:{s.site_id}"] = np.empty((M, s.N))
        for group in ("q0", "sigma2_Y", "sigma2"):
            if group in store:
                draws[f"{group}:{s.site_id}"] = np.empty(M)
    if model.mode == "multi":
        if "mu" in store:
            draws["mu_D"] = np.empty((M, model.K))
            draws["mu_S"] = np.empty((M, model.K))
        for group in ("gamma2", "nu", "tau2"):
            if group in store:
                draws[f"{group}_D"] = np.empty(M)
                draws[f"{group}_S"] = np.empty(M)
    return draws


def _record(draws: dict, m: int, state: ChainState, model: GibbsModel):
    for j, s in enumerate(model.sites):
        key = f"th:{s.site_id}"
        if key in draws:
            draws[key][m] = state.th[j]
        key = f"tr:{s.site_id}"
        if key in draws:
            draws[key][m] = state.tr[j]
        for group, arr in (("q0", state.q0), ("sigma2_Y", state.sigma2_Y), ("sigma2", state.sigma2)):
            key = f"{group}:{s.site_id}"
            if key in draws:
                draws[key][m] = arr[j]
    for key, value in (
        ("mu_D", state.mu_D), ("mu_S", state.mu_S),
        ("gamma2_D", state.gamma2_D), ("gamma2_S", state.gamma2_S),
        ("nu_D", state.nu_D), ("nu_S", state.nu_S),
        ("tau2_D", state.tau2_D), ("tau2_S", state.tau2_S),
    ):
        if key in draws:
            draws[key][m] = value


def _run(model: GibbsModel, config: GibbsConfig) -> Chain:
    config.validate()
    rng = np.random.default_rng(config.seed)
    state = _init_state(model, config)
    draws = _allocate(model, config)
    frozen = frozenset(config.frozen)
    t_start = time.perf_counter()
    m = 0
    for it in range(1, config.n_iter + 1):
        try:
            _sweep(state, model, rng, frozen)
        except NumericalError as err:
            raise NumericalError(f"iteration {it}: {err}") from err
        if it > config.n_burn and (it - config.n_burn) % config.thin == 0:
            _record(draws, m, state, model)
            m += 1
    wall = time.perf_counter() - t_start
    return Chain(
        draws=draws,
        site_ids=[s.site_id for s in model.sites],
        regions={s.site_id: s.region for s in model.sites},
        breakpoints=model.breakpoints,
        terminals={s.site_id: s.time_grid.terminal for s in model.sites},
        K=model.K,
        seed=config.seed,
        n_iter=config.n_iter,
        n_burn=config.n_burn,
        thin=config.thin,
        variant=model.mode,
        phi=model.corr.phi,
        kappa=model.kappa,
        year_seconds=model.year_seconds,
        wall_time_s=wall,
    )


def run_chain(profiles, hyper: HyperParameters, config: GibbsConfig) -> Chain:
    """Run the two-region hierarchical Gibbs sampler over all sites.

    Deterministic given ``config.seed``; the sweep order is documented
    in :func:`_sweep`.  Raises :class:`NumericalError` with the failing
    iteration and site on any factorization failure.
    """
    model = _build_model(profiles, hyper, config, mode="multi")
    return _run(model, config)


def run_single_site(
    profile: BoreholeProfile,
    prior: SingleSitePrior,
    hyper: HyperParameters,
    config: GibbsConfig,
) -> Chain:
    """Run the single-site sampler with a fixed history/flow prior.

    The region layer is absent: ``T_h ~ N(prior.mu, prior.Gamma)`` and
    ``q0 ~ N(prior.q0_mean, prior.q0_var)`` are held fixed, and only
    (T_r, T_h), the two error variances, and q0 are updated.
    """
    model = _build_model([profile], hyper, config, mode="single", single_prior=prior)
    return _run(model, config)


def build_multi_model(profiles, hyper: HyperParameters, config: GibbsConfig) -> GibbsModel:
    """The precomputed model bundle, exposed for conditional-level tests."""
    return _build_model(profiles, hyper, config, mode="multi")


def build_single_model(
    profile: BoreholeProfile,
    prior: SingleSitePrior,
    hyper: HyperParameters,
    config: GibbsConfig,
) -> GibbsModel:
    """Single-site counterpart of :func:`build_multi_model`."""
    return _build_model([profile], hyper, config, mode="single", single_prior=prior)


def initial_state(model: GibbsModel, config: GibbsConfig) -> ChainState:
    """The documented deterministic initialization for a model."""
    return _init_state(model, config)
