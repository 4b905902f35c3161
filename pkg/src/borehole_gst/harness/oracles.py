"""Exact posterior references for tiny model instances.

Two independent routes to the posterior that never touch the Gibbs
sampler, used to validate it end to end:

* ``mode="gaussian"``: with every variance frozen, the whole hierarchy
  (histories, reduced temperatures, heat flows, region means) is
  jointly Gaussian, so the posterior follows from one dense
  conditioning step.  Works for the multi-site model.
* ``mode="grid"``: single-site model with the two error variances
  free.  Conditional on (sigma2_Y, sigma2) the data are Gaussian with
  all other unknowns marginalized out, so the 2-d variance posterior
  is evaluated on a tensor grid of prior quantiles (equal prior mass
  per node, midpoint rule) and the Gaussian conditionals are mixed
  with those weights.  Accurate as long as the data do not push the
  variances into the extreme tails of their priors, which is how the
  validating tests construct their instances.

Both return plain dicts with ``labels`` and moment arrays; tolerances
are the caller's business.
"""

from __future__ import annotations

import numpy as np
from scipy import stats

from ..gibbs import GibbsConfig, GibbsModel, build_multi_model, build_single_model
from ..priors import HyperParameters, SingleSitePrior, build_joint_mu_prior, build_joint_nu_prior


def oracle_posterior_tiny(
    profiles,
    hyper: HyperParameters,
    config: GibbsConfig,
    mode: str = "gaussian",
    single_prior: SingleSitePrior | None = None,
    n_grid: int = 48,
) -> dict:
    """Exact posterior moments for a tiny instance; see the module docstring.

    ``mode="gaussian"`` requires ``config.frozen`` to pin ``sigma2_Y``,
    ``sigma2``, ``gamma2``, and ``tau2`` and returns the full posterior
    mean vector and covariance over the labelled Gaussian coordinates.
    ``mode="grid"`` requires a single profile plus ``single_prior`` and
    returns posterior means and standard deviations for the variances,
    the history, and the heat flow.
    """
    if mode == "gaussian":
        model = build_multi_model(profiles, hyper, config)
        return _gaussian_oracle(model, config)
    if mode == "grid":
        if len(profiles) != 1 or single_prior is None:
            raise ValueError("grid mode takes exactly one profile and a single-site prior")
        model = build_single_model(profiles[0], single_prior, hyper, config)
        return _grid_oracle(model, n_grid)
    raise ValueError(f"unknown oracle mode {mode!r}")


def _frozen_pair(config: GibbsConfig, group: str):
    if group not in config.frozen:
        raise ValueError(f"gaussian oracle requires frozen {group!r}")
    value = config.frozen[group]
    if np.ndim(value):
        return float(value[0]), float(value[1])
    return float(value), float(value)


def _frozen_per_site(config: GibbsConfig, group: str, n: int):
    if group not in config.frozen:
        raise ValueError(f"gaussian oracle requires frozen {group!r}")
    return np.broadcast_to(np.asarray(config.frozen[group], dtype=float), (n,))


def _gaussian_oracle(model: GibbsModel, config: GibbsConfig) -> dict:
    h = model.hyper
    K = model.K
    n = model.n_sites
    sigma2_Y = _frozen_per_site(config, "sigma2_Y", n)
    sigma2 = _frozen_per_site(config, "sigma2", n)
    gamma2 = dict(zip(("desert", "swell"), _frozen_pair(config, "gamma2")))
    tau2 = dict(zip(("desert", "swell"), _frozen_pair(config, "tau2")))

    # Latent independent pieces zeta and the affine map theta = M zeta + m0:
    # zeta = [mu (2K), nu (2), eps_j (K each), delta_j (1 each), e_j (N_j each)]
    # theta = [per site: T_h (K), T_r (N_j), q (1); then mu_D, mu_S, nu_D, nu_S]
    S_mu = build_joint_mu_prior(h, K).cov
    S_nu = build_joint_nu_prior(h).cov
    m_mu = np.full(2 * K, h.mu0)
    m_nu = np.full(2, h.nu0)

    zeta_blocks = [S_mu, S_nu]
    zeta_means = [m_mu, m_nu]
    for j, site in enumerate(model.sites):
        zeta_blocks.append(gamma2[site.region] * np.eye(K))
        zeta_means.append(np.zeros(K))
        zeta_blocks.append(np.array([[tau2[site.region]]]))
        zeta_means.append(np.zeros(1))
        zeta_blocks.append(sigma2[j] * site.C)
        zeta_means.append(np.zeros(site.N))
    dim_zeta = sum(b.shape[0] for b in zeta_blocks)
    S_zeta = np.zeros((dim_zeta, dim_zeta))
    m_zeta = np.concatenate(zeta_means)
    pos = 0
    offsets = []
    for b in zeta_blocks:
        k = b.shape[0]
        S_zeta[pos : pos + k, pos : pos + k] = b
        offsets.append(pos)
        pos += k
    mu_off, nu_off = offsets[0], offsets[1]
    site_offs = [(offsets[2 + 3 * j], offsets[3 + 3 * j], offsets[4 + 3 * j]) for j in range(n)]

    labels = []
    for site in model.sites:
        labels += [f"th:{site.site_id}:{i}" for i in range(K)]
        labels += [f"tr:{site.site_id}:{i}" for i in range(site.N)]
        labels += [f"q0:{site.site_id}"]
    labels += [f"mu_D:{i}" for i in range(K)] + [f"mu_S:{i}" for i in range(K)]
    labels += ["nu_D", "nu_S"]
    dim_theta = len(labels)

    M = np.zeros((dim_theta, dim_zeta))
    row = 0
    th_rows = []
    tr_rows = []
    q_rows = []
    for j, site in enumerate(model.sites):
        eps_off, del_off, e_off = site_offs[j]
        mu_block = mu_off + (0 if site.region == "desert" else K)
        nu_idx = nu_off + (0 if site.region == "desert" else 1)
        # T_h = mu_region + eps
        M[row : row + K, mu_block : mu_block + K] = np.eye(K)
        M[row : row + K, eps_off : eps_off + K] = np.eye(K)
        th_rows.append(row)
        row += K
        # T_r = A (mu_region + eps) + e
        M[row : row + site.N, mu_block : mu_block + K] = site.A
        M[row : row + site.N, eps_off : eps_off + K] = site.A
        M[row : row + site.N, e_off : e_off + site.N] = np.eye(site.N)
        tr_rows.append(row)
        row += site.N
        # q = nu_region + delta
        M[row, nu_idx] = 1.0
        M[row, del_off] = 1.0
        q_rows.append(row)
        row += 1
    M[row : row + 2 * K, mu_off : mu_off + 2 * K] = np.eye(2 * K)
    row += 2 * K
    M[row : row + 2, nu_off : nu_off + 2] = np.eye(2)

    m_theta = M @ m_zeta
    S_theta = M @ S_zeta @ M.T

    # Y_j = T_rj + q_j R_j + T0_j 1 + measurement noise
    N_total = sum(site.N for site in model.sites)
    B = np.zeros((N_total, dim_theta))
    c = np.zeros(N_total)
    y = np.zeros(N_total)
    S_e = np.zeros((N_total, N_total))
    pos = 0
    for j, site in enumerate(model.sites):
        sl = slice(pos, pos + site.N)
        B[sl, tr_rows[j] : tr_rows[j] + site.N] = np.eye(site.N)
        B[sl, q_rows[j]] = site.R
        c[sl] = site.T0
        y[sl] = site.Y
        S_e[sl, sl] = sigma2_Y[j] * np.eye(site.N)
        pos += site.N

    S_y = B @ S_theta @ B.T + S_e
    gain = S_theta @ B.T @ np.linalg.inv(S_y)
    mean = m_theta + gain @ (y - B @ m_theta - c)
    cov = S_theta - gain @ B @ S_theta
    return {"labels": labels, "mean": mean, "cov": cov, "sd": np.sqrt(np.diag(cov))}


def _prior_mass_nodes(a: float, b: float, n: int) -> np.ndarray:
    """IG(a, b) nodes at midpoint quantiles: equal prior mass per node."""
    probs = (np.arange(n) + 0.5) / n
    return stats.invgamma.ppf(probs, a, scale=b)


def _grid_oracle(model: GibbsModel, n_grid: int) -> dict:
    site = model.sites[0]
    h = model.hyper
    prior = model.single_prior
    K, N = site.K, site.N

    # Y | sigma2_Y, sigma2 ~ N(A mu + T0 + q0_mean R, ...) with T_h, T_r, q out
    mean_y = site.A @ prior.mu + site.T0 + prior.q0_mean * site.R
    resid = site.Y - mean_y
    AG = site.A @ prior.Gamma
    cov_hist = AG @ site.A.T                       # A Gamma A'
    cov_flow = prior.q0_var * np.outer(site.R, site.R)
    covh_y = prior.Gamma @ site.A.T                # Cov(T_h, Y)
    covq_y = prior.q0_var * site.R                 # Cov(q0, Y)

    nodes_Y = _prior_mass_nodes(h.a_Y, h.b_Y, n_grid)
    nodes_E = _prior_mass_nodes(h.a, h.b, n_grid)

    log_w = np.empty((n_grid, n_grid))
    m_h = np.empty((n_grid, n_grid, K))
    v_h = np.empty((n_grid, n_grid, K))
    m_q = np.empty((n_grid, n_grid))
    v_q = np.empty((n_grid, n_grid))
    for i, s2Y in enumerate(nodes_Y):
        for j, s2 in enumerate(nodes_E):
            S_y = s2 * site.C + cov_hist + cov_flow + s2Y * np.eye(N)
            L = np.linalg.cholesky(S_y)
            alpha = np.linalg.solve(S_y, resid)
            log_w[i, j] = -float(np.log(np.diag(L)).sum()) - 0.5 * float(resid @ alpha)
            gain_h = np.linalg.solve(S_y, covh_y.T).T
            m_h[i, j] = prior.mu + covh_y @ alpha
            v_h[i, j] = np.diag(prior.Gamma) - np.einsum("ki,ki->k", gain_h, covh_y)
            m_q[i, j] = prior.q0_mean + covq_y @ alpha
            v_q[i, j] = prior.q0_var - float(covq_y @ np.linalg.solve(S_y, covq_y))

    w = np.exp(log_w - log_w.max())
    w /= w.sum()

    def mix_moments(m, v):
        mean = np.tensordot(w, m, axes=([0, 1], [0, 1]))
        second = np.tensordot(w, v + m**2, axes=([0, 1], [0, 1]))
        return mean, np.sqrt(second - mean**2)

    grid_Y = nodes_Y[:, None] * np.ones_like(log_w)
    grid_E = np.ones_like(log_w) * nodes_E[None, :]
    mean_s2Y = float((w * grid_Y).sum())
    sd_s2Y = float(np.sqrt((w * grid_Y**2).sum() - mean_s2Y**2))
    mean_s2 = float((w * grid_E).sum())
    sd_s2 = float(np.sqrt((w * grid_E**2).sum() - mean_s2**2))
    mean_h, sd_h = mix_moments(m_h, v_h)
    mean_q, sd_q = mix_moments(m_q, v_q)

    labels = (
        ["sigma2_Y", "sigma2"]
        + [f"th:{site.site_id}:{i}" for i in range(K)]
        + [f"q0:{site.site_id}"]
    )
    mean = np.concatenate([[mean_s2Y, mean_s2], mean_h, [float(mean_q)]])
    sd = np.concatenate([[sd_s2Y, sd_s2], sd_h, [float(sd_q)]])
    return {"labels": labels, "mean": mean, "sd": sd}
