"""Data I/O, run configs, synthetic data, oracles, sensitivity, and the CLI."""

import filecmp
import json

import numpy as np
import pytest

from borehole_gst import HyperParameters, marginalize_single_site, run_chain, run_single_site
from borehole_gst.gibbs import GibbsConfig
from borehole_gst.harness import (
    load_borehole,
    load_chain,
    load_run_config,
    load_site_table,
    oracle_posterior_tiny,
    save_chain,
    sensitivity_sweep,
    synthetic,
    write_borehole,
    write_site_table,
)
from borehole_gst.harness import cli, dataio, sensitivity
from borehole_gst.harness.cli import main
from conftest import tiny_profile
import mc_checks


@pytest.fixture(scope="module")
def truth():
    return synthetic.make_truth()


@pytest.fixture(scope="module")
def tiny_chain(truth):
    profiles = [
        tiny_profile(truth, "SRD-1", seed=41, n_obs=8),
        tiny_profile(truth, "SRS-4", seed=42, n_obs=8),
    ]
    config = GibbsConfig(n_iter=60, n_burn=20, seed=7, breakpoints=(1800, 1900, 1950))
    return run_chain(profiles, HyperParameters(), config)


# ---------------------------------------------------------------------------
# borehole and site-table round trips
# ---------------------------------------------------------------------------


def test_borehole_round_trip_is_exact(truth, tmp_path):
    p = synthetic.simulate_borehole(truth, "WSR-1", 3)
    write_borehole(p, tmp_path / "p.csv", tmp_path / "l.csv")
    q = load_borehole(
        tmp_path / "p.csv",
        tmp_path / "l.csv",
        site_id=p.site_id,
        region=p.region,
        T0=p.T0,
        log_year=p.log_year,
    )
    assert np.array_equal(p.depths, q.depths)
    assert np.array_equal(p.temps, q.temps)
    assert np.array_equal(p.layer_bottoms, q.layer_bottoms)
    assert np.array_equal(p.conductivities, q.conductivities)


def test_borehole_header_is_checked(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("depth,temp\n10,12.5\n")
    good = tmp_path / "good.csv"
    good.write_text("bottom_depth_m,conductivity_W_mK\n100,3.0\n")
    with pytest.raises(ValueError, match="expected header"):
        load_borehole(bad, good, site_id="X", region="desert", T0=10.0, log_year=1980)


def test_borehole_malformed_rows_report_line(tmp_path):
    prof = tmp_path / "p.csv"
    prof.write_text("depth_m,temp_C\n10,12.5\n20,oops\n")
    layers = tmp_path / "l.csv"
    layers.write_text("bottom_depth_m,conductivity_W_mK\n100,3.0\n")
    with pytest.raises(ValueError, match=r"p\.csv:3"):
        load_borehole(prof, layers, site_id="X", region="desert", T0=10.0, log_year=1980)
    prof.write_text("depth_m,temp_C\n10,12.5,7\n")
    with pytest.raises(ValueError, match="2 columns"):
        load_borehole(prof, layers, site_id="X", region="desert", T0=10.0, log_year=1980)


def test_site_table_round_trip_is_exact(truth, tmp_path):
    profiles = [synthetic.simulate_borehole(truth, sid, i) for i, sid in
                enumerate(("SRD-1", "SRS-3"))]
    write_site_table(profiles, tmp_path)
    back = load_site_table(tmp_path)
    assert [p.site_id for p in back] == ["SRD-1", "SRS-3"]
    for p, q in zip(profiles, back):
        assert q.region == p.region
        assert q.T0 == p.T0
        assert q.log_year == p.log_year
        assert np.array_equal(q.depths, p.depths)
        assert np.array_equal(q.temps, p.temps)


# ---------------------------------------------------------------------------
# chain persistence
# ---------------------------------------------------------------------------


def test_chain_round_trip(tiny_chain, tmp_path):
    save_chain(tiny_chain, tmp_path / "chain")
    back = load_chain(tmp_path / "chain")
    assert set(back.draws) == set(tiny_chain.draws)
    for key in tiny_chain.draws:
        assert np.array_equal(back.draws[key], tiny_chain.draws[key]), key
    assert back.site_ids == tiny_chain.site_ids
    assert back.regions == tiny_chain.regions
    assert np.array_equal(back.breakpoints, tiny_chain.breakpoints)
    assert back.terminals == tiny_chain.terminals
    assert back.seed == tiny_chain.seed
    assert back.variant == "multi"


def test_chain_outputs_are_reproducible_bytes(truth, tmp_path):
    profiles = [
        tiny_profile(truth, "SRD-1", seed=41, n_obs=8),
        tiny_profile(truth, "SRS-4", seed=42, n_obs=8),
    ]
    config = GibbsConfig(n_iter=60, n_burn=20, seed=7, breakpoints=(1800, 1900, 1950))
    dirs = []
    for run in ("a", "b"):
        chain = run_chain(profiles, HyperParameters(), config)
        dirs.append(save_chain(chain, tmp_path / run))
    a, b = dirs
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        if name == "manifest.json":
            continue  # holds the wall time, which legitimately differs
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    ma.pop("wall_time_s"), mb.pop("wall_time_s")
    assert ma == mb
    assert ma["config_hash"] == mb["config_hash"]


def test_config_hash_is_key_order_independent():
    h1 = dataio.config_hash({"a": 1, "b": [2.0, 3.0]})
    h2 = dataio.config_hash({"b": [2.0, 3.0], "a": 1})
    assert h1 == h2
    assert h1 != dataio.config_hash({"a": 1, "b": [2.0, 3.5]})


# ---------------------------------------------------------------------------
# synthetic data
# ---------------------------------------------------------------------------


def test_truth_round_trip(truth, tmp_path):
    synthetic.write_truth(truth, tmp_path / "truth.json")
    back = synthetic.load_truth(tmp_path / "truth.json")
    assert back.preset == truth.preset
    assert back.seed == truth.seed
    assert np.array_equal(back.breakpoints, truth.breakpoints)
    assert set(back.histories) == set(truth.histories)
    for site_id, h in truth.histories.items():
        assert np.array_equal(back.histories[site_id], h), site_id
    assert back.sigma_Y == truth.sigma_Y
    assert back.sigma == truth.sigma
    assert [s.site_id for s in back.sites] == [s.site_id for s in truth.sites]
    assert back.site("SRD-1").q0_true == truth.site("SRD-1").q0_true


def test_committed_dataset_regenerates_byte_identically(data_dir, tmp_path):
    """data/ is exactly what generate_dataset writes with the default seeds."""
    synthetic.generate_dataset(tmp_path)
    regenerated = sorted(p.name for p in tmp_path.iterdir())
    committed = sorted(p.name for p in data_dir.iterdir() if p.name != "README.md")
    assert regenerated == committed
    for name in regenerated:
        assert filecmp.cmp(tmp_path / name, data_dir / name, shallow=False), name


def test_simulated_profiles_match_recorded_truth(data_dir, truth):
    profiles = load_site_table(data_dir)
    assert len(profiles) == 9
    by_id = {p.site_id: p for p in profiles}
    spec = truth.site("SRD-1")
    p = by_id["SRD-1"]
    assert p.T0 == spec.T0
    assert p.log_year == spec.log_year
    assert p.region == "desert"
    assert by_id["SRS-3"].region == "swell"
    # depths: 20 m to the deepest layer bottom in 5 m steps
    assert p.depths[0] == 20.0
    assert np.all(np.diff(p.depths) == 5.0)
    assert p.depths[-1] == spec.layers[-1][0]


# ---------------------------------------------------------------------------
# run configs
# ---------------------------------------------------------------------------


def test_packaged_preset_loads():
    cfg = load_run_config("sanrafael-default")
    assert cfg.variant == "multi"
    assert cfg.n_iter == 30_000
    assert cfg.n_burn == 2_000
    assert len(cfg.breakpoints) == 11
    assert cfg.phi == 0.0


def test_config_relative_data_dir_resolves_against_file(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text("[run]\nseed = 5\n\n[data]\ndir = \"d\"\n")
    cfg = load_run_config(path)
    assert cfg.data_dir == tmp_path / "d"
    assert cfg.gibbs_config().seed == 5
    assert cfg.gibbs_config(seed=9).seed == 9


def test_config_single_variant_defaults_and_validation(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text("[run]\nvariant = \"single\"\n\n[single]\nsite = \"SRD-1\"\n")
    cfg = load_run_config(path)
    assert cfg.single_site == "SRD-1"
    assert cfg.n_iter == 10_000  # shorter single-site default
    path.write_text("[run]\nvariant = \"single\"\n")
    with pytest.raises(ValueError, match="single"):
        load_run_config(path)


def test_config_rejects_unknown_fields(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text("[run]\nvariant = \"both\"\n")
    with pytest.raises(ValueError, match="variant"):
        load_run_config(path)
    path.write_text("[hyper]\nbogus = 1.0\n")
    with pytest.raises(ValueError, match="bogus"):
        load_run_config(path)


def test_config_hyper_overrides_and_phi(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text("[run]\nphi = 0.65\n\n[hyper]\nnu0 = 0.05\n")
    cfg = load_run_config(path)
    h = cfg.hyper()
    assert h.phi == 0.65
    assert h.nu0 == 0.05
    # explicit [hyper].phi wins over [run].phi
    path.write_text("[run]\nphi = 0.65\n\n[hyper]\nphi = 0.85\n")
    assert load_run_config(path).hyper().phi == 0.85


def test_missing_config_raises():
    with pytest.raises(FileNotFoundError):
        load_run_config("no-such-preset")


def test_config_seed_required_somewhere(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text("[run]\nn_iter = 100\n")
    cfg = load_run_config(path)
    with pytest.raises(ValueError, match="seed"):
        cfg.gibbs_config()


# ---------------------------------------------------------------------------
# oracles against short chains
# ---------------------------------------------------------------------------


def test_gaussian_oracle_matches_frozen_variance_chain(truth):
    profiles = [
        tiny_profile(truth, "SRD-2", seed=31, n_obs=5),
        tiny_profile(truth, "SRS-5", seed=32, n_obs=5),
    ]
    hyper = HyperParameters()
    config = GibbsConfig(
        n_iter=20_000,
        n_burn=2_000,
        seed=99,
        breakpoints=(1800, 1900, 1950),
        frozen={
            "sigma2_Y": (0.0016, 0.0025),
            "sigma2": (0.01, 0.02),
            "gamma2": (0.6, 1.0),
            "tau2": (4e-4, 5e-4),
        },
    )
    oracle = oracle_posterior_tiny(profiles, hyper, config, mode="gaussian")
    chain = run_chain(profiles, hyper, config)
    report = mc_checks.oracle_vs_chain(chain, oracle)
    assert max(abs(z) for z, _ in report.values()) < 4.0
    assert max(abs(r - 1.0) for _, r in report.values()) < 0.10


def test_grid_oracle_matches_single_site_chain(truth):
    profile = tiny_profile(truth, "SRD-4", seed=77, n_obs=6)
    hyper = HyperParameters()
    prior = marginalize_single_site(hyper, "desert", K=3)
    config = GibbsConfig(n_iter=22_000, n_burn=2_000, seed=3, breakpoints=(1800, 1900, 1950))
    oracle = oracle_posterior_tiny(
        [profile], hyper, config, mode="grid", single_prior=prior, n_grid=64
    )
    chain = run_single_site(profile, prior, hyper, config)
    report = mc_checks.oracle_vs_chain(chain, oracle)
    assert max(abs(z) for z, _ in report.values()) < 4.0
    for label, (_, ratio) in report.items():
        # variance sds are heavy-tailed and converge slowest by far
        tol = 0.30 if label.startswith("sigma2") else 0.10
        assert abs(ratio - 1.0) < tol, label


def test_gaussian_oracle_requires_frozen_variances(truth):
    profiles = [
        tiny_profile(truth, "SRD-2", seed=31, n_obs=5),
        tiny_profile(truth, "SRS-5", seed=32, n_obs=5),
    ]
    config = GibbsConfig(n_iter=100, n_burn=10, seed=1, breakpoints=(1800, 1900, 1950))
    with pytest.raises(ValueError, match="frozen"):
        oracle_posterior_tiny(profiles, HyperParameters(), config, mode="gaussian")


def test_grid_oracle_requires_single_profile(truth):
    profile = tiny_profile(truth, "SRD-4", seed=77, n_obs=6)
    config = GibbsConfig(n_iter=100, n_burn=10, seed=1, breakpoints=(1800, 1900, 1950))
    with pytest.raises(ValueError, match="single"):
        oracle_posterior_tiny([profile, profile], HyperParameters(), config, mode="grid")


# ---------------------------------------------------------------------------
# sensitivity sweeps
# ---------------------------------------------------------------------------


def test_prior_descriptors_reproduce_published_rows():
    h = HyperParameters().with_updates(eta2_D=0.010**2, eta2_S=0.010**2, eta2_0=0.020**2)
    d = sensitivity.flow_prior_descriptors(h)
    assert d["prior_sd_mW"] == pytest.approx(22.36, abs=0.005)
    assert d["prior_corr"] == pytest.approx(0.80, abs=0.005)
    d = sensitivity.history_prior_descriptors(HyperParameters())
    assert d["prior_sd_K"] == pytest.approx(0.55, abs=0.005)
    assert d["prior_corr"] == pytest.approx(1.0 / 3.0, abs=0.005)


def test_sensitivity_sweep_runs_error_correlation_plan(truth):
    profiles = [
        tiny_profile(truth, "SRD-1", seed=41, n_obs=8),
        tiny_profile(truth, "SRS-4", seed=42, n_obs=8),
    ]
    config = GibbsConfig(n_iter=120, n_burn=20, seed=2, breakpoints=(1800, 1900, 1950))
    records = sensitivity_sweep(profiles, HyperParameters(), config, "error-correlation")
    assert [r["name"] for r in records] == ["phi=0", "phi=0.65", "phi=0.85"]
    for r in records:
        assert "error" not in r
        assert "nu_D_mean_mW" in r and "nu_S_sd_mW" in r
        assert set(r["q0_mean_mW"]) == {"SRD-1", "SRS-4"}


def test_sensitivity_sweep_isolates_variant_failures(truth, monkeypatch):
    profiles = [
        tiny_profile(truth, "SRD-1", seed=41, n_obs=8),
        tiny_profile(truth, "SRS-4", seed=42, n_obs=8),
    ]
    config = GibbsConfig(n_iter=120, n_burn=20, seed=2, breakpoints=(1800, 1900, 1950))
    real = sensitivity._run_variant

    def flaky(profs, hyper, cfg):
        if hyper.phi == 0.65:
            raise RuntimeError("synthetic variant failure")
        return real(profs, hyper, cfg)

    monkeypatch.setattr(sensitivity, "_run_variant", flaky)
    records = sensitivity_sweep(profiles, HyperParameters(), config, "error-correlation")
    by_name = {r["name"]: r for r in records}
    assert by_name["phi=0.65"]["error"]["type"] == "RuntimeError"
    assert "traceback" in by_name["phi=0.65"]["error"]
    assert "error" not in by_name["phi=0"]
    with pytest.raises(ValueError, match="unknown plan"):
        sensitivity_sweep(profiles, HyperParameters(), config, "bogus")


def test_t0_shift_plan_moves_intercepts(truth):
    profiles = [
        tiny_profile(truth, "SRD-1", seed=41, n_obs=8),
        tiny_profile(truth, "SRS-4", seed=42, n_obs=8),
    ]
    # the truncated profiles have no depths below the regional defaults,
    # so the se regressions need explicit shallow cutoffs
    config = GibbsConfig(
        n_iter=120,
        n_burn=20,
        seed=2,
        breakpoints=(1800, 1900, 1950),
        cutoffs={"SRD-1": 30.0, "SRS-4": 30.0},
    )
    records = sensitivity_sweep(profiles, HyperParameters(), config, "t0-shift")
    assert [r["name"] for r in records] == ["T0-3se", "T0+0se", "T0+3se"]
    for r in records:
        assert "error" not in r
        assert set(r["params"]["se_T0"]) == {"SRD-1", "SRS-4"}


# ---------------------------------------------------------------------------
# command-line interface
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def cli_workspace(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    cfg = tmp / "cfg.toml"
    cfg.write_text(
        "[run]\n"
        "n_iter = 300\n"
        "n_burn = 100\n"
        "seed = 99\n"
        "\n"
        "[data]\n"
        "dir = \"data\"\n"
    )
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp / "data")]) == 0
    return tmp, cfg


def test_cli_simulate_writes_dataset(cli_workspace):
    tmp, _ = cli_workspace
    assert (tmp / "data" / "sites.csv").exists()
    assert (tmp / "data" / "truth.json").exists()
    assert (tmp / "data" / "SRD-1_profile.csv").exists()
    assert len(load_site_table(tmp / "data")) == 9


def test_cli_preprocess(cli_workspace, capsys):
    tmp, cfg = cli_workspace
    assert main(["preprocess", "--config", str(cfg), "--out", str(tmp / "pre")]) == 0
    out = capsys.readouterr().out
    assert "SRD-1" in out and "q0_hat" in out
    header = (tmp / "pre" / "preprocess.csv").read_text().splitlines()[0]
    assert header.startswith("site_id,region,cutoff_m,n_used")


def test_cli_fit_multi_and_summarize(cli_workspace):
    tmp, cfg = cli_workspace
    chain_dir = tmp / "chain"
    assert main(["fit-multi", "--config", str(cfg), "--out", str(chain_dir)]) == 0
    for name in ("manifest.json", "summary.csv", "flows.txt", "changes.csv",
                 "site_scalars.csv", "region_params.csv", "tr_draws.npz"):
        assert (chain_dir / name).exists(), name
    chain = load_chain(chain_dir)
    assert chain.n_stored == 200
    assert len(chain.site_ids) == 9

    out = tmp / "summ"
    assert main(["summarize", "--chain", str(chain_dir), "--out", str(out)]) == 0
    assert (out / "summary.csv").exists()
    assert (out / "changes.csv").exists()


def test_cli_fit_single(cli_workspace):
    tmp, cfg = cli_workspace
    out = tmp / "single"
    assert main(
        ["fit-single", "--config", str(cfg), "--site", "SRS-3", "--out", str(out)]
    ) == 0
    chain = load_chain(out)
    assert chain.variant == "single"
    assert chain.site_ids == ["SRS-3"]


def test_cli_sensitivity(cli_workspace):
    tmp, cfg = cli_workspace
    out = tmp / "sens"
    assert main(
        ["sensitivity", "--config", str(cfg), "--plan", "error-correlation",
         "--out", str(out)]
    ) == 0
    doc = json.loads((out / "sensitivity.json").read_text())
    assert doc["plan"] == "error-correlation"
    assert [v["name"] for v in doc["variants"]] == ["phi=0", "phi=0.65", "phi=0.85"]


def test_cli_errors_are_one_line_json(cli_workspace, capsys):
    tmp, cfg = cli_workspace
    assert main(["summarize"]) == 1
    record = json.loads(capsys.readouterr().err.strip())
    assert record["error"] == "ValueError"
    assert record["command"] == "summarize"

    assert main(["fit-single", "--config", str(cfg), "--site", "NOPE"]) == 1
    record = json.loads(capsys.readouterr().err.strip())
    assert "NOPE" in record["message"]


def test_cli_seed_override_changes_draws(cli_workspace):
    tmp, cfg = cli_workspace
    a = tmp / "seed-a"
    b = tmp / "seed-b"
    assert main(["fit-multi", "--config", str(cfg), "--seed", "1", "--out", str(a)]) == 0
    assert main(["fit-multi", "--config", str(cfg), "--seed", "2", "--out", str(b)]) == 0
    ca, cb = load_chain(a), load_chain(b)
    assert ca.seed == 1 and cb.seed == 2
    assert not np.array_equal(ca.array("q0:SRD-1"), cb.array("q0:SRD-1"))
