"""Fixture CSVs are produced only through the installed `robinsim` command."""

import subprocess

import pytest


def run_robinsim(config_text, out_dir, subcommand="convergence"):
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = out_dir / "input.cfg"
    cfg.write_text(config_text)
    proc = subprocess.run(
        ["robinsim", subcommand, "--config", str(cfg), "--out", str(out_dir)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return out_dir


@pytest.fixture(scope="session")
def exp1_small_dir(tmp_path_factory):
    return run_robinsim(
        "engine = convergence\ntarget = sim1d\nsigma = 1.0\nkappa = 1.0\n"
        "x0 = 1.0\nT = 1.0\nn = 50000\ndt_list = 0.1, 0.01\n",
        tmp_path_factory.mktemp("exp1_small"),
    )


@pytest.fixture(scope="session")
def exp1_full_dir(tmp_path_factory):
    # production scale: three step sizes against the closed-form curve
    return run_robinsim(
        "engine = convergence\ntarget = sim1d\nsigma = 1.0\nkappa = 1.0\n"
        "x0 = 1.0\nT = 1.0\nn = 2000000\ndt_list = 0.1, 0.01, 0.001\n",
        tmp_path_factory.mktemp("exp1_full"),
    )


@pytest.fixture(scope="session")
def reflecting_dir(tmp_path_factory):
    # wide bins keep the per-bin counting noise well below the analytic slope
    return run_robinsim(
        "engine = convergence\ntarget = sim1d\nsigma = 1.0\nP = 0.0\n"
        "drift = -1.0\nx0 = 1.0\nT = 1.0\nn = 200000\ndt_list = 0.1, 0.01\n"
        "bins = 40\nhist_max = 4.0\n",
        tmp_path_factory.mktemp("reflecting"),
    )


@pytest.fixture(scope="session")
def halfspace_dir(tmp_path_factory):
    return run_robinsim(
        "engine = convergence\ntarget = simnd\nreference = fpe\n"
        "sigma = 0.25, 0.4, 0.4, 1.0\nx0 = 0.3, 0.0\nkappa = 1.0\nT = 0.5\n"
        "n = 20000\ndt_list = 0.02, 0.01\nbins = 60\nfpe_dx = 0.1\nfpe_dt = 0.01\n"
        "fpe_ic = exact\n",
        tmp_path_factory.mktemp("halfspace"),
    )
