import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robinsim._ensemble import BLOCK_SIZE, DEFAULT_SEED, block_rng
from robinsim.analytic1d import RobinParams1D, density, density_dx
from robinsim.coefficients import constant_model_1d
from robinsim.errors import ConfigError
from robinsim.euler1d import (
    Boundary1D,
    EnsembleResult1D,
    P_to_kappa,
    SimConfig1D,
    default_bin_edges,
    empirical_density,
    kappa_to_P,
    run_ensemble_1d,
    step_1d,
)

P_SUR = 0.7709508519720129  # survival at sigma = kappa = x0 = T = 1, frozen
MODEL_STD = constant_model_1d(drift=0.0, sigma=1.0)


def test_kappa_to_P_values():
    assert kappa_to_P(1.0, 1.0) == pytest.approx(np.sqrt(np.pi), abs=1e-15)
    assert kappa_to_P(0.0, 5.0) == 0.0
    assert kappa_to_P(1.0, 4.0) == pytest.approx(np.sqrt(np.pi) / 2.0, abs=1e-15)


def test_kappa_P_round_trip():
    for kappa, sigma in ((1.0, 1.0), (0.3, 2.5), (7.0, 0.04)):
        assert P_to_kappa(kappa_to_P(kappa, sigma), sigma) == pytest.approx(
            kappa, abs=1e-15
        )


def test_calibration_rejects_bad_input():
    with pytest.raises(ConfigError):
        kappa_to_P(-1.0, 1.0)
    with pytest.raises(ConfigError):
        kappa_to_P(1.0, 0.0)
    with pytest.raises(ConfigError):
        Boundary1D(P=-0.5)


def test_step_interior_move():
    x = step_1d(1.0, 0.0, MODEL_STD, Boundary1D(P=0.0), 0.01, z=0.5)
    assert x == pytest.approx(1.0707106781186548, abs=1e-16)


def test_step_crossing_reflects_or_terminates():
    boundary = Boundary1D(P=np.sqrt(np.pi))  # P sqrt(dt) ~ 0.177
    # proposal 0.01 - 2 sqrt(0.02) < 0 crosses the wall
    refl = step_1d(0.01, 0.0, MODEL_STD, boundary, 0.01, z=-2.0, u=0.5)
    assert refl == pytest.approx(0.2728427124746190, abs=1e-15)
    dead = step_1d(0.01, 0.0, MODEL_STD, boundary, 0.01, z=-2.0, u=0.1)
    assert dead is None


def test_step_crossing_needs_uniform_when_absorbing():
    with pytest.raises(ConfigError, match="uniform draw"):
        step_1d(0.01, 0.0, MODEL_STD, Boundary1D(P=1.0), 0.01, z=-2.0)


def test_step_zero_proposal_is_interior():
    # x' = 0 exactly must not trigger the boundary rule, even with u below the
    # termination threshold
    model = constant_model_1d(drift=0.0, sigma=0.5)
    x = float(np.sqrt(0.5))
    out = step_1d(x, 0.0, model, Boundary1D(P=1.0), 0.5, z=-1.0, u=0.0)
    assert out == 0.0


def test_step_pure_reflection_never_terminates():
    rng = np.random.default_rng(5)
    x = 0.05
    for _ in range(10_000):
        x = step_1d(x, 0.0, MODEL_STD, Boundary1D(P=0.0), 0.01, z=rng.standard_normal())
        assert x is not None and x >= 0.0


def test_config_validation():
    with pytest.raises(ConfigError, match="integer multiple"):
        SimConfig1D(model=MODEL_STD, boundary=Boundary1D(P=0.0), x0=1.0, T=1.0, dt=0.3, n=10)
    with pytest.raises(ConfigError, match="termination probability"):
        SimConfig1D(model=MODEL_STD, boundary=Boundary1D(P=2.0), x0=1.0, T=1.0, dt=0.5, n=10)
    with pytest.raises(ConfigError, match="checkpoint"):
        SimConfig1D(
            model=MODEL_STD, boundary=Boundary1D(P=0.0), x0=1.0, T=1.0, dt=0.25,
            n=10, checkpoints=(0.3,),
        )
    with pytest.raises(ConfigError, match="x0 must be positive"):
        SimConfig1D(model=MODEL_STD, boundary=Boundary1D(P=0.0), x0=-1.0, T=1.0, dt=0.5, n=10)


def test_default_bin_edges_span():
    cfg = SimConfig1D(
        model=constant_model_1d(drift=-1.0, sigma=1.0),
        boundary=Boundary1D(P=0.0), x0=1.0, T=1.0, dt=0.01, n=10,
    )
    edges = default_bin_edges(cfg)
    assert edges.size == 201
    assert edges[0] == 0.0
    assert edges[-1] == pytest.approx(1.0 + 1.0 + 6.0, abs=1e-12)


def test_normal_generator_moment_contract():
    # engine RNG streams must deliver accurate first two moments at 1e7 draws
    total = 0
    s1 = 0.0
    s2 = 0.0
    block = 0
    while total < 10_000_000:
        m = min(BLOCK_SIZE, 10_000_000 - total)
        z = block_rng(DEFAULT_SEED, block).standard_normal(m)
        s1 += z.sum()
        s2 += (z * z).sum()
        total += m
        block += 1
    mean = s1 / total
    var = s2 / total - mean * mean
    assert abs(mean) < 1e-3
    assert abs(var - 1.0) < 1e-3


def test_reflecting_ensemble_survives_entirely():
    cfg = SimConfig1D(
        model=constant_model_1d(drift=-1.0, sigma=1.0),
        boundary=Boundary1D(P=0.0), x0=0.1, T=1.0, dt=0.1, n=2000,
    )
    res = run_ensemble_1d(cfg)
    assert res.n_survived == res.n_total == 2000
    assert res.n_terminated == 0
    assert int(res.counts.sum()) + res.overflow == res.n_survived


def test_mass_accounting_with_absorption(table1_results):
    for res in table1_results.values():
        assert res.n_survived + res.n_terminated == res.n_total
        assert int(res.counts.sum()) + res.overflow == res.n_survived
        assert 0.0 <= res.p_hat <= 1.0


def test_survival_bias_dt_1e1_large_ensemble():
    cfg = SimConfig1D(
        model=MODEL_STD, boundary=Boundary1D(P=np.sqrt(np.pi)),
        x0=1.0, T=1.0, dt=1e-1, n=10_000_000,
    )
    res = run_ensemble_1d(cfg)
    bias = P_SUR - res.p_hat
    assert bias == pytest.approx(0.0456, abs=3.0 * res.stderr)


def test_survival_bias_dt_1e2_large_ensemble():
    cfg = SimConfig1D(
        model=MODEL_STD, boundary=Boundary1D(P=np.sqrt(np.pi)),
        x0=1.0, T=1.0, dt=1e-2, n=10_000_000,
    )
    res = run_ensemble_1d(cfg)
    bias = P_SUR - res.p_hat
    assert bias == pytest.approx(0.0132, abs=3.0 * res.stderr)


def test_bias_shrinks_like_sqrt_dt(table1_results):
    biases = [P_SUR - table1_results[dt].p_hat for dt in (1e-1, 1e-2, 1e-3)]
    for b_coarse, b_fine in zip(biases, biases[1:]):
        assert 2.2 < b_coarse / b_fine < 5.0


def test_determinism_same_seed_same_result():
    cfg = SimConfig1D(
        model=MODEL_STD, boundary=Boundary1D(P=np.sqrt(np.pi)),
        x0=1.0, T=1.0, dt=0.01, n=100_000,
    )
    a = run_ensemble_1d(cfg)
    b = run_ensemble_1d(cfg)
    assert np.array_equal(a.counts, b.counts)
    assert a.n_survived == b.n_survived


def test_determinism_independent_of_worker_count():
    cfg = SimConfig1D(
        model=MODEL_STD, boundary=Boundary1D(P=np.sqrt(np.pi)),
        x0=1.0, T=1.0, dt=0.01, n=200_000,
    )
    one = run_ensemble_1d(cfg, n_workers=1)
    four = run_ensemble_1d(cfg, n_workers=4)
    assert np.array_equal(one.counts, four.counts)
    assert one.n_survived == four.n_survived
    assert one.overflow == four.overflow


def test_uniform_stream_layout_independent_of_P():
    # uniforms are consumed on every crossing regardless of P, so a run with a
    # vanishing-but-nonzero P is bitwise identical to the pure-reflection run
    base = dict(model=MODEL_STD, x0=0.2, T=1.0, dt=0.01, n=50_000)
    res0 = run_ensemble_1d(SimConfig1D(boundary=Boundary1D(P=0.0), **base))
    res1 = run_ensemble_1d(SimConfig1D(boundary=Boundary1D(P=1e-12), **base))
    assert np.array_equal(res0.counts, res1.counts)
    assert res0.n_survived == res1.n_survived


def test_empirical_density_single_bin():
    res = EnsembleResult1D(
        n_total=100, n_survived=50, bin_edges=np.array([0.0, 2.0]),
        counts=np.array([50]), overflow=0, dt=0.1, T=1.0, seed=1,
    )
    lo, hi, dens = empirical_density(res)
    assert dens.tolist() == [0.25]  # (50/100) / width 2


def test_empirical_density_uniform_endpoints():
    rng = np.random.default_rng(17)
    edges = np.linspace(0.0, 1.0, 101)
    counts, _ = np.histogram(rng.uniform(0.0, 1.0, 100_000), bins=edges)
    res = EnsembleResult1D(
        n_total=100_000, n_survived=100_000, bin_edges=edges,
        counts=counts.astype(np.int64), overflow=0, dt=0.1, T=1.0, seed=1,
    )
    _, _, dens = empirical_density(res)
    w = 0.01
    tol = 5.0 * np.sqrt(counts) / (100_000 * w)
    assert np.all(np.abs(dens - 1.0) < tol)


def test_empirical_density_rejects_empty_histogram():
    res = EnsembleResult1D(
        n_total=10, n_survived=10, bin_edges=np.array([0.0]),
        counts=np.zeros(0, np.int64), overflow=10, dt=0.1, T=1.0, seed=1,
    )
    with pytest.raises(ConfigError, match="zero bins"):
        empirical_density(res)


def test_density_integrates_to_in_range_fraction(table1_results):
    res = table1_results[1e-2]
    lo, hi, dens = empirical_density(res)
    mass = float(np.sum(dens * (hi - lo)))
    expected = (res.n_survived - res.overflow) / res.n_total
    assert mass == pytest.approx(expected, abs=1e-12)


def test_small_step_density_matches_analytic(fine1d_result, std_params):
    # dt=1e-4 run against the closed form, over well-populated bins
    from reference_values import bin_average

    lo, hi, dens = empirical_density(fine1d_result)
    sel = fine1d_result.counts > 1000
    ref = bin_average(std_params, 1.0, lo[sel], hi[sel])
    assert sel.sum() > 50
    assert np.max(np.abs(dens[sel] - ref)) < 0.01


def test_checkpoint_attrition(fine1d_result):
    alive = fine1d_result.checkpoint_alive
    assert alive.tolist() == [960757, 886006, 822282]  # frozen regression
    assert np.all(np.diff(alive) < 0)
    assert alive[-1] >= fine1d_result.n_survived


def test_reflected_scheme_law_flat_at_wall(reflecting_exact_law):
    # noise-free law of the P=0, a=-1 scheme at dt=1e-2: the first-bin slope
    # is a small fraction of the analytic wall slope 1.064
    binned = reflecting_exact_law["binned"]
    edges = reflecting_exact_law["edges"]
    width = edges[1] - edges[0]
    params = RobinParams1D(sigma=1.0, kappa=0.0, x0=1.0, drift=-1.0)
    analytic_slope = abs(float(density_dx(0.0, 1.0, params)))
    scheme_slope = abs(binned[1] - binned[0]) / width
    ratio = scheme_slope / analytic_slope
    assert 0.10 < ratio < 0.25


def test_reflected_scheme_law_interior_bias_scale(reflecting_exact_law):
    # away from the boundary layer the scheme law tracks the closed form with
    # an O(dt) systematic offset
    binned = reflecting_exact_law["binned"]
    edges = reflecting_exact_law["edges"]
    params = RobinParams1D(sigma=1.0, kappa=0.0, x0=1.0, drift=-1.0)
    mids = 0.5 * (edges[:-1] + edges[1:])
    sel = mids > 0.5  # 5 sqrt(sigma dt)
    ref = density(mids[sel], 1.0, params)
    assert np.max(np.abs(binned[sel] - ref)) < 5e-3


def test_reflecting_histogram_matches_scheme_law(reflecting_result, reflecting_exact_law):
    # the n=1e7 histogram agrees bin by bin with the iterated one-step law,
    # within binomial noise: the sampler realizes exactly this law
    law = reflecting_exact_law["binned"]
    edges = reflecting_exact_law["edges"]
    width = edges[1] - edges[0]
    n = reflecting_result.n_total
    q = law * width  # per-bin probability under the scheme law
    dens = reflecting_result.counts / (n * width)
    stderr = np.sqrt(q * (1.0 - q) / n) / width
    z = (dens - law) / stderr
    assert np.max(np.abs(z)) < 5.0


@given(
    x=st.floats(1e-6, 5.0),
    z=st.floats(-4.0, 4.0),
    P=st.floats(0.0, 5.0),
    u=st.floats(0.0, 1.0),
)
@settings(max_examples=300, deadline=None)
def test_step_output_never_negative(x, z, P, u):
    out = step_1d(x, 0.0, MODEL_STD, Boundary1D(P=P), 0.01, z=z, u=u)
    xp = x + np.sqrt(0.02) * z
    if xp >= 0.0:
        assert out == pytest.approx(xp, abs=1e-15)
    else:
        assert out is None or out == pytest.approx(-xp, abs=1e-15)
        assert (out is None) == (u < P * 0.1)
