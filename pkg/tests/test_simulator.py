import math

import numpy as np
import pytest
from scipy import stats

from cedrf import binary as b, gaussian as g, rng, simulator as sim
from cedrf.errors import DomainError, SizeError
from cedrf.rdmath import binary_entropy

N = 200_000


def within(res, target, k=3.0):
    return abs(res.mean_distortion - target) <= k * res.std_error


# ------------------------------------------------------------------ rng


def test_rng_counter_based():
    a = rng.uniforms(1, rng.STREAM_BINARY, 0, 1000, 3)
    b2 = rng.uniforms(1, rng.STREAM_BINARY, 500, 500, 3)
    np.testing.assert_array_equal(a[500:], b2)
    assert a.shape == (1000, 3)
    assert np.all((a > 0) & (a < 1))
    c = rng.uniforms(1, rng.STREAM_SIGNS, 0, 1000, 3)
    assert not np.array_equal(a, c)


def test_normals_are_standard():
    z = rng.normals(3, rng.STREAM_GAUSS_DISTRIBUTED, 0, 200_000, 1).ravel()
    assert stats.kstest(z, "norm").pvalue > 1e-3


def test_config_validation():
    with pytest.raises(DomainError):
        sim.SimulationConfig(0, 1)
    with pytest.raises(DomainError):
        sim.SimulationConfig(10, -1)
    with pytest.raises(DomainError):
        sim.SimulationConfig(10, 1, 0)
    with pytest.raises(SizeError):
        sim.CodebookExperimentConfig(64, 0.5, 10, 1)


# ------------------------------------------------------------------ Gaussian


def test_gaussian_distributed_oracle():
    m = g.GaussianObservationModel((2.0, 1.0, 4.0))
    rates = (0.5, 1.0, 1.5)
    res = sim.simulate_gaussian_distributed(m, rates, sim.SimulationConfig(N, 11))
    assert within(res, g.cedrf_distributed(m, rates))
    # per-encoder MSE between Y_l and its reproduction is D_l = 2^-2R (1+gamma)
    for l, (gam, r) in enumerate(zip(m.gammas, rates)):
        d = 2 ** (-2 * r) * (1 + gam)
        assert abs(res.local_distortions[l] - d) <= 3.5 * res.local_std_errors[l]


def test_gaussian_distributed_zero_rates():
    m = g.GaussianObservationModel((2.0, 2.0))
    res = sim.simulate_gaussian_distributed(m, (0, 0), sim.SimulationConfig(N, 2))
    assert within(res, 1.0)


def test_gaussian_single_observer_matches_idrf():
    m = g.GaussianObservationModel((5.0,))
    res = sim.simulate_gaussian_distributed(m, (3,), sim.SimulationConfig(N, 4))
    assert within(res, g.idrf(m, 3.0))


def test_gaussian_centralized_oracle():
    m = g.GaussianObservationModel((1.0, 2.0, 0.5))
    res = sim.simulate_gaussian_centralized(m, 1.5, sim.SimulationConfig(N, 5))
    assert within(res, g.cedrf_centralized(m, 1.5))
    sol = g.waterfilling(m, 1.5)
    for d, se, want in zip(res.local_distortions, res.local_std_errors, sol.component_distortions):
        assert abs(d - want) <= 3.5 * se + 1e-12


def test_gaussian_centralized_zero_rate_and_single():
    res = sim.simulate_gaussian_centralized(g.GaussianObservationModel((1.0, 1.0)), 0.0,
                                            sim.SimulationConfig(N, 6))
    assert within(res, 1.0)
    m = g.GaussianObservationModel((10.0,))
    res = sim.simulate_gaussian_centralized(m, 1.0, sim.SimulationConfig(N, 6))
    assert within(res, g.idrf(m, 1.0))


# ------------------------------------------------------------------ binary


def test_forward_channel_is_bayes_inverse():
    m = b.BinaryObservationModel(0.25, (0.05,))
    s, p0, p1, D = sim.forward_channel(m, 0, 0.5)
    q = m.observation_bias(0)
    assert s == pytest.approx((q - D) / (1 - 2 * D), abs=1e-15)
    # marginal of Y recovered and error probability equals D
    assert (1 - q) * p0 + q * p1 == pytest.approx(s, abs=1e-14)
    assert (1 - q) * p0 + q * (1 - p1) == pytest.approx(D, abs=1e-14)


def test_zero_rate_channel_is_constant():
    m = b.BinaryObservationModel(0.3, (0.1,))
    _, p0, p1, _ = sim.forward_channel(m, 0, 0.0)
    assert p0 == 0.0 and p1 == 0.0


@pytest.mark.parametrize("pi,alphas,rates", [
    (0.5, (0.1, 0.1), (1, 1)),
    (0.5, (0.05, 0.2, 0.3), (0.2, 0.5, 0.4)),
    (0.25, (0.05,), (0.5,)),
    (0.3, (0.1, 0.2), (0.3, 0.6)),
])
def test_binary_matches_true_chain(pi, alphas, rates):
    m = b.BinaryObservationModel(pi, alphas)
    res = sim.simulate_binary(m, rates, sim.SimulationConfig(N, 13))
    assert within(res, sim.testchannel_error_exact(m, rates))
    for l in range(m.L):
        assert abs(res.local_distortions[l] - b.local_drf(m, l, rates[l])) <= \
            3.5 * res.local_std_errors[l] + 1e-12


def test_true_chain_equals_formula_for_uniform_source():
    m = b.BinaryObservationModel(0.5, (0.05, 0.2, 0.3))
    r = (0.2, 0.5, 0.4)
    assert sim.testchannel_error_exact(m, r) == pytest.approx(b.cedrf_exact(m, r), abs=1e-12)


def test_true_chain_differs_from_formula_for_biased_source():
    # recorded finding: with pi != 1/2 the two disagree
    m = b.BinaryObservationModel(0.25, (0.05,))
    exact = sim.testchannel_error_exact(m, [0.5])
    assert exact == pytest.approx(0.101327, abs=1e-6)
    assert b.cedrf_exact(m, [0.5]) - exact > 0.007


def test_binary_zero_rates():
    m = b.BinaryObservationModel(0.3, (0.1, 0.2))
    res = sim.simulate_binary(m, (0, 0), sim.SimulationConfig(N, 3))
    assert within(res, 0.3)


def test_binary_joint_histogram_chi_square():
    m = b.BinaryObservationModel(0.3, (0.1, 0.2))
    rates = (0.4, 0.7)
    counts = sim.binary_joint_counts(m, rates, sim.SimulationConfig(10 ** 6, 21))
    law = sim.backward_joint_law(m, rates)
    np.testing.assert_allclose(law.sum(axis=(1, 2)), 1.0, atol=1e-14)
    for l in range(m.L):
        obs = counts[l].ravel()
        exp = law[l].ravel() * obs.sum()
        _, p = stats.chisquare(obs, exp, ddof=0)
        assert p > 1e-3


def test_parallel_chunks_bit_identical():
    m = b.BinaryObservationModel(0.4, (0.1, 0.2, 0.25))
    r1 = sim.simulate_binary(m, (0.3, 0.3, 0.3), sim.SimulationConfig(150_001, 8, 1))
    r4 = sim.simulate_binary(m, (0.3, 0.3, 0.3), sim.SimulationConfig(150_001, 8, 4))
    assert r1 == r4
    gm = g.GaussianObservationModel((1.0, 2.0))
    a = sim.simulate_gaussian_centralized(gm, 1.0, sim.SimulationConfig(140_000, 8, 1))
    c = sim.simulate_gaussian_centralized(gm, 1.0, sim.SimulationConfig(140_000, 8, 3))
    assert a == c


def test_backends_agree_on_simulation():
    from cedrf import _kernels
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    m = b.BinaryObservationModel(0.5, (0.1, 0.2))
    cfg = sim.SimulationConfig(50_000, 1)
    assert sim.simulate_binary(m, (0.5, 0.5), cfg, backend="numpy") == \
        sim.simulate_binary(m, (0.5, 0.5), cfg, backend="numba")


# ------------------------------------------------------------------ codebook


def test_codebook_lossless_regime():
    # R = h(q) = 1: 2^16 random words leave some of the 2^16 inputs uncovered,
    # so the finite-n local distortion is small but not zero
    m = b.BinaryObservationModel(0.5, (0.1,))
    res = sim.simulate_binary_codebook(m, sim.CodebookExperimentConfig(16, 1.0, 200, 3))
    end, local = sim.symmetric_codebook_oracle(0.1, 16, 1.0)
    assert local == pytest.approx(0.02299229223527386, abs=1e-12)
    assert abs(res.local_distortions[0] - local) <= 4 * res.local_std_errors[0]
    assert abs(res.mean_distortion - end) <= 4 * res.std_error


def test_codebook_zero_rate():
    m = b.BinaryObservationModel(0.5, (0.1,))
    res = sim.simulate_binary_codebook(m, sim.CodebookExperimentConfig(16, 0.0, 200, 3))
    assert abs(res.mean_distortion - 0.5) <= 4 * res.std_error


@pytest.mark.parametrize("n", [8, 16])
def test_codebook_matches_exact_finite_n_oracle(n):
    m = b.BinaryObservationModel(0.5, (0.1,))
    res = sim.simulate_binary_codebook(m, sim.CodebookExperimentConfig(n, 0.5, 400, 17))
    end, local = sim.symmetric_codebook_oracle(0.1, n, 0.5)
    assert abs(res.local_distortions[0] - local) <= 4 * res.local_std_errors[0]
    assert abs(res.mean_distortion - end) <= 4 * res.std_error


def test_codebook_oracle_values():
    # exact expected local distortion for i.i.d. uniform codebooks
    locs = [sim.symmetric_codebook_oracle(0.1, n, 0.5)[1] for n in (8, 16, 24, 32)]
    assert locs == pytest.approx([0.1983, 0.1614, 0.1472, 0.13959], abs=6e-5)
    assert all(x > y for x, y in zip(locs, locs[1:]))


def test_codebook_requires_single_observer():
    m = b.BinaryObservationModel(0.5, (0.1, 0.1))
    with pytest.raises(DomainError):
        sim.simulate_binary_codebook(m, sim.CodebookExperimentConfig(8, 0.5, 10, 1))
