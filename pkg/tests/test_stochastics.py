import math

import numpy as np
import pytest
from scipy import integrate, stats

from lcsfid.errors import InvalidParameterError
from lcsfid.model import DeviceParams
from lcsfid.protocol import ErrorSample
from lcsfid.stochastics import (
    ErrorDistribution,
    pdf_decay_times,
    pdf_frequency,
    pdf_joint,
    population,
    sample,
    sample_batch,
)

OMEGA = 2 * np.pi / 10e-9


def make_dist(t_bin=None, tau_d=0.2e-9, sigma=0.02 * OMEGA, n=1):
    return ErrorDistribution(omega_mean=OMEGA, sigma_c=sigma, tau_d=tau_d, n=n, t_bin=t_bin)


def test_pdf_frequency_peak_and_normalization():
    dist = make_dist()
    peak = pdf_frequency(OMEGA, dist)
    assert peak == pytest.approx(1.0 / math.sqrt(2 * math.pi * dist.sigma_c ** 2), rel=1e-12)
    total, _ = integrate.quad(lambda w: pdf_frequency(w, dist),
                              OMEGA - 12 * dist.sigma_c, OMEGA + 12 * dist.sigma_c)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_pdf_frequency_symmetric():
    dist = make_dist()
    d = 3.7 * dist.sigma_c
    assert pdf_frequency(OMEGA + d, dist) == pytest.approx(pdf_frequency(OMEGA - d, dist), rel=1e-12)


def test_population_values():
    tau_d = 0.5e-9
    assert population(0.0, 0.0, tau_d) == 1.0
    assert population(tau_d, 0.0, tau_d) == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert population(-50e-9, 20e-12, tau_d) == pytest.approx(0.0, abs=1e-12)
    assert population(-1e-12, 0.0, tau_d) == 0.0


def test_population_rise_shape():
    # With a finite rise constant the population passes 1/2 * exp(-t/tau) at t = 0.
    tau_r, tau_d = 30e-12, 0.5e-9
    assert population(0.0, tau_r, tau_d) == pytest.approx(0.5, rel=1e-12)


def test_pdf_decay_times_values():
    tau = 0.2e-9
    dist = ErrorDistribution(omega_mean=OMEGA, sigma_c=0.01 * OMEGA, tau_d=tau, n=1)
    val = pdf_decay_times(np.zeros(3), dist)
    assert val == pytest.approx((1 / tau) ** 3, rel=1e-12)
    total, _ = integrate.quad(lambda t: (1 / tau) * math.exp(-t / tau), 0, 60 * tau)
    assert total == pytest.approx(1.0, abs=1e-10)
    assert pdf_decay_times(np.array([0.1e-9, -1e-12, 0.0]), dist) == 0.0


def test_pdf_decay_times_truncated_mass():
    tau = 0.2e-9
    t_bin = tau * math.log(2.0)  # window holds exactly half the mass
    dist = ErrorDistribution(omega_mean=OMEGA, sigma_c=0.01 * OMEGA, tau_d=tau, n=1, t_bin=t_bin)
    plain = ErrorDistribution(omega_mean=OMEGA, sigma_c=0.01 * OMEGA, tau_d=tau, n=1)
    t = np.full(3, 0.05e-9)
    assert pdf_decay_times(t, dist) == pytest.approx(pdf_decay_times(t, plain) * 2 ** 3, rel=1e-12)
    beyond = np.array([0.05e-9, t_bin * 1.01, 0.05e-9])
    assert pdf_decay_times(beyond, dist) == 0.0


def test_pdf_joint_product_and_support():
    dist = make_dist()
    t = np.array([0.1e-9, 0.05e-9, 0.2e-9])
    w = OMEGA * 1.01
    assert pdf_joint(w, t, dist) == pytest.approx(
        pdf_frequency(w, dist) * pdf_decay_times(t, dist), rel=1e-12)
    assert pdf_joint(w, np.array([0.1e-9, -0.1e-9, 0.0]), dist) == 0.0


def test_sampler_determinism_and_shape():
    dist = make_dist(n=2)
    s1 = sample(dist, seed=42)
    s2 = sample(dist, seed=42)
    assert s1.omega_prime == s2.omega_prime
    assert np.array_equal(s1.decay_times, s2.decay_times)
    assert isinstance(s1, ErrorSample) and s1.n == 2
    assert sample(dist, seed=43).omega_prime != s1.omega_prime


def test_sampler_moments():
    # 10^6 draws: the mean must sit within 4 standard errors (= 4 sigma / 10^3).
    dist = make_dist(n=1)
    k = 10 ** 6
    omega_p, dwells = sample_batch(dist, seed=11, k=k)
    assert abs(omega_p.mean() - OMEGA) < 4 * dist.sigma_c / 10 ** 3
    assert abs(dwells.mean() - dist.tau_d) < 4 * dist.tau_d / 10 ** 3


def test_sampler_ks_frequency():
    dist = make_dist(n=1)
    omega_p, _ = sample_batch(dist, seed=5, k=10 ** 5)
    stat = stats.kstest(omega_p, "norm", args=(OMEGA, dist.sigma_c))
    assert stat.pvalue > 0.001


def test_sampler_ks_dwell_truncated():
    tau = 0.2e-9
    t_bin = 0.3e-9
    dist = make_dist(t_bin=t_bin, tau_d=tau)
    _, dwells = sample_batch(dist, seed=6, k=10 ** 5)
    flat = dwells.ravel()
    assert flat.max() <= t_bin
    mass = 1 - math.exp(-t_bin / tau)

    def cdf(t):
        t = np.clip(t, 0, t_bin)
        return (1 - np.exp(-t / tau)) / mass

    stat = stats.kstest(flat, cdf)
    assert stat.pvalue > 0.001


def test_zero_variance_limit():
    params = DeviceParams(tau_d=0.1e-9, t2_star=math.inf, g_ratio=0.0, t_lg=10e-9)
    dist = ErrorDistribution.from_params(params, n=1)
    omega_p, _ = sample_batch(dist, seed=9, k=1000)
    assert np.ptp(omega_p) == 0.0  # delta distribution


def test_distribution_validation():
    with pytest.raises(InvalidParameterError):
        ErrorDistribution(omega_mean=OMEGA, sigma_c=-1.0, tau_d=0.1e-9, n=1)
    with pytest.raises(InvalidParameterError):
        ErrorDistribution(omega_mean=OMEGA, sigma_c=1.0, tau_d=0.1e-9, n=1, t_bin=0.0)
    with pytest.raises(InvalidParameterError):
        pdf_frequency(OMEGA, ErrorDistribution(omega_mean=OMEGA, sigma_c=0.0, tau_d=1e-10, n=1))
