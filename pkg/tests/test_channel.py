"""Aggregated channel statistics and the joint channel sampler."""
import numpy as np
import pytest

from riscf.channel import ChannelSampler, aggregated_covariance
from riscf.linalg import hermitize


def test_aggregated_mean_is_cascaded_los(tiny_link):
    link = tiny_link
    los = link.los
    expect = np.einsum("mna,n,kn->mka", los.hbar.conj(), los.phi, los.zbar)
    assert np.allclose(link.stats.obar, expect)


def test_aggregated_covariance_pieces_are_psd(tiny_link):
    stats = tiny_link.stats
    for arr in (stats.r_o, stats.q1, stats.q2):
        for m in range(arr.shape[0]):
            for k in range(arr.shape[1]):
                block = hermitize(arr[m, k])
                assert np.linalg.eigvalsh(block).min() > -1e-18


def test_aggregated_covariance_dominates_direct(tiny_link):
    """The cascade only adds variance on top of the direct link."""
    stats = tiny_link.stats
    extra = stats.r_o - stats.r_direct
    for m in range(extra.shape[0]):
        for k in range(extra.shape[1]):
            assert np.linalg.eigvalsh(hermitize(extra[m, k])).min() > -1e-18


def test_sampler_shapes_and_determinism(tiny_link):
    cfg = tiny_link.config
    sampler = ChannelSampler(tiny_link.stats, tiny_link.los, tiny_link.nlos)
    a = sampler.draw(np.random.default_rng(3), 7)
    b = sampler.draw(np.random.default_rng(3), 7)
    m, k, l, n = cfg.n_aps, cfg.n_ues, cfg.n_ap_antennas, cfg.n_ris_elements
    assert a.g.shape == (7, m, k, l)
    assert a.h.shape == (7, m, n, l)
    assert a.z.shape == (7, k, n)
    assert a.o.shape == (7, m, k, l)
    assert np.array_equal(a.o, b.o)


def test_sampler_aggregates_parts(tiny_link):
    """o must equal g + H^H Phi z element by element on the same draw."""
    sampler = ChannelSampler(tiny_link.stats, tiny_link.los, tiny_link.nlos)
    real = sampler.draw(np.random.default_rng(4), 5)
    cascade = np.einsum(
        "tmna,n,tkn->tmka", real.h.conj(), tiny_link.los.phi, real.z
    )
    assert np.allclose(real.o, real.g + cascade)
    assert np.allclose(np.abs(real.phase), 1.0)


def test_sampler_first_moments(tiny_link):
    """Sample means converge on hbar, zbar, and the aggregated mean."""
    n_trials = 60000
    sampler = ChannelSampler(tiny_link.stats, tiny_link.los, tiny_link.nlos)
    ones = np.ones((n_trials, tiny_link.config.n_ues))
    real = sampler.draw(np.random.default_rng(5), n_trials, phase=ones)
    se_h = np.sqrt(
        max(np.diagonal(tiny_link.nlos.rtilde_m, axis1=1, axis2=2).real.max(), 0.0)
        / n_trials
    )
    se_z = np.sqrt(
        np.diagonal(tiny_link.nlos.rtilde_k, axis1=1, axis2=2).real.max() / n_trials
    )
    se_o = np.sqrt(
        np.diagonal(tiny_link.stats.r_o, axis1=2, axis2=3).real.max() / n_trials
    )
    assert np.abs(real.h.mean(axis=0) - tiny_link.los.hbar).max() < 6.0 * se_h
    assert np.abs(real.z.mean(axis=0) - tiny_link.los.zbar).max() < 6.0 * se_z
    assert np.abs(real.o.mean(axis=0) - tiny_link.stats.obar).max() < 6.0 * se_o


def test_sampler_aggregated_second_moment(tiny_link):
    """Sample covariance of o matches the closed-form r_o within noise."""
    sampler = ChannelSampler(tiny_link.stats, tiny_link.los, tiny_link.nlos)
    real = sampler.draw(np.random.default_rng(6), 120000, phase=np.ones((120000, 2)))
    centered = real.o - tiny_link.stats.obar
    sample = np.einsum("tmka,tmkb->mkab", centered, centered.conj()) / len(real.o)
    err = np.abs(sample - tiny_link.stats.r_o).max()
    scale = np.abs(tiny_link.stats.r_o).max()
    assert err < 0.03 * scale


def test_fixed_phase_is_honored(tiny_link):
    sampler = ChannelSampler(tiny_link.stats, tiny_link.los, tiny_link.nlos)
    real = sampler.draw(np.random.default_rng(7), 4, phase=np.ones((4, 2)))
    assert np.allclose(real.phase, 1.0)


def test_aggregated_covariance_zero_ris_reduces_to_direct(tiny_link):
    los = tiny_link.los
    nlos = tiny_link.nlos
    zero_los = type(los)(
        hbar=np.zeros_like(los.hbar),
        zbar=np.zeros_like(los.zbar),
        theta_m=los.theta_m,
        phi=los.phi,
    )
    zero_nlos = type(nlos)(
        rtilde_m=np.zeros_like(nlos.rtilde_m),
        rtilde_k=np.zeros_like(nlos.rtilde_k),
        r_r=np.zeros_like(nlos.r_r),
        r_m=nlos.r_m,
    )
    stats = aggregated_covariance(tiny_link.stats.r_direct, zero_los, zero_nlos)
    assert np.allclose(stats.r_o, tiny_link.stats.r_direct)
    assert np.allclose(stats.obar, 0.0)
    assert np.allclose(stats.q1, 0.0)
    assert np.allclose(stats.q2, 0.0)
