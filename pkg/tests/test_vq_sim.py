import math

import numpy as np
import pytest

from gmacdist import (
    CodebookSizeError,
    decode,
    encode,
    generate_codebook,
    make_rate_pair,
    reconstruction_coefficients,
    simulate_vq,
    symmetric_instance,
    transmit_gain,
)
from gmacdist.vq_sim import _channel_gain, _decode_bruteforce, _decode_pruned


def _random_setup(seed, n=8, bits1=4, bits2=5):
    rng = np.random.default_rng(seed)
    cb1 = generate_codebook(n, bits1 / n, 1.0, seed + 1)
    cb2 = generate_codebook(n, bits2 / n, 1.0, seed + 2)
    y = rng.standard_normal(n)
    return cb1, cb2, y


def _decode_args(cb1, cb2, y, alpha1, alpha2):
    a1 = alpha1 * (cb1.words @ y)
    a2 = alpha2 * (cb2.words @ y)
    b = (alpha1 * cb1.radius) ** 2 + (alpha2 * cb2.radius) ** 2
    return a1, a2, b, 2.0 * alpha1 * alpha2


def test_codebook_geometry():
    cb = generate_codebook(16, 0.5, 1.0, 42)
    assert cb.words.shape == (256, 16)
    radius = math.sqrt(16.0 * (1.0 - 2.0 ** -1.0))
    assert cb.radius == pytest.approx(radius, rel=1e-12)
    norms = np.linalg.norm(cb.words, axis=1)
    assert np.allclose(norms, radius, rtol=1e-9)


def test_codebook_size_rounds_up():
    # 10 * 0.25 = 2.5 bits, so the realized rate exceeds the nominal one
    cb = generate_codebook(10, 0.25, 1.0, 0)
    assert cb.size == 8
    assert cb.realized_rate == pytest.approx(0.3, rel=1e-12)


def test_codebook_zero_rate():
    cb = generate_codebook(12, 0.0, 1.0, 3)
    assert cb.words.shape == (1, 12)
    assert np.all(cb.words == 0.0)
    assert cb.radius == 0.0


def test_codebook_size_cap():
    with pytest.raises(CodebookSizeError):
        generate_codebook(64, 0.5, 1.0, 0)


def test_codebook_determinism():
    a = generate_codebook(8, 0.5, 1.0, 7)
    b = generate_codebook(8, 0.5, 1.0, 7)
    assert np.array_equal(a.words, b.words)
    assert not np.array_equal(a.words, generate_codebook(8, 0.5, 1.0, 8).words)


def test_codebook_isotropy():
    cb = generate_codebook(64, 0.125, 1.0, 11)
    assert cb.size == 256
    g = (cb.words @ cb.words.T) / cb.radius ** 2
    off = g[~np.eye(g.shape[0], dtype=bool)]
    assert abs(off.mean()) < 0.05


def test_encode_picks_aligned_word():
    cb1, _, _ = _random_setup(1)
    p = 2.0
    for k in (0, 7, 15):
        idx, x = encode(cb1, cb1.words[k], p)
        assert idx == k
        assert np.dot(x, x) == pytest.approx(cb1.n * p, rel=1e-9)


def test_encode_zero_rate_sends_nothing():
    cb = generate_codebook(8, 0.0, 1.0, 2)
    idx, x = encode(cb, np.ones(8), 4.0)
    assert idx == 0
    assert np.all(x == 0.0)


def test_channel_gain_matches_analytic_form():
    cb = generate_codebook(8, 0.5, 1.0, 5)
    assert _channel_gain(cb, 3.0) == pytest.approx(
        transmit_gain(3.0, 1.0, cb.realized_rate), rel=1e-12)
    assert transmit_gain(3.0, 1.0, 0.0) == 0.0


def test_reconstruction_desk_values():
    beta1, gamma1, beta2, gamma2 = reconstruction_coefficients(0.8, 0.5, 0.5, 1.0)
    assert beta1 == pytest.approx(17.0 / 21.0, rel=1e-12)
    assert gamma1 == pytest.approx(10.0 / 21.0, rel=1e-12)
    # symmetric rates make the second estimator mirror the first
    assert beta2 == pytest.approx(gamma1, rel=1e-12)
    assert gamma2 == pytest.approx(beta1, rel=1e-12)


def test_reconstruction_independent_sources():
    assert reconstruction_coefficients(0.0, 0.7, 1.3, 1.0) == (1.0, 0.0, 0.0, 1.0)


def test_reconstruction_zero_rate_branches():
    assert reconstruction_coefficients(0.6, 0.0, 0.0, 1.0) == (0.0, 0.0, 0.0, 0.0)
    assert reconstruction_coefficients(0.6, 0.0, 1.0, 1.0) == (0.0, 0.6, 0.0, 1.0)
    assert reconstruction_coefficients(0.6, 1.0, 0.0, 1.0) == (1.0, 0.0, 0.6, 0.0)


def test_reconstruction_degenerate_correlation():
    # float rounding pushes the codeword correlation matrix to singular here
    with pytest.raises(ValueError):
        reconstruction_coefficients(1.0, 30.0, 30.0, 1.0)


def test_reconstruction_solves_normal_equations():
    rho, r1, r2, sigma_sq = 0.7, 0.6, 1.1, 2.0
    beta1, gamma1, beta2, gamma2 = reconstruction_coefficients(rho, r1, r2, sigma_sq)
    e1 = 1.0 - 2.0 ** (-2.0 * r1)
    e2 = 1.0 - 2.0 ** (-2.0 * r2)
    v1 = sigma_sq * e1
    v2 = sigma_sq * e2
    cov = rho * sigma_sq * e1 * e2
    # residual of each estimator is orthogonal to both codewords
    assert beta1 * v1 + gamma1 * cov == pytest.approx(sigma_sq * e1, rel=1e-12)
    assert beta1 * cov + gamma1 * v2 == pytest.approx(rho * sigma_sq * e2, rel=1e-12)
    assert beta2 * v1 + gamma2 * cov == pytest.approx(rho * sigma_sq * e1, rel=1e-12)
    assert beta2 * cov + gamma2 * v2 == pytest.approx(sigma_sq * e2, rel=1e-12)


def test_pruned_decoder_matches_bruteforce():
    for seed in range(25):
        cb1, cb2, y = _random_setup(seed)
        alpha1 = 1.3 * _channel_gain(cb1, 1.0)
        alpha2 = 0.9 * _channel_gain(cb2, 1.0)
        a1, a2, b, two_a = _decode_args(cb1, cb2, y, alpha1, alpha2)
        rr = cb1.radius * cb2.radius
        for lo, hi in ((-rr, rr), (0.1 * rr, 0.4 * rr), (-0.2 * rr, 0.05 * rr)):
            got = _decode_pruned(cb1.words, cb2.words, a1, a2, b, two_a, lo, hi)
            want = _decode_bruteforce(cb1.words, cb2.words, a1, a2, b, two_a, lo, hi)
            if want is None:
                assert got is None
            else:
                assert got[1:] == want[1:]
                assert got[0] == pytest.approx(want[0], rel=1e-9)


def test_decode_recovers_noiseless_sum():
    cb1, cb2, _ = _random_setup(99)
    alpha1, alpha2 = 1.1, 0.8
    y = alpha1 * cb1.words[7] + alpha2 * cb2.words[3]
    res = decode(cb1, cb2, y, 0.0, 1.0, alpha1, alpha2)
    assert (res.index1, res.index2) == (7, 3)
    assert not res.fallback


def test_decode_empty_window_falls_back():
    cb1, cb2, y = _random_setup(5)
    alpha1 = _channel_gain(cb1, 1.0)
    alpha2 = _channel_gain(cb2, 1.0)
    rr = cb1.radius * cb2.radius
    gmax = float(np.max(cb1.words @ cb2.words.T))
    # the requested window sits above every codeword pair's inner product
    assert gmax < 0.99 * rr
    res = decode(cb1, cb2, y, 0.999, 1e-6, alpha1, alpha2)
    assert res.fallback
    a1, a2, b, two_a = _decode_args(cb1, cb2, y, alpha1, alpha2)
    want = _decode_bruteforce(cb1.words, cb2.words, a1, a2, b, two_a, -rr, rr)
    assert (res.index1, res.index2) == want[1:]


def test_simulate_thread_invariance():
    c = symmetric_instance(1.0, 0.8, 10.0, 1.0)
    rates = make_rate_pair(c, 0.5, 0.5)
    a = simulate_vq(c, rates, 12, 40, delta_typ=0.4, seed=21, threads=1)
    b = simulate_vq(c, rates, 12, 40, delta_typ=0.4, seed=21, threads=4)
    assert not math.isnan(a.cond_d1)
    assert repr(a) == repr(b)


def test_simulate_zero_rate():
    c = symmetric_instance(1.0, 0.5, 1.0, 1.0)
    stats = simulate_vq(c, make_rate_pair(c, 0.0, 0.0), 16, 150, seed=13)
    assert stats.decode_error_count == 0
    assert stats.realized_r1 == 0.0
    assert stats.empirical_d1 == pytest.approx(1.0, rel=0.1)
    assert stats.quantizer_mse1 == pytest.approx(1.0, rel=0.1)


def test_simulate_rejects_empty_batch():
    c = symmetric_instance(1.0, 0.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        simulate_vq(c, make_rate_pair(c, 0.5, 0.5), 8, 0, seed=0)


def test_simulate_warns_outside_region():
    c = symmetric_instance(1.0, 0.5, 0.5, 1.0)
    with pytest.warns(UserWarning):
        simulate_vq(c, make_rate_pair(c, 1.5, 1.5), 8, 2, seed=0)


def test_simulate_high_snr_small_codebook():
    # codewords stay far apart, so the decoder almost never errs
    c = symmetric_instance(1.0, 0.8, 100.0, 1.0)
    stats = simulate_vq(c, make_rate_pair(c, 0.25, 0.25), 8, 50,
                        delta_typ=1.0, seed=17)
    assert stats.decode_error_count <= 5
    assert stats.fallback_count == 0
    assert stats.realized_r1 == 0.25
    assert stats.trials == 50
    assert stats.blocklength == 8
