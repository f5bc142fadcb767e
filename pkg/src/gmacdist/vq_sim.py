"""Monte Carlo simulation of the quantize-and-forward scheme at finite blocklength.

Codebooks are drawn uniformly on a sphere whose squared radius matches the
retained source energy.  Encoding picks the codeword closest to the source
block; the decoder searches codeword pairs whose mutual correlation is near
the residual correlation rho_tilde and picks the pair whose scaled sum best
aligns with the channel output.  Reconstruction combines both decoded words
with fixed linear coefficients.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import CanonicalInstance, derive_seed, sample_source_and_noise
from .vq_analytic import RatePair, in_rate_region, rho_tilde

MAX_CODEBOOK_BITS = 22

_STREAM_TRIAL = 0
_STREAM_CODEBOOK1 = 1
_STREAM_CODEBOOK2 = 2


class CodebookSizeError(ValueError):
    """Requested codebook exceeds the per-side size cap."""


@dataclass(frozen=True, eq=False)
class Codebook:
    """2^ceil(n*rate) words of length n, all of norm radius."""

    n: int
    rate: float
    words: np.ndarray
    radius: float

    @property
    def size(self) -> int:
        return self.words.shape[0]

    @property
    def realized_rate(self) -> float:
        return math.log2(self.size) / self.n


class DecodeResult(NamedTuple):
    index1: int
    index2: int
    fallback: bool


def generate_codebook(n: int, rate: float, sigma_sq: float, seed: int) -> Codebook:
    """Draw a seeded spherical codebook.

    Words are IID Gaussian vectors normalized onto the sphere of radius
    sqrt(n * sigma_sq * (1 - 2^-2rate)).  Rate zero yields the single
    all-zero word.  Raises CodebookSizeError above 2^22 words.
    """
    if n < 1:
        raise ValueError("blocklength must be at least 1")
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    bits = math.ceil(n * rate)
    if bits > MAX_CODEBOOK_BITS:
        raise CodebookSizeError(
            f"codebook needs {bits} bits per word, cap is {MAX_CODEBOOK_BITS}")
    m = 1 << bits
    radius = math.sqrt(n * sigma_sq * (1.0 - 2.0 ** (-2.0 * rate)))
    rng = np.random.default_rng(int(seed) & ((1 << 64) - 1))
    g = rng.standard_normal((m, n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    words = radius * g / norms
    return Codebook(n=n, rate=rate, words=words, radius=radius)


def transmit_gain(power: float, sigma_sq: float, rate: float) -> float:
    """Scale factor taking a codeword to the per-symbol power budget."""
    if rate == 0.0:
        return 0.0
    return math.sqrt(power / (sigma_sq * (1.0 - 2.0 ** (-2.0 * rate))))


def _channel_gain(cb: Codebook, power: float) -> float:
    # sqrt(n*P)/radius == transmit_gain analytically; this form keeps the
    # encoder scaling and the decoder weights bit-identical.
    if cb.radius == 0.0:
        return 0.0
    return math.sqrt(cb.n * power) / cb.radius


def encode(cb: Codebook, s: np.ndarray, power: float):
    """Quantize a source block and scale it for transmission.

    Returns (index, x) where index selects the word with the largest inner
    product with s (ties go to the lowest index) and x is the transmitted
    block with squared norm n*power (identically zero at rate zero).
    """
    idx = int(np.argmax(cb.words @ s))
    x = _channel_gain(cb, power) * cb.words[idx]
    return idx, x


def _best_update(best, f, i1, i2):
    """Keep the larger objective; break exact ties toward the lower pair."""
    if best is None or f > best[0] or (f == best[0] and (i1, i2) < (best[1], best[2])):
        return (f, i1, i2)
    return best


def _decode_bruteforce(w1, w2, a1, a2, b, two_a, glo, ghi):
    """Reference search: evaluate every pair in the correlation window."""
    m1, m2 = len(a1), len(a2)
    block = max(1, (1 << 22) // max(m2, 1))
    best = None
    for i0 in range(0, m1, block):
        g = w1[i0:i0 + block] @ w2.T
        den_sq = b + two_a * g
        with np.errstate(divide="ignore", invalid="ignore"):
            f = (a1[i0:i0 + block, None] + a2[None, :]) / np.sqrt(den_sq)
        f[(g < glo) | (g > ghi) | (den_sq <= 0)] = -np.inf
        k = int(np.argmax(f))
        fk = float(f.flat[k])
        if fk > -np.inf:
            best = _best_update(best, fk, i0 + k // m2, k % m2)
    return best


def _decode_pruned(w1, w2, a1, a2, b, two_a, glo, ghi):
    """Exact search over the correlation window without forming all pairs.

    Candidates are visited in decreasing order of their first-word channel
    correlation a1; once no remaining first word can beat the incumbent even
    with the most favorable second word and denominator, the scan stops.
    """
    m1, m2 = len(a1), len(a2)
    den_min = math.sqrt(max(b + two_a * glo, 0.0))
    den_max = math.sqrt(max(b + two_a * ghi, 0.0))
    a2max = float(a2.max())

    best = None
    # seed the incumbent from the strongest few words on each side
    k1 = min(64, m1)
    k2 = min(64, m2)
    top1 = np.argpartition(-a1, k1 - 1)[:k1] if k1 < m1 else np.arange(m1)
    top2 = np.argpartition(-a2, k2 - 1)[:k2] if k2 < m2 else np.arange(m2)
    gblk = w1[top1] @ w2[top2].T
    mask = (gblk >= glo) & (gblk <= ghi)
    if mask.any():
        ii, jj = np.nonzero(mask)
        fblk = (a1[top1[ii]] + a2[top2[jj]]) / np.sqrt(b + two_a * gblk[ii, jj])
        for t in range(len(fblk)):
            best = _best_update(best, float(fblk[t]), int(top1[ii[t]]), int(top2[jj[t]]))

    order = np.argsort(-a1, kind="stable")
    for p in order:
        num_ub = a1[p] + a2max
        if best is not None:
            if num_ub > 0:
                ub = num_ub / den_min if den_min > 0 else math.inf
            else:
                ub = num_ub / den_max if den_max > 0 else 0.0
            if ub < best[0]:
                break
        g = w2 @ w1[p]
        sel = np.flatnonzero((g >= glo) & (g <= ghi))
        if sel.size:
            f = (a1[p] + a2[sel]) / np.sqrt(b + two_a * g[sel])
            k = int(np.argmax(f))
            best = _best_update(best, float(f[k]), int(p), int(sel[k]))
    return best


def decode(cb1: Codebook, cb2: Codebook, y: np.ndarray, rho_t: float,
           delta_typ: float, alpha1: float, alpha2: float) -> DecodeResult:
    """Joint decoding of the transmitted codeword pair.

    Searches pairs whose normalized inner product lies within delta_typ of
    rho_t and returns the pair maximizing the normalized inner product of
    alpha1*u1 + alpha2*u2 with y.  If the window is empty the search is
    repeated over all pairs and the result is flagged as a fallback.
    """
    if cb1.size == 1 and cb2.size == 1:
        return DecodeResult(0, 0, False)
    r1, r2 = cb1.radius, cb2.radius
    rr = r1 * r2
    a1 = alpha1 * (cb1.words @ y)
    a2 = alpha2 * (cb2.words @ y)
    b = (alpha1 * r1) ** 2 + (alpha2 * r2) ** 2
    two_a = 2.0 * alpha1 * alpha2
    glo = max((rho_t - delta_typ) * rr, -rr)
    ghi = min((rho_t + delta_typ) * rr, rr)

    best = _decode_pruned(cb1.words, cb2.words, a1, a2, b, two_a, glo, ghi)
    if best is not None:
        return DecodeResult(best[1], best[2], False)
    best = _decode_bruteforce(cb1.words, cb2.words, a1, a2, b, two_a, -rr, rr)
    return DecodeResult(best[1], best[2], True)


def reconstruction_coefficients(rho: float, r1: float, r2: float, sigma_sq: float):
    """Linear MMSE weights for estimating each source from both codewords.

    Under the scheme's correlation structure the chosen codewords have
    variance sigma_sq*(1 - 2^-2r) and mutual correlation rho_tilde, and each
    correlates with the two sources through the quantization factors.
    Returns (beta1, gamma1, beta2, gamma2) with s1_hat = beta1*u1 + gamma1*u2.
    A zero-rate codeword carries no information and gets zero weight.
    """
    s2 = sigma_sq
    e1 = 1.0 - 2.0 ** (-2.0 * r1)
    e2 = 1.0 - 2.0 ** (-2.0 * r2)
    rt = rho_tilde(rho, r1, r2)
    if rt >= 1.0:
        raise ValueError("degenerate codeword correlation")
    if e1 == 0.0 and e2 == 0.0:
        return 0.0, 0.0, 0.0, 0.0
    if e1 == 0.0:
        # only the second codeword is informative
        g1 = rho  # Cov(s1, u2)/Var(u2) = rho*s2*e2 / (s2*e2)
        b2 = 1.0
        return 0.0, g1, 0.0, b2
    if e2 == 0.0:
        return 1.0, 0.0, rho, 0.0
    v1 = s2 * e1
    v2 = s2 * e2
    cov12 = rt * s2 * math.sqrt(e1 * e2)
    det = v1 * v2 - cov12 * cov12
    c11 = s2 * e1          # Cov(s1, u1)
    c12 = rho * s2 * e2    # Cov(s1, u2)
    c21 = rho * s2 * e1    # Cov(s2, u1)
    c22 = s2 * e2          # Cov(s2, u2)
    beta1 = (c11 * v2 - c12 * cov12) / det
    gamma1 = (c12 * v1 - c11 * cov12) / det
    beta2 = (c21 * v2 - c22 * cov12) / det
    gamma2 = (c22 * v1 - c21 * cov12) / det
    return beta1, gamma1, beta2, gamma2


@dataclass(frozen=True)
class VqTrialStats:
    """Aggregated results of a seeded batch of scheme simulations.

    Distortions are per symbol.  cond_d1/cond_d2 average only the trials
    whose codeword pair was decoded correctly (NaN when there are none);
    empirical_d1/empirical_d2 average every trial.
    """

    trials: int
    blocklength: int
    realized_r1: float
    realized_r2: float
    empirical_d1: float
    empirical_d2: float
    cond_d1: float
    cond_d2: float
    quantizer_mse1: float
    quantizer_mse2: float
    empirical_codeword_corr: float
    decode_error_count: int
    fallback_count: int
    seed: int


def simulate_vq(c: CanonicalInstance, rates: RatePair, n: int, trials: int,
                delta_typ: float = 0.05, seed: int = 0,
                threads: int = 1) -> VqTrialStats:
    """Run the full scheme end to end for a batch of independent trials.

    Codebooks are drawn once from seeds derived from (seed, side); trial k
    draws its source and noise from a seed derived from (seed, k) and writes
    into its own result slot, so the aggregate is reproducible and
    independent of evaluation order and thread count.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if delta_typ < 0:
        raise ValueError("correlation window must be nonnegative")
    if not in_rate_region(c, rates):
        warnings.warn("rate pair is outside the decodable region; "
                      "decoding statistics will be unreliable", stacklevel=2)
    r1, r2 = rates.r1, rates.r2
    cb1 = generate_codebook(n, r1, c.sigma_sq, derive_seed(seed, _STREAM_CODEBOOK1))
    cb2 = generate_codebook(n, r2, c.sigma_sq, derive_seed(seed, _STREAM_CODEBOOK2))
    alpha1 = _channel_gain(cb1, c.p1)
    alpha2 = _channel_gain(cb2, c.p2)
    rt = rates.rho_tilde
    beta1, gamma1, beta2, gamma2 = reconstruction_coefficients(c.rho, r1, r2, c.sigma_sq)
    rr = cb1.radius * cb2.radius

    se = np.zeros((trials, 2))
    qmse = np.zeros((trials, 2))
    corr = np.zeros(trials)
    err = np.zeros(trials, dtype=bool)
    fell = np.zeros(trials, dtype=bool)

    def run_trial(k: int):
        batch = sample_source_and_noise(c, n, derive_seed(seed, _STREAM_TRIAL, k))
        i1, x1 = encode(cb1, batch.s1, c.p1)
        i2, x2 = encode(cb2, batch.s2, c.p2)
        y = x1 + x2 + batch.z
        dec = decode(cb1, cb2, y, rt, delta_typ, alpha1, alpha2)
        u1 = cb1.words[dec.index1]
        u2 = cb2.words[dec.index2]
        s1_hat = beta1 * u1 + gamma1 * u2
        s2_hat = beta2 * u1 + gamma2 * u2
        e1 = batch.s1 - s1_hat
        e2 = batch.s2 - s2_hat
        q1 = batch.s1 - cb1.words[i1]
        q2 = batch.s2 - cb2.words[i2]
        se[k] = (e1 @ e1, e2 @ e2)
        qmse[k] = (q1 @ q1, q2 @ q2)
        corr[k] = (cb1.words[i1] @ cb2.words[i2]) / rr if rr > 0 else 0.0
        err[k] = (dec.index1, dec.index2) != (i1, i2)
        fell[k] = dec.fallback

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_trial, range(trials)))
    else:
        for k in range(trials):
            run_trial(k)

    good = ~err
    n_good = int(good.sum())
    cond = se[good].sum(axis=0) / (n_good * n) if n_good else np.array([math.nan, math.nan])
    return VqTrialStats(
        trials=trials,
        blocklength=n,
        realized_r1=cb1.realized_rate,
        realized_r2=cb2.realized_rate,
        empirical_d1=se[:, 0].sum() / (trials * n),
        empirical_d2=se[:, 1].sum() / (trials * n),
        cond_d1=float(cond[0]),
        cond_d2=float(cond[1]),
        quantizer_mse1=qmse[:, 0].sum() / (trials * n),
        quantizer_mse2=qmse[:, 1].sum() / (trials * n),
        empirical_codeword_corr=float(corr.mean()),
        decode_error_count=int(err.sum()),
        fallback_count=int(fell.sum()),
        seed=int(seed),
    )
