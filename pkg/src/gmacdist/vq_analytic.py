"""Analytic performance of separate vector quantization with joint decoding.

Each sender quantizes its source at some rate and transmits the scaled
codeword.  Quantization shrinks the usable correlation between the two
transmitted words to rho_tilde; the decoder exploits what remains, which
yields a rate region and closed-form distortions.  The best symmetric
operating point is a fixed-point equation solved here by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import CanonicalInstance, DistortionPair
from .rd_bounds import ConvergenceError

_REGION_TOL = 1e-12


def rho_tilde(rho: float, r1: float, r2: float) -> float:
    """Residual correlation between the two chosen codewords.

    Equal to rho * sqrt((1 - 2^-2r1)(1 - 2^-2r2)); zero whenever either
    rate is zero and approaching rho as both rates grow.
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError("correlation must lie in [0, 1]")
    if r1 < 0 or r2 < 0:
        raise ValueError("rates must be nonnegative")
    return rho * math.sqrt((1.0 - 2.0 ** (-2.0 * r1)) * (1.0 - 2.0 ** (-2.0 * r2)))


@dataclass(frozen=True)
class RatePair:
    """Operating rates of the two quantizers plus their residual correlation."""

    r1: float
    r2: float
    rho_tilde: float


def make_rate_pair(c: CanonicalInstance, r1: float, r2: float) -> RatePair:
    return RatePair(r1=r1, r2=r2, rho_tilde=rho_tilde(c.rho, r1, r2))


@dataclass(frozen=True)
class VqBoundResult:
    rates: RatePair
    in_region: bool
    d1: float
    d2: float


def rate_region_limits(c: CanonicalInstance, rt: float):
    """Single-rate and sum-rate ceilings of the decodable region at a given
    residual correlation."""
    n = c.noise_var
    one = 1.0 - rt * rt
    b1 = 0.5 * math.log2((c.p1 * one + n) / (n * one))
    b2 = 0.5 * math.log2((c.p2 * one + n) / (n * one))
    bsum = 0.5 * math.log2((c.p1 + c.p2 + 2.0 * rt * math.sqrt(c.p1 * c.p2) + n) / (n * one))
    return b1, b2, bsum


def in_rate_region(c: CanonicalInstance, rates: RatePair) -> bool:
    """Whether the codeword pair is decodable at these rates.

    The defining inequalities are strict; membership is tested with a 1e-12
    closure so boundary points do not flap under rounding.
    """
    b1, b2, bsum = rate_region_limits(c, rates.rho_tilde)
    return (rates.r1 <= b1 + _REGION_TOL and rates.r2 <= b2 + _REGION_TOL
            and rates.r1 + rates.r2 <= bsum + _REGION_TOL)


def vq_distortions(c: CanonicalInstance, rates: RatePair) -> DistortionPair:
    """Distortions of the scheme when decoding succeeds, in canonical units.

    d1 = sigma_sq 2^-2r1 (1 - rho^2 (1 - 2^-2r2)) / (1 - rho_tilde^2) and
    symmetrically for d2.  Caller is responsible for region membership.
    """
    if not (math.isfinite(rates.r1) and math.isfinite(rates.r2)):
        raise ValueError("rates must be finite")
    q1 = 2.0 ** (-2.0 * rates.r1)
    q2 = 2.0 ** (-2.0 * rates.r2)
    rt = rates.rho_tilde
    rho2 = c.rho * c.rho
    denom = 1.0 - rt * rt
    d1 = c.sigma_sq * q1 * (1.0 - rho2 * (1.0 - q2)) / denom
    d2 = c.sigma_sq * q2 * (1.0 - rho2 * (1.0 - q1)) / denom
    return DistortionPair(d1, d2)


def vq_bound(c: CanonicalInstance, r1: float, r2: float) -> VqBoundResult:
    """Region membership and distortions for an explicit rate pair."""
    rates = make_rate_pair(c, r1, r2)
    return VqBoundResult(rates=rates, in_region=in_rate_region(c, rates),
                         d1=vq_distortions(c, rates).d1,
                         d2=vq_distortions(c, rates).d2)


def _symmetric_rhs(rho: float, p: float, noise_var: float, r: float) -> float:
    q = 2.0 ** (-2.0 * r)
    rt = rho * (1.0 - q)
    num = 2.0 * p * (1.0 + rt) + noise_var
    den = noise_var * (1.0 - rt * rt)
    return 0.25 * math.log2(num / den)


def _symmetric_distortion(sigma_sq: float, rho: float, r: float) -> float:
    q = 2.0 ** (-2.0 * r)
    rt = rho * (1.0 - q)
    return sigma_sq * q * (1.0 - rho * rt) / (1.0 - rt * rt)


def solve_symmetric_rate(sigma_sq: float, rho: float, p: float, noise_var: float,
                         tolerance: float = 1e-12, max_iter: int = 200):
    """Largest symmetric rate the decoder supports, and its distortion.

    The ceiling on the common rate depends on the rate itself through the
    residual correlation, so the operating point is the fixed point of
    r = rhs(r).  rhs is increasing and bounded (for rho < 1), g = rhs - r is
    positive at 0 and eventually negative; the largest zero is located by a
    1024-cell scan and then bisection to the requested tolerance.

    Returns
    -------
    (rate, distortion) : tuple of float
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError("correlation must lie in [0, 1]")
    if p < 0 or noise_var <= 0 or sigma_sq <= 0:
        raise ValueError("need nonnegative power and positive variances")
    if p == 0:
        return 0.0, sigma_sq

    def g(r):
        return _symmetric_rhs(rho, p, noise_var, r) - r

    if rho < 1.0:
        hi = 0.25 * math.log2((2.0 * p * (1.0 + rho) + noise_var)
                              / (noise_var * (1.0 - rho * rho))) + 1.0
        hi = max(hi, 1.0)
    else:
        hi = 1.0
    for _ in range(200):
        if g(hi) < 0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError("no sign change found for the symmetric rate")

    # scan for the last sign change, then bisect inside that cell
    cells = 1024
    lo = 0.0
    xs = [lo + (hi - lo) * k / cells for k in range(cells + 1)]
    gs = [g(x) for x in xs]
    left, right = lo, hi
    for k in range(cells, 0, -1):
        if gs[k - 1] > 0 >= gs[k]:
            left, right = xs[k - 1], xs[k]
            break

    for _ in range(max_iter):
        if right - left <= tolerance:
            break
        mid = 0.5 * (left + right)
        if g(mid) > 0:
            left = mid
        else:
            right = mid
    else:
        raise ConvergenceError("symmetric rate bisection did not converge")

    r = 0.5 * (left + right)
    return r, _symmetric_distortion(sigma_sq, rho, r)


def high_snr_asymptote(sigma_sq: float, rho: float) -> float:
    """Limit of sqrt(p/noise) times the symmetric distortion as power grows."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError("correlation must lie in [0, 1]")
    return sigma_sq * math.sqrt((1.0 - rho) / 2.0)
