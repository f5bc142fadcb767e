"""Problem instances, canonical reduction, and seeded source/noise sampling.

Every bound in this package is stated for a pair of zero-mean Gaussian
sequences with a common variance and nonnegative correlation.  General
instances (unequal variances, negative correlation) are reduced to that
canonical form here, and distortion values are mapped between the two unit
systems with the recorded scale factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Stable 64-bit mix of a master seed and one or more stream indices.

    Used to hand every Monte Carlo trial (or chunk) its own generator so
    that results do not depend on execution order or thread count.
    """
    h = int(master) & _MASK64
    for ix in indices:
        h = _splitmix64(h ^ _splitmix64(int(ix) & _MASK64))
    return h


@dataclass(frozen=True)
class ProblemInstance:
    """Source variances and correlation plus per-sender powers and noise variance."""

    sigma1_sq: float
    sigma2_sq: float
    rho: float
    p1: float
    p2: float
    noise_var: float

    def __post_init__(self):
        if not (self.sigma1_sq > 0 and self.sigma2_sq > 0):
            raise ValueError("source variances must be positive")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("correlation must lie in [-1, 1]")
        if not (self.p1 > 0 and self.p2 > 0):
            raise ValueError("powers must be positive")
        if not self.noise_var > 0:
            raise ValueError("noise variance must be positive")


@dataclass(frozen=True)
class CanonicalInstance:
    """Instance with equal variances and rho >= 0.

    scale1/scale2 are the multipliers that carry canonical distortions back
    to the original units (original_d_i = canonical_d_i * scale_i), so
    scale2 = sigma2_sq / sigma1_sq and scale1 is always 1.
    """

    sigma_sq: float
    rho: float
    p1: float
    p2: float
    noise_var: float
    scale1: float = 1.0
    scale2: float = 1.0
    sign_flipped: bool = False

    def __post_init__(self):
        if not self.sigma_sq > 0:
            raise ValueError("variance must be positive")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("canonical correlation must lie in [0, 1]")
        if self.p1 < 0 or self.p2 < 0:
            raise ValueError("powers must be nonnegative")
        if not self.noise_var > 0:
            raise ValueError("noise variance must be positive")
        if not (self.scale1 > 0 and self.scale2 > 0):
            raise ValueError("scale factors must be positive")


@dataclass(frozen=True)
class DistortionPair:
    """Per-component mean squared error targets or achieved values."""

    d1: float
    d2: float

    def __post_init__(self):
        if not (self.d1 >= 0 and self.d2 >= 0):
            raise ValueError("distortions must be nonnegative")


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """One seeded draw of source components s1, s2 and channel noise z."""

    s1: np.ndarray
    s2: np.ndarray
    z: np.ndarray
    seed: int


def canonicalize(inst: ProblemInstance) -> CanonicalInstance:
    """Reduce an instance to common variance sigma1_sq and rho >= 0.

    Component 2 is rescaled to variance sigma1_sq; a negative correlation is
    flipped in sign.  Both moves leave achievability questions unchanged
    (rescaling a component rescales its distortion by the same factor, and a
    sign flip of one component can be absorbed by the sender and receiver),
    so bounds computed on the canonical instance translate directly.
    """
    return CanonicalInstance(
        sigma_sq=inst.sigma1_sq,
        rho=abs(inst.rho),
        p1=inst.p1,
        p2=inst.p2,
        noise_var=inst.noise_var,
        scale1=1.0,
        scale2=inst.sigma2_sq / inst.sigma1_sq,
        sign_flipped=inst.rho < 0,
    )


def canonicalize_distortion(c: CanonicalInstance, d: DistortionPair) -> DistortionPair:
    """Map a distortion pair from original units into canonical units."""
    return DistortionPair(d.d1 / c.scale1, d.d2 / c.scale2)


def decanonicalize_distortion(c: CanonicalInstance, d: DistortionPair) -> DistortionPair:
    """Map a canonical distortion pair back to original units.

    Each component is multiplied by its recorded scale factor.
    """
    return DistortionPair(d.d1 * c.scale1, d.d2 * c.scale2)


def sample_source_and_noise(c: CanonicalInstance, n: int, seed: int) -> SampleBatch:
    """Draw n correlated source symbols and n noise symbols.

    Parameters
    ----------
    c : CanonicalInstance
        Supplies the common variance, correlation, and noise variance.
    n : int
        Number of symbols, at least 1.
    seed : int
        64-bit reproducibility token; the same seed yields bitwise
        identical batches.

    Returns
    -------
    SampleBatch
        s1, s2 jointly Gaussian with variance sigma_sq and correlation rho,
        z independent with variance noise_var.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(int(seed) & _MASK64)
    g = rng.standard_normal((2, n))
    zg = rng.standard_normal(n)
    sd = math.sqrt(c.sigma_sq)
    s1 = sd * g[0]
    s2 = sd * (c.rho * g[0] + math.sqrt(1.0 - c.rho * c.rho) * g[1])
    z = math.sqrt(c.noise_var) * zg
    return SampleBatch(s1=s1, s2=s2, z=z, seed=int(seed) & _MASK64)


def symmetric_instance(sigma_sq: float, rho: float, p: float, noise_var: float) -> CanonicalInstance:
    """Convenience constructor for the equal-power canonical case."""
    return CanonicalInstance(sigma_sq=sigma_sq, rho=rho, p1=p, p2=p, noise_var=noise_var)
