"""Achievability verdicts, SNR sweeps, and distortion-region boundary traces.

Assembles the converse test and the two achievability schemes into a single
answer for a target pair, sweeps the symmetric bounds over a power grid, and
traces the boundary of the target region at fixed channel parameters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum
from typing import Optional

import numpy as np

from .model import CanonicalInstance, DistortionPair
from .rd_bounds import capacity_term, check_necessary_condition, rd_rate, symmetric_outer_bound
from .uncoded import optimality_threshold, symmetric_uncoded_bound, uncoded_distortions
from .vq_analytic import in_rate_region, make_rate_pair, solve_symmetric_rate, vq_distortions

_REL_TOL = 1e-9


class Verdict(str, Enum):
    UNACHIEVABLE = "UNACHIEVABLE"
    UNCODED_ACHIEVES = "UNCODED_ACHIEVES"
    VQ_ACHIEVES = "VQ_ACHIEVES"
    GAP = "GAP"


@dataclass(frozen=True)
class SweepRecord:
    """One row of a point query or symmetric power sweep.

    Point queries populate the target and rate fields; sweep rows populate
    snr, the three symmetric distortion bounds, and the threshold flag.
    """

    sigma_sq: float
    rho: float
    p1: float
    p2: float
    noise_var: float
    verdict: str
    d1: Optional[float] = None
    d2: Optional[float] = None
    outer_rd_rate: Optional[float] = None
    capacity_term: Optional[float] = None
    uncoded_d1: Optional[float] = None
    uncoded_d2: Optional[float] = None
    vq_d1: Optional[float] = None
    vq_d2: Optional[float] = None
    vq_r1: Optional[float] = None
    vq_r2: Optional[float] = None
    snr: Optional[float] = None
    outer_d: Optional[float] = None
    uncoded_d: Optional[float] = None
    vq_d: Optional[float] = None
    vq_rate: Optional[float] = None
    threshold_flag: Optional[bool] = None

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class BoundaryPoint:
    """Minimal second-component distortions at a fixed first target."""

    d1: float
    outer_d2: float
    uncoded_d2: float
    vq_d2: float


def _rate_axis_cap(c: CanonicalInstance) -> float:
    # generous ceiling on useful per-sender rates; the decodable region's
    # sum constraint keeps the optimum well inside this for sane instances
    top = (c.p1 + c.p2 + 2.0 * math.sqrt(c.p1 * c.p2)) / c.noise_var
    cap = 0.5 * math.log2(1.0 + top)
    if c.rho < 1.0:
        cap += 0.5 * math.log2(1.0 / (1.0 - c.rho * c.rho))
    return max(cap + 3.0, 2.0)


def _feasible(c, r1, r2):
    return in_rate_region(c, make_rate_pair(c, r1, r2))


def _search_rates(c: CanonicalInstance, objective, grid: int = 64, tol: float = 1e-6):
    """Minimize an objective over the decodable rate region.

    Coarse log-spaced grid (zero rate included on each axis) followed by
    repeatedly zooming a local grid onto the incumbent; the window shrinks
    slower than its own spacing, so ridge minima that need simultaneous
    moves of both rates stay inside it.  The objective receives (r1, r2);
    points outside the region score +inf.  Returns (r1, r2, value); value
    is +inf if nothing was feasible.
    """
    cap = _rate_axis_cap(c)
    axis = np.concatenate(([0.0], np.geomspace(1e-3, cap, grid - 1)))

    def score(r1, r2):
        if r1 < 0 or r2 < 0 or not _feasible(c, r1, r2):
            return math.inf
        return objective(r1, r2)

    best = (0.0, 0.0, math.inf)
    for r1 in axis:
        for r2 in axis:
            v = score(r1, r2)
            if v < best[2]:
                best = (float(r1), float(r2), v)
    if not math.isfinite(best[2]):
        return best

    r1, r2, val = best
    span = cap / 4.0
    while span > tol / 2.0:
        loc1 = np.linspace(max(0.0, r1 - span), min(cap, r1 + span), 13)
        loc2 = np.linspace(max(0.0, r2 - span), min(cap, r2 + span), 13)
        for a in loc1:
            for b in loc2:
                v = score(float(a), float(b))
                if v < val:
                    r1, r2, val = float(a), float(b), v
        span /= 4.0
    return r1, r2, val


def best_vq_for_targets(c: CanonicalInstance, d: DistortionPair):
    """Rate pair minimizing the worst distortion ratio against the targets.

    Returns (rates, distortions, ratio); ratio <= 1 means the scheme meets
    both targets at those rates.
    """

    def objective(r1, r2):
        dd = vq_distortions(c, make_rate_pair(c, r1, r2))
        return max(dd.d1 / d.d1, dd.d2 / d.d2)

    r1, r2, ratio = _search_rates(c, objective)
    rates = make_rate_pair(c, r1, r2)
    return rates, vq_distortions(c, rates), ratio


def verdict(c: CanonicalInstance, d: DistortionPair) -> SweepRecord:
    """Classify a distortion target for this instance.

    UNACHIEVABLE when the converse rules the pair out; otherwise whichever
    scheme meets both targets (uncoded checked first, then the quantizer
    search); GAP when the converse permits the pair but neither scheme
    reaches it.
    """
    outer = check_necessary_condition(c, d)
    unc = uncoded_distortions(c)
    rates, vq_d, ratio = best_vq_for_targets(c, d)
    if not outer.achievable_possible:
        v = Verdict.UNACHIEVABLE
    elif unc.d1 <= d.d1 * (1.0 + _REL_TOL) and unc.d2 <= d.d2 * (1.0 + _REL_TOL):
        v = Verdict.UNCODED_ACHIEVES
    elif ratio <= 1.0 + _REL_TOL:
        v = Verdict.VQ_ACHIEVES
    else:
        v = Verdict.GAP
    return SweepRecord(
        sigma_sq=c.sigma_sq, rho=c.rho, p1=c.p1, p2=c.p2, noise_var=c.noise_var,
        verdict=v.value, d1=d.d1, d2=d.d2,
        outer_rd_rate=outer.rd_rate, capacity_term=outer.capacity_term,
        uncoded_d1=unc.d1, uncoded_d2=unc.d2,
        vq_d1=vq_d.d1, vq_d2=vq_d.d2, vq_r1=rates.r1, vq_r2=rates.r2,
    )


def snr_sweep(sigma_sq: float, rho: float, snr_grid) -> list:
    """Symmetric bounds along a grid of power ratios (noise variance 1).

    Each row carries the outer bound, the uncoded and quantizer inner
    bounds, the quantizer operating rate, and a flag marking power ratios at
    or below the uncoded-optimality threshold.
    """
    thr = optimality_threshold(rho)
    rows = []
    for snr in snr_grid:
        if snr <= 0:
            raise ValueError("power ratios must be positive")
        p = float(snr)
        outer_d = symmetric_outer_bound(sigma_sq, rho, p, 1.0)
        unc_d = symmetric_uncoded_bound(sigma_sq, rho, p, 1.0)
        vq_rate, vq_d = solve_symmetric_rate(sigma_sq, rho, p, 1.0)
        if unc_d <= outer_d * (1.0 + _REL_TOL):
            v = Verdict.UNCODED_ACHIEVES
        elif vq_d <= outer_d * (1.0 + _REL_TOL):
            v = Verdict.VQ_ACHIEVES
        else:
            v = Verdict.GAP
        rows.append(SweepRecord(
            sigma_sq=sigma_sq, rho=rho, p1=p, p2=p, noise_var=1.0,
            verdict=v.value, snr=p, outer_d=outer_d, uncoded_d=unc_d,
            vq_d=vq_d, vq_rate=vq_rate, threshold_flag=bool(snr <= thr),
        ))
    return rows


def _lower_convex_envelope(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Evaluate the lower convex envelope of (x, y) back at the points x."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    hull = []  # indices into xs of the lower hull, left to right
    for i in range(len(xs)):
        while len(hull) >= 2:
            j, k = hull[-2], hull[-1]
            # drop k if it lies on or above the chord j..i
            cross = (xs[k] - xs[j]) * (ys[i] - ys[j]) - (ys[k] - ys[j]) * (xs[i] - xs[j])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    env_sorted = np.interp(xs, xs[hull], ys[hull])
    out = np.empty_like(env_sorted)
    out[order] = env_sorted
    return out


def convexify(records: list) -> list:
    """Replace achievable-distortion columns by their lower convex envelope
    over the power axis (time sharing between power levels)."""
    if not records:
        return []
    p = np.array([r.p1 for r in records], dtype=float)
    out_cols = {}
    for col in ("uncoded_d", "vq_d"):
        vals = np.array([getattr(r, col) for r in records], dtype=float)
        out_cols[col] = _lower_convex_envelope(p, vals)
    result = []
    for i, r in enumerate(records):
        d = r.to_dict()
        for col, vals in out_cols.items():
            d[col] = float(vals[i])
        result.append(SweepRecord(**d))
    return result


def _min_outer_d2(c: CanonicalInstance, d1: float, cap: float,
                  tol: float = 1e-12, iters: int = 200) -> float:
    """Smallest d2 the converse permits at a fixed d1 (NaN if none)."""
    lo = c.sigma_sq * 1e-15
    hi = c.sigma_sq
    if cap < rd_rate(c, DistortionPair(d1, hi)) - 1e-12:
        return math.nan
    if cap >= rd_rate(c, DistortionPair(d1, lo)):
        return lo
    for _ in range(iters):
        if hi - lo <= tol * c.sigma_sq:
            break
        mid = 0.5 * (lo + hi)
        if cap >= rd_rate(c, DistortionPair(d1, mid)):
            hi = mid
        else:
            lo = mid
    return hi


def trace_region_boundary(c: CanonicalInstance, resolution: int = 64) -> list:
    """Boundary of the target region over a log grid of first-component targets.

    For each d1, reports the smallest d2 not excluded by the converse, the
    uncoded point's d2 when the scheme already meets d1 (NaN otherwise), and
    the smallest quantizer d2 subject to meeting d1.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    cap = capacity_term(c)
    unc = uncoded_distortions(c)
    points = []
    for d1 in np.geomspace(1e-4 * c.sigma_sq, c.sigma_sq, resolution):
        d1 = float(d1)
        outer_d2 = _min_outer_d2(c, d1, cap)
        unc_d2 = unc.d2 if unc.d1 <= d1 * (1.0 + _REL_TOL) else math.nan

        def objective(r1, r2):
            dd = vq_distortions(c, make_rate_pair(c, r1, r2))
            if dd.d1 > d1 * (1.0 + _REL_TOL):
                return math.inf
            return dd.d2

        _, _, vq_d2 = _search_rates(c, objective)
        points.append(BoundaryPoint(d1=d1, outer_d2=outer_d2,
                                    uncoded_d2=unc_d2,
                                    vq_d2=vq_d2 if math.isfinite(vq_d2) else math.nan))
    return points
