import math

import numpy as np
import pytest

from gmacdist import (
    DistortionPair,
    SweepRecord,
    Verdict,
    capacity_term,
    convexify,
    snr_sweep,
    symmetric_instance,
    symmetric_outer_bound,
    trace_region_boundary,
    verdict,
)

INST = symmetric_instance(1.0, 0.5, 2.0, 3.0)


def test_verdict_desk_cases():
    rec = verdict(INST, DistortionPair(0.5, 0.5))
    assert rec.verdict == "UNCODED_ACHIEVES"
    assert rec.uncoded_d1 == pytest.approx(0.5, rel=1e-12)
    # this power ratio sits exactly on the uncoded-optimality threshold
    assert rec.outer_rd_rate == pytest.approx(rec.capacity_term, abs=1e-9)

    assert verdict(INST, DistortionPair(0.4, 0.4)).verdict == "UNACHIEVABLE"
    assert verdict(INST, DistortionPair(1.0, 1.0)).verdict == "UNCODED_ACHIEVES"


def test_verdict_vq_case():
    c = symmetric_instance(1.0, 0.0, 1.0, 1.0)
    rec = verdict(c, DistortionPair(0.6, 0.6))
    assert rec.verdict == "VQ_ACHIEVES"
    assert rec.uncoded_d1 > 0.6
    assert rec.vq_d1 <= 0.6 * (1.0 + 1e-9)
    assert rec.vq_d2 <= 0.6 * (1.0 + 1e-9)


def test_verdict_gap_case():
    c = symmetric_instance(1.0, 0.5, 10.0, 1.0)
    target = symmetric_outer_bound(1.0, 0.5, 10.0, 1.0) * 1.01
    rec = verdict(c, DistortionPair(target, target))
    assert rec.verdict == "GAP"


def test_verdict_fields_match_label():
    c = symmetric_instance(1.0, 0.6, 4.0, 1.0)
    names = {v.value for v in Verdict}
    for t in (0.05, 0.2, 0.35, 0.6, 1.0):
        rec = verdict(c, DistortionPair(t, t))
        assert rec.verdict in names
        if rec.verdict == "UNACHIEVABLE":
            assert rec.outer_rd_rate > rec.capacity_term - 1e-12
        elif rec.verdict == "UNCODED_ACHIEVES":
            assert rec.uncoded_d1 <= t * (1.0 + 1e-9)
            assert rec.uncoded_d2 <= t * (1.0 + 1e-9)
        elif rec.verdict == "VQ_ACHIEVES":
            assert rec.vq_d1 <= t * (1.0 + 1e-6)
            assert rec.vq_d2 <= t * (1.0 + 1e-6)
        else:
            assert rec.outer_rd_rate <= rec.capacity_term + 1e-12
            assert max(rec.uncoded_d1, rec.uncoded_d2) > t
            assert max(rec.vq_d1, rec.vq_d2) > t


def test_sweep_zero_correlation_inner_meets_outer():
    rows = snr_sweep(1.0, 0.0, np.geomspace(0.1, 100.0, 12))
    assert len(rows) == 12
    for row in rows:
        assert row.vq_d == pytest.approx(row.outer_d, abs=1e-9)
        assert row.outer_d <= min(row.uncoded_d, row.vq_d) + 1e-12
        assert row.threshold_flag is False
        assert row.verdict == "VQ_ACHIEVES"


def test_sweep_threshold_row():
    rows = snr_sweep(1.0, 0.5, [2.0 / 3.0])
    (row,) = rows
    assert row.threshold_flag is True
    assert row.outer_d == pytest.approx(0.5, rel=1e-12)
    assert row.uncoded_d == pytest.approx(0.5, rel=1e-12)
    assert row.verdict == "UNCODED_ACHIEVES"


def test_sweep_rejects_nonpositive_snr():
    with pytest.raises(ValueError):
        snr_sweep(1.0, 0.5, [1.0, 0.0])


def _power_records(pairs):
    return [
        SweepRecord(sigma_sq=1.0, rho=0.5, p1=p, p2=p, noise_var=1.0,
                    verdict="GAP", snr=p, outer_d=0.0, uncoded_d=d, vq_d=d,
                    vq_rate=0.1, threshold_flag=False)
        for p, d in pairs
    ]


def test_convexify_leaves_convex_data_alone():
    recs = _power_records([(1.0, 1.0), (2.0, 0.5), (3.0, 0.26), (4.0, 0.2)])
    out = convexify(recs)
    for before, after in zip(recs, out):
        assert after.uncoded_d == pytest.approx(before.uncoded_d, rel=1e-12)
        assert after.vq_d == pytest.approx(before.vq_d, rel=1e-12)
        assert after.outer_d == before.outer_d


def test_convexify_replaces_bump_with_chord():
    recs = _power_records([(1.0, 0.8), (2.0, 0.9), (3.0, 0.2)])
    out = convexify(recs)
    assert out[0].uncoded_d == pytest.approx(0.8, rel=1e-12)
    assert out[1].uncoded_d == pytest.approx(0.5, rel=1e-12)
    assert out[2].uncoded_d == pytest.approx(0.2, rel=1e-12)


def test_convexify_matches_bruteforce_envelope():
    rng = np.random.default_rng(12)
    x = rng.uniform(0.5, 8.0, 17)
    y = rng.uniform(0.0, 2.0, 17)
    out = convexify(_power_records(list(zip(x, y))))
    env = np.array([r.vq_d for r in out])

    # oracle: smallest value over every chord between data points spanning x[k]
    expect = y.copy()
    for k in range(17):
        for i in range(17):
            for j in range(17):
                if x[i] <= x[k] <= x[j] and x[i] < x[j]:
                    t = (x[k] - x[i]) / (x[j] - x[i])
                    expect[k] = min(expect[k], (1.0 - t) * y[i] + t * y[j])
    assert np.allclose(env, expect, atol=1e-9)
    assert np.all(env <= y + 1e-12)

    order = np.argsort(x)
    xs, es = x[order], env[order]
    slopes = np.diff(es) / np.diff(xs)
    assert np.all(np.diff(slopes) >= -1e-9)


def test_convexify_empty():
    assert convexify([]) == []


def test_boundary_zero_correlation_product_rule():
    c = symmetric_instance(1.0, 0.0, 1.0, 1.0)
    pts = trace_region_boundary(c, resolution=32)
    assert len(pts) == 32
    floor = 2.0 ** (-2.0 * capacity_term(c))
    assert floor == pytest.approx(1.0 / 3.0, rel=1e-12)
    for pt in pts:
        if pt.d1 < floor * (1.0 - 1e-6):
            assert math.isnan(pt.outer_d2)
        else:
            assert pt.outer_d2 == pytest.approx(min(floor / pt.d1, 1.0), abs=1e-9)
    assert pts[-1].d1 == pytest.approx(1.0, rel=1e-12)
    assert pts[-1].outer_d2 == pytest.approx(floor, abs=1e-9)


def test_boundary_ordering_and_scheme_cover():
    c = symmetric_instance(1.0, 0.5, 4.0, 1.0)
    unc_d1 = None
    pts = trace_region_boundary(c, resolution=16)
    prev = math.inf
    for pt in pts:
        if not math.isnan(pt.outer_d2):
            assert pt.outer_d2 <= prev + 1e-12
            prev = pt.outer_d2
        if not math.isnan(pt.uncoded_d2):
            if unc_d1 is None:
                unc_d1 = pt.d1
            assert pt.d1 >= unc_d1 * (1.0 - 1e-9)
        if not (math.isnan(pt.vq_d2) or math.isnan(pt.outer_d2)):
            assert pt.vq_d2 >= pt.outer_d2 - 1e-9
    assert unc_d1 is not None


def test_boundary_resolution_stability():
    c = symmetric_instance(1.0, 0.5, 4.0, 1.0)

    def curve(pts):
        xs = np.array([math.log(p.d1) for p in pts])
        ys = np.array([p.outer_d2 for p in pts])
        keep = np.isfinite(ys)
        return xs[keep], ys[keep]

    x1, y1 = curve(trace_region_boundary(c, resolution=12))
    x2, y2 = curve(trace_region_boundary(c, resolution=24))
    grid = np.linspace(max(x1[0], x2[0]), min(x1[-1], x2[-1]), 40)
    gap = np.abs(np.interp(grid, x1, y1) - np.interp(grid, x2, y2))
    assert float(np.max(gap)) < 0.08


def test_boundary_rejects_tiny_resolution():
    with pytest.raises(ValueError):
        trace_region_boundary(INST, resolution=1)
