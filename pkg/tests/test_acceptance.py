"""Acceptance gate: ten pinned criteria, one pass/fail line each.

Each test covers one shipping criterion end to end, with explicit numeric
tolerances and (where a budget applies) a wall-clock ceiling.  The criteria
exercise the default shape family (disk, square, hexagon, three random
hulls, slabs L = 2..16, a two-ball union, seed 1234) plus regular m-gon
refinements toward the disk.
"""

import math
import time

import numpy as np
import pytest

from freqbounds import bounds, cli, geometry, onedim, solver
from freqbounds.geometry import ConvexPolygon

DEFAULT_FAMILY = cli.generate_family("default", 1234)
SLAB_IDS = ("slab-L2", "slab-L4", "slab-L8", "slab-L16")
PI_21_SQ = 12.0  # (2 sqrt 3)^2
GEOMS = {sid: bounds.summarize(shape, sid) for sid, shape in DEFAULT_FAMILY}


def family_results(study, qs):
    out = {}
    for sid, shape in DEFAULT_FAMILY:
        for q in qs:
            out[(sid, q)] = study(sid, shape, q)
    return out


def slab_normalized(study, q):
    values = []
    for sid in SLAB_IDS:
        shape = dict(DEFAULT_FAMILY)[sid]
        L = shape.area
        values.append(L ** ((2.0 - q) / q) * study(sid, shape, q).lam)
    return values


def test_criterion_01_onedim_constants_match_closed_forms():
    t0 = time.perf_counter()
    p1 = onedim.pi_2q(1.0)
    p2 = onedim.pi_2q(2.0)
    elapsed = time.perf_counter() - t0
    assert p1.value == pytest.approx(2.0 * math.sqrt(3.0), rel=1e-6)
    assert p2.value == pytest.approx(math.pi, rel=1e-6)
    assert elapsed < 5.0, f"constants took {elapsed:.2f}s (budget 5s)"


def test_criterion_02_disk_torsion_by_radial_and_grid_routes(study):
    t0 = time.perf_counter()
    radial = 1.0 / study("disk", geometry.BallShape(2, 1.0), 1.0).lam
    grid = 1.0 / study("regular-256", geometry.regular_polygon(256), 1.0).lam
    elapsed = time.perf_counter() - t0
    assert radial == pytest.approx(math.pi / 8.0, rel=2e-3)
    assert grid == pytest.approx(math.pi / 8.0, rel=2e-3)
    assert elapsed < 30.0, f"torsion routes took {elapsed:.2f}s (budget 30s)"


def test_criterion_03_square_eigenvalue_and_refinement_order():
    t0 = time.perf_counter()
    square = geometry.unit_square()
    lams = {
        n: solver.lambda_2q(square, 2.0, h=1.0 / n).lam for n in (32, 64, 128)
    }
    elapsed = time.perf_counter() - t0
    assert lams[128] == pytest.approx(2.0 * math.pi**2, rel=5e-3)
    order = math.log2((lams[32] - lams[64]) / (lams[64] - lams[128]))
    assert order >= 1.8, f"refinement order {order:.3f} < 1.8"
    assert elapsed < 60.0, f"eigenvalue study took {elapsed:.2f}s (budget 60s)"


def test_criterion_04_lower_bound_family_sweep_and_slab_limits(study):
    t0 = time.perf_counter()
    qs = (1.0, 1.5, 2.0)
    results = family_results(study, qs)
    for (sid, q), res in results.items():
        geom = GEOMS[sid]
        if not geom.convex:
            continue  # the bound is stated for convex sets only
        rep = bounds.check_lower(dict(DEFAULT_FAMILY)[sid], q, res, geom)
        assert rep.slack > 0.0, f"{sid} q={q}: slack {rep.slack}"

    for q in qs:
        values = np.array(slab_normalized(study, q))
        limit = bounds.poincare_constant(q) ** 2
        assert np.all(np.diff(values) < 0.0), f"q={q} slab values not decreasing"
        gap = (values[-1] - limit) / limit
        assert 0.0 < gap < 0.10, f"q={q} gap at L=16 is {gap:.3%}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0, f"family sweep took {elapsed:.1f}s (budget 600s)"


def test_criterion_05_upper_bound_family_and_polygon_refinement(study):
    qs = (1.0, 1.5, 2.0, 3.0)
    results = family_results(study, qs)
    for (sid, q), res in results.items():
        geom = GEOMS[sid]
        if not (geom.convex or q >= 2.0):
            continue  # convexity is required below q = 2
        rep = bounds.check_upper(dict(DEFAULT_FAMILY)[sid], q, res, geom)
        assert rep.verdict != bounds.VIOLATED, f"{sid} q={q}: {rep}"

    for q in qs:
        slacks = []
        for m in (8, 16, 32, 64, 128):
            poly = geometry.regular_polygon(m)
            res = study(f"regular-{m}", poly, q)
            rep = bounds.check_upper(poly, q, res, bounds.summarize(poly, f"m{m}"))
            slacks.append(rep.slack_rel)
        assert all(s > 0.0 for s in slacks), f"q={q}: nonpositive slack {slacks}"
        assert all(a > b for a, b in zip(slacks, slacks[1:])), (
            f"q={q}: slack not decreasing {slacks}"
        )
        assert slacks[-1] < 0.01, f"q={q}: slack at m=128 is {slacks[-1]:.4%}"


def test_criterion_06_torsion_constants_disk_exact_slab_near_upper(study):
    disk_T = 1.0 / study("disk", geometry.BallShape(2, 1.0), 1.0).lam
    disk_ratio = disk_T / (math.pi * 1.0**2)
    assert disk_ratio == pytest.approx(1.0 / 8.0, rel=5e-3)

    slab = dict(DEFAULT_FAMILY)["slab-L16"]
    T16 = 1.0 / study("slab-L16", slab, 1.0).lam
    ratio = T16 / (slab.area * 0.25)
    assert ratio < 1.0 / 3.0, "upper torsion constant must stay strict"
    assert ratio >= 0.90 / 3.0, f"slab L=16 reaches only {3 * ratio:.3f} of the limit"


def test_criterion_07_certificate_dominates_and_matches_disk(study):
    for sid, shape in DEFAULT_FAMILY:
        if not isinstance(shape, ConvexPolygon):
            continue
        centered = shape.translated(-geometry.inradius(shape).center)
        cert, chain = bounds.certificate_upper(centered, 1.0, shape_id=sid)
        grid = study(sid, shape, 1.0)
        assert cert > grid.lam, f"{sid}: certificate {cert} below grid {grid.lam}"
        assert chain.slack >= -1e-9, f"{sid}: chain violated by {chain.slack}"

    poly256 = geometry.regular_polygon(256)
    centered = poly256.translated(-geometry.inradius(poly256).center)
    cert, chain = bounds.certificate_upper(centered, 1.0)
    assert cert == pytest.approx(8.0 / math.pi, rel=5e-3)
    assert chain.slack >= -1e-9


def test_criterion_08_product_lower_bound_family_wide(study):
    min_slack, min_id = math.inf, None
    for sid, shape in DEFAULT_FAMILY:
        geom = GEOMS[sid]
        if not geom.convex:
            continue
        lam2 = study(sid, shape, 2.0)
        T = 1.0 / study(sid, shape, 1.0).lam
        rep = bounds.check_bfnt(shape, lam2, T, geom)
        assert rep.verdict == bounds.HOLDS, f"{sid}: {rep}"
        if rep.slack < min_slack:
            min_slack, min_id = rep.slack, sid
    assert min_slack > 0.0
    print(f"minimum product-bound slack: {min_slack:.6f} on {min_id}")


def test_criterion_09_scale_invariant_product_trends(study):
    entries = [
        (sid, dict(DEFAULT_FAMILY)[sid], study(sid, dict(DEFAULT_FAMILY)[sid], 1.0))
        for sid in SLAB_IDS
    ]
    scan = bounds.alpha_scan(entries, 1.0, [0.0, 1.0, 2.0])
    v = scan.values

    assert v[0, 0] / v[0, -1] >= 2.0, "alpha=0 slab values must drop at least 2x"
    assert scan.trends[0] == "vanishing"

    assert np.all(np.diff(v[1]) < 0.0)
    assert v[1, -1] == pytest.approx(PI_21_SQ, rel=0.05)
    assert v[1, -1] > PI_21_SQ  # approached from above
    assert scan.trends[1] == "bounded-below-positive"

    assert v[2, -1] / v[2, 0] >= 2.0, "alpha=2 slab values must grow at least 2x"
    assert scan.trends[2] == "blowing-up"


def test_criterion_10_property_suites_ten_thousand_trials():
    bad = []
    for name in sorted(cli.PROPERTY_CHECKS):
        summary = cli.run_property(name, 10_000, seed=1234)
        if summary.failures:
            bad.append(f"{name}: {summary.failures} failures ({summary.first_failure})")
    assert not bad, "; ".join(bad)
