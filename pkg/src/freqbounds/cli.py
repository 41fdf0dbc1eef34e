"""Command-line harness: compute, verify, scan, slab, pi2q, suite.

The harness turns the library into a reproducible report generator.  A run is
described by a :class:`RunConfig` (defaults, merged with a JSON config file
and command-line flags); every command writes machine-readable JSON plus a
CSV with byte-identical numeric values (both use the shortest round-trip
decimal of each float), and the plotting-oriented commands add a TSV.  Given
the same config and seed, reruns byte-reproduce every output except the
provenance timestamp.

Exit codes: 0 when every checked inequality holds (or sits within its
equality tolerance), 2 when any check reports "violated", 1 for operational
errors (bad config, unreadable shape file, failed work item).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone

import numpy as np
import scipy
import scipy.optimize

from . import __version__, bounds, geometry, onedim, solver
from .geometry import BallShape, ConvexPolygon, DisjointUnion, ShapeError
from .solver import FrequencyResult

DEFAULT_QS = (1.0, 1.5, 2.0, 3.0)
DEFAULT_ALPHAS = (0.0, 0.5, 1.0, 1.5, 2.0)
DEFAULT_SLAB_LENGTHS = (2.0, 4.0, 8.0, 16.0)
DEFAULT_OUT = "freq-out"
DEFAULT_SEED = 1234
DEFAULT_TRIALS = 200

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on, in one hashable record."""

    qs: tuple[float, ...] = DEFAULT_QS
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    family: str = "default"
    shape_files: tuple[str, ...] = ()
    h: float | None = None
    slab_lengths: tuple[float, ...] = DEFAULT_SLAB_LENGTHS
    out_dir: str = DEFAULT_OUT
    seed: int = DEFAULT_SEED
    jobs: int = 1
    property_trials: int = DEFAULT_TRIALS

    def __post_init__(self) -> None:
        if self.h is not None and not (self.h > 0.0 and math.isfinite(self.h)):
            raise ValueError(f"grid spacing must be positive, got {self.h}")
        for q in self.qs:
            if not (q >= 1.0 and math.isfinite(q)):
                raise ValueError(f"every exponent must satisfy q >= 1, got {q}")
        for a in self.alphas:
            if not math.isfinite(a):
                raise ValueError("alpha values must be finite")
        for L in self.slab_lengths:
            if not (L > 0.0 and math.isfinite(L)):
                raise ValueError(f"slab lengths must be positive, got {L}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.jobs < 1:
            raise ValueError("parallelism degree must be >= 1")
        if self.property_trials < 0:
            raise ValueError("property trial count must be >= 0")

    def digest(self) -> str:
        """SHA-256 of the canonical JSON encoding of this config."""
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()


_CONFIG_KEYS = {
    "qs",
    "alphas",
    "family",
    "shape_files",
    "h",
    "slab_lengths",
    "out_dir",
    "seed",
    "jobs",
    "property_trials",
}


def load_config_file(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return data


def _merge_config(file_data: dict, args: argparse.Namespace) -> RunConfig:
    """defaults <- config file <- command-line flags <- FREQ_OUT."""
    merged = dict(file_data)
    for attr, key in (
        ("q", "qs"),
        ("alphas", "alphas"),
        ("family", "family"),
        ("shape", "shape_files"),
        ("h", "h"),
        ("lengths", "slab_lengths"),
        ("out", "out_dir"),
        ("seed", "seed"),
        ("jobs", "jobs"),
        ("trials", "property_trials"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            merged[key] = value
    env_out = os.environ.get("FREQ_OUT")
    if env_out:
        merged["out_dir"] = env_out
    for key in ("qs", "alphas", "shape_files", "slab_lengths"):
        if key in merged:
            merged[key] = tuple(merged[key])
    return RunConfig(**merged)


def _parse_floats(text: str) -> tuple[float, ...]:
    items = tuple(float(tok) for tok in text.split(",") if tok.strip())
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list of numbers")
    return items


# ---------------------------------------------------------------------------
# Shape families
# ---------------------------------------------------------------------------


def _num_tag(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _monotone_chain(pts: np.ndarray) -> np.ndarray:
    """Convex hull, counterclockwise, of a planar point cloud."""
    P = sorted(map(tuple, np.asarray(pts, dtype=float)))

    def sweep(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                ax, ay = out[-2]
                bx, by = out[-1]
                if (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) > 0.0:
                    break
                out.pop()
            out.append(p)
        return out

    lower = sweep(P)
    upper = sweep(P[::-1])
    return np.asarray(lower[:-1] + upper[:-1])


def _random_hull(rng: np.random.Generator, n_points: int = 12) -> ConvexPolygon:
    pts = rng.random((n_points, 2)) * 2.0 - 1.0
    hull = _monotone_chain(pts)
    if len(hull) < 3:
        raise ValueError("degenerate point cloud: hull has fewer than 3 vertices")
    return geometry.polygon(hull)


def _two_ball_union() -> DisjointUnion:
    return DisjointUnion((BallShape(2, 1.0), BallShape(2, 0.6, center=(3.0, 0.0))))


def generate_family(descriptor: str, seed: int) -> list[tuple[str, object]]:
    """Expand a whitespace-separated family descriptor into (id, shape) pairs.

    Clauses: ``default`` (disk, square, hexagon, 3 random hulls, slabs
    L = 2,4,8,16, two-ball union), ``disk``, ``square``, ``hexagon``,
    ``union``, ``slabs:2,4,8``, ``regular:8,16,32``, ``random:N``.  A
    ``seed:NN`` clause overrides the seed argument.  Random hulls are drawn
    from one generator seeded once, so a fixed (descriptor, seed) pair always
    produces the identical list.
    """
    clauses = descriptor.split()
    for clause in clauses:
        if clause.startswith("seed:"):
            seed = int(clause[5:])
    rng = np.random.default_rng(seed)

    out: list[tuple[str, object]] = []

    def expand(clause: str) -> None:
        if clause == "default":
            for c in ("disk", "square", "hexagon", "random:3", "slabs:2,4,8,16", "union"):
                expand(c)
        elif clause == "disk":
            out.append(("disk", BallShape(2, 1.0)))
        elif clause == "square":
            out.append(("square", geometry.unit_square()))
        elif clause == "hexagon":
            out.append(("hexagon", geometry.regular_polygon(6)))
        elif clause == "union":
            out.append(("union", _two_ball_union()))
        elif clause.startswith("slabs:"):
            for L in _parse_floats(clause[6:]):
                out.append((f"slab-L{_num_tag(L)}", geometry.rect_slab(L)))
        elif clause.startswith("regular:"):
            for m in clause[8:].split(","):
                out.append((f"regular-{int(m)}", geometry.regular_polygon(int(m))))
        elif clause.startswith("random:"):
            n = int(clause[7:])
            start = sum(1 for sid, _ in out if sid.startswith("random-"))
            for i in range(n):
                out.append((f"random-{start + i}", _random_hull(rng)))
        elif clause.startswith("seed:"):
            pass
        else:
            raise ValueError(f"unknown family clause {clause!r}")

    for clause in clauses:
        expand(clause)

    ids = [sid for sid, _ in out]
    if len(ids) != len(set(ids)):
        raise ValueError("family descriptor produces duplicate shape ids")
    return out


def load_family(cfg: RunConfig) -> list[tuple[str, object]]:
    """Shapes from config: explicit files win over the family descriptor."""
    if cfg.shape_files:
        out = []
        for path in cfg.shape_files:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            sid = os.path.splitext(os.path.basename(path))[0]
            out.append((sid, geometry.shape_from_json(data)))
        return out
    if not cfg.family.strip():
        return []
    return generate_family(cfg.family, cfg.seed)


# ---------------------------------------------------------------------------
# Serialization helpers
# ---------------------------------------------------------------------------


def _plain(obj):
    """Recursively convert to plain JSON-serializable Python values."""
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _cell(value) -> str:
    """One tabular cell; floats use their shortest round-trip decimal."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_plain(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_table(path: str, header: list[str], rows: list[list], delimiter: str = ",") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _provenance(cfg: RunConfig) -> dict:
    return {
        "config_sha256": cfg.digest(),
        "seed": cfg.seed,
        "versions": {
            "freqbounds": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "solver_tolerances": {
            "grid_flow_rtol": solver.FLOW_RTOL,
            "power_rtol": solver.POWER_RTOL,
            "onedim_flow_rtol": onedim.FLOW_RTOL,
        },
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


FREQ_FIELDS = [
    "shape",
    "q",
    "lambda",
    "h",
    "unknowns",
    "iterations",
    "residual",
    "norm_check",
    "error_estimate",
    "method",
]


def frequency_record(shape_id: str, res: FrequencyResult) -> dict:
    return {
        "shape": shape_id,
        "q": res.q,
        "lambda": res.lam,
        "h": res.h,
        "unknowns": res.unknowns,
        "iterations": res.iterations,
        "residual": res.residual,
        "norm_check": res.norm_check,
        "error_estimate": res.error_estimate,
        "method": res.method,
    }


def _result_from_record(rec: dict) -> FrequencyResult:
    return FrequencyResult(
        q=rec["q"],
        lam=rec["lambda"],
        h=rec["h"],
        iterations=rec["iterations"],
        residual=rec["residual"],
        norm_check=rec["norm_check"],
        method=rec["method"],
        unknowns=rec["unknowns"],
        error_estimate=rec["error_estimate"],
    )


REPORT_FIELDS = [
    "shape",
    "q",
    "inequality",
    "lhs",
    "rhs",
    "slack",
    "slack_rel",
    "tolerance",
    "verdict",
]


def report_record(rep: bounds.BoundReport) -> dict:
    return {
        "shape": rep.shape_id,
        "q": rep.q,
        "inequality": rep.inequality,
        "lhs": rep.lhs,
        "rhs": rep.rhs,
        "slack": rep.slack,
        "slack_rel": rep.slack_rel,
        "tolerance": rep.tolerance,
        "verdict": rep.verdict,
    }


# ---------------------------------------------------------------------------
# Frequency computation (the fan-out stage)
# ---------------------------------------------------------------------------


def _solve_item(item: dict) -> dict:
    shape = geometry.shape_from_json(item["shape"])
    res = solver.solve_with_study(shape, item["q"], h=item["h"])
    return frequency_record(item["shape_id"], res)


def compute_matrix(
    cfg: RunConfig, family: list[tuple[str, object]], qs=None
) -> tuple[dict, list[dict]]:
    """Solve every (shape, q) pair; returns ({(id, q): result}, error list).

    Work items fan out over ``cfg.jobs`` processes; results and errors are
    merged back in input order, and a failed item never aborts the rest.
    """
    qs = cfg.qs if qs is None else qs
    items = [
        {"shape_id": sid, "shape": geometry.shape_to_json(shape), "q": q, "h": cfg.h}
        for sid, shape in family
        for q in qs
    ]
    results: dict[tuple[str, float], FrequencyResult] = {}
    errors: list[dict] = []

    if cfg.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            outcomes = list(pool.map(_solve_wrapped, items, chunksize=1))
    else:
        outcomes = [_solve_wrapped(item) for item in items]

    for item, (rec, err) in zip(items, outcomes):
        key = (item["shape_id"], item["q"])
        if err is not None:
            errors.append({"item": f"compute {key[0]} q={_num_tag(key[1])}", "error": err})
        else:
            results[key] = _result_from_record(rec)
    return results, errors


def _solve_wrapped(item: dict) -> tuple[dict | None, str | None]:
    try:
        return _solve_item(item), None
    except Exception as exc:  # recorded per item; the suite continues
        return None, f"{type(exc).__name__}: {exc}"


# ---------------------------------------------------------------------------
# Verification (all applicable checks per shape and exponent)
# ---------------------------------------------------------------------------


def _applicable_reports(
    sid: str,
    shape,
    geom: bounds.ShapeGeometry,
    q: float,
    res: FrequencyResult,
) -> list[bounds.BoundReport]:
    reps = bounds.check_classical(shape, q, res, geom)
    if geom.convex and 1.0 <= q <= 2.0:
        reps.append(bounds.check_lower(shape, q, res, geom))
    if geom.convex or q >= 2.0:
        reps.append(bounds.check_upper(shape, q, res, geom))
    if isinstance(shape, ConvexPolygon) and 1.0 <= q < 2.0:
        centered = shape.translated(-geometry.inradius(shape).center)
        _, chain = bounds.certificate_upper(centered, q, shape_id=sid)
        reps.append(chain)
    return reps


def verify_reports(
    cfg: RunConfig,
    family: list[tuple[str, object]],
    freqs: dict,
) -> tuple[list[bounds.BoundReport], list[dict]]:
    """Every applicable (shape, q, check) report, exactly once, input order.

    Torsion-based checks run once per convex shape and reuse the q = 1 and
    q = 2 frequencies when those exponents are in the matrix (solving them
    on demand otherwise).
    """
    reports: list[bounds.BoundReport] = []
    errors: list[dict] = []

    def fetch(sid: str, shape, q: float) -> FrequencyResult:
        key = (sid, q)
        if key not in freqs:
            freqs[key] = solver.solve_with_study(shape, q, h=cfg.h)
        return freqs[key]

    for sid, shape in family:
        geom = bounds.summarize(shape, sid)
        for q in cfg.qs:
            if (sid, q) not in freqs:
                continue  # the compute stage already recorded this failure
            try:
                reports.extend(_applicable_reports(sid, shape, geom, q, freqs[(sid, q)]))
            except Exception as exc:
                errors.append(
                    {"item": f"verify {sid} q={_num_tag(q)}", "error": f"{type(exc).__name__}: {exc}"}
                )
        if geom.convex:
            try:
                res1 = fetch(sid, shape, 1.0)
                T = 1.0 / res1.lam
                t_err = bounds._rel_estimate(res1)
                reports.extend(bounds.check_torsion_double(shape, geom, T, t_err))
                if 2.0 in cfg.qs:
                    res2 = fetch(sid, shape, 2.0)
                    reports.append(bounds.check_bfnt(shape, res2, T, geom, t_err))
            except Exception as exc:
                errors.append(
                    {"item": f"verify {sid} torsion", "error": f"{type(exc).__name__}: {exc}"}
                )
    return reports, errors


def _verdict_counts(reports: list[bounds.BoundReport]) -> dict:
    counts = {bounds.HOLDS: 0, bounds.EQUALITY: 0, bounds.VIOLATED: 0}
    for rep in reports:
        counts[rep.verdict] += 1
    return counts


# ---------------------------------------------------------------------------
# Property trials (shared by the suite and the randomized test suite)
# ---------------------------------------------------------------------------


def _rng_for(name: str, seed: int, index: int) -> np.random.Generator:
    digest = int.from_bytes(hashlib.sha256(name.encode()).digest()[:4], "big")
    return np.random.default_rng(np.random.SeedSequence([seed, digest, index]))


def _centered_hull(rng: np.random.Generator) -> ConvexPolygon:
    poly = _random_hull(rng)
    return poly.translated(-geometry.inradius(poly).center)


def _prop_gauge_homogeneity(rng) -> str | None:
    poly = _centered_hull(rng)
    x = rng.normal(size=2)
    t = float(2.0 ** rng.uniform(-8.0, 8.0))
    jx = geometry.minkowski_gauge(poly, x).value
    jtx = geometry.minkowski_gauge(poly, t * x).value
    if not math.isclose(jtx, t * jx, rel_tol=1e-11, abs_tol=1e-300):
        return f"j(tx) = {jtx} vs t j(x) = {t * jx}"
    return None


def _prop_divergence_identity(rng) -> str | None:
    poly = _random_hull(rng).translated(rng.normal(scale=0.5, size=2))
    total = float(poly.offsets @ poly.edge_lengths)
    if not math.isclose(total, 2.0 * poly.area, rel_tol=1e-11):
        return f"sum b_i l_i = {total} vs 2|P| = {2.0 * poly.area}"
    return None


def _prop_normal_product(rng) -> str | None:
    poly = _centered_hull(rng)
    check = geometry.normal_product_check(poly)
    if not check.bound_holds:
        return f"min offset {check.min_offset} < inradius {check.inradius}"
    return None


def _prop_monotone_integral(rng) -> str | None:
    n = 64
    a = float(rng.uniform(0.2, 3.0))
    t = np.linspace(0.0, a, n)
    # xi = t * g with g positive nondecreasing, so xi(0) = 0 and xi/t climbs
    g = rng.uniform(0.1, 2.0) + np.concatenate(([0.0], np.cumsum(rng.random(n - 1))))
    xi = t * g
    psi = np.cumsum(rng.random(n))[::-1].copy()  # nonnegative, nonincreasing
    res = onedim.chebyshev_like_check(xi, psi, a)
    if not res.holds:
        return f"lhs {res.lhs} > rhs {res.rhs}"
    return None


def _prop_distance_concavity(rng) -> str | None:
    poly = _random_hull(rng)
    w = rng.random((2, poly.vertices.shape[0])) + 1e-3
    pts = (w / w.sum(axis=1, keepdims=True)) @ poly.vertices
    x, y = pts[0], pts[1]
    theta = float(rng.uniform(0.0, 1.0))
    scale = max(poly.diameter, 1.0)
    dx = geometry.distance_to_boundary(poly, x)
    dy = geometry.distance_to_boundary(poly, y)
    dmid = geometry.distance_to_boundary(poly, theta * x + (1.0 - theta) * y)
    if dmid < theta * dx + (1.0 - theta) * dy - 1e-11 * scale:
        return f"concavity: d(mid) = {dmid} < interpolant {theta * dx + (1 - theta) * dy}"

    h = float(rng.uniform(0.2, 1.0)) * geometry.distance_to_boundary(poly, x)
    if h > 0.0:
        nbrs = x + h * np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
        dists = geometry.boundary_distances(poly, nbrs)
        if np.all(dists >= 0.0):
            if float(dists.mean()) > geometry.distance_to_boundary(poly, x) + 1e-11 * scale:
                return f"superharmonicity: neighbor mean {dists.mean()} exceeds center"
    return None


def _prop_union_rule(rng) -> str | None:
    lams = rng.uniform(0.5, 50.0, size=2)
    q = float(rng.choice([1.0, rng.uniform(1.0, 1.9), 2.0, rng.uniform(2.0, 4.0)]))
    combined = solver.lambda_union(lams, q)
    if q >= 2.0 - 1e-9:
        oracle = float(np.min(lams))
    else:
        # mass split between two parts: minimize (l1 + l2 t^2)/(1 + t^q)^(2/q)
        # numerically, log-grid sweep plus a local refine (independent of the
        # closed-form combination rule under test)
        def quotient_log(u: float) -> float:
            t = math.exp(u)
            return (lams[0] + lams[1] * t * t) / (1.0 + t**q) ** (2.0 / q)

        us = np.linspace(-18.0, 18.0, 257)
        ts = np.exp(us)
        vals = (lams[0] + lams[1] * ts**2) / (1.0 + ts**q) ** (2.0 / q)
        k = int(np.argmin(vals))
        lo, hi = us[max(k - 1, 0)], us[min(k + 1, len(us) - 1)]
        res = scipy.optimize.minimize_scalar(
            quotient_log, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10}
        )
        oracle = float(min(res.fun, lams[0], float(vals.min())))
    if not math.isclose(combined, oracle, rel_tol=5e-6):
        return f"union rule {combined} vs oracle {oracle} at q={q}"
    return None


def _prop_scaling_covariance(rng, index: int = 0) -> str | None:
    # cheap grids; scale factors are powers of two, so the scaled grid is the
    # exact image of the base grid and the covariance law is float-exact.
    if index % 16 == 5:
        q, tol = 2.0, 1e-11
    elif index % 64 == 9:
        q, tol = 1.5, 1e-9
    else:
        q, tol = 1.0, 1e-11
    w, t_side = rng.uniform(0.75, 1.5, size=2)
    poly = geometry.polygon([(0, 0), (w, 0), (w, t_side), (0, t_side)])
    factor = float(2.0 ** rng.choice([-2, -1, 1, 2]))
    h = min(w, t_side) / 12.0
    base = solver.lambda_2q(poly, q, h=h)
    scaled = solver.lambda_2q(poly.scaled(factor), q, h=factor * h)
    exponent = 2.0 + (2.0 - q) * 2.0 / q
    expect = base.lam / factor**exponent
    if not math.isclose(scaled.lam, expect, rel_tol=tol):
        return f"lambda(tP) = {scaled.lam} vs t^-k lambda(P) = {expect} at q={q}"
    return None


PROPERTY_CHECKS = {
    "gauge-homogeneity": _prop_gauge_homogeneity,
    "divergence-identity": _prop_divergence_identity,
    "normal-product": _prop_normal_product,
    "monotone-integral": _prop_monotone_integral,
    "distance-concavity": _prop_distance_concavity,
    "union-rule": _prop_union_rule,
    "scaling-covariance": _prop_scaling_covariance,
}


@dataclass(frozen=True)
class PropertySummary:
    name: str
    trials: int
    failures: int
    seed: int
    first_failure: str | None = None


def run_property(name: str, trials: int, seed: int) -> PropertySummary:
    """Run one randomized property family; failures carry a repro message."""
    check = PROPERTY_CHECKS[name]
    takes_index = name == "scaling-covariance"
    failures = 0
    first: str | None = None
    for i in range(trials):
        rng = _rng_for(name, seed, i)
        message = check(rng, i) if takes_index else check(rng)
        if message is not None:
            failures += 1
            if first is None:
                first = f"trial {i}: {message}"
    return PropertySummary(name, trials, failures, seed, first)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _ensure_out(cfg: RunConfig) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return cfg.out_dir


def _freq_rows(freqs: dict, family) -> tuple[list[dict], list[list]]:
    order = {sid: i for i, (sid, _) in enumerate(family)}
    keys = sorted(freqs, key=lambda k: (order.get(k[0], len(order)), k[1]))
    records = [frequency_record(sid, freqs[(sid, q)]) for sid, q in keys]
    rows = [[rec[col] for col in FREQ_FIELDS] for rec in records]
    return records, rows


def cmd_compute(cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    family = load_family(cfg)
    freqs, errors = compute_matrix(cfg, family)
    records, rows = _freq_rows(freqs, family)
    payload = {
        "provenance": _provenance(cfg),
        "config": asdict(cfg),
        "results": records,
        "errors": errors,
    }
    write_json(os.path.join(out, "compute.json"), payload)
    write_table(os.path.join(out, "compute.csv"), FREQ_FIELDS, rows)
    for rec in records:
        print(
            f"{rec['shape']:>12s}  q={_num_tag(rec['q']):<4s} "
            f"lambda={rec['lambda']:.10g}  ({rec['method']})"
        )
    for err in errors:
        print(f"error: {err['item']}: {err['error']}", file=sys.stderr)
    return EXIT_ERROR if errors else EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    family = load_family(cfg)
    freqs, errors = compute_matrix(cfg, family)
    reports, verrors = verify_reports(cfg, family, freqs)
    errors.extend(verrors)
    counts = _verdict_counts(reports)
    records = [report_record(r) for r in reports]
    payload = {
        "provenance": _provenance(cfg),
        "config": asdict(cfg),
        "reports": records,
        "verdict_counts": counts,
        "errors": errors,
    }
    write_json(os.path.join(out, "verify.json"), payload)
    rows = [[rec[col] for col in REPORT_FIELDS] for rec in records]
    write_table(os.path.join(out, "verify.csv"), REPORT_FIELDS, rows)
    print(
        f"checks: {len(reports)}  holds: {counts[bounds.HOLDS]}  "
        f"equality: {counts[bounds.EQUALITY]}  violated: {counts[bounds.VIOLATED]}"
    )
    for err in errors:
        print(f"error: {err['item']}: {err['error']}", file=sys.stderr)
    if errors:
        return EXIT_ERROR
    return EXIT_VIOLATED if counts[bounds.VIOLATED] else EXIT_OK


SCAN_FIELDS = ["q", "alpha", "shape", "value", "trend"]


def _scan_payload(cfg: RunConfig, family, freqs) -> tuple[list[dict], list[list], list[list]]:
    scans, rows, tsv_rows = [], [], []
    for q in cfg.qs:
        entries = [
            (sid, shape, freqs[(sid, q)]) for sid, shape in family if (sid, q) in freqs
        ]
        scan = bounds.alpha_scan(entries, q, cfg.alphas)
        scans.append(
            {
                "q": scan.q,
                "alphas": list(scan.alphas),
                "shape_ids": list(scan.shape_ids),
                "values": scan.values,
                "minima": list(scan.minima),
                "maxima": list(scan.maxima),
                "trends": list(scan.trends),
            }
        )
        for i, alpha in enumerate(scan.alphas):
            for j, sid in enumerate(scan.shape_ids):
                rows.append([q, alpha, sid, float(scan.values[i, j]), scan.trends[i]])
        tsv_rows.append([f"# q={_num_tag(q)}  columns: alpha " + " ".join(scan.shape_ids)])
        for i, alpha in enumerate(scan.alphas):
            tsv_rows.append([alpha, *[float(v) for v in scan.values[i]]])
    return scans, rows, tsv_rows


def cmd_scan(cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    family = load_family(cfg)
    freqs, errors = compute_matrix(cfg, family)
    scans, rows, tsv_rows = _scan_payload(cfg, family, freqs)
    payload = {
        "provenance": _provenance(cfg),
        "config": asdict(cfg),
        "scans": scans,
        "errors": errors,
    }
    write_json(os.path.join(out, "scan.json"), payload)
    write_table(os.path.join(out, "scan.csv"), SCAN_FIELDS, rows)
    write_table(os.path.join(out, "scan.tsv"), ["# alpha scan plot data"], tsv_rows, delimiter="\t")
    for scan in scans:
        print(f"q={_num_tag(scan['q'])}: " + ", ".join(
            f"alpha={_num_tag(a)} -> {t}" for a, t in zip(scan["alphas"], scan["trends"])
        ))
    for err in errors:
        print(f"error: {err['item']}: {err['error']}", file=sys.stderr)
    return EXIT_ERROR if errors else EXIT_OK


SLAB_FIELDS = ["q", "L", "lambda", "normalized", "limit", "gap", "monotone", "ok"]


def _slab_payload(cfg: RunConfig) -> tuple[list[dict], list[list], list[list]]:
    slabs, rows, tsv_rows = [], [], []
    for q in cfg.qs:
        sa = bounds.slab_asymptotics(q, cfg.slab_lengths)
        slabs.append(
            {
                "q": sa.q,
                "lengths": list(sa.lengths),
                "frequencies": list(sa.frequencies),
                "values": list(sa.values),
                "limit": sa.limit,
                "monotone": sa.monotone,
                "gap": sa.gap,
                "ok": sa.ok,
            }
        )
        for L, lam, val in zip(sa.lengths, sa.frequencies, sa.values):
            rows.append([q, L, lam, val, sa.limit, sa.gap, sa.monotone, sa.ok])
        tsv_rows.append([f"# q={_num_tag(q)}  columns: L lambda normalized"])
        for L, lam, val in zip(sa.lengths, sa.frequencies, sa.values):
            tsv_rows.append([L, lam, val])
    return slabs, rows, tsv_rows


def cmd_slab(cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    slabs, rows, tsv_rows = _slab_payload(cfg)
    payload = {"provenance": _provenance(cfg), "config": asdict(cfg), "slabs": slabs}
    write_json(os.path.join(out, "slab.json"), payload)
    write_table(os.path.join(out, "slab.csv"), SLAB_FIELDS, rows)
    write_table(os.path.join(out, "slab.tsv"), ["# slab asymptotics plot data"], tsv_rows, delimiter="\t")
    for sa in slabs:
        target = "stabilizes" if sa["limit"] is None else f"limit {sa['limit']:.9g}"
        print(
            f"q={_num_tag(sa['q'])}: last normalized value {sa['values'][-1]:.9g} "
            f"({target}, gap {sa['gap']:.3%}, {'ok' if sa['ok'] else 'NOT ok'})"
        )
    return EXIT_OK


PI_FIELDS = ["q", "value", "residual", "resolution"]


def _pi_payload(cfg: RunConfig) -> tuple[list[dict], list[list]]:
    records, rows = [], []
    for q in cfg.qs:
        pc = onedim.pi_2q(q)
        rec = {"q": pc.q, "value": pc.value, "residual": pc.residual, "resolution": pc.resolution}
        records.append(rec)
        rows.append([rec[c] for c in PI_FIELDS])
    return records, rows


def cmd_pi2q(cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    records, rows = _pi_payload(cfg)
    payload = {"provenance": _provenance(cfg), "config": asdict(cfg), "constants": records}
    write_json(os.path.join(out, "pi2q.json"), payload)
    write_table(os.path.join(out, "pi2q.csv"), PI_FIELDS, rows)
    for rec in records:
        print(f"pi_2q(q={_num_tag(rec['q'])}) = {rec['value']:.12g}  (residual {rec['residual']:.2e})")
    return EXIT_OK


PROPERTY_FIELDS = ["name", "trials", "failures", "seed", "first_failure"]


def run_suite(cfg: RunConfig) -> tuple[dict, int]:
    """compute -> verify -> scan -> slab -> property sample, one report.

    Partial failures are recorded per item and the suite continues; the exit
    code is 1 when any item errored, else 2 when any check is violated, else
    0.  An empty family yields an empty report and exit 0.
    """
    family = load_family(cfg)
    errors: list[dict] = []
    skipped: list[str] = []

    if not family:
        freqs: dict = {}
        reports: list[bounds.BoundReport] = []
        scans: list[dict] = []
        slabs: list[dict] = []
        props: list[PropertySummary] = []
        pi_records: list[dict] = []
    else:
        freqs, errors = compute_matrix(cfg, family)
        reports, verrors = verify_reports(cfg, family, freqs)
        errors.extend(verrors)
        n_slabs = sum(
            1 for _, shape in family if bounds._slab_aspect(shape) is not None
        )
        if n_slabs >= 2:
            try:
                scans, _, _ = _scan_payload(cfg, family, freqs)
            except Exception as exc:
                scans = []
                errors.append({"item": "scan", "error": f"{type(exc).__name__}: {exc}"})
        else:
            scans = []
            skipped.append("scan: family has fewer than two slabs")
        try:
            slabs, _, _ = _slab_payload(cfg)
        except Exception as exc:
            slabs = []
            errors.append({"item": "slab", "error": f"{type(exc).__name__}: {exc}"})
        props = [
            run_property(name, cfg.property_trials, cfg.seed) for name in PROPERTY_CHECKS
        ]
        pi_records, _ = _pi_payload(cfg)

    counts = _verdict_counts(reports)
    prop_failures = sum(p.failures for p in props)
    report = {
        "provenance": _provenance(cfg),
        "config": asdict(cfg),
        "frequencies": [frequency_record(sid, freqs[(sid, q)]) for sid, q in sorted(
            freqs, key=lambda k: ([s for s, _ in family].index(k[0]), k[1])
        )],
        "reports": [report_record(r) for r in reports],
        "verdict_counts": counts,
        "scans": scans,
        "slabs": slabs,
        "pi_constants": pi_records,
        "properties": [asdict(p) for p in props],
        "errors": errors,
        "skipped": skipped,
    }
    if errors or prop_failures:
        code = EXIT_ERROR
    elif counts[bounds.VIOLATED]:
        code = EXIT_VIOLATED
    else:
        code = EXIT_OK
    return report, code


def cmd_suite(cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    report, code = run_suite(cfg)
    write_json(os.path.join(out, "suite.json"), report)

    freq_rows = [[rec[c] for c in FREQ_FIELDS] for rec in report["frequencies"]]
    write_table(os.path.join(out, "compute.csv"), FREQ_FIELDS, freq_rows)
    rep_rows = [[rec[c] for c in REPORT_FIELDS] for rec in report["reports"]]
    write_table(os.path.join(out, "verify.csv"), REPORT_FIELDS, rep_rows)

    scan_rows, scan_tsv = [], []
    for scan in report["scans"]:
        for i, alpha in enumerate(scan["alphas"]):
            for j, sid in enumerate(scan["shape_ids"]):
                scan_rows.append([scan["q"], alpha, sid, float(scan["values"][i][j]), scan["trends"][i]])
        scan_tsv.append([f"# q={_num_tag(scan['q'])}  columns: alpha " + " ".join(scan["shape_ids"])])
        for i, alpha in enumerate(scan["alphas"]):
            scan_tsv.append([alpha, *[float(v) for v in scan["values"][i]]])
    write_table(os.path.join(out, "scan.csv"), SCAN_FIELDS, scan_rows)
    write_table(os.path.join(out, "scan.tsv"), ["# alpha scan plot data"], scan_tsv, delimiter="\t")

    slab_rows, slab_tsv = [], []
    for sa in report["slabs"]:
        for L, lam, val in zip(sa["lengths"], sa["frequencies"], sa["values"]):
            slab_rows.append([sa["q"], L, lam, val, sa["limit"], sa["gap"], sa["monotone"], sa["ok"]])
        slab_tsv.append([f"# q={_num_tag(sa['q'])}  columns: L lambda normalized"])
        for L, lam, val in zip(sa["lengths"], sa["frequencies"], sa["values"]):
            slab_tsv.append([L, lam, val])
    write_table(os.path.join(out, "slab.csv"), SLAB_FIELDS, slab_rows)
    write_table(os.path.join(out, "slab.tsv"), ["# slab asymptotics plot data"], slab_tsv, delimiter="\t")

    prop_rows = [[p[c] for c in PROPERTY_FIELDS] for p in report["properties"]]
    write_table(os.path.join(out, "properties.csv"), PROPERTY_FIELDS, prop_rows)
    pi_rows = [[rec[c] for c in PI_FIELDS] for rec in report["pi_constants"]]
    write_table(os.path.join(out, "pi2q.csv"), PI_FIELDS, pi_rows)

    counts = report["verdict_counts"]
    print(
        f"suite: {len(report['frequencies'])} frequencies, {len(report['reports'])} checks "
        f"(holds {counts['holds']}, equality {counts['equality-within-tolerance']}, "
        f"violated {counts['violated']}), {len(report['errors'])} errors"
    )
    for err in report["errors"]:
        print(f"error: {err['item']}: {err['error']}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (FREQ_OUT overrides)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="parallel worker count")

    parser = argparse.ArgumentParser(
        prog="freqbounds",
        description="Principal-frequency computations and sharp-inequality reports.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    shapes = argparse.ArgumentParser(add_help=False)
    shapes.add_argument("--family", default=argparse.SUPPRESS, help="family descriptor")
    shapes.add_argument(
        "--shape", action="append", default=argparse.SUPPRESS, help="shape JSON file (repeatable)"
    )
    shapes.add_argument("--q", type=_parse_floats, default=argparse.SUPPRESS, help="exponent list")
    shapes.add_argument("--h", type=float, default=argparse.SUPPRESS, help="grid spacing")

    sub.add_parser("compute", parents=[common, shapes], help="solve lambda_2q over shapes x exponents")
    sub.add_parser("verify", parents=[common, shapes], help="run every applicable inequality check")

    scan = sub.add_parser("scan", parents=[common, shapes], help="alpha scan of scale-invariant products")
    scan.add_argument("--alphas", type=_parse_floats, default=argparse.SUPPRESS, help="alpha list")

    slab = sub.add_parser("slab", parents=[common], help="slab family asymptotics")
    slab.add_argument("--q", type=_parse_floats, default=argparse.SUPPRESS, help="exponent list")
    slab.add_argument("--lengths", type=_parse_floats, default=argparse.SUPPRESS, help="slab lengths")

    pi = sub.add_parser("pi2q", parents=[common], help="one-dimensional Poincare-Sobolev constants")
    pi.add_argument("--q", type=_parse_floats, default=argparse.SUPPRESS, help="exponent list")

    suite = sub.add_parser("suite", parents=[common, shapes], help="full pipeline plus property sample")
    suite.add_argument("--alphas", type=_parse_floats, default=argparse.SUPPRESS, help="alpha list")
    suite.add_argument("--lengths", type=_parse_floats, default=argparse.SUPPRESS, help="slab lengths")
    suite.add_argument("--trials", type=int, default=argparse.SUPPRESS, help="property trials per family")

    return parser


COMMANDS = {
    "compute": cmd_compute,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "slab": cmd_slab,
    "pi2q": cmd_pi2q,
    "suite": cmd_suite,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        file_data = load_config_file(args.config) if getattr(args, "config", None) else {}
        cfg = _merge_config(file_data, args)
        return COMMANDS[args.command](cfg)
    except (ValueError, OSError, ShapeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
