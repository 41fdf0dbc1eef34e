"""Exact planar convex geometry and analytic balls.

Convex polygons carry both representations at once: a counterclockwise vertex
list and the matching half-plane description  <a_i, x> <= b_i  with unit
outward normals.  All derived quantities (area, perimeter, inradius, gauge,
boundary integrals, inner parallel bodies) are computed from these in exact
float arithmetic, no grids involved.  Balls of any dimension are analytic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Relative tolerance used throughout for vertex dedup, half-plane slack and
# tie detection.  Scaled by the shape diameter where it applies to lengths.
REL_TOL = 1e-12


class ShapeError(ValueError):
    """Invalid shape input (reflex chain, degenerate polygon, bad JSON)."""


def unit_ball_volume(dim: int) -> float:
    """Volume of the unit ball in R^dim."""
    if dim < 1:
        raise ShapeError(f"dimension must be >= 1, got {dim}")
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


# ---------------------------------------------------------------------------
# Shape types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexPolygon:
    """Bounded open convex polygon, counterclockwise vertices.

    ``normals[i]`` is the unit outward normal of the edge from ``vertices[i]``
    to ``vertices[i+1]`` and ``offsets[i]`` the corresponding support value,
    so the closed polygon is  {x : <normals[i], x> <= offsets[i] for all i}.
    """

    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.vertices, self.normals, self.offsets):
            arr.setflags(write=False)

    # -- basic measurements -------------------------------------------------

    @property
    def dimension(self) -> int:
        return 2

    @property
    def num_edges(self) -> int:
        return len(self.offsets)

    @property
    def edge_lengths(self) -> np.ndarray:
        rolled = np.roll(self.vertices, -1, axis=0)
        return np.linalg.norm(rolled - self.vertices, axis=1)

    @property
    def area(self) -> float:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        return 0.5 * float(np.sum(v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]))

    @property
    def perimeter(self) -> float:
        return float(self.edge_lengths.sum())

    @property
    def diameter(self) -> float:
        v = self.vertices
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=2)
        return float(np.sqrt(d2.max()))

    @property
    def bounding_box(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax)."""
        v = self.vertices
        return (
            float(v[:, 0].min()),
            float(v[:, 1].min()),
            float(v[:, 0].max()),
            float(v[:, 1].max()),
        )

    # -- point queries ------------------------------------------------------

    def slacks(self, points: np.ndarray) -> np.ndarray:
        """b_i - <a_i, x> for each point; shape (..., num_edges)."""
        pts = np.asarray(points, dtype=float)
        return self.offsets - pts @ self.normals.T

    def contains(self, points: np.ndarray, strict: bool = True) -> np.ndarray:
        """Membership of points, strict meaning the open polygon."""
        s = self.slacks(points)
        tol = REL_TOL * self.diameter
        if strict:
            return np.min(s, axis=-1) > tol
        return np.min(s, axis=-1) >= -tol

    # -- transforms ----------------------------------------------------------

    def translated(self, shift) -> "ConvexPolygon":
        return polygon(self.vertices + np.asarray(shift, dtype=float))

    def scaled(self, t: float) -> "ConvexPolygon":
        if t <= 0:
            raise ShapeError("scale factor must be positive")
        return polygon(self.vertices * float(t))


@dataclass(frozen=True)
class BallShape:
    """Open ball in R^dim; all quantities are closed-form."""

    dim: int
    radius: float
    center: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ShapeError(f"ball dimension must be >= 1, got {self.dim}")
        if not (self.radius > 0):
            raise ShapeError(f"ball radius must be positive, got {self.radius}")
        center = self.center if self.center else (0.0,) * self.dim
        if len(center) != self.dim:
            raise ShapeError("ball center length does not match dimension")
        object.__setattr__(self, "center", tuple(float(c) for c in center))

    @property
    def dimension(self) -> int:
        return self.dim

    @property
    def area(self) -> float:
        return unit_ball_volume(self.dim) * self.radius**self.dim

    @property
    def perimeter(self) -> float:
        return self.dim * unit_ball_volume(self.dim) * self.radius ** (self.dim - 1)

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def bounding_box(self) -> tuple[float, float, float, float]:
        if self.dim != 2:
            raise ShapeError("bounding_box is a planar query")
        cx, cy = self.center
        r = self.radius
        return (cx - r, cy - r, cx + r, cy + r)

    def contains(self, points: np.ndarray, strict: bool = True) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        d2 = np.sum((pts - np.asarray(self.center)) ** 2, axis=-1)
        tol = REL_TOL * self.diameter
        if strict:
            return d2 < (self.radius - tol) ** 2
        return d2 <= (self.radius + tol) ** 2


@dataclass(frozen=True)
class DisjointUnion:
    """Finite union of pairwise disjoint shapes of equal dimension."""

    parts: tuple

    def __post_init__(self) -> None:
        if len(self.parts) < 2:
            raise ShapeError("a union needs at least two parts")
        dims = {p.dimension for p in self.parts}
        if len(dims) != 1:
            raise ShapeError("union parts must share one dimension")
        for p, q in itertools.combinations(self.parts, 2):
            if not _disjoint(p, q):
                raise ShapeError("union parts must be pairwise disjoint")

    @property
    def dimension(self) -> int:
        return self.parts[0].dimension

    @property
    def area(self) -> float:
        return float(sum(p.area for p in self.parts))

    @property
    def perimeter(self) -> float:
        return float(sum(p.perimeter for p in self.parts))

    @property
    def diameter(self) -> float:
        boxes = [p.bounding_box for p in self.parts]
        xmin = min(b[0] for b in boxes)
        ymin = min(b[1] for b in boxes)
        xmax = max(b[2] for b in boxes)
        ymax = max(b[3] for b in boxes)
        return math.hypot(xmax - xmin, ymax - ymin)

    @property
    def bounding_box(self) -> tuple[float, float, float, float]:
        boxes = [p.bounding_box for p in self.parts]
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )

    def contains(self, points: np.ndarray, strict: bool = True) -> np.ndarray:
        out = self.parts[0].contains(points, strict=strict)
        for p in self.parts[1:]:
            out = out | p.contains(points, strict=strict)
        return out


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    t = float(np.dot(p - a, ab) / max(np.dot(ab, ab), 1e-300))
    t = min(1.0, max(0.0, t))
    return float(np.linalg.norm(p - (a + t * ab)))


def _point_polygon_distance(p: np.ndarray, poly: ConvexPolygon) -> float:
    """Distance from a point to the closed polygon (0 if inside)."""
    if bool(poly.contains(p, strict=False)):
        return 0.0
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    return min(_point_segment_distance(p, v[i], w[i]) for i in range(len(v)))


def _disjoint(p, q) -> bool:
    tol = REL_TOL * max(p.diameter, q.diameter)
    if isinstance(p, BallShape) and isinstance(q, BallShape):
        d = math.dist(p.center, q.center)
        return d >= p.radius + q.radius - tol
    if isinstance(p, ConvexPolygon) and isinstance(q, ConvexPolygon):
        # Separating axis among either polygon's edge normals.
        for poly, other in ((p, q), (q, p)):
            proj = other.vertices @ poly.normals.T
            if np.any(proj.min(axis=0) >= poly.offsets - tol):
                return True
        return False
    ball, poly = (p, q) if isinstance(p, BallShape) else (q, p)
    if not (isinstance(ball, BallShape) and isinstance(poly, ConvexPolygon)):
        raise ShapeError("unsupported union part combination")
    c = np.asarray(ball.center, dtype=float)
    return _point_polygon_distance(c, poly) >= ball.radius - tol


# ---------------------------------------------------------------------------
# Polygon construction
# ---------------------------------------------------------------------------


def polygon(points) -> ConvexPolygon:
    """Build a convex polygon from counterclockwise vertices.

    Consecutive duplicates (within REL_TOL * diameter) and collinear vertices
    are removed.  A clockwise or reflex chain raises ShapeError, it is never
    silently repaired.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ShapeError("polygon needs an (m, 2) array with m >= 3")
    if not np.all(np.isfinite(pts)):
        raise ShapeError("polygon vertices must be finite")

    span = pts.max(axis=0) - pts.min(axis=0)
    scale = float(np.hypot(span[0], span[1]))
    if scale <= 0.0:
        raise ShapeError("polygon vertices are all coincident")

    # Deduplicate cyclically adjacent vertices.
    keep = [0]
    for i in range(1, len(pts)):
        if np.linalg.norm(pts[i] - pts[keep[-1]]) > REL_TOL * scale:
            keep.append(i)
    if len(keep) > 1 and np.linalg.norm(pts[keep[-1]] - pts[keep[0]]) <= REL_TOL * scale:
        keep.pop()
    pts = pts[keep]
    if len(pts) < 3:
        raise ShapeError("fewer than 3 distinct vertices")

    # Remove collinear vertices; reject reflex turns.  Repeat until stable
    # since removing one vertex can expose a new collinear triple.
    cross_tol = REL_TOL * scale * scale
    while True:
        prev = np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0)
        e_in = pts - prev
        e_out = nxt - pts
        cross = e_in[:, 0] * e_out[:, 1] - e_in[:, 1] * e_out[:, 0]
        if np.any(cross < -cross_tol):
            raise ShapeError("vertices are not in counterclockwise convex position")
        flat = cross <= cross_tol
        if not flat.any():
            break
        pts = pts[~flat]
        if len(pts) < 3:
            raise ShapeError("polygon degenerates after collinear removal")

    edges = np.roll(pts, -1, axis=0) - pts
    lengths = np.linalg.norm(edges, axis=1)
    normals = np.column_stack((edges[:, 1], -edges[:, 0])) / lengths[:, None]
    offsets = np.sum(normals * pts, axis=1)

    poly = ConvexPolygon(vertices=pts, normals=normals, offsets=offsets)
    _check_consistency(poly, scale)
    return poly


def _check_consistency(poly: ConvexPolygon, scale: float) -> None:
    """Every vertex satisfies all half-planes, equality only on its edges."""
    s = poly.slacks(poly.vertices)  # (m, m)
    tol = 1e-11 * max(scale, 1.0)
    if s.min() < -tol:
        raise ShapeError("half-plane description inconsistent with vertices")
    m = len(poly.offsets)
    incident = np.zeros((m, m), dtype=bool)
    idx = np.arange(m)
    incident[idx, idx] = True
    incident[idx, (idx - 1) % m] = True
    tight = s <= tol
    if np.any(tight & ~incident):
        raise ShapeError("vertex lies on a non-incident edge; chain nearly degenerate")


def regular_polygon(m: int, circumradius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> ConvexPolygon:
    """Regular m-gon with vertices on the circle of the given radius."""
    if m < 3:
        raise ShapeError("regular polygon needs m >= 3")
    ang = phase + 2.0 * math.pi * np.arange(m) / m
    pts = np.column_stack((np.cos(ang), np.sin(ang))) * float(circumradius)
    return polygon(pts + np.asarray(center, dtype=float))


def rect_slab(L: float) -> ConvexPolygon:
    """Rectangle (-L/2, L/2) x (0, 1); inradius 1/2 once L >= 1."""
    if not (L > 0):
        raise ShapeError("slab length must be positive")
    half = float(L) / 2.0
    return polygon([(-half, 0.0), (half, 0.0), (half, 1.0), (-half, 1.0)])


def unit_square() -> ConvexPolygon:
    return polygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------


def measure(shape) -> float:
    """N-dimensional volume (area in the plane)."""
    return shape.area


def perimeter(shape) -> float:
    """Boundary measure."""
    return shape.perimeter


# ---------------------------------------------------------------------------
# Inradius (Chebyshev center)
# ---------------------------------------------------------------------------


class InradiusResult(NamedTuple):
    inradius: float
    center: np.ndarray


_TRIPLE_CHUNK = 200_000


def _triple_blocks(m: int):
    """Yield (K, 3) index arrays covering all C(m, 3) triples."""
    buf = []
    count = 0
    for i in range(m - 2):
        jj, kk = np.triu_indices(m - 1 - i, k=1)
        block = np.column_stack((np.full(jj.shape, i), jj + i + 1, kk + i + 1))
        buf.append(block)
        count += len(block)
        if count >= _TRIPLE_CHUNK:
            yield np.concatenate(buf)
            buf, count = [], 0
    if buf:
        yield np.concatenate(buf)


def inradius(poly: ConvexPolygon) -> InradiusResult:
    """Largest inscribed ball of a convex polygon.

    Solves  max r  s.t.  <a_i, c> + r <= b_i  by enumerating triples of
    half-planes as active-constraint candidates: the optimum is attained at a
    vertex of the feasible polytope in (c, r) space, and every such vertex has
    three active constraints (pairs are subsumed).  Deterministic; ties on r
    are broken by the lexicographically smallest center.
    """
    if isinstance(poly, BallShape):
        return InradiusResult(poly.radius, np.asarray(poly.center, dtype=float))
    A = poly.normals
    b = poly.offsets
    m = len(b)
    scale = poly.diameter
    tol = REL_TOL * max(scale, 1.0)

    best_r = -math.inf
    best_c: np.ndarray | None = None

    for idx in _triple_blocks(m):
        n0, n1, n2 = A[idx[:, 0]], A[idx[:, 1]], A[idx[:, 2]]
        b0, b1, b2 = b[idx[:, 0]], b[idx[:, 1]], b[idx[:, 2]]

        # Cramer solve of [a | 1] (cx, cy, r)^T = b for each triple.
        det = (
            n0[:, 0] * (n1[:, 1] - n2[:, 1])
            - n0[:, 1] * (n1[:, 0] - n2[:, 0])
            + (n1[:, 0] * n2[:, 1] - n1[:, 1] * n2[:, 0])
        )
        ok = np.abs(det) > 1e-12
        if not ok.any():
            continue
        n0, n1, n2 = n0[ok], n1[ok], n2[ok]
        b0, b1, b2 = b0[ok], b1[ok], b2[ok]
        det = det[ok]

        det_x = (
            b0 * (n1[:, 1] - n2[:, 1])
            - n0[:, 1] * (b1 - b2)
            + (b1 * n2[:, 1] - n1[:, 1] * b2)
        )
        det_y = (
            n0[:, 0] * (b1 - b2)
            - b0 * (n1[:, 0] - n2[:, 0])
            + (n1[:, 0] * b2 - b1 * n2[:, 0])
        )
        det_r = (
            n0[:, 0] * (n1[:, 1] * b2 - b1 * n2[:, 1])
            - n0[:, 1] * (n1[:, 0] * b2 - b1 * n2[:, 0])
            + b0 * (n1[:, 0] * n2[:, 1] - n1[:, 1] * n2[:, 0])
        )
        cx, cy, r = det_x / det, det_y / det, det_r / det

        # Keep strict improvements plus ties that could beat the running
        # lexicographic minimum; everything else skips the feasibility pass.
        cand = r > max(best_r - tol, 0.0)
        if best_c is not None:
            tie = cand & (r <= best_r + tol)
            lex = (cx < best_c[0] - tol) | (
                (cx <= best_c[0] + tol) & (cy < best_c[1] - tol)
            )
            cand = (r > best_r + tol) | (tie & lex)
        if not cand.any():
            continue
        cx, cy, r = cx[cand], cy[cand], r[cand]
        centers = np.column_stack((cx, cy))
        slack = b[None, :] - centers @ A.T - r[:, None]
        feasible = slack.min(axis=1) >= -tol
        if not feasible.any():
            continue
        r = r[feasible]
        centers = centers[feasible]

        r_top = float(r.max())
        if r_top > best_r + tol:
            best_r = r_top
            best_c = None
        near = r >= best_r - tol
        pool = centers[near]
        if best_c is not None:
            pool = np.vstack((pool, best_c[None, :]))
        order = np.lexsort((pool[:, 1], pool[:, 0]))
        best_c = pool[order[0]]

    if best_c is None or best_r <= 0.0:
        raise ShapeError("inradius enumeration found no feasible candidate")
    return InradiusResult(best_r, best_c)


def center_at_chebyshev(poly: ConvexPolygon) -> ConvexPolygon:
    """Translate so a Chebyshev center sits at the origin.

    After centering, every support offset satisfies b_i >= inradius: the
    inscribed ball touches or clears each edge line.
    """
    res = inradius(poly)
    out = poly.translated(-res.center)
    if out.offsets.min() < res.inradius - 1e-9 * max(poly.diameter, 1.0):
        raise ShapeError("centered polygon has an offset below the inradius")
    return out


# ---------------------------------------------------------------------------
# Distance and gauge
# ---------------------------------------------------------------------------


def distance_to_boundary(poly: ConvexPolygon, x) -> float:
    """d(x) = min_i (b_i - <a_i, x>) for x in the closed polygon."""
    pt = np.asarray(x, dtype=float)
    s = poly.slacks(pt)
    d = float(s.min())
    if d < -REL_TOL * max(poly.diameter, 1.0):
        raise ShapeError("point lies outside the closed polygon")
    return max(d, 0.0)


def boundary_distances(poly: ConvexPolygon, points: np.ndarray) -> np.ndarray:
    """Vectorized min-slack distance; negative values mean outside."""
    return np.min(poly.slacks(points), axis=-1)


class GaugeValue(NamedTuple):
    value: float
    gradient: np.ndarray
    tie: bool


def minkowski_gauge(poly: ConvexPolygon, x) -> GaugeValue:
    """Gauge of the polygon, j(x) = max_i <a_i, x> / b_i.

    Requires the origin strictly inside (all offsets positive).  The gradient
    is the active facet's a_k / b_k; on cone boundaries the smallest-index
    facet wins and the tie flag is set.  j is 1-homogeneous, j < 1 inside,
    j = 1 on the boundary.
    """
    if poly.offsets.min() <= 0.0:
        raise ShapeError("gauge needs the origin strictly inside the polygon")
    pt = np.asarray(x, dtype=float)
    ratios = (poly.normals @ pt) / poly.offsets
    k = int(np.argmax(ratios))
    value = float(ratios[k])
    near = ratios >= value - 1e-12 * max(abs(value), 1.0)
    k = int(np.flatnonzero(near)[0])
    return GaugeValue(value, poly.normals[k] / poly.offsets[k], bool(near.sum() > 1))


# ---------------------------------------------------------------------------
# Boundary integrals and the normal-product bound
# ---------------------------------------------------------------------------


class BoundaryIntegrals(NamedTuple):
    i_plus: float
    i_minus: float


def boundary_integrals(poly: ConvexPolygon) -> BoundaryIntegrals:
    """Edge sums  I+ = sum b_i l_i  and  I- = sum l_i / b_i.

    I+ is the boundary integral of <x, nu> and equals N |Omega| exactly by
    the divergence theorem; this identity is asserted to 1e-12 relative.
    I- integrates 1 / <x, nu>.  Both need the origin strictly inside.
    """
    if poly.offsets.min() <= 0.0:
        raise ShapeError("boundary integrals need the origin strictly inside")
    ell = poly.edge_lengths
    i_plus = float(np.sum(poly.offsets * ell))
    i_minus = float(np.sum(ell / poly.offsets))
    if abs(i_plus - 2.0 * poly.area) > 1e-12 * max(i_plus, 1.0):
        raise ShapeError("divergence identity violated; polygon data inconsistent")
    return BoundaryIntegrals(i_plus, i_minus)


@dataclass(frozen=True)
class NormalProductReport:
    min_offset: float
    inradius: float
    bound_holds: bool
    circumscribes_inball: bool


def normal_product_check(poly: ConvexPolygon) -> NormalProductReport:
    """Check min_i b_i >= inradius for a Chebyshev-centered polygon.

    The inscribed ball of radius R centered at the origin forces every
    support offset to be at least R.  ``circumscribes_inball`` records whether
    equality holds on every edge (all edge lines tangent to the inball); no
    further rigidity conclusion is drawn from it.
    """
    res = inradius(poly)
    scale = max(poly.diameter, 1.0)
    center_off = float(np.linalg.norm(res.center))
    if center_off > 1e-9 * scale:
        raise ShapeError("normal_product_check needs a Chebyshev-centered polygon")
    min_offset = float(poly.offsets.min())
    holds = min_offset >= res.inradius - 1e-12 * scale
    tangent = bool(np.all(np.abs(poly.offsets - res.inradius) <= 1e-9 * scale))
    return NormalProductReport(min_offset, res.inradius, holds, tangent)


# ---------------------------------------------------------------------------
# Inner parallel bodies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InnerParallelBody:
    """Level set {x : d(x) > t}; empty once t reaches the inradius."""

    offset: float
    poly: ConvexPolygon | None

    @property
    def is_empty(self) -> bool:
        return self.poly is None


def inner_parallel(poly: ConvexPolygon, t: float) -> InnerParallelBody:
    """Inner parallel body at inward offset t >= 0.

    The body is the intersection of the parent half-planes with offsets
    b_i - t, so its normals are a subset of the parent's.  Returns an empty
    body when t reaches the inradius and the intersection degenerates.
    """
    if t < 0:
        raise ShapeError("inner offset must be nonnegative")
    if t == 0.0:
        return InnerParallelBody(0.0, poly)
    A = poly.normals
    b = poly.offsets - float(t)
    m = len(b)
    scale = max(poly.diameter, 1.0)

    pts = []
    for i, j in itertools.combinations(range(m), 2):
        det = A[i, 0] * A[j, 1] - A[i, 1] * A[j, 0]
        if abs(det) <= 1e-12:
            continue
        x = (b[i] * A[j, 1] - A[i, 1] * b[j]) / det
        y = (A[i, 0] * b[j] - b[i] * A[j, 0]) / det
        pts.append((x, y))
    if not pts:
        return InnerParallelBody(float(t), None)
    pts_arr = np.asarray(pts)
    slack = b[None, :] - pts_arr @ A.T
    feas = pts_arr[slack.min(axis=1) >= -1e-9 * scale]
    if len(feas) < 3:
        return InnerParallelBody(float(t), None)

    centroid = feas.mean(axis=0)
    order = np.argsort(np.arctan2(feas[:, 1] - centroid[1], feas[:, 0] - centroid[0]))
    feas = feas[order]
    keep = [0]
    for k in range(1, len(feas)):
        if np.linalg.norm(feas[k] - feas[keep[-1]]) > 1e-9 * scale:
            keep.append(k)
    if len(keep) > 1 and np.linalg.norm(feas[keep[-1]] - feas[keep[0]]) <= 1e-9 * scale:
        keep.pop()
    feas = feas[keep]
    if len(feas) < 3:
        return InnerParallelBody(float(t), None)
    try:
        inner = polygon(feas)
    except ShapeError:
        return InnerParallelBody(float(t), None)
    return InnerParallelBody(float(t), inner)


# ---------------------------------------------------------------------------
# JSON shape schema
# ---------------------------------------------------------------------------


def shape_from_json(data: dict):
    """Build a shape from its JSON description.

    Supported forms:
      {"type": "polygon", "vertices": [[x, y], ...]}
      {"type": "ball", "dim": N, "radius": R, "center": [...]?}
      {"type": "rect", "L": L}
      {"type": "union", "parts": [...]}
    """
    if not isinstance(data, dict) or "type" not in data:
        raise ShapeError("shape JSON must be an object with a 'type' field")
    kind = data["type"]
    if kind == "polygon":
        return polygon(data["vertices"])
    if kind == "ball":
        return BallShape(
            dim=int(data["dim"]),
            radius=float(data["radius"]),
            center=tuple(data.get("center", ())),
        )
    if kind == "rect":
        return rect_slab(float(data["L"]))
    if kind == "union":
        return DisjointUnion(tuple(shape_from_json(p) for p in data["parts"]))
    raise ShapeError(f"unknown shape type {kind!r}")


def shape_to_json(shape) -> dict:
    if isinstance(shape, ConvexPolygon):
        return {"type": "polygon", "vertices": shape.vertices.tolist()}
    if isinstance(shape, BallShape):
        return {
            "type": "ball",
            "dim": shape.dim,
            "radius": shape.radius,
            "center": list(shape.center),
        }
    if isinstance(shape, DisjointUnion):
        return {"type": "union", "parts": [shape_to_json(p) for p in shape.parts]}
    raise ShapeError(f"cannot encode shape of type {type(shape).__name__}")
