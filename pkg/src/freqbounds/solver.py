"""Principal frequencies lambda_{2,q} of planar shapes on masked grids.

The quantity computed here is

    lambda_{2,q}(Omega) = min  ( sum |grad_h u|^2 h^2 ) / ( sum |u|^q h^2 )^(2/q)

over grid functions supported on nodes strictly inside Omega and extended by
zero outside (the discrete zero-boundary class).  In two dimensions the
five-point Dirichlet energy is spacing-free in graph form,
sum_edges (u_a - u_b)^2, with every edge leaving the mask clamped to zero.

Three code paths share one assembly:

  * q = 1: one Poisson solve -Delta_h w = 1; the torsion identity gives
    T = sum w h^2 and lambda_{2,1} = 1/T.
  * q = 2: inverse power iteration on the five-point Laplacian, one sparse
    factorization and one triangular solve per step.
  * general q: the normalized gradient flow with a backward-Euler stiffness
    term, (M + sK) u+ = M (u + s lam |u|^(q-2) u), projected onto the
    positive cone and renormalized each step; stationary points satisfy
    K u = lam M |u|^(q-2) u regardless of the step size s.

Balls of any dimension delegate to the radial one-dimensional problem and
rescale by the dilation law lambda_{2,q}(t Omega) = t^(-2-(2-q)N/q) lambda.
Disjoint unions are solved part by part and merged with ``lambda_union``.

Energies are evaluated as sums of squares (never via an expanded quadratic
form), which keeps the stopping test far below the cancellation noise floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import onedim
from .geometry import BallShape, ConvexPolygon, DisjointUnion, ShapeError
from .onedim import ConvergenceError, _validate_q

#: default grid spacing is shape diameter divided by this
DEFAULT_RESOLUTION = 256
#: radial resolution for analytic balls
RADIAL_RESOLUTION = 2048
#: unknown-count ceiling for the sparse direct factorization; beyond it the
#: linear solves switch to classical algebraic multigrid with CG acceleration
DIRECT_LIMIT = 230_000
#: fewest interior unknowns considered a meaningful discretization
MIN_UNKNOWNS = 16

FLOW_RTOL = 1e-11
FLOW_PATIENCE = 8
FLOW_MAX_ITER = 50_000
POWER_RTOL = 1e-13
POWER_PATIENCE = 3
POWER_MAX_ITER = 10_000

__all__ = [
    "GridField",
    "FrequencyResult",
    "lambda_2q",
    "torsion",
    "lambda_union",
    "solve_with_study",
]


@dataclass(frozen=True)
class GridField:
    """Scalar samples on a uniform grid clipped to a shape.

    ``mask`` flags nodes strictly inside the shape; ``values`` vanish on all
    other nodes, encoding the zero-extension of the trial class.  Node (i, j)
    sits at (bbox[0] + j h, bbox[1] + i h).
    """

    bbox: tuple[float, float, float, float]
    h: float
    mask: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.mask.shape != self.values.shape or self.mask.ndim != 2:
            raise ValueError("mask and values must be equal-shape 2D arrays")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")
        if np.any(self.values[~self.mask] != 0.0):
            raise ValueError("values must vanish outside the interior mask")
        self.mask.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def unknowns(self) -> int:
        return int(self.mask.sum())

    def node_coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        ny, nx = self.mask.shape
        xs = self.bbox[0] + self.h * np.arange(nx)
        ys = self.bbox[1] + self.h * np.arange(ny)
        return xs, ys


@dataclass(frozen=True)
class FrequencyResult:
    """A computed lambda_{2,q} together with its convergence evidence.

    ``residual`` is the last relative change of the quotient (iterative
    paths) or the relative linear-system residual (the direct q = 1 path);
    ``norm_check`` is the L^q norm of the returned minimizer and must be 1;
    ``error_estimate`` is a relative discretization-error estimate from an
    h versus h/2 study when one was performed.
    """

    q: float
    lam: float
    h: float
    iterations: int
    residual: float
    norm_check: float
    method: str
    unknowns: int
    error_estimate: float | None = None
    field: GridField | None = None

    def __post_init__(self) -> None:
        if not (self.lam > 0.0):
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if abs(self.norm_check - 1.0) > 1e-10:
            raise ValueError(f"minimizer norm check failed: {self.norm_check}")


# ---------------------------------------------------------------------------
# Grid construction and assembly
# ---------------------------------------------------------------------------


def _resolve_spacing(shape, h: float | None) -> float:
    """Snap the requested spacing so the short bbox side holds it exactly.

    Alignment makes axis-aligned rectangle boundaries fall on grid lines,
    which upgrades those shapes to clean second-order accuracy; for other
    shapes the snap is harmless.
    """
    if h is None:
        h = shape.diameter / DEFAULT_RESOLUTION
    h = float(h)
    if not (h > 0.0) or not math.isfinite(h):
        raise ValueError(f"grid spacing must be positive, got {h}")
    xmin, ymin, xmax, ymax = shape.bounding_box
    span = min(xmax - xmin, ymax - ymin)
    n = max(2, round(span / h))
    return span / n


def _interior_mask(poly: ConvexPolygon, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Boolean mask of grid nodes strictly inside the polygon."""
    xmin, ymin, xmax, ymax = poly.bounding_box
    nx = int(math.ceil((xmax - xmin) / h - 1e-9)) + 1
    ny = int(math.ceil((ymax - ymin) / h - 1e-9)) + 1
    xs = xmin + h * np.arange(nx)
    ys = ymin + h * np.arange(ny)
    mask = np.empty((ny, nx), dtype=bool)
    block = max(1, 8_000_000 // (nx * max(poly.num_edges, 1)))
    for i0 in range(0, ny, block):
        Y = ys[i0 : i0 + block]
        pts = np.stack(np.meshgrid(xs, Y, indexing="xy"), axis=-1).reshape(-1, 2)
        mask[i0 : i0 + block] = poly.contains(pts).reshape(len(Y), nx)
    return mask, xs, ys


@dataclass(frozen=True)
class _Discretization:
    h: float
    mask: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    edge_a: np.ndarray
    edge_b: np.ndarray
    d_fixed: np.ndarray
    stiffness: sp.csr_matrix

    @property
    def unknowns(self) -> int:
        return len(self.d_fixed)


def _discretize(poly: ConvexPolygon, h: float) -> _Discretization:
    mask, xs, ys = _interior_mask(poly, h)
    n = int(mask.sum())
    if n < MIN_UNKNOWNS:
        raise ShapeError(
            f"interior mask has {n} nodes at h = {h}; the shape is too small "
            "for this spacing"
        )
    if mask[0, :].any() or mask[-1, :].any() or mask[:, 0].any() or mask[:, -1].any():
        raise ShapeError("interior mask touches the grid border")

    idx = np.full(mask.shape, -1, dtype=np.int64)
    idx[mask] = np.arange(n)
    ea_parts, eb_parts = [], []
    for a, b in ((idx[:, :-1], idx[:, 1:]), (idx[:-1, :], idx[1:, :])):
        ok = (a >= 0) & (b >= 0)
        ea_parts.append(a[ok])
        eb_parts.append(b[ok])
    ea = np.concatenate(ea_parts)
    eb = np.concatenate(eb_parts)
    degree = np.bincount(np.concatenate([ea, eb]), minlength=n)
    d_fixed = (4.0 - degree).astype(float)  # edges into the zero boundary

    adj = sp.coo_matrix((np.ones(len(ea)), (ea, eb)), shape=(n, n))
    stiffness = (4.0 * sp.eye(n) - (adj + adj.T)).tocsr()
    return _Discretization(h, mask, xs, ys, ea, eb, d_fixed, stiffness)


def _energy(disc: _Discretization, u: np.ndarray) -> float:
    """Graph Dirichlet energy u^T K u as an all-positive sum of squares."""
    return float(
        np.sum((u[disc.edge_a] - u[disc.edge_b]) ** 2) + np.sum(disc.d_fixed * u * u)
    )


def _lq_norm(u: np.ndarray, q: float, h: float) -> float:
    return float(h * h * np.sum(np.abs(u) ** q)) ** (1.0 / q)


def _linear_solver(K: sp.csr_matrix, n: int):
    """Factor once, solve many; direct for desk sizes, AMG beyond."""
    if n <= DIRECT_LIMIT:
        lu = splu(K.tocsc())
        return lu.solve, "splu"
    import pyamg

    ml = pyamg.ruge_stuben_solver(K)

    def solve(b: np.ndarray) -> np.ndarray:
        return ml.solve(b, tol=1e-12, accel="cg", maxiter=400)

    return solve, "amg"


# ---------------------------------------------------------------------------
# Minimization paths
# ---------------------------------------------------------------------------


def _inverse_power(disc, solve, u0):
    h = disc.h
    u = u0 / _lq_norm(u0, 2.0, h)
    lam = _energy(disc, u)
    streak = 0
    for it in range(1, POWER_MAX_ITER + 1):
        v = solve(h * h * u)
        v /= _lq_norm(v, 2.0, h)
        lam_new = _energy(disc, v)
        change = abs(lam_new - lam) / lam_new
        u, lam = v, lam_new
        if change < POWER_RTOL:
            streak += 1
            if streak >= POWER_PATIENCE:
                return u, lam, it, change
        else:
            streak = 0
    raise ConvergenceError(
        f"inverse power iteration did not settle within {POWER_MAX_ITER} steps",
        POWER_MAX_ITER,
        lam,
        u,
    )


def _gradient_flow(disc, q, u0):
    """Semi-implicit normalized gradient flow on the positive cone.

    The stiffness part of each step is backward Euler, so the step size can
    sit at s = 1/lambda instead of the explicit-scheme O(h^2) ceiling.  The
    factored operator M + sK is reused while s stays within 25% of the value
    it was factored at; any stationary point solves K u = lam M u^(q-1)
    independently of s, so refactoring affects speed only.
    """
    h = disc.h
    n = disc.unknowns
    mass = sp.eye(n) * (h * h)
    u = np.maximum(u0, 0.0)
    u /= _lq_norm(u, q, h)
    lam = _energy(disc, u)

    s_fact = None
    solve = None
    streak = 0
    for it in range(1, FLOW_MAX_ITER + 1):
        s = 1.0 / lam
        if solve is None or abs(s - s_fact) > 0.25 * s_fact:
            stepper = (mass + disc.stiffness * s).tocsr()
            solve, _ = _linear_solver(stepper, n)
            s_fact = s
        g = np.where(u > 0.0, u ** (q - 1.0), 0.0)
        rhs = (h * h) * (u + s_fact * lam * g)
        u_new = np.maximum(solve(rhs), 0.0)
        norm = _lq_norm(u_new, q, h)
        if not (norm > 0.0):
            raise ConvergenceError("flow iterate collapsed to zero", it, lam, u)
        u_new /= norm
        lam_new = _energy(disc, u_new)
        change = abs(lam_new - lam) / lam_new
        u, lam = u_new, lam_new
        if change < FLOW_RTOL:
            streak += 1
            if streak >= FLOW_PATIENCE:
                return u, lam, it, change
        else:
            streak = 0
    raise ConvergenceError(
        f"gradient flow did not settle within {FLOW_MAX_ITER} steps",
        FLOW_MAX_ITER,
        lam,
        u,
    )


def _embed(disc, u, want_field):
    if not want_field:
        return None
    values = np.zeros(disc.mask.shape)
    values[disc.mask] = u
    bbox = (disc.xs[0], disc.ys[0], disc.xs[-1], disc.ys[-1])
    return GridField(bbox=bbox, h=disc.h, mask=disc.mask.copy(), values=values)


def _solve_polygon(poly: ConvexPolygon, q: float, h: float, want_field: bool):
    disc = _discretize(poly, h)
    n = disc.unknowns
    solve, backend = _linear_solver(disc.stiffness, n)
    hh = disc.h

    # Torsion solve doubles as initial guess for every other path: it is
    # strictly positive inside and already shaped like the ground state.
    rhs = (hh * hh) * np.ones(n)
    w = solve(rhs)
    lin_residual = float(
        np.linalg.norm(disc.stiffness @ w - rhs) / np.linalg.norm(rhs)
    )

    if q == 1.0:
        T = float(hh * hh * np.sum(w))
        u = w / (hh * hh * np.sum(np.abs(w)))  # unit L^1 norm
        lam, iters, residual = 1.0 / T, 1, lin_residual
        method = f"poisson/{backend}"
    elif q == 2.0:
        u, lam, iters, residual = _inverse_power(disc, solve, w)
        method = f"inverse-power/{backend}"
    else:
        u, lam, iters, residual = _gradient_flow(disc, q, w)
        method = f"flow/{backend}"

    return FrequencyResult(
        q=q,
        lam=lam,
        h=hh,
        iterations=iters,
        residual=residual,
        norm_check=_lq_norm(u, q, hh),
        method=method,
        unknowns=n,
        field=_embed(disc, u, want_field),
    )


def _ball_lambdas(ball: BallShape, q: float) -> tuple[float, float, float]:
    """(fine, coarse) radial values scaled to the ball radius, plus norm."""
    prof, lam_fine = onedim.ball_extremal(q, ball.dim, RADIAL_RESOLUTION)
    _, lam_coarse = onedim.ball_extremal(q, ball.dim, RADIAL_RESOLUTION // 2)
    scale = ball.radius ** (-(2.0 + (2.0 - q) * ball.dim / q))
    nsurf = ball.dim * onedim.unit_ball_volume(ball.dim)
    _, f_q = onedim.radial_factors(prof)
    return lam_fine * scale, lam_coarse * scale, nsurf * f_q


def _solve_ball(ball: BallShape, q: float) -> FrequencyResult:
    lam_fine, lam_coarse, norm_check = _ball_lambdas(ball, q)
    return FrequencyResult(
        q=q,
        lam=lam_fine,
        h=ball.radius / RADIAL_RESOLUTION,
        iterations=2,
        residual=abs(lam_fine - lam_coarse) / lam_fine,
        norm_check=norm_check,
        method="radial",
        unknowns=RADIAL_RESOLUTION,
    )


def _grid_aligned(shape, h: float) -> bool:
    """True when the shape boundary falls exactly on grid lines.

    Only axis-aligned rectangles whose sides are integer multiples of the
    spacing qualify; for them the masked grid is the classical five-point
    discretization with clean O(h^2) error, so refinement studies should use
    the second-order extrapolation weights.
    """
    if not isinstance(shape, ConvexPolygon) or shape.num_edges != 4:
        return False
    if np.max(np.abs(np.abs(shape.normals).max(axis=1) - 1.0)) > 1e-12:
        return False
    xmin, ymin, xmax, ymax = shape.bounding_box
    for span in (xmax - xmin, ymax - ymin):
        ratio = span / h
        if abs(ratio - round(ratio)) > 1e-9:
            return False
    return True


def _merge_union(parts: list[FrequencyResult], q: float) -> dict:
    return dict(
        q=q,
        lam=lambda_union(parts, q),
        h=max(p.h for p in parts),
        iterations=sum(p.iterations for p in parts),
        residual=max(p.residual for p in parts),
        norm_check=1.0,
        method="union[" + ",".join(p.method for p in parts) + "]",
        unknowns=sum(p.unknowns for p in parts),
    )


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------


def lambda_2q(shape, q: float, h: float | None = None, want_field: bool = False) -> FrequencyResult:
    """Principal frequency lambda_{2,q} of a shape.

    ``h`` requests a grid spacing (default: diameter/256); it is snapped so
    the short side of the bounding box is resolved exactly.  Balls bypass the
    grid entirely via the radial problem and the dilation law; disjoint
    unions are solved per part (each at its own default spacing when ``h`` is
    None) and merged with :func:`lambda_union`.  ``want_field`` attaches the
    minimizer as a :class:`GridField` on grid-solved shapes.
    """
    if not isinstance(shape, (BallShape, DisjointUnion, ConvexPolygon)):
        raise TypeError(f"unsupported shape type: {type(shape).__name__}")
    q = _validate_q(q, dim=shape.dimension)
    if isinstance(shape, BallShape):
        return _solve_ball(shape, q)
    if isinstance(shape, DisjointUnion):
        parts = [lambda_2q(p, q, h=h, want_field=False) for p in shape.parts]
        return FrequencyResult(**_merge_union(parts, q))
    return _solve_polygon(shape, q, _resolve_spacing(shape, h), want_field)


def torsion(shape, h: float | None = None) -> float:
    """Torsional rigidity T = 1/lambda_{2,1} (one Poisson solve on grids)."""
    return 1.0 / lambda_2q(shape, 1.0, h=h).lam


def lambda_union(parts, q: float) -> float:
    """Combine per-part frequencies into the frequency of a disjoint union.

    For 1 <= q < 2 mass splits across parts and the infimum works out to
    (sum lam_i^(-q/(2-q)))^(-(2-q)/q); at q = 1 this is the harmonic rule
    T = sum T_i.  For q >= 2 concentrating all mass on the best part is
    optimal, so the union value is min lam_i.  Near q = 2 the exponent
    -q/(2-q) diverges and the q < 2 formula tends to the min, so values of
    q within 1e-9 of 2 are routed to the min rule directly.
    """
    lams = [p.lam if isinstance(p, FrequencyResult) else float(p) for p in parts]
    if not lams:
        raise ValueError("cannot combine an empty list of parts")
    if any(not (l > 0.0) for l in lams):
        raise ValueError("part frequencies must be positive")
    q = float(q)
    if q >= 2.0 - 1e-9:
        return min(lams)
    inner = -q / (2.0 - q)
    return float(sum(l**inner for l in lams) ** (-(2.0 - q) / q))


def solve_with_study(shape, q: float, h: float | None = None) -> FrequencyResult:
    """Solve at two resolutions and return the extrapolated frequency.

    Grid shapes solve at h and h/2; the masked (staircase) boundary makes the
    leading error first order in h, so the limit estimate is 2 lam_{h/2} -
    lam_h.  Grid-aligned rectangles and balls (radial refinement) are cleanly
    second order and use the matching 4/3 - 1/3 weights instead.  The
    relative h-to-h/2 gap is stored as ``error_estimate``; it bounds the
    extrapolated error from above in both regimes.
    """
    q = _validate_q(q, dim=shape.dimension)
    if isinstance(shape, BallShape):
        lam_fine, lam_coarse, norm_check = _ball_lambdas(shape, q)
        base = _solve_ball(shape, q)
        lam_star = lam_fine + (lam_fine - lam_coarse) / 3.0
        return FrequencyResult(
            q=q,
            lam=lam_star,
            h=base.h,
            iterations=base.iterations,
            residual=base.residual,
            norm_check=norm_check,
            method="radial+richardson2",
            unknowns=base.unknowns,
            error_estimate=abs(lam_fine - lam_coarse) / lam_fine,
        )
    if isinstance(shape, DisjointUnion):
        parts = [solve_with_study(p, q, h=h) for p in shape.parts]
        merged = _merge_union(parts, q)
        merged["method"] = "union[" + ",".join(p.method for p in parts) + "]"
        merged["error_estimate"] = max(p.error_estimate for p in parts)
        return FrequencyResult(**merged)

    coarse = lambda_2q(shape, q, h=h)
    fine = lambda_2q(shape, q, h=coarse.h / 2.0)
    if _grid_aligned(shape, coarse.h):
        lam_star = fine.lam + (fine.lam - coarse.lam) / 3.0
        tag = "+richardson2"
    else:
        lam_star = 2.0 * fine.lam - coarse.lam
        tag = "+richardson"
    return FrequencyResult(
        q=q,
        lam=lam_star,
        h=fine.h,
        iterations=coarse.iterations + fine.iterations,
        residual=fine.residual,
        norm_check=fine.norm_check,
        method=fine.method + tag,
        unknowns=fine.unknowns,
        error_estimate=abs(fine.lam - coarse.lam) / fine.lam,
    )
