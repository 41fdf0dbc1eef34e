"""Sharp-inequality checks, scans, and certificate bounds for lambda_{2,q}.

Every check is a pure function of a shape's exact geometry (area, inradius)
and precomputed frequency values; each produces a :class:`BoundReport` with
the convention ``lhs <= rhs``, an absolute slack tolerance, and a three-way
verdict.  A violation smaller than the tolerance is reported as
``equality-within-tolerance`` rather than ``violated``, because a discrete
frequency carries discretization error and near-equality cases (balls, long
slabs) genuinely attain the bounds in the limit.

Checks implemented, by report id:

  * HPWEAK    lambda |Omega|^((2-q)/q) > (pi_{2,q} / 2R)^2      (1 <= q <= 2, convex)
  * HPWEAKUP  lambda |Omega|^((2-q)/q) <= omega_N^((2-q)/q) lambda(B_1)/R^2
  * FK        lambda >= lambda(B_1) (omega_N/|Omega|)^(2/N+(2-q)/q)
  * HP        lambda >= (pi / 2R)^2                              (q = 2, convex)
  * HPQ       positivity report of lambda R^(2+(2-q)N/q)         (q > 2; no
              sharp constant is known, so the normalized value is recorded)
  * BANALE    lambda <= lambda(B_1) / R^(2+(2-q)N/q)             (inball inclusion)
  * MPS_LOWER |Omega| R^2 / (N(N+2)) <= T
  * MPS_UPPER T < |Omega| R^2 / 3
  * BFNT_IMPROVED  lambda_{2,2} T / |Omega| >= (pi/2)^2 / (N(N+2))
  * CERTIFICATE    gauge-composed trial value <= rearranged HPWEAKUP rhs

plus the alpha-scan of scale-invariant products (2R)^beta lambda |Omega|^alpha
and the slab asymptotics tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import geometry, onedim, solver
from .geometry import BallShape, ConvexPolygon, DisjointUnion, unit_ball_volume
from .onedim import RadialProfile
from .solver import FrequencyResult

#: absolute slack floor added to every tolerance
ABS_TOL = 1e-9

HOLDS = "holds"
VIOLATED = "violated"
EQUALITY = "equality-within-tolerance"

__all__ = [
    "BoundReport",
    "ShapeGeometry",
    "AlphaScanResult",
    "SlabAsymptotics",
    "summarize",
    "poincare_constant",
    "ball_reference",
    "check_lower",
    "check_upper",
    "check_torsion_double",
    "check_classical",
    "check_bfnt",
    "certificate_upper",
    "alpha_scan",
    "slab_asymptotics",
]


@dataclass(frozen=True)
class BoundReport:
    """One checked inequality, oriented as lhs <= rhs."""

    inequality: str
    shape_id: str
    q: float
    lhs: float
    rhs: float
    slack: float
    slack_rel: float
    tolerance: float
    verdict: str

    def __post_init__(self) -> None:
        for name in ("lhs", "rhs", "slack", "slack_rel", "tolerance"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite in a report")
        if self.verdict == HOLDS and self.slack < -self.tolerance:
            raise ValueError("verdict 'holds' with slack below -tolerance")


def _report(inequality, shape_id, q, lhs, rhs, rel_tol) -> BoundReport:
    scale = max(abs(lhs), abs(rhs))
    tolerance = rel_tol * scale + ABS_TOL
    slack = rhs - lhs
    if slack > tolerance:
        verdict = HOLDS
    elif slack < -tolerance:
        verdict = VIOLATED
    else:
        verdict = EQUALITY
    slack_rel = slack / scale if scale > 0.0 else 0.0
    return BoundReport(
        inequality=inequality,
        shape_id=shape_id,
        q=float(q),
        lhs=float(lhs),
        rhs=float(rhs),
        slack=float(slack),
        slack_rel=float(slack_rel),
        tolerance=float(tolerance),
        verdict=verdict,
    )


# ---------------------------------------------------------------------------
# Exact geometric summary consumed by the checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShapeGeometry:
    shape_id: str
    dimension: int
    area: float
    inradius: float
    convex: bool
    is_ball: bool


def summarize(shape, shape_id: str = "shape") -> ShapeGeometry:
    """Exact geometric quantities of a shape, as the checks consume them.

    The inradius of a disjoint union is the largest part inradius (any
    inscribed ball must lie inside a single part).
    """
    if isinstance(shape, BallShape):
        return ShapeGeometry(shape_id, shape.dimension, shape.area, shape.radius, True, True)
    if isinstance(shape, ConvexPolygon):
        r = geometry.inradius(shape).inradius
        return ShapeGeometry(shape_id, 2, shape.area, r, True, False)
    if isinstance(shape, DisjointUnion):
        r = max(summarize(p).inradius for p in shape.parts)
        return ShapeGeometry(shape_id, shape.dimension, shape.area, r, False, False)
    raise TypeError(f"unsupported shape type: {type(shape).__name__}")


# ---------------------------------------------------------------------------
# Cached reference constants
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _pi2q(q: float) -> onedim.PoincareConstant:
    return onedim.pi_2q(q)


def poincare_constant(q: float) -> float:
    """pi_{2,q}, cached across checks."""
    return _pi2q(float(q)).value


@lru_cache(maxsize=None)
def ball_reference(q: float, dim: int) -> tuple[float, float]:
    """(lambda_{2,q}(B_1), relative error estimate), cached per (q, dim)."""
    res = solver.solve_with_study(BallShape(dim, 1.0), float(q))
    return res.lam, float(res.error_estimate)


def _rel_estimate(result: FrequencyResult) -> float:
    """Best available relative-error figure for a frequency value.

    Results from a refinement study carry an explicit estimate; plain solves
    fall back to the stopping residual, which only covers iteration error,
    so feed study results whenever the verdict matters.
    """
    if result.error_estimate is not None:
        return result.error_estimate
    return result.residual


def _scaling_exponent(q: float, dim: int) -> float:
    """Exponent k with lambda_{2,q}(t Omega) = t^(-k) lambda_{2,q}(Omega)."""
    return 2.0 + (2.0 - q) * dim / q


# ---------------------------------------------------------------------------
# Individual inequality checks
# ---------------------------------------------------------------------------


def check_lower(shape, q: float, lam: FrequencyResult, geom: ShapeGeometry) -> BoundReport:
    """Scale-free lower bound lambda |Omega|^((2-q)/q) > (pi_{2,q}/2R)^2.

    Convex shapes only, 1 <= q <= 2; for q > 2 no such bound can hold (long
    slabs drive the product to zero), so those inputs are rejected.
    The inequality is strict for every convex set, so the expected verdict
    is ``holds`` with positive slack that shrinks along the slab sequence.
    """
    q = float(q)
    if not (1.0 <= q <= 2.0):
        raise ValueError(f"the lower bound requires 1 <= q <= 2, got q = {q}")
    if not geom.convex:
        raise ValueError("the lower bound requires a convex shape")
    pi_q = _pi2q(q)
    lhs = (pi_q.value / (2.0 * geom.inradius)) ** 2
    rhs = lam.lam * geom.area ** ((2.0 - q) / q)
    rel_tol = _rel_estimate(lam) + 2.0 * pi_q.residual
    return _report("HPWEAK", geom.shape_id, q, lhs, rhs, rel_tol)


def check_upper(shape, q: float, lam: FrequencyResult, geom: ShapeGeometry) -> BoundReport:
    """Upper bound lambda |Omega|^((2-q)/q) <= omega_N^((2-q)/q) lambda(B_1)/R^2.

    Balls attain equality, reported as equality-within-tolerance.  Convexity
    is required only for q < 2; from q >= 2 on, the bound holds for any
    open set.
    """
    q = float(q)
    if q < 1.0:
        raise ValueError(f"exponent must satisfy q >= 1, got {q}")
    if q < 2.0 and not geom.convex:
        raise ValueError("the upper bound requires convexity when q < 2")
    lam_ball, ball_err = ball_reference(q, geom.dimension)
    omega = unit_ball_volume(geom.dimension)
    lhs = lam.lam * geom.area ** ((2.0 - q) / q)
    rhs = omega ** ((2.0 - q) / q) * lam_ball / geom.inradius**2
    rel_tol = _rel_estimate(lam) + ball_err
    return _report("HPWEAKUP", geom.shape_id, q, lhs, rhs, rel_tol)


def check_torsion_double(
    shape, geom: ShapeGeometry, T: float, rel_estimate: float = 0.0
) -> tuple[BoundReport, BoundReport]:
    """Two-sided torsion control |Omega| R^2/(N(N+2)) <= T < |Omega| R^2 / 3.

    The lower constant is attained exactly by balls; the upper one is
    approached (never attained) by long slabs.  ``rel_estimate`` is the
    relative discretization-error estimate of ``T``.
    """
    if not geom.convex:
        raise ValueError("the torsion double bound requires a convex shape")
    n = geom.dimension
    base = geom.area * geom.inradius**2
    lower = _report(
        "MPS_LOWER", geom.shape_id, 1.0, base / (n * (n + 2.0)), T, rel_estimate
    )
    upper = _report("MPS_UPPER", geom.shape_id, 1.0, T, base / 3.0, rel_estimate)
    return lower, upper


def check_classical(shape, q: float, lam: FrequencyResult, geom: ShapeGeometry) -> list[BoundReport]:
    """Volume and inradius controls: FK, BANALE, and HP (or HPQ) reports.

    FK bounds lambda from below through the volume; BANALE bounds it from
    above through the inscribed ball; for convex shapes and q = 2 the
    inradius lower bound HP applies, while for q > 2 the sharp constant is
    unknown and the HPQ report records the normalized value
    lambda R^(2+(2-q)N/q) against a trivial positivity threshold instead of
    asserting any constant.
    """
    q = float(q)
    n = geom.dimension
    lam_ball, ball_err = ball_reference(q, n)
    omega = unit_ball_volume(n)
    rel_tol = _rel_estimate(lam) + ball_err
    k = _scaling_exponent(q, n)

    fk = _report(
        "FK",
        geom.shape_id,
        q,
        lam_ball * (omega / geom.area) ** (2.0 / n + (2.0 - q) / q),
        lam.lam,
        rel_tol,
    )
    banale = _report(
        "BANALE", geom.shape_id, q, lam.lam, lam_ball / geom.inradius**k, rel_tol
    )
    out = [fk, banale]
    if geom.convex and q == 2.0:
        pi_q = _pi2q(2.0)
        out.append(
            _report(
                "HP",
                geom.shape_id,
                q,
                (pi_q.value / (2.0 * geom.inradius)) ** 2,
                lam.lam,
                _rel_estimate(lam) + 2.0 * pi_q.residual,
            )
        )
    elif geom.convex and q > 2.0:
        out.append(
            _report(
                "HPQ", geom.shape_id, q, 0.0, lam.lam * geom.inradius**k, _rel_estimate(lam)
            )
        )
    return out


def check_bfnt(
    shape, lambda2: FrequencyResult, T: float, geom: ShapeGeometry, rel_estimate: float = 0.0
) -> BoundReport:
    """Improved product bound lambda_{2,2} T / |Omega| >= (pi/2)^2 / (N(N+2)).

    In the plane the constant is pi^2/32.  ``lambda2`` must be a q = 2
    result; ``rel_estimate`` covers the error of ``T``.
    """
    if not geom.convex:
        raise ValueError("the product lower bound requires a convex shape")
    if lambda2.q != 2.0:
        raise ValueError("check_bfnt needs a q = 2 frequency result")
    n = geom.dimension
    lhs = (math.pi / 2.0) ** 2 / (n * (n + 2.0))
    rhs = lambda2.lam * T / geom.area
    return _report(
        "BFNT_IMPROVED", geom.shape_id, 2.0, lhs, rhs, _rel_estimate(lambda2) + rel_estimate
    )


# ---------------------------------------------------------------------------
# Certificate upper bound from the gauge-composed radial profile
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _ball_profile(q: float) -> RadialProfile:
    profile, _ = onedim.ball_extremal(q, 2)
    return profile


def certificate_upper(
    poly: ConvexPolygon,
    q: float,
    f: RadialProfile | None = None,
    shape_id: str = "polygon",
) -> tuple[float, BoundReport]:
    """Grid-free upper bound on lambda_{2,q}(poly) from a composed trial function.

    Composing the radial ball profile f with the polygon's Minkowski gauge
    gives an admissible trial function whose Rayleigh quotient factors into
    exact boundary sums times one-dimensional integrals:

        certificate = (F_D I_minus) / (F_q I_plus)^(2/q),

    with (F_D, F_q) the radial integrals of f and I_plus = sum b_i l_i,
    I_minus = sum l_i / b_i.  The value always dominates the true minimum.
    The polygon must sit with the origin at its Chebyshev center: then every
    offset satisfies b_i >= R, which gives I_minus <= I_plus / R^2 term by
    term, and with I_plus = N |Omega| the certificate is bounded by the
    rearranged ball-equality upper bound

        certificate <= omega_N^(2/q-1) |Omega|^(1-2/q) lambda_disc(B_1) / R^2,

    an exact chain at the shared quadrature (lambda_disc is the quotient of
    the very profile used).  That chain is returned as the CERTIFICATE
    report; only 1 <= q < 2 is accepted, matching where the construction is
    used.
    """
    q = float(q)
    if not (1.0 <= q < 2.0):
        raise ValueError(f"the certificate construction requires 1 <= q < 2, got {q}")
    if not isinstance(poly, ConvexPolygon):
        raise TypeError("certificate_upper needs a ConvexPolygon")
    inr = geometry.inradius(poly)
    scale = poly.diameter
    if float(np.max(np.abs(inr.center))) > 1e-9 * scale:
        raise ValueError(
            "polygon must be Chebyshev-centered at the origin "
            "(translate by -center first)"
        )

    profile = _ball_profile(q) if f is None else f
    if f is not None and (profile.q != q or profile.dimension != 2):
        raise ValueError("provided profile does not match q and dimension 2")

    f_dirichlet, f_mass = onedim.radial_factors(profile)
    integrals = geometry.boundary_integrals(poly)
    cert = (f_dirichlet * integrals.i_minus) / (f_mass * integrals.i_plus) ** (2.0 / q)

    omega = math.pi
    chain_rhs = (
        omega ** (2.0 / q - 1.0)
        * poly.area ** (1.0 - 2.0 / q)
        * profile.rayleigh
        / inr.inradius**2
    )
    report = _report("CERTIFICATE", shape_id, q, cert, chain_rhs, 0.0)
    return float(cert), report


# ---------------------------------------------------------------------------
# Alpha scan of scale-invariant products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaScanResult:
    """Values of (2R)^beta lambda |Omega|^alpha over a family, per alpha.

    beta = 2 - N (alpha - (2-q)/q) makes each product dilation-invariant;
    the inball diameter 2R is used as the length scale so that at the
    threshold alpha = (2-q)/q the slab values approach pi_{2,q}^2 exactly.
    ``trends`` classifies each alpha from the slab subfamily: values falling
    by >= 1.5x along the slabs mean the family infimum degenerates to zero
    (``vanishing``); rising by >= 1.5x means the supremum blows up
    (``blowing-up``); otherwise the product stays ``bounded-below-positive``.
    """

    q: float
    alphas: tuple[float, ...]
    shape_ids: tuple[str, ...]
    values: np.ndarray  # shape (len(alphas), len(shape_ids))
    minima: tuple[float, ...]
    maxima: tuple[float, ...]
    trends: tuple[str, ...]

    def __post_init__(self) -> None:
        self.values.setflags(write=False)
        if np.any(self.values <= 0.0) or not np.all(np.isfinite(self.values)):
            raise ValueError("scan values must be positive and finite")


def _slab_aspect(shape) -> float | None:
    """Aspect ratio of an axis-aligned rectangle, None for anything else."""
    if not isinstance(shape, ConvexPolygon) or shape.num_edges != 4:
        return None
    if np.max(np.abs(np.abs(shape.normals).max(axis=1) - 1.0)) > 1e-12:
        return None
    xmin, ymin, xmax, ymax = shape.bounding_box
    w, t = xmax - xmin, ymax - ymin
    aspect = max(w, t) / min(w, t)
    return aspect if aspect >= 1.5 else None


#: slab values must change by this factor before a trend is declared
TREND_FACTOR = 1.5


def _classify(slab_values: np.ndarray) -> str:
    v = slab_values
    tol = 1e-9 * float(np.max(v))
    decreasing = bool(np.all(np.diff(v) <= tol))
    increasing = bool(np.all(np.diff(v) >= -tol))
    if decreasing and v[0] >= TREND_FACTOR * v[-1]:
        return "vanishing"
    if increasing and v[-1] >= TREND_FACTOR * v[0]:
        return "blowing-up"
    return "bounded-below-positive"


def alpha_scan(family, q: float, alphas) -> AlphaScanResult:
    """Scan (2R)^beta lambda_{2,q} |Omega|^alpha over a shape family.

    ``family`` is a sequence of (shape_id, shape) or (shape_id, shape,
    FrequencyResult) entries; missing frequencies are computed with a
    refinement study.  The family must contain at least two axis-aligned
    rectangles of distinct aspect ratios — the slab subfamily that witnesses
    degeneration — or the trend classification would be meaningless.
    """
    q = float(q)
    entries = []
    for item in family:
        if len(item) == 2:
            sid, shape = item
            result = None
        else:
            sid, shape, result = item
        if result is None:
            result = solver.solve_with_study(shape, q)
        entries.append((str(sid), shape, result))
    if not entries:
        raise ValueError("cannot scan an empty family")

    dims = {shape.dimension for _, shape, _ in entries}
    if len(dims) != 1:
        raise ValueError("family members must share one dimension")
    n = dims.pop()

    alphas = tuple(float(a) for a in alphas)
    geoms = [summarize(shape, sid) for sid, shape, _ in entries]
    lams = np.array([r.lam for _, _, r in entries])
    areas = np.array([g.area for g in geoms])
    two_r = np.array([2.0 * g.inradius for g in geoms])

    slab_order = []
    for j, (_, shape, _) in enumerate(entries):
        aspect = _slab_aspect(shape)
        if aspect is not None:
            slab_order.append((aspect, j))
    slab_order.sort()
    if len(slab_order) < 2:
        raise ValueError("alpha scan needs at least two slabs in the family")
    slab_cols = [j for _, j in slab_order]

    values = np.empty((len(alphas), len(entries)))
    trends = []
    for i, alpha in enumerate(alphas):
        beta = 2.0 - n * (alpha - (2.0 - q) / q)
        values[i] = two_r**beta * lams * areas**alpha
        trends.append(_classify(values[i, slab_cols]))

    return AlphaScanResult(
        q=q,
        alphas=alphas,
        shape_ids=tuple(g.shape_id for g in geoms),
        values=values,
        minima=tuple(float(v) for v in values.min(axis=1)),
        maxima=tuple(float(v) for v in values.max(axis=1)),
        trends=tuple(trends),
    )


# ---------------------------------------------------------------------------
# Slab asymptotics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlabAsymptotics:
    """Normalized slab values against their predicted limit.

    For q <= 2 the normalized value is L^((2-q)/q) lambda(Omega_L), which
    must decrease monotonically to pi_{2,q}^2; ``gap`` is the relative
    distance of the last value from that limit.  For q > 2 the raw
    frequencies themselves stabilize at a positive level and ``gap`` is the
    relative change across the last refinement of L.  ``ok`` records whether
    the observed finite-L behaviour matches the prediction (monotone and
    gap < 10% in the first case, change < 2% in the second).
    """

    q: float
    lengths: tuple[float, ...]
    frequencies: tuple[float, ...]
    values: tuple[float, ...]
    limit: float | None
    monotone: bool
    gap: float
    ok: bool


def slab_asymptotics(q: float, lengths=(2.0, 4.0, 8.0, 16.0)) -> SlabAsymptotics:
    """Check the slab family against its predicted limiting behaviour."""
    q = float(q)
    Ls = tuple(sorted(float(L) for L in lengths))
    if len(Ls) < 2:
        raise ValueError("need at least two slab lengths")
    results = [solver.solve_with_study(geometry.rect_slab(L), q) for L in Ls]
    lams = tuple(r.lam for r in results)

    if q <= 2.0:
        values = tuple(L ** ((2.0 - q) / q) * lam for L, lam in zip(Ls, lams))
        limit = poincare_constant(q) ** 2
        diffs = np.diff(values)
        monotone = bool(np.all(diffs <= 1e-9 * max(values)))
        gap = (values[-1] - limit) / limit
        ok = monotone and abs(gap) < 0.10
        return SlabAsymptotics(q, Ls, lams, values, limit, monotone, float(gap), ok)

    values = lams
    diffs = np.diff(values)
    monotone = bool(np.all(diffs <= 1e-9 * max(values)))
    gap = abs(values[-1] - values[-2]) / values[-1]
    ok = gap < 0.02 and values[-1] > 0.0
    return SlabAsymptotics(q, Ls, lams, values, None, monotone, float(gap), ok)
