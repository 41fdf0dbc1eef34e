"""One-dimensional variational problems behind the planar bounds.

Three minimizations live here, all discretized with central differences and
trapezoid quadrature on uniform grids:

  * pi_2q: the Poincare-Sobolev constant on (0, 1) with zero endpoints,
        pi_{2,q} = min |phi'|_{L^2} / |phi|_{L^q},
    with pi_{2,1} = 2 sqrt(3) and pi_{2,2} = pi as closed-form anchors.
  * mixed_profile: the same quotient on (-1, 0) with phi(-1) = 0 and a free
    right endpoint; the minimum equals (pi_{2,q} / 2)^2 and the minimizer is
    non-decreasing with zero derivative at the free end.
  * ball_extremal: the radial reduction of lambda_{2,q} on the unit ball,
    a t^(N-1)-weighted quotient over profiles with f(1) = 0 and f'(0) = 0.

Minimizers are found by a normalized gradient flow on the unit L^q sphere.
The stiffness term is treated backward-Euler (one symmetric tridiagonal
solve per step) so the step size is O(1) instead of O(h^2); positivity is
kept by projection and the iterate is renormalized after every step.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import solveh_banded

from .geometry import unit_ball_volume

#: stop once the relative Rayleigh-quotient change stays below this
FLOW_RTOL = 1e-12
#: for this many consecutive steps
FLOW_PATIENCE = 6
FLOW_MAX_ITER = 1_000_000


class ConvergenceError(RuntimeError):
    """Flow failed to settle; carries the last iterate for diagnosis."""

    def __init__(self, message: str, iterations: int, last_value: float, last_profile):
        super().__init__(message)
        self.iterations = iterations
        self.last_value = last_value
        self.last_profile = last_profile


@dataclass(frozen=True)
class PoincareConstant:
    q: float
    value: float
    resolution: int
    residual: float


@dataclass(frozen=True)
class RadialProfile:
    """Sampled extremal profile on a 1D domain.

    ``normalization`` records the norm that was fixed during minimization,
    e.g. ("Lq", 1.0); ``rayleigh`` is the quotient attained by the samples.
    """

    domain: tuple[float, float]
    samples: np.ndarray
    q: float
    dimension: int
    normalization: tuple[str, float]
    rayleigh: float

    def __post_init__(self) -> None:
        self.samples.setflags(write=False)
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("profile samples must be finite")


def _validate_q(q: float, dim: int = 1) -> float:
    q = float(q)
    if not (1.0 <= q < 100.0):
        raise ValueError(f"exponent q must lie in [1, 100), got {q}")
    if q > 10.0:
        warnings.warn(f"q = {q} is far outside the calibrated range", stacklevel=3)
    if dim >= 3:
        q_star = 2.0 * dim / (dim - 2.0)
        if q >= q_star:
            raise ValueError(
                f"q = {q} reaches the critical exponent {q_star} in dimension {dim}"
            )
    return q


# ---------------------------------------------------------------------------
# Normalized gradient flow on tridiagonal problems
# ---------------------------------------------------------------------------


def _flow(
    c_edges: np.ndarray,
    d_fixed: np.ndarray,
    w: np.ndarray,
    q: float,
    u0: np.ndarray,
    rtol: float = FLOW_RTOL,
    patience: int = FLOW_PATIENCE,
    max_iter: int = FLOW_MAX_ITER,
) -> tuple[np.ndarray, float, int]:
    """Minimize  D(u) / (sum w |u|^q)^(2/q)  over the positive cone.

    D(u) = sum_e c_e (u_i - u_{i+1})^2 + sum_i d_i u_i^2, where c_edges are
    weights of edges between consecutive free nodes and d_fixed collects
    edges to Dirichlet boundary nodes.  Summing squared differences (rather
    than expanding u^T K u) keeps the quotient free of cancellation noise.
    Returns (minimizer with unit weighted L^q norm, quotient, iterations).
    """
    k_diag = d_fixed.copy()
    k_diag[:-1] += c_edges
    k_diag[1:] += c_edges
    k_off = -c_edges

    def mass(u: np.ndarray) -> float:
        return float(np.sum(w * np.abs(u) ** q))

    def energy(u: np.ndarray) -> float:
        return float(np.sum(c_edges * np.diff(u) ** 2) + np.sum(d_fixed * u * u))

    u = np.maximum(u0, 0.0)
    u /= mass(u) ** (1.0 / q)
    lam = energy(u)

    ab = np.zeros((2, len(u)))
    streak = 0
    for it in range(1, max_iter + 1):
        s = 1.0 / lam
        ab[0, 1:] = s * k_off
        ab[1, :] = w + s * k_diag
        g = np.where(u > 0.0, u ** (q - 1.0), 0.0)
        rhs = w * (u + s * lam * g)
        u_new = solveh_banded(ab, rhs)
        u_new = np.maximum(u_new, 0.0)
        m = mass(u_new)
        if not (m > 0.0):
            raise ConvergenceError("iterate collapsed to zero", it, lam, u)
        u_new /= m ** (1.0 / q)
        lam_new = energy(u_new)
        change = abs(lam_new - lam) / max(abs(lam_new), 1e-300)
        u, lam = u_new, lam_new
        if change < rtol:
            streak += 1
            if streak >= patience:
                return u, lam, it
        else:
            streak = 0
    raise ConvergenceError(
        f"no convergence within {max_iter} iterations", max_iter, lam, u
    )


# ---------------------------------------------------------------------------
# Flat problems on an interval
# ---------------------------------------------------------------------------


def _flat_minimum(q: float, n: int, right_free: bool) -> tuple[np.ndarray, float, int]:
    """Discrete minimum of |phi'|^2 / |phi|_q^2 on a unit-length interval.

    Dirichlet at the left endpoint always; the right endpoint is free when
    ``right_free`` (natural boundary condition), Dirichlet otherwise.
    Returns (full sample vector including fixed endpoints, quotient, iters).
    """
    if n < 8:
        raise ValueError("resolution too coarse, need n >= 8")
    h = 1.0 / n
    nfree = n if right_free else n - 1

    c_edges = np.full(nfree - 1, 1.0 / h)
    d_fixed = np.zeros(nfree)
    d_fixed[0] = 1.0 / h  # edge to the left Dirichlet node
    if not right_free:
        d_fixed[-1] = 1.0 / h  # edge to the right Dirichlet node

    w = np.full(nfree, h)
    if right_free:
        w[-1] = h / 2.0  # trapezoid half-weight at the free endpoint

    t = np.arange(1, nfree + 1) * h
    u0 = np.sin(0.5 * math.pi * t) if right_free else np.sin(math.pi * t)

    u, lam, iters = _flow(c_edges, d_fixed, w, q, u0)
    full = np.zeros(n + 1)
    full[1 : nfree + 1] = u
    return full, lam, iters


def pi_2q(q: float, n: int = 4096) -> PoincareConstant:
    """Poincare-Sobolev constant pi_{2,q} on (0, 1) with zero endpoints.

    Computed at resolutions n/2 and n; the reported residual is the relative
    gap between the two, a direct refinement-consistency certificate.
    """
    q = _validate_q(q)
    _, lam_coarse, _ = _flat_minimum(q, max(n // 2, 8), right_free=False)
    _, lam_fine, _ = _flat_minimum(q, n, right_free=False)
    value = math.sqrt(lam_fine)
    residual = abs(value - math.sqrt(lam_coarse)) / value
    return PoincareConstant(q=q, value=value, resolution=n, residual=residual)


def mixed_profile(q: float, n: int = 4096) -> RadialProfile:
    """Minimizer of the quotient on (-1, 0) with phi(-1) = 0, free right end.

    The attained minimum (the ``rayleigh`` field) equals (pi_{2,q}/2)^2.  The
    profile is non-decreasing; if the raw minimizer wobbles at float level it
    is replaced by its monotone rearrangement (cumulative |phi'|), which
    leaves the Dirichlet energy unchanged and cannot shrink the L^q norm.
    """
    q = _validate_q(q)
    full, lam, _ = _flat_minimum(q, n, right_free=True)
    h = 1.0 / n
    if np.any(np.diff(full) < -1e-12 * full.max()):
        mono = np.concatenate(([0.0], np.cumsum(np.abs(np.diff(full)))))
        wts = np.full(n + 1, h)
        wts[0] = wts[-1] = h / 2.0
        mono /= np.sum(wts * mono**q) ** (1.0 / q)
        full = mono
    full = full.copy()
    full[0] = 0.0
    return RadialProfile(
        domain=(-1.0, 0.0),
        samples=full,
        q=q,
        dimension=1,
        normalization=("Lq", 1.0),
        rayleigh=lam,
    )


# ---------------------------------------------------------------------------
# Radial problem on the unit ball
# ---------------------------------------------------------------------------


def ball_extremal(q: float, dim: int, n: int = 2048) -> tuple[RadialProfile, float]:
    """lambda_{2,q} of the unit ball via its radial profile.

    Minimizes
        N omega_N int |f'|^2 t^(N-1) dt / (N omega_N int f^q t^(N-1) dt)^(2/q)
    over profiles with f(1) = 0.  The weight t^(N-1) is evaluated at edge
    midpoints, which keeps the t = 0 end nondegenerate and leaves the left
    endpoint naturally free (discrete f'(0) = 0).  Returns (profile, lambda).
    """
    if dim < 2:
        raise ValueError("ball dimension must be >= 2")
    q = _validate_q(q, dim=dim)
    if n < 16:
        raise ValueError("resolution too coarse, need n >= 16")

    h = 1.0 / n
    nsurf = dim * unit_ball_volume(dim)
    t = np.arange(n + 1) * h
    mid = (0.5 * (t[:-1] + t[1:])) ** (dim - 1)

    # free nodes 0..n-1; node n carries f(1) = 0
    edge_w = nsurf * mid / h
    c_edges = edge_w[:-1]
    d_fixed = np.zeros(n)
    d_fixed[-1] = edge_w[-1]  # edge to the fixed f(1) = 0 node

    w = nsurf * h * t[:-1] ** (dim - 1)
    w[0] = nsurf * (h / 2.0) * t[0] ** (dim - 1)  # zero for dim >= 2

    u0 = 1.0 - t[:-1] ** 2
    u, lam, _ = _flow(c_edges, d_fixed, w, q, u0)

    full = np.zeros(n + 1)
    full[:n] = u
    if np.any(np.diff(full) > 1e-12 * full.max()):
        mono = np.cumsum(np.abs(np.diff(full))[::-1])[::-1]
        mono = np.concatenate((mono, [0.0]))
        mono /= (np.sum(w * mono[:-1] ** q)) ** (1.0 / q)
        full = mono
    full[-1] = 0.0
    profile = RadialProfile(
        domain=(0.0, 1.0),
        samples=full,
        q=q,
        dimension=dim,
        normalization=("Lq", 1.0),
        rayleigh=lam,
    )
    return profile, lam


def radial_factors(profile: RadialProfile) -> tuple[float, float]:
    """Plain (unweighted by N omega_N) radial integrals of a ball profile.

    Returns (int |f'|^2 t^(N-1) dt, int f^q t^(N-1) dt) using the same
    midpoint/trapezoid rules as the minimization, so downstream consumers
    stay quadrature-consistent with the reported rayleigh value.
    """
    f = profile.samples
    n = len(f) - 1
    h = 1.0 / n
    dim = profile.dimension
    t = np.arange(n + 1) * h
    mid = (0.5 * (t[:-1] + t[1:])) ** (dim - 1)
    dirichlet = float(np.sum((np.diff(f) / h) ** 2 * mid * h))
    lq = float(np.sum(np.abs(f[:-1]) ** profile.q * t[:-1] ** (dim - 1) * h))
    return dirichlet, lq


# ---------------------------------------------------------------------------
# Monotone-integral comparison
# ---------------------------------------------------------------------------


class ComparisonResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def chebyshev_like_check(xi, psi, a: float) -> ComparisonResult:
    """Check  int_0^a xi' psi dt <= (xi(a)/a) int_0^a psi dt  on sampled data.

    Requires xi(0) = 0 with xi(t)/t non-decreasing and psi nonnegative and
    non-increasing, both sampled on the same uniform grid over [0, a].  Both
    sides use the identical trapezoid weights for psi, which makes the
    discrete inequality exact up to rounding (Abel summation mirrors the
    continuum proof), hence the 1e-9 slack.  Precondition violations raise
    ValueError; they are never reported as a failed inequality.
    """
    xi = np.asarray(xi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if xi.shape != psi.shape or xi.ndim != 1 or len(xi) < 2:
        raise ValueError("xi and psi must be equal-length 1D samples")
    if not (a > 0):
        raise ValueError("interval length a must be positive")
    if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(psi))):
        raise ValueError("samples must be finite")

    scale_xi = max(float(np.max(np.abs(xi))), 1.0)
    scale_psi = max(float(np.max(np.abs(psi))), 1.0)
    if abs(xi[0]) > 1e-12 * scale_xi:
        raise ValueError("xi must vanish at t = 0")
    t = np.linspace(0.0, a, len(xi))
    ratios = xi[1:] / t[1:]
    if np.any(np.diff(ratios) < -1e-9 * scale_xi / a):
        raise ValueError("xi(t)/t must be non-decreasing")
    if np.any(psi < -1e-12 * scale_psi):
        raise ValueError("psi must be nonnegative")
    if np.any(np.diff(psi) > 1e-12 * scale_psi):
        raise ValueError("psi must be non-increasing")

    c = 0.5 * (psi[:-1] + psi[1:])
    dt = a / (len(xi) - 1)
    lhs = float(np.sum(np.diff(xi) * c))
    rhs = float(xi[-1] / a * np.sum(dt * c))
    return ComparisonResult(lhs, rhs, bool(lhs <= rhs + 1e-9))
