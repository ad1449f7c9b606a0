"""Barrier machinery for nonexistence and boundary-behavior checks.

The quantitative backbone is a pair of constants derived from the
exterior radial profile at the top eigenvalue lam1(n) outside a unit
ball: its peak radius R0 and the Lipschitz constant C of the profile
normalized to peak value 1 on [1, R0].  From these,

    C0 = 2C,   d0 = R0 - 1,   d1 = min(1/C0, d0)/2.

They control how fast a sup-normalized eigenfunction vanishing on the
boundary of a horoball must decay toward that boundary
(|u| <= C0 * dist * sup|u| within distance d0), which drives:

  * boundary_bound_check - nodewise verification of that inequality on
    discrete fields;
  * shrink_step - subtracting a scaled interior horoball profile from a
    normalized candidate supported in a depth band (0, d) produces a
    positive part supported in the strictly narrower band (0, d-delta);
  * nonexistence_pipeline - iterating the shrink until the band is
    narrower than d1, at which point the first eigenvalue of the thin
    band exceeds lam1(n) and no eigenvalue <= lam1(n) can survive;
  * parabola_barrier_check - the radial parabola barrier showing a
    nonzero hover level of an eigenfunction on a large ball is
    contradictory;
  * nonextendability_witness - the exterior horoball profile oscillates
    along sequences sliding to the tangency ideal point, so it has no
    continuous extension there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .disk import Field2D, Grid2D, build_grid, interpolate_field, solve_dirichlet
from .errors import ArgumentError, InvariantViolationError
from .geometry import (
    ExteriorHoroball,
    Horoannulus,
    Horoball,
    IdealPoint,
    Point,
    ball_dist_arr,
    busemann_arr,
    horosphere_point,
)
from .horo import exterior_horoball_eigen, exterior_peak_depth, horoball_eigen, \
    horoannulus_lambda1
from .radial import (
    EigenParams,
    evaluate,
    exterior_combination,
    find_peak,
    lambda1,
    solve_regular,
    solve_singular,
)

__all__ = [
    "BarrierConstants",
    "ShrinkReport",
    "ParabolaBarrier",
    "PipelineResult",
    "estimate_barrier_constants",
    "boundary_bound_check",
    "shrink_step",
    "nonexistence_pipeline",
    "parabola_coefficient",
    "parabola_barrier_check",
    "falsify_hovering",
    "nonextendability_witness",
    "tangential_sequence",
    "radial_sequence",
    "pipeline_report_rows",
]


@dataclass(frozen=True)
class BarrierConstants:
    """(R0, C, C0, d0, d1) for dimension n; see module docstring."""

    n: int
    R0: float
    C: float
    C0: float
    d0: float
    d1: float

    def __post_init__(self):
        if not (self.R0 > 1.0 and self.C > 0 and self.C0 > 0
                and self.d0 > 0 and self.d1 > 0):
            raise InvariantViolationError("barrier constants must be positive, R0 > 1")


@dataclass(frozen=True)
class ShrinkReport:
    d_in: float
    gamma1: float
    gamma2: float
    delta: float
    sup_u_tilde: float
    support_width_out: float
    passed: bool

    def __post_init__(self):
        if not (self.gamma1 <= self.gamma2 < 1.0):
            raise InvariantViolationError("need gamma1 <= gamma2 < 1")
        if not self.delta > 0.0:
            raise InvariantViolationError("delta must be positive")


@dataclass(frozen=True)
class ParabolaBarrier:
    """Radial parabola (L-eps) + Cp (r0^2 - dist^2) with maximal
    admissible Cp: Cp * (2 + (n-1) coth(r0) 2 r0) = lam (L-eps)."""

    center: Point
    r0: float
    L: float
    eps: float
    lam: float
    n: int

    @property
    def Cp(self) -> float:
        return parabola_coefficient(self.n, self.lam, self.r0, self.L, self.eps)


@lru_cache(maxsize=None)
def estimate_barrier_constants(n: int, _tol: float = 1e-11) -> BarrierConstants:
    """Compute (R0, C, C0, d0, d1) from the exterior profile at lam1(n)
    outside a unit ball.  C is realized as max |w'| of the peak-normalized
    profile on a mesh of spacing 1e-4 over [1, R0]."""
    if int(n) != n or n < 2:
        raise ArgumentError("n must be an integer >= 2")
    params = EigenParams(int(n), lambda1(int(n)))
    reg = solve_regular(params, 12.0, _tol)
    sing = solve_singular(params, 1e-3, 12.0, _tol)
    ext = exterior_combination(reg, sing, 1.0)
    R0 = find_peak(ext)
    # sup-normalization of the exterior profile already gives w(R0) = 1
    mesh = np.arange(1.0, R0, 1e-4)
    mesh = np.append(mesh, R0)
    C = float(np.abs(evaluate(ext, mesh, derivative=True)).max())
    C0 = 2.0 * C
    d0 = R0 - 1.0
    d1 = 0.5 * min(1.0 / C0, d0)
    return BarrierConstants(n=int(n), R0=R0, C=C, C0=C0, d0=d0, d1=d1)


def _node_depths(grid: Grid2D, B) -> np.ndarray:
    depth = busemann_arr(grid.xy, B.xi.direction) - B.level
    if isinstance(B, ExteriorHoroball):
        depth = -depth
    return depth


def boundary_bound_check(fld: Field2D, B, consts: BarrierConstants,
                         return_margin: bool = False):
    """Check |u(x)| <= (C0 * dist(x, boundary horosphere) + 10 h^2) * sup|u|
    at every node with dist <= d0.  Scale-invariant in u."""
    if not isinstance(B, (Horoball, ExteriorHoroball)):
        raise ArgumentError("expected a horoball or exterior-horoball domain")
    depth = _node_depths(fld.grid, B)
    sup = fld.sup()
    slack = 10.0 * fld.grid.h ** 2
    mask = depth <= consts.d0
    if sup == 0.0 or not np.any(mask):
        return (True, np.inf) if return_margin else True
    bound = (consts.C0 * depth[mask] + slack) * sup
    margin = float((bound - np.abs(fld.values[mask])).min())
    ok = bool(margin >= 0.0)
    return (ok, margin) if return_margin else ok


def shrink_step(fld: Field2D, d: float, B: Horoball, consts: BarrierConstants,
                lam: float):
    """One band-narrowing step applied to a normalized candidate.

    Subtracts the interior horoball profile of the enlarged horoball
    (bounding horosphere pushed out by one unit), scaled by its value at
    depth d+2, from the sup-normalized candidate; reports the resulting
    positive part, its support width in depth, and whether the width
    shrank to at most d - delta (slack 10 h^2).

    Returns (report, positive-part field) so the step can be iterated.
    """
    if not d > consts.d1:
        raise ArgumentError("shrink step requires d > d1")
    sup = fld.sup()
    if sup <= 0.0:
        raise ArgumentError("candidate has sup = 0")
    params = EigenParams(2, lam)
    v = lambda t: horoball_eigen(params, t, 1.0)
    gamma1 = v(1.0) / v(d + 2.0)
    gamma2 = v(d + 1.0) / v(d + 2.0)
    delta = 0.5 * min(consts.d0, gamma1 / consts.C0)
    depth = _node_depths(fld.grid, B)
    u0 = fld.values / sup
    v0 = v(np.maximum(depth, 0.0) + 1.0) / v(d + 2.0)
    u_tilde = np.maximum(u0 - v0, 0.0)
    supp = u_tilde > 0.0
    width = float(depth[supp].max()) if np.any(supp) else 0.0
    sup_t = float(u_tilde.max())
    slack = 10.0 * fld.grid.h ** 2
    passed = bool(width <= d - delta + slack)
    report = ShrinkReport(
        d_in=d, gamma1=float(gamma1), gamma2=float(gamma2), delta=float(delta),
        sup_u_tilde=sup_t, support_width_out=width, passed=passed,
    )
    new_fld = Field2D(fld.grid, u_tilde, lam, fld.residual_norm,
                      np.zeros_like(fld.boundary_values))
    return report, new_fld


@dataclass(eq=False)
class PipelineResult:
    iterations: list
    certificate: dict
    ok: bool
    candidate_info: dict


def _bump_source(grid: Grid2D, B: Horoball, depth0: float, width: float,
                 amp: float) -> np.ndarray:
    """Compactly supported bump centered on the axis at the given depth."""
    center = horosphere_point(B, depth0, math.pi)  # diametrically opposite xi
    # pi gives the point of the horosphere farthest from xi, i.e. on the axis
    r = ball_dist_arr(grid.xy, center.coords)
    prof = np.exp(-(r / width) ** 2) - math.exp(-9.0)
    return amp * np.maximum(prof, 0.0)


def nonexistence_pipeline(n: int = 2, lam: float = 0.25, d_bar: float = 2.0,
                          h: float = 0.01, source_depth: Optional[float] = None,
                          source_width: Optional[float] = None,
                          amp: float = 1.0,
                          max_iter: Optional[int] = None) -> PipelineResult:
    """Numerical re-enactment of the horoball nonexistence argument.

    A synthetic candidate is manufactured in the band (0, d_bar): the
    discrete solution of the eigenvalue equation with a compact interior
    source placed at shallow depth and zero Dirichlet data on every
    boundary face, sup-normalized.  shrink_step is iterated until the
    support band is narrower than d1; the run ends with the thin-band
    certificate lambda1(band) > lam1(n) >= lam.  Any failed inequality is
    surfaced in the report rather than repaired.
    """
    if n != 2:
        raise ArgumentError("the grid pipeline is implemented for n = 2")
    if not 0.0 <= lam <= 0.25:
        raise ArgumentError("lam must lie in [0, 1/4] for n = 2")
    if not d_bar > 0:
        raise ArgumentError("d_bar must be positive")
    consts = estimate_barrier_constants(2)
    iterations = []
    info = {"d_bar": d_bar, "lam": lam, "h": h}
    if d_bar <= consts.d1:
        width = d_bar
        cert = _certificate(n, width, lam)
        return PipelineResult(iterations, cert, True, info)

    xi = IdealPoint(np.array([1.0, 0.0]))
    B = Horoball(xi, 0.0)
    annulus = Horoannulus(xi, 0.0, 0.0, d_bar)
    grid = build_grid(annulus, math.inf, Point(np.zeros(2)), h)
    if source_depth is None:
        source_depth = 0.3 * consts.d1
        if d_bar > consts.d0:
            source_depth = min(source_depth, 0.5 * (d_bar - consts.d0))
    if source_width is None:
        room = d_bar - consts.d0 - source_depth
        source_width = min(0.08, max(0.02, room / 4.0)) if room > 0 else 0.05
    info.update(source_depth=source_depth, source_width=source_width)
    src = _bump_source(grid, B, source_depth, source_width, amp)
    fld = solve_dirichlet(grid, lam, 0.0, source=src)
    if fld.sup() <= 0.0:
        raise ArgumentError("synthetic candidate vanished; enlarge the source")

    d = d_bar
    if max_iter is None:
        max_iter = 10 * int(math.ceil((d_bar - consts.d1) / 1e-3)) + 10
    ok = True
    for _ in range(max_iter):
        report, fld = shrink_step(fld, d, B, consts, lam)
        iterations.append(report)
        if not report.passed:
            ok = False
            break
        if fld.sup() <= 0.0:
            ok = False
            break
        d = report.support_width_out
        if d <= consts.d1:
            break
    else:
        ok = False
    width = iterations[-1].support_width_out if iterations else d_bar
    cert = _certificate(n, max(width, 1e-12), lam) if ok else {
        "certificate": "falsification-attempt",
        "lambda1_annulus": float("nan"),
    }
    return PipelineResult(iterations, cert, ok, info)


def _certificate(n: int, width: float, lam: float) -> dict:
    lam1_band = horoannulus_lambda1(n, width)
    if not lam1_band > lambda1(n) >= lam:
        raise InvariantViolationError("thin-band certificate inequality failed")
    return {"certificate": "thin-annulus", "lambda1_annulus": lam1_band}


def pipeline_report_rows(result: PipelineResult) -> list:
    """JSON-ready rows: one object per iteration plus the terminal
    certificate object."""
    rows = [
        {
            "d": it.d_in,
            "gamma1": it.gamma1,
            "delta": it.delta,
            "sup_u_tilde": it.sup_u_tilde,
            "width": it.support_width_out,
            "passed": it.passed,
        }
        for it in result.iterations
    ]
    rows.append(result.certificate)
    return rows


# ---------------------------------------------------------------------------
# parabola barrier (hover falsification)

def parabola_coefficient(n: int, lam: float, r0: float, L: float,
                         eps: float) -> float:
    """Largest Cp with Cp [2 + (n-1) coth(r0) 2 r0] <= lam (L - eps)."""
    if lam * (L - eps) <= 0.0:
        raise ArgumentError("need lam (L - eps) > 0 for an admissible barrier")
    denom = 2.0 + (n - 1) * (1.0 / math.tanh(r0)) * 2.0 * r0
    return lam * (L - eps) / denom


def parabola_barrier_check(fld: Field2D, x_k: Point, r0: float, L: float,
                           eps: float, lam: float) -> bool:
    """Assuming the field hovers in (L-eps, L+eps) on the ball B_r0(x_k),
    check the barrier conclusion field(x_k) > L - eps + Cp r0^2 - 10 h^2.

    Raises if the hovering premise fails on the sampled nodes.
    """
    Cp = parabola_coefficient(2, lam, r0, L, eps)
    g = fld.grid
    dist = ball_dist_arr(g.xy, x_k.coords)
    ball = dist <= r0
    if not np.any(ball):
        raise ArgumentError("no grid node inside the ball")
    vals = fld.values[ball]
    if not (np.all(vals > L - eps) and np.all(vals < L + eps)):
        raise ArgumentError("field does not hover in (L-eps, L+eps) on the ball")
    center_val = float(interpolate_field(fld, x_k.coords[None, :])[0])
    return bool(center_val > L - eps + Cp * r0**2 - 10.0 * g.h**2)


def falsify_hovering(fld: Field2D, x_k: Point, r0: float, L: float,
                     lam: float) -> dict:
    """Show that the field cannot hover near level L on B_r0(x_k).

    Either the hovering premise already fails on the sampled ball, or it
    holds with eps in the contradiction regime eps < Cp r0^2 / 2 and the
    barrier conclusion clashes with the hover ceiling.  Nonpositive
    levels are excluded directly for nonnegative fields.
    """
    g = fld.grid
    absL = abs(L)
    if absL <= 0.0:
        raise ArgumentError("level L must be nonzero")
    dist = ball_dist_arr(g.xy, x_k.coords)
    ball = dist <= r0
    vals = fld.values[ball]
    out = {"L": L, "r0": r0, "n_ball_nodes": int(ball.sum())}
    if L < 0.0:
        eps = 0.5 * absL
        holds = bool(np.all(vals > L - eps) and np.all(vals < L + eps))
        out.update(eps=eps, premise_holds=holds,
                   falsified=not holds, reason="negative level vs nonnegative field")
        return out
    denom = 2.0 + (2 - 1) * (1.0 / math.tanh(r0)) * 2.0 * r0
    # eps below Cp(eps) r0^2 / 2 solved for the maximal admissible Cp
    eps = 0.9 * lam * L * r0**2 / (2.0 * denom + 0.9 * lam * r0**2)
    Cp = parabola_coefficient(2, lam, r0, L, eps)
    assert eps < 0.5 * Cp * r0**2
    premise = bool(np.all(vals > L - eps) and np.all(vals < L + eps))
    out.update(eps=eps, Cp=Cp, premise_holds=premise)
    if not premise:
        out.update(falsified=True, reason="field leaves the hover band on the ball")
        return out
    conclusion = parabola_barrier_check(fld, x_k, r0, L, eps, lam)
    ceiling = float(interpolate_field(fld, x_k.coords[None, :])[0]) < L + eps
    out.update(barrier_conclusion=conclusion, ceiling=ceiling,
               falsified=bool(conclusion and ceiling),
               reason="barrier conclusion contradicts the hover ceiling")
    return out


# ---------------------------------------------------------------------------
# non-extendability witness at the tangency ideal point

def tangential_sequence(B, depths: Sequence[float], n: int,
                        angle0: float = 0.5, shrink: float = 0.5) -> list:
    """Points with the prescribed exterior distances to the bounding
    horosphere, sliding toward the tangency ideal point."""
    pts = []
    hb = Horoball(B.xi, B.level) if isinstance(B, ExteriorHoroball) else B
    for k, dk in enumerate(depths):
        pts.append(horosphere_point(hb, -float(dk), angle0 * shrink**k))
    return pts


def radial_sequence(B, depths: Sequence[float]) -> list:
    """Points marching away from the horoball along the axis, i.e. toward
    ideal points other than the tangency point."""
    hb = Horoball(B.xi, B.level) if isinstance(B, ExteriorHoroball) else B
    return [horosphere_point(hb, -float(dk), math.pi) for dk in depths]


def nonextendability_witness(n: int, lam: float, tangential: Sequence[Point],
                             B=None, radial: Optional[Sequence[Point]] = None,
                             C: float = 1.0) -> dict:
    """Evaluate the exterior horoball profile along a sequence converging
    to the tangency ideal point with alternating distances.

    The witness passes when the oscillation (max - min of the sampled
    values) is at least half the profile's peak value while the points
    converge in model coordinates; the profile therefore admits no
    continuous extension at that ideal point.  An optional radial
    sequence toward other ideal points documents decay to zero instead.
    """
    if B is None:
        xi = np.zeros(n)
        xi[0] = 1.0
        B = ExteriorHoroball(IdealPoint(xi), 0.0)
    params = EigenParams(n, lam)
    pts = list(tangential)
    if len(pts) < 4:
        raise ArgumentError("need at least four points in the sequence")
    coords = np.array([p.coords for p in pts])
    norms = np.linalg.norm(coords, axis=1)
    xi_dir = B.xi.direction
    gaps = np.linalg.norm(coords - xi_dir, axis=1)
    if not (norms[-1] > 1.0 - 1e-3 and gaps[-1] < 1e-2
            and np.all(np.diff(gaps) < 0.0)):
        raise ArgumentError("sequence does not converge to the ideal tangency point")
    depths = -(busemann_arr(coords, xi_dir) - B.level)
    if np.any(depths <= 0.0):
        raise ArgumentError("tangential points must lie outside the horoball")
    values = exterior_horoball_eigen(params, depths, C)
    oscillation = float(values.max() - values.min())
    d_star = exterior_peak_depth(params)
    peak_value = float(exterior_horoball_eigen(params, d_star, C))
    passed = bool(oscillation >= 0.5 * peak_value)
    out = {
        "oscillation": oscillation,
        "peak_depth": d_star,
        "peak_value": peak_value,
        "passed": passed,
        "depths": np.asarray(depths),
        "values": np.asarray(values),
    }
    if radial is not None:
        rc = np.array([p.coords for p in radial])
        rd = -(busemann_arr(rc, xi_dir) - B.level)
        if np.any(np.diff(rd) <= 0.0):
            raise ArgumentError("radial sequence must have increasing distances")
        rv = exterior_horoball_eigen(params, rd, C)
        out["radial_depths"] = rd
        out["radial_values"] = np.asarray(rv)
        out["radial_final"] = float(rv[-1])
    return out
