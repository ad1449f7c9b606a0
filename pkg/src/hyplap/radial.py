"""Radial eigenfunction profiles on hyperbolic space.

A radially symmetric eigenfunction u(r) of -Laplacian with eigenvalue
lam satisfies

    u'' + (n-1) coth(r) u' + lam u = 0,        r = distance to the center,

for 0 <= lam <= (n-1)^2/4 (the bottom of the spectrum of H^n).  Three
profiles are produced here:

  * the regular solution, bounded at r=0 and normalized u(0)=1;
  * the singular solution, blowing up like r^(2-n) (n>=3) or -log r
    (n=2) with leading coefficient 1, chosen as the branch that decays
    at infinity (the Green's-function branch);
  * exterior combinations alpha*u + beta*v vanishing at a given radius
    R and positive outside, normalized to sup 1.

Solutions are stored as dense sampled profiles (values + derivatives)
with a cubic Hermite interpolant for evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .errors import ArgumentError, InvariantViolationError, NumericalError

__all__ = [
    "EigenParams",
    "RadialSolution",
    "lambda1",
    "solve_regular",
    "solve_singular",
    "exterior_combination",
    "find_peak",
    "decay_fit",
    "evaluate",
    "ode_residual_midpoints",
    "residual_tolerance",
]

_EPS_LAUNCH = 1e-4  # series launch radius for the regular solution


def lambda1(n: int) -> float:
    """Bottom of the L^2 spectrum of the Laplacian on H^n."""
    return (n - 1) ** 2 / 4.0


@dataclass(frozen=True)
class EigenParams:
    """Dimension and eigenvalue, restricted to 0 <= lam <= (n-1)^2/4."""

    n: int
    lam: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ArgumentError("n must be an integer >= 2")
        object.__setattr__(self, "n", int(self.n))
        if not 0.0 <= self.lam <= lambda1(self.n):
            raise ArgumentError(
                f"lambda must lie in [0, {lambda1(self.n)}], got {self.lam}"
            )

    @property
    def mu(self) -> float:
        """sqrt((n-1)^2 - 4 lam), the spectral gap parameter."""
        return math.sqrt(max((self.n - 1) ** 2 - 4.0 * self.lam, 0.0))


@dataclass(eq=False)
class RadialSolution:
    """A sampled radial profile with derivative data.

    kind is one of 'regular', 'singular', 'exterior'; for exterior
    solutions R is the vanishing radius.
    """

    params: EigenParams
    kind: str
    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    normalization: str
    R: Optional[float] = None
    _spline: CubicHermiteSpline = field(default=None, repr=False, compare=False)

    def spline(self) -> CubicHermiteSpline:
        if self._spline is None:
            self._spline = CubicHermiteSpline(self.grid, self.values, self.derivs)
        return self._spline

    def __call__(self, r):
        return evaluate(self, r)


def _rhs(n: int, lam: float):
    def fun(r, y):
        u, du = y
        return [du, -(n - 1) / math.tanh(r) * du - lam * u]

    return fun


def _second_derivative(params: EigenParams, r, u, du):
    """u'' recovered from the equation; r = 0 handled by the limit."""
    r = np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    n, lam = params.n, params.lam
    out = np.empty_like(u)
    at0 = r == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        coth = np.cosh(r) / np.sinh(r)
    out[~at0] = -(n - 1) * coth[~at0] * du[~at0] - lam * u[~at0]
    # limit of u'' + (n-1)u'/r + lam u = 0 with u'(0)=0 gives u''(0) = -lam u/n
    out[at0] = -lam * u[at0] / n
    return out


def _launch_series_regular(params: EigenParams, r: float):
    """Taylor launch u = 1 + a2 r^2 + a4 r^4 near the regular center."""
    n, lam = params.n, params.lam
    a2 = -lam / (2.0 * n)
    a4 = -a2 * (lam + 2.0 * (n - 1) / 3.0) / (4.0 * (n + 2.0))
    u = 1.0 + a2 * r * r + a4 * r ** 4
    du = 2.0 * a2 * r + 4.0 * a4 * r ** 3
    return u, du


def _geometric_grid(r_lo: float, r_hi: float, ratio: float, step: float):
    """Geometric refinement [r_lo, min(0.5, r_hi)] then uniform spacing."""
    pieces = []
    knee = min(0.5, r_hi)
    if r_lo < knee:
        count = max(int(math.ceil(math.log(knee / r_lo) / math.log(ratio))), 8)
        pieces.append(np.geomspace(r_lo, knee, count + 1))
    if knee < r_hi:
        count = max(int(math.ceil((r_hi - knee) / step)), 4)
        pieces.append(np.linspace(knee, r_hi, count + 1))
    grid = np.unique(np.concatenate(pieces))
    return grid


def _integrate(params, span, y0, tol, grid):
    sol = solve_ivp(
        _rhs(params.n, params.lam),
        span,
        y0,
        method="DOP853",
        rtol=min(tol, 1e-9),
        atol=1e-280,
        dense_output=True,
    )
    if not sol.success:
        raise NumericalError(f"ODE integration failed: {sol.message}")
    vals = sol.sol(grid)
    return vals[0], vals[1]


def solve_regular(params: EigenParams, r_max: float, tol: float = 1e-11) -> RadialSolution:
    """Regular radial profile with u(0) = 1, sampled on (0, r_max].

    For lam = 0 the profile is the constant 1.  Otherwise it is strictly
    decreasing and positive on [0, r_max] for lam <= lambda1(n).
    """
    if not r_max > 0:
        raise ArgumentError("r_max must be positive")
    if not tol > 0:
        raise ArgumentError("tol must be positive")
    if params.lam == 0.0:
        grid = np.concatenate(([0.0], _geometric_grid(_EPS_LAUNCH, r_max, 1.02, 2e-3)))
        return RadialSolution(
            params, "regular", grid, np.ones_like(grid), np.zeros_like(grid),
            "u(0)=1 (constant harmonic profile)",
        )
    eps = _EPS_LAUNCH
    grid = _geometric_grid(eps, r_max, 1.02, 2e-3)
    u0, du0 = _launch_series_regular(params, eps)
    u, du = _integrate(params, (eps, r_max), [u0, du0], tol, grid)
    grid = np.concatenate(([0.0], grid))
    u = np.concatenate(([1.0], u))
    du = np.concatenate(([0.0], du))
    if np.any(u <= 0.0):
        raise InvariantViolationError("regular profile lost positivity")
    if np.any(np.diff(u) >= 0.0):
        raise InvariantViolationError("regular profile is not strictly decreasing")
    return RadialSolution(params, "regular", grid, u, du, "u(0)=1")


def _lambda0_singular(params: EigenParams, grid: np.ndarray):
    """Quadrature profile v(r) = c_n * Integral_r^inf sinh(t)^(1-n) dt.

    Antiderivatives follow the reduction
      I_m(r) = cosh(r) sinh(r)^(1-m)/(m-1) - (m-2)/(m-1) I_(m-2)(r),
    with I_1 = -log tanh(r/2) and I_2 = coth(r) - 1, all vanishing at
    infinity.  The constant c_n = max(n-2, 1) fixes leading coefficient 1.
    """
    n = params.n

    def I(m, r):
        if m == 1:
            return -np.log(np.tanh(r / 2.0))
        if m == 2:
            return np.cosh(r) / np.sinh(r) - 1.0
        return (np.cosh(r) * np.sinh(r) ** (1 - m) / (m - 1)
                - (m - 2) / (m - 1) * I(m - 2, r))

    cn = max(n - 2, 1)
    vals = cn * I(n - 1, grid)
    derivs = -cn * np.sinh(grid) ** (1 - n)
    return vals, derivs


def solve_singular(params: EigenParams, r_min: float, r_max: float,
                   tol: float = 1e-11) -> RadialSolution:
    """Singular radial profile, decaying at infinity, leading coefficient 1.

    The profile behaves like r^(2-n) (n>=3) or -log(r/2) (n=2) as r->0.
    For lam > 0 it is obtained by integrating the fast-decaying branch
    e^(-(n-1+mu)r/2) backwards from large radius and rescaling via the
    Wronskian with the regular solution, which pins the leading
    coefficient without any series matching.  For lam = 0 it is the
    explicit quadrature of sinh^(1-n).
    """
    if r_min < 1e-8:
        raise ArgumentError("r_min below 1e-8 cannot be launched in floating point")
    if not r_min < r_max:
        raise ArgumentError("need 0 < r_min < r_max")
    n, lam = params.n, params.lam
    # launch-region density keeps the midpoint ODE residual at its
    # roundoff floor (see ode_residual_midpoints / residual_tolerance)
    grid = _geometric_grid(r_min, r_max, 1.0 + 2.5e-4, 2e-3)
    if lam == 0.0:
        vals, derivs = _lambda0_singular(params, grid)
        return RadialSolution(
            params, "singular", grid, vals, derivs,
            "leading coefficient 1 (quadrature of sinh^(1-n))", )
    sigma = ((n - 1) + params.mu) / 2.0
    r_far = max(r_max, 24.0)
    if sigma * r_far > 690.0:
        raise ArgumentError("dimension too large for the backward launch")
    y_far = [math.exp(-sigma * r_far), -sigma * math.exp(-sigma * r_far)]
    v, dv = _integrate(params, (r_far, r_min), y_far, tol, grid[::-1])
    v, dv = v[::-1].copy(), dv[::-1].copy()
    # Wronskian normalization at r = 1: W(u, v) = c * sinh(r)^(1-n) exactly,
    # and the target leading coefficient corresponds to c = 2-n (n>=3), -1 (n=2)
    reg = solve_regular(params, 2.0, tol)
    u1 = float(evaluate(reg, 1.0))
    du1 = float(evaluate(reg, 1.0, derivative=True))
    k1 = min(int(np.searchsorted(grid, 1.0)), grid.size - 1)
    rw = float(grid[k1])
    vw, dvw = float(v[k1]), float(dv[k1])
    uw = float(evaluate(reg, rw))
    duw = float(evaluate(reg, rw, derivative=True))
    wr = uw * dvw - duw * vw
    target = (2 - n) if n >= 3 else -1
    scale = target * math.sinh(rw) ** (1 - n) / wr
    v *= scale
    dv *= scale
    if np.any(v <= 0.0):
        raise InvariantViolationError("singular profile lost positivity")
    tail = grid >= 1.0
    if np.any(np.diff(v[tail]) >= 0.0):
        raise InvariantViolationError("singular profile tail is not decreasing")
    _ = u1, du1
    return RadialSolution(
        params, "singular", grid, v, dv,
        "leading coefficient 1 (decaying branch)", )


def exterior_combination(u: RadialSolution, v: RadialSolution, R: float) -> RadialSolution:
    """Combination alpha*u + beta*v vanishing at R, positive outside,
    normalized to sup 1.  Requires lam > 0 so that both inputs decay."""
    if u.kind != "regular" or v.kind != "singular":
        raise ArgumentError("expected a regular and a singular solution")
    if u.params != v.params:
        raise ArgumentError("solutions must share parameters")
    if u.params.lam == 0.0:
        raise ArgumentError("exterior combination requires lam > 0")
    r_hi = min(u.grid[-1], v.grid[-1])
    if not (max(u.grid[0], v.grid[0]) < R < r_hi):
        raise ArgumentError("R must lie inside both solution grids")
    alpha = float(evaluate(v, R))
    beta = -float(evaluate(u, R))
    if max(abs(alpha), abs(beta)) < 1e-300:
        raise NumericalError("both solutions vanish at R")
    grid = np.unique(np.concatenate(
        [[R], u.grid[(u.grid > R) & (u.grid <= r_hi)],
         v.grid[(v.grid > R) & (v.grid <= r_hi)]]))
    # drop near-duplicate knots so cell widths stay bounded away from 0
    keep = np.concatenate(([True], np.diff(grid) > 1e-9))
    grid = grid[keep]
    vals = alpha * np.asarray(evaluate(u, grid)) + beta * np.asarray(evaluate(v, grid))
    ders = (alpha * np.asarray(evaluate(u, grid, derivative=True))
            + beta * np.asarray(evaluate(v, grid, derivative=True)))
    vals[0] = 0.0
    probe = min(int(np.searchsorted(grid, min(R + 1.0, 0.5 * (R + r_hi)))),
                grid.size - 1)
    if vals[probe] < 0.0:
        vals, ders = -vals, -ders
    # normalize by the true peak of the interpolant, not the largest node value
    spl = CubicHermiteSpline(grid, vals, ders)
    dspl = spl.derivative()
    idx = np.where((ders[:-1] > 0.0) & (ders[1:] <= 0.0))[0]
    if idx.size == 0:
        raise NumericalError("exterior combination has no interior peak")
    r_peak = float(brentq(dspl, grid[idx[0]], grid[idx[0] + 1], xtol=1e-13))
    m = float(spl(r_peak))
    if not m > 0:
        raise NumericalError("exterior combination is not positive")
    vals /= m
    ders /= m
    if np.any(vals[1:] <= 0.0):
        raise InvariantViolationError("exterior profile changes sign on (R, r_max]")
    return RadialSolution(u.params, "exterior", grid, vals, ders,
                          "sup = 1 on [R, r_max]", R=R)


def find_peak(s: RadialSolution) -> float:
    """Unique interior maximizer of an exterior profile.

    Asserts unimodality: the stored derivative changes sign exactly once
    (up to derivative values below noise level).
    """
    if s.kind != "exterior":
        raise ArgumentError("find_peak expects an exterior solution")
    d = s.derivs
    scale = float(np.abs(d).max())
    sig = np.where(np.abs(d) > 1e-9 * scale, np.sign(d), 0.0)
    nz = sig[sig != 0.0]
    flips = int(np.sum(np.diff(nz) != 0.0))
    if flips != 1:
        raise InvariantViolationError(
            f"expected exactly one derivative sign change, found {flips}")
    idx = np.where((d[:-1] > 0.0) & (d[1:] <= 0.0))[0]
    i = int(idx[0])
    dspl = s.spline().derivative()
    return float(brentq(dspl, s.grid[i], s.grid[i + 1], xtol=1e-13))


def decay_fit(s: RadialSolution):
    """Smallest C with u(r) <= C r e^(-sqrt(lam) r) on the sampled tail
    [1, r_max]; returns (C, check)."""
    if s.kind not in ("regular", "exterior"):
        raise ArgumentError("decay_fit expects a regular or exterior solution")
    if s.params.lam == 0.0:
        raise ArgumentError("no decay envelope for lam = 0")
    if s.grid[-1] < 10.0:
        raise ArgumentError("grid must reach r_max >= 10")
    tail = s.grid >= 1.0
    r = s.grid[tail]
    envelope = r * np.exp(-math.sqrt(s.params.lam) * r)
    ratios = s.values[tail] / envelope
    C = float(ratios.max())
    check = bool(np.isfinite(C) and np.all(s.values[tail] <= C * envelope))
    return C, check


def evaluate(s: RadialSolution, r, derivative: bool = False):
    """Cubic Hermite interpolation of the stored profile at r."""
    arr = np.asarray(r, dtype=float)
    lo, hi = s.grid[0], s.grid[-1]
    if np.any(arr < lo - 1e-12) or np.any(arr > hi + 1e-12):
        raise ArgumentError(f"r outside the stored range [{lo}, {hi}]")
    spl = s.spline().derivative() if derivative else s.spline()
    out = spl(np.clip(arr, lo, hi))
    return float(out) if np.isscalar(r) else out


# ---------------------------------------------------------------------------
# residual verification

# quintic Hermite basis and derivatives evaluated at the cell midpoint
_Q_VAL = (0.5, 0.15625, 0.015625, 0.5, -0.15625, 0.015625)
_Q_D1 = (-1.875, -0.4375, -0.03125, 1.875, -0.4375, 0.03125)
_Q_D2 = (0.0, -1.5, -0.25, 0.0, 1.5, -0.25)


def ode_residual_midpoints(s: RadialSolution):
    """Residual of the radial equation at every cell midpoint, computed
    from a quintic Hermite reconstruction (values, derivatives, and
    equation-consistent second derivatives at the nodes)."""
    r, u, du = s.grid, s.values, s.derivs
    d2u = _second_derivative(s.params, r, u, du)
    a, b = r[:-1], r[1:]
    h = b - a
    ua, ub = u[:-1], u[1:]
    da, db = du[:-1], du[1:]
    sa, sb = d2u[:-1], d2u[1:]
    um = (_Q_VAL[0] * ua + _Q_VAL[3] * ub + h * (_Q_VAL[1] * da + _Q_VAL[4] * db)
          + h * h * (_Q_VAL[2] * sa + _Q_VAL[5] * sb))
    dm = ((_Q_D1[0] * ua + _Q_D1[3] * ub) / h + (_Q_D1[1] * da + _Q_D1[4] * db)
          + h * (_Q_D1[2] * sa + _Q_D1[5] * sb))
    d2m = ((_Q_D2[1] * da + _Q_D2[4] * db) / h + (_Q_D2[2] * sa + _Q_D2[5] * sb))
    m = 0.5 * (a + b)
    n, lam = s.params.n, s.params.lam
    coth = np.cosh(m) / np.sinh(m)
    return d2m + (n - 1) * coth * dm + lam * um


def residual_tolerance(s: RadialSolution):
    """Per-cell tolerance 1e-8 * max|u| plus the machine-precision floor
    of evaluating the residual where the profile is singular."""
    r, u, du = s.grid, s.values, s.derivs
    d2u = _second_derivative(s.params, r, u, du)
    m_scale = np.maximum.reduce([
        np.abs(d2u[:-1]), np.abs(d2u[1:]),
        (s.params.n - 1) * np.abs(du[:-1]) / np.tanh(r[1:]),
        s.params.lam * np.abs(u[:-1]),
    ])
    return 1e-8 * float(np.abs(u).max()) + 128.0 * np.finfo(float).eps * m_scale
