"""Finite-difference Dirichlet solver on masked Poincare-disk grids (n = 2).

At n = 2 the hyperbolic Laplacian is conformal to the Euclidean one,

    Delta_H = ((1 - |x|^2)^2 / 4) Delta_euclid,

with no first-order terms, so a 5-point stencil with Shortley-Weller
cut cells at curved boundaries yields an M-matrix discretization that
preserves the discrete maximum principle and is second-order accurate.
Grids are masked to (domain) * (truncation ball B_R(x0)) * (node cap
|x| <= 1 - h/2); Dirichlet data is evaluated at the exact cut points.

The module covers direct solves, the smallest Dirichlet eigenvalue by
inverse power iteration, ordering checks between solutions (discrete
comparison principle), and the exhaustion construction that builds the
positive bounded eigenfunction of a hyperball as the limit of solutions
of truncated problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import sparse
from scipy.optimize import brentq
from scipy.sparse.linalg import splu
from scipy.spatial import cKDTree

from .errors import (
    ArgumentError,
    DomainError,
    InvariantViolationError,
    NumericalError,
    ResourceError,
    SpectralError,
)
from .geometry import (
    DomainSpec,
    ExteriorBall,
    ExteriorHoroball,
    GeodesicBall,
    Horoannulus,
    Horoball,
    Hyperball,
    Point,
    ball_dist_arr,
    busemann_arr,
    plane_signed_dist_arr,
    ray_point,
)
from .radial import EigenParams, evaluate, solve_regular

__all__ = [
    "Grid2D",
    "Field2D",
    "EigenResult",
    "ExhaustionResult",
    "build_grid",
    "solve_dirichlet",
    "dirichlet_lambda1",
    "comparison_check",
    "hyperball_eigenfunction",
    "interpolate_field",
]

_MAX_NODES = int(2e7)

# cut-link provenance codes
CUT_DOMAIN, CUT_TRUNCATION, CUT_CAP = 0, 1, 2

_DIRS = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=np.int64)
_OPP = np.array([1, 0, 3, 2])


def _phi_domain(D: DomainSpec, X: np.ndarray) -> np.ndarray:
    """Defining function of the domain, negative strictly inside."""
    if isinstance(D, GeodesicBall):
        return ball_dist_arr(X, D.center.coords) - D.radius
    if isinstance(D, ExteriorBall):
        return D.radius - ball_dist_arr(X, D.center.coords)
    if isinstance(D, Horoball):
        return D.level - busemann_arr(X, D.xi.direction)
    if isinstance(D, ExteriorHoroball):
        return busemann_arr(X, D.xi.direction) - D.level
    if isinstance(D, Horoannulus):
        depth = busemann_arr(X, D.xi.direction) - D.level
        return np.maximum(D.a - depth, depth - D.b)
    if isinstance(D, Hyperball):
        s = plane_signed_dist_arr(X, D.normal)
        return -(D.side * s + D.offset)
    raise ArgumentError(f"unsupported domain variant {type(D).__name__}")


@dataclass(eq=False)
class Grid2D:
    """Masked lattice with Shortley-Weller cut data.

    Interior nodes are the lattice points solved for; each of their four
    axis links either points at another interior node (index >= 0) or is
    a boundary link carrying the cut fraction in (0, 1] and the exact
    cut point where Dirichlet data is sampled.
    """

    h: float
    domain: DomainSpec
    trunc_radius: float
    center: Point
    ij: np.ndarray          # (M, 2) lattice integer coordinates
    xy: np.ndarray          # (M, 2) model coordinates = ij * h
    neighbor: np.ndarray    # (M, 4) interior index or -1
    frac: np.ndarray        # (M, 4) cut fraction, 1 for regular links
    cut_node: np.ndarray    # (L,) node index of each boundary link
    cut_dir: np.ndarray     # (L,) direction of each boundary link
    cut_xy: np.ndarray      # (L, 2) cut point coordinates
    cut_kind: np.ndarray    # (L,) CUT_DOMAIN / CUT_TRUNCATION / CUT_CAP
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_nodes(self) -> int:
        return self.ij.shape[0]

    def conformal_factor(self) -> np.ndarray:
        """((1 - |x|^2)/2)^2, the n = 2 ratio Delta_H / Delta_euclid."""
        return ((1.0 - np.sum(self.xy**2, axis=1)) / 2.0) ** 2

    def node_index(self) -> dict:
        if "index" not in self._cache:
            self._cache["index"] = {
                (int(i), int(j)): k for k, (i, j) in enumerate(self.ij)
            }
        return self._cache["index"]

    def kdtree(self) -> cKDTree:
        if "tree" not in self._cache:
            self._cache["tree"] = cKDTree(self.xy)
        return self._cache["tree"]


@dataclass(eq=False)
class Field2D:
    """Values of a discrete solution on a grid's interior nodes, plus the
    Dirichlet data sampled on the grid's boundary links."""

    grid: Grid2D
    values: np.ndarray
    lam: float
    residual_norm: float
    boundary_values: np.ndarray

    def sup(self) -> float:
        return float(np.abs(self.values).max()) if self.values.size else 0.0


@dataclass(frozen=True)
class EigenResult:
    value: float
    iterations: int
    residual: float
    h: float


def build_grid(domain: DomainSpec, R: float, x0: Point, h: float) -> Grid2D:
    """Mask the lattice h*Z^2 to domain * B_R(x0) * {|x| <= 1 - h/2} and
    attach Shortley-Weller cut data on every boundary link."""
    if not (1e-4 < h < 0.1):
        raise ArgumentError("h must lie in (1e-4, 0.1)")
    if not R > 0:
        raise ArgumentError("truncation radius must be positive")
    cap = 1.0 - h / 2.0
    trunc_finite = math.isfinite(R)

    def phi_parts(X):
        parts = [_phi_domain(domain, X), np.linalg.norm(X, axis=1) - cap]
        if trunc_finite:
            parts.insert(1, ball_dist_arr(X, x0.coords) - R)
        return parts

    def phi_mask(X):
        return np.maximum.reduce(phi_parts(X))

    imax = int(math.floor(cap / h)) + 1
    rng = np.arange(-imax, imax + 1, dtype=np.int64)
    II, JJ = np.meshgrid(rng, rng, indexing="ij")
    ij_all = np.column_stack([II.ravel(), JJ.ravel()])
    xy_all = ij_all * h
    # cheap prefilter before the exact mask
    keep = np.sum(xy_all**2, axis=1) < cap**2
    ij_all, xy_all = ij_all[keep], xy_all[keep]
    inside = phi_mask(xy_all) < 0.0
    ij = ij_all[inside]
    xy = xy_all[inside]
    M = ij.shape[0]
    if M == 0:
        raise DomainError("empty interior: no lattice node falls inside the domain")
    if M > _MAX_NODES:
        raise ResourceError(f"grid would have {M} nodes (> {_MAX_NODES})")

    # dense lookup table (i, j) -> node index
    off = imax
    table = -np.ones((2 * imax + 1, 2 * imax + 1), dtype=np.int64)
    table[ij[:, 0] + off, ij[:, 1] + off] = np.arange(M)

    neighbor = np.empty((M, 4), dtype=np.int64)
    for d in range(4):
        nb = ij + _DIRS[d]
        neighbor[:, d] = table[nb[:, 0] + off, nb[:, 1] + off]

    frac = np.ones((M, 4))
    rows, dirs = np.nonzero(neighbor < 0)
    cuts_xy = np.empty((rows.size, 2))
    kinds = np.empty(rows.size, dtype=np.int64)

    def phi_scalar(x):
        return float(phi_mask(x[None, :])[0])

    for idx, (k, d) in enumerate(zip(rows, dirs)):
        base = xy[k]
        step = _DIRS[d] * h

        def along(s):
            return phi_scalar(base + s * step)

        f1 = along(1.0)
        theta = 1.0 if f1 == 0.0 else brentq(along, 0.0, 1.0, xtol=1e-14)
        theta = min(max(theta, 1e-8), 1.0)
        frac[k, d] = theta
        cut = base + theta * step
        cuts_xy[idx] = cut
        parts = [float(p[0]) for p in phi_parts(cut[None, :])]
        which = int(np.argmax(parts))
        if trunc_finite:
            kinds[idx] = (CUT_DOMAIN, CUT_TRUNCATION, CUT_CAP)[which]
        else:
            kinds[idx] = (CUT_DOMAIN, CUT_CAP)[which]

    return Grid2D(
        h=h, domain=domain, trunc_radius=R, center=x0,
        ij=ij, xy=xy, neighbor=neighbor, frac=frac,
        cut_node=rows.astype(np.int64), cut_dir=dirs.astype(np.int64),
        cut_xy=cuts_xy, cut_kind=kinds,
    )


# ---------------------------------------------------------------------------
# operator assembly and solves

def _operator(grid: Grid2D):
    """Sparse matrix of -Delta_H on interior nodes plus the boundary-link
    coefficients that multiply Dirichlet data into the right-hand side."""
    if "A" in grid._cache:
        return grid._cache["A"], grid._cache["cut_coef"]
    M = grid.n_nodes
    h = grid.h
    F = grid.conformal_factor()
    hd = grid.frac * h                      # (M, 4) per-direction spacings
    coef = np.empty((M, 4))
    for d in range(4):
        coef[:, d] = 2.0 / (hd[:, d] * (hd[:, d] + hd[:, _OPP[d]]))
    diag = F * coef.sum(axis=1)
    rows, cols, vals = [np.arange(M)], [np.arange(M)], [diag]
    for d in range(4):
        mask = grid.neighbor[:, d] >= 0
        rows.append(np.nonzero(mask)[0])
        cols.append(grid.neighbor[mask, d])
        vals.append(-(F * coef[:, d])[mask])
    A = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(M, M),
    )
    cut_coef = (F[grid.cut_node] * coef[grid.cut_node, grid.cut_dir])
    grid._cache["A"] = A
    grid._cache["cut_coef"] = cut_coef
    return A, cut_coef


def _factor(grid: Grid2D, lam: float):
    key = ("lu", float(lam))
    if key not in grid._cache:
        A, _ = _operator(grid)
        if lam == 0.0:
            mat = A
        else:
            mat = A - lam * sparse.identity(grid.n_nodes, format="csr")
        grid._cache[key] = splu(mat.tocsc())
    return grid._cache[key]


def _lambda1_estimate(grid: Grid2D) -> float:
    """Cheap smallest-eigenvalue probe used to guard definiteness."""
    if "lam1_probe" not in grid._cache:
        A, _ = _operator(grid)
        lu = _factor(grid, 0.0)
        x = np.ones(grid.n_nodes)
        lam_old = np.inf
        lam = np.inf
        for _ in range(80):
            y = lu.solve(x)
            x = y / np.linalg.norm(y)
            lam = float(x @ (A @ x))
            if abs(lam - lam_old) < 1e-4 * abs(lam):
                break
            lam_old = lam
        grid._cache["lam1_probe"] = lam
    return grid._cache["lam1_probe"]


def _boundary_array(grid: Grid2D, boundary) -> np.ndarray:
    """Evaluate Dirichlet data at all cut points; accepts a vectorized
    callable on (L, 2) arrays, a scalar-point callable, or a constant."""
    if np.isscalar(boundary):
        return np.full(grid.cut_xy.shape[0], float(boundary))
    try:
        vals = np.asarray(boundary(grid.cut_xy), dtype=float)
        if vals.shape == (grid.cut_xy.shape[0],):
            return vals
    except Exception:
        pass
    return np.array([float(boundary(p)) for p in grid.cut_xy])


def solve_dirichlet(grid: Grid2D, lam: float, boundary,
                    source=None, guard: bool = True) -> Field2D:
    """Solve -Delta_H u = lam u (+ source) with Dirichlet data `boundary`
    sampled at the grid's cut points.

    Refuses to solve when lam is not safely below the first discrete
    Dirichlet eigenvalue of the grid (the system would be indefinite).
    """
    if guard:
        lam1 = _lambda1_estimate(grid)
        if lam >= lam1 * (1.0 - 5e-3):
            raise SpectralError(
                f"lam = {lam} is not below the discrete first eigenvalue "
                f"~ {lam1:.6g} of this grid"
            )
    A, cut_coef = _operator(grid)
    bvals = _boundary_array(grid, boundary)
    rhs = np.zeros(grid.n_nodes)
    np.add.at(rhs, grid.cut_node, cut_coef * bvals)
    if source is not None:
        if callable(source):
            rhs = rhs + np.asarray(source(grid.xy), dtype=float)
        else:
            rhs = rhs + np.asarray(source, dtype=float)
    u = _factor(grid, lam).solve(rhs)
    res = A @ u - lam * u - rhs
    scale = max(float(np.abs(rhs).max(initial=0.0)),
                float(np.abs(A @ u).max(initial=0.0)), 1e-300)
    residual_norm = float(np.abs(res).max()) / scale
    if residual_norm > 1e-10:
        raise NumericalError(f"linear solve residual {residual_norm:.3e} too large")
    return Field2D(grid, u, lam, residual_norm, bvals)


def dirichlet_lambda1(grid: Grid2D, tol: float = 1e-8,
                      max_iter: int = 2000) -> EigenResult:
    """Smallest Dirichlet eigenvalue of -Delta_H by inverse power
    iteration; must exceed 1/4 for every bounded planar domain."""
    if grid.n_nodes == 0:
        raise DomainError("empty grid")
    A, _ = _operator(grid)
    lu = _factor(grid, 0.0)
    x = np.ones(grid.n_nodes)
    x /= np.linalg.norm(x)
    lam = np.inf
    residual = np.inf
    its = 0
    for its in range(1, max_iter + 1):
        y = lu.solve(x)
        ny = np.linalg.norm(y)
        if not np.isfinite(ny) or ny == 0.0:
            raise NumericalError("inverse iteration produced a degenerate vector")
        x = y / ny
        Ax = A @ x
        lam = float(x @ Ax)
        residual = float(np.linalg.norm(Ax - lam * x)) / abs(lam)
        if residual < tol:
            break
    else:
        raise NumericalError(
            f"inverse power iteration stagnated (residual {residual:.3e})")
    if lam <= 0.25:
        raise InvariantViolationError(
            f"computed first eigenvalue {lam} does not exceed 1/4; "
            "the grid is too coarse to be trusted")
    return EigenResult(value=lam, iterations=its, residual=residual, h=grid.h)


def comparison_check(u: Field2D, v: Field2D, strict: bool = False) -> bool:
    """True iff the boundary ordering between u and v (>= , or > when
    strict) propagates to every interior node."""
    if u.grid is not v.grid:
        raise ArgumentError("fields live on different grids")
    if u.lam != v.lam:
        raise ArgumentError("fields have different eigenvalue parameters")
    db = u.boundary_values - v.boundary_values
    di = u.values - v.values
    if strict:
        return bool(np.all(db > 0.0) and np.all(di > 0.0))
    tol = 1e-10 * max(u.sup(), v.sup(), 1.0)
    return bool(np.all(db >= -1e-300) and np.all(di >= -tol))


def interpolate_field(fld: Field2D, X) -> np.ndarray:
    """Bilinear interpolation on complete lattice cells, nearest interior
    node (within 2h) otherwise, NaN when no data is close enough."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    g = fld.grid
    h = g.h
    index = g.node_index()
    out = np.full(X.shape[0], np.nan)
    base = np.floor(X / h).astype(np.int64)
    t = X / h - base
    for r in range(X.shape[0]):
        i0, j0 = int(base[r, 0]), int(base[r, 1])
        corners = [(i0, j0), (i0 + 1, j0), (i0, j0 + 1), (i0 + 1, j0 + 1)]
        ks = [index.get(c, -1) for c in corners]
        if all(k >= 0 for k in ks):
            tx, ty = t[r]
            w = [(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty]
            out[r] = sum(wi * fld.values[k] for wi, k in zip(w, ks))
        else:
            dist, k = g.kdtree().query(X[r])
            if dist <= 2.0 * h:
                out[r] = fld.values[int(k)]
    return out


# ---------------------------------------------------------------------------
# exhaustion construction on a hyperball

@dataclass(eq=False)
class ExhaustionResult:
    field: Field2D
    steps: list
    converged: bool
    monitor_radius: float
    p1: Point
    p2: Point
    v0: Callable
    v1: Callable
    boundary_trace: float


def hyperball_eigenfunction(domain: Hyperball, lam: float, h: float,
                            tol: float = 1e-6, start_radius: float = 3.0,
                            max_steps: int = 12,
                            x0: Optional[Point] = None) -> ExhaustionResult:
    """Positive bounded eigenfunction of a hyperball as the limit of
    truncated Dirichlet problems.

    Solves -Delta_H u = lam u on domain * B_N(x0) for N = start_radius,
    start_radius+1, ... with boundary data v0 built from two radial
    profiles centered at mirror points p1 (inside the bounding
    half-space) and p2 (its reflection), until consecutive solutions
    differ by less than tol on the fixed compact domain * B_start.
    Enforces 0 <= v0 <= u_N <= v1 nodewise (slack 10 h^2) and
    monotonicity of the truncation sequence.
    """
    if not isinstance(domain, Hyperball):
        raise ArgumentError("hyperball_eigenfunction expects a Hyperball domain")
    if domain.normal.size != 2:
        raise ArgumentError("the grid solver is two-dimensional")
    if not 0.0 < lam <= 0.25:
        raise ArgumentError("lam must lie in (0, 1/4] for n = 2")
    if x0 is None:
        x0 = Point(np.zeros(2))
    slack = 10.0 * h * h
    axis = domain.side * domain.normal
    p1 = ray_point(axis, 1.0)
    p2 = ray_point(-axis, 1.0)
    reg = solve_regular(EigenParams(2, lam), r_max=26.0)

    def v1(X):
        return np.asarray(evaluate(reg, ball_dist_arr(X, p1.coords)))

    def v2(X):
        return np.asarray(evaluate(reg, ball_dist_arr(X, p2.coords)))

    def v0(X):
        return np.maximum(v1(X) - v2(X), 0.0)

    steps = []
    prev_map = None
    prev_field = None
    converged = False
    final = None
    for step in range(max_steps + 1):
        N = start_radius + step
        grid = build_grid(domain, N, x0, h)
        fld = solve_dirichlet(grid, lam, v0)
        v0n = v0(grid.xy)
        v1n = v1(grid.xy)
        low = float((fld.values - v0n).min())
        high = float((v1n - fld.values).min())
        nonneg = float(fld.values.min())
        info = {"N": N, "nodes": grid.n_nodes, "sandwich_low": low,
                "sandwich_high": high, "min_value": nonneg}
        if low < -slack or high < -slack or nonneg < -slack:
            steps.append(info)
            raise InvariantViolationError(
                f"sandwich violated at N={N}: margins {low:.3e}, {high:.3e}")
        dist0 = ball_dist_arr(grid.xy, x0.coords)
        cur_map = {(int(i), int(j)): fld.values[k]
                   for k, (i, j) in enumerate(grid.ij)}
        if prev_map is not None:
            shared = [key for key in prev_map if key in cur_map]
            mono = min((cur_map[key] - prev_map[key] for key in shared),
                       default=0.0)
            info["monotone_margin"] = float(mono)
            if mono < -slack:
                steps.append(info)
                raise InvariantViolationError(
                    f"truncation sequence not monotone at N={N}: {mono:.3e}")
            monitor_keys = [
                key for k, key in ((k, (int(i), int(j)))
                                   for k, (i, j) in enumerate(grid.ij))
                if dist0[k] <= start_radius and key in prev_map
            ]
            diff = max((abs(cur_map[key] - prev_map[key])
                        for key in monitor_keys), default=0.0)
            info["sup_diff"] = float(diff)
            steps.append(info)
            if diff < tol:
                converged = True
                final = fld
                break
        else:
            steps.append(info)
        prev_map = cur_map
        prev_field = fld
        final = fld
    if not converged:
        raise NumericalError(
            f"exhaustion did not converge within {max_steps} truncation steps")
    _ = prev_field
    g = final.grid
    dom_cut_nodes = np.unique(g.cut_node[g.cut_kind == CUT_DOMAIN])
    trace = float(np.abs(final.values[dom_cut_nodes]).max()) if dom_cut_nodes.size else 0.0
    return ExhaustionResult(
        field=final, steps=steps, converged=converged,
        monitor_radius=start_radius, p1=p1, p2=p2, v0=v0, v1=v1,
        boundary_trace=trace,
    )
