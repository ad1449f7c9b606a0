"""Eigenfunctions of the Laplacian on unbounded domains of hyperbolic space.

Subpackages:
  geometry - Poincare-ball model, distances, Busemann coordinates, domains
  radial   - radial eigenfunction profiles (regular / singular / exterior)
  horo     - closed-form Busemann-coordinate profiles and the thin-band
             first eigenvalue
  disk     - finite-difference Dirichlet solver on masked disk grids (n=2)
  barriers - barrier constants, band-shrinking nonexistence pipeline,
             hover falsification, non-extendability witness
  cli      - command-line front end emitting CSV/JSON
"""

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
    IdealPoint,
    Point,
    busemann_depth,
    contains,
    dist,
    dist_to_boundary,
    horosphere_point,
    ray_point,
)
from .radial import (
    EigenParams,
    RadialSolution,
    decay_fit,
    evaluate,
    exterior_combination,
    find_peak,
    lambda1,
    solve_regular,
    solve_singular,
)
from .horo import (
    HoroProfile,
    busemann_ode_residual,
    exterior_horoball_eigen,
    exterior_peak_depth,
    horoannulus_lambda1,
    horoball_eigen,
)
from .disk import (
    EigenResult,
    ExhaustionResult,
    Field2D,
    Grid2D,
    build_grid,
    comparison_check,
    dirichlet_lambda1,
    hyperball_eigenfunction,
    interpolate_field,
    solve_dirichlet,
)
from .barriers import (
    BarrierConstants,
    ParabolaBarrier,
    PipelineResult,
    ShrinkReport,
    boundary_bound_check,
    estimate_barrier_constants,
    falsify_hovering,
    nonexistence_pipeline,
    nonextendability_witness,
    parabola_barrier_check,
    parabola_coefficient,
    pipeline_report_rows,
    radial_sequence,
    shrink_step,
    tangential_sequence,
)

__version__ = "0.1.0"
