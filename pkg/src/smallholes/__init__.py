"""Asymptotic expansions for the Dirichlet-Laplace problem in planar domains
with small inclusions, with an independent dense reference solver.

Points are complex numbers x1 + i*x2 throughout.
"""

from .boundary import BoundaryFunction, angles
from .conformal import (
    DEFAULT_ORDER,
    ExteriorMap,
    InteriorMap,
    RescaledMap,
    ShapeSpec,
    build_exterior_map,
)
from .errors import (
    ConfigError,
    DegenerateConfigurationError,
    DomainError,
    GeometryError,
    GeometryWarning,
    MapFitError,
    ResolutionWarning,
    ScaleDegeneracyError,
    SmallHolesError,
    SolverError,
)
from .expansion import (
    BaseSolution,
    CorrectionBundle,
    Expansion,
    ResidualReport,
    assemble_interaction_matrix,
    base_solution,
    build_profiles,
    correction_step,
    expand,
    expand_multi,
    expand_single,
)
from .exterior import (
    HarmonicExteriorField,
    contour_mean,
    far_constant_of,
    solve_exterior,
    tail_sup,
)
from .interactions import (
    AnalyticInverse,
    InteractionMatrix,
    asymptotic_inverse,
    ones_matrix_inverse,
    three_scale_determinant,
    three_scale_eigensystem,
    three_scale_inverse,
    three_scale_matrix,
)
from .interior import HarmonicInteriorField, ZeroField, solve_interior
from .profiles import Profile, build_profile
from .reference import (
    ReferenceSolution,
    RemainderReport,
    probe_grid,
    remainder_norm,
    solve_reference,
)
from .scenes import Forcing, Inclusion, Regime, Scene

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
