"""Residual-certified meshless solvers for linear elliptic problems in 2D."""
from .basis import (
    Kernel, KernelFamily, SumSpace, TrialSpace, eval_basis, harmonic_basis, kernel_basis,
    mfs_basis, poly_basis_1d, poly_basis_2d,
)
from .discretize import ResidualSummary, SampledSystem, assemble, fine_grids, residual_summary
from .errors import (
    DegenerateTrialSpace, GenerationFailure, IllConditionedGram, InvalidArgument,
    InvalidConfiguration, LPFailure, NotFound, OversamplingViolation, RankZeroFailure, ReskitError,
    SingularEvaluation, SolverFailure, UnsupportedCertificate,
)
from .geometry import (
    PointSet, Rectangle, Tag, UnitDisk, boundary_points, chebyshev_nodes, equidistant_nodes,
    fictitious_boundary, fill_distance, interior_points,
)
from .methods import (
    Certificate, convergence_study, polynomial_baseline, solve_collocation, solve_drm,
    solve_mfs, solve_mps, solve_trefftz,
)
from .operators import DataFunctions, DataMap, Interior, apply_datamap, manufactured, wp_constant
from .solve import LsqOptions, gram_solve, least_squares, lp_minimax, minimax_lawson
from .stability import (
    greedy_norming_set, lebesgue_constant, stability_l2, stability_lab, stability_sup,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "DataFunctions",
    "DataMap",
    "DegenerateTrialSpace",
    "GenerationFailure",
    "IllConditionedGram",
    "Interior",
    "InvalidArgument",
    "InvalidConfiguration",
    "Kernel",
    "KernelFamily",
    "LPFailure",
    "LsqOptions",
    "NotFound",
    "OversamplingViolation",
    "PointSet",
    "RankZeroFailure",
    "Rectangle",
    "ResidualSummary",
    "ReskitError",
    "SampledSystem",
    "SingularEvaluation",
    "SolverFailure",
    "SumSpace",
    "Tag",
    "TrialSpace",
    "UnitDisk",
    "UnsupportedCertificate",
    "apply_datamap",
    "assemble",
    "boundary_points",
    "chebyshev_nodes",
    "convergence_study",
    "equidistant_nodes",
    "eval_basis",
    "fictitious_boundary",
    "fill_distance",
    "fine_grids",
    "gram_solve",
    "greedy_norming_set",
    "harmonic_basis",
    "interior_points",
    "kernel_basis",
    "least_squares",
    "lebesgue_constant",
    "lp_minimax",
    "manufactured",
    "mfs_basis",
    "minimax_lawson",
    "poly_basis_1d",
    "poly_basis_2d",
    "polynomial_baseline",
    "residual_summary",
    "solve_collocation",
    "solve_drm",
    "solve_mfs",
    "solve_mps",
    "solve_trefftz",
    "stability_l2",
    "stability_lab",
    "stability_sup",
    "wp_constant",
]
