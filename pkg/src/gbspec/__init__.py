"""Generalized B-spline collocation matrices and their spectral symbols.

The package constructs polynomial, hyperbolic and trigonometric GB-spline
bases, assembles the matrices of isogeometric collocation for second-order
elliptic problems (in one and several dimensions, with geometry maps), builds
the associated spectral symbols, and provides the machinery to verify
eigenvalue-distribution, clustering, bound and decay statements numerically.
"""

from .cardinal import CardinalSpline, cardinal_derivative, cardinal_spline, fourier_phi
from .collocation import (CollocationSystem, GBBasis, GeometryMap1D,
                          KnotVector, ProblemCoefficients, StructureReport,
                          assemble, central_range, gb_basis,
                          greville_abscissae, structure_report)
from .errors import (ConstraintError, ExprError, GbspecError, NumericalError,
                     UsageError, ValidationError)
from .multidim import (DirectionSymbols, GeometryMapMD, ProblemMD,
                       assemble_md, delinearize, linearize, md_symbol_samples,
                       symbol_matrix)
from .sections import (LocalBasis, PiecewiseFn, SectionFamily, basis_eval,
                       hyperbolic, piecewise_antiderivative,
                       piecewise_derivative, piecewise_eval, polynomial,
                       trigonometric)
from .spectral import (DistributionReport, ToeplitzSpec, eigenvalues_dense,
                       product_symbol_sampler, toeplitz, toeplitz_tensor,
                       weyl_report)
from .symbols import (BoundReport, SymbolFn, bounds_report, decay_ratio,
                      lower_bound_residual, symbol_closed_form, symbol_fn,
                      symbol_max, symbol_series)

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "CardinalSpline", "CollocationSystem", "ConstraintError",
    "DirectionSymbols", "DistributionReport", "ExprError", "GBBasis",
    "GbspecError", "GeometryMap1D", "GeometryMapMD", "KnotVector",
    "LocalBasis", "NumericalError", "PiecewiseFn", "ProblemCoefficients",
    "ProblemMD", "SectionFamily", "StructureReport", "SymbolFn",
    "ToeplitzSpec", "UsageError", "ValidationError", "assemble",
    "assemble_md", "basis_eval", "bounds_report", "cardinal_derivative",
    "cardinal_spline", "central_range", "decay_ratio", "delinearize",
    "eigenvalues_dense", "fourier_phi", "gb_basis", "greville_abscissae",
    "hyperbolic", "linearize", "lower_bound_residual", "md_symbol_samples",
    "piecewise_antiderivative", "piecewise_derivative", "piecewise_eval",
    "polynomial",
    "product_symbol_sampler", "structure_report", "symbol_closed_form",
    "symbol_fn", "symbol_matrix", "symbol_max", "symbol_series", "toeplitz",
    "toeplitz_tensor", "trigonometric", "weyl_report",
]
