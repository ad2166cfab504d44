"""Exact and arbitrary-precision solver for two-axis countertwisting spin dynamics.

The package computes, for a collective spin j: exact big-integer
characteristic polynomials of the countertwisting Hamiltonian via its chiral
block structure, exact degeneracy and solvability classification, eigenvalue
spectra (closed-form radicals where the block degrees permit, certified
arbitrary-precision numerics otherwise), spectrally interpolated time
evolution, and squeezing-related observables with closed-form cross-checks.
"""

from .charpoly import (
    BlockDecomposition,
    DegeneracyReport,
    IntPolynomial,
    SolvabilityCategory,
    SolvabilityClass,
    Table1Row,
    block_decompose,
    block_polynomials,
    char_poly_exact,
    classify_solvability,
    degeneracy_report,
    discriminant,
    strip_lambda_power,
    table1_reference,
    table1_spins,
    to_mu_polynomial,
)
from .errors import (
    CountertwistError,
    IllConditionedError,
    InternalConsistencyError,
    InvalidInputError,
    NotAvailableError,
    NumericFailureError,
    SpectralConsistencyError,
)
from .evolution import (
    TIME_SERIES_COLUMNS,
    ObservableSet,
    Propagator,
    PropagatorMethod,
    StateVector,
    TimeSeries,
    coherent_initial_state,
    correlation_xz,
    heisenberg_expectations,
    optimal_xi,
    propagator_spectral,
    propagator_taylor,
    time_series,
    xi_y,
    xi_z,
)
from .spectrum import (
    Eigenvalue,
    Exactness,
    RadicalExpr,
    SpectrumReport,
    roots_even_poly,
    roots_numeric,
    spectrum,
)
from .spin_algebra import (
    DEFAULT_PRECISION,
    BasisOrdering,
    DenseOperator,
    HalfInt,
    build_cartesian,
    build_h_f,
    build_h_ta,
    build_ladder,
    chiral_operator,
    wigner_rotation_y,
)

__version__ = "0.1.0"

__all__ = [
    "BasisOrdering",
    "BlockDecomposition",
    "CountertwistError",
    "DEFAULT_PRECISION",
    "DegeneracyReport",
    "DenseOperator",
    "Eigenvalue",
    "Exactness",
    "HalfInt",
    "IllConditionedError",
    "IntPolynomial",
    "InternalConsistencyError",
    "InvalidInputError",
    "NotAvailableError",
    "NumericFailureError",
    "ObservableSet",
    "Propagator",
    "PropagatorMethod",
    "RadicalExpr",
    "SolvabilityCategory",
    "SolvabilityClass",
    "SpectralConsistencyError",
    "SpectrumReport",
    "StateVector",
    "TIME_SERIES_COLUMNS",
    "Table1Row",
    "TimeSeries",
    "__version__",
    "block_decompose",
    "block_polynomials",
    "build_cartesian",
    "build_h_f",
    "build_h_ta",
    "build_ladder",
    "char_poly_exact",
    "chiral_operator",
    "classify_solvability",
    "coherent_initial_state",
    "correlation_xz",
    "degeneracy_report",
    "discriminant",
    "heisenberg_expectations",
    "optimal_xi",
    "propagator_spectral",
    "propagator_taylor",
    "roots_even_poly",
    "roots_numeric",
    "spectrum",
    "strip_lambda_power",
    "table1_reference",
    "table1_spins",
    "time_series",
    "to_mu_polynomial",
    "xi_y",
    "xi_z",
]
