"""Gelfand-Zeitlin systems and contraction leaves on U(n) and SO(n) coadjoint orbits."""

from .chamber import (
    ChamberPoint,
    StratumDescriptor,
    levi_commutator_basis,
    orbit_dimension,
    stratum_of,
    sweep,
)
from .contraction import (
    ContractionChainReport,
    chain_report,
    fiber_tangent,
    fiber_tangent_dim,
    leaf_dim,
    leaf_directions,
    leaf_flow_deviation,
)
from .exceptions import (
    ConsistencyError,
    DegeneracyError,
    FiberInconsistencyError,
    GZError,
    NumericalError,
    ValidationError,
)
from .fiber import (
    FiberReport,
    classify_fiber,
    classify_matrix,
    jacobian_rank,
    pattern_fiber_dimension,
    survey_polytope,
    survey_summary,
)
from .matrices import (
    Spectrum,
    jacobi_eigh,
    matrix_from_json,
    matrix_to_json,
    principal_submatrix,
    sample_orbit_point,
    skew_spectrum,
    spectrum_desc,
)
from .patterns import (
    GZPattern,
    PolytopeSpec,
    check_interlacing,
    gz_map,
    polytope_spec,
    reconstruct,
    sample_pattern,
)
from .poisson import (
    FlowTrace,
    ScalarField,
    eigenvalue_field,
    entry_field,
    gradient,
    involution_defect,
    lax_flow,
    lie_poisson_bracket,
    linear_field,
    trace_power_field,
)
from .seeding import derive_seeds

__version__ = "0.1.0"

__all__ = [
    "ChamberPoint",
    "ConsistencyError",
    "ContractionChainReport",
    "DegeneracyError",
    "FiberInconsistencyError",
    "FiberReport",
    "FlowTrace",
    "GZError",
    "GZPattern",
    "NumericalError",
    "PolytopeSpec",
    "ScalarField",
    "Spectrum",
    "StratumDescriptor",
    "ValidationError",
    "chain_report",
    "check_interlacing",
    "classify_fiber",
    "classify_matrix",
    "derive_seeds",
    "eigenvalue_field",
    "entry_field",
    "fiber_tangent",
    "fiber_tangent_dim",
    "gradient",
    "gz_map",
    "involution_defect",
    "jacobi_eigh",
    "jacobian_rank",
    "lax_flow",
    "leaf_dim",
    "leaf_directions",
    "leaf_flow_deviation",
    "levi_commutator_basis",
    "lie_poisson_bracket",
    "linear_field",
    "matrix_from_json",
    "matrix_to_json",
    "orbit_dimension",
    "pattern_fiber_dimension",
    "polytope_spec",
    "principal_submatrix",
    "reconstruct",
    "sample_orbit_point",
    "sample_pattern",
    "skew_spectrum",
    "spectrum_desc",
    "stratum_of",
    "survey_polytope",
    "survey_summary",
    "sweep",
    "trace_power_field",
]
