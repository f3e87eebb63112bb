"""Structure invariants of unipotent-by-finite p-adic matrix groups."""
from .errors import (
    ClosureFailure, InvalidInput, InvariantViolation, NilpadicError, NotInGroup,
    OracleCapExceeded, PrecisionExhausted, SpecValidationError,
)
from .examples import example
from .kernels import BACKEND
from .lattice import Lattice, hnf, saturate, scalar_action
from .model import GroupSpec, Subgroup, load_spec, spec_from_dict, validate
from .oracle import compare, finite_quotient
from .scalar import PadicContext, teichmuller, valuation
from .structure import (
    delta, delta_plus, fnp, isolator, nio_bounds, normal_core, orbitally_sound_check,
    structure_report, xi_scalars,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ClosureFailure", "GroupSpec", "InvalidInput", "InvariantViolation",
    "Lattice", "NilpadicError", "NotInGroup", "OracleCapExceeded", "PadicContext",
    "PrecisionExhausted", "SpecValidationError", "Subgroup", "compare", "delta",
    "delta_plus", "example", "finite_quotient", "fnp", "hnf", "isolator", "load_spec",
    "nio_bounds", "normal_core", "orbitally_sound_check", "saturate", "scalar_action",
    "spec_from_dict", "structure_report", "teichmuller", "validate", "valuation",
    "xi_scalars",
]
