"""Exact Whitehead products on derivation complexes and mapping cones of DG Lie algebras."""

__version__ = "0.1.0"

from .errors import (AlgebraMismatch, CapTooLow, DegreeError, InvalidComplex, NotACycle, ParseError,
                     QuasiIsoViolation, ValidationError, WhiteheadError)
from .graded_lie import FiniteLie, FreeLieAlgebra, LieElement, lie_basis
from .dgl import (DglMap, FreeDgl, GeneratorFiltration, homology, identity_map, is_minimal, validate,
                  validate_map)
from .derivations import (PsiDerivation, RelElement, D_psi, ad_psi, der_homology, is_boundary,
                          lift_through_quasi_iso, rel_differential, rel_homology)
from .whitehead import (ExtensionAlgebra, closed_formula_on_generator, der_whitehead, iterated_whitehead,
                        pre_whitehead, rel_whitehead, universal_example, whitehead_length)
from .function_space import (ComponentReport, SphereProblem, analyze_component, coformal_replace,
                             lie_whitehead_length, sphere_classify, wl_property_suite)
from .modelfile import load_model, parse_model, serialize

__all__ = [
    "__version__", "AlgebraMismatch", "CapTooLow", "DegreeError", "InvalidComplex", "NotACycle", "ParseError",
    "QuasiIsoViolation", "ValidationError", "WhiteheadError", "FiniteLie", "FreeLieAlgebra", "LieElement",
    "lie_basis", "DglMap", "FreeDgl", "GeneratorFiltration", "homology", "identity_map", "is_minimal",
    "validate", "validate_map", "PsiDerivation", "RelElement", "D_psi", "ad_psi", "der_homology",
    "is_boundary", "lift_through_quasi_iso", "rel_differential", "rel_homology", "ExtensionAlgebra",
    "closed_formula_on_generator", "der_whitehead", "iterated_whitehead", "pre_whitehead", "rel_whitehead",
    "universal_example", "whitehead_length", "ComponentReport", "SphereProblem", "analyze_component",
    "coformal_replace", "lie_whitehead_length", "sphere_classify", "wl_property_suite", "load_model",
    "parse_model", "serialize",
]
