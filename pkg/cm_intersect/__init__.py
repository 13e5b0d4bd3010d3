from ._arith import Fp2Element, MonicQuadratic, factorize, fp2_sqrt, hensel_root, kronecker
from ._cmdata import AlphaElement, ThetaHom, a_theta, enumerate_alphas, enumerate_thetas
from ._degrees import (
    ArithDegree,
    LengthBranch,
    degree_X,
    degree_X_classical,
    diff_set,
    eisenstein_coeff,
    local_length,
    orbital_integral,
)
from ._errors import (
    CMIntersectError,
    ConfigValidationError,
    InconsistentDataError,
    NonHenselianError,
    PrecisionExhaustedError,
)
from ._fields import CMPairConfig, FElement, FIdeal, PrimeF, ideal_of, rho, validate
from ._gzoracle import GZComparison, ReducedForm, gz_compare, gz_square, j_invariant, reduced_forms
from ._hecke import HeckeIntersection, IntersectionReport, intersection_number, report
from ._version import __version__

__module_name__ = "cm_intersect"

__all__ = [
    "HeckeIntersection",
    "IntersectionReport",
    "intersection_number",
    "report",
    "CMPairConfig",
    "validate",
    "FElement",
    "FIdeal",
    "PrimeF",
    "ideal_of",
    "rho",
    "AlphaElement",
    "ThetaHom",
    "a_theta",
    "enumerate_alphas",
    "enumerate_thetas",
    "ArithDegree",
    "LengthBranch",
    "diff_set",
    "local_length",
    "orbital_integral",
    "degree_X",
    "degree_X_classical",
    "eisenstein_coeff",
    "ReducedForm",
    "reduced_forms",
    "j_invariant",
    "gz_square",
    "gz_compare",
    "GZComparison",
    "Fp2Element",
    "MonicQuadratic",
    "factorize",
    "fp2_sqrt",
    "hensel_root",
    "kronecker",
    "CMIntersectError",
    "ConfigValidationError",
    "InconsistentDataError",
    "NonHenselianError",
    "PrecisionExhaustedError",
    "__version__",
]
