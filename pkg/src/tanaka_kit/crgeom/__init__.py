"""CR geometry of tube hypersurfaces over surfaces built from curves in R^4."""

from .curves import (
    Curve,
    HomogeneousCurve,
    NondegeneracyReport,
    UnsupportedCase,
    catalog,
    catalog_entry,
    curve_from_dict,
    curve_nondegenerate,
    is_rational_normal_generator,
    jordan_nondegenerate,
    load_curve,
    rnc_spectrum_test,
    wronskian4,
)
from .fields import ChartError, VectorField, vf_bracket
from .functions import CoordFunction, FunctionError, FunctionRing
from .levi import (
    FreemanReport,
    InclusionReport,
    LeviForm,
    NormalizedSections,
    NotThreeNondegenerate,
    check_bracket_inclusions,
    freeman_ranks,
    gauge_equivalent,
    levi_form,
    normalized_sections,
)
from .symmetry import SymmetryAlgebraReport, SymmetryVerdict, affine_field, is_cr_symmetry, tube_symmetry_algebra
from .tube import TubeError, TubeModel, Variant, build_tube, hyperquadric_tube, tube_from_parametrization

__all__ = [
    "ChartError", "CoordFunction", "Curve", "FreemanReport", "FunctionError", "FunctionRing",
    "HomogeneousCurve", "InclusionReport", "LeviForm", "NondegeneracyReport", "NormalizedSections",
    "NotThreeNondegenerate", "SymmetryAlgebraReport", "SymmetryVerdict", "TubeError", "TubeModel",
    "UnsupportedCase", "Variant", "VectorField", "affine_field", "build_tube", "catalog",
    "catalog_entry", "check_bracket_inclusions", "curve_from_dict", "curve_nondegenerate",
    "freeman_ranks", "gauge_equivalent", "hyperquadric_tube", "is_cr_symmetry",
    "is_rational_normal_generator", "jordan_nondegenerate", "levi_form", "load_curve",
    "normalized_sections", "rnc_spectrum_test", "tube_from_parametrization", "tube_symmetry_algebra",
    "vf_bracket", "wronskian4",
]
