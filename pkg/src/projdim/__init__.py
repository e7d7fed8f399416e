"""Box-counting and Hausdorff dimension estimates for self-projective
attractors on the unit simplex, with the Rauzy gasket as the flagship preset.

The library enumerates the matrix-word tree of an iterated projective system,
evaluates hole-volume and singular-value series over it, and extracts
critical exponents from per-level growth; every analytic formula is backed
by an independent numerical oracle in projdim.oracles.
"""

__version__ = "0.1.0"

from .geometry import (
    ConvexPolytope,
    Simplex,
    facet_measures,
    image_simplex,
    incentre,
    inner_neighborhood_volume,
    inner_neighborhood_volume_upper,
    inradius,
    simplex_volume,
    standard_simplex,
    volume_ratio,
)
from .oracles import (
    BoxCountReport,
    McEstimate,
    chebyshev_center,
    grid_box_count,
    mc_inner_volume,
    projective_orbit_cloud,
    quadrature_laplace,
    sierpinski_cloud,
    to_equilateral,
)
from .series import (
    DimensionEstimate,
    ExponentEstimate,
    SeriesReport,
    bernoulli_coefficient,
    counting_exponent,
    counting_function,
    de_leo_lower_bound,
    estimate_hausdorff,
    estimate_sigma,
    hole_series,
    laplace_transform_closed,
    neighborhood_volume,
    norm_series,
    singular_series,
)
from .system import (
    HoleRecord,
    IfsSystem,
    PRESETS,
    TilingReport,
    enumerate_holes,
    load_system,
    rauzy_system,
    validate_tiling,
)
from .words import (
    ExtendedWord,
    GeneratorMatrix,
    HoleMatrix,
    MatrixProduct,
    MaxDepth,
    NormCap,
    TraversalSummary,
    VolumeFloor,
    Word,
    compose,
    enumerate_words,
    l1_operator_norm,
    projectivize,
    singular_values,
)

__all__ = [
    "__version__",
    "BoxCountReport", "ConvexPolytope", "DimensionEstimate", "ExponentEstimate",
    "ExtendedWord", "GeneratorMatrix", "HoleMatrix", "HoleRecord", "IfsSystem",
    "MatrixProduct", "MaxDepth", "McEstimate", "NormCap", "PRESETS",
    "SeriesReport", "Simplex", "TilingReport", "TraversalSummary", "VolumeFloor",
    "Word", "bernoulli_coefficient", "chebyshev_center", "compose",
    "counting_exponent", "counting_function", "de_leo_lower_bound",
    "enumerate_holes", "enumerate_words", "estimate_hausdorff", "estimate_sigma",
    "facet_measures", "grid_box_count", "hole_series", "image_simplex",
    "incentre", "inner_neighborhood_volume", "inner_neighborhood_volume_upper",
    "inradius", "l1_operator_norm", "laplace_transform_closed", "load_system",
    "mc_inner_volume", "neighborhood_volume", "norm_series",
    "projective_orbit_cloud", "projectivize", "quadrature_laplace",
    "rauzy_system", "sierpinski_cloud", "simplex_volume", "singular_series",
    "singular_values", "standard_simplex", "to_equilateral", "validate_tiling",
    "volume_ratio",
]
