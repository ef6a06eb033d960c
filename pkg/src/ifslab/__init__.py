"""ifslab: finite-scale entropy, overlap, and transversality analysis for
self-similar measures on the line.

The library makes the finite-scale objects of the entropy/overlap theory
of self-similar measures computable: dyadic-scale entropies, exact
cylinder separation distances, component-measure statistics, convolution
entropy increments, and covering-based bounds on exceptional parameter
sets of polynomially parametrized IFS families.
"""

__version__ = "0.1.0"

from .exact import AlgebraicNumber, LogSum, NumberField, parse_scalar
from .ifs import (
    CylinderWord,
    Ifs,
    OverlapReport,
    SimilarityMap,
    compose,
    delta_n,
    generation_measure,
    rasterize_self_similar,
    sdim_measure,
    sdim_set,
    stopping_section,
    tagged_generation_measure,
    translate_to_attractor,
)
from .measures import (
    AtomicMeasure,
    ComponentRecord,
    DyadicCellIndex,
    DyadicMeasure,
    components,
    conditional_entropy,
    convolve,
    discretize,
    entropy,
    moments,
    restrict_and_normalize,
    tv_distance,
)

__all__ = [
    "AlgebraicNumber", "LogSum", "NumberField", "parse_scalar",
    "CylinderWord", "Ifs", "OverlapReport", "SimilarityMap", "compose",
    "delta_n", "generation_measure", "rasterize_self_similar",
    "sdim_measure", "sdim_set", "stopping_section",
    "tagged_generation_measure", "translate_to_attractor",
    "AtomicMeasure", "ComponentRecord", "DyadicCellIndex", "DyadicMeasure",
    "components", "conditional_entropy", "convolve", "discretize",
    "entropy", "moments", "restrict_and_normalize", "tv_distance",
    "__version__",
]
