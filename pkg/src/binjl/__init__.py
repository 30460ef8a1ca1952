"""One-bit sketches of real vectors.

Encode real vectors as short bit strings with dithered one-bit random
projections, then estimate distances, inner products and squared distances
directly from the bits.
"""

from binjl._jit import USE_NUMBA
from binjl.bitcode import BinaryCode, DualCode, complement, hamming, pack, signed_dot, unpack
from binjl.circulant_sketch import (
    CirculantSketcher,
    apply_structured,
    circulant_matvec,
    embed_dual_words,
    sample_circulant_sketcher,
)
from binjl.circulant_sketch import embed_dual as embed_dual_circulant
from binjl.complexity import (
    AdvisorConstants,
    ComplexityReport,
    ParameterAdvice,
    advise_circulant,
    advise_gaussian,
    complexity_report,
    greedy_net,
    localized_gaussian_complexity,
)
from binjl.errors import FormatError, RegimeInfeasibleError
from binjl.estimators import (
    EstimatorParams,
    estimate_distance,
    estimate_inner_product,
    estimate_sq_distance,
    expected_distance_given_rows,
    expected_product,
    sm_bilinear,
)
from binjl.gaussian_sketch import (
    GaussianSketcher,
    QuantizerConfig,
    bias_bound,
    collision_probability,
    default_lambda,
    embed,
    sample_gaussian_sketcher,
)

__version__ = "0.1.0"
