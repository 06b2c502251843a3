"""Boundary resolution of piecewise-linear classifiers.

Region and facet counting for shallow rectifier/maxout classifiers, closed-form
size bounds, and deep rectifier networks that approximate the Euclidean norm
by repeated angle halving.
"""

from .arrangement import (
    Cell,
    ShlNetwork,
    classify_cells,
    count_boundary_facets,
    enumerate_cells,
    is_general_position,
    theorem5_experiment,
)
from .bounds import (
    BoundsReport,
    bounds_report,
    cone_like_count,
    deep_net_size,
    efficiency_ratio,
    error_bound,
    facets_required,
    lemma6_check,
    regions_max,
    shl_units_lower,
)
from .errors import DegenerateBoundaryError, NumericalError, PwlError
from .geometry import AffineUnit, MaxoutClassifier, boundary_sign_probe, eval_maxout, redundant_units
from .netbuilder import LayeredNetwork, build_norm2d, build_norm_nd, classify_ball, eval_network
from .verify import (
    McVolumeResult,
    count_segments_2d,
    mc_volume_excess,
    reproduce_theorem11,
    sandwich_sweep,
)

__version__ = "0.1.0"
