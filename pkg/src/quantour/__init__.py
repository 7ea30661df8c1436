"""quantour: depth contours from directional projection quantiles.

The static pipeline projects a bivariate cloud onto K equispaced
directions, takes the left sample quantile of each projection, and
intersects the resulting halfplanes into a convex region -- O(nK) overall.
A conditional pipeline fits each directional projection against a
covariate by TV-penalized quantile regression, giving covariate-indexed
regions (growth charts).  Exact small-sample oracles (halfspace depth,
dense reference regions) validate the approximation.

Hot loops run in a compiled extension when built, with a numpy fallback
selected at import; see quantour._kernels.
"""

from . import _kernels, errors
from ._kernels import active_name as backend_name
from .conditional import (
    ChartEntry,
    ConditionalContourRequest,
    GrowthChart,
    conditional_contour,
    growth_chart,
)
from .contour import (
    ContourRegion,
    DirectionGrid,
    contains,
    contour,
    hausdorff,
    intersect_halfplanes,
    make_grid,
)
from .lp import LinearProgram, LPSolution, lp_solve
from .oracle import DepthValue, ReferenceRegion, exact_depth, reference_region_membership
from .projquant import (
    Dataset,
    Direction,
    Halfplane,
    ProjectedSample,
    QuantileLevel,
    directional_quantile,
    inf_quantile,
    project,
)
from .qreg import (
    CheckLoss,
    LineFit,
    PiecewiseLinearFit,
    directional_regression_quantile,
    qr_linear,
    qr_tv,
    rho_tau,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset", "Direction", "Halfplane", "ProjectedSample", "QuantileLevel",
    "project", "inf_quantile", "directional_quantile",
    "DirectionGrid", "ContourRegion", "make_grid", "intersect_halfplanes",
    "contour", "contains", "hausdorff",
    "DepthValue", "exact_depth", "ReferenceRegion", "reference_region_membership",
    "CheckLoss", "LineFit", "PiecewiseLinearFit", "rho_tau", "qr_linear",
    "directional_regression_quantile", "qr_tv",
    "LinearProgram", "LPSolution", "lp_solve",
    "ConditionalContourRequest", "conditional_contour", "growth_chart",
    "GrowthChart", "ChartEntry",
    "backend_name", "errors",
]
