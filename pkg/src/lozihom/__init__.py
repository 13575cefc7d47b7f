"""Stable and unstable manifolds of the Lozi map, homoclinic tangencies and
the boundary curves of the region where homoclinic points exist.

The hot loops live in a compiled extension; ``lozihom.kernels.BACKEND``
says which implementation was loaded ("cython" or "python").
"""
__version__ = "0.1.0"

from .core import (  # noqa: E402
    EigenData,
    Params,
    Point,
    PolyLine,
    Segment,
    apply,
    apply_inverse,
    eigen_data,
    fixed_points,
    iterate,
    map_polyline,
    point_V,
    point_Z,
)
from .errors import *  # noqa: E402,F401,F403
from .kernels import BACKEND  # noqa: E402
from .manifolds import (  # noqa: E402
    Label,
    ManifoldArc,
    SlopeSequence,
    UnstablePieces,
    first_delta_crossing,
    slope_closed_form,
    slope_sequence,
    stable_arc,
    unstable_arc,
    unstable_pieces,
    zigzag_index,
    zigzag_legs,
)
from .intersect import (  # noqa: E402
    IntersectionRecord,
    TangencyReport,
    check_last_tangency,
    classify_intersection,
    has_homoclinic,
    homoclinic_on_fundamental,
    polyline_intersections,
)
from .boundary import (  # noqa: E402
    AlgebraicCurve,
    BoundaryCondition,
    CurveTrace,
    condition_value,
    misiurewicz_check,
    scan_region,
    solve_endpoint,
    table1_residual,
    trace_curve,
)
