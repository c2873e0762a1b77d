"""Piecewise-linear skeletons and analytical decision boundaries of
fully-connected ReLU networks on bounded 1-D/2-D domains."""

from .boundex import DecisionMap, MembershipPolygon, classify, classify_many, run_boundex
from .errors import (
    GeometryError,
    InputError,
    OutOfDomainError,
    SkelexError,
    StructuralError,
    UnsupportedDimensionError,
)
from .geometry import Hyperrectangle, Polygon
from .netio import forward, forward_many, render_svg
from .pipeline import apply_relu, merge_activations, run_skelex
from .skeleton import (
    LinearRegion,
    Network,
    Skeleton,
    Vertex,
    initial_skeleton,
    linear_combination,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "DecisionMap",
    "GeometryError",
    "Hyperrectangle",
    "InputError",
    "LinearRegion",
    "MembershipPolygon",
    "Network",
    "OutOfDomainError",
    "Polygon",
    "Skeleton",
    "SkelexError",
    "StructuralError",
    "UnsupportedDimensionError",
    "Vertex",
    "apply_relu",
    "classify",
    "classify_many",
    "forward",
    "forward_many",
    "initial_skeleton",
    "linear_combination",
    "merge_activations",
    "render_svg",
    "run_boundex",
    "run_skelex",
    "validate",
]
