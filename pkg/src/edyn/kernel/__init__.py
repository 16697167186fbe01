"""Effective-topology kernel: fuel calculus, regions, spaces, sets, maps."""

from edyn.kernel.fuel import Enumerator, Refuted, SemiDecision, StagedQuery, stages
from edyn.kernel.maps import (
    ComputableMap,
    ComputablePoint,
    fixed_point_set,
    identity_map,
    image_compact,
    map_compose,
    product_map,
    pushforward_open,
)
from edyn.kernel.regions import (
    EMPTY,
    AntiBall,
    Arc,
    Box,
    Iv,
    MetricBall,
    OriginPt,
    PBox,
    RingArc,
)
from edyn.kernel.sets import (
    EffClosedSet,
    EffOpenSet,
    RecCompactSet,
    approx_distance,
    closed_to_compact,
    compact_to_closed,
    covers_within,
    power_space,
    product_space,
    semi_decide_cover,
    semi_decide_empty,
)
from edyn.kernel.space import (
    CantorSpace,
    CircleSpace,
    DiskCirclesSpace,
    IntervalSpace,
    ProductSpace,
    Space,
)

__all__ = [
    "Enumerator",
    "Refuted",
    "SemiDecision",
    "StagedQuery",
    "stages",
    "ComputableMap",
    "ComputablePoint",
    "fixed_point_set",
    "identity_map",
    "image_compact",
    "map_compose",
    "product_map",
    "pushforward_open",
    "EMPTY",
    "AntiBall",
    "Arc",
    "Box",
    "Iv",
    "MetricBall",
    "OriginPt",
    "PBox",
    "RingArc",
    "EffClosedSet",
    "EffOpenSet",
    "RecCompactSet",
    "approx_distance",
    "closed_to_compact",
    "compact_to_closed",
    "covers_within",
    "power_space",
    "product_space",
    "semi_decide_cover",
    "semi_decide_empty",
    "CantorSpace",
    "CircleSpace",
    "DiskCirclesSpace",
    "IntervalSpace",
    "ProductSpace",
    "Space",
]
