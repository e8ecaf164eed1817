"""Exact DoF regions and scheme simulation for the three-user broadcast
channel with delayed CSIT."""

from .config import AntennaConfig, ConditionStar, UnsupportedCase, condition_star
from .durations import (
    NegativeDuration,
    PhaseDurations,
    corner_point,
    corner_report,
    order2_antenna_params,
    order2_durations_for_target,
    solve_case2,
    solve_case3,
    solve_case4,
    verify_transformation,
)
from .geometry import Halfspace, Region
from .regions import (
    corollary_checks,
    eliminate_redundant,
    order1_faces,
    order1_outer,
    order1_region_achievable,
    order1_region_nocsit,
    order2_outer_full,
    order2_region_delayed,
    order2_region_nocsit,
    order2_region_theorem1,
)
from .scheme import SchemePlan, SizeMismatch, UnalignedSupports, build_order1_scheme, build_order2_scheme, receiver_knowledge
from .simulator import (
    DecodingReport,
    GenericityExhausted,
    batch_verify,
    draw_channels,
    run,
    run_certified,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
