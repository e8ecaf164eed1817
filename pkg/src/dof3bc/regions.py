"""Closed-form DoF regions for the three-user broadcast channel.

Order-2 coordinates are (d12, d23, d13); order-1 coordinates are (d1, d2, d3).
Every constructor returns a bounded Region over exact rationals, with the
nonnegativity constraints included.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .config import AntennaConfig, ConditionStar, UnsupportedCase, condition_star
from .geometry import Region, convex_hull, embed_face, region_from_rows


def _f(p, q=1) -> Fraction:
    return Fraction(p, q)


def order2_region_delayed(cfg: AntennaConfig) -> Region:
    """DoF region of order-2 messages with delayed CSIT.

    For M <= N2 this is the single-inequality region; for N2 < M it is the
    two- or three-inequality region (the third inequality exists only when
    N3 < M).  Both agree set-wise with the unified three-row form.
    """
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    if m <= n2:
        a = _f(1, min(m, n1))
        rows = [((a, _f(1, m), a), 1)]
        return region_from_rows(3, rows, name=f"D2.delayed({cfg})")
    b12 = min(m, n1 + n2)
    rows = [
        ((_f(1, n1), _f(1, b12), _f(1, n1)), 1),
        ((_f(1, n2), _f(1, n2), _f(1, b12)), 1),
    ]
    if n3 < m:
        b13 = min(m, n1 + n3)
        rows.append(((_f(1, b13), _f(1, n3), _f(1, n3)), 1))
    return region_from_rows(3, rows, name=f"D2.delayed({cfg})")


def order2_region_theorem1(cfg: AntennaConfig) -> Region:
    """The unified three-inequality form of the order-2 region."""
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    rows = [
        ((_f(1, min(m, n1)), _f(1, min(m, n1 + n2)), _f(1, min(m, n1))), 1),
        ((_f(1, min(m, n2)), _f(1, min(m, n2)), _f(1, min(m, n1 + n2))), 1),
        ((_f(1, min(m, n1 + n3)), _f(1, min(m, n3)), _f(1, min(m, n3))), 1),
    ]
    return region_from_rows(3, rows, name=f"D2.theorem1({cfg})")


def order2_outer_full(cfg: AntennaConfig) -> Region:
    """The six-inequality outer region before redundancy elimination."""
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    rows = [
        ((_f(1, min(m, n1)), _f(1, min(m, n1 + n2)), _f(1, min(m, n1))), 1),
        ((_f(1, min(m, n1)), _f(1, min(m, n1 + n3)), _f(1, min(m, n1))), 1),
        ((_f(1, min(m, n2)), _f(1, min(m, n2)), _f(1, min(m, n1 + n2))), 1),
        ((_f(1, min(m, n2)), _f(1, min(m, n2)), _f(1, min(m, n2 + n3))), 1),
        ((_f(1, min(m, n1 + n3)), _f(1, min(m, n3)), _f(1, min(m, n3))), 1),
        ((_f(1, min(m, n2 + n3)), _f(1, min(m, n3)), _f(1, min(m, n3))), 1),
    ]
    return region_from_rows(3, rows, name=f"D2.outer6({cfg})")


def eliminate_redundant(region: Region) -> Region:
    """Drop duplicated and certified-dominated halfspaces (observable step)."""
    return region.canonicalize()


def order2_region_nocsit(cfg: AntennaConfig) -> Region:
    n1, n2, m = cfg.n1, cfg.n2, cfg.m
    a = _f(1, min(m, n1))
    rows = [((a, _f(1, min(m, n2)), a), 1)]
    return region_from_rows(3, rows, name=f"D2.nocsit({cfg})")


def order1_region_nocsit(cfg: AntennaConfig) -> Region:
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    rows = [((_f(1, min(m, n1)), _f(1, min(m, n2)), _f(1, min(m, n3))), 1)]
    return region_from_rows(3, rows, name=f"D1.nocsit({cfg})")


def order1_outer(cfg: AntennaConfig) -> Region:
    """The printed outer region: three planes for Case 2, four for Case 3."""
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    case = cfg.order1_case
    if case not in (2, 3):
        raise UnsupportedCase(f"no printed order-1 outer region for case {case} ({cfg})")
    rows = [
        ((_f(1, n1), _f(1, n1 + n2), _f(1, m)), 1),
        ((_f(1, n1 + n2), _f(1, n2), _f(1, m)), 1),
    ]
    if case == 2:
        rows.append(((_f(1, m), _f(1, m), _f(1, n3)), 1))
    else:
        rows.append(((_f(1, n1 + n3), _f(1, m), _f(1, n3)), 1))
        rows.append(((_f(1, n1), _f(1, m), _f(1, n1 + n3)), 1))
    return region_from_rows(3, rows, name=f"D1.outer({cfg})")


def order1_faces(cfg: AntennaConfig) -> Tuple[Region, Region, Region]:
    """The 2D faces D1 (on d2,d3), D2 (on d1,d3), D3 (on d1,d2)."""
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    case = cfg.order1_case
    if case not in (2, 3, 4):
        raise UnsupportedCase(f"order-1 faces undefined for case {case} ({cfg})")
    if case == 2:
        d1 = [((_f(1, n2), _f(1, m)), 1), ((_f(1, m), _f(1, n3)), 1)]
        d2 = [((_f(1, n1), _f(1, m)), 1), ((_f(1, m), _f(1, n3)), 1)]
    elif case == 3:
        d1 = [((_f(1, n2), _f(1, m)), 1), ((_f(1, m), _f(1, n3)), 1)]
        d2 = [((_f(1, n1 + n3), _f(1, n3)), 1), ((_f(1, n1), _f(1, n1 + n3)), 1)]
    else:
        d1 = [((_f(1, n2), _f(1, n2 + n3)), 1), ((_f(1, n2 + n3), _f(1, n3)), 1)]
        d2 = [((_f(1, n1 + n3), _f(1, n3)), 1), ((_f(1, n1), _f(1, n1 + n3)), 1)]
    d3 = [((_f(1, n1), _f(1, n1 + n2)), 1), ((_f(1, n1 + n2), _f(1, n2)), 1)]
    return (
        region_from_rows(2, d1, name=f"D^1({cfg})"),
        region_from_rows(2, d2, name=f"D^2({cfg})"),
        region_from_rows(2, d3, name=f"D^3({cfg})"),
    )


def order1_region_achievable(cfg: AntennaConfig) -> Region:
    """Convex hull of the three embedded faces and the corner point P0."""
    from .durations import corner_point

    f1, f2, f3 = order1_faces(cfg)
    points = embed_face(f1, 0) + embed_face(f2, 1) + embed_face(f3, 2)
    points.append(tuple(corner_point(cfg)))
    hull = convex_hull(points, 3, name=f"D1.achievable({cfg})")
    return hull


@dataclass
class CorollaryReport:
    """Optimality facts derivable from Corollaries 1 and 2."""

    cfg: AntennaConfig
    case: int
    condition: ConditionStar
    regions_equal: Optional[bool]
    sum_dof_achievable: Optional[Fraction]
    sum_dof_outer: Optional[Fraction]
    gap: Optional[Fraction]


def corollary_checks(cfg: AntennaConfig) -> CorollaryReport:
    """Compare the achievable region against the printed outer region.

    For Case 2 with the condition holding with equality, the regions must be
    set-equal (Corollary 1).  For Case 3 the report carries the sum-DoF gap,
    which shrinks as M comes down to N1+N3 (Corollary 2); for Case 4 no outer
    region is printed, so only the achievable sum-DoF is reported.
    """
    case = cfg.order1_case
    cond = condition_star(cfg)
    ones = [_f(1)] * 3
    if case in (2, 3):
        ach = order1_region_achievable(cfg)
        out = order1_outer(cfg)
        ach_sum, _ = ach.maximize(ones)
        out_sum, _ = out.maximize(ones)
        return CorollaryReport(
            cfg,
            case,
            cond,
            regions_equal=ach.set_equal(out),
            sum_dof_achievable=ach_sum,
            sum_dof_outer=out_sum,
            gap=out_sum - ach_sum,
        )
    if case == 4:
        ach = order1_region_achievable(cfg)
        ach_sum, _ = ach.maximize(ones)
        return CorollaryReport(cfg, case, cond, None, ach_sum, None, None)
    return CorollaryReport(cfg, case, cond, None, None, None, None)


def nocsit_vs_delayed_order2(cfg: AntennaConfig) -> str:
    """Subset verdict between the no-CSIT and delayed order-2 regions."""
    no = order2_region_nocsit(cfg)
    de = order2_region_delayed(cfg)
    if not no.subset(de):
        raise AssertionError("no-CSIT order-2 region must be inside the delayed one")
    return "equal" if de.subset(no) else "strict"
