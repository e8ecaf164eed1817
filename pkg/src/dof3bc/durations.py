"""Phase-duration systems, corner points, and the transformation identities.

Durations are solved exactly as homogeneous rational linear systems and
normalized to the smallest integer vector so that every emitted scheme uses
whole time slots.  The Case-2 published closed forms are kept as an oracle
(``case2_closed_form``); Cases 3 and 4 are solved from their defining systems
directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .config import AntennaConfig, ConditionStar, UnsupportedCase, condition_star
from .exact import normalize_integers, nullspace, solve_unique

DoFTuple = Tuple[Fraction, Fraction, Fraction]


class NegativeDuration(Exception):
    """The Case-4 duration system has no nonnegative solution for this config."""


class InconsistentCorner(Exception):
    """The duration route and the plane-intersection route disagree (a bug)."""


class IdentityViolated(Exception):
    pass


class TargetOutsideRegion(Exception):
    pass


class ZeroTarget(Exception):
    pass


@dataclass(frozen=True)
class PhaseDurations:
    """Integer TS counts (T1, T2, T3, T12, T23, T13, T); order-2 schemes use
    T1 = T2 = T3 = 0."""

    t1: int
    t2: int
    t3: int
    t12: int
    t23: int
    t13: int
    t: int
    branch: str = "primary"

    def __post_init__(self):
        if min(self.t1, self.t2, self.t3, self.t12, self.t23, self.t13, self.t) < 0:
            raise NegativeDuration(f"negative duration in {self}")

    @property
    def alpha(self) -> int:
        return self.t1 + self.t2 + self.t3 + self.beta

    @property
    def beta(self) -> int:
        return self.t12 + self.t23 + self.t13 + self.t

    def as_tuple(self) -> Tuple[int, ...]:
        return (self.t1, self.t2, self.t3, self.t12, self.t23, self.t13, self.t)


def order2_antenna_params(cfg: AntennaConfig) -> Tuple[int, int, int, int]:
    """(B1, B2, B3, C) of the general two-phase order-2 scheme."""
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    if m <= n2:
        raise UnsupportedCase(f"M <= N2 needs no two-phase scheme ({cfg})")
    if m <= n3:
        return (m, min(m, n1 + n2), min(m, n1 + n2), n2)
    return (min(m, n1 + n3), min(m, n1 + n2), min(m, n1 + n2), n3)


def order2_lacks(
    cfg: AntennaConfig, t12: Fraction, t23: Fraction, t13: Fraction
) -> Tuple[Fraction, Fraction, Fraction]:
    """Per-receiver equation deficits after the order-2 Phase-I transmission."""
    n1, n2, n3 = cfg.n1, cfg.n2, cfg.n3
    b1, b2, b3, _ = order2_antenna_params(cfg)
    return (
        t12 * (b1 - n1) + t13 * (b3 - n1),
        t12 * (b1 - n2) + t23 * (b2 - n2),
        t13 * (b3 - n3) + t23 * (b2 - n3),
    )


def order2_durations_for_target(cfg: AntennaConfig, target: Sequence) -> PhaseDurations:
    """Durations whose two-phase scheme realizes ``target`` = (d12, d23, d13).

    T is the smallest value covering every receiver's deficit; when the target
    sits on the region boundary the realized tuple equals it exactly, and an
    interior target is realized as its radial projection onto the boundary.
    """
    from .regions import order2_region_delayed

    d12, d23, d13 = (Fraction(x) for x in target)
    if d12 == d23 == d13 == 0:
        raise ZeroTarget("target (0,0,0) has no scheme")
    if min(d12, d23, d13) < 0 or not order2_region_delayed(cfg).contains([d12, d23, d13]):
        raise TargetOutsideRegion(f"{target} outside the order-2 region of {cfg}")
    b1, b2, b3, _ = order2_antenna_params(cfg)
    t12, t23, t13 = d12 / b1, d23 / b2, d13 / b3
    l1, l2, l3 = order2_lacks(cfg, t12, t23, t13)
    t = max(
        l1 / cfg.n1,
        l2 / cfg.n2,
        max(Fraction(0), l3) / cfg.n3,
    )
    ints = normalize_integers([t12, t23, t13, t])
    return PhaseDurations(0, 0, 0, ints[0], ints[1], ints[2], ints[3])


def order2_realized_tuple(cfg: AntennaConfig, dur: PhaseDurations) -> DoFTuple:
    b1, b2, b3, _ = order2_antenna_params(cfg)
    beta = Fraction(dur.beta)
    return (
        Fraction(dur.t12 * b1) / beta,
        Fraction(dur.t23 * b2) / beta,
        Fraction(dur.t13 * b3) / beta,
    )


def _positive_ray(system: List[List[Fraction]]) -> List[Fraction]:
    """The one-dimensional kernel of a homogeneous system, oriented by T > 0.

    The unknown order is (T12, T23, T13, T); raises if the kernel is not a
    line (would indicate a degenerate antenna configuration upstream).
    """
    ker = nullspace(system)
    if len(ker) != 1:
        raise ValueError(f"duration system kernel has dim {len(ker)}, expected 1")
    ray = ker[0]
    if ray[-1] == 0:
        raise ValueError("duration kernel has T = 0")
    if ray[-1] < 0:
        ray = [-x for x in ray]
    return ray


def case2_system(cfg: AntennaConfig) -> List[List[Fraction]]:
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    return [
        [Fraction(m - n1), Fraction(0), Fraction(n2), Fraction(-n1)],
        [Fraction(m - n2), Fraction(n1), Fraction(0), Fraction(-n2)],
        [Fraction(0), Fraction(n1 + n2 - n3), Fraction(n1 + n2 - n3), Fraction(-n3)],
    ]


def case3_system(cfg: AntennaConfig) -> List[List[Fraction]]:
    n1, n2, n3 = cfg.n1, cfg.n2, cfg.n3
    return [
        [Fraction(n3), Fraction(0), Fraction(n2), Fraction(-n1)],
        [Fraction(n1 + n3 - n2), Fraction(n1), Fraction(0), Fraction(-n2)],
        [Fraction(0), Fraction(n1 + n2 - n3), Fraction(n1 + n2 - n3), Fraction(-n3)],
    ]


def case2_closed_form(cfg: AntennaConfig) -> Tuple[int, int, int, int]:
    """Published Case-2 closed form for (T12, T23, T13, T); oracle for tests."""
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    t12 = n1 * n2 * (n1 + n2 - n3) - n1**2 * (n3 - n1) - n2**2 * (n3 - n2)
    t23 = n2**2 * (m - n3) + m * n1 * (n3 - n1)
    t13 = n1**2 * (m - n3) + m * n2 * (n3 - n2)
    t = (n1 + n2 - n3) * (m * n1 - n1**2 + m * n2 - n2**2)
    return (t12, t23, t13, t)


def _phase1_from_phase2(
    cfg: AntennaConfig, case: int, t12: Fraction, t23: Fraction, t13: Fraction
) -> Tuple[Fraction, Fraction, Fraction]:
    """Invert the per-case slot-fit relations to get the Phase-I durations."""
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    if case == 2:
        return (t12 * m / (n1 + n2), t23 * (n1 + n2) / m, t13 * (n1 + n2) / m)
    if case == 3:
        return (
            t12 * (n1 + n3) / (n1 + n2),
            t23 * (n1 + n2) / m,
            t13 * (n1 + n2) / (n1 + n3),
        )
    if case == 4:
        return (t12 * (n1 + n3) / m, t23 * (n1 + n2) / m, t13 * (n1 + n2) / m)
    raise UnsupportedCase(f"case {case}")


def _pack(case: int, cfg, phase2: Sequence[Fraction], branch: str) -> PhaseDurations:
    t12, t23, t13, t = (Fraction(x) for x in phase2)
    t1, t2, t3 = _phase1_from_phase2(cfg, case, t12, t23, t13)
    ints = normalize_integers([t1, t2, t3, t12, t23, t13, t])
    return PhaseDurations(*ints, branch=branch)


def _solve_case23(cfg: AntennaConfig, case: int) -> PhaseDurations:
    cond = condition_star(cfg)
    if cond is ConditionStar.FAILS:
        n1, n2 = cfg.n1, cfg.n2
        phase2 = [Fraction(0), Fraction(n2 * n2), Fraction(n1 * n1), Fraction(n1 * n2)]
        return _pack(case, cfg, phase2, branch="t12_zero")
    system = case2_system(cfg) if case == 2 else case3_system(cfg)
    ray = _positive_ray(system)
    if min(ray) < 0:
        raise AssertionError(f"condition holds but {case=} ray is {ray} for {cfg}")
    return _pack(case, cfg, ray, branch="primary")


def solve_case2(cfg: AntennaConfig) -> PhaseDurations:
    if cfg.order1_case != 2:
        raise UnsupportedCase(f"{cfg} is not a Case-2 configuration")
    return _solve_case23(cfg, 2)


def solve_case3(cfg: AntennaConfig) -> PhaseDurations:
    if cfg.order1_case != 3:
        raise UnsupportedCase(f"{cfg} is not a Case-3 configuration")
    return _solve_case23(cfg, 3)


def case4_system(cfg: AntennaConfig) -> List[List[Fraction]]:
    """Case-4 duration system over (T1, T2, T3, T) after slot-fit substitution.

    The per-receiver extra terms follow the order-3 side-information cycle
    (receiver 1 completes its third-step symbols, receiver 2 its first-step
    ones, receiver 3 its second-step ones), which is what the equation audit
    of the additional-symbol construction requires.
    """
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    q12 = Fraction(m, n1 + n3)
    q2 = Fraction(m, n1 + n2)
    return [
        [q12 * n3, Fraction(0), q2 * n2 + (m - n1 - n3), Fraction(-n1)],
        [q12 * (n1 + n3 - n2) + (m - n1 - n2), q2 * n1, Fraction(0), Fraction(-n2)],
        [Fraction(0), q2 * (n1 + n2 - n3) + (m - n2 - n3), q2 * (n1 + n2 - n3), Fraction(-n3)],
    ]


def solve_case4(cfg: AntennaConfig) -> PhaseDurations:
    if cfg.order1_case != 4:
        raise UnsupportedCase(f"{cfg} is not a Case-4 configuration")
    ray = _positive_ray(case4_system(cfg))
    if min(ray) < 0:
        raise NegativeDuration(f"no nonnegative Case-4 durations for {cfg}: ray {ray}")
    t1, t2, t3, t = ray
    n1, n2, m = cfg.n1, cfg.n2, cfg.m
    t12 = t1 * m / (n1 + cfg.n3)
    t23 = t2 * m / (n1 + n2)
    t13 = t3 * m / (n1 + n2)
    ints = normalize_integers([t1, t2, t3, t12, t23, t13, t])
    return PhaseDurations(*ints, branch="primary")


def solve_for_case(cfg: AntennaConfig, allow_boundary: bool = False) -> PhaseDurations:
    case = cfg.order1_case
    if case == 2:
        return solve_case2(cfg)
    if case == 3:
        return solve_case3(cfg)
    if case == 4:
        return solve_case4(cfg)
    if allow_boundary and cfg.m == cfg.n1 + cfg.n2 and cfg.m >= cfg.n3:
        # Case-2 boundary toy (e.g. the single-antenna M=2 example); the
        # three-phase construction degenerates gracefully there.
        return _solve_case23(cfg, 2)
    raise UnsupportedCase(f"order-1 scheme undefined for case {case} ({cfg})")


def dof_tuple_from_durations(cfg: AntennaConfig, dur: PhaseDurations, case: int) -> DoFTuple:
    """The achievable order-1 tuple of the three-phase scheme."""
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    a = Fraction(dur.alpha)
    t1, t2, t3 = dur.t1, dur.t2, dur.t3
    if case == 2:
        return (
            (t1 * (n1 + n2) + t3 * m) / a,
            (t1 * (n1 + n2) + t2 * m) / a,
            Fraction((t2 + t3) * m) / a,
        )
    if case == 3:
        return (
            (t1 * (n1 + n2) + t3 * (n1 + n3)) / a,
            (t1 * (n1 + n2) + t2 * m) / a,
            (t2 * m + t3 * (n1 + n3)) / a,
        )
    if case == 4:
        return (
            Fraction((t1 + t3) * m) / a,
            Fraction((t1 + t2) * m) / a,
            Fraction((t2 + t3) * m) / a,
        )
    raise UnsupportedCase(f"case {case}")


def _plane(coeffs: Sequence[Fraction], rhs: Fraction) -> Tuple[Tuple[Fraction, ...], Fraction]:
    return (tuple(coeffs), rhs)


def corner_planes(
    cfg: AntennaConfig, case: int, branch: str
) -> List[Tuple[Tuple[Fraction, ...], Fraction]]:
    """The three planes whose intersection is the corner point P0."""
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    zero = Fraction(0)

    def acc(*terms):
        # each term: (coefficient, mask over (d1, d2, d3))
        out = [zero, zero, zero]
        for coef, mask in terms:
            for i in range(3):
                out[i] += coef * mask[i]
        return out

    one = Fraction(1)
    deg = _plane([one, one, -one], zero)
    if case == 2:
        p1 = _plane([Fraction(1, n1), Fraction(1, n1 + n2), Fraction(1, m)], one)
        p2 = _plane([Fraction(1, n1 + n2), Fraction(1, n2), Fraction(1, m)], one)
        if branch != "primary":
            return [p1, p2, deg]
        k = Fraction(m - n1 - n2, 2 * (n1 + n2) * m)
        p3 = _plane(
            acc(
                (Fraction(1, m), (1, 1, 0)),
                (Fraction(1, n3), (0, 0, 1)),
                (k, (1, 1, -1)),
            ),
            one,
        )
        return [p1, p2, p3]
    if case == 3:
        e = Fraction(m - n1 - n3, 2 * (n1 + n3) * m)
        p1 = _plane(
            acc(
                (Fraction(1, n1), (1, 0, 0)),
                (Fraction(1, n1 + n2), (0, 1, 0)),
                (Fraction(1, m), (0, 0, 1)),
                (e, (1, -1, 1)),
            ),
            one,
        )
        p2 = _plane(
            acc(
                (Fraction(1, n1 + n2), (1, 0, 0)),
                (Fraction(1, n2), (0, 1, 0)),
                (Fraction(1, m), (0, 0, 1)),
                (e, (1, -1, 1)),
            ),
            one,
        )
        if branch != "primary":
            return [p1, p2, deg]
        k = Fraction(m - n1 - n2, 2 * (n1 + n2) * m)
        p3 = _plane(
            acc(
                (Fraction(1, n1 + n3), (1, 0, 0)),
                (Fraction(1, m), (0, 1, 0)),
                (Fraction(1, n3), (0, 0, 1)),
                (k, (1, 1, -1)),
            ),
            one,
        )
        return [p1, p2, p3]
    if case == 4:
        half_m = Fraction(1, 2 * m)
        g1 = Fraction(m - n1 - n3, 2 * m * n1)
        g2 = Fraction(m - n1 - n2, 2 * m * n2)
        g3 = Fraction(m - n2 - n3, 2 * m * n3)
        p1 = _plane(
            acc(
                (half_m, (1, 1, 1)),
                (Fraction(1, n1), (1, 0, 0)),
                (Fraction(1, 2 * (n1 + n2)), (-1, 1, 1)),
                (g1, (1, -1, 1)),
            ),
            one,
        )
        p2 = _plane(
            acc(
                (half_m, (1, 1, 1)),
                (Fraction(1, n2), (0, 1, 0)),
                (Fraction(1, 2 * (n1 + n2)), (1, -1, 1)),
                (g2, (1, 1, -1)),
            ),
            one,
        )
        p3 = _plane(
            acc(
                (half_m, (1, 1, 1)),
                (Fraction(1, n3), (0, 0, 1)),
                (Fraction(1, 2 * (n1 + n3)), (1, 1, -1)),
                (g3, (-1, 1, 1)),
            ),
            one,
        )
        return [p1, p2, p3]
    raise UnsupportedCase(f"case {case}")


@dataclass
class CornerReport:
    cfg: AntennaConfig
    case: int
    branch: str
    durations: PhaseDurations
    point: DoFTuple
    tight_planes: List[Tuple[Tuple[Fraction, ...], Fraction]]


def corner_report(cfg: AntennaConfig, allow_boundary: bool = False) -> CornerReport:
    """P0 computed two independent ways: from durations and from the planes."""
    case = cfg.order1_case
    if case not in (2, 3, 4):
        if not allow_boundary:
            raise UnsupportedCase(f"no corner point for case {case} ({cfg})")
        case = 2
    dur = solve_for_case(cfg, allow_boundary=allow_boundary)
    via_durations = dof_tuple_from_durations(cfg, dur, case)
    planes = corner_planes(cfg, case, dur.branch)
    via_planes = tuple(solve_unique([list(c) for c, _ in planes], [b for _, b in planes]))
    if via_durations != via_planes:
        raise InconsistentCorner(
            f"{cfg}: duration route {via_durations} != plane route {via_planes}"
        )
    if case == 4:
        d1, d2, d3 = via_durations
        gates = (d1 + d2 - d3, d2 + d3 - d1, d1 + d3 - d2)
        if min(gates) < 0:
            raise NegativeDuration(f"corner point of {cfg} violates a triangle gate")
    return CornerReport(cfg, case, dur.branch, dur, via_durations, planes)


def corner_point(cfg: AntennaConfig) -> DoFTuple:
    return corner_report(cfg).point


@dataclass
class TransformationReport:
    cfg: AntennaConfig
    case: int
    branch: str
    system_residuals: List[Fraction]
    plane_values: List[Fraction]
    ratio_identities: List[Tuple[str, Fraction, Fraction]]

    def ok(self) -> bool:
        return (
            all(r == 0 for r in self.system_residuals)
            and all(v == 1 or v == 0 for v in self.plane_values)
            and all(a == b for _, a, b in self.ratio_identities)
        )


def verify_transformation(cfg: AntennaConfig) -> TransformationReport:
    """Replay the decoding-condition-to-plane transformation mechanically.

    Checks (a) the solved durations satisfy the duration system exactly,
    (b) every corner plane evaluates to exactly its right-hand side at P0,
    (c) the duration/DoF ratio identities hold.  Raises IdentityViolated if
    any check fails.
    """
    rep = corner_report(cfg)
    dur, case = rep.durations, rep.case
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    t1, t2, t3, t12, t23, t13, t = (Fraction(x) for x in dur.as_tuple())

    residuals: List[Fraction] = []
    if case == 2:
        residuals = [
            t12 * (m - n1) + t13 * n2 - t * n1,
            t12 * (m - n2) + t23 * n1 - t * n2,
        ]
        if dur.branch == "primary":
            residuals.append((t13 + t23) * (n1 + n2 - n3) - t * n3)
    elif case == 3:
        residuals = [
            t12 * n3 + t13 * n2 - t * n1,
            t12 * (n1 + n3 - n2) + t23 * n1 - t * n2,
        ]
        if dur.branch == "primary":
            residuals.append((t13 + t23) * (n1 + n2 - n3) - t * n3)
    elif case == 4:
        residuals = [
            t12 * n3 + t13 * n2 + t3 * (m - n1 - n3) - t * n1,
            t12 * (n1 + n3 - n2) + t23 * n1 + t1 * (m - n1 - n2) - t * n2,
            (t13 + t23) * (n1 + n2 - n3) + t2 * (m - n2 - n3) - t * n3,
        ]

    d = rep.point
    plane_values = [
        sum(c * x for c, x in zip(coeffs, d)) - rhs + (1 if rhs == 1 else 0)
        for coeffs, rhs in rep.tight_planes
    ]
    # plane_values entries are 1 for unit-rhs planes and 0 for the degenerate
    # plane, whenever the identity holds.

    alpha = Fraction(dur.alpha)
    ratios: List[Tuple[str, Fraction, Fraction]] = []
    d1, d2, d3 = d
    if case == 2:
        ratios.append(("T1/alpha", t1 / alpha, (d1 + d2 - d3) / (2 * (n1 + n2))))
    elif case == 3:
        ratios.append(("T1/alpha", t1 / alpha, (d1 + d2 - d3) / (2 * (n1 + n2))))
        ratios.append(("T3/alpha", t3 / alpha, (d1 + d3 - d2) / (2 * (n1 + n3))))
    elif case == 4:
        ratios.append(("T1/alpha", t1 / alpha, (d1 + d2 - d3) / (2 * m)))
        ratios.append(("T2/alpha", t2 / alpha, (d2 + d3 - d1) / (2 * m)))
        ratios.append(("T3/alpha", t3 / alpha, (d1 + d3 - d2) / (2 * m)))

    report = TransformationReport(cfg, case, dur.branch, residuals, plane_values, ratios)
    if not report.ok():
        raise IdentityViolated(f"transformation identities fail for {cfg}: {report}")
    return report
