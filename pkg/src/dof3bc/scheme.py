"""Concrete transmission blueprints: which values go on which antennas when.

A plan is a pure function of (config, durations).  Primary symbol blocks are
the free inputs; every other transmitted value is a composite: channel rows of
strictly earlier TSs applied to primary blocks or to earlier transmit streams.
The simulator consumes the structured plan directly; ``to_json`` emits the
wire format (ordered TS records plus composite definitions).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .config import AntennaConfig, UnsupportedCase
from .durations import PhaseDurations, order2_antenna_params, solve_for_case


class SizeMismatch(Exception):
    """A truncation would need more channel rows than the source receiver has."""


class RelationViolated(Exception):
    """Symbol counts and durations disagree with the case's slot relations."""


class UnalignedSupports(SizeMismatch):
    """Case-4 additional-symbol blocks have unequal lengths.

    The order-3 side-information exchange then leaves one receiver short of
    equations (the per-receiver deficit equals the length mismatch), so the
    corner point is not reachable by this construction; flagged, not patched.
    """


@dataclass(frozen=True)
class RowsTerm:
    """Top ``rows_per_ts`` rows of H_rx over a TS range, applied per-TS to the
    sum of the named vectors (primaries or earlier transmit streams)."""

    rx: int
    ts_start: int
    n_ts: int
    rows_per_ts: int
    width: int
    applied: Tuple[str, ...]

    @property
    def length(self) -> int:
        return self.n_ts * self.rows_per_ts


@dataclass(frozen=True)
class RefTerm:
    """Another composite's value, truncated or zero-padded to fit."""

    name: str


@dataclass(frozen=True)
class CompositeVec:
    name: str
    length: int
    terms: Tuple[object, ...]  # RowsTerm | RefTerm


@dataclass(frozen=True)
class ConcatVec:
    name: str
    parts: Tuple[str, ...]


@dataclass(frozen=True)
class SumVec:
    """Sum of equal-length primary blocks (the coded Phase-I streams)."""

    name: str
    parts: Tuple[str, ...]


@dataclass(frozen=True)
class PlacedVec:
    """Sparse placement: value[dst] = sum of coef * source coordinate."""

    name: str
    length: int
    placements: Tuple[Tuple[int, str, int, int], ...]  # (dst, src_name, src_idx, coef)


@dataclass(frozen=True)
class Segment:
    """A contiguous run of TSs transmitting one stream."""

    stream: str
    ts_start: int
    n_ts: int
    antennas: int
    phase: str


@dataclass
class SchemePlan:
    cfg: AntennaConfig
    kind: str  # "order1" | "order2"
    case: Optional[int]
    durations: PhaseDurations
    primaries: Dict[str, int]
    vectors: Dict[str, object]
    eval_order: List[str]
    segments: List[Segment]
    desired: Dict[int, Tuple[str, ...]]
    b_params: Tuple[int, int, int, int]
    a_params: Optional[Tuple[int, int, int]]
    layout: Dict[str, int] = field(default_factory=dict)

    @property
    def total_ts(self) -> int:
        return sum(s.n_ts for s in self.segments)

    def segment(self, stream: str) -> Segment:
        for s in self.segments:
            if s.stream == stream:
                return s
        raise KeyError(stream)

    def stream_length(self, name: str) -> int:
        if name in self.primaries:
            return self.primaries[name]
        v = self.vectors[name]
        if isinstance(v, SumVec):
            return self.primaries[v.parts[0]]
        if isinstance(v, ConcatVec):
            return sum(self.stream_length(p) for p in v.parts)
        if isinstance(v, (CompositeVec, PlacedVec)):
            return v.length
        raise TypeError(name)

    def part_offsets(self, concat_name: str) -> Dict[str, int]:
        v = self.vectors[concat_name]
        out = {}
        off = 0
        for p in v.parts:
            out[p] = off
            off += self.stream_length(p)
        return out

    def desired_counts(self) -> Tuple[int, int, int]:
        return tuple(
            sum(self.primaries[name] for name in self.desired[rx]) for rx in (1, 2, 3)
        )

    def achieved_tuple(self):
        """(d12, d23, d13) for order-2 plans, (d1, d2, d3) for order-1 plans."""
        from fractions import Fraction

        n = Fraction(self.total_ts)
        if self.kind == "order2":
            counts = (self.primaries["xab"], self.primaries["xbc"], self.primaries["xac"])
        else:
            counts = self.desired_counts()
        return tuple(Fraction(c) / n for c in counts)

    def equation_audit(self) -> List[Tuple[str, int, int]]:
        """Per-receiver (lacking, delivered) counts of the final phase.

        Reproduces the decoding-condition left-hand sides as count identities
        on the plan itself; delivered is T * N_i.
        """
        cfg, dur = self.cfg, self.durations
        b1, b2, b3, _ = self.b_params
        lacks = [
            dur.t12 * (b1 - cfg.n1) + dur.t13 * (b3 - cfg.n1),
            dur.t12 * (b1 - cfg.n2) + dur.t23 * (b2 - cfg.n2),
            dur.t13 * (b3 - cfg.n3) + dur.t23 * (b2 - cfg.n3),
        ]
        if self.kind == "order1" and self.case == 4:
            m = cfg.m
            lacks[0] += dur.t3 * (m - cfg.n1 - cfg.n3)
            lacks[1] += dur.t1 * (m - cfg.n1 - cfg.n2)
            lacks[2] += dur.t2 * (m - cfg.n2 - cfg.n3)
        ns = (cfg.n1, cfg.n2, cfg.n3)
        return [(f"rx{i+1}", lacks[i], dur.t * ns[i]) for i in range(3)]

    def to_json(self) -> dict:
        ts_records = []
        for seg in self.segments:
            offsets = 0
            for k in range(seg.n_ts):
                entries = []
                base = k * seg.antennas
                for a in range(seg.antennas):
                    entries.append({"symbol_id": f"{seg.stream}[{base + a}]"})
                ts_records.append(
                    {
                        "ts": seg.ts_start + k,
                        "phase": seg.phase,
                        "antennas": seg.antennas,
                        "transmit_map": entries,
                    }
                )
        composites = []
        for name in self.eval_order:
            v = self.vectors[name]
            if isinstance(v, SumVec):
                composites.append({"name": name, "kind": "sum", "parts": list(v.parts)})
            elif isinstance(v, ConcatVec):
                composites.append({"name": name, "kind": "concat", "parts": list(v.parts)})
            elif isinstance(v, PlacedVec):
                composites.append(
                    {
                        "name": name,
                        "kind": "placed",
                        "length": v.length,
                        "placements": [list(p) for p in v.placements],
                    }
                )
            elif isinstance(v, CompositeVec):
                terms = []
                for t in v.terms:
                    if isinstance(t, RowsTerm):
                        terms.append(
                            {
                                "coefficient_source": {
                                    "kind": "channel_rows",
                                    "rx": t.rx,
                                    "ts_start": t.ts_start,
                                    "n_ts": t.n_ts,
                                    "rows_per_ts": t.rows_per_ts,
                                    "width": t.width,
                                },
                                "applied_to": list(t.applied),
                            }
                        )
                    else:
                        terms.append({"coefficient_source": {"kind": "ref"}, "ref": t.name})
                composites.append(
                    {"name": name, "kind": "composite", "length": v.length, "terms": terms}
                )
        return {
            "config": str(self.cfg),
            "kind": self.kind,
            "case": self.case,
            "durations": list(self.durations.as_tuple()),
            "branch": self.durations.branch,
            "total_ts": self.total_ts,
            "ts_records": ts_records,
            "composites": composites,
        }


def _bresenham_quotas(total: int, n_ts: int) -> List[int]:
    return [(total * (t + 1)) // n_ts - (total * t) // n_ts for t in range(n_ts)]


def _phase3_placements(
    n_ts: int, antennas: int, l_ab: int, l_bc: int, l_ac: int, l0: int, lane_cap: int
):
    """Per-TS-budgeted packing of the final-phase content.

    Receiver 1's final-phase system is block-diagonal across TSs, so the
    content it must resolve (the pair-12 and pair-13 side information plus the
    additional order-3 block) is interleaved at no more than ``lane_cap`` = N1
    coordinates per TS.  Fresh pair-23 side information is superimposed onto
    those positions (spread evenly).  Remaining positions carry repeats of the
    pair-23 coordinates; a repeat is chosen so that its two placements never
    look identical to a receiver (a coordinate first placed on top of pair-13
    content is repeated on pair-12 content and vice versa, or two such are
    summed), which keeps the equality-tight receivers at full rank.  With one
    coordinate per block this reduces to the classic two-slot sum layout.
    """
    lane: List[Tuple[str, int]] = []
    streams = [("s1", l_ab), ("s3", l_ac), ("y0", l0)]
    keyed = []
    for order, (name, length) in enumerate(streams):
        for i in range(length):
            keyed.append((Fraction(2 * i + 1, 2 * length), order, name, i))
    for _, _, name, i in sorted(keyed):
        lane.append((name, i))
    if len(lane) > n_ts * lane_cap:
        raise SizeMismatch("final-phase lane content exceeds capacity")

    lane_quota = _bresenham_quotas(len(lane), n_ts)
    s2_quota = _bresenham_quotas(l_bc, n_ts)
    if max(lane_quota, default=0) > lane_cap:
        raise SizeMismatch("final-phase lane exceeds the per-TS budget")

    placements: List[Tuple[int, str, int, int]] = []
    fresh_at = {}  # position -> fresh s2 index
    lane_pos = 0
    s2_pos = 0
    for t in range(n_ts):
        base = t * antennas
        for r in range(lane_quota[t]):
            name, idx = lane[lane_pos]
            placements.append((base + r, name, idx, 1))
            lane_pos += 1
        for k in range(s2_quota[t]):
            placements.append((base + k, "s2", s2_pos, 1))
            fresh_at[base + k] = s2_pos
            s2_pos += 1

    if l_bc:
        window = min(l_bc, 48)
        step = max(1, l_bc // window)
        dup_no = 0
        for q in range(n_ts * antennas):
            if q in fresh_at:
                continue
            anchor = (dup_no * (max(1, l_bc // 3) + 1)) % l_bc
            dup_no += 1
            seen = set()
            for k in range(window):
                j = (anchor + k * step) % l_bc
                if j in seen:
                    continue
                seen.add(j)
                coef = 1 if k == 0 else _mix_coefficient(q, j)
                placements.append((q, "s2", j, coef))
    return tuple(placements)


def _mix_coefficient(q: int, j: int) -> int:
    """Plan-fixed small nonzero coefficient; channels never enter the plan."""
    return ((q * 2654435761 + j * 1597334677) >> 7) % 9 + 1


def _check_supply(label: str, rows_needed: int, rows_available: int):
    if rows_needed > rows_available:
        raise SizeMismatch(
            f"{label}: needs {rows_needed} rows/TS but the source has {rows_available}"
        )


def stage_dimension_bound(cfg: AntennaConfig, dur: PhaseDurations, kind: str) -> int:
    """Largest decode-stage unknown count, computable before building a plan.

    Used as a cost gate: plan construction and simulation are both roughly
    cubic in this number.
    """
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    if kind == "order2":
        b1, b2, b3, _ = order2_antenna_params(cfg)
        f_sup = b_sup = d_sup = 0
    else:
        case = cfg.order1_case if cfg.order1_case in (2, 3, 4) else 2
        b1 = m if case == 2 else min(m, n1 + n3)
        b2 = b3 = min(m, n1 + n2)
        if case == 4:
            f_sup, b_sup, d_sup = (
                dur.t1 * (m - n1 - n2),
                dur.t2 * (m - n2 - n3),
                dur.t3 * (m - n1 - n3),
            )
        else:
            f_sup = b_sup = d_sup = 0
    l_ab = dur.t12 * (b1 - n1)
    l_bc = dur.t23 * (b2 - n2)
    l_ac = dur.t13 * (b3 - n1)
    dims = [
        l_ab + l_ac + max(f_sup, d_sup),
        dur.t12 * b1 + f_sup + l_bc + max(f_sup, b_sup) - f_sup,
        dur.t23 * b2 + b_sup + dur.t13 * b3 + d_sup + max(b_sup, d_sup) - b_sup,
    ]
    if kind == "order1":
        a1 = n1 + n2 if cfg.order1_case != 4 else m
        dims += [dur.t1 * a1, dur.t2 * m, dur.t3 * m]
    return max(dims)


def build_order2_scheme(cfg: AntennaConfig, durations: PhaseDurations) -> SchemePlan:
    """Two-phase plan for order-2 messages (N2 < M)."""
    n1, n2, n3 = cfg.n1, cfg.n2, cfg.n3
    b1, b2, b3, c = order2_antenna_params(cfg)
    dur = durations
    if dur.t1 or dur.t2 or dur.t3:
        raise RelationViolated("order-2 schemes have no coded Phase-I durations")

    primaries = {"xab": dur.t12 * b1, "xbc": dur.t23 * b2, "xac": dur.t13 * b3}
    segments = []
    ts = 0
    for stream, n_ts, ant in (
        ("v12", dur.t12, b1),
        ("v23", dur.t23, b2),
        ("v13", dur.t13, b3),
    ):
        segments.append(Segment(stream, ts, n_ts, ant, phase="phase1"))
        ts += n_ts
    segments.append(Segment("u", ts, dur.t, c, phase="phase2"))

    l_ab = dur.t12 * (b1 - n1)
    l_bc = dur.t23 * (b2 - n2)
    l_ac = dur.t13 * (b3 - n1)
    _check_supply("underline(y3^ab)", b1 - n1, n3)
    _check_supply("underline(y1^bc)", b2 - n2, n1)
    _check_supply("underline(y2^ac)", b3 - n1, n2)
    q_len = dur.t * c
    if l_ab + l_ac > dur.t * n1 or l_bc > dur.t * n2:
        raise SizeMismatch(
            f"order-3 block too small: {dur.t} TSs for parts {(l_ab, l_bc, l_ac)}"
        )

    slot12 = segments[0]
    slot23 = segments[1]
    slot13 = segments[2]
    vectors: Dict[str, object] = {
        "v12": ConcatVec("v12", ("xab",)),
        "v23": ConcatVec("v23", ("xbc",)),
        "v13": ConcatVec("v13", ("xac",)),
        "s1": CompositeVec(
            "s1", l_ab, (RowsTerm(3, slot12.ts_start, dur.t12, b1 - n1, b1, ("v12",)),)
        ),
        "s2": CompositeVec(
            "s2", l_bc, (RowsTerm(1, slot23.ts_start, dur.t23, b2 - n2, b2, ("v23",)),)
        ),
        "s3": CompositeVec(
            "s3", l_ac, (RowsTerm(2, slot13.ts_start, dur.t13, b3 - n1, b3, ("v13",)),)
        ),
        "xabc": PlacedVec(
            "xabc", q_len, _phase3_placements(dur.t, c, l_ab, l_bc, l_ac, 0, n1)
        ),
        "u": ConcatVec("u", ("xabc",)),
    }
    eval_order = ["v12", "v23", "v13", "s1", "s2", "s3", "xabc", "u"]
    plan = SchemePlan(
        cfg=cfg,
        kind="order2",
        case=None,
        durations=dur,
        primaries=primaries,
        vectors=vectors,
        eval_order=eval_order,
        segments=segments,
        desired={1: ("xab", "xac"), 2: ("xab", "xbc"), 3: ("xbc", "xac")},
        b_params=(b1, b2, b3, c),
        a_params=None,
        layout={"l_ab": l_ab, "l_bc": l_bc, "l_ac": l_ac, "q_len": q_len, "l0": 0},
    )
    _validate_causality(plan)
    return plan


def _order1_a_params(cfg: AntennaConfig, case: int) -> Tuple[int, int, int]:
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    if case == 2:
        return (n1 + n2, m, m)
    if case == 3:
        return (n1 + n2, m, n1 + n3)
    if case == 4:
        return (m, m, m)
    raise UnsupportedCase(f"case {case}")


def build_order1_scheme(
    cfg: AntennaConfig,
    durations: Optional[PhaseDurations] = None,
    allow_boundary: bool = False,
) -> SchemePlan:
    """Three-phase plan achieving the corner point for Cases 2-4."""
    n1, n2, n3, m = cfg.n1, cfg.n2, cfg.n3, cfg.m
    case = cfg.order1_case
    if case not in (2, 3, 4):
        if allow_boundary and m == n1 + n2 and m >= n3:
            case = 2
        else:
            raise UnsupportedCase(f"order-1 scheme undefined for case {case} ({cfg})")
    dur = durations if durations is not None else solve_for_case(cfg, allow_boundary)
    a1, a2, a3 = _order1_a_params(cfg, case)
    b1, b2, b3 = (min(m, n1 + n3), min(m, n1 + n2), min(m, n1 + n2)) if case != 2 else (
        m,
        n1 + n2,
        n1 + n2,
    )

    primaries = {
        "xa1": dur.t1 * a1,
        "xb1": dur.t1 * a1,
        "xb2": dur.t2 * a2,
        "xc1": dur.t2 * a2,
        "xa2": dur.t3 * a3,
        "xc2": dur.t3 * a3,
    }

    segments = []
    ts = 0
    for stream, n_ts, ant, phase in (
        ("w1", dur.t1, a1, "phase1"),
        ("w2", dur.t2, a2, "phase1"),
        ("w3", dur.t3, a3, "phase1"),
        ("v12", dur.t12, b1, "phase2"),
        ("v23", dur.t23, b2, "phase2"),
        ("v13", dur.t13, b3, "phase2"),
        ("u", dur.t, n3, "phase3"),
    ):
        segments.append(Segment(stream, ts, n_ts, ant, phase))
        ts += n_ts
    seg = {s.stream: s for s in segments}

    # Appendix-C pair blocks; the leading sub-block carries the cross-receiver
    # rows, the trailing one the own-channel rows used for cancellation.
    k1a = min(a1, n1 + n2) - n1
    k2a = min(a2, n2 + n3) - n2
    k3a = min(a3, n1 + n3) - n1
    _check_supply("underline(H2^{a+b})", k1a, n2)
    _check_supply("underline(H3^{b+c})", k2a, n3)
    _check_supply("underline(H3^{a+c})", k3a, n3)

    vectors: Dict[str, object] = {
        "w1": SumVec("w1", ("xa1", "xb1")),
        "w2": SumVec("w2", ("xb2", "xc1")),
        "w3": SumVec("w3", ("xa2", "xc2")),
        "xab_a": CompositeVec(
            "xab_a", dur.t1 * k1a, (RowsTerm(2, seg["w1"].ts_start, dur.t1, k1a, a1, ("xa1",)),)
        ),
        "xab_b": CompositeVec(
            "xab_b", dur.t1 * n1, (RowsTerm(1, seg["w1"].ts_start, dur.t1, n1, a1, ("xb1",)),)
        ),
        "xbc_b": CompositeVec(
            "xbc_b", dur.t2 * k2a, (RowsTerm(3, seg["w2"].ts_start, dur.t2, k2a, a2, ("xb2",)),)
        ),
        "xbc_c": CompositeVec(
            "xbc_c", dur.t2 * n2, (RowsTerm(2, seg["w2"].ts_start, dur.t2, n2, a2, ("xc1",)),)
        ),
        "xac_a": CompositeVec(
            "xac_a", dur.t3 * k3a, (RowsTerm(3, seg["w3"].ts_start, dur.t3, k3a, a3, ("xa2",)),)
        ),
        "xac_c": CompositeVec(
            "xac_c", dur.t3 * n1, (RowsTerm(1, seg["w3"].ts_start, dur.t3, n1, a3, ("xc2",)),)
        ),
    }

    v12_parts = ["xab_a", "xab_b"]
    v23_parts = ["xbc_b", "xbc_c"]
    v13_parts = ["xac_a", "xac_c"]
    f_sup = b_sup = d_sup = l0 = 0
    if case == 4:
        f_per, b_per, d_per = m - n1 - n2, m - n2 - n3, m - n1 - n3
        _check_supply("underline(H3^{a+b}) extras", f_per, n3)
        _check_supply("underline(H1^{b+c}) extras", b_per, n1)
        _check_supply("underline(H2^{a+c}) extras", d_per, n2)
        f_sup, b_sup, d_sup = dur.t1 * f_per, dur.t2 * b_per, dur.t3 * d_per
        if not (f_sup == b_sup == d_sup):
            raise UnalignedSupports(
                f"{cfg}: additional-symbol blocks have lengths "
                f"(F, B, D) = {(f_sup, b_sup, d_sup)}"
            )
        l0 = max(f_sup, b_sup, d_sup)
        vectors.update(
            {
                "Fv": CompositeVec(
                    "Fv",
                    f_sup,
                    (RowsTerm(3, seg["w1"].ts_start, dur.t1, f_per, a1, ("xa1", "xb1")),),
                ),
                "Bpp": CompositeVec(
                    "Bpp",
                    b_sup,
                    (RowsTerm(1, seg["w2"].ts_start, dur.t2, b_per, a2, ("xb2", "xc1")),),
                ),
                "Dpp": CompositeVec(
                    "Dpp",
                    d_sup,
                    (RowsTerm(2, seg["w3"].ts_start, dur.t3, d_per, a3, ("xa2", "xc2")),),
                ),
                "y01": CompositeVec(
                    "y01",
                    f_sup,
                    (
                        RowsTerm(3, seg["w1"].ts_start, dur.t1, f_per, a1, ("xa1",)),
                        RefTerm("Bpp"),
                    ),
                ),
                "y02": CompositeVec(
                    "y02",
                    b_sup,
                    (
                        RowsTerm(1, seg["w2"].ts_start, dur.t2, b_per, a2, ("xb2",)),
                        RefTerm("Dpp"),
                    ),
                ),
                "y03": CompositeVec(
                    "y03",
                    d_sup,
                    (
                        RowsTerm(2, seg["w3"].ts_start, dur.t3, d_per, a3, ("xc2",)),
                        RefTerm("Fv"),
                    ),
                ),
                "y0": CompositeVec("y0", l0, (RefTerm("Fv"), RefTerm("Bpp"), RefTerm("Dpp"))),
            }
        )
        v12_parts.append("y01")
        v23_parts.append("y02")
        v13_parts.append("y03")

    vectors["v12"] = ConcatVec("v12", tuple(v12_parts))
    vectors["v23"] = ConcatVec("v23", tuple(v23_parts))
    vectors["v13"] = ConcatVec("v13", tuple(v13_parts))

    # The slot relations must make every Phase-II stream fill its slot exactly.
    plan_sizes = {
        "v12": dur.t1 * min(a1, n1 + n2) + f_sup,
        "v23": dur.t2 * min(a2, n2 + n3) + b_sup,
        "v13": dur.t3 * min(a3, n1 + n3) + d_sup,
    }
    for stream, b_i, n_ts in (("v12", b1, dur.t12), ("v23", b2, dur.t23), ("v13", b3, dur.t13)):
        if plan_sizes[stream] != b_i * n_ts:
            raise RelationViolated(
                f"{stream}: {plan_sizes[stream]} symbols vs slot {b_i}x{n_ts} ({cfg})"
            )

    l_ab = dur.t12 * (b1 - n1)
    l_bc = dur.t23 * (b2 - n2)
    l_ac = dur.t13 * (b3 - n1)
    _check_supply("underline(y3) of pair-12 slots", b1 - n1, n3)
    _check_supply("underline(y1) of pair-23 slots", b2 - n2, n1)
    _check_supply("underline(y2) of pair-13 slots", b3 - n1, n2)
    # The duration system makes the receiver-1-critical content fill its lane
    # exactly and bounds the pair-23 side information by receiver 2's budget.
    if l_ab + l_ac + l0 != dur.t * n1:
        raise RelationViolated(
            f"final-phase lane {(l_ab, l_ac, l0)} does not fill T*N1 = {dur.t * n1}"
        )
    if l_bc > dur.t * n2:
        raise RelationViolated(f"pair-23 side information exceeds T*N2 ({cfg})")

    vectors.update(
        {
            "s1": CompositeVec(
                "s1", l_ab, (RowsTerm(3, seg["v12"].ts_start, dur.t12, b1 - n1, b1, ("v12",)),)
            ),
            "s2": CompositeVec(
                "s2", l_bc, (RowsTerm(1, seg["v23"].ts_start, dur.t23, b2 - n2, b2, ("v23",)),)
            ),
            "s3": CompositeVec(
                "s3", l_ac, (RowsTerm(2, seg["v13"].ts_start, dur.t13, b3 - n1, b3, ("v13",)),)
            ),
            "xabc": PlacedVec(
                "xabc",
                dur.t * n3,
                _phase3_placements(dur.t, n3, l_ab, l_bc, l_ac, l0, n1),
            ),
        }
    )
    vectors["u"] = ConcatVec("u", ("xabc",))

    eval_order = ["w1", "w2", "w3"]
    eval_order += ["xab_a", "xab_b", "xbc_b", "xbc_c", "xac_a", "xac_c"]
    if case == 4:
        eval_order += ["Fv", "Bpp", "Dpp", "y01", "y02", "y03", "y0"]
    eval_order += ["v12", "v23", "v13", "s1", "s2", "s3", "xabc", "u"]

    plan = SchemePlan(
        cfg=cfg,
        kind="order1",
        case=case,
        durations=dur,
        primaries=primaries,
        vectors=vectors,
        eval_order=eval_order,
        segments=segments,
        desired={1: ("xa1", "xa2"), 2: ("xb1", "xb2"), 3: ("xc1", "xc2")},
        b_params=(b1, b2, b3, n3),
        a_params=(a1, a2, a3),
        layout={
            "l_ab": l_ab,
            "l_bc": l_bc,
            "l_ac": l_ac,
            "q_len": dur.t * n3,
            "l0": l0,
            "f_sup": f_sup,
            "b_sup": b_sup,
            "d_sup": d_sup,
            "k1a": k1a,
            "k2a": k2a,
            "k3a": k3a,
        },
    )
    _validate_causality(plan)
    return plan


def _validate_causality(plan: SchemePlan):
    """Every composite may reference only channel rows of strictly earlier TSs
    than the first TS where its value is transmitted, and no TS may use more
    than M antennas."""
    for s in plan.segments:
        if s.antennas > plan.cfg.m:
            raise RelationViolated(f"segment {s.stream} uses {s.antennas} > M antennas")
    first_tx: Dict[str, int] = {}
    for s in plan.segments:
        first_tx[s.stream] = s.ts_start

    def composite_sources(name, seen):
        v = plan.vectors.get(name)
        out = []
        if v is None or name in seen:
            return out
        seen = seen | {name}
        if isinstance(v, CompositeVec):
            for t in v.terms:
                if isinstance(t, RowsTerm):
                    out.append(t.ts_start + t.n_ts - 1)
                else:
                    out += composite_sources(t.name, seen)
        elif isinstance(v, (ConcatVec, SumVec)):
            for p in v.parts:
                out += composite_sources(p, seen)
        elif isinstance(v, PlacedVec):
            for _, src, _, _ in v.placements:
                out += composite_sources(src, seen)
        return out

    for stream, start in first_tx.items():
        for last_source_ts in composite_sources(stream, set()):
            if last_source_ts >= start:
                raise RelationViolated(
                    f"{stream} transmitted at TS {start} uses channel rows of TS "
                    f"{last_source_ts} (delayed-CSIT causality violated)"
                )


def receiver_knowledge(plan: SchemePlan, receiver: int) -> Dict[str, List[dict]]:
    """For each composite, which additive terms the receiver can reconstruct
    from its own past observations.

    A channel-rows term is known exactly when its rows belong to the given
    receiver and it applies to the full transmitted content of those TSs (so
    the values are literally entries of that receiver's received vectors).
    """
    out: Dict[str, List[dict]] = {}
    content_of_range: Dict[int, Tuple[str, ...]] = {}
    for s in plan.segments:
        v = plan.vectors[s.stream]
        if isinstance(v, SumVec):
            full = tuple(sorted(v.parts))
        else:
            full = (s.stream,)
        for k in range(s.n_ts):
            content_of_range[s.ts_start + k] = full
    for name in plan.eval_order:
        v = plan.vectors[name]
        if not isinstance(v, CompositeVec):
            continue
        entries = []
        for idx, t in enumerate(v.terms):
            if isinstance(t, RowsTerm):
                full = content_of_range.get(t.ts_start, ())
                known = t.rx == receiver and tuple(sorted(t.applied)) == full
                entries.append(
                    {
                        "term": idx,
                        "source_rx": t.rx,
                        "applied_to": "+".join(t.applied),
                        "known": known,
                    }
                )
            else:
                ref_terms = out.get(t.name, [])
                known = bool(ref_terms) and all(e["known"] for e in ref_terms)
                entries.append(
                    {"term": idx, "source_rx": None, "applied_to": t.name, "known": known}
                )
        out[name] = entries
    return out
