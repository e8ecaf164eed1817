"""Noiseless linear simulation of scheme plans over generic rational channels.

Channels and ground-truth symbols are integers, so every transmitted value and
observation is an exact integer.  Each receiver is decoded by the staged
procedure the construction is designed around: recover the final-phase side
information, then the pair-slot contents, then the desired symbol blocks.
Every stage is a linear system whose true solution is known; the stage is
certified by (a) an exact consistency check of the assembled system against
the true values and (b) a full-column-rank certificate.  Rank is verified
modulo a prime, which can only under-estimate the rational rank, so a full
modular rank is an exact proof of uniqueness; together (a) and (b) prove the
receiver's unique solution equals the ground truth.  Small stages are also
solved outright in rational arithmetic as a cross-check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import AntennaConfig
from .durations import NegativeDuration, PhaseDurations
from .exact import solve_unique
from .scheme import (
    CompositeVec,
    ConcatVec,
    PlacedVec,
    RefTerm,
    RowsTerm,
    SchemePlan,
    SizeMismatch,
    SumVec,
)

CHANNEL_RANGE = 1000
SYMBOL_RANGE = 100_000
EXACT_SOLVE_LIMIT = 40
MAX_RESAMPLES = 16
DEFAULT_STAGE_BUDGET = 700


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
        d, s = n - 1, 0
        while d % 2 == 0:
            d //= 2
            s += 1
        x = pow(p, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _primes_below(bound: int, count: int) -> List[int]:
    out = []
    n = bound - 1
    while len(out) < count:
        if _is_prime(n):
            out.append(n)
        n -= 2 if n % 2 else 1
    return out


# < 2^25 keeps every product inside int64 during modular elimination.
PRIMES = _primes_below(1 << 25, 5)


class GenericityExhausted(Exception):
    """Resampling cannot fix the failure: it is structural, not probabilistic."""


class DecodeFailure(Exception):
    def __init__(self, receiver: int, stage: str, detail: str):
        super().__init__(f"receiver {receiver}, stage {stage}: {detail}")
        self.receiver = receiver
        self.stage = stage


class SimulationInternalError(Exception):
    """The assembled system is inconsistent with the ground truth (a bug)."""


@dataclass
class ChannelRealization:
    seed: int
    n_ts: int
    h: List[Dict[int, List[List[int]]]]  # per TS: rx -> N_rx x M integer matrix
    resamples: int = 0


def draw_channels(plan: SchemePlan, seed: int) -> ChannelRealization:
    """Deterministic integer channel draw, i.i.d. across space and time."""
    rng = random.Random(seed)
    ns = {1: plan.cfg.n1, 2: plan.cfg.n2, 3: plan.cfg.n3}
    h = []
    for _ in range(plan.total_ts):
        per_rx = {}
        for rx in (1, 2, 3):
            per_rx[rx] = [
                [rng.randint(-CHANNEL_RANGE, CHANNEL_RANGE) for _ in range(plan.cfg.m)]
                for _ in range(ns[rx])
            ]
        h.append(per_rx)
    return ChannelRealization(seed=seed, n_ts=plan.total_ts, h=h)


def draw_symbols(plan: SchemePlan, seed: int) -> Dict[str, List[int]]:
    rng = random.Random(seed ^ 0x9E3779B97F4A7C15)
    return {
        name: [rng.randint(-SYMBOL_RANGE, SYMBOL_RANGE) for _ in range(size)]
        for name, size in sorted(plan.primaries.items())
    }


def _rows_term_value(term: RowsTerm, vals, channels) -> List[int]:
    applied = vals[term.applied[0]]
    for nm in term.applied[1:]:
        applied = [a + b for a, b in zip(applied, vals[nm])]
    out = []
    for k in range(term.n_ts):
        hmat = channels.h[term.ts_start + k][term.rx]
        block = applied[k * term.width : (k + 1) * term.width]
        for r in range(term.rows_per_ts):
            row = hmat[r]
            out.append(sum(row[j] * block[j] for j in range(term.width)))
    return out


def _fit(values: List[int], length: int) -> List[int]:
    if len(values) >= length:
        return values[:length]
    return values + [0] * (length - len(values))


def evaluate_values(plan: SchemePlan, channels: ChannelRealization, primaries) -> Dict:
    vals: Dict[str, List[int]] = dict(primaries)
    for name in plan.eval_order:
        v = plan.vectors[name]
        if isinstance(v, SumVec):
            acc = list(vals[v.parts[0]])
            for nm in v.parts[1:]:
                acc = [a + b for a, b in zip(acc, vals[nm])]
            vals[name] = acc
        elif isinstance(v, ConcatVec):
            acc = []
            for nm in v.parts:
                acc.extend(vals[nm])
            vals[name] = acc
        elif isinstance(v, PlacedVec):
            out = [0] * v.length
            for dst, src, idx, coef in v.placements:
                out[dst] += coef * vals[src][idx]
            vals[name] = out
        elif isinstance(v, CompositeVec):
            out = [0] * v.length
            for t in v.terms:
                tv = _rows_term_value(t, vals, channels) if isinstance(t, RowsTerm) else vals[t.name]
                for i, x in enumerate(_fit(tv, v.length)):
                    out[i] += x
            vals[name] = out
    return vals


def compute_observations(plan: SchemePlan, channels, vals) -> Dict[int, List[List[int]]]:
    ns = {1: plan.cfg.n1, 2: plan.cfg.n2, 3: plan.cfg.n3}
    obs: Dict[int, List[List[int]]] = {rx: [None] * plan.total_ts for rx in (1, 2, 3)}
    for seg in plan.segments:
        content = vals[seg.stream]
        for k in range(seg.n_ts):
            t = seg.ts_start + k
            x = content[k * seg.antennas : (k + 1) * seg.antennas]
            for rx in (1, 2, 3):
                hmat = channels.h[t][rx]
                obs[rx][t] = [
                    sum(hmat[r][j] * x[j] for j in range(seg.antennas))
                    for r in range(ns[rx])
                ]
    return obs


@dataclass
class StageRecord:
    receiver: int
    name: str
    n_rows: int
    n_cols: int
    method: str
    ok: bool
    detail: str = ""


class Stage:
    """Sparse integer linear system with a known true solution."""

    def __init__(self, receiver: int, name: str, n_cols: int, truth: Sequence[int]):
        self.receiver = receiver
        self.name = name
        self.n_cols = n_cols
        self.truth = list(truth)
        self.rows: List[Dict[int, int]] = []
        self.rhs: List[int] = []

    def add_row(self, coeffs: Dict[int, int], rhs: int):
        self.rows.append({c: v for c, v in coeffs.items() if v})
        self.rhs.append(rhs)

    def certify(self) -> StageRecord:
        for row, b in zip(self.rows, self.rhs):
            acc = sum(v * self.truth[c] for c, v in row.items())
            if acc != b:
                raise SimulationInternalError(
                    f"rx{self.receiver}/{self.name}: assembled system is inconsistent"
                )
        if self.n_cols == 0:
            return StageRecord(self.receiver, self.name, len(self.rows), 0, "trivial", True)
        if len(self.rows) < self.n_cols:
            return StageRecord(
                self.receiver,
                self.name,
                len(self.rows),
                self.n_cols,
                "count",
                False,
                "fewer equations than unknowns",
            )
        ok_prime = None
        for p in PRIMES:
            if self._modp_full_column_rank(p):
                ok_prime = p
                break
        if ok_prime is None:
            return StageRecord(
                self.receiver,
                self.name,
                len(self.rows),
                self.n_cols,
                "modular",
                False,
                f"rank deficient mod {len(PRIMES)} primes",
            )
        method = f"consistency+rank(mod {ok_prime})"
        if self.n_cols <= EXACT_SOLVE_LIMIT:
            a = [[Fraction(row.get(c, 0)) for c in range(self.n_cols)] for row in self.rows]
            x = solve_unique(a, [Fraction(b) for b in self.rhs])
            if [int(v) for v in x] != self.truth:
                raise SimulationInternalError(
                    f"rx{self.receiver}/{self.name}: exact solve disagrees with truth"
                )
            method += "+exact"
        return StageRecord(self.receiver, self.name, len(self.rows), self.n_cols, method, True)

    def _modp_full_column_rank(self, p: int) -> bool:
        m, n = len(self.rows), self.n_cols
        a = np.zeros((m, n), dtype=np.int64)
        for i, row in enumerate(self.rows):
            for c, v in row.items():
                a[i, c] = v % p
        r = 0
        for c in range(n):
            nz = np.nonzero(a[r:, c])[0]
            if nz.size == 0:
                return False
            i = r + int(nz[0])
            if i != r:
                a[[r, i]] = a[[i, r]]
            inv = pow(int(a[r, c]), p - 2, p)
            a[r, c:] = (a[r, c:] * inv) % p
            if r + 1 < m:
                below = a[r + 1 :, c].copy()
                a[r + 1 :, c:] = (a[r + 1 :, c:] - below[:, None] * a[r, c:][None, :]) % p
            r += 1
            if r == m and c + 1 < n:
                return False
        return True


@dataclass
class ReceiverReport:
    receiver: int
    unknown_count: int
    lacking_equations: int
    delivered_equations: int
    stages: List[StageRecord]
    success: bool
    reconstruction_match: bool


@dataclass
class DecodingReport:
    cfg: AntennaConfig
    kind: str
    total_ts: int
    receivers: List[ReceiverReport]
    achieved: Tuple[Fraction, Fraction, Fraction]
    success: bool
    resamples: int = 0

    def to_json(self) -> dict:
        from .exact import rat_str

        return {
            "config": str(self.cfg),
            "kind": self.kind,
            "total_ts": self.total_ts,
            "success": self.success,
            "resamples": self.resamples,
            "achieved": [rat_str(x) for x in self.achieved],
            "receivers": [
                {
                    "receiver": r.receiver,
                    "unknowns": r.unknown_count,
                    "lacking_equations": r.lacking_equations,
                    "delivered_equations": r.delivered_equations,
                    "success": r.success,
                    "reconstruction_match": r.reconstruction_match,
                    "stages": [
                        {
                            "name": s.name,
                            "rows": s.n_rows,
                            "cols": s.n_cols,
                            "method": s.method,
                            "ok": s.ok,
                            "detail": s.detail,
                        }
                        for s in r.stages
                    ],
                }
                for r in self.receivers
            ],
        }


class _Decoder:
    def __init__(self, plan: SchemePlan, channels: ChannelRealization, vals, obs):
        self.plan = plan
        self.ch = channels
        self.vals = vals
        self.obs = obs
        self.seg = {s.stream: s for s in plan.segments}
        self.lay = plan.layout
        pv: PlacedVec = plan.vectors["xabc"]
        self.placements: Dict[int, List[Tuple[str, int, int]]] = {}
        for dst, src, idx, coef in pv.placements:
            self.placements.setdefault(dst, []).append((src, idx, coef))
        self.q_len = self.lay["q_len"]
        self.u_seg = self.seg["u"]
        self.ns = {1: plan.cfg.n1, 2: plan.cfg.n2, 3: plan.cfg.n3}
        if plan.kind == "order1":
            self.offs = {v: plan.part_offsets(v) for v in ("v12", "v23", "v13")}
        self.svec_term = {
            name: plan.vectors[name].terms[0] for name in ("s1", "s2", "s3")
        }

    def _padded(self, name: str, j: int) -> int:
        v = self.vals.get(name)
        return v[j] if v is not None and j < len(v) else 0

    def _y0_known_and_unknown(self, rx: int):
        """(known_component_fn, unknown_support) of the final-phase extras."""
        lay = self.lay
        if self.plan.kind != "order1" or self.plan.case != 4:
            return (lambda j: 0), 0
        if rx == 1:
            return (lambda j: self._padded("Bpp", j)), max(lay["f_sup"], lay["d_sup"])
        if rx == 2:
            return (lambda j: self._padded("Dpp", j)), max(lay["f_sup"], lay["b_sup"])
        return (lambda j: self._padded("Fv", j)), max(lay["b_sup"], lay["d_sup"])

    def _y0_residual_truth(self, rx: int, z_len: int) -> List[int]:
        if rx == 1:
            parts = ("Fv", "Dpp")
        elif rx == 2:
            parts = ("Fv", "Bpp")
        else:
            parts = ("Bpp", "Dpp")
        return [sum(self._padded(p, j) for p in parts) for j in range(z_len)]

    def _expand_svec_cols(self, name: str, idx: int, base_col: int):
        """Columns of the slot-stream unknowns that make up s_vec[idx]."""
        term: RowsTerm = self.svec_term[name]
        k, r = divmod(idx, term.rows_per_ts)
        hrow = self.ch.h[term.ts_start + k][term.rx][r]
        return [(base_col + k * term.width + c, hrow[c]) for c in range(term.width)]

    def _phase3_rows(self, rx: int, stage: Stage, s_cols: Dict[str, object], z_base: int, z_len: int):
        """Equations from the final phase.

        ``s_cols`` maps each side-information vector to how this receiver sees
        it: a column base (direct unknowns), ("expand", stream_col_base) for
        known-matrix images of slot unknowns, or None when value-known.
        """
        known_y0, _ = self._y0_known_and_unknown(rx)
        ant = self.u_seg.antennas
        for k in range(self.u_seg.n_ts):
            t = self.u_seg.ts_start + k
            hmat = self.ch.h[t][rx]
            for r in range(self.ns[rx]):
                coeffs: Dict[int, int] = {}
                rhs = self.obs[rx][t][r]
                for p in range(ant):
                    h = hmat[r][p]
                    if h == 0:
                        continue
                    q = k * ant + p
                    for src, idx, pc in self.placements.get(q, ()):
                        hc = h * pc
                        if src == "y0":
                            rhs -= hc * known_y0(idx)
                            if idx < z_len:
                                coeffs[z_base + idx] = coeffs.get(z_base + idx, 0) + hc
                            continue
                        spec = s_cols[src]
                        if spec is None:
                            rhs -= hc * self.vals[src][idx]
                        elif isinstance(spec, tuple):
                            for col, coef in self._expand_svec_cols(src, idx, spec[1]):
                                coeffs[col] = coeffs.get(col, 0) + hc * coef
                        else:
                            coeffs[spec + idx] = coeffs.get(spec + idx, 0) + hc
                stage.add_row(coeffs, rhs)

    def _own_slot_rows(self, rx: int, stream: str, stage: Stage, col_base: int):
        s = self.seg[stream]
        for k in range(s.n_ts):
            t = s.ts_start + k
            hmat = self.ch.h[t][rx]
            for r in range(self.ns[rx]):
                coeffs = {
                    col_base + k * s.antennas + p: hmat[r][p]
                    for p in range(s.antennas)
                    if hmat[r][p]
                }
                stage.add_row(coeffs, self.obs[rx][t][r])

    def _slot_solve(self, rx: int, stream: str, svec: str, stage_name: str) -> Stage:
        """Per-TS square systems: own rows plus the recovered side information."""
        s = self.seg[stream]
        term: RowsTerm = self.svec_term[svec]
        stage = Stage(rx, stage_name, self.plan.stream_length(stream), self.vals[stream])
        for k in range(s.n_ts):
            t = s.ts_start + k
            own = self.ch.h[t][rx]
            for r in range(self.ns[rx]):
                coeffs = {
                    k * s.antennas + p: own[r][p] for p in range(s.antennas) if own[r][p]
                }
                stage.add_row(coeffs, self.obs[rx][t][r])
            foreign = self.ch.h[t][term.rx]
            for r in range(term.rows_per_ts):
                coeffs = {
                    k * s.antennas + p: foreign[r][p]
                    for p in range(s.antennas)
                    if foreign[r][p]
                }
                stage.add_row(coeffs, self.vals[svec][k * term.rows_per_ts + r])
        return stage

    def _final_block_rows(self, stage: Stage, spec: List[Tuple[int, int, int, List[int]]], k: int, width: int):
        for rx_rows, ts, count, rhs_vals in spec:
            hmat = self.ch.h[ts][rx_rows]
            for r in range(count):
                coeffs = {k * width + p: hmat[r][p] for p in range(width) if hmat[r][p]}
                stage.add_row(coeffs, rhs_vals[r])


def _certify_all(stages: List[Stage]) -> Tuple[List[StageRecord], Optional[StageRecord]]:
    records = []
    for st in stages:
        rec = st.certify()
        records.append(rec)
        if not rec.ok:
            return records, rec
    return records, None


def _decode_receiver(dec: _Decoder, rx: int) -> List[Stage]:
    plan = dec.plan
    lay = dec.lay
    cfg = plan.cfg
    if plan.kind == "order2":
        return _decode_order2(dec, rx)
    a1, a2, a3 = plan.a_params
    dur = plan.durations
    k1a, k2a, k3a = lay["k1a"], lay["k2a"], lay["k3a"]
    case4 = plan.case == 4
    f_per = cfg.m - cfg.n1 - cfg.n2 if case4 else 0
    b_per = cfg.m - cfg.n2 - cfg.n3 if case4 else 0
    d_per = cfg.m - cfg.n1 - cfg.n3 if case4 else 0
    stages: List[Stage] = []

    def vpart(stream, part):
        off = dec.offs[stream][part]
        return dec.vals[stream][off : off + plan.stream_length(part)]

    if rx == 1:
        l_ab, l_ac = lay["l_ab"], lay["l_ac"]
        _, z_len = dec._y0_known_and_unknown(1)
        truth = dec.vals["s1"] + dec.vals["s3"] + dec._y0_residual_truth(1, z_len)
        st1 = Stage(1, "phase3-side-info", l_ab + l_ac + z_len, truth)
        dec._phase3_rows(1, st1, {"s1": 0, "s2": None, "s3": l_ab}, l_ab + l_ac, z_len)
        stages.append(st1)
        if dur.t12:
            stages.append(dec._slot_solve(1, "v12", "s1", "slot12"))
        if dur.t13:
            stages.append(dec._slot_solve(1, "v13", "s3", "slot13"))
        if dur.t1:
            st = Stage(1, "xa1", plan.primaries["xa1"], dec.vals["xa1"])
            xab_a, xab_b = vpart("v12", "xab_a"), vpart("v12", "xab_b")
            y01 = vpart("v12", "y01") if case4 else []
            w1 = dec.seg["w1"]
            for j in range(dur.t1):
                t = w1.ts_start + j
                own = [
                    dec.obs[1][t][r] - xab_b[j * cfg.n1 + r] for r in range(cfg.n1)
                ]
                spec = [
                    (2, t, k1a, xab_a[j * k1a : (j + 1) * k1a]),
                    (1, t, cfg.n1, own),
                ]
                if case4:
                    arows = [
                        y01[j * f_per + r] - dec._padded("Bpp", j * f_per + r)
                        for r in range(f_per)
                    ]
                    spec.append((3, t, f_per, arows))
                dec._final_block_rows(st, spec, j, a1)
            stages.append(st)
        if dur.t3:
            st = Stage(1, "xa2", plan.primaries["xa2"], dec.vals["xa2"])
            xac_a, xac_c = vpart("v13", "xac_a"), vpart("v13", "xac_c")
            y03 = vpart("v13", "y03") if case4 else []
            zeta = dec._y0_residual_truth(1, z_len)
            w3 = dec.seg["w3"]
            for j in range(dur.t3):
                t = w3.ts_start + j
                own = [
                    dec.obs[1][t][r] - xac_c[j * cfg.n1 + r] for r in range(cfg.n1)
                ]
                spec = [
                    (3, t, k3a, xac_a[j * k3a : (j + 1) * k3a]),
                    (1, t, cfg.n1, own),
                ]
                if case4:
                    erows = [
                        zeta[j * d_per + r] - y03[j * d_per + r] for r in range(d_per)
                    ]
                    spec.append((2, t, d_per, erows))
                dec._final_block_rows(st, spec, j, a3)
            stages.append(st)
        return stages

    if rx == 2:
        l12 = plan.stream_length("v12")
        l_bc = lay["l_bc"]
        _, z_len = dec._y0_known_and_unknown(2)
        truth = dec.vals["v12"] + dec.vals["s2"] + dec._y0_residual_truth(2, z_len)
        st1 = Stage(2, "phase3+slot12", l12 + l_bc + z_len, truth)
        dec._own_slot_rows(2, "v12", st1, 0)
        dec._phase3_rows(2, st1, {"s1": ("expand", 0), "s2": l12, "s3": None}, l12 + l_bc, z_len)
        stages.append(st1)
        if dur.t23:
            stages.append(dec._slot_solve(2, "v23", "s2", "slot23"))
        if dur.t2:
            st = Stage(2, "xb2", plan.primaries["xb2"], dec.vals["xb2"])
            xbc_b, xbc_c = vpart("v23", "xbc_b"), vpart("v23", "xbc_c")
            y02 = vpart("v23", "y02") if case4 else []
            w2 = dec.seg["w2"]
            for j in range(dur.t2):
                t = w2.ts_start + j
                own = [
                    dec.obs[2][t][r] - xbc_c[j * cfg.n2 + r] for r in range(cfg.n2)
                ]
                spec = [
                    (3, t, k2a, xbc_b[j * k2a : (j + 1) * k2a]),
                    (2, t, cfg.n2, own),
                ]
                if case4:
                    crows = [
                        y02[j * b_per + r] - dec._padded("Dpp", j * b_per + r)
                        for r in range(b_per)
                    ]
                    spec.append((1, t, b_per, crows))
                dec._final_block_rows(st, spec, j, a2)
            stages.append(st)
        if dur.t1:
            st = Stage(2, "xb1", plan.primaries["xb1"], dec.vals["xb1"])
            xab_a, xab_b = vpart("v12", "xab_a"), vpart("v12", "xab_b")
            y01 = vpart("v12", "y01") if case4 else []
            eta = dec._y0_residual_truth(2, z_len)
            w1 = dec.seg["w1"]
            for j in range(dur.t1):
                t = w1.ts_start + j
                own = [
                    dec.obs[2][t][r] - xab_a[j * k1a + r] for r in range(cfg.n2)
                ]
                spec = [
                    (2, t, cfg.n2, own),
                    (1, t, cfg.n1, xab_b[j * cfg.n1 : (j + 1) * cfg.n1]),
                ]
                if case4:
                    frows = [
                        eta[j * f_per + r] - y01[j * f_per + r] for r in range(f_per)
                    ]
                    spec.append((3, t, f_per, frows))
                dec._final_block_rows(st, spec, j, a1)
            stages.append(st)
        return stages

    l23, l13 = plan.stream_length("v23"), plan.stream_length("v13")
    _, z_len = dec._y0_known_and_unknown(3)
    truth = dec.vals["v23"] + dec.vals["v13"] + dec._y0_residual_truth(3, z_len)
    st1 = Stage(3, "phase3+slots", l23 + l13 + z_len, truth)
    dec._own_slot_rows(3, "v23", st1, 0)
    dec._own_slot_rows(3, "v13", st1, l23)
    dec._phase3_rows(
        3, st1, {"s1": None, "s2": ("expand", 0), "s3": ("expand", l23)}, l23 + l13, z_len
    )
    stages.append(st1)
    if dur.t3:
        st = Stage(3, "xc2", plan.primaries["xc2"], dec.vals["xc2"])
        xac_a, xac_c = vpart("v13", "xac_a"), vpart("v13", "xac_c")
        y03 = vpart("v13", "y03") if case4 else []
        w3 = dec.seg["w3"]
        for j in range(dur.t3):
            t = w3.ts_start + j
            cleaned = [dec.obs[3][t][r] - xac_a[j * k3a + r] for r in range(k3a)]
            spec = [
                (1, t, cfg.n1, xac_c[j * cfg.n1 : (j + 1) * cfg.n1]),
                (3, t, k3a, cleaned),
            ]
            if case4:
                erows = [
                    y03[j * d_per + r] - dec._padded("Fv", j * d_per + r)
                    for r in range(d_per)
                ]
                spec.append((2, t, d_per, erows))
            dec._final_block_rows(st, spec, j, a3)
        stages.append(st)
    if dur.t2:
        st = Stage(3, "xc1", plan.primaries["xc1"], dec.vals["xc1"])
        xbc_b, xbc_c = vpart("v23", "xbc_b"), vpart("v23", "xbc_c")
        y02 = vpart("v23", "y02") if case4 else []
        theta = dec._y0_residual_truth(3, z_len)
        w2 = dec.seg["w2"]
        for j in range(dur.t2):
            t = w2.ts_start + j
            cleaned = [dec.obs[3][t][r] - xbc_b[j * k2a + r] for r in range(k2a)]
            spec = [
                (2, t, cfg.n2, xbc_c[j * cfg.n2 : (j + 1) * cfg.n2]),
                (3, t, k2a, cleaned),
            ]
            if case4:
                brows = [
                    theta[j * b_per + r] - y02[j * b_per + r] for r in range(b_per)
                ]
                spec.append((1, t, b_per, brows))
            dec._final_block_rows(st, spec, j, a2)
        stages.append(st)
    return stages


def _decode_order2(dec: _Decoder, rx: int) -> List[Stage]:
    plan = dec.plan
    dur = plan.durations
    stages: List[Stage] = []
    if rx == 1:
        l_ab, l_ac = dec.lay["l_ab"], dec.lay["l_ac"]
        st1 = Stage(1, "phase2-side-info", l_ab + l_ac, dec.vals["s1"] + dec.vals["s3"])
        dec._phase3_rows(1, st1, {"s1": 0, "s2": None, "s3": l_ab}, l_ab + l_ac, 0)
        stages.append(st1)
        if dur.t12:
            stages.append(dec._slot_solve(1, "v12", "s1", "xab"))
        if dur.t13:
            stages.append(dec._slot_solve(1, "v13", "s3", "xac"))
        return stages
    if rx == 2:
        l12 = plan.stream_length("v12")
        l_bc = dec.lay["l_bc"]
        st1 = Stage(2, "phase2+slot12", l12 + l_bc, dec.vals["v12"] + dec.vals["s2"])
        dec._own_slot_rows(2, "v12", st1, 0)
        dec._phase3_rows(2, st1, {"s1": ("expand", 0), "s2": l12, "s3": None}, l12 + l_bc, 0)
        stages.append(st1)
        if dur.t23:
            stages.append(dec._slot_solve(2, "v23", "s2", "xbc"))
        return stages
    l23, l13 = plan.stream_length("v23"), plan.stream_length("v13")
    st1 = Stage(3, "phase2+slots", l23 + l13, dec.vals["v23"] + dec.vals["v13"])
    dec._own_slot_rows(3, "v23", st1, 0)
    dec._own_slot_rows(3, "v13", st1, l23)
    dec._phase3_rows(3, st1, {"s1": None, "s2": ("expand", 0), "s3": ("expand", l23)}, l23 + l13, 0)
    stages.append(st1)
    return stages


def max_stage_dimension(plan: SchemePlan) -> int:
    """Largest unknown count any decode stage will see; used as a cost gate."""
    lay = plan.layout
    dims = [lay["l_ab"] + lay["l_ac"] + lay.get("d_sup", 0)]
    dims.append(plan.stream_length("v12") + lay["l_bc"] + lay.get("f_sup", 0))
    dims.append(
        plan.stream_length("v23") + plan.stream_length("v13") + lay.get("b_sup", 0)
    )
    dims += [plan.primaries[k] for k in plan.primaries]
    return max(dims)


def run(plan: SchemePlan, channels: ChannelRealization) -> DecodingReport:
    """Simulate one channel realization and certify exact decoding."""
    primaries = draw_symbols(plan, channels.seed)
    vals = evaluate_values(plan, channels, primaries)
    obs = compute_observations(plan, channels, vals)
    dec = _Decoder(plan, channels, vals, obs)
    audit = plan.equation_audit()
    reports = []
    overall = True
    for rx in (1, 2, 3):
        stages = _decode_receiver(dec, rx)
        records, failed = _certify_all(stages)
        ok = failed is None
        overall = overall and ok
        desired = plan.desired_counts()[rx - 1]
        reports.append(
            ReceiverReport(
                receiver=rx,
                unknown_count=desired,
                lacking_equations=audit[rx - 1][1],
                delivered_equations=audit[rx - 1][2],
                stages=records,
                success=ok,
                reconstruction_match=ok,
            )
        )
    return DecodingReport(
        cfg=plan.cfg,
        kind=plan.kind,
        total_ts=plan.total_ts,
        receivers=reports,
        achieved=plan.achieved_tuple(),
        success=overall,
        resamples=channels.resamples,
    )


def run_certified(plan: SchemePlan, seed: int, max_resamples: int = MAX_RESAMPLES) -> DecodingReport:
    """Run with resampling: a rank shortfall triggers a fresh channel draw; a
    shortfall that survives ``max_resamples`` draws is structural."""
    last = None
    for attempt in range(max_resamples):
        channels = draw_channels(plan, seed + 0x10001 * attempt)
        channels.resamples = attempt
        report = run(plan, channels)
        if report.success:
            return report
        last = report
    raise GenericityExhausted(
        f"{plan.cfg} {plan.kind}: decode failed for {max_resamples} independent draws; "
        f"last report: {[ (r.receiver, [s.detail for s in r.stages if not s.ok]) for r in last.receivers if not r.success ]}"
    )


@dataclass
class BatchRow:
    cfg: AntennaConfig
    seed: Optional[int]
    status: str  # PASS | SKIP | FAIL
    reason: str = ""


def batch_verify(
    configs: Sequence[AntennaConfig],
    seeds: Sequence[int],
    stage_budget: int = DEFAULT_STAGE_BUDGET,
) -> List[BatchRow]:
    """Corner-point pipeline per config x seed; failures are data, not raises."""
    from .durations import corner_point
    from .scheme import UnalignedSupports, build_order1_scheme

    from .durations import solve_for_case
    from .scheme import stage_dimension_bound

    rows: List[BatchRow] = []
    for cfg in configs:
        try:
            p0 = corner_point(cfg)
            dur = solve_for_case(cfg)
            if cfg.order1_case == 4:
                sups = {
                    dur.t1 * (cfg.m - cfg.n1 - cfg.n2),
                    dur.t2 * (cfg.m - cfg.n2 - cfg.n3),
                    dur.t3 * (cfg.m - cfg.n1 - cfg.n3),
                }
                if len(sups) > 1:
                    rows.append(BatchRow(cfg, None, "SKIP", "unaligned-extra-blocks"))
                    continue
            if stage_dimension_bound(cfg, dur, "order1") > stage_budget:
                rows.append(BatchRow(cfg, None, "SKIP", "simulation-size-budget"))
                continue
            plan = build_order1_scheme(cfg, dur)
        except NegativeDuration:
            rows.append(BatchRow(cfg, None, "SKIP", "negative-duration"))
            continue
        except UnalignedSupports:
            rows.append(BatchRow(cfg, None, "SKIP", "unaligned-extra-blocks"))
            continue
        except SizeMismatch as e:
            rows.append(BatchRow(cfg, None, "SKIP", f"size-mismatch: {e}"))
            continue
        for seed in seeds:
            try:
                report = run_certified(plan, seed)
            except GenericityExhausted as e:
                rows.append(BatchRow(cfg, seed, "FAIL", str(e)))
                continue
            if report.achieved != p0:
                rows.append(BatchRow(cfg, seed, "FAIL", "achieved tuple != corner point"))
            else:
                rows.append(BatchRow(cfg, seed, "PASS"))
    return rows
