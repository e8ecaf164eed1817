"""Command-line surface: region queries, corner points, simulations,
region comparisons, sum-DoF sweeps and the Corollary-1 scan.

Exit codes: 0 success, 2 unsupported case, 3 decode failure, 4 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from .config import AntennaConfig, UnsupportedCase, condition_star
from .durations import NegativeDuration, corner_report, solve_for_case
from .exact import rat_decimal, rat_str
from .regions import (
    nocsit_vs_delayed_order2,
    order1_outer,
    order1_region_achievable,
    order1_region_nocsit,
    order2_outer_full,
    order2_region_delayed,
    order2_region_nocsit,
)
from .scheme import SizeMismatch, build_order1_scheme, build_order2_scheme
from .simulator import GenericityExhausted, run_certified

EXIT_OK = 0
EXIT_UNSUPPORTED = 2
EXIT_DECODE_FAILURE = 3
EXIT_INVALID = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _emit(args, payload: dict, csv_rows: Optional[List[List[str]]] = None):
    if args.format == "csv" and csv_rows is not None:
        text = "\n".join(",".join(row) for row in csv_rows) + "\n"
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> AntennaConfig:
    try:
        return AntennaConfig.parse(args.config)
    except ValueError as e:
        raise CliError(str(e), EXIT_INVALID)


def _region_for(cfg: AntennaConfig, messages: str, variant: str):
    if messages == "order2":
        table = {
            "delayed": order2_region_delayed,
            "achievable": order2_region_delayed,
            "nocsit": order2_region_nocsit,
            "outer": order2_outer_full,
        }
    else:
        table = {
            "delayed": order1_region_achievable,
            "achievable": order1_region_achievable,
            "nocsit": order1_region_nocsit,
            "outer": order1_outer,
        }
    try:
        fn = table[variant]
    except KeyError:
        raise CliError(f"unknown variant {variant!r}", EXIT_INVALID)
    return fn(cfg)


def cmd_region(args) -> int:
    cfg = _config(args)
    try:
        region = _region_for(cfg, args.messages, args.variant)
    except UnsupportedCase as e:
        raise CliError(str(e), EXIT_UNSUPPORTED)
    payload = {
        "config": str(cfg),
        "messages": args.messages,
        "variant": args.variant,
        "region": region.to_json(),
    }
    rows = [["a1", "a2", "a3", "b"]] + [
        [rat_str(c) for c in h.normal] + [rat_str(h.offset)] for h in region.halfspaces
    ]
    _emit(args, payload, rows)
    return EXIT_OK


def cmd_corner(args) -> int:
    cfg = _config(args)
    try:
        rep = corner_report(cfg)
    except UnsupportedCase as e:
        raise CliError(str(e), EXIT_UNSUPPORTED)
    except NegativeDuration as e:
        raise CliError(str(e), EXIT_UNSUPPORTED)
    payload = {
        "config": str(cfg),
        "case": rep.case,
        "branch": rep.branch,
        "condition": condition_star(cfg).value,
        "corner_point": [rat_str(x) for x in rep.point],
        "corner_point_decimal": [rat_decimal(x) for x in rep.point],
        "durations": dict(
            zip(("T1", "T2", "T3", "T12", "T23", "T13", "T"), rep.durations.as_tuple())
        ),
        "tight_planes": [
            {"a": [rat_str(c) for c in coeffs], "b": rat_str(rhs)}
            for coeffs, rhs in rep.tight_planes
        ],
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _config(args)
    try:
        if args.messages == "order2":
            from .durations import order2_durations_for_target

            if args.target:
                target = [Fraction(x) for x in args.target.split(",")]
            else:
                from .regions import order2_region_delayed

                _, target = order2_region_delayed(cfg).maximize([1, 1, 1])
            dur = order2_durations_for_target(cfg, target)
            plan = build_order2_scheme(cfg, dur)
        else:
            plan = build_order1_scheme(cfg)
    except (UnsupportedCase, NegativeDuration, SizeMismatch) as e:
        raise CliError(str(e), EXIT_UNSUPPORTED)
    try:
        report = run_certified(plan, args.seed)
    except GenericityExhausted as e:
        raise CliError(str(e), EXIT_DECODE_FAILURE)
    _emit(args, report.to_json())
    return EXIT_OK if report.success else EXIT_DECODE_FAILURE


def cmd_compare(args) -> int:
    cfg = _config(args)
    payload = {"config": str(cfg), "messages": args.messages, "regions": {}, "verdicts": {}}
    if args.messages == "order2":
        de = order2_region_delayed(cfg)
        no = order2_region_nocsit(cfg)
        payload["regions"]["delayed"] = de.to_json()
        payload["regions"]["nocsit"] = no.to_json()
        payload["verdicts"]["nocsit_vs_delayed"] = (
            "equal" if cfg.m <= cfg.n2 else "no-CSIT strictly inside"
        )
        computed = nocsit_vs_delayed_order2(cfg)
        payload["verdicts"]["computed"] = (
            "equal" if computed == "equal" else "no-CSIT strictly inside"
        )
        if (computed == "equal") != (cfg.m <= cfg.n2):
            raise CliError("region comparison disagrees with the M <= N2 criterion", 1)
    else:
        no = order1_region_nocsit(cfg)
        payload["regions"]["nocsit"] = no.to_json()
        if cfg.m <= cfg.n2:
            # The delayed-CSIT region collapses onto the no-CSIT one; the
            # Case-1 achievable construction itself is out of scope.
            payload["verdicts"]["nocsit_vs_delayed"] = "equal"
        else:
            payload["verdicts"]["nocsit_vs_delayed"] = "no-CSIT strictly inside"
            try:
                ach = order1_region_achievable(cfg)
                payload["regions"]["achievable"] = ach.to_json()
                if not no.subset(ach):
                    raise CliError("no-CSIT region not inside achievable region", 1)
                payload["verdicts"]["nocsit_strictly_inside_achievable"] = not ach.subset(no)
                out = order1_outer(cfg)
                payload["regions"]["outer"] = out.to_json()
                payload["verdicts"]["achievable_equals_outer"] = ach.set_equal(out)
            except (UnsupportedCase, NegativeDuration) as e:
                payload["verdicts"]["achievable"] = f"unsupported: {e}"
    _emit(args, payload)
    return EXIT_OK


def _sweep_point(cfg: AntennaConfig):
    ones = [Fraction(1)] * 3
    row = {"config": str(cfg), "case": cfg.order1_case, "status": "OK"}
    try:
        ach = order1_region_achievable(cfg)
    except (UnsupportedCase, NegativeDuration, SizeMismatch) as e:
        return {**row, "status": "SKIP", "reason": str(e)}
    ach_sum, _ = ach.maximize(ones)
    row["sum_dof_achievable"] = ach_sum
    if cfg.order1_case in (2, 3):
        out_sum, _ = order1_outer(cfg).maximize(ones)
        row["sum_dof_outer"] = out_sum
        row["gap"] = out_sum - ach_sum
    return row


def cmd_sweep(args) -> int:
    try:
        fixed = [int(x) for x in args.fixed.split(",")]
        lo, hi = (int(x) for x in args.range.split(".."))
    except ValueError as e:
        raise CliError(f"bad sweep spec: {e}", EXIT_INVALID)
    if len(fixed) != 3 or args.vary not in ("n1", "n2", "n3", "m"):
        raise CliError("sweep needs --fixed A,B,C and --vary one of n1,n2,n3,m", EXIT_INVALID)
    rows_out = []
    header = [
        "config",
        "case",
        "status",
        "sum_dof_achievable",
        "sum_dof_achievable_decimal",
        "sum_dof_outer",
        "sum_dof_outer_decimal",
        "gap",
        "gap_decimal",
    ]
    csv_rows = [header]
    for value in range(lo, hi + 1):
        fields = dict(zip(("n1", "n2", "n3", "m"), _insert_varying(fixed, args.vary, value)))
        try:
            cfg = AntennaConfig(**fields)
        except ValueError as e:
            rows_out.append({"value": value, "status": "SKIP", "reason": str(e)})
            csv_rows.append([f"{value}", "", "SKIP", "", "", "", "", "", ""])
            continue
        row = _sweep_point(cfg)
        rows_out.append(_jsonable(row))
        csv_rows.append(
            [
                row["config"],
                str(row["case"]),
                row["status"],
                _maybe_rat(row.get("sum_dof_achievable")),
                _maybe_dec(row.get("sum_dof_achievable")),
                _maybe_rat(row.get("sum_dof_outer")),
                _maybe_dec(row.get("sum_dof_outer")),
                _maybe_rat(row.get("gap")),
                _maybe_dec(row.get("gap")),
            ]
        )
    _emit(args, {"vary": args.vary, "rows": rows_out}, csv_rows)
    return EXIT_OK


def _insert_varying(fixed: List[int], vary: str, value: int) -> List[int]:
    order = ["n1", "n2", "n3", "m"]
    out = []
    it = iter(fixed)
    for name in order:
        out.append(value if name == vary else next(it))
    return out


def _maybe_rat(x) -> str:
    return rat_str(x) if x is not None else ""


def _maybe_dec(x) -> str:
    return rat_decimal(x) if x is not None else ""


def _jsonable(row: dict) -> dict:
    return {
        k: (rat_str(v) if isinstance(v, Fraction) else v) for k, v in row.items()
    }


def scan_corollary1(max_antennas: int) -> List[dict]:
    """All (N1, N2, N3) up to the bound meeting the equality condition, with
    the full Case-2 range of M."""
    out = []
    for n1 in range(1, max_antennas + 1):
        for n2 in range(n1, max_antennas + 1):
            for n3 in range(n2, max_antennas + 1):
                probe = AntennaConfig(n1, n2, n3, 1)
                if condition_star(probe).value != "holds_equality":
                    continue
                m_lo = max(n1 + n2, n3) + 1
                m_hi = n1 + n3
                if m_lo > m_hi:
                    continue
                out.append(
                    {"n1": n1, "n2": n2, "n3": n3, "m_min": m_lo, "m_max": m_hi}
                )
    return out


def cmd_scan(args) -> int:
    if args.max_antennas < 4:
        raise CliError("scan needs --max-antennas >= 4", EXIT_INVALID)
    rows = scan_corollary1(args.max_antennas)
    csv_rows = [["n1", "n2", "n3", "m_min", "m_max"]] + [
        [str(r["n1"]), str(r["n2"]), str(r["n3"]), str(r["m_min"]), str(r["m_max"])]
        for r in rows
    ]
    _emit(args, {"max_antennas": args.max_antennas, "rows": rows}, csv_rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dof",
        description="DoF regions and transmission-scheme simulation for the "
        "three-user broadcast channel with delayed CSIT",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", metavar="FILE", default=None)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("region", help="emit a region's halfspaces and vertices")
    p.add_argument("--config", required=True, metavar="N1,N2,N3,M")
    p.add_argument("--messages", choices=("order1", "order2"), required=True)
    p.add_argument(
        "--variant", choices=("delayed", "nocsit", "outer", "achievable"), required=True
    )
    common(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("corner", help="corner point P0, durations and tight planes")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_corner)

    p = sub.add_parser("simulate", help="synthesize a scheme and certify decoding")
    p.add_argument("--config", required=True)
    p.add_argument("--messages", choices=("order1", "order2"), default="order1")
    p.add_argument("--target", default=None, metavar="d12,d23,d13")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="compare delayed/no-CSIT/outer regions")
    p.add_argument("--config", required=True)
    p.add_argument("--messages", choices=("order1", "order2"), default="order2")
    common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="sum-DoF sweep over one antenna parameter")
    p.add_argument("--fixed", required=True, metavar="A,B,C")
    p.add_argument("--vary", required=True, choices=("n1", "n2", "n3", "m"))
    p.add_argument("--range", required=True, metavar="LO..HI")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scan-corollary1", help="antenna configurations meeting Corollary 1")
    p.add_argument("--max-antennas", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_scan)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
