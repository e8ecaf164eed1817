"""Antenna configurations, case labelling and the duration-branch condition."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class UnsupportedCase(Exception):
    """The requested construction is not defined for this antenna case."""


class ConditionStar(enum.Enum):
    """Outcome of N1²(N3−N1) + N2²(N3−N2) vs N1·N2·(N1+N2−N3)."""

    HOLDS_STRICT = "holds_strict"
    HOLDS_EQUALITY = "holds_equality"
    FAILS = "fails"

    @property
    def holds(self) -> bool:
        return self is not ConditionStar.FAILS


@dataclass(frozen=True, order=True)
class AntennaConfig:
    """Receive antenna counts N1 <= N2 <= N3 and transmit antenna count M."""

    n1: int
    n2: int
    n3: int
    m: int

    def __post_init__(self):
        if not (1 <= self.n1 <= self.n2 <= self.n3):
            raise ValueError(f"need 1 <= N1 <= N2 <= N3, got {self}")
        if self.m < 1:
            raise ValueError("need M >= 1")

    @staticmethod
    def parse(text: str) -> "AntennaConfig":
        parts = text.split(",")
        if len(parts) != 4:
            raise ValueError(f"config must be N1,N2,N3,M, got {text!r}")
        return AntennaConfig(*(int(p) for p in parts))

    def __str__(self) -> str:
        return f"{self.n1},{self.n2},{self.n3},{self.m}"

    @property
    def order1_case(self) -> int:
        """Case index of the order-1 analysis (1..4); boundaries are exact."""
        if self.m <= max(self.n1 + self.n2, self.n3):
            return 1
        if self.m <= self.n1 + self.n3:
            return 2
        if self.m <= self.n2 + self.n3:
            return 3
        return 4

    @property
    def order2_subcase(self) -> str:
        if self.m <= self.n2:
            return "m_le_n2"
        if self.m <= self.n3:
            return "n2_lt_m_le_n3"
        return "n3_lt_m"


def condition_star(cfg: AntennaConfig) -> ConditionStar:
    """Exact evaluation of the antenna-configuration condition.

    N1 + N2 < N3 always lands on the failing side: the right-hand side turns
    negative while the left-hand side stays nonnegative.
    """
    lhs = cfg.n1**2 * (cfg.n3 - cfg.n1) + cfg.n2**2 * (cfg.n3 - cfg.n2)
    rhs = cfg.n1 * cfg.n2 * (cfg.n1 + cfg.n2 - cfg.n3)
    if lhs < rhs:
        return ConditionStar.HOLDS_STRICT
    if lhs == rhs:
        return ConditionStar.HOLDS_EQUALITY
    return ConditionStar.FAILS
