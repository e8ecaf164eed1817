"""Convex polytopes in 2- and 3-dimensional DoF space, in exact arithmetic.

Regions are stored as halfspace lists (a·d <= b) and enumerate their vertices
by intersecting dim-sized subsets of halfspaces.  All regions built by this
package carry the nonnegativity constraints d_i >= 0, contain the origin and
are bounded; ``vertices`` verifies boundedness via the recession cone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from .exact import Inconsistent, RankDeficient, rat_str, solve_unique


class Unbounded(Exception):
    pass


class EmptyRegion(Exception):
    pass


class DimensionMismatch(Exception):
    pass


class DegenerateHull(Exception):
    """All hull input points are affinely dependent (flagged, not fatal)."""


@dataclass(frozen=True)
class Halfspace:
    """The constraint normal · d <= offset."""

    normal: Tuple[Fraction, ...]
    offset: Fraction

    def __post_init__(self):
        if all(c == 0 for c in self.normal):
            raise ValueError("halfspace normal must be nonzero")

    def holds(self, p: Sequence[Fraction]) -> bool:
        return sum(c * x for c, x in zip(self.normal, p)) <= self.offset

    def tight(self, p: Sequence[Fraction]) -> bool:
        return sum(c * x for c, x in zip(self.normal, p)) == self.offset

    def scaled_key(self) -> Tuple:
        """Canonical form under positive scaling, for deduplication."""
        lead = next(c for c in list(self.normal) + [self.offset] if c != 0)
        s = abs(lead)
        return (tuple(c / s for c in self.normal), self.offset / s)


def halfspace(coeffs: Sequence, offset) -> Halfspace:
    return Halfspace(tuple(Fraction(c) for c in coeffs), Fraction(offset))


def nonnegativity(dim: int) -> List[Halfspace]:
    out = []
    for i in range(dim):
        coeffs = [Fraction(0)] * dim
        coeffs[i] = Fraction(-1)
        out.append(Halfspace(tuple(coeffs), Fraction(0)))
    return out


@dataclass
class Region:
    """Bounded convex polytope given by halfspaces; vertices computed lazily."""

    dim: int
    halfspaces: List[Halfspace]
    name: str = ""
    degenerate: bool = False
    _vertices: Optional[List[Tuple[Fraction, ...]]] = field(default=None, repr=False)

    def contains(self, p: Sequence[Fraction]) -> bool:
        if len(p) != self.dim:
            raise DimensionMismatch(f"point has dim {len(p)}, region {self.dim}")
        pt = [Fraction(x) for x in p]
        return all(h.holds(pt) for h in self.halfspaces)

    def _recession_direction_exists(self) -> bool:
        # The recession cone is {x : a_j*x <= 0 for all j}.  Our regions carry
        # d >= 0, so it suffices to search the cone intersected with the
        # standard simplex sum(x) = 1; nonempty intersection <=> unbounded.
        cone = [h for h in self.halfspaces] + nonnegativity(self.dim)
        cone = [Halfspace(h.normal, Fraction(0)) for h in cone]
        ones = Halfspace(tuple([Fraction(1)] * self.dim), Fraction(1))
        neg_ones = Halfspace(tuple([Fraction(-1)] * self.dim), Fraction(-1))
        probe = Region(self.dim, cone + [ones, neg_ones])
        return len(probe._enumerate_vertices(check_bounded=False)) > 0

    def _enumerate_vertices(self, check_bounded: bool = True) -> List[Tuple[Fraction, ...]]:
        hs = self.halfspaces
        seen = set()
        verts: List[Tuple[Fraction, ...]] = []
        for subset in combinations(range(len(hs)), self.dim):
            a = [list(hs[i].normal) for i in subset]
            b = [hs[i].offset for i in subset]
            try:
                x = solve_unique(a, b)
            except (RankDeficient, Inconsistent):
                continue
            pt = tuple(x)
            if pt in seen:
                continue
            if all(h.holds(x) for h in hs):
                seen.add(pt)
                verts.append(pt)
        if check_bounded and verts and self._recession_direction_exists():
            raise Unbounded(f"region {self.name or '?'} has a nontrivial recession cone")
        return verts

    def vertices(self) -> List[Tuple[Fraction, ...]]:
        if self._vertices is None:
            self._vertices = sorted(self._enumerate_vertices())
        return self._vertices

    def is_empty(self) -> bool:
        return len(self.vertices()) == 0

    def maximize(self, c: Sequence[Fraction]) -> Tuple[Fraction, Tuple[Fraction, ...]]:
        """Exact linear maximization; the optimum is attained at a vertex."""
        if len(c) != self.dim:
            raise DimensionMismatch("objective dimension mismatch")
        verts = self.vertices()
        if not verts:
            raise EmptyRegion(self.name or "region is empty")
        cc = [Fraction(x) for x in c]
        best = None
        arg = None
        for v in verts:
            val = sum(ci * vi for ci, vi in zip(cc, v))
            if best is None or val > best:
                best, arg = val, v
        return best, arg

    def subset(self, other: "Region") -> bool:
        """A ⊆ B iff every vertex of A satisfies every halfspace of B."""
        if self.dim != other.dim:
            raise DimensionMismatch("region dims differ")
        return all(other.contains(v) for v in self.vertices())

    def set_equal(self, other: "Region") -> bool:
        return self.subset(other) and other.subset(self)

    def with_halfspaces(self, hs: List[Halfspace]) -> "Region":
        return Region(self.dim, hs, name=self.name)

    def canonicalize(self) -> "Region":
        """Deduplicate halfspaces and drop the certified-dominated ones.

        A halfspace is removed only when the region built from the remaining
        ones still satisfies it everywhere (checked on exact vertices), i.e.
        no vertex is tight on it alone.
        """
        uniq: List[Halfspace] = []
        keys = set()
        for h in self.halfspaces:
            k = h.scaled_key()
            if k not in keys:
                keys.add(k)
                uniq.append(h)
        kept = list(uniq)
        i = 0
        while i < len(kept):
            h = kept[i]
            rest = kept[:i] + kept[i + 1 :]
            try:
                val, _ = Region(self.dim, rest).maximize(list(h.normal))
                redundant = val <= h.offset
            except (Unbounded, EmptyRegion):
                redundant = False
            if redundant:
                kept.pop(i)
            else:
                i += 1
        return Region(self.dim, kept, name=self.name)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "halfspaces": [
                {"a": [rat_str(c) for c in h.normal], "b": rat_str(h.offset)}
                for h in self.halfspaces
            ],
            "vertices": [[rat_str(c) for c in v] for v in self.vertices()],
        }


def region_from_rows(dim: int, rows: Sequence[Tuple[Sequence, object]], name: str = "") -> Region:
    """Region from (coeffs, offset) rows, plus the nonnegativity constraints."""
    hs = [halfspace(a, b) for a, b in rows] + nonnegativity(dim)
    return Region(dim, hs, name=name)


def convex_hull(
    points: Sequence[Sequence[Fraction]],
    dim: int,
    name: str = "",
) -> Region:
    """H-representation of the convex hull of exact points.

    Brute-force facet enumeration: every dim-subset spanning a hyperplane with
    all points on one side contributes a halfspace.  Adequate for the handful
    of vertices these regions have.  A flat (affinely dependent) input is
    returned with ``degenerate`` set, per the hull contract.
    """
    pts = [tuple(Fraction(x) for x in p) for p in points]
    pts = sorted(set(pts))
    if not pts:
        raise ValueError("hull of no points")
    if len(pts[0]) != dim:
        raise DimensionMismatch("hull point dimension mismatch")

    def normal_of(subset):
        # Solve for a hyperplane a·x = b through the subset (a != 0).
        base = subset[0]
        rows = [[p[j] - base[j] for j in range(dim)] for p in subset[1:]]
        # Kernel of the (dim-1) x dim difference matrix gives the normal.
        from .exact import nullspace

        ker = nullspace(rows) if rows else []
        if len(ker) != 1:
            return None
        a = ker[0]
        b = sum(ai * xi for ai, xi in zip(a, base))
        return a, b

    facets: List[Halfspace] = []
    keys = set()
    degenerate = True
    for subset in combinations(pts, dim):
        nb = normal_of(list(subset))
        if nb is None:
            continue
        a, b = nb
        vals = [sum(ai * xi for ai, xi in zip(a, p)) for p in pts]
        if all(v <= b for v in vals):
            cand = [Halfspace(tuple(a), b)]
        elif all(v >= b for v in vals):
            cand = [Halfspace(tuple(-ai for ai in a), -b)]
        else:
            degenerate = False
            continue
        if any(v != b for v in vals):
            degenerate = False
        for h in cand:
            k = h.scaled_key()
            if k not in keys:
                keys.add(k)
                facets.append(h)
    region = Region(dim, facets, name=name, degenerate=degenerate and dim > 1)
    region._vertices = None
    return region.canonicalize() if facets else region


def embed_face(face: Region, missing_axis: int) -> List[Tuple[Fraction, ...]]:
    """Vertices of a 2D face embedded in 3D with one coordinate fixed to 0."""
    out = []
    for v in face.vertices():
        p = list(v)
        p.insert(missing_axis, Fraction(0))
        out.append(tuple(p))
    return out
