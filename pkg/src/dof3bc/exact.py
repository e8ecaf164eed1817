"""Exact rational scalars, vectors and matrices.

Every quantity in this package (region coordinates, phase durations, channel
entries, symbol values) is an exact rational; there is no floating-point path.
Scalars are ``fractions.Fraction``; matrices are plain lists of lists.  Rank
uses fraction-free (Bareiss) elimination on a denominator-cleared integer
matrix, so no tolerance parameter exists anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, List, Sequence

Rat = Fraction

Vec = List[Fraction]
Mat = List[List[Fraction]]


class RankDeficient(Exception):
    """Raised when a solve requires full column rank that the matrix lacks."""


class Inconsistent(Exception):
    """Raised when a right-hand side is not in the column space."""


def rat(p, q=1) -> Fraction:
    return Fraction(p, q)


def rat_str(x: Fraction) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rat_parse(s: str) -> Fraction:
    return Fraction(s)


def rat_decimal(x: Fraction, places: int = 12) -> str:
    """Fixed-point decimal rendering via integer long division (no floats)."""
    x = Fraction(x)
    sign = "-" if x < 0 else ""
    n, d = abs(x.numerator), x.denominator
    whole, rem = divmod(n, d)
    digits = []
    for _ in range(places):
        rem *= 10
        dig, rem = divmod(rem, d)
        digits.append(str(dig))
    return f"{sign}{whole}." + "".join(digits)


def vec(entries: Iterable) -> Vec:
    return [Fraction(e) for e in entries]


def mat(rows: Iterable[Iterable]) -> Mat:
    out = [[Fraction(e) for e in row] for row in rows]
    if out:
        w = len(out[0])
        if any(len(r) != w for r in out):
            raise ValueError("ragged matrix")
    return out


def identity(n: int) -> Mat:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Mat:
    return [[Fraction(0)] * cols for _ in range(rows)]


def mat_vec(a: Mat, x: Sequence[Fraction]) -> Vec:
    if a and len(a[0]) != len(x):
        raise ValueError("dimension mismatch")
    return [sum((r[j] * x[j] for j in range(len(x))), Fraction(0)) for r in a]


def mat_mul(a: Mat, b: Mat) -> Mat:
    if a and b and len(a[0]) != len(b):
        raise ValueError("dimension mismatch")
    cols = len(b[0]) if b else 0
    return [
        [sum((row[k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(cols)]
        for row in a
    ]


def blkdiag(blocks: Sequence[Mat]) -> Mat:
    """Block-diagonal assembly; rows/cols are the sums of the block dims."""
    if not blocks:
        raise ValueError("need at least one block")
    total_r = sum(len(b) for b in blocks)
    total_c = sum(len(b[0]) if b else 0 for b in blocks)
    out = zeros(total_r, total_c)
    r0 = c0 = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, e in enumerate(row):
                out[r0 + i][c0 + j] = Fraction(e)
        r0 += len(b)
        c0 += len(b[0]) if b else 0
    return out


def _int_rows(a: Mat) -> List[List[int]]:
    """Clear denominators row by row; preserves rank and row space over Q."""
    out = []
    for row in a:
        mult = lcm(*(e.denominator for e in row)) if row else 1
        out.append([int(e * mult) for e in row])
    return out


def rank(a: Mat) -> int:
    """Exact rank via fraction-free (Bareiss) elimination over the integers."""
    if not a or not a[0]:
        return 0
    m = _int_rows(a)
    rows, cols = len(m), len(m[0])
    r = 0
    prev = 1
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        if r == rows:
            break
    return r


def solve_unique(a: Mat, b: Sequence[Fraction]) -> Vec:
    """The unique x with a·x = b.

    Requires full column rank (else RankDeficient) and b in the column space
    (else Inconsistent).  Plain rational Gauss-Jordan; matrices here are small.
    """
    rows = len(a)
    cols = len(a[0]) if a else 0
    if len(b) != rows:
        raise ValueError("dimension mismatch")
    aug = [[Fraction(e) for e in a[i]] + [Fraction(b[i])] for i in range(rows)]
    r = 0
    piv_cols = []
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        scale = aug[r][c]
        aug[r] = [e / scale for e in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [ei - f * ej for ei, ej in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    if len(piv_cols) < cols:
        raise RankDeficient(f"rank {len(piv_cols)} < {cols} columns")
    for i in range(r, rows):
        if aug[i][cols] != 0:
            raise Inconsistent("rhs not in column space")
    x = [Fraction(0)] * cols
    for k, c in enumerate(piv_cols):
        x[c] = aug[k][cols]
    return x


def nullspace(a: Mat) -> List[Vec]:
    """Basis of the right kernel, via rational RREF (small matrices only)."""
    rows = len(a)
    cols = len(a[0]) if a else 0
    m = [[Fraction(e) for e in row] for row in a]
    r = 0
    piv_cols: List[int] = []
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        scale = m[r][c]
        m[r] = [e / scale for e in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [ei - f * ej for ei, ej in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in piv_cols]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for k, pc in enumerate(piv_cols):
            v[pc] = -m[k][fc]
        basis.append(v)
    return basis


def normalize_integers(values: Sequence[Fraction]) -> List[int]:
    """Scale a nonnegative rational vector to the smallest integer vector.

    Clears denominators with an LCM, then divides by the GCD.  The all-zero
    vector is rejected; durations of a real scheme are never all zero.
    """
    vals = [Fraction(v) for v in values]
    if all(v == 0 for v in vals):
        raise ValueError("cannot normalize the zero vector")
    mult = lcm(*(v.denominator for v in vals))
    ints = [int(v * mult) for v in vals]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return [x // g for x in ints]
