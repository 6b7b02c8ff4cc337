"""GF(2) linear algebra on Python-int bitsets.

A vector of length ``n`` is an ``int`` whose bit ``k`` is component ``k``.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence


def popcount(x: int) -> int:
    return bin(x).count("1")


def to_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def from_mask(mask: int) -> List[int]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


def echelon(rows: Sequence[int]) -> List[int]:
    """Reduced basis of the row span, one row per distinct leading bit."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            lead = r.bit_length() - 1
            if lead in basis:
                r ^= basis[lead]
            else:
                basis[lead] = r
                break
    return list(basis.values())


def gf2_rank(rows: Sequence[int]) -> int:
    """Row rank over GF(2)."""
    return len(echelon(rows))


def in_span(vec: int, rows: Sequence[int]) -> bool:
    basis = {r.bit_length() - 1: r for r in echelon(rows)}
    while vec:
        lead = vec.bit_length() - 1
        if lead not in basis:
            return False
        vec ^= basis[lead]
    return True


def left_nullspace(rows: Sequence[int]) -> List[int]:
    """Basis of coefficient vectors ``a`` with ``XOR_i a_i rows[i] == 0``.

    Each returned int is a bitset over row positions.
    """
    basis: dict[int, tuple[int, int]] = {}
    null = []
    for i, r in enumerate(rows):
        combo = 1 << i
        while r:
            lead = r.bit_length() - 1
            if lead in basis:
                br, bc = basis[lead]
                r ^= br
                combo ^= bc
            else:
                basis[lead] = (r, combo)
                break
        if not r:
            null.append(combo)
    return null


def combine(rows: Sequence[int], coeffs: int) -> int:
    acc = 0
    for i in from_mask(coeffs):
        acc ^= rows[i]
    return acc


class Gf2Matrix:
    """Row-stacked GF(2) matrix with a fixed column count."""

    def __init__(self, rows: Iterable[int], n_cols: int):
        self.rows = list(rows)
        self.n_cols = n_cols
        limit = 1 << n_cols
        if any(r < 0 or r >= limit for r in self.rows):
            raise ValueError("row has bits beyond n_cols")

    @classmethod
    def from_supports(cls, supports: Iterable[Iterable[int]], n_cols: int) -> "Gf2Matrix":
        return cls((to_mask(s) for s in supports), n_cols)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.n_cols

    def rank(self) -> int:
        return gf2_rank(self.rows)

    def restrict(self, columns: Iterable[int]) -> "Gf2Matrix":
        m = to_mask(columns)
        return Gf2Matrix((r & m for r in self.rows), self.n_cols)

    def __repr__(self):
        return f"Gf2Matrix(shape={self.shape}, rank={self.rank()})"
