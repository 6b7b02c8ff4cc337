"""Pauli strings as GF(2) bitsets, toric-code stabilizers and loop operators.

A ``PauliString`` is ``sign * X^x Z^z`` where ``x`` and ``z`` are int bitsets
over edges (the Z factor acts first). Products of such strings only ever pick
up a sign, so no complex phase is tracked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Union

import numpy as np

from .errors import DomainError, InvalidLatticeError
from .gf2 import Gf2Matrix, echelon, from_mask, gf2_rank as _rank, popcount, to_mask
from .lattice import HORIZONTAL, VERTICAL, Lattice, Topology

Z_DIRECT = "z_direct"
X_DUAL = "x_dual"


@dataclass(frozen=True)
class PauliString:
    x: int
    z: int
    n: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.x >> self.n or self.z >> self.n:
            raise ValueError("support exceeds n")

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(0, 0, n)

    @classmethod
    def from_x(cls, edges: Iterable[int], n: int) -> "PauliString":
        return cls(to_mask(edges), 0, n)

    @classmethod
    def from_z(cls, edges: Iterable[int], n: int) -> "PauliString":
        return cls(0, to_mask(edges), n)

    @property
    def x_bits(self) -> np.ndarray:
        return np.array([(self.x >> k) & 1 for k in range(self.n)], dtype=np.uint8)

    @property
    def z_bits(self) -> np.ndarray:
        return np.array([(self.z >> k) & 1 for k in range(self.n)], dtype=np.uint8)

    @property
    def support(self) -> List[int]:
        return from_mask(self.x | self.z)

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    @property
    def symplectic(self) -> int:
        """``x | z << n``, the sign-free GF(2) vector."""
        return self.x | (self.z << self.n)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.x, self.z, self.n, -self.sign)

    def matrix(self) -> np.ndarray:
        """Dense ``2^n x 2^n`` matrix; only for small ``n``."""
        if self.n > 12:
            raise DomainError("dense Pauli matrix limited to n <= 12")
        dim = 1 << self.n
        idx = np.arange(dim, dtype=np.int64)
        phase = 1 - 2 * (np.bitwise_count(idx & self.z) & 1).astype(np.int64)
        out = np.zeros((dim, dim), dtype=np.float64)
        out[idx ^ self.x, idx] = self.sign * phase
        return out

    def __repr__(self):
        chars = []
        for k in range(self.n):
            bx, bz = (self.x >> k) & 1, (self.z >> k) & 1
            chars.append("IXZY"[bx + 2 * bz])
        return ("-" if self.sign < 0 else "+") + "".join(chars)


def _check_len(P: PauliString, Q: PauliString) -> None:
    if P.n != Q.n:
        raise ValueError(f"length mismatch: {P.n} vs {Q.n}")


def pauli_mul(P: PauliString, Q: PauliString) -> PauliString:
    """Product ``P Q``; moving Z^{z1} past X^{x2} costs ``(-1)^{|z1 & x2|}``."""
    _check_len(P, Q)
    sign = P.sign * Q.sign * (-1 if popcount(P.z & Q.x) & 1 else 1)
    return PauliString(P.x ^ Q.x, P.z ^ Q.z, P.n, sign)


def commutes(P: PauliString, Q: PauliString) -> bool:
    _check_len(P, Q)
    return (popcount(P.x & Q.z) + popcount(P.z & Q.x)) % 2 == 0


def gf2_rank(M: Union[Gf2Matrix, Sequence[int], Sequence[Iterable[int]]]) -> int:
    """Rank over GF(2) of a ``Gf2Matrix``, a list of int rows, or a list of supports."""
    if isinstance(M, Gf2Matrix):
        return M.rank()
    rows = list(M)
    if rows and not isinstance(rows[0], (int, np.integer)):
        rows = [to_mask(r) for r in rows]
    return _rank([int(r) for r in rows])


# ---------------------------------------------------------------- toric-code operators


def star_operator(lat: Lattice, s: int) -> PauliString:
    return PauliString.from_x(lat.stars[s], lat.n)


def plaquette_operator(lat: Lattice, p: int) -> PauliString:
    return PauliString.from_z(lat.faces[p], lat.n)


def stabilizers(lat: Lattice) -> List[PauliString]:
    """All star operators followed by all plaquette operators."""
    return [star_operator(lat, s) for s in range(lat.n_vertices)] + [
        plaquette_operator(lat, p) for p in range(lat.n_faces)
    ]


def loop_operator(lat: Lattice, kind: str, direction: str, offset: int = 0) -> PauliString:
    """Non-contractible loop operator on the torus.

    ``z_direct`` puts Z on a direct-lattice cycle: the vertical one is the
    column of vertical edges at ``x = offset``, the horizontal one the row of
    horizontal edges at ``y = offset``. ``x_dual`` puts X on the edges crossed
    by a dual cycle: the vertical one crosses the horizontal edges at
    ``x = offset``, the horizontal one crosses the vertical edges at ``y = offset``.
    """
    if lat.topology is not Topology.TORUS:
        raise InvalidLatticeError("no non-contractible loops on a planar patch")
    if direction == VERTICAL:
        col = offset % lat.Lx
        edges_v = [lat.v(col, y) for y in range(lat.Ly)]
        edges_h = [lat.h(col, y) for y in range(lat.Ly)]
    elif direction == HORIZONTAL:
        row = offset % lat.Ly
        edges_v = [lat.v(x, row) for x in range(lat.Lx)]
        edges_h = [lat.h(x, row) for x in range(lat.Lx)]
    else:
        raise ValueError(f"direction must be {HORIZONTAL!r} or {VERTICAL!r}")
    if kind == Z_DIRECT:
        return PauliString.from_z(edges_v if direction == VERTICAL else edges_h, lat.n)
    if kind == X_DUAL:
        return PauliString.from_x(edges_h if direction == VERTICAL else edges_v, lat.n)
    raise ValueError(f"kind must be {Z_DIRECT!r} or {X_DUAL!r}")


# ---------------------------------------------------------------- stabilizer-state oracles


def _restrict(vec: int, mask: int, n: int) -> int:
    return vec & (mask | (mask << n))


def _dim(gens: Sequence[PauliString]) -> int:
    return _rank([g.symplectic for g in gens])


def local_subgroup_dim(gens: Sequence[PauliString], region: Iterable[int]) -> int:
    """Dimension of the subgroup of elements supported inside ``region``."""
    gens = list(gens)
    if not gens:
        return 0
    n = gens[0].n
    outside = ((1 << n) - 1) ^ to_mask(region)
    return _dim(gens) - _rank([_restrict(g.symplectic, outside, n) for g in gens])


def stabilizer_entropy(gens: Sequence[PauliString], region: Iterable[int]) -> int:
    """Entropy (bits, every Renyi order) of ``region`` in the state stabilized by ``gens``.

    ``gens`` must generate a full stabilizer group (dimension ``n``), so the
    state is pure and ``S_A = |A| - dim G_A``.
    """
    gens = list(gens)
    n = gens[0].n
    if _dim(gens) != n:
        raise DomainError(f"generators span dimension {_dim(gens)}, need {n}")
    region = set(region)
    return len(region) - local_subgroup_dim(gens, region)


def local_generators(gens: Sequence[PauliString], region: Iterable[int]) -> List[int]:
    """Symplectic basis (int vectors) of the subgroup supported inside ``region``."""
    gens = list(gens)
    n = gens[0].n
    outside_mask = ((1 << n) - 1) ^ to_mask(region)
    outside = outside_mask | (outside_mask << n)
    # stack [inside | outside] so that eliminating the outside block first
    # leaves rows whose outside part vanished
    shift = 2 * n
    rows = []
    for g in gens:
        v = g.symplectic
        rows.append(((v & outside) << shift) | (v & ~outside & ((1 << shift) - 1)))
    basis = echelon(rows)
    return [r for r in basis if r >> shift == 0]


def stabilizer_log_negativity(gens: Sequence[PauliString], A: Iterable[int], B: Iterable[int]) -> float:
    """Logarithmic negativity of ``rho_AB`` for the pure stabilizer state of ``gens``.

    ``rho_AB`` is stabilized by the subgroup ``G_AB`` supported on ``A u B``;
    its negativity is half the GF(2) rank of the commutation matrix of
    ``G_AB`` restricted to ``A``.
    """
    gens = list(gens)
    n = gens[0].n
    A, B = set(A), set(B)
    if A & B:
        raise DomainError("A and B overlap")
    local = local_generators(gens, A | B)
    maskA = to_mask(A)
    full = (1 << n) - 1
    restricted = [_restrict(v, maskA, n) for v in local]
    rows = []
    for u in restricted:
        row = 0
        ux, uz = u & full, u >> n
        for j, w in enumerate(restricted):
            wx, wz = w & full, w >> n
            if (popcount(ux & wz) + popcount(uz & wx)) & 1:
                row |= 1 << j
        rows.append(row)
    r = _rank(rows)
    return r / 2.0
