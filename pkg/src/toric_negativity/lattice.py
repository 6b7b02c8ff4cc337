"""Square-lattice graphs for the toric code, edge regions, and boundary combinatorics.

Edges carry qubits. On the torus the edge leaving vertex ``(x, y)`` to the right
has id ``2*(y*Lx + x)`` and the edge leaving it upwards has id ``2*(y*Lx + x) + 1``.
Face ``(x, y)`` is the square whose lower-left corner is vertex ``(x, y)``.
Planar patches use the same ``(y, x, orientation)`` order with the missing
right/top border edges skipped, so their ids are contiguous.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from .errors import InvalidLatticeError, InvalidPartitionError
from .gf2 import echelon, left_nullspace, to_mask

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


class Topology(str, Enum):
    TORUS = "torus"
    PLANAR = "planar"


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    orientation: str
    x: int
    y: int


@dataclass(frozen=True, eq=False)
class Lattice:
    topology: Topology
    Lx: int
    Ly: int
    edges: Tuple[Edge, ...]
    stars: Tuple[Tuple[int, ...], ...]
    faces: Tuple[Tuple[int, ...], ...]
    face_coords: Tuple[Tuple[int, int], ...]
    _edge_ids: Mapping[Tuple[int, int, str], int] = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.edges)

    @property
    def n_vertices(self) -> int:
        return self.Lx * self.Ly

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def genus(self) -> int:
        return 1 if self.topology is Topology.TORUS else 0

    @property
    def kappa(self) -> int:
        """Number of independent non-contractible loops (2 on the torus, 0 on a patch)."""
        return 2 if self.topology is Topology.TORUS else 0

    def vertex(self, x: int, y: int) -> int:
        if self.topology is Topology.TORUS:
            x, y = x % self.Lx, y % self.Ly
        return y * self.Lx + x

    def vertex_coords(self, s: int) -> Tuple[int, int]:
        return s % self.Lx, s // self.Lx

    def edge_id(self, x: int, y: int, orientation: str) -> int:
        if self.topology is Topology.TORUS:
            x, y = x % self.Lx, y % self.Ly
        try:
            return self._edge_ids[(x, y, orientation)]
        except KeyError:
            raise InvalidLatticeError(f"no {orientation} edge at ({x}, {y})") from None

    def h(self, x: int, y: int) -> int:
        return self.edge_id(x, y, HORIZONTAL)

    def v(self, x: int, y: int) -> int:
        return self.edge_id(x, y, VERTICAL)

    def face_id(self, x: int, y: int) -> int:
        if self.topology is Topology.TORUS:
            return (y % self.Ly) * self.Lx + (x % self.Lx)
        return self.face_coords.index((x, y))

    @property
    def edge_faces(self) -> Tuple[Tuple[int, ...], ...]:
        """Faces containing each edge."""
        return _incidence(self.faces, self.n)

    @property
    def edge_stars(self) -> Tuple[Tuple[int, ...], ...]:
        return _incidence(self.stars, self.n)

    def __repr__(self):
        return f"Lattice({self.topology.value}, Lx={self.Lx}, Ly={self.Ly}, n={self.n})"


def _incidence(supports, n):
    out: List[List[int]] = [[] for _ in range(n)]
    for k, sup in enumerate(supports):
        for e in sup:
            out[e].append(k)
    return tuple(tuple(x) for x in out)


def build_torus(Lx: int, Ly: int) -> Lattice:
    """Periodic ``Lx`` x ``Ly`` square lattice with ``2*Lx*Ly`` edges."""
    if Lx < 2 or Ly < 2:
        raise InvalidLatticeError(f"torus needs Lx, Ly >= 2, got ({Lx}, {Ly})")
    edges = []
    ids = {}
    for y in range(Ly):
        for x in range(Lx):
            s = y * Lx + x
            ids[(x, y, HORIZONTAL)] = len(edges)
            edges.append(Edge(s, y * Lx + (x + 1) % Lx, HORIZONTAL, x, y))
            ids[(x, y, VERTICAL)] = len(edges)
            edges.append(Edge(s, ((y + 1) % Ly) * Lx + x, VERTICAL, x, y))

    def h(x, y):
        return ids[(x % Lx, y % Ly, HORIZONTAL)]

    def v(x, y):
        return ids[(x % Lx, y % Ly, VERTICAL)]

    stars = []
    faces = []
    coords = []
    for y in range(Ly):
        for x in range(Lx):
            stars.append((h(x, y), h(x - 1, y), v(x, y), v(x, y - 1)))
            faces.append((h(x, y), h(x, y + 1), v(x, y), v(x + 1, y)))
            coords.append((x, y))
    return Lattice(Topology.TORUS, Lx, Ly, tuple(edges), tuple(stars), tuple(faces), tuple(coords), ids)


def build_planar(Lx: int, Ly: int) -> Lattice:
    """Open ``Lx`` x ``Ly`` grid of vertices; border vertices have degree < 4."""
    if Lx < 2 or Ly < 2:
        raise InvalidLatticeError(f"planar patch needs Lx, Ly >= 2, got ({Lx}, {Ly})")
    edges = []
    ids = {}
    for y in range(Ly):
        for x in range(Lx):
            s = y * Lx + x
            if x + 1 < Lx:
                ids[(x, y, HORIZONTAL)] = len(edges)
                edges.append(Edge(s, s + 1, HORIZONTAL, x, y))
            if y + 1 < Ly:
                ids[(x, y, VERTICAL)] = len(edges)
                edges.append(Edge(s, s + Lx, VERTICAL, x, y))
    stars = []
    for y in range(Ly):
        for x in range(Lx):
            legs = [ids.get(k) for k in ((x, y, HORIZONTAL), (x - 1, y, HORIZONTAL),
                                         (x, y, VERTICAL), (x, y - 1, VERTICAL))]
            stars.append(tuple(e for e in legs if e is not None))
    faces = []
    coords = []
    for y in range(Ly - 1):
        for x in range(Lx - 1):
            faces.append((ids[(x, y, HORIZONTAL)], ids[(x, y + 1, HORIZONTAL)],
                          ids[(x, y, VERTICAL)], ids[(x + 1, y, VERTICAL)]))
            coords.append((x, y))
    return Lattice(Topology.PLANAR, Lx, Ly, tuple(edges), tuple(stars), tuple(faces), tuple(coords), ids)


def star_support(lat: Lattice, v: int) -> frozenset:
    """Edges incident to vertex ``v``."""
    if not 0 <= v < lat.n_vertices:
        raise InvalidLatticeError(f"vertex {v} out of range")
    return frozenset(lat.stars[v])


def plaquette_support(lat: Lattice, p: int) -> frozenset:
    """Edges bounding face ``p``."""
    if not 0 <= p < lat.n_faces:
        raise InvalidLatticeError(f"face {p} out of range")
    return frozenset(lat.faces[p])


# ---------------------------------------------------------------- regions


@dataclass(frozen=True)
class Region:
    edges: frozenset
    label: str = ""

    def __init__(self, edges: Iterable[int], label: str = ""):
        object.__setattr__(self, "edges", frozenset(int(e) for e in edges))
        object.__setattr__(self, "label", label)

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(sorted(self.edges))

    def __contains__(self, e):
        return e in self.edges

    def sorted(self) -> List[int]:
        return sorted(self.edges)

    def union(self, other: "Region", label: str = "") -> "Region":
        return Region(self.edges | other.edges, label or f"{self.label}{other.label}")


def complement(lat: Lattice, *regions: Region, label: str = "") -> Region:
    used = frozenset().union(*(r.edges for r in regions))
    return Region((e for e in range(lat.n) if e not in used), label)


def check_partition(lat: Lattice, partition: Sequence[Region], allow_empty: bool = True) -> None:
    """Raise ``InvalidPartitionError`` unless the regions tile the edge set."""
    labels = [r.label for r in partition]
    if len(set(labels)) != len(labels):
        raise InvalidPartitionError(f"duplicate region labels: {labels}")
    seen: Dict[int, str] = {}
    for r in partition:
        if not r.edges and not allow_empty:
            raise InvalidPartitionError(f"region {r.label!r} is empty")
        for e in r.edges:
            if not 0 <= e < lat.n:
                raise InvalidPartitionError(f"edge {e} of region {r.label!r} out of range")
            if e in seen:
                raise InvalidPartitionError(f"edge {e} in both {seen[e]!r} and {r.label!r}")
            seen[e] = r.label
    if len(seen) != lat.n:
        missing = sorted(set(range(lat.n)) - set(seen))
        raise InvalidPartitionError(f"partition misses edges {missing[:10]}")


def _owner(lat, partition):
    owner = [None] * lat.n
    for k, r in enumerate(partition):
        for e in r.edges:
            owner[e] = k
    return owner


# ---------------------------------------------------------------- boundaries


@dataclass(frozen=True)
class BoundaryComponent:
    faces: Tuple[int, ...]

    @property
    def plaquette_count(self) -> int:
        return len(self.faces)


@dataclass(frozen=True)
class Violation:
    kind: str  # "star" or "plaquette"
    index: int
    labels: Tuple[str, ...]


@dataclass(frozen=True)
class BoundaryReport:
    """Boundary plaquettes between every pair of regions, split into connected components."""

    pairs: Mapping[Tuple[str, str], Tuple[BoundaryComponent, ...]]
    star_violations: Tuple[Violation, ...]
    plaquette_violations: Tuple[Violation, ...]

    def _key(self, a, b):
        if a is None and b is None:
            if len(self.pairs) != 1:
                raise KeyError("several region pairs; name the two labels")
            return next(iter(self.pairs))
        return tuple(sorted((a, b)))

    def components(self, a: str = None, b: str = None) -> Tuple[BoundaryComponent, ...]:
        return self.pairs.get(self._key(a, b), ())

    def counts(self, a: str = None, b: str = None) -> List[int]:
        """Plaquette counts n^(m) of each boundary component, largest first."""
        return [c.plaquette_count for c in self.components(a, b)]

    def total_boundary_plaquettes(self, a: str = None, b: str = None) -> int:
        return sum(self.counts(a, b))

    @property
    def violations(self) -> Tuple[Violation, ...]:
        return self.star_violations + self.plaquette_violations


def _face_corners(lat: Lattice, p: int) -> List[Tuple[int, int, int]]:
    """``(vertex, edge, edge)`` for the four corners of face ``p``."""
    bottom, top, left, right = lat.faces[p]
    x, y = lat.face_coords[p]
    return [
        (lat.vertex(x + 1, y), bottom, right),
        (lat.vertex(x + 1, y + 1), right, top),
        (lat.vertex(x, y + 1), top, left),
        (lat.vertex(x, y), left, bottom),
    ]


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        self.parent[self.find(i)] = self.find(j)

    def groups(self):
        out: Dict[int, List[int]] = {}
        for i in self.parent:
            out.setdefault(self.find(i), []).append(i)
        return list(out.values())


def _face_components(lat, faces, owner, pair, adjacency):
    uf = _UnionFind(sorted(faces))
    if adjacency == "edge":
        edge_faces = lat.edge_faces
        for f in faces:
            for e in lat.faces[f]:
                for g in edge_faces[e]:
                    if g in faces:
                        uf.union(f, g)
    else:
        # a boundary curve enters and leaves a plaquette through the corners
        # where the region label changes; plaquettes meeting at such a vertex
        # lie on the same curve
        at_vertex: Dict[int, List[int]] = {}
        for f in faces:
            for vtx, e1, e2 in _face_corners(lat, f):
                if {owner[e1], owner[e2]} == pair:
                    at_vertex.setdefault(vtx, []).append(f)
        for fs in at_vertex.values():
            for g in fs[1:]:
                uf.union(fs[0], g)
    comps = [BoundaryComponent(tuple(sorted(g))) for g in uf.groups()]
    comps.sort(key=lambda c: (-c.plaquette_count, c.faces))
    return tuple(comps)


def boundary_report(lat: Lattice, partition: Sequence[Region], adjacency: str = "curve") -> BoundaryReport:
    """Boundary plaquettes (faces meeting two regions by edges) for each region pair.

    Boundary plaquettes are grouped by the boundary curve crossing them: the
    curve passes between neighbouring plaquettes at vertices where the region
    label changes around the face. ``adjacency="edge"`` instead joins any two
    boundary plaquettes that share an edge, which merges the two sides of a
    one-plaquette-thick region. Operators whose support meets three or more
    regions are listed as violations.
    """
    if adjacency not in ("curve", "edge"):
        raise ValueError("adjacency must be 'curve' or 'edge'")
    check_partition(lat, partition)
    owner = _owner(lat, partition)
    labels = [r.label for r in partition]
    touching: Dict[Tuple[int, int], set] = {}
    for i in range(len(partition)):
        for j in range(i + 1, len(partition)):
            touching[(i, j)] = set()
    pviol = []
    for p, sup in enumerate(lat.faces):
        regs = sorted({owner[e] for e in sup})
        if len(regs) >= 3:
            pviol.append(Violation("plaquette", p, tuple(labels[k] for k in regs)))
        for a in range(len(regs)):
            for b in range(a + 1, len(regs)):
                touching[(regs[a], regs[b])].add(p)
    sviol = []
    for s, sup in enumerate(lat.stars):
        regs = sorted({owner[e] for e in sup})
        if len(regs) >= 3:
            sviol.append(Violation("star", s, tuple(labels[k] for k in regs)))
    pairs = {}
    for (i, j), fs in touching.items():
        key = tuple(sorted((labels[i], labels[j])))
        pairs[key] = _face_components(lat, fs, owner, {i, j}, adjacency)
    return BoundaryReport(pairs, tuple(sviol), tuple(pviol))


def validate_two_region_rule(lat: Lattice, partition: Sequence[Region]) -> List[Violation]:
    """Stars and plaquettes acting on three or more regions; empty means the rule holds."""
    return list(boundary_report(lat, partition).violations)


# ---------------------------------------------------------------- homology


@dataclass(frozen=True)
class ContractibilityReport:
    contractible: bool
    direct_windings: frozenset
    dual_windings: frozenset

    @property
    def windings(self) -> frozenset:
        return self.direct_windings | self.dual_windings

    def __bool__(self):
        return self.contractible


_WINDING_NAMES = {(1, 0): HORIZONTAL, (0, 1): VERTICAL, (1, 1): "diagonal"}


def _winding_span(cycles: Iterable[Tuple[int, int]]) -> frozenset:
    vecs = echelon([h | (v << 1) for h, v in cycles])
    span = {0}
    for b in vecs:
        span |= {s ^ b for s in span}
    return frozenset(_WINDING_NAMES[(s & 1, s >> 1)] for s in span if s)


def is_contractible(lat: Lattice, region: Union[Region, Iterable[int]]) -> ContractibilityReport:
    """Whether a region supports no homologically nontrivial loop.

    Both direct-lattice cycles (supports of sigma^z loop operators) and dual
    cycles (edge sets crossed by a dual loop, supports of sigma^x loop
    operators) are tested. Windings are reported per lattice.
    """
    edges = sorted(region.edges if isinstance(region, Region) else set(region))
    if lat.topology is not Topology.TORUS or not edges:
        return ContractibilityReport(True, frozenset(), frozenset())

    # direct: edge = pair of endpoint vertices
    rows = [(1 << lat.edges[e].u) ^ (1 << lat.edges[e].v) for e in edges]
    direct = []
    for combo in left_nullspace(rows):
        cyc = [edges[i] for i in range(len(edges)) if combo >> i & 1]
        hpar = sum(1 for e in cyc if lat.edges[e].orientation == HORIZONTAL and lat.edges[e].x == lat.Lx - 1) & 1
        vpar = sum(1 for e in cyc if lat.edges[e].orientation == VERTICAL and lat.edges[e].y == lat.Ly - 1) & 1
        direct.append((hpar, vpar))

    # dual: edge = pair of adjacent faces
    ef = lat.edge_faces
    rows = [to_mask(ef[e]) if len(set(ef[e])) == 2 else 0 for e in edges]
    dual = []
    for combo in left_nullspace(rows):
        cyc = [edges[i] for i in range(len(edges)) if combo >> i & 1]
        hpar = sum(1 for e in cyc if lat.edges[e].orientation == VERTICAL and lat.edges[e].x == 0) & 1
        vpar = sum(1 for e in cyc if lat.edges[e].orientation == HORIZONTAL and lat.edges[e].y == 0) & 1
        dual.append((hpar, vpar))

    dw, uw = _winding_span(direct), _winding_span(dual)
    return ContractibilityReport(not dw and not uw, dw, uw)


def connected_parts(lat: Lattice, region: Region) -> List[Region]:
    """Split a region into pieces connected through shared faces or vertices."""
    edges = set(region.edges)
    ef, es = lat.edge_faces, lat.edge_stars
    seen = set()
    parts = []
    for e0 in sorted(edges):
        if e0 in seen:
            continue
        seen.add(e0)
        stack, comp = [e0], []
        while stack:
            e = stack.pop()
            comp.append(e)
            for op in [lat.faces[f] for f in ef[e]] + [lat.stars[s] for s in es[e]]:
                for g in op:
                    if g in edges and g not in seen:
                        seen.add(g)
                        stack.append(g)
        parts.append(Region(comp, f"{region.label}{len(parts) + 1}"))
    return parts


# ---------------------------------------------------------------- JSON


def lattice_from_spec(spec: Mapping) -> Lattice:
    topo = spec.get("topology", "torus")
    Lx, Ly = int(spec["Lx"]), int(spec["Ly"])
    if topo == "torus":
        return build_torus(Lx, Ly)
    if topo == "planar":
        return build_planar(Lx, Ly)
    raise InvalidLatticeError(f"unknown topology {topo!r}")


def load_partition(source: Union[str, Path, Mapping]) -> Tuple[Lattice, List[Region]]:
    """Read ``{"topology", "Lx", "Ly", "regions": {label: [edge ids]}}``.

    ``source`` is a mapping, a JSON string, or a path to a JSON file.
    """
    if isinstance(source, Mapping):
        doc = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            doc = json.loads(text)
        else:
            doc = json.loads(Path(source).read_text())
    lat = lattice_from_spec(doc)
    regions = [Region(v, k) for k, v in doc.get("regions", {}).items()]
    if regions:
        check_partition(lat, regions)
    return lat, regions


def dump_partition(lat: Lattice, regions: Sequence[Region]) -> Dict:
    return {
        "topology": lat.topology.value,
        "Lx": lat.Lx,
        "Ly": lat.Ly,
        "regions": {r.label: r.sorted() for r in regions},
    }
