import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import column
from toric_negativity.errors import InvalidLatticeError, InvalidPartitionError
from toric_negativity.gf2 import to_mask
from toric_negativity.lattice import (
    Region,
    Topology,
    boundary_report,
    build_planar,
    build_torus,
    check_partition,
    complement,
    connected_parts,
    dump_partition,
    is_contractible,
    load_partition,
    plaquette_support,
    star_support,
    validate_two_region_rule,
)


def ten_edge_patch(lat):
    """A simply connected 10-edge region with 8 boundary plaquettes (fits torus(4,3))."""
    return sorted([lat.h(0, 0), lat.v(2, 0), lat.h(1, 1), lat.v(1, 1), lat.h(2, 1), lat.v(2, 1),
                   lat.h(0, 2), lat.h(1, 2), lat.v(1, 2), lat.h(2, 2)])


def bipartition(lat, A):
    A = Region(A, "A")
    return [A, complement(lat, A, label="B")]


@pytest.mark.parametrize("L", [(2, 2), (3, 3), (4, 2), (4, 3), (2, 5)])
def test_torus_counts(L):
    lat = build_torus(*L)
    Lx, Ly = L
    assert lat.topology is Topology.TORUS
    assert (lat.n, lat.n_vertices, lat.n_faces) == (2 * Lx * Ly, Lx * Ly, Lx * Ly)
    assert all(len(f) == 2 for f in lat.edge_faces)
    assert all(len(star_support(lat, s)) == 4 for s in range(lat.n_vertices))
    assert lat.genus == 1 and lat.kappa == 2


def test_plaquettes_sum_to_zero():
    lat = build_torus(4, 2)
    acc = 0
    for p in range(lat.n_faces):
        acc ^= to_mask(plaquette_support(lat, p))
    assert lat.n == 16 and acc == 0


def test_edge_indexing():
    lat = build_torus(3, 2)
    assert lat.h(1, 1) == 2 * (1 * 3 + 1)
    assert lat.v(1, 1) == 2 * (1 * 3 + 1) + 1
    assert lat.h(3, 0) == lat.h(0, 0)  # wraps


def test_star_and_plaquette_examples():
    t22 = build_torus(2, 2)
    assert len(set(star_support(t22, 0))) == 4
    assert len(set(plaquette_support(t22, 0))) == 4
    planar = build_planar(3, 3)
    assert len(star_support(planar, planar.vertex(0, 0))) == 2
    assert len(star_support(planar, planar.vertex(1, 1))) == 4
    assert len(plaquette_support(planar, planar.face_id(0, 0))) == 4
    assert max(len(f) for f in planar.edge_faces) == 2
    assert min(len(f) for f in planar.edge_faces) == 1
    assert planar.kappa == 0


@pytest.mark.parametrize("L", [(1, 3), (3, 1), (0, 2)])
def test_degenerate_lattice_rejected(L):
    with pytest.raises(InvalidLatticeError):
        build_torus(*L)
    with pytest.raises(InvalidLatticeError):
        build_planar(*L)


@pytest.mark.parametrize("L", [(2, 2), (3, 3), (4, 3)])
def test_star_plaquette_overlap_even(L):
    lat = build_torus(*L)
    for s in range(lat.n_vertices):
        for p in range(lat.n_faces):
            assert len(star_support(lat, s) & plaquette_support(lat, p)) % 2 == 0


def test_partition_errors():
    lat = build_torus(3, 3)
    with pytest.raises(InvalidPartitionError):
        check_partition(lat, [Region([0, 1], "A"), Region(range(1, 18), "B")])
    with pytest.raises(InvalidPartitionError):
        check_partition(lat, [Region([0], "A"), Region(range(2, 18), "B")])
    with pytest.raises(InvalidPartitionError):
        boundary_report(lat, [Region([0], "A"), Region(range(2, 18), "B")])


def test_single_edge_boundary(t33):
    rep = boundary_report(t33, bipartition(t33, [t33.h(1, 1)]))
    assert rep.counts("A", "B") == [2]
    assert rep.total_boundary_plaquettes("A", "B") == 2


def test_ten_edge_patch(t43):
    A = ten_edge_patch(t43)
    rep = boundary_report(t43, bipartition(t43, A))
    assert len(A) == 10
    assert rep.counts("A", "B") == [8]
    assert is_contractible(t43, A).contractible


def test_annuli_have_two_components(t43):
    A = column(t43, 0, 1)
    rep = boundary_report(t43, bipartition(t43, A))
    assert rep.counts("A", "B") == [3, 3]
    assert rep.total_boundary_plaquettes("A", "B") == sum(rep.counts("A", "B"))


def test_curve_rule_separates_thin_annulus(t42):
    parts = bipartition(t42, column(t42, 0))
    assert boundary_report(t42, parts).counts("A", "B") == [2, 2]
    assert boundary_report(t42, parts, adjacency="edge").counts("A", "B") == [4]


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(0, 17), min_size=1, max_size=17))
def test_boundary_symmetric(edges):
    lat = build_torus(3, 3)
    A, B = bipartition(lat, edges)
    if not B.edges:
        return
    fwd = boundary_report(lat, [A, B])
    rev = boundary_report(lat, [Region(B.edges, "A"), Region(A.edges, "B")])
    assert fwd.counts("A", "B") == fwd.counts("B", "A") == rev.counts("A", "B")


@pytest.mark.parametrize("name", ["edge", "L", "star", "plaquette"])
def test_simply_connected_region_one_component(t43, name):
    v = t43.vertex(1, 1)
    A = {"edge": [t43.h(1, 1)], "L": [t43.h(1, 1), t43.v(1, 1)],
         "star": star_support(t43, v), "plaquette": plaquette_support(t43, t43.face_id(1, 1))}[name]
    assert is_contractible(t43, A).contractible
    assert len(boundary_report(t43, bipartition(t43, A)).counts("A", "B")) == 1


def test_contractibility_windings(t43):
    ring = [t43.v(0, y) for y in range(t43.Ly)]
    rep = is_contractible(t43, ring)
    assert not rep.contractible and rep.direct_windings == {"vertical"}
    full = is_contractible(t43, range(t43.n))
    assert {"horizontal", "vertical"} <= full.direct_windings
    # a strip of horizontal edges holds no direct cycle but supports a dual loop
    strip = [t43.h(0, y) for y in range(t43.Ly)]
    rep = is_contractible(t43, strip)
    assert rep.direct_windings == set() and rep.dual_windings == {"vertical"}
    assert not rep


def test_two_region_rule(t43):
    v = t43.vertex(1, 1)
    e1, e2, e3, e4 = sorted(star_support(t43, v))
    parts = [Region([e1], "A"), Region([e2], "B"), Region(set(range(t43.n)) - {e1, e2}, "C")]
    bad = validate_two_region_rule(t43, parts)
    assert any(x.kind == "star" and x.index == v for x in bad)
    assert validate_two_region_rule(t43, bipartition(t43, [e1, e3])) == []


def test_nested_partition_ok():
    lat = build_torus(5, 5)
    A = {lat.h(2, 2)}
    hood = set()
    for e in A:
        for s in lat.edge_stars[e]:
            hood |= set(lat.stars[s])
        for p in lat.edge_faces[e]:
            hood |= set(lat.faces[p])
    B = hood - A
    parts = [Region(A, "A"), Region(B, "B"), complement(lat, Region(A), Region(B), label="C")]
    assert validate_two_region_rule(lat, parts) == []


def test_connected_parts(t43):
    A = Region([t43.h(0, 0), t43.h(2, 2)], "A")
    assert len(connected_parts(t43, A)) == 2


def test_partition_json_round_trip(tmp_path, t43):
    parts = bipartition(t43, ten_edge_patch(t43))
    doc = dump_partition(t43, parts)
    lat, regions = load_partition(json.dumps(doc))
    assert (lat.Lx, lat.Ly) == (4, 3)
    assert {r.label: r.sorted() for r in regions} == doc["regions"]
    path = tmp_path / "p.json"
    path.write_text(json.dumps(doc))
    assert load_partition(path)[1][0].sorted() == parts[0].sorted()
    assert load_partition(doc)[0].n == 24
