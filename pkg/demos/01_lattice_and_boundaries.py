"""
Lattices, regions and boundary plaquettes
=========================================

Build a torus, pick a region, and count the plaquettes that straddle its
boundary. These counts drive every closed-form prediction.
"""

from toric_negativity.lattice import (
    Region,
    boundary_report,
    build_torus,
    complement,
    is_contractible,
    validate_two_region_rule,
)

lat = build_torus(4, 3)
print(lat, "vertices:", lat.n_vertices, "faces:", lat.n_faces)

# edge id = 2*(y*Lx + x) + (0 for horizontal, 1 for vertical)
print("h(1,1) =", lat.h(1, 1), " v(1,1) =", lat.v(1, 1))

# two neighbouring plaquettes form a contractible 7-edge region
A = Region(set(lat.faces[lat.face_id(0, 1)]) | set(lat.faces[lat.face_id(1, 1)]), "A")
B = complement(lat, A, label="B")
rep = boundary_report(lat, [A, B])
print("2x1 patch:", len(A), "edges, boundary components", rep.counts("A", "B"))
print("contractible:", is_contractible(lat, A).contractible)

# a column of edges winds vertically and has two boundary curves
col = Region({e for y in range(lat.Ly) for e in (lat.h(0, y), lat.v(0, y))}, "A")
rep = boundary_report(lat, [col, complement(lat, col, label="B")])
print("column annulus: boundary components", rep.counts("A", "B"))
print("windings:", sorted(is_contractible(lat, col).windings))

# three regions meeting at one star break the two-region rule
s = lat.vertex(1, 1)
e1, e2 = sorted(lat.stars[s])[:2]
parts = [Region([e1], "A"), Region([e2], "B"), complement(lat, Region([e1, e2]), label="C")]
print("violations:", validate_two_region_rule(lat, parts))
