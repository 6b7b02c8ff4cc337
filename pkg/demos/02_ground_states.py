"""
Toric-code ground states
========================

The four flux states are built by stabilizer projection on a sparse state
vector. Any ground state is a superposition with coefficients c.
"""

import numpy as np

from toric_negativity.groundstate import (
    FLUX_LABELS,
    FluxCoefficients,
    energy,
    expectation,
    flux_basis,
    flux_loops,
    generic_state,
    psi0,
    psi0_plus_form,
)
from toric_negativity.lattice import build_torus

lat = build_torus(3, 2)

# the projector form on |0...0> and the loop form on |+...+> agree
a, b = psi0(lat), psi0_plus_form(lat)
print("|<psi0|psi0'>| =", abs(a.inner(b)))
print("nonzero amplitudes:", a.nnz, "energy:", energy(a, lat))

basis = flux_basis(lat)
gram = np.array([[basis[i].inner(basis[j]) for j in FLUX_LABELS] for i in FLUX_LABELS])
print("flux basis Gram matrix:\n", np.round(gram.real, 12))

# loop expectation values identify the flux sector
W = flux_loops(lat)
for k in FLUX_LABELS:
    print(k, "<Wz1> =", round(expectation(basis[k], W["Wz1"]).real), "<Wx1> =", round(expectation(basis[k], W["Wx1"]).real))

c = FluxCoefficients.random(np.random.default_rng(0))
psi = generic_state(lat, c, basis=basis)
print("generic state norm:", psi.norm)
