"""
The long-range term of non-contractible bipartitions
====================================================

Two vertical annuli share two boundaries. A flux superposition adds
2 log2 sum|c_i| on top of the boundary terms, and tracing a winding annulus
removes it again.
"""

import numpy as np

from toric_negativity.closedform import classify, predict_log_negativity
from toric_negativity.entanglement import log_negativity, pt_spectrum, reduce, state_pt_spectrum
from toric_negativity.groundstate import FLUX_LABELS, FluxCoefficients, flux_basis, generic_state
from toric_negativity.lattice import build_torus

lat = build_torus(4, 2)
basis = flux_basis(lat)


def column(*xs):
    return sorted(e for x in xs for y in range(lat.Ly) for e in (lat.h(x, y), lat.v(x, y)))


A, B = column(0, 1), column(2, 3)
setting = classify(lat, A, B)
print(setting.cls.value, "boundaries", setting.counts)
cs = [FluxCoefficients.basis(k) for k in FLUX_LABELS] + [FluxCoefficients.uniform(),
                                                         FluxCoefficients.random(np.random.default_rng(2))]
for c in cs:
    psi = generic_state(lat, c, basis=basis)
    oracle = log_negativity(state_pt_spectrum(psi, A, B))
    print(np.round(c.array, 3), f"predicted={predict_log_negativity(setting, c=c):.10f} oracle={oracle:.10f}")

# trace column 3: one boundary survives and the long-range term is gone
A1, A2, B1, B2 = (column(x) for x in range(4))
one = classify(lat, A1 + A2, B1, [B2])
psi = generic_state(lat, FluxCoefficients.uniform(), basis=basis)
print(one.cls.value, "E_N(A|B1) =", log_negativity(state_pt_spectrum(psi, A1 + A2, B1)))

# trace columns 1 and 3: A1 and B1 are classically correlated but PPT
lam = pt_spectrum(reduce(psi, A1 + B1), A1)
print("E_N(A1|B1) =", log_negativity(lam), " min eigenvalue", lam.min())
