"""
Entropy and negativity for general anyon models
===============================================

The toric code is the abelian model with four unit quantum dimensions.
Identifying the boundary sizes with plaquette counts reproduces the lattice
values. A non-abelian model gets entropies, but not the generic-state
negativity.
"""

import numpy as np

from toric_negativity.closedform import AnyonModel, anyon_entropy
from toric_negativity.errors import UnsupportedSettingError

toric = AnyonModel.toric_code()
res = anyon_entropy(toric, [0.25] * 4, [2, 2])
print("toric code, uniform flux, boundaries (2, 2):")
print("  entropy", res.entropy, " fixed-flux E_N", res.fixed_flux_negativity, " generic E_N", res.renyi_half_negativity)

fib = AnyonModel.fibonacci()
for t in np.linspace(0, 1, 5):
    r = anyon_entropy(fib, [1 - t, t], [4])
    print(f"fibonacci |c_tau|^2={t:.2f}: gamma_bar={r.gamma_bar:.4f} entropy={r.entropy:.4f}")
try:
    anyon_entropy(fib, [0.5, 0.5], [4], renyi_half=True)
except UnsupportedSettingError as err:
    print("refused:", err)
