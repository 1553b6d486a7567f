"""
Singular roots of the characteristic cubic
==========================================

Near the pole e0 the cubic has a pair of roots that split linearly in h.
This script compares the exact pair with the second-order series.
"""

import numpy as np

from dirac_rotframe import NormalizedConfig, singular_roots, singular_series
from dirac_rotframe.spectrum import series_vs_root_error

# the canonical family: resonance e0 = 1, weak wave
cfg = NormalizedConfig(e0=1.0, h=0.01)
roots = singular_roots("ground", cfg)
print("all three roots:", np.round(roots.roots.real, 12))
print("singular pair  :", roots.singular_pair, " far root:", roots.far_root)

# series coefficients; the plus branch moves away from zero
s = singular_series("ground", cfg)
print(f"c0 = {s.c0}, c1 = {s.c1:.12f}, c2 = {s.c2}")

# the error of the series falls off like h^3
print("\n     h        error      error/h^3")
for h in (1e-2, 3e-3, 1e-3, 3e-4):
    err = series_vs_root_error("ground", cfg.replace(h=h))
    print(f"{h:8.0e}  {err:10.3e}  {err / h ** 3:9.4f}")

# the second excited state carries an extra constant 2 omega_n e0
for kind in ("excited1", "excited2"):
    r = singular_roots(kind, cfg).branch_root(cfg.branch).real
    print(f"{kind}: plus-branch root {r:.15f}")
