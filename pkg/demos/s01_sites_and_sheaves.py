"""
Sites and sheaves over F_2
==========================

The algebra F_2 x F_2 viewed as a one-object category, with the sieve
generated by the idempotent e1 declared covering.
"""

import numpy as np

from linsite import fixtures as fx
from linsite.presheaf import all_sieves, representable
from linsite.sheafify import is_sheaf, sheafify
from linsite.topology import check_topology, saturate, CoverSystem

site = fx.fix_e()
cat = site.cat
print(cat, "hom(*, *) has dimension", cat.d("*", "*"))

# Every sieve on * is an ideal of F_2 x F_2: zero, (e1), (e2) and everything.
for s in all_sieves(cat, "*"):
    print("sieve", s.slices["*"].tolist(), "covers" if site.is_cover(s) else "")

# The cover system {max, (e1)} satisfies the three axioms ...
print("topology ok:", check_topology(site.topology).ok)

# ... but adding (e2) forces the zero sieve to cover, by glueing.
bad = fx.fix_e_both_idempotents()
print(check_topology(bad))
print("its saturation covers", len(saturate(bad).covering("*")), "sieves")

# h_* is two-dimensional; only its e1-part survives sheafification.
h = representable(cat, "*")
print("h_* is a sheaf?", is_sheaf(h, site)[0])
res = sheafify(h, site)
print("#h_* has dims", res.sheaf.dims)
print("unit h_* -> #h_*:", res.unit.comps["*"].tolist())

# The module where e2 acts as 1 is killed entirely.
print("#M_e2 has dims", sheafify(fx.module_e(2), site).sheaf.dims)
