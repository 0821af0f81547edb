"""
Roof decompositions
===================

A colimit-preserving functor between sheaf categories is presented by its
values on representables.  The roof factors it through an apex site built
from those values.
"""

from linsite import fixtures as fx
from linsite.presheaf import identity_morphism, zero_morphism
from linsite.rooffrac import ColimFunctorSpec, identity_spec, roof_decompose, upper_spec
from linsite.sitemorph import SiteMorphism

# The functor G -> G e1 on FIX-E, given by M_e1 with e1 -> 1 and e2 -> 0.
site = fx.fix_e()
m = fx.module_e(1)
spec = ColimFunctorSpec(site, site, {"*": m}, {("*", "*"): [identity_morphism(m), zero_morphism(m, m)]},
                        name="e1-part")

roof = roof_decompose(spec, n=20, seed=0)
print("apex objects:", roof.apex.cat.objects)
for k, v in roof.checks.items():
    print(f"  {k}: {v}")

# The same on FIX-DG, where the functor is Kan extension along the inclusion.
a, b, inc = fx.fix_dg()
roof = roof_decompose(upper_spec(SiteMorphism(inc, a, b)), n=20, seed=0)
print("FIX-DG apex:", roof.apex.cat.objects, "ok:", roof.ok)

# Identity specs round-trip through the apex as well, here over F_3.
roof = roof_decompose(identity_spec(fx.fix_e(3)), n=10, seed=1)
print("F_3:", roof.checks)
