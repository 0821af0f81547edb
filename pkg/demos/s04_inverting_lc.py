"""
Inverting LC morphisms
======================

Two-cells that differ only by a locally zero part become equal after
composing with an LC morphism, and squares of morphisms can be completed
up to an invertible two-cell.
"""

import numpy as np

from linsite import fixtures as fx
from linsite.lincat import NatTransform
from linsite.rooffrac import b4_separate, lf3_complete_square, lf4_construct
from linsite.sitemorph import SiteMorphism, identity_site_morphism

# On FIX-E the transformations 1 and e1 of the identity differ by e2, which is locally zero.
ie = identity_site_morphism(fx.fix_e())
one = NatTransform(ie.functor, ie.functor, {"*": np.array([1, 1])}, name="1")
e1 = NatTransform(ie.functor, ie.functor, {"*": fx.E1}, name="e1")
res = b4_separate(ie, ie, one, e1, n=20, seed=0)
w = res.data["w"]
print("distinct:", res.data["distinct"], "equal after w:", res.ok)
print("w(1) =", w.functor.on_hom(one["*"], "*", "*"), "w(e1) =", w.functor.on_hom(e1["*"], "*", "*"))

# The identity of FIX-DG twisted by an invertible 2x2 matrix at v.
a, b, _ = fx.fix_dg()
v, theta = fx.twisted_identity()
twisted = SiteMorphism(v, b, b, name="id~")
ib = identity_site_morphism(b)
lf4 = lf4_construct(twisted, ib, ib, theta)
print("beta at v:", lf4.beta["v"], "ok:", lf4.ok)

# Completing the span FIX-E/e2 <- FIX-E -> FIX-E.
swap = SiteMorphism(fx.swap_functor(), fx.fix_e(), fx.fix_e_swapped_target(), name="swap")
sq = lf3_complete_square(swap, ie)
print("square apex:", sq.site.cat.objects, "alpha invertible:", sq.alpha.is_invertible(), "v LC:", sq.v.report.LC)
