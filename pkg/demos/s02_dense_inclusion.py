"""
An inclusion that induces an equivalence of sheaves
===================================================

1x1 matrices sit inside the category of 1x1 and 2x2 matrices.  The
inclusion is dense, so the two presheaf categories agree.
"""

from linsite import fixtures as fx
from linsite.presheaf import hom_presheaves
from linsite.sitemorph import SiteMorphism, certify_equivalence, probe_sheaves, verify_upper_matches_pushforward

a, b, inc = fx.fix_dg()
w = SiteMorphism(inc, a, b, name="FIX-DG.f")

# Each condition is decided separately; the verdict carries a witness when it fails.
for key, verdict in w.report.fields().items():
    print(f"{key:>15}: {verdict}")

# Kan extension along w sends the representable on u to the representable on u.
g = probe_sheaves(a, n=3, seed=0)[0]
print("w^s h_u has dims", w.upper(g).dims)

# Unit and counit are invertible and satisfy the triangle identities on probes.
cert = certify_equivalence(w, n=20, seed=0)
print(f"certified: {cert.ok} ({cert.units} units, {cert.counits} counits)")

# The left adjoint w^s agrees with the cocontinuous pushforward.
print("w^s = w_*:", verify_upper_matches_pushforward(w, n=20, seed=0).ok)

# The representable on v and its restriction and its restriction have the same endomorphisms.
f = probe_sheaves(b, n=3, seed=0)[1]
print("dim End(F) =", hom_presheaves(f, f).dim, "dim End(w^* F) =", hom_presheaves(w.restrict(f), w.restrict(f)).dim)
