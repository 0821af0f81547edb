"""Invariant suite over freshly built fixtures, with optional single-axiom corruption.

``run(corrupt=KIND)`` breaks exactly one fixture axiom before checking; the
check that owns that axiom then fails with a witness.
"""

from __future__ import annotations

import numpy as np

from . import fixtures as fx
from .lincat import (LinearCategory, LinearFunctor, NatTransform, conjugated_functor, full_subcategory,
                     identity_functor, matrix_category, naturality_failures, validate_category, validate_functor)
from .presheaf import identity_morphism, maximal_sieve, representable, zero_morphism, zero_sieve
from .topology import CoverSystem, Site, check_topology

CORRUPTIONS = {
    "identity": "FIX-P identity set to 0",
    "associativity": "FIX-DG.B product E12*E21 set to 0",
    "topology": "FIX-E covered additionally by (e2)",
    "topology-identity": "FIX-E without its maximal sieve",
    "functor": "FIX-DG inclusion sends id_u to 0",
    "naturality": "FIX-DG twist component at v replaced by a non-natural map",
    "sheaf": "M_e2 claimed as the sheaf value of a spec on FIX-E",
}


def _categories(corrupt):
    p = fx.point_category("FIX-P")
    e = fx.idempotent_category("FIX-E")
    if corrupt == "identity":
        p = LinearCategory(p.objects, p.dims, p.comp, {"*": np.array([0])}, p.p, name="FIX-P")
    return p, e


def _dg(corrupt):
    big = matrix_category({"u": 1, "v": 2}, fx.P, name="FIX-DG.B")
    if corrupt == "associativity":
        comp = {k: v.copy() for k, v in big.comp.items()}
        comp[("v", "v", "v")][1, 2] = 0
        big = LinearCategory(big.objects, big.dims, comp, big.ident, big.p, name="FIX-DG.B")
    return big


def run(corrupt=None, n=4, seed=0):
    """Yield ``(check, ok, detail)`` triples."""
    from .rooffrac import ColimFunctorSpec, b4_separate, lf4_construct, roof_decompose, identity_spec
    from .sheafify import is_sheaf, sheafify
    from .sitemorph import SiteMorphism, certify_equivalence, identity_site_morphism

    if corrupt is not None and corrupt not in CORRUPTIONS:
        raise ValueError(f"unknown corruption {corrupt!r}; choose from {', '.join(CORRUPTIONS)}")
    pcat, ecat = _categories(corrupt)
    big = _dg(corrupt)
    small, inc = full_subcategory(big, ["u"], name="FIX-DG.A")
    valid = set()
    for c in (pcat, ecat, big, small):
        rep = validate_category(c)
        if rep.ok:
            valid.add(c.name)
        yield f"category.{c.name}", rep.ok, "; ".join(rep.violations[:2])
    if corrupt == "functor":
        inc = LinearFunctor(small, big, inc.fobj, {("u", "u"): np.array([[0]])}, name=inc.name)
    rep = validate_functor(inc)
    yield "functor.FIX-DG.f", rep.ok, "; ".join(rep.violations[:2])

    covers = [maximal_sieve(ecat, "*"), fx.e1_sieve(ecat)]
    if corrupt == "topology":
        covers.append(fx.e2_sieve(ecat))
    if corrupt == "topology-identity":
        covers = covers[1:]
    te = CoverSystem(ecat, {"*": covers})
    systems = {"FIX-P": CoverSystem(pcat, {"*": [maximal_sieve(pcat, "*")]}),
               "FIX-P0": CoverSystem(pcat, {"*": [maximal_sieve(pcat, "*"), zero_sieve(pcat, "*")]}),
               "FIX-E": te,
               "FIX-DG.B": CoverSystem(big, {x: [maximal_sieve(big, x)] for x in big.objects})}
    sites = {}
    for name, cs in systems.items():
        rep = check_topology(cs)
        yield f"topology.{name}", rep.ok, "; ".join(rep.violations[:1])
        if rep.ok and cs.cat.name in valid:
            sites[name] = Site(cs.cat, cs, name=name, check=False)
    both = CoverSystem(ecat, {"*": [maximal_sieve(ecat, "*"), fx.e1_sieve(ecat), fx.e2_sieve(ecat)]})
    rep = check_topology(both)
    yield "topology.FIX-E-both-rejected", any(v.startswith("glueing") for v in rep.violations), "no glueing witness"

    if "FIX-E" in sites:
        e = sites["FIX-E"]
        sh = sheafify(representable(ecat, "*"), e).sheaf
        yield "sheafify.FIX-E.h", sh.dims["*"] == 1 and is_sheaf(sh, e)[0], f"dims {sh.dims}"
        m = fx.module_e(2 if corrupt == "sheaf" else 1)
        m = type(m)(ecat, m.dims, m.act, name=m.name)
        ok, wit = is_sheaf(m, e)
        yield "sheaf.FIX-E.M_e1", ok, f"fails the sheaf condition at {wit[0] if wit else ''}"
        if ok:
            spec = ColimFunctorSpec(e, e, {"*": m}, {("*", "*"): [identity_morphism(m), zero_morphism(m, m)]},
                                    name="e1-part")
            roof = roof_decompose(spec, n=n, seed=seed)
            yield "roof.e1-part", roof.ok, "; ".join(roof.failures[:1])
            roof = roof_decompose(identity_spec(e), n=n, seed=seed)
            yield "roof.id.FIX-E", roof.ok, "; ".join(roof.failures[:1])
            ie = identity_site_morphism(e)
            alpha = NatTransform(ie.functor, ie.functor, {"*": fx.E1}, name="e1")
            r = lf4_construct(ie, ie, ie, alpha)
            yield "lf4.FIX-E.e1", r.ok, "; ".join(r.failures[:1])
    if "FIX-P0" in sites:
        p0 = sites["FIX-P0"]
        sh = sheafify(representable(pcat, "*"), p0).sheaf
        yield "sheafify.FIX-P0.h", sh.dims["*"] == 0, f"dims {sh.dims}"
        ip = identity_site_morphism(p0)
        g0 = NatTransform(ip.functor, ip.functor, {"*": np.array([0])})
        g1 = NatTransform(ip.functor, ip.functor, {"*": np.array([1])})
        r = b4_separate(ip, ip, g0, g1, n=n, seed=seed)
        yield "b4.FIX-P0", r.ok, "; ".join(r.failures[:1])
    if "FIX-DG.B" in sites and "FIX-DG.A" in valid and validate_functor(inc).ok:
        a = Site(small, name="FIX-DG.A")
        w = SiteMorphism(inc, a, sites["FIX-DG.B"], name="FIX-DG.f")
        yield "lc.FIX-DG.f", w.report.LC, str(w.report.fields())
        if w.report.LC:
            cert = certify_equivalence(w, n=n, seed=seed)
            yield "certify.FIX-DG.f", cert.ok, "; ".join(cert.failures[:1])
        ident = identity_functor(big)
        theta = {"u": np.array([1]), "v": fx.twist_matrix()}
        twisted, _ = conjugated_functor(ident, theta)
        if corrupt == "naturality":
            theta["v"] = np.array([1, 0, 0, 0])
        bad = naturality_failures(NatTransform(twisted, ident, theta, check=False))
        yield "naturality.FIX-DG.twist", not bad, "; ".join(bad[:1])
