"""Roof decompositions of colimit-preserving functors between sheaf categories,
constructive left-calculus-of-fractions steps, and the bilocalization checks.

Every construction returns a result object whose ``failures`` list collects
falsification findings; an empty list means every computed check held.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import exactalg as ea
from .lincat import LinearFunctor, NatTransform, Report, compose_functors
from .presheaf import (Coend, Presheaf, PresheafMorphism, compose, compose_all, identity_morphism,
                       representable, restrict_morphism, yoneda_map, zero_morphism)
from .sheafify import is_sheaf, sheafify, sheafify_morphism
from .sitemorph import (SiteMorphism, TwoCell, _Memo, associator, compose_site_morphisms, naturality_defects,
                        probe_morphisms, probe_sheaves, sheafified_representable, sheafified_yoneda)
from .topology import EpiTopology, Site, epi_cover_system


def _combination(coeffs, morphisms, source, target, p) -> PresheafMorphism:
    out = zero_morphism(source, target)
    comps = {x: out.comps[x].copy() for x in out.comps}
    for c, m in zip(coeffs, morphisms):
        if c % p:
            for x in comps:
                comps[x] = (comps[x] + int(c) * m.comps[x]) % p
    return PresheafMorphism(source, target, comps, name="comb", check=False)


class ColimFunctorSpec:
    """A colimit-preserving functor ``Sh(A) -> Sh(B)`` given by its values
    ``phi[A]`` on sheafified representables and ``phimap[(A, A')][j]`` on the
    images of basis morphisms."""

    def __init__(self, source: Site, target: Site, phi, phimap, name="F", check=True):
        self.source, self.target = source, target
        self.phi, self.phimap, self.name = dict(phi), dict(phimap), name
        self._coend, self._values = _Memo(), _Memo()
        if check:
            rep = self.validate()
            if not rep.ok:
                raise ValueError(str(rep))

    def __repr__(self):
        return f"ColimFunctorSpec({self.name!r}: {self.source.name} -> {self.target.name})"

    def on_hom(self, a, x, y) -> PresheafMorphism:
        return _combination(a, self.phimap[(x, y)], self.phi[x], self.phi[y], self.source.p)

    def validate(self) -> Report:
        rep = Report(f"spec {self.name}")
        cat = self.source.cat
        for a in cat.objects:
            if self.phi[a].cat is not self.target.cat:
                rep.violations.append(f"value at {a} lives on the wrong site")
                return rep
            ok, wit = is_sheaf(self.phi[a], self.target)
            if not ok:
                rep.violations.append(f"value at {a} is not a sheaf (fails at {wit[0]})")
            if self.on_hom(cat.ident[a], a, a) != identity_morphism(self.phi[a]):
                rep.violations.append(f"identity at {a} is not preserved")
        for x, y, z in itertools.product(cat.objects, repeat=3):
            for i, g in enumerate(cat.hom_basis(y, z)):
                for j, h in enumerate(cat.hom_basis(x, y)):
                    lhs = self.on_hom(cat.compose(g, h, x, y, z), x, z)
                    if lhs != compose(self.phimap[(y, z)][i], self.phimap[(x, y)][j]):
                        rep.violations.append(f"composition of basis pair ({i}, {j}) over {x}->{y}->{z}")
        return rep

    def coend(self, g: Presheaf) -> Coend:
        return self._coend.get(g, lambda: Coend(g, self.target.cat, self.phi, self.phimap, name=f"{self.name}({g.name})"))

    def apply_result(self, g: Presheaf):
        return sheafify(self.coend(g).presheaf, self.target)

    def apply(self, g: Presheaf) -> Presheaf:
        """``F(G) = # coend^A G(A) (x) phi(A)``."""
        return self.apply_result(g).sheaf

    def apply_map(self, rho: PresheafMorphism) -> PresheafMorphism:
        c1, c2 = self.coend(rho.source), self.coend(rho.target)
        return self.apply_result(rho.source).map_to(self.apply_result(rho.target), c1.map_left(c2, rho))


def identity_spec(site: Site) -> ColimFunctorSpec:
    cat = site.cat
    phi = {a: sheafified_representable(site, a) for a in cat.objects}
    phimap = {(x, y): [sheafified_yoneda(site, e, x, y) for e in cat.hom_basis(x, y)]
              for x in cat.objects for y in cat.objects}
    return ColimFunctorSpec(site, site, phi, phimap, name=f"id_{site.name}")


def upper_spec(m: SiteMorphism) -> ColimFunctorSpec:
    """The spec of ``m^s``: ``A -> m^s(#h_A)``."""
    cat = m.source.cat
    phi = {a: m.upper(sheafified_representable(m.source, a)) for a in cat.objects}
    phimap = {(x, y): [m.upper_map(sheafified_yoneda(m.source, e, x, y)) for e in cat.hom_basis(x, y)]
              for x in cat.objects for y in cat.objects}
    return ColimFunctorSpec(m.source, m.target, phi, phimap, name=f"{m.name}^s")


def then_upper(spec: ColimFunctorSpec, m: SiteMorphism) -> ColimFunctorSpec:
    """``m^s o F``."""
    if m.source is not spec.target:
        raise ValueError("morphism does not start at the spec's target")
    cat = spec.source.cat
    phi = {a: m.upper(spec.phi[a]) for a in cat.objects}
    phimap = {k: [m.upper_map(x) for x in v] for k, v in spec.phimap.items()}
    return ColimFunctorSpec(spec.source, m.target, phi, phimap, name=f"{m.name}^s.{spec.name}")


# --- subcategories spanned by sheaves ----------------------------------------------

def _apex(ambient: Site, named_sheaves, name) -> tuple[EpiTopology, Site]:
    names = [n for n, _ in named_sheaves]
    epi = epi_cover_system(ambient, [s for _, s in named_sheaves], names=names, name=name)
    return epi, Site(epi.cat, epi.topology, name=name, check=False)


def _functor_into(epi: EpiTopology, source_cat, fobj, morphism_of, name) -> LinearFunctor:
    """Functor whose basis morphism ``e_j: x -> y`` goes to the sheaf morphism ``morphism_of(e_j, x, y)``."""
    fmap = {}
    for x, y in itertools.product(source_cat.objects, repeat=2):
        cols = [epi.sub.coords(morphism_of(e, x, y), fobj[x], fobj[y]) for e in source_cat.hom_basis(x, y)]
        fmap[(x, y)] = np.array(cols, dtype=np.int64).T.reshape(epi.cat.d(fobj[x], fobj[y]), len(cols))
    f = LinearFunctor(source_cat, epi.cat, fobj, fmap, name=name)
    rep = f.validate()
    if not rep.ok:
        raise ValueError(str(rep))
    return f


def yoneda_site_morphism(site: Site, extra=(), prefix="h#", name=None):
    """``B -> #h_B`` into the epi-topologized subcategory on ``#h_B`` (plus ``extra`` named sheaves)."""
    cat = site.cat
    named = [(f"{prefix}{b}", sheafified_representable(site, b)) for b in cat.objects] + list(extra)
    epi, apex = _apex(site, named, name or f"Sh({site.name})")
    fobj = {b: f"{prefix}{b}" for b in cat.objects}
    y = _functor_into(epi, cat, fobj, lambda e, x, z: sheafified_yoneda(site, e, x, z), name=f"#Y_{site.name}")
    return epi, apex, SiteMorphism(y, site, apex)


# --- roof decomposition---------------------------------------------------------------

@dataclass
class Roof:
    spec: ColimFunctorSpec
    apex: Site
    epi: EpiTopology
    f: SiteMorphism
    w: SiteMorphism
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    _cmp: dict = field(default_factory=dict, repr=False)

    @property
    def ok(self) -> bool:
        return not self.failures

    def comparison(self, g: Presheaf) -> PresheafMorphism:
        """Isomorphism ``F(G) -> #w^* f^s G``."""
        if id(g) not in self._cmp:
            self._cmp[id(g)] = (g, roof_comparison(self, g))
        return self._cmp[id(g)][1]


def roof_comparison(roof: Roof, g: Presheaf) -> PresheafMorphism:
    spec, fm, wm = roof.spec, roof.f, roof.w
    sub = roof.epi.sub
    ccat, bcat, p = roof.apex.cat, spec.target.cat, g.p
    acat = spec.source.cat
    phi1 = {a: wm.restrict(representable(ccat, fm(a))) for a in acat.objects}
    phimap1 = {(x, y): [wm.restrict_map(yoneda_map(ccat, fm.functor.fmap[(x, y)][:, j], fm(x), fm(y)))
                        for j in range(acat.d(x, y))] for x in acat.objects for y in acat.objects}
    t1 = Coend(g, bcat, phi1, phimap1, name="T1")
    t2 = spec.coend(g)
    tau = {}
    for a in acat.objects:
        comps = {}
        for b in bcat.objects:
            hb = sheafify(representable(bcat, b), spec.target)
            point = ea.matmul(hb.unit.comps[b], bcat.ident[b], p)
            basis = sub.homs[(wm(b), fm(a))].basis
            comps[b] = np.array([psi.comps[b] @ point % p for psi in basis], dtype=np.int64) \
                .T.reshape(spec.phi[a].dims[b], len(basis))
        tau[a] = PresheafMorphism(phi1[a], spec.phi[a], comps, name=f"ev_{a}")
    to_f = sheafify(t1.presheaf, spec.target).map_to(spec.apply_result(g), t1.map_right(t2, tau))
    lk = fm.left_kan(g)
    restricted = wm.restrict(lk.presheaf)
    same = PresheafMorphism(t1.presheaf, restricted, {b: ea.identity(t1.presheaf.dims[b]) for b in bcat.objects},
                            name="T1=w*f_!G")
    r_up = wm.restrict(fm.upper(g))
    step = compose(wm.restrict_map(fm.upper_result(g).unit), same)
    to_w = sheafify(t1.presheaf, spec.target).map_to(sheafify(r_up, spec.target), step)
    return compose(to_w, to_f.inverse(), name=f"roof_{g.name}")


def roof_decompose(spec: ColimFunctorSpec, n=20, seed=0, naturality=True) -> Roof:
    src, tgt = spec.source, spec.target
    named = [(f"w:{b}", sheafified_representable(tgt, b)) for b in tgt.cat.objects] + \
            [(f"f:{a}", spec.phi[a]) for a in src.cat.objects]
    epi, apex = _apex(tgt, named, f"apex({spec.name})")
    w = _functor_into(epi, tgt.cat, {b: f"w:{b}" for b in tgt.cat.objects},
                      lambda e, x, y: sheafified_yoneda(tgt, e, x, y), name="w")
    f = _functor_into(epi, src.cat, {a: f"f:{a}" for a in src.cat.objects},
                      lambda e, x, y: spec.on_hom(e, x, y), name="f")
    roof = Roof(spec, apex, epi, SiteMorphism(f, src, apex, name="f"), SiteMorphism(w, tgt, apex, name="w"))
    roof.checks["apex_objects"] = len(apex.cat.objects)
    roof.checks["topology"] = epi.report.ok
    if not epi.report.ok:
        roof.failures.append(f"apex cover system is not a topology: {epi.report}")
    roof.checks["w_LC"] = roof.w.report.LC
    if not roof.w.report.LC:
        roof.failures.append(f"w is not LC: {roof.w.report.fields()}")
    roof.checks["f_continuous"] = bool(roof.f.report.continuous)
    if not roof.f.report.continuous:
        roof.failures.append(f"f is not continuous: {roof.f.report.continuous}")
    probes = probe_sheaves(src, n, seed)
    isos = 0
    for g in probes:
        try:
            if roof.comparison(g).is_iso():
                isos += 1
            else:
                roof.failures.append(f"comparison at {g.name} is not invertible")
        except ValueError as exc:
            roof.failures.append(f"comparison at {g.name} failed: {exc}")
    roof.checks["iso_probes"] = f"{isos}/{len(probes)}"
    if naturality and not roof.failures:
        roof.failures += naturality_defects(roof.comparison, spec.apply_map,
                                            lambda r: roof.w.cocont_upper_map(roof.f.upper_map(r)),
                                            probe_morphisms(probes, max_pairs=len(src.cat.objects) + 2))
    return roof


# --- LF3 ---------------------------------------------------------------------------

@dataclass
class Square:
    site: Site
    epi: EpiTopology
    v: SiteMorphism
    g: SiteMorphism
    alpha: NatTransform | None
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def lf3_complete_square(f: SiteMorphism, w: SiteMorphism) -> Square:
    """Complete ``A <-f- C -w-> B`` (``w`` LC) to ``g o w => v o f`` with ``v`` LC."""
    if f.source is not w.source:
        raise ValueError("f and w must share their source")
    a_site, b_site, c_site = f.target, w.target, f.source
    hb = {b: sheafified_representable(b_site, b) for b in b_site.cat.objects}
    named = [(f"v:{a}", sheafified_representable(a_site, a)) for a in a_site.cat.objects] + \
            [(f"g:{b}", f.upper(w.cocont_upper(hb[b]))) for b in b_site.cat.objects]
    epi, d_site = _apex(a_site, named, "D")
    v = SiteMorphism(_functor_into(epi, a_site.cat, {a: f"v:{a}" for a in a_site.cat.objects},
                                   lambda e, x, y: sheafified_yoneda(a_site, e, x, y), name="v"),
                     a_site, d_site, name="v")
    g = SiteMorphism(_functor_into(epi, b_site.cat, {b: f"g:{b}" for b in b_site.cat.objects},
                                   lambda e, x, y: f.upper_map(w.cocont_upper_map(sheafified_yoneda(b_site, e, x, y))),
                                   name="g"),
                     b_site, d_site, name="g")
    sq = Square(d_site, epi, v, g, None)
    if not epi.report.ok:
        sq.failures.append(f"D is not a site: {epi.report}")
    comps = {}
    for c in c_site.cat.objects:
        hc = sheafified_representable(c_site, c)
        step = w.cocont_upper_map(w.kappa(c))
        wu = w.upper(hc)
        u = sheafify(w.restrict(wu), c_site).unit
        eta = w.unit(hc)
        try:
            inner = compose_all(eta.inverse(), u.inverse(), step)
            alpha_c = compose(f.kappa(c).inverse(), f.upper_map(inner))
        except ValueError as exc:
            sq.failures.append(f"alpha at {c}: {exc}")
            return sq
        comps[c] = epi.sub.coords(alpha_c, g(w(c)), v(f(c)))
    try:
        sq.alpha = NatTransform(compose_functors(g.functor, w.functor), compose_functors(v.functor, f.functor),
                                comps, name="alpha")
    except ValueError as exc:
        sq.failures.append(str(exc))
        return sq
    if not sq.alpha.is_invertible():
        sq.failures.append("alpha is not invertible")
    if not v.report.LC:
        sq.failures.append(f"v is not LC: {v.report.fields()}")
    return sq


# --- LF4 ---------------------------------------------------------------------------

@dataclass
class LF4Result:
    site: Site
    epi: EpiTopology | None
    v: SiteMorphism
    beta: NatTransform | None
    f: SiteMorphism
    g: SiteMorphism
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _iota(m: SiteMorphism, mw: SiteMorphism, w: SiteMorphism, b) -> PresheafMorphism:
    """``(m w)^s(w_s #h_b) -> m^s w^s w_s #h_b -> m^s #h_b -> #h_{m b}``."""
    hb = sheafified_representable(w.target, b)
    f_ = w.restrict(hb)
    psi = associator(m, w, mw, f_)
    return compose_all(m.kappa(b).inverse(), m.upper_map(w.counit(hb)), psi)


def lf4_construct(f: SiteMorphism, g: SiteMorphism, w: SiteMorphism, alpha: NatTransform) -> LF4Result:
    """``v = #Y`` and ``beta: v f => v g`` with ``v o alpha = beta o w`` exactly."""
    a_site, bp_site = f.target, w.source
    fw, gw = compose_site_morphisms(f, w, name="fw"), compose_site_morphisms(g, w, name="gw")
    named = [(f"v:{a}", sheafified_representable(a_site, a)) for a in a_site.cat.objects]
    for tag, m in (("fw", fw), ("gw", gw)):
        named += [(f"{tag}:{b}", m.upper(sheafified_representable(bp_site, b))) for b in bp_site.cat.objects]
    epi, ap_site = _apex(a_site, named, "A'")
    v = SiteMorphism(_functor_into(epi, a_site.cat, {a: f"v:{a}" for a in a_site.cat.objects},
                                   lambda e, x, y: sheafified_yoneda(a_site, e, x, y), name="v"),
                     a_site, ap_site, name="v")
    res = LF4Result(ap_site, epi, v, None, f, g)
    if not epi.report.ok:
        res.failures.append(f"A' is not a site: {epi.report}")
    cell = TwoCell(fw, gw, alpha)
    comps = {}
    for b in f.source.cat.objects:
        f_ = w.restrict(sheafified_representable(w.target, b))
        try:
            beta_b = compose_all(_iota(g, gw, w, b), cell.upper(f_), _iota(f, fw, w, b).inverse())
        except ValueError as exc:
            res.failures.append(f"beta at {b}: {exc}")
            return res
        comps[b] = epi.sub.coords(beta_b, v(f(b)), v(g(b)))
    try:
        res.beta = NatTransform(compose_functors(v.functor, f.functor), compose_functors(v.functor, g.functor),
                                comps, name="beta")
    except ValueError as exc:
        res.failures.append(str(exc))
        return res
    for b in w.source.cat.objects:
        lhs = v.functor.on_hom(alpha[b], f(w(b)), g(w(b)))
        if not np.array_equal(lhs, res.beta[w(b)]):
            res.failures.append(f"v(alpha_{b}) != beta_{w(b)}")
    if alpha.is_invertible() and not res.beta.is_invertible():
        res.failures.append("alpha is invertible but beta is not")
    if not v.report.LC:
        res.failures.append(f"v is not LC: {v.report.fields()}")
    return res


def twist_lf4(res: LF4Result, theta) -> LF4Result:
    """Second LF4 solution ``v' = theta^-1 v theta`` with ``beta'`` conjugated accordingly."""
    from .lincat import conjugated_functor

    v2f, _ = conjugated_functor(res.v.functor, theta, name="v'")
    v2 = SiteMorphism(v2f, res.v.source, res.v.target, name="v'")
    cat = res.site.cat
    f, g = res.f.functor, res.g.functor
    comps = {}
    for b in f.source.objects:
        x, y = res.v(f(b)), res.v(g(b))
        inv = cat.is_iso(theta[g(b)], y, y)
        comps[b] = cat.compose(inv, cat.compose(res.beta[b], theta[f(b)], x, x, y), x, y, y)
    beta2 = NatTransform(compose_functors(v2f, f), compose_functors(v2f, g), comps, name="beta'")
    return LF4Result(res.site, res.epi, v2, beta2, res.f, res.g)


@dataclass
class CompareResult:
    site: Site | None
    u: SiteMorphism | None
    u2: SiteMorphism | None
    eps: NatTransform | None
    commutes: bool = False
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def lf4_compare(first: LF4Result, second: LF4Result) -> CompareResult:
    """``u = #Y``, ``u' = v^s v'_s #Y`` and ``eps: u v => u' v'`` making the
    square of ``u beta`` and ``u' beta'`` commute."""
    v, v2 = first.v, second.v
    if v.target is not v2.target or v.source is not v2.source:
        raise ValueError("the two solutions must share source and target sites")
    ap = v.target
    out = CompareResult(None, None, None, None)
    h = {x: sheafified_representable(ap, x) for x in ap.cat.objects}

    def uprime(phi):
        return v.upper_map(v2.restrict_map(phi))

    named = [(f"u:{x}", h[x]) for x in ap.cat.objects] + \
            [(f"u':{x}", v.upper(v2.restrict(h[x]))) for x in ap.cat.objects]
    epi, app = _apex(ap, named, "A''")
    out.site = app
    if not epi.report.ok:
        out.failures.append(f"A'' is not a site: {epi.report}")
    u = _functor_into(epi, ap.cat, {x: f"u:{x}" for x in ap.cat.objects},
                      lambda e, x, y: sheafified_yoneda(ap, e, x, y), name="u")
    u2 = _functor_into(epi, ap.cat, {x: f"u':{x}" for x in ap.cat.objects},
                       lambda e, x, y: uprime(sheafified_yoneda(ap, e, x, y)), name="u'")
    out.u, out.u2 = SiteMorphism(u, ap, app, name="u"), SiteMorphism(u2, ap, app, name="u'")
    a_site = v.source
    eps = {}
    for a in a_site.cat.objects:
        ha = sheafified_representable(a_site, a)
        e = compose_all(uprime(v2.kappa(a).inverse()), v.upper_map(v2.unit(ha)), v.kappa(a))
        eps[a] = epi.sub.coords(e, u(v(a)), u2(v2(a)))
    uv, u2v2 = compose_functors(u, v.functor), compose_functors(u2, v2.functor)
    try:
        out.eps = NatTransform(uv, u2v2, eps, name="eps")
    except ValueError as exc:
        out.failures.append(str(exc))
        return out
    if not out.eps.is_invertible():
        out.failures.append("eps is not invertible")
    c = app.cat
    f, g = first.f.functor, first.g.functor
    ok = True
    for b in f.source.objects:
        top = u.on_hom(first.beta[b], v(f(b)), v(g(b)))
        bottom = u2.on_hom(second.beta[b], v2(f(b)), v2(g(b)))
        lhs = c.compose(out.eps[g(b)], top, uv(f(b)), uv(g(b)), u2v2(g(b)))
        rhs = c.compose(bottom, out.eps[f(b)], uv(f(b)), u2v2(f(b)), u2v2(g(b)))
        if not np.array_equal(lhs, rhs):
            ok = False
            out.failures.append(f"square does not commute at {b}")
    out.commutes = ok
    for name, fn in (("u.v", uv), ("u'.v'", u2v2)):
        rep = SiteMorphism(fn, a_site, app).report
        if not rep.LC:
            out.failures.append(f"{name} is not LC: {rep.fields()}")
    return out


# --- LF5 ---------------------------------------------------------------------------

def lf5_transfer(v: SiteMorphism, w: SiteMorphism, alpha: NatTransform):
    """Analysis of ``v`` given an invertible ``alpha: v => w`` with ``w`` LC.

    Returns ``(report, failures)``."""
    failures = []
    if not (alpha.source == v.functor and alpha.target == w.functor):
        raise ValueError("alpha does not run from v to w")
    if not alpha.is_invertible():
        raise ValueError("alpha is not invertible")
    if not w.report.LC:
        raise ValueError("w is not LC")
    if not v.report.LC:
        failures.append(f"v is not LC: {v.report.fields()}")
    return v.report, failures


# --- B-conditions --------------------------------------------------------------------

@dataclass
class BResult:
    data: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def fully_faithful_on_representables(spec: ColimFunctorSpec) -> list[str]:
    """Hom(A, A') maps onto hom(#h_A, #h_A') and onto hom(phi A, phi A') with equal kernels."""
    from .presheaf import _hom_cached

    bad = []
    site, cat, p = spec.source, spec.source.cat, spec.source.p
    for x, y in itertools.product(cat.objects, repeat=2):
        hs = _hom_cached(sheafified_representable(site, x), sheafified_representable(site, y))
        hp = _hom_cached(spec.phi[x], spec.phi[y])
        m1 = np.array([hs.coords(sheafified_yoneda(site, e, x, y)) for e in cat.hom_basis(x, y)],
                      dtype=np.int64).T.reshape(hs.dim, cat.d(x, y))
        m2 = np.array([hp.coords(m) for m in spec.phimap[(x, y)]], dtype=np.int64).T.reshape(hp.dim, cat.d(x, y))
        if ea.rank(m1, p) != hs.dim or ea.rank(m2, p) != hp.dim:
            bad.append(f"not full at ({x}, {y})")
        k1, k2 = ea.span_of_columns(ea.kernel_basis(m1, p), p), ea.span_of_columns(ea.kernel_basis(m2, p), p)
        if not np.array_equal(k1, k2):
            bad.append(f"not faithful at ({x}, {y})")
    return bad


def b2_decompose_equivalence(spec: ColimFunctorSpec, n=20, seed=0) -> BResult:
    """Roof of an equivalence: both legs LC, ``delta2: e ~ #w1^* w2^s`` and ``delta1: #w1^* w1^s ~ id``."""
    res = BResult()
    res.failures += [f"precondition: {b}" for b in fully_faithful_on_representables(spec)]
    if res.failures:
        return res
    roof = roof_decompose(spec, n, seed)
    res.data["roof"] = roof
    res.failures += roof.failures
    w1, w2 = roof.w, roof.f
    res.data["w1_LC"], res.data["w2_LC"] = w1.report.LC, w2.report.LC
    if not w2.report.LC:
        res.failures.append(f"w2 is not LC: {w2.report.fields()}")
    for g in probe_sheaves(spec.target, n, seed):
        d1 = compose(sheafify(w1.restrict(w1.upper(g)), spec.target).unit, w1.unit(g))
        if not d1.is_iso():
            res.failures.append(f"delta1 at {g.name} is not invertible")
    return res


def b4_separate(f1: SiteMorphism, f2: SiteMorphism, g1: NatTransform, g2: NatTransform, n=20, seed=0) -> BResult:
    res = BResult()
    c1, c2 = TwoCell(f1, f2, g1), TwoCell(f1, f2, g2)
    for g in probe_sheaves(f1.source, n, seed):
        if c1.upper(g) != c2.upper(g):
            raise ValueError(f"transports differ at {g.name}")
    epi, apex, w = yoneda_site_morphism(f1.target)
    res.data.update(site=apex, w=w, distinct=g1 != g2)
    if not w.report.LC:
        res.failures.append(f"w is not LC: {w.report.fields()}")
    for a in f1.source.cat.objects:
        x, y = f1(a), f2(a)
        if not np.array_equal(w.functor.on_hom(g1[a], x, y), w.functor.on_hom(g2[a], x, y)):
            res.failures.append(f"w(gamma1_{a}) != w(gamma2_{a})")
    return res


def b5_lift(f1: SiteMorphism, f2: SiteMorphism, transport, n=20, seed=0, gamma: NatTransform | None = None) -> BResult:
    """``beta_A = kappa^-1 alpha_{#h_A} kappa`` and ``w^s(alpha) psi1 = psi2 beta^s`` on probes.

    ``transport(G)`` must return a morphism ``f1^s G -> f2^s G``."""
    res = BResult()
    epi, apex, w = yoneda_site_morphism(f1.target)
    res.data.update(site=apex, w=w)
    a_site = f1.source
    comps = {}
    for a in a_site.cat.objects:
        ha = sheafified_representable(a_site, a)
        b = compose_all(f2.kappa(a).inverse(), transport(ha), f1.kappa(a))
        comps[a] = epi.sub.coords(b, w(f1(a)), w(f2(a)))
    wf1, wf2 = compose_site_morphisms(w, f1, name="wf1"), compose_site_morphisms(w, f2, name="wf2")
    try:
        beta = NatTransform(wf1.functor, wf2.functor, comps, name="beta")
    except ValueError as exc:
        res.failures.append(str(exc))
        return res
    res.data["beta"] = beta
    if gamma is not None:
        expected = {a: w.functor.on_hom(gamma[a], f1(a), f2(a)) for a in a_site.cat.objects}
        if any(not np.array_equal(expected[a], beta[a]) for a in expected):
            res.failures.append("beta differs from w o gamma")
    cell = TwoCell(wf1, wf2, beta)
    checked = 0
    for g in probe_sheaves(a_site, n, seed):
        lhs = compose(w.upper_map(transport(g)), associator(w, f1, wf1, g))
        rhs = compose(associator(w, f2, wf2, g), cell.upper(g))
        checked += 1
        if lhs != rhs:
            res.failures.append(f"associator equation fails at {g.name}")
    res.data["checked"] = checked
    return res
