"""Morphisms of linear sites: continuity, cocontinuity, the LC conditions, the
induced functors between sheaf categories and the transport of 2-cells."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import exactalg as ea
from .lincat import LinearFunctor, NatTransform, compose_functors, identity_functor, vertical_compose
from .presheaf import (LeftKan, Presheaf, PresheafMorphism, RightKan, all_sieves, compose, compose_all,
                       identity_morphism, image_sieve, random_presheaf, representable, restrict_along,
                       restrict_morphism, Sieve, sieve_generated, yoneda_map, _hom_cached)
from .sheafify import is_local_iso, sheafify
from .topology import CoverSystem, Site


@dataclass
class Verdict:
    ok: bool
    witness: str | None = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "true"
        return f"false ({self.witness})" if self.witness else "false"


@dataclass
class MorphismReport:
    continuous: Verdict
    cocontinuous: Verdict
    G: Verdict
    F: Verdict
    FF: Verdict
    preimage_equal: Verdict

    @property
    def LC(self) -> bool:
        return bool(self.G and self.F and self.FF and self.preimage_equal)

    def fields(self) -> dict:
        return {"continuous": self.continuous, "cocontinuous": self.cocontinuous, "G": self.G, "F": self.F,
                "FF": self.FF, "preimage_equal": self.preimage_equal, "LC": Verdict(self.LC)}


def _first(items):
    for w in items:
        if w is not None:
            return Verdict(False, w)
    return Verdict(True)


def check_continuous(f: LinearFunctor, src: Site, tgt: Site) -> Verdict:
    """Every covering inclusion ``R -> h_A`` goes to a local isomorphism under ``f_!``."""
    def witnesses():
        for a in src.cat.objects:
            h = LeftKan(f, representable(src.cat, a))
            for r in src.covering(a):
                if r.is_maximal():
                    continue
                lk = LeftKan(f, r.presheaf)
                if not is_local_iso(lk.map_to(h, r.inclusion), tgt):
                    yield f"f_!(R -> h_{a}) is not a local isomorphism for R with dims {r.dims}"
    return _first(witnesses())


def check_cocontinuous(f: LinearFunctor, src: Site, tgt: Site) -> Verdict:
    def witnesses():
        for a in src.cat.objects:
            images = [image_sieve(f, s) for s in src.covering(a)]
            for r in tgt.covering(f(a)):
                if not any(im <= r for im in images):
                    yield f"cover with dims {r.dims} of {f(a)} is refined by no image of a cover of {a}"
    return _first(witnesses())


def check_g(f: LinearFunctor, src: Site, tgt: Site) -> Verdict:
    def witnesses():
        for c in tgt.cat.objects:
            fam = [(f(a), e) for a in src.cat.objects for e in tgt.cat.hom_basis(f(a), c)]
            if not tgt.is_cover(sieve_generated(tgt.cat, c, fam)):
                yield f"morphisms out of the image do not cover {c}"
    return _first(witnesses())


def lifting_sieve(f: LinearFunctor, c, a, a2) -> Sieve:
    """``S_c(X) = {x: X -> a | c o f(x) in f(hom(X, a2))}`` for ``c: f(a) -> f(a2)``."""
    src, tgt, p = f.source, f.target, f.source.p
    slices = {}
    for x in src.objects:
        m = ea.matmul(tgt.postcompose_matrix(c, f(a), f(a2), f(x)), f.fmap[(x, a)], p)
        u = ea.span_of_columns(f.fmap[(x, a2)], p) if f.fmap[(x, a2)].size else ea.zeros(0, m.shape[0])
        slices[x] = ea.preimage(m, u, p)
    return Sieve(src, a, slices)


def check_f(f: LinearFunctor, src: Site, tgt: Site) -> Verdict:
    def witnesses():
        for a in src.cat.objects:
            for a2 in src.cat.objects:
                for c in tgt.cat.hom_elements(f(a), f(a2)):
                    if not src.is_cover(lifting_sieve(f, c, a, a2)):
                        yield f"c = {c.tolist()}: {f(a)} -> {f(a2)} is not locally in the image of hom({a},{a2})"
    return _first(witnesses())


def check_ff(f: LinearFunctor, src: Site, tgt: Site) -> Verdict:
    cat, p = src.cat, src.p

    def witnesses():
        for a in cat.objects:
            for a2 in cat.objects:
                k = ea.kernel_basis(f.fmap[(a, a2)], p)
                for coeffs in ea.all_vectors(k.shape[1], p):
                    x = ea.matmul(k, coeffs, p)
                    if not np.any(x):
                        continue
                    ann = Sieve(cat, a, {y: ea.kernel_basis(cat.postcompose_matrix(x, a, a2, y), p).T
                                         for y in cat.objects})
                    if not src.is_cover(ann):
                        yield f"a = {x.tolist()}: {a} -> {a2} is killed by f but not locally zero"
    return _first(witnesses())


def preimage_topology(f: LinearFunctor, tgt: Site) -> CoverSystem:
    return CoverSystem(f.source, {a: [r for r in all_sieves(f.source, a) if tgt.is_cover(image_sieve(f, r))]
                                  for a in f.source.objects})


def check_preimage(f: LinearFunctor, src: Site, tgt: Site) -> Verdict:
    pre = preimage_topology(f, tgt)

    def witnesses():
        for a in src.cat.objects:
            for r in all_sieves(src.cat, a):
                if src.is_cover(r) != pre.is_cover(r):
                    kind = "covers in the source only" if src.is_cover(r) else "has a covering image only"
                    yield f"sieve with dims {r.dims} on {a} {kind}"
    return _first(witnesses())


def analyze(f: LinearFunctor, src: Site, tgt: Site) -> MorphismReport:
    if f.source is not src.cat or f.target is not tgt.cat:
        raise ValueError("functor does not run between the given sites")
    return MorphismReport(check_continuous(f, src, tgt), check_cocontinuous(f, src, tgt), check_g(f, src, tgt),
                          check_f(f, src, tgt), check_ff(f, src, tgt), check_preimage(f, src, tgt))


def verify_lc_equivalence_criterion(f: LinearFunctor, src: Site, tgt: Site) -> dict:
    """Compare the LC verdict with continuity and cocontinuity, decided independently."""
    rep = analyze(f, src, tgt)
    pre = bool(rep.G and rep.F and rep.FF)
    both = bool(rep.continuous and rep.cocontinuous)
    return {"applicable": pre, "LC": rep.LC, "continuous_and_cocontinuous": both,
            "agree": (rep.LC == both) if pre else None, "report": rep}


# --- induced functors -----------------------------------------------------------

class _Memo:
    """Identity-keyed cache that keeps its keys alive."""

    def __init__(self):
        self._d = {}

    def get(self, key, make):
        k = id(key)
        if k not in self._d:
            self._d[k] = (key, make())
        return self._d[k][1]


class SiteMorphism:
    """A linear functor between sites with its induced functors on sheaves.

    ``lower`` is ``f_s = f^*``; ``upper`` is ``f^s = # f_!``; ``cocont_upper``
    is ``#f^*`` and ``cocont_lower`` is ``f_*``.  Values are cached per input
    object so that morphisms between them compose.
    """

    def __init__(self, functor: LinearFunctor, source: Site, target: Site, name=None):
        if functor.source is not source.cat or functor.target is not target.cat:
            raise ValueError("functor does not run between the given sites")
        self.functor, self.source, self.target = functor, source, target
        self.name = name or functor.name
        self._restrict, self._lk, self._rk = _Memo(), _Memo(), _Memo()

    def __repr__(self):
        return f"SiteMorphism({self.name!r}: {self.source.name} -> {self.target.name})"

    def __call__(self, x):
        return self.functor(x)

    @cached_property
    def report(self) -> MorphismReport:
        return analyze(self.functor, self.source, self.target)

    # f^* / f_s
    def restrict(self, g: Presheaf) -> Presheaf:
        return self._restrict.get(g, lambda: restrict_along(self.functor, g))

    lower = restrict

    def restrict_map(self, phi: PresheafMorphism) -> PresheafMorphism:
        return restrict_morphism(self.functor, phi, self.restrict(phi.source), self.restrict(phi.target))

    lower_map = restrict_map

    # f_! and f^s
    def left_kan(self, g: Presheaf) -> LeftKan:
        return self._lk.get(g, lambda: LeftKan(self.functor, g))

    def upper_result(self, g: Presheaf):
        return sheafify(self.left_kan(g).presheaf, self.target)

    def upper(self, g: Presheaf) -> Presheaf:
        return self.upper_result(g).sheaf

    def upper_map(self, phi: PresheafMorphism) -> PresheafMorphism:
        lk1, lk2 = self.left_kan(phi.source), self.left_kan(phi.target)
        return self.upper_result(phi.source).map_to(self.upper_result(phi.target), lk1.map_to(lk2, phi))

    # #f^* and f_*
    def cocont_upper(self, g: Presheaf) -> Presheaf:
        return sheafify(self.restrict(g), self.source).sheaf

    def cocont_upper_map(self, phi: PresheafMorphism) -> PresheafMorphism:
        r1, r2 = self.restrict(phi.source), self.restrict(phi.target)
        return sheafify(r1, self.source).map_to(sheafify(r2, self.source), self.restrict_map(phi))

    def right_kan(self, g: Presheaf) -> RightKan:
        return self._rk.get(g, lambda: RightKan(self.functor, g))

    def cocont_lower(self, g: Presheaf) -> Presheaf:
        return self.right_kan(g).presheaf

    def cocont_lower_map(self, phi: PresheafMorphism) -> PresheafMorphism:
        return self.right_kan(phi.source).map_to(self.right_kan(phi.target), phi)

    # adjunction data for f^s -| f_s
    def unit(self, g: Presheaf) -> PresheafMorphism:
        """``G -> f_s f^s G``."""
        lk = self.left_kan(g)
        u = self.upper_result(g).unit
        first = lk.unit(self.restrict(lk.presheaf))
        return compose(self.restrict_map(u), first, name=f"eta_{g.name}")

    def counit(self, f: Presheaf) -> PresheafMorphism:
        """``f^s f_s F -> F`` for a sheaf ``F``."""
        r = self.restrict(f)
        lk = self.left_kan(r)
        c = lk.counit_for(f)
        sc = self.upper_result(r).map_to(sheafify(f, self.target), c)
        return compose(sheafify(f, self.target).unit.inverse(), sc, name=f"eps_{f.name}")

    def kappa(self, a) -> PresheafMorphism:
        """``#h_{f(a)} -> f^s(#h_a)`` induced by ``y -> [id_a (x) y]``."""
        f, src, tgt = self.functor, self.source.cat, self.target.cat
        h = representable(src, a)
        lk = self.left_kan(h)
        hf = representable(tgt, f(a))
        ident = src.ident[a].reshape(-1, 1)
        comps = {b: ea.matmul(lk.block(b, a), np.kron(ident, ea.identity(tgt.d(b, f(a)))), src.p)
                 for b in tgt.objects}
        m = PresheafMorphism(hf, lk.presheaf, comps, name=f"y->id(x)y")
        sh = sheafify(h, self.source)
        m2 = compose(lk.map_to(self.left_kan(sh.sheaf), sh.unit), m)
        return sheafify(hf, self.target).map_to(self.upper_result(sh.sheaf), m2)


def sheafified_representable(site: Site, a) -> Presheaf:
    return sheafify(representable(site.cat, a), site).sheaf


def sheafified_yoneda(site: Site, e, x, y) -> PresheafMorphism:
    """``#h_e: #h_x -> #h_y``."""
    from .sheafify import sheafify_morphism

    return sheafify_morphism(yoneda_map(site.cat, e, x, y), site)


def probe_sheaves(site: Site, n=20, seed=0) -> list[Presheaf]:
    """Sheafified representables followed by ``n`` seeded random sheafifications."""
    cache = site.__dict__.setdefault("_probes", {})
    if (n, seed) not in cache:
        rng = np.random.default_rng(seed)
        out = [sheafified_representable(site, a) for a in site.cat.objects]
        for i in range(n):
            r = random_presheaf(site.cat, rng, name=f"R{i}")
            out.append(sheafify(r, site).sheaf)
        cache[(n, seed)] = out
    return cache[(n, seed)]


def probe_morphisms(probes, max_pairs=None) -> list[PresheafMorphism]:
    """Hom-space bases between consecutive probes (and each probe to itself)."""
    out = []
    pairs = [(i, i) for i in range(len(probes))] + [(i, i + 1) for i in range(len(probes) - 1)]
    if max_pairs is not None:
        pairs = pairs[:max_pairs]
    for i, j in pairs:
        out.extend(_hom_cached(probes[i], probes[j]).basis)
    return out


def naturality_defects(component, map1, map2, morphisms) -> list[str]:
    """``component(G'): F1 G' -> F2 G'`` against ``F1(rho)`` and ``F2(rho)``."""
    bad = []
    for rho in morphisms:
        lhs = compose(component(rho.target), map1(rho))
        rhs = compose(map2(rho), component(rho.source))
        if lhs != rhs:
            bad.append(f"square for {rho.name}: {rho.source.name} -> {rho.target.name} does not commute")
    return bad


def is_identity(phi: PresheafMorphism) -> bool:
    return phi.source is phi.target and phi == identity_morphism(phi.source)


# --- 2-cells ----------------------------------------------------------------------

class TwoCell:
    """A natural transformation ``alpha: f => g`` between parallel site morphisms."""

    def __init__(self, f: SiteMorphism, g: SiteMorphism, alpha: NatTransform):
        if alpha.source.fobj != f.functor.fobj or alpha.target.fobj != g.functor.fobj:
            raise ValueError("2-cell boundary does not match the site morphisms")
        self.f, self.g, self.alpha = f, g, alpha

    def lower(self, sheaf: Presheaf) -> PresheafMorphism:
        """``(alpha_s)_F: g_s F -> f_s F``, ``F(alpha_A)`` at ``A``."""
        f, g = self.f.functor, self.g.functor
        comps = {a: sheaf.action(self.alpha[a], f(a), g(a)) for a in f.source.objects}
        return PresheafMorphism(self.g.restrict(sheaf), self.f.restrict(sheaf), comps,
                                name=f"{self.alpha.name}_s", check=False)

    def upper(self, sheaf: Presheaf) -> PresheafMorphism:
        """``(alpha^s)_G: f^s G -> g^s G`` induced by ``x (x) y -> x (x) alpha_A y``."""
        f, g = self.f.functor, self.g.functor
        tgt = f.target
        tau = {a: yoneda_map(tgt, self.alpha[a], f(a), g(a)) for a in f.source.objects}
        lf, lg = self.f.left_kan(sheaf), self.g.left_kan(sheaf)
        m = lf.map_right(lg, tau)
        out = self.f.upper_result(sheaf).map_to(self.g.upper_result(sheaf), m)
        out.name = f"{self.alpha.name}^s"
        return out

    def mate(self, sheaf: Presheaf) -> PresheafMorphism:
        """``f^s G -> f^s g_s g^s G -> f^s f_s g^s G -> g^s G`` built from ``alpha_s``."""
        gs = self.g.upper(sheaf)
        eta = self.g.unit(sheaf)
        step = self.f.upper_map(self.lower(gs))
        return compose_all(self.f.counit(gs), step, self.f.upper_map(eta))

    def representable_defects(self) -> list[str]:
        """``(alpha^s)_{#h_A} o kappa_f(A) = kappa_g(A) o #h_{alpha_A}``."""
        bad = []
        f, g = self.f.functor, self.g.functor
        for a in f.source.objects:
            h = sheafified_representable(self.f.source, a)
            lhs = compose(self.upper(h), self.f.kappa(a))
            rhs = compose(self.g.kappa(a), sheafified_yoneda(self.f.target, self.alpha[a], f(a), g(a)))
            if lhs != rhs:
                bad.append(f"transport at #h_{a} differs from #h(alpha_{a})")
        return bad


# --- cocontinuous and continuous pushforwards agree for LC morphisms ----------

@dataclass
class ComparisonReport:
    ok: bool
    failures: list = field(default_factory=list)
    checked: int = 0


def verify_upper_matches_pushforward(w: SiteMorphism, n=20, seed=0, morphisms=True) -> ComparisonReport:
    """``#w^* = w_s`` and ``w_* = w^s`` on probes, with explicit comparison maps."""
    rep = ComparisonReport(True)
    if not w.report.LC:
        rep.ok = False
        rep.failures.append("precondition: morphism is not LC")
        return rep
    tprobes = probe_sheaves(w.target, n, seed)
    sprobes = probe_sheaves(w.source, n, seed)

    def lower_cmp(f):
        return sheafify(w.restrict(f), w.source).unit

    def upper_cmp(g):
        return upper_to_cocont_lower(w, g)

    for f in tprobes:
        rep.checked += 1
        if not lower_cmp(f).is_iso():
            rep.failures.append(f"w_s {f.name} -> #w^* {f.name} is not invertible")
    for g in sprobes:
        rep.checked += 1
        try:
            if not upper_cmp(g).is_iso():
                rep.failures.append(f"w^s {g.name} -> w_* {g.name} is not invertible")
        except ValueError as exc:
            rep.failures.append(f"at {g.name}: {exc}")
    if morphisms and not rep.failures:
        rep.failures += naturality_defects(lower_cmp, w.restrict_map, w.cocont_upper_map,
                                           probe_morphisms(tprobes, max_pairs=len(w.target.cat.objects) + 2))
        rep.failures += naturality_defects(upper_cmp, w.upper_map, w.cocont_lower_map,
                                           probe_morphisms(sprobes, max_pairs=len(w.source.cat.objects) + 2))
    rep.ok = not rep.failures
    return rep


def upper_to_cocont_lower(w: SiteMorphism, g: Presheaf) -> PresheafMorphism:
    """``#w_! G -> w_* G`` through ``w_!(eps^-1)`` and the counit of ``w_! -| w^*``."""
    rk = w.right_kan(g)
    h = rk.presheaf
    eps = rk.counit(w.restrict(h))
    lk_g, lk_h = w.left_kan(g), w.left_kan(w.restrict(h))
    m = compose(lk_h.counit_for(h), lk_g.map_to(lk_h, eps.inverse()))
    sh = sheafify(h, w.target)
    return compose(sh.unit.inverse(), w.upper_result(g).map_to(sh, m), name=f"cmp_{g.name}")


# --- equivalence certificates ------------------------------------------------------

@dataclass
class EquivalenceCertificate:
    morphism: str
    units: int = 0
    counits: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def certify_equivalence(w: SiteMorphism, n=20, seed=0, require_lc=True) -> EquivalenceCertificate:
    cert = EquivalenceCertificate(w.name)
    if require_lc and not w.report.LC:
        cert.failures.append("precondition: morphism is not LC")
        return cert
    for g in probe_sheaves(w.source, n, seed):
        eta = w.unit(g)
        cert.units += 1
        if not eta.is_iso():
            cert.failures.append(f"unit at {g.name} is not invertible")
            continue
        tri = compose(w.counit(w.upper(g)), w.upper_map(eta))
        if not is_identity(tri):
            cert.failures.append(f"triangle eps_(w^s G) o w^s(eta_G) != id at {g.name}")
    for f in probe_sheaves(w.target, n, seed):
        eps = w.counit(f)
        cert.counits += 1
        if not eps.is_iso():
            cert.failures.append(f"counit at {f.name} is not invertible")
            continue
        tri = compose(w.restrict_map(eps), w.unit(w.restrict(f)))
        if not is_identity(tri):
            cert.failures.append(f"triangle w_s(eps_F) o eta_(w_s F) != id at {f.name}")
    return cert


# --- pseudofunctoriality ----------------------------------------------------------

def compose_site_morphisms(g: SiteMorphism, f: SiteMorphism, name=None) -> SiteMorphism:
    if f.target is not g.source:
        raise ValueError("site morphisms are not composable")
    return SiteMorphism(compose_functors(g.functor, f.functor, name=name), f.source, g.target, name=name)


def identity_site_morphism(site: Site) -> SiteMorphism:
    return SiteMorphism(identity_functor(site.cat), site, site, name=f"id_{site.name}")


def associator(g: SiteMorphism, f: SiteMorphism, gf: SiteMorphism, sheaf: Presheaf) -> PresheafMorphism:
    """``(gf)^s G -> g^s f^s G`` induced by ``x (x) y -> [x (x) id_{fA}] (x) y``."""
    p = sheaf.p
    lk_gf = gf.left_kan(sheaf)
    lk_f = f.left_kan(sheaf)
    h = lk_f.presheaf
    lk_gh = g.left_kan(h)
    unit = lk_f.unit(f.restrict(h))
    comps = {}
    for c in g.target.cat.objects:
        d = np.zeros((lk_gh.blocksize[c], lk_gf.blocksize[c]), dtype=np.int64)
        for a in f.source.cat.objects:
            fa = f(a)
            m = np.kron(unit.comps[a], ea.identity(g.target.cat.d(c, g(fa))))
            d[lk_gh.offsets[c][fa]:lk_gh.offsets[c][fa] + m.shape[0],
              lk_gf.offsets[c][a]:lk_gf.offsets[c][a] + m.shape[1]] += m
        comps[c] = ea.matmul(ea.matmul(lk_gh.q[c], d % p, p), lk_gf.s[c], p)
    m = PresheafMorphism(lk_gf.presheaf, lk_gh.presheaf, comps, name="assoc")
    su = f.upper_result(sheaf)
    m2 = compose(lk_gh.map_to(g.left_kan(su.sheaf), su.unit), m)
    return gf.upper_result(sheaf).map_to(g.upper_result(su.sheaf), m2)


def unitor(idm: SiteMorphism, sheaf: Presheaf) -> PresheafMorphism:
    """``(id)^s G -> G``."""
    lk = idm.left_kan(sheaf)
    sh = sheafify(sheaf, idm.target)
    return compose(sh.unit.inverse(), idm.upper_result(sheaf).map_to(sh, lk.counit_for(sheaf)))


@dataclass
class PseudofunctorReport:
    failures: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_pseudofunctor(morphisms, two_cells=(), n=20, seed=0, naturality=True) -> PseudofunctorReport:
    """Unitors for every morphism's source, associators for consecutive composable
    pairs, and functoriality of 2-cell transport for composable 2-cells."""
    rep = PseudofunctorReport()
    morphisms = list(morphisms)
    for f in morphisms:
        idm = identity_site_morphism(f.source)
        probes = probe_sheaves(f.source, n, seed)
        for g in probes:
            rep.checked += 1
            if not unitor(idm, g).is_iso():
                rep.failures.append(f"unitor at {g.name} on {f.source.name} is not invertible")
        if naturality:
            rep.failures += naturality_defects(lambda g: unitor(idm, g), idm.upper_map, lambda r: r,
                                               probe_morphisms(probes, max_pairs=len(f.source.cat.objects) + 2))
    for f, g in zip(morphisms, morphisms[1:]):
        if f.target is not g.source:
            continue
        gf = compose_site_morphisms(g, f)
        probes = probe_sheaves(f.source, n, seed)
        for s in probes:
            rep.checked += 1
            if not associator(g, f, gf, s).is_iso():
                rep.failures.append(f"associator for {g.name} o {f.name} at {s.name} is not invertible")
        if naturality:
            rep.failures += naturality_defects(lambda s: associator(g, f, gf, s), gf.upper_map,
                                               lambda r: g.upper_map(f.upper_map(r)),
                                               probe_morphisms(probes, max_pairs=len(f.source.cat.objects) + 2))
    for cells in two_cells:
        rep.failures += two_cell_functoriality_defects(cells, n, seed)
    return rep


def two_cell_functoriality_defects(cells, n=20, seed=0) -> list[str]:
    """``(beta . alpha)^s = beta^s . alpha^s`` and ``id^s = id`` on probes."""
    alpha, beta = cells
    bad = []
    comp = TwoCell(alpha.f, beta.g, vertical_compose(beta.alpha, alpha.alpha))
    ident = TwoCell(alpha.f, alpha.f, _identity_nat(alpha.f.functor))
    for g in probe_sheaves(alpha.f.source, n, seed):
        if comp.upper(g) != compose(beta.upper(g), alpha.upper(g)):
            bad.append(f"transport of a vertical composite differs at {g.name}")
        if not is_identity(ident.upper(g)):
            bad.append(f"transport of an identity 2-cell is not the identity at {g.name}")
    return bad


def _identity_nat(f: LinearFunctor) -> NatTransform:
    from .lincat import identity_transform

    return identity_transform(f)
