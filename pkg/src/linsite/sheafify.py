"""Sheaf condition, plus-construction and sheafification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import exactalg as ea
from .presheaf import (HomSpace, Presheaf, PresheafMorphism, Sieve, cokernel, compose, identity_morphism, kernel,
                       pullback_map, pullback_sieve, sieve_map, yoneda_element)
from .topology import Site


def _hom_from_sieve(r: Sieve, f: Presheaf) -> HomSpace:
    cache = r.__dict__.setdefault("_homs", {})
    if id(f) not in cache:
        cache[id(f)] = (f, HomSpace(r.presheaf, f))
    return cache[id(f)][1]


def restriction_matrix(f: Presheaf, r: Sieve) -> np.ndarray:
    """Matrix of ``F(A) -> hom(R, F)``, ``x -> (Yoneda x) o incl``."""
    h = _hom_from_sieve(r, f)
    a = r.base
    cols = [h.coords(compose(yoneda_element(f, a, e), r.inclusion))
            for e in np.eye(f.dims[a], dtype=np.int64)]
    return np.array(cols, dtype=np.int64).T.reshape(h.dim, f.dims[a])


def is_sheaf(f: Presheaf, site: Site):
    """``(True, None)`` or ``(False, (A, R))`` for the first failing cover."""
    if f.cat is not site.cat:
        raise ValueError("presheaf and site live on different categories")
    for a in site.cat.objects:
        for r in site.covering(a):
            if r.is_maximal():
                continue
            m = restriction_matrix(f, r)
            if m.shape[0] != m.shape[1] or not ea.is_invertible(m, f.p):
                return False, (a, r)
    return True, None


def annihilator_sieve(f: Presheaf, a, x) -> Sieve:
    """``{r: X -> a | F(r) x = 0}``."""
    cat = f.cat
    slices = {}
    for y in cat.objects:
        t = f.act[(y, a)]
        m = np.einsum("jab,b->aj", t, np.asarray(x)) % f.p if t.size else ea.zeros(f.dims[y], cat.d(y, a))
        slices[y] = ea.kernel_basis(m, f.p).T
    return Sieve(cat, a, slices)


def is_locally_zero(f: Presheaf, site: Site) -> bool:
    """Every basis element is killed on a covering sieve (enough, since covers meet in covers)."""
    for a in site.cat.objects:
        for e in np.eye(f.dims[a], dtype=np.int64):
            if not site.is_cover(annihilator_sieve(f, a, e)):
                return False
    return True


class Plus:
    """``F+(A) = colim_{R covering A} hom(R, F)`` with its canonical map ``F -> F+``."""

    def __init__(self, f: Presheaf, site: Site):
        self.f, self.site = f, site
        cat, p = site.cat, f.p
        self.covers = {a: site.covering(a) for a in cat.objects}
        self.pos = {a: {r.key: i for i, r in enumerate(self.covers[a])} for a in cat.objects}
        self.homs = {a: [_hom_from_sieve(r, f) for r in self.covers[a]] for a in cat.objects}
        self.offsets, self.q, self.s = {}, {}, {}
        for a in cat.objects:
            offs = np.cumsum([0] + [h.dim for h in self.homs[a]]).tolist()
            self.offsets[a] = offs
            n = offs[-1]
            rels = []
            rs = self.covers[a]
            for i, j in itertools.permutations(range(len(rs)), 2):
                small, big = rs[i], rs[j]
                if not small <= big:
                    continue
                inc = sieve_map(small, big)
                hb, hs = self.homs[a][j], self.homs[a][i]
                for k, psi in enumerate(hb.basis):
                    v = np.zeros(n, dtype=np.int64)
                    v[offs[j] + k] = 1
                    v[offs[i]:offs[i + 1]] -= hs.coords(compose(psi, inc))
                    rels.append(v % p)
            rel = np.array(rels, dtype=np.int64).T if rels else ea.zeros(n, 0)
            _, self.q[a] = ea.image_and_quotient(rel, p)
            self.s[a] = ea.section(self.q[a], p)
        act = {}
        for x, a in itertools.product(cat.objects, repeat=2):
            mats = []
            for j in range(cat.d(x, a)):
                e = np.eye(cat.d(x, a), dtype=np.int64)[j]
                d = np.zeros((self.offsets[x][-1], self.offsets[a][-1]), dtype=np.int64)
                for i, r in enumerate(self.covers[a]):
                    pulled = pullback_sieve(r, e, x)
                    t = self.pos[x].get(pulled.key)
                    if t is None:
                        raise ValueError("cover system is not stable under pullback")
                    m = pullback_map(r, e, x, pulled)
                    ht = self.homs[x][t]
                    for k, psi in enumerate(self.homs[a][i].basis):
                        d[self.offsets[x][t]:self.offsets[x][t + 1], self.offsets[a][i] + k] = \
                            ht.coords(compose(psi, m))
                mats.append(ea.matmul(ea.matmul(self.q[x], d, p), self.s[a], p))
            act[(x, a)] = np.array(mats, dtype=np.int64).reshape(cat.d(x, a), self.q[x].shape[0],
                                                                 self.q[a].shape[0])
        self.presheaf = Presheaf(cat, {a: self.q[a].shape[0] for a in cat.objects}, act, name=f"{f.name}+",
                                 check=False)
        comps = {}
        for a in cat.objects:
            i = next(i for i, r in enumerate(self.covers[a]) if r.is_maximal())
            m = restriction_matrix(f, self.covers[a][i])
            emb = np.zeros((self.offsets[a][-1], f.dims[a]), dtype=np.int64)
            emb[self.offsets[a][i]:self.offsets[a][i + 1]] = m
            comps[a] = ea.matmul(self.q[a], emb, p)
        self.canonical = PresheafMorphism(f, self.presheaf, comps, name=f"can_{f.name}", check=False)

    def map_to(self, other: Plus, phi: PresheafMorphism) -> PresheafMorphism:
        """``phi+``: post-composition of representing sections."""
        p = self.f.p
        comps = {}
        for a in self.site.cat.objects:
            d = np.zeros((other.offsets[a][-1], self.offsets[a][-1]), dtype=np.int64)
            for i, r in enumerate(self.covers[a]):
                t = other.pos[a][r.key]
                ho = other.homs[a][t]
                for k, psi in enumerate(self.homs[a][i].basis):
                    d[other.offsets[a][t]:other.offsets[a][t + 1], self.offsets[a][i] + k] = \
                        ho.coords(compose(phi, psi))
            comps[a] = ea.matmul(ea.matmul(other.q[a], d, p), self.s[a], p)
        return PresheafMorphism(self.presheaf, other.presheaf, comps, name=f"{phi.name}+", check=False)


def plus(f: Presheaf, site: Site) -> Plus:
    return Plus(f, site)


@dataclass
class SheafificationResult:
    source: Presheaf
    site: Site
    first: Plus | None
    second: Plus | None
    unit: PresheafMorphism

    @property
    def sheaf(self) -> Presheaf:
        return self.source if self.second is None else self.second.presheaf

    def map_to(self, other: SheafificationResult, phi: PresheafMorphism) -> PresheafMorphism:
        if self.second is None:
            return PresheafMorphism(phi.source, phi.target, phi.comps, name=f"#{phi.name}", check=False)
        m = self.second.map_to(other.second, self.first.map_to(other.first, phi))
        m.name = f"#{phi.name}"
        return m


def sheafify(f: Presheaf, site: Site) -> SheafificationResult:
    """Plus-construction applied twice (cached on the presheaf per site).

    Under the trivial topology every presheaf is a sheaf and ``#`` is the identity."""
    cache = f.__dict__.setdefault("_sheafify", {})
    key = id(site)
    if key in cache:
        return cache[key][1]
    if site.topology.is_trivial():
        res = SheafificationResult(f, site, None, None, identity_morphism(f))
        cache[key] = (site, res)
        return res
    first = Plus(f, site)
    second = Plus(first.presheaf, site)
    second.presheaf.name = f"#{f.name}"
    unit = compose(second.canonical, first.canonical, name=f"unit_{f.name}")
    res = SheafificationResult(f, site, first, second, unit)
    cache[key] = (site, res)
    return res


def sheafify_morphism(phi: PresheafMorphism, site: Site) -> PresheafMorphism:
    return sheafify(phi.source, site).map_to(sheafify(phi.target, site), phi)


def is_local_iso(phi: PresheafMorphism, site: Site) -> bool:
    k, _ = kernel(phi)
    c, _ = cokernel(phi)
    return is_locally_zero(k, site) and is_locally_zero(c, site)


def is_epi_in_sheaves(phi: PresheafMorphism, site: Site, check=True) -> bool:
    if check:
        for end in (phi.source, phi.target):
            ok, wit = is_sheaf(end, site)
            if not ok:
                raise ValueError(f"{end.name} is not a sheaf (fails at {wit[0]})")
    c, _ = cokernel(phi)
    return is_locally_zero(c, site)
