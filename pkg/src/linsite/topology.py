"""Cover systems, linear Grothendieck topologies and the induced epimorphism
topology on a finite full subcategory of a sheaf category."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import exactalg as ea
from .lincat import LinearCategory, Report
from .presheaf import (Presheaf, _hom_cached, PresheafMorphism, Sieve, all_sieves, compose, maximal_sieve,
                       pullback_sieve, quotient)


class TopologyError(ValueError):
    pass


class CoverSystem:
    """Per-object sets of covering sieves, keyed by their canonical form."""

    def __init__(self, cat: LinearCategory, covers):
        self.cat = cat
        self.covers = {x: {} for x in cat.objects}
        for x, sieves in covers.items():
            for s in sieves:
                if s.base != x or s.cat is not cat:
                    raise TopologyError(f"sieve on {s.base} listed under {x}")
                self.covers[x][s.key] = s

    def __repr__(self):
        return "CoverSystem(" + ", ".join(f"{x}: {len(v)}" for x, v in self.covers.items()) + ")"

    def covering(self, x) -> list[Sieve]:
        return sorted(self.covers[x].values(), key=lambda s: sum(s.dims.values()))

    def is_cover(self, s: Sieve) -> bool:
        return s.key in self.covers[s.base]

    def __eq__(self, other):
        return isinstance(other, CoverSystem) and self.cat is other.cat and all(
            self.covers[x].keys() == other.covers[x].keys() for x in self.cat.objects)

    __hash__ = None

    def with_sieves(self, extra) -> CoverSystem:
        out = {x: list(self.covers[x].values()) for x in self.cat.objects}
        for s in extra:
            out[s.base].append(s)
        return CoverSystem(self.cat, out)

    def is_trivial(self) -> bool:
        return all(len(v) == 1 and next(iter(v.values())).is_maximal() for v in self.covers.values())


def trivial_topology(cat: LinearCategory) -> CoverSystem:
    return CoverSystem(cat, {x: [maximal_sieve(cat, x)] for x in cat.objects})


def slice_elements(s: Sieve, x) -> np.ndarray:
    """Every element of the slice ``S(x)`` (rows)."""
    rows = s.slices[x]
    coeffs = ea.all_vectors(rows.shape[0], s.cat.p)
    if rows.shape[0] == 0:
        return np.zeros((1, rows.shape[1]), dtype=np.int64)
    return ea.matmul(coeffs, rows, s.cat.p)


def check_topology(cs: CoverSystem) -> Report:
    """Identity, pullback and glueing axioms, quantified over all slice elements."""
    cat = cs.cat
    rep = Report("topology")
    for x in cat.objects:
        if not cs.is_cover(maximal_sieve(cat, x)):
            rep.violations.append(f"identity: maximal sieve on {x} is not covering")
    for a in cat.objects:
        for r in cs.covering(a):
            for x in cat.objects:
                for v in cat.hom_elements(x, a):
                    if not cs.is_cover(pullback_sieve(r, v, x)):
                        rep.violations.append(
                            f"pullback: covering sieve {_fmt(r)} on {a} pulled back along {v.tolist()}: {x}->{a} "
                            f"is not covering")
                        break
    for a in cat.objects:
        for r in all_sieves(cat, a):
            if cs.is_cover(r):
                continue
            for s in cs.covering(a):
                if _locally_covers(cs, r, s):
                    rep.violations.append(f"glueing: {_fmt(r)} on {a} is not covering but every pullback along "
                                          f"the covering sieve {_fmt(s)} covers")
                    break
    return rep


def _locally_covers(cs: CoverSystem, r: Sieve, s: Sieve) -> bool:
    """Whether ``t^* R`` covers for every element ``t`` of every slice of ``S``."""
    for x in cs.cat.objects:
        for t in slice_elements(s, x):
            if not cs.is_cover(pullback_sieve(r, t, x)):
                return False
    return True


def _fmt(s: Sieve) -> str:
    return "<" + ",".join(f"{x}:{s.slices[x].tolist()}" for x in s.cat.objects) + ">"


def saturate(cs: CoverSystem) -> CoverSystem:
    """Smallest topology containing ``cs`` (least fixed point of the axioms)."""
    cat = cs.cat
    cur = {x: dict(cs.covers[x]) for x in cat.objects}
    changed = True
    while changed:
        changed = False
        tmp = CoverSystem(cat, {x: list(cur[x].values()) for x in cat.objects})
        for x in cat.objects:
            m = maximal_sieve(cat, x)
            if m.key not in cur[x]:
                cur[x][m.key] = m
                changed = True
        for a in cat.objects:
            for r in list(cur[a].values()):
                for x in cat.objects:
                    for v in cat.hom_elements(x, a):
                        q = pullback_sieve(r, v, x)
                        if q.key not in cur[x]:
                            cur[x][q.key] = q
                            changed = True
        tmp = CoverSystem(cat, {x: list(cur[x].values()) for x in cat.objects})
        for a in cat.objects:
            for r in all_sieves(cat, a):
                if r.key in cur[a]:
                    continue
                if any(_locally_covers(tmp, r, s) for s in tmp.covering(a)):
                    cur[a][r.key] = r
                    changed = True
    return CoverSystem(cat, {x: list(cur[x].values()) for x in cat.objects})


def random_cover_system(cat: LinearCategory, rng, density=0.4) -> CoverSystem:
    """Random subsets of the sieves on each object."""
    out = {}
    for x in cat.objects:
        sv = all_sieves(cat, x)
        keep = rng.random(len(sv)) < density
        out[x] = [s for s, k in zip(sv, keep) if k]
    return CoverSystem(cat, out)


class Site:
    """A linear category together with a checked topology."""

    def __init__(self, cat: LinearCategory, topology: CoverSystem | None = None, name=None, check=True):
        self.cat = cat
        self.topology = topology if topology is not None else trivial_topology(cat)
        self.name = name or cat.name
        if self.topology.cat is not cat:
            raise TopologyError("cover system lives on a different category")
        if check:
            rep = check_topology(self.topology)
            if not rep.ok:
                raise TopologyError(str(rep))

    def __repr__(self):
        return f"Site({self.name!r}, {self.topology})"

    @property
    def p(self):
        return self.cat.p

    def covering(self, x):
        return self.topology.covering(x)

    def is_cover(self, s: Sieve) -> bool:
        return self.topology.is_cover(s)


def is_subcanonical(site: Site):
    """Whether every representable is a sheaf; returns ``(verdict, witness)``."""
    from .presheaf import representable
    from .sheafify import is_sheaf

    for a in site.cat.objects:
        ok, wit = is_sheaf(representable(site.cat, a), site)
        if not ok:
            return False, wit
    return True, None


# --- full subcategories of sheaf categories -----------------------------------

class SheafSubcategory:
    """Full subcategory of sheaves on ``ambient`` spanned by ``sheaves``.

    Morphisms are coordinate vectors in the basis of ``hom_presheaves``.
    """

    def __init__(self, ambient: Site, sheaves, names=None, name="C", check_sheaves=True):
        from .sheafify import is_sheaf

        self.ambient = ambient
        self.sheaves = list(sheaves)
        self.names = list(names) if names is not None else [f"S{i}" for i in range(len(self.sheaves))]
        if len(set(self.names)) != len(self.names):
            raise ValueError("object names must be distinct")
        if check_sheaves:
            for n, s in zip(self.names, self.sheaves):
                ok, wit = is_sheaf(s, ambient)
                if not ok:
                    raise TopologyError(f"object {n} is not a sheaf (fails at {wit})")
        self.index = {n: s for n, s in zip(self.names, self.sheaves)}
        self.homs = {(x, y): _hom_cached(self.index[x], self.index[y]) for x in self.names for y in self.names}
        p = ambient.p
        dims = {k: h.dim for k, h in self.homs.items()}
        comp = {}
        for x, y, z in itertools.product(self.names, repeat=3):
            hxy, hyz, hxz = self.homs[(x, y)], self.homs[(y, z)], self.homs[(x, z)]
            t = np.zeros((hyz.dim, hxy.dim, hxz.dim), dtype=np.int64)
            if t.size:
                bxy, byz = hxy.basis, hyz.basis
                vecs = np.array([[compose(g, f).vector() for f in bxy] for g in byz], dtype=np.int64)
                flat = vecs.reshape(-1, vecs.shape[-1]).T
                t = hxz.coords_of_vectors(flat).T.reshape(hyz.dim, hxy.dim, hxz.dim)
            comp[(x, y, z)] = t
        ident = {x: self.homs[(x, x)].coords(_identity_of(self.index[x])) for x in self.names}
        self.cat = LinearCategory(self.names, dims, comp, ident, p, name=name)

    def realize(self, v, x, y) -> PresheafMorphism:
        return self.homs[(x, y)].element(v, name=f"{x}->{y}")

    def coords(self, phi: PresheafMorphism, x, y) -> np.ndarray:
        return self.homs[(x, y)].coords(phi)

    def sieve_image(self, r: Sieve) -> tuple[Presheaf, PresheafMorphism]:
        """Joint image of the sieve's generators as a subpresheaf of its base."""
        from .presheaf import subpresheaf

        base = self.index[r.base]
        p = self.ambient.p
        cols = {b: [] for b in self.ambient.cat.objects}
        for x, row in r.generators():
            phi = self.realize(row, x, r.base)
            for b in cols:
                cols[b].append(phi.comps[b])
        bases = {b: ea.image_basis(np.hstack(c) if c else ea.zeros(base.dims[b], 0), p) for b, c in cols.items()}
        return subpresheaf(base, bases, name="im")


def _identity_of(f: Presheaf) -> PresheafMorphism:
    from .presheaf import identity_morphism

    return identity_morphism(f)


@dataclass
class EpiTopology:
    sub: SheafSubcategory
    topology: CoverSystem
    report: Report
    jointly_epi: dict = field(default_factory=dict)

    @property
    def cat(self) -> LinearCategory:
        return self.sub.cat

    def site(self, check=False) -> Site:
        return Site(self.cat, self.topology, name=self.cat.name, check=check)


def epi_cover_system(ambient: Site, sheaves, names=None, name="C") -> EpiTopology:
    """Cover system on the full subcategory spanned by ``sheaves``: a sieve covers
    when it and all its pullbacks are jointly epimorphic in sheaves."""
    from .sheafify import is_locally_zero

    sub = SheafSubcategory(ambient, sheaves, names=names, name=name)
    cat = sub.cat
    epi = {}

    def jointly_epi(r: Sieve) -> bool:
        if r.key not in epi:
            base = sub.index[r.base]
            _, inc = sub.sieve_image(r)
            q, _ = quotient(base, inc.comps)
            epi[r.key] = is_locally_zero(q, ambient)
        return epi[r.key]

    covers = {}
    for a in cat.objects:
        covers[a] = []
        for r in all_sieves(cat, a):
            if not jointly_epi(r):
                continue
            ok = True
            for y in cat.objects:
                for c in cat.hom_elements(y, a):
                    if not jointly_epi(pullback_sieve(r, c, y)):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                covers[a].append(r)
    cs = CoverSystem(cat, covers)
    return EpiTopology(sub, cs, check_topology(cs), epi)
