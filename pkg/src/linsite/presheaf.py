"""Presheaves (A-modules), their morphisms, sieves and Kan extensions.

A presheaf ``F`` on a linear category stores a dimension ``F.dims[X]`` per
object and, for each basis morphism ``a_j: X -> Y``, the action matrix
``F.act[(X, Y)][j]`` of shape ``(dims[X], dims[Y])`` (contravariant).
"""

from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from . import exactalg as ea
from .lincat import BoundaryError, LinearCategory, LinearFunctor, Report


class Presheaf:
    def __init__(self, cat: LinearCategory, dims, act, name="F", check=True):
        self.cat = cat
        self.p = cat.p
        self.dims = {x: int(dims[x]) for x in cat.objects}
        self.name = name
        self.act = {}
        for x, y in itertools.product(cat.objects, repeat=2):
            shape = (cat.d(x, y), self.dims[x], self.dims[y])
            a = act.get((x, y)) if act else None
            self.act[(x, y)] = ea.reduce(np.zeros(shape) if a is None else np.asarray(a).reshape(shape), cat.p)
        if check:
            rep = self.validate()
            if not rep.ok:
                raise ValueError(str(rep))

    def __repr__(self):
        return f"Presheaf({self.name!r}, dims={self.dims})"

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def action(self, a, x, y) -> np.ndarray:
        """``F(a): F(y) -> F(x)`` for a general element ``a`` of hom(x, y)."""
        t = self.act[(x, y)]
        if t.size == 0:
            return ea.zeros(self.dims[x], self.dims[y])
        return np.einsum("j,jab->ab", np.asarray(a) % self.p, t) % self.p

    def validate(self) -> Report:
        rep = Report(f"presheaf {self.name}")
        c, p = self.cat, self.p
        for x in c.objects:
            if np.any(self.action(c.ident[x], x, x) != ea.identity(self.dims[x])):
                rep.violations.append(f"F(id_{x}) is not the identity")
        for x, y, z in itertools.product(c.objects, repeat=3):
            t = c.comp[(x, y, z)]
            if t.size == 0 or self.dims[x] == 0 or self.dims[z] == 0:
                continue
            # F(g o f) = F(f) F(g)  for f: x -> y (j), g: y -> z (i)
            lhs = np.einsum("ijk,kab->ijab", t, self.act[(x, z)]) % p
            rhs = np.einsum("jac,icb->ijab", self.act[(x, y)], self.act[(y, z)]) % p
            bad = np.argwhere(np.any(lhs != rhs, axis=(2, 3)))
            for i, j in bad[:3]:
                rep.violations.append(f"F(g{i} o f{j}) != F(f{j}) F(g{i}) over {x}->{y}->{z}")
        return rep

    def element_vectors(self, x):
        return ea.all_vectors(self.dims[x], self.p)


class PresheafMorphism:
    """``comps[X]`` is a ``target.dims[X] x source.dims[X]`` matrix."""

    def __init__(self, source: Presheaf, target: Presheaf, comps, name="phi", check=True):
        if source.cat is not target.cat:
            raise BoundaryError("presheaf morphism between different categories")
        self.source = source
        self.target = target
        self.name = name
        p = source.p
        self.comps = {x: ea.reduce(np.asarray(comps[x]).reshape(target.dims[x], source.dims[x]), p)
                      for x in source.cat.objects}
        if check:
            bad = self.naturality_failures()
            if bad:
                raise ValueError(f"{name} is not natural: " + "; ".join(bad[:3]))

    def __repr__(self):
        return f"PresheafMorphism({self.name!r}: {self.source.name} -> {self.target.name})"

    def __getitem__(self, x):
        return self.comps[x]

    @property
    def cat(self):
        return self.source.cat

    def naturality_failures(self) -> list[str]:
        out = []
        f, g, p = self.source, self.target, self.source.p
        for x, y in itertools.product(self.cat.objects, repeat=2):
            if self.cat.d(x, y) == 0:
                continue
            lhs = np.einsum("ab,jbc->jac", self.comps[x], f.act[(x, y)]) % p
            rhs = np.einsum("jab,bc->jac", g.act[(x, y)], self.comps[y]) % p
            bad = np.argwhere(np.any(lhs != rhs, axis=(1, 2)))
            for (j,) in bad[:2]:
                out.append(f"naturality fails at basis morphism {j} of hom({x},{y})")
        return out

    def vector(self) -> np.ndarray:
        return np.concatenate([self.comps[x].reshape(-1) for x in self.cat.objects]) \
            if self.cat.objects else np.zeros(0, dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, PresheafMorphism):
            return NotImplemented
        return (self.source is other.source and self.target is other.target
                and all(np.array_equal(self.comps[x], other.comps[x]) for x in self.comps))

    __hash__ = object.__hash__

    def then(self, other: PresheafMorphism) -> PresheafMorphism:
        """``other o self``."""
        return compose(other, self)

    def __add__(self, other):
        _same_boundary(self, other)
        return PresheafMorphism(self.source, self.target,
                                {x: self.comps[x] + other.comps[x] for x in self.comps},
                                name=f"{self.name}+{other.name}", check=False)

    def scale(self, c: int) -> PresheafMorphism:
        return PresheafMorphism(self.source, self.target, {x: c * m for x, m in self.comps.items()},
                                name=f"{c}{self.name}", check=False)

    def is_zero(self) -> bool:
        return all(not np.any(m) for m in self.comps.values())

    def is_iso(self) -> bool:
        return all(ea.is_invertible(m, self.source.p) for m in self.comps.values())

    def inverse(self) -> PresheafMorphism:
        comps = {}
        for x, m in self.comps.items():
            if not ea.is_invertible(m, self.source.p):
                raise ValueError(f"{self.name} is not invertible at {x}")
            comps[x] = ea.inverse(m, self.source.p)
        return PresheafMorphism(self.target, self.source, comps, name=f"{self.name}^-1", check=False)


def _same_boundary(a: PresheafMorphism, b: PresheafMorphism):
    if a.source is not b.source or a.target is not b.target:
        raise BoundaryError(f"{a.name} and {b.name} are not parallel")


def compose(psi: PresheafMorphism, phi: PresheafMorphism, name=None) -> PresheafMorphism:
    """``psi o phi``."""
    if phi.target is not psi.source:
        raise BoundaryError(f"cannot compose {psi.name} after {phi.name}")
    p = phi.source.p
    return PresheafMorphism(phi.source, psi.target,
                            {x: ea.matmul(psi.comps[x], phi.comps[x], p) for x in phi.comps},
                            name=name or f"{psi.name}.{phi.name}", check=False)


def compose_all(*morphisms) -> PresheafMorphism:
    """``m1 o m2 o ... o mk`` (rightmost applied first)."""
    out = morphisms[-1]
    for m in reversed(morphisms[:-1]):
        out = compose(m, out)
    return out


def identity_morphism(f: Presheaf) -> PresheafMorphism:
    return PresheafMorphism(f, f, {x: ea.identity(f.dims[x]) for x in f.cat.objects},
                            name=f"id_{f.name}", check=False)


def zero_morphism(f: Presheaf, g: Presheaf) -> PresheafMorphism:
    return PresheafMorphism(f, g, {x: ea.zeros(g.dims[x], f.dims[x]) for x in f.cat.objects},
                            name="0", check=False)


def zero_presheaf(cat: LinearCategory, name="0") -> Presheaf:
    return Presheaf(cat, {x: 0 for x in cat.objects}, {}, name=name, check=False)


class HomSpace:
    """The space of natural transformations ``F -> G`` with an explicit basis."""

    def __init__(self, source: Presheaf, target: Presheaf):
        if source.cat is not target.cat:
            raise BoundaryError("hom between presheaves on different categories")
        self.source, self.target = source, target
        cat, p = source.cat, source.p
        objs = cat.objects
        sizes = [target.dims[x] * source.dims[x] for x in objs]
        offs = dict(zip(objs, np.cumsum([0] + sizes[:-1]).tolist()))
        self.offsets, self.sizes = offs, dict(zip(objs, sizes))
        n = sum(sizes)
        rows = []
        for x, y in itertools.product(objs, repeat=2):
            gx, fy = target.dims[x], source.dims[y]
            if cat.d(x, y) == 0 or gx * fy == 0:
                continue
            for j in range(cat.d(x, y)):
                block = np.zeros((gx * fy, n), dtype=np.int64)
                fa, ga = source.act[(x, y)][j], target.act[(x, y)][j]
                block[:, offs[x]:offs[x] + self.sizes[x]] += np.kron(ea.identity(gx), fa.T)
                block[:, offs[y]:offs[y] + self.sizes[y]] -= np.kron(ga, ea.identity(fy))
                rows.append(block % p)
        system = np.vstack(rows) if rows else np.zeros((0, n), dtype=np.int64)
        self.matrix = ea.kernel_basis(system, p)
        self._coords = ea.Coordinates(self.matrix, p)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def element(self, coeffs, name="phi", check=False) -> PresheafMorphism:
        v = ea.matmul(self.matrix, np.asarray(coeffs, dtype=np.int64), self.source.p)
        return self.from_vector(v, name=name, check=check)

    def from_vector(self, v, name="phi", check=False) -> PresheafMorphism:
        comps = {x: v[self.offsets[x]:self.offsets[x] + self.sizes[x]]
                 .reshape(self.target.dims[x], self.source.dims[x]) for x in self.source.cat.objects}
        return PresheafMorphism(self.source, self.target, comps, name=name, check=check)

    @cached_property
    def basis(self) -> list[PresheafMorphism]:
        return [self.element(np.eye(self.dim, dtype=np.int64)[i], name=f"b{i}") for i in range(self.dim)]

    def coords(self, phi: PresheafMorphism) -> np.ndarray:
        return self._coords.coords(phi.vector())

    def coords_of_vectors(self, vs) -> np.ndarray:
        """Coordinates for a matrix whose columns are flattened morphisms."""
        return self._coords.coords(vs)


def hom_presheaves(f: Presheaf, g: Presheaf) -> HomSpace:
    return HomSpace(f, g)


def _hom_cached(f: Presheaf, g: Presheaf) -> HomSpace:
    cache = f.__dict__.setdefault("_homcache", {})
    key = id(g)
    if key not in cache:
        cache[key] = (g, HomSpace(f, g))
    return cache[key][1]


def isomorphism(f: Presheaf, g: Presheaf, rng=None, tries=64, exhaustive_limit=1 << 14):
    """An invertible natural transformation ``f -> g``, or ``None``."""
    if f.dims != g.dims:
        return None
    h = _hom_cached(f, g)
    if f.total_dim == 0:
        return zero_morphism(f, g)
    rng = rng if rng is not None else np.random.default_rng(0)
    p = f.p
    for _ in range(tries):
        phi = h.element(rng.integers(0, p, size=h.dim))
        if phi.is_iso():
            return phi
    if p ** h.dim <= exhaustive_limit:
        for c in ea.all_vectors(h.dim, p):
            phi = h.element(c)
            if phi.is_iso():
                return phi
    return None


def is_isomorphic(f: Presheaf, g: Presheaf, rng=None) -> bool:
    return isomorphism(f, g, rng=rng) is not None


# --- representables and Yoneda --------------------------------------------------

def representable(cat: LinearCategory, a) -> Presheaf:
    """``h_a = hom(-, a)`` with action by precomposition."""
    if a not in cat.objects:
        raise KeyError(f"unknown object {a!r}")
    cache = cat.__dict__.setdefault("_representables", {})
    if a not in cache:
        dims = {x: cat.d(x, a) for x in cat.objects}
        act = {(x, y): np.transpose(cat.comp[(x, y, a)], (1, 2, 0)) for x in cat.objects for y in cat.objects}
        cache[a] = Presheaf(cat, dims, act, name=f"h_{a}", check=False)
    return cache[a]


def yoneda_element(f: Presheaf, a, x) -> PresheafMorphism:
    """The morphism ``h_a -> F`` sending ``id_a`` to ``x in F(a)``."""
    cat = f.cat
    h = representable(cat, a)
    x = np.asarray(x, dtype=np.int64)
    comps = {}
    for y in cat.objects:
        t = f.act[(y, a)]
        comps[y] = (np.einsum("jab,b->aj", t, x) % f.p) if t.size else ea.zeros(f.dims[y], cat.d(y, a))
    return PresheafMorphism(h, f, comps, name=f"y({x.tolist()})", check=False)


def yoneda_map(cat: LinearCategory, a, x, y) -> PresheafMorphism:
    """``h_x -> h_y`` given by postcomposition with ``a: x -> y``."""
    hx, hy = representable(cat, x), representable(cat, y)
    comps = {w: cat.postcompose_matrix(a, x, y, w) for w in cat.objects}
    return PresheafMorphism(hx, hy, comps, name=f"h({a})", check=False)


# --- sub- and quotient presheaves ----------------------------------------------------

def subpresheaf(f: Presheaf, bases, name="S") -> tuple[Presheaf, PresheafMorphism]:
    """Subpresheaf spanned by column bases ``bases[X]``; raises if not stable."""
    cat, p = f.cat, f.p
    b = {x: _as_cols(bases[x], f.dims[x]) for x in cat.objects}
    coords = {x: ea.Coordinates(b[x], p) for x in cat.objects}
    act = {}
    for x, y in itertools.product(cat.objects, repeat=2):
        mats = []
        for j in range(cat.d(x, y)):
            img = ea.matmul(f.act[(x, y)][j], b[y], p)
            try:
                mats.append(coords[x].coords(img))
            except ValueError:
                raise ValueError(f"subspaces are not stable under basis morphism {j} of hom({x},{y})") from None
        act[(x, y)] = np.array(mats, dtype=np.int64).reshape(cat.d(x, y), b[x].shape[1], b[y].shape[1])
    s = Presheaf(cat, {x: b[x].shape[1] for x in cat.objects}, act, name=name, check=False)
    return s, PresheafMorphism(s, f, b, name=f"incl_{name}", check=False)


def quotient(f: Presheaf, bases, name="Q") -> tuple[Presheaf, PresheafMorphism]:
    """Quotient by the (stable) subspaces spanned by ``bases[X]``."""
    cat, p = f.cat, f.p
    q, s = {}, {}
    for x in cat.objects:
        sub = _as_cols(bases[x], f.dims[x])
        _, q[x] = ea.image_and_quotient(sub, p)
        s[x] = ea.section(q[x], p)
    act = {}
    for x, y in itertools.product(cat.objects, repeat=2):
        t = f.act[(x, y)]
        act[(x, y)] = np.array([ea.matmul(ea.matmul(q[x], t[j], p), s[y], p) for j in range(cat.d(x, y))],
                               dtype=np.int64).reshape(cat.d(x, y), q[x].shape[0], q[y].shape[0])
    out = Presheaf(cat, {x: q[x].shape[0] for x in cat.objects}, act, name=name, check=False)
    return out, PresheafMorphism(f, out, q, name=f"proj_{name}", check=False)


def kernel(phi: PresheafMorphism) -> tuple[Presheaf, PresheafMorphism]:
    p = phi.source.p
    return subpresheaf(phi.source, {x: ea.kernel_basis(m, p) for x, m in phi.comps.items()},
                       name=f"ker({phi.name})")


def image(phi: PresheafMorphism) -> tuple[Presheaf, PresheafMorphism]:
    p = phi.source.p
    return subpresheaf(phi.target, {x: ea.image_basis(m, p) for x, m in phi.comps.items()},
                       name=f"im({phi.name})")


def cokernel(phi: PresheafMorphism) -> tuple[Presheaf, PresheafMorphism]:
    return quotient(phi.target, phi.comps, name=f"coker({phi.name})")


def direct_sum(parts, name=None):
    """Returns ``(S, injections, projections)``."""
    parts = list(parts)
    cat = parts[0].cat
    dims = {x: sum(f.dims[x] for f in parts) for x in cat.objects}
    act = {}
    for x, y in itertools.product(cat.objects, repeat=2):
        t = np.zeros((cat.d(x, y), dims[x], dims[y]), dtype=np.int64)
        ox = oy = 0
        for f in parts:
            t[:, ox:ox + f.dims[x], oy:oy + f.dims[y]] = f.act[(x, y)]
            ox += f.dims[x]
            oy += f.dims[y]
        act[(x, y)] = t
    s = Presheaf(cat, dims, act, name=name or "+".join(f.name for f in parts), check=False)
    inj, proj = [], []
    offs = {x: 0 for x in cat.objects}
    for f in parts:
        i_c, p_c = {}, {}
        for x in cat.objects:
            m = np.zeros((dims[x], f.dims[x]), dtype=np.int64)
            m[offs[x]:offs[x] + f.dims[x]] = ea.identity(f.dims[x])
            i_c[x], p_c[x] = m, m.T.copy()
            offs[x] += f.dims[x]
        inj.append(PresheafMorphism(f, s, i_c, name=f"i_{f.name}", check=False))
        proj.append(PresheafMorphism(s, f, p_c, name=f"p_{f.name}", check=False))
    return s, inj, proj


def morphism_from_sum(s_and_inj, morphisms, target: Presheaf) -> PresheafMorphism:
    """The map ``(m_1, ..., m_k): F_1 + ... + F_k -> target``."""
    s, inj, _ = s_and_inj
    comps = {x: np.hstack([m.comps[x] for m in morphisms]) if morphisms else ea.zeros(target.dims[x], 0)
             for x in s.cat.objects}
    return PresheafMorphism(s, target, comps, name="(" + ",".join(m.name for m in morphisms) + ")")


def factor_through_mono(phi: PresheafMorphism, mono: PresheafMorphism) -> PresheafMorphism:
    """The unique ``psi`` with ``mono o psi = phi`` (raises if ``phi`` does not factor)."""
    p = phi.source.p
    comps = {}
    for x in phi.cat.objects:
        c = ea.Coordinates(mono.comps[x], p)
        comps[x] = c.coords(phi.comps[x])
    return PresheafMorphism(phi.source, mono.source, comps, name=f"{phi.name}|", check=False)


# --- sieves ----------------------------------------------------------------------------

def _as_rows(m, d) -> np.ndarray:
    if m is None:
        return ea.zeros(0, d)
    m = np.asarray(m, dtype=np.int64)
    return m.reshape(-1, d) if d else ea.zeros(m.shape[0] if m.ndim == 2 else 0, 0)


def _as_cols(m, d) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    if d == 0:
        return ea.zeros(0, m.shape[1] if m.ndim == 2 else 0)
    return m.reshape(d, -1)


class Sieve:
    """A subpresheaf of ``h_base``; ``slices[X]`` is the RREF row basis of R(X) in hom(X, base)."""

    def __init__(self, cat: LinearCategory, base, slices, check=False):
        self.cat = cat
        self.base = base
        self.slices = {x: ea.row_space(_as_rows(slices.get(x), cat.d(x, base)), cat.p, cat.d(x, base))
                       for x in cat.objects}
        self.key = (base,) + tuple(self.slices[x].tobytes() + bytes([self.slices[x].shape[0]])
                                   for x in cat.objects)
        self._presheaf = None
        if check:
            rep = self.validate()
            if not rep.ok:
                raise ValueError(str(rep))

    def __repr__(self):
        return f"Sieve(on {self.base}, dims={self.dims})"

    @property
    def dims(self):
        return {x: s.shape[0] for x, s in self.slices.items()}

    def __eq__(self, other):
        return isinstance(other, Sieve) and self.cat is other.cat and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def is_maximal(self) -> bool:
        return all(self.slices[x].shape[0] == self.cat.d(x, self.base) for x in self.cat.objects)

    def is_zero(self) -> bool:
        return all(s.shape[0] == 0 for s in self.slices.values())

    def __le__(self, other: Sieve) -> bool:
        p = self.cat.p
        return self.base == other.base and all(
            ea.subspace_contains(other.slices[x], self.slices[x], p) for x in self.cat.objects)

    def __and__(self, other: Sieve) -> Sieve:
        p = self.cat.p
        return Sieve(self.cat, self.base, {x: ea.subspace_intersection(self.slices[x], other.slices[x], p)
                                           for x in self.cat.objects})

    def __or__(self, other: Sieve) -> Sieve:
        p = self.cat.p
        return Sieve(self.cat, self.base, {x: ea.subspace_sum(self.slices[x], other.slices[x], p)
                                           for x in self.cat.objects})

    def contains(self, x, r) -> bool:
        return ea.subspace_contains(self.slices[x], np.asarray(r) % self.cat.p, self.cat.p)

    def generators(self):
        """``(X, r)`` pairs spanning the sieve slicewise."""
        return [(x, row) for x in self.cat.objects for row in self.slices[x]]

    def validate(self) -> Report:
        rep = Report(f"sieve on {self.base}")
        cat = self.cat
        for x, xp in itertools.product(cat.objects, repeat=2):
            for j in range(cat.d(xp, x)):
                pre = cat.basis_precompose(j, xp, x, self.base)
                for r in self.slices[x]:
                    if not self.contains(xp, ea.matmul(pre, r, cat.p)):
                        rep.violations.append(f"r o b{j} leaves the sieve ({xp} -> {x} -> {self.base})")
        return rep

    @property
    def presheaf(self) -> Presheaf:
        if self._presheaf is None:
            h = representable(self.cat, self.base)
            s, inc = subpresheaf(h, {x: self.slices[x].T for x in self.cat.objects}, name=f"R[{self.base}]")
            self._presheaf, self._inclusion = s, inc
        return self._presheaf

    @property
    def inclusion(self) -> PresheafMorphism:
        self.presheaf
        return self._inclusion


def intern_sieve(s: Sieve) -> Sieve:
    """Canonical instance of ``s`` per category, so lazily built data is shared."""
    table = s.cat.__dict__.setdefault("_sieve_table", {})
    return table.setdefault(s.key, s)


def maximal_sieve(cat: LinearCategory, a) -> Sieve:
    cache = cat.__dict__.setdefault("_maximal_sieves", {})
    if a not in cache:
        cache[a] = intern_sieve(Sieve(cat, a, {x: ea.identity(cat.d(x, a)) for x in cat.objects}))
    return cache[a]


def zero_sieve(cat: LinearCategory, a) -> Sieve:
    return intern_sieve(Sieve(cat, a, {}))


def sieve_generated(cat: LinearCategory, a, family) -> Sieve:
    """Smallest sieve on ``a`` containing each ``(X, r)`` with ``r: X -> a``."""
    rows = {x: [] for x in cat.objects}
    for x, r in family:
        if x not in cat.objects or len(r) != cat.d(x, a):
            raise BoundaryError(f"morphism from {x} does not land in hom({x},{a})")
        for y in cat.objects:
            # r o hom(y, x)
            t = cat.comp[(y, x, a)]
            if t.size:
                rows[y].append(np.einsum("i,ijk->jk", np.asarray(r) % cat.p, t) % cat.p)
    return intern_sieve(Sieve(cat, a, {y: np.vstack(rows[y]) if rows[y] else ea.zeros(0, cat.d(y, a))
                                       for y in cat.objects}))


def pullback_sieve(r: Sieve, a, x) -> Sieve:
    """``a^* R`` for ``a: x -> R.base``: slice at y is ``{b | a o b in R(y)}``."""
    cat = r.cat
    if len(a) != cat.d(x, r.base):
        raise BoundaryError("pullback along a morphism with the wrong codomain")
    if r.is_maximal():
        return maximal_sieve(cat, x)
    return intern_sieve(Sieve(cat, x, {y: ea.preimage(cat.postcompose_matrix(a, x, r.base, y), r.slices[y], cat.p)
                                       for y in cat.objects}))


def image_sieve(f: LinearFunctor, r: Sieve) -> Sieve:
    """``<f(R)>``: the sieve on ``f(R.base)`` generated by the images of R's generators."""
    fam = [(f(x), f.on_hom(v, x, r.base)) for x, v in r.generators()]
    return sieve_generated(f.target, f(r.base), fam)


def sieve_map(small: Sieve, big: Sieve) -> PresheafMorphism:
    """Inclusion ``small -> big`` of sieves on one object."""
    return factor_through_mono(small.inclusion, big.inclusion)


def pullback_map(r: Sieve, a, x, pulled: Sieve | None = None) -> PresheafMorphism:
    """The map ``a^*R -> R``, ``b -> a o b``."""
    pulled = pulled if pulled is not None else pullback_sieve(r, a, x)
    via = compose(yoneda_map(r.cat, a, x, r.base), pulled.inclusion)
    return factor_through_mono(via, r.inclusion)


def all_sieves(cat: LinearCategory, a) -> list[Sieve]:
    """Every sieve on ``a`` (as sums of principal sieves), zero first."""
    cache = cat.__dict__.setdefault("_all_sieves", {})
    if a in cache:
        return cache[a]
    principal = {}
    for x in cat.objects:
        for v in cat.hom_elements(x, a):
            if np.any(v):
                s = sieve_generated(cat, a, [(x, v)])
                principal.setdefault(s.key, s)
    found = {}
    z = zero_sieve(cat, a)
    found[z.key] = z
    frontier = [z]
    while frontier:
        nxt = []
        for s in frontier:
            for q in principal.values():
                t = s | q
                if t.key not in found:
                    found[t.key] = t
                    nxt.append(t)
        frontier = nxt
    out = sorted((intern_sieve(s) for s in found.values()), key=lambda s: sum(s.dims.values()))
    cache[a] = out
    return out


# --- functoriality along linear functors ---------------------------------------------

def restrict_along(f: LinearFunctor, g: Presheaf) -> Presheaf:
    """``f^* G = G o f``."""
    if g.cat is not f.target:
        raise BoundaryError("presheaf does not live on the target of the functor")
    a = f.source
    act = {}
    for x, y in itertools.product(a.objects, repeat=2):
        m = f.fmap[(x, y)]  # d_tgt x d_src
        t = g.act[(f(x), f(y))]
        act[(x, y)] = (np.einsum("kj,kab->jab", m, t) % a.p) if t.size and m.size else \
            np.zeros((a.d(x, y), g.dims[f(x)], g.dims[f(y)]), dtype=np.int64)
    return Presheaf(a, {x: g.dims[f(x)] for x in a.objects}, act, name=f"{f.name}*{g.name}", check=False)


def restrict_morphism(f: LinearFunctor, phi: PresheafMorphism, src=None, tgt=None) -> PresheafMorphism:
    src = src if src is not None else restrict_along(f, phi.source)
    tgt = tgt if tgt is not None else restrict_along(f, phi.target)
    return PresheafMorphism(src, tgt, {x: phi.comps[f(x)] for x in f.source.objects},
                            name=f"{f.name}*{phi.name}", check=False)


class Coend:
    """``T(B) = coend^A G(A) (x) Phi(A)(B)`` for a presheaf ``G`` on A and a
    functor ``Phi: A -> Mod(B)``.

    ``phi[A]`` is a presheaf on B and ``phimap[(A, A')][j]`` the presheaf
    morphism ``Phi(a_j): phi[A] -> phi[A']``.  Elements of ``T(B)`` are
    represented in the sum ``(+)_A G(A) (x) phi[A](B)`` (Kronecker order) and
    projected by ``q[B]``; ``s[B]`` is a section of ``q[B]``.
    """

    def __init__(self, g: Presheaf, bcat: LinearCategory, phi, phimap, name="T"):
        self.g, self.bcat, self.phi, self.phimap = g, bcat, phi, phimap
        acat, p = g.cat, g.p
        self.q, self.s, self.offsets, self.blocksize = {}, {}, {}, {}
        for b in bcat.objects:
            offs, o = {}, 0
            for a in acat.objects:
                offs[a] = o
                o += g.dims[a] * phi[a].dims[b]
            self.offsets[b], self.blocksize[b] = offs, o
            rels = []
            for a, a2 in itertools.product(acat.objects, repeat=2):
                ga2, pa, pa2 = g.dims[a2], phi[a].dims[b], phi[a2].dims[b]
                if acat.d(a, a2) == 0 or ga2 * pa == 0:
                    continue
                for j in range(acat.d(a, a2)):
                    r = np.zeros((o, ga2 * pa), dtype=np.int64)
                    r[offs[a]:offs[a] + g.dims[a] * pa] += np.kron(g.act[(a, a2)][j], ea.identity(pa))
                    r[offs[a2]:offs[a2] + ga2 * pa2] -= np.kron(ea.identity(ga2), phimap[(a, a2)][j].comps[b])
                    rels.append(r % p)
            rel = np.hstack(rels) if rels else ea.zeros(o, 0)
            _, self.q[b] = ea.image_and_quotient(rel, p)
            self.s[b] = ea.section(self.q[b], p)
        act = {}
        for b2, b in itertools.product(bcat.objects, repeat=2):
            mats = []
            for k in range(bcat.d(b2, b)):
                d = np.zeros((self.blocksize[b2], self.blocksize[b]), dtype=np.int64)
                for a in acat.objects:
                    m = np.kron(ea.identity(g.dims[a]), phi[a].act[(b2, b)][k])
                    d[self.offsets[b2][a]:self.offsets[b2][a] + m.shape[0],
                      self.offsets[b][a]:self.offsets[b][a] + m.shape[1]] = m
                mats.append(ea.matmul(ea.matmul(self.q[b2], d, p), self.s[b], p))
            act[(b2, b)] = np.array(mats, dtype=np.int64).reshape(bcat.d(b2, b), self.q[b2].shape[0],
                                                                  self.q[b].shape[0])
        self.presheaf = Presheaf(bcat, {b: self.q[b].shape[0] for b in bcat.objects}, act, name=name,
                                 check=False)

    def block(self, b, a) -> np.ndarray:
        """Projection of the summand ``G(a) (x) phi[a](b)`` into ``T(b)``."""
        o = self.offsets[b][a]
        return self.q[b][:, o:o + self.g.dims[a] * self.phi[a].dims[b]]

    def _blockdiag(self, other, b, mats):
        d = np.zeros((other.blocksize[b], self.blocksize[b]), dtype=np.int64)
        for a, m in mats.items():
            d[other.offsets[b][a]:other.offsets[b][a] + m.shape[0],
              self.offsets[b][a]:self.offsets[b][a] + m.shape[1]] = m
        return d

    def map_left(self, other: Coend, rho: PresheafMorphism) -> PresheafMorphism:
        """Induced map for ``rho: G -> G'`` (same Phi)."""
        p = self.g.p
        comps = {}
        for b in self.bcat.objects:
            mats = {a: np.kron(rho.comps[a], ea.identity(self.phi[a].dims[b])) for a in self.g.cat.objects}
            comps[b] = ea.matmul(ea.matmul(other.q[b], self._blockdiag(other, b, mats), p), self.s[b], p)
        return PresheafMorphism(self.presheaf, other.presheaf, comps, name=f"T({rho.name})", check=False)

    def map_right(self, other: Coend, tau) -> PresheafMorphism:
        """Induced map for a natural family ``tau[A]: phi[A] -> phi'[A]`` (same G)."""
        p = self.g.p
        comps = {}
        for b in self.bcat.objects:
            mats = {a: np.kron(ea.identity(self.g.dims[a]), tau[a].comps[b]) for a in self.g.cat.objects}
            comps[b] = ea.matmul(ea.matmul(other.q[b], self._blockdiag(other, b, mats), p), self.s[b], p)
        return PresheafMorphism(self.presheaf, other.presheaf, comps, name="T(tau)", check=False)


def representable_bimodule(f: LinearFunctor):
    """``A -> Mod(B)``, ``A -> h_{f(A)}``, the bimodule whose coend is ``f_!``."""
    a, b = f.source, f.target
    phi = {x: representable(b, f(x)) for x in a.objects}
    phimap = {(x, y): [yoneda_map(b, f.fmap[(x, y)][:, j], f(x), f(y)) for j in range(a.d(x, y))]
              for x in a.objects for y in a.objects}
    return phi, phimap


class LeftKan(Coend):
    """``f_! F`` computed as a coend of representables."""

    def __init__(self, f: LinearFunctor, g: Presheaf):
        if g.cat is not f.source:
            raise BoundaryError("presheaf does not live on the source of the functor")
        self.functor = f
        phi, phimap = representable_bimodule(f)
        super().__init__(g, f.target, phi, phimap, name=f"{f.name}_!{g.name}")

    def unit(self, restricted: Presheaf | None = None) -> PresheafMorphism:
        """``F -> f^* f_! F``, ``x -> [x (x) id_{fA}]``."""
        f, g = self.functor, self.g
        restricted = restricted if restricted is not None else restrict_along(f, self.presheaf)
        comps = {}
        for a in f.source.objects:
            fa = f(a)
            ident = f.target.ident[fa].reshape(-1, 1)
            comps[a] = ea.matmul(self.block(fa, a), np.kron(ea.identity(g.dims[a]), ident), g.p)
        return PresheafMorphism(g, restricted, comps, name=f"unit_{g.name}", check=False)

    def counit_for(self, target: Presheaf) -> PresheafMorphism:
        """For ``F = f^* G`` given as this coend's input: ``f_! f^* G -> G``, ``[x (x) y] -> G(y) x``."""
        f, p = self.functor, target.p
        comps = {}
        for b in f.target.objects:
            rep = np.zeros((target.dims[b], self.blocksize[b]), dtype=np.int64)
            for a in f.source.objects:
                t = target.act[(b, f(a))]  # (d(b, fa), G(b), G(fa))
                ga, dy = target.dims[f(a)], f.target.d(b, f(a))
                if ga * dy == 0:
                    continue
                m = np.einsum("kri->rik", t).reshape(target.dims[b], ga * dy)
                o = self.offsets[b][a]
                rep[:, o:o + ga * dy] = m
            comps[b] = ea.matmul(rep, self.s[b], p)
        return PresheafMorphism(self.presheaf, target, comps, name="counit", check=False)

    def map_to(self, other: LeftKan, rho: PresheafMorphism) -> PresheafMorphism:
        return self.map_left(other, rho)


def left_kan(f: LinearFunctor, g: Presheaf) -> LeftKan:
    return LeftKan(f, g)


class RightKan:
    """``f_* F(B) = end_A hom(hom(fA, B), F(A))`` computed as a kernel."""

    def __init__(self, f: LinearFunctor, g: Presheaf):
        if g.cat is not f.source:
            raise BoundaryError("presheaf does not live on the source of the functor")
        self.functor, self.g = f, g
        a_cat, b_cat, p = f.source, f.target, g.p
        self.offsets, self.blocksize, self.k, self.coords = {}, {}, {}, {}
        for b in b_cat.objects:
            offs, o = {}, 0
            for a in a_cat.objects:
                offs[a] = o
                o += g.dims[a] * b_cat.d(f(a), b)
            self.offsets[b], self.blocksize[b] = offs, o
            rows = []
            for a, a2 in itertools.product(a_cat.objects, repeat=2):
                ga, da2 = g.dims[a], b_cat.d(f(a2), b)
                if a_cat.d(a, a2) == 0 or ga * da2 == 0:
                    continue
                for j in range(a_cat.d(a, a2)):
                    fa_j = f.fmap[(a, a2)][:, j]
                    pre = b_cat.precompose_matrix(fa_j, f(a), f(a2), b)  # d(fa,b) x d(fa2,b)
                    r = np.zeros((ga * da2, o), dtype=np.int64)
                    r[:, offs[a]:offs[a] + ga * b_cat.d(f(a), b)] += np.kron(ea.identity(ga), pre.T)
                    r[:, offs[a2]:offs[a2] + g.dims[a2] * da2] -= np.kron(g.act[(a, a2)][j], ea.identity(da2))
                    rows.append(r % p)
            system = np.vstack(rows) if rows else ea.zeros(0, o)
            self.k[b] = ea.kernel_basis(system, p)
            self.coords[b] = ea.Coordinates(self.k[b], p)
        act = {}
        for b2, b in itertools.product(b_cat.objects, repeat=2):
            mats = []
            for kk in range(b_cat.d(b2, b)):
                e = np.eye(b_cat.d(b2, b), dtype=np.int64)[kk]
                d = np.zeros((self.blocksize[b2], self.blocksize[b]), dtype=np.int64)
                for a in a_cat.objects:
                    post = b_cat.postcompose_matrix(e, b2, b, f(a))  # d(fa,b) x d(fa,b2)
                    m = np.kron(ea.identity(g.dims[a]), post.T)
                    d[self.offsets[b2][a]:self.offsets[b2][a] + m.shape[0],
                      self.offsets[b][a]:self.offsets[b][a] + m.shape[1]] = m
                mats.append(self.coords[b2].coords(ea.matmul(d, self.k[b], p)))
            act[(b2, b)] = np.array(mats, dtype=np.int64).reshape(b_cat.d(b2, b), self.k[b2].shape[1],
                                                                  self.k[b].shape[1])
        self.presheaf = Presheaf(b_cat, {b: self.k[b].shape[1] for b in b_cat.objects}, act,
                                 name=f"{f.name}_*{g.name}", check=False)

    def counit(self, restricted: Presheaf | None = None) -> PresheafMorphism:
        """``f^* f_* F -> F``, ``theta -> theta_A(id_{fA})``."""
        f, g, p = self.functor, self.g, self.g.p
        restricted = restricted if restricted is not None else restrict_along(f, self.presheaf)
        comps = {}
        for a in f.source.objects:
            fa = f(a)
            ident = f.target.ident[fa].reshape(1, -1)
            o = self.offsets[fa][a]
            n = g.dims[a] * f.target.d(fa, fa)
            ext = np.kron(ea.identity(g.dims[a]), ident)
            comps[a] = ea.matmul(ext, self.k[fa][o:o + n], p)
        return PresheafMorphism(restricted, g, comps, name="counit", check=False)

    def unit_for(self, source: Presheaf) -> PresheafMorphism:
        """For ``F = f^* G``: ``G -> f_* f^* G``, ``x -> (y -> G(y) x)``."""
        f, p = self.functor, source.p
        comps = {}
        for b in f.target.objects:
            v = np.zeros((self.blocksize[b], source.dims[b]), dtype=np.int64)
            for a in f.source.objects:
                t = source.act[(f(a), b)]  # (d(fa,b), G(fa), G(b))
                ga, dy = source.dims[f(a)], f.target.d(f(a), b)
                if ga * dy == 0:
                    continue
                o = self.offsets[b][a]
                v[o:o + ga * dy] = np.einsum("kri->rki", t).reshape(ga * dy, source.dims[b])
            comps[b] = self.coords[b].coords(v)
        return PresheafMorphism(source, self.presheaf, comps, name="unit", check=False)

    def map_to(self, other: RightKan, rho: PresheafMorphism) -> PresheafMorphism:
        f, p = self.functor, self.g.p
        comps = {}
        for b in f.target.objects:
            d = np.zeros((other.blocksize[b], self.blocksize[b]), dtype=np.int64)
            for a in f.source.objects:
                m = np.kron(rho.comps[a], ea.identity(f.target.d(f(a), b)))
                d[other.offsets[b][a]:other.offsets[b][a] + m.shape[0],
                  self.offsets[b][a]:self.offsets[b][a] + m.shape[1]] = m
            comps[b] = other.coords[b].coords(ea.matmul(d, self.k[b], p))
        return PresheafMorphism(self.presheaf, other.presheaf, comps, name=f"{f.name}_*({rho.name})",
                                check=False)


def right_kan(f: LinearFunctor, g: Presheaf) -> RightKan:
    return RightKan(f, g)


# --- random presheaves ------------------------------------------------------------------

def random_presheaf(cat: LinearCategory, rng, max_generators=2, max_relations=2, name="R") -> Presheaf:
    """Cokernel of a random map between small sums of representables."""
    objs = cat.objects
    gens = [objs[i] for i in rng.integers(0, len(objs), size=int(rng.integers(1, max_generators + 1)))]
    rels = [objs[i] for i in rng.integers(0, len(objs), size=int(rng.integers(0, max_relations + 1)))]
    target = direct_sum([representable(cat, g) for g in gens])
    if not rels:
        out, _ = quotient(target[0], {x: ea.zeros(target[0].dims[x], 0) for x in objs}, name=name)
        return out
    source = direct_sum([representable(cat, r) for r in rels])
    blocks = []
    for r in rels:
        col = []
        for g in gens:
            y = rng.integers(0, cat.p, size=cat.d(r, g))
            col.append(yoneda_map(cat, y, r, g))
        comps = {x: np.vstack([m.comps[x] for m in col]) for x in objs}
        blocks.append(PresheafMorphism(representable(cat, r), target[0], comps, check=False))
    phi = morphism_from_sum(source, blocks, target[0])
    out, _ = quotient(target[0], phi.comps, name=name)
    return out
