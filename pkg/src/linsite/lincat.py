"""Finite F_p-linear categories, linear functors and natural transformations.

Hom-spaces are stored by dimension.  Composition is a bilinear map given on
basis pairs: ``comp[(X, Y, Z)]`` has shape ``(d(Y,Z), d(X,Y), d(X,Z))`` and
``comp[(X, Y, Z)][i, j]`` is the coordinate vector of ``g_i o f_j``.
Morphisms are coordinate vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import exactalg as ea


class BoundaryError(ValueError):
    """Raised when 1- or 2-cells do not compose."""


@dataclass
class Report:
    """Outcome of a validation: empty ``violations`` means pass."""

    subject: str
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return f"{self.subject}: pass"
        return f"{self.subject}: FAIL\n" + "\n".join("  " + v for v in self.violations)


class LinearCategory:
    def __init__(self, objects, dims, comp, ident, p, names=None, name="C"):
        self.objects = list(objects)
        self.p = ea.PrimeField(p).p
        self.dims = {(x, y): int(dims[(x, y)]) for x in self.objects for y in self.objects}
        self.comp = {k: ea.reduce(v, p) for k, v in comp.items()}
        self.ident = {x: ea.reduce(ident[x], p) for x in self.objects}
        self.names = names or {}
        self.name = name
        self._pre = {}
        self._post = {}
        for x, y, z in itertools.product(self.objects, repeat=3):
            shape = (self.d(y, z), self.d(x, y), self.d(x, z))
            if self.comp[(x, y, z)].shape != shape:
                raise ValueError(f"composition table for {(x, y, z)} has shape "
                                 f"{self.comp[(x, y, z)].shape}, expected {shape}")

    def __repr__(self):
        return f"LinearCategory({self.name!r}, objects={self.objects})"

    def d(self, x, y) -> int:
        return self.dims[(x, y)]

    def hom_basis(self, x, y):
        return list(ea.identity(self.d(x, y)))

    def hom_elements(self, x, y):
        return ea.all_vectors(self.d(x, y), self.p)

    def compose(self, g, f, x, y, z) -> np.ndarray:
        """``g o f`` for ``f: x -> y`` and ``g: y -> z``."""
        t = self.comp[(x, y, z)]
        if t.size == 0:
            return np.zeros(self.d(x, z), dtype=np.int64)
        return np.einsum("i,j,ijk->k", np.asarray(g) % self.p, np.asarray(f) % self.p, t) % self.p

    def precompose_matrix(self, b, xp, x, a) -> np.ndarray:
        """Matrix of ``g -> g o b`` from hom(x, a) to hom(xp, a), for ``b: xp -> x``."""
        t = self.comp[(xp, x, a)]
        if t.size == 0:
            return ea.zeros(self.d(xp, a), self.d(x, a))
        return np.einsum("j,ijk->ki", np.asarray(b) % self.p, t) % self.p

    def postcompose_matrix(self, a, x, y, w) -> np.ndarray:
        """Matrix of ``f -> a o f`` from hom(w, x) to hom(w, y), for ``a: x -> y``."""
        t = self.comp[(w, x, y)]
        if t.size == 0:
            return ea.zeros(self.d(w, y), self.d(w, x))
        return np.einsum("i,ijk->kj", np.asarray(a) % self.p, t) % self.p

    def basis_precompose(self, j, xp, x, a):
        key = (j, xp, x, a)
        if key not in self._pre:
            self._pre[key] = self.comp[(xp, x, a)][:, j, :].T.copy()
        return self._pre[key]

    def identity(self, x) -> np.ndarray:
        return self.ident[x].copy()

    def is_iso(self, f, x, y) -> np.ndarray | None:
        """Return the inverse of ``f: x -> y`` or ``None``."""
        # g o f = id_x and f o g = id_y, linear in g
        m1 = self.precompose_matrix(f, x, y, x)
        m2 = self.postcompose_matrix(f, x, y, y)
        a = np.vstack([m1, m2])
        b = np.concatenate([self.ident[x], self.ident[y]])
        g, _ = ea.solve_linear(a, b, self.p)
        return g

    def validate(self) -> Report:
        return validate_category(self)


def validate_category(c: LinearCategory) -> Report:
    rep = Report(f"category {c.name}")
    p = c.p
    for x, y in itertools.product(c.objects, repeat=2):
        n = c.d(x, y)
        for j in range(n):
            f = np.zeros(n, dtype=np.int64)
            f[j] = 1
            if np.any(c.compose(c.ident[y], f, x, y, y) != f):
                rep.violations.append(f"identity: id_{y} o {c.names.get((x, y, j), j)} != itself in hom({x},{y})")
            if np.any(c.compose(f, c.ident[x], x, x, y) != f):
                rep.violations.append(f"identity: {c.names.get((x, y, j), j)} o id_{x} != itself in hom({x},{y})")
    for w, x, y, z in itertools.product(c.objects, repeat=4):
        t1, t2, t3 = c.comp[(w, x, y)], c.comp[(x, y, z)], c.comp[(w, x, z)]
        t4 = c.comp[(w, y, z)]
        if c.d(w, x) == 0 or c.d(x, y) == 0 or c.d(y, z) == 0:
            continue
        # h o (g o f) versus (h o g) o f on basis triples
        left = np.einsum("jil,klm->kjim", t1, t4) % p  # (g,f) -> gf, then h o gf
        right = np.einsum("kjl,lim->kjim", t2, t3) % p
        bad = np.argwhere(np.any(left != right, axis=3))
        for k, j, i in bad[:5]:
            rep.violations.append(f"associativity fails on basis triple (h{k}, g{j}, f{i}) over {w}->{x}->{y}->{z}")
    return rep


class LinearFunctor:
    """``fobj`` maps objects; ``fmap[(X, Y)]`` is a ``d_tgt(fX, fY) x d_src(X, Y)`` matrix."""

    def __init__(self, source: LinearCategory, target: LinearCategory, fobj, fmap, name="f"):
        self.source = source
        self.target = target
        self.fobj = dict(fobj)
        self.name = name
        p = target.p
        self.fmap = {}
        for x, y in itertools.product(source.objects, repeat=2):
            m = ea.reduce(fmap[(x, y)], p).reshape(target.d(self.fobj[x], self.fobj[y]), source.d(x, y))
            self.fmap[(x, y)] = m

    def __repr__(self):
        return f"LinearFunctor({self.name!r}: {self.source.name} -> {self.target.name})"

    def __call__(self, x):
        return self.fobj[x]

    def on_hom(self, a, x, y) -> np.ndarray:
        return ea.matmul(self.fmap[(x, y)], np.asarray(a) % self.target.p, self.target.p)

    def validate(self) -> Report:
        return validate_functor(self)

    def __eq__(self, other):
        if not isinstance(other, LinearFunctor):
            return NotImplemented
        return (self.source is other.source and self.target is other.target
                and self.fobj == other.fobj
                and all(np.array_equal(self.fmap[k], other.fmap[k]) for k in self.fmap))

    __hash__ = object.__hash__


def validate_functor(f: LinearFunctor) -> Report:
    rep = Report(f"functor {f.name}")
    a, b = f.source, f.target
    for x in a.objects:
        if f.fobj.get(x) not in b.objects:
            rep.violations.append(f"object {x} is sent outside the target")
    if not rep.ok:
        return rep
    for x in a.objects:
        if np.any(f.on_hom(a.ident[x], x, x) != b.ident[f(x)]):
            rep.violations.append(f"identity not preserved at {x}")
    for x, y, z in itertools.product(a.objects, repeat=3):
        for i in range(a.d(y, z)):
            for j in range(a.d(x, y)):
                g = np.eye(a.d(y, z), dtype=np.int64)[i]
                h = np.eye(a.d(x, y), dtype=np.int64)[j]
                lhs = f.on_hom(a.compose(g, h, x, y, z), x, z)
                rhs = b.compose(f.on_hom(g, y, z), f.on_hom(h, x, y), f(x), f(y), f(z))
                if np.any(lhs != rhs):
                    rep.violations.append(f"composition not preserved on basis pair ({i}, {j}) over {x}->{y}->{z}")
    return rep


def identity_functor(c: LinearCategory, name=None) -> LinearFunctor:
    return LinearFunctor(c, c, {x: x for x in c.objects},
                         {(x, y): ea.identity(c.d(x, y)) for x in c.objects for y in c.objects},
                         name=name or f"id_{c.name}")


def compose_functors(g: LinearFunctor, f: LinearFunctor, name=None) -> LinearFunctor:
    if f.target is not g.source:
        raise BoundaryError(f"cannot compose {g.name} after {f.name}")
    a = f.source
    fmap = {(x, y): ea.matmul(g.fmap[(f(x), f(y))], f.fmap[(x, y)], a.p)
            for x in a.objects for y in a.objects}
    return LinearFunctor(a, g.target, {x: g(f(x)) for x in a.objects}, fmap,
                         name=name or f"{g.name}.{f.name}")


class NatTransform:
    """A natural transformation ``source => target`` between parallel functors.

    ``components[A]`` is a vector of hom_tgt(source(A), target(A)).  Naturality
    is checked on construction unless ``check=False``.
    """

    def __init__(self, source: LinearFunctor, target: LinearFunctor, components, name="alpha", check=True):
        if source.source is not target.source or source.target is not target.target:
            raise BoundaryError("natural transformation between non-parallel functors")
        self.source = source
        self.target = target
        self.name = name
        c = source.target
        self.components = {x: ea.reduce(components[x], c.p) for x in source.source.objects}
        if check:
            bad = naturality_failures(self)
            if bad:
                raise ValueError(f"{name} is not natural: " + "; ".join(bad[:3]))

    def __repr__(self):
        return f"NatTransform({self.name!r}: {self.source.name} => {self.target.name})"

    def __getitem__(self, x):
        return self.components[x]

    def __eq__(self, other):
        if not isinstance(other, NatTransform):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and all(np.array_equal(self.components[x], other.components[x]) for x in self.components))

    __hash__ = object.__hash__

    def is_invertible(self) -> bool:
        c = self.source.target
        return all(c.is_iso(self.components[x], self.source(x), self.target(x)) is not None
                   for x in self.components)

    def inverse(self) -> NatTransform:
        c = self.source.target
        comps = {}
        for x, v in self.components.items():
            inv = c.is_iso(v, self.source(x), self.target(x))
            if inv is None:
                raise ValueError(f"component at {x} is not invertible")
            comps[x] = inv
        return NatTransform(self.target, self.source, comps, name=f"{self.name}^-1")


def naturality_failures(alpha: NatTransform) -> list[str]:
    f, g = alpha.source, alpha.target
    a, c = f.source, f.target
    out = []
    for x, y in itertools.product(a.objects, repeat=2):
        for j in range(a.d(x, y)):
            e = np.eye(a.d(x, y), dtype=np.int64)[j]
            lhs = c.compose(g.on_hom(e, x, y), alpha[x], f(x), g(x), g(y))
            rhs = c.compose(alpha[y], f.on_hom(e, x, y), f(x), f(y), g(y))
            if np.any(lhs != rhs):
                out.append(f"square fails at basis morphism {j} of hom({x},{y})")
    return out


def identity_transform(f: LinearFunctor) -> NatTransform:
    return NatTransform(f, f, {x: f.target.ident[f(x)] for x in f.source.objects}, name=f"id_{f.name}")


def vertical_compose(beta: NatTransform, alpha: NatTransform) -> NatTransform:
    """``beta . alpha`` with components ``beta_A o alpha_A``."""
    if not alpha.target == beta.source:
        raise BoundaryError("vertical composition: target of alpha differs from source of beta")
    f, g, h = alpha.source, alpha.target, beta.target
    c = f.target
    comps = {x: c.compose(beta[x], alpha[x], f(x), g(x), h(x)) for x in f.source.objects}
    return NatTransform(f, h, comps, name=f"{beta.name}.{alpha.name}")


def whisker(alpha: NatTransform, functor: LinearFunctor, side: str) -> NatTransform:
    """``side='right'`` gives ``alpha o F`` (precompose); ``'left'`` gives ``F o alpha``."""
    if side == "right":
        if functor.target is not alpha.source.source:
            raise BoundaryError("right whiskering: functor does not land in the domain of alpha")
        comps = {x: alpha[functor(x)] for x in functor.source.objects}
        return NatTransform(compose_functors(alpha.source, functor), compose_functors(alpha.target, functor),
                            comps, name=f"{alpha.name}.{functor.name}")
    if side == "left":
        if alpha.source.target is not functor.source:
            raise BoundaryError("left whiskering: alpha does not land in the domain of the functor")
        f, g = alpha.source, alpha.target
        comps = {x: functor.on_hom(alpha[x], f(x), g(x)) for x in f.source.objects}
        return NatTransform(compose_functors(functor, f), compose_functors(functor, g), comps,
                            name=f"{functor.name}.{alpha.name}")
    raise ValueError("side must be 'left' or 'right'")


def horizontal_compose(beta: NatTransform, alpha: NatTransform) -> NatTransform:
    """For ``alpha: f => f'`` and ``beta: g => g'`` returns ``beta o alpha: g f => g' f'``."""
    f, fp = alpha.source, alpha.target
    g, gp = beta.source, beta.target
    if f.target is not g.source:
        raise BoundaryError("horizontal composition: boundaries do not match")
    c = g.target
    comps = {x: c.compose(beta[fp(x)], g.on_hom(alpha[x], f(x), fp(x)), g(f(x)), g(fp(x)), gp(fp(x)))
             for x in f.source.objects}
    return NatTransform(compose_functors(g, f), compose_functors(gp, fp), comps,
                        name=f"{beta.name}*{alpha.name}")


# --- constructors -------------------------------------------------------------

def algebra_category(structure, unit, p, basis_names=None, name="End", obj="*") -> LinearCategory:
    """One-object category from an algebra: ``structure[i][j]`` = coords of ``e_i e_j``."""
    t = ea.reduce(structure, p)
    n = t.shape[0]
    names = {(obj, obj, j): basis_names[j] for j in range(n)} if basis_names else {}
    return LinearCategory([obj], {(obj, obj): n}, {(obj, obj, obj): t}, {obj: unit}, p,
                          names=names, name=name)


def matrix_category(sizes: dict, p: int, name="Mat") -> LinearCategory:
    """Full subcategory of F_p-vector spaces on spaces of the given sizes.

    hom(X, Y) = (size Y) x (size X) matrices with elementary-matrix basis in
    row-major order; composition is matrix multiplication.
    """
    objs = list(sizes)
    dims = {(x, y): sizes[x] * sizes[y] for x in objs for y in objs}
    comp = {}
    for x, y, z in itertools.product(objs, repeat=3):
        nx, ny, nz = sizes[x], sizes[y], sizes[z]
        t = np.zeros((ny * nz, nx * ny, nx * nz), dtype=np.int64)
        for gi in range(ny * nz):
            gr, gc = divmod(gi, ny)  # g is nz x ny
            for fi in range(nx * ny):
                fr, fc = divmod(fi, nx)  # f is ny x nx
                if gc == fr:
                    t[gi, fi, gr * nx + fc] = 1
        comp[(x, y, z)] = t
    ident = {x: np.eye(sizes[x], dtype=np.int64).reshape(-1) for x in objs}
    return LinearCategory(objs, dims, comp, ident, p, name=name)


def full_subcategory(c: LinearCategory, objects, name=None) -> tuple[LinearCategory, LinearFunctor]:
    objs = list(objects)
    sub = LinearCategory(objs, {(x, y): c.d(x, y) for x in objs for y in objs},
                         {(x, y, z): c.comp[(x, y, z)] for x in objs for y in objs for z in objs},
                         {x: c.ident[x] for x in objs}, c.p, names=c.names, name=name or f"{c.name}|{objs}")
    inc = LinearFunctor(sub, c, {x: x for x in objs},
                        {(x, y): ea.identity(c.d(x, y)) for x in objs for y in objs},
                        name=f"incl_{sub.name}")
    return sub, inc


def conjugated_functor(f: LinearFunctor, theta: dict, name=None) -> tuple[LinearFunctor, NatTransform]:
    """Twist ``f`` by invertible ``theta[A]: fA -> fA``: ``v(a) = theta_A'^{-1} f(a) theta_A``.

    Returns ``(v, alpha)`` with ``alpha: v => f`` having components ``theta``.
    """
    c = f.target
    a = f.source
    inv = {x: c.is_iso(theta[x], f(x), f(x)) for x in a.objects}
    for x, t in inv.items():
        if t is None:
            raise ValueError(f"twist at {x} is not invertible")
    fmap = {}
    for x, y in itertools.product(a.objects, repeat=2):
        cols = []
        for j in range(a.d(x, y)):
            e = np.eye(a.d(x, y), dtype=np.int64)[j]
            m = f.on_hom(e, x, y)
            m = c.compose(m, theta[x], f(x), f(x), f(y))
            m = c.compose(inv[y], m, f(x), f(y), f(y))
            cols.append(m)
        fmap[(x, y)] = np.array(cols, dtype=np.int64).T.reshape(c.d(f(x), f(y)), a.d(x, y))
    v = LinearFunctor(a, c, f.fobj, fmap, name=name or f"{f.name}~")
    alpha = NatTransform(v, f, {x: theta[x] for x in a.objects}, name=f"twist({f.name})")
    return v, alpha
