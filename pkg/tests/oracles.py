"""Brute-force reference computations used to derive expected values.

Everything here works with explicit sets of vectors (tuples) and exhaustive
enumeration; nothing calls the package's elimination routines.
"""

from __future__ import annotations

import itertools

import numpy as np


def vectors(n, p):
    return [tuple(v) for v in itertools.product(range(p), repeat=n)]


def apply(m, v, p):
    m = np.asarray(m, dtype=np.int64).reshape(-1, len(v)) if len(v) else np.zeros((np.shape(m)[0], 0), dtype=np.int64)
    return tuple(int(x) % p for x in m @ np.asarray(v, dtype=np.int64)) if m.shape[0] else ()


def image_set(m, p):
    m = np.asarray(m, dtype=np.int64)
    return {apply(m, v, p) for v in vectors(m.shape[1], p)}


def rank(m, p):
    size = len(image_set(m, p))
    r = 0
    while p ** r < size:
        r += 1
    return r


def solutions(a, b, p):
    a = np.asarray(a, dtype=np.int64)
    target = tuple(int(x) % p for x in b)
    return {v for v in vectors(a.shape[1], p) if apply(a, v, p) == target}


def span(vecs, n, p):
    """All linear combinations of ``vecs`` in ``F_p^n``, grown one vector at a time."""
    out = {tuple([0] * n)}
    for v in vecs:
        v = tuple(int(x) % p for x in v)
        if v in out:
            continue
        out = {tuple((a + c * b) % p for a, b in zip(s, v)) for s in out for c in range(p)}
    return frozenset(out)


def subspaces(n, p):
    """Every subspace of ``F_p^n`` as a frozenset of vectors."""
    found = {frozenset([tuple([0] * n)])}
    frontier = list(found)
    allv = vectors(n, p)
    while frontier:
        nxt = []
        for s in frontier:
            for v in allv:
                if v not in s:
                    t = span(list(s) + [v], n, p)
                    if t not in found:
                        found.add(t)
                        nxt.append(t)
        frontier = nxt
    return found


def compose(cat, g, f, x, y, z):
    p = cat.p
    t = cat.comp[(x, y, z)]
    out = [0] * cat.d(x, z)
    for i, gi in enumerate(g):
        for j, fj in enumerate(f):
            if gi and fj:
                for k in range(cat.d(x, z)):
                    out[k] = (out[k] + gi * fj * int(t[i, j, k])) % p
    return tuple(out)


def is_sieve(cat, a, slices) -> bool:
    for x, y in itertools.product(cat.objects, repeat=2):
        for r in slices[x]:
            for b in vectors(cat.d(y, x), cat.p):
                if compose(cat, r, b, y, x, a) not in slices[y]:
                    return False
    return True


def sieves(cat, a):
    """All sieves on ``a`` as dicts ``object -> frozenset of morphisms``."""
    choices = [sorted(subspaces(cat.d(x, a), cat.p), key=len) for x in cat.objects]
    out = []
    for combo in itertools.product(*choices):
        slices = dict(zip(cat.objects, combo))
        if is_sieve(cat, a, slices):
            out.append(slices)
    return out


def pullback(cat, slices, a, v, x):
    return {y: frozenset(b for b in vectors(cat.d(y, x), cat.p) if compose(cat, v, b, y, x, a) in slices[y])
            for y in cat.objects}


def key(slices, objects):
    return tuple(slices[x] for x in objects)


def topology_axioms(cat, covers) -> dict:
    """``covers[a]`` is a set of sieve keys; returns which axioms hold."""
    p = cat.p
    maximal = {a: {x: frozenset(vectors(cat.d(x, a), p)) for x in cat.objects} for a in cat.objects}
    ident = all(key(maximal[a], cat.objects) in covers[a] for a in cat.objects)
    all_s = {a: sieves(cat, a) for a in cat.objects}
    cov = {a: [s for s in all_s[a] if key(s, cat.objects) in covers[a]] for a in cat.objects}
    pull = all(key(pullback(cat, s, a, v, x), cat.objects) in covers[x]
               for a in cat.objects for s in cov[a] for x in cat.objects for v in vectors(cat.d(x, a), p))
    glue = True
    for a in cat.objects:
        for r in all_s[a]:
            if key(r, cat.objects) in covers[a]:
                continue
            for s in cov[a]:
                if all(key(pullback(cat, r, a, t, x), cat.objects) in covers[x]
                       for x in cat.objects for t in s[x]):
                    glue = False
    return {"identity": ident, "pullback": pull, "glueing": glue}


def linear_maps(m, n, p):
    """Every ``m x n`` matrix over F_p."""
    for entries in itertools.product(range(p), repeat=m * n):
        yield np.array(entries, dtype=np.int64).reshape(m, n)


def natural_maps(f, g):
    """Every natural transformation between tiny presheaves, by enumeration."""
    cat, p = f.cat, f.p
    per = [list(linear_maps(g.dims[x], f.dims[x], p)) for x in cat.objects]
    out = []
    for combo in itertools.product(*per):
        comps = dict(zip(cat.objects, combo))
        ok = True
        for x, y in itertools.product(cat.objects, repeat=2):
            for j in range(cat.d(x, y)):
                # contravariant: act[(x, y)][j] maps F(y) -> F(x)
                lhs = comps[x] @ f.act[(x, y)][j] % p
                rhs = g.act[(x, y)][j] @ comps[y] % p
                if np.any(lhs != rhs):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(comps)
    return out


def sheaf_condition(f, site) -> bool:
    """Every matching family on every covering sieve has exactly one amalgamation.

    A matching family on ``R`` is a natural map ``R -> F``; an amalgamation is
    an ``x`` in ``F(a)`` with ``F(r) x`` equal to the family's value on ``r``.
    """
    cat, p = f.cat, f.p
    for a in cat.objects:
        for r in site.covering(a):
            sub = r.presheaf
            fams = natural_maps(sub, f)
            inc = r.inclusion
            for fam in fams:
                count = 0
                for xv in vectors(f.dims[a], p):
                    ok = True
                    for x in cat.objects:
                        for k in range(sub.dims[x]):
                            rv = inc.comps[x][:, k]
                            val = np.zeros(f.dims[x], dtype=np.int64)
                            for j, c in enumerate(rv):
                                if c:
                                    val = (val + c * (f.act[(x, a)][j] @ np.array(xv, dtype=np.int64))) % p
                            if np.any(val != fam[x][:, k] % p):
                                ok = False
                                break
                        if not ok:
                            break
                    count += ok
                if count != 1:
                    return False
    return True


def apply_functor(f, v, x, y):
    """Image of the morphism ``v: x -> y`` under ``f``, as a tuple."""
    return apply(f.fmap[(x, y)], v, f.source.p)


def generated(cat, a, family):
    """Sieve on ``a`` generated by ``(x, r)`` pairs, closed by enumeration."""
    p = cat.p
    out = {}
    for y in cat.objects:
        vecs = [compose(cat, r, b, y, x, a) for x, r in family for b in vectors(cat.d(y, x), p)]
        out[y] = span(vecs, cat.d(y, a), p)
    return out


def covers(site, a, slices):
    cat = site.cat
    k = key(slices, cat.objects)
    return any(key({x: span(list(map(tuple, s.slices[x])), cat.d(x, a), cat.p) for x in cat.objects},
                   cat.objects) == k for s in site.covering(a))


def sieve_sets(site, a):
    return sieves(site.cat, a)


def lc_conditions(f, src, tgt) -> dict:
    """G, F, FF, preimage equality and cocontinuity decided by enumeration."""
    a_cat, b_cat, p = src.cat, tgt.cat, src.cat.p
    out = {}
    out["G"] = all(covers(tgt, c, generated(b_cat, c, [(f(a), e) for a in a_cat.objects
                                                          for e in vectors(b_cat.d(f(a), c), p)]))
                   for c in b_cat.objects)
    ok = True
    for a, a2 in itertools.product(a_cat.objects, repeat=2):
        for c in vectors(b_cat.d(f(a), f(a2)), p):
            sl = {}
            for x in a_cat.objects:
                reach = {apply_functor(f, y, x, a2) for y in vectors(a_cat.d(x, a2), p)}
                sl[x] = frozenset(v for v in vectors(a_cat.d(x, a), p)
                                  if compose(b_cat, c, apply_functor(f, v, x, a), f(x), f(a), f(a2)) in reach)
            ok = ok and covers(src, a, sl)
    out["F"] = ok
    ok = True
    for a, a2 in itertools.product(a_cat.objects, repeat=2):
        for v in vectors(a_cat.d(a, a2), p):
            if any(v) and not any(apply_functor(f, v, a, a2)):
                zero = tuple([0] * a_cat.d(a, a2))
                sl = {y: frozenset(b for b in vectors(a_cat.d(y, a), p) if compose(a_cat, v, b, y, a, a2) == zero)
                      for y in a_cat.objects}
                ok = ok and covers(src, a, sl)
    out["FF"] = ok
    ok = True
    for a in a_cat.objects:
        for s in sieves(a_cat, a):
            fam = [(f(x), apply_functor(f, r, x, a)) for x in a_cat.objects for r in s[x]]
            ok = ok and covers(src, a, s) == covers(tgt, f(a), generated(b_cat, f(a), fam))
    out["preimage"] = ok
    ok = True
    for a in a_cat.objects:
        images = []
        for s in sieves(a_cat, a):
            if covers(src, a, s):
                fam = [(f(x), apply_functor(f, r, x, a)) for x in a_cat.objects for r in s[x]]
                images.append(generated(b_cat, f(a), fam))
        for r in sieves(b_cat, f(a)):
            if covers(tgt, f(a), r) and not any(all(im[x] <= r[x] for x in b_cat.objects) for im in images):
                ok = False
    out["cocontinuous"] = ok
    return out
