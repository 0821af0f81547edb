import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from linsite import fixtures as fx
from linsite.presheaf import (Presheaf, _as_rows, all_sieves, cokernel, compose, direct_sum, hom_presheaves, image,
                              identity_morphism, isomorphism, kernel, maximal_sieve, pullback_sieve,
                              random_presheaf, representable, restrict_along, sieve_generated, yoneda_element,
                              zero_sieve)
from linsite.sitemorph import SiteMorphism

SMALL = [fx.fix_p(), fx.fix_e(), fx.fix_dg()[0], fx.fix_dg()[1], fx.fix_p3(), fx.fix_e(3)]


def as_sets(s):
    cat = s.cat
    return {x: oracles.span(list(map(tuple, s.slices[x])), cat.d(x, s.base), cat.p) for x in cat.objects}


@pytest.mark.parametrize("site", SMALL, ids=lambda s: s.name)
def test_sieve_enumeration_matches_brute_force(site):
    cat = site.cat
    for a in cat.objects:
        ours = {oracles.key(as_sets(s), cat.objects) for s in all_sieves(cat, a)}
        theirs = {oracles.key(s, cat.objects) for s in oracles.sieves(cat, a)}
        assert ours == theirs


def test_sieve_counts():
    # F_2 x F_2 has four ideals; F_3 x F_3 too; a field has two
    assert len(all_sieves(fx.fix_e().cat, "*")) == 4
    assert len(all_sieves(fx.fix_e(3).cat, "*")) == 4
    assert len(all_sieves(fx.fix_p3().cat, "*")) == 2
    # sieves on v in FIX-DG.B are the subspaces of F_2^2 (h_v is two copies of h_u)
    b = fx.fix_dg()[1].cat
    assert len(all_sieves(b, "u")) == 2 and len(all_sieves(b, "v")) == 5


@pytest.mark.parametrize("site", SMALL, ids=lambda s: s.name)
def test_pullback_and_lattice_operations_match_sets(site):
    cat = site.cat
    for a in cat.objects:
        sv = all_sieves(cat, a)
        for r in sv:
            for x in cat.objects:
                for v in cat.hom_elements(x, a):
                    got = as_sets(pullback_sieve(r, v, x))
                    assert got == oracles.pullback(cat, as_sets(r), a, tuple(v), x)
            for s in sv:
                meet, join = as_sets(r & s), as_sets(r | s)
                rs, ss = as_sets(r), as_sets(s)
                assert all(meet[x] == rs[x] & ss[x] for x in cat.objects)
                assert all(join[x] == oracles.span(list(rs[x] | ss[x]), cat.d(x, a), cat.p) for x in cat.objects)
                assert (r <= s) == all(rs[x] <= ss[x] for x in cat.objects)


def test_named_sieves_on_fix_e():
    cat = fx.fix_e().cat
    e1 = fx.e1_sieve(cat)
    assert e1.dims == {"*": 1} and e1.contains("*", fx.E1) and not e1.contains("*", fx.E2)
    assert (e1 | fx.e2_sieve(cat)) == maximal_sieve(cat, "*")
    assert (e1 & fx.e2_sieve(cat)) == zero_sieve(cat, "*")
    assert sieve_generated(cat, "*", [("*", [1, 1])]).is_maximal()


@pytest.mark.parametrize("site", SMALL, ids=lambda s: s.name)
def test_representables_are_valid(site):
    for a in site.cat.objects:
        h = representable(site.cat, a)
        assert h.validate().ok
        assert h.dims == {x: site.cat.d(x, a) for x in site.cat.objects}


def test_hom_dimension_matches_enumeration_of_natural_maps():
    e = fx.fix_e().cat
    rng = np.random.default_rng(3)
    cases = [(fx.module_e(1), fx.module_e(1)), (fx.module_e(1), fx.module_e(2)),
             (representable(e, "*"), fx.module_e(2)), (representable(e, "*"), representable(e, "*"))]
    cases += [(random_presheaf(e, rng, 1, 1), random_presheaf(e, rng, 1, 1)) for _ in range(4)]
    for f, g in cases:
        expected = len(oracles.natural_maps(f, g))
        assert f.p ** hom_presheaves(f, g).dim == expected


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SMALL), st.integers(0, 2 ** 16))
def test_yoneda_dimension(site, seed):
    g = random_presheaf(site.cat, np.random.default_rng(seed))
    for a in site.cat.objects:
        assert hom_presheaves(representable(site.cat, a), g).dim == g.dims[a]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SMALL), st.integers(0, 2 ** 16))
def test_yoneda_element_round_trip(site, seed):
    g = random_presheaf(site.cat, np.random.default_rng(seed))
    for a in site.cat.objects:
        for i in range(g.dims[a]):
            x = np.eye(g.dims[a], dtype=np.int64)[i]
            phi = yoneda_element(g, a, x)
            assert not phi.naturality_failures()
            # evaluating at id_a recovers x
            assert np.array_equal(phi.comps[a] @ site.cat.ident[a] % site.p, x)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SMALL), st.integers(0, 2 ** 16))
def test_kernel_image_cokernel_dimensions(site, seed):
    rng = np.random.default_rng(seed)
    f, g = random_presheaf(site.cat, rng), random_presheaf(site.cat, rng)
    hs = hom_presheaves(f, g)
    if hs.dim == 0:
        return
    phi = hs.element(rng.integers(0, site.p, size=hs.dim))
    k, _ = kernel(phi)
    im, _ = image(phi)
    c, _ = cokernel(phi)
    for x in site.cat.objects:
        assert k.dims[x] + im.dims[x] == f.dims[x]
        assert im.dims[x] + c.dims[x] == g.dims[x]


def test_direct_sum_and_isomorphism_search():
    e = fx.fix_e().cat
    s, _, _ = direct_sum([fx.module_e(1), fx.module_e(2)])
    iso = isomorphism(s, representable(e, "*"))
    assert iso is not None and iso.is_iso()
    assert isomorphism(fx.module_e(1), fx.module_e(2)) is None
    assert compose(iso.inverse(), iso) == identity_morphism(s)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 16))
def test_left_kan_extension_is_left_adjoint_to_restriction(seed):
    """dim hom(f_! G, H) = dim hom(G, f^* H) along the inclusion of FIX-DG."""
    a, b, inc = fx.fix_dg()
    m = SiteMorphism(inc, a, b)
    rng = np.random.default_rng(seed)
    g, h = random_presheaf(a.cat, rng), random_presheaf(b.cat, rng)
    lk = m.left_kan(g).presheaf
    assert hom_presheaves(lk, h).dim == hom_presheaves(g, restrict_along(inc, h)).dim
    rk = m.right_kan(g).presheaf
    assert hom_presheaves(h, rk).dim == hom_presheaves(restrict_along(inc, h), g).dim


def test_invalid_action_is_rejected():
    e = fx.fix_e().cat
    act = np.zeros((2, 1, 1), dtype=np.int64)  # identity acts as 0 on a nonzero space
    with pytest.raises(ValueError):
        Presheaf(e, {"*": 1}, {("*", "*"): act})


def test_zero_dimensional_slices():
    assert _as_rows(None, 0).shape == (0, 0)
    p0 = fx.fix_p0()
    z = zero_sieve(p0.cat, "*")
    assert z.presheaf.dims == {"*": 0} and z.inclusion.source is z.presheaf
