import numpy as np
import pytest

import oracles
from linsite import fixtures as fx
from linsite.lincat import NatTransform, identity_functor
from linsite.presheaf import compose, is_isomorphic, random_presheaf
from linsite.sheafify import is_sheaf, sheafify
from linsite.sitemorph import (SiteMorphism, TwoCell, analyze, certify_equivalence, compose_site_morphisms,
                               identity_site_morphism, is_identity, lifting_sieve, probe_sheaves, sheafified_representable,
                               verify_upper_matches_pushforward)
from test_acceptance import fixture_morphisms, twisted

MORPHISMS = fixture_morphisms()
SMALL = [m for m in MORPHISMS if all(len(s.cat.objects) == 1 or s.cat.name.startswith("FIX-DG")
                                     for s in (m.source, m.target))]


@pytest.mark.parametrize("m", SMALL, ids=lambda m: m.name)
def test_verdicts_agree_with_enumeration(m):
    rep = m.report
    ours = {"G": bool(rep.G), "F": bool(rep.F), "FF": bool(rep.FF), "preimage": bool(rep.preimage_equal),
            "cocontinuous": bool(rep.cocontinuous)}
    assert ours == oracles.lc_conditions(m.functor, m.source, m.target)


@pytest.mark.parametrize("m", MORPHISMS, ids=lambda m: m.name)
def test_continuity_matches_restriction_of_sheaves(m):
    """Continuous iff restriction preserves sheaves; checked on target probes and random sheaves."""
    rng = np.random.default_rng(2)
    sheaves = probe_sheaves(m.target, 5, 0) + [sheafify(random_presheaf(m.target.cat, rng), m.target).sheaf
                                              for _ in range(5)]
    preserved = all(is_sheaf(m.restrict(g), m.source)[0] for g in sheaves)
    if m.report.continuous:
        assert preserved
    else:
        assert not preserved


def test_named_verdicts():
    names = {m.name: m for m in MORPHISMS}
    assert names["FIX-DG.f"].report.LC
    assert names["swap:E->E/e2"].report.LC
    swap = names["swap:E->E"].report
    assert swap.G and swap.F and swap.FF and not swap.preimage_equal and not swap.LC
    pe = names["P->E"].report
    assert not pe.F and not pe.LC
    # (e1) and (e2) both fail to lift locally; the checker reports the first it meets
    assert "is not locally in the image" in pe.F.witness
    assert not names["E/max->E"].report.cocontinuous and names["E/max->E"].report.continuous
    assert not names["E->E/max"].report.continuous and names["E->E/max"].report.cocontinuous


def test_p_to_e_fails_at_e1():
    """Neither idempotent lifts through the image {0, e1 + e2} on a site with only trivial covers."""
    pe = fx.point_to_e()
    for c in (fx.E1, fx.E2):
        assert not fx.fix_p().is_cover(lifting_sieve(pe, c, "*", "*"))
    assert fx.fix_p().is_cover(lifting_sieve(pe, np.array([1, 1]), "*", "*"))


def test_adjunction_triangles_on_dg():
    a, b, inc = fx.fix_dg()
    m = SiteMorphism(inc, a, b)
    for g in probe_sheaves(a, 5, 0):
        assert is_identity(compose(m.counit(m.upper(g)), m.upper_map(m.unit(g))))
    for f in probe_sheaves(b, 5, 0):
        assert is_identity(compose(m.restrict_map(m.counit(f)), m.unit(m.restrict(f))))


def test_kappa_identifies_upper_of_representables():
    a, b, inc = fx.fix_dg()
    m = SiteMorphism(inc, a, b)
    for x in a.cat.objects:
        k = m.kappa(x)
        assert k.is_iso()
        assert is_isomorphic(m.upper(sheafified_representable(a, x)), sheafified_representable(b, inc(x)))


def test_certificates_and_cocontinuous_comparison():
    a, b, inc = fx.fix_dg()
    m = SiteMorphism(inc, a, b)
    assert certify_equivalence(m, 5, 0).ok
    assert verify_upper_matches_pushforward(m, 5, 0).ok
    bad = SiteMorphism(fx.swap_functor(), fx.fix_e(), fx.fix_e(), name="swap")
    assert certify_equivalence(bad, 5, 0).failures == ["precondition: morphism is not LC"]
    assert not verify_upper_matches_pushforward(bad, 5, 0).ok


def test_two_cells_transport_and_mate():
    vt, ib, theta = twisted()
    cell = TwoCell(vt, ib, theta)
    assert not cell.representable_defects()
    for g in probe_sheaves(vt.source, 5, 0):
        assert cell.upper(g).is_iso()
        assert cell.mate(g) == cell.upper(g)


def test_two_cell_boundary_mismatch():
    e = fx.fix_e()
    ie = identity_site_morphism(e)
    a, b, inc = fx.fix_dg()
    alpha = NatTransform(ie.functor, ie.functor, {"*": fx.E1})
    with pytest.raises(ValueError):
        TwoCell(SiteMorphism(inc, a, b), ie, alpha)


def test_composite_of_lc_is_lc():
    a, b, inc = fx.fix_dg()
    p_to_a = SiteMorphism(fx.point_to_dg_a(), fx.fix_p(), a)
    gf = compose_site_morphisms(SiteMorphism(inc, a, b), p_to_a)
    assert gf.report.LC
    with pytest.raises(ValueError):
        compose_site_morphisms(p_to_a, p_to_a)


def test_analyze_rejects_mismatched_sites():
    with pytest.raises(ValueError):
        analyze(identity_functor(fx.fix_e().cat), fx.fix_p(), fx.fix_e())


def test_probe_sheaves_are_seeded_and_sheaves():
    e = fx.fix_e()
    one, two = probe_sheaves(e, 6, 3), probe_sheaves(e, 6, 3)
    assert one is two and len(one) == 7
    assert all(is_sheaf(g, e)[0] for g in one)
