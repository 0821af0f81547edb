import numpy as np
import pytest

from linsite import fixtures as fx
from linsite.lincat import NatTransform, identity_functor
from linsite.presheaf import identity_morphism, is_isomorphic, zero_morphism
from linsite.rooffrac import (ColimFunctorSpec, b2_decompose_equivalence, b4_separate, b5_lift,
                              fully_faithful_on_representables, identity_spec, lf3_complete_square, lf4_construct,
                              lf5_transfer, roof_decompose, then_upper, upper_spec, yoneda_site_morphism)
from linsite.sitemorph import (SiteMorphism, TwoCell, identity_site_morphism, probe_sheaves,
                               sheafified_representable)
from test_acceptance import dg, twisted


def e1_part_spec():
    """``G -> G(e1)`` on FIX-E, given by ``M_e1`` with ``e1 -> 1`` and ``e2 -> 0``."""
    e = fx.fix_e()
    m = fx.module_e(1)
    return ColimFunctorSpec(e, e, {"*": m}, {("*", "*"): [identity_morphism(m), zero_morphism(m, m)]},
                            name="e1-part")


def test_identity_spec_acts_as_identity_on_probes():
    e = fx.fix_e()
    spec = identity_spec(e)
    for g in probe_sheaves(e, 5, 0):
        assert is_isomorphic(spec.apply(g), g)


def test_spec_validation_rejects_non_functorial_data():
    e = fx.fix_e()
    m = fx.module_e(1)
    with pytest.raises(ValueError, match="identity"):
        ColimFunctorSpec(e, e, {"*": m}, {("*", "*"): [zero_morphism(m, m), zero_morphism(m, m)]})
    with pytest.raises(ValueError, match="not a sheaf"):
        m2 = fx.module_e(2)
        ColimFunctorSpec(e, e, {"*": m2}, {("*", "*"): [identity_morphism(m2), identity_morphism(m2)]})


def test_roof_of_explicit_spec():
    roof = roof_decompose(e1_part_spec(), 10, 0)
    assert roof.ok, roof.failures
    assert roof.checks["apex_objects"] == 2 and roof.checks["iso_probes"] == "11/11"
    assert roof.w.report.LC and roof.f.report.continuous


def test_e1_part_is_an_equivalence_on_fix_e_only():
    """On FIX-E every sheaf is an e1-module, so the e1-part is the identity there; on the trivially
    topologised category it kills e2 and is not faithful."""
    assert not fully_faithful_on_representables(e1_part_spec())
    assert b2_decompose_equivalence(e1_part_spec(), 3, 0).ok
    emax = fx.fix_e_trivial()
    m = fx.module_e(1)
    spec = ColimFunctorSpec(emax, emax, {"*": m}, {("*", "*"): [identity_morphism(m), zero_morphism(m, m)]},
                            name="e1-part/max")
    assert "not faithful at (*, *)" in fully_faithful_on_representables(spec)
    res = b2_decompose_equivalence(spec, 3, 0)
    assert not res.ok and res.failures[0].startswith("precondition")
    roof = roof_decompose(spec, 3, 0)
    assert roof.ok and not roof.f.report.LC


def test_then_upper_composes_specs():
    _, _, inc = dg()
    spec = then_upper(identity_spec(inc.source), inc)
    roof = roof_decompose(spec, 5, 0)
    assert roof.ok, roof.failures
    with pytest.raises(ValueError):
        then_upper(identity_spec(fx.fix_e()), inc)


def test_yoneda_site_morphism_is_lc():
    for site in (fx.fix_e(), fx.fix_p0(), fx.fix_dg()[1]):
        epi, apex, y = yoneda_site_morphism(site)
        assert epi.report.ok and y.report.LC


def test_lf3_square_is_2_cell_and_v_lc():
    e = fx.fix_e()
    swap = SiteMorphism(fx.swap_functor(), e, fx.fix_e_swapped_target())
    sq = lf3_complete_square(swap, identity_site_morphism(e))
    assert sq.ok and sq.v.report.LC and sq.alpha.is_invertible()
    with pytest.raises(ValueError):
        lf3_complete_square(swap, identity_site_morphism(fx.fix_p()))


def test_lf4_exact_equality_with_nonidentity_alpha():
    ie = identity_site_morphism(fx.fix_e())
    e1 = NatTransform(ie.functor, ie.functor, {"*": fx.E1}, name="e1")
    res = lf4_construct(ie, ie, ie, e1)
    assert res.ok
    v = res.v.functor
    assert np.array_equal(v.on_hom(fx.E1, "*", "*"), res.beta["*"])
    # e1 becomes the identity of #h_* = M_e1 in the apex
    assert np.array_equal(res.beta["*"], res.site.cat.identity(res.v("*")))


def test_lf5_preconditions():
    vt, ib, theta = twisted()
    rep, fails = lf5_transfer(vt, ib, theta)
    assert rep.LC and not fails
    with pytest.raises(ValueError, match="does not run"):
        lf5_transfer(ib, vt, theta)
    e = fx.fix_e()
    ie = identity_site_morphism(e)
    e1 = NatTransform(ie.functor, ie.functor, {"*": fx.E1})
    with pytest.raises(ValueError, match="not invertible"):
        lf5_transfer(ie, ie, e1)


def test_b4_requires_equal_transport():
    emax = fx.fix_e_trivial()
    im = identity_site_morphism(emax)
    i = identity_functor(emax.cat)
    one = NatTransform(i, i, {"*": np.array([1, 1])})
    e1 = NatTransform(i, i, {"*": fx.E1})
    with pytest.raises(ValueError, match="transports differ"):
        b4_separate(im, im, one, e1, 3, 0)


def test_b4_identifies_locally_equal_cells():
    ie = identity_site_morphism(fx.fix_e())
    one = NatTransform(ie.functor, ie.functor, {"*": np.array([1, 1])})
    e1 = NatTransform(ie.functor, ie.functor, {"*": fx.E1})
    res = b4_separate(ie, ie, one, e1, 5, 0)
    assert res.ok and res.data["distinct"]
    w = res.data["w"]
    assert np.array_equal(w.functor.on_hom(one["*"], "*", "*"), w.functor.on_hom(e1["*"], "*", "*"))


def test_b5_detects_wrong_gamma():
    ie = identity_site_morphism(fx.fix_e())
    e1 = NatTransform(ie.functor, ie.functor, {"*": fx.E1})
    zero = NatTransform(ie.functor, ie.functor, {"*": np.array([0, 0])})
    cell = TwoCell(ie, ie, e1)
    assert b5_lift(ie, ie, cell.upper, 5, 0, gamma=e1).ok
    res = b5_lift(ie, ie, cell.upper, 5, 0, gamma=zero)
    assert "beta differs from w o gamma" in res.failures


def test_b2_on_dg_upper_spec():
    _, _, inc = dg()
    res = b2_decompose_equivalence(upper_spec(inc), 5, 0)
    assert res.ok and res.data["w1_LC"] and res.data["w2_LC"]


def test_roof_comparison_invertible_on_representables():
    _, _, inc = dg()
    spec = upper_spec(inc)
    roof = roof_decompose(spec, 3, 0)
    a = spec.source
    for x in a.cat.objects:
        h = sheafified_representable(a, x)
        assert roof.comparison(h).is_iso()
