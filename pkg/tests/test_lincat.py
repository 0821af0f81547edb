import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linsite import fixtures as fx
from linsite.lincat import (BoundaryError, LinearCategory, LinearFunctor, NatTransform, algebra_category,
                            compose_functors, conjugated_functor, full_subcategory, horizontal_compose,
                            identity_functor, identity_transform, matrix_category, validate_category,
                            validate_functor, vertical_compose, whisker)


@pytest.mark.parametrize("site", fx.all_sites(), ids=lambda s: s.name)
def test_fixture_categories_are_valid(site):
    assert validate_category(site.cat).ok


def test_nonassociative_structure_names_failing_triple():
    c = matrix_category({"u": 1, "v": 2}, 2, name="broken")
    comp = {k: v.copy() for k, v in c.comp.items()}
    comp[("v", "v", "v")][1, 2] = 0  # E12 E21 := 0
    bad = LinearCategory(c.objects, c.dims, comp, c.ident, 2, name="broken")
    rep = validate_category(bad)
    assert not rep.ok
    assert any(v.startswith("associativity fails on basis triple") for v in rep.violations)


def test_missing_identity_is_reported():
    c = algebra_category([[[1]]], [0], 2, name="no-unit")
    rep = validate_category(c)
    assert any(v.startswith("identity") for v in rep.violations)


@pytest.mark.parametrize("p", [2, 3])
def test_matrix_category_composes_like_matrices(p):
    sizes = {"a": 1, "b": 2, "c": 3}
    cat = matrix_category(sizes, p)
    rng = np.random.default_rng(1)
    for x, y, z in itertools.product(sizes, repeat=3):
        f = rng.integers(0, p, size=(sizes[y], sizes[x]))
        g = rng.integers(0, p, size=(sizes[z], sizes[y]))
        got = cat.compose(g.reshape(-1), f.reshape(-1), x, y, z)
        assert np.array_equal(got, (g @ f % p).reshape(-1))


def test_is_iso_returns_inverse():
    cat = fx.fix_dg()[1].cat
    t = fx.twist_matrix()
    inv = cat.is_iso(t, "v", "v")
    assert np.array_equal(cat.compose(inv, t, "v", "v", "v"), cat.ident["v"])
    assert cat.is_iso(np.array([1, 0, 0, 0]), "v", "v") is None


def test_functor_validation_catches_broken_identity():
    a, b, inc = fx.fix_dg()
    broken = LinearFunctor(a.cat, b.cat, inc.fobj, {("u", "u"): np.array([[0]])}, name="bad")
    rep = validate_functor(broken)
    assert any("identity not preserved" in v for v in rep.violations)


def test_composition_of_functors_is_associative_on_homs():
    _, b, inc = fx.fix_dg()
    v, _ = fx.twisted_identity()
    gf = compose_functors(v, inc)
    hgf = compose_functors(identity_functor(b.cat), gf)
    assert validate_functor(gf).ok and hgf == compose_functors(compose_functors(identity_functor(b.cat), v), inc)
    with pytest.raises(BoundaryError):
        compose_functors(inc, v)


def test_conjugated_functor_twist_is_natural_and_invertible():
    v, theta = fx.twisted_identity()
    assert validate_functor(v).ok and theta.is_invertible()
    back = vertical_compose(theta.inverse(), theta)
    assert back == identity_transform(v)


def test_non_natural_components_are_rejected():
    _, b, _ = fx.fix_dg()
    ident = identity_functor(b.cat)
    v, _ = fx.twisted_identity()
    with pytest.raises(ValueError, match="not natural"):
        NatTransform(v, ident, {"u": np.array([1]), "v": np.array([1, 0, 0, 0])})


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([[1, 1], [1, 0], [0, 1], [0, 0]]), st.sampled_from([[1, 1], [1, 0], [0, 1], [0, 0]]))
def test_interchange_law_on_fix_e(a1, a2):
    """``(b2 . b1) * (a2 . a1) = (b2 * a2) . (b1 * a1)`` for endo-transformations of the identity."""
    cat = fx.fix_e().cat
    i = identity_functor(cat)
    alpha1, alpha2 = NatTransform(i, i, {"*": a1}), NatTransform(i, i, {"*": a2})
    beta1, beta2 = NatTransform(i, i, {"*": a2}), NatTransform(i, i, {"*": a1})
    lhs = horizontal_compose(vertical_compose(beta2, beta1), vertical_compose(alpha2, alpha1))
    rhs = vertical_compose(horizontal_compose(beta2, alpha2), horizontal_compose(beta1, alpha1))
    assert lhs == rhs


def test_whiskering_matches_horizontal_composition_with_identities():
    a, b, inc = fx.fix_dg()
    v, theta = fx.twisted_identity()
    left = whisker(theta, inc, "right")
    assert left == horizontal_compose(theta, identity_transform(inc))
    right = whisker(theta, identity_functor(b.cat), "left")
    assert right == horizontal_compose(identity_transform(identity_functor(b.cat)), theta)


def test_full_subcategory_inclusion_is_fully_faithful():
    _, b, _ = fx.fix_dg()
    sub, inc = full_subcategory(b.cat, ["v"])
    assert validate_category(sub).ok and validate_functor(inc).ok
    assert sub.d("v", "v") == 4 and np.array_equal(inc.fmap[("v", "v")], np.eye(4, dtype=np.int64))


def test_non_prime_characteristic_rejected():
    with pytest.raises(ValueError, match="not prime"):
        LinearCategory(["*"], {("*", "*"): 1}, {("*", "*", "*"): np.ones((1, 1, 1), dtype=np.int64)},
                       {"*": np.array([1])}, 4)
