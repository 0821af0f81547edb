import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from linsite import exactalg as ea


@st.composite
def matrices(draw, max_rows=4, max_cols=4):
    p = draw(st.sampled_from([2, 3]))
    m = draw(st.integers(0, max_rows))
    n = draw(st.integers(0, max_cols))
    entries = draw(st.lists(st.integers(0, p - 1), min_size=m * n, max_size=m * n))
    return np.array(entries, dtype=np.int64).reshape(m, n), p


def colset(m, p):
    """Column space of ``m`` as a set of vectors."""
    return oracles.span(list(map(tuple, np.asarray(m).T)), np.asarray(m).shape[0], p)


def test_prime_field_rejects_composites():
    assert ea.is_prime(7) and not ea.is_prime(9) and not ea.is_prime(1)
    with pytest.raises(ValueError):
        ea.PrimeField(4)
    f = ea.PrimeField(5)
    assert all(x * f.inv(x) % 5 == 1 for x in range(1, 5))
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_image_count(mp):
    m, p = mp
    assert ea.rank(m, p) == oracles.rank(m, p)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rref_is_canonical(mp):
    m, p = mp
    r, piv = ea.rref(m, p)
    again, piv2 = ea.rref(r, p)
    assert np.array_equal(r, again) and piv == piv2
    for i, c in enumerate(piv):
        assert r[i, c] == 1 and np.count_nonzero(r[:, c]) == 1


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_kernel_basis_spans_solution_set(mp):
    m, p = mp
    k = ea.kernel_basis(m, p)
    assert k.shape == (m.shape[1], m.shape[1] - oracles.rank(m, p))
    assert colset(k, p) == oracles.solutions(m, np.zeros(m.shape[0], dtype=np.int64), p)


@settings(max_examples=150, deadline=None)
@given(matrices(), st.data())
def test_solve_linear_agrees_with_enumeration(mp, data):
    m, p = mp
    b = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=m.shape[0], max_size=m.shape[0])),
                 dtype=np.int64)
    x, kern = ea.solve_linear(m, b, p)
    sols = oracles.solutions(m, b, p)
    if x is None:
        assert not sols
    else:
        assert tuple(int(v) for v in x) in sols
        assert len(sols) == p ** kern.shape[1]


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=3, max_cols=3))
def test_inverse_when_square_and_full_rank(mp):
    m, p = mp
    if m.shape[0] != m.shape[1]:
        return
    full = oracles.rank(m, p) == m.shape[0]
    assert ea.is_invertible(m, p) == full
    if full:
        assert np.array_equal(ea.matmul(m, ea.inverse(m, p), p), ea.identity(m.shape[0]))
    else:
        with pytest.raises(ZeroDivisionError):
            ea.inverse(m, p)


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=3, max_cols=3), st.data())
def test_subspace_operations_match_set_operations(mp, data):
    u, p = mp
    n = u.shape[0]
    k = data.draw(st.integers(0, 3))
    v = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=n * k, max_size=n * k)),
                 dtype=np.int64).reshape(n, k)
    su, sv = colset(u, p), colset(v, p)
    # row spaces: the subspace routines work with rows
    inter = ea.subspace_intersection(u.T, v.T, p)
    assert oracles.span(list(map(tuple, inter)), n, p) == su & sv
    total = ea.subspace_sum(u.T, v.T, p)
    assert oracles.span(list(map(tuple, total)), n, p) == oracles.span(list(su | sv), n, p)
    assert ea.subspace_contains(u.T, v.T, p) == (sv <= su)


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=3, max_cols=3), st.data())
def test_preimage_matches_enumeration(mp, data):
    m, p = mp
    k = data.draw(st.integers(0, 2))
    rows = m.shape[0]
    u = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=rows * k, max_size=rows * k)),
                 dtype=np.int64).reshape(k, rows)
    target = oracles.span(list(map(tuple, u)), rows, p)
    expected = {x for x in oracles.vectors(m.shape[1], p) if oracles.apply(m, x, p) in target}
    got = ea.preimage(m, u, p)
    assert oracles.span(list(map(tuple, got)), m.shape[1], p) == expected


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_image_and_quotient(mp):
    m, p = mp
    img, q = ea.image_and_quotient(m, p)
    assert colset(img, p) == oracles.image_set(m, p)
    assert q.shape == (m.shape[0] - oracles.rank(m, p), m.shape[0])
    assert not np.any(ea.matmul(q, m, p))
    s = ea.section(q, p)
    assert np.array_equal(ea.matmul(q, s, p), ea.identity(q.shape[0]))


def test_coordinates_round_trip():
    p = 3
    basis = np.array([[1, 0], [2, 1], [0, 1]])
    c = ea.Coordinates(basis, p)
    v = ea.matmul(basis, np.array([2, 1]), p)
    assert np.array_equal(c.coords(v), [2, 1])
    assert not c.contains(np.array([1, 0, 0])) or ea.rank(basis, p) == 3


def test_all_vectors_enumerates_field_space():
    vs = ea.all_vectors(3, 3)
    assert vs.shape == (27, 3) and len({tuple(v) for v in vs}) == 27


def test_dimension_mismatch_raises():
    with pytest.raises(ea.DimensionError):
        ea.matmul(np.zeros((2, 3), dtype=np.int64), np.zeros((2, 2), dtype=np.int64), 2)
