"""The shipped fixture corpus over F_2, with F_3 twins of the one-object sites.

* ``FIX-P``: one object ``*`` with ``End = F_2``; only the maximal sieve covers.
* ``FIX-P0``: the same category where the zero sieve covers too.
* ``FIX-E``: one object with ``End = F_2 x F_2`` (idempotents ``e1``, ``e2``),
  covered by the maximal sieve and the sieve generated by ``e1``.
* ``FIX-DG``: 2x2 and 1x1 matrices (objects ``v`` and ``u``), the full
  subcategory on ``u`` and its inclusion; trivial topologies.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .lincat import (LinearCategory, LinearFunctor, algebra_category, conjugated_functor, full_subcategory,
                     identity_functor, matrix_category)
from .presheaf import Presheaf, maximal_sieve, sieve_generated, zero_sieve
from .topology import CoverSystem, Site, trivial_topology

P = 2
E1 = np.array([1, 0])
E2 = np.array([0, 1])


def point_category(name="P", p=P) -> LinearCategory:
    return algebra_category([[[1]]], [1], p, basis_names=["1"], name=name)


def idempotent_category(name="E", p=P) -> LinearCategory:
    # e_i e_j = delta_ij e_i
    table = [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
    return algebra_category(table, [1, 1], p, basis_names=["e1", "e2"], name=name)


@lru_cache(maxsize=None)
def fix_p() -> Site:
    return Site(point_category("FIX-P"), name="FIX-P")


@lru_cache(maxsize=None)
def fix_p0() -> Site:
    cat = fix_p().cat
    return Site(cat, CoverSystem(cat, {"*": [maximal_sieve(cat, "*"), zero_sieve(cat, "*")]}), name="FIX-P0")


def e1_sieve(cat):
    return sieve_generated(cat, "*", [("*", E1)])


def e2_sieve(cat):
    return sieve_generated(cat, "*", [("*", E2)])


def fix_e(p=P) -> Site:
    return _fix_e(p)


@lru_cache(maxsize=None)
def _fix_e(p) -> Site:
    name = "FIX-E" if p == P else f"FIX-E/F{p}"
    cat = idempotent_category(name, p)
    return Site(cat, CoverSystem(cat, {"*": [maximal_sieve(cat, "*"), e1_sieve(cat)]}), name=name)


@lru_cache(maxsize=None)
def fix_p3() -> Site:
    return Site(point_category("FIX-P/F3", 3), name="FIX-P/F3")


@lru_cache(maxsize=None)
def fix_mat3() -> Site:
    """1x1 and 2x2 matrices over F_3, trivial topology."""
    return Site(matrix_category({"u": 1, "v": 2}, 3, name="FIX-DG.B/F3"), name="FIX-DG.B/F3")


def all_sites():
    a, b, _ = fix_dg()
    return [fix_p(), fix_p0(), fix_e(), fix_e_trivial(), a, b, fix_p3(), fix_e(3), fix_mat3()]


@lru_cache(maxsize=None)
def fix_e_trivial() -> Site:
    cat = fix_e().cat
    return Site(cat, trivial_topology(cat), name="FIX-E/max")


def fix_e_both_idempotents() -> CoverSystem:
    """``{max, (e1), (e2)}`` on FIX-E: not a topology."""
    cat = fix_e().cat
    return CoverSystem(cat, {"*": [maximal_sieve(cat, "*"), e1_sieve(cat), e2_sieve(cat)]})


@lru_cache(maxsize=None)
def fix_dg():
    """``(site_A, site_B, inclusion)``."""
    big = matrix_category({"u": 1, "v": 2}, P, name="FIX-DG.B")
    small, inc = full_subcategory(big, ["u"], name="FIX-DG.A")
    inc.name = "FIX-DG.f"
    return Site(small, name="FIX-DG.A"), Site(big, name="FIX-DG.B"), inc


def module_e(which: int) -> Presheaf:
    """1-dimensional FIX-E module on which ``e_which`` acts as 1 and the other idempotent as 0."""
    cat = fix_e().cat
    act = np.zeros((2, 1, 1), dtype=np.int64)
    act[which - 1] = 1
    return Presheaf(cat, {"*": 1}, {("*", "*"): act}, name=f"M_e{which}")


def swap_functor() -> LinearFunctor:
    """The automorphism of FIX-E exchanging ``e1`` and ``e2``."""
    cat = fix_e().cat
    return LinearFunctor(cat, cat, {"*": "*"}, {("*", "*"): np.array([[0, 1], [1, 0]])}, name="swap")


@lru_cache(maxsize=None)
def fix_e_swapped_target() -> Site:
    """FIX-E's category covered by ``{max, (e2)}``: the image of ``T_E`` under the swap."""
    cat = fix_e().cat
    return Site(cat, CoverSystem(cat, {"*": [maximal_sieve(cat, "*"), e2_sieve(cat)]}), name="FIX-E/e2")


@lru_cache(maxsize=None)
def two_isomorphic_points():
    """``(site, embedding of FIX-P)``: two isomorphic copies of the point."""
    cat = matrix_category({"a": 1, "b": 1}, P, name="P2")
    src = fix_p().cat
    f = LinearFunctor(src, cat, {"*": "a"}, {("*", "*"): np.array([[1]])}, name="P->P2")
    return Site(cat, name="P2"), f


def point_to_e() -> LinearFunctor:
    """FIX-P -> FIX-E, ``1 -> e1 + e2``."""
    return LinearFunctor(fix_p().cat, fix_e().cat, {"*": "*"}, {("*", "*"): np.array([[1], [1]])},
                         name="P->E")


def twist_matrix():
    """The invertible 2x2 matrix ``[[1, 1], [0, 1]]`` as an element of hom(v, v)."""
    return np.array([1, 1, 0, 1])


def twisted_identity(theta_v=None):
    """Identity of FIX-DG's B twisted at ``v``: ``(v, alpha: v => id)``."""
    _, b, _ = fix_dg()
    theta = {"u": np.array([1]), "v": twist_matrix() if theta_v is None else np.asarray(theta_v)}
    return conjugated_functor(identity_functor(b.cat), theta, name="id~")


def point_to_dg_a() -> LinearFunctor:
    """FIX-P -> FIX-DG.A, ``* -> u`` (an isomorphism of categories)."""
    a, _, _ = fix_dg()
    return LinearFunctor(fix_p().cat, a.cat, {"*": "u"}, {("*", "*"): np.array([[1]])}, name="P->A")
