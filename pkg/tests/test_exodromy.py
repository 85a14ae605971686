import random
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galcat.exodromy import (
    OverObject,
    canonical_cover,
    connect,
    descend,
    ev,
    full_faithfulness_check,
    local_fullness_witness,
    over_objects,
    psi_coinitiality_check,
    realize,
    reconstruction_check,
    subobject_realization,
    yoneda_map,
)
from galcat.finset import FinMap
from galcat.funcat import (
    CtsFunctor,
    NatTrans,
    Subfunctor,
    check_functor,
    check_nat_trans,
    corepresentable,
    empty_functor,
    enumerate_functors,
    is_effective_epi,
    nat_trans_set,
    subfunctor_lattice,
    terminal_functor,
)
from galcat.galois import GaloisPresentation, fibre_tuple, pi1, reconstructed_procat
from galcat.report import RealizationError
from galcat.strat import build_bg, canned_procat, cyclic_chain, random_procat, symmetric_group
from oracles import isomorphic, procat_isomorphic

seeds = st.integers(0, 100_000)


def pres(name, points=None):
    p = canned_procat(name)
    return GaloisPresentation.all_points(p) if points is None else GaloisPresentation(p, tuple(points))


@pytest.fixture(scope="module")
def bs3():
    return GaloisPresentation.all_points(build_bg(symmetric_group(3)))


def coset_functor(g):
    """S3 acting on the cosets of a subgroup of order two, on Π₁(BS3)."""
    pi = pi1(g)
    c = pi.levels[0]
    comp = c.composition[0][0][0]
    e = c.identities[0]
    t = next(f for f in range(6) if f != e and comp[f][f] == e)
    sub = [e, t]
    cosets = []
    for f in range(6):
        k = frozenset(comp[f][s] for s in sub)
        if k not in cosets:
            cosets.append(k)
    act = lambda x, y, f, a: cosets.index(frozenset(comp[f][s] for s in cosets[a]))  # noqa: E731
    return CtsFunctor.from_function(pi, 0, [3], act)


def test_ev_of_a_corepresentable(bs3):
    a = corepresentable(bs3.base, 0, 0)
    e = ev(bs3, a)
    assert e.procat == pi1(bs3)
    assert e == corepresentable(pi1(bs3), 0, 0)


def test_yoneda_map_sends_identity_to_the_element(bs3):
    a = corepresentable(bs3.base, 0, 0)
    for e in range(6):
        t = yoneda_map(a, 0, e)
        assert check_nat_trans(t).ok
        assert t.components[0].table[bs3.base.levels[0].identities[0]] == e


def test_canonical_cover_of_the_regular_representation():
    g = pres("bz2")
    f = corepresentable(pi1(g), 0, 0)
    a, cov, blocks = canonical_cover(g, f)
    assert blocks == [(0, 0), (0, 1)]
    assert a.total_size == 4
    assert is_effective_epi(cov)


def test_canonical_cover_of_the_sign_stays_at_level_zero():
    g = pres("bzhat")
    sign = CtsFunctor.from_function(pi1(g), 0, [2], lambda x, y, f, a: (a + f) % 2)
    a, cov, blocks = canonical_cover(g, sign)
    assert a.level == 0 and len(blocks) == 2
    assert a.sizes == (4,)


def test_cover_rejects_functors_on_other_categories():
    g = pres("bz2")
    with pytest.raises(RealizationError):
        canonical_cover(g, terminal_functor(cyclic_chain([3])))


def test_subobject_realization_full_empty_and_orbit():
    g = pres("open-closed", points=[1])
    h_u = corepresentable(g.base, 0, 0)
    e = ev(g, h_u)
    full = Subfunctor(e, (frozenset({0}),))
    lifted = subobject_realization(g, h_u, full)
    # the image of h^Z -> h^U: nothing over the open point is generated
    assert lifted.subset == (frozenset(), frozenset({0}))
    # with both points the open element is hit by the identity
    g2 = pres("open-closed")
    both = Subfunctor(ev(g2, h_u), (frozenset({0}), frozenset({0})))
    assert subobject_realization(g2, h_u, both).subset == both.subset
    none = subobject_realization(g, h_u, Subfunctor(e, (frozenset(),)))
    assert none.subset == (frozenset(), frozenset())
    # orbit of one element in the regular representation of Z/4 is everything
    g4 = GaloisPresentation.all_points(cyclic_chain([4]))
    h = corepresentable(g4.base, 0, 0)
    orbit = subobject_realization(g4, h, Subfunctor(ev(g4, h), (frozenset(range(4)),)))
    assert orbit.subset == (frozenset(range(4)),)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_subobject_realization_is_identity_with_all_points(seed):
    rng = random.Random(seed)
    p = random_procat(rng, max_objects=2, max_hom=3)
    g = GaloisPresentation.all_points(p)
    a = corepresentable(p, rng.randrange(p.n_objects), p.top)
    for s in subfunctor_lattice(ev(g, a)):
        assert subobject_realization(g, a, s).subset == s.subset


def test_bs3_coset_functor_realization(bs3):
    f = coset_functor(bs3)
    assert check_functor(f).ok and f.sizes == (3,)
    tr = realize(bs3, f)
    assert tr.cover_size == 18
    assert len(tr.blocks) == 3
    assert tr.quotient.sizes == (3,)
    assert all(m.is_bijective() for m in tr.iso_witness.components)
    assert isomorphic(ev(bs3, tr.quotient), f)
    assert len(tr.summary()) == 6


@pytest.mark.parametrize("sizes", [(0, 0), (1, 1), (2, 2), (1, 0)])
def test_two_curves_functors_are_realized(sizes):
    g = pres("two-curves")
    pi = pi1(g)
    for f in enumerate_functors(pi, 0, list(sizes)):
        tr = realize(g, f)
        assert isomorphic(ev(g, tr.quotient), f)


def test_full_faithfulness_counts():
    t = pres("terminal")
    one = terminal_functor(t.base)
    rep = full_faithfulness_check(t, one, one)
    assert rep.ok and len(nat_trans_set(one, one)) == 1

    for order in (2, 3):
        g = GaloisPresentation.all_points(cyclic_chain([order]))
        h = corepresentable(g.base, 0, 0)
        assert full_faithfulness_check(g, h, h).ok
        assert len(nat_trans_set(ev(g, h), ev(g, h))) == order

    g = pres("open-closed")
    empty = empty_functor(g.base, 0)
    h = corepresentable(g.base, 1, 0)
    assert full_faithfulness_check(g, empty, h).ok
    assert len(nat_trans_set(empty, h)) == 1
    assert nat_trans_set(h, empty) == []


def test_local_fullness_for_a_translation():
    g = GaloisPresentation.all_points(cyclic_chain([2, 4]))
    h = corepresentable(g.base, 0, 1)
    e = ev(g, h)
    # translation by one step on Z/4
    alpha = NatTrans(e, e, (FinMap(e.on_objects[0], e.on_objects[0], (1, 2, 3, 0)),))
    assert check_nat_trans(alpha).ok
    c, f, k = local_fullness_witness(g, h, h, alpha)
    assert is_effective_epi(f)
    down = descend(g, h, h, alpha)
    assert fibre_tuple(g, down) == alpha.tables


def test_reconstruction_of_canned_examples():
    for name in ("terminal", "bz2", "bs3", "two-curves", "open-closed", "z2-exit", "bzhat"):
        assert reconstruction_check(canned_procat(name)).ok, name


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_reconstruction_matches_isomorphism_oracle(seed):
    rng = random.Random(seed)
    p = random_procat(rng, max_objects=2, max_hom=3)
    assert reconstruction_check(p).ok
    q, _ = reconstructed_procat(GaloisPresentation.all_points(p))
    assert procat_isomorphic(p, q)


@pytest.mark.parametrize("name", ["two-curves", "open-closed", "z2-exit"])
def test_psi_coinitiality(name):
    rep = psi_coinitiality_check(pres(name), window=4, max_nodes=6)
    assert rep.ok and rep.checked > 0


def test_connect_joins_two_objects_over_the_same_point():
    g = pres("bz2")
    a = corepresentable(g.base, 0, 0)
    u, v = over_objects(g, a, (0,), [a], limit=2)[:2]
    w, to_u, to_v = connect(g, a, (0,), u, v)
    assert check_nat_trans(to_u).ok and check_nat_trans(to_v).ok
    assert to_u.components[0].table[w.psi(g)[0]] == u.psi(g)[0]
    assert to_v.components[0].table[w.psi(g)[0]] == v.psi(g)[0]


def test_connect_rejects_points_over_different_elements():
    g = pres("bz2")
    a = corepresentable(g.base, 0, 0)
    u = over_objects(g, a, (0,), [a], limit=1)[0]
    # same object, but pointed at the other element of A
    bogus = OverObject(u.parts, (1,), u.total, u.insertions, u.to_a)
    assert u.to_a.components[0].table[bogus.psi(g)[0]] == 1
    with pytest.raises(ValueError):
        connect(g, a, (0,), u, bogus)
