import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galcat.finset import pair_index
from galcat.funcat import (
    CtsFunctor,
    NatTrans,
    Subfunctor,
    check_functor,
    check_nat_trans,
    compose_nat,
    corepresentable,
    count_nat_trans,
    enumerate_functors,
    equivalence_closure,
    find_isomorphism,
    functor_coequaliser,
    functor_coproduct,
    functor_equaliser,
    functor_image,
    functor_product,
    functor_pullback,
    generated_subfunctor,
    is_coequaliser_of_kernel_pair,
    is_effective_epi,
    is_mono,
    kernel_pair_subfunctor,
    nat_trans_set,
    propagate_search,
    quotient_by_equiv_subfunctor,
    random_functor,
    subfunctor_lattice,
    terminal_functor,
)
from galcat.procat import ProCat
from galcat.report import ShapeError, ValidationError
from galcat.strat import build_bg, cyclic_chain, random_procat, symmetric_group
from oracles import functors_brute, isomorphic, natural_families, uf_classes

seeds = st.integers(0, 100_000)


def instance(seed, n_functors=2, max_size=2):
    rng = random.Random(seed)
    p = random_procat(rng, max_objects=2, max_hom=3)
    return p, [random_functor(p, rng.randrange(p.depth), max_size, rng) for _ in range(n_functors)], rng


@pytest.fixture(scope="module")
def bs3():
    return build_bg(symmetric_group(3))


def test_corepresentable_is_a_functor(bs3):
    h = corepresentable(bs3, 0, 0)
    assert check_functor(h).ok
    assert h.sizes == (6,)


def test_bs3_regular_rep_has_six_endomorphisms(bs3):
    h = corepresentable(bs3, 0, 0)
    assert len(nat_trans_set(h, h)) == 6
    assert len(natural_families(h, h)) == 6


def test_bs3_functors_up_to_three():
    # labelled S3-actions on 0..3 points: 1, 1, 2 (trivial, sign) and
    # 10 = trivial + 3 placements of sign+point + 6 automorphisms of S3
    p = build_bg(symmetric_group(3))
    lib = sum(1 for sizes in range(4) for _ in enumerate_functors(p, 0, [sizes]))
    brute = sum(len(functors_brute(p, 0, [s])) for s in range(3))
    assert [sum(1 for _ in enumerate_functors(p, 0, [s])) for s in range(4)] == [1, 1, 2, 10]
    assert lib == 14
    assert brute == sum(1 for s in range(3) for _ in enumerate_functors(p, 0, [s]))


def test_check_functor_finds_planted_errors():
    p = build_bg(symmetric_group(3))
    good = corepresentable(p, 0, 0)
    arrows = [list(good.on_arrows[0][0])]
    arrows[0][0] = tuple(reversed(arrows[0][0]))  # identity no longer acts trivially
    bad = CtsFunctor(p, 0, good.on_objects, ((tuple(arrows[0]),),))
    laws = {v.law for v in check_functor(bad).violations}
    assert "identity" in laws or any("identity" in law for law in laws)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_nat_trans_set_matches_brute_force(seed):
    p, (f, g), _ = instance(seed)
    lib = sorted(t.tables for t in nat_trans_set(f, g))
    assert lib == sorted(natural_families(f, g))
    assert count_nat_trans(f, g) == len(lib)
    for t in nat_trans_set(f, g):
        assert check_nat_trans(t).ok


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_enumerate_functors_matches_brute_force(seed):
    rng = random.Random(seed)
    p = random_procat(rng, max_objects=2, max_hom=3)
    sizes = [rng.randint(0, 2) for _ in range(p.n_objects)]
    lib = list(enumerate_functors(p, p.top, sizes))
    brute = functors_brute(p, p.top, sizes)
    assert len(lib) == len(brute)
    assert len(set(lib)) == len(lib)
    assert all(check_functor(f).ok for f in lib)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_isomorphism_search_matches_brute_force(seed):
    p, (f, g), _ = instance(seed, max_size=3)
    iso = find_isomorphism(f, g)
    assert (iso is not None) == isomorphic(f, g)
    if iso is not None:
        assert all(m.is_bijective() for m in iso.components)
        assert check_nat_trans(iso).ok


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_product_and_coproduct_universal_counts(seed):
    p, (a, b, c), _ = instance(seed, 3)
    prod, p1, p2 = functor_product(a, b)
    cop, i1, i2 = functor_coproduct(a, b)
    assert check_functor(prod).ok and check_functor(cop).ok
    n_ca, n_cb = len(natural_families(c, a)), len(natural_families(c, b))
    assert count_nat_trans(c, prod) == n_ca * n_cb
    assert count_nat_trans(cop, c) == len(natural_families(a, c)) * len(natural_families(b, c))
    # pairing is injective
    pairs = {(compose_nat(p1, t).tables, compose_nat(p2, t).tables) for t in nat_trans_set(c, prod)}
    assert len(pairs) == n_ca * n_cb
    assert is_mono(i1) and is_mono(i2)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_equaliser_and_coequaliser_pointwise(seed):
    p, (a, b), _ = instance(seed, max_size=3)
    maps = nat_trans_set(a, b, 4)
    for s, t in product(maps, maps):
        e, inc = functor_equaliser(s, t)
        assert check_functor(e).ok
        for x in range(p.n_objects):
            assert set(inc.components[x].table) == {u for u in range(a.sizes[x]) if s.components[x].table[u] == t.components[x].table[u]}
        q, proj = functor_coequaliser(s, t)
        assert check_functor(q).ok and is_effective_epi(proj)
        assert compose_nat(proj, s).tables == compose_nat(proj, t).tables


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_pullback_and_image(seed):
    p, (a, b, c), _ = instance(seed, 3)
    for s in nat_trans_set(a, c, 3):
        for t in nat_trans_set(b, c, 3):
            pb, q1, q2 = functor_pullback(s, t)
            assert check_functor(pb).ok
            assert compose_nat(s, q1).tables == compose_nat(t, q2).tables
            for x in range(p.n_objects):
                brute = [(u, v) for u in range(a.sizes[x]) for v in range(b.sizes[x]) if s.components[x].table[u] == t.components[x].table[v]]
                assert list(zip(q1.components[x].table, q2.components[x].table)) == brute
        im, epi, mono = functor_image(s)
        assert is_effective_epi(epi) and is_mono(mono)
        assert compose_nat(mono, epi).tables == s.tables


def brute_subfunctors(f):
    c = f.procat.levels[f.level]
    n = c.n_objects
    out = []
    for mask in product(*[range(2 ** f.sizes[x]) for x in range(n)]):
        sub = [{a for a in range(f.sizes[x]) if mask[x] >> a & 1} for x in range(n)]
        if all(f.on_arrows[x][y][phi][a] in sub[y] for x in range(n) for y in range(n) for phi in range(c.homs[x][y].size) for a in sub[x]):
            out.append(tuple(frozenset(s) for s in sub))
    return sorted(out, key=lambda s: (sum(map(len, s)), [sorted(t) for t in s]))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_subfunctor_lattice_matches_brute_force(seed):
    p, (f,), _ = instance(seed, 1, 3)
    lib = [s.subset for s in subfunctor_lattice(f)]
    brute = brute_subfunctors(f)
    # frozensets only compare by inclusion, so compare as sets, not sorted lists
    assert len(lib) == len(set(lib)) == len(brute)
    assert set(lib) == set(brute)
    for s in subfunctor_lattice(f):
        assert s.is_closed()


def test_bs3_regular_rep_has_two_subfunctors(bs3):
    assert len(subfunctor_lattice(corepresentable(bs3, 0, 0))) == 2


def test_generated_subfunctor_is_orbit():
    p = cyclic_chain([2, 4])
    h = corepresentable(p, 0, 1)
    s = generated_subfunctor(h, [(0, 1)])
    assert s.subset == (frozenset(range(4)),)
    bad = Subfunctor(h, (frozenset({0}),))
    assert not bad.is_closed() and bad.first_open_arrow() is not None


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_equivalence_closure_against_union_find(seed):
    p, (f,), rng = instance(seed, 1, 3)
    seeds_ = [(x, rng.randrange(f.sizes[x]), rng.randrange(f.sizes[x])) for x in range(p.n_objects) if f.sizes[x]]
    r = equivalence_closure(f, seeds_)
    assert r.is_closed()
    # oracle: union-find fixpoint over arrow images
    c = f.procat.levels[f.level]
    pairs = {x: [(a, b) for xx, a, b in seeds_ if xx == x] for x in range(p.n_objects)}
    while True:
        classes = {x: uf_classes(f.sizes[x], pairs[x]) for x in range(p.n_objects)}
        new = False
        for x in range(p.n_objects):
            for cls_ in classes[x]:
                for y in range(p.n_objects):
                    for phi in range(c.homs[x][y].size):
                        tab = f.on_arrows[x][y][phi]
                        for a in cls_[1:]:
                            pr = (tab[cls_[0]], tab[a])
                            same = any(pr[0] in k and pr[1] in k for k in uf_classes(f.sizes[y], pairs[y]))
                            if not same:
                                pairs[y].append(pr)
                                new = True
        if not new:
            break
    for x in range(p.n_objects):
        m = f.sizes[x]
        expected = {pair_index(a, b, m) for k in uf_classes(m, pairs[x]) for a in k for b in k}
        assert r.subset[x] == expected


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_quotient_by_kernel_pair_recovers_image(seed):
    p, (a, b), _ = instance(seed, max_size=3)
    for t in nat_trans_set(a, b, 4):
        _, kp = kernel_pair_subfunctor(t)
        q, proj = quotient_by_equiv_subfunctor(a, kp)
        im, _, _ = functor_image(t)
        assert find_isomorphism(q, im) is not None
        if is_effective_epi(t):
            assert is_coequaliser_of_kernel_pair(t)


def test_quotient_rejects_non_equivalence():
    p = cyclic_chain([2])
    h = corepresentable(p, 0, 0)
    prod = functor_product(h, h)[0]
    # the pairs {(0,1), (1,0)} form a closed subfunctor but are not reflexive
    r = Subfunctor(prod, (frozenset({pair_index(0, 1, 2), pair_index(1, 0, 2)}),))
    assert r.is_closed()
    with pytest.raises(ValidationError) as exc:
        quotient_by_equiv_subfunctor(h, r)
    assert exc.value.law == "reflexivity"


def test_refine_and_coarsen_round_trip():
    p = cyclic_chain([2, 4, 8])
    sign = CtsFunctor.from_function(p, 0, [2], lambda x, y, f, a: (a + f) % 2)
    top = sign.refine(2)
    assert top.level == 2 and top.minimal_level() == 0
    assert top.coarsen(0) == sign
    h4 = corepresentable(p, 0, 1)
    assert h4.refine(2).minimal_level() == 1
    with pytest.raises(ShapeError):
        h4.coarsen(0)


def test_functors_on_different_procats_do_not_mix():
    a = terminal_functor(cyclic_chain([2]))
    b = terminal_functor(cyclic_chain([3]))
    with pytest.raises(ShapeError):
        functor_product(a, b)


def test_search_budget_yields_a_prefix():
    p = build_bg(symmetric_group(3))
    h = corepresentable(p, 0, 0)
    hh = functor_product(h, h)[0]
    full = nat_trans_set(h, hh)
    assert len(full) == 36
    part = nat_trans_set(h, hh, budget=5)
    assert [t.tables for t in part] == [t.tables for t in full[: len(part)]]
    assert len(nat_trans_set(h, hh, limit=7)) == 7


def test_propagate_search_injective_needs_equal_sizes():
    assert list(propagate_search([2], [3], [[]], injective=True)) == []
    assert len(list(propagate_search([2], [2], [[]], injective=True))) == 2
