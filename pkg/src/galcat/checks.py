"""Seeded verification suites over ``Fun^cts(Π, Fin)``.

Every suite takes a presentation and a seed and returns a
:class:`ValidationReport`; the same inputs always give the same report.
"""

from __future__ import annotations

import random
from itertools import product as iproduct
from typing import Callable, Optional

from . import finset as fs
from .exodromy import ev, full_faithfulness_check, psi_coinitiality_check, realize, reconstruction_check
from .funcat import (
    CtsFunctor,
    NatTrans,
    Subfunctor,
    all_functors,
    check_functor,
    compose_nat,
    constant_functor,
    equivalence_closure,
    functor_coequaliser,
    functor_coproduct,
    functor_equaliser,
    functor_product,
    functor_pullback,
    is_coequaliser_of_kernel_pair,
    is_effective_epi,
    is_isomorphic,
    is_mono,
    kernel_pair_subfunctor,
    nat_trans_set,
    quotient_by_equiv_subfunctor,
    random_functor,
)
from .galois import (
    MORPHISM_BUDGET,
    GaloisPresentation,
    faithfulness_check,
    joint_conservativity_check,
    mono_epi_detection_check,
    pi1,
    pretopos_morphism_check,
    presentation_family,
    subobject_injectivity_check,
)
from .opcompact import opcompactness_check, random_chain
from .procat import ProCat, validate_procat
from .report import GalcatError, ValidationReport

SAMPLE_MAPS = 6


def _maps(a: CtsFunctor, b: CtsFunctor, limit: int = SAMPLE_MAPS) -> list[NatTrans]:
    return nat_trans_set(a, b, limit, MORPHISM_BUDGET)


def _random_relation(a: CtsFunctor, rng: random.Random) -> Subfunctor:
    """The equivalence relation subfunctor of ``a x a`` generated by a few random pairs."""
    n = a.procat.n_objects
    seeds = []
    for _ in range(rng.randint(0, 2)):
        x = rng.randrange(n)
        if a.sizes[x]:
            seeds.append((x, rng.randrange(a.sizes[x]), rng.randrange(a.sizes[x])))
    return equivalence_closure(a, seeds)


def pretopos_axioms(p: ProCat, rng: random.Random, max_size: int = 3) -> ValidationReport:
    """Finite limits, disjoint universal coproducts, effective equivalence
    relations and universal effective epimorphisms, on random objects of
    ``Fun^cts(p, Fin)``. Universal properties are checked by counting maps."""
    rep = ValidationReport("pretopos axioms")
    lv = p.top
    a, b, c = (random_functor(p, lv, max_size, rng) for _ in range(3))
    one = constant_functor(p, 1, lv)
    # (1) finite limits
    for k, x in enumerate((a, b, c)):
        rep.tick()
        if len(nat_trans_set(x, one)) != 1:
            rep.add("terminal object", (k,))
    prod, p1, p2 = functor_product(a, b)
    pairs = {(compose_nat(p1, t).tables, compose_nat(p2, t).tables) for t in nat_trans_set(c, prod)}
    rep.tick()
    if pairs != {(u.tables, v.tables) for u in nat_trans_set(c, a) for v in nat_trans_set(c, b)}:
        rep.add("products", (a.sizes, b.sizes, c.sizes), "Hom(C, A x B) is not Hom(C, A) x Hom(C, B)")
    ab = _maps(a, b)
    for s, t in iproduct(ab[:3], ab[:3]):
        e, inc = functor_equaliser(s, t)
        via = {compose_nat(inc, u).tables for u in nat_trans_set(c, e)}
        direct = {u.tables for u in nat_trans_set(c, a) if compose_nat(s, u).tables == compose_nat(t, u).tables}
        rep.tick()
        if via != direct or not is_mono(inc):
            rep.add("equalisers", (s.tables, t.tables))
    # (2) coproducts: universal property, disjointness, stability under pullback
    cop, i1, i2 = functor_coproduct(a, b)
    outs = {(compose_nat(t, i1).tables, compose_nat(t, i2).tables) for t in nat_trans_set(cop, c)}
    rep.tick()
    if outs != {(u.tables, v.tables) for u in nat_trans_set(a, c) for v in nat_trans_set(b, c)}:
        rep.add("coproducts", (a.sizes, b.sizes, c.sizes))
    meet, _, _ = functor_pullback(i1, i2)
    rep.tick()
    if meet.total_size or not (is_mono(i1) and is_mono(i2)):
        rep.add("disjoint coproducts", (a.sizes, b.sizes))
    for f in _maps(c, cop, 3):
        c1, q1, _ = functor_pullback(f, i1)
        c2, q2, _ = functor_pullback(f, i2)
        back = []
        for x in range(p.n_objects):
            back.append(q1.components[x].table + q2.components[x].table)
        rep.tick()
        if any(sorted(t) != list(range(c.sizes[x])) for x, t in enumerate(back)):
            rep.add("universal coproducts", f.tables, "pullbacks of the summands do not partition C")
    # (3) equivalence relations are effective
    r = _random_relation(a, rng)
    q, proj = quotient_by_equiv_subfunctor(a, r)
    _, kp = kernel_pair_subfunctor(proj)
    rep.tick()
    if kp.subset != r.subset:
        rep.add("effective equivalence relations", tuple(sorted(s) for s in r.subset))
    # (4) epimorphisms are universal effective epimorphisms
    for t in _maps(a, b) + [proj]:
        src, tgt = t.source, t.target
        cp, j1, j2 = functor_coproduct(tgt, tgt)
        _, qq = functor_coequaliser(compose_nat(j1, t), compose_nat(j2, t))
        epi = compose_nat(qq, j1).tables == compose_nat(qq, j2).tables
        rep.tick()
        if epi != is_effective_epi(t):
            rep.add("epimorphisms are surjective", t.tables)
        if not epi:
            continue
        rep.tick()
        if not is_coequaliser_of_kernel_pair(t):
            rep.add("effective epimorphisms", t.tables)
        for s in _maps(c, tgt, 3):
            _, _, pr = functor_pullback(t, s)
            rep.tick()
            if not is_effective_epi(pr):
                rep.add("universal epimorphisms", (t.tables, s.tables))
    return rep


def suite_pretopos(g: GaloisPresentation, seed: int = 0, rounds: int = 4) -> ValidationReport:
    rep = ValidationReport("pretopos")
    rng = random.Random(seed)
    for k in range(rounds):
        rep.extend(pretopos_axioms(g.base, rng), prefix=f"round {k}: ")
    fam = presentation_family(g)
    samples = [a for a in fam if a.total_size <= 12][:6]
    for i in range(g.n_points):
        rep.extend(pretopos_morphism_check(g, i, samples))
    return rep


def suite_lemmas(g: GaloisPresentation, seed: int = 0, rounds: int = 4) -> ValidationReport:
    """Faithfulness, finite homs, injectivity on subobjects, mono/epi detection."""
    rep = ValidationReport("lemmas")
    rng = random.Random(seed)
    p = g.base
    rep.extend(joint_conservativity_check(g))
    objs = [a for a in presentation_family(g) if a.total_size <= 8][:5]
    objs += [random_functor(p, p.top, 3, rng) for _ in range(rounds)]
    for i, a in enumerate(objs):
        rep.extend(subobject_injectivity_check(g, a), prefix=f"object {i}: ")
        for j, b in enumerate(objs):
            if a.total_size * b.total_size > 64:
                continue
            rep.extend(faithfulness_check(g, a, b), prefix=f"pair {(i, j)}: ")
            n = len(nat_trans_set(a, b))
            bound = 1
            for x in g.fibre_points:
                bound *= b.on_objects[x].size ** a.on_objects[x].size
            rep.tick()
            if n > bound:
                rep.add("finite homs", (i, j), f"{n} maps exceed the fibre bound {bound}")
            for t in _maps(a, b):
                rep.extend(mono_epi_detection_check(g, t), prefix=f"pair {(i, j)}: ")
    return rep


def realize_round_trips(g: GaloisPresentation, max_size: int = 3) -> ValidationReport:
    """``realize`` then ``ev`` gives back every functor on ``Π₁`` with values at most ``max_size``."""
    rep = ValidationReport("realize round trips")
    pi = pi1(g)
    # a finite chain has a top level, so every continuous functor lives there
    for k, f in enumerate(all_functors(pi, pi.top, max_size)):
        rep.tick()
        try:
            tr = realize(g, f)
        except GalcatError as exc:
            rep.add("realize", (k, f.sizes), str(exc))
            continue
        if not check_functor(tr.quotient).ok or not is_isomorphic(ev(g, tr.quotient), tr.input):
            rep.add("ev(realize(F)) = F", (k, f.sizes))
    return rep


def family_full_faithfulness(g: GaloisPresentation, max_total: int = 12) -> ValidationReport:
    rep = ValidationReport("full faithfulness")
    fam = [a for a in presentation_family(g) if a.total_size <= max_total]
    for i, a in enumerate(fam):
        for j, b in enumerate(fam):
            rep.extend(full_faithfulness_check(g, a, b, constructive=a.total_size * b.total_size <= 36), prefix=f"pair {(i, j)}: ")
    return rep


def suite_exodromy(g: GaloisPresentation, seed: int = 0, window: int = 6) -> ValidationReport:
    rep = ValidationReport("exodromy")
    rep.extend(realize_round_trips(g))
    rep.extend(family_full_faithfulness(g))
    if g.fibre_points == tuple(range(g.base.n_objects)):
        rep.extend(reconstruction_check(g.base, generator_bound=g.generator_bound, max_members=g.max_members))
    if g.n_points >= 2:
        rep.extend(psi_coinitiality_check(g, window))
    return rep


def suite_opcompact(g: GaloisPresentation, seed: int = 0, rounds: int = 6) -> ValidationReport:
    rep = ValidationReport("opcompact")
    rng = random.Random(seed)
    p = g.base
    for k in range(rounds):
        d = random_chain(p, rng, rng.randint(1, 5), 4, surjective=k % 2 == 0)
        f = random_functor(p, p.top, 3, rng)
        rep.extend(opcompactness_check(d, f).report(), prefix=f"chain {k}: ")
    return rep


SUITES: dict[str, Callable[..., ValidationReport]] = {
    "pretopos": suite_pretopos,
    "lemmas": suite_lemmas,
    "exodromy": suite_exodromy,
    "opcompact": suite_opcompact,
}


def run_suites(g: GaloisPresentation, names: list[str], seed: int = 0, window: int = 6) -> list[ValidationReport]:
    out = [validate_procat(g.base)]
    out[0].subject = "procat"
    if not out[0].ok:
        return out
    for name in names:
        fn = SUITES[name]
        out.append(fn(g, seed=seed, window=window) if name == "exodromy" else fn(g, seed=seed))
    return out
