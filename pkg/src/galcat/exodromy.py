"""Evaluation ``ev: Fun^cts(Π, Fin) -> Fun^cts(Π₁, Fin)`` and its inverse, built step by step.

``realize`` runs the essential-surjectivity argument as an algorithm: cover
``F`` by corepresentables, take the kernel pair of the cover, lift it to a
subobject of ``A x A`` upstairs, and quotient. ``descend`` runs the fullness
argument: a transformation ``ev(A) -> ev(B)`` is realized on an epimorphic
cover of ``A`` and then pushed down through the kernel pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Iterator, Optional, Sequence

from .finset import FinMap, FinSet, pair_index, pullback
from .funcat import (
    CtsFunctor,
    NatTrans,
    Subfunctor,
    check_nat_trans,
    common_level,
    compose_nat,
    coproduct_many,
    corepresentable,
    functor_image,
    functor_product,
    identity_nat,
    is_effective_epi,
    kernel_pair_subfunctor,
    nat_trans_set,
    quotient_by_equiv_subfunctor,
    subfunctor_relations,
)
from .galois import (
    GaloisPresentation,
    canonical_transformation,
    fibre_tuple,
    pi1,
    presentation_family,
    reconstructed_procat,
)
from .procat import ProCat, validate_procat
from .report import RealizationError, ShapeError, ValidationReport, WindowExhausted


def ev(g: GaloisPresentation, a: CtsFunctor) -> CtsFunctor:
    """Restrict ``a`` to the fibre points, as a functor on ``Π₁``."""
    if a.procat != g.base:
        raise ShapeError("functor does not live on the presentation's base ProCat")
    pts = g.fibre_points
    arrows = tuple(tuple(a.on_arrows[x][y] for y in pts) for x in pts)
    return CtsFunctor(pi1(g), a.level, tuple(a.on_objects[x] for x in pts), arrows)


def ev_nat(g: GaloisPresentation, t: NatTrans) -> NatTrans:
    return NatTrans(ev(g, t.source), ev(g, t.target), tuple(t.components[x] for x in g.fibre_points))


def yoneda_map(a: CtsFunctor, x: int, e: int, level: Optional[int] = None) -> NatTrans:
    """``Hom_level(x, -) -> a`` sending ``id_x`` to ``e``."""
    lv = a.level if level is None else level
    a = a.refine(lv)
    h = corepresentable(a.procat, x, lv)
    comps = tuple(
        FinMap(h.on_objects[y], a.on_objects[y], tuple(a.on_arrows[x][y][phi][e] for phi in range(h.on_objects[y].size)))
        for y in range(a.procat.n_objects)
    )
    return NatTrans(h, a, comps)


def copairing(parts: Sequence[NatTrans], source: CtsFunctor, target: CtsFunctor) -> NatTrans:
    """``[t_1, ..., t_k]: ∐ A_i -> B`` on the block-ordered coproduct ``source``."""
    n = target.procat.n_objects
    comps = []
    for y in range(n):
        tab: list[int] = []
        for t in parts:
            tab.extend(t.components[y].table)
        comps.append(FinMap(source.on_objects[y], target.on_objects[y], tuple(tab)))
    return NatTrans(source, target, tuple(comps))


def coproduct_of_maps(maps: Sequence[NatTrans], source: CtsFunctor, target: CtsFunctor) -> NatTrans:
    """``∐ f_i: ∐ D_i -> ∐ B_i`` for block-ordered coproducts."""
    n = target.procat.n_objects
    comps = []
    for y in range(n):
        tab: list[int] = []
        off = 0
        for f in maps:
            tab.extend(off + v for v in f.components[y].table)
            off += f.target.on_objects[y].size
        comps.append(FinMap(source.on_objects[y], target.on_objects[y], tuple(tab)))
    return NatTrans(source, target, tuple(comps))


# -- covers --------------------------------------------------------------------------


def canonical_cover(g: GaloisPresentation, f: CtsFunctor) -> tuple[CtsFunctor, NatTrans, list[tuple[int, int]]]:
    """``A = ∐_{i, e ∈ F(i)} Hom_n(x_i, -)`` with the map ``ev(A) -> F``
    sending ``φ`` in block ``(i, e)`` to ``F(φ)(e)``.

    Returns ``(A, covering_map, blocks)``. Starts at ``F``'s level and
    refines while the map fails to be surjective.
    """
    pi = pi1(g)
    if f.procat != pi:
        raise RealizationError("input", "functor is not over this presentation's fundamental category")
    base = g.base
    last = None
    for n in range(f.level, base.depth):
        fn = f.refine(n)
        blocks = [(i, e) for i in range(g.n_points) for e in range(fn.sizes[i])]
        parts = [corepresentable(base, g.fibre_points[i], n) for i, _ in blocks]
        a, _ = coproduct_many(parts, base, n)
        eva = ev(g, a)
        comps = []
        for j in range(g.n_points):
            tab = []
            for i, e in blocks:
                tab.extend(fn.on_arrows[i][j][phi][e] for phi in range(pi.levels[n].homs[i][j].size))
            comps.append(FinMap(eva.on_objects[j], fn.on_objects[j], tuple(tab)))
        cov = NatTrans(eva, fn, tuple(comps))
        if is_effective_epi(cov):
            return a, cov, blocks
        last = next(j for j, m in enumerate(comps) if not m.is_surjective())
    raise RealizationError("cover", f"no level makes the cover surjective; component {last} fails")


# -- subobjects ------------------------------------------------------------------------


def subobject_realization(g: GaloisPresentation, a: CtsFunctor, s: Subfunctor) -> Subfunctor:
    """Lift a subfunctor ``s`` of ``ev(a)`` to a subfunctor of ``a``.

    Cover ``s`` by one corepresentable per element, map the cover to ``a``
    by Yoneda, and take the image.
    """
    eva = ev(g, a)
    amb = common_level(s.ambient, eva)
    if amb[0] != amb[1]:
        raise RealizationError("subobject", "subfunctor is not contained in ev(A)")
    elements = [(i, e) for i in range(g.n_points) for e in sorted(s.subset[i])]
    maps = [yoneda_map(a, g.fibre_points[i], e) for i, e in elements]
    src, _ = coproduct_many([m.source for m in maps], a.procat, a.level)
    im, _, mono = functor_image(copairing(maps, src, a))
    lifted = Subfunctor(a, tuple(frozenset(mono.components[y].table) for y in range(a.procat.n_objects)))
    for i, x in enumerate(g.fibre_points):
        if lifted.subset[x] != s.subset[i]:
            raise RealizationError("subobject", f"lift differs from the subfunctor at fibre index {i}")
    if not lifted.is_closed():
        raise RealizationError("subobject", f"lift is not arrow-closed at {lifted.first_open_arrow()}")
    return lifted


# -- realization ------------------------------------------------------------------------


@dataclass
class RealizationTrace:
    input: CtsFunctor
    covering_object: CtsFunctor
    covering_map: NatTrans
    blocks: list[tuple[int, int]]
    kernel_subobject: Subfunctor
    quotient: CtsFunctor
    projection: NatTrans
    iso_witness: NatTrans

    @property
    def cover_size(self) -> int:
        return self.covering_object.total_size

    def summary(self) -> list[str]:
        kp = self.kernel_subobject
        return [
            f"input: values {list(self.input.sizes)} at level {self.input.level}",
            f"cover: {len(self.blocks)} corepresentable blocks, values {list(self.covering_object.sizes)}, total {self.cover_size}",
            f"covering map surjective: {is_effective_epi(self.covering_map)}",
            f"kernel subobject: {[len(s) for s in kp.subset]} pairs per object",
            f"quotient: values {list(self.quotient.sizes)}",
            f"iso witness: {[list(m.table) for m in self.iso_witness.components]}",
        ]


def realize(g: GaloisPresentation, f: CtsFunctor) -> RealizationTrace:
    """Find ``C`` in ``Fun^cts(Π, Fin)`` with ``ev(C) ≅ f``, keeping every stage."""
    a, cov, blocks = canonical_cover(g, f)
    f = cov.target
    # kernel pair of the cover, downstairs, as a subfunctor of ev(A) x ev(A)
    _, kp = kernel_pair_subfunctor(cov)
    aa = functor_product(a, a)[0]
    ev_aa = ev(g, aa)
    if ev_aa.on_objects != kp.ambient.on_objects:
        raise RealizationError("kernel pair", "ev(A x A) and ev(A) x ev(A) disagree")
    r = Subfunctor(ev_aa, kp.subset)
    b = subobject_realization(g, aa, r)
    for x, rel in enumerate(subfunctor_relations(a, b)):
        bad = rel.first_violation()
        if bad is not None:
            raise RealizationError("equivalence relation", f"{bad[0]} fails at object {x}, witness {bad[1]}")
    c, proj = quotient_by_equiv_subfunctor(a, b)
    evc = ev(g, c)
    comps = []
    for j, x in enumerate(g.fibre_points):
        m: dict[int, int] = {}
        for u, cls_ in enumerate(proj.components[x].table):
            v = cov.components[j].table[u]
            if m.setdefault(cls_, v) != v:
                raise RealizationError("iso", f"cover not constant on a class at fibre index {j}")
        tab = tuple(m[k] for k in range(c.on_objects[x].size))
        comps.append(FinMap(evc.on_objects[j], f.on_objects[j], tab))
    iso = NatTrans(evc, f, tuple(comps))
    if not all(m.is_bijective() for m in comps):
        raise RealizationError("iso", "induced map ev(C) -> F is not bijective")
    if not check_nat_trans(iso).ok:
        raise RealizationError("iso", "induced map ev(C) -> F is not natural")
    return RealizationTrace(f, a, cov, blocks, b, c, proj, iso)


# -- fullness ------------------------------------------------------------------------


@dataclass
class PointedDiagram:
    """Objects ``(C, c)`` of ``({h_∐x} ↓ ev)`` pointed at every element of ``ev(A)``.

    ``nodes`` enumerates candidates smallest first: ``A`` itself with its own
    points, then covers by corepresentables at increasing levels.
    """

    presentation: GaloisPresentation
    source: CtsFunctor
    pointing: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        g, a = self.presentation, self.source
        self.pointing = [(i, e) for i in range(g.n_points) for e in range(a.on_objects[g.fibre_points[i]].size)]

    def nodes(self, start_level: int) -> Iterator[tuple[CtsFunctor, NatTrans, list[NatTrans]]]:
        g, a = self.presentation, self.source
        yield a, identity_nat(a), []
        for n in range(max(start_level, a.level), g.base.depth):
            maps = [yoneda_map(a, g.fibre_points[i], e, n) for i, e in self.pointing]
            c, _ = coproduct_many([m.source for m in maps], g.base, n)
            yield c, copairing(maps, c, a.refine(n)), maps


def local_fullness_witness(g: GaloisPresentation, a: CtsFunctor, b: CtsFunctor, alpha: NatTrans) -> tuple[CtsFunctor, NatTrans, NatTrans]:
    """``(C, f, h)`` with ``f: C ↠ A`` effective epi and ``ev(h) = α ∘ ev(f)``."""
    want = alpha.tables
    diag = PointedDiagram(g, a)
    for c, f, maps in diag.nodes(max(a.level, b.level, alpha.source.level, alpha.target.level)):
        if not maps:
            for h in nat_trans_set(a, b):
                if fibre_tuple(g, h) == want:
                    return a, f, h
            continue
        if not is_effective_epi(f):
            continue
        n = c.level
        bn = b.refine(n)
        pts = [alpha.components[i].table[e] for i, e in diag.pointing]
        hmaps = [yoneda_map(bn, g.fibre_points[i], v, n) for (i, _), v in zip(diag.pointing, pts)]
        h = copairing(hmaps, c, bn)
        lhs = fibre_tuple(g, h)
        rhs = tuple(tuple(alpha.components[j].table[u] for u in f.components[x].table) for j, x in enumerate(g.fibre_points))
        if lhs == rhs:
            return c, f, h
    raise WindowExhausted("no pointed cover realizes the transformation")


def descend(g: GaloisPresentation, a: CtsFunctor, b: CtsFunctor, alpha: NatTrans) -> NatTrans:
    """The transformation ``A -> B`` whose image under ``ev`` is ``alpha``."""
    c, f, h = local_fullness_witness(g, a, b, alpha)
    a_c, b_c = f.target, h.target
    comps = []
    for y in range(a.procat.n_objects):
        m: dict[int, int] = {}
        for u, v in zip(f.components[y].table, h.components[y].table):
            # h is constant on the kernel pair of f
            if m.setdefault(u, v) != v:
                raise RealizationError("descent", f"h does not factor through f at object {y}")
        comps.append(FinMap(a_c.on_objects[y], b_c.on_objects[y], tuple(m[u] for u in range(a_c.on_objects[y].size))))
    out = NatTrans(a, b, tuple(comps))
    if not check_nat_trans(out).ok:
        raise RealizationError("descent", "descended map is not natural")
    if fibre_tuple(g, out) != alpha.tables:
        raise RealizationError("descent", "descended map does not evaluate to alpha")
    return out


def full_faithfulness_check(g: GaloisPresentation, a: CtsFunctor, b: CtsFunctor, constructive: bool = True) -> ValidationReport:
    """``Hom(A, B) -> Hom(ev A, ev B)`` is a bijection, by enumerating both sides.

    With ``constructive`` every downstairs map is also lifted by :func:`descend`.
    """
    rep = ValidationReport("full faithfulness")
    left = nat_trans_set(a, b)
    right = nat_trans_set(ev(g, a), ev(g, b))
    images: dict[tuple, int] = {}
    for k, t in enumerate(left):
        rep.tick()
        key = fibre_tuple(g, t)
        if key in images:
            rep.add("faithful", (images[key], k))
        images.setdefault(key, k)
    rset = {t.tables for t in right}
    for key in images:
        rep.tick()
        if key not in rset:
            rep.add("ev lands in Hom(ev A, ev B)", key)
    for k, alpha in enumerate(right):
        rep.tick()
        if alpha.tables not in images:
            rep.add("full", (k,), "no preimage among Hom(A, B)")
        elif constructive:
            try:
                descend(g, a, b, alpha)
            except (RealizationError, WindowExhausted) as exc:
                rep.add("full (constructive)", (k,), str(exc))
    rep.tick()
    if len(left) != len(right) and not rep.violations:
        rep.add("cardinality", (len(left), len(right)))
    return rep


# -- reconstruction ------------------------------------------------------------------------


def reconstruction_check(p: ProCat, **kw) -> ValidationReport:
    """``Π₁`` of ``Fun^cts(p, Fin)`` with every evaluation is isomorphic to ``p``.

    ``Π₁`` is rebuilt from transformations of evaluation functors over test
    families; the comparison sends an arrow ``φ`` to ``(A(φ))_A``.
    """
    rep = ValidationReport("reconstruction")
    rep.extend(validate_procat(p), prefix="input: ")
    if not rep.ok:
        return rep
    g = GaloisPresentation.all_points(p, **kw)
    q, families = reconstructed_procat(g)
    rep.extend(validate_procat(q), prefix="reconstructed: ")
    n = p.n_objects
    maps = []
    for k in range(p.depth):
        fam = families[k]
        c, d = p.levels[k], q.levels[k]
        sols = _solutions_in_order(q, k, fam, n)
        lvl = {}
        for x in range(n):
            for y in range(n):
                pos = {s: m for m, s in enumerate(sols[(x, y)])}
                img = [pos.get(canonical_transformation(fam, x, y, f)) for f in range(c.homs[x][y].size)]
                rep.tick()
                if None in img or len(set(img)) != len(img) or len(img) != d.homs[x][y].size:
                    rep.add("hom bijection", (k, x, y), f"{c.homs[x][y].size} arrows vs {d.homs[x][y].size} transformations")
                    continue
                lvl[(x, y)] = img
        maps.append(lvl)
        if not rep.ok:
            continue
        for x in range(n):
            rep.tick()
            if lvl[(x, x)][c.identities[x]] != d.identities[x]:
                rep.add("identities", (k, x))
            for y in range(n):
                for z in range(n):
                    for gg in range(c.homs[y][z].size):
                        for ff in range(c.homs[x][y].size):
                            rep.tick()
                            lhs = lvl[(x, z)][c.composition[x][y][z][gg][ff]]
                            rhs = d.composition[x][y][z][lvl[(y, z)][gg]][lvl[(x, y)][ff]]
                            if lhs != rhs:
                                rep.add("composition", (k, (y, z, gg), (x, y, ff)))
    if rep.ok:
        for k in range(p.depth - 1):
            for x in range(n):
                for y in range(n):
                    for f in range(p.levels[k + 1].homs[x][y].size):
                        rep.tick()
                        lhs = q.transitions[k][x][y].table[maps[k + 1][(x, y)][f]]
                        rhs = maps[k][(x, y)][p.transitions[k][x][y].table[f]]
                        if lhs != rhs:
                            rep.add("transitions", (k, x, y, f))
    return rep


def _solutions_in_order(q: ProCat, k: int, fam, n: int) -> dict:
    from .galois import equaliser_transformations, family_morphisms

    morphs = family_morphisms(fam)
    return {(x, y): equaliser_transformations(fam, x, y, morphs) for x in range(n) for y in range(n)}


# -- coinitiality of Ψ -----------------------------------------------------------------


def _diagonal_object(g: GaloisPresentation, a: CtsFunctor, point: Sequence[int]):
    """``Ψ((A, a_1), ..., (A, a_n))`` with the fold map to ``A``."""
    n = g.n_points
    cop, ins = coproduct_many([a] * n, a.procat, a.level)
    psi = tuple(ins[i].components[x].table[point[i]] for i, x in enumerate(g.fibre_points))
    fold = copairing([identity_nat(a)] * n, cop, a)
    return cop, ins, psi, fold


@dataclass
class OverObject:
    """An object ``Ψ(B, b) -> (A, a)`` of the comma category."""

    parts: tuple[CtsFunctor, ...]
    points: tuple[int, ...]
    total: CtsFunctor
    insertions: list[NatTrans]
    to_a: NatTrans

    def psi(self, g: GaloisPresentation) -> tuple[int, ...]:
        return tuple(self.insertions[i].components[x].table[self.points[i]] for i, x in enumerate(g.fibre_points))


def over_objects(g: GaloisPresentation, a: CtsFunctor, point: Sequence[int], pieces: Sequence[CtsFunctor], limit: int = 6) -> list[OverObject]:
    """Objects of ``(Ψ ↓ (A, a))`` built from the given pieces, the diagonal one first."""
    cop, ins, psi, fold = _diagonal_object(g, a, point)
    out = [OverObject(tuple([a] * g.n_points), tuple(point), cop, ins, fold)]
    pts = g.fibre_points
    for parts in iproduct(pieces, repeat=g.n_points):
        if len(out) >= limit:
            break
        total, insb = coproduct_many(list(parts), a.procat, max(p.level for p in parts))
        ranges = [range(parts[i].on_objects[x].size) for i, x in enumerate(pts)]
        for b in iproduct(*ranges):
            psib = tuple(insb[i].components[x].table[b[i]] for i, x in enumerate(pts))
            for u in nat_trans_set(total, a, 8, 4000):
                if all(u.components[x].table[psib[i]] == point[i] for i, x in enumerate(pts)):
                    out.append(OverObject(tuple(parts), tuple(b), total, insb, u))
                    break
            if len(out) >= limit:
                break
    return out


def connect(g: GaloisPresentation, a: CtsFunctor, point: Sequence[int], u: OverObject, v: OverObject):
    """The node ``Ψ(D, d)`` with ``D_i = B_i ×_A C_i`` and ``d_i = (b_i, c_i)``,
    with its maps to ``u`` and ``v``."""
    n = g.n_points
    pts = g.fibre_points
    d_parts, pr1s, pr2s, d_pts = [], [], [], []
    for i in range(n):
        bu = compose_nat(u.to_a, u.insertions[i])
        cv = compose_nat(v.to_a, v.insertions[i])
        from .funcat import functor_pullback

        dpb, p1, p2 = functor_pullback(bu, cv)
        d_parts.append(dpb)
        pr1s.append(p1)
        pr2s.append(p2)
        x = pts[i]
        pairs = list(zip(p1.components[x].table, p2.components[x].table))
        d_pts.append(pairs.index((u.points[i], v.points[i])))
    lv = max(p.level for p in d_parts)
    total, ins = coproduct_many(d_parts, a.procat, lv)
    to_u = coproduct_of_maps(pr1s, total, u.total)
    to_v = coproduct_of_maps(pr2s, total, v.total)
    w = OverObject(tuple(d_parts), tuple(d_pts), total, ins, compose_nat(u.to_a, to_u))
    return w, to_u, to_v


def psi_coinitiality_check(g: GaloisPresentation, window: int = 6, max_nodes: int = 12, per_node: int = 4) -> ValidationReport:
    """Within the window: every ``(Ψ ↓ (A, a))`` is nonempty (diagonal object)
    and any two of its objects are joined through the fibre-product node."""
    rep = ValidationReport("Ψ coinitial")
    pts = g.fibre_points
    objs = [a for a in presentation_family(g) if 0 < a.total_size <= window]
    pieces = objs[: max(1, g.base.n_objects)]
    count = 0
    for a in objs:
        ranges = [range(a.on_objects[x].size) for x in pts]
        for point in iproduct(*ranges):
            if count >= max_nodes:
                return rep
            count += 1
            cop, ins, psi, fold = _diagonal_object(g, a, point)
            rep.tick()
            if not check_nat_trans(fold).ok or any(fold.components[x].table[psi[i]] != point[i] for i, x in enumerate(pts)):
                rep.add("nonempty", (a.sizes, point))
            overs = over_objects(g, a, point, pieces, per_node)
            for i1 in range(len(overs)):
                for i2 in range(i1, len(overs)):
                    u, v = overs[i1], overs[i2]
                    try:
                        w, to_u, to_v = connect(g, a, point, u, v)
                    except ValueError:
                        rep.add("connected", (a.sizes, point, i1, i2), "point (b_i, c_i) missing from the fibre product")
                        continue
                    rep.tick()
                    ok = (
                        check_nat_trans(to_u).ok
                        and check_nat_trans(to_v).ok
                        and tuple(to_u.components[x].table[w.psi(g)[i]] for i, x in enumerate(pts)) == u.psi(g)
                        and tuple(to_v.components[x].table[w.psi(g)[i]] for i, x in enumerate(pts)) == v.psi(g)
                        and compose_nat(u.to_a, to_u).tables == compose_nat(v.to_a, to_v).tables
                    )
                    if not ok:
                        rep.add("connected", (a.sizes, point, i1, i2))
    return rep
