"""Hom(-, F) turns a chain limit into a colimit, with explicit witnesses.

A :class:`ChainDiagram` is ``D(0) <- D(1) <- ... <- D(L)`` in
``Fun^cts(Π, Fin)``; its limit is ``D(L)``. The canonical map

    colim_i Hom(D(i), F) -> Hom(D(L), F)

is checked to be injective (two maps out of ``D(i)`` that agree on the limit
already agree at some ``D(j)``) and surjective, where the lift of a map out
of the limit is found the long way: pick a pointwise lift, then walk up the
chain until the set ``Y_k`` of naturality failures is empty.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .finset import FinMap, FinSet
from .funcat import (
    CtsFunctor,
    NatTrans,
    check_nat_trans,
    common_level,
    compose_nat,
    functor_coequaliser,
    functor_coproduct,
    identity_nat,
    nat_trans_set,
    random_functor,
)
from .procat import ProCat, chain_limit_nonempty
from .report import ShapeError, ValidationReport


@dataclass
class ChainDiagram:
    """Nodes ``D(0..L)`` and arrows ``arrows[k]: D(k+1) -> D(k)``; arrows need not be surjective."""

    nodes: list[CtsFunctor]
    arrows: list[NatTrans]

    def __post_init__(self):
        if not self.nodes:
            raise ShapeError("a chain diagram needs at least one node")
        if len(self.arrows) != len(self.nodes) - 1:
            raise ShapeError("need one arrow per consecutive pair of nodes")
        lv = max(n.level for n in self.nodes)
        self.nodes = list(common_level(*self.nodes)) if len(self.nodes) > 1 else [self.nodes[0].refine(lv)]
        arrows = []
        for k, t in enumerate(self.arrows):
            if t.source.on_objects != self.nodes[k + 1].on_objects or t.target.on_objects != self.nodes[k].on_objects:
                raise ShapeError(f"arrow {k} does not go D({k + 1}) -> D({k})")
            arrows.append(NatTrans(self.nodes[k + 1], self.nodes[k], t.components))
        self.arrows = arrows

    @property
    def procat(self) -> ProCat:
        return self.nodes[0].procat

    @property
    def length(self) -> int:
        return len(self.nodes)

    @property
    def limit(self) -> CtsFunctor:
        return self.nodes[-1]

    def projection(self, m: int, k: int) -> NatTrans:
        """``D(m) -> D(k)`` for ``m >= k``."""
        t = identity_nat(self.nodes[m])
        for i in range(m - 1, k - 1, -1):
            t = compose_nat(self.arrows[i], t)
        return t


def validate_chain(d: ChainDiagram) -> ValidationReport:
    rep = ValidationReport("chain diagram")
    from .funcat import check_functor

    for k, n in enumerate(d.nodes):
        rep.extend(check_functor(n), prefix=f"node {k}: ")
    for k, t in enumerate(d.arrows):
        rep.extend(check_nat_trans(t), prefix=f"arrow {k}: ")
    return rep


@dataclass
class InjectivityEntry:
    index: int
    pair: tuple[int, int]
    agree_at: Optional[int]


@dataclass
class SurjectivityEntry:
    alpha: int
    factor_levels: tuple[int, ...]  # j_x per object
    j: int
    k: Optional[int]
    e_sizes: list[int]
    y_sizes: list[int]
    ok: bool


@dataclass
class Witness:
    injectivity: list[InjectivityEntry] = field(default_factory=list)
    surjectivity: list[SurjectivityEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.agree_at is not None for e in self.injectivity) and all(e.ok for e in self.surjectivity)

    def report(self) -> ValidationReport:
        rep = ValidationReport("opcompactness")
        for e in self.injectivity:
            rep.tick()
            if e.agree_at is None:
                rep.add("injective", (e.index, e.pair), "maps agree on the limit but at no finite stage")
        for e in self.surjectivity:
            rep.tick()
            if not e.ok:
                rep.add("surjective", (e.alpha, e.j, e.k), f"Y sizes {e.y_sizes}")
        return rep


def _factors(proj: FinMap, alpha: FinMap) -> Optional[dict[int, int]]:
    """``alpha`` as a map on the image of ``proj``, if it is constant on fibres."""
    m: dict[int, int] = {}
    for u, v in zip(proj.table, alpha.table):
        if m.setdefault(u, v) != v:
            return None
    return m


def pointwise_lift(d: ChainDiagram, f: CtsFunctor, alpha: NatTrans, planted: Optional[dict] = None):
    """Per object ``x``: the least ``j_x`` with ``alpha_x`` factoring through
    ``D(L)(x) -> D(j_x)(x)``, and a map ``D(j)(x) -> F(x)`` for ``j = max j_x``.

    Elements of ``D(j)(x)`` outside the image get the value ``planted[(x, e)]``
    if given, else 0, or ``None`` when ``F(x)`` is empty. The result need not
    be natural.
    """
    last = d.length - 1
    n = d.procat.n_objects
    jx = []
    for x in range(n):
        for j in range(last + 1):
            if _factors(d.projection(last, j).components[x], alpha.components[x]) is not None:
                jx.append(j)
                break
    j = max(jx) if jx else 0
    proj = d.projection(last, j)
    tables = []
    for x in range(n):
        m = _factors(proj.components[x], alpha.components[x])
        size = d.nodes[j].on_objects[x].size
        row = []
        for e in range(size):
            if e in m:
                row.append(m[e])
            elif planted and (x, e) in planted:
                row.append(planted[(x, e)])
            else:
                row.append(0 if f.on_objects[x].size else None)
        tables.append(tuple(row))
    return tuple(jx), j, tables


def naturality_split(d: ChainDiagram, f: CtsFunctor, k: int, lift_k: Sequence[Sequence[int]]) -> tuple[list, list]:
    """``X_k = ∐_x H_x × D(k)(x)`` split into ``E_k`` (where the lift is
    natural along the arrow) and its complement ``Y_k``. A point where the
    lift is undefined counts as a failure."""
    node = d.nodes[k]
    c = node.procat.levels[node.level]
    e_part, y_part = [], []
    for x in range(c.n_objects):
        for y in range(c.n_objects):
            for phi in range(c.homs[x][y].size):
                for a in range(node.on_objects[x].size):
                    u = lift_k[x][a]
                    lhs = lift_k[y][node.on_arrows[x][y][phi][a]]
                    ok = u is not None and lhs is not None and lhs == f.on_arrows[x][y][phi][u]
                    (e_part if ok else y_part).append((x, y, phi, a))
    return e_part, y_part


def surjectivity_witness(d: ChainDiagram, f: CtsFunctor, alpha: NatTrans, index: int = 0, planted: Optional[dict] = None) -> SurjectivityEntry:
    jx, j, lift_j = pointwise_lift(d, f, alpha, planted)
    last = d.length - 1
    e_sizes, y_sizes = [], []
    y_sets, y_maps = [], []
    found = None
    lifts = {}
    for k in range(j, last + 1):
        pk = d.projection(k, j)
        lift_k = [tuple(lift_j[x][v] for v in pk.components[x].table) for x in range(d.procat.n_objects)]
        lifts[k] = lift_k
        e_part, y_part = naturality_split(d, f, k, lift_k)
        e_sizes.append(len(e_part))
        y_sizes.append(len(y_part))
        ys = FinSet(len(y_part))
        if y_sets:
            prev = {v: i for i, v in enumerate(y_sets[-1][1])}
            arr = d.arrows[k - 1]
            # Y_k maps into Y_{k-1}: a naturality failure stays a failure downstairs
            tab = tuple(prev[(x, y, phi, arr.components[x].table[a])] for x, y, phi, a in y_part)
            y_maps.append(FinMap(ys, y_sets[-1][0], tab))
        y_sets.append((ys, y_part))
        if chain_limit_nonempty([s for s, _ in y_sets], y_maps) is None:
            found = k
            break
    ok = False
    if found is not None:
        lift = NatTrans.from_tables(d.nodes[found], f, lifts[found])
        ok = check_nat_trans(lift).ok and compose_nat(lift, d.projection(last, found)).tables == alpha.tables
    return SurjectivityEntry(index, jx, j, found, e_sizes, y_sizes, ok)


def opcompactness_check(d: ChainDiagram, f: CtsFunctor, planted: Optional[dict] = None, max_pairs: int = 200) -> Witness:
    """Certify that ``colim Hom(D(i), F) -> Hom(D(L), F)`` is a bijection."""
    nodes = common_level(f, *d.nodes)
    f = nodes[0]
    if nodes[1].level != d.nodes[0].level:
        d = ChainDiagram(nodes[1:], [NatTrans(nodes[k + 2], nodes[k + 1], t.components) for k, t in enumerate(d.arrows)])
    w = Witness()
    last = d.length - 1
    for i in range(d.length):
        maps = nat_trans_set(d.nodes[i], f)
        proj = d.projection(last, i)
        on_limit = [compose_nat(t, proj).tables for t in maps]
        count = 0
        for a in range(len(maps)):
            for b in range(a + 1, len(maps)):
                if on_limit[a] != on_limit[b] or count >= max_pairs:
                    continue
                count += 1
                agree = None
                for j in range(i, last + 1):
                    pj = d.projection(j, i)
                    if compose_nat(maps[a], pj).tables == compose_nat(maps[b], pj).tables:
                        agree = j
                        break
                w.injectivity.append(InjectivityEntry(i, (a, b), agree))
    for idx, alpha in enumerate(nat_trans_set(d.limit, f)):
        w.surjectivity.append(surjectivity_witness(d, f, alpha, idx, planted))
    return w


# -- random instances ------------------------------------------------------------------


def random_chain(p: ProCat, rng: random.Random, length: int = 4, max_size: int = 4, surjective: bool = True) -> ChainDiagram:
    """A tower of quotients of a random functor, top node last.

    Each step identifies the images of two random elements (a coequaliser of
    Yoneda maps). With ``surjective=False`` some nodes also get a disjoint
    extra summand, so the arrows into them miss elements.
    """
    from .exodromy import yoneda_map

    level = p.top
    top = random_functor(p, level, max_size, rng)
    nodes = [top]
    arrows = []
    for _ in range(length - 1):
        cur = nodes[-1]
        cands = [(x, a, b) for x in range(p.n_objects) for a in range(cur.sizes[x]) for b in range(a + 1, cur.sizes[x])]
        if cands and rng.random() < 0.7:
            x, a, b = rng.choice(cands)
            q, proj = functor_coequaliser(yoneda_map(cur, x, a), yoneda_map(cur, x, b))
        else:
            q, proj = cur, identity_nat(cur)
        if not surjective and rng.random() < 0.4:
            extra = random_functor(p, level, 1, rng)
            q2, i1, _ = functor_coproduct(q, extra)
            proj = compose_nat(i1, proj)
            q = q2
        nodes.append(q)
        arrows.append(proj)
    nodes.reverse()
    arrows.reverse()
    return ChainDiagram(nodes, arrows)


def constant_chain(node: CtsFunctor, length: int) -> ChainDiagram:
    return ChainDiagram([node] * length, [identity_nat(node)] * (length - 1))
