"""Stratification-flavoured builders: one-object categories from groups, and
categories whose objects are strata, with loops and exit paths as arrows.

Exit-path composition is always supplied as an explicit table; nothing is
freely generated, so every hom-set stays finite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import permutations
from typing import Optional, Sequence

from .finset import FinMap, FinSet
from .galois import GaloisPresentation
from .procat import FinCat, ProCat, validate_procat
from .report import ShapeError, ValidationError, ValidationReport


@dataclass(frozen=True)
class Group:
    """A finite group as a multiplication table, ``table[a][b] = a*b``."""

    table: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        t = tuple(tuple(r) for r in self.table)
        object.__setattr__(self, "table", t)
        n = len(t)
        if n == 0:
            raise ShapeError("a group has at least one element")
        for r in t:
            if len(r) != n or any(not 0 <= v < n for v in r):
                raise ShapeError("multiplication table must be square with entries in range")

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def unit(self) -> Optional[int]:
        n = self.order
        for e in range(n):
            if all(self.table[e][a] == a and self.table[a][e] == a for a in range(n)):
                return e
        return None


def group_report(gr: Group) -> ValidationReport:
    rep = ValidationReport(f"group {gr.name}".strip())
    n, t = gr.order, gr.table
    rep.tick()
    e = gr.unit()
    if e is None:
        rep.add("unit", ())
        return rep
    for a in range(n):
        rep.tick()
        if not any(t[a][b] == e for b in range(n)):
            rep.add("inverse", (a,))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                rep.tick()
                if t[t[a][b]][c] != t[a][t[b][c]]:
                    rep.add("associativity", (a, b, c))
                    return rep
    return rep


def group_from_table(table, name: str = "") -> Group:
    gr = Group(table, name)
    group_report(gr).raise_if_failed()
    return gr


def cyclic_group(n: int) -> Group:
    return Group(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), f"Z/{n}")


def symmetric_group(n: int) -> Group:
    """Permutations in lexicographic order; ``a*b`` is ``a ∘ b`` (apply ``b`` first)."""
    perms = list(permutations(range(n)))
    idx = {p: i for i, p in enumerate(perms)}
    tab = tuple(tuple(idx[tuple(pa[pb[i]] for i in range(n))] for pb in perms) for pa in perms)
    return Group(tab, f"S{n}")


def _group_category(gr: Group) -> FinCat:
    e = gr.unit()
    if e is None:
        raise ValidationError("unit", (), "table has no two-sided unit")
    return FinCat.build(1, [[gr.order]], [e], lambda x, y, z, g, f: gr.table[g][f])


def build_bg(group, reductions: Optional[Sequence[Sequence[int]]] = None) -> ProCat:
    """``BG`` for one group, or a chain ``G_0 <- G_1 <- ...`` of quotients.

    ``group`` is a :class:`Group`, a raw table, or a list of either (coarsest
    first). ``reductions[k]`` maps elements of ``G_{k+1}`` to ``G_k`` and
    must be a surjective homomorphism.
    """
    groups = [group] if isinstance(group, Group) or _is_table(group) else list(group)
    gs = [g if isinstance(g, Group) else group_from_table(g) for g in groups]
    for g in gs:
        group_report(g).raise_if_failed()
    if len(gs) == 1:
        return ProCat.discrete(_group_category(gs[0]))
    if reductions is None or len(reductions) != len(gs) - 1:
        raise ShapeError("a chain of k groups needs k-1 reduction maps")
    levels = tuple(_group_category(g) for g in gs)
    trans = tuple(((FinMap(FinSet(gs[k + 1].order), FinSet(gs[k].order), tuple(reductions[k])),),) for k in range(len(gs) - 1))
    p = ProCat(levels, trans)
    validate_procat(p).raise_if_failed()
    return p


def _is_table(obj) -> bool:
    return bool(obj) and all(isinstance(r, (list, tuple)) and r and isinstance(r[0], int) for r in obj)


def cyclic_chain(orders: Sequence[int]) -> ProCat:
    """``BZ/n_0 <- BZ/n_1 <- ...`` with reduction mod ``n_k``; each order must divide the next."""
    for a, b in zip(orders, orders[1:]):
        if b % a:
            raise ShapeError(f"{a} does not divide {b}")
    gs = [cyclic_group(n) for n in orders]
    red = [[v % orders[k] for v in range(orders[k + 1])] for k in range(len(orders) - 1)]
    return build_bg(gs, red)


# -- strata --------------------------------------------------------------------------


@dataclass
class ExitSet:
    """Exit paths ``s -> t``: ``left[g][e]`` is ``g∘e`` for ``g`` in ``G_t``,
    ``right[e][h]`` is ``e∘h`` for ``h`` in ``G_s``."""

    size: int
    left: list[list[int]]
    right: list[list[int]]


@dataclass
class StrataSpec:
    strata: list[str]
    groups: list[Group]
    exit_paths: dict[tuple[int, int], ExitSet] = field(default_factory=dict)
    # (s, t, u) -> table[q][p] = q∘p for p: s -> t, q: t -> u (lands in G_s when u == s)
    composition_tables: dict[tuple[int, int, int], list[list[int]]] = field(default_factory=dict)

    def hom_size(self, s: int, t: int) -> int:
        if s == t:
            return self.groups[s].order
        ex = self.exit_paths.get((s, t))
        return ex.size if ex else 0


def build_strata(spec: StrataSpec) -> ProCat:
    """The category with strata as objects, loops as endomorphisms and exit paths between strata."""
    n = len(spec.strata)
    if len(spec.groups) != n:
        raise ShapeError(f"{n} strata but {len(spec.groups)} groups")
    if len(set(spec.strata)) != n:
        raise ShapeError("stratum names must be distinct")
    for (s, t), ex in spec.exit_paths.items():
        if s == t or not (0 <= s < n and 0 <= t < n):
            raise ShapeError(f"exit paths indexed by invalid pair {(s, t)}")
        if len(ex.left) != spec.groups[t].order or any(len(r) != ex.size for r in ex.left):
            raise ShapeError(f"left action on exit paths {(s, t)} has wrong shape")
        if len(ex.right) != ex.size or any(len(r) != spec.groups[s].order for r in ex.right):
            raise ShapeError(f"right action on exit paths {(s, t)} has wrong shape")
    units = []
    for k, g in enumerate(spec.groups):
        e = g.unit()
        if e is None:
            raise ValidationError("unit", (k,), f"group of stratum {spec.strata[k]} has no unit")
        units.append(e)
    sizes = [[spec.hom_size(s, t) for t in range(n)] for s in range(n)]

    def compose(x, y, z, g, f):
        # f: x -> y, g: y -> z
        if x == y == z:
            return spec.groups[x].table[g][f]
        if x == y:
            return spec.exit_paths[(y, z)].right[g][f]
        if y == z:
            return spec.exit_paths[(x, y)].left[g][f]
        tab = spec.composition_tables.get((x, y, z))
        if tab is None:
            raise ValidationError("composition table", (x, y, z), "exit paths compose but no table was supplied")
        return tab[g][f]

    c = FinCat.build(n, sizes, units, compose)
    p = ProCat.discrete(c)
    validate_procat(p).raise_if_failed()
    return p


def trivial_group() -> Group:
    return Group(((0,),), "1")


# -- canned examples -------------------------------------------------------------------


def _open_closed() -> ProCat:
    spec = StrataSpec(["U", "Z"], [trivial_group(), trivial_group()], {(0, 1): ExitSet(1, [[0]], [[0]])})
    return build_strata(spec)


def _two_curves() -> ProCat:
    # two strata with exit paths both ways; the smallest consistent tables
    # make every composite forced, so the category is indiscrete
    one = ExitSet(1, [[0]], [[0]])
    spec = StrataSpec(
        ["X0", "X1"],
        [trivial_group(), trivial_group()],
        {(0, 1): one, (1, 0): ExitSet(1, [[0]], [[0]])},
        {(0, 1, 0): [[0]], (1, 0, 1): [[0]]},
    )
    return build_strata(spec)


def _three_chain() -> ProCat:
    one = lambda: ExitSet(1, [[0]], [[0]])  # noqa: E731
    spec = StrataSpec(
        ["s0", "s1", "s2"],
        [trivial_group()] * 3,
        {(0, 1): one(), (1, 2): one(), (0, 2): one()},
        {(0, 1, 2): [[0]]},
    )
    return build_strata(spec)


def _z2_exit() -> ProCat:
    # Z/2 monodromy on the open stratum, two exit paths swapped by the loop
    z2 = cyclic_group(2)
    spec = StrataSpec(["U", "Z"], [z2, trivial_group()], {(0, 1): ExitSet(2, [[0, 1]], [[0, 1], [1, 0]])})
    return build_strata(spec)


CANNED_DOCS = {
    "terminal": "one object, one arrow",
    "bz2": "one object with the group Z/2 as endomorphisms",
    "bs3": "one object with the symmetric group S3 (order 6) as endomorphisms",
    "bzhat": "the chain BZ/2 <- BZ/4 <- BZ/8, a truncation of the profinite integers",
    "open-closed": "two strata U -> Z, trivial monodromy, one exit path",
    "two-curves": "two strata with exit paths in both directions: stratified over a preorder, not a poset",
    "three-chain": "three strata s0 -> s1 -> s2 with trivial monodromy",
    "z2-exit": "open stratum with Z/2 monodromy acting freely on two exit paths to a closed point",
}


def canned_procat(name: str) -> ProCat:
    builders = {
        "terminal": lambda: build_bg(trivial_group()),
        "bz2": lambda: build_bg(cyclic_group(2)),
        "bs3": lambda: build_bg(symmetric_group(3)),
        "bzhat": lambda: cyclic_chain([2, 4, 8]),
        "open-closed": _open_closed,
        "two-curves": _two_curves,
        "three-chain": _three_chain,
        "z2-exit": _z2_exit,
    }
    if name not in builders:
        raise KeyError(name)
    return builders[name]()


def canned_examples() -> dict[str, tuple[GaloisPresentation, str]]:
    """Name -> (presentation with every object as a fibre point, description)."""
    return {name: (GaloisPresentation.all_points(canned_procat(name)), doc) for name, doc in CANNED_DOCS.items()}


# -- random instances ------------------------------------------------------------------


def _closure(gens: dict, carriers: Sequence[int], max_hom: int):
    """Close a set of maps between carriers under composition; ``None`` if a hom overflows."""
    n = len(carriers)
    homs = {(x, y): set() for x in range(n) for y in range(n)}
    for x in range(n):
        homs[(x, x)].add(tuple(range(carriers[x])))
    for (x, y), fs_ in gens.items():
        homs[(x, y)].update(fs_)
    changed = True
    while changed:
        changed = False
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    for f in list(homs[(x, y)]):
                        for g in list(homs[(y, z)]):
                            h = tuple(g[v] for v in f)
                            if h not in homs[(x, z)]:
                                homs[(x, z)].add(h)
                                changed = True
                                if len(homs[(x, z)]) > max_hom:
                                    return None
    return homs


def random_fincat(rng: random.Random, max_objects: int = 2, max_hom: int = 3, max_carrier: int = 3) -> FinCat:
    """A concrete category: maps between small sets closed under composition."""
    while True:
        n = rng.randint(1, max_objects)
        carriers = [rng.randint(1, max_carrier) for _ in range(n)]
        gens = {}
        for x in range(n):
            for y in range(n):
                k = rng.randint(0, 2)
                gens[(x, y)] = {tuple(rng.randrange(carriers[y]) for _ in range(carriers[x])) for _ in range(k)}
        homs = _closure(gens, carriers, max_hom)
        if homs is None:
            continue
        arrows = {key: sorted(v) for key, v in homs.items()}
        pos = {key: {f: i for i, f in enumerate(v)} for key, v in arrows.items()}
        idents = [pos[(x, x)][tuple(range(carriers[x]))] for x in range(n)]

        def compose(x, y, z, g, f, arrows=arrows, pos=pos):
            ff, gg = arrows[(x, y)][f], arrows[(y, z)][g]
            return pos[(x, z)][tuple(gg[v] for v in ff)]

        return FinCat.build(n, [[len(arrows[(x, y)]) for y in range(n)] for x in range(n)], idents, compose)


def _find(parent: list[int], a: int) -> int:
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


def congruence_quotient(c: FinCat, seeds: Sequence[tuple[int, int, int, int]]) -> tuple[FinCat, list[list[FinMap]]]:
    """Quotient of ``c`` by the smallest congruence identifying each ``(x, y, f, g)``.

    Returns the quotient and the projection maps per hom.
    """
    n = c.n_objects
    arrows = list(c.arrows())
    idx = {a: i for i, a in enumerate(arrows)}
    parent = list(range(len(arrows)))
    for x, y, f, g in seeds:
        ra, rb = _find(parent, idx[(x, y, f)]), _find(parent, idx[(x, y, g)])
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    changed = True
    while changed:
        changed = False
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    hy, hz = c.homs[x][y].size, c.homs[y][z].size
                    for f1 in range(hy):
                        for f2 in range(hy):
                            if _find(parent, idx[(x, y, f1)]) != _find(parent, idx[(x, y, f2)]) or f1 >= f2:
                                continue
                            for g in range(hz):
                                a = _find(parent, idx[(x, z, c.composition[x][y][z][g][f1])])
                                b = _find(parent, idx[(x, z, c.composition[x][y][z][g][f2])])
                                if a != b:
                                    parent[max(a, b)] = min(a, b)
                                    changed = True
                    for g1 in range(hz):
                        for g2 in range(g1 + 1, hz):
                            if _find(parent, idx[(y, z, g1)]) != _find(parent, idx[(y, z, g2)]):
                                continue
                            for f in range(hy):
                                a = _find(parent, idx[(x, z, c.composition[x][y][z][g1][f])])
                                b = _find(parent, idx[(x, z, c.composition[x][y][z][g2][f])])
                                if a != b:
                                    parent[max(a, b)] = min(a, b)
                                    changed = True
    cls = {}
    for x in range(n):
        for y in range(n):
            reps = sorted({_find(parent, idx[(x, y, f)]) for f in range(c.homs[x][y].size)})
            cls[(x, y)] = {r: i for i, r in enumerate(reps)}
    proj = [
        [FinMap(c.homs[x][y], FinSet(len(cls[(x, y)])), tuple(cls[(x, y)][_find(parent, idx[(x, y, f)])] for f in range(c.homs[x][y].size))) for y in range(n)]
        for x in range(n)
    ]

    def rep_of(x, y, k):
        return proj[x][y].table.index(k)

    q = FinCat.build(
        n,
        [[len(cls[(x, y)]) for y in range(n)] for x in range(n)],
        [proj[x][x].table[c.identities[x]] for x in range(n)],
        lambda x, y, z, g, f: proj[x][z].table[c.composition[x][y][z][rep_of(y, z, g)][rep_of(x, y, f)]],
    )
    return q, proj


def random_procat(rng: random.Random, max_objects: int = 2, max_hom: int = 3, max_levels: int = 2) -> ProCat:
    """A random valid ProCat: a concrete top level and, optionally, a congruence quotient below it."""
    top = random_fincat(rng, max_objects, max_hom)
    if max_levels < 2 or rng.random() < 0.3:
        return ProCat.discrete(top)
    pairs = [(x, y, f, g) for x, y, f in top.arrows() for g in range(f + 1, top.homs[x][y].size)]
    seeds = rng.sample(pairs, min(len(pairs), rng.randint(0, 2)))
    low, proj = congruence_quotient(top, seeds)
    trans = (tuple(tuple(proj[x][y] for y in range(top.n_objects)) for x in range(top.n_objects)),)
    return ProCat((low, top), trans)
