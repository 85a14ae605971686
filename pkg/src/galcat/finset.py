"""The pretopos of finite sets.

A finite set of size ``n`` has the elements ``0..n-1``; a map is a table of
target indices. Every construction below fixes a canonical element order so
results are structurally comparable:

* products are lexicographic, first factor major;
* coproducts put the first summand's block first;
* quotients order classes by least representative;
* images list reached values in target order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .report import ShapeError, ValidationError


@dataclass(frozen=True)
class FinSet:
    size: int
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.size < 0:
            raise ShapeError(f"negative size {self.size}")
        if self.labels is not None:
            labels = tuple(self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != self.size:
                raise ShapeError(f"{len(labels)} labels for a set of size {self.size}")
            if len(set(labels)) != len(labels):
                raise ShapeError("labels must be pairwise distinct")

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.size))

    def __contains__(self, i) -> bool:
        return isinstance(i, int) and 0 <= i < self.size

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def index(self, label: str) -> int:
        if self.labels is None:
            return int(label)
        return self.labels.index(label)

    def __repr__(self) -> str:
        if self.labels is None:
            return f"FinSet({self.size})"
        return f"FinSet({self.size}, {list(self.labels)})"


@dataclass(frozen=True)
class FinMap:
    source: FinSet
    target: FinSet
    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.source.size:
            raise ShapeError(f"table has {len(table)} entries, source has {self.source.size}")
        n = self.target.size
        for i, v in enumerate(table):
            if not 0 <= v < n:
                raise ShapeError(f"entry {i} -> {v} outside target of size {n}")

    @classmethod
    def identity(cls, s: FinSet) -> FinMap:
        return cls(s, s, tuple(range(s.size)))

    @classmethod
    def make(cls, source, target, table) -> FinMap:
        """Accept ints or FinSets for the endpoints."""
        if isinstance(source, int):
            source = FinSet(source)
        if isinstance(target, int):
            target = FinSet(target)
        return cls(source, target, tuple(table))

    def __call__(self, i: int) -> int:
        return self.table[i]

    def __len__(self) -> int:
        return len(self.table)

    def compose(self, other: FinMap) -> FinMap:
        """``self ∘ other``."""
        if other.target != self.source:
            raise ShapeError("composition of non-composable maps")
        t = self.table
        return FinMap(other.source, self.target, tuple(t[v] for v in other.table))

    def then(self, other: FinMap) -> FinMap:
        return other.compose(self)

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.target.size

    def is_bijective(self) -> bool:
        return self.source.size == self.target.size and self.is_injective()

    def image(self) -> list[int]:
        return sorted(set(self.table))

    def inverse(self) -> FinMap:
        if not self.is_bijective():
            raise ShapeError("only bijections have inverses")
        inv = [0] * self.source.size
        for i, v in enumerate(self.table):
            inv[v] = i
        return FinMap(self.target, self.source, tuple(inv))


@dataclass(frozen=True)
class EquivRelation:
    carrier: FinSet
    pairs: frozenset

    def __post_init__(self):
        pairs = frozenset((int(a), int(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        n = self.carrier.size
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise ShapeError(f"pair {(a, b)} outside carrier of size {n}")

    @classmethod
    def from_classes(cls, carrier: FinSet, classes: Iterable[Iterable[int]]) -> EquivRelation:
        pairs = set()
        for c in classes:
            c = list(c)
            pairs.update((a, b) for a in c for b in c)
        return cls(carrier, frozenset(pairs))

    @classmethod
    def diagonal(cls, carrier: FinSet) -> EquivRelation:
        return cls(carrier, frozenset((i, i) for i in carrier))

    @classmethod
    def full(cls, carrier: FinSet) -> EquivRelation:
        return cls(carrier, frozenset((i, j) for i in carrier for j in carrier))

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def first_violation(self) -> Optional[tuple[str, tuple]]:
        """Return ``(law, witness)`` for the first failed law, or ``None``."""
        for i in self.carrier:
            if (i, i) not in self.pairs:
                return "reflexivity", (i, i)
        for a, b in sorted(self.pairs):
            if (b, a) not in self.pairs:
                return "symmetry", (a, b)
        succ: dict[int, list[int]] = {}
        for a, b in sorted(self.pairs):
            succ.setdefault(a, []).append(b)
        for a, b in sorted(self.pairs):
            for c in succ.get(b, ()):
                if (a, c) not in self.pairs:
                    return "transitivity", ((a, b), (b, c))
        return None

    def is_valid(self) -> bool:
        return self.first_violation() is None

    def validate(self) -> None:
        bad = self.first_violation()
        if bad is not None:
            raise ValidationError(bad[0], bad[1], "not an equivalence relation")

    def classes(self) -> list[list[int]]:
        seen: set[int] = set()
        out = []
        for i in self.carrier:
            if i in seen:
                continue
            cls_ = [j for j in self.carrier if (i, j) in self.pairs]
            seen.update(cls_)
            out.append(cls_)
        return out


def as_finset(x) -> FinSet:
    return FinSet(x) if isinstance(x, int) else x


def _check_parallel(f: FinMap, g: FinMap) -> None:
    if f.source != g.source or f.target != g.target:
        raise ShapeError("maps are not parallel")


def product(a: FinSet, b: FinSet) -> tuple[FinSet, FinMap, FinMap]:
    n = a.size * b.size
    p = FinSet(n)
    p1 = FinMap(p, a, tuple(i for i in range(a.size) for _ in range(b.size)))
    p2 = FinMap(p, b, tuple(j for _ in range(a.size) for j in range(b.size)))
    return p, p1, p2


def pair_index(i: int, j: int, b_size: int) -> int:
    """Index of ``(i, j)`` in ``product(a, b)``."""
    return i * b_size + j


def equaliser(f: FinMap, g: FinMap) -> tuple[FinSet, FinMap]:
    _check_parallel(f, g)
    keep = tuple(i for i in f.source if f.table[i] == g.table[i])
    e = FinSet(len(keep))
    return e, FinMap(e, f.source, keep)


def coproduct(a: FinSet, b: FinSet) -> tuple[FinSet, FinMap, FinMap]:
    s = FinSet(a.size + b.size)
    i1 = FinMap(a, s, tuple(range(a.size)))
    i2 = FinMap(b, s, tuple(range(a.size, a.size + b.size)))
    return s, i1, i2


def pullback(f: FinMap, g: FinMap) -> tuple[FinSet, FinMap, FinMap]:
    """Fibre product of ``f: A -> C`` and ``g: B -> C`` as a subset of A x B."""
    if f.target != g.target:
        raise ShapeError("pullback needs a common target")
    pairs = [(i, j) for i in f.source for j in g.source if f.table[i] == g.table[j]]
    p = FinSet(len(pairs))
    return p, FinMap(p, f.source, tuple(i for i, _ in pairs)), FinMap(p, g.source, tuple(j for _, j in pairs))


def _components(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    """Label each vertex by the least vertex of its connected component."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    label = [-1] * n
    for start in range(n):
        if label[start] >= 0:
            continue
        label[start] = start
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if label[w] < 0:
                    label[w] = start
                    queue.append(w)
    return label


def _quotient_from_labels(target: FinSet, label: list[int]) -> tuple[FinSet, FinMap]:
    reps = sorted(set(label))
    pos = {r: k for k, r in enumerate(reps)}
    q = FinSet(len(reps))
    return q, FinMap(target, q, tuple(pos[label[i]] for i in target))


def coequaliser(f: FinMap, g: FinMap) -> tuple[FinSet, FinMap]:
    _check_parallel(f, g)
    label = _components(f.target.size, zip(f.table, g.table))
    return _quotient_from_labels(f.target, label)


def image_factorization(f: FinMap) -> tuple[FinMap, FinMap]:
    """Return ``(epi, mono)`` with ``mono ∘ epi == f``."""
    values = f.image()
    im = FinSet(len(values))
    pos = {v: k for k, v in enumerate(values)}
    epi = FinMap(f.source, im, tuple(pos[v] for v in f.table))
    mono = FinMap(im, f.target, tuple(values))
    return epi, mono


def kernel_pair(f: FinMap) -> EquivRelation:
    t = f.table
    n = f.source.size
    return EquivRelation(f.source, frozenset((i, j) for i in range(n) for j in range(n) if t[i] == t[j]))


def quotient_by_equiv(r: EquivRelation) -> tuple[FinSet, FinMap]:
    r.validate()
    label = _components(r.carrier.size, r.pairs)
    return _quotient_from_labels(r.carrier, label)


def all_maps(a: FinSet, b: FinSet) -> Iterator[FinMap]:
    """Every map ``a -> b`` in lexicographic table order."""
    from itertools import product as iproduct

    for t in iproduct(range(b.size), repeat=a.size):
        yield FinMap(a, b, t)
