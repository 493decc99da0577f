"""Pluggable countable-group backends with canonical element forms.

Every backend guarantees a decidable word problem by construction: elements
are stored in a canonical form (reduced words, sorted lamp supports, table
indices) and equality/hashing act on that form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any

from .errors import BackendMismatch, BallTooLarge


@dataclass(frozen=True)
class GroupElement:
    group: "Group"
    key: Any

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return self.group.multiply(self, other)

    def inverse(self) -> "GroupElement":
        return self.group.inverse(self)

    def __eq__(self, other) -> bool:
        return (isinstance(other, GroupElement)
                and self.group is other.group and self.key == other.key)

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "GroupElement") -> bool:
        # Deterministic ordering for reproducible iteration.
        return self.group.sort_key(self.key) < other.group.sort_key(other.key)

    def __repr__(self) -> str:
        return f"<{self.group.name}:{self.group.describe(self.key)}>"


class Group:
    """Backend interface. Subclasses define canonical keys and the ops."""

    name = "group"

    def identity(self) -> GroupElement:
        raise NotImplementedError

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        raise NotImplementedError

    def inverse(self, g: GroupElement) -> GroupElement:
        raise NotImplementedError

    def generators(self) -> list[GroupElement]:
        raise NotImplementedError

    def element(self, key) -> GroupElement:
        return GroupElement(self, self.canonical(key))

    def canonical(self, key):
        return key

    def sort_key(self, key):
        return key

    def describe(self, key) -> str:
        return repr(key)

    def _check(self, *elements: GroupElement) -> None:
        for e in elements:
            if e.group is not self:
                raise BackendMismatch(
                    f"element of {e.group.name} used with {self.name}")


def identity(group: Group) -> GroupElement:
    return group.identity()


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    return g.group.multiply(g, h)


def inverse(g: GroupElement) -> GroupElement:
    return g.group.inverse(g)


class FiniteGroup(Group):
    """Explicit multiplication table; entry table[i][j] = index of g_i g_j."""

    name = "finite"

    def __init__(self, table, check_associativity_samples: int = 64, seed: int = 0):
        n = len(table)
        self.table = [tuple(int(x) for x in row) for row in table]
        if any(len(row) != n for row in self.table):
            raise ValueError("multiplication table must be square")
        for row in self.table:
            if sorted(row) != list(range(n)):
                raise ValueError("table rows must be permutations (Latin square)")
        for j in range(n):
            col = sorted(self.table[i][j] for i in range(n))
            if col != list(range(n)):
                raise ValueError("table columns must be permutations (Latin square)")
        self.order = n
        self._identity = self._find_identity()
        self._inverses = self._find_inverses()
        rng = random.Random(seed)
        for _ in range(check_associativity_samples):
            a, b, c = (rng.randrange(n) for _ in range(3))
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise ValueError(f"table not associative at ({a},{b},{c})")

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.table[e][j] == j for j in range(self.order)):
                if all(self.table[i][e] == i for i in range(self.order)):
                    return e
        raise ValueError("table has no identity element")

    def _find_inverses(self) -> list[int]:
        inv = [None] * self.order
        for i in range(self.order):
            inv[i] = self.table[i].index(self._identity)
        return inv

    def identity(self) -> GroupElement:
        return GroupElement(self, self._identity)

    def multiply(self, g, h):
        self._check(g, h)
        return GroupElement(self, self.table[g.key][h.key])

    def inverse(self, g):
        self._check(g)
        return GroupElement(self, self._inverses[g.key])

    def generators(self) -> list[GroupElement]:
        return [GroupElement(self, i) for i in range(self.order)
                if i != self._identity]

    def elements(self) -> list[GroupElement]:
        return [GroupElement(self, i) for i in range(self.order)]


def cyclic_group(n: int) -> FiniteGroup:
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table)


class ZdGroup(Group):
    """Free abelian group Z^d; keys are integer tuples."""

    name = "zd"

    def __init__(self, d: int):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.d = d

    def canonical(self, key):
        key = tuple(int(x) for x in key)
        if len(key) != self.d:
            raise ValueError(f"expected {self.d} coordinates")
        return key

    def identity(self):
        return GroupElement(self, (0,) * self.d)

    def multiply(self, g, h):
        self._check(g, h)
        return GroupElement(self, tuple(a + b for a, b in zip(g.key, h.key)))

    def inverse(self, g):
        self._check(g)
        return GroupElement(self, tuple(-a for a in g.key))

    def generators(self):
        gens = []
        for i in range(self.d):
            for s in (1, -1):
                vec = [0] * self.d
                vec[i] = s
                gens.append(GroupElement(self, tuple(vec)))
        return gens


def _reduce_free(word: tuple[int, ...]) -> tuple[int, ...]:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class FreeGroup(Group):
    """Free group of rank r.

    Keys are reduced words: tuples over {1..r, -1..-r} with no adjacent
    inverse pair; generator i is the integer i, its inverse -i.
    """

    name = "free"

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("rank must be >= 1")
        self.rank = rank

    def canonical(self, key):
        word = tuple(int(x) for x in key)
        if any(x == 0 or abs(x) > self.rank for x in word):
            raise ValueError("letters must lie in {±1..±rank}")
        return _reduce_free(word)

    def identity(self):
        return GroupElement(self, ())

    def multiply(self, g, h):
        self._check(g, h)
        return GroupElement(self, _reduce_free(g.key + h.key))

    def inverse(self, g):
        self._check(g)
        return GroupElement(self, tuple(-x for x in reversed(g.key)))

    def generators(self):
        return [GroupElement(self, (s * i,))
                for i in range(1, self.rank + 1) for s in (1, -1)]

    def sort_key(self, key):
        return (len(key), key)

    def word_length(self, g: GroupElement) -> int:
        self._check(g)
        return len(g.key)


class LamplighterGroup(Group):
    """Wreath product Z2 wr Z.

    Keys are (lamps, pos): lamps a sorted tuple of lit positions, pos the
    lamplighter position. Product rule: (f,t)(g,s) = (f xor shift(g,t), t+s).
    """

    name = "lamplighter"

    def canonical(self, key):
        lamps, pos = key
        return (tuple(sorted(set(int(x) for x in lamps))), int(pos))

    def identity(self):
        return GroupElement(self, ((), 0))

    def multiply(self, g, h):
        self._check(g, h)
        (f, t), (k, s) = g.key, h.key
        lamps = set(f) ^ {x + t for x in k}
        return GroupElement(self, (tuple(sorted(lamps)), t + s))

    def inverse(self, g):
        self._check(g)
        f, t = g.key
        return GroupElement(self, (tuple(sorted(x - t for x in f)), -t))

    def generators(self):
        # move right, move left, toggle the lamp at the current position
        return [GroupElement(self, ((), 1)),
                GroupElement(self, ((), -1)),
                GroupElement(self, ((0,), 0))]


class QuotientGroup(Group):
    """Group presented as the image of a free group under a homomorphism.

    Elements live in the target backend; this wrapper only fixes the
    generating set (the images of the free generators).
    """

    name = "quotient"

    def __init__(self, hom: "Homomorphism"):
        self.hom = hom
        self.target = hom.target

    def identity(self):
        return self.target.identity()

    def multiply(self, g, h):
        return self.target.multiply(g, h)

    def inverse(self, g):
        return self.target.inverse(g)

    def generators(self):
        return list(dict.fromkeys(self.hom.images))


class Homomorphism:
    """Map from a free group F_r into any backend, letter by letter.

    `images` lists the targets of the positive generators; inverses are
    derived, so the free-group universal property holds by construction.
    """

    def __init__(self, domain: FreeGroup, images: list[GroupElement]):
        if len(images) != domain.rank:
            raise ValueError("need one image per positive generator")
        self.domain = domain
        self.target = images[0].group
        for img in images:
            if img.group is not self.target:
                raise BackendMismatch("images must share a backend")
        self.images = list(images)
        self._by_letter = {}
        for i, img in enumerate(images, start=1):
            self._by_letter[i] = img
            self._by_letter[-i] = self.target.inverse(img)

    def apply(self, word) -> GroupElement:
        """Image of a free-group element or raw letter sequence."""
        if isinstance(word, GroupElement):
            word = word.key
        out = self.target.identity()
        for letter in word:
            out = self.target.multiply(out, self._by_letter[int(letter)])
        return out


def apply_hom(hom: Homomorphism, word) -> GroupElement:
    return hom.apply(word)


def ball(group: Group, radius: int, generators: list[GroupElement] | None = None,
         cap: int = 2_000_000) -> list[GroupElement]:
    """Word-metric ball, BFS with canonical-form dedup, stable order.

    The generator list must be closed under inverse (checked). Elements come
    out sorted by (distance, backend sort key).
    """
    if generators is None:
        generators = group.generators()
    gen_keys = {g.key for g in generators}
    for g in generators:
        if group.inverse(g).key not in gen_keys:
            raise ValueError("generator list must be closed under inverse")
    e = group.identity()
    seen = {e.key: 0}
    frontier = [e]
    layers = [[e]]
    for r in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for s in generators:
                h = group.multiply(g, s)
                if h.key not in seen:
                    seen[h.key] = r
                    nxt.append(h)
        if len(seen) > cap:
            raise BallTooLarge(f"ball exceeds cap of {cap} elements")
        nxt.sort()
        layers.append(nxt)
        frontier = nxt
    return [g for layer in layers for g in layer]


def axiom_spot_check(group: Group, elements: list[GroupElement],
                     samples: int = 1000, seed: int = 0) -> None:
    """Associativity/identity/inverse on random triples; exact canonical equality."""
    rng = random.Random(seed)
    e = group.identity()
    for _ in range(samples):
        a, b, c = (rng.choice(elements) for _ in range(3))
        assert ((a * b) * c).key == (a * (b * c)).key
        assert (a * e).key == a.key and (e * a).key == a.key
        assert (a * a.inverse()).key == e.key
