"""Finite groups, quotient towers and the level-wise operations built on them.

Elements of a :class:`FiniteGroup` are the integers ``0 .. order-1`` and the
identity is always ``0``.  Labels are kept separately for display and for the
JSON formats.  Infinite groups only appear through finite levels: a profinite
group is a :class:`QuotientTower`, and a free discrete group only ever acts
through the images of its generators.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import InputError

# Above this order only the permutation representation is kept.
TABLE_CAP = 5000
# Below this order the table is held as nested lists, which index faster.
_LIST_TABLE_CAP = 1024

Perm = tuple[int, ...]


def perm_mul(p: Perm, q: Perm) -> Perm:
    """Composite ``p∘q``: apply ``q`` first."""
    return tuple(p[i] for i in q)


def perm_inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


class FiniteGroup:
    """A finite group given by a multiplication table or by permutations.

    Use the module-level constructors (:func:`cyclic`, :func:`symmetric`,
    :func:`from_permutations`, ...) rather than calling this directly.
    """

    def __init__(self, labels: Sequence[str], *, table=None, perms=None, name: str = "G"):
        self.name = name
        self.labels = tuple(str(x) for x in labels)
        self.order = len(self.labels)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != self.order:
            raise InputError(f"{name}: duplicate element labels")
        self._perms = None
        self._perm_index = None
        if perms is not None:
            self._perms = [tuple(p) for p in perms]
            self._perm_index = {p: i for i, p in enumerate(self._perms)}
        if table is None and self._perms is None:
            raise InputError(f"{name}: need a table or permutations")
        if table is None and self.order <= TABLE_CAP:
            table = [[self._perm_index[perm_mul(p, q)] for q in self._perms] for p in self._perms]
        self._table = None
        if table is not None:
            if self.order > TABLE_CAP:
                raise InputError(f"{name}: table above cap {TABLE_CAP}, use permutations")
            arr = np.asarray(table, dtype=np.int64)
            if arr.shape != (self.order, self.order):
                raise InputError(f"{name}: table shape {arr.shape} does not match order {self.order}")
            self._table = arr.tolist() if self.order <= _LIST_TABLE_CAP else arr
        if any(self.mul(0, j) != j or self.mul(j, 0) != j for j in range(self.order)):
            raise InputError(f"{name}: element 0 must be the identity")
        self._inv = [0] * self.order
        for a in range(self.order):
            row = self._row(a)
            try:
                self._inv[a] = row.index(0)
            except ValueError:
                raise InputError(f"{name}: element {self.labels[a]} has no inverse") from None

    # -- basic arithmetic -------------------------------------------------

    def _row(self, a: int) -> list[int]:
        if isinstance(self._table, list):
            return self._table[a]
        if self._table is not None:
            return self._table[a].tolist()
        return [self.mul(a, b) for b in range(self.order)]

    def mul(self, a: int, b: int) -> int:
        t = self._table
        if t is not None:
            return t[a][b] if isinstance(t, list) else int(t[a, b])
        return self._perm_index[perm_mul(self._perms[a], self._perms[b])]

    def inv(self, a: int) -> int:
        return self._inv[a]

    identity = 0

    @property
    def elements(self) -> range:
        return range(self.order)

    def prod(self, items: Iterable[int]) -> int:
        out = 0
        for x in items:
            out = self.mul(out, x)
        return out

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        out, base = 0, a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self.mul(self.mul(g, x), self.inv(g))

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k

    def index_of(self, ref) -> int:
        """Resolve a label (or an in-range integer) to an element index."""
        if isinstance(ref, (int, np.integer)) and not isinstance(ref, bool):
            if 0 <= ref < self.order:
                return int(ref)
            raise InputError(f"{self.name}: element {ref} out of range")
        try:
            return self._index[str(ref)]
        except KeyError:
            raise InputError(f"{self.name}: unknown element {ref!r}") from None

    def permutation(self, a: int) -> Perm | None:
        return None if self._perms is None else self._perms[a]

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    def check_axioms(self, samples: int = 200, seed: int = 0) -> None:
        """Spot-check associativity on random triples; raise on failure."""
        rng = random.Random(seed)
        for _ in range(samples):
            a, b, c = (rng.randrange(self.order) for _ in range(3))
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                raise InputError(f"{self.name}: associativity fails on {a},{b},{c}")

    # -- subgroups ----------------------------------------------------------

    def generated(self, gens: Iterable[int]) -> frozenset[int]:
        gens = [g for g in gens if g != 0]
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    def normal_closure(self, gens: Iterable[int]) -> frozenset[int]:
        gens = list(gens)
        conjugates = {self.conj(g, x) for x in gens for g in self.elements}
        return self.generated(conjugates)

    def is_subgroup(self, s: Iterable[int]) -> bool:
        s = frozenset(s)
        if 0 not in s:
            return False
        return all(self.mul(a, self.inv(b)) in s for a in s for b in s)

    def is_normal(self, h: Iterable[int]) -> bool:
        h = frozenset(h)
        gens = self.generators()
        return all(self.conj(g, x) in h for g in gens for x in h)

    def conjugate_subgroup(self, g: int, h: frozenset[int]) -> frozenset[int]:
        return frozenset(self.conj(g, x) for x in h)

    def centralizer(self, s: Iterable[int]) -> frozenset[int]:
        s = list(s)
        return frozenset(g for g in self.elements if all(self.mul(g, x) == self.mul(x, g) for x in s))

    def is_abelian(self) -> bool:
        gens = self.generators()
        return all(self.mul(a, b) == self.mul(b, a) for a in gens for b in gens)

    def generators(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily by decreasing element order."""
        if self._gens is None:
            order = sorted(self.elements, key=lambda a: (-self.element_order(a), a))
            gens: list[int] = []
            span = frozenset([0])
            for a in order:
                if len(span) == self.order:
                    break
                if a not in span:
                    gens.append(a)
                    span = self.generated(gens)
            self._gens = tuple(gens)
        return self._gens

    _gens = None
    _subgroups = None

    def subgroups(self) -> list[frozenset[int]]:
        """Every subgroup, smallest first (joins of cyclic subgroups)."""
        if self._subgroups is None:
            cyclic_subs = {self.generated([a]) for a in self.elements}
            found = set(cyclic_subs)
            frontier = list(cyclic_subs)
            while frontier:
                nxt = []
                for h in frontier:
                    for c in cyclic_subs:
                        if c <= h:
                            continue
                        j = self.generated(h | c)
                        if j not in found:
                            found.add(j)
                            nxt.append(j)
                frontier = nxt
            self._subgroups = sorted(found, key=lambda s: (len(s), sorted(s)))
        return self._subgroups

    def subgroup_classes(self) -> list[frozenset[int]]:
        """One representative per conjugacy class of subgroups."""
        reps, seen = [], set()
        for h in self.subgroups():
            if h in seen:
                continue
            reps.append(h)
            seen.update(self.conjugate_subgroup(g, h) for g in self.elements)
        return reps

    def left_cosets(self, h: frozenset[int]) -> list[tuple[int, ...]]:
        """Left cosets ``gH`` as sorted tuples; the coset of ``H`` itself comes first."""
        seen, out = set(), []
        for g in self.elements:
            if g in seen:
                continue
            c = tuple(sorted(self.mul(g, x) for x in h))
            seen.update(c)
            out.append(c)
        return out

    def quotient(self, n: Iterable[int], name: str | None = None) -> tuple["FiniteGroup", "Homomorphism"]:
        n = frozenset(n)
        if not self.is_subgroup(n) or not self.is_normal(n):
            raise InputError(f"{self.name}: quotient by a non-normal subset")
        cosets = self.left_cosets(n)
        where = {}
        for i, c in enumerate(cosets):
            for x in c:
                where[x] = i
        reps = [c[0] for c in cosets]
        table = [[where[self.mul(a, b)] for b in reps] for a in reps]
        labels = ["{" + ",".join(self.labels[x] for x in c[:3]) + ("..}" if len(c) > 3 else "}") for c in cosets]
        if len(set(labels)) != len(labels):
            labels = [f"c{i}" for i in range(len(cosets))]
        q = FiniteGroup(labels, table=table, name=name or f"{self.name}/N")
        return q, Homomorphism(self, q, tuple(where[g] for g in self.elements))

    # -- homomorphisms out of this group ------------------------------------

    @cached_property
    def _cayley_tree(self) -> list[tuple[int, int]]:
        """BFS tree over generators: ``parent[x] = (y, gen)`` with ``x = y * gen``."""
        gens = self.generators()
        parent: list[tuple[int, int]] = [(-1, -1)] * self.order
        parent[0] = (0, -1)
        queue = deque([0])
        seen = {0}
        order = []
        while queue:
            x = queue.popleft()
            order.append(x)
            for k, g in enumerate(gens):
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    parent[y] = (x, k)
                    queue.append(y)
        self._bfs_order = order
        return parent

    def extend(self, target: "FiniteGroup", gen_images: Sequence[int]) -> tuple[int, ...] | None:
        """Extend images of :meth:`generators` to a homomorphism, or ``None``."""
        gens = self.generators()
        parent = self._cayley_tree
        img = [0] * self.order
        for x in self._bfs_order[1:]:
            y, k = parent[x]
            img[x] = target.mul(img[y], gen_images[k])
        for x in self.elements:
            for k, g in enumerate(gens):
                if img[self.mul(x, g)] != target.mul(img[x], gen_images[k]):
                    return None
        return tuple(img)

    def homs_to(self, target: "FiniteGroup") -> Iterator["Homomorphism"]:
        """Enumerate every homomorphism into ``target``."""
        gens = self.generators()
        candidates = []
        for g in gens:
            o = self.element_order(g)
            candidates.append([t for t in target.elements if o % target.element_order(t) == 0])
        for imgs in itertools.product(*candidates):
            ext = self.extend(target, imgs)
            if ext is not None:
                yield Homomorphism(self, target, ext)


@dataclass(frozen=True)
class Homomorphism:
    """A homomorphism of finite groups stored as the full image table."""

    source: FiniteGroup
    target: FiniteGroup
    images: tuple[int, ...]

    @classmethod
    def from_generators(cls, source: FiniteGroup, target: FiniteGroup, gen_images: Sequence) -> "Homomorphism":
        imgs = [target.index_of(x) for x in gen_images]
        if len(imgs) != len(source.generators()):
            raise InputError(
                f"{source.name}->{target.name}: expected {len(source.generators())} generator images, got {len(imgs)}"
            )
        ext = source.extend(target, imgs)
        if ext is None:
            raise InputError(f"{source.name}->{target.name}: generator images do not define a homomorphism")
        return cls(source, target, ext)

    @classmethod
    def from_function(cls, source: FiniteGroup, target: FiniteGroup, fn: Callable[[int], int]) -> "Homomorphism":
        h = cls(source, target, tuple(fn(g) for g in source.elements))
        if not h.is_valid():
            raise InputError(f"{source.name}->{target.name}: not a homomorphism")
        return h

    @classmethod
    def identity(cls, g: FiniteGroup) -> "Homomorphism":
        return cls(g, g, tuple(g.elements))

    @classmethod
    def trivial(cls, source: FiniteGroup, target: FiniteGroup) -> "Homomorphism":
        return cls(source, target, (0,) * source.order)

    def __call__(self, g: int) -> int:
        return self.images[g]

    def is_valid(self) -> bool:
        s, t = self.source, self.target
        return all(
            self.images[s.mul(x, g)] == t.mul(self.images[x], self.images[g])
            for x in s.elements
            for g in s.generators()
        )

    def image(self) -> frozenset[int]:
        return frozenset(self.images)

    def kernel(self) -> frozenset[int]:
        return frozenset(g for g, x in enumerate(self.images) if x == 0)

    def is_injective(self) -> bool:
        return len(self.kernel()) == 1

    def is_surjective(self) -> bool:
        return len(self.image()) == self.target.order

    def preimage(self, s: Iterable[int]) -> frozenset[int]:
        s = frozenset(s)
        return frozenset(g for g, x in enumerate(self.images) if x in s)

    def then(self, other: "Homomorphism") -> "Homomorphism":
        """``other ∘ self``."""
        if other.source is not self.target:
            raise InputError("composition of non-matching homomorphisms")
        return Homomorphism(self.source, other.target, tuple(other.images[x] for x in self.images))

    def generator_images(self) -> list[int]:
        return [self.images[g] for g in self.source.generators()]


# -- constructors -------------------------------------------------------------


def from_table(table, labels=None, name="G") -> FiniteGroup:
    n = len(table)
    return FiniteGroup(labels or [str(i) for i in range(n)], table=table, name=name)


def from_permutations(gens: Sequence[Sequence[int]], name="G", degree: int | None = None) -> FiniteGroup:
    gens = [tuple(g) for g in gens]
    if degree is None:
        degree = max((len(g) for g in gens), default=0)
    for g in gens:
        if sorted(g) != list(range(degree)):
            raise InputError(f"{name}: {g} is not a permutation of {degree} points")
    ident = tuple(range(degree))
    elems, seen = [ident], {ident}
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for g in gens:
            q = perm_mul(p, g)
            if q not in seen:
                seen.add(q)
                elems.append(q)
                queue.append(q)
    labels = [_cycle_label(p) for p in elems]
    return FiniteGroup(labels, perms=elems, name=name)


def _cycle_label(p: Perm) -> str:
    seen, cycles = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        c, j = [], i
        while j not in seen:
            seen.add(j)
            c.append(str(j + 1))
            j = p[j]
        cycles.append("(" + " ".join(c) + ")")
    return "".join(cycles) or "()"


def trivial_group(name="1") -> FiniteGroup:
    return FiniteGroup(["e"], table=[[0]], name=name)


def cyclic(n: int, name: str | None = None) -> FiniteGroup:
    if n < 1:
        raise InputError("cyclic group needs n >= 1")
    return FiniteGroup([str(i) for i in range(n)], table=[[(i + j) % n for j in range(n)] for i in range(n)],
                       name=name or f"Z{n}")


def units_mod(n: int, name: str | None = None) -> FiniteGroup:
    """The unit group of Z/n under multiplication (labels are the residues)."""
    units = sorted((k for k in range(n) if math.gcd(k, n) == 1), key=lambda k: (k != 1 % n, k))
    pos = {k: i for i, k in enumerate(units)}
    table = [[pos[(a * b) % n] for b in units] for a in units]
    return FiniteGroup([str(k) for k in units], table=table, name=name or f"U{n}")


def symmetric(n: int) -> FiniteGroup:
    if n <= 1:
        return trivial_group("S1")
    gens = [tuple([1, 0] + list(range(2, n)))]
    if n > 2:
        gens.append(tuple(list(range(1, n)) + [0]))
    return from_permutations(gens, name=f"S{n}", degree=n)


def alternating(n: int) -> FiniteGroup:
    if n <= 2:
        return trivial_group(f"A{n}")
    gens = [tuple([1, 2, 0] + list(range(3, n)))]
    for k in range(3, n):
        p = list(range(n))
        p[0], p[1], p[k] = 1, k, 0
        gens.append(tuple(p))
    return from_permutations(gens, name=f"A{n}", degree=n)


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    if n == 1:
        return cyclic(2, "D1")
    if n == 2:
        return direct_product(cyclic(2), cyclic(2), name="D2")
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return from_permutations([rot, ref], name=f"D{n}", degree=n)


def quaternion() -> FiniteGroup:
    # units 1,i,j,k as (sign, basis); basis products follow i*j = k.
    basis = {("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
             ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
             ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
             ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1")}
    elems = [(s, b) for s in (1, -1) for b in "1ijk"]
    pos = {e: i for i, e in enumerate(elems)}
    table = []
    for s1, b1 in elems:
        row = []
        for s2, b2 in elems:
            s, b = basis[(b1, b2)]
            row.append(pos[(s1 * s2 * s, b)])
        table.append(row)
    labels = [("" if s > 0 else "-") + b for s, b in elems]
    return FiniteGroup(labels, table=table, name="Q8")


def direct_product(g: FiniteGroup, h: FiniteGroup, name: str | None = None) -> FiniteGroup:
    n = h.order
    labels = [f"({g.labels[a]},{h.labels[b]})" for a in g.elements for b in h.elements]
    table = [[g.mul(a1, a2) * n + h.mul(b1, b2) for a2 in g.elements for b2 in h.elements]
             for a1 in g.elements for b1 in h.elements]
    return FiniteGroup(labels, table=table, name=name or f"{g.name}x{h.name}")


def semidirect_product(k: FiniteGroup, q: FiniteGroup, action: Sequence[Sequence[int]],
                       name: str | None = None) -> FiniteGroup:
    """``K ⋊ Q`` with ``(k1,q1)(k2,q2) = (k1 * q1(k2), q1 q2)``; element ``(k,q)`` has index ``k*|Q|+q``."""
    validate_action(k, q, action)
    n = q.order
    labels = [f"({k.labels[a]},{q.labels[b]})" for a in k.elements for b in q.elements]
    table = [[k.mul(a1, action[b1][a2]) * n + q.mul(b1, b2) for a2 in k.elements for b2 in q.elements]
             for a1 in k.elements for b1 in q.elements]
    return FiniteGroup(labels, table=table, name=name or f"{k.name}:{q.name}")


def validate_action(k: FiniteGroup, q: FiniteGroup, action: Sequence[Sequence[int]]) -> None:
    """Raise unless ``action[q]`` is an automorphism of ``k`` and ``q -> action[q]`` is a homomorphism."""
    if len(action) != q.order:
        raise InputError("action must list one automorphism per element of Q")
    for b in q.elements:
        a = action[b]
        if sorted(a) != list(k.elements):
            raise InputError(f"action of {q.labels[b]} is not a bijection")
        for x in k.elements:
            for y in k.generators():
                if a[k.mul(x, y)] != k.mul(a[x], a[y]):
                    raise InputError(f"action of {q.labels[b]} is not a homomorphism")
    if list(action[0]) != list(k.elements):
        raise InputError("identity of Q must act trivially")
    for b1 in q.generators():
        for b2 in q.elements:
            prod = action[q.mul(b1, b2)]
            if any(prod[x] != action[b1][action[b2][x]] for x in k.elements):
                raise InputError("action does not respect multiplication in Q")


def multiplication_action(k: FiniteGroup, q: FiniteGroup, modulus: int) -> list[list[int]]:
    """Units mod ``modulus`` acting on ``Z/modulus`` by multiplication (labels are residues)."""
    return [[k.index_of(str((int(k.labels[x]) * int(q.labels[u])) % modulus)) for x in k.elements]
            for u in q.elements]


def isomorphic(g: FiniteGroup, h: FiniteGroup) -> bool:
    if g.order != h.order:
        return False
    if sorted(g.element_order(a) for a in g.elements) != sorted(h.element_order(a) for a in h.elements):
        return False
    return any(f.is_injective() for f in g.homs_to(h))


def group_from_name(text: str) -> FiniteGroup:
    """Parse short names such as ``Z6``, ``S3``, ``D4``, ``Q8``, ``A4``, ``U9``, ``Z2xZ4``."""
    text = text.strip()
    if "x" in text and not text.startswith("x"):
        parts = [group_from_name(p) for p in text.split("x")]
        out = parts[0]
        for p in parts[1:]:
            out = direct_product(out, p)
        out.name = text
        return out
    if text in ("1", "Z1", "C1", "trivial"):
        return trivial_group()
    if text == "Q8":
        return quaternion()
    if text in ("V4", "K4"):
        return direct_product(cyclic(2), cyclic(2), name=text)
    head, tail = text[0], text[1:]
    if not tail.isdigit():
        raise InputError(f"unknown group name {text!r}")
    n = int(tail)
    makers = {"Z": cyclic, "C": cyclic, "S": symmetric, "A": alternating, "D": dihedral, "U": units_mod}
    if head not in makers:
        raise InputError(f"unknown group name {text!r}")
    return makers[head](n)


def small_group_corpus(max_order: int = 24) -> list[FiniteGroup]:
    """A fixed list of small groups used by the property and acceptance suites."""
    names = ["1", "Z2", "Z3", "Z4", "V4", "Z5", "Z6", "S3", "Z7", "Z8", "Z2xZ4", "D4", "Q8", "Z2xZ2xZ2",
             "Z9", "Z3xZ3", "Z10", "D5", "Z12", "A4", "D6", "Z2xZ6", "S3xZ3", "D8", "S4", "Z3xQ8"]
    out = []
    for n in names:
        g = group_from_name(n)
        if g.order <= max_order:
            g.name = n
            out.append(g)
    dic = semidirect_product(cyclic(3), cyclic(4), [[0, 1, 2], [0, 2, 1], [0, 1, 2], [0, 2, 1]], name="Dic3")
    if dic.order <= max_order:
        out.append(dic)
    return out


# -- towers and approximate groups ----------------------------------------------


@dataclass
class QuotientTower:
    """Finite levels ``G_1 <- G_2 <- ... <- G_d`` with surjective transitions.

    ``levels[0]`` is the coarsest quotient and ``transitions[n]`` maps
    ``levels[n+1]`` onto ``levels[n]``.
    """

    levels: list[FiniteGroup]
    transitions: list[Homomorphism]

    def __post_init__(self):
        if not self.levels:
            raise InputError("a tower needs at least one level")
        if len(self.transitions) != len(self.levels) - 1:
            raise InputError("a tower of depth d needs d-1 transitions")
        for n, q in enumerate(self.transitions):
            if q.source is not self.levels[n + 1] or q.target is not self.levels[n]:
                raise InputError(f"transition {n} does not connect levels {n + 1} and {n}")
            if not q.is_valid():
                raise InputError(f"transition {n} is not a homomorphism")
            if not q.is_surjective():
                raise InputError(f"transition {n} is not surjective")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def projection(self, m: int, n: int) -> Homomorphism:
        """Composite map from level ``m`` down to level ``n <= m``."""
        if n > m:
            raise InputError("projection goes from a finer to a coarser level")
        h = Homomorphism.identity(self.levels[m])
        for k in range(m - 1, n - 1, -1):
            h = h.then(self.transitions[k])
        return h

    @classmethod
    def cyclic_tower(cls, moduli: Sequence[int]) -> "QuotientTower":
        """``Z/m_1 <- Z/m_2 <- ...`` by reduction, each modulus dividing the next."""
        levels = [cyclic(m) for m in moduli]
        trans = []
        for a, b in zip(levels, levels[1:]):
            if b.order % a.order:
                raise InputError("each modulus must divide the next")
            trans.append(Homomorphism(b, a, tuple(x % a.order for x in b.elements)))
        return cls(levels, trans)


class ApproxGroup:
    """Common interface: a group known through its finite levels."""

    depth: int | None = None  # None means every level is the same group
    free_rank: int | None = None

    def level(self, n: int) -> FiniteGroup:
        raise NotImplementedError

    def projection(self, m: int, n: int) -> Homomorphism:
        raise NotImplementedError

    def levels(self, default_depth: int = 1) -> int:
        return self.depth if self.depth is not None else default_depth


class Finite(ApproxGroup):
    def __init__(self, group: FiniteGroup):
        self.group = group

    def level(self, n):
        return self.group

    def projection(self, m, n):
        return Homomorphism.identity(self.group)

    def __repr__(self):
        return f"Finite({self.group.name})"


class Tower(ApproxGroup):
    def __init__(self, tower: QuotientTower):
        self.tower = tower
        self.depth = tower.depth

    def level(self, n):
        if not 0 <= n < self.depth:
            raise InputError(f"level {n} outside tower depth {self.depth}")
        return self.tower.levels[n]

    def projection(self, m, n):
        return self.tower.projection(m, n)


class FreeDiscrete(ApproxGroup):
    """A free discrete group; it has no finite levels of its own."""

    def __init__(self, rank: int):
        self.free_rank = rank

    def level(self, n):
        raise InputError("a free discrete group has no finite levels; map it into one")

    def projection(self, m, n):
        raise InputError("a free discrete group has no finite levels")


class Product(ApproxGroup):
    def __init__(self, a: ApproxGroup, b: ApproxGroup):
        self.a, self.b = a, b
        ds = [d for d in (a.depth, b.depth) if d is not None]
        self.depth = min(ds) if ds else None
        self._cache: dict[int, FiniteGroup] = {}

    def level(self, n):
        if n not in self._cache:
            self._cache[n] = direct_product(self.a.level(n), self.b.level(n))
        return self._cache[n]

    def projection(self, m, n):
        pa, pb = self.a.projection(m, n), self.b.projection(m, n)
        src, tgt = self.level(m), self.level(n)
        nb_src, nb_tgt = self.b.level(m).order, self.b.level(n).order
        return Homomorphism(src, tgt, tuple(pa(x // nb_src) * nb_tgt + pb(x % nb_src) for x in src.elements))


class Semidirect(ApproxGroup):
    """``K ⋊ Q`` with ``action(n)`` giving the level-``n`` automorphism table."""

    def __init__(self, k: ApproxGroup, q: ApproxGroup, action: Callable[[int], Sequence[Sequence[int]]]):
        self.k, self.q, self.action = k, q, action
        ds = [d for d in (k.depth, q.depth) if d is not None]
        self.depth = min(ds) if ds else None
        self._cache: dict[int, FiniteGroup] = {}

    def level(self, n):
        if n not in self._cache:
            self._cache[n] = semidirect_product(self.k.level(n), self.q.level(n), self.action(n))
        return self._cache[n]

    def projection(self, m, n):
        pk, pq = self.k.projection(m, n), self.q.projection(m, n)
        src, tgt = self.level(m), self.level(n)
        qs, qt = self.q.level(m).order, self.q.level(n).order
        return Homomorphism(src, tgt, tuple(pk(x // qs) * qt + pq(x % qs) for x in src.elements))


def as_approx(g) -> ApproxGroup:
    if isinstance(g, ApproxGroup):
        return g
    if isinstance(g, FiniteGroup):
        return Finite(g)
    if isinstance(g, QuotientTower):
        return Tower(g)
    raise InputError(f"cannot interpret {g!r} as a group")


def common_depth(*groups: ApproxGroup, default: int = 1) -> int:
    ds = [g.depth for g in groups if g.depth is not None]
    return min(ds) if ds else default


class ApproxHom:
    """A homomorphism known level by level.

    For a finite or tower source ``maps[n]`` is a :class:`Homomorphism` from
    level ``n`` of the source to level ``n`` of the target.  For a free
    discrete source it is the tuple of generator images at level ``n``.
    """

    def __init__(self, source, target, maps: Sequence):
        self.source, self.target = as_approx(source), as_approx(target)
        self.maps = list(maps)
        if not self.maps:
            raise InputError("a homomorphism needs at least one level")
        for n, h in enumerate(self.maps):
            tgt = self.target.level(n)
            if self.source.free_rank is not None:
                if len(h) != self.source.free_rank:
                    raise InputError(f"level {n}: need {self.source.free_rank} generator images")
                self.maps[n] = tuple(tgt.index_of(x) for x in h)
            else:
                if h.source is not self.source.level(n) or h.target is not tgt:
                    raise InputError(f"level {n}: map does not match the level groups")
                if not h.is_valid():
                    raise InputError(f"level {n}: not a homomorphism")
        for n in range(len(self.maps) - 1):
            q = self.target.projection(n + 1, n)
            if self.source.free_rank is not None:
                ok = [q(x) for x in self.maps[n + 1]] == list(self.maps[n])
            else:
                p = self.source.projection(n + 1, n)
                ok = all(q(self.maps[n + 1](x)) == self.maps[n](p(x)) for x in self.source.level(n + 1).elements)
            if not ok:
                raise InputError(f"levels {n} and {n + 1} are not compatible with the transitions")

    @property
    def depth(self) -> int:
        return len(self.maps)

    def image_at(self, n: int) -> frozenset[int]:
        h = self.maps[n]
        if self.source.free_rank is not None:
            return self.target.level(n).generated(h)
        return h.image()

    @classmethod
    def finite(cls, h: Homomorphism) -> "ApproxHom":
        return cls(Finite(h.source), Finite(h.target), [h])


@dataclass
class ApproxSubgroup:
    """A compatible family of subgroups, one per level."""

    group: ApproxGroup
    levels: list[frozenset[int]] = field(default_factory=list)

    def __post_init__(self):
        self.group = as_approx(self.group)
        self.levels = [frozenset(s) for s in self.levels]
        for n, s in enumerate(self.levels):
            if not self.group.level(n).is_subgroup(s):
                raise InputError(f"level {n}: not a subgroup")

    def check_transitions(self) -> None:
        for n in range(len(self.levels) - 1):
            q = self.group.projection(n + 1, n)
            if frozenset(q(x) for x in self.levels[n + 1]) != self.levels[n]:
                raise InputError(f"transition {n + 1}->{n} does not map the subgroup onto the lower level")

    def is_normal(self) -> bool:
        return all(self.group.level(n).is_normal(s) for n, s in enumerate(self.levels))

    def __le__(self, other: "ApproxSubgroup") -> bool:
        return all(a <= b for a, b in zip(self.levels, other.levels))


# -- operations ------------------------------------------------------------------


def thick_closure(h: ApproxSubgroup) -> ApproxSubgroup:
    """Intersection of the open subgroups containing ``h``.

    Open subgroups of a tower are pullbacks of subgroups of some level, so the
    level-``n`` part of the closure is the intersection, over finer levels
    ``m``, of the projections of the smallest open subgroup seen at level ``m``.
    """
    h.check_transitions()
    g = h.group
    out = []
    for n in range(len(h.levels)):
        acc = h.levels[n]
        for m in range(n, len(h.levels)):
            p = g.projection(m, n)
            acc = acc & frozenset(p(x) for x in h.levels[m])
        out.append(acc)
    return ApproxSubgroup(g, out)


def smallest_normal_thickly_closed(gens: Sequence, group, depth: int | None = None) -> ApproxSubgroup:
    """Level-wise normal closure of ``gens``, given as elements of the finest level."""
    g = as_approx(group)
    d = depth or g.levels(1)
    top = g.level(d - 1)
    idx = [top.index_of(x) for x in gens]
    out = []
    for n in range(d):
        p = g.projection(d - 1, n)
        out.append(g.level(n).normal_closure(p(x) for x in idx))
    return ApproxSubgroup(g, out)


def has_dense_image(h: ApproxHom) -> bool:
    """True iff every target level is hit, i.e. every ``G -> G/U`` is onto."""
    return all(len(h.image_at(n)) == h.target.level(n).order for n in range(h.depth))


def noohi_quotient(group, n: ApproxSubgroup) -> ApproxGroup:
    """The tower of level quotients ``G_n / N_n``."""
    g = as_approx(group)
    if not n.is_normal():
        raise InputError("quotient by a family that is not normal at every level")
    n.check_transitions()
    quots = [g.level(k).quotient(s) for k, s in enumerate(n.levels)]
    if len(quots) == 1 and g.depth is None:
        return Finite(quots[0][0])
    trans = []
    for k in range(len(quots) - 1):
        qk, pk = quots[k]
        qk1, pk1 = quots[k + 1]
        t = g.projection(k + 1, k)
        reps = {}
        for x in g.level(k + 1).elements:
            reps.setdefault(pk1(x), x)
        trans.append(Homomorphism(qk1, qk, tuple(pk(t(reps[c])) for c in qk1.elements)))
    return Tower(QuotientTower([q for q, _ in quots], trans))


@dataclass
class SemidirectReport:
    group: FiniteGroup
    embed_k: Homomorphism
    embed_q: Homomorphism
    violations: list[tuple[int, int]]
    checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def semidirect_check(k: FiniteGroup, q: FiniteGroup, action: Sequence[Sequence[int]]) -> SemidirectReport:
    """Build ``K ⋊ Q`` and confirm ``q k q^-1 = q(k)`` for every pair.

    The two embeddings together are the canonical map out of the free product.
    """
    g = semidirect_product(k, q, action)
    n = q.order
    ek = Homomorphism(k, g, tuple(x * n for x in k.elements))
    eq = Homomorphism(q, g, tuple(b for b in q.elements))
    if not (ek.is_valid() and eq.is_valid()):
        raise InputError("semidirect embeddings are not homomorphisms")
    bad = []
    for b in q.elements:
        for x in k.elements:
            if g.conj(eq(b), ek(x)) != ek(action[b][x]):
                bad.append((x, b))
    return SemidirectReport(g, ek, eq, bad, k.order * q.order)


def quotient_by_closure_consistency(group, n: ApproxSubgroup, v: ApproxSubgroup) -> bool:
    """Compare the coset spaces ``G/NV`` and ``G/N̄V`` level by level, with their actions."""
    g = as_approx(group)
    closed = thick_closure(n)
    for k, (nk, ck, vk) in enumerate(zip(n.levels, closed.levels, v.levels)):
        lev = g.level(k)
        spaces = []
        for normal in (nk, ck):
            q, proj = lev.quotient(normal)
            image_v = frozenset(proj(x) for x in vk)
            cosets = q.left_cosets(image_v)
            where = {c: i for i, cs in enumerate(cosets) for c in cs}
            # action of each level element on the coset space
            spaces.append([tuple(where[q.mul(proj(x), cs[0])] for cs in cosets) for x in lev.elements])
        if spaces[0] != spaces[1]:
            return False
    return True
