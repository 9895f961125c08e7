"""Finite G-sets, free-product actions, and the G-set dictionary at finite level.

Two carriers are used.  :class:`GSet` is a finite group acting on finitely
many points, stored as one permutation per group element.  :class:`ActionSet`
is a free product acting letter by letter; its edge letters may be partial
maps, which is how truncated windows of infinite sets are represented.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError
from .groups import ApproxHom, FiniteGroup, Homomorphism, QuotientTower
from .words import Atom

DEFAULT_CATALOG_BOUND = 64


class GSet:
    """A finite group acting on ``range(size)``; ``perms[g, x]`` is ``g·x``."""

    def __init__(self, group: FiniteGroup, perms, labels: Sequence | None = None, check: bool = True):
        self.group = group
        self.perms = np.asarray(perms, dtype=np.int64).reshape(group.order, -1)
        self.size = self.perms.shape[1]
        self.labels = tuple(labels) if labels is not None else tuple(range(self.size))
        if check:
            self.validate()

    def validate(self) -> None:
        g = self.group
        if self.size and not np.array_equal(self.perms[0], np.arange(self.size)):
            raise InputError("identity does not fix every point")
        for a in g.generators():
            for b in g.elements:
                if not np.array_equal(self.perms[g.mul(a, b)], self.perms[a][self.perms[b]]):
                    raise InputError("action law (gh)x = g(hx) fails")

    @classmethod
    def from_generators(cls, group: FiniteGroup, size: int, gen_perms: Sequence[Sequence[int]],
                        labels=None) -> "GSet":
        """Extend permutations of the group's generators to the whole group."""
        gens = group.generators()
        if len(gen_perms) != len(gens):
            raise InputError(f"need {len(gens)} generator permutations, got {len(gen_perms)}")
        gp = [np.asarray(p, dtype=np.int64) for p in gen_perms]
        for p in gp:
            if sorted(p.tolist()) != list(range(size)):
                raise InputError("generator image is not a permutation of the points")
        parent = group._cayley_tree
        perms = np.zeros((group.order, size), dtype=np.int64)
        perms[0] = np.arange(size)
        for x in group._bfs_order[1:]:
            y, k = parent[x]
            perms[x] = perms[y][gp[k]]
        return cls(group, perms, labels)

    @classmethod
    def coset_action(cls, group: FiniteGroup, sub: Iterable[int]) -> "GSet":
        """``G/U`` with base point the coset ``U`` itself (point 0)."""
        sub = frozenset(sub)
        if not group.is_subgroup(sub):
            raise InputError("coset action needs a subgroup")
        cosets = group.left_cosets(sub)
        where = {x: i for i, c in enumerate(cosets) for x in c}
        perms = [[where[group.mul(g, c[0])] for c in cosets] for g in group.elements]
        return cls(group, perms, labels=[c[0] for c in cosets], check=False)

    @classmethod
    def trivial(cls, group: FiniteGroup, size: int) -> "GSet":
        return cls(group, np.tile(np.arange(size), (group.order, 1)), check=False)

    def act(self, g: int, x: int) -> int:
        return int(self.perms[g, x])

    def orbits(self) -> list[list[int]]:
        seen = np.zeros(self.size, dtype=bool)
        gens = self.group.generators()
        out = []
        for x in range(self.size):
            if seen[x]:
                continue
            block, queue = [x], deque([x])
            seen[x] = True
            while queue:
                y = queue.popleft()
                for g in gens:
                    z = int(self.perms[g, y])
                    if not seen[z]:
                        seen[z] = True
                        block.append(z)
                        queue.append(z)
            out.append(sorted(block))
        return out

    def is_transitive(self) -> bool:
        return self.size > 0 and len(self.orbits()) == 1

    def stabilizer(self, x: int) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.perms[:, x] == x).tolist())

    def fixed_points(self) -> list[int]:
        return np.flatnonzero((self.perms == self.perms[0]).all(axis=0)).tolist()

    def is_completely_decomposed(self) -> bool:
        return len(self.fixed_points()) == self.size

    def pullback(self, h: Homomorphism) -> "GSet":
        if h.target is not self.group:
            raise InputError("pullback along a map whose target is not the acting group")
        return GSet(h.source, self.perms[list(h.images)], self.labels, check=False)

    def restrict(self, points: Sequence[int]) -> "GSet":
        pos = {p: i for i, p in enumerate(points)}
        try:
            perms = [[pos[int(self.perms[g, p])] for p in points] for g in self.group.elements]
        except KeyError:
            raise InputError("restriction to a non-invariant subset") from None
        return GSet(self.group, perms, [self.labels[p] for p in points], check=False)

    def disjoint_union(self, other: "GSet") -> "GSet":
        if other.group is not self.group:
            raise InputError("disjoint union over different groups")
        perms = np.concatenate([self.perms, other.perms + self.size], axis=1)
        labels = [("0", l) for l in self.labels] + [("1", l) for l in other.labels]
        return GSet(self.group, perms, labels, check=False)

    def relabel(self, perm: Sequence[int]) -> "GSet":
        """Transport along the bijection ``x -> perm[x]``."""
        perm = np.asarray(perm)
        inv = np.argsort(perm)
        return GSet(self.group, perm[self.perms[:, inv]], check=False)

    def is_equivariant_map(self, other: "GSet", f: Sequence[int], along: Homomorphism | None = None) -> bool:
        """Whether ``f(g·x) = along(g)·f(x)`` for all group generators and points."""
        f = np.asarray(f)
        for g in self.group.generators():
            img = g if along is None else along(g)
            if not np.array_equal(f[self.perms[g]], other.perms[img][f]):
                return False
        return True

    def isomorphic_transitive(self, other: "GSet") -> bool:
        """For transitive sets over one group: stabilizers conjugate."""
        a, b = self.stabilizer(0), other.stabilizer(0)
        if len(a) != len(b):
            return False
        return any(self.group.conjugate_subgroup(g, b) == a for g in self.group.elements)

    def __repr__(self):
        return f"GSet({self.group.name}, {self.size} points)"


def continuity_witnesses(s: GSet, tower: QuotientTower, level: int) -> list[int]:
    """For an action of ``tower.levels[level]``, the coarsest level each orbit factors through."""
    if s.group is not tower.levels[level]:
        raise InputError("the set is not acted on by the given tower level")
    kernels = [tower.projection(level, n).kernel() for n in range(level + 1)]
    out = [level] * s.size
    for orb in s.orbits():
        stab = frozenset.intersection(*(s.stabilizer(x) for x in orb))
        n = next(n for n in range(level + 1) if kernels[n] <= stab)
        for x in orb:
            out[x] = n
    return out


# -- free-product actions -------------------------------------------------------


class ActionSet:
    """A free product of finite vertex groups and free letters acting on points.

    ``vertex[v]`` holds one permutation per element of ``groups[v]``; ``edges[e]``
    is the action of the letter ``e`` as a partial map, ``-1`` meaning the image
    lies outside the window.
    """

    def __init__(self, size: int, groups: Mapping[str, FiniteGroup] | None = None,
                 vertex: Mapping[str, np.ndarray] | None = None, edges: Mapping[str, Sequence[int]] | None = None,
                 labels: Sequence | None = None):
        self.size = size
        self.groups = dict(groups or {})
        self.vertex = {k: np.asarray(v, dtype=np.int64) for k, v in (vertex or {}).items()}
        self.edges = {k: np.asarray(v, dtype=np.int64) for k, v in (edges or {}).items()}
        self.labels = tuple(labels) if labels is not None else tuple(range(size))
        self._inverse = {}
        for e, p in self.edges.items():
            inv = np.full(size, -1, dtype=np.int64)
            for x, y in enumerate(p.tolist()):
                if y >= 0:
                    if inv[y] >= 0:
                        raise InputError(f"letter {e} is not injective")
                    inv[y] = x
            self._inverse[e] = inv
        for v, perms in self.vertex.items():
            if v not in self.groups:
                raise InputError(f"no group for vertex {v}")
            GSet(self.groups[v], perms)  # validates the action law

    def act_atom(self, a: Atom, x: int) -> int:
        """Image of ``x`` under one letter, or -1 once the window is left."""
        if x < 0:
            return -1
        if a.is_vertex:
            return int(self.vertex[a.home][a.value, x])
        table = self.edges[a.home] if a.value > 0 else self._inverse[a.home]
        for _ in range(abs(a.value)):
            x = int(table[x])
            if x < 0:
                return -1
        return x

    def act_word(self, w: Sequence[Atom], x: int) -> int:
        """Letters act right to left, as in a left action."""
        for a in reversed(w):
            x = self.act_atom(a, x)
        return x

    def letters(self) -> list[Atom]:
        out = []
        for v, g in self.groups.items():
            if v in self.vertex:
                out.extend(Atom.vertex(v, s) for s in g.generators())
        out.extend(Atom.edge(e, 1) for e in self.edges)
        return out

    def orbits(self) -> tuple[list[list[int]], list[bool]]:
        """Orbit blocks and, per block, whether it runs off the window."""
        seen = np.zeros(self.size, dtype=bool)
        moves = [self.vertex[v][g] for v, gr in self.groups.items() if v in self.vertex for g in gr.generators()]
        moves += list(self.edges.values()) + list(self._inverse.values())
        blocks, truncated = [], []
        for x in range(self.size):
            if seen[x]:
                continue
            seen[x] = True
            block, queue, cut = [x], deque([x]), False
            while queue:
                y = queue.popleft()
                for m in moves:
                    z = int(m[y])
                    if z < 0:
                        cut = True
                    elif not seen[z]:
                        seen[z] = True
                        block.append(z)
                        queue.append(z)
            blocks.append(sorted(block))
            truncated.append(cut)
        return blocks, truncated

    def is_transitive(self) -> bool:
        blocks, cut = self.orbits()
        return len(blocks) == 1 and not cut[0]


def product_commutation(s: ActionSet, first: Sequence[Atom], second: Sequence[Atom]) -> bool:
    """Whether every letter of ``first`` commutes with every letter of ``second`` on ``s``."""
    for a in first:
        for b in second:
            for x in range(s.size):
                if s.act_atom(a, s.act_atom(b, x)) != s.act_atom(b, s.act_atom(a, x)):
                    return False
    return True


# -- catalog and the dictionary -----------------------------------------------------


def transitive_catalog(group: FiniteGroup, bound: int = DEFAULT_CATALOG_BOUND) -> tuple[list[GSet], bool]:
    """Transitive ``G``-sets up to isomorphism with at most ``bound`` points.

    The flag is ``False`` when some transitive set was left out by the bound.
    """
    out, complete = [], True
    for h in group.subgroup_classes():
        if group.order // len(h) <= bound:
            out.append(GSet.coset_action(group, h))
        else:
            complete = False
    return out, complete


def _stabilizers(s: GSet) -> list[frozenset[int]]:
    return [s.stabilizer(x) for x in range(s.size)]


@dataclass
class DictionaryReport:
    item: str
    left: bool
    right: bool
    complete: bool = True
    witness: object = None
    notes: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return self.left == self.right


def check_embedding(hp: Homomorphism, bound: int = DEFAULT_CATALOG_BOUND) -> DictionaryReport:
    """Injective ``h'`` versus domination of every transitive source set.

    Right side: every transitive ``X`` receives a map from an orbit ``X'`` of
    some pullback ``h'^*(Y)``; the orbit inclusion is the injection.  A map
    ``X' -> X`` out of a transitive set exists iff a point stabilizer of ``X'``
    sits inside a point stabilizer of ``X``.
    """
    src_cat, c1 = transitive_catalog(hp.source, bound)
    tgt_cat, c2 = transitive_catalog(hp.target, bound)
    pulled = [_stabilizers(y.pullback(hp)) for y in tgt_cat]
    witness = None
    for x in src_cat:
        stab_x = set(_stabilizers(x))
        if not any(sy <= sx for stabs in pulled for sy in stabs for sx in stab_x):
            witness = x
            break
    return DictionaryReport("embedding", hp.is_injective(), witness is None, c1 and c2, witness)


def _level_pullback_orbits(h, n: int, y: GSet) -> list[list[int]]:
    m = h.maps[n]
    if isinstance(m, Homomorphism):
        return y.pullback(m).orbits()
    g = y.group
    moves = {f"x{i}": y.perms[g.index_of(x)] for i, x in enumerate(m)}
    return ActionSet(y.size, edges=moves).orbits()[0]


def check_dense_iff_connected(h, bound: int = DEFAULT_CATALOG_BOUND) -> DictionaryReport:
    """Dense image versus: pullbacks of transitive sets stay transitive.

    Also compares hom-set sizes between catalog objects and their pullbacks,
    the fully faithful half of the same statement (finite sources only).
    """
    from .groups import has_dense_image

    if isinstance(h, Homomorphism):
        h = ApproxHom.finite(h)
    left = has_dense_image(h)
    right, complete, witness = True, True, None
    faithful = True
    for n in range(h.depth):
        cat, c = transitive_catalog(h.target.level(n), bound)
        complete &= c
        for y in cat:
            if len(_level_pullback_orbits(h, n, y)) != 1:
                right, witness = False, (n, y)
                break
        if not right:
            break
        m = h.maps[n]
        if isinstance(m, Homomorphism):
            faithful &= _hom_counts_match(m, cat)
    return DictionaryReport("dense", left, right, complete, witness, {"fully_faithful": faithful})


def _hom_count(src: GSet, tgt: GSet) -> int:
    """Number of equivariant maps ``src -> tgt`` (product over source orbits)."""
    total = 1
    tstabs = _stabilizers(tgt)
    for orb in src.orbits():
        stab = src.stabilizer(orb[0])
        total *= sum(1 for t in tstabs if stab <= t)
    return total


def _hom_counts_match(m: Homomorphism, cat: list[GSet]) -> bool:
    for a in cat:
        pa = a.pullback(m)
        for b in cat:
            if _hom_count(a, b) != _hom_count(pa, b.pullback(m)):
                return False
    return True


def check_normal_image(hp: Homomorphism, bound: int = DEFAULT_CATALOG_BOUND) -> DictionaryReport:
    """Normal image versus: a fixed point in ``h'^*(Y)`` forces complete decomposition."""
    left = hp.target.is_normal(hp.image())
    cat, complete = transitive_catalog(hp.target, bound)
    witness = None
    for y in cat:
        p = y.pullback(hp)
        if p.fixed_points() and not p.is_completely_decomposed():
            witness = y
            break
    return DictionaryReport("normal_image", left, witness is None, complete, witness)


def check_kernel_exactness(hp: Homomorphism, h: Homomorphism, bound: int = DEFAULT_CATALOG_BOUND) -> DictionaryReport:
    """Normal closure of ``im h'`` equals ``ker h`` versus the essential-image test.

    The image-in-kernel condition is checked first on both sides; when it
    fails the report's item is ``composite_trivial`` and carries the failure.
    """
    if hp.target is not h.source:
        raise InputError("h' and h do not compose")
    comp = hp.then(h)
    zcat, cz = transitive_catalog(h.target, bound)
    item4_left = hp.image() <= h.kernel()
    item4_right = all(z.pullback(comp).is_completely_decomposed() for z in zcat)
    if not (item4_left and item4_right):
        return DictionaryReport("composite_trivial", item4_left, item4_right, cz,
                                witness="image of h' not inside ker h")
    if not h.is_surjective():
        return DictionaryReport("composite_trivial", True, True, cz, witness="h is not dense",
                                notes={"precondition": "dense"})
    g1 = hp.target
    left = g1.normal_closure(hp.image()) == h.kernel()
    ycat, cy = transitive_catalog(g1, bound)
    pulled_z = [z.pullback(h) for z in zcat]
    witness = None
    for y in ycat:
        if not y.pullback(hp).is_completely_decomposed():
            continue
        if not any(pz.is_transitive() and pz.isomorphic_transitive(y) for pz in pulled_z):
            witness = y
            break
    return DictionaryReport("kernel_exactness", left, witness is None, cz and cy, witness)
