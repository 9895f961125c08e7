"""Van Kampen presentations from group data on a 2-complex, and hom counting."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .complexes import GraphWithTree, GroupData, TwoComplex, spanning_tree, validate_group_data
from .errors import Inconclusive, InputError
from .groups import FiniteGroup, Homomorphism
from .words import Atom, Word, conjugate_in_free_product, invert, reduce

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class Relation:
    kind: str  # "R1", "R2" or "extra"
    source: str
    word: Word  # reduced
    raw: Word = ()


@dataclass
class Presentation:
    """Vertex factors (finite groups with their tables), free edge generators and relations."""

    factors: dict[str, FiniteGroup]
    edges: tuple[str, ...]
    relations: list[Relation] = field(default_factory=list)
    tree: frozenset[str] = frozenset()

    def relations_of(self, kind: str) -> list[Relation]:
        return [r for r in self.relations if r.kind == kind]

    def words(self) -> list[Word]:
        return [r.word for r in self.relations]

    def generator_count(self) -> int:
        return sum(len(g.generators()) for g in self.factors.values()) + len(self.edges)

    def free_product(self, other: "Presentation", tag: str = "'") -> "Presentation":
        """Disjoint free product; clashing names in ``other`` get ``tag`` appended."""
        names = set(self.factors) | set(self.edges)
        ren = {}
        for n in list(other.factors) + list(other.edges):
            ren[n] = n + tag if n in names else n
        rel = [Relation(r.kind, ren.get(r.source, r.source),
                        tuple(Atom(a.kind, ren[a.home], a.value) for a in r.word)) for r in other.relations]
        return Presentation({**self.factors, **{ren[v]: g for v, g in other.factors.items()}},
                            self.edges + tuple(ren[e] for e in other.edges),
                            self.relations + rel)


def _edge_letter(e: str, exp: int, tree: frozenset[str]) -> tuple[Atom, ...]:
    return () if e in tree else (Atom.edge(e, exp),)


def edge_word(complex_: TwoComplex, data: GroupData, e: str, g: int, tree: frozenset[str] = frozenset()) -> Word:
    """``∂1(g) e ∂0(g)⁻¹ e⁻¹`` with the letter ``e`` dropped when it lies in ``tree``."""
    o, tg = complex_.origin(e), complex_.target(e)
    gt = data.groups[tg]
    return ((Atom.vertex(o, data.maps[(e, 1)](g)),) + _edge_letter(e, 1, tree)
            + (Atom.vertex(tg, gt.inv(data.maps[(e, 0)](g))),) + _edge_letter(e, -1, tree))


def face_word(complex_: TwoComplex, data: GroupData, f: str, tree: frozenset[str] = frozenset()) -> Word:
    """The cocycle relation of a face, read as a loop ``v0 -> v1 -> v2 -> v0``."""
    v0, v1, v2 = complex_.face_vertices[f]
    e0, e1, e2 = complex_.E2[f]
    a = data.alpha
    g0, g1, g2 = (data.groups[v] for v in (v0, v1, v2))
    return (_edge_letter(e2, 1, tree)
            + (Atom.vertex(v1, g1.mul(a[(f, 2, 0)], g1.inv(a[(f, 0, 1)]))),)
            + _edge_letter(e0, 1, tree)
            + (Atom.vertex(v2, g2.mul(a[(f, 0, 0)], g2.inv(a[(f, 1, 0)]))),)
            + _edge_letter(e1, -1, tree)
            + (Atom.vertex(v0, g0.mul(a[(f, 1, 1)], g0.inv(a[(f, 2, 1)]))),))


def build_presentation(complex_: TwoComplex, data: GroupData, tree: GraphWithTree | None = None,
                       paths: Mapping[tuple, int] | None = None) -> Presentation:
    """Generators: vertex groups and non-tree edges.  Relations: one per edge-group generator and one per face.

    If ``paths`` is given, ``data`` is read as strictly functorial raw data and
    twisted by those paths first.
    """
    if paths is not None:
        data = GroupData.from_paths(complex_, data.groups, data.maps, paths)
    bad = validate_group_data(complex_, data)
    if bad:
        raise InputError(f"group data squares fail at {bad}")
    tree = tree or spanning_tree(complex_)
    t = tree.tree
    groups = {v: data.groups[v] for v in complex_.E0}
    rels = []
    for e in sorted(complex_.E1):
        for g in data.groups[e].generators():
            raw = edge_word(complex_, data, e, g, t)
            rels.append(Relation("R1", e, reduce(raw, groups), raw))
    for f in sorted(complex_.E2):
        raw = face_word(complex_, data, f, t)
        rels.append(Relation("R2", f, reduce(raw, groups), raw))
    return Presentation(groups, tuple(tree.non_tree_edges()), rels, t)


# -- hom counting ----------------------------------------------------------------


def _evaluator(word: Word, edge_pos: Mapping[str, int], factor_pos: Mapping[str, int]):
    return [(a.is_vertex, factor_pos[a.home] if a.is_vertex else edge_pos[a.home], a.value) for a in word]


def count_homs(p: Presentation, target: FiniteGroup, budget: int = DEFAULT_BUDGET) -> int:
    """Number of homomorphisms from the presented group to ``target``.

    Vertex factors range over their homomorphisms into ``target``, edges over
    its elements.  Relations are checked as soon as every symbol they use is
    assigned.  More than ``budget`` candidate assignments is inconclusive.
    """
    names = list(p.factors)
    factor_homs = [[h.images for h in p.factors[v].homs_to(target)] for v in names]
    space = 1
    for hs in factor_homs:
        space *= max(1, len(hs))
    space *= target.order ** len(p.edges)
    if space > budget:
        raise Inconclusive(f"{space} assignments exceed the budget {budget}")
    fpos = {v: i for i, v in enumerate(names)}
    epos = {e: i for i, e in enumerate(p.edges)}
    # a symbol's slot in assignment order: factors first, then edges
    slot = {("v", v): i for i, v in enumerate(names)}
    slot.update({("e", e): len(names) + i for i, e in enumerate(p.edges)})
    by_slot: dict[int, list] = {}
    for r in p.relations:
        for a in r.word:
            key = ("v", a.home) if a.is_vertex else ("e", a.home)
            if key not in slot:
                raise InputError(f"relation {r.source} uses unknown generator {a.home}")
        last = max((slot[("v", a.home) if a.is_vertex else ("e", a.home)] for a in r.word), default=-1)
        if last < 0:
            continue  # empty relation
        by_slot.setdefault(last, []).append(_evaluator(r.word, epos, fpos))
    mul, power = target.mul, target.power
    nslots = len(names) + len(p.edges)
    fimg: list = [None] * len(names)
    eimg: list = [0] * len(p.edges)

    def holds(ev) -> bool:
        x = 0
        for is_v, pos, val in ev:
            x = mul(x, fimg[pos][val] if is_v else power(eimg[pos], val))
        return x == 0

    def rec(k: int) -> int:
        if k == nslots:
            return 1
        total = 0
        choices = factor_homs[k] if k < len(names) else target.elements
        for c in choices:
            if k < len(names):
                fimg[k] = c
            else:
                eimg[k - len(names)] = c
            if all(holds(ev) for ev in by_slot.get(k, ())):
                total += rec(k + 1)
        return total

    return rec(0)


@dataclass
class EquivReport:
    verdict: str  # "consistent", "inconsistent" or "inconclusive"
    counts: dict[str, tuple[int | None, int | None]]
    first_mismatch: str | None = None


def presentation_equiv(p: Presentation, q: Presentation, tests: Sequence[FiniteGroup],
                       budget: int = DEFAULT_BUDGET) -> EquivReport:
    """Compare hom counts into each test group; agreement is evidence, never a proof of isomorphism."""
    counts, mismatch, unsure = {}, None, False
    for f in tests:
        try:
            a = count_homs(p, f, budget)
            b = count_homs(q, f, budget)
        except Inconclusive:
            counts[f.name] = (None, None)
            unsure = True
            continue
        counts[f.name] = (a, b)
        if a != b and mismatch is None:
            mismatch = f.name
    if mismatch:
        return EquivReport("inconsistent", counts, mismatch)
    return EquivReport("inconclusive" if unsure else "consistent", counts)


# -- functoriality ----------------------------------------------------------------


def map_word(w: Sequence[Atom], vertex_homs: Mapping[str, Homomorphism]) -> Word:
    out = []
    for a in w:
        if a.is_vertex:
            if a.home not in vertex_homs:
                raise InputError(f"no homomorphism given for vertex {a.home}")
            out.append(Atom.vertex(a.home, vertex_homs[a.home](a.value)))
        else:
            out.append(a)
    return tuple(out)


def _substitutions(rels: Sequence[Word], groups) -> list[tuple[Atom, Word]]:
    """Rewrite rules ``x -> u⁻¹`` for every edge letter ``x`` opening a cyclic rotation ``x u`` of a relation."""
    rules = []
    for r in rels:
        for w in (r, invert(r, groups)):
            for k in range(len(w)):
                rot = w[k:] + w[:k]
                if rot[0].is_vertex:
                    continue
                x = Atom.edge(rot[0].home, 1 if rot[0].value > 0 else -1)
                head = rot[0].value - x.value
                rest = ((Atom.edge(x.home, head),) if head else ()) + rot[1:]
                rules.append((x, invert(rest, groups)))
    return rules


def is_consequence(w: Word, rels: Sequence[Word], groups, max_steps: int = 4, max_states: int = 20000) -> bool | None:
    """Bounded search for a rewriting of ``w`` to the empty word using ``rels``; ``None`` when undecided."""
    start = reduce(w, groups)
    if not start:
        return True
    for r in rels:
        if conjugate_in_free_product(start, r, groups) is not None:
            return True
        if conjugate_in_free_product(start, invert(r, groups), groups) is not None:
            return True
    rules = _substitutions(rels, groups)
    limit = max(len(start), max(map(len, rels), default=0)) * 3
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        cur, d = frontier.popleft()
        if d == max_steps:
            continue
        for i, a in enumerate(cur):
            if a.is_vertex:
                continue
            sign = 1 if a.value > 0 else -1
            unit = Atom.edge(a.home, sign)
            rest = (Atom.edge(a.home, a.value - sign),) if a.value != sign else ()
            for x, repl in rules:
                if x != unit:
                    continue
                nxt = reduce(cur[:i] + rest + repl + cur[i + 1:], groups)
                if not nxt:
                    return True
                if len(nxt) > limit or nxt in seen:
                    continue
                seen.add(nxt)
                if len(seen) > max_states:
                    return None
                frontier.append((nxt, d + 1))
    return None


@dataclass
class FunctorialReport:
    mapping: dict[str, object]
    preserved: list[tuple[str, str]]  # (relation source, how)
    unresolved: list[str]

    @property
    def ok(self) -> bool:
        return not self.unresolved


def functorial_map(sub: Presentation, full: Presentation, vertex_homs: Mapping[str, Homomorphism],
                   max_steps: int = 4) -> FunctorialReport:
    """Send vertex letters through ``vertex_homs`` and edges to themselves; check every relation survives."""
    if set(sub.edges) != set(full.edges) or sub.tree != full.tree:
        raise InputError("presentations do not share the graph and tree")
    for v, h in vertex_homs.items():
        if h.source is not sub.factors.get(v) or h.target is not full.factors.get(v):
            raise InputError(f"homomorphism at {v} does not connect the factors")
    mapping = {v: list(h.generator_images()) for v, h in vertex_homs.items()}
    mapping.update({e: e for e in sub.edges})
    targets = [r.word for r in full.relations]
    preserved, unresolved = [], []
    for r in sub.relations:
        img = reduce(map_word(r.word, vertex_homs), full.factors)
        if not img:
            preserved.append((r.source, "trivial"))
        elif img in targets:
            preserved.append((r.source, "syntactic"))
        else:
            verdict = is_consequence(img, targets, full.factors, max_steps)
            if verdict:
                preserved.append((r.source, "rewritten"))
            else:
                unresolved.append(r.source)
    return FunctorialReport(mapping, preserved, unresolved)


# -- small standard presentations ----------------------------------------------------------


def free_presentation(rank: int) -> Presentation:
    return Presentation({}, tuple(f"x{i}" for i in range(rank)), [])


def direct_product_with_z(group: FiniteGroup, name: str = "G", edge: str = "t") -> Presentation:
    """``group × Z``: the generator ``t`` commutes with each generator of ``group``."""
    rels = []
    for g in group.generators():
        w = (Atom.vertex(name, g), Atom.edge(edge, 1), Atom.vertex(name, group.inv(g)), Atom.edge(edge, -1))
        rels.append(Relation("extra", f"[{group.labels[g]},{edge}]", reduce(w, {name: group}), w))
    return Presentation({name: group}, (edge,), rels)


def cyclic_presentation(n: int, edge: str = "t") -> Presentation:
    return Presentation({}, (edge,), [Relation("extra", f"{edge}^{n}", (Atom.edge(edge, n),))])


def presentation_to_json(p: Presentation, groups_json: bool = False) -> dict:
    from .words import to_json

    out = {
        "generators": {"vertex": {v: [g.labels[x] for x in g.generators()] for v, g in p.factors.items()},
                       "edges": list(p.edges)},
        "R1": [to_json(r.word, p.factors) for r in p.relations_of("R1")],
        "R2": [to_json(r.word, p.factors) for r in p.relations_of("R2")],
    }
    extra = p.relations_of("extra")
    if extra:
        out["extra"] = [to_json(r.word, p.factors) for r in extra]
    return out
