"""Seeded random instances: G-sets, their automorphisms, systems and descent data."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .complexes import (DescentDatum, GroupData, LcsSystem, TwoComplex, cech_complex,
                        nodal_complex, twist_system)
from .groups import FiniteGroup, Homomorphism, trivial_group
from .gsets import GSet


@dataclass
class Orbits:
    """A G-set built as a disjoint union of coset spaces, remembering the subgroups."""

    group: FiniteGroup
    subs: list[frozenset[int]]
    gset: GSet

    @classmethod
    def build(cls, group: FiniteGroup, subs) -> "Orbits":
        subs = [frozenset(h) for h in subs]
        if not subs:
            return cls(group, subs, GSet(group, np.zeros((group.order, 0), dtype=np.int64), check=False))
        s = GSet.coset_action(group, subs[0])
        for h in subs[1:]:
            s = s.disjoint_union(GSet.coset_action(group, h))
        return cls(group, subs, s)

    def automorphism(self, rng: random.Random) -> np.ndarray:
        """A random G-automorphism: right translations within orbits, swaps of orbits with equal stabilizer."""
        g = self.group
        offsets, n = [], 0
        cosets = []
        for h in self.subs:
            offsets.append(n)
            cs = g.left_cosets(h)
            cosets.append(cs)
            n += len(cs)
        target = list(range(len(self.subs)))
        for h in set(self.subs):
            idx = [i for i, k in enumerate(self.subs) if k == h]
            shuffled = idx[:]
            rng.shuffle(shuffled)
            for a, b in zip(idx, shuffled):
                target[a] = b
        out = np.zeros(n, dtype=np.int64)
        for i, h in enumerate(self.subs):
            normalizer = [x for x in g.elements if g.conjugate_subgroup(x, h) == h]
            t = rng.choice(normalizer)
            j = target[i]
            where = {x: k for k, c in enumerate(cosets[j]) for x in c}
            for k, c in enumerate(cosets[i]):
                out[offsets[i] + k] = offsets[j] + where[g.mul(c[0], t)]
        return out


def random_orbits(group: FiniteGroup, rng: random.Random, max_points: int = 6, max_orbits: int = 3) -> Orbits:
    subs = [h for h in group.subgroups() if group.order // len(h) <= max_points]
    chosen, size = [], 0
    for _ in range(rng.randint(1, max_orbits)):
        fits = [h for h in subs if size + group.order // len(h) <= max_points]
        if not fits:
            break
        h = rng.choice(fits)
        chosen.append(h)
        size += group.order // len(h)
    return Orbits.build(group, chosen)


def random_graph_complex(rng: random.Random, max_vertices: int = 3, max_edges: int = 4) -> TwoComplex:
    """A connected graph (loops allowed) viewed as a complex without faces."""
    nv = rng.randint(1, max_vertices)
    verts = [f"v{i}" for i in range(nv)]
    edges = {}
    for i in range(1, nv):
        j = rng.randrange(i)
        ends = (verts[i], verts[j]) if rng.random() < 0.5 else (verts[j], verts[i])
        edges[f"e{len(edges)}"] = ends
    for _ in range(rng.randint(0, max(0, max_edges - len(edges)))):
        edges[f"e{len(edges)}"] = (rng.choice(verts), rng.choice(verts))
    return TwoComplex(verts, edges, {})


def graph_system(complex_: TwoComplex, groups: dict[str, FiniteGroup], rng: random.Random,
                 max_points: int = 6) -> LcsSystem:
    """Vertex groups act on equal-size fibres; edges carry trivial groups and random bijections."""
    one = trivial_group()
    vsets = {}
    size = None
    for v in complex_.E0:
        for _ in range(50):
            o = random_orbits(groups[v], rng, max_points)
            if size is None or o.gset.size == size:
                break
        else:
            o = Orbits(groups[v], [], GSet.trivial(groups[v], size))
        size = o.gset.size
        vsets[v] = o.gset
    sets = dict(vsets)
    maps = {}
    data_groups = {v: groups[v] for v in complex_.E0}
    hmaps = {}
    for e in complex_.E1:
        data_groups[e] = one
        sets[e] = GSet.trivial(one, size)
        for i in (0, 1):
            perm = list(range(size))
            rng.shuffle(perm)
            maps[(e, i)] = np.array(perm, dtype=np.int64)
            hmaps[(e, i)] = Homomorphism.trivial(one, groups[complex_.boundary(e, i)])
    data = GroupData(data_groups, hmaps, {}, {})
    return LcsSystem(complex_, data, sets, maps)


def strict_system(complex_: TwoComplex, group: FiniteGroup, rng: random.Random, max_points: int = 6) -> LcsSystem:
    """Constant data; maps are differences of random automorphisms of one G-set, so every triangle commutes."""
    o = random_orbits(group, rng, max_points)
    beta = {s: o.automorphism(rng) for s in complex_.simplices()}
    inv = {s: np.argsort(b) for s, b in beta.items()}
    maps = {}
    for s, i in complex_.boundary_keys():
        maps[(s, i)] = beta[complex_.boundary(s, i)][inv[s]]
    for f, k in complex_.face_keys():
        maps[(f, "v", k)] = beta[complex_.vertex_of(f, k)][inv[f]]
    data = GroupData.constant(complex_, group)
    return LcsSystem(complex_, data, {s: o.gset for s in complex_.simplices()}, maps)


def random_paths(complex_: TwoComplex, group: FiniteGroup, rng: random.Random) -> dict:
    keys = list(complex_.boundary_keys()) + [(f, "v", k) for f, k in complex_.face_keys()]
    return {k: rng.randrange(group.order) for k in keys}


def twisted_system(complex_: TwoComplex, group: FiniteGroup, rng: random.Random, max_points: int = 6) -> LcsSystem:
    """A strict system transported to gauge-twisted group data."""
    m = strict_system(complex_, group, rng, max_points)
    paths = random_paths(complex_, group, rng)
    ident = Homomorphism.identity(group)
    data = GroupData.from_paths(complex_, {s: group for s in complex_.simplices()},
                                {k: ident for k in complex_.boundary_keys()}, paths)
    return twist_system(m, data, paths)


def triangle_complex() -> TwoComplex:
    return TwoComplex(["a", "b", "c"], {"ab": ("b", "a"), "bc": ("c", "b"), "ac": ("c", "a")},
                      {"abc": ("bc", "ac", "ab")})


def nodal_descent(gal: FiniteGroup, rng: random.Random, max_points: int = 6) -> DescentDatum:
    """A Galois set glued to itself along a random automorphism at the node."""
    cx = nodal_complex()
    o = random_orbits(gal, rng, max_points)
    a = o.automorphism(rng)
    phi = {"C.e": np.arange(o.gset.size), "p01": a, "p10": np.argsort(a)}
    return DescentDatum(cx, GroupData.constant(cx, gal), {"C": o.gset}, phi)


def cech_descent(indices, group: FiniteGroup, rng: random.Random, max_points: int = 6) -> DescentDatum:
    """``φ_ij = β_i β_j⁻¹`` for random automorphisms ``β`` of one G-set."""
    cx = cech_complex(indices)
    o = random_orbits(group, rng, max_points)
    beta = {i: o.automorphism(rng) for i in cx.E0}
    phi = {f"{i},{j}": beta[i][np.argsort(beta[j])] for i in cx.E0 for j in cx.E0}
    return DescentDatum(cx, GroupData.constant(cx, group), {i: o.gset for i in cx.E0}, phi)


def dictionary_cases(rng: random.Random, count: int, corpus: list[FiniteGroup], max_homs: int = 400):
    """Seeded ``(item, args)`` pairs for the four dictionary checks.

    Items cycle through ``embedding``, ``dense``, ``normal_image`` and
    ``exactness``; each draws a random homomorphism between corpus groups.
    """
    from .groups import ApproxHom, FreeDiscrete, Finite

    def some_hom(src: FiniteGroup, tgt: FiniteGroup, want=None) -> Homomorphism:
        homs = []
        for h in src.homs_to(tgt):
            if want is None or want(h):
                homs.append(h)
            if len(homs) >= max_homs:
                break
        return rng.choice(homs) if homs else Homomorphism.trivial(src, tgt)

    items = ["embedding", "dense", "normal_image", "exactness"]
    for n in range(count):
        item = items[n % len(items)]
        a, b = rng.choice(corpus), rng.choice(corpus)
        if item == "dense" and rng.random() < 0.25:
            rank = rng.randint(1, 2)
            gens = [rng.randrange(b.order) for _ in range(rank)]
            yield item, (ApproxHom(FreeDiscrete(rank), Finite(b), [tuple(gens)]),)
        elif item == "exactness":
            normals = [s for s in a.subgroups() if a.is_normal(s)]
            nsub = rng.choice(normals)
            quot, proj = a.quotient(nsub)
            inside = rng.random() < 0.8
            hp = some_hom(b, a, (lambda h: h.image() <= nsub) if inside else None)
            yield item, (hp, proj)
        else:
            yield item, (some_hom(a, b),)


def banana_complex() -> TwoComplex:
    """Two vertices joined by two edges, plus a loop at ``A``; no faces."""
    return TwoComplex(["A", "B"], {"t": ("B", "A"), "p": ("B", "A"), "q": ("A", "A")}, {})


def cyclic_arithmetic(complex_: TwoComplex, rng: random.Random, modulus: int = 9, edge_groups: bool = True):
    """``Z/modulus`` on the vertices (and on edges and faces unless ``edge_groups`` is False).

    The units mod ``modulus`` act by multiplication, raw maps are identities
    (or trivial out of trivial groups) and every path is random.
    """
    from .groups import cyclic, multiplication_action, units_mod
    from .looplike import ArithmeticData

    g, gal = cyclic(modulus), units_mod(modulus)
    act = multiplication_action(g, gal, modulus)
    one = trivial_group()
    groups, actions = {}, {}
    for s in complex_.simplices():
        if s in complex_.E0 or edge_groups:
            groups[s], actions[s] = g, act
        else:
            groups[s], actions[s] = one, [[0]] * gal.order
    raw = {}
    for k in complex_.boundary_keys():
        src, tgt = groups[k[0]], groups[complex_.boundary(*k)]
        raw[k] = Homomorphism.identity(g) if src is g and tgt is g else Homomorphism.trivial(src, tgt)
    paths = {k: rng.randrange(groups[complex_.boundary(*k)].order) for k in complex_.boundary_keys()}
    for f, k in complex_.face_keys():
        paths[(f, "v", k)] = rng.randrange(groups[complex_.vertex_of(f, k)].order)
    return ArithmeticData(complex_, gal, groups, actions, raw, paths)


def random_action_set(groups: dict[str, FiniteGroup], edges, size: int, rng: random.Random):
    """Cyclic vertex groups acting through random cycle types, edges acting by random permutations."""
    from .gsets import ActionSet

    vertex = {}
    for v, g in groups.items():
        gen = g.generators()
        if len(gen) != 1:
            raise ValueError("random_action_set needs cyclic vertex groups")
        divs = [d for d in range(1, g.order + 1) if g.order % d == 0]
        pts = list(range(size))
        rng.shuffle(pts)
        img = list(range(size))
        i = 0
        while i < size:
            n = rng.choice([d for d in divs if d <= size - i])
            blk = pts[i:i + n]
            for k, x in enumerate(blk):
                img[x] = blk[(k + 1) % n]
            i += n
        vertex[v] = GSet.from_generators(g, size, [img]).perms
    moves = {}
    for e in edges:
        perm = list(range(size))
        rng.shuffle(perm)
        moves[e] = perm
    return ActionSet(size, groups, vertex, moves)
