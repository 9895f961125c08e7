"""Two-dimensional complexes with group data, locally constant systems and descent.

Conventions.  An edge ``e`` runs from its origin ``∂1 e`` to its target
``∂0 e``.  The boundary ``∂i f`` of a face omits vertex ``i``, so ``∂2 f``
joins ``v0`` to ``v1``, ``∂0 f`` joins ``v1`` to ``v2`` and ``∂1 f`` joins
``v0`` to ``v2``.  A barycentric triple is keyed ``(f, i, j)``: the edge
``∂i f`` followed by its endpoint ``∂j``.  Keys are by position rather than by
``(v, e, f)`` because a face may meet the same edge several times.

Group data: ``maps[(s, i)]`` is the homomorphism attached to ``∂i`` on the
simplex ``s``, ``face_maps[(f, k)]`` the one attached to ``f -> v_k``, and
``alpha[(f, i, j)]`` the twisting element of the vertex group.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError
from .groups import FiniteGroup, Homomorphism
from .gsets import ActionSet, GSet

TRIPLES = [(i, j) for i in range(3) for j in (0, 1)]


def triple_vertex(i: int, j: int) -> int:
    """Index ``k`` of the vertex reached by ``∂j ∂i`` from a face."""
    a, b = [x for x in range(3) if x != i]
    return a if j == 1 else b


class TwoComplex:
    def __init__(self, e0: Sequence[str], e1: Mapping[str, Sequence[str]], e2: Mapping[str, Sequence[str]] | None = None):
        self.E0 = tuple(str(v) for v in e0)
        self.E1 = {str(k): tuple(str(x) for x in v) for k, v in e1.items()}
        self.E2 = {str(k): tuple(str(x) for x in v) for k, v in (e2 or {}).items()}
        ids = list(self.E0) + list(self.E1) + list(self.E2)
        if len(set(ids)) != len(ids):
            raise InputError("simplex ids must be distinct across dimensions")
        for e, ends in self.E1.items():
            if len(ends) != 2 or any(v not in self.E0 for v in ends):
                raise InputError(f"edge {e}: boundaries must be two vertices")
        for f, sides in self.E2.items():
            if len(sides) != 3 or any(e not in self.E1 for e in sides):
                raise InputError(f"face {f}: boundaries must be three edges")
        self.face_vertices = {}
        for f in self.E2:
            vs = {}
            for i, j in TRIPLES:
                k = triple_vertex(i, j)
                v = self.E1[self.E2[f][i]][j]
                if vs.setdefault(k, v) != v:
                    raise InputError(f"face {f}: simplicial identity fails at vertex {k}")
            self.face_vertices[f] = tuple(vs[k] for k in range(3))

    def boundary(self, s: str, i: int) -> str:
        if s in self.E1:
            return self.E1[s][i]
        return self.E2[s][i]

    def origin(self, e: str) -> str:
        return self.E1[e][1]

    def target(self, e: str) -> str:
        return self.E1[e][0]

    def vertex_of(self, f: str, k: int) -> str:
        return self.face_vertices[f][k]

    def simplices(self) -> list[str]:
        return list(self.E0) + list(self.E1) + list(self.E2)

    def boundary_keys(self) -> list[tuple[str, int]]:
        return [(e, i) for e in self.E1 for i in (0, 1)] + [(f, i) for f in self.E2 for i in range(3)]

    def face_keys(self) -> list[tuple[str, int]]:
        return [(f, k) for f in self.E2 for k in range(3)]

    def to_json(self) -> dict:
        return {"E0": list(self.E0),
                "E1": [{"id": e, "d0": d[0], "d1": d[1]} for e, d in self.E1.items()],
                "E2": [{"id": f, "d0": d[0], "d1": d[1], "d2": d[2]} for f, d in self.E2.items()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "TwoComplex":
        try:
            e1 = {r["id"]: (r["d0"], r["d1"]) for r in data["E1"]}
            e2 = {r["id"]: (r["d0"], r["d1"], r["d2"]) for r in data.get("E2", [])}
            return cls(data["E0"], e1, e2)
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed complex: {exc}") from exc


# -- graph and tree ------------------------------------------------------------------


@dataclass(frozen=True)
class GraphWithTree:
    vertices: tuple[str, ...]
    edges: Mapping[str, tuple[str, str]]  # id -> (origin, target)
    tree: frozenset[str]

    def __post_init__(self):
        adj = {v: [] for v in self.vertices}
        for e in self.tree:
            a, b = self.edges[e]
            if a == b:
                raise InputError(f"tree contains the loop {e}")
            adj[a].append((e, b, 1))
            adj[b].append((e, a, -1))
        if len(self.tree) != len(self.vertices) - 1:
            raise InputError("tree has the wrong number of edges to span")
        root = min(self.vertices)
        self.__dict__["_paths"] = {}
        parent = {root: None}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for e, w, sgn in adj[u]:
                if w not in parent:
                    parent[w] = (u, e, sgn)
                    queue.append(w)
        if len(parent) != len(self.vertices):
            raise InputError("tree does not span the graph")
        self.__dict__["_parent"] = parent
        self.__dict__["_root"] = root

    def _to_root(self, v: str) -> list[tuple[str, int]]:
        """Steps from ``v`` up to the root as ``(edge, +1 if walked origin->target)``."""
        out = []
        while self._parent[v] is not None:
            u, e, sgn = self._parent[v]
            out.append((e, -sgn))
            v = u
        return out

    def path(self, v: str, w: str) -> list[tuple[str, int]]:
        """The unique tree path from ``v`` to ``w``."""
        if v not in self._parent or w not in self._parent:
            raise InputError(f"unknown vertex {v if v not in self._parent else w}")
        key = (v, w)
        if key not in self._paths:
            up = self._to_root(v)
            down = [(e, -s) for e, s in reversed(self._to_root(w))]
            while up and down and up[-1][0] == down[0][0]:
                up.pop()
                down.pop(0)
            self._paths[key] = up + down
        return self._paths[key]

    def distance(self, v: str, w: str) -> int:
        return len(self.path(v, w))

    def non_tree_edges(self) -> list[str]:
        return sorted(e for e in self.edges if e not in self.tree)


def graph_of(complex_: TwoComplex) -> dict[str, tuple[str, str]]:
    return {e: (complex_.origin(e), complex_.target(e)) for e in complex_.E1}


def spanning_tree(complex_: TwoComplex) -> GraphWithTree:
    """Breadth-first tree from the least vertex, scanning edges in id order."""
    if not complex_.E0:
        raise InputError("empty complex")
    edges = graph_of(complex_)
    order = sorted(edges)
    root = min(complex_.E0)
    seen, tree = {root}, []
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for e in order:
            a, b = edges[e]
            if a == b or u not in (a, b):
                continue
            w = b if a == u else a
            if w not in seen:
                seen.add(w)
                tree.append(e)
                queue.append(w)
    if len(seen) != len(complex_.E0):
        raise InputError("graph is disconnected; a single spanning tree does not exist")
    return GraphWithTree(tuple(complex_.E0), edges, frozenset(tree))


def graph_pi1_rank(graph: GraphWithTree) -> int:
    return len(graph.edges) - len(graph.tree)


# -- group data ------------------------------------------------------------------


@dataclass
class GroupData:
    groups: dict[str, FiniteGroup]
    maps: dict[tuple[str, int], Homomorphism]
    face_maps: dict[tuple[str, int], Homomorphism]
    alpha: dict[tuple[str, int, int], int]

    @classmethod
    def constant(cls, complex_: TwoComplex, group: FiniteGroup) -> "GroupData":
        ident = Homomorphism.identity(group)
        return cls({s: group for s in complex_.simplices()},
                   {k: ident for k in complex_.boundary_keys()},
                   {k: ident for k in complex_.face_keys()},
                   {(f, i, j): 0 for f in complex_.E2 for i, j in TRIPLES})

    @classmethod
    def from_paths(cls, complex_: TwoComplex, groups: Mapping[str, FiniteGroup],
                   raw_maps: Mapping[tuple[str, int], Homomorphism], paths: Mapping[tuple, int]) -> "GroupData":
        """Twist a strictly functorial assignment by chosen paths.

        ``paths[(s, i)]`` lies in the group of ``∂i s`` and ``paths[(f, "v", k)]``
        in the group of ``v_k``.  Each map becomes conjugation by its path after
        the raw map, and ``alpha = γ(∂) · raw(∂)(γ(∂')) · γ(∂∂')^-1``.
        """
        groups = dict(groups)
        for k in complex_.boundary_keys():
            if k not in raw_maps:
                raise InputError(f"missing map for boundary {k}")
        raw_face = {}
        for f in complex_.E2:
            for i, j in TRIPLES:
                e = complex_.E2[f][i]
                comp = raw_maps[(f, i)].then(raw_maps[(e, j)])
                k = triple_vertex(i, j)
                if (f, k) in raw_face and raw_face[(f, k)].images != comp.images:
                    raise InputError(f"raw maps are not functorial at face {f}, vertex {k}")
                raw_face[(f, k)] = comp
        need = list(complex_.boundary_keys()) + [(f, "v", k) for f, k in complex_.face_keys()]
        for k in need:
            if k not in paths:
                raise InputError(f"missing path for {k}")

        def twisted(h: Homomorphism, gamma: int) -> Homomorphism:
            t = h.target
            return Homomorphism(h.source, t, tuple(t.conj(gamma, x) for x in h.images))

        maps = {k: twisted(raw_maps[k], paths[k]) for k in complex_.boundary_keys()}
        face_maps = {(f, k): twisted(raw_face[(f, k)], paths[(f, "v", k)]) for f, k in complex_.face_keys()}
        alpha = {}
        for f in complex_.E2:
            for i, j in TRIPLES:
                e = complex_.E2[f][i]
                k = triple_vertex(i, j)
                gv = groups[complex_.vertex_of(f, k)]
                a = gv.mul(gv.mul(paths[(e, j)], raw_maps[(e, j)](paths[(f, i)])), gv.inv(paths[(f, "v", k)]))
                alpha[(f, i, j)] = a
        return cls(groups, maps, face_maps, alpha)


def validate_group_data(complex_: TwoComplex, data: GroupData) -> list[tuple[str, int, int]]:
    """Barycentric triples whose square fails; raises on missing or mistyped entries."""
    for s in complex_.simplices():
        if s not in data.groups:
            raise InputError(f"no group attached to {s}")
    for s, i in complex_.boundary_keys():
        h = data.maps.get((s, i))
        if h is None:
            raise InputError(f"no map attached to boundary {(s, i)}")
        if h.source is not data.groups[s] or h.target is not data.groups[complex_.boundary(s, i)]:
            raise InputError(f"map at {(s, i)} does not connect the attached groups")
    for f, k in complex_.face_keys():
        h = data.face_maps.get((f, k))
        if h is None:
            raise InputError(f"no map attached to face {f} -> v{k}")
        if h.source is not data.groups[f] or h.target is not data.groups[complex_.vertex_of(f, k)]:
            raise InputError(f"map at {f} -> v{k} does not connect the attached groups")
    bad = []
    for f in complex_.E2:
        for i, j in TRIPLES:
            if (f, i, j) not in data.alpha:
                raise InputError(f"missing alpha entry for {(f, i, j)}")
            e = complex_.E2[f][i]
            k = triple_vertex(i, j)
            gv = data.groups[complex_.vertex_of(f, k)]
            a = data.alpha[(f, i, j)]
            lhs = data.maps[(f, i)].then(data.maps[(e, j)])
            rhs = data.face_maps[(f, k)]
            if any(lhs(g) != gv.conj(a, rhs(g)) for g in data.groups[f].generators()):
                bad.append((f, i, j))
    return bad


# -- locally constant systems ------------------------------------------------------------


@dataclass
class LcsSystem:
    complex: TwoComplex
    data: GroupData
    sets: dict[str, GSet]
    maps: dict[tuple, np.ndarray]  # keys (s, i) and (f, "v", k)

    def map(self, key) -> np.ndarray:
        return self.maps[key]

    def sizes(self) -> dict[str, int]:
        return {s: m.size for s, m in self.sets.items()}


def validate_lcs(m: LcsSystem) -> list[str]:
    """Problems with bijectivity, equivariance or the triangle law (empty when valid)."""
    cx, data = m.complex, m.data
    out = []
    for s in cx.simplices():
        if s not in m.sets:
            raise InputError(f"no set attached to {s}")
        if m.sets[s].group is not data.groups[s]:
            raise InputError(f"set at {s} is not acted on by the attached group")
    keyed = [((s, i), s, cx.boundary(s, i), data.maps[(s, i)]) for s, i in cx.boundary_keys()]
    keyed += [((f, "v", k), f, cx.vertex_of(f, k), data.face_maps[(f, k)]) for f, k in cx.face_keys()]
    for key, s, t, h in keyed:
        if key not in m.maps:
            raise InputError(f"missing map {key}")
        f = np.asarray(m.maps[key])
        src, tgt = m.sets[s], m.sets[t]
        if f.shape != (src.size,) or sorted(f.tolist()) != list(range(tgt.size)):
            out.append(f"{key}: not a bijection")
            continue
        if not src.is_equivariant_map(tgt, f, along=h):
            out.append(f"{key}: not equivariant")
    if out:
        return out
    for fc in cx.E2:
        for i, j in TRIPLES:
            e = cx.E2[fc][i]
            k = triple_vertex(i, j)
            vset = m.sets[cx.vertex_of(fc, k)]
            lhs = m.maps[(e, j)][m.maps[(fc, i)]]
            rhs = vset.perms[data.alpha[(fc, i, j)]][m.maps[(fc, "v", k)]]
            if not np.array_equal(lhs, rhs):
                out.append(f"triangle law fails at {(fc, i, j)}")
    return out


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class QSet:
    """The monodromy action: an :class:`ActionSet` plus the fibre identifications."""

    action: ActionSet
    component_of: dict[tuple[str, int], int]  # (vertex, point) -> carrier index
    graph: GraphWithTree


def q_functor(m: LcsSystem, graph: GraphWithTree | None = None) -> QSet:
    """Carrier: components of the vertex fibres glued along tree edges."""
    cx = m.complex
    graph = graph or spanning_tree(cx)
    for key in cx.boundary_keys():
        f = np.asarray(m.maps[key])
        tgt = m.sets[cx.boundary(*key)]
        if sorted(f.tolist()) != list(range(tgt.size)):
            raise InputError(f"map {key} is not bijective")
    nodes = [(v, x) for v in cx.E0 for x in range(m.sets[v].size)]
    uf = _UnionFind(nodes)
    for e in graph.tree:
        for y in range(m.sets[e].size):
            uf.union((cx.origin(e), int(m.maps[(e, 1)][y])), (cx.target(e), int(m.maps[(e, 0)][y])))
    root = min(cx.E0)
    reps = sorted({uf.find(n) for n in nodes}, key=lambda r: (r[0] != root, r))
    index = {r: i for i, r in enumerate(reps)}
    comp = {n: index[uf.find(n)] for n in nodes}
    size = len(reps)
    point_at = {(v, c): x for (v, x), c in comp.items()}
    for v in cx.E0:
        if m.sets[v].size != size or len({comp[(v, x)] for x in range(m.sets[v].size)}) != size:
            raise InputError("fibres do not match up along the tree")
    vertex = {}
    for v in cx.E0:
        s = m.sets[v]
        perms = np.zeros((s.group.order, size), dtype=np.int64)
        for g in s.group.elements:
            for c in range(size):
                perms[g, c] = comp[(v, s.act(g, point_at[(v, c)]))]
        vertex[v] = perms
    edges = {}
    for e in graph.non_tree_edges():
        m0_inv = np.argsort(m.maps[(e, 0)])
        a, b = cx.origin(e), cx.target(e)
        edges[e] = [comp[(a, int(m.maps[(e, 1)][m0_inv[point_at[(b, c)]]]))] for c in range(size)]
    act = ActionSet(size, {v: m.data.groups[v] for v in cx.E0}, vertex, edges)
    return QSet(act, comp, graph)


def decompose_system(m: LcsSystem) -> list[LcsSystem]:
    """Split into the smallest subsystems: classes of points linked by maps or the actions."""
    cx = m.complex
    nodes = [(s, x) for s in cx.simplices() for x in range(m.sets[s].size)]
    uf = _UnionFind(nodes)
    for key, f in m.maps.items():
        t = cx.boundary(key[0], key[1]) if len(key) == 2 else cx.vertex_of(key[0], key[2])
        for x, y in enumerate(np.asarray(f).tolist()):
            uf.union((key[0], x), (t, y))
    for s in cx.simplices():
        gs = m.sets[s]
        for g in gs.group.generators():
            for x in range(gs.size):
                uf.union((s, x), (s, gs.act(g, x)))
    classes: dict = {}
    for n in nodes:
        classes.setdefault(uf.find(n), []).append(n)
    out = []
    for members in sorted(classes.values()):
        pts = {s: sorted(x for t, x in members if t == s) for s in cx.simplices()}
        pos = {s: {x: i for i, x in enumerate(p)} for s, p in pts.items()}
        sets = {s: m.sets[s].restrict(pts[s]) for s in cx.simplices()}
        maps = {}
        for key, f in m.maps.items():
            t = cx.boundary(key[0], key[1]) if len(key) == 2 else cx.vertex_of(key[0], key[2])
            maps[key] = np.array([pos[t][int(f[x])] for x in pts[key[0]]], dtype=np.int64)
        out.append(LcsSystem(cx, m.data, sets, maps))
    return out


def is_connected_system(m: LcsSystem) -> bool:
    return len(decompose_system(m)) == 1


def twist_system(m: LcsSystem, twisted: GroupData, paths: Mapping[tuple, int]) -> LcsSystem:
    """Transport a system for strictly functorial data to the data twisted by ``paths``."""
    cx = m.complex
    maps = {}
    for key, f in m.maps.items():
        if len(key) == 2:
            t = cx.boundary(*key)
        else:
            t = cx.vertex_of(key[0], key[2])
        maps[key] = m.sets[t].perms[paths[key]][np.asarray(f)]
    return LcsSystem(cx, twisted, dict(m.sets), maps)


# -- descent data ----------------------------------------------------------------------


@dataclass
class DescentDatum:
    """Vertex sets with gluing ``phi[e]``: a bijection from the set at ``∂0 e`` to the set at ``∂1 e``."""

    complex: TwoComplex
    data: GroupData
    sets: dict[str, GSet]
    phi: dict[str, np.ndarray]


def _act(s: GSet, g: int, arr) -> np.ndarray:
    return s.perms[g][np.asarray(arr)]


def check_descent(d: DescentDatum) -> list[str]:
    """Equivariance of each gluing and the cocycle condition on every face."""
    cx, data = d.complex, d.data
    out = []
    for e in cx.E1:
        src, tgt = d.sets[cx.target(e)], d.sets[cx.origin(e)]
        phi = np.asarray(d.phi[e])
        if phi.shape != (src.size,) or sorted(phi.tolist()) != list(range(tgt.size)):
            out.append(f"edge {e}: gluing is not a bijection")
            continue
        h0, h1 = data.maps[(e, 0)], data.maps[(e, 1)]
        for g in data.groups[e].generators():
            if not np.array_equal(phi[src.perms[h0(g)]], tgt.perms[h1(g)][phi]):
                out.append(f"edge {e}: gluing is not equivariant")
                break
    if out:
        return out
    for f in cx.E2:
        if not _cocycle_holds(d, f):
            out.append(f"cocycle fails on face {f}")
    return out


def _cocycle_holds(d: DescentDatum, f: str) -> bool:
    """``φ(∂2f)·α102α120⁻¹·φ(∂0f)·α210α201⁻¹ = α012α021⁻¹·φ(∂1f)`` on the set at ``v2``."""
    cx, a = d.complex, d.data.alpha
    v0, v1, v2 = cx.face_vertices[f]
    s0, s1, s2 = d.sets[v0], d.sets[v1], d.sets[v2]
    g0, g1, g2 = (d.data.groups[v] for v in (v0, v1, v2))
    e0, e1, e2 = cx.E2[f]
    y = np.arange(s2.size)
    t = _act(s2, g2.mul(a[(f, 0, 0)], g2.inv(a[(f, 1, 0)])), y)  # α210 α201⁻¹
    t = np.asarray(d.phi[e0])[t]
    t = _act(s1, g1.mul(a[(f, 2, 0)], g1.inv(a[(f, 0, 1)])), t)  # α102 α120⁻¹
    lhs = np.asarray(d.phi[e2])[t]
    rhs = _act(s0, g0.mul(a[(f, 2, 1)], g0.inv(a[(f, 1, 1)])), np.asarray(d.phi[e1])[y])  # α012 α021⁻¹
    return np.array_equal(lhs, rhs)


def discretize_descent(d: DescentDatum) -> LcsSystem:
    """The locally constant system of a descent datum.

    Edges carry the set of their origin (``m_∂1`` is the identity) and faces
    the set of ``v0`` (``f -> v0`` is the identity); every other map is then
    forced by the triangle law.
    """
    problems = check_descent(d)
    if problems:
        raise InputError("; ".join(problems))
    cx, data = d.complex, d.data
    a = data.alpha
    sets: dict[str, GSet] = dict(d.sets)
    maps: dict[tuple, np.ndarray] = {}
    for e in cx.E1:
        sets[e] = d.sets[cx.origin(e)].pullback(data.maps[(e, 1)])
        maps[(e, 1)] = np.arange(sets[e].size)
        maps[(e, 0)] = np.argsort(np.asarray(d.phi[e]))
    for f in cx.E2:
        v0, v1, v2 = cx.face_vertices[f]
        base = d.sets[v0]
        sets[f] = base.pullback(data.face_maps[(f, 0)])
        x = np.arange(base.size)
        s1, s2 = d.sets[v1], d.sets[v2]
        g1, g2 = data.groups[v1], data.groups[v2]
        maps[(f, "v", 0)] = x
        maps[(f, 2)] = _act(base, a[(f, 2, 1)], x)
        maps[(f, 1)] = _act(base, a[(f, 1, 1)], x)
        to_v1 = _act(s1, g1.inv(a[(f, 2, 0)]), maps[(cx.E2[f][2], 0)][maps[(f, 2)]])
        maps[(f, "v", 1)] = to_v1
        maps[(f, "v", 2)] = _act(s2, g2.inv(a[(f, 1, 0)]), maps[(cx.E2[f][1], 0)][maps[(f, 1)]])
        maps[(f, 0)] = _act(s1, a[(f, 0, 1)], to_v1)
    return LcsSystem(cx, data, sets, maps)


def rebuild(m: LcsSystem) -> DescentDatum:
    """Descent datum of a system: vertex sets and ``φ_e = m_∂1 ∘ m_∂0⁻¹``."""
    cx = m.complex
    phi = {e: np.asarray(m.maps[(e, 1)])[np.argsort(np.asarray(m.maps[(e, 0)]))] for e in cx.E1}
    return DescentDatum(cx, m.data, {v: m.sets[v] for v in cx.E0}, phi)


def system_isomorphism(a: LcsSystem, b: LcsSystem, iso: Mapping[str, np.ndarray]) -> bool:
    """Whether the per-simplex bijections ``iso`` are equivariant and commute with every map."""
    cx = a.complex
    for s in cx.simplices():
        f = np.asarray(iso[s])
        if sorted(f.tolist()) != list(range(b.sets[s].size)) or len(f) != a.sets[s].size:
            return False
        if not a.sets[s].is_equivariant_map(b.sets[s], f):
            return False
    for key in a.maps:
        t = cx.boundary(key[0], key[1]) if len(key) == 2 else cx.vertex_of(key[0], key[2])
        lhs = np.asarray(iso[t])[np.asarray(a.maps[key])]
        rhs = np.asarray(b.maps[key])[np.asarray(iso[key[0]])]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def round_trip_isomorphism(m: LcsSystem) -> dict[str, np.ndarray]:
    """Bijections from ``m`` to ``discretize_descent(rebuild(m))``."""
    cx = m.complex
    iso = {v: np.arange(m.sets[v].size) for v in cx.E0}
    for e in cx.E1:
        iso[e] = np.asarray(m.maps[(e, 1)])
    for f in cx.E2:
        iso[f] = np.asarray(m.maps[(f, "v", 0)])
    return iso


def descent_equal(a: DescentDatum, b: DescentDatum) -> bool:
    return all(np.array_equal(a.sets[v].perms, b.sets[v].perms) for v in a.complex.E0) and all(
        np.array_equal(np.asarray(a.phi[e]), np.asarray(b.phi[e])) for e in a.complex.E1)


# -- ordered descent -----------------------------------------------------------------


def cech_complex(indices: Sequence) -> TwoComplex:
    """Nerve of a cover by pieces ``indices``: all ordered pairs and triples."""
    idx = [str(i) for i in indices]
    e1 = {f"{i},{j}": (j, i) for i in idx for j in idx}
    e2 = {f"{i},{j},{k}": (f"{j},{k}", f"{i},{k}", f"{i},{j}") for i in idx for j in idx for k in idx}
    return TwoComplex(idx, e1, e2)


@dataclass
class OrderedDatum:
    indices: tuple[str, ...]
    group: FiniteGroup
    sets: dict[str, GSet]
    phi: dict[tuple[str, str], np.ndarray]  # (i, j) with i < j, a map from the set at j to the set at i


def ordered_reduction(d: DescentDatum, injective: Mapping[str, bool] | None = None) -> OrderedDatum:
    """Keep the components ``i < j``; refuses when a piece's diagonal is not an isomorphism."""
    idx = tuple(d.complex.E0)
    for i in idx:
        if injective is not None and not injective.get(i, True):
            raise InputError(f"piece {i} does not map injectively; its diagonal is not an isomorphism")
    problems = check_descent(d)
    if problems:
        raise InputError("; ".join(problems))
    group = d.data.groups[idx[0]] if idx else None
    order = {v: n for n, v in enumerate(idx)}
    phi = {(i, j): np.asarray(d.phi[f"{i},{j}"]) for i in idx for j in idx if order[i] < order[j]}
    return OrderedDatum(idx, group, dict(d.sets), phi)


def reconstruct(o: OrderedDatum) -> DescentDatum:
    """Full datum from the ordered part: identity on the diagonal, inverses below it."""
    cx = cech_complex(o.indices)
    data = GroupData.constant(cx, o.group)
    order = {v: n for n, v in enumerate(o.indices)}
    phi = {}
    for i in o.indices:
        for j in o.indices:
            if i == j:
                phi[f"{i},{j}"] = np.arange(o.sets[i].size)
            elif order[i] < order[j]:
                phi[f"{i},{j}"] = np.asarray(o.phi[(i, j)])
            else:
                phi[f"{i},{j}"] = np.argsort(np.asarray(o.phi[(j, i)]))
    return DescentDatum(cx, data, dict(o.sets), phi)


def ordered_cocycle_holds(o: OrderedDatum) -> bool:
    """``φ_ij ∘ φ_jk = φ_ik`` for ``i < j < k``."""
    idx = o.indices
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            for c in range(b + 1, len(idx)):
                i, j, k = idx[a], idx[b], idx[c]
                if not np.array_equal(o.phi[(i, j)][o.phi[(j, k)]], o.phi[(i, k)]):
                    return False
    return True


def nodal_complex() -> TwoComplex:
    """The nodal curve over its normalization ``C``.

    One vertex ``C``; edges ``C.e`` (the degenerate one), ``p01`` and ``p10``
    (the two orderings of the node); the degenerate face ``C.f`` and six faces
    ``pabc`` whose boundary ``∂i`` forgets the ``i``-th letter.
    """
    edges = {"C.e": ("C", "C"), "p01": ("C", "C"), "p10": ("C", "C")}

    def edge(a: str, b: str) -> str:
        return "C.e" if a == b else f"p{a}{b}"

    faces = {"C.f": ("C.e", "C.e", "C.e")}
    for t in ("001", "010", "011", "100", "101", "110"):
        faces[f"p{t}"] = tuple(edge(*(t[:i] + t[i + 1:])) for i in range(3))
    return TwoComplex(["C"], edges, faces)
