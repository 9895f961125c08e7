"""JSON readers and writers for the objects the command line consumes and emits.

Group references are either a short name (``"S3"``, ``"Z2xZ4"``, ``"U9"``) or
an object ``{"name", "perm_gens"}`` / ``{"name", "elements", "table"}``.
Elements inside files are referred to by label or by index.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any, Mapping

import numpy as np

from .complexes import (TRIPLES, DescentDatum, GroupData, LcsSystem, OrderedDatum, TwoComplex,
                        triple_vertex)
from .errors import InputError
from .groups import (FiniteGroup, Homomorphism, QuotientTower, from_permutations, from_table,
                     group_from_name, multiplication_action)
from .gsets import ActionSet, GSet
from .looplike import ArithmeticData, TestSetFamily
from .vankampen import Presentation, Relation
from .words import from_json as word_from_json
from .words import reduce


def digest(raw: bytes | str) -> str:
    if isinstance(raw, str):
        raw = raw.encode()
    return hashlib.sha256(raw).hexdigest()


def read_json(path: str) -> tuple[Any, str]:
    """Parsed content and the sha256 of the raw bytes."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(raw), digest(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _need(d: Mapping, key: str, what: str):
    if not isinstance(d, Mapping) or key not in d:
        raise InputError(f"{what}: missing field {key!r}")
    return d[key]


# -- groups, homomorphisms, towers ----------------------------------------------------------


def load_group(ref) -> FiniteGroup:
    if isinstance(ref, str):
        return group_from_name(ref)
    if not isinstance(ref, Mapping):
        raise InputError(f"bad group reference {ref!r}")
    name = ref.get("name", "G")
    if "perm_gens" in ref:
        g = from_permutations(ref["perm_gens"], name=name)
    elif "table" in ref:
        labels = ref.get("elements") or [str(i) for i in range(len(ref["table"]))]
        g = from_table([[int(x) if isinstance(x, int) else labels.index(x) for x in row] for row in ref["table"]],
                       labels, name)
    elif "name" in ref:
        g = group_from_name(name)
    else:
        raise InputError("group object needs perm_gens, table or name")
    return g


def group_to_json(g: FiniteGroup) -> dict:
    return {"name": g.name, "elements": list(g.labels),
            "table": [[g.mul(a, b) for b in g.elements] for a in g.elements]}


def load_hom(d, source: FiniteGroup, target: FiniteGroup) -> Homomorphism:
    """``{"images": [...]}`` lists generator images; ``{"table": [...]}`` lists every image."""
    if isinstance(d, str) and d == "identity":
        if source.order != target.order:
            raise InputError("identity map between groups of different orders")
        return Homomorphism.identity(source) if source is target else Homomorphism.from_function(source, target, int)
    if isinstance(d, str) and d == "trivial":
        return Homomorphism.trivial(source, target)
    if isinstance(d, Mapping) and "table" in d:
        imgs = [target.index_of(x) for x in d["table"]]
        if len(imgs) != source.order:
            raise InputError("homomorphism table has the wrong length")
        return Homomorphism.from_function(source, target, lambda g: imgs[g])
    if isinstance(d, Mapping) and "images" in d:
        return Homomorphism.from_generators(source, target, d["images"])
    if isinstance(d, list):
        return Homomorphism.from_generators(source, target, d)
    raise InputError(f"bad homomorphism {d!r}")


def hom_to_json(h: Homomorphism) -> dict:
    return {"images": [h.target.labels[h(g)] for g in h.source.generators()]}


def load_tower(d: Mapping) -> QuotientTower:
    levels = [load_group(x) for x in _need(d, "levels", "tower")]
    trans: list[Homomorphism | None] = [None] * (len(levels) - 1)
    for t in d.get("transitions", []):
        n = int(_need(t, "from_level", "transition"))
        if not 1 <= n < len(levels):
            raise InputError(f"transition from level {n} is out of range")
        trans[n - 1] = load_hom({"table": t["mapping"]} if isinstance(t.get("mapping"), list)
                                else t["mapping"], levels[n], levels[n - 1])
    if any(t is None for t in trans):
        raise InputError("every level above the first needs a transition")
    return QuotientTower(levels, trans)


def tower_to_json(t: QuotientTower) -> dict:
    return {"levels": [group_to_json(g) for g in t.levels],
            "transitions": [{"from_level": n + 1, "mapping": list(h.images)} for n, h in enumerate(t.transitions)]}


# -- complexes and group data ---------------------------------------------------------


def load_complex(d: Mapping) -> TwoComplex:
    return TwoComplex.from_json(d.get("complex", d) if isinstance(d, Mapping) else d)


def _alpha_key(cx: TwoComplex, rec: Mapping) -> tuple[str, int, int]:
    """Accept ``{"face", "i", "j"}`` positions or a ``{"v", "e", "f"}`` triple of ids."""
    if "face" in rec:
        return rec["face"], int(rec["i"]), int(rec["j"])
    f, e, v = rec["f"], rec["e"], rec["v"]
    hits = [(f, i, j) for i, j in TRIPLES
            if cx.E2[f][i] == e and cx.E1[e][j] == v]
    if len(hits) != 1:
        raise InputError(f"triple ({v},{e},{f}) is {'ambiguous' if hits else 'not in the complex'}; use positions")
    return hits[0]


def load_group_data(cx: TwoComplex, d: Mapping) -> GroupData:
    """Groups per simplex, boundary maps, optional face maps, alpha entries and paths.

    A single ``"group"`` gives the constant datum.  With ``"paths"`` the maps are
    read as strictly functorial and twisted by the paths.
    """
    if "group" in d and "groups" not in d:
        base = GroupData.constant(cx, load_group(d["group"]))
        groups = base.groups
    else:
        refs = _need(d, "groups", "group data")
        missing = [s for s in cx.simplices() if s not in refs]
        if missing:
            raise InputError(f"no group for simplices {missing}")
        cache: dict[str, FiniteGroup] = {}
        groups = {}
        for s in cx.simplices():
            key = json.dumps(refs[s], sort_keys=True)
            if key not in cache:
                cache[key] = load_group(refs[s])
            groups[s] = cache[key]
        base = None
    maps = {}
    for rec in d.get("maps", []):
        s, i = rec["simplex"], int(rec["i"])
        maps[(s, i)] = load_hom(rec.get("map", rec.get("images")), groups[s], groups[cx.boundary(s, i)])
    for k in cx.boundary_keys():
        if k not in maps:
            if base is None:
                raise InputError(f"missing map for boundary {k}")
            maps[k] = base.maps[k]
    if "paths" in d:
        paths = {}
        for rec in d["paths"]:
            if "face" in rec:
                f, k = rec["face"], int(rec["k"])
                paths[(f, "v", k)] = groups[cx.vertex_of(f, k)].index_of(rec["elem"])
            else:
                s, i = rec["simplex"], int(rec["i"])
                paths[(s, i)] = groups[cx.boundary(s, i)].index_of(rec["elem"])
        return GroupData.from_paths(cx, groups, maps, paths)
    alpha = {(f, i, j): 0 for f in cx.E2 for i, j in TRIPLES}
    for rec in d.get("alpha", []):
        key = _alpha_key(cx, rec)
        f, i, j = key
        alpha[key] = groups[cx.vertex_of(f, triple_vertex(i, j))].index_of(rec["elem"])
    face_maps = {}
    for rec in d.get("face_maps", []):
        f, k = rec["face"], int(rec["k"])
        face_maps[(f, k)] = load_hom(rec.get("map", rec.get("images")), groups[f], groups[cx.vertex_of(f, k)])
    for f, k in cx.face_keys():
        if (f, k) not in face_maps:
            # default: the composite through the first edge reaching vertex k
            i, j = next((i, j) for i, j in TRIPLES if triple_vertex(i, j) == k)
            face_maps[(f, k)] = maps[(f, i)].then(maps[(cx.E2[f][i], j)])
    return GroupData(groups, maps, face_maps, alpha)


def group_data_to_json(cx: TwoComplex, data: GroupData) -> dict:
    return {"complex": cx.to_json(),
            "groups": {s: group_to_json(g) for s, g in data.groups.items()},
            "maps": [{"simplex": s, "i": i, "map": {"table": list(h.images)}} for (s, i), h in data.maps.items()],
            "face_maps": [{"face": f, "k": k, "map": {"table": list(h.images)}}
                          for (f, k), h in data.face_maps.items()],
            "alpha": [{"face": f, "i": i, "j": j, "elem": a} for (f, i, j), a in data.alpha.items()]}


# -- presentations -----------------------------------------------------------------------


def load_presentation(d: Mapping) -> Presentation:
    """``{"factors": {name: group}, "edges": [...], "relations": [word, ...]}``.

    Relation lists may also be split as ``R1``/``R2``/``extra``.
    """
    factors = {v: load_group(g) for v, g in d.get("factors", {}).items()}
    edges = tuple(d.get("edges", ()))
    rels = []
    for kind, key in (("extra", "relations"), ("R1", "R1"), ("R2", "R2"), ("extra", "extra")):
        for n, w in enumerate(d.get(key, [])):
            word = word_from_json(w, factors)
            for a in word:
                if not a.is_vertex and a.home not in edges:
                    raise InputError(f"relation uses undeclared edge {a.home}")
            rels.append(Relation(kind, f"{key}[{n}]", reduce(word, factors), word))
    return Presentation(factors, edges, rels)


# -- G-sets and systems ------------------------------------------------------------------


def load_gset(d: Mapping, group: FiniteGroup | None = None) -> GSet:
    """``{"group", "points", "action": {generator: {point: point}}}``; ``"perms"`` may list every element's action."""
    g = group or load_group(_need(d, "group", "G-set"))
    if "perms" in d:
        return GSet(g, d["perms"])
    points = list(_need(d, "points", "G-set"))
    where = {str(p): i for i, p in enumerate(points)}
    action = d.get("action", {})
    gen_perms = []
    for gen in g.generators():
        table = action.get(g.labels[gen], action.get(str(gen)))
        if table is None:
            raise InputError(f"G-set: no action given for generator {g.labels[gen]}")
        try:
            gen_perms.append([where[str(table[str(p)])] for p in points])
        except KeyError as exc:
            raise InputError(f"G-set: point {exc} missing from the action table") from exc
    return GSet.from_generators(g, len(points), gen_perms, labels=points)


def gset_to_json(s: GSet) -> dict:
    g = s.group
    return {"group": g.name, "points": list(s.labels),
            "action": {g.labels[x]: {str(s.labels[p]): s.labels[s.act(x, p)] for p in range(s.size)}
                       for x in g.generators()}}


def _perm(rec, size: int, what: str) -> np.ndarray:
    p = np.asarray(rec, dtype=np.int64)
    if p.shape != (size,) or sorted(p.tolist()) != list(range(size)):
        raise InputError(f"{what}: not a permutation of {size} points")
    return p


def load_lcs(d: Mapping) -> LcsSystem:
    cx = load_complex(_need(d, "complex", "system"))
    data = load_group_data(cx, d)
    sets_json = _need(d, "sets", "system")
    sets = {s: load_gset(sets_json[s], data.groups[s]) for s in cx.simplices() if s in sets_json}
    if len(sets) != len(cx.simplices()):
        raise InputError("system needs a set for every simplex")
    maps = {}
    for rec in _need(d, "transitions", "system"):
        if "face" in rec:
            f, k = rec["face"], int(rec["k"])
            maps[(f, "v", k)] = _perm(rec["perm"], sets[f].size, f"transition {f}->{k}")
        else:
            s, i = rec["simplex"], int(rec["i"])
            maps[(s, i)] = _perm(rec["perm"], sets[s].size, f"transition {s}.{i}")
    need = list(cx.boundary_keys()) + [(f, "v", k) for f, k in cx.face_keys()]
    missing = [k for k in need if k not in maps]
    if missing:
        raise InputError(f"missing transitions {missing}")
    return LcsSystem(cx, data, sets, maps)


def lcs_to_json(m: LcsSystem) -> dict:
    out = group_data_to_json(m.complex, m.data)
    out["sets"] = {s: {"perms": x.perms.tolist()} for s, x in m.sets.items()}
    tr = []
    for k, p in m.maps.items():
        if len(k) == 3:
            tr.append({"face": k[0], "k": k[2], "perm": p.tolist()})
        else:
            tr.append({"simplex": k[0], "i": k[1], "perm": p.tolist()})
    out["transitions"] = tr
    return out


def load_descent(d: Mapping) -> DescentDatum | OrderedDatum:
    """A descent datum on a complex, or an ordered one given by ``"indices"``."""
    if "indices" in d:
        g = load_group(_need(d, "group", "ordered datum"))
        idx = tuple(str(i) for i in d["indices"])
        sets = {i: load_gset(d["sets"][i], g) for i in idx}
        phi = {}
        for rec in _need(d, "phi", "ordered datum"):
            i, j = str(rec["i"]), str(rec["j"])
            phi[(i, j)] = _perm(rec["perm"], sets[j].size, f"phi {i},{j}")
        return OrderedDatum(idx, g, sets, phi)
    cx = load_complex(_need(d, "complex", "descent datum"))
    data = load_group_data(cx, d)
    sets = {v: load_gset(d["sets"][v], data.groups[v]) for v in cx.E0}
    phi = {e: _perm(p, sets[cx.target(e)].size, f"phi {e}") for e, p in _need(d, "phi", "descent datum").items()}
    return DescentDatum(cx, data, sets, phi)


# -- arithmetic data, families, action sets ---------------------------------------------------


def _load_actions(rule, group: FiniteGroup, gal: FiniteGroup) -> list[list[int]]:
    """Galois action on a group: ``"trivial"``, ``{"multiplication": n}`` or a table per Galois element."""
    if rule == "trivial":
        return [list(group.elements) for _ in gal.elements]
    if isinstance(rule, Mapping) and "multiplication" in rule:
        return multiplication_action(group, gal, int(rule["multiplication"]))
    rows = [[group.index_of(x) for x in row] for row in rule]
    if len(rows) != gal.order:
        raise InputError("Galois action needs one row per Galois element")
    return rows


def load_arithmetic(d: Mapping) -> ArithmeticData:
    cx = load_complex(_need(d, "complex", "arithmetic data"))
    gal = load_group(_need(d, "gal", "arithmetic data"))
    base = load_group_data(cx, {k: v for k, v in d.items() if k != "paths"})
    acts = _need(d, "actions", "arithmetic data")
    default = acts.get("*")
    actions = {}
    for s in cx.simplices():
        rule = acts.get(s, default)
        if rule is None:
            raise InputError(f"no Galois action for {s}")
        actions[s] = _load_actions(rule, base.groups[s], gal)
    paths = {}
    for rec in d.get("paths", []):
        if "face" in rec:
            f, k = rec["face"], int(rec["k"])
            paths[(f, "v", k)] = base.groups[cx.vertex_of(f, k)].index_of(rec["elem"])
        else:
            s, i = rec["simplex"], int(rec["i"])
            paths[(s, i)] = base.groups[cx.boundary(s, i)].index_of(rec["elem"])
    for k in list(cx.boundary_keys()) + [(f, "v", k) for f, k in cx.face_keys()]:
        paths.setdefault(k, 0)
    return ArithmeticData(cx, gal, base.groups, actions, base.maps, paths)


def load_action_set(d: Mapping, groups: Mapping[str, FiniteGroup]) -> ActionSet:
    """``{"size", "vertex": {v: {generator: perm}}, "edges": {e: partial perm}}``."""
    size = int(_need(d, "size", "action set"))
    vertex = {}
    for v, gens in d.get("vertex", {}).items():
        if v not in groups:
            raise InputError(f"action set: unknown vertex {v}")
        g = groups[v]
        gp = [gens.get(g.labels[x], gens.get(str(x))) for x in g.generators()]
        if any(p is None for p in gp):
            raise InputError(f"action set: vertex {v} is missing a generator")
        vertex[v] = GSet.from_generators(g, size, gp).perms
    return ActionSet(size, {v: groups[v] for v in vertex}, vertex, d.get("edges", {}))


def load_family(d: Mapping, groups: Mapping[str, FiniteGroup], actions=None) -> TestSetFamily:
    depth = int(_need(d, "depth", "family"))
    kernels = {}
    for rec in _need(d, "kernels", "family"):
        v = rec["vertex"]
        kernels[(v, int(rec["N"]))] = frozenset(groups[v].index_of(x) for x in rec["elems"])
    modulus = int(d.get("modulus", math.lcm(*range(1, max(depth, 3) + 1))))
    if modulus < 3:
        raise InputError("family: edge modulus must be at least 3")
    return TestSetFamily(dict(groups), depth, kernels, modulus, dict(actions or {}))


def descent_to_json(d: DescentDatum | OrderedDatum) -> dict:
    if isinstance(d, OrderedDatum):
        return {"indices": list(d.indices), "group": group_to_json(d.group),
                "sets": {i: {"perms": s.perms.tolist()} for i, s in d.sets.items()},
                "phi": [{"i": i, "j": j, "perm": p.tolist()} for (i, j), p in d.phi.items()]}
    out = group_data_to_json(d.complex, d.data)
    out["sets"] = {v: {"perms": s.perms.tolist()} for v, s in d.sets.items()}
    out["phi"] = {e: p.tolist() for e, p in d.phi.items()}
    return out
