"""Distances on letters, looplike words, test-set families and the Galois action on words.

Words are written left to right and act right to left, so in a word
``g_M ... g_1`` the letter ``g_1`` is the last tuple entry.  An edge letter
``e`` moves from the fibre at its target (``vert+``) to the fibre at its
origin (``vert-``).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .complexes import GraphWithTree, GroupData, TwoComplex, spanning_tree
from .errors import Inconclusive, InputError
from .groups import FiniteGroup, Homomorphism
from .gsets import ActionSet
from .vankampen import Presentation
from .words import Atom, Word, conjugate_in_free_product, invert, plain_form, reduce

# -- distances ---------------------------------------------------------------------


@dataclass(frozen=True)
class DistContext:
    graph: GraphWithTree

    def vert_minus(self, e: str) -> str:
        return self.graph.edges[e][0]

    def vert_plus(self, e: str) -> str:
        return self.graph.edges[e][1]

    def vert(self, e: str, sign: int) -> str:
        return self.vert_plus(e) if sign > 0 else self.vert_minus(e)

    def tree_dist(self, v: str, w: str) -> int:
        return self.graph.distance(v, w)

    @classmethod
    def of(cls, complex_: TwoComplex) -> "DistContext":
        return cls(spanning_tree(complex_))


def _check(a: Atom, ctx: DistContext) -> None:
    if a.is_vertex and a.home not in ctx.graph.vertices:
        raise InputError(f"unknown vertex {a.home}")
    if not a.is_vertex and a.home not in ctx.graph.edges:
        raise InputError(f"unknown edge {a.home}")


def _sign(a: Atom) -> int:
    return 1 if a.value > 0 else -1


def dist(a: Atom, b: Atom, ctx: DistContext) -> int:
    """Distance from the letter ``a`` to the letter ``b`` written to its right."""
    _check(a, ctx)
    _check(b, ctx)
    if a.is_vertex and b.is_vertex:
        return ctx.tree_dist(a.home, b.home)
    if a.is_vertex:
        return ctx.tree_dist(a.home, ctx.vert(b.home, -_sign(b)))
    if b.is_vertex:
        return ctx.tree_dist(ctx.vert(a.home, _sign(a)), b.home) + 1
    return ctx.tree_dist(ctx.vert(a.home, _sign(a)), ctx.vert(b.home, -_sign(b))) + 1


def n_of_word(w: Sequence[Atom], ctx: DistContext) -> int:
    """One plus the distances between neighbouring letters of a plain word of odd length."""
    w = tuple(w)
    if plain_form(w) != w:
        raise InputError("word is not in plain form")
    if len(w) % 2 == 0:
        raise InputError("even letter count: not eligible to be looplike")
    return sum(dist(w[i], w[i + 1], ctx) for i in range(len(w) - 1)) + 1


# -- test-set families --------------------------------------------------------------


@dataclass
class TestSetFamily:
    """Kernels of the regular test sets: ``kernels[(v, N)]`` acts trivially on ``c_v^N``.

    Edge test sets are ``Z/modulus`` with the edge acting by translation.
    ``actions[v][s]`` is the automorphism of the vertex group by the Galois
    element ``s``; kernels must be stable under every one of them.
    """

    __test__ = False  # keep pytest from collecting the class

    groups: dict[str, FiniteGroup]
    depth: int
    kernels: dict[tuple[str, int], frozenset[int]]
    modulus: int
    actions: dict[str, Sequence[Sequence[int]]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def kernel(self, v: str, n: int) -> frozenset[int]:
        if n > self.depth:
            raise Inconclusive(f"family depth {self.depth} is below the required level {n}")
        return self.kernels[(v, n)]

    def acts_trivially(self, a: Atom, n: int) -> bool:
        if a.is_vertex:
            return a.value in self.kernel(a.home, n)
        return a.value % self.modulus == 0

    def validate(self) -> list[str]:
        out = []
        for v, g in self.groups.items():
            prev = None
            for n in range(1, self.depth + 1):
                k = self.kernels.get((v, n))
                if k is None:
                    raise InputError(f"missing test set for {(v, n)}")
                if not g.is_subgroup(k) or not g.is_normal(k):
                    out.append(f"{(v, n)}: kernel is not a normal subgroup")
                for auto in self.actions.get(v, []):
                    if frozenset(auto[x] for x in k) != k:
                        out.append(f"{(v, n)}: kernel is not Galois stable")
                        break
                if prev is not None and not k <= prev:
                    out.append(f"{(v, n)}: no surjection onto the previous level")
                prev = k
        return out

    def to_json(self) -> dict:
        return {"depth": self.depth, "modulus": self.modulus,
                "kernels": [{"vertex": v, "N": n, "elems": [self.groups[v].labels[x] for x in sorted(k)]}
                            for (v, n), k in sorted(self.kernels.items())]}


def family_from_gset(s: ActionSet, s0: int, depth: int,
                     actions: Mapping[str, Sequence[Sequence[int]]] | None = None) -> TestSetFamily:
    """The coarsest family dominating every orbit reachable from ``s0`` in at most ``N`` letters."""
    actions = dict(actions or {})
    reach = {s0}
    layers = [set(reach)]
    for _ in range(depth):
        nxt = set(reach)
        for x in reach:
            for a in s.letters():
                y = s.act_atom(a, x)
                if y >= 0:
                    nxt.add(y)
        reach = nxt
        layers.append(set(reach))
    kernels = {}
    for v, g in s.groups.items():
        prev = frozenset(g.elements)
        perms = s.vertex[v]
        for n in range(1, depth + 1):
            pts = layers[n]
            k = frozenset(x for x in prev if all(perms[x][p] == p for p in _orbit_closure(s, v, pts)))
            # Galois-stable core; it stays normal
            changed = True
            while changed:
                changed = False
                for auto in actions.get(v, []):
                    k2 = frozenset(x for x in k if auto[x] in k)
                    if k2 != k:
                        k, changed = k2, True
            kernels[(v, n)] = k
            prev = k
    # plain letters and pair products have exponents in [-2, 2], so any modulus
    # of at least 3 sees edge letters exactly as the free group does
    modulus = math.lcm(*range(1, max(depth, 3) + 1))
    notes = []
    for e, perm in s.edges.items():
        for length in _cycle_lengths(perm):
            if length and modulus % length:
                notes.append(f"edge {e}: orbit of size {length} is not covered by Z/{modulus}")
    return TestSetFamily(dict(s.groups), depth, kernels, modulus, actions, notes)


def _orbit_closure(s: ActionSet, v: str, pts: set[int]) -> set[int]:
    perms = s.vertex[v]
    out = set()
    for p in pts:
        out.update(int(perms[g][p]) for g in range(len(perms)))
    return out


def _cycle_lengths(perm: Sequence[int]) -> list[int]:
    seen, out = set(), []
    for x in range(len(perm)):
        if x in seen or perm[x] < 0:
            continue
        n, y, closed = 0, x, False
        while y >= 0 and y not in seen:
            seen.add(y)
            n += 1
            y = perm[y]
            if y == x:
                closed = True
                break
        out.append(n if closed else 0)
    return out


# -- looplike predicate --------------------------------------------------------------


def _home(a: Atom) -> tuple[str, str]:
    return (a.kind, a.home)


def is_looplike(w: Sequence[Atom], family: TestSetFamily, ctx: DistContext) -> tuple[bool, str]:
    w = tuple(w)
    if plain_form(w) != w:
        return False, "not plain"
    if len(w) % 2 == 0:
        return False, "even"
    m = len(w) // 2
    for j in range(1, m + 1):
        if _home(w[m - j]) != _home(w[m + j]):
            return False, "mirror"
    n = n_of_word(w, ctx)
    if not family.acts_trivially(w[m], n):
        return False, "center"
    for j in range(1, m + 1):
        left, right = w[m - j], w[m + j]
        if left.is_vertex:
            prod = Atom.vertex(left.home, family.groups[left.home].mul(left.value, right.value))
        else:
            prod = Atom.edge(left.home, left.value + right.value)
        if not family.acts_trivially(prod, n):
            return False, f"pair {j}"
    return True, "looplike"


def v_membership_bounded(g: Sequence[Atom], family: TestSetFamily, ctx: DistContext,
                         bound: int = 9) -> list[Word] | None:
    """Split the plain form of ``g`` into looplike blocks of at most ``bound`` letters.

    Even blocks get an identity letter in the middle when that makes them
    looplike.  Returns the blocks (whose product reduces to ``g``) or ``None``.
    """
    p = plain_form(g)
    n = len(p)
    best: list[list[Word] | None] = [None] * (n + 1)
    best[0] = []
    for i in range(1, n + 1):
        for j in range(max(0, i - bound), i):
            if best[j] is None:
                continue
            block = _looplike_block(p[j:i], family, ctx)
            if block is not None:
                best[i] = best[j] + [block]
                break
    return best[n]


def _looplike_block(block: Word, family: TestSetFamily, ctx: DistContext) -> Word | None:
    try:
        if len(block) % 2:
            return block if is_looplike(block, family, ctx)[0] else None
        h = len(block) // 2
        for v in sorted(family.groups):
            cand = block[:h] + (Atom.vertex(v, 0),) + block[h:]
            if is_looplike(cand, family, ctx)[0]:
                return cand
    except Inconclusive:
        return None
    return None


# -- δ, θ, η and the Galois action on words ------------------------------------------------


@dataclass
class EtaData:
    """Per edge ``E`` and Galois element ``s``: ``delta[(E, s)]`` at the origin, ``theta[(E, s)]`` at the target."""

    ctx: DistContext
    gal: FiniteGroup
    groups: dict[str, FiniteGroup]  # vertex groups
    actions: dict[str, Sequence[Sequence[int]]]  # actions[v][s] is an automorphism of groups[v]
    delta: dict[tuple[str, int], int]
    theta: dict[tuple[str, int], int]

    @classmethod
    def from_gauge(cls, ctx: DistContext, gal: FiniteGroup, groups, actions, gammas: Mapping[tuple, int]) -> "EtaData":
        """``δ(s) = γ·s(γ)⁻¹`` for the path ``γ = gammas[(E, 1)]``, and likewise ``θ`` from ``gammas[(E, 0)]``."""
        delta, theta = {}, {}
        for e in ctx.graph.edges:
            for i, table in ((1, delta), (0, theta)):
                v = ctx.vert_minus(e) if i == 1 else ctx.vert_plus(e)
                g = groups[v]
                gam = gammas.get((e, i), 0)
                for s in gal.elements:
                    table[(e, s)] = g.mul(gam, g.inv(actions[v][s][gam]))
        return cls(ctx, gal, dict(groups), dict(actions), delta, theta)

    def twist(self, v: str, s: int, g: int) -> int:
        return self.actions[v][s][g]

    def check_cocycle(self) -> list[tuple[str, str, int, int]]:
        """Pairs where ``δ(ts) = δ(t)·t(δ(s))`` (or the same for ``θ``) fails."""
        bad = []
        for e in self.ctx.graph.edges:
            for name, table, v in (("delta", self.delta, self.ctx.vert_minus(e)),
                                   ("theta", self.theta, self.ctx.vert_plus(e))):
                g = self.groups[v]
                for t in self.gal.elements:
                    for s in self.gal.elements:
                        lhs = table[(e, self.gal.mul(t, s))]
                        rhs = g.mul(table[(e, t)], self.twist(v, t, table[(e, s)]))
                        if lhs != rhs:
                            bad.append((name, e, t, s))
        return bad

    def step(self, s: int, e: str, forward: bool) -> Word:
        """``η`` along one tree edge: ``δ⁻¹θ`` forwards, ``θ⁻¹δ`` backwards."""
        a, b = self.ctx.vert_minus(e), self.ctx.vert_plus(e)
        d, t = self.delta[(e, s)], self.theta[(e, s)]
        if forward:
            return (Atom.vertex(a, self.groups[a].inv(d)), Atom.vertex(b, t))
        return (Atom.vertex(b, self.groups[b].inv(t)), Atom.vertex(a, d))

    def eta(self, s: int, v: str, w: str) -> Word:
        out: tuple[Atom, ...] = ()
        for e, sign in self.ctx.graph.path(v, w):
            out += self.step(s, e, sign > 0)
        return out

    def to_json(self) -> dict:
        out = []
        for (e, s), d in sorted(self.delta.items()):
            a, b = self.ctx.vert_minus(e), self.ctx.vert_plus(e)
            out.append({"edge": e, "sigma": self.gal.labels[s], "delta": self.groups[a].labels[d],
                        "theta": self.groups[b].labels[self.theta[(e, s)]]})
        return {"entries": out}


def sigma_action(s: int, v0: str, w: Sequence[Atom], eta: EtaData) -> Word:
    """The image of ``w`` under the Galois element ``s`` based at ``v0``, letter by letter."""
    out: list[Atom] = []
    for a in w:
        if a.is_vertex:
            if a.home not in eta.actions:
                raise InputError(f"no Galois action on the group at {a.home}")
            out += eta.eta(s, v0, a.home)
            out.append(Atom.vertex(a.home, eta.twist(a.home, s, a.value)))
            out += eta.eta(s, a.home, v0)
        else:
            if (a.home, s) not in eta.delta:
                raise InputError(f"missing eta data for edge {a.home}")
            lo, hi = eta.ctx.vert_minus(a.home), eta.ctx.vert_plus(a.home)
            unit = (eta.eta(s, v0, lo) + (Atom.vertex(lo, eta.groups[lo].inv(eta.delta[(a.home, s)])),)
                    + (Atom.edge(a.home, 1),) + (Atom.vertex(hi, eta.theta[(a.home, s)]),) + eta.eta(s, hi, v0))
            if a.value < 0:
                unit = invert(unit, eta.groups)
            out += list(unit) * abs(a.value)
    return tuple(out)


@dataclass
class IdentityReport:
    checked: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_phi_identities(eta: EtaData, words: Sequence[Word], pairs: Sequence[tuple[int, int]] | None = None,
                          bases: Sequence[tuple[str, str]] | None = None) -> IdentityReport:
    """Composition law ``φ(t)∘φ(s) = φ(ts)`` and the change of base vertex, after reduction."""
    gal, groups = eta.gal, eta.groups
    verts = list(eta.ctx.graph.vertices)
    pairs = pairs if pairs is not None else [(t, s) for t in gal.elements for s in gal.elements]
    bases = bases if bases is not None else [(a, b) for a in verts for b in verts]
    fails, n = [], 0
    for w in words:
        for v0 in verts:
            for t, s in pairs:
                n += 1
                lhs = reduce(sigma_action(t, v0, sigma_action(s, v0, w, eta), eta), groups)
                rhs = reduce(sigma_action(gal.mul(t, s), v0, w, eta), groups)
                if lhs != rhs:
                    fails.append(f"composition fails for t={gal.labels[t]}, s={gal.labels[s]} at {v0}")
        for v0, v1 in bases:
            for s in gal.elements:
                n += 1
                e = eta.eta(s, v1, v0)
                lhs = reduce(sigma_action(s, v1, w, eta), groups)
                rhs = reduce(e + sigma_action(s, v0, w, eta) + invert(e, groups), groups)
                if lhs != rhs:
                    fails.append(f"base change fails for s={gal.labels[s]} from {v0} to {v1}")
    return IdentityReport(n, fails)


def arranged_elements(eta: EtaData, family: TestSetFamily) -> list[int]:
    """Galois elements whose every ``δ`` and ``θ`` acts trivially on the first test sets."""
    out = []
    for s in eta.gal.elements:
        ok = all(eta.delta[(e, s)] in family.kernel(eta.ctx.vert_minus(e), 1)
                 and eta.theta[(e, s)] in family.kernel(eta.ctx.vert_plus(e), 1) for e in eta.ctx.graph.edges)
        if ok:
            out.append(s)
    return out


# -- arithmetic data and relation stability ------------------------------------------------


@dataclass
class ArithmeticData:
    """Strict data with a Galois action on every simplex group, twisted by paths.

    ``raw`` maps must commute with the Galois actions.  The geometric data and
    the ``δ``/``θ`` cocycles are both derived from the same ``paths``.
    """

    complex: TwoComplex
    gal: FiniteGroup
    groups: dict[str, FiniteGroup]
    actions: dict[str, Sequence[Sequence[int]]]
    raw: dict[tuple[str, int], Homomorphism]
    paths: dict[tuple, int]

    def geometric(self) -> GroupData:
        return GroupData.from_paths(self.complex, self.groups, self.raw, self.paths)

    def eta(self, ctx: DistContext | None = None) -> EtaData:
        ctx = ctx or DistContext.of(self.complex)
        verts = {v: self.groups[v] for v in self.complex.E0}
        return EtaData.from_gauge(ctx, self.gal, verts, {v: self.actions[v] for v in verts}, self.paths)

    def check_equivariance(self) -> list[tuple[str, int]]:
        bad = []
        for (s, i), h in self.raw.items():
            t = self.complex.boundary(s, i)
            for sg in self.gal.generators():
                if any(h(self.actions[s][sg][x]) != self.actions[t][sg][h(x)] for x in self.groups[s].elements):
                    bad.append((s, i))
                    break
        return bad


@dataclass
class StabilityReport:
    verified: list[tuple[str, str, int]]  # (kind, relation source, galois element)
    failures: list[tuple[str, str, int]]
    inconclusive: list[tuple[str, str, int]]

    @property
    def ok(self) -> bool:
        return not self.failures and not self.inconclusive


def _r1_family(p: Presentation, data: GroupData, complex_: TwoComplex) -> list[Word]:
    """Edge relations for every element of every edge group, not only generators."""
    out = []
    for e in complex_.E1:
        o, t = complex_.origin(e), complex_.target(e)
        for h in data.groups[e].elements:
            raw = ((Atom.vertex(o, data.maps[(e, 1)](h)),) + (() if e in p.tree else (Atom.edge(e, 1),))
                   + (Atom.vertex(t, data.groups[t].inv(data.maps[(e, 0)](h))),)
                   + (() if e in p.tree else (Atom.edge(e, -1),)))
            w = reduce(raw, p.factors)
            if w:
                out.append(w)
    return out


def _edge_substitutions(w: Word, data: GroupData, complex_: TwoComplex, p: Presentation, budget: int):
    """Words equal to ``w`` modulo edge relations, from ``e ↦ ∂1(k)⁻¹ e ∂0(k)`` at each edge letter.

    Powers are expanded first so that every occurrence gets its own ``k``.
    """
    w = plain_form(w)
    slots = [i for i, a in enumerate(w) if not a.is_vertex]
    choices = []
    for i in slots:
        e = w[i].home
        choices.append([(data.maps[(e, 1)](k), data.maps[(e, 0)](k)) for k in data.groups[e].elements])
    total = 1
    for c in choices:
        total *= len(c)
    if total > budget:
        raise Inconclusive(f"{total} substitutions exceed the budget {budget}")

    def rec(k: int, acc: list[Atom]):
        if k == len(slots):
            yield reduce(tuple(acc) + w[(slots[-1] + 1 if slots else 0):], p.factors)
            return
        i = slots[k]
        start = slots[k - 1] + 1 if k else 0
        a = w[i]
        o, t = complex_.origin(a.home), complex_.target(a.home)
        for x, y in choices[k]:
            unit = (Atom.vertex(o, p.factors[o].inv(x)), Atom.edge(a.home, 1), Atom.vertex(t, y))
            piece = list(unit) if a.value > 0 else list(invert(unit, p.factors))
            yield from rec(k + 1, acc + list(w[start:i]) + piece)

    yield from rec(0, [])


def verify_relation_stability(arith: ArithmeticData, samples: Sequence[int] | None = None,
                              base: str | None = None, budget: int = 100_000) -> StabilityReport:
    """Galois images of relations, checked against the relations of the geometric presentation.

    An edge relation must map to a conjugate of an edge relation.  A face
    relation must map to a conjugate of a face relation after edge relations
    move vertex letters across edge letters.  Images are computed with tree
    edges still present, and tree edges are set to 1 only after substitution.
    """
    from .vankampen import build_presentation, face_word

    cx = arith.complex
    data = arith.geometric()
    ctx = DistContext.of(cx)
    p = build_presentation(cx, data, ctx.graph)
    eta = arith.eta(ctx)
    base = base or min(cx.E0)
    samples = list(samples) if samples is not None else list(arith.gal.elements)
    r1 = _r1_family(p, data, cx)
    r2 = [r.word for r in p.relations_of("R2") if r.word]
    verified, failures, unsure = [], [], []

    def drop_tree(w: Word) -> Word:
        return reduce(tuple(a for a in w if a.is_vertex or a.home not in p.tree), p.factors)

    for s in samples:
        for r in p.relations_of("R1"):
            img = reduce(sigma_action(s, base, r.word, eta), p.factors)
            if not img or any(conjugate_in_free_product(img, x, p.factors) is not None for x in r1):
                verified.append(("R1", r.source, s))
            else:
                failures.append(("R1", r.source, s))
        for r in p.relations_of("R2"):
            img = reduce(sigma_action(s, base, face_word(cx, data, r.source), eta), p.factors)
            if not drop_tree(img):
                verified.append(("R2", r.source, s))
                continue
            try:
                found = False
                for c in _edge_substitutions(img, data, cx, p, budget):
                    c = drop_tree(c)
                    if not c or any(conjugate_in_free_product(c, x, p.factors) is not None for x in r2):
                        found = True
                        break
            except Inconclusive:
                unsure.append(("R2", r.source, s))
                continue
            (verified if found else failures).append(("R2", r.source, s))
    return StabilityReport(verified, failures, unsure)


# -- random looplike words ------------------------------------------------------------------


def random_looplike(family: TestSetFamily, ctx: DistContext, rng: random.Random, max_half: int = 3) -> Word:
    """A mirror word whose pairs multiply into the deepest kernel and whose centre lies in it too."""
    deep = family.depth
    homes = [("v", v) for v in ctx.graph.vertices if v in family.groups] + \
            [("e", e) for e in ctx.graph.non_tree_edges()]
    m = rng.randint(0, max_half)
    left = []
    for _ in range(m):
        kind, h = rng.choice(homes)
        if kind == "v":
            left.append(Atom.vertex(h, rng.randrange(family.groups[h].order)))
        else:
            left.append(Atom.edge(h, rng.choice((1, -1))))
    vs = [v for k, v in homes if k == "v"]
    c = rng.choice(vs)
    center = Atom.vertex(c, rng.choice(sorted(family.kernel(c, deep))))
    right = []
    for a in reversed(left):
        if a.is_vertex:
            g = family.groups[a.home]
            k = rng.choice(sorted(family.kernel(a.home, deep)))
            right.append(Atom.vertex(a.home, g.mul(g.inv(a.value), k)))
        else:
            right.append(Atom.edge(a.home, -a.value))
    # written order: g_M ... g_{m+2} g_{m+1} g_m ... g_1, pairs g_{m+1+j} g_{m+1-j} ∈ K
    return tuple(reversed(right)) + (center,) + tuple(reversed(left))
