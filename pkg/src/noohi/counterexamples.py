"""Executable versions of the worked examples: the nodal curve, wedges, and the two obstructions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .complexes import GroupData, nodal_complex
from .errors import InputError
from .groups import FiniteGroup, semidirect_product
from .padics import (DEFAULT_FLOOR, in_integral_borel, psi_word, twisted_word,
                     unit_generator, untwisted_word, valuation, _check_ell)
from .vankampen import Presentation, Relation, build_presentation
from .words import Atom, reduce

# -- nodal curve and wedges --------------------------------------------------------------


def nodal_presentation(gal: FiniteGroup) -> Presentation:
    """Constant Galois group on every simplex of the nodal complex, identity maps, trivial twisting."""
    cx = nodal_complex()
    return build_presentation(cx, GroupData.constant(cx, gal))


@dataclass
class SemidirectFactor:
    kernel: FiniteGroup
    action: Sequence[Sequence[int]]  # action[sigma][k]


def wedge_presentation(factors: Sequence[SemidirectFactor], loops: int, gal: FiniteGroup) -> Presentation:
    """Free product of ``K_i ⋊ Gal`` and ``loops`` copies of ``Z × Gal`` with all Galois copies identified.

    Factor ``X{i}`` is ``K_i ⋊ Gal``; loop ``j`` contributes a factor ``Y{j} = Gal``
    and an edge ``y{j}`` commuting with it.  Identifications run from each
    Galois copy to the first one.
    """
    groups: dict[str, FiniteGroup] = {}
    embed: dict[str, object] = {}
    for i, f in enumerate(factors):
        name = f"X{i}"
        groups[name] = semidirect_product(f.kernel, gal, f.action, name=f"{f.kernel.name}:{gal.name}")
        embed[name] = lambda s: s  # (0, s) has index s
    rels = []
    edges = []
    for j in range(loops):
        name, e = f"Y{j}", f"y{j}"
        groups[name] = gal
        embed[name] = lambda s: s
        edges.append(e)
        for s in gal.generators():
            w = (Atom.vertex(name, s), Atom.edge(e, 1), Atom.vertex(name, gal.inv(s)), Atom.edge(e, -1))
            rels.append(Relation("extra", f"{name}:{e}", reduce(w, groups), w))
    names = list(groups)
    for other in names[1:]:
        first = names[0]
        for s in gal.generators():
            w = (Atom.vertex(first, embed[first](s)), Atom.vertex(other, groups[other].inv(embed[other](s))))
            rels.append(Relation("extra", f"{first}={other}", reduce(w, groups), w))
    return Presentation(groups, tuple(edges), rels)


# -- interval G-set ------------------------------------------------------------------


@dataclass
class Orbit:
    family: str  # "a" or "b"
    level: int
    start: int  # first position (1-based)
    size: int
    positions: list[int]  # positions ordered by label: positions[k] has label k


@dataclass
class IntervalGSet:
    ell: int
    depth: int
    window: int
    orbits: list[Orbit]
    label: dict[tuple[str, int], int] = field(default_factory=dict)  # (family, position) -> label
    orbit_of: dict[tuple[str, int], Orbit] = field(default_factory=dict)

    base_point = 1

    def step(self, family: str, pos: int, k: int = 1) -> int | None:
        """``γ^k`` of the given family applied to ``pos``; ``None`` outside the generated window."""
        o = self.orbit_of.get((family, pos))
        if o is None:
            return None
        return o.positions[(self.label[(family, pos)] + k) % o.size]

    def orbit(self, family: str, level: int) -> Orbit:
        for o in self.orbits:
            if o.family == family and o.level == level:
                return o
        raise KeyError((family, level))

    def as_action_set(self):
        """The two actions as partial permutations of ``0..window-1`` (edges ``h`` and ``g``)."""
        from .gsets import ActionSet

        edges = {}
        for fam, name in (("a", "h"), ("b", "g")):
            perm = []
            for p in range(1, self.window + 1):
                q = self.step(fam, p)
                perm.append(-1 if q is None else q - 1)
            edges[name] = perm
        return ActionSet(self.window, {}, {}, edges)

    def intersection(self, m: int) -> list[int]:
        """Positions of ``b_m ∩ a_{m+1}`` for even ``m``."""
        b = set(self.orbit("b", m).positions)
        return sorted(p for p in self.orbit("a", m + 1).positions if p in b)


def build_interval_gset(ell: int, depth: int) -> IntervalGSet:
    """Consecutive ``a``-intervals of sizes ``ℓ, ℓ³, ...`` and ``b``-intervals of sizes ``ℓ², ℓ⁴, ...``."""
    _check_ell(ell)
    if depth < 3:
        raise InputError("depth must be at least 3")
    spans = {"a": [], "b": []}
    for fam, levels in (("a", range(1, depth + 1, 2)), ("b", range(2, depth + 1, 2))):
        start = 1
        for m in levels:
            spans[fam].append((m, start, ell ** m))
            start += ell ** m
    window = max(s + n - 1 for fam in spans.values() for _, s, n in fam)
    out = IntervalGSet(ell, depth, window, [])
    for m, start, size in spans["b"]:
        out.orbits.append(Orbit("b", m, start, size, list(range(start, start + size))))
    bsets = {m: set(range(s, s + n)) for m, s, n in spans["b"]}
    for m, start, size in spans["a"]:
        pts = list(range(start, start + size))
        shared = [p for p in pts if p in bsets.get(m - 1, ())]
        if m > 1 and len(shared) < 2:
            raise AssertionError("interval layout leaves fewer than two shared points")
        order = shared[:2] + [p for p in pts if p not in shared[:2]]
        out.orbits.append(Orbit("a", m, start, size, order))
    out.orbits.sort(key=lambda o: (o.level, o.family))
    for o in out.orbits:
        for k, p in enumerate(o.positions):
            out.label[(o.family, p)] = k
            out.orbit_of[(o.family, p)] = o
    return out


@dataclass
class ContradictionReport:
    multiplier: int
    level: int
    point: int
    paths: list[str]
    values: list[int]  # labels in the a-orbit of ``point`` reached by each path
    modulus: int
    window: int
    residue: int | None = None  # |b_m ∩ a_{m+1}| mod ℓ²

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Consistent:
    multiplier: int
    window: int
    assignment: dict[int, int]
    reaches_level: bool  # False when the window stops before the level where a clash could occur


def frobenius_level(q: int, ell: int) -> tuple[int, int]:
    """The multiplier actually used and the largest ``m`` with ``q ≡ 1 mod ℓ^m``.

    A multiplier not congruent to 1 is first raised to its order mod ``ℓ``; an
    odd ``m`` then switches to ``q^ℓ``, which gains exactly one level.
    """
    if q % ell == 0:
        raise InputError("multiplier must be prime to l")
    if q % ell != 1:
        k = 1
        while pow(q, k, ell) != 1:
            k += 1
        q = q ** k
    m = valuation(q - 1, ell) if q != 1 else None
    if m is not None and m % 2 == 1:
        q = q ** ell
        m = valuation(q - 1, ell)
    return q, m


def frobenius_obstruction(s: IntervalGSet, q: int) -> ContradictionReport | Consistent:
    """Propagate any semilinear map fixing the base point through complete orbits until two values clash."""
    ell = s.ell
    q_used, m = frobenius_level(q, ell)
    phi = {s.base_point: s.base_point}
    why = {s.base_point: "base point"}
    changed = True
    while changed:
        changed = False
        for o in s.orbits:
            seeds = [p for p in o.positions if p in phi and (o.family, phi[p]) in s.orbit_of]
            if not seeds:
                continue
            p0 = seeds[0]
            k0 = s.label[(o.family, p0)]
            for k, p in enumerate(o.positions):
                img = s.step(o.family, phi[p0], q_used * (k - k0))
                if p in phi:
                    if phi[p] != img:
                        a = s.orbit_of.get(("a", p))
                        lab = lambda x: s.label[("a", x)] if a is not None and ("a", x) in s.label else x
                        return ContradictionReport(
                            q_used, m if m is not None else 0, p,
                            [why[p], f"{o.family}{o.level} from position {p0} with multiplier {q_used}"],
                            [lab(phi[p]), lab(img)], ell ** (a.level if a else o.level), s.window,
                            _residue(s, m))
                else:
                    phi[p] = img
                    why[p] = f"{o.family}{o.level} from position {p0} with multiplier {q_used}"
                    changed = True
    return Consistent(q_used, s.window, phi, m is not None and m + 1 <= s.depth)


def _residue(s: IntervalGSet, m: int | None) -> int | None:
    if m is None or m % 2 or m + 1 > s.depth:
        return None
    return len(s.intersection(m)) % s.ell ** 2


def brute_force_phis(s: IntervalGSet, q: int) -> list[dict[int, int]]:
    """All maps on the window that fix the base point and are ``q``-semilinear for both actions.

    Each ``a``-orbit representative may go to any point whose orbit size
    divides its own; the ``b`` condition and the base point are then checked
    directly on the window.
    """
    a_orbits = [o for o in s.orbits if o.family == "a"]
    b_orbits = [o for o in s.orbits if o.family == "b"]
    cands = []
    for o in a_orbits:
        cands.append([t for t in range(1, s.window + 1)
                      if ("a", t) in s.orbit_of and o.size % s.orbit_of[("a", t)].size == 0])
    sols = []

    def rec(i: int, phi: dict[int, int]):
        if i == len(a_orbits):
            if phi.get(s.base_point) != s.base_point:
                return
            for o in b_orbits:
                for p in o.positions:
                    if p not in phi:
                        return
                    nxt = s.step("b", p)
                    img = s.step("b", phi[p], q) if ("b", phi[p]) in s.orbit_of else None
                    if img is None or phi.get(nxt) != img:
                        return
            sols.append(dict(phi))
            return
        o = a_orbits[i]
        for t in cands[i]:
            new = dict(phi)
            for k, p in enumerate(o.positions):
                new[p] = s.step("a", t, q * k)
            rec(i + 1, new)

    rec(0, {})
    return sols


# -- Borel obstruction ------------------------------------------------------------------


@dataclass
class BorelReport:
    ell: int
    p: int
    n: int
    untwisted_in_u: bool
    twisted_in_u: bool
    corner_valuation: int | None
    predicted_valuation: int
    twisted: dict

    @property
    def obstruction(self) -> bool:
        return not self.twisted_in_u

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["obstruction"] = self.obstruction
        return out


def borel_obstruction(ell: int, p: int, n: int, prec: int = 20, floor: int = DEFAULT_FLOOR) -> BorelReport:
    """Check the untwisted word lands in the integral Borel, then test the ``p``-twisted word."""
    _check_ell(ell)
    if p == ell or p < 2:
        raise InputError("p must be a prime different from l")
    if n < 1:
        raise InputError("n must be at least 1")
    unit = unit_generator(ell, prec)
    u1 = unit.scalar(floor)
    plain = psi_word(untwisted_word(n, u1), ell, prec, floor, unit)
    tw = psi_word(twisted_word(n, p, u1), ell, prec, floor, unit)
    u = unit.residue
    predicted = valuation(p * (u ** p - u), ell) - n
    return BorelReport(ell, p, n, in_integral_borel(plain), in_integral_borel(tw), tw.b.val, predicted,
                       tw.to_json())


# -- closed-form hom counts used as independent checks ----------------------------------------


def _centralizer_size(f: FiniteGroup, elems) -> int:
    return len(f.centralizer(elems))


def product_with_z_count(gal: FiniteGroup, target: FiniteGroup) -> int:
    """Homomorphisms ``gal × Z -> target``: a map on ``gal`` and an element centralizing its image."""
    return sum(_centralizer_size(target, h.image()) for h in gal.homs_to(target))


def wedge_count(factors: Sequence[SemidirectFactor], loops: int, gal: FiniteGroup, target: FiniteGroup) -> int:
    """Homomorphisms out of the amalgamated wedge, counted factor by factor over each map on ``gal``.

    With ``ρ`` fixed on the shared Galois group, a factor ``K ⋊ Gal`` contributes
    the maps ``ψ`` on ``K`` with ``ψ(s·k) = ρ(s) ψ(k) ρ(s)⁻¹`` and a loop
    contributes an element centralizing ``ρ(Gal)``.
    """
    total = 0
    for rho in gal.homs_to(target):
        n = _centralizer_size(target, rho.image()) ** loops
        for f in factors:
            good = 0
            for psi in f.kernel.homs_to(target):
                if all(psi(f.action[s][k]) == target.conj(rho(s), psi(k))
                       for s in gal.generators() for k in f.kernel.generators()):
                    good += 1
            n *= good
            if not n:
                break
        total += n
    return total
