"""Words in a free product of finite vertex groups and free edge generators.

A word is a plain tuple of :class:`Atom`.  Vertex letters carry an element
index of their group at the active level; edge letters carry an exponent.
Trivial letters are vertex letters holding the identity (index 0) or edge
letters with exponent 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import InputError
from .groups import FiniteGroup

VERTEX = "vertex"
EDGE = "edge"


@dataclass(frozen=True, slots=True)
class Atom:
    kind: str
    home: str
    value: int

    @classmethod
    def vertex(cls, group: str, elem: int) -> "Atom":
        return cls(VERTEX, group, int(elem))

    @classmethod
    def edge(cls, edge: str, exp: int = 1) -> "Atom":
        return cls(EDGE, edge, int(exp))

    @property
    def is_vertex(self) -> bool:
        return self.kind == VERTEX

    @property
    def is_trivial(self) -> bool:
        return self.value == 0

    def __repr__(self):
        if self.is_vertex:
            return f"{self.home}[{self.value}]"
        return self.home if self.value == 1 else f"{self.home}^{self.value}"


Word = tuple[Atom, ...]
Groups = Mapping[str, FiniteGroup]


def word(*atoms: Atom) -> Word:
    return tuple(atoms)


def _group(groups: Groups, name: str) -> FiniteGroup:
    try:
        return groups[name]
    except KeyError:
        raise InputError(f"no multiplication table for vertex group {name!r}") from None


def plain_form(w: Sequence[Atom]) -> Word:
    """Expand edge powers into single letters and drop trivial edge letters.

    Vertex letters stay, identity included: a plain word keeps one letter per
    vertex-group factor the way it was written.
    """
    out: list[Atom] = []
    for a in w:
        if a.is_vertex:
            out.append(a)
        elif a.value:
            step = Atom(EDGE, a.home, 1 if a.value > 0 else -1)
            out.extend([step] * abs(a.value))
    return tuple(out)


def plain_length(w: Sequence[Atom]) -> int:
    return sum(1 if a.is_vertex else abs(a.value) for a in w)


def reduce(w: Sequence[Atom], groups: Groups) -> Word:
    """Free-product normal form, with runs of one edge merged into a single power."""
    stack: list[Atom] = []
    for a in w:
        if a.is_trivial:
            if a.is_vertex:
                _group(groups, a.home)
            continue
        if a.is_vertex:
            g = _group(groups, a.home)
            if not 0 <= a.value < g.order:
                raise InputError(f"element {a.value} out of range for {a.home}")
        if stack and stack[-1].kind == a.kind and stack[-1].home == a.home:
            top = stack.pop()
            if a.is_vertex:
                merged = Atom(VERTEX, a.home, groups[a.home].mul(top.value, a.value))
            else:
                merged = Atom(EDGE, a.home, top.value + a.value)
            if not merged.is_trivial:
                stack.append(merged)
        else:
            stack.append(a)
    return tuple(stack)


def is_reduced(w: Sequence[Atom]) -> bool:
    if any(a.is_trivial for a in w):
        return False
    return all(not (x.kind == y.kind and x.home == y.home) for x, y in zip(w, w[1:]))


def concat(a: Sequence[Atom], b: Sequence[Atom]) -> Word:
    return tuple(a) + tuple(b)


def invert(w: Sequence[Atom], groups: Groups) -> Word:
    out = []
    for a in reversed(w):
        if a.is_vertex:
            out.append(Atom(VERTEX, a.home, _group(groups, a.home).inv(a.value)))
        else:
            out.append(Atom(EDGE, a.home, -a.value))
    return tuple(out)


def multiply(groups: Groups, *words: Sequence[Atom]) -> Word:
    out: tuple[Atom, ...] = ()
    for w in words:
        out += tuple(w)
    return reduce(out, groups)


def cyclic_core(w: Sequence[Atom], groups: Groups) -> tuple[Word, Word]:
    """Split a word as ``h c h^-1`` with ``c`` cyclically reduced; returns ``(h, c)``."""
    w = reduce(w, groups)
    prefix: list[Atom] = []
    while len(w) >= 2 and w[0].kind == w[-1].kind and w[0].home == w[-1].home:
        x = w[0]
        prefix.append(x)
        w = reduce(w[1:] + (x,), groups)
    return reduce(prefix, groups), w


def conjugate_in_free_product(a: Sequence[Atom], b: Sequence[Atom], groups: Groups) -> Word | None:
    """Return ``h`` with ``red(h b h^-1) = red(a)``, or ``None`` if they are not conjugate."""
    ha, ca = cyclic_core(a, groups)
    hb, cb = cyclic_core(b, groups)
    if len(ca) != len(cb):
        return None
    if not ca:
        return ha
    if len(ca) == 1:
        x, y = ca[0], cb[0]
        if x.kind != y.kind or x.home != y.home:
            return None
        if not x.is_vertex:
            return (ha + invert(hb, groups)) if x.value == y.value else None
        g = groups[x.home]
        for t in g.elements:
            if g.conj(t, y.value) == x.value:
                return reduce(ha + (Atom(VERTEX, x.home, t),) + invert(hb, groups), groups)
        return None
    n = len(ca)
    for k in range(n):
        rot = cb[k:] + cb[:k]
        if rot == ca:
            # ca = t cb t^-1 with t = inverse of the rotated-off prefix cb[:k]
            t = invert(cb[:k], groups)
            return reduce(ha + t + invert(hb, groups), groups)
    return None


# -- serialization -----------------------------------------------------------------


def to_json(w: Sequence[Atom], groups: Groups | None = None) -> list[dict]:
    out = []
    for a in w:
        if a.is_vertex:
            elem = groups[a.home].labels[a.value] if groups and a.home in groups else a.value
            out.append({"kind": VERTEX, "group": a.home, "elem": elem})
        else:
            out.append({"kind": EDGE, "edge": a.home, "exp": a.value})
    return out


def from_json(data: Sequence[Mapping], groups: Groups) -> Word:
    out = []
    for rec in data:
        kind = rec.get("kind")
        if kind == VERTEX:
            g = _group(groups, rec["group"])
            out.append(Atom.vertex(rec["group"], g.index_of(rec["elem"])))
        elif kind == EDGE:
            out.append(Atom.edge(rec["edge"], int(rec.get("exp", 1))))
        elif kind == "trivial":
            home = rec.get("group") or rec.get("edge")
            if "group" in rec:
                _group(groups, home)
                out.append(Atom.vertex(home, 0))
            else:
                out.append(Atom.edge(home, 0))
        else:
            raise InputError(f"unknown letter kind {kind!r}")
    return tuple(out)


def format_word(w: Sequence[Atom], groups: Groups | None = None) -> str:
    if not w:
        return "1"
    parts = []
    for a in w:
        if a.is_vertex:
            lab = groups[a.home].labels[a.value] if groups and a.home in groups else str(a.value)
            parts.append(f"{a.home}:{lab}")
        else:
            parts.append(a.home if a.value == 1 else f"{a.home}^{a.value}")
    return " ".join(parts)
