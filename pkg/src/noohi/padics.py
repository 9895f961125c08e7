"""Truncated l-adic numbers and the upper-triangular 2x2 group over Q_l.

A nonzero :class:`PadicScalar` is ``l**val * unit`` where ``unit`` is known
modulo ``l**prec`` (relative precision).  Zero is kept with an absolute
precision: "zero modulo ``l**prec``".  Every operation propagates the
smallest surviving precision, and anything that would leave fewer than
``floor`` digits raises :class:`PrecisionError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .errors import InputError, PrecisionError

DEFAULT_PREC = 20
DEFAULT_FLOOR = 1


def valuation(n: int, ell: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def _check_ell(ell: int) -> None:
    if ell == 2:
        raise InputError("l = 2 is not supported (the unit group is not procyclic)")
    if ell < 2 or not sympy.isprime(ell):
        raise InputError(f"l = {ell} is not an odd prime")


@dataclass(frozen=True)
class PadicScalar:
    ell: int
    val: int | None  # None encodes zero
    unit: int
    prec: int
    floor: int = DEFAULT_FLOOR

    def __post_init__(self):
        if self.val is None:
            if self.unit != 0:
                raise InputError("zero must have unit 0")
        else:
            if self.prec < self.floor:
                raise PrecisionError(f"relative precision {self.prec} below floor {self.floor}")
            if self.unit % self.ell == 0:
                raise InputError("unit part divisible by l")
            if not 0 < self.unit < self.ell ** self.prec:
                object.__setattr__(self, "unit", self.unit % self.ell ** self.prec)

    # construction

    @classmethod
    def zero(cls, ell: int, absprec: int = DEFAULT_PREC, floor: int = DEFAULT_FLOOR) -> "PadicScalar":
        return cls(ell, None, 0, absprec, floor)

    @classmethod
    def from_fraction(cls, x, ell: int, prec: int = DEFAULT_PREC, floor: int = DEFAULT_FLOOR) -> "PadicScalar":
        x = Fraction(x)
        if x == 0:
            return cls.zero(ell, prec, floor)
        num, den = x.numerator, x.denominator
        v = 0
        while num % ell == 0:
            num //= ell
            v += 1
        while den % ell == 0:
            den //= ell
            v -= 1
        mod = ell ** prec
        return cls(ell, v, (num * pow(den, -1, mod)) % mod, prec, floor)

    @classmethod
    def from_int(cls, n: int, ell: int, prec: int = DEFAULT_PREC, floor: int = DEFAULT_FLOOR) -> "PadicScalar":
        return cls.from_fraction(n, ell, prec, floor)

    # inspection

    @property
    def is_zero(self) -> bool:
        return self.val is None

    @property
    def absprec(self) -> int:
        return self.prec if self.val is None else self.val + self.prec

    def valuation(self) -> int | float:
        return float("inf") if self.val is None else self.val

    def to_fraction(self) -> Fraction:
        """A rational representative, using the balanced lift of the unit."""
        if self.val is None:
            return Fraction(0)
        mod = self.ell ** self.prec
        u = self.unit if self.unit <= mod // 2 else self.unit - mod
        return Fraction(u) * Fraction(self.ell) ** self.val

    def to_json(self) -> dict:
        return {"l": self.ell, "val": self.val, "unit": self.unit, "prec": self.prec}

    @classmethod
    def from_json(cls, d: dict, floor: int = DEFAULT_FLOOR) -> "PadicScalar":
        try:
            return cls(int(d["l"]), None if d["val"] is None else int(d["val"]), int(d["unit"]), int(d["prec"]), floor)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad scalar record {d!r}") from exc

    # arithmetic

    def _like(self, other) -> "PadicScalar":
        if not isinstance(other, PadicScalar):
            other = PadicScalar.from_fraction(other, self.ell, self.prec, self.floor)
        if other.ell != self.ell:
            raise InputError("mixing different primes")
        return other

    def __mul__(self, other) -> "PadicScalar":
        o = self._like(other)
        floor = max(self.floor, o.floor)
        if self.val is None or o.val is None:
            # zero times x: the known digits of x shift the absolute precision
            z, x = (self, o) if self.val is None else (o, self)
            shift = 0 if x.val is None else x.val
            return PadicScalar(self.ell, None, 0, z.prec + shift, floor)
        p = min(self.prec, o.prec)
        return PadicScalar(self.ell, self.val + o.val, (self.unit * o.unit) % self.ell ** p, p, floor)

    __rmul__ = __mul__

    def __neg__(self) -> "PadicScalar":
        if self.val is None:
            return self
        return PadicScalar(self.ell, self.val, (-self.unit) % self.ell ** self.prec, self.prec, self.floor)

    def __add__(self, other) -> "PadicScalar":
        o = self._like(other)
        floor = max(self.floor, o.floor)
        a = min(self.absprec, o.absprec)
        vals = [x.val for x in (self, o) if x.val is not None]
        if not vals:
            return PadicScalar(self.ell, None, 0, a, floor)
        m = min(vals)
        if a <= m:
            raise PrecisionError("sum has no significant digits left")
        mod = self.ell ** (a - m)
        total = 0
        for x in (self, o):
            if x.val is not None:
                total += x.unit * self.ell ** (x.val - m)
        total %= mod
        if total == 0:
            return PadicScalar(self.ell, None, 0, a, floor)
        v = m + valuation(total, self.ell)
        unit = total // self.ell ** (v - m)
        return PadicScalar(self.ell, v, unit % self.ell ** (a - v), a - v, floor)

    __radd__ = __add__

    def __sub__(self, other) -> "PadicScalar":
        return self + (-self._like(other))

    def __rsub__(self, other) -> "PadicScalar":
        return self._like(other) + (-self)

    def inverse(self) -> "PadicScalar":
        if self.val is None:
            raise ZeroDivisionError("inverse of an l-adic zero")
        mod = self.ell ** self.prec
        return PadicScalar(self.ell, -self.val, pow(self.unit, -1, mod), self.prec, self.floor)

    def __truediv__(self, other) -> "PadicScalar":
        return self * self._like(other).inverse()

    def __pow__(self, k: int) -> "PadicScalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = PadicScalar.from_int(1, self.ell, self.prec, self.floor)
        for _ in range(k):
            out = out * self
        return out

    def equals(self, other) -> bool:
        """Equality up to the common absolute precision."""
        d = self - self._like(other)
        return d.is_zero

    def sign_of_valuation_known(self, threshold: int = 0) -> bool:
        """Whether ``v >= threshold`` can be decided at this precision."""
        return self.val is not None or self.prec >= threshold


@dataclass(frozen=True)
class TruncUnit:
    ell: int
    prec: int
    residue: int

    def __post_init__(self):
        if self.residue % self.ell == 0:
            raise InputError("a unit must be prime to l")

    def scalar(self, floor: int = DEFAULT_FLOOR) -> PadicScalar:
        return PadicScalar(self.ell, 0, self.residue % self.ell ** self.prec, self.prec, floor)

    def generates(self, k: int) -> bool:
        """Whether the residue generates ``(Z/l^k)^x``."""
        mod = self.ell ** k
        phi = mod // self.ell * (self.ell - 1)
        return sympy.n_order(self.residue % mod, mod) == phi


def unit_generator(ell: int, prec: int = DEFAULT_PREC) -> TruncUnit:
    """Smallest positive integer generating ``(Z/l^2)^x``, hence every ``(Z/l^k)^x``."""
    _check_ell(ell)
    mod = ell * ell
    phi = ell * (ell - 1)
    for g in range(2, mod):
        if g % ell and sympy.n_order(g, mod) == phi:
            return TruncUnit(ell, prec, g)
    raise AssertionError("no primitive root found")  # unreachable for odd primes


@dataclass(frozen=True)
class BorelElement:
    """The matrix ``(a, b; 0, d)`` with ``a`` and ``d`` invertible."""

    a: PadicScalar
    b: PadicScalar
    d: PadicScalar

    def __post_init__(self):
        if self.a.is_zero or self.d.is_zero:
            raise InputError("diagonal entries must be invertible")

    @classmethod
    def identity(cls, ell: int, prec: int = DEFAULT_PREC, floor: int = DEFAULT_FLOOR) -> "BorelElement":
        one = PadicScalar.from_int(1, ell, prec, floor)
        return cls(one, PadicScalar.zero(ell, prec, floor), one)

    @classmethod
    def of(cls, a, b, d, ell: int, prec: int = DEFAULT_PREC, floor: int = DEFAULT_FLOOR) -> "BorelElement":
        conv = lambda x: x if isinstance(x, PadicScalar) else PadicScalar.from_fraction(x, ell, prec, floor)
        return cls(conv(a), conv(b), conv(d))

    def __mul__(self, other: "BorelElement") -> "BorelElement":
        return borel_mul(self, other)

    def equals(self, other: "BorelElement") -> bool:
        return self.a.equals(other.a) and self.b.equals(other.b) and self.d.equals(other.d)

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json(), "d": self.d.to_json()}


def borel_mul(x: BorelElement, y: BorelElement) -> BorelElement:
    return BorelElement(x.a * y.a, x.a * y.b + x.b * y.d, x.d * y.d)


def borel_inv(x: BorelElement) -> BorelElement:
    ai, di = x.a.inverse(), x.d.inverse()
    return BorelElement(ai, -(ai * x.b * di), di)


def in_integral_borel(x: BorelElement) -> bool:
    """Membership in the integral Borel: unit diagonal and integral corner."""
    if x.a.val != 0 or x.d.val != 0:
        return False
    if x.b.val is None:
        if x.b.prec < 0:
            raise PrecisionError("corner entry is zero only modulo a negative power of l")
        return True
    return x.b.val >= 0


# A letter is (generator index 1..5, exponent); exponents of t3 may be scalars.
Letter = tuple[int, object]


def psi_word(w: Sequence[Letter], ell: int, prec: int = DEFAULT_PREC, floor: int = DEFAULT_FLOOR,
             unit: TruncUnit | None = None) -> BorelElement:
    """Evaluate the five-generator homomorphism into the Borel on a word."""
    _check_ell(ell)
    u = (unit or unit_generator(ell, prec)).scalar(floor)
    one = PadicScalar.from_int(1, ell, prec, floor)
    zero = PadicScalar.zero(ell, prec, floor)
    lscal = PadicScalar.from_int(ell, ell, prec, floor)
    out = BorelElement.identity(ell, prec, floor)
    for gen, exp in w:
        if gen == 3:
            e = exp if isinstance(exp, PadicScalar) else PadicScalar.from_fraction(exp, ell, prec, floor)
            m = BorelElement(one, e, one)
        else:
            if isinstance(exp, PadicScalar) or int(exp) != exp:
                raise InputError(f"t{gen} needs an integer exponent")
            k = int(exp)
            if gen == 1:
                m = BorelElement(u ** k, zero, one)
            elif gen == 2:
                m = BorelElement(one, zero, u ** k)
            elif gen == 4:
                m = BorelElement(lscal ** k, zero, one)
            elif gen == 5:
                m = BorelElement(one, zero, lscal ** k)
            else:
                raise InputError(f"unknown generator t{gen}")
        out = borel_mul(out, m)
    return out


def untwisted_word(n: int, u1: PadicScalar) -> list[Letter]:
    return [(4, -n), (1, 1), (3, 1), (1, -1), (3, -u1), (4, n)]


def twisted_word(n: int, p: int, u1: PadicScalar) -> list[Letter]:
    return [(4, -n), (1, p), (3, p), (1, -p), (3, -(u1 * p)), (4, n)]
