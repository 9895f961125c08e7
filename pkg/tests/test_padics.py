from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noohi.errors import InputError, PrecisionError
from noohi.padics import (BorelElement, PadicScalar, TruncUnit, borel_inv, borel_mul, in_integral_borel,
                          psi_word, twisted_word, unit_generator, untwisted_word, valuation)

ELL = 3
PREC = 12

nonzero = st.fractions(max_denominator=500).filter(lambda x: x != 0 and abs(x.numerator) < 10 ** 6)


def _scal(x, prec=PREC):
    return PadicScalar.from_fraction(x, ELL, prec)


@pytest.mark.parametrize("ell,g", [(3, 2), (5, 2), (7, 3)])
def test_unit_generator_examples(ell, g):
    assert unit_generator(ell).residue == g


def test_unit_generator_rejects_even_and_composite():
    with pytest.raises(InputError):
        unit_generator(2)
    with pytest.raises(InputError):
        unit_generator(9)


@pytest.mark.parametrize("ell", [3, 5, 7, 11])
def test_unit_generator_generates_every_level(ell):
    u = unit_generator(ell, 6)
    for k in range(1, 7 if ell < 11 else 5):
        mod = ell ** k
        seen, x = set(), 1
        while True:
            x = x * u.residue % mod
            seen.add(x)
            if x == 1:
                break
        assert len(seen) == mod // ell * (ell - 1)
        assert u.generates(k)


def test_trunc_unit_must_be_prime_to_ell():
    with pytest.raises(InputError):
        TruncUnit(3, 4, 6)


def test_scalar_json_shape():
    x = _scal(Fraction(50, 3), 8)
    assert x.to_json() == {"l": 3, "val": -1, "unit": 50, "prec": 8}
    assert PadicScalar.from_json(x.to_json()) == x
    with pytest.raises(InputError):
        PadicScalar.from_json({"l": 3})


def test_zero_is_canonical():
    z = PadicScalar.zero(ELL, 5)
    assert z.is_zero and z.valuation() == float("inf")
    assert (_scal(7) - _scal(7)).is_zero
    with pytest.raises(InputError):
        PadicScalar(ELL, None, 4, 5)


def test_precision_floor_raises():
    with pytest.raises(PrecisionError):
        PadicScalar(ELL, 0, 1, 1, floor=3)
    a = PadicScalar.from_int(1, ELL, 3, floor=2)
    b = PadicScalar.from_int(1 + 9, ELL, 3, floor=2)
    with pytest.raises(PrecisionError):
        a - b


@given(nonzero, nonzero)
@settings(max_examples=200)
def test_valuation_arithmetic(x, y):
    px, py = _scal(x), _scal(y)
    assert (px * py).val == px.val + py.val
    s = x + y
    if s != 0 and px.val != py.val:
        assert (px + py).val == min(px.val, py.val)
    if s != 0:
        assert valuation(s.numerator, ELL) - valuation(s.denominator, ELL) >= min(px.val, py.val)


@given(nonzero, nonzero)
@settings(max_examples=200)
def test_ring_ops_match_fractions(x, y):
    for got, want in ((_scal(x) * _scal(y), x * y), (_scal(x) + _scal(y), x + y), (_scal(x) / _scal(y), x / y)):
        assert got.equals(_scal(want)) if want != 0 else got.is_zero


def test_conjugation_examples():
    ell = Fraction(ELL)
    diag = BorelElement.of(ell, 0, 1, ELL, PREC)
    unip = BorelElement.of(1, 1, 1, ELL, PREC)
    got = diag * unip * borel_inv(diag)
    assert got.equals(BorelElement.of(1, ELL, 1, ELL, PREC))
    u, x = Fraction(2), Fraction(5, 7)
    du = BorelElement.of(u, 0, 1, ELL, PREC)
    got = du * BorelElement.of(1, x, 1, ELL, PREC) * borel_inv(du)
    assert got.equals(BorelElement.of(1, u * x, 1, ELL, PREC))


def test_integral_borel_examples():
    assert in_integral_borel(BorelElement.identity(ELL))
    assert not in_integral_borel(BorelElement.of(1, Fraction(1, 3), 1, ELL))
    assert not in_integral_borel(BorelElement.of(1, Fraction(50, 3), 1, ELL))
    assert not in_integral_borel(BorelElement.of(3, 0, 1, ELL))
    unknown = BorelElement(_scal(1), PadicScalar.zero(ELL, -2), _scal(1))
    with pytest.raises(PrecisionError):
        in_integral_borel(unknown)


def test_singular_diagonal_rejected():
    with pytest.raises(InputError):
        BorelElement.of(0, 1, 1, ELL)


borel = st.tuples(nonzero, st.fractions(max_denominator=200), nonzero).map(
    lambda t: BorelElement.of(*t, ELL, PREC))


@given(borel, borel, borel)
@settings(max_examples=100)
def test_borel_group_laws(x, y, z):
    assert borel_mul(borel_mul(x, y), z).equals(borel_mul(x, borel_mul(y, z)))
    assert borel_mul(x, borel_inv(x)).equals(BorelElement.identity(ELL, PREC))


def test_untwisted_word_is_identity():
    u1 = unit_generator(ELL, PREC).scalar()
    for n in range(4):
        assert psi_word(untwisted_word(n, u1), ELL, PREC).equals(BorelElement.identity(ELL, PREC))


def test_twisted_word_corner():
    u1 = unit_generator(ELL, PREC).scalar()
    got = psi_word(twisted_word(2, 5, u1), ELL, PREC)
    assert got.a.equals(_scal(1)) and got.d.equals(_scal(1))
    assert got.b.equals(_scal(Fraction(50, 3)))
    assert got.b.val == -1 and not in_integral_borel(got)


@pytest.mark.parametrize("n,p", [(1, 2), (3, 7), (4, 4)])
def test_twisted_corner_formula(n, p):
    u = 2
    got = psi_word(twisted_word(n, p, unit_generator(ELL, PREC).scalar()), ELL, PREC)
    assert got.b.equals(_scal(Fraction(p * (u ** p - u), ELL ** n)))


letters = st.lists(st.tuples(st.integers(1, 5), st.integers(-3, 3)), max_size=6)


@given(letters, letters)
@settings(max_examples=100)
def test_psi_is_multiplicative(u, v):
    lhs = psi_word(u + v, ELL, PREC)
    rhs = borel_mul(psi_word(u, ELL, PREC), psi_word(v, ELL, PREC))
    assert lhs.equals(rhs)


def test_psi_rejects_bad_letters():
    with pytest.raises(InputError):
        psi_word([(6, 1)], ELL)
    with pytest.raises(InputError):
        psi_word([(1, Fraction(1, 2))], ELL)
