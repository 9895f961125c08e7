import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noohi.errors import InputError
from noohi.groups import cyclic, symmetric
from noohi.words import (Atom, concat, conjugate_in_free_product, cyclic_core, format_word, from_json,
                         invert, is_reduced, multiply, plain_form, plain_length, reduce, to_json)

GROUPS = {"G": symmetric(3), "H": cyclic(4)}

letters = st.one_of(
    st.builds(Atom.vertex, st.just("G"), st.integers(0, 5)),
    st.builds(Atom.vertex, st.just("H"), st.integers(0, 3)),
    st.builds(Atom.edge, st.sampled_from(["e", "f"]), st.integers(-3, 3)),
)
words = st.lists(letters, max_size=12).map(tuple)


def test_plain_form_of_the_worked_word():
    w = (Atom.vertex("v", 1), Atom.edge("e1", 2), Atom.edge("e2", -3), Atom.vertex("w", 2), Atom.edge("e3", 0))
    p = plain_form(w)
    assert p == (Atom.vertex("v", 1), Atom.edge("e1"), Atom.edge("e1"), Atom.edge("e2", -1),
                 Atom.edge("e2", -1), Atom.edge("e2", -1), Atom.vertex("w", 2))
    assert plain_length(w) == 7


def test_plain_form_small_cases():
    assert plain_form(()) == () and plain_length(()) == 0
    assert plain_form((Atom.edge("e", 3),)) == (Atom.edge("e"),) * 3
    assert plain_length((Atom.edge("e", 3),)) == 3


def test_plain_form_keeps_vertex_identity_letters():
    w = (Atom.vertex("v", 0), Atom.edge("e", 0))
    assert plain_form(w) == (Atom.vertex("v", 0),)


def test_reduce_examples():
    g = GROUPS["G"]
    a = 1
    assert reduce((Atom.vertex("G", a), Atom.vertex("G", g.inv(a))), GROUPS) == ()
    assert reduce((Atom.edge("e"), Atom.edge("e", -1)), GROUPS) == ()
    assert reduce((Atom.vertex("H", 1), Atom.vertex("H", 2)), GROUPS) == (Atom.vertex("H", 3),)


def test_concat_and_invert_examples():
    g = (Atom.vertex("G", 1),)
    assert concat(g, ()) == g
    inv = invert((Atom.vertex("G", 1), Atom.edge("e")), GROUPS)
    assert inv == (Atom.edge("e", -1), Atom.vertex("G", GROUPS["G"].inv(1)))
    assert reduce(concat((Atom.edge("e"),), (Atom.edge("e", -1),)), GROUPS) == ()


def test_missing_group_is_an_input_error():
    with pytest.raises(InputError):
        reduce((Atom.vertex("K", 1),), GROUPS)
    with pytest.raises(InputError):
        reduce((Atom.vertex("H", 7),), GROUPS)


def test_json_round_trip_uses_labels():
    w = (Atom.vertex("G", 2), Atom.edge("e", -3))
    data = to_json(w, GROUPS)
    assert data[0]["elem"] == GROUPS["G"].labels[2]
    assert data[1] == {"kind": "edge", "edge": "e", "exp": -3}
    assert from_json(data, GROUPS) == w
    with pytest.raises(InputError):
        from_json([{"kind": "bogus"}], GROUPS)


def test_format_word():
    assert format_word(()) == "1"
    assert "e^-2" in format_word((Atom.edge("e", -2),))


@given(words)
def test_reduce_idempotent_and_reduced(w):
    r = reduce(w, GROUPS)
    assert reduce(r, GROUPS) == r
    assert is_reduced(r)


@given(words)
def test_plain_form_preserves_reduction(w):
    assert reduce(plain_form(w), GROUPS) == reduce(w, GROUPS)
    assert plain_length(plain_form(w)) == plain_length(w)


@given(words, words)
def test_reduce_is_a_congruence(w, r):
    assert reduce(w + r + invert(r, GROUPS), GROUPS) == reduce(w, GROUPS)
    assert multiply(GROUPS, reduce(w, GROUPS), reduce(r, GROUPS)) == reduce(w + r, GROUPS)


@given(words)
def test_reduced_length_bounded_by_plain_length(w):
    assert len(reduce(w, GROUPS)) <= plain_length(w)


@given(words, words)
@settings(max_examples=60)
def test_conjugates_are_recognised(w, h):
    conj = reduce(h + w + invert(h, GROUPS), GROUPS)
    t = conjugate_in_free_product(conj, w, GROUPS)
    assert t is not None
    assert reduce(t + w + invert(t, GROUPS), GROUPS) == conj


@given(words)
def test_cyclic_core_factorisation(w):
    h, c = cyclic_core(w, GROUPS)
    assert reduce(h + c + invert(h, GROUPS), GROUPS) == reduce(w, GROUPS)


def test_non_conjugate_edges():
    assert conjugate_in_free_product((Atom.edge("e"),), (Atom.edge("f"),), GROUPS) is None
    assert conjugate_in_free_product((Atom.edge("e"),), (Atom.edge("e", 2),), GROUPS) is None
