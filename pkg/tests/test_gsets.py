import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noohi.errors import InputError
from noohi.groups import (ApproxHom, FreeDiscrete, Homomorphism, QuotientTower, Tower, cyclic, direct_product,
                          group_from_name, small_group_corpus, symmetric)
from noohi.gsets import (ActionSet, GSet, check_dense_iff_connected, check_embedding, check_kernel_exactness,
                         check_normal_image, continuity_witnesses, product_commutation, transitive_catalog)
from noohi.words import Atom

SMALL = [g for g in small_group_corpus(24) if g.order <= 12]


def _transposition(g):
    return next(x for x in g.elements if g.element_order(x) == 2)


def test_orbit_examples():
    z4 = cyclic(4)
    assert GSet.trivial(z4, 2).orbits() == [[0], [1]]
    assert GSet.coset_action(z4, {0}).orbits() == [[0, 1, 2, 3]]


def test_action_law_is_validated():
    z2 = cyclic(2)
    with pytest.raises(InputError):
        GSet(z2, [[1, 0], [1, 0]])
    with pytest.raises(InputError):
        GSet.from_generators(z2, 2, [[0, 0]])


def test_pullback_examples():
    z4 = cyclic(4)
    reg = GSet.coset_action(z4, {0})
    ident = Homomorphism.identity(z4)
    assert np.array_equal(reg.pullback(ident).perms, reg.perms)
    z8 = cyclic(8)
    onto = Homomorphism(z8, z4, tuple(x % 4 for x in range(8)))
    assert reg.pullback(onto).is_transitive()
    doubling = Homomorphism(z4, z4, tuple(2 * x % 4 for x in range(4)))
    assert len(reg.pullback(doubling).orbits()) == 2
    with pytest.raises(InputError):
        reg.pullback(Homomorphism.identity(z8))


def test_completely_decomposed_examples():
    s3 = symmetric(3)
    assert GSet.trivial(s3, 3).is_completely_decomposed()
    assert not GSet.coset_action(s3, {0, _transposition(s3)}).is_completely_decomposed()


@pytest.mark.parametrize("g", SMALL, ids=lambda g: g.name)
def test_coset_action_index_and_stabilizers(g):
    for u in g.subgroup_classes():
        s = GSet.coset_action(g, u)
        assert s.size == g.order // len(u)
        assert s.is_transitive() and s.stabilizer(0) == u
        conj = {g.conjugate_subgroup(x, u) for x in g.elements}
        assert {s.stabilizer(p) for p in range(s.size)} == conj


@pytest.mark.parametrize("g", SMALL, ids=lambda g: g.name)
def test_catalog_counts_conjugacy_classes(g):
    cat, complete = transitive_catalog(g)
    assert complete and len(cat) == len(g.subgroup_classes())
    for a in cat:
        for b in cat:
            assert a.isomorphic_transitive(b) == (a is b)


def test_catalog_bound_marks_incomplete():
    _, complete = transitive_catalog(symmetric(3), bound=3)
    assert not complete


@given(st.sampled_from(SMALL), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_orbits_partition_and_are_invariant(g, rng):
    cat, _ = transitive_catalog(g)
    s = rng.choice(cat).disjoint_union(rng.choice(cat))
    perm = list(range(s.size))
    rng.shuffle(perm)
    s = s.relabel(perm)
    blocks = s.orbits()
    assert sorted(p for b in blocks for p in b) == list(range(s.size))
    for b in blocks:
        assert all(s.act(x, p) in b for x in g.elements for p in b)
    assert len(blocks) == 2


@given(st.sampled_from(SMALL), st.randoms(use_true_random=False))
@settings(max_examples=30, deadline=None)
def test_pullback_along_surjection_coarsens(g, rng):
    # pull back along the projection G x Z2 -> G
    big = direct_product(g, cyclic(2))
    proj = Homomorphism(big, g, tuple(x // 2 for x in big.elements))
    assert proj.is_valid() and proj.is_surjective()
    s = rng.choice(transitive_catalog(g)[0])
    assert sorted(map(sorted, s.pullback(proj).orbits())) == sorted(map(sorted, s.orbits()))


def test_relabel_is_equivariant():
    s = GSet.coset_action(symmetric(3), {0})
    perm = [3, 1, 5, 0, 2, 4]
    t = s.relabel(perm)
    assert s.is_equivariant_map(t, perm)
    assert not s.is_equivariant_map(t, list(range(6)))


def test_continuity_witnesses_factor_through_levels():
    tower = QuotientTower.cyclic_tower([2, 4, 8])
    top = tower.levels[2]
    s = GSet.coset_action(top, {0, 4}).disjoint_union(GSet.coset_action(top, {0, 2, 4, 6}))
    wit = continuity_witnesses(s, tower, 2)
    assert wit == [1] * 4 + [0] * 2
    for p, n in enumerate(wit):
        assert tower.projection(2, n).kernel() <= s.stabilizer(p)


def test_embedding_examples():
    z2, z4 = cyclic(2), cyclic(4)
    inc = Homomorphism(z2, z4, (0, 2))
    rep = check_embedding(inc)
    assert rep.left and rep.right
    triv = Homomorphism(z2, group_from_name("1"), (0, 0))
    rep = check_embedding(triv)
    assert not rep.left and not rep.right and rep.witness is not None
    rep = check_embedding(Homomorphism.identity(symmetric(3)))
    assert rep.left and rep.right


def test_dense_examples():
    tower = Tower(QuotientTower.cyclic_tower([2, 4]))
    rep = check_dense_iff_connected(ApproxHom(FreeDiscrete(1), tower, [(1,), (1,)]))
    assert rep.left and rep.right
    z4 = Tower(QuotientTower.cyclic_tower([4]))
    rep = check_dense_iff_connected(ApproxHom(FreeDiscrete(1), z4, [(2,)]))
    assert not rep.left and not rep.right
    assert rep.witness[1].size == 4
    rep = check_dense_iff_connected(Homomorphism.identity(symmetric(3)))
    assert rep.left and rep.right and rep.notes["fully_faithful"]


def test_normal_image_examples():
    s3 = symmetric(3)
    t = _transposition(s3)
    centre = Homomorphism(cyclic(2), cyclic(4), (0, 2))
    rep = check_normal_image(centre)
    assert rep.left and rep.right
    rep = check_normal_image(Homomorphism(cyclic(2), s3, (0, t)))
    assert not rep.left and not rep.right
    assert rep.witness.stabilizer(0) in {frozenset({0, x}) for x in s3.elements if s3.element_order(x) == 2}
    onto = Homomorphism(cyclic(4), cyclic(2), (0, 1, 0, 1))
    rep = check_normal_image(onto)
    assert rep.left and rep.right


def test_kernel_exactness_examples():
    z2, z4 = cyclic(2), cyclic(4)
    inc = Homomorphism(z2, z4, (0, 2))
    proj = Homomorphism(z4, z2, (0, 1, 0, 1))
    rep = check_kernel_exactness(inc, proj)
    assert rep.item == "kernel_exactness" and rep.left and rep.right
    triv = Homomorphism(z2, z4, (0, 0))
    rep = check_kernel_exactness(triv, proj)
    assert not rep.left and not rep.right and rep.witness is not None
    s3 = symmetric(3)
    rep = check_kernel_exactness(Homomorphism(z2, s3, (0, 0)), Homomorphism.identity(s3))
    assert rep.left and rep.right


def test_composite_failure_is_reported():
    z2, z4 = cyclic(2), cyclic(4)
    rep = check_kernel_exactness(Homomorphism(z4, z4, (0, 1, 2, 3)), Homomorphism(z4, z2, (0, 1, 0, 1)))
    assert rep.item == "composite_trivial" and not rep.left and not rep.right


@given(st.sampled_from(SMALL), st.sampled_from(SMALL), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_dictionary_sides_agree(a, b, rng):
    homs = list(a.homs_to(b))
    h = rng.choice(homs)
    for rep in (check_embedding(h), check_dense_iff_connected(h), check_normal_image(h)):
        assert rep.complete and rep.agree, rep.item


def _free_product_ball():
    # letters x, y act on 3 points as non-commuting permutations
    return ActionSet(3, edges={"x": [1, 0, 2], "y": [0, 2, 1]})


def test_product_commutation_examples():
    z2, z3 = cyclic(2), cyclic(3)
    reg3 = GSet.coset_action(z3, {0}).perms
    s = ActionSet(3, {"A": z2, "B": z3}, vertex={"A": np.tile(np.arange(3), (2, 1)), "B": reg3})
    a = [Atom.vertex("A", x) for x in z2.generators()]
    b = [Atom.vertex("B", x) for x in z3.generators()]
    assert product_commutation(s, a, b)
    assert not product_commutation(_free_product_ball(), [Atom.edge("x")], [Atom.edge("y")])
    prod = direct_product(z2, z3)
    reg = GSet.coset_action(prod, {0})
    emb_a = Homomorphism(z2, prod, tuple(x * 3 for x in z2.elements))
    emb_b = Homomorphism(z3, prod, tuple(y for y in z3.elements))
    pulled = ActionSet(6, {"A": z2, "B": z3}, vertex={"A": reg.pullback(emb_a).perms, "B": reg.pullback(emb_b).perms})
    assert product_commutation(pulled, a, b)


def test_action_set_truncation():
    s = ActionSet(3, edges={"e": [1, 2, -1]})
    blocks, cut = s.orbits()
    assert blocks == [[0, 1, 2]] and cut == [True]
    assert not s.is_transitive()
    assert s.act_word((Atom.edge("e", 2),), 0) == 2
    assert s.act_word((Atom.edge("e", 3),), 0) == -1
    assert s.act_word((Atom.edge("e", -1),), 0) == -1
    with pytest.raises(InputError):
        ActionSet(2, edges={"e": [1, 1]})


def test_action_word_order_is_right_to_left():
    s = _free_product_ball()
    w = (Atom.edge("x"), Atom.edge("y"))
    assert s.act_word(w, 1) == s.act_atom(Atom.edge("x"), s.act_atom(Atom.edge("y"), 1))
    assert s.act_word(w, 1) == 2


def test_random_coset_stabilizers_are_conjugate():
    rng = random.Random(3)
    g = group_from_name("A4")
    u = rng.choice(g.subgroup_classes())
    s = GSet.coset_action(g, u)
    for p in range(s.size):
        assert any(g.conjugate_subgroup(x, u) == s.stabilizer(p) for x in g.elements)
