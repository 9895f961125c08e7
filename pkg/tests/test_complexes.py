import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noohi.complexes import (DescentDatum, GroupData, LcsSystem, TwoComplex, cech_complex, check_descent,
                             decompose_system, descent_equal, discretize_descent, graph_pi1_rank,
                             nodal_complex, ordered_cocycle_holds, ordered_reduction, q_functor, rebuild,
                             reconstruct, spanning_tree, validate_group_data, validate_lcs)
from noohi.errors import InputError
from noohi.groups import Homomorphism, cyclic, symmetric, trivial_group
from noohi.gsets import GSet
from noohi.samples import cech_descent, random_paths, strict_system, triangle_complex, twisted_system
from noohi.words import Atom


def _constant_system(cx, gset):
    data = GroupData.constant(cx, gset.group)
    maps = {k: np.arange(gset.size) for k in cx.boundary_keys()}
    maps.update({(f, "v", k): np.arange(gset.size) for f, k in cx.face_keys()})
    return LcsSystem(cx, data, {s: gset for s in cx.simplices()}, maps)


def _shift(n, k=1):
    return np.array([(x + k) % n for x in range(n)])


def test_complex_checks_simplicial_identities():
    with pytest.raises(InputError):
        TwoComplex(["a", "b"], {"e": ("a", "b"), "f": ("b", "a")}, {"t": ("e", "e", "f")})
    with pytest.raises(InputError):
        TwoComplex(["a"], {"a": ("a", "a")})
    cx = triangle_complex()
    assert cx.face_vertices["abc"] == ("a", "b", "c")
    assert TwoComplex.from_json(cx.to_json()).E2 == cx.E2


def test_nodal_complex_shape():
    cx = nodal_complex()
    assert cx.E0 == ("C",) and len(cx.E1) == 3 and len(cx.E2) == 7
    assert all(cx.face_vertices[f] == ("C", "C", "C") for f in cx.E2)


def test_spanning_tree_examples():
    loops = TwoComplex(["v"], {"x": ("v", "v"), "y": ("v", "v")})
    t = spanning_tree(loops)
    assert t.tree == frozenset() and graph_pi1_rank(t) == 2
    path = TwoComplex(["a", "b", "c"], {"e1": ("b", "a"), "e2": ("c", "b")})
    t = spanning_tree(path)
    assert t.tree == {"e1", "e2"} and graph_pi1_rank(t) == 0
    t = spanning_tree(nodal_complex())
    assert t.tree == frozenset() and graph_pi1_rank(t) == 3
    with pytest.raises(InputError):
        spanning_tree(TwoComplex(["a", "b"], {}))


def test_spanning_tree_is_deterministic_and_paths_walk_the_tree():
    t = spanning_tree(triangle_complex())
    assert t.tree == {"ab", "ac"} and t.non_tree_edges() == ["bc"]
    assert t.path("b", "c") == [("ab", -1), ("ac", 1)]
    assert t.distance("a", "a") == 0 and t.distance("b", "c") == 2


def test_group_data_examples():
    cx = triangle_complex()
    assert validate_group_data(cx, GroupData.constant(cx, trivial_group())) == []
    nodal = nodal_complex()
    assert validate_group_data(nodal, GroupData.constant(nodal, symmetric(3))) == []
    s3 = symmetric(3)
    data = GroupData.constant(cx, s3)
    t = next(x for x in s3.elements if s3.element_order(x) == 2)
    data.alpha[("abc", 0, 0)] = t
    assert validate_group_data(cx, data) == [("abc", 0, 0)]
    del data.alpha[("abc", 0, 0)]
    with pytest.raises(InputError):
        validate_group_data(cx, data)


def test_central_alpha_is_harmless():
    cx = triangle_complex()
    z4 = cyclic(4)
    data = GroupData.constant(cx, z4)
    data.alpha[("abc", 1, 1)] = 2
    assert validate_group_data(cx, data) == []


@given(st.sampled_from(["triangle", "nodal", "cech"]), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_path_twisted_data_is_valid(which, rng):
    cx = {"triangle": triangle_complex(), "nodal": nodal_complex(), "cech": cech_complex(["0", "1"])}[which]
    g = rng.choice([symmetric(3), cyclic(4)])
    ident = Homomorphism.identity(g)
    data = GroupData.from_paths(cx, {s: g for s in cx.simplices()},
                                {k: ident for k in cx.boundary_keys()}, random_paths(cx, g, rng))
    assert validate_group_data(cx, data) == []


def test_from_paths_requires_every_path():
    cx = triangle_complex()
    g = cyclic(3)
    ident = Homomorphism.identity(g)
    with pytest.raises(InputError):
        GroupData.from_paths(cx, {s: g for s in cx.simplices()}, {k: ident for k in cx.boundary_keys()}, {})


def test_q_of_trivial_constant_system_is_trivial():
    cx = triangle_complex()
    m = _constant_system(cx, GSet.trivial(trivial_group(), 3))
    q = q_functor(m)
    assert q.action.size == 3
    assert all(q.action.act_atom(Atom.edge(e), x) == x for e in q.action.edges for x in range(3))


@pytest.mark.parametrize("n", [3, 5])
def test_q_of_nodal_shift_is_translation(n):
    cx = nodal_complex()
    zn = cyclic(n)
    reg = GSet.coset_action(zn, {0})
    phi = {"C.e": np.arange(n), "p01": _shift(n), "p10": _shift(n, -1)}
    m = discretize_descent(DescentDatum(cx, GroupData.constant(cx, zn), {"C": reg}, phi))
    q = q_functor(m)
    assert q.action.edges["p01"].tolist() == _shift(n).tolist()
    assert q.action.edges["C.e"].tolist() == list(range(n))
    assert q.action.is_transitive()


def test_q_rejects_non_bijective_maps():
    cx = triangle_complex()
    m = _constant_system(cx, GSet.trivial(trivial_group(), 2))
    m.maps[("ab", 0)] = np.array([0, 0])
    with pytest.raises(InputError):
        q_functor(m)


def test_decompose_examples():
    cx = nodal_complex()
    one = trivial_group()
    two = _constant_system(cx, GSet.trivial(one, 2))
    assert len(decompose_system(two)) == 2
    connected = _constant_system(cx, GSet.coset_action(cyclic(3), {0}))
    assert len(decompose_system(connected)) == 1


@given(st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_components_biject_with_q_orbits(rng):
    cx = rng.choice([triangle_complex(), nodal_complex()])
    m = (strict_system if rng.random() < 0.5 else twisted_system)(cx, rng.choice([cyclic(2), symmetric(3)]), rng)
    assert validate_lcs(m) == []
    parts = decompose_system(m)
    assert len(parts) == len(q_functor(m).action.orbits()[0])
    assert sum(p.sets[cx.E0[0]].size for p in parts) == m.sets[cx.E0[0]].size
    for p in parts:
        assert validate_lcs(p) == [] and len(decompose_system(p)) == 1


def test_q_forgets_to_the_vertex_fibre():
    rng = random.Random(5)
    m = strict_system(triangle_complex(), symmetric(3), rng)
    q = q_functor(m)
    # each fibre maps bijectively onto the carrier
    for v in m.complex.E0:
        assert sorted(q.component_of[(v, x)] for x in range(m.sets[v].size)) == list(range(q.action.size))


def test_discretize_identity_gives_constant_system():
    cx = nodal_complex()
    s = GSet.coset_action(symmetric(3), {0})
    d = DescentDatum(cx, GroupData.constant(cx, s.group), {"C": s}, {e: np.arange(6) for e in cx.E1})
    m = discretize_descent(d)
    assert validate_lcs(m) == []
    assert all(np.array_equal(f, np.arange(6)) for f in m.maps.values())


def test_cocycle_failure_is_reported():
    cx = nodal_complex()
    z3 = cyclic(3)
    reg = GSet.coset_action(z3, {0})
    phi = {"C.e": np.arange(3), "p01": _shift(3), "p10": _shift(3)}
    d = DescentDatum(cx, GroupData.constant(cx, z3), {"C": reg}, phi)
    problems = check_descent(d)
    assert problems and all("cocycle" in p for p in problems)
    with pytest.raises(InputError):
        discretize_descent(d)


def test_descent_round_trip_on_random_cech_data():
    rng = random.Random(11)
    for _ in range(10):
        d = cech_descent(["0", "1", "2"], symmetric(3), rng)
        assert descent_equal(rebuild(discretize_descent(d)), d)


def test_ordered_reduction_examples():
    rng = random.Random(2)
    single = cech_descent(["0"], cyclic(2), rng)
    o = ordered_reduction(single)
    assert o.phi == {} and descent_equal(reconstruct(o), single)
    pair = cech_descent(["0", "1"], symmetric(3), rng)
    o = ordered_reduction(pair)
    full = reconstruct(o)
    assert np.array_equal(full.phi["1,0"], np.argsort(o.phi[("0", "1")]))
    assert check_descent(full) == []
    triple = cech_descent(["0", "1", "2"], cyclic(4), rng)
    o = ordered_reduction(triple)
    assert ordered_cocycle_holds(o) and check_descent(reconstruct(o)) == []
    with pytest.raises(InputError):
        ordered_reduction(pair, injective={"1": False})


def test_broken_ordered_part_fails_the_full_cocycle():
    rng = random.Random(4)
    o = next(o for o in (ordered_reduction(cech_descent(["0", "1", "2"], trivial_group(), rng, max_points=3))
                         for _ in range(50)) if o.sets["0"].size > 1)
    o.phi[("0", "2")] = np.roll(o.phi[("0", "2")], 1)
    assert not ordered_cocycle_holds(o)
    assert check_descent(reconstruct(o))
