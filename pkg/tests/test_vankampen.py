import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noohi.complexes import GroupData, TwoComplex, nodal_complex, spanning_tree
from noohi.counterexamples import SemidirectFactor, nodal_presentation, wedge_presentation
from noohi.errors import Inconclusive, InputError
from noohi.groups import (Homomorphism, cyclic, direct_product, group_from_name, multiplication_action,
                          semidirect_product, small_group_corpus, symmetric, trivial_group, units_mod)
from noohi.samples import random_paths, triangle_complex
from noohi.vankampen import (Presentation, build_presentation, count_homs, cyclic_presentation,
                             direct_product_with_z, free_presentation, functorial_map, is_consequence,
                             presentation_equiv, presentation_to_json)
from noohi.words import Atom, reduce

TESTS = [group_from_name(n) for n in ("Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "S3", "D4", "A4")]
ABELIAN = [group_from_name(n) for n in ("Z2", "Z3", "Z4", "Z6", "Z2xZ2", "Z2xZ4")]


def _one_vertex(group):
    return TwoComplex(["v"], {}), GroupData({"v": group}, {}, {}, {})


def test_trivial_presentation_on_a_tree():
    cx = TwoComplex(["a", "b", "c"], {"e1": ("b", "a"), "e2": ("c", "b")})
    p = build_presentation(cx, GroupData.constant(cx, trivial_group()))
    assert p.edges == () and all(not r.word for r in p.relations)
    assert count_homs(p, symmetric(3)) == 1


def test_nodal_face_relations_identify_the_edges():
    p = nodal_presentation(trivial_group())
    assert set(p.edges) == {"C.e", "p01", "p10"}
    words = {r.word for r in p.relations_of("R2")}
    assert (Atom.edge("C.e"),) in words
    # some face relation ties p01 and p10 together
    assert any({"p01", "p10"} <= {a.home for a in w} for w in words)
    for n in range(2, 8):
        assert count_homs(p, cyclic(n)) == n


def test_nodal_edge_relations_centralize_the_image():
    g = symmetric(3)
    p = nodal_presentation(g)
    r1 = p.relations_of("R1")
    assert len(r1) == 3 * len(g.generators())
    for r in r1:
        a = r.raw
        assert a[0].home == "C" and not a[1].is_vertex and a[2].value == g.inv(a[0].value)


def test_count_homs_examples():
    for n in (2, 3, 5, 8):
        assert count_homs(free_presentation(1), cyclic(n)) == n
    assert count_homs(free_presentation(2), symmetric(3)) == 36
    assert count_homs(cyclic_presentation(2), cyclic(3)) == 1
    assert count_homs(cyclic_presentation(2), cyclic(4)) == 2


def test_count_homs_respects_budget():
    with pytest.raises(Inconclusive):
        count_homs(free_presentation(4), group_from_name("S4"), budget=1000)


@pytest.mark.parametrize("g", [x for x in small_group_corpus(24) if x.order <= 12], ids=lambda g: g.name)
def test_one_vertex_complex_counts_homs_of_the_group(g):
    cx, data = _one_vertex(g)
    p = build_presentation(cx, data)
    for f in (cyclic(2), cyclic(3), symmetric(3), cyclic(4)):
        want = 0
        gens = g.generators()
        for imgs in _products(f, len(gens)):
            want += _extends(g, f, gens, imgs)
        assert count_homs(p, f) == want


def _products(f, k):
    if k == 0:
        yield ()
        return
    for rest in _products(f, k - 1):
        for x in f.elements:
            yield rest + (x,)


def _extends(g, f, gens, imgs):
    """Whether a generator assignment extends to a homomorphism, by closing the graph of the map."""
    graph = {0: 0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for s, t in zip(gens, imgs):
            y, fy = g.mul(x, s), f.mul(graph[x], t)
            if y in graph:
                if graph[y] != fy:
                    return False
            else:
                graph[y] = fy
                frontier.append(y)
    return all(graph[g.mul(a, b)] == f.mul(graph[a], graph[b]) for a in g.elements for b in g.elements)


def test_presentation_equiv_examples():
    p = nodal_presentation(cyclic(2))
    assert presentation_equiv(p, p, TESTS).verdict == "consistent"
    for gal in (trivial_group(), cyclic(2), symmetric(3)):
        rep = presentation_equiv(nodal_presentation(gal), direct_product_with_z(gal), TESTS)
        assert rep.verdict == "consistent", rep.counts
    rep = presentation_equiv(free_presentation(1), cyclic_presentation(2), TESTS)
    assert rep.verdict == "inconsistent"
    assert rep.counts["Z3"] == (3, 1)


def test_presentation_equiv_reports_inconclusive():
    rep = presentation_equiv(free_presentation(3), free_presentation(3), [group_from_name("S4")], budget=100)
    assert rep.verdict == "inconclusive"


@given(st.integers(0, 2), st.integers(0, 2), st.sampled_from(TESTS[:8]))
@settings(max_examples=30, deadline=None)
def test_count_is_multiplicative_over_free_products(a, b, f):
    p = direct_product_with_z(cyclic(2)) if a == 0 else cyclic_presentation(a + 1)
    q = free_presentation(b) if b else direct_product_with_z(cyclic(3))
    assert count_homs(p.free_product(q), f) == count_homs(p, f) * count_homs(q, f)


def test_free_product_renames_clashes():
    p = direct_product_with_z(cyclic(2))
    pq = p.free_product(p)
    assert set(pq.factors) == {"G", "G'"} and pq.edges == ("t", "t'")


@given(st.randoms(use_true_random=False))
@settings(max_examples=25, deadline=None)
def test_relations_are_consequences_of_themselves(rng):
    cx = rng.choice([triangle_complex(), nodal_complex()])
    g = rng.choice([cyclic(3), symmetric(3)])
    ident = Homomorphism.identity(g)
    data = GroupData({s: g for s in cx.simplices()}, {k: ident for k in cx.boundary_keys()}, {}, {})
    p = build_presentation(cx, data, paths=random_paths(cx, g, rng))
    words = p.words()
    for w in words:
        if w:
            assert is_consequence(w, words, p.factors)
    # and a random product of conjugated relations is too
    w = words[rng.randrange(len(words))]
    h = (Atom.edge(p.edges[0]),) if p.edges else ()
    assert is_consequence(reduce(h + w + tuple(reversed([Atom(a.kind, a.home, -a.value) for a in h])),
                                 p.factors), words, p.factors)


def test_path_twisting_does_not_change_counts():
    rng = random.Random(9)
    cx = triangle_complex()
    g = symmetric(3)
    ident = Homomorphism.identity(g)
    data = GroupData({s: g for s in cx.simplices()}, {k: ident for k in cx.boundary_keys()}, {}, {})
    plain = build_presentation(cx, GroupData.constant(cx, g))
    for _ in range(5):
        twisted = build_presentation(cx, data, paths=random_paths(cx, g, rng))
        assert presentation_equiv(plain, twisted, TESTS[:8]).verdict == "consistent"


def test_bad_group_data_is_rejected():
    cx = triangle_complex()
    g = symmetric(3)
    data = GroupData.constant(cx, g)
    data.alpha[("abc", 0, 0)] = next(x for x in g.elements if g.element_order(x) == 2)
    with pytest.raises(InputError):
        build_presentation(cx, data)


def test_functorial_map_identity():
    p = nodal_presentation(cyclic(3))
    rep = functorial_map(p, p, {"C": Homomorphism.identity(p.factors["C"])})
    assert rep.ok and all(how in ("trivial", "syntactic") for _, how in rep.preserved)
    assert rep.mapping["p01"] == "p01"


def test_functorial_map_geometric_to_arithmetic():
    gal = symmetric(3)
    sub = nodal_presentation(trivial_group())
    full = nodal_presentation(gal)
    rep = functorial_map(sub, full, {"C": Homomorphism.trivial(sub.factors["C"], full.factors["C"])})
    assert rep.ok
    r2_sub = {r.word for r in sub.relations_of("R2")}
    r2_full = {r.word for r in full.relations_of("R2")}
    assert r2_sub == r2_full


def test_functorial_map_rejects_mismatched_graphs():
    with pytest.raises(InputError):
        functorial_map(free_presentation(1), free_presentation(2), {})


def test_functorial_map_reports_unresolved_relations():
    sub = cyclic_presentation(2)
    full = cyclic_presentation(3)
    rep = functorial_map(sub, full, {})
    assert not rep.ok and rep.unresolved == ["t^2"]


def _coinvariant_count(n, u, f):
    """Maps Z/n -> f (abelian) constant on the orbits of multiplication by u."""
    return sum(1 for x in f.elements if f.power(x, n) == 0 and f.power(x, u - 1) == 0)


@pytest.mark.parametrize("kernels,loops", [((3,), 0), ((3, 4), 1), ((5,), 2), ((), 2), ((4, 4), 0)])
def test_wedge_counts_into_abelian_groups(kernels, loops):
    gal = cyclic(2)
    factors = [SemidirectFactor(cyclic(n), [list(range(n)), [(-k) % n for k in range(n)]]) for n in kernels]
    p = wedge_presentation(factors, loops, gal)
    for f in ABELIAN:
        want = sum(1 for y in f.elements if f.power(y, 2) == 0) * f.order ** loops
        for n in kernels:
            want *= _coinvariant_count(n, -1, f)
        assert count_homs(p, f) == want, f.name


def test_semidirect_one_vertex_matches_direct_count():
    k, q = cyclic(9), units_mod(9)
    g = semidirect_product(k, q, multiplication_action(k, q, 9))
    cx, data = _one_vertex(g)
    p = build_presentation(cx, data)
    for f in (cyclic(2), cyclic(3), cyclic(6), symmetric(3)):
        assert count_homs(p, f) == sum(1 for _ in g.homs_to(f))


def test_json_shape():
    p = nodal_presentation(cyclic(2))
    data = presentation_to_json(p)
    assert set(data) == {"generators", "R1", "R2"}
    assert data["generators"]["edges"] == sorted(["C.e", "p01", "p10"])
    assert "extra" in presentation_to_json(direct_product_with_z(cyclic(2)))


def test_direct_product_presentation_counts():
    for g in (cyclic(2), symmetric(3)):
        p = direct_product_with_z(g)
        for f in TESTS[:8]:
            want = sum(1 for h in g.homs_to(f) for t in f.elements
                       if all(f.mul(t, h(x)) == f.mul(h(x), t) for x in g.elements))
            assert count_homs(p, f) == want
    assert direct_product(cyclic(2), cyclic(3)).order == 6
    assert Presentation({}, ("a",)).generator_count() == 1
    assert spanning_tree(nodal_complex()).tree == frozenset()
