import random

import pytest
from hypothesis import given, settings, strategies as st

from setlogic.corpus import random_set_formula
from setlogic.formula import SET, TOP, Eq, FormulaError, In, Not, parse_formula
from setlogic.kripke_prop import ModelError
from setlogic.kripke_set import (
    ClassicalSetModel, SetKripkeModel, as_kripke, axiom_instance, cardinality_sentence,
    check_axiom, check_coherence, disjoint_union, eval_classical, force_set, leaf_model, miniscope,
    ordinal_model, random_set_model, validate_classical, vrank_model,
)
from oracles import naive_force
from strategies import set_formulas


def S(text):
    return parse_formula(text, SET)


def test_vrank_sizes_and_edges():
    assert [vrank_model(n).size() for n in range(5)] == [0, 1, 2, 4, 16]
    assert vrank_model(1).membership == frozenset()
    assert len(vrank_model(2).membership) == 1
    v3 = vrank_model(3)
    # 0 = {}, 1 = {0}, 2 = {1}, 3 = {0, 1}
    assert v3.membership == {("0", "1"), ("0", "3"), ("1", "2"), ("1", "3")}


def test_vrank_matches_hereditarily_finite_sets():
    # independent construction: V_{n+1} is the power set of V_n, as nested frozensets
    from itertools import combinations
    stage = [frozenset()]
    stage = [frozenset(c) for k in range(len(stage) + 1) for c in combinations(stage, k)]  # V_2
    stage = [frozenset(c) for k in range(len(stage) + 1) for c in combinations(stage, k)]  # V_3
    v3 = vrank_model(3)
    edges = sum(len(x) for x in stage)
    assert v3.size() == len(stage) and len(v3.membership) == edges


def test_validate_classical():
    assert validate_classical(vrank_model(3)) == []
    twins = ClassicalSetModel(("a", "b", "c"), frozenset({("a", "b"), ("a", "c")}))
    assert any("extensionality" in msg for msg in validate_classical(twins))
    loop = ClassicalSetModel(("a",), frozenset({("a", "a")}))
    assert any("well-founded" in msg for msg in validate_classical(loop))


def test_eval_classical_examples():
    assert eval_classical(vrank_model(2), S("exists x. forall y. ~y in x"))
    assert not eval_classical(vrank_model(1), cardinality_sentence(2))
    pair = S("forall x. forall y. exists p. (x in p & y in p)")
    assert not eval_classical(vrank_model(3), pair)
    assert eval_classical(vrank_model(3), S("exists p. forall x. (x in p -> exists y. y in x | x = x)"))


def test_cardinality_sentences():
    assert cardinality_sentence(2) == S("exists x1. exists x2. ~x1 = x2")
    assert eval_classical(vrank_model(2), cardinality_sentence(2, exact=True))
    assert not eval_classical(vrank_model(3), cardinality_sentence(2, exact=True))
    assert eval_classical(vrank_model(1), cardinality_sentence(1, exact=True))
    for n in range(1, 6):
        for k in range(1, 6):
            assert eval_classical(ordinal_model(n), cardinality_sentence(k, exact=True)) == (n == k)


def test_leaf_model_specs():
    assert leaf_model({"vrank": 2}) == vrank_model(2)
    assert leaf_model({"ordinal": 3}) == ordinal_model(3)
    with pytest.raises(ValueError):
        leaf_model({"bogus": 1})


def merging_model():
    # a and b are distinct at r and merge into c at t
    return SetKripkeModel(["r", "t"], [("r", "t")], {"r": ["a", "b"], "t": ["c"]},
                          {("r", "t"): {"a": "c", "b": "c"}}, {})


def test_forcing_examples():
    m = merging_model()
    assert force_set(m, "r", Eq("x", "x"), {"x": "a"})
    assert not force_set(m, "r", Not(Eq("x", "y")), {"x": "a", "y": "b"})
    assert not force_set(m, "r", Eq("x", "y"), {"x": "a", "y": "b"})


def test_forcing_input_errors():
    m = merging_model()
    with pytest.raises(FormulaError):
        force_set(m, "r", Eq("x", "y"), {"x": "a"})
    with pytest.raises(ModelError):
        force_set(m, "nowhere", TOP)
    with pytest.raises(ModelError):
        force_set(m, "r", Eq("x", "x"), {"x": "c"})


@settings(max_examples=150, deadline=None)
@given(set_formulas(free=()))
def test_one_node_forcing_is_classical(f):
    m = vrank_model(2) if len(str(f)) % 2 else ordinal_model(3)
    assert force_set(as_kripke(m), "v", f) == eval_classical(m, f)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), set_formulas(free=("x",)))
def test_forcing_matches_clause_oracle(seed, f):
    m = random_set_model(random.Random(seed), max_nodes=4, max_domain=2)
    for v in m.nodes:
        for a in m.domains[v]:
            expected = naive_force(m, v, f, {"x": a})
            assert force_set(m, v, f, {"x": a}) == expected
            assert force_set(m, v, f, {"x": a}, shortcut=False) == expected


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), set_formulas(free=()))
def test_miniscope_preserves_forcing(seed, f):
    m = random_set_model(random.Random(seed), max_nodes=3, max_domain=2)
    for v in m.nodes:
        assert naive_force(m, v, miniscope(f)) == naive_force(m, v, f)


def test_random_models_are_coherent():
    rng = random.Random(0)
    for _ in range(200):
        assert check_coherence(random_set_model(rng)) == []


def test_coherence_violations_detected():
    good = SetKripkeModel(["r", "t"], [("r", "t")], {"r": ["a", "b"], "t": ["a", "b"]},
                          {("r", "t"): {"a": "a", "b": "b"}}, {"r": [("a", "b")], "t": [("a", "b")]})
    assert check_coherence(good) == []
    dropping = SetKripkeModel(["r", "t"], [("r", "t")], {"r": ["a", "b"], "t": ["a", "b"]},
                              {("r", "t"): {"a": "a", "b": "b"}}, {"r": [("a", "b")]})
    assert any("lost" in msg for msg in check_coherence(dropping))
    chain = SetKripkeModel(
        ["u", "v", "w"], [("u", "v"), ("v", "w")], {"u": ["a"], "v": ["b", "b2"], "w": ["c", "c2"]},
        {("u", "v"): {"a": "b"}, ("v", "w"): {"b": "c", "b2": "c2"}, ("u", "w"): {"a": "c2"}}, {})
    assert any("differs" in msg for msg in check_coherence(chain))


def test_json_roundtrip():
    m = random_set_model(random.Random(3))
    assert SetKripkeModel.from_json(m.to_json()) == m


def test_disjoint_union():
    a, b = as_kripke(vrank_model(2), "v"), as_kripke(vrank_model(3), "v")
    u = disjoint_union([a, b])
    assert u.nodes == ("m0.v", "m1.v") and u.roots() == ["m0.v", "m1.v"]
    single = disjoint_union([a])
    assert single.domains["m0.v"] == a.domains["v"]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), set_formulas(free=()))
def test_disjoint_union_preserves_forcing(seed, f):
    rng = random.Random(seed)
    ms = [random_set_model(rng, max_nodes=3, max_domain=2) for _ in range(2)]
    u = disjoint_union(ms)
    for i, m in enumerate(ms):
        for v in m.nodes:
            assert force_set(u, f"m{i}.{v}", f) == force_set(m, v, f)


def test_axioms_on_v3():
    m = as_kripke(vrank_model(3))
    assert check_axiom(m, "Extensionality", "v", 2).ok
    assert check_axiom(m, "EmptySet", "v", 0).ok
    pair = check_axiom(m, "Pair", "v", 2)
    assert not pair.ok
    assert check_axiom(m, "Pair", "v", 1).ok
    assert check_axiom(m, "Union", "v", 2).ok


def test_axiom_schemes_need_formulas():
    with pytest.raises(ValueError):
        axiom_instance("Separation")
    with pytest.raises(ValueError):
        axiom_instance("BoundedSeparation", S("exists w. z in w"))
    with pytest.raises(ValueError):
        axiom_instance("NoSuchAxiom")


def test_separation_instance_on_v3():
    m = as_kripke(vrank_model(3))
    assert check_axiom(m, "Separation", "v", 1, S("exists w. w in z")).ok


def test_random_sentences_persist():
    rng = random.Random(7)
    for _ in range(200):
        m = random_set_model(rng)
        f = random_set_formula(rng, rng.randint(2, 8))
        for v in m.nodes:
            if force_set(m, v, f):
                assert all(force_set(m, w, f) for w in m.up[v])


def test_membership_atoms():
    m = as_kripke(vrank_model(2))
    assert force_set(m, "v", In("x", "y"), {"x": "0", "y": "1"})
    assert not force_set(m, "v", In("x", "y"), {"x": "1", "y": "0"})
