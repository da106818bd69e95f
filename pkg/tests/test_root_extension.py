import random

import pytest
from hypothesis import given, settings, strategies as st

from setlogic.formula import SET, TOP, Assignment, Not, Or, parse_formula
from setlogic.kripke_set import (
    SetKripkeModel, as_kripke, cardinality_sentence, check_coherence, disjoint_union, force_set, ordinal_model,
    random_set_model, vrank_model,
)
from setlogic.root_extension import (
    PreconditionError, RootExtension, RootExtensionConfig, WidthExceeded, WitnessOverflow,
    check_root_elements, dp_demo, extend, restriction_identity, visser_semantic_demo,
)
from oracles import engine_elements_as_oracle_keys, root_extension_oracle


def S(text):
    return parse_formula(text, SET)


def ext_of(leaf, alpha=2):
    return RootExtension(as_kripke(leaf), RootExtensionConfig(alpha_max=alpha))


def test_v1_and_v2_root_domains():
    assert len(ext_of(vrank_model(1)).elements) == 1
    e = ext_of(vrank_model(2))
    assert [x.rank for x in e.elements] == [1, 1, 2]
    top = e.elements[2]
    (empty,) = top.members
    assert e.element(empty).members == frozenset() and e.element(empty).at("v") == "0"
    assert top.at("v") == "1"  # the element {0} of V_2


def test_extension_model_shape():
    e = ext_of(vrank_model(2))
    m = e.to_model()
    assert m.roots() == [e.root] and e.root == "r"
    assert m.membership["r"] == {("x0", "x2")}
    assert m.transitions[("r", "v")] == {"x0": "0", "x1": "1", "x2": "1"}
    assert check_coherence(m) == []


@pytest.mark.parametrize("n, alpha", [(1, 1), (1, 3), (2, 2), (3, 2), (3, 3)])
def test_matches_definition_oracle_on_vranks(n, alpha):
    e = ext_of(vrank_model(n), alpha)
    assert engine_elements_as_oracle_keys(e) == root_extension_oracle(e.base, alpha)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 2))
def test_matches_definition_oracle_on_random_models(seed, alpha):
    m = random_set_model(random.Random(seed), max_nodes=3, max_domain=2)
    e = RootExtension(m, RootExtensionConfig(alpha_max=alpha, width_cap=10**5))
    assert engine_elements_as_oracle_keys(e) == root_extension_oracle(m, alpha)
    assert e.validate() == []
    assert restriction_identity(e.to_model(), m)
    assert check_coherence(e.to_model()) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_old_nodes_keep_their_forcing(seed):
    rng = random.Random(seed)
    m = random_set_model(rng, max_nodes=3, max_domain=2)
    ext = extend(m, RootExtensionConfig(alpha_max=1))
    f = S("forall x. exists y. (y in x | ~ x = y)")
    for v in m.nodes:
        assert force_set(ext, v, f) == force_set(m, v, f)


def test_root_forcing_implies_forcing_above():
    ext = extend(disjoint_union([as_kripke(vrank_model(2)), as_kripke(vrank_model(3))]))
    for f in [S("exists x. forall y. ~y in x"), S("exists x. exists y. ~x = y"), S("forall x. x = x")]:
        if force_set(ext, "r", f):
            assert all(force_set(ext, w, f) for w in ext.up["r"])


def test_width_cap():
    with pytest.raises(WidthExceeded):
        RootExtension(as_kripke(vrank_model(3)), RootExtensionConfig(alpha_max=3, width_cap=5))


def test_preconditions():
    broken = SetKripkeModel(["r", "t"], [("r", "t")], {"r": ["a", "b"], "t": ["a", "b"]},
                            {("r", "t"): {"a": "a", "b": "b"}}, {"r": [("a", "b")]})
    with pytest.raises(PreconditionError):
        RootExtension(broken)
    with pytest.raises(PreconditionError):
        RootExtension(as_kripke(vrank_model(1)), root="v")
    assert RootExtension(as_kripke(vrank_model(1), "r")).root == "r0"
    with pytest.raises(ValueError):
        RootExtensionConfig(alpha_max=0)


def test_lazy_mode_starts_at_rank_one():
    e = RootExtension(as_kripke(vrank_model(3)), RootExtensionConfig(alpha_max=3, witness_mode="lazy"))
    assert {x.rank for x in e.elements} == {1}
    rep = e.witness_pair("x0", "x0")
    assert rep.ok and rep.element.rank == 2


def test_witnesses_on_v3():
    e = ext_of(vrank_model(3))
    empty = e.witness_empty()
    assert empty.ok and empty.element.members == frozenset()
    x = empty.element.id
    pair = e.witness_pair(x, x)
    assert pair.ok and pair.element.members == {x}
    assert e.witness_union(pair.element.id).ok
    for phi in (TOP, S("~ z = z"), S("exists w. w in z")):
        assert e.witness_separation(pair.element.id, phi).ok
    assert e.witness_power(x).ok
    assert e.witness_replacement(pair.element.id, S("z = y")).ok
    expo = e.witness_exponentiation(x, x)
    assert expo.ok and len(expo.element.members) == 1
    assert e.validate() == []


def test_witnesses_overflow_without_node_sets():
    e = ext_of(vrank_model(1))
    x = e.witness_empty().element.id
    with pytest.raises(WitnessOverflow):
        e.witness_pair(x, x)
    with pytest.raises(WitnessOverflow):
        e.witness_power(x)
    with pytest.raises(WitnessOverflow):
        e.witness_exponentiation(x, x)


def test_replacement_requires_function():
    e = ext_of(vrank_model(3))
    pair = e.witness_pair("x0", "x0").element.id
    with pytest.raises(PreconditionError):
        e.witness_replacement(pair, S("~ z = y"))
    with pytest.raises(ValueError):
        e.witness_separation(pair, S("z = q"))


def test_strong_infinity_chain():
    e = ext_of(vrank_model(4), 1)
    chain, rep = e.witness_strong_infinity(2)
    assert rep.ok and [c.rank for c in chain] == [1, 2, 3]


def test_ein_induction():
    e = ext_of(vrank_model(3))
    out = e.check_ein_induction(S("exists w. w in x | ~ exists w. w in x"), 1)
    assert out["well_founded"] and out["rank_decreasing"]


def test_checker_catches_tampering():
    e = ext_of(vrank_model(2))
    model = e.to_model()
    records = [x.to_json() for x in e.elements]
    assert check_root_elements(model, "r", records) == []
    records[2] = {**records[2], "rank": 3}
    assert any("least" in msg for msg in check_root_elements(model, "r", records))
    records = [x.to_json() for x in e.elements]
    records[0] = {**records[0], "thread": {"v": "1"}}
    assert check_root_elements(model, "r", records) != []
    records = [x.to_json() for x in e.elements]
    records[1] = {**records[1], "members": ["x0"], "rank": 2}
    assert check_root_elements(model, "r", records) != []


def test_json_export():
    data = ext_of(vrank_model(2)).to_json()
    assert data["root"] == "r" and len(data["root_elements"]) == 3
    assert set(SetKripkeModel.from_json(data).nodes) == {"r", "v"}


def test_dp_demo():
    m1, m2 = as_kripke(vrank_model(2)), as_kripke(vrank_model(3))
    at_least_3 = S("exists x1. exists x2. exists x3. (~x1 = x2 & ~x1 = x3 & ~x2 = x3)")
    out = dp_demo(m1, m2, at_least_3, Not(at_least_3))
    assert out["passed"] and out["coherent"]
    with pytest.raises(PreconditionError):
        dp_demo(m2, m1, at_least_3, TOP)


def test_visser_demo_n1():
    ms = [as_kripke(ordinal_model(k)) for k in (1, 2, 3)]
    one, two = cardinality_sentence(1, exact=True), cardinality_sentence(2, exact=True)
    # model j refutes sigma(a_j); a1 -> b1 holds trivially
    sigma = Assignment({"a1": Not(one), "a2": Not(two), "a3": Or(two, one), "b1": TOP})
    out = visser_semantic_demo(ms, sigma, 1)
    assert out["passed"]
    with pytest.raises(ValueError):
        visser_semantic_demo(ms[:2], sigma, 1)


def test_visser_demo_precondition():
    ms = [as_kripke(ordinal_model(k)) for k in (1, 2, 3)]
    sigma = Assignment({"a1": TOP, "a2": TOP, "a3": TOP, "b1": TOP})
    with pytest.raises(PreconditionError):
        visser_semantic_demo(ms, sigma, 1)
