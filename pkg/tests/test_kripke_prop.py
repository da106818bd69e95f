import random

import pytest
from hypothesis import given, settings, strategies as st

from setlogic.corpus import corpus_count, formulas_by_size, random_prop_formula
from setlogic.formula import PROP, TOP, Atom, parse_formula
from setlogic.kripke_prop import (
    Countermodel, FalsifyingAssignment, ModelError, PropKripkeModel, TreeOracle, Valid,
    check_persistence, decide_cpc, decide_ipc, enumerate_finite_trees, force_prop, forcing_set,
    random_prop_model, tree_shapes,
)
from setlogic.sequent import ipc_provable
from oracles import naive_prop_force, rooted_tree_census, sympy_valid
from strategies import prop_formulas

chain = PropKripkeModel(("r", "t"), (("r", "t"),), {"t": frozenset({"p"})})


def F(s):
    return parse_formula(s, PROP)


def test_forcing_on_two_chain():
    assert not force_prop(chain, "r", F("p | ~p"))
    assert force_prop(chain, "t", F("p"))
    assert all(force_prop(chain, v, TOP) for v in chain.nodes)


def test_model_rejects_non_monotone_valuation():
    with pytest.raises(ModelError):
        PropKripkeModel(("r", "t"), (("r", "t"),), {"r": frozenset({"p"})})


def test_model_rejects_cycles():
    with pytest.raises(ModelError):
        PropKripkeModel(("a", "b"), (("a", "b"), ("b", "a")))


def test_json_roundtrip():
    assert PropKripkeModel.from_json(chain.to_json()) == chain


def test_persistence_examples():
    assert check_persistence(chain, [F("p"), F("~p"), F("p -> q")]) == []
    single = PropKripkeModel(("v",))
    assert check_persistence(single, [F("p | ~p")]) == []


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.lists(prop_formulas(), min_size=1, max_size=5))
def test_persistence_random_posets(seed, fs):
    m = random_prop_model(random.Random(seed), ("p", "q", "r"), max_nodes=5)
    assert check_persistence(m, fs) == []


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), prop_formulas())
def test_forcing_set_matches_clause_oracle(seed, f):
    m = random_prop_model(random.Random(seed), ("p", "q", "r"), max_nodes=5)
    s = forcing_set(m, f)
    for v in m.nodes:
        assert (v in s) == naive_prop_force(m.nodes, m.leq, m.valuation, v, f)


@pytest.mark.parametrize("n", range(1, 8))
def test_tree_shapes_match_census(n):
    assert sum(1 for _ in tree_shapes(n, n)) == rooted_tree_census(n)


def test_enumerate_finite_trees_counts():
    assert sum(1 for _ in enumerate_finite_trees(1)) == 1
    assert sum(1 for _ in enumerate_finite_trees(2)) == 2
    assert sum(1 for _ in enumerate_finite_trees(3)) == 4


def test_enumerated_trees_are_rooted():
    for m in enumerate_finite_trees(5):
        assert len(m.roots()) == 1


def test_decide_ipc_examples():
    assert isinstance(decide_ipc(F("p -> p")), Valid)
    v = decide_ipc(F("p | ~p"))
    assert isinstance(v, Countermodel)
    assert len(v.model.nodes) == 2 and not force_prop(v.model, v.root, F("p | ~p"))
    assert isinstance(decide_ipc(F("~~(p | ~p)")), Valid)
    assert TreeOracle(("p",), 4).valid(F("~~(p | ~p)"))


IPC_THEOREMS = [
    "p -> q -> p",
    "(p -> q -> r) -> (p -> q) -> p -> r",
    "~~~p -> ~p",
    "(p | q) & ~p -> q",
    "~(p | q) -> ~p & ~q",
    "~~(~~p -> p)",
    "(p -> ~p) -> ~p",
]
CLASSICAL_ONLY = [
    "p | ~p",
    "~~p -> p",
    "((p -> q) -> p) -> p",
    "(p -> q) | (q -> p)",
    "~p | ~~p",
    "~(p & q) -> ~p | ~q",
    "(~p -> q | r) -> (~p -> q) | (~p -> r)",
]


@pytest.mark.parametrize("s", IPC_THEOREMS)
def test_ipc_theorems(s):
    assert isinstance(decide_ipc(F(s)), Valid)
    assert isinstance(decide_cpc(F(s)), Valid)


@pytest.mark.parametrize("s", CLASSICAL_ONLY)
def test_classical_non_theorems(s):
    f = F(s)
    v = decide_ipc(f)
    assert isinstance(v, Countermodel)
    m = v.model
    assert not naive_prop_force(m.nodes, m.leq, m.valuation, v.root, f)
    assert isinstance(decide_cpc(f), Valid)


def test_decide_cpc_examples():
    assert isinstance(decide_cpc(F("((p -> q) -> p) -> p")), Valid)
    assert isinstance(decide_cpc(F("p | ~p")), Valid)
    v = decide_cpc(F("p -> q"))
    assert isinstance(v, FalsifyingAssignment) and v.assignment == {"p": True, "q": False}


@settings(max_examples=300, deadline=None)
@given(prop_formulas(("p", "q", "r", "s"), max_leaves=8))
def test_ipc_inside_cpc_and_cpc_matches_sat(f):
    ipc = decide_ipc(f)
    cpc = decide_cpc(f)
    assert cpc.valid == sympy_valid(f)
    if ipc.valid:
        assert cpc.valid
    else:
        m = ipc.model
        assert not naive_prop_force(m.nodes, m.leq, m.valuation, ipc.root, f)


def test_sequent_engine_agrees_with_trees_on_small_corpus():
    oracle = TreeOracle(("p", "q"), 4)
    for level in formulas_by_size(("p", "q"), 6):
        for f in level:
            assert ipc_provable(f) == oracle.valid(f)


def test_corpus_count_matches_enumeration():
    levels = formulas_by_size(("p", "q", "r"), 6)
    assert sum(map(len, levels)) == corpus_count(3, 6)


def test_random_formula_has_requested_size():
    from setlogic.formula import size
    rng = random.Random(1)
    for n in range(1, 15):
        assert size(random_prop_formula(rng, ("p", "q"), n)) == n


def test_countermodel_json():
    v = decide_ipc(F("p | ~p"))
    data = v.to_json()
    assert data["verdict"] == "countermodel"
    assert PropKripkeModel.from_json(data["model"]) == v.model


def test_atoms_with_arguments_rejected():
    with pytest.raises(Exception):
        decide_ipc(Atom("P", ("x",)))
