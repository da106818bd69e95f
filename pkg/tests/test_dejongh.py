import functools

import pytest
from hypothesis import given, settings, strategies as st

from setlogic.dejongh import (
    CapExceeded, SplittingTree, TreeError, build_tree_model, dejongh_counterexample,
    distinguishing_sentences, gamma, leaf_sets, make_splitting, tau, verify_translation,
)
from setlogic.formula import BOT, PROP, parse_formula
from setlogic.kripke_prop import PropKripkeModel, force_prop
from setlogic.kripke_set import check_coherence, eval_classical, force_set, ordinal_model, vrank_model
from strategies import prop_formulas


def F(text):
    return parse_formula(text, PROP)


def fork(valuation=None, leaves=None):
    return SplittingTree(("r", "a", "b"), (("r", "a"), ("r", "b")), valuation or {"p": {"a"}},
                         leaves if leaves is not None else {"a": ordinal_model(1), "b": ordinal_model(2)})


# r below a (leaf) and b; b below c and d
DEEP = (("r", "a", "b", "c", "d"), (("r", "a"), ("r", "b"), ("b", "c"), ("b", "d")))
DEEP_LEAVES = {"a": ordinal_model(1), "c": ordinal_model(2), "d": ordinal_model(3)}


def test_leaf_sets_of_fork():
    assert leaf_sets(fork()) == {"r": {"a", "b"}, "a": {"a"}, "b": {"b"}}


def test_leaf_sets_of_binary_depth_two():
    nodes = ("r", "a", "b", "a1", "a2", "b1", "b2")
    cover = (("r", "a"), ("r", "b"), ("a", "a1"), ("a", "a2"), ("b", "b1"), ("b", "b2"))
    sets = leaf_sets(SplittingTree(nodes, cover, {}))
    assert len(set(sets.values())) == 7 and sets["r"] == {"a1", "a2", "b1", "b2"}


def test_only_children_rejected():
    chain = SplittingTree(("r", "t"), (("r", "t"),), {})
    with pytest.raises(TreeError):
        leaf_sets(chain)


def test_not_a_tree():
    with pytest.raises(TreeError):
        SplittingTree(("r", "a", "b"), (("r", "b"), ("a", "b")), {})
    with pytest.raises(TreeError):
        SplittingTree(("r",), (("r", "x"),), {})


def test_distinguishing_matrix():
    phis = distinguishing_sentences(fork())
    for l, m in (("a", ordinal_model(1)), ("b", ordinal_model(2))):
        assert [eval_classical(m, phis[k]) for k in ("a", "b")] == [l == "a", l == "b"]


def test_equal_leaf_sizes_rejected():
    with pytest.raises(TreeError):
        distinguishing_sentences(fork(leaves={"a": ordinal_model(2), "b": vrank_model(2)}))
    with pytest.raises(TreeError):
        distinguishing_sentences(fork(leaves={"a": ordinal_model(2)}))


def test_large_leaves_hit_the_cap():
    with pytest.raises(CapExceeded):
        distinguishing_sentences(fork(leaves={"a": vrank_model(4), "b": ordinal_model(1)}))


def test_gamma_and_tau():
    t = fork()
    phis = distinguishing_sentences(t)
    g = gamma(t, phis, "a")
    assert g.body.body == phis["a"]
    tr = tau(t, phis)
    assert tr["p"] == g
    empty = tau(fork({"p": set()}), phis)
    assert empty["p"] == BOT


def test_built_model_for_fork():
    m = build_tree_model(fork())
    assert set(m.nodes) == {"r", "a", "b"} and m.roots() == ["r"]
    assert check_coherence(m) == []
    assert [len(m.domains[v]) for v in ("a", "b")] == [1, 2]


def test_single_leaf_tree():
    t = SplittingTree(("v",), (), {"p": {"v"}}, {"v": ordinal_model(3)})
    m = build_tree_model(t)
    assert m.nodes == ("v",)
    phis = distinguishing_sentences(t)
    assert verify_translation(m, t, tau(t, phis), [F("p")], phis)["passed"]


def test_verify_translation_on_fork():
    t = fork()
    phis = distinguishing_sentences(t)
    tr = tau(t, phis)
    out = verify_translation(build_tree_model(t), t, tr, [F("p | ~p"), F("~p | ~~p")], phis)
    assert out["passed"]
    assert out["matrix"]["p"] == {"r": False, "a": True, "b": False}


def test_verify_translation_reports_mismatches():
    t = fork()
    phis = distinguishing_sentences(t)
    wrong = fork({"p": {"b"}})
    out = verify_translation(build_tree_model(t), wrong, tau(t, phis), [F("p")])
    assert not out["passed"] and {x["kind"] for x in out["mismatches"]} == {"atom", "formula"}


def test_make_splitting_duplicates_only_children():
    chain = PropKripkeModel(("r", "t"), (("r", "t"),), {"t": frozenset({"p"})})
    nodes, cover, val = make_splitting(chain, "r")
    assert nodes == ("r", "t", "t_2") and cover == (("r", "t"), ("r", "t_2"))
    assert val["t_2"] == val["t"] == {"p"}
    split = PropKripkeModel(nodes, cover, val)
    for f in map(F, ["p", "~p", "p | ~p", "~~p -> p"]):
        assert force_prop(split, "r", f) == force_prop(chain, "r", f)


@pytest.mark.parametrize("text", ["p | ~p", "~p | ~~p", "~~p -> p", "((p -> q) -> p) -> p"])
def test_counterexamples(text):
    out = dejongh_counterexample(F(text))
    assert out["passed"] and out["root_refutes_translation"] and out["leaf_count"] == 2


def test_counterexample_on_given_deep_tree():
    t = SplittingTree(*DEEP, {"p": {"c"}, "q": {"a", "d"}}, DEEP_LEAVES)
    out = dejongh_counterexample(F("(p -> q) | (q -> p) | ~p | ~~p"), tree=t)
    assert out["passed"]
    assert out["domain_sizes"]["a"] == 1


def test_valid_formula_has_no_counterexample():
    with pytest.raises(TreeError):
        dejongh_counterexample(F("p -> p"))
    with pytest.raises(TreeError):
        dejongh_counterexample(F("p | ~p"), tree=fork({"p": {"a", "b", "r"}}))


def test_tree_json_roundtrip():
    data = fork().to_json()
    data["leaves"] = {"a": {"ordinal": 1}, "b": {"ordinal": 2}}
    assert SplittingTree.from_json(data) == fork()


@functools.lru_cache(maxsize=None)
def deep_model():
    t = SplittingTree(*DEEP, {}, DEEP_LEAVES)
    return t, build_tree_model(t), distinguishing_sentences(t)


def up_closed(nodes, cover, seeds):
    out, todo = set(seeds), list(seeds)
    while todo:
        v = todo.pop()
        for a, b in cover:
            if a == v and b not in out:
                out.add(b)
                todo.append(b)
    return out


@settings(max_examples=60, deadline=None)
@given(st.sets(st.sampled_from(DEEP[0])), st.sets(st.sampled_from(DEEP[0])),
       prop_formulas(("p", "q"), max_leaves=6))
def test_translation_is_a_forcing_homomorphism(ps, qs, f):
    # the model does not depend on the valuation, so build it once
    base, m, phis = deep_model()
    val = {"p": up_closed(DEEP[0], DEEP[1], ps), "q": up_closed(DEEP[0], DEEP[1], qs)}
    t = SplittingTree(base.nodes, base.cover, val, base.leaves)
    tr = tau(t, phis)
    assert verify_translation(m, t, tr, [f])["passed"]


def test_gamma_forced_exactly_above():
    t, m, phis = deep_model()
    frame = t.frame()
    for v in t.nodes:
        g = gamma(t, phis, v)
        assert [force_set(m, w, g) for w in t.nodes] == [frame.leq(v, w) for w in t.nodes]
