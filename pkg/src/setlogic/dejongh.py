"""Translating propositional countermodels into set Kripke models.

Given a finite splitting tree with a monotone valuation and pairwise
non-isomorphic classical leaf models, each atom p is sent to a set-theoretic
sentence tau(p) that is forced exactly at the nodes where p holds.  The
sentence for a leaf l says "the universe has exactly |D_l| elements";
gamma_v = ~~(disjunction of the sentences of the leaves above v) is forced
exactly at the nodes above v, and tau(p) is the disjunction of gamma_v over
v in V(p).  The Kripke model itself is built by repeatedly adding a new root
below the disjoint union of the children's models.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .formula import (
    Assignment, Formula, Not, apply_assignment, disj, prop_atoms, render_formula,
)
from .kripke_prop import Countermodel, PropKripkeModel, decide_ipc, force_prop
from .kripke_set import (
    ClassicalSetModel, SetKripkeModel, as_kripke, cardinality_sentence, disjoint_union,
    eval_classical, force_set, leaf_model, ordinal_model, relabel_nodes,
)
from .root_extension import RootExtension, RootExtensionConfig


class TreeError(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


# Leaves larger than this make the exact cardinality sentences too costly to evaluate.
MAX_LEAF_SIZE = 6


@dataclass(frozen=True)
class SplittingTree:
    nodes: tuple[str, ...]
    cover: tuple[tuple[str, str], ...]
    valuation: Mapping[str, frozenset[str]]
    leaves: Mapping[str, ClassicalSetModel] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "cover", tuple(tuple(e) for e in self.cover))
        object.__setattr__(self, "valuation", {p: frozenset(s) for p, s in self.valuation.items()})
        parents: dict[str, list[str]] = {v: [] for v in self.nodes}
        for a, b in self.cover:
            if a not in parents or b not in parents:
                raise TreeError(f"edge ({a}, {b}) mentions an unknown node")
            parents[b].append(a)
        roots = [v for v in self.nodes if not parents[v]]
        if len(roots) != 1 or any(len(ps) > 1 for ps in parents.values()):
            raise TreeError("not a rooted tree")
        self.frame()  # validates acyclicity and monotonicity of the valuation
        for p, s in self.valuation.items():
            if not s <= set(self.nodes):
                raise TreeError(f"valuation of {p} mentions unknown nodes")

    @property
    def root(self) -> str:
        targets = {b for _, b in self.cover}
        return next(v for v in self.nodes if v not in targets)

    def children(self, v: str) -> list[str]:
        return [b for a, b in self.cover if a == v]

    def leaf_nodes(self) -> list[str]:
        return [v for v in self.nodes if not self.children(v)]

    def frame(self) -> PropKripkeModel:
        val: dict[str, set[str]] = {v: set() for v in self.nodes}
        for p, s in self.valuation.items():
            for v in s:
                val[v].add(p)
        return PropKripkeModel(self.nodes, self.cover, {v: frozenset(a) for v, a in val.items()})

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "cover": [list(e) for e in self.cover],
            "valuation": {p: [v for v in self.nodes if v in s] for p, s in sorted(self.valuation.items())},
            "leaves": {l: m.to_json() for l, m in self.leaves.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> SplittingTree:
        return cls(
            tuple(data["nodes"]),
            tuple(tuple(e) for e in data.get("cover", [])),
            {p: frozenset(s) for p, s in data.get("valuation", {}).items()},
            {l: leaf_model(spec) for l, spec in data.get("leaves", {}).items()},
        )


def leaf_sets(t: SplittingTree) -> dict[str, frozenset[str]]:
    """The leaves above each node; distinct nodes get distinct sets."""
    for v in t.nodes:
        if len(t.children(v)) == 1:
            raise TreeError(f"node {v} has exactly one immediate successor")
    out: dict[str, frozenset[str]] = {}

    def walk(v):
        kids = t.children(v)
        out[v] = frozenset([v]) if not kids else frozenset().union(*(walk(c) for c in kids))
        return out[v]

    walk(t.root)
    if len(set(out.values())) != len(out):
        raise TreeError("two nodes have the same leaves above them")
    return {v: out[v] for v in t.nodes}


def distinguishing_sentences(t: SplittingTree) -> dict[str, Formula]:
    """Exact cardinality sentence of each leaf model, checked to hold only in its own leaf."""
    leaves = t.leaf_nodes()
    missing = [l for l in leaves if l not in t.leaves]
    if missing:
        raise TreeError(f"no classical model for leaves {missing}")
    sizes = {l: t.leaves[l].size() for l in leaves}
    if len(set(sizes.values())) != len(sizes):
        raise TreeError("leaf models must have pairwise different sizes")
    big = [l for l in leaves if sizes[l] > MAX_LEAF_SIZE]
    if big:
        raise CapExceeded(f"leaf models {big} exceed {MAX_LEAF_SIZE} elements; "
                          "their cardinality sentences are too costly to check")
    phis = {l: cardinality_sentence(sizes[l], exact=True) for l in leaves}
    for l in leaves:
        for k in leaves:
            if eval_classical(t.leaves[l], phis[k]) != (l == k):
                raise AssertionError(f"sentence of {k} misbehaves in the model of {l}")
    return phis


def gamma(t: SplittingTree, phis: Mapping[str, Formula], v: str) -> Formula:
    above = leaf_sets(t)[v]
    return Not(Not(disj(phis[l] for l in t.nodes if l in above)))


def tau(t: SplittingTree, phis: Mapping[str, Formula]) -> Assignment:
    atoms = sorted(t.valuation)
    return Assignment({p: disj(gamma(t, phis, v) for v in t.nodes if v in t.valuation[p]) for p in atoms},
                      {p: 0 for p in atoms})


def build_tree_model(t: SplittingTree, cfg: RootExtensionConfig = RootExtensionConfig(alpha_max=1)) -> SetKripkeModel:
    """Leaves carry their classical models; each inner node is a new root
    added below the disjoint union of its children's models."""
    leaf_sets(t)

    def build(v) -> SetKripkeModel:
        kids = t.children(v)
        if not kids:
            if v not in t.leaves:
                raise TreeError(f"no classical model for leaf {v}")
            return as_kripke(t.leaves[v], v)
        subs = [build(c) for c in kids]
        tags = [f"c{i}" for i in range(len(subs))]
        union = disjoint_union(subs, tags)
        names = {f"{tag}.{u}": u for tag, m in zip(tags, subs) for u in m.nodes}
        union = relabel_nodes(union, names)
        return RootExtension(union, cfg, root=v).to_model()

    return build(t.root)


def verify_translation(m: SetKripkeModel, t: SplittingTree, tr: Mapping[str, Formula],
                       formulas: Sequence[Formula] = (), phis: Mapping[str, Formula] | None = None) -> dict:
    """Compare forcing of tau(p), gamma_v and translated formulas with the tree."""
    frame = t.frame()
    mismatches = []
    matrix = {}
    for p in sorted(tr):
        row = {}
        for w in t.nodes:
            forced = force_set(m, w, tr[p])
            row[w] = forced
            if forced != (w in t.valuation.get(p, frozenset())):
                mismatches.append({"kind": "atom", "atom": p, "node": w, "forced": forced})
        matrix[p] = row
    if phis is not None:
        for v in t.nodes:
            g = gamma(t, phis, v)
            for w in t.nodes:
                if force_set(m, w, g) != frame.leq(v, w):
                    mismatches.append({"kind": "gamma", "of": v, "node": w})
    for A in formulas:
        At = apply_assignment(tr, A)
        for w in t.nodes:
            lhs, rhs = force_set(m, w, At), force_prop(frame, w, A)
            if lhs != rhs:
                mismatches.append({"kind": "formula", "formula": render_formula(A), "node": w,
                                   "set_model": lhs, "tree": rhs})
    return {"matrix": matrix, "mismatches": mismatches, "passed": not mismatches}


def make_splitting(model: PropKripkeModel, root: str) -> tuple[tuple[str, ...], tuple[tuple[str, str], ...], dict[str, frozenset[str]]]:
    """Turn a finite tree countermodel into a splitting tree by duplicating
    the subtree of every only child.  The copy is bisimilar to the original,
    so forcing at every original node is unchanged."""
    kids: dict[str, list[str]] = {v: [] for v in model.nodes}
    for a, b in model.cover:
        kids[a].append(b)
    nodes: list[str] = []
    cover: list[tuple[str, str]] = []
    val: dict[str, frozenset[str]] = {}
    used: set[str] = set(model.nodes)

    def fresh(base: str) -> str:
        i = 2
        while f"{base}_{i}" in used:
            i += 1
        name = f"{base}_{i}"
        used.add(name)
        return name

    def copy(v: str, name: str) -> None:
        nodes.append(name)
        val[name] = model.valuation[v]
        children = kids[v]
        names = [c if name == v else fresh(c) for c in children]
        if len(children) == 1:
            children = children * 2
            names = names + [fresh(children[0])]
        for c, cn in zip(children, names):
            cover.append((name, cn))
            copy(c, cn)

    copy(root, root)
    return tuple(nodes), tuple(cover), val


def dejongh_counterexample(A: Formula, cfg: RootExtensionConfig = RootExtensionConfig(alpha_max=1),
                           tree: SplittingTree | None = None) -> dict:
    """A set Kripke model and translation whose root refutes A^tau.

    Without ``tree`` the countermodel of :func:`decide_ipc` is made splitting
    and its leaves get ordinal models of sizes 1, 2, 3, ...
    """
    if tree is None:
        verdict = decide_ipc(A)
        if not isinstance(verdict, Countermodel):
            raise TreeError(f"{render_formula(A)} is IPC-valid; no countermodel exists")
        nodes, cover, val = make_splitting(verdict.model, verdict.root)
        leaves = [v for v in nodes if not any(a == v for a, _ in cover)]
        if len(leaves) > MAX_LEAF_SIZE:
            raise CapExceeded(f"{len(leaves)} leaves need models larger than {MAX_LEAF_SIZE} elements")
        valuation = {p: frozenset(v for v in nodes if p in val[v]) for p in prop_atoms(A)}
        tree = SplittingTree(nodes, cover, valuation, {l: ordinal_model(i + 1) for i, l in enumerate(leaves)})
    frame = tree.frame()
    for p in prop_atoms(A):
        if p not in tree.valuation:
            raise TreeError(f"tree has no valuation for {p}")
    if force_prop(frame, tree.root, A):
        raise TreeError("the tree does not refute the formula at its root")
    phis = distinguishing_sentences(tree)
    tr = tau(tree, phis)
    model = build_tree_model(tree, cfg)
    check = verify_translation(model, tree, tr, [A], phis)
    At = apply_assignment(tr, A)
    root_refutes = not force_set(model, tree.root, At)
    return {
        "formula": render_formula(A),
        "tree": tree.to_json(),
        "leaf_count": len(tree.leaf_nodes()),
        "sentences": {l: render_formula(f) for l, f in phis.items()},
        "tau": tr.to_json(),
        "root_refutes_translation": root_refutes,
        "matrix": check["matrix"],
        "mismatches": check["mismatches"],
        "passed": root_refutes and check["passed"],
        "model_nodes": list(model.nodes),
        "domain_sizes": {v: len(model.domains[v]) for v in model.nodes},
    }
