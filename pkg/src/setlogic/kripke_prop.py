"""Finite propositional Kripke models and decision procedures for IPC and CPC.

Two independent engines decide IPC: the G4ip sequent search in
:mod:`setlogic.sequent` and a semantic search over finite rooted trees with
all monotone valuations.  :func:`decide_ipc` uses the first for the verdict
and the second to produce a countermodel, re-checked by :func:`force_prop`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from .formula import (
    And, Atom, Bot, Formula, FormulaError, Implies, Not, Or, Top, prop_atoms,
)
from .sequent import _check_prop, ipc_provable


class ModelError(ValueError):
    pass


class InternalInconsistency(RuntimeError):
    """The sequent prover and the countermodel search disagree."""


def transitive_closure(nodes: Sequence[str], cover: Iterable[tuple[str, str]]) -> frozenset[tuple[str, str]]:
    succ: dict[str, set[str]] = {v: set() for v in nodes}
    for a, b in cover:
        if a not in succ or b not in succ:
            raise ModelError(f"cover edge ({a}, {b}) mentions an unknown node")
        succ[a].add(b)
    order = set()
    for v in nodes:
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in succ[u]:
                if w == v:
                    raise ModelError(f"order is not antisymmetric: cycle through {v}")
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        order.update((v, w) for w in seen)
    return frozenset(order)


def covering_relation(nodes: Sequence[str], order: frozenset[tuple[str, str]]) -> tuple[tuple[str, str], ...]:
    strict = {(a, b) for a, b in order if a != b}
    cover = []
    for a, b in sorted(strict):
        if not any((a, c) in strict and (c, b) in strict for c in nodes):
            cover.append((a, b))
    return tuple(cover)


@dataclass(frozen=True)
class PropKripkeModel:
    """A finite partial order with a monotone valuation.

    Stored as its covering relation; the order is the reflexive-transitive
    closure, computed and validated on construction.
    """

    nodes: tuple[str, ...]
    cover: tuple[tuple[str, str], ...] = ()
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict)
    order: frozenset[tuple[str, str]] = field(init=False, repr=False, compare=False)
    up: Mapping[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if len(set(nodes)) != len(nodes):
            raise ModelError("duplicate node ids")
        if not nodes:
            raise ModelError("a model needs at least one node")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "cover", tuple(tuple(e) for e in self.cover))
        order = transitive_closure(nodes, self.cover)
        object.__setattr__(self, "order", order)
        val = {v: frozenset(self.valuation.get(v, ())) for v in nodes}
        for v in self.valuation:
            if v not in val:
                raise ModelError(f"valuation mentions unknown node {v}")
        object.__setattr__(self, "valuation", val)
        up = {v: tuple(w for w in nodes if (v, w) in order) for v in nodes}
        object.__setattr__(self, "up", up)
        for v in nodes:
            for w in up[v]:
                if not val[v] <= val[w]:
                    raise ModelError(f"valuation not monotone: {sorted(val[v] - val[w])} lost from {v} to {w}")

    def leq(self, v: str, w: str) -> bool:
        return (v, w) in self.order

    def roots(self) -> list[str]:
        return [v for v in self.nodes if not any((u, v) in self.order for u in self.nodes if u != v)]

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "cover": [list(e) for e in self.cover],
            "valuation": {v: sorted(ps) for v, ps in self.valuation.items() if ps},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> PropKripkeModel:
        return cls(
            tuple(data["nodes"]),
            tuple(tuple(e) for e in data.get("cover", ())),
            {v: frozenset(ps) for v, ps in data.get("valuation", {}).items()},
        )


def forcing_set(m: PropKripkeModel, f: Formula) -> frozenset[str]:
    """The set of nodes forcing ``f``."""
    match f:
        case Top():
            return frozenset(m.nodes)
        case Bot():
            return frozenset()
        case Atom(p, args):
            if args:
                raise FormulaError(f"non-propositional atom {p}")
            return frozenset(v for v in m.nodes if p in m.valuation[v])
        case And(a, b):
            return forcing_set(m, a) & forcing_set(m, b)
        case Or(a, b):
            return forcing_set(m, a) | forcing_set(m, b)
        case Not(a):
            fa = forcing_set(m, a)
            return frozenset(v for v in m.nodes if not any(w in fa for w in m.up[v]))
        case Implies(a, b):
            fa, fb = forcing_set(m, a), forcing_set(m, b)
            return frozenset(v for v in m.nodes if all(w not in fa or w in fb for w in m.up[v]))
    raise FormulaError("quantifier in a propositional formula")


def force_prop(m: PropKripkeModel, v: str, f: Formula) -> bool:
    if v not in m.valuation:
        raise ModelError(f"unknown node {v}")
    return v in forcing_set(m, f)


@dataclass(frozen=True)
class PersistenceViolation:
    formula: Formula
    lower: str
    upper: str


def check_persistence(m: PropKripkeModel, fs: Iterable[Formula]) -> list[PersistenceViolation]:
    out = []
    for f in fs:
        s = forcing_set(m, f)
        for v in sorted(s):
            for w in m.up[v]:
                if w not in s:
                    out.append(PersistenceViolation(f, v, w))
    return out



def random_prop_model(rng, atoms: Sequence[str], max_nodes: int = 5, edge_prob: float = 0.4) -> PropKripkeModel:
    """A random finite poset (not necessarily a tree) with a random monotone valuation."""
    n = rng.randint(1, max_nodes)
    nodes = tuple(f"w{i}" for i in range(n))
    edges = [(nodes[i], nodes[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_prob]
    order = transitive_closure(nodes, edges)
    val: dict[str, set[str]] = {v: set() for v in nodes}
    for p in atoms:
        seeds = [v for v in nodes if rng.random() < 0.3]
        for v in seeds:
            for w in nodes:
                if (v, w) in order:
                    val[w].add(p)
    return PropKripkeModel(nodes, covering_relation(nodes, order), {v: frozenset(a) for v, a in val.items()})

# ---------------------------------------------------------------------------
# Finite rooted trees up to isomorphism

# A tree shape is the sorted tuple of its children's shapes.
Shape = tuple


@lru_cache(maxsize=None)
def _shapes_of_size(n: int) -> tuple[Shape, ...]:
    if n == 1:
        return ((),)
    out = set()
    for forest in _forests(n - 1, n - 1):
        out.add(tuple(sorted(forest)))
    return tuple(sorted(out, key=lambda s: (_depth(s), s)))


@lru_cache(maxsize=None)
def _forests(n: int, max_part: int) -> tuple[tuple[Shape, ...], ...]:
    """Multisets of shapes with total size n, parts of size <= max_part (nonincreasing)."""
    if n == 0:
        return ((),)
    out = []
    for k in range(min(n, max_part), 0, -1):
        for t in _shapes_of_size(k):
            for rest in _forests(n - k, k):
                # keep each multiset once: parts of equal size ordered by shape
                if rest and _size(rest[0]) == k and rest[0] < t:
                    continue
                out.append((t,) + rest)
    return tuple(out)


def _size(s: Shape) -> int:
    return 1 + sum(_size(c) for c in s)


def _depth(s: Shape) -> int:
    return 1 + max((_depth(c) for c in s), default=0)


@dataclass(frozen=True)
class TreeShape:
    """A rooted tree with nodes numbered in preorder (root is 0)."""

    shape: Shape
    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]

    @classmethod
    def from_shape(cls, shape: Shape) -> TreeShape:
        parent: list[int] = []
        children: list[list[int]] = []

        def walk(s, p):
            i = len(parent)
            parent.append(p)
            children.append([])
            if p >= 0:
                children[p].append(i)
            for c in s:
                walk(c, i)

        walk(shape, -1)
        return cls(shape, tuple(parent), tuple(tuple(c) for c in children))

    @property
    def size(self) -> int:
        return len(self.parent)

    def node_names(self) -> list[str]:
        return [f"n{i}" for i in range(self.size)]

    def frame(self, valuation: Mapping[str, frozenset[str]] | None = None) -> PropKripkeModel:
        names = self.node_names()
        cover = tuple((names[p], names[i]) for i, p in enumerate(self.parent) if p >= 0)
        return PropKripkeModel(tuple(names), cover, valuation or {})

    def up_sets(self) -> list[frozenset[int]]:
        """All upward-closed node sets, in a fixed order starting with the empty set."""
        below = [set() for _ in range(self.size)]
        for i in range(self.size):
            p = self.parent[i]
            while p >= 0:
                below[i].add(p)
                p = self.parent[p]
        out = []
        for bits in itertools.product((False, True), repeat=self.size):
            s = frozenset(i for i, b in enumerate(bits) if b)
            if all(not (i in s) or all(j in s for j in range(self.size) if i in below[j]) for i in range(self.size)):
                out.append(s)
        out.sort(key=lambda s: (len(s), sorted(s)))
        return out


def tree_shapes(max_nodes: int, min_nodes: int = 1) -> Iterator[TreeShape]:
    for n in range(min_nodes, max_nodes + 1):
        for s in _shapes_of_size(n):
            yield TreeShape.from_shape(s)


def enumerate_finite_trees(max_nodes: int) -> Iterator[PropKripkeModel]:
    """Every rooted tree with at most ``max_nodes`` nodes, once up to isomorphism."""
    if max_nodes < 1:
        raise ValueError("max_nodes must be at least 1")
    for t in tree_shapes(max_nodes):
        yield t.frame()


# ---------------------------------------------------------------------------
# Bit-parallel evaluation over all valuations of a tree shape


class ShapeBank:
    """All monotone valuations of ``atoms`` on one tree shape, evaluated at once.

    Bit ``j`` of a node's mask is the truth of the formula at that node in
    valuation number ``j``.  ``fixed`` pins some atoms to one up-set each.
    """

    def __init__(self, tree: TreeShape, atoms: Sequence[str], fixed: Mapping[str, frozenset[int]] | None = None):
        self.tree = tree
        self.ups = tree.up_sets()
        self.fixed = dict(fixed or {})
        self.free_atoms = [a for a in atoms if a not in self.fixed]
        k = len(self.ups)
        self.count = k ** len(self.free_atoms)
        self.full = (1 << self.count) - 1
        n = tree.size
        self.atom_masks: dict[str, list[int]] = {}
        for a, s in self.fixed.items():
            self.atom_masks[a] = [self.full if i in s else 0 for i in range(n)]
        for pos, a in enumerate(self.free_atoms):
            stride = k ** (len(self.free_atoms) - 1 - pos)
            masks = []
            for i in range(n):
                # valuation j uses up-set (j // stride) % k for atom a
                block = 0
                for u, s in enumerate(self.ups):
                    if i in s:
                        block |= ((1 << stride) - 1) << (u * stride)
                width = k * stride
                reps = self.count // width
                mask = 0
                for r in range(reps):
                    mask |= block << (r * width)
                masks.append(mask)
            self.atom_masks[a] = masks
        # reverse preorder visits children before parents
        self._post = list(range(n - 1, -1, -1))

    def _box(self, s: list[int]) -> list[int]:
        out = list(s)
        for i in self._post:
            for c in self.tree.children[i]:
                out[i] &= out[c]
        return out

    def eval(self, f: Formula, memo: dict | None = None, masks: Mapping[str, list[int]] | None = None) -> list[int]:
        """Masks of ``f``; ``masks`` overrides atom values (used to evaluate substitution instances)."""
        memo = {} if memo is None else memo
        r = memo.get(f)
        if r is not None:
            return r
        n = self.tree.size
        match f:
            case Top():
                r = [self.full] * n
            case Bot():
                r = [0] * n
            case Atom(p, _):
                r = (masks or self.atom_masks)[p]
            case And(a, b):
                r = [x & y for x, y in zip(self.eval(a, memo, masks), self.eval(b, memo, masks))]
            case Or(a, b):
                r = [x | y for x, y in zip(self.eval(a, memo, masks), self.eval(b, memo, masks))]
            case Not(a):
                r = self._box([self.full ^ x for x in self.eval(a, memo, masks)])
            case Implies(a, b):
                r = self._box([(self.full ^ x) | y for x, y in zip(self.eval(a, memo, masks), self.eval(b, memo, masks))])
            case _:
                raise FormulaError("quantifier in a propositional formula")
        memo[f] = r
        return r

    def valuation(self, j: int) -> dict[str, frozenset[str]]:
        """Decode valuation number ``j`` as node name -> set of atoms."""
        names = self.tree.node_names()
        k = len(self.ups)
        per_atom = dict(self.fixed)
        for pos, a in enumerate(self.free_atoms):
            stride = k ** (len(self.free_atoms) - 1 - pos)
            per_atom[a] = self.ups[(j // stride) % k]
        val: dict[str, set[str]] = {nm: set() for nm in names}
        for a, s in per_atom.items():
            for i in s:
                val[names[i]].add(a)
        return {v: frozenset(ps) for v, ps in val.items()}


_BANK_LIMIT = 1 << 14


def _banks(tree: TreeShape, atoms: Sequence[str]) -> tuple[ShapeBank, ...]:
    """Banks covering all valuations of ``atoms`` on ``tree``, split to bounded width."""
    return _banks_cached(tree.shape, tuple(atoms))


@lru_cache(maxsize=4096)
def _banks_cached(shape: Shape, atoms: tuple[str, ...]) -> tuple[ShapeBank, ...]:
    tree = TreeShape.from_shape(shape)
    ups = tree.up_sets()
    pinned = 0
    while pinned < len(atoms) and len(ups) ** (len(atoms) - pinned) > _BANK_LIMIT:
        pinned += 1
    return tuple(
        ShapeBank(tree, atoms, dict(zip(atoms[:pinned], choice)))
        for choice in itertools.product(ups, repeat=pinned)
    )


def find_tree_countermodel(f: Formula, max_nodes: int) -> tuple[PropKripkeModel, str] | None:
    """Smallest tree (by node count, then shape order) with a valuation refuting ``f`` at its root."""
    _check_prop(f)
    atoms = prop_atoms(f)
    for tree in tree_shapes(max_nodes):
        for bank in _banks(tree, atoms):
            root = bank.eval(f)[0]
            if root != bank.full:
                j = ((bank.full ^ root) & -(bank.full ^ root)).bit_length() - 1
                return tree.frame(bank.valuation(j)), "n0"
    return None


def tree_valid(f: Formula, max_nodes: int) -> bool:
    """Exhaustive finite-tree oracle: ``f`` holds at every node of every tree up to ``max_nodes``."""
    return find_tree_countermodel(f, max_nodes) is None


class TreeOracle:
    """Finite-tree validity for many formulas over a fixed atom list.

    Values of subformulas are memoised, so evaluating a corpus enumerated by
    size costs one bit operation per node per formula.
    """

    def __init__(self, atoms: Sequence[str], max_nodes: int):
        self.banks = [b for t in tree_shapes(max_nodes) for b in _banks(t, atoms)]
        self.memos: list[dict] = [{} for _ in self.banks]

    def valid(self, f: Formula, remember: bool = True) -> bool:
        ok = True
        for bank, memo in zip(self.banks, self.memos):
            local = memo if remember else dict(memo)
            if bank.eval(f, local)[0] != bank.full:
                ok = False
                if not remember:
                    break
        return ok


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Valid:
    def to_json(self) -> dict:
        return {"verdict": "valid"}

    @property
    def valid(self) -> bool:
        return True


@dataclass(frozen=True)
class Countermodel:
    model: PropKripkeModel
    root: str

    @property
    def valid(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"verdict": "countermodel", "root": self.root, "model": self.model.to_json()}


@dataclass(frozen=True)
class FalsifyingAssignment:
    assignment: Mapping[str, bool]

    @property
    def valid(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"verdict": "falsified", "assignment": dict(sorted(self.assignment.items()))}


DEFAULT_NODE_BUDGET = 9


def _implication_count(f: Formula) -> int:
    match f:
        case Implies(a, b):
            return 1 + _implication_count(a) + _implication_count(b)
        case Not(a):
            return 1 + _implication_count(a)
        case And(a, b) | Or(a, b):
            return _implication_count(a) + _implication_count(b)
    return 0


def countermodel_budget(f: Formula, node_budget: int = DEFAULT_NODE_BUDGET) -> int:
    return max(1, min(2 ** _implication_count(f), node_budget))


def decide_ipc(f: Formula, node_budget: int = DEFAULT_NODE_BUDGET) -> Valid | Countermodel:
    """Decide IPC validity; on failure return a finite-tree countermodel."""
    _check_prop(f)
    if ipc_provable(f):
        return Valid()
    found = find_tree_countermodel(f, countermodel_budget(f, node_budget))
    if found is None:
        raise InternalInconsistency(
            f"sequent search refutes {f} but no tree countermodel within {countermodel_budget(f, node_budget)} nodes"
        )
    model, root = found
    if force_prop(model, root, f):
        raise InternalInconsistency(f"countermodel for {f} does not refute it")
    return Countermodel(model, root)


def classical_value(f: Formula, assignment: Mapping[str, bool]) -> bool:
    match f:
        case Top():
            return True
        case Bot():
            return False
        case Atom(p, _):
            return assignment[p]
        case Not(a):
            return not classical_value(a, assignment)
        case And(a, b):
            return classical_value(a, assignment) and classical_value(b, assignment)
        case Or(a, b):
            return classical_value(a, assignment) or classical_value(b, assignment)
        case Implies(a, b):
            return (not classical_value(a, assignment)) or classical_value(b, assignment)
    raise FormulaError("quantifier in a propositional formula")


def decide_cpc(f: Formula) -> Valid | FalsifyingAssignment:
    """Truth-table decision; the first falsifying row in binary counting order is returned."""
    _check_prop(f)
    names = prop_atoms(f)
    for bits in itertools.product((False, True), repeat=len(names)):
        row = dict(zip(names, bits))
        if not classical_value(f, row):
            return FalsifyingAssignment(row)
    return Valid()
