"""Classical finite set models and Kripke models for the language of set theory.

Element ids are strings local to a node.  Forcing at a node follows the usual
intuitionistic clauses: atoms through the node's membership relation and
element identity, implication, negation and the universal quantifier over all
later nodes with environments carried along the transition functions.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .formula import (
    BOT, EQ, IN, SET, And, Atom, Bot, Eq, Exists, Forall, Formula, FormulaError, Iff, Implies,
    In, Not, Or, Top, all_vars, check_language, conj, exists_all, forall_all, free_vars,
    fresh_var, rename_vars,
)
from .kripke_prop import ModelError, transitive_closure
from .structures import Structure, evaluate


# ---------------------------------------------------------------------------
# Classical models


@dataclass(frozen=True)
class ClassicalSetModel:
    elements: tuple[str, ...]
    membership: frozenset[tuple[str, str]]

    def members(self, b: str) -> frozenset[str]:
        return frozenset(a for a, c in self.membership if c == b)

    def size(self) -> int:
        return len(self.elements)

    def to_json(self) -> dict:
        return {"elements": list(self.elements), "membership": sorted(list(p) for p in self.membership)}


def vrank_model(n: int) -> ClassicalSetModel:
    """The cumulative stage V_n.  Element ``k`` codes the set {j : bit j of k is set}."""
    if n < 0:
        raise ValueError("rank must be nonnegative")
    if n > 4:
        raise ValueError(f"V_{n} is too large to build (|V_5| = 65536)")
    size = 0
    for _ in range(n):
        size = 1 << size
    elements = tuple(str(k) for k in range(size))
    membership = frozenset((str(j), str(k)) for k in range(size) for j in range(size) if (k >> j) & 1)
    return ClassicalSetModel(elements, membership)


def ordinal_model(n: int) -> ClassicalSetModel:
    """The von Neumann ordinal n = {0, ..., n-1} as a transitive set model."""
    if n < 1:
        raise ValueError("ordinal models need at least one element")
    elements = tuple(str(k) for k in range(n))
    membership = frozenset((str(j), str(k)) for k in range(n) for j in range(k))
    return ClassicalSetModel(elements, membership)


def leaf_model(spec: Mapping) -> ClassicalSetModel:
    """Decode ``{"vrank": n}``, ``{"ordinal": n}`` or an explicit element/membership table."""
    if "vrank" in spec:
        return vrank_model(int(spec["vrank"]))
    if "ordinal" in spec:
        return ordinal_model(int(spec["ordinal"]))
    if "elements" in spec:
        return ClassicalSetModel(tuple(spec["elements"]),
                                 frozenset(tuple(p) for p in spec.get("membership", ())))
    raise ValueError(f"unrecognised leaf model {dict(spec)!r}")


def validate_classical(m: ClassicalSetModel) -> list[str]:
    """Extensionality and well-foundedness violations (empty list when clean)."""
    out = []
    ids = set(m.elements)
    for a, b in sorted(m.membership):
        if a not in ids or b not in ids:
            out.append(f"membership ({a}, {b}) uses an unknown element")
    seen: dict[frozenset, str] = {}
    for x in m.elements:
        mem = m.members(x)
        if mem in seen:
            out.append(f"extensionality: {seen[mem]} and {x} have the same members")
        else:
            seen[mem] = x
    for x in _cyclic(m.elements, m.membership):
        out.append(f"well-foundedness: {x} lies on a membership cycle")
    return out


def _cyclic(elements: Sequence[str], membership: Iterable[tuple[str, str]]) -> list[str]:
    """Elements left over by Kahn's algorithm, i.e. on or above a cycle."""
    preds: dict[str, set[str]] = {x: set() for x in elements}
    succs: dict[str, set[str]] = {x: set() for x in elements}
    for a, b in membership:
        if a in preds and b in preds:
            preds[b].add(a)
            succs[a].add(b)
    indeg = {x: len(preds[x]) for x in elements}
    queue = [x for x in elements if indeg[x] == 0]
    done = set()
    while queue:
        x = queue.pop()
        done.add(x)
        for y in succs[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                queue.append(y)
    return [x for x in elements if x not in done]


def eval_classical(m: ClassicalSetModel, f: Formula, env: Mapping[str, str] | None = None) -> bool:
    check_language(f, SET)
    s = Structure(m.elements, {IN: m.membership})
    return evaluate(s, f, env or {})


def cardinality_sentence(n: int, exact: bool = False) -> Formula:
    """At least ``n`` distinct elements; with ``exact``, also not ``n + 1``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    xs = [f"x{i}" for i in range(1, n + 1)]
    body = conj(Not(Eq(xs[i], xs[j])) for i in range(n) for j in range(i + 1, n))
    e = exists_all(xs, body)
    if exact:
        return And(e, Not(cardinality_sentence(n + 1)))
    return e


# ---------------------------------------------------------------------------
# Kripke models


class SetKripkeModel:
    """A finite Kripke model for the language of set theory.

    ``transitions`` must give f_vw at least along covering edges; the rest is
    filled in by composition along a path.  Values are treated as immutable.
    """

    def __init__(self, nodes: Sequence[str], cover: Iterable[tuple[str, str]],
                 domains: Mapping[str, Sequence[str]],
                 transitions: Mapping[tuple[str, str], Mapping[str, str]],
                 membership: Mapping[str, Iterable[tuple[str, str]]]):
        self.nodes = tuple(nodes)
        if not self.nodes:
            raise ModelError("a model needs at least one node")
        if len(set(self.nodes)) != len(self.nodes):
            raise ModelError("duplicate node ids")
        self.cover = tuple(tuple(e) for e in cover)
        self.order = transitive_closure(self.nodes, self.cover)
        self.up = {v: tuple(w for w in self.nodes if (v, w) in self.order) for v in self.nodes}
        self.maximal_up = {v: tuple(w for w in self.up[v] if len(self.up[w]) == 1) for v in self.nodes}
        self.domains = {}
        for v in self.nodes:
            if v not in domains or not domains[v]:
                raise ModelError(f"node {v} has an empty domain")
            d = tuple(domains[v])
            if len(set(d)) != len(d):
                raise ModelError(f"duplicate element ids at node {v}")
            self.domains[v] = d
        self.membership = {}
        for v in self.nodes:
            rel = frozenset(tuple(p) for p in membership.get(v, ()))
            dom = set(self.domains[v])
            for a, b in rel:
                if a not in dom or b not in dom:
                    raise ModelError(f"membership ({a}, {b}) at {v} uses an unknown element")
            self.membership[v] = rel
        self.transitions = self._complete_transitions(transitions)
        self._members = {
            v: {b: frozenset(a for a, c in self.membership[v] if c == b) for b in self.domains[v]}
            for v in self.nodes
        }
        self._memo: dict = {}

    def _complete_transitions(self, given):
        out: dict[tuple[str, str], dict[str, str]] = {}
        for (v, w), f in given.items():
            if (v, w) not in self.order:
                raise ModelError(f"transition {v}->{w} between unordered nodes")
            out[(v, w)] = dict(f)
        for v in self.nodes:
            out.setdefault((v, v), {a: a for a in self.domains[v]})
        succ: dict[str, list[str]] = {v: [] for v in self.nodes}
        for a, b in self.cover:
            succ[a].append(b)
            if (a, b) not in out:
                raise ModelError(f"missing transition along covering edge {a}->{b}")
        # fill by breadth-first composition from each node
        for v in self.nodes:
            frontier = [v]
            reached = {v}
            while frontier:
                nxt = []
                for u in frontier:
                    for w in succ[u]:
                        if w in reached:
                            continue
                        reached.add(w)
                        if (v, w) not in out:
                            f1, f2 = out[(v, u)], out[(u, w)]
                            out[(v, w)] = {a: f2[f1[a]] for a in self.domains[v]}
                        nxt.append(w)
                frontier = nxt
        for (v, w), f in out.items():
            dv, dw = set(self.domains[v]), set(self.domains[w])
            if set(f) != dv:
                raise ModelError(f"transition {v}->{w} is not total on D_{v}")
            if not set(f.values()) <= dw:
                raise ModelError(f"transition {v}->{w} leaves D_{w}")
        return out

    # -- structure ---------------------------------------------------------

    def leq(self, v: str, w: str) -> bool:
        return (v, w) in self.order

    def roots(self) -> list[str]:
        return [v for v in self.nodes if not any((u, v) in self.order for u in self.nodes if u != v)]

    def members(self, v: str, b: str) -> frozenset[str]:
        return self._members[v][b]

    def transport(self, v: str, w: str, env: Mapping[str, str]) -> dict[str, str]:
        f = self.transitions[(v, w)]
        return {x: f[a] for x, a in env.items()}

    def find_set(self, v: str, members: Iterable[str]) -> str | None:
        """The element of D_v whose E_v-members are exactly ``members``, if any."""
        target = frozenset(members)
        for b in self.domains[v]:
            if self._members[v][b] == target:
                return b
        return None

    def ranks(self, v: str) -> dict[str, int]:
        """Von Neumann rank of each element of D_v under E_v."""
        cyc = _cyclic(self.domains[v], self.membership[v])
        if cyc:
            raise ModelError(f"membership at {v} is not well-founded")
        out: dict[str, int] = {}

        def rank(b):
            if b not in out:
                out[b] = max((rank(a) + 1 for a in self._members[v][b]), default=0)
            return out[b]

        for b in self.domains[v]:
            rank(b)
        return out

    def restrict(self, nodes: Iterable[str]) -> SetKripkeModel:
        keep = [v for v in self.nodes if v in set(nodes)]
        ks = set(keep)
        order = {(a, b) for a, b in self.order if a in ks and b in ks and a != b}
        cover = [(a, b) for a, b in sorted(order)
                 if not any((a, c) in order and (c, b) in order for c in ks)]
        return SetKripkeModel(
            keep, cover, {v: self.domains[v] for v in keep},
            {(a, b): f for (a, b), f in self.transitions.items() if a in ks and b in ks},
            {v: self.membership[v] for v in keep},
        )

    def data(self) -> tuple:
        """Canonical content used for exact comparison."""
        return (
            tuple(sorted(self.nodes)),
            tuple(sorted((a, b) for a, b in self.order)),
            tuple(sorted((v, tuple(d)) for v, d in self.domains.items())),
            tuple(sorted(((v, w), tuple(sorted(f.items()))) for (v, w), f in self.transitions.items())),
            tuple(sorted((v, tuple(sorted(r))) for v, r in self.membership.items())),
        )

    def __eq__(self, other):
        if not isinstance(other, SetKripkeModel):
            return NotImplemented
        return self.data() == other.data()

    def __hash__(self):
        return hash(self.data())

    def __repr__(self):
        sizes = ", ".join(f"{v}:{len(self.domains[v])}" for v in self.nodes)
        return f"SetKripkeModel({sizes})"

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "cover": [list(e) for e in self.cover],
            "domains": {v: list(d) for v, d in self.domains.items()},
            "transitions": {f"{v}->{w}": dict(f) for (v, w), f in self.transitions.items() if v != w},
            "membership": {v: sorted(list(p) for p in r) for v, r in self.membership.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> SetKripkeModel:
        trans = {}
        for key, f in data.get("transitions", {}).items():
            v, sep, w = key.partition("->")
            if not sep:
                raise ModelError(f"bad transition key {key!r}")
            trans[(v, w)] = f
        return cls(
            data["nodes"], [tuple(e) for e in data.get("cover", [])], data["domains"], trans,
            {v: [tuple(p) for p in r] for v, r in data.get("membership", {}).items()},
        )


def as_kripke(m: ClassicalSetModel, node: str = "v") -> SetKripkeModel:
    return SetKripkeModel([node], [], {node: m.elements}, {}, {node: m.membership})


# ---------------------------------------------------------------------------
# Forcing


@lru_cache(maxsize=None)
def _fv_sorted(f: Formula) -> tuple[str, ...]:
    return tuple(sorted(free_vars(f)))


def _flat_and(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _flat_and(f.left) + _flat_and(f.right)
    return [f]


@lru_cache(maxsize=None)
def miniscope(f: Formula) -> Formula:
    """Push conjuncts of an existential block under the innermost quantifier
    they mention.  Equivalent in every Kripke model; it lets the evaluator
    prune searches such as the cardinality sentences."""
    match f:
        case Exists():
            block = []
            g = f
            while isinstance(g, Exists):
                block.append(g.var)
                g = g.body
            if len(set(block)) != len(block):
                return Exists(f.var, miniscope(f.body))
            parts = [miniscope(c) for c in _flat_and(g)]
            levels: list[list[Formula]] = [[] for _ in range(len(block) + 1)]
            for c in parts:
                fv = free_vars(c)
                idx = max((i + 1 for i, x in enumerate(block) if x in fv), default=0)
                levels[idx].append(c)
            inner: Formula | None = None
            for i in range(len(block), 0, -1):
                body_parts = levels[i] + ([inner] if inner is not None else [])
                inner = Exists(block[i - 1], conj(body_parts))
            out = levels[0] + [inner]
            return conj(out)
        case Not(b):
            return Not(miniscope(b))
        case And(a, b) | Or(a, b) | Implies(a, b):
            return type(f)(miniscope(a), miniscope(b))
        case Forall(v, b):
            return Forall(v, miniscope(b))
    return f


def _bounding(u: str, conjuncts: list[Formula]) -> tuple[str, list[Formula]] | None:
    for i, c in enumerate(conjuncts):
        if isinstance(c, Atom) and c.pred == IN and c.args[0] == u and c.args[1] != u:
            return c.args[1], conjuncts[:i] + conjuncts[i + 1:]
    return None


class _Forcer:
    def __init__(self, m: SetKripkeModel, shortcut: bool):
        self.m = m
        self.shortcut = shortcut
        key = ("memo", shortcut)
        if key not in m._memo:
            m._memo[key] = {}
        self.memo = m._memo[key]

    def force(self, v: str, f: Formula, env: Mapping[str, str]) -> bool:
        fv = _fv_sorted(f)
        key = (v, f, tuple(env[x] for x in fv))
        r = self.memo.get(key)
        if r is None:
            r = self._force(v, f, {x: env[x] for x in fv})
            self.memo[key] = r
        return r

    def _force(self, v: str, f: Formula, env: dict[str, str]) -> bool:
        m = self.m
        match f:
            case Top():
                return True
            case Bot():
                return False
            case Atom(p, (a, b)) if p == IN:
                return (env[a], env[b]) in m.membership[v]
            case Atom(p, (a, b)) if p == EQ:
                return env[a] == env[b]
            case Atom(p, _):
                raise FormulaError(f"predicate {p} is not in the set-theoretic language")
            case And(a, b):
                return self.force(v, a, env) and self.force(v, b, env)
            case Or(a, b):
                return self.force(v, a, env) or self.force(v, b, env)
            case Not(a):
                # by persistence some later node forces a iff some maximal one does
                above = m.maximal_up[v] if self.shortcut else m.up[v]
                return not any(self.force(w, a, m.transport(v, w, env)) for w in above)
            case Implies(a, b):
                for w in m.up[v]:
                    ew = m.transport(v, w, env)
                    if self.force(w, a, ew) and not self.force(w, b, ew):
                        return False
                return True
            case Exists(u, body):
                bound = _bounding(u, _flat_and(body))
                if bound is not None and bound[0] in env:
                    t, rest = bound
                    candidates = m.members(v, env[t])
                    body = conj(rest)
                else:
                    candidates = m.domains[v]
                return any(self.force(v, body, {**env, u: d}) for d in candidates)
            case Forall(u, body):
                rest_body = body
                bound = None
                if isinstance(body, Implies):
                    bound = _bounding(u, _flat_and(body.left))
                    if bound is not None and bound[0] in env:
                        rest_body = Implies(conj(bound[1]), body.right) if bound[1] else body.right
                    else:
                        bound = None
                for w in m.up[v]:
                    ew = m.transport(v, w, env)
                    candidates = m.members(w, ew[bound[0]]) if bound is not None else m.domains[w]
                    for d in candidates:
                        if not self.force(w, rest_body, {**ew, u: d}):
                            return False
                return True
        raise TypeError(f"not a formula: {f!r}")


def force_set(m: SetKripkeModel, v: str, f: Formula, env: Mapping[str, str] | None = None,
              shortcut: bool = True) -> bool:
    """Whether node ``v`` forces ``f`` under ``env``.

    ``shortcut`` evaluates negations at maximal nodes only, which is sound for
    coherent models; pass False for the literal clause.
    """
    if v not in m.domains:
        raise ModelError(f"unknown node {v}")
    env = dict(env or {})
    missing = free_vars(f) - env.keys()
    if missing:
        raise FormulaError(f"unbound variables {sorted(missing)}")
    dom = set(m.domains[v])
    for x, a in env.items():
        if a not in dom:
            raise ModelError(f"{x} = {a} is not an element of D_{v}")
    return _Forcer(m, shortcut).force(v, miniscope(f), env)


def forced_everywhere(m: SetKripkeModel, f: Formula) -> bool:
    return all(force_set(m, v, f) for v in m.roots())


# ---------------------------------------------------------------------------
# Coherence


def check_coherence(m: SetKripkeModel) -> list[str]:
    out = []
    for v in m.nodes:
        f = m.transitions[(v, v)]
        if any(f[a] != a for a in m.domains[v]):
            out.append(f"f_{v}{v} is not the identity")
    for u in m.nodes:
        for v in m.up[u]:
            for w in m.up[v]:
                fuv, fvw, fuw = m.transitions[(u, v)], m.transitions[(v, w)], m.transitions[(u, w)]
                for a in m.domains[u]:
                    if fvw[fuv[a]] != fuw[a]:
                        out.append(f"f_{v}{w} . f_{u}{v} differs from f_{u}{w} at {a}")
                        break
    for v in m.nodes:
        for w in m.up[v]:
            f = m.transitions[(v, w)]
            for a, b in sorted(m.membership[v]):
                if (f[a], f[b]) not in m.membership[w]:
                    out.append(f"membership {a} in {b} at {v} is lost at {w}")
    return out


# ---------------------------------------------------------------------------
# Disjoint unions and relabelling


def disjoint_union(ms: Sequence[SetKripkeModel], tags: Sequence[str] | None = None) -> SetKripkeModel:
    """Side-by-side union; node ``v`` of component ``i`` becomes ``m{i}.v``."""
    if not ms:
        raise ValueError("need at least one model")
    tags = list(tags) if tags is not None else [f"m{i}" for i in range(len(ms))]
    nodes, cover, domains, trans, mem = [], [], {}, {}, {}
    for tag, m in zip(tags, ms):
        name = {v: f"{tag}.{v}" for v in m.nodes}
        nodes += [name[v] for v in m.nodes]
        cover += [(name[a], name[b]) for a, b in m.cover]
        domains.update({name[v]: m.domains[v] for v in m.nodes})
        trans.update({(name[a], name[b]): f for (a, b), f in m.transitions.items()})
        mem.update({name[v]: m.membership[v] for v in m.nodes})
    return SetKripkeModel(nodes, cover, domains, trans, mem)


def relabel_nodes(m: SetKripkeModel, mapping: Mapping[str, str]) -> SetKripkeModel:
    name = {v: mapping.get(v, v) for v in m.nodes}
    if len(set(name.values())) != len(name):
        raise ModelError("relabelling merges nodes")
    return SetKripkeModel(
        [name[v] for v in m.nodes], [(name[a], name[b]) for a, b in m.cover],
        {name[v]: d for v, d in m.domains.items()},
        {(name[a], name[b]): f for (a, b), f in m.transitions.items()},
        {name[v]: r for v, r in m.membership.items()},
    )


# ---------------------------------------------------------------------------
# Set-theoretic abbreviations (all quantifiers bounded)


def _fresh(base: str, avoid: set[str]) -> str:
    v = fresh_var(base, avoid)
    avoid.add(v)
    return v


def ball(u: str, t: str, body: Formula) -> Formula:
    """forall u. (u in t -> body)"""
    return Forall(u, Implies(In(u, t), body))


def bex(u: str, t: str, body: Formula) -> Formula:
    """exists u. (u in t & body)"""
    return Exists(u, And(In(u, t), body))


def subset(a: str, b: str, avoid: Iterable[str] = ()) -> Formula:
    av = {a, b, *avoid}
    z = _fresh("s", av)
    return ball(z, a, In(z, b))


def is_pair_of(u: str, s: str, t: str, avoid: Iterable[str] = ()) -> Formula:
    """u = {s, t}"""
    av = {u, s, t, *avoid}
    m = _fresh("m", av)
    return conj([In(s, u), In(t, u), ball(m, u, Or(Eq(m, s), Eq(m, t)))])


def is_ordered_pair(p: str, s: str, t: str, avoid: Iterable[str] = ()) -> Formula:
    """p = {{s}, {s, t}}"""
    av = {p, s, t, *avoid}
    u = _fresh("k", av)
    single = is_pair_of(u, s, s, av)
    double = is_pair_of(u, s, t, av)
    return conj([bex(u, p, single), bex(u, p, double), ball(u, p, Or(single, double))])


def is_function(f: str, a: str, b: str, avoid: Iterable[str] = ()) -> Formula:
    """f is (the graph of) a total function from a to b."""
    av = {f, a, b, *avoid}
    p, p2, s, t, t2 = (_fresh(x, av) for x in ("p", "p", "i", "j", "j"))
    into = ball(p, f, bex(s, a, bex(t, b, is_ordered_pair(p, s, t, av))))
    total = ball(s, a, bex(t, b, bex(p, f, is_ordered_pair(p, s, t, av))))
    single = ball(s, a, ball(t, b, ball(t2, b, ball(p, f, ball(p2, f, Implies(
        And(is_ordered_pair(p, s, t, av), is_ordered_pair(p2, s, t2, av)), Eq(t, t2)))))))
    return conj([into, total, single])


def is_natural(y: str, k: int, avoid: Iterable[str] = ()) -> Formula:
    """y is the von Neumann natural k."""
    av = {y, *avoid}
    m = _fresh("m", av)
    if k == 0:
        return ball(m, y, BOT)
    u = _fresh("n", av)
    return bex(u, y, conj([is_natural(u, k - 1, av), ball(m, y, Or(In(m, u), Eq(m, u))), ball(m, u, In(m, y))]))


def is_successor(y: str, n: str, avoid: Iterable[str] = ()) -> Formula:
    """y = n u {n}"""
    av = {y, n, *avoid}
    m = _fresh("m", av)
    return Forall(m, Iff(In(m, y), Or(In(m, n), Eq(m, n))))


def is_delta0(f: Formula) -> bool:
    """Every quantifier is bounded: forall u. (u in t & .. -> B) or exists u. (u in t & ..)."""
    match f:
        case Forall(u, Implies(a, b)):
            return _bounding(u, _flat_and(a)) is not None and is_delta0(a) and is_delta0(b)
        case Forall():
            return False
        case Exists(u, body):
            return _bounding(u, _flat_and(body)) is not None and is_delta0(body)
        case Not(b):
            return is_delta0(b)
        case And(a, b) | Or(a, b) | Implies(a, b):
            return is_delta0(a) and is_delta0(b)
    return True


# ---------------------------------------------------------------------------
# Axiom checking


AXIOMS = ("Extensionality", "Pair", "Union", "EmptySet", "Separation", "BoundedSeparation",
          "Replacement", "PowerSet", "EInduction", "Exponentiation", "StrongInfinity")


@dataclass(frozen=True)
class AxiomInstance:
    """An axiom as ``forall outer. exists witness. body`` (either part may be empty)."""

    name: str
    outer: tuple[str, ...]
    witness: str | None
    body: Formula

    def sentence(self) -> Formula:
        inner = Exists(self.witness, self.body) if self.witness else self.body
        return forall_all(self.outer, inner)


def _scheme_params(phi: Formula, keep: Sequence[str], reserved: set[str]) -> tuple[Formula, tuple[str, ...]]:
    """Rename the parameters of ``phi`` (free variables besides ``keep``) to q0, q1, ..."""
    params = sorted(free_vars(phi) - set(keep))
    avoid = set(reserved) | all_vars(phi) | set(keep)
    mapping = {}
    for p in params:
        mapping[p] = _fresh("q", avoid)
    return rename_vars(phi, mapping), tuple(mapping[p] for p in params)


def _clear_bound(phi: Formula, reserved: set[str]) -> Formula:
    """Rename bound variables of ``phi`` that clash with ``reserved``."""
    match phi:
        case Forall(v, b) | Exists(v, b):
            b = _clear_bound(b, reserved)
            if v in reserved:
                nv = fresh_var(v, reserved | all_vars(b))
                b = rename_vars(b, {v: nv})
                v = nv
            return type(phi)(v, b)
        case Not(b):
            return Not(_clear_bound(b, reserved))
        case And(a, b) | Or(a, b) | Implies(a, b):
            return type(phi)(_clear_bound(a, reserved), _clear_bound(b, reserved))
    return phi


def axiom_instance(name: str, phi: Formula | None = None, var: str | None = None, n_max: int = 2) -> AxiomInstance:
    """Build one axiom (or scheme instance) in the displayed ``forall..exists..`` shape.

    Scheme formulas: Separation and BoundedSeparation take phi(z) (``var``
    defaults to z), Replacement phi(y, z), EInduction phi(x); other free
    variables are parameters and are quantified universally in front.
    """
    if name == "Extensionality":
        return AxiomInstance(name, ("x", "y"), None,
                             Iff(Eq("x", "y"), Forall("z", Iff(In("z", "x"), In("z", "y")))))
    if name == "Pair":
        return AxiomInstance(name, ("x", "y"), "z",
                             Forall("w", Iff(In("w", "z"), Or(Eq("w", "x"), Eq("w", "y")))))
    if name == "Union":
        return AxiomInstance(name, ("x",), "y", Forall("z", Iff(In("z", "y"), bex("w", "x", In("z", "w")))))
    if name == "EmptySet":
        return AxiomInstance(name, (), "x", Forall("y", Not(In("y", "x"))))
    if name == "PowerSet":
        return AxiomInstance(name, ("x",), "y", Forall("w", Iff(In("w", "y"), subset("w", "x"))))
    if name == "Exponentiation":
        return AxiomInstance(name, ("x", "y"), "z", Forall("w", Iff(In("w", "z"), is_function("w", "x", "y"))))
    if name == "StrongInfinity":
        # bounded form: some set contains the naturals 0..n_max
        body = conj(bex("y", "x", is_natural("y", k, {"x"})) for k in range(n_max + 1))
        return AxiomInstance(name, (), "x", body)
    if name in ("Separation", "BoundedSeparation"):
        if phi is None:
            raise ValueError(f"{name} needs a formula")
        check_language(phi, SET)
        v = var or "z"
        if name == "BoundedSeparation" and not is_delta0(phi):
            raise ValueError("BoundedSeparation needs a formula whose quantifiers are all bounded")
        reserved = {"x", "y", "z"}
        body_phi, params = _scheme_params(phi, [v], reserved)
        body_phi = _clear_bound(rename_vars(body_phi, {v: "z"}), reserved | set(params))
        return AxiomInstance(f"{name}", params + ("x",), "y",
                             Forall("z", Iff(In("z", "y"), And(In("z", "x"), body_phi))))
    if name == "Replacement":
        if phi is None:
            raise ValueError("Replacement needs a formula phi(y, z)")
        check_language(phi, SET)
        reserved = {"x", "y", "z", "w", "z1"}
        body_phi, params = _scheme_params(phi, ["y", "z"], reserved)
        body_phi = _clear_bound(body_phi, reserved | set(params))
        phi_z1 = rename_vars(body_phi, {"z": "z1"})
        unique = Exists("z", And(body_phi, Forall("z1", Implies(phi_z1, Eq("z1", "z")))))
        concl = Exists("w", ball("y", "x", bex("z", "w", body_phi)))
        return AxiomInstance(name, params + ("x",), None, Implies(ball("y", "x", unique), concl))
    if name == "EInduction":
        if phi is None:
            raise ValueError("EInduction needs a formula phi(x)")
        check_language(phi, SET)
        reserved = {"x", "y"}
        body_phi, params = _scheme_params(phi, ["x"], reserved)
        body_phi = _clear_bound(body_phi, reserved | set(params))
        phi_y = rename_vars(body_phi, {"x": "y"})
        hyp = Forall("x", Implies(ball("y", "x", phi_y), body_phi))
        return AxiomInstance(name, params, None, Implies(hyp, Forall("x", body_phi)))
    raise ValueError(f"unsupported axiom {name!r}; choose from {', '.join(AXIOMS)}")


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    node: str
    rank_bound: int
    sentence: Formula
    checked: int
    failures: tuple[dict, ...]
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        from .formula import render_formula

        return {
            "axiom": self.axiom,
            "node": self.node,
            "rank_bound": self.rank_bound,
            "sentence": render_formula(self.sentence),
            "instances_checked": self.checked,
            "passed": self.ok,
            "failures": list(self.failures),
            "notes": list(self.notes),
        }


def check_axiom(m: SetKripkeModel, axiom: str | AxiomInstance, v: str, rank_bound: int,
                phi: Formula | None = None, var: str | None = None, n_max: int = 2) -> AxiomReport:
    """Graded check of an axiom at ``v``.

    Leading universal quantifiers range over elements of rank at most
    ``rank_bound`` at every node above ``v``; the witness ranges over rank at
    most ``rank_bound + 1``; the body is evaluated by full forcing.
    """
    inst = axiom if isinstance(axiom, AxiomInstance) else axiom_instance(axiom, phi, var, n_max)
    if v not in m.domains:
        raise ModelError(f"unknown node {v}")
    failures = []
    checked = 0
    notes = []
    if inst.name == "StrongInfinity":
        notes.append(f"bounded form: some set contains the naturals 0..{n_max}; least-ness not checked")
    for w in m.up[v] if inst.outer else (v,):
        ranks = m.ranks(w)
        low = [a for a in m.domains[w] if ranks[a] <= rank_bound]
        wit = [a for a in m.domains[w] if ranks[a] <= rank_bound + 1]
        for combo in itertools.product(low, repeat=len(inst.outer)):
            env = dict(zip(inst.outer, combo))
            checked += 1
            if inst.witness is None:
                ok = force_set(m, w, inst.body, env)
            else:
                ok = any(force_set(m, w, inst.body, {**env, inst.witness: d}) for d in wit)
            if not ok:
                failures.append({"node": w, "assignment": env})
    return AxiomReport(inst.name, v, rank_bound, inst.sentence(), checked, tuple(failures), tuple(notes))


# ---------------------------------------------------------------------------
# Random models for property tests


def random_set_model(rng: random.Random, max_nodes: int = 4, max_domain: int = 3,
                     new_elements: int = 2) -> SetKripkeModel:
    """A random coherent model on a random rooted tree.

    Children receive the image of the parent's domain under a random map
    (which may merge elements) plus a few fresh elements; membership is the
    image of the parent's plus random extra pairs.
    """
    n = rng.randint(1, max_nodes)
    nodes = [f"k{i}" for i in range(n)]
    parent = {nodes[i]: nodes[rng.randrange(i)] for i in range(1, n)}
    domains: dict[str, list[str]] = {}
    mem: dict[str, set[tuple[str, str]]] = {}
    trans: dict[tuple[str, str], dict[str, str]] = {}
    counter = itertools.count()
    root = nodes[0]
    domains[root] = [f"e{next(counter)}" for _ in range(rng.randint(1, max_domain))]
    mem[root] = {(a, b) for a in domains[root] for b in domains[root] if rng.random() < 0.3}
    for v in nodes[1:]:
        p = parent[v]
        targets: list[str] = []
        f = {}
        for a in domains[p]:
            if targets and rng.random() < 0.25:
                f[a] = rng.choice(targets)
            else:
                b = f"e{next(counter)}"
                targets.append(b)
                f[a] = b
        extra = [f"e{next(counter)}" for _ in range(rng.randint(0, new_elements))]
        domains[v] = targets + extra
        rel = {(f[a], f[b]) for a, b in mem[p]}
        rel |= {(a, b) for a in domains[v] for b in domains[v] if rng.random() < 0.15}
        mem[v] = rel
        trans[(p, v)] = f
    cover = [(parent[v], v) for v in nodes[1:]]
    return SetKripkeModel(nodes, cover, domains, trans, mem)
