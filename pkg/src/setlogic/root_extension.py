"""Extending a set Kripke model by a new root.

An element x of the new root domain is a pair: a set x(r) of earlier root
elements and a coherent thread v -> x(v) through the old domains, such that
every y in x(r) satisfies y(v) E_v x(v).  Elements are stratified by rank:
rank 1 has x(r) empty, rank a draws x(r) from ranks below a.  The
inaccessible bound of the construction is replaced by ``alpha_max`` and
``width_cap``; all quantifiers at the root range over the elements built so
far, so root-level checks are relative to that fragment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .formula import (
    And, Atom, Eq, Exists, Forall, Formula, Iff, Implies, In, Not, Or, SET, all_vars,
    apply_assignment, check_language, conj, free_vars, fresh_var, render_formula, rename_vars,
)
from .kripke_set import (
    SetKripkeModel, _cyclic, axiom_instance, ball, bex, check_axiom, check_coherence,
    disjoint_union, force_set, is_function, is_successor, subset,
)


class WidthExceeded(RuntimeError):
    def __init__(self, rank: int, count: int, cap: int):
        self.rank = rank
        super().__init__(f"rank {rank} would add {count} elements, above the width cap {cap}")


class WitnessOverflow(RuntimeError):
    """The node-level set a witness needs does not exist in some finite domain."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class RootExtensionConfig:
    alpha_max: int = 2
    width_cap: int = 4096
    witness_mode: str = "enumerate"

    def __post_init__(self):
        if self.alpha_max < 1:
            raise ValueError("alpha_max must be at least 1")
        if self.width_cap < 1:
            raise ValueError("width_cap must be at least 1")
        if self.witness_mode not in ("enumerate", "lazy"):
            raise ValueError("witness_mode is 'enumerate' or 'lazy'")


@dataclass(frozen=True)
class RootElement:
    id: str
    members: frozenset[str]
    thread: tuple[tuple[str, str], ...]
    rank: int

    def at(self, v: str) -> str:
        return dict(self.thread)[v]

    def to_json(self) -> dict:
        return {"id": self.id, "rank": self.rank, "members": sorted(self.members, key=_id_key),
                "thread": dict(self.thread)}


def _id_key(x: str):
    return (len(x), x)


@dataclass(frozen=True)
class WitnessReport:
    kind: str
    element: RootElement
    checks: tuple[tuple[str, bool], ...]
    notes: tuple[str, ...] = ()
    fragment_relative: bool = True

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.checks)

    def to_json(self) -> dict:
        return {
            "witness": self.kind,
            "element": self.element.to_json(),
            "checks": [{"claim": c, "holds": ok} for c, ok in self.checks],
            "passed": self.ok,
            "fragment_relative": self.fragment_relative,
            "notes": list(self.notes),
        }


class RootExtension:
    """The model M+ under construction, with its registry of root elements."""

    def __init__(self, base: SetKripkeModel, cfg: RootExtensionConfig = RootExtensionConfig(),
                 root: str | None = None):
        problems = check_coherence(base)
        if problems:
            raise PreconditionError(f"base model is not coherent: {problems[0]}")
        self.base = base
        self.cfg = cfg
        if root is None:
            root = "r"
            i = 0
            while root in base.nodes:
                root = f"r{i}"
                i += 1
        elif root in base.nodes:
            raise PreconditionError(f"root name {root} is already a node")
        self.root = root
        self.old_roots = base.roots()
        self.threads = self._threads()
        self.elements: list[RootElement] = []
        self._index: dict[tuple, str] = {}
        self._by_id: dict[str, RootElement] = {}
        self._model: SetKripkeModel | None = None
        self._build(cfg.alpha_max if cfg.witness_mode == "enumerate" else 1)

    # -- construction --------------------------------------------------------

    def _threads(self) -> list[tuple[tuple[str, str], ...]]:
        """Every coherent choice of one element per old node."""
        m = self.base
        out = []
        for choice in itertools.product(*(m.domains[u] for u in self.old_roots)):
            at = dict(zip(self.old_roots, choice))
            thread = {}
            ok = True
            for v in m.nodes:
                vals = {m.transitions[(u, v)][at[u]] for u in self.old_roots if m.leq(u, v)}
                if len(vals) != 1:
                    ok = False
                    break
                thread[v] = vals.pop()
            if ok:
                out.append(tuple((v, thread[v]) for v in m.nodes))
        return out

    def _candidates(self, thread, pool: Iterable[RootElement]) -> list[RootElement]:
        m = self.base
        return [y for y in pool
                if all((a, b) in m.membership[v] for (v, a), (_, b) in zip(y.thread, thread))]

    def _build(self, alpha: int) -> None:
        for rank in range(1, alpha + 1):
            pool = list(self.elements)
            plan = []
            total = 0
            for t in self.threads:
                if rank == 1:
                    plan.append((t, [], []))
                    total += 1
                    continue
                cand = self._candidates(t, pool)
                newest = [y for y in cand if y.rank == rank - 1]
                older = [y for y in cand if y.rank < rank - 1]
                total += (1 << len(cand)) - (1 << len(older))
                plan.append((t, newest, older))
            if total > self.cfg.width_cap:
                raise WidthExceeded(rank, total, self.cfg.width_cap)
            for t, newest, older in plan:
                if rank == 1:
                    self._register(frozenset(), t)
                    continue
                cand = newest + older
                for k in range(1, len(cand) + 1):
                    for sub in itertools.combinations(cand, k):
                        if any(y.rank == rank - 1 for y in sub):
                            self._register(frozenset(y.id for y in sub), t)

    def _register(self, members: frozenset[str], thread) -> RootElement:
        key = (members, thread)
        if key in self._index:
            return self._by_id[self._index[key]]
        rank = 1 + max((self._by_id[y].rank for y in members), default=0)
        el = RootElement(f"x{len(self.elements)}", members, thread, rank)
        self.elements.append(el)
        self._index[key] = el.id
        self._by_id[el.id] = el
        self._model = None
        return el

    def element(self, eid: str) -> RootElement:
        return self._by_id[eid]

    def ensure(self, members: Iterable[str], thread: Mapping[str, str]) -> RootElement:
        """Register (or look up) the element with the given root members and thread,
        after checking the defining conditions."""
        members = frozenset(members)
        m = self.base
        for y in members:
            if y not in self._by_id:
                raise ValueError(f"unknown root element {y}")
        t = tuple((v, thread[v]) for v in m.nodes)
        if t not in set(self.threads):
            raise ValueError("thread is not coherent with the transition functions")
        for y in members:
            for (v, a), (_, b) in zip(self._by_id[y].thread, t):
                if (a, b) not in m.membership[v]:
                    raise ValueError(f"member {y} at {v} is not a member of {b}")
        return self._register(members, t)

    def to_model(self) -> SetKripkeModel:
        if self._model is None:
            m = self.base
            r = self.root
            trans = dict(m.transitions)
            for v in m.nodes:
                trans[(r, v)] = {x.id: x.at(v) for x in self.elements}
            self._model = SetKripkeModel(
                (r,) + m.nodes,
                tuple(m.cover) + tuple((r, u) for u in self.old_roots),
                {**m.domains, r: [x.id for x in self.elements]},
                trans,
                {**m.membership, r: {(y, x.id) for x in self.elements for y in x.members}},
            )
        return self._model

    def to_json(self) -> dict:
        out = self.to_model().to_json()
        out["root"] = self.root
        out["root_elements"] = [x.to_json() for x in self.elements]
        return out

    # -- witnesses -------------------------------------------------------------

    def _node_set(self, v: str, members: Iterable[str], what: str) -> str:
        b = self.base.find_set(v, members)
        if b is None:
            raise WitnessOverflow(f"{what}: no element of D_{v} has members {sorted(set(members))}")
        return b

    def _thread_of(self, sets: Mapping[str, str], what: str) -> dict[str, str]:
        m = self.base
        for v in m.nodes:
            for w in m.up[v]:
                if m.transitions[(v, w)][sets[v]] != sets[w]:
                    raise WitnessOverflow(f"{what}: node-level sets are not carried along {v}->{w}")
        return dict(sets)

    def _report(self, kind: str, el: RootElement, claims: Sequence[tuple[str, Formula, dict]],
                notes: Sequence[str] = ()) -> WitnessReport:
        model = self.to_model()
        checks = []
        for label, f, env in claims:
            checks.append((f"{label}: r forces {render_formula(f)}", force_set(model, self.root, f, env)))
        return WitnessReport(kind, el, tuple(checks), tuple(notes))

    def witness_empty(self) -> WitnessReport:
        m = self.base
        sets = {v: self._node_set(v, (), "empty set") for v in m.nodes}
        el = self.ensure((), self._thread_of(sets, "empty set"))
        return self._report("empty", el, [("no members", Forall("y", Not(In("y", "e"))), {"e": el.id})])

    def witness_pair(self, x: str, y: str) -> WitnessReport:
        m = self.base
        X, Y = self._by_id[x], self._by_id[y]
        sets = {v: self._node_set(v, (X.at(v), Y.at(v)), "pair") for v in m.nodes}
        el = self.ensure({x, y}, self._thread_of(sets, "pair"))
        f = Forall("w", Iff(In("w", "p"), Or(Eq("w", "a"), Eq("w", "b"))))
        return self._report("pair", el, [("pair", f, {"p": el.id, "a": x, "b": y})])

    def witness_union(self, x: str) -> WitnessReport:
        m = self.base
        X = self._by_id[x]
        sets = {}
        for v in m.nodes:
            mem = set()
            for z in m.members(v, X.at(v)):
                mem |= m.members(v, z)
            sets[v] = self._node_set(v, mem, "union")
        members = set()
        for y in X.members:
            members |= self._by_id[y].members
        el = self.ensure(members, self._thread_of(sets, "union"))
        f = Forall("z", Iff(In("z", "u"), bex("w", "a", In("z", "w"))))
        return self._report("union", el, [("union", f, {"u": el.id, "a": x})])

    def witness_separation(self, x: str, phi: Formula, var: str = "z",
                           params: Mapping[str, str] | None = None) -> WitnessReport:
        """Separate from x by phi(var, params); params map variables to root elements."""
        check_language(phi, SET)
        params = dict(params or {})
        extra = free_vars(phi) - {var} - params.keys()
        if extra:
            raise ValueError(f"unbound parameters {sorted(extra)}")
        model = self.to_model()
        X = self._by_id[x]
        chosen = {y for y in X.members if force_set(model, self.root, phi, {**params, var: y})}
        m = self.base
        sets = {}
        for v in m.nodes:
            pv = {k: self._by_id[e].at(v) for k, e in params.items()}
            keep = {z for z in m.members(v, X.at(v)) if force_set(model, v, phi, {**pv, var: z})}
            sets[v] = self._node_set(v, keep, "separation")
        el = self.ensure(chosen, self._thread_of(sets, "separation"))
        s, a = _fresh_names(phi, ["s", "a"], avoid={var, *params})
        f = Forall(var, Iff(In(var, s), And(In(var, a), phi)))
        env = {**params, s: el.id, a: x}
        checks = [("separation", f, env)]
        rep = self._report("separation", el, checks)
        rank_ok = el.rank <= X.rank + 1
        return WitnessReport(rep.kind, el, rep.checks + ((f"rank {el.rank} <= rank({x}) + 1 = {X.rank + 1}", rank_ok),))

    def witness_power(self, x: str) -> WitnessReport:
        model = self.to_model()
        X = self._by_id[x]
        sub = subset("w", "a")
        chosen = {y.id for y in self.elements if force_set(model, self.root, sub, {"w": y.id, "a": x})}
        m = self.base
        sets = {}
        for v in m.nodes:
            keep = {z for z in m.domains[v] if force_set(model, v, sub, {"w": z, "a": X.at(v)})}
            sets[v] = self._node_set(v, keep, "power set")
        el = self.ensure(chosen, self._thread_of(sets, "power set"))
        f = Forall("w", Iff(In("w", "p"), sub))
        return self._report("power", el, [("power set", f, {"p": el.id, "a": x})])

    def witness_replacement(self, x: str, phi: Formula, params: Mapping[str, str] | None = None) -> WitnessReport:
        """Replacement for phi(y, z) on x; phi must be functional on the members of x."""
        check_language(phi, SET)
        params = dict(params or {})
        extra = free_vars(phi) - {"y", "z"} - params.keys()
        if extra:
            raise ValueError(f"unbound parameters {sorted(extra)}")
        model = self.to_model()
        X = self._by_id[x]
        r = self.root
        (z1,) = _fresh_names(phi, ["z1"], avoid=params.keys())
        phi1 = rename_vars(phi, {"z": z1})
        unique = Exists("z", And(phi, Forall(z1, Implies(phi1, Eq(z1, "z")))))
        for y in sorted(X.members, key=_id_key):
            if not force_set(model, r, unique, {**params, "y": y}):
                raise PreconditionError(f"phi is not functional at y = {y}: r does not force exists! z. phi(y, z)")
        chosen = {z.id for z in self.elements
                  if any(force_set(model, r, phi, {**params, "y": y, "z": z.id}) for y in X.members)}
        m = self.base
        sets = {}
        for v in m.nodes:
            pv = {k: self._by_id[e].at(v) for k, e in params.items()}
            keep = {z for z in m.domains[v]
                    if any(force_set(model, v, phi, {**pv, "y": y, "z": z}) for y in m.members(v, X.at(v)))}
            sets[v] = self._node_set(v, keep, "replacement")
        el = self.ensure(chosen, self._thread_of(sets, "replacement"))
        a, w = _fresh_names(phi, ["a", "w"], avoid={"y", "z", *params})
        covers = ball("y", a, bex("z", w, phi))
        image = ball("z", w, bex("y", a, phi))
        env = {**params, a: x, w: el.id}
        return self._report("replacement", el, [("every member has an image", covers, env),
                                                ("only images", image, env)])

    def witness_exponentiation(self, a: str, b: str) -> WitnessReport:
        model = self.to_model()
        A, B = self._by_id[a], self._by_id[b]
        fun = is_function("f", "a", "b")
        r = self.root
        chosen = {g.id for g in self.elements if force_set(model, r, fun, {"f": g.id, "a": a, "b": b})}
        m = self.base
        sets = {}
        for v in m.nodes:
            keep = {g for g in m.domains[v] if force_set(model, v, fun, {"f": g, "a": A.at(v), "b": B.at(v)})}
            sets[v] = self._node_set(v, keep, "exponentiation")
        el = self.ensure(chosen, self._thread_of(sets, "exponentiation"))
        f = Forall("f", Iff(In("f", "z"), fun))
        return self._report("exponentiation", el, [("function set", f, {"z": el.id, "a": a, "b": b})],
                            (f"{len(chosen)} functions at the root",))

    def witness_strong_infinity(self, n_max: int) -> tuple[list[RootElement], WitnessReport]:
        """The chain 0_r, ..., (n_max)_r with (k+1)_r = k_r u {k_r}: a bounded approximation."""
        m = self.base
        chain = [self.witness_empty().element]
        checks = []
        model = None
        for k in range(n_max):
            prev = chain[-1]
            sets = {}
            for v in m.nodes:
                mem = set(m.members(v, prev.at(v))) | {prev.at(v)}
                sets[v] = self._node_set(v, mem, f"natural {k + 1}")
            el = self.ensure(prev.members | {prev.id}, self._thread_of(sets, f"natural {k + 1}"))
            chain.append(el)
        model = self.to_model()
        for k in range(n_max):
            f = is_successor("y", "n")
            ok = force_set(model, self.root, f, {"y": chain[k + 1].id, "n": chain[k].id})
            checks.append((f"{k + 1}_r = {k}_r u {{{k}_r}}", ok))
        report = WitnessReport("strong-infinity", chain[-1], tuple(checks),
                               (f"bounded approximation: naturals 0..{n_max} only; a finite model has no infinite set",))
        return chain, report

    def check_ein_induction(self, phi: Formula, rank_bound: int = 2) -> dict:
        """Well-foundedness of root membership plus one induction instance at the root."""
        model = self.to_model()
        r = self.root
        cyc = _cyclic(model.domains[r], model.membership[r])
        rank = {x.id: x.rank for x in self.elements}
        decreasing = all(rank[y] < rank[x] for y, x in model.membership[r])
        inst = check_axiom(model, axiom_instance("EInduction", phi), r, rank_bound)
        return {
            "well_founded": not cyc,
            "rank_decreasing": decreasing,
            "instance": inst.to_json(),
            "passed": not cyc and decreasing and inst.ok,
            "fragment_relative": True,
        }

    # -- post-hoc validation -------------------------------------------------

    def validate(self) -> list[str]:
        return check_root_elements(self.to_model(), self.root, [x.to_json() for x in self.elements])


def _fresh_names(phi: Formula, wanted: Sequence[str], avoid: Iterable[str] = ()) -> list[str]:
    """The wanted names, each replaced by a fresh one if it occurs in ``phi`` or ``avoid``."""
    taken = set(all_vars(phi)) | set(avoid)
    out = []
    for w in wanted:
        name = w if w not in taken else fresh_var(w, taken)
        taken.add(name)
        out.append(name)
    return out


def check_root_elements(model: SetKripkeModel, root: str, elements: Sequence[Mapping]) -> list[str]:
    """Independent check of the defining conditions of root elements.

    Uses only the exported model and element records: members of lower rank,
    thread values in the old domains, member threads inside the thread
    pointwise, thread carried by the transitions, membership at the root read
    off the members, and each rank the least possible.
    """
    out = []
    by_id = {e["id"]: e for e in elements}
    old = [v for v in model.nodes if v != root]
    if set(by_id) != set(model.domains[root]):
        out.append("root domain and element records differ")
    for e in elements:
        x, thread, mem = e["id"], e["thread"], set(e["members"])
        for y in mem:
            if y not in by_id:
                out.append(f"{x}: unknown member {y}")
            elif by_id[y]["rank"] >= e["rank"]:
                out.append(f"{x}: member {y} does not have smaller rank")
        least = 1 + max((by_id[y]["rank"] for y in mem if y in by_id), default=0)
        if least != e["rank"]:
            out.append(f"{x}: rank {e['rank']} is not the least stage ({least})")
        for v in old:
            if thread.get(v) not in model.domains[v]:
                out.append(f"{x}: thread value at {v} is not in D_{v}")
                continue
            if model.transitions[(root, v)][x] != thread[v]:
                out.append(f"{x}: f_r{v} disagrees with the thread")
            for y in mem:
                if y in by_id and (by_id[y]["thread"][v], thread[v]) not in model.membership[v]:
                    out.append(f"{x}: member {y} is not below it at {v}")
            for w in model.up[v]:
                if model.transitions[(v, w)][thread[v]] != thread.get(w):
                    out.append(f"{x}: thread not carried along {v}->{w}")
        root_mem = {a for a, b in model.membership[root] if b == x}
        if root_mem != mem:
            out.append(f"{x}: root membership differs from its member set")
    keys = [(frozenset(e["members"]), tuple(sorted(e["thread"].items()))) for e in elements]
    if len(set(keys)) != len(keys):
        out.append("two root elements coincide as functions")
    return out


def extend(m: SetKripkeModel, cfg: RootExtensionConfig = RootExtensionConfig(), root: str | None = None) -> SetKripkeModel:
    return RootExtension(m, cfg, root).to_model()


def restriction_identity(ext: SetKripkeModel, base: SetKripkeModel) -> bool:
    """M+ restricted to the old nodes equals M exactly."""
    return ext.restrict(base.nodes).data() == base.data()


# ---------------------------------------------------------------------------
# Demonstrations


def _single_root(m: SetKripkeModel, name: str) -> str:
    roots = m.roots()
    if len(roots) != 1:
        raise PreconditionError(f"{name} must have exactly one root")
    return roots[0]


def dp_demo(m1: SetKripkeModel, m2: SetKripkeModel, phi: Formula, psi: Formula,
            cfg: RootExtensionConfig = RootExtensionConfig(alpha_max=1)) -> dict:
    """Two models refuting phi and psi give, over their disjoint union with a
    new root, a model whose root refutes phi | psi."""
    r1, r2 = _single_root(m1, "first model"), _single_root(m2, "second model")
    if force_set(m1, r1, phi):
        raise PreconditionError("the first model forces phi at its root")
    if force_set(m2, r2, psi):
        raise PreconditionError("the second model forces psi at its root")
    ext = RootExtension(disjoint_union([m1, m2]), cfg)
    model = ext.to_model()
    r = ext.root
    facts = {
        "first root refutes phi": not force_set(model, "m0." + r1, phi),
        "second root refutes psi": not force_set(model, "m1." + r2, psi),
        "new root refutes phi": not force_set(model, r, phi),
        "new root refutes psi": not force_set(model, r, psi),
        "new root refutes phi | psi": not force_set(model, r, Or(phi, psi)),
    }
    return {
        "phi": render_formula(phi), "psi": render_formula(psi),
        "facts": facts, "passed": all(facts.values()),
        "coherent": not check_coherence(model),
        "root_domain_size": len(model.domains[r]),
        "fragment_relative": True,
    }


def visser_semantic_demo(ms: Sequence[SetKripkeModel], sigma: Mapping[str, Formula], n: int,
                         cfg: RootExtensionConfig = RootExtensionConfig(alpha_max=1),
                         As: Sequence[str] | None = None, Bs: Sequence[str] | None = None) -> dict:
    """The refutation pattern behind the admissibility of V'_n in extensible theories.

    ``sigma`` maps the atoms a1..a(n+2), b1..bn (or the given names) to
    set-theoretic sentences.  Model j must force every sigma(a_i) -> sigma(b_i)
    and refute sigma(a_j).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    As = list(As) if As is not None else [f"a{i}" for i in range(1, n + 3)]
    Bs = list(Bs) if Bs is not None else [f"b{i}" for i in range(1, n + 1)]
    if len(ms) != n + 2 or len(As) != n + 2 or len(Bs) != n:
        raise ValueError(f"need {n + 2} models, {n + 2} A-atoms and {n} B-atoms")
    sA = [apply_assignment(sigma, Atom(a, ())) for a in As]
    sB = [apply_assignment(sigma, Atom(b, ())) for b in Bs]
    imps = [Implies(a, b) for a, b in zip(sA[:n], sB)]
    roots = []
    for j, m in enumerate(ms):
        rj = _single_root(m, f"model {j + 1}")
        roots.append(rj)
        for i, imp in enumerate(imps):
            if not force_set(m, rj, imp):
                raise PreconditionError(f"model {j + 1} does not force sigma({As[i]}) -> sigma({Bs[i]})")
        if force_set(m, rj, sA[j]):
            raise PreconditionError(f"model {j + 1} forces sigma({As[j]})")
    ext = RootExtension(disjoint_union(ms), cfg)
    model = ext.to_model()
    r = ext.root
    facts = {}
    for j, a in enumerate(sA):
        facts[f"new root refutes sigma({As[j]})"] = not force_set(model, r, a)
    for i, imp in enumerate(imps):
        facts[f"new root forces sigma({As[i]}) -> sigma({Bs[i]})"] = force_set(model, r, imp)
    facts[f"new root refutes sigma({As[n]} | {As[n + 1]})"] = not force_set(model, r, Or(sA[n], sA[n + 1]))
    premise = Implies(conj(imps), Or(sA[n], sA[n + 1]))
    facts["new root refutes the substituted premise"] = not force_set(model, r, premise)
    return {
        "n": n,
        "sigma": {k: render_formula(v) for k, v in sorted(sigma.items())},
        "facts": facts,
        "passed": all(facts.values()),
        "coherent": not check_coherence(model),
        "fragment_relative": True,
    }
