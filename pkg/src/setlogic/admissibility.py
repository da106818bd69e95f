"""Admissible rules: Visser's rules, IPC saturation and refutation, CPC and CQC.

A rule ``premises / conclusions`` is admissible when every substitution that
makes all premises provable makes some conclusion provable.  For IPC the
positive side is a bounded search for a derivation from the premises using
IPC consequence, Visser's rules and the disjunction property; the negative
side searches for a substitution witnessing failure.  CPC is decided
exactly.  For CQC only the ground-substitution content is decided.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

from .formula import (
    BOT, PROP, TOP, And, Assignment, Atom, Formula, FormulaError, GroundSubstitution, Implies,
    Not, Or, Signature, apply_assignment, check_language, conj, constant_fold, disj, free_vars,
    ground_substitutions, ground_value, language_of, parse_formula, prop_atoms, render_formula,
    universal_closure,
)
from .kripke_prop import _banks, classical_value, decide_cpc, decide_ipc, tree_shapes
from .sequent import _check_prop, ipc_provable
from .structures import Structure, evaluate, structures_up_to, valid_in

IPC = "ipc"
CPC = "cpc"
CQC_GROUND = "cqc-ground"


@dataclass(frozen=True)
class Rule:
    """A pair of finite formula sets, kept sorted by rendering and deduplicated."""

    premises: tuple[Formula, ...]
    conclusions: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "premises", _normalize(self.premises))
        object.__setattr__(self, "conclusions", _normalize(self.conclusions))
        langs = {language_of(f) for f in self.premises + self.conclusions} - {PROP}
        if len(langs) > 1:
            raise FormulaError("rule mixes the set language with other predicates")
        Signature.of(*self.premises, *self.conclusions)

    @property
    def premise(self) -> Formula:
        return conj(self.premises)

    @property
    def conclusion(self) -> Formula:
        return disj(self.conclusions)

    def symbols(self) -> list[str]:
        return Signature.of(*self.premises, *self.conclusions).names()

    def render(self) -> str:
        lhs = ", ".join(render_formula(f) for f in self.premises)
        rhs = ", ".join(render_formula(f) for f in self.conclusions)
        return f"{lhs} / {rhs}"

    def __str__(self):
        return self.render()

    def to_json(self) -> dict:
        return {
            "premises": [render_formula(f) for f in self.premises],
            "conclusions": [render_formula(f) for f in self.conclusions],
        }

    @classmethod
    def from_json(cls, data: Mapping, lang: str) -> Rule:
        return cls(
            tuple(parse_formula(s, lang) for s in data.get("premises", [])),
            tuple(parse_formula(s, lang) for s in data.get("conclusions", [])),
        )

    @classmethod
    def parse(cls, premises: Sequence[str], conclusions: Sequence[str], lang: str = PROP) -> Rule:
        return cls(tuple(parse_formula(s, lang) for s in premises),
                   tuple(parse_formula(s, lang) for s in conclusions))


def _normalize(fs) -> tuple[Formula, ...]:
    uniq = {render_formula(f): f for f in fs}
    return tuple(uniq[k] for k in sorted(uniq))


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Admissible:
    trace: TraceNode | None = None
    passive: bool = False
    note: str = ""

    verdict = "admissible"

    def to_json(self) -> dict:
        out: dict = {"verdict": self.verdict, "passive": self.passive}
        if self.trace is not None:
            out["trace"] = self.trace.to_json()
            out["visser_steps"] = self.trace.visser_steps()
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class NotAdmissible:
    witness: Mapping[str, Formula]
    certificate: Mapping = field(default_factory=dict)

    verdict = "not-admissible"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": {k: render_formula(v) for k, v in sorted(self.witness.items())},
            "certificate": dict(self.certificate),
        }


@dataclass(frozen=True)
class Unknown:
    bounds: Mapping = field(default_factory=dict)

    verdict = "unknown"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "bounds": dict(self.bounds)}


Verdict = Admissible | NotAdmissible | Unknown


# ---------------------------------------------------------------------------
# Visser's rules


@dataclass(frozen=True)
class VisserSchema:
    """V_n (with a side formula C) or V'_n (without)."""

    n: int
    with_C: bool

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("Visser rules are indexed by n >= 1")

    @property
    def name(self) -> str:
        return f"V_{self.n}" if self.with_C else f"V'_{self.n}"

    def __call__(self, As: Sequence[Formula], Bs: Sequence[Formula], C: Formula | None = None) -> Rule:
        return Rule((self.premise(As, Bs, C),), (self.conclusion(As, Bs, C),))

    def _check(self, As, Bs, C):
        if len(As) != self.n + 2 or len(Bs) != self.n:
            raise ValueError(f"{self.name} needs {self.n + 2} A-components and {self.n} B-components, "
                             f"got {len(As)} and {len(Bs)}")
        if self.with_C and C is None:
            raise ValueError(f"{self.name} needs a side formula C")
        if not self.with_C and C is not None:
            raise ValueError(f"{self.name} takes no side formula")

    def antecedent(self, As, Bs) -> Formula:
        return conj(Implies(a, b) for a, b in zip(As[: self.n], Bs))

    def premise(self, As, Bs, C=None) -> Formula:
        self._check(As, Bs, C)
        p = Implies(self.antecedent(As, Bs), Or(As[self.n], As[self.n + 1]))
        return Or(p, C) if self.with_C else p

    def branches(self, As, Bs, C=None) -> list[Formula]:
        self._check(As, Bs, C)
        x = self.antecedent(As, Bs)
        out = [Implies(x, a) for a in As]
        if self.with_C:
            out.append(C)
        return out

    def conclusion(self, As, Bs, C=None) -> Formula:
        return disj(self.branches(As, Bs, C))


def visser_rule(n: int, with_C: bool = True) -> VisserSchema:
    return VisserSchema(n, with_C)


# ---------------------------------------------------------------------------
# Derivability


def derivable(rule: Rule, logic: str = IPC) -> bool:
    """``premises -> disjunction of conclusions`` is a theorem of ``logic``."""
    f = Implies(rule.premise, rule.conclusion)
    if logic == IPC:
        return ipc_provable(f)
    if logic == CPC:
        return decide_cpc(f).valid
    raise ValueError(f"unknown logic {logic!r}")


def _provable(f: Formula, logic: str) -> bool:
    if logic == IPC:
        return ipc_provable(f)
    if logic == CPC:
        return decide_cpc(f).valid
    raise ValueError(f"unknown logic {logic!r}")


def _check_rule_prop(rule: Rule) -> None:
    for f in rule.premises + rule.conclusions:
        _check_prop(f)


# ---------------------------------------------------------------------------
# Bounded saturation for IPC


@dataclass(frozen=True)
class TraceNode:
    """One node of a derivation: hypotheses plus either a closing check or a
    branching step whose premise follows from the hypotheses."""

    hypotheses: tuple[Formula, ...]
    rule: str                                   # "close", "DP" or a Visser rule name
    premise: Formula | None = None
    components: Mapping[str, object] = field(default_factory=dict)
    branch_formulas: tuple[Formula, ...] = ()
    branches: tuple[TraceNode, ...] = ()

    def visser_steps(self) -> int:
        own = 1 if self.rule.startswith("V") else 0
        return own + sum(b.visser_steps() for b in self.branches)

    def to_json(self) -> dict:
        out: dict = {"hypotheses": [render_formula(h) for h in self.hypotheses], "rule": self.rule}
        if self.premise is not None:
            out["premise"] = render_formula(self.premise)
        if self.components:
            comp = {}
            for k, v in self.components.items():
                if isinstance(v, Formula):
                    comp[k] = render_formula(v)
                elif isinstance(v, (list, tuple)):
                    comp[k] = [render_formula(x) if isinstance(x, Formula) else x for x in v]
                else:
                    comp[k] = v
            out["components"] = comp
        if self.branches:
            out["branches"] = [
                {"assume": render_formula(g), "then": b.to_json()}
                for g, b in zip(self.branch_formulas, self.branches)
            ]
        return out


def _flat(f: Formula, kind) -> list[Formula]:
    if isinstance(f, kind):
        return _flat(f.left, kind) + _flat(f.right, kind)
    return [f]


def _implication_parts(c: Formula) -> tuple[Formula, Formula]:
    match c:
        case Implies(a, b):
            return a, b
        case Not(a):
            return a, BOT
    return TOP, c


def _consequences(h: Formula, depth: int = 3) -> Iterator[Formula]:
    """Cheap IPC consequences of ``h``: conjunct splitting, currying, splitting
    conjunctive consequents.  Every yielded formula follows from ``h``."""
    yield h
    if depth == 0:
        return
    match h:
        case And(a, b):
            yield from _consequences(a, depth - 1)
            yield from _consequences(b, depth - 1)
        case Implies(x, Implies(x2, z)):
            yield from _consequences(Implies(And(x, x2), z), depth - 1)
        case Implies(x, And(y1, y2)):
            yield from _consequences(Implies(x, y1), depth - 1)
            yield from _consequences(Implies(x, y2), depth - 1)


@dataclass(frozen=True)
class _Step:
    rule: str
    premise: Formula
    branches: tuple[Formula, ...]
    components: Mapping[str, object]


def _bipartitions(items: list[Formula]) -> Iterator[tuple[list[Formula], list[Formula]]]:
    m = len(items)
    for mask in range(1, 1 << (m - 1)):
        # the first item always goes to the left group
        left = [items[0]] + [items[i] for i in range(1, m) if not (mask >> (i - 1)) & 1]
        right = [items[i] for i in range(1, m) if (mask >> (i - 1)) & 1]
        yield left, right


def _visser_steps(imp: Formula, side: Formula | None, bound: int) -> Iterator[_Step]:
    if not isinstance(imp, Implies):
        return
    conjuncts = _flat(imp.left, And)
    n = len(conjuncts)
    if n > bound:
        return
    disjuncts = _flat(imp.right, Or)
    if len(disjuncts) < 2 or len(disjuncts) > 4:
        return
    parts = [_implication_parts(c) for c in conjuncts]
    As0 = [a for a, _ in parts]
    Bs = [b for _, b in parts]
    schema = visser_rule(n, side is not None)
    for left, right in _bipartitions(disjuncts):
        As = As0 + [disj(left), disj(right)]
        yield _Step(
            schema.name,
            schema.premise(As, Bs, side),
            tuple(schema.branches(As, Bs, side)),
            {"n": n, "A": As, "B": Bs, **({"C": side} if side is not None else {})},
        )


def _steps(hyps: Sequence[Formula], bound: int) -> Iterator[_Step]:
    seen = set()
    for h in hyps:
        for f in _consequences(h):
            if f in seen:
                continue
            seen.add(f)
            if isinstance(f, Or):
                ds = _flat(f, Or)
                yield _Step("DP", f, tuple(ds), {})
                for i, d in enumerate(ds):
                    rest = ds[:i] + ds[i + 1:]
                    side = disj(rest)
                    for imp in _consequences(d, 1):
                        yield from _visser_steps(imp, side, bound)
            else:
                yield from _visser_steps(f, None, bound)


class _Saturation:
    def __init__(self, rule: Rule, bound: int, depth: int):
        self.goal = rule.conclusion
        self.bound = bound
        self.depth = depth
        self.failed: dict[frozenset, int] = {}
        self.explored = 0

    def run(self, hyps: tuple[Formula, ...], depth: int) -> TraceNode | None:
        key = frozenset(hyps)
        if ipc_provable(self.goal, hyps):
            return TraceNode(hyps, "close")
        if depth == 0 or self.failed.get(key, -1) >= depth:
            return None
        for step in _steps(hyps, self.bound):
            self.explored += 1
            if not ipc_provable(step.premise, hyps):
                continue
            subs = []
            for g in step.branches:
                if g in key:
                    sub = None
                else:
                    sub = self.run(hyps + (g,), depth - 1)
                if sub is None:
                    break
                subs.append(sub)
            else:
                return TraceNode(hyps, step.rule, step.premise, step.components, step.branches, tuple(subs))
        self.failed[key] = depth
        return None


def saturate(rule: Rule, saturation_bound: int = 2, depth: int = 3) -> TraceNode | None:
    """Search for a derivation of the conclusions from the premises with
    Visser steps of index at most ``saturation_bound`` nested at most ``depth`` deep."""
    _check_rule_prop(rule)
    return _Saturation(rule, saturation_bound, depth).run(rule.premises or (TOP,), depth)


def verify_trace(rule: Rule, trace: TraceNode) -> list[str]:
    """Independent re-check of a derivation with :func:`decide_ipc`.  Returns problems found."""
    problems: list[str] = []
    goal = rule.conclusion

    def entails(hyps, f) -> bool:
        return decide_ipc(Implies(conj(hyps), f)).valid

    def walk(node: TraceNode, hyps: tuple[Formula, ...]):
        if tuple(node.hypotheses) != hyps:
            problems.append("hypotheses do not match the branch")
        if node.rule == "close":
            if not entails(hyps, goal):
                problems.append(f"closing step does not entail the conclusion under {len(hyps)} hypotheses")
            return
        if not entails(hyps, node.premise):
            problems.append(f"{node.rule} premise {render_formula(node.premise)} does not follow")
        if node.rule == "DP":
            expected = _flat(node.premise, Or)
        else:
            c = node.components
            schema = visser_rule(c["n"], "C" in c)
            if schema.premise(c["A"], c["B"], c.get("C")) != node.premise:
                problems.append(f"{node.rule} premise is not an instance of the schema")
            expected = schema.branches(c["A"], c["B"], c.get("C"))
        if list(node.branch_formulas) != list(expected) or len(node.branches) != len(expected):
            problems.append(f"{node.rule} branches do not match the rule's conclusions")
        for g, b in zip(node.branch_formulas, node.branches):
            walk(b, hyps + (g,))

    walk(trace, rule.premises or (TOP,))
    return problems


# ---------------------------------------------------------------------------
# Refutation by substitution search


@dataclass(frozen=True)
class RefutationBudget:
    max_size: int = 3          # size of substituted formulas
    max_atoms: int = 2         # atoms available to substituted formulas
    max_candidates: int = 20000
    bank_nodes: int = 3        # trees used to prefilter candidates


def _target_atoms(symbols: list[str], k: int) -> list[str]:
    out = list(symbols[:k])
    i = 0
    while len(out) < k:
        name = f"p{i}"
        if name not in symbols and name not in out:
            out.append(name)
        i += 1
    return out


def _pool(atoms: list[str], max_size: int, banks) -> list[tuple[Formula, tuple]]:
    """Formulas over ``atoms`` up to ``max_size`` nodes, one per semantic
    fingerprint on ``banks``; constants first, then atoms, then by size."""
    from .corpus import formulas_by_size

    out = []
    seen = set()
    levels = formulas_by_size(atoms, max_size, constants=True)
    ordered = [BOT, TOP] + [Atom(a, ()) for a in atoms]
    ordered += [f for lv in levels[2:] for f in lv]
    for f in ordered:
        fp = tuple(tuple(b.eval(f)) for b in banks)
        if fp in seen:
            continue
        seen.add(fp)
        out.append((f, fp))
    return out


def _substitutions(symbols: list[str], pool: list, limit: int) -> Iterator[dict[str, tuple[Formula, tuple]]]:
    """Identity, then ground substitutions in binary order, then pool products."""
    by_formula = {f: fp for f, fp in pool}
    ident = {s: (Atom(s, ()), by_formula.get(Atom(s, ()))) for s in symbols}
    yield ident
    consts = pool[:2]
    for combo in itertools.product(consts, repeat=len(symbols)):
        yield dict(zip(symbols, combo))
    count = 0
    for combo in itertools.product(pool, repeat=len(symbols)):
        count += 1
        if count > limit:
            return
        yield dict(zip(symbols, combo))


def refute_admissibility(rule: Rule, logic: str = IPC, budget: RefutationBudget = RefutationBudget()) -> Assignment | None:
    """A substitution making every premise provable and every conclusion
    unprovable, or ``None`` when none is found within ``budget``."""
    _check_rule_prop(rule)
    symbols = sorted(set(rule.symbols()))
    atoms = _target_atoms(symbols, budget.max_atoms)
    nodes = budget.bank_nodes if logic == IPC else 1
    banks = [b for t in tree_shapes(nodes) for b in _banks(t, atoms)]
    pool = _pool(atoms, budget.max_size, banks)
    tried = set()
    for cand in _substitutions(symbols, pool, budget.max_candidates):
        key = tuple(cand[s][0] for s in symbols)
        if key in tried:
            continue
        tried.add(key)
        sigma = Assignment({s: cand[s][0] for s in symbols}, {s: 0 for s in symbols})
        if all(cand[s][1] is not None for s in symbols):
            # semantic prefilter: substituted premises valid on the small trees,
            # some substituted conclusion refuted there settles unprovability
            ok = True
            for bi, bank in enumerate(banks):
                masks = {s: list(cand[s][1][bi]) for s in symbols}
                if any(bank.eval(p, {}, masks)[0] != bank.full for p in rule.premises):
                    ok = False
                    break
            if not ok:
                continue
        if _witness_holds(rule, sigma, logic):
            return sigma
    return None


def _witness_holds(rule: Rule, sigma: Mapping[str, Formula], logic: str) -> bool:
    if not all(_provable(apply_assignment(sigma, p), logic) for p in rule.premises):
        return False
    return not any(_provable(apply_assignment(sigma, c), logic) for c in rule.conclusions)


def check_witness(rule: Rule, sigma: Mapping[str, Formula], logic: str = IPC) -> bool:
    """Re-check a refuting substitution: premises provable, all conclusions unprovable."""
    return _witness_holds(rule, sigma, logic)


def admissible_ipc(rule: Rule, saturation_bound: int = 2, depth: int = 3,
                   budget: RefutationBudget = RefutationBudget()) -> Verdict:
    """Bounded semi-decision of IPC admissibility; both definite answers are sound."""
    _check_rule_prop(rule)
    hyps = rule.premises or (TOP,)
    if derivable(rule, IPC):
        return Admissible(TraceNode(hyps, "close"))
    if unifiable_cpc(rule.premise) is None:
        # an IPC unifier would also be a classical one
        return Admissible(None, passive=True, note="premises have no unifier")
    trace = saturate(rule, saturation_bound, depth)
    if trace is not None:
        return Admissible(trace)
    sigma = refute_admissibility(rule, IPC, budget)
    if sigma is not None:
        return NotAdmissible(sigma, {
            "premises_provable": [render_formula(apply_assignment(sigma, p)) for p in rule.premises],
            "conclusions_unprovable": [render_formula(apply_assignment(sigma, c)) for c in rule.conclusions],
        })
    return Unknown({
        "saturation_bound": saturation_bound, "depth": depth,
        "max_size": budget.max_size, "max_atoms": budget.max_atoms,
        "max_candidates": budget.max_candidates,
    })


# ---------------------------------------------------------------------------
# CPC


def unifiable_cpc(f: Formula) -> GroundSubstitution | None:
    """First ground substitution (binary order) making ``f`` classically true."""
    _check_prop(f)
    sig = Signature(tuple((p, 0) for p in prop_atoms(f)))
    for tau in ground_substitutions(sig):
        if ground_value(tau, f):
            return tau
    return None


def passive(rule: Rule, oracle: Callable[[Formula], object]) -> bool:
    """The premise has no unifier according to ``oracle``."""
    return oracle(rule.premise) is None


def _cpc_projection(premise: Formula, v: Mapping[str, bool]) -> Assignment:
    """p -> (A -> p) when v(p) holds, p -> (A & p) otherwise; it unifies A and
    sends every formula F to something equivalent to A -> F or A & F."""
    return Assignment({p: (Implies(premise, Atom(p, ())) if val else And(premise, Atom(p, ())))
                       for p, val in v.items()}, {p: 0 for p in v})


def admissible_cpc(rule: Rule) -> Verdict:
    """Exact CPC admissibility.

    Passive when the premises have no unifier; otherwise admissible iff some
    conclusion follows classically from the premises.  For single-conclusion
    rules that is plain derivability.
    """
    _check_rule_prop(rule)
    A = rule.premise
    tau = unifiable_cpc(A)
    if tau is None:
        return Admissible(None, passive=True, note="premises have no unifier")
    if any(decide_cpc(Implies(A, B)).valid for B in rule.conclusions):
        return Admissible(TraceNode(rule.premises or (TOP,), "close"))
    syms = sorted(set(rule.symbols()))
    sig = Signature(tuple((p, 0) for p in syms))
    for g in ground_substitutions(sig):
        if ground_value(g, A) and not any(ground_value(g, B) for B in rule.conclusions):
            return NotAdmissible(g.assignment(), {"kind": "ground"})
    # every ground unifier of A makes some conclusion true, yet no single
    # conclusion follows from A: use the projective unifier at a model of A
    v = {p: tau[p] if p in tau else False for p in syms}
    sigma = _cpc_projection(A, v)
    if not check_witness(rule, sigma, CPC):
        raise AssertionError("projective witness failed to refute the rule")
    return NotAdmissible(sigma, {"kind": "projective"})


def ground_admissible_oracle(rule: Rule) -> bool:
    """Brute force: every ground substitution making all premises true makes some conclusion true."""
    syms = sorted(set(rule.symbols()))
    for bits in itertools.product((False, True), repeat=len(syms)):
        v = dict(zip(syms, bits))
        if all(classical_value(p, v) for p in rule.premises) and \
                not any(classical_value(c, v) for c in rule.conclusions):
            return False
    return True


# ---------------------------------------------------------------------------
# CQC ground machinery


def _fo_check(f: Formula) -> None:
    check_language(f, "first-order")


def unifiable_cqc(f: Formula) -> GroundSubstitution | None:
    """First ground substitution over the signature of ``f`` folding it to true."""
    for tau in ground_substitutions(Signature.of(f)):
        if constant_fold(tau.apply(f)) == TOP:
            return tau
    return None


def closure_vars(f: Formula) -> list[str]:
    return sorted(free_vars(f))


def sigma_construction_cqc(A: Formula, tau: GroundSubstitution) -> Assignment:
    """P(z) -> (forall x. A) -> P(z) when tau(P) is true, (forall x. A) & P(z) otherwise."""
    if not ground_value(tau, A):
        raise ValueError(f"ground substitution does not unify {render_formula(A)}")
    closed = universal_closure(A)
    table = {}
    arities = {}
    for sym, n in tau.signature:
        atom = Atom(sym, tuple(f"x{i}" for i in range(n)))
        table[sym] = Implies(closed, atom) if tau[sym] else And(closed, atom)
        arities[sym] = n
    return Assignment(table, arities)


@dataclass(frozen=True)
class ClaimReport:
    A: Formula
    tau: GroundSubstitution
    B: Formula
    sigma_B: Formula
    target: Formula
    structures_checked: int
    failures: tuple[dict, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "A": render_formula(self.A),
            "tau": self.tau.to_json(),
            "B": render_formula(self.B),
            "sigma_B": render_formula(self.sigma_B),
            "equivalent_to": render_formula(self.target),
            "structures_checked": self.structures_checked,
            "failures": list(self.failures),
        }


def verify_claim_cqc(A: Formula, tau: GroundSubstitution, B: Formula, max_domain: int = 3) -> ClaimReport:
    """Check sigma(B) <-> (forall x. A -> B) or (forall x. A & B), per tau(B), on all small structures."""
    sigma = sigma_construction_cqc(A, tau)
    missing = set(Signature.of(B).names()) - set(tau.signature.names())
    if missing:
        raise ValueError(f"ground substitution does not cover {sorted(missing)}")
    sB = apply_assignment(sigma, B)
    closed = universal_closure(A)
    target = Implies(closed, B) if ground_value(tau, B) else And(closed, B)
    claim = And(Implies(sB, target), Implies(target, sB))
    sig = tau.signature | Signature.of(B)
    failures = []
    checked = 0
    for m in structures_up_to(sig, max_domain):
        checked += 1
        if not valid_in(m, claim):
            failures.append(m.describe())
    return ClaimReport(A, tau, B, sB, target, checked, tuple(failures))


def _refuting_structure(A: Formula, B: Formula, sig: Signature, bound: int) -> Structure | None:
    ca, cb = universal_closure(A), universal_closure(B)
    for m in structures_up_to(sig, bound):
        if evaluate(m, ca) and not evaluate(m, cb):
            return m
    return None


def admissible_cqc_ground(rule: Rule, model_bound: int = 3) -> Verdict:
    """Passive rules are admissible; otherwise a finite structure refuting
    derivability refutes admissibility; otherwise Unknown."""
    A = rule.premise
    tau = unifiable_cqc(A)
    if tau is None:
        return Admissible(None, passive=True, note="premise has no ground unifier, hence no unifier")
    sig = Signature.of(A, *rule.conclusions)
    tau_full = next(t for t in ground_substitutions(sig)
                    if all(t[s] == tau[s] for s in tau) and ground_value(t, A))
    structures = []
    for B in rule.conclusions or (BOT,):
        m = _refuting_structure(A, B, sig, model_bound)
        if m is None:
            return Unknown({"model_bound": model_bound,
                            "reason": "no small structure separates premise and conclusion; "
                                      "derivability is not decided"})
        structures.append((B, m))
    sigma = sigma_construction_cqc(A, tau_full)
    for B, m in structures:
        if valid_in(m, apply_assignment(sigma, B)):
            raise AssertionError("substituted conclusion holds in its refuting structure")
    return NotAdmissible(sigma, {
        "ground_unifier": tau_full.to_json(),
        "refuting_structures": [m.describe() for _, m in structures],
        "premise_image": render_formula(apply_assignment(sigma, A)),
        "premise_image_equivalent_to": render_formula(Implies(universal_closure(A), A)),
    })
