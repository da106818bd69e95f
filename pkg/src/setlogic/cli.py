"""The ``wb`` command line.

Exit codes: 0 positive verdict, 1 negative verdict, 2 unknown or a resource
cap was hit, 3 input error.  Errors go to stderr as ``wb-error: KIND: message``.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable, Sequence

from .admissibility import (
    CPC, CQC_GROUND, IPC, Admissible, NotAdmissible, Rule, admissible_cpc, admissible_cqc_ground,
    admissible_ipc, sigma_construction_cqc, unifiable_cpc, unifiable_cqc, verify_claim_cqc,
)
from .dejongh import (
    CapExceeded, SplittingTree, TreeError, build_tree_model, dejongh_counterexample,
    distinguishing_sentences, tau, verify_translation,
)
from .formula import (
    FO, PROP, SET, Atom, Formula, FormulaError, Not, Or, Signature, ground_substitutions,
    ground_value, is_sentence, parse_formula, render_formula,
)
from .jsonio import RULE, InputError, dumps, load_json
from .kripke_prop import ModelError, PropKripkeModel, decide_cpc, decide_ipc, forcing_set
from .kripke_set import (
    AXIOMS, SetKripkeModel, as_kripke, axiom_instance, cardinality_sentence, check_axiom,
    force_set, ordinal_model, vrank_model,
)
from .properties import run_property_suite
from .root_extension import (
    PreconditionError, RootExtension, RootExtensionConfig, WidthExceeded, WitnessOverflow, dp_demo,
    visser_semantic_demo,
)

POSITIVE, NEGATIVE, UNKNOWN, INPUT_ERROR = 0, 1, 2, 3

_INPUT_ERRORS = (InputError, FormulaError, ModelError, TreeError, PreconditionError, ValueError, KeyError)
_CAP_ERRORS = (WidthExceeded, WitnessOverflow, CapExceeded)


def _formula(text: str, lang: str) -> Formula:
    return parse_formula(text, lang)


def _sentence(text: str, lang: str) -> Formula:
    f = parse_formula(text, lang)
    if not is_sentence(f):
        raise InputError(f"{text!r} has free variables; a sentence is required")
    return f


def _set_model(path: str) -> SetKripkeModel:
    data = load_json(path)
    if not isinstance(data, dict) or "domains" not in data:
        raise InputError(f"{path}: not a set Kripke model (no \"domains\")")
    data = {k: v for k, v in data.items() if k not in ("root", "root_elements")}
    return SetKripkeModel.from_json(data)


# -- commands ----------------------------------------------------------------


def cmd_prove(a) -> tuple[int, dict]:
    f = _formula(a.formula, PROP)
    v = decide_ipc(f) if a.logic == IPC else decide_cpc(f)
    out = {"logic": a.logic, "formula": render_formula(f), **v.to_json()}
    return (POSITIVE if v.valid else NEGATIVE), out


def cmd_admissible(a) -> tuple[int, dict]:
    data = load_json(a.rulefile)
    if not isinstance(data, dict) or set(data) != set(RULE["required"]):
        raise InputError(f"{a.rulefile}: a rule file has exactly the keys \"premises\" and \"conclusions\"")
    rule = Rule.from_json(data, FO if a.logic == CQC_GROUND else PROP)
    if a.logic == IPC:
        v = admissible_ipc(rule, a.saturation_bound, a.depth)
    elif a.logic == CPC:
        v = admissible_cpc(rule)
    else:
        v = admissible_cqc_ground(rule, a.model_bound)
    out = {"logic": a.logic, "rule": rule.to_json(), **v.to_json()}
    code = POSITIVE if isinstance(v, Admissible) else NEGATIVE if isinstance(v, NotAdmissible) else UNKNOWN
    return code, out


def cmd_unify(a) -> tuple[int, dict]:
    f = _formula(a.formula, PROP if a.logic == "cpc" else FO)
    tau_ = unifiable_cpc(f) if a.logic == "cpc" else unifiable_cqc(f)
    out: dict = {"logic": a.logic, "formula": render_formula(f), "unifiable": tau_ is not None}
    if tau_ is None:
        out["result"] = "NOT_UNIFIABLE"
        return NEGATIVE, out
    out["ground_unifier"] = tau_.to_json()
    return POSITIVE, out


def cmd_sigma(a) -> tuple[int, dict]:
    A = _formula(a.formula, FO)
    conclusions = [_formula(b, FO) for b in a.conclusion]
    sig = Signature.of(A, *conclusions)
    tau_ = next((t for t in ground_substitutions(sig) if ground_value(t, A)), None)
    out: dict = {"formula": render_formula(A), "unifiable": tau_ is not None}
    if tau_ is None:
        out["result"] = "NOT_UNIFIABLE"
        return NEGATIVE, out
    sigma = sigma_construction_cqc(A, tau_)
    if not conclusions:
        conclusions = [A] + [Atom(s, tuple(f"y{i}" for i in range(sig.arity(s)))) for s in sig.names()]
    reports = [verify_claim_cqc(A, tau_, B, a.max_domain) for B in conclusions]
    out.update({
        "ground_unifier": tau_.to_json(),
        "sigma": sigma.to_json(),
        "claims": [r.to_json() for r in reports],
        "passed": all(r.ok for r in reports),
    })
    return (POSITIVE if out["passed"] else NEGATIVE), out


def cmd_model_check(a) -> tuple[int, dict]:
    data = load_json(a.model)
    if not isinstance(data, dict):
        raise InputError(f"{a.model}: expected a JSON object")
    if "domains" in data:
        m = _set_model(a.model)
        f = _sentence(a.formula, SET)
        forcing = {v: force_set(m, v, f, shortcut=not a.exact) for v in m.nodes}
        kind = "set"
    else:
        m = PropKripkeModel.from_json(data)
        f = _formula(a.formula, PROP)
        s = forcing_set(m, f)
        forcing = {v: v in s for v in m.nodes}
        kind = "propositional"
    nodes = a.node or m.roots()
    for v in nodes:
        if v not in forcing:
            raise InputError(f"unknown node {v}")
    forced = all(forcing[v] for v in nodes)
    out = {"formula": render_formula(f), "kind": kind, "forcing": forcing,
           "nodes_checked": list(nodes), "forced": forced}
    return (POSITIVE if forced else NEGATIVE), out


def cmd_extend(a) -> tuple[int, dict]:
    m = _set_model(a.model)
    cfg = RootExtensionConfig(alpha_max=a.alpha, width_cap=a.cap,
                              witness_mode="lazy" if a.lazy else "enumerate")
    ext = RootExtension(m, cfg, root=a.root)
    problems = ext.validate()
    if problems:
        raise AssertionError("; ".join(problems))
    return POSITIVE, ext.to_json()


def cmd_axioms(a) -> tuple[int, dict]:
    m = _set_model(a.model)
    node = a.node or m.roots()[0]
    names = a.axiom or [n for n in AXIOMS if n not in _SCHEMES]
    phi = _formula(a.phi, SET) if a.phi else None
    reports = []
    for name in names:
        if name in _SCHEMES and phi is None:
            raise InputError(f"{name} is a scheme; pass --phi")
        inst = axiom_instance(name, phi if name in _SCHEMES else None, a.var, a.n_max)
        reports.append(check_axiom(m, inst, node, a.rank).to_json())
    passed = all(r["passed"] for r in reports)
    out = {"node": node, "rank_bound": a.rank, "reports": reports, "passed": passed}
    return (POSITIVE if passed else NEGATIVE), out


_SCHEMES = ("Separation", "BoundedSeparation", "Replacement", "EInduction")


def cmd_dp_demo(a) -> tuple[int, dict]:
    m1 = _set_model(a.m1) if a.m1 else as_kripke(vrank_model(2), "v1")
    m2 = _set_model(a.m2) if a.m2 else as_kripke(vrank_model(3), "v2")
    phi = _sentence(a.phi, SET) if a.phi else cardinality_sentence(3)
    psi = _sentence(a.psi, SET) if a.psi else Not(cardinality_sentence(3))
    out = dp_demo(m1, m2, phi, psi, RootExtensionConfig(alpha_max=a.alpha))
    return (POSITIVE if out["passed"] else NEGATIVE), out


def default_visser_setup(n: int) -> tuple[list[SetKripkeModel], dict[str, Formula]]:
    """Leaves of sizes 1..n+2; sigma(a_j) says "not exactly j elements" and
    sigma(b_i) says "fewer than i or at least i+1 elements"."""
    ms = [as_kripke(ordinal_model(j), f"l{j}") for j in range(1, n + 3)]
    sigma: dict[str, Formula] = {}
    for j in range(1, n + 3):
        sigma[f"a{j}"] = Not(cardinality_sentence(j, exact=True))
    for i in range(1, n + 1):
        sigma[f"b{i}"] = Or(Not(cardinality_sentence(i)), cardinality_sentence(i + 1))
    return ms, sigma


def cmd_visser_demo(a) -> tuple[int, dict]:
    ms, sigma = default_visser_setup(a.n)
    if a.models:
        ms = [_set_model(p) for p in a.models]
    if a.sigma:
        data = load_json(a.sigma)
        if not isinstance(data, dict):
            raise InputError(f"{a.sigma}: expected an object mapping atoms to sentences")
        sigma = {k: _sentence(v, SET) for k, v in data.items()}
    out = visser_semantic_demo(ms, sigma, a.n, RootExtensionConfig(alpha_max=a.alpha))
    return (POSITIVE if out["passed"] else NEGATIVE), out


def cmd_dejongh(a) -> tuple[int, dict]:
    cfg = RootExtensionConfig(alpha_max=a.alpha)
    tree = SplittingTree.from_json(load_json(a.tree)) if a.tree else None
    if a.formula:
        out = dejongh_counterexample(_formula(a.formula, PROP), cfg, tree)
    elif tree is not None:
        phis = distinguishing_sentences(tree)
        tr = tau(tree, phis)
        model = build_tree_model(tree, cfg)
        check = verify_translation(model, tree, tr, (), phis)
        out = {"tree": tree.to_json(), "tau": tr.to_json(),
               "sentences": {l: render_formula(f) for l, f in phis.items()}, **check,
               "domain_sizes": {v: len(model.domains[v]) for v in model.nodes}}
    else:
        raise InputError("dejongh needs --tree, --formula or both")
    return (POSITIVE if out["passed"] else NEGATIVE), out


def cmd_property(a) -> tuple[int, dict]:
    out = run_property_suite(a.seed, a.cases)
    return (POSITIVE if out["passed"] else NEGATIVE), out


# -- parser ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS so that a subcommand's default cannot undo a --json given before it
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="emit JSON instead of text")
    p = _Parser(prog="wb", parents=[common],
                                description="Admissible rules, set-theoretic Kripke models and root extensions.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(fn=fn, report=name)
        return sp

    sp = add("prove", cmd_prove, "decide a propositional formula in IPC or CPC")
    sp.add_argument("--logic", choices=[IPC, CPC], required=True)
    sp.add_argument("formula")

    sp = add("admissible", cmd_admissible, "decide admissibility of a rule file")
    sp.add_argument("--logic", choices=[IPC, CPC, CQC_GROUND], required=True)
    sp.add_argument("rulefile")
    sp.add_argument("--saturation-bound", type=int, default=2)
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--model-bound", type=int, default=3)

    sp = add("unify", cmd_unify, "search for a ground unifier")
    sp.add_argument("--logic", choices=["cpc", "cqc"], required=True)
    sp.add_argument("formula")

    sp = add("sigma", cmd_sigma, "dump the first-order sigma construction and check its claim")
    sp.add_argument("formula")
    sp.add_argument("--conclusion", action="append", default=[],
                    help="formula B to test the claim on (repeatable)")
    sp.add_argument("--max-domain", type=int, default=3)

    sp = add("model", None, "model operations")
    msub = sp.add_subparsers(dest="action", required=True)
    cp = msub.add_parser("check", parents=[common], help="forcing of a formula at the nodes of a model")
    cp.set_defaults(fn=cmd_model_check, report="model-check")
    cp.add_argument("model")
    cp.add_argument("formula")
    cp.add_argument("--node", action="append", help="node to test (default: the roots)")
    cp.add_argument("--exact", action="store_true", help="disable the negation shortcut for set models")

    sp = add("extend", cmd_extend, "add a new root below a set model")
    sp.add_argument("model")
    sp.add_argument("--alpha", type=int, default=2)
    sp.add_argument("--cap", type=int, default=4096)
    sp.add_argument("--lazy", action="store_true", help="enumerate rank 1 only")
    sp.add_argument("--root", help="name of the new root")

    sp = add("axioms", cmd_axioms, "graded axiom checks at a node")
    sp.add_argument("model")
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--node")
    sp.add_argument("--axiom", action="append", choices=AXIOMS)
    sp.add_argument("--phi", help="scheme formula for Separation, Replacement or EInduction")
    sp.add_argument("--var", help="separation variable of --phi (default z)")
    sp.add_argument("--n-max", type=int, default=2)

    sp = add("dp-demo", cmd_dp_demo, "disjunction property over a new root")
    sp.add_argument("--m1")
    sp.add_argument("--m2")
    sp.add_argument("--phi")
    sp.add_argument("--psi")
    sp.add_argument("--alpha", type=int, default=1)

    sp = add("visser-demo", cmd_visser_demo, "semantic refutation pattern for V'_n")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--models", nargs="+")
    sp.add_argument("--sigma", help="JSON file mapping a1.., b1.. to sentences")
    sp.add_argument("--alpha", type=int, default=1)

    sp = add("dejongh", cmd_dejongh, "translate a splitting tree into a set Kripke model")
    sp.add_argument("--tree")
    sp.add_argument("--formula")
    sp.add_argument("--alpha", type=int, default=1)

    sp = add("property", cmd_property, "seeded persistence and coherence suites")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=1000)
    return p


# -- rendering ---------------------------------------------------------------


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) or _flat(x) for x in v)


def _inline(v) -> str:
    return "[" + ", ".join(_inline(x) for x in v) + "]" if isinstance(v, list) else _scalar(v)


def render_text(data, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(data, dict):
        for k, v in data.items():
            if _flat(v):
                lines.append(f"{pad}{k}: {_inline(v)}")
            elif isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(data, list):
        for v in data:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(data))
    return "\n".join(lines)


def _scalar(v) -> str:
    if v is True:
        return "yes"
    if v is False:
        return "no"
    if v in ({}, []):
        return "none"
    return str(v)


def _error(kind: str, message: str, as_json: bool) -> None:
    print(f"wb-error: {kind}: {message}", file=sys.stderr)
    if as_json:
        print(dumps({"error": kind, "message": message}))


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except InputError as e:
        _error("usage", str(e), False)
        return INPUT_ERROR
    except SystemExit as e:
        return POSITIVE if e.code in (0, None) else INPUT_ERROR
    a.json = getattr(a, "json", False)
    try:
        code, out = a.fn(a)
    except _CAP_ERRORS as e:
        _error("cap", str(e), a.json)
        return UNKNOWN
    except _INPUT_ERRORS as e:
        _error("input", str(e).strip("'\""), a.json)
        return INPUT_ERROR
    if a.json:
        print(dumps(out))
    elif a.report == "unify" and not out["unifiable"]:
        print("NOT_UNIFIABLE")
    else:
        print(render_text(out))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
