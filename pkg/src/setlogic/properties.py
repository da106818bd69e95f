"""Seeded property suites over random models: persistence and coherence."""

from __future__ import annotations

import random
from typing import Iterable

from .corpus import random_prop_upto, random_set_formula
from .formula import Formula, free_vars, render_formula
from .kripke_prop import check_persistence, random_prop_model
from .kripke_set import (
    SetKripkeModel, as_kripke, check_coherence, disjoint_union, force_set, ordinal_model,
    random_set_model, vrank_model,
)
from .root_extension import RootExtension, RootExtensionConfig, restriction_identity


def set_persistence_violations(m: SetKripkeModel, f: Formula) -> list[dict]:
    """Nodes v <= w with v forcing f[env] but w not forcing f[transported env]."""
    xs = sorted(free_vars(f))
    out = []
    for v in m.nodes:
        for env in _envs(m, v, xs):
            if not force_set(m, v, f, env):
                continue
            for w in m.up[v]:
                if not force_set(m, w, f, m.transport(v, w, env)):
                    out.append({"formula": render_formula(f), "lower": v, "upper": w, "env": env})
    return out


def shortcut_disagreements(m: SetKripkeModel, f: Formula) -> list[dict]:
    xs = sorted(free_vars(f))
    out = []
    for v in m.nodes:
        for env in _envs(m, v, xs):
            if force_set(m, v, f, env) != force_set(m, v, f, env, shortcut=False):
                out.append({"formula": render_formula(f), "node": v, "env": env})
    return out


def _envs(m: SetKripkeModel, v: str, xs: list[str]) -> Iterable[dict[str, str]]:
    envs: list[dict[str, str]] = [{}]
    for x in xs:
        envs = [{**e, x: a} for e in envs for a in m.domains[v]]
    return envs


def _random_leaf(rng: random.Random):
    return vrank_model(rng.randint(1, 3)) if rng.random() < 0.5 else ordinal_model(rng.randint(1, 3))


def run_property_suite(seed: int = 0, cases: int = 1000) -> dict:
    """``cases`` random cases split over four families; every violation is reported."""
    rng = random.Random(seed)
    counts = {"prop-persistence": 0, "set-persistence": 0, "set-coherence": 0, "extension-coherence": 0}
    violations: list[dict] = []
    families = list(counts)
    for i in range(cases):
        fam = families[i % len(families)]
        counts[fam] += 1
        if fam == "prop-persistence":
            m = random_prop_model(rng, ("p", "q", "r"), max_nodes=5)
            fs = [random_prop_upto(rng, ("p", "q", "r"), 9) for _ in range(5)]
            for bad in check_persistence(m, fs):
                violations.append({"family": fam, "formula": render_formula(bad.formula),
                                   "lower": bad.lower, "upper": bad.upper})
        elif fam == "set-persistence":
            m = random_set_model(rng, max_nodes=4, max_domain=3)
            free = ["x"] if rng.random() < 0.5 else []
            f = random_set_formula(rng, rng.randint(2, 7), free)
            for bad in set_persistence_violations(m, f):
                violations.append({"family": fam, **bad})
            for bad in shortcut_disagreements(m, f):
                violations.append({"family": fam, "kind": "shortcut", **bad})
        elif fam == "set-coherence":
            m = random_set_model(rng, max_nodes=5, max_domain=3)
            for msg in check_coherence(m):
                violations.append({"family": fam, "message": msg})
        else:
            leaves = [as_kripke(_random_leaf(rng), "l") for _ in range(rng.randint(1, 2))]
            base = leaves[0] if len(leaves) == 1 else disjoint_union(leaves)
            ext = RootExtension(base, RootExtensionConfig(alpha_max=rng.randint(1, 2)))
            m = ext.to_model()
            for msg in check_coherence(m):
                violations.append({"family": fam, "message": msg})
            if not restriction_identity(m, base):
                violations.append({"family": fam, "message": "restriction differs from the base model"})
            for msg in ext.validate():
                violations.append({"family": fam, "message": msg})
    return {"seed": seed, "cases": cases, "families": counts, "violations": violations,
            "passed": not violations}
