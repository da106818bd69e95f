"""Admissible rules of IPC/CPC/CQC, set-theoretic Kripke models and root extensions."""

from .admissibility import (
    Admissible, NotAdmissible, Rule, Unknown, admissible_cpc, admissible_cqc_ground, admissible_ipc,
    derivable, saturate, sigma_construction_cqc, unifiable_cpc, unifiable_cqc, verify_claim_cqc,
    verify_trace, visser_rule,
)
from .dejongh import SplittingTree, build_tree_model, dejongh_counterexample, tau, verify_translation
from .formula import Assignment, Formula, parse_formula, render_formula
from .kripke_prop import PropKripkeModel, decide_cpc, decide_ipc, force_prop
from .kripke_set import ClassicalSetModel, SetKripkeModel, check_axiom, check_coherence, force_set
from .root_extension import RootExtension, RootExtensionConfig, dp_demo, extend, visser_semantic_demo

__all__ = [
    "Admissible", "Assignment", "ClassicalSetModel", "Formula", "NotAdmissible", "PropKripkeModel",
    "RootExtension", "RootExtensionConfig", "Rule", "SetKripkeModel", "SplittingTree", "Unknown",
    "admissible_cpc", "admissible_cqc_ground", "admissible_ipc", "build_tree_model", "check_axiom",
    "check_coherence", "decide_cpc", "decide_ipc", "dejongh_counterexample", "derivable", "dp_demo",
    "extend", "force_prop", "force_set", "parse_formula", "render_formula", "saturate",
    "sigma_construction_cqc", "tau", "unifiable_cpc", "unifiable_cqc", "verify_claim_cqc",
    "verify_trace", "verify_translation", "visser_rule", "visser_semantic_demo",
]
