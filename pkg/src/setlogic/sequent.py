"""Terminating proof search for intuitionistic propositional logic.

Dyckhoff's contraction-free calculus G4ip.  Invertible rules are applied
eagerly; the only backtracking points are right disjunction and the left
rule for nested implications ``(A -> B) -> D``.  Negation is read as
``A -> false``.
"""

from __future__ import annotations

from functools import lru_cache

from .formula import (
    BOT, TOP, And, Atom, Bot, Formula, FormulaError, Implies, Not, Or, Top, neg_to_imp,
)


def ipc_provable(f: Formula, premises: tuple[Formula, ...] = ()) -> bool:
    """Whether ``premises |- f`` holds in IPC."""
    for g in (f, *premises):
        _check_prop(g)
    ctx = frozenset(neg_to_imp(p) for p in premises)
    return _prove(ctx, neg_to_imp(f))


def _check_prop(f: Formula) -> None:
    match f:
        case Atom(p, args):
            if args:
                raise FormulaError(f"non-propositional atom {p}")
        case Top() | Bot():
            pass
        case Not(b):
            _check_prop(b)
        case And(a, b) | Or(a, b) | Implies(a, b):
            _check_prop(a)
            _check_prop(b)
        case _:
            raise FormulaError("quantifier in a propositional formula")


def clear_cache() -> None:
    _prove.cache_clear()


@lru_cache(maxsize=1 << 20)
def _prove(ctx: frozenset, goal: Formula) -> bool:
    if goal == TOP or BOT in ctx or goal in ctx:
        return True

    # invertible left rules
    for f in ctx:
        rest = ctx - {f}
        match f:
            case Top():
                return _prove(rest, goal)
            case And(a, b):
                return _prove(rest | {a, b}, goal)
            case Or(a, b):
                return _prove(rest | {a}, goal) and _prove(rest | {b}, goal)
            case Implies(Bot(), _):
                return _prove(rest, goal)
            case Implies(Top(), b):
                return _prove(rest | {b}, goal)
            case Implies(And(a, b), d):
                return _prove(rest | {Implies(a, Implies(b, d))}, goal)
            case Implies(Or(a, b), d):
                return _prove(rest | {Implies(a, d), Implies(b, d)}, goal)
            case Implies(Atom() as p, b) if p in ctx:
                return _prove(rest | {b}, goal)

    # invertible right rules
    match goal:
        case And(a, b):
            return _prove(ctx, a) and _prove(ctx, b)
        case Implies(a, b):
            return _prove(ctx | {a}, b)

    # non-invertible rules
    if isinstance(goal, Or):
        if _prove(ctx, goal.left) or _prove(ctx, goal.right):
            return True
    for f in ctx:
        match f:
            case Implies(Implies(c, d), b):
                rest = ctx - {f}
                if _prove(rest | {Implies(d, b)}, Implies(c, d)) and _prove(rest | {b}, goal):
                    return True
    return False
