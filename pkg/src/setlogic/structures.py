"""Finite classical first-order structures and Tarskian evaluation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterator, Mapping

from .formula import (
    EQ, And, Atom, Bot, Exists, Forall, Formula, FormulaError, Implies, Not, Or,
    Signature, Top, free_vars,
)


@dataclass(frozen=True)
class Structure:
    """A nonempty finite domain with an interpretation for each predicate.

    ``relations`` maps a symbol to the set of argument tuples where it holds;
    nullary symbols hold iff the empty tuple is present.  The symbol ``eq`` is
    always interpreted as identity.
    """

    domain: tuple[Hashable, ...]
    relations: Mapping[str, frozenset[tuple]]

    def holds(self, pred: str, args: tuple) -> bool:
        if pred == EQ:
            return args[0] == args[1]
        try:
            return args in self.relations[pred]
        except KeyError:
            raise FormulaError(f"structure does not interpret {pred}") from None

    def describe(self) -> dict:
        return {
            "domain": list(self.domain),
            "relations": {p: sorted(list(t) for t in ts) for p, ts in sorted(self.relations.items())},
        }


def evaluate(m: Structure, f: Formula, env: Mapping[str, Hashable] | None = None) -> bool:
    env = dict(env or {})
    missing = free_vars(f) - env.keys()
    if missing:
        raise FormulaError(f"unbound variables {sorted(missing)}")
    return _ev(m, f, env)


def _ev(m: Structure, f: Formula, env: dict) -> bool:
    match f:
        case Atom(p, args):
            return m.holds(p, tuple(env[a] for a in args))
        case Top():
            return True
        case Bot():
            return False
        case Not(b):
            return not _ev(m, b, env)
        case And(a, b):
            return _ev(m, a, env) and _ev(m, b, env)
        case Or(a, b):
            return _ev(m, a, env) or _ev(m, b, env)
        case Implies(a, b):
            return (not _ev(m, a, env)) or _ev(m, b, env)
        case Forall(v, b):
            return all(_ev(m, b, {**env, v: d}) for d in m.domain)
        case Exists(v, b):
            return any(_ev(m, b, {**env, v: d}) for d in m.domain)
    raise TypeError(f"not a formula: {f!r}")


def valid_in(m: Structure, f: Formula) -> bool:
    """``f`` holds under every environment of its free variables."""
    fv = sorted(free_vars(f))
    for values in itertools.product(m.domain, repeat=len(fv)):
        if not evaluate(m, f, dict(zip(fv, values))):
            return False
    return True


def enumerate_structures(sig: Signature, size: int) -> Iterator[Structure]:
    """Every structure with domain ``0..size-1`` over ``sig`` (``eq`` excluded)."""
    if size < 1:
        raise ValueError("domains are nonempty")
    domain = tuple(range(size))
    symbols = [(s, n) for s, n in sig if s != EQ]
    choices = []
    for _, n in symbols:
        tuples = list(itertools.product(domain, repeat=n))
        choices.append(
            [frozenset(t for t, bit in zip(tuples, bits) if bit)
             for bits in itertools.product((False, True), repeat=len(tuples))]
        )
    for rels in itertools.product(*choices):
        yield Structure(domain, {s: r for (s, _), r in zip(symbols, rels)})


def structures_up_to(sig: Signature, max_size: int) -> Iterator[Structure]:
    for n in range(1, max_size + 1):
        yield from enumerate_structures(sig, n)
