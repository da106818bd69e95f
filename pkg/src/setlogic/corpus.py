"""Formula corpora: exhaustive enumeration by size and seeded random generation."""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterator, Sequence

from .formula import (
    BOT, TOP, And, Atom, Eq, Exists, Forall, Formula, Implies, In, Not, Or,
)

BINARY = (And, Or, Implies)


def formulas_by_size(atoms: Sequence[str], max_size: int, constants: bool = False) -> list[list[Formula]]:
    """``out[n]`` lists every propositional formula with exactly ``n`` AST nodes.

    Connectives are ``~ & | ->``; ``true``/``false`` leaves only if ``constants``.
    """
    leaves: list[Formula] = [Atom(a, ()) for a in atoms]
    if constants:
        leaves += [TOP, BOT]
    out: list[list[Formula]] = [[] for _ in range(max_size + 1)]
    if max_size >= 1:
        out[1] = leaves
    for n in range(2, max_size + 1):
        level = [Not(f) for f in out[n - 1]]
        for k in range(1, n - 1):
            for a in out[k]:
                for b in out[n - 1 - k]:
                    level.extend(c(a, b) for c in BINARY)
        out[n] = level
    return out


def all_formulas(atoms: Sequence[str], max_size: int, constants: bool = False) -> Iterator[Formula]:
    for level in formulas_by_size(atoms, max_size, constants):
        yield from level


def random_prop_formula(rng: random.Random, atoms: Sequence[str], size: int, constants: bool = True) -> Formula:
    """A random formula with exactly ``size`` nodes."""
    if size <= 1:
        if constants and rng.random() < 0.1:
            return rng.choice((TOP, BOT))
        return Atom(rng.choice(atoms), ())
    if size == 2 or rng.random() < 0.2:
        return Not(random_prop_formula(rng, atoms, size - 1, constants))
    k = rng.randint(1, size - 2)
    c = rng.choice(BINARY)
    return c(random_prop_formula(rng, atoms, k, constants),
             random_prop_formula(rng, atoms, size - 1 - k, constants))


def random_prop_upto(rng: random.Random, atoms: Sequence[str], max_size: int, constants: bool = True) -> Formula:
    return random_prop_formula(rng, atoms, rng.randint(1, max_size), constants)


def random_set_formula(rng: random.Random, size: int, free: Sequence[str] = (), depth: int = 0) -> Formula:
    """A random formula of the set language whose free variables lie in ``free``.

    With ``free`` empty the result is a sentence; atoms then need a
    quantifier first, so the generator opens one when no variable is bound.
    """
    scope = list(free)
    if not scope:
        v = f"u{depth}"
        q = rng.choice((Forall, Exists))
        return q(v, random_set_formula(rng, max(size - 1, 1), [v], depth + 1))
    if size <= 1:
        r = rng.random()
        if r < 0.05:
            return TOP
        if r < 0.1:
            return BOT
        a, b = rng.choice(scope), rng.choice(scope)
        return In(a, b) if rng.random() < 0.7 else Eq(a, b)
    r = rng.random()
    if r < 0.2:
        return Not(random_set_formula(rng, size - 1, scope, depth))
    if r < 0.45 and size >= 2:
        v = f"u{depth}"
        q = rng.choice((Forall, Exists))
        return q(v, random_set_formula(rng, size - 1, scope + [v], depth + 1))
    if size < 3:
        return Not(random_set_formula(rng, size - 1, scope, depth))
    k = rng.randint(1, size - 2)
    c = rng.choice(BINARY)
    return c(random_set_formula(rng, k, scope, depth), random_set_formula(rng, size - 1 - k, scope, depth))


def random_fo_formula(rng: random.Random, size: int, preds: dict[str, int], free: Sequence[str] = (),
                      depth: int = 0) -> Formula:
    """A random first-order formula over ``preds`` (symbol -> arity)."""
    scope = list(free)
    nullary = [p for p, n in preds.items() if n == 0]
    usable = [p for p, n in preds.items() if n == 0 or scope]
    if size <= 1 or not usable:
        if not usable:
            return rng.choice((TOP, BOT))
        p = rng.choice(usable)
        return Atom(p, tuple(rng.choice(scope) for _ in range(preds[p])))
    r = rng.random()
    if r < 0.2:
        return Not(random_fo_formula(rng, size - 1, preds, scope, depth))
    if r < 0.45 or (not scope and not nullary):
        v = f"y{depth}"
        q = rng.choice((Forall, Exists))
        return q(v, random_fo_formula(rng, size - 1, preds, scope + [v], depth + 1))
    if size < 3:
        return Not(random_fo_formula(rng, size - 1, preds, scope, depth))
    k = rng.randint(1, size - 2)
    c = rng.choice(BINARY)
    return c(random_fo_formula(rng, k, preds, scope, depth),
             random_fo_formula(rng, size - 1 - k, preds, scope, depth))


@lru_cache(maxsize=None)
def corpus_count(n_atoms: int, max_size: int) -> int:
    counts = [0] * (max_size + 1)
    for n in range(1, max_size + 1):
        if n == 1:
            counts[n] = n_atoms
            continue
        counts[n] = counts[n - 1] + 3 * sum(counts[k] * counts[n - 1 - k] for k in range(1, n - 1))
    return sum(counts)
