"""Formula AST shared by the propositional, first-order and set-theoretic languages.

Terms are variables only; constants and function symbols are expressed as
predicates.  The set-theoretic language uses exactly the binary predicates
``in`` and ``eq`` (written ``s in t`` and ``s = t``).

Text grammar, loosest to tightest::

    imp   := or ('->' imp)?            right associative
    or    := and ('|' and)*            left associative
    and   := unary ('&' unary)*        left associative
    unary := '~' unary | 'forall' VAR '.' unary | 'exists' VAR '.' unary | atom
    atom  := 'true' | 'false' | NAME | NAME '(' VARS ')' | VAR 'in' VAR
           | VAR '=' VAR | '(' imp ')'

Quantifiers bind as tightly as ``~``, so ``exists x. P(x) & exists x. ~P(x)``
is a conjunction of two existentials; parenthesise a body to widen the scope.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Mapping

PROP = "propositional"
FO = "first-order"
SET = "set-theoretic"
LANGUAGES = (PROP, FO, SET)

IN = "in"
EQ = "eq"


class FormulaError(ValueError):
    """Raised for malformed formulas, bad arities and wrong-language constructs."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class Formula:
    """Base class of all formula nodes.

    Nodes are immutable and hash-consed by value; the hash is cached since the
    provers hash the same subformulas many times.
    """

    __slots__ = ()

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented
        return self._h == other._h and self._key() == other._key()

    def __hash__(self):
        return self._h

    def __str__(self):
        return render_formula(self)

    # convenience constructors
    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __or__(self, other: Formula) -> Formula:
        return Or(self, other)

    def __invert__(self) -> Formula:
        return Not(self)

    def __rshift__(self, other: Formula) -> Formula:
        return Implies(self, other)


def _init_hash(obj, key):
    object.__setattr__(obj, "_h", hash((type(obj).__name__,) + key))


@dataclass(frozen=True, eq=False, repr=False)
class Atom(Formula):
    pred: str
    args: tuple[str, ...] = ()
    _h: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        _init_hash(self, self._key())

    def _key(self):
        return (self.pred, self.args)

    def __repr__(self):
        if self.args:
            return f"Atom({self.pred!r}, {self.args!r})"
        return f"Atom({self.pred!r})"


@dataclass(frozen=True, eq=False, repr=False)
class _Const(Formula):
    _h: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        _init_hash(self, ())

    def _key(self):
        return ()

    def __repr__(self):
        return type(self).__name__ + "()"


class Top(_Const):
    pass


class Bot(_Const):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class Not(Formula):
    body: Formula
    _h: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        _init_hash(self, self._key())

    def _key(self):
        return (self.body,)

    def __repr__(self):
        return f"Not({self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class _Binary(Formula):
    left: Formula
    right: Formula
    _h: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        _init_hash(self, self._key())

    def _key(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class And(_Binary):
    pass


class Or(_Binary):
    pass


class Implies(_Binary):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class _Quant(Formula):
    var: str
    body: Formula
    _h: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        _init_hash(self, self._key())

    def _key(self):
        return (self.var, self.body)

    def __repr__(self):
        return f"{type(self).__name__}({self.var!r}, {self.body!r})"


class Forall(_Quant):
    pass


class Exists(_Quant):
    pass


TOP = Top()
BOT = Bot()


def In(a: str, b: str) -> Atom:
    return Atom(IN, (a, b))


def Eq(a: str, b: str) -> Atom:
    return Atom(EQ, (a, b))


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def conj(fs: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    fs = list(fs)
    if not fs:
        return TOP
    return reduce(And, fs)


def disj(fs: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is ``false``."""
    fs = list(fs)
    if not fs:
        return BOT
    return reduce(Or, fs)


def forall_all(variables: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(variables)):
        body = Forall(v, body)
    return body


def exists_all(variables: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(variables)):
        body = Exists(v, body)
    return body


def children(f: Formula) -> tuple[Formula, ...]:
    match f:
        case Not(b) | Forall(_, b) | Exists(_, b):
            return (b,)
        case And(a, b) | Or(a, b) | Implies(a, b):
            return (a, b)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from subformulas(c)


def size(f: Formula) -> int:
    """Number of AST nodes."""
    return 1 + sum(size(c) for c in children(f))


# ---------------------------------------------------------------------------
# Variables, signatures, languages


@lru_cache(maxsize=1 << 16)
def free_vars(f: Formula) -> frozenset[str]:
    match f:
        case Atom(_, args):
            return frozenset(args)
        case Forall(v, b) | Exists(v, b):
            return free_vars(b) - {v}
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= free_vars(c)
    return out


def all_vars(f: Formula) -> set[str]:
    out: set[str] = set()
    for g in subformulas(f):
        match g:
            case Atom(_, args):
                out.update(args)
            case Forall(v, _) | Exists(v, _):
                out.add(v)
    return out


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def atoms(f: Formula) -> set[Atom]:
    return {g for g in subformulas(f) if isinstance(g, Atom)}


def prop_atoms(f: Formula) -> list[str]:
    """Sorted names of the propositional letters of ``f``."""
    return sorted({a.pred for a in atoms(f)})


@dataclass(frozen=True)
class Signature:
    """Predicate symbols with arities, kept sorted by symbol."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        syms = tuple(sorted(dict(self.symbols).items()))
        if len(syms) != len(self.symbols):
            raise FormulaError("signature symbols must be distinct")
        for name, arity in syms:
            if arity < 0:
                raise FormulaError(f"negative arity for {name}")
        object.__setattr__(self, "symbols", syms)

    @classmethod
    def of(cls, *formulas: Formula) -> Signature:
        arities: dict[str, int] = {}
        for f in formulas:
            for a in atoms(f):
                if arities.setdefault(a.pred, len(a.args)) != len(a.args):
                    raise FormulaError(f"inconsistent arity for predicate {a.pred}")
        return cls(tuple(arities.items()))

    def names(self) -> list[str]:
        return [s for s, _ in self.symbols]

    def arity(self, name: str) -> int:
        return dict(self.symbols)[name]

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __or__(self, other: Signature) -> Signature:
        merged = dict(self.symbols)
        for s, n in other.symbols:
            if merged.setdefault(s, n) != n:
                raise FormulaError(f"inconsistent arity for predicate {s}")
        return Signature(tuple(merged.items()))


def language_of(f: Formula) -> str:
    """The smallest language tag the formula belongs to."""
    sig = Signature.of(f)
    quantified = any(isinstance(g, (Forall, Exists)) for g in subformulas(f))
    if all(n == 0 for _, n in sig) and not quantified:
        return PROP
    if sig.names() and set(sig.names()) <= {IN, EQ} and all(n == 2 for _, n in sig):
        return SET
    return FO


def check_language(f: Formula, lang: str) -> None:
    """Raise :class:`FormulaError` unless ``f`` is a well-formed ``lang`` formula."""
    if lang not in LANGUAGES:
        raise FormulaError(f"unknown language {lang!r}")
    sig = Signature.of(f)
    if lang == PROP:
        for g in subformulas(f):
            if isinstance(g, (Forall, Exists)):
                raise FormulaError("quantifier in a propositional formula")
            if isinstance(g, Atom) and g.args:
                raise FormulaError(f"predicate {g.pred} with arguments in a propositional formula")
    elif lang == SET:
        for name, n in sig:
            if name not in (IN, EQ) or n != 2:
                raise FormulaError(f"symbol {name!r} is not in the set-theoretic language")
    else:
        if any(name in (IN, EQ) for name in sig.names()):
            raise FormulaError("membership/equality atoms belong to the set-theoretic language")


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->|→)|(?P<sym>[~¬&∧|∨().,=∈⊤⊥∀∃])|(?P<name>[A-Za-z_][A-Za-z0-9_']*))"
)
_UNICODE = {"¬": "~", "∧": "&", "∨": "|", "→": "->", "∈": "in", "⊤": "true", "⊥": "false",
            "∀": "forall", "∃": "exists"}
_KEYWORDS = {"true", "false", "forall", "exists", "in"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaError(f"unexpected character {text[pos]!r}", pos)
        tok = m.group(m.lastgroup)
        out.append((_UNICODE.get(tok, tok), m.start(m.lastgroup)))
        pos = m.end()
    out.append(("<end>", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, lang: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.lang = lang
        self.arity: dict[str, int] = {}

    def peek(self, k: int = 0) -> str:
        return self.toks[min(self.i + k, len(self.toks) - 1)][0]

    def pos(self) -> int:
        return self.toks[self.i][1]

    def take(self, expected: str | None = None) -> str:
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise FormulaError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.imp()
        if self.peek() != "<end>":
            raise FormulaError(f"unexpected token {self.peek()!r}", self.pos())
        return f

    def imp(self) -> Formula:
        left = self.or_()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.imp())
        return left

    def or_(self) -> Formula:
        f = self.and_()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def variable(self) -> str:
        tok, pos = self.toks[self.i]
        if not _is_name(tok) or tok in _KEYWORDS:
            raise FormulaError(f"expected a variable, found {tok!r}", pos)
        self.i += 1
        return tok

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok in ("forall", "exists"):
            if self.lang == PROP:
                raise FormulaError("quantifier in a propositional formula", self.pos())
            self.take()
            v = self.variable()
            self.take(".")
            body = self.unary()
            return Forall(v, body) if tok == "forall" else Exists(v, body)
        return self.atom()

    def atom(self) -> Formula:
        tok, pos = self.toks[self.i]
        if tok == "(":
            self.take()
            f = self.imp()
            self.take(")")
            return f
        if tok == "true":
            self.take()
            return TOP
        if tok == "false":
            self.take()
            return BOT
        if not _is_name(tok) or tok in _KEYWORDS:
            raise FormulaError(f"unexpected token {tok!r}", pos)
        self.take()
        nxt = self.peek()
        if nxt in ("in", "="):
            if self.lang != SET:
                raise FormulaError(f"'{nxt}' atom outside the set-theoretic language", pos)
            self.take()
            rhs = self.variable()
            return Atom(IN if nxt == "in" else EQ, (tok, rhs))
        if self.lang == SET:
            raise FormulaError(f"unbound symbol {tok!r}: set-theoretic atoms are 's in t' or 's = t'", pos)
        args: tuple[str, ...] = ()
        if nxt == "(":
            if self.lang == PROP:
                raise FormulaError(f"predicate {tok} with arguments in a propositional formula", pos)
            self.take()
            vs = [self.variable()]
            while self.peek() == ",":
                self.take()
                vs.append(self.variable())
            self.take(")")
            args = tuple(vs)
        if self.arity.setdefault(tok, len(args)) != len(args):
            raise FormulaError(f"arity mismatch for predicate {tok}", pos)
        return Atom(tok, args)


def _is_name(tok: str) -> bool:
    return bool(re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok))


def parse_formula(text: str, lang: str = FO) -> Formula:
    """Parse ``text`` as a formula of language ``lang``."""
    if lang not in LANGUAGES:
        raise FormulaError(f"unknown language {lang!r}")
    return _Parser(text, lang).parse()


# ---------------------------------------------------------------------------
# Printing

_IMP, _OR, _AND, _UNARY = 1, 2, 3, 4


def _level(f: Formula) -> int:
    match f:
        case Implies():
            return _IMP
        case Or():
            return _OR
        case And():
            return _AND
    return _UNARY


def render_formula(f: Formula) -> str:
    return _render(f)


def _wrap(f: Formula, need: int) -> str:
    s = _render(f)
    return f"({s})" if _level(f) < need else s


def _render(f: Formula) -> str:
    match f:
        case Top():
            return "true"
        case Bot():
            return "false"
        case Atom(p, args):
            if p == IN and len(args) == 2:
                return f"{args[0]} in {args[1]}"
            if p == EQ and len(args) == 2:
                return f"{args[0]} = {args[1]}"
            return f"{p}({','.join(args)})" if args else p
        case Not(b):
            return "~" + _wrap(b, _UNARY)
        case Forall(v, b):
            return f"forall {v}. " + _wrap(b, _UNARY)
        case Exists(v, b):
            return f"exists {v}. " + _wrap(b, _UNARY)
        case And(a, b):
            return f"{_wrap(a, _AND)} & {_wrap(b, _UNARY)}"
        case Or(a, b):
            return f"{_wrap(a, _OR)} | {_wrap(b, _AND)}"
        case Implies(a, b):
            return f"{_wrap(a, _OR)} -> {_wrap(b, _IMP)}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Substitution of variables and of predicate symbols


def fresh_var(base: str, avoid: set[str] | frozenset[str]) -> str:
    """Smallest ``base<i>`` not in ``avoid`` (trailing digits of base dropped)."""
    stem = base.rstrip("0123456789'") or "v"
    i = 0
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def rename_vars(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Simultaneous capture-avoiding replacement of free variables."""
    mapping = {k: v for k, v in mapping.items() if k != v and k in free_vars(f)}
    if not mapping:
        return f
    match f:
        case Atom(p, args):
            return Atom(p, tuple(mapping.get(a, a) for a in args))
        case Forall(v, b) | Exists(v, b):
            inner = {k: w for k, w in mapping.items() if k != v}
            targets = {inner[k] for k in inner if k in free_vars(b)}
            if v in targets:
                nv = fresh_var(v, all_vars(b) | targets | set(inner) | free_vars(f))
                inner[v] = nv
                v = nv
            return type(f)(v, rename_vars(b, inner))
        case Not(b):
            return Not(rename_vars(b, mapping))
        case And(a, b) | Or(a, b) | Implies(a, b):
            return type(f)(rename_vars(a, mapping), rename_vars(b, mapping))
    return f


def canonical_params(n: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(n))


class Assignment(Mapping[str, Formula]):
    """Maps predicate symbols to formulas over the canonical parameters x0..x(n-1).

    ``arities`` fixes the arity of each symbol; when omitted it is read off
    the largest canonical parameter used.  Extra free variables are rejected.
    """

    def __init__(self, table: Mapping[str, Formula], arities: Mapping[str, int] | None = None):
        self._table = dict(table)
        self._arity: dict[str, int] = {}
        for sym, body in self._table.items():
            if arities is not None and sym in arities:
                n = arities[sym]
            else:
                n = 0
                for v in free_vars(body):
                    m = re.fullmatch(r"x(\d+)", v)
                    if m:
                        n = max(n, int(m.group(1)) + 1)
            extra = free_vars(body) - set(canonical_params(n))
            if extra:
                raise FormulaError(
                    f"assigned formula for {sym} has free variables {sorted(extra)} beyond its {n} parameters"
                )
            self._arity[sym] = n

    def __getitem__(self, key):
        return self._table[key]

    def __iter__(self):
        return iter(sorted(self._table))

    def __len__(self):
        return len(self._table)

    def __repr__(self):
        body = ", ".join(f"{k} -> {render_formula(v)}" for k, v in self.items())
        return f"Assignment({body})"

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return self._table == other._table and self._arity == other._arity

    def __hash__(self):
        return hash(tuple(sorted((k, v) for k, v in self._table.items())))

    def arity(self, sym: str) -> int:
        return self._arity[sym]

    def params(self, sym: str) -> tuple[str, ...]:
        return canonical_params(self._arity[sym])

    def covering(self, sig: Signature) -> Assignment:
        """This assignment extended by the identity on the symbols of ``sig`` it misses."""
        table = dict(self._table)
        arities = dict(self._arity)
        for sym, n in sig:
            if sym not in table:
                table[sym] = Atom(sym, canonical_params(n))
                arities[sym] = n
        return Assignment(table, arities)

    def to_json(self) -> dict[str, str]:
        return {k: render_formula(v) for k, v in self.items()}

    @classmethod
    def identity(cls, sig: Signature) -> Assignment:
        return cls({}).covering(sig)


def apply_assignment(a: Mapping[str, Formula], f: Formula) -> Formula:
    """The substitution induced by ``a``: replace each atom R(y..) by a(R)(y..)."""
    match f:
        case Atom(p, args):
            if p not in a:
                raise FormulaError(f"assignment does not cover predicate {p}")
            body = a[p]
            if isinstance(a, Assignment) and a.arity(p) != len(args):
                raise FormulaError(f"{p} is assigned with arity {a.arity(p)} but used with {len(args)} arguments")
            params = canonical_params(len(args))
            if not free_vars(body) <= set(params):
                raise FormulaError(f"assigned formula for {p} needs more than {len(args)} parameters")
            return rename_vars(body, dict(zip(params, args)))
        case Top() | Bot():
            return f
        case Not(b):
            return Not(apply_assignment(a, b))
        case And(l, r) | Or(l, r) | Implies(l, r):
            return type(f)(apply_assignment(a, l), apply_assignment(a, r))
        case Forall(v, b) | Exists(v, b):
            return type(f)(v, apply_assignment(a, b))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Ground substitutions


class GroundSubstitution(Mapping[str, bool]):
    """Maps every symbol of a signature to true or false."""

    def __init__(self, values: Mapping[str, bool], sig: Signature | None = None):
        self._values = {k: bool(v) for k, v in values.items()}
        if sig is None:
            sig = Signature(tuple((k, 0) for k in self._values))
        if set(sig.names()) != set(self._values):
            raise FormulaError("ground substitution must be total on its signature")
        self.signature = sig

    def __getitem__(self, key):
        return self._values[key]

    def __iter__(self):
        return iter(sorted(self._values))

    def __len__(self):
        return len(self._values)

    def __eq__(self, other):
        if isinstance(other, GroundSubstitution):
            return self._values == other._values
        if isinstance(other, Mapping):
            return self._values == dict(other)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self._values.items())))

    def __repr__(self):
        body = ", ".join(f"{k}->{'T' if v else 'F'}" for k, v in self.items())
        return f"GroundSubstitution({body})"

    def assignment(self) -> Assignment:
        return Assignment(
            {k: (TOP if v else BOT) for k, v in self._values.items()},
            {k: n for k, n in self.signature},
        )

    def apply(self, f: Formula) -> Formula:
        return apply_assignment(self.assignment(), f)

    def to_json(self) -> dict[str, bool]:
        return dict(self.items())


def ground_substitutions(sig: Signature) -> Iterator[GroundSubstitution]:
    """All 2^|sig| ground substitutions, by binary counting (false=0, true=1)
    over the symbols sorted lexicographically, first symbol most significant."""
    names = sig.names()
    for bits in itertools.product((False, True), repeat=len(names)):
        yield GroundSubstitution(dict(zip(names, bits)), sig)


def constant_fold(f: Formula) -> Formula:
    """Classical value (TOP or BOT) of an atom-free formula over nonempty domains."""
    return TOP if _fold(f) else BOT


def _fold(f: Formula) -> bool:
    match f:
        case Top():
            return True
        case Bot():
            return False
        case Atom():
            raise FormulaError(f"non-constant atom {render_formula(f)} in constant_fold")
        case Not(b):
            return not _fold(b)
        case And(a, b):
            return _fold(a) and _fold(b)
        case Or(a, b):
            return _fold(a) or _fold(b)
        case Implies(a, b):
            return (not _fold(a)) or _fold(b)
        case Forall(_, b) | Exists(_, b):
            return _fold(b)
    raise TypeError(f"not a formula: {f!r}")


def ground_value(tau: Mapping[str, bool], f: Formula) -> bool:
    """constant_fold(tau(f)) computed without building the substituted formula."""
    match f:
        case Atom(p, _):
            if p not in tau:
                raise FormulaError(f"ground substitution does not cover predicate {p}")
            return tau[p]
        case Top():
            return True
        case Bot():
            return False
        case Not(b):
            return not ground_value(tau, b)
        case And(a, b):
            return ground_value(tau, a) and ground_value(tau, b)
        case Or(a, b):
            return ground_value(tau, a) or ground_value(tau, b)
        case Implies(a, b):
            return (not ground_value(tau, a)) or ground_value(tau, b)
        case Forall(_, b) | Exists(_, b):
            return ground_value(tau, b)
    raise TypeError(f"not a formula: {f!r}")


def universal_closure(f: Formula) -> Formula:
    return forall_all(sorted(free_vars(f)), f)


def neg_to_imp(f: Formula) -> Formula:
    """Rewrite every ``~A`` as ``A -> false``."""
    match f:
        case Not(b):
            return Implies(neg_to_imp(b), BOT)
        case And(a, b) | Or(a, b) | Implies(a, b):
            return type(f)(neg_to_imp(a), neg_to_imp(b))
        case Forall(v, b) | Exists(v, b):
            return type(f)(v, neg_to_imp(b))
    return f
