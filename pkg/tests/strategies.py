from hypothesis import strategies as st

from setlogic.formula import BOT, TOP, And, Atom, Eq, Exists, Forall, Implies, In, Not, Or


def prop_formulas(atoms=("p", "q", "r"), max_leaves=12, constants=True):
    leaves = [st.just(Atom(a, ())) for a in atoms]
    if constants:
        leaves += [st.just(TOP), st.just(BOT)]
    return st.recursive(
        st.one_of(leaves),
        lambda sub: st.one_of(
            sub.map(Not),
            st.tuples(sub, sub).map(lambda t: And(*t)),
            st.tuples(sub, sub).map(lambda t: Or(*t)),
            st.tuples(sub, sub).map(lambda t: Implies(*t)),
        ),
        max_leaves=max_leaves,
    )


_VARS = ("x", "y", "z")


def set_formulas(free=("x",), max_leaves=8):
    """Formulas of the set language; variables from x, y, z, free ones listed in ``free``."""
    atom = st.tuples(st.sampled_from(_VARS), st.sampled_from(_VARS), st.booleans()).map(
        lambda t: In(t[0], t[1]) if t[2] else Eq(t[0], t[1]))
    body = st.recursive(
        st.one_of(atom, st.just(TOP), st.just(BOT)),
        lambda sub: st.one_of(
            sub.map(Not),
            st.tuples(sub, sub).map(lambda t: And(*t)),
            st.tuples(sub, sub).map(lambda t: Or(*t)),
            st.tuples(sub, sub).map(lambda t: Implies(*t)),
            st.tuples(st.sampled_from(_VARS), sub).map(lambda t: Forall(*t)),
            st.tuples(st.sampled_from(_VARS), sub).map(lambda t: Exists(*t)),
        ),
        max_leaves=max_leaves,
    )
    closers = [v for v in _VARS if v not in free]

    def close(f):
        for v in closers:
            f = Forall(v, f)
        return f

    return body.map(close)


def fo_formulas(max_leaves=8):
    """First-order formulas over P/1, Q/1 and nullary R with variables x, y."""
    atom = st.one_of(
        st.tuples(st.sampled_from(("P", "Q")), st.sampled_from(("x", "y"))).map(lambda t: Atom(t[0], (t[1],))),
        st.just(Atom("R", ())),
    )
    return st.recursive(
        st.one_of(atom, st.just(TOP), st.just(BOT)),
        lambda sub: st.one_of(
            sub.map(Not),
            st.tuples(sub, sub).map(lambda t: And(*t)),
            st.tuples(sub, sub).map(lambda t: Or(*t)),
            st.tuples(sub, sub).map(lambda t: Implies(*t)),
            st.tuples(st.sampled_from(("x", "y")), sub).map(lambda t: Forall(*t)),
            st.tuples(st.sampled_from(("x", "y")), sub).map(lambda t: Exists(*t)),
        ),
        max_leaves=max_leaves,
    )
