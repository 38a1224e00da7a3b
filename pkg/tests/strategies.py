"""Hypothesis strategies for random formulas.

Variables come from small fixed pools so that random formulas share free
variables often enough to be interesting.  Bound variable names are drawn
from the same pools; the evaluator and the parser both have to cope with
shadowing.
"""

from hypothesis import strategies as st

from aot import syntax as sx

X, Y, Z = sx.IndVar("x"), sx.IndVar("y"), sx.IndVar("z")
F, G = sx.RelVar("F", 1), sx.RelVar("G", 1)
P = sx.RelVar("p", 0)

IND_VARS = (X, Y, Z)
REL_VARS = (F, G)


@st.composite
def ind_terms(draw, depth=1, descriptions=True):
    if descriptions and depth > 0 and draw(st.integers(0, 5)) == 0:
        v = draw(st.sampled_from(IND_VARS))
        return sx.Description(v, draw(formulas(depth - 1, descriptions=False)))
    return draw(st.sampled_from(IND_VARS))


@st.composite
def rel_terms(draw, depth=1, descriptions=True, encodings=True):
    k = draw(st.integers(0, 6))
    if k == 0:
        return draw(st.sampled_from((sx.O_BANG, sx.A_BANG)))
    if k == 1 and depth > 0:
        v = draw(st.sampled_from(IND_VARS))
        body = draw(formulas(depth - 1, descriptions=descriptions, encodings=encodings))
        return sx.Lambda(v, body)
    return draw(st.sampled_from(REL_VARS))


@st.composite
def atoms(draw, depth=1, descriptions=True, encodings=True):
    kinds = ["exe", "exe", "prop"] + (["enc", "enc", "idind", "idrel"] if encodings else [])
    kind = draw(st.sampled_from(kinds))
    if kind == "prop":
        return sx.prop("p")
    if kind == "exe":
        return sx.Exe(draw(rel_terms(depth, descriptions, encodings)), (draw(ind_terms(depth, descriptions)),))
    if kind == "enc":
        return sx.Enc(draw(ind_terms(depth, descriptions)), draw(rel_terms(depth, descriptions, encodings)))
    if kind == "idind":
        return sx.IdInd(draw(st.sampled_from(IND_VARS)), draw(st.sampled_from(IND_VARS)))
    return sx.IdRel(draw(st.sampled_from(REL_VARS)), draw(st.sampled_from(REL_VARS)))


@st.composite
def formulas(draw, depth=3, descriptions=True, encodings=True, modal=True, quantifiers=True):
    """Random formula of nesting depth at most ``depth``.

    ``encodings=False`` gives strict-propositional formulas: no encoding and
    no identity (identity unfolds into encoding)."""
    if depth <= 0:
        return draw(atoms(0, descriptions, encodings))
    ops = ["atom", "not", "impl", "and", "or", "equiv"]
    if modal:
        ops += ["box", "dia"]
    if quantifiers:
        ops += ["forall_i", "exists_i", "forall_r"]
    op = draw(st.sampled_from(ops))
    sub = lambda: draw(formulas(depth - 1, descriptions, encodings, modal, quantifiers))  # noqa: E731
    if op == "atom":
        return draw(atoms(depth - 1, descriptions, encodings))
    if op == "not":
        return sx.Not(sub())
    if op in ("impl", "and", "or", "equiv"):
        cls = {"impl": sx.Impl, "and": sx.And, "or": sx.Or, "equiv": sx.Equiv}[op]
        return cls(sub(), sub())
    if op == "box":
        return sx.Box(sub())
    if op == "dia":
        return sx.Diamond(sub())
    if op == "forall_r":
        return sx.Forall(draw(st.sampled_from(REL_VARS)), sub())
    cls = sx.Forall if op == "forall_i" else sx.Exists
    return cls(draw(st.sampled_from(IND_VARS)), sub())


def close(f):
    """Existentially close the relation variables and universally close the
    rest, so closed formulas are not all trivially universal."""
    for v in sorted(sx.free_vars(f), key=lambda v: (isinstance(v, sx.IndVar), v.name)):
        f = sx.Exists(v, f) if isinstance(v, sx.RelVar) and v.arity == 1 else sx.Forall(v, f)
    return f


def closed_formulas(depth=3, **kw):
    return formulas(depth, **kw).map(close)


@st.composite
def strict_lambdas(draw, depth=3):
    """A lambda whose matrix is strict-propositional and description-free."""
    v = draw(st.sampled_from(IND_VARS))
    return sx.Lambda(v, draw(formulas(depth, descriptions=False, encodings=False)))


def binder_depth(f) -> int:
    """Deepest nesting of binders (quantifiers, lambdas, descriptions) in the
    core form; the naive oracle's cost grows exponentially with it."""
    def walk(n):
        inner = max((walk(c) for c in sx.children(n)), default=0)
        return inner + isinstance(n, sx.BINDERS)
    return walk(sx.to_core(f))
