"""Object language of second-order modal AOT: AST, parser, printer, substitution.

Individual identifiers start with a lowercase letter, relation identifiers
with an uppercase letter.  A lowercase identifier standing alone in formula
position is a 0-place relation variable (a propositional variable).
"""

from __future__ import annotations

import dataclasses
import re
from typing import Iterator, Union


class SyntaxErr(ValueError):
    """Ill-formed input text."""

    def __init__(self, msg: str, pos: int | None = None):
        self.pos = pos
        super().__init__(msg if pos is None else f"{msg} (at position {pos})")


class SortError(SyntaxErr):
    """A term occurs in a position of the wrong sort."""


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class IndVar:
    name: str


@dataclasses.dataclass(frozen=True)
class RelVar:
    name: str
    arity: int = 1


@dataclasses.dataclass(frozen=True)
class RelConst:
    """The distinguished properties ``O!`` and ``A!``."""

    name: str

    @property
    def arity(self) -> int:
        return 1


@dataclasses.dataclass(frozen=True)
class Lambda:
    var: IndVar
    body: "Formula"

    @property
    def arity(self) -> int:
        return 1


@dataclasses.dataclass(frozen=True)
class Description:
    var: IndVar
    body: "Formula"


O_BANG = RelConst("O!")
A_BANG = RelConst("A!")

IndTerm = Union[IndVar, Description]
RelTerm = Union[RelVar, RelConst, Lambda]
Var = Union[IndVar, RelVar]
Term = Union[IndVar, Description, RelVar, RelConst, Lambda]


@dataclasses.dataclass(frozen=True)
class Exe:
    rel: RelTerm
    args: tuple


@dataclasses.dataclass(frozen=True)
class Enc:
    subject: IndTerm
    rel: RelTerm


@dataclasses.dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclasses.dataclass(frozen=True)
class Impl:
    left: "Formula"
    right: "Formula"


@dataclasses.dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclasses.dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclasses.dataclass(frozen=True)
class Equiv:
    left: "Formula"
    right: "Formula"


@dataclasses.dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@dataclasses.dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


@dataclasses.dataclass(frozen=True)
class Box:
    body: "Formula"


@dataclasses.dataclass(frozen=True)
class Diamond:
    body: "Formula"


@dataclasses.dataclass(frozen=True)
class IdInd:
    left: IndTerm
    right: IndTerm


@dataclasses.dataclass(frozen=True)
class IdRel:
    left: RelTerm
    right: RelTerm

    @property
    def arity(self) -> int:
        return self.left.arity


Formula = Union[Exe, Enc, Not, Impl, And, Or, Equiv, Forall, Exists, Box, Diamond, IdInd, IdRel]

BINARY = (Impl, And, Or, Equiv)
UNARY = (Not, Box, Diamond)
QUANT = (Forall, Exists)
BINDERS = (Forall, Exists, Lambda, Description)


def is_ind_term(t) -> bool:
    return isinstance(t, (IndVar, Description))


def is_rel_term(t) -> bool:
    return isinstance(t, (RelVar, RelConst, Lambda))


def is_formula(t) -> bool:
    return isinstance(t, (Exe, Enc, Not, Impl, And, Or, Equiv, Forall, Exists, Box, Diamond, IdInd, IdRel))


def prop(name: str) -> Exe:
    """Propositional variable ``name`` used as a formula."""
    return Exe(RelVar(name, 0), ())


# ---------------------------------------------------------------------------
# generic traversal
# ---------------------------------------------------------------------------


def children(node) -> tuple:
    if isinstance(node, Exe):
        return (node.rel, *node.args)
    if isinstance(node, Enc):
        return (node.subject, node.rel)
    if isinstance(node, UNARY):
        return (node.body,)
    if isinstance(node, BINARY + (IdInd, IdRel)):
        return (node.left, node.right)
    if isinstance(node, BINDERS):
        return (node.body,)
    return ()


def subterms(node) -> Iterator:
    """Pre-order walk over every node, descending into binder bodies."""
    yield node
    for c in children(node):
        yield from subterms(c)


def rebuild(node, f):
    """Apply ``f`` to each child of ``node`` and return the rebuilt node."""
    if isinstance(node, Exe):
        return Exe(f(node.rel), tuple(f(a) for a in node.args))
    if isinstance(node, Enc):
        return Enc(f(node.subject), f(node.rel))
    if isinstance(node, UNARY):
        return type(node)(f(node.body))
    if isinstance(node, BINARY + (IdInd, IdRel)):
        return type(node)(f(node.left), f(node.right))
    if isinstance(node, BINDERS):
        return type(node)(node.var, f(node.body))
    return node


def free_vars(node) -> frozenset:
    if isinstance(node, (IndVar, RelVar)):
        return frozenset([node])
    if isinstance(node, RelConst):
        return frozenset()
    if isinstance(node, BINDERS):
        return free_vars(node.body) - {node.var}
    out = frozenset()
    for c in children(node):
        out |= free_vars(c)
    return out


def all_names(node) -> set:
    return {n.name for n in subterms(node) if isinstance(n, (IndVar, RelVar))} | {
        n.var.name for n in subterms(node) if isinstance(n, BINDERS)
    }


def fresh_name(base: str, avoid) -> str:
    name = base.rstrip("'") + "'"
    while name in avoid:
        name += "'"
    return name


def _with_name(v: Var, name: str) -> Var:
    return IndVar(name) if isinstance(v, IndVar) else RelVar(name, v.arity)


# ---------------------------------------------------------------------------
# substitution, alpha-equivalence
# ---------------------------------------------------------------------------


def _sort_of(t):
    if is_ind_term(t):
        return ("ind", 0)
    if isinstance(t, RelVar):
        return ("rel", t.arity)
    if is_rel_term(t):
        return ("rel", 1)
    raise SortError(f"not a term: {t!r}")


def substitute(f, v: Var, t):
    """Capture-avoiding substitution of term ``t`` for free ``v`` in ``f``."""
    if _sort_of(v) != _sort_of(t):
        raise SortError(f"cannot substitute {print_ast(t)} for {print_ast(v)}: sort mismatch")
    fv_t = free_vars(t)

    def go(node):
        if node == v:
            return t
        if isinstance(node, (IndVar, RelVar, RelConst)):
            return node
        if isinstance(node, BINDERS):
            if node.var == v or v not in free_vars(node.body):
                return node
            bound, body = node.var, node.body
            if bound in fv_t:
                avoid = all_names(body) | all_names(t) | {v.name}
                new = _with_name(bound, fresh_name(bound.name, avoid))
                body = substitute(body, bound, new)
                bound = new
            return type(node)(bound, go(body))
        return rebuild(node, go)

    return go(f)


def canon(node, env: tuple = ()):
    """Hashable, bound-name-free key; equal keys iff alpha-equivalent."""
    if isinstance(node, (IndVar, RelVar)):
        for depth, b in enumerate(reversed(env)):
            if b == node:
                return ("#", depth)
        return (type(node).__name__, node.name, getattr(node, "arity", 0)) if isinstance(node, RelVar) else ("i", node.name)
    if isinstance(node, RelConst):
        return ("c", node.name)
    if isinstance(node, BINDERS):
        var = node.var
        sort = "i" if isinstance(var, IndVar) else ("r", var.arity)
        return (type(node).__name__, sort, canon(node.body, env + (var,)))
    return (type(node).__name__,) + tuple(canon(c, env) for c in children(node))


def alpha_eq(a, b) -> bool:
    return canon(a) == canon(b)


def normalize_bound(node, avoid: frozenset | None = None):
    """Rename bound variables so none shadows a free or enclosing bound name."""
    if avoid is None:
        avoid = frozenset(v.name for v in free_vars(node))
    taken = set(all_names(node))

    def go(n, scope: frozenset):
        if isinstance(n, BINDERS):
            var, body = n.var, n.body
            if var.name in scope:
                new = _with_name(var, fresh_name(var.name, taken | scope))
                taken.add(new.name)
                body = substitute(body, var, new)
                var = new
            return type(n)(var, go(body, scope | {var.name}))
        return rebuild(n, lambda c: go(c, scope))

    return go(node, avoid)


# ---------------------------------------------------------------------------
# definitional expansion
# ---------------------------------------------------------------------------


class UnsupportedArity(ValueError):
    pass


def _fresh_var(kind, base: str, *nodes):
    avoid = set()
    for n in nodes:
        avoid |= all_names(n)
    name = base
    while name in avoid:
        name += "'"
    return IndVar(name) if kind is IndVar else RelVar(name, 1)


def identity_definiens(f):
    """One-step unfolding of an identity node into its defining formula."""
    if isinstance(f, IdInd):
        x, y = f.left, f.right
        F = _fresh_var(RelVar, "F", x, y)
        ordinary = And(And(Exe(O_BANG, (x,)), Exe(O_BANG, (y,))),
                       Box(Forall(F, Equiv(Exe(F, (x,)), Exe(F, (y,))))))
        abstract = And(And(Exe(A_BANG, (x,)), Exe(A_BANG, (y,))),
                       Box(Forall(F, Equiv(Enc(x, F), Enc(y, F)))))
        return Or(ordinary, abstract)
    if isinstance(f, IdRel):
        if f.left.arity != 1 or f.right.arity != 1:
            raise UnsupportedArity(f"relation identity is only defined for 1-place relations, got arity {f.left.arity}")
        x = _fresh_var(IndVar, "x", f.left, f.right)
        return Box(Forall(x, Equiv(Enc(x, f.left), Enc(x, f.right))))
    raise TypeError("not an identity formula")


def expand_identity(f):
    """Replace every identity node (also inside terms) by its definiens."""
    if isinstance(f, (IdInd, IdRel)):
        return expand_identity(identity_definiens(type(f)(expand_identity(f.left), expand_identity(f.right))))
    if isinstance(f, (IndVar, RelVar, RelConst)):
        return f
    return rebuild(f, expand_identity)


def to_core(f, identities: bool = True):
    """Rewrite into {~, ->, forall, box, exe, enc}.

    ``identities=False`` keeps identity nodes as primitives (the proof kernel
    treats them via axioms rather than by unfolding).
    """
    if isinstance(f, (IndVar, RelVar, RelConst)):
        return f
    if isinstance(f, (IdInd, IdRel)):
        if identities:
            return to_core(identity_definiens(f), identities)
        return type(f)(to_core(f.left, identities), to_core(f.right, identities))
    g = rebuild(f, lambda c: to_core(c, identities))
    if isinstance(g, And):
        return Not(Impl(g.left, Not(g.right)))
    if isinstance(g, Or):
        return Impl(Not(g.left), g.right)
    if isinstance(g, Equiv):
        a, b = g.left, g.right
        return Not(Impl(Impl(a, b), Not(Impl(b, a))))
    if isinstance(g, Diamond):
        return Not(Box(Not(g.body)))
    if isinstance(g, Exists):
        return Not(Forall(g.var, Not(g.body)))
    return g


# ---------------------------------------------------------------------------
# propositional-formula classifier
# ---------------------------------------------------------------------------


def _has_encoding(node, enter_descriptions: bool) -> bool:
    # Identity is defined via encoding, so it counts as an encoding subformula.
    if isinstance(node, (Enc, IdInd, IdRel)):
        return True
    if isinstance(node, Description) and not enter_descriptions:
        return False
    return any(_has_encoding(c, enter_descriptions) for c in children(node))


def classify_propositional(f, mode: str = "strict") -> bool:
    """Is ``f`` admissible as a lambda matrix?

    ``legacy`` does not look inside definite-description matrices; ``strict``
    looks everywhere.
    """
    if mode not in ("legacy", "strict"):
        raise ValueError(f"unknown mode {mode!r}")
    return not _has_encoding(f, enter_descriptions=(mode == "strict"))


def has_description(node) -> bool:
    return any(isinstance(n, Description) for n in subterms(node))


# ---------------------------------------------------------------------------
# printer
# ---------------------------------------------------------------------------

# higher binds tighter
_PREC = {Equiv: 1, Impl: 2, Or: 3, And: 4}


def print_ast(node) -> str:
    if isinstance(node, (IndVar, RelVar, RelConst)):
        return node.name
    if isinstance(node, Lambda):
        return f"[\\{node.var.name}. {print_ast(node.body)}]"
    if isinstance(node, Description):
        return f"(the {node.var.name}. {print_ast(node.body)})"
    return _pf(node)


def _pf(f) -> str:
    if isinstance(f, Exe):
        if not f.args:
            return f.rel.name
        return f"{print_ast(f.rel)}({', '.join(print_ast(a) for a in f.args)})"
    if isinstance(f, Enc):
        return f"{print_ast(f.subject)}[{print_ast(f.rel)}]"
    if isinstance(f, (IdInd, IdRel)):
        return f"{print_ast(f.left)} = {print_ast(f.right)}"
    if isinstance(f, UNARY):
        op = {Not: "~", Box: "box ", Diamond: "dia "}[type(f)]
        return op + _operand(f.body, 5)
    if isinstance(f, QUANT):
        q = "forall" if isinstance(f, Forall) else "exists"
        return f"{q} {f.var.name}. {_pf(f.body)}"
    p = _PREC[type(f)]
    op = {Equiv: "<->", Impl: "->", Or: "|", And: "&"}[type(f)]
    if isinstance(f, Impl):
        left, right = _operand(f.left, p + 1), _operand(f.right, p)
    else:
        left, right = _operand(f.left, p), _operand(f.right, p + 1)
    return f"{left} {op} {right}"


def _operand(f, min_prec: int) -> str:
    if isinstance(f, QUANT):
        return f"({_pf(f)})"
    p = _PREC.get(type(f), 6)
    s = _pf(f)
    return f"({s})" if p < min_prec else s


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|[~&|()\[\].,=\\])|(?P<id>[OA]!|[A-Za-z][A-Za-z0-9_]*'*))"
)
_KEYWORDS = {"forall", "exists", "box", "dia", "the"}


def _tokenize(text: str) -> list:
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise SyntaxErr(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        start = m.start("op") if m.group("op") else m.start("id")
        toks.append((m.group("op") or m.group("id"), start))
        pos = m.end()
    toks.append(("<eof>", len(text)))
    return toks


@dataclasses.dataclass(frozen=True)
class _Atom:
    """Identifier in formula position, resolved to a sort after binding."""

    name: str


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> str:
        return self.toks[min(self.i + k, len(self.toks) - 1)][0]

    def pos(self) -> int:
        return self.toks[self.i][1]

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if expected is not None and tok != expected:
            raise SyntaxErr(f"expected {expected!r}, found {tok!r}", self.pos())
        self.i += 1
        return tok

    def ident(self) -> str:
        tok = self.peek()
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*'*", tok) or tok in _KEYWORDS:
            raise SyntaxErr(f"expected identifier, found {tok!r}", self.pos())
        self.i += 1
        return tok

    # formula := quant | iff
    def formula(self):
        if self.peek() in ("forall", "exists"):
            q = self.take()
            name = self.ident()
            self.take(".")
            body = self.formula()
            return ("quant", q, name, body)
        return self.iff()

    def iff(self):
        left = self.impl()
        while self.peek() == "<->":
            self.take()
            right = self.quant_or(self.impl)
            left = Equiv(left, right)
        return left

    def quant_or(self, nxt):
        if self.peek() in ("forall", "exists"):
            return self.formula()
        return nxt()

    def impl(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            right = self.quant_or(self.impl)
            return Impl(left, right)
        return left

    def disj(self):
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.quant_or(self.conj))
        return left

    def conj(self):
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.quant_or(self.unary))
        return left

    def unary(self):
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.quant_or(self.unary))
        if tok == "box":
            self.take()
            return Box(self.quant_or(self.unary))
        if tok == "dia":
            self.take()
            return Diamond(self.quant_or(self.unary))
        return self.atom()

    def atom(self):
        start = self.pos()
        tok = self.peek()
        if tok == "(" and self.peek(1) != "the":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok in ("(", "["):
            term = self.term()
            return self.after_term(term, start)
        if tok in ("forall", "exists"):
            return self.formula()
        if tok in ("O!", "A!"):
            name = self.take()
            if self.peek() != "(":
                raise SyntaxErr(f"{name} must be applied to an argument", start)
        else:
            name = self.ident()
        if self.peek() == "(":
            if name[0].islower():
                raise SortError(f"individual term {name!r} in relation position", start)
            self.take("(")
            args = [self.ind_term()]
            while self.peek() == ",":
                self.take()
                args.append(self.ind_term())
            self.take(")")
            return ("exe", name, tuple(args))
        if name[0].islower():
            if self.peek() == "[":
                return self.after_term(IndVar(name), start)
            if self.peek() == "=":
                self.take()
                return ("idind", IndVar(name), self.ind_term())
            return _Atom(name)
        # bare uppercase: relation identity or error
        if self.peek() == "=":
            self.take()
            return ("idrel", ("relname", name), self.rel_term())
        raise SortError(f"relation term {name!r} in formula position", start)

    def after_term(self, term, start):
        if self.peek() == "[" and is_ind_term(term):
            self.take("[")
            rel = self.rel_term()
            self.take("]")
            return ("enc", term, rel)
        if self.peek() == "(" and isinstance(term, Lambda):
            self.take("(")
            arg = self.ind_term()
            self.take(")")
            return ("exe", term, (arg,))
        if self.peek() == "=":
            self.take()
            if is_ind_term(term):
                return ("idind", term, self.ind_term())
            return ("idrel", term, self.rel_term())
        if isinstance(term, Lambda) and self.peek() == "[":
            raise SortError("relation term in individual position", start)
        raise SyntaxErr(f"term used as a formula, found {self.peek()!r}", self.pos())

    def term(self):
        tok = self.peek()
        if tok == "[":
            self.take("[")
            self.take("\\")
            name = self.ident()
            if not name[0].islower():
                raise SortError(f"lambda must bind an individual variable, got {name!r}", self.pos())
            self.take(".")
            body = self.formula()
            self.take("]")
            return Lambda(IndVar(name), body)
        if tok == "(" and self.peek(1) == "the":
            self.take("(")
            self.take("the")
            name = self.ident()
            if not name[0].islower():
                raise SortError(f"description must bind an individual variable, got {name!r}", self.pos())
            self.take(".")
            body = self.formula()
            self.take(")")
            return Description(IndVar(name), body)
        start = self.pos()
        name = self.ident()
        return IndVar(name) if name[0].islower() else ("relname", name)

    def ind_term(self):
        start = self.pos()
        t = self.term()
        if not is_ind_term(t):
            raise SortError("relation term in individual position", start)
        return t

    def rel_term(self):
        start = self.pos()
        if self.peek() in ("O!", "A!"):
            return RelConst(self.take())
        t = self.term()
        if is_ind_term(t):
            raise SortError("individual term in relation position", start)
        return t


class _Resolver:
    """Second pass: assign sorts and arities to names.

    Bound names map to a one-element cell recording how the body uses them
    ("ind" or a relation arity); free relation names go to ``self.free``.
    """

    def __init__(self):
        self.free: dict = {}
        self.bound_use: dict = {}

    def note(self, name: str, use, scope: dict):
        if name in scope:
            cell = scope[name]
            if cell[0] not in (None, use):
                raise SortError(f"{name!r} used inconsistently ({cell[0]} and {use})")
            cell[0] = use
            return
        if self.free.get(name) not in (None, use):
            raise SortError(f"{name!r} used inconsistently ({self.free[name]} and {use})")
        self.free[name] = use

    def collect(self, node, scope: dict):
        if isinstance(node, tuple) and node[0] == "quant":
            _, _, name, body = node
            cell = [None]
            self.collect(body, {**scope, name: cell})
            self.bound_use[id(node)] = cell[0]
        elif isinstance(node, tuple) and node[0] == "exe":
            if isinstance(node[1], str):
                if node[1] not in ("O!", "A!"):
                    self.note(node[1], len(node[2]), scope)
            else:
                self.collect(node[1], scope)
            for a in node[2]:
                self.collect(a, scope)
        elif isinstance(node, tuple) and node[0] in ("enc", "idind", "idrel"):
            for part in node[1:]:
                if isinstance(part, tuple) and part[0] == "relname":
                    if node[0] == "enc":
                        self.note(part[1], 1, scope)
                else:
                    self.collect(part, scope)
        elif isinstance(node, tuple):
            raise AssertionError(node)
        elif isinstance(node, _Atom):
            self.note(node.name, 0, scope)
        elif isinstance(node, (Lambda, Description)):
            self.collect(node.body, {**scope, node.var.name: ["ind"]})
        elif isinstance(node, IndVar):
            if node.name in scope:
                self.note(node.name, "ind", scope)
        else:
            for c in children(node):
                self.collect(c, scope)

    def build(self, node, scope: dict):
        if isinstance(node, tuple) and node[0] == "quant":
            _, q, name, body = node
            use = self.bound_use[id(node)]
            if name[0].islower():
                var = RelVar(name, 0) if use == 0 else IndVar(name)
            else:
                var = RelVar(name, 1 if use is None else use)
            return (Forall if q == "forall" else Exists)(var, self.build(body, {**scope, name: var}))
        if isinstance(node, tuple) and node[0] == "exe":
            rel = node[1]
            rel = self.rel(rel, scope, len(node[2])) if isinstance(rel, str) else self.build(rel, scope)
            return Exe(rel, tuple(self.build(a, scope) for a in node[2]))
        if isinstance(node, tuple) and node[0] == "enc":
            return Enc(self.build(node[1], scope), self.build(node[2], scope))
        if isinstance(node, tuple) and node[0] == "idind":
            return IdInd(self.build(node[1], scope), self.build(node[2], scope))
        if isinstance(node, tuple) and node[0] == "idrel":
            left, right = self.build(node[1], scope), self.build(node[2], scope)
            if left.arity != right.arity:
                raise SortError("identity between relations of different arity")
            return IdRel(left, right)
        if isinstance(node, tuple) and node[0] == "relname":
            return self.rel(node[1], scope, None)
        if isinstance(node, _Atom):
            return Exe(self.rel(node.name, scope, 0), ())
        if isinstance(node, (Lambda, Description)):
            return type(node)(node.var, self.build(node.body, {**scope, node.var.name: node.var}))
        if isinstance(node, (IndVar, RelConst)):
            return node
        return rebuild(node, lambda c: self.build(c, scope))

    def rel(self, name: str, scope: dict, arity):
        if name in ("O!", "A!"):
            return RelConst(name)
        bound = scope.get(name)
        if isinstance(bound, RelVar):
            return bound
        if isinstance(bound, IndVar):
            raise SortError(f"individual variable {name!r} in relation position")
        known = self.free.get(name)
        if known is None:
            known = 1 if arity is None else arity
        return RelVar(name, known)


def _resolve(raw):
    r = _Resolver()
    r.collect(raw, {})
    return r.build(raw, {})


def parse(text: str):
    """Parse a formula, or a term when the input is a bare lambda/description."""
    p = _Parser(text)
    if p.peek() in ("[", "(") and p.peek(1) in ("\\", "the"):
        save = p.i
        term = p.term()
        if p.peek() == "<eof>":
            return normalize_bound(_resolve(term))
        p.i = save
    raw = p.formula()
    if p.peek() != "<eof>":
        raise SyntaxErr(f"unexpected {p.peek()!r}", p.pos())
    return normalize_bound(_resolve(raw))


def parse_formula(text: str):
    f = parse(text)
    if not is_formula(f):
        raise SyntaxErr("expected a formula, got a term")
    return f


def parse_term(text: str):
    f = parse(text)
    if is_formula(f):
        raise SyntaxErr("expected a term, got a formula")
    return f
