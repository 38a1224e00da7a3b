"""LCF-style proof kernel.

Theorems (``TheoremObj``) can only be made by the functions of this module,
each of which checks one rule application.  Every theorem carries the full
trace of its derivation, and ``replay`` re-checks a trace with the very same
step checker, so a trace read back from text is as good as the original.

Catalog (rule ids as they appear in traces)::

    A1        O!(x) -> box ~exists F. x[F]
    A2        exists x.(A!(x) & forall F.(x[F] <-> phi)),  x not free in phi
    A3        x[F] -> box x[F]
    A4-ord    O!(x) & O!(y) -> (x = y <-> box forall F.(F(x) <-> F(y)))
    A4-abs    A!(x) & A!(y) -> (x = y <-> box forall F.(x[F] <-> y[F]))
    A4-rel    F = G <-> box forall x.(x[F] <-> x[G])
    A4-refl   t = t                       (t a certified term)
    A5-K      box(phi -> psi) -> (box phi -> box psi)
    A5-T      box phi -> phi
    A5-BF     forall a. box phi -> box forall a. phi
    A6        forall a. phi -> phi[t/a]   (t a certified term)
    A7        forall a.(phi -> psi) -> (phi -> forall a. psi),  a not free in phi
    LEIBNIZ   s = t -> (phi(s) -> phi(t)) (s, t certified)
    MP GEN RN
    DEF       restatement modulo the defined connectives (&, |, <->, dia, exists)
    TAUT      propositional tautology over atoms, certified by resolution
    TC        tautological consequence of the premises
    BETA      [\\x. phi](y) <-> phi[y/x], phi strictly propositional, no descriptions

Certified terms: variables, O!, A!, and lambdas whose matrix is strictly
propositional and description free.  Descriptions are never certified.

Extra rules can be plugged into ``replay``/``Derivation`` through an
``Extension``; theorems are never made from a trace that used one.
"""

from __future__ import annotations

import dataclasses
import itertools
from typing import Callable, Iterable, Mapping, Sequence

from aot import prop
from aot import syntax as sx
from aot.syntax import (
    A_BANG, And, Box, Enc, Equiv, Exe, Exists, Forall, IdInd, IdRel, Impl, IndVar, Lambda, Not, O_BANG,
    RelConst, RelVar,
)


class KernelError(ValueError):
    pass


class RuleError(KernelError):
    pass


class UnknownSchema(KernelError):
    pass


class GateError(KernelError):
    pass


class TraceError(KernelError):
    pass


class NotATautology(RuleError):
    def __init__(self, msg, valuation=None):
        super().__init__(msg)
        self.valuation = valuation or {}


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Step:
    rule: str
    premises: tuple
    formula: object

    def line(self, idx: int) -> str:
        prem = ",".join(str(p) for p in self.premises) or "-"
        return f"{idx} {self.rule} {prem} {sx.print_ast(self.formula)}"


class ProofTrace:
    """Steps of a derivation; premises are indices of earlier steps."""

    def __init__(self, steps: Iterable[Step] = ()):
        self.steps: list[Step] = []
        self._index: dict = {}
        for s in steps:
            self.append(s)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    def append(self, step: Step) -> int:
        for p in step.premises:
            if not 0 <= p < len(self.steps):
                raise TraceError(f"step {len(self.steps)}: premise {p} does not refer to an earlier step")
        key = (step.rule, step.premises, sx.canon(step.formula))
        if key in self._index:
            return self._index[key]
        self.steps.append(step)
        self._index[key] = len(self.steps) - 1
        return len(self.steps) - 1

    def graft(self, other: "ProofTrace") -> list:
        """Copy ``other`` into this trace; returns the new index of each step."""
        where = []
        for s in other.steps:
            where.append(self.append(Step(s.rule, tuple(where[p] for p in s.premises), s.formula)))
        return where

    def rules(self) -> set:
        return {s.rule for s in self.steps}

    def extract(self, i: int) -> "ProofTrace":
        """The steps that step ``i`` depends on, renumbered, ending with ``i``."""
        need, stack = set(), [i]
        while stack:
            k = stack.pop()
            if k not in need:
                need.add(k)
                stack.extend(self.steps[k].premises)
        sub, where = ProofTrace(), {}
        for k in sorted(need):
            s = self.steps[k]
            where[k] = sub.append(Step(s.rule, tuple(where[p] for p in s.premises), s.formula))
        return sub

    def serialize(self) -> str:
        return "".join(s.line(i) + "\n" for i, s in enumerate(self.steps))

    @classmethod
    def parse(cls, text: str) -> "ProofTrace":
        steps = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(None, 3)
            if len(parts) < 4:
                raise TraceError(f"line {lineno}: expected '<idx> <rule> <premises> <formula>'")
            idx, rule, prem, text_f = parts
            if not idx.isdigit() or int(idx) != len(steps):
                raise TraceError(f"line {lineno}: step index {idx} out of sequence (expected {len(steps)})")
            try:
                premises = () if prem == "-" else tuple(int(p) for p in prem.split(","))
            except ValueError:
                raise TraceError(f"line {lineno}: bad premise list {prem!r}") from None
            try:
                f = sx.parse_formula(text_f)
            except sx.SyntaxErr as e:
                raise TraceError(f"line {lineno}: {e}") from None
            steps.append(Step(rule, premises, f))
        # no dedup on parse: indices must stay as written
        t = cls()
        for i, s in enumerate(steps):
            for p in s.premises:
                if not 0 <= p < i:
                    raise TraceError(f"step {i}: premise {p} does not refer to an earlier step")
            t.steps.append(s)
        return t


# ---------------------------------------------------------------------------
# certification and matching
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Extension:
    """Rules outside the catalog, with their own checkers.

    ``lambdas_denote`` makes every lambda a certified term (the naive reading
    in which all well-formed lambdas denote)."""

    name: str
    rules: Mapping[str, Callable]
    lambdas_denote: bool = False


def certified(t, ext: Extension | None = None) -> bool:
    if isinstance(t, (IndVar, RelVar, RelConst)):
        return True
    if isinstance(t, Lambda):
        if ext is not None and ext.lambdas_denote:
            return True
        return sx.classify_propositional(t.body, "strict") and not sx.has_description(t.body)
    return False


def match_instance(body, v, inst):
    """A term ``t`` with ``body[t/v]`` alpha-equivalent to ``inst``, or None."""
    found = []

    def walk(p, q, bound):
        if p == v and v not in bound:
            found.append(q)
            return True
        if type(p) is not type(q):
            return False
        if isinstance(p, (IndVar, RelVar, RelConst)):
            return True  # compared by the final alpha check
        if isinstance(p, sx.BINDERS):
            return walk(p.body, q.body, bound | {p.var})
        if isinstance(p, Exe) and len(p.args) != len(q.args):
            return False
        return all(walk(a, b, bound) for a, b in zip(sx.children(p), sx.children(q)))

    if not walk(body, inst, frozenset()):
        return None
    candidates = found[:1] or [v]
    t = candidates[0]
    try:
        if sx.alpha_eq(sx.substitute(body, v, t), inst):
            return t
    except sx.SortError:
        return None
    return None


def leibniz_ok(s, t, a, b) -> bool:
    """Is ``b`` obtained from ``a`` by replacing some free occurrences of
    ``s`` by ``t`` (none of them under a binder capturing s or t)?"""
    fv = sx.free_vars(s) | sx.free_vars(t)

    def walk(p, q, bound):
        if p == q:
            return True
        if not bound & fv and sx.alpha_eq(p, s) and sx.alpha_eq(q, t):
            return True
        if type(p) is not type(q) or isinstance(p, (IndVar, RelVar, RelConst)):
            return False
        if isinstance(p, sx.BINDERS):
            # binder names must agree; renamed binders are never needed for
            # replacement sites, since those would be captured
            return p.var == q.var and walk(p.body, q.body, bound | {p.var})
        if isinstance(p, Exe) and len(p.args) != len(q.args):
            return False
        return all(walk(x, y, bound) for x, y in zip(sx.children(p), sx.children(q)))

    return walk(a, b, frozenset())


def _same(a, b) -> bool:
    return sx.alpha_eq(a, b)


def _fail(rule, why):
    raise RuleError(f"{rule}: {why}")


# ---------------------------------------------------------------------------
# schema builders
# ---------------------------------------------------------------------------


def _iv(inst, key, default):
    v = inst.get(key, default)
    if isinstance(v, str):
        v = IndVar(v)
    if not isinstance(v, IndVar):
        raise KernelError(f"{key} must be an individual variable")
    return v


def _rv(inst, key, default):
    v = inst.get(key, default)
    if isinstance(v, str):
        v = RelVar(v, 1)
    if not isinstance(v, RelVar) or v.arity != 1:
        raise KernelError(f"{key} must be a 1-place relation variable")
    return v


def _f(inst, key):
    if key not in inst:
        raise KernelError(f"missing instantiation for {key}")
    v = inst[key]
    return sx.parse_formula(v) if isinstance(v, str) else v


def as_term(v):
    """Terms from text; a bare name is a variable (lowercase: individual)."""
    if not isinstance(v, str):
        return v
    v = v.strip()
    if v.replace("'", "").isidentifier() and v not in ("O!", "A!"):
        return IndVar(v) if v[:1].islower() else RelVar(v, 1)
    return sx.parse_term(v)


def _term(inst, key):
    if key not in inst:
        raise KernelError(f"missing instantiation for {key}")
    return as_term(inst[key])


def _var(inst, key):
    v = inst[key]
    if isinstance(v, str):
        v = IndVar(v) if v[:1].islower() else RelVar(v, 1)
    if not isinstance(v, (IndVar, RelVar)):
        raise KernelError(f"{key} must be a variable")
    return v


def build_instance(schema: str, inst: Mapping):
    """The formula of a catalog schema instance (before checking)."""
    if schema == "A1":
        x, F = _iv(inst, "x", "x"), _rv(inst, "F", "F")
        return Impl(Exe(O_BANG, (x,)), Box(Not(Exists(F, Enc(x, F)))))
    if schema == "A2":
        x, F, phi = _iv(inst, "x", "x"), _rv(inst, "F", "F"), _f(inst, "phi")
        return Exists(x, And(Exe(A_BANG, (x,)), Forall(F, Equiv(Enc(x, F), phi))))
    if schema == "A3":
        x, F = _iv(inst, "x", "x"), _rv(inst, "F", "F")
        return Impl(Enc(x, F), Box(Enc(x, F)))
    if schema in ("A4-ord", "A4-abs"):
        x, y, F = _iv(inst, "x", "x"), _iv(inst, "y", "y"), _rv(inst, "F", "F")
        if schema == "A4-ord":
            c, a, b = O_BANG, Exe(F, (x,)), Exe(F, (y,))
        else:
            c, a, b = A_BANG, Enc(x, F), Enc(y, F)
        return Impl(And(Exe(c, (x,)), Exe(c, (y,))), Equiv(IdInd(x, y), Box(Forall(F, Equiv(a, b)))))
    if schema == "A4-rel":
        F, G, x = _rv(inst, "F", "F"), _rv(inst, "G", "G"), _iv(inst, "x", "x")
        return Equiv(IdRel(F, G), Box(Forall(x, Equiv(Enc(x, F), Enc(x, G)))))
    if schema == "A4-refl":
        t = _term(inst, "t")
        return IdInd(t, t) if sx.is_ind_term(t) else IdRel(t, t)
    if schema == "A5-K":
        a, b = _f(inst, "phi"), _f(inst, "psi")
        return Impl(Box(Impl(a, b)), Impl(Box(a), Box(b)))
    if schema == "A5-T":
        a = _f(inst, "phi")
        return Impl(Box(a), a)
    if schema == "A5-BF":
        v, a = _var(inst, "alpha"), _f(inst, "phi")
        return Impl(Forall(v, Box(a)), Box(Forall(v, a)))
    if schema == "A6":
        v, a, t = _var(inst, "alpha"), _f(inst, "phi"), _term(inst, "tau")
        return Impl(Forall(v, a), sx.substitute(a, v, t))
    if schema == "A7":
        v, a, b = _var(inst, "alpha"), _f(inst, "phi"), _f(inst, "psi")
        return Impl(Forall(v, Impl(a, b)), Impl(a, Forall(v, b)))
    if schema == "LEIBNIZ":
        v, a, s, t = _var(inst, "alpha"), _f(inst, "phi"), _term(inst, "s"), _term(inst, "t")
        ident = IdInd(s, t) if sx.is_ind_term(s) else IdRel(s, t)
        return Impl(ident, Impl(sx.substitute(a, v, s), sx.substitute(a, v, t)))
    raise UnknownSchema(f"unknown schema {schema!r}; catalog: {', '.join(SCHEMAS)}")


SCHEMAS = ("A1", "A2", "A3", "A4-ord", "A4-abs", "A4-rel", "A4-refl", "A5-K", "A5-T", "A5-BF", "A6", "A7",
           "LEIBNIZ")


# ---------------------------------------------------------------------------
# step checkers: (premise formulas, formula, extension) -> None or RuleError
# ---------------------------------------------------------------------------


def _no_premises(rule, prem):
    if prem:
        _fail(rule, "takes no premises")


def _is_var_exe(f, const):
    return isinstance(f, Exe) and f.rel == const and len(f.args) == 1 and isinstance(f.args[0], IndVar)


def _chk_a1(prem, f, ext):
    _no_premises("A1", prem)
    ok = (isinstance(f, Impl) and _is_var_exe(f.left, O_BANG) and isinstance(f.right, Box)
          and isinstance(f.right.body, Not) and isinstance(f.right.body.body, Exists))
    if ok:
        q = f.right.body.body
        x = f.left.args[0]
        ok = isinstance(q.var, RelVar) and q.var.arity == 1 and q.body == Enc(x, q.var)
    if not ok:
        _fail("A1", "not of the form O!(x) -> box ~exists F. x[F]")


def _chk_a2(prem, f, ext):
    _no_premises("A2", prem)
    ok = isinstance(f, Exists) and isinstance(f.var, IndVar) and isinstance(f.body, And)
    if ok:
        x, conj = f.var, f.body
        ok = conj.left == Exe(A_BANG, (x,)) and isinstance(conj.right, Forall)
        if ok:
            q = conj.right
            ok = (isinstance(q.var, RelVar) and q.var.arity == 1 and isinstance(q.body, Equiv)
                  and q.body.left == Enc(x, q.var))
            if ok and x in sx.free_vars(q.body.right):
                _fail("A2", f"{x.name} may not be free in the comprehension condition")
    if not ok:
        _fail("A2", "not of the form exists x.(A!(x) & forall F.(x[F] <-> phi))")


def _chk_a3(prem, f, ext):
    _no_premises("A3", prem)
    if not (isinstance(f, Impl) and isinstance(f.left, Enc) and isinstance(f.left.subject, IndVar)
            and isinstance(f.left.rel, RelVar) and f.right == Box(f.left)):
        _fail("A3", "not of the form x[F] -> box x[F]")


def _chk_a4(kind):
    rule = f"A4-{kind}"

    def chk(prem, f, ext):
        _no_premises(rule, prem)
        try:
            if kind == "rel":
                F, G = f.left.left, f.left.right
                x = f.right.body.var
                expect = build_instance("A4-rel", {"F": F, "G": G, "x": x})
            else:
                x, y = f.left.left.args[0], f.left.right.args[0]
                F = f.right.right.body.var
                expect = build_instance(rule, {"x": x, "y": y, "F": F})
        except (AttributeError, IndexError, KernelError, TypeError):
            _fail(rule, "wrong shape")
        if f != expect:
            _fail(rule, "wrong shape")
        if kind != "rel" and x == y:
            pass  # the reflexive instance is fine
    return chk


def _chk_refl(prem, f, ext):
    _no_premises("A4-refl", prem)
    if not isinstance(f, (IdInd, IdRel)) or f.left != f.right:
        _fail("A4-refl", "not of the form t = t")
    if not certified(f.left, ext):
        _fail("A4-refl", f"{sx.print_ast(f.left)} is not a certified denoting term")


def _chk_k(prem, f, ext):
    _no_premises("A5-K", prem)
    ok = (isinstance(f, Impl) and isinstance(f.left, Box) and isinstance(f.left.body, Impl)
          and isinstance(f.right, Impl) and isinstance(f.right.left, Box) and isinstance(f.right.right, Box))
    if not ok or not (_same(f.left.body.left, f.right.left.body) and _same(f.left.body.right, f.right.right.body)):
        _fail("A5-K", "not of the form box(phi -> psi) -> (box phi -> box psi)")


def _chk_t(prem, f, ext):
    _no_premises("A5-T", prem)
    if not (isinstance(f, Impl) and isinstance(f.left, Box) and _same(f.left.body, f.right)):
        _fail("A5-T", "not of the form box phi -> phi")


def _chk_bf(prem, f, ext):
    _no_premises("A5-BF", prem)
    ok = (isinstance(f, Impl) and isinstance(f.left, Forall) and isinstance(f.left.body, Box)
          and isinstance(f.right, Box) and isinstance(f.right.body, Forall))
    if not ok or not _same(Forall(f.left.var, f.left.body.body), f.right.body):
        _fail("A5-BF", "not of the form forall a. box phi -> box forall a. phi")


def _chk_a6(prem, f, ext):
    _no_premises("A6", prem)
    if not (isinstance(f, Impl) and isinstance(f.left, Forall)):
        _fail("A6", "not of the form forall a. phi -> phi[t/a]")
    v, body = f.left.var, f.left.body
    t = match_instance(body, v, f.right)
    if t is None:
        _fail("A6", "consequent is not an instance of the quantified formula")
    if isinstance(t, sx.Description):
        _fail("A6", "descriptions are never certified to denote")
    if not certified(t, ext):
        _fail("A6", f"{sx.print_ast(t)} is not a certified denoting term")


def _chk_a7(prem, f, ext):
    _no_premises("A7", prem)
    ok = (isinstance(f, Impl) and isinstance(f.left, Forall) and isinstance(f.left.body, Impl)
          and isinstance(f.right, Impl) and isinstance(f.right.right, Forall))
    if ok:
        v, a, b = f.left.var, f.left.body.left, f.left.body.right
        ok = _same(a, f.right.left) and _same(Forall(v, b), f.right.right)
        if ok and v in sx.free_vars(a):
            _fail("A7", f"{v.name} may not be free in the antecedent")
    if not ok:
        _fail("A7", "not of the form forall a.(phi -> psi) -> (phi -> forall a. psi)")


def _chk_leibniz(prem, f, ext):
    _no_premises("LEIBNIZ", prem)
    if not (isinstance(f, Impl) and isinstance(f.left, (IdInd, IdRel)) and isinstance(f.right, Impl)):
        _fail("LEIBNIZ", "not of the form s = t -> (phi(s) -> phi(t))")
    s, t = f.left.left, f.left.right
    for term in (s, t):
        if not certified(term, ext):
            _fail("LEIBNIZ", f"{sx.print_ast(term)} is not a certified denoting term")
    if not leibniz_ok(s, t, f.right.left, f.right.right):
        _fail("LEIBNIZ", "consequent is not a substitution instance")


def _chk_mp(prem, f, ext):
    if len(prem) != 2:
        _fail("MP", "needs two premises (major, minor)")
    maj, mnr = prem
    if not isinstance(maj, Impl):
        _fail("MP", f"major premise is not an implication: {sx.print_ast(maj)}")
    if not _same(maj.left, mnr):
        _fail("MP", "minor premise does not match the antecedent")
    if not _same(maj.right, f):
        _fail("MP", "conclusion does not match the consequent")


def _chk_gen(prem, f, ext):
    if len(prem) != 1:
        _fail("GEN", "needs one premise")
    if not (isinstance(f, Forall) and _same(f.body, prem[0])):
        _fail("GEN", "conclusion is not forall v. premise")


def _chk_rn(prem, f, ext):
    if len(prem) != 1:
        _fail("RN", "needs one premise")
    if not (isinstance(f, Box) and _same(f.body, prem[0])):
        _fail("RN", "conclusion is not box premise")


def _chk_def(prem, f, ext):
    if len(prem) != 1:
        _fail("DEF", "needs one premise")
    if sx.canon(sx.to_core(prem[0], identities=False)) != sx.canon(sx.to_core(f, identities=False)):
        _fail("DEF", "not the same formula modulo defined connectives")


def tautology_check(premises: Sequence, f):
    """(ok, valuation) for ``premises |= f`` over shared atoms; by resolution."""
    sks, atoms = prop.skeleton(*premises, f)
    e = prop.implication_of(sks[:-1], sks[-1])
    ok, val = prop.resolution_tautology(e, len(atoms))
    if ok:
        return True, None
    return False, {sx.print_ast(resugar(a)): v for a, v in zip(atoms, val)}


def _chk_taut(prem, f, ext):
    _no_premises("TAUT", prem)
    ok, val = tautology_check([], f)
    if not ok:
        raise NotATautology(f"TAUT: not a tautology; falsified by {_fmt_val(val)}", val)


def _chk_tc(prem, f, ext):
    if not prem:
        _fail("TC", "needs at least one premise (use TAUT)")
    ok, val = tautology_check(prem, f)
    if not ok:
        raise NotATautology(f"TC: not a tautological consequence; countervaluation {_fmt_val(val)}", val)


def _fmt_val(val) -> str:
    return ", ".join(f"{k}={'true' if v else 'false'}" for k, v in val.items())


def beta_shape(f):
    """``(lambda, arg, contractum, reduct)`` if ``f`` is [\\x.phi](t) <-> psi
    or psi <-> [\\x.phi](t); else None."""
    if not isinstance(f, Equiv):
        return None
    for redex, other in ((f.left, f.right), (f.right, f.left)):
        if isinstance(redex, Exe) and isinstance(redex.rel, Lambda) and len(redex.args) == 1:
            lam, t = redex.rel, redex.args[0]
            return lam, t, other, sx.substitute(lam.body, lam.var, t)
    return None


def _chk_beta(prem, f, ext):
    _no_premises("BETA", prem)
    shape = beta_shape(f)
    if shape is None:
        _fail("BETA", "not of the form [\\x. phi](t) <-> phi[t/x]")
    lam, t, other, reduct = shape
    check_beta_matrix(lam)
    if not isinstance(t, IndVar):
        _fail("BETA", f"argument {sx.print_ast(t)} is not a certified denoting term")
    if not _same(other, reduct):
        _fail("BETA", "right side is not the reduct")


def check_beta_matrix(lam: Lambda):
    if sx.has_description(lam.body):
        _fail("BETA", "matrix contains a definite description")
    if not sx.classify_propositional(lam.body, "strict"):
        _fail("BETA", "matrix is not propositional (it contains an encoding subformula)")


CHECKERS: dict[str, Callable] = {
    "A1": _chk_a1, "A2": _chk_a2, "A3": _chk_a3, "A4-ord": _chk_a4("ord"), "A4-abs": _chk_a4("abs"),
    "A4-rel": _chk_a4("rel"), "A4-refl": _chk_refl, "A5-K": _chk_k, "A5-T": _chk_t, "A5-BF": _chk_bf,
    "A6": _chk_a6, "A7": _chk_a7, "LEIBNIZ": _chk_leibniz, "MP": _chk_mp, "GEN": _chk_gen, "RN": _chk_rn,
    "DEF": _chk_def, "TAUT": _chk_taut, "TC": _chk_tc, "BETA": _chk_beta,
}


def check_step(rule: str, premises: Sequence, formula, ext: Extension | None = None):
    """Raise RuleError unless ``formula`` follows from ``premises`` by ``rule``."""
    chk = CHECKERS.get(rule)
    if chk is None and ext is not None:
        chk = ext.rules.get(rule)
    if chk is None:
        raise UnknownSchema(f"unknown rule {rule!r}")
    chk(tuple(premises), formula, ext)


# ---------------------------------------------------------------------------
# theorems
# ---------------------------------------------------------------------------

_TOKEN = object()


class TheoremObj:
    __slots__ = ("_formula", "_trace")

    def __init__(self, formula, trace: ProofTrace, _token=None):
        if _token is not _TOKEN:
            raise KernelError("theorems can only be produced by kernel operations")
        self._formula = formula
        self._trace = trace

    @property
    def formula(self):
        return self._formula

    @property
    def trace(self) -> ProofTrace:
        return self._trace

    def __repr__(self):
        return f"<theorem {sx.print_ast(self._formula)} ({len(self._trace)} steps)>"


def _derive(rule: str, premises: Sequence[TheoremObj], formula) -> TheoremObj:
    for p in premises:
        if not isinstance(p, TheoremObj):
            raise KernelError(f"premise is not a theorem: {p!r}")
    check_step(rule, [p.formula for p in premises], formula)
    trace = ProofTrace()
    idx = []
    for p in premises:
        idx.append(trace.graft(p.trace)[-1])
    if trace.append(Step(rule, tuple(idx), formula)) != len(trace) - 1:
        # the same step already occurs earlier; restate it last
        trace.steps.append(Step(rule, tuple(idx), formula))
    return TheoremObj(formula, trace, _TOKEN)


def axiom_instance(schema: str, inst: Mapping | None = None, **kw) -> TheoremObj:
    inst = dict(inst or {}, **kw)
    if schema not in SCHEMAS:
        raise UnknownSchema(f"unknown schema {schema!r}; catalog: {', '.join(SCHEMAS)}")
    if schema == "A2":
        x = _iv(inst, "x", "x")
        if x in sx.free_vars(_f(inst, "phi")):
            raise RuleError(f"A2: {x.name} may not be free in the comprehension condition")
    if schema == "A6" and isinstance(_term(inst, "tau"), sx.Description):
        raise RuleError("A6: descriptions are never certified to denote")
    return _derive(schema, [], build_instance(schema, inst))


def mp(maj: TheoremObj, mnr: TheoremObj) -> TheoremObj:
    if not isinstance(maj.formula, Impl):
        raise RuleError(f"MP: major premise is not an implication: {sx.print_ast(maj.formula)}")
    return _derive("MP", [maj, mnr], maj.formula.right)


def gen(t: TheoremObj, v) -> TheoremObj:
    if isinstance(v, str):
        v = IndVar(v) if v[:1].islower() else RelVar(v, 1)
    return _derive("GEN", [t], Forall(v, t.formula))


def rn(t: TheoremObj) -> TheoremObj:
    return _derive("RN", [t], Box(t.formula))


def defn(t: TheoremObj, formula) -> TheoremObj:
    if isinstance(formula, str):
        formula = sx.parse_formula(formula)
    return _derive("DEF", [t], formula)


def beta_rule(lam, t, direction: str = "contract") -> TheoremObj:
    lam, t = as_term(lam), as_term(t)
    if not isinstance(lam, Lambda):
        raise RuleError("BETA: not a lambda term")
    check_beta_matrix(lam)
    redex, reduct = Exe(lam, (t,)), sx.substitute(lam.body, lam.var, t)
    if direction == "contract":
        f = Equiv(redex, reduct)
    elif direction == "expand":
        f = Equiv(reduct, redex)
    else:
        raise KernelError(f"direction must be expand or contract, not {direction!r}")
    return _derive("BETA", [], f)


def taut_prove(f) -> TheoremObj:
    if isinstance(f, str):
        f = sx.parse_formula(f)
    return _derive("TAUT", [], f)


def tc(f, *premises: TheoremObj) -> TheoremObj:
    if isinstance(f, str):
        f = sx.parse_formula(f)
    return _derive("TC", list(premises), f)


def replay(trace: ProofTrace, ext: Extension | None = None):
    """Re-check every step.  Returns the theorem of the last step, or, when an
    extension was supplied, just the list of checked formulas (extensions
    never yield theorems)."""
    formulas = []
    for i, s in enumerate(trace.steps):
        if any(not 0 <= p < i for p in s.premises):
            raise TraceError(f"step {i}: premise out of range")
        try:
            check_step(s.rule, [formulas[p] for p in s.premises], s.formula, ext)
        except KernelError as e:
            raise TraceError(f"step {i} ({s.rule}): {e}") from None
        formulas.append(s.formula)
    if not formulas:
        raise TraceError("empty trace")
    if ext is not None:
        return formulas
    return TheoremObj(formulas[-1], trace, _TOKEN)


# ---------------------------------------------------------------------------
# scripted derivations
# ---------------------------------------------------------------------------


class Derivation:
    """Builds one trace step by step, checking each step as it goes.

    Methods return step indices.  Unlike the theorem functions this can run
    under an ``Extension``; ``theorem()`` is refused for such derivations.
    """

    def __init__(self, ext: Extension | None = None):
        self.ext = ext
        self.trace = ProofTrace()

    def f(self, i: int):
        return self.trace.steps[i].formula

    def step(self, rule: str, premises: Sequence[int], formula) -> int:
        if isinstance(formula, str):
            formula = sx.parse_formula(formula)
        check_step(rule, [self.f(p) for p in premises], formula, self.ext)
        return self.trace.append(Step(rule, tuple(premises), formula))

    def axiom(self, schema: str, **inst) -> int:
        return self.step(schema, (), build_instance(schema, inst))

    def mp(self, maj: int, mnr: int) -> int:
        f = self.f(maj)
        if not isinstance(f, Impl):
            raise RuleError("MP: major premise is not an implication")
        return self.step("MP", (maj, mnr), f.right)

    def gen(self, i: int, v) -> int:
        return self.step("GEN", (i,), Forall(v, self.f(i)))

    def rn(self, i: int) -> int:
        return self.step("RN", (i,), Box(self.f(i)))

    def taut(self, formula) -> int:
        return self.step("TAUT", (), formula)

    def tc(self, formula, *premises: int) -> int:
        return self.step("TC", premises, formula)

    def hs(self, i: int, j: int) -> int:
        """From a -> b and b -> c infer a -> c."""
        a, c = self.f(i).left, self.f(j).right
        return self.tc(Impl(a, c), i, j)

    def theorem(self, i: int | None = None) -> TheoremObj:
        if self.ext is not None:
            raise GateError(f"derivation uses extension {self.ext.name!r}; it yields no kernel theorem")
        i = len(self.trace) - 1 if i is None else i
        return replay(self.trace.extract(i))


BARCAN_DIAMOND = "(dia exists x. F(x)) -> exists x. dia F(x)"


def derive_barcan_diamond() -> TheoremObj:
    """The possibility form of the Barcan formula from BF, K, RN, A6, A7."""
    x, F = IndVar("x"), RelVar("F", 1)
    Fx = Exe(F, (x,))
    nF = Not(Fx)
    d = Derivation()
    bf = d.axiom("A5-BF", alpha=x, phi=nF)                    # ∀x□¬Fx → □∀x¬Fx
    # □∀x¬Fx → □¬¬∀x¬Fx
    t1 = d.taut(Impl(Forall(x, nF), Not(Not(Forall(x, nF)))))
    k1 = d.axiom("A5-K", phi=Forall(x, nF), psi=Not(Not(Forall(x, nF))))
    box_dn = d.mp(k1, d.rn(t1))
    # ∀x¬¬□¬Fx → ∀x□¬Fx
    inst = d.axiom("A6", alpha=x, phi=Not(Not(Box(nF))), tau=x)
    strip = d.hs(inst, d.taut(Impl(Not(Not(Box(nF))), Box(nF))))
    g = d.gen(strip, x)
    a7 = d.axiom("A7", alpha=x, phi=Forall(x, Not(Not(Box(nF)))), psi=Box(nF))
    to_all = d.mp(a7, g)
    # ∀x¬¬□¬Fx → □¬¬∀x¬Fx, then contrapose
    chain = d.hs(d.hs(to_all, bf), box_dn)
    lhs, rhs = d.f(chain).left, d.f(chain).right
    contra = d.tc(Impl(Not(rhs), Not(lhs)), chain)
    d.step("DEF", (contra,), BARCAN_DIAMOND)
    return d.theorem()


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------


@dataclasses.dataclass
class AuditReport:
    formula: str
    passed: list
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def soundness_audit(t: TheoremObj, models: Sequence) -> AuditReport:
    """Check the theorem's formula in each model.  A failure means a kernel bug."""
    from aot.semantics import valid

    passed, failures = [], []
    for m in models:
        (passed if valid(m, t.formula) else failures).append(m.config)
    return AuditReport(sx.print_ast(t.formula), passed, failures)


# ---------------------------------------------------------------------------
# bounded forward search (firewall audit)
# ---------------------------------------------------------------------------


@dataclasses.dataclass
class SearchResult:
    target: str
    found: bool
    depth: int
    universe_size: int
    theorems: int
    derivation: ProofTrace | None = None


def _search_universe(target):
    """Core subformulas of the target and their negations; ``bounded_search``
    grows this into the full universe."""
    core = sx.to_core(target, identities=False)
    base = {}
    for n in sx.subterms(core):
        if _is_formula(n):
            base.setdefault(sx.canon(n), n)
    for n in list(base.values()):
        base.setdefault(sx.canon(Not(n)), Not(n))
    return list(base.values())


def resugar(f):
    """Undo the core rewriting of &, <->, dia and exists (best effort; used to
    recognize axiom instances among core formulas)."""
    if isinstance(f, (IndVar, RelVar, RelConst)):
        return f
    f = sx.rebuild(f, resugar)
    if isinstance(f, Not):
        b = f.body
        if isinstance(b, Impl) and isinstance(b.right, Not):
            l, r = b.left, b.right.body
            if isinstance(l, Impl) and isinstance(r, Impl) and l.left == r.right and l.right == r.left:
                return Equiv(l.left, l.right)
            return And(l, r)
        if isinstance(b, Forall) and isinstance(b.body, Not):
            return Exists(b.var, b.body.body)
        if isinstance(b, Box) and isinstance(b.body, Not):
            return sx.Diamond(b.body.body)
    return f


def _is_formula(n) -> bool:
    return isinstance(n, (Exe, Enc, Not, Impl, Forall, Box, IdInd, IdRel))


def bounded_search(target, depth: int = 6, extra_seeds: Sequence = (), max_universe: int = 4000) -> SearchResult:
    """Breadth-first closure of catalog axioms under MP, GEN and RN.

    The universe of formulas is fixed in advance from the target (see
    ``_search_universe``); every axiom and tautology instance inside it is a
    seed, then each round applies every rule once to everything known.
    ``found`` means the target (up to defined connectives) was derived within
    ``depth`` rounds.
    """
    if isinstance(target, str):
        target = sx.parse_formula(target)
    base = _search_universe(target)
    for s in extra_seeds:
        s = sx.to_core(sx.parse_formula(s) if isinstance(s, str) else s, identities=False)
        for n in sx.subterms(s):
            if _is_formula(n):
                base.append(n)
    universe = {}

    def add(f):
        k = sx.canon(f)
        if k not in universe:
            universe[k] = f

    for f in base:
        add(f)
    atoms = list(universe.values())
    for _ in range(2):
        cur = list(universe.values())
        for a, b in itertools.product(cur, atoms):
            if len(universe) >= max_universe:
                break
            add(Impl(a, b))
            add(Impl(b, a))
    for f in list(universe.values()):
        add(Box(f))
        for v in sx.free_vars(f):
            add(Forall(v, f))
    formulas = list(universe.values())
    target_key = sx.canon(sx.to_core(target, identities=False))

    known: dict = {}
    rounds_of: dict = {}
    trace = ProofTrace()

    def learn(rule, prem, f, rnd):
        k = sx.canon(f)
        if k in known:
            return False
        known[k] = trace.append(Step(rule, tuple(prem), f))
        rounds_of[k] = rnd
        return True

    structural = ("A1", "A2", "A3", "A4-ord", "A4-abs", "A4-rel", "A4-refl", "A5-K", "A5-T", "A5-BF", "A6",
                  "A7", "LEIBNIZ", "BETA")
    for f in formulas:
        (sk,), atoms = prop.skeleton(f, core=True)
        if not isinstance(sk, int) and prop.truth_table(sk, len(atoms))[0]:
            learn("TAUT", (), f, 0)
            continue
        sugar = resugar(f)
        for rule in structural:
            hit = None
            for cand in (f,) if sugar == f else (f, sugar):
                try:
                    check_step(rule, (), cand)
                except (KernelError, sx.SyntaxErr):
                    continue
                hit = cand
                break
            if hit is f:
                learn(rule, (), f, 0)
            elif hit is not None:
                i = trace.append(Step(rule, (), hit))
                known[sx.canon(f)] = trace.append(Step("DEF", (i,), f))
            if hit is not None:
                break
    found_at = 0 if target_key in known else None
    rnd = 0
    while found_at is None and rnd < depth:
        rnd += 1
        snapshot = [(k, trace.steps[i].formula, i) for k, i in known.items()]
        new = False
        for _k, f, i in snapshot:
            if isinstance(f, Impl):
                ka = sx.canon(f.left)
                if ka in known:
                    new |= learn("MP", (i, known[ka]), f.right, rnd)
            if sx.canon(Box(f)) in universe or sx.canon(Box(f)) == target_key:
                new |= learn("RN", (i,), Box(f), rnd)
            for v in sx.free_vars(f):
                g = Forall(v, f)
                if sx.canon(g) in universe or sx.canon(g) == target_key:
                    new |= learn("GEN", (i,), g, rnd)
        if target_key in known:
            found_at = rnd
        if not new:
            break
    found = target_key in known
    deriv = trace.extract(known[target_key]) if found else None
    return SearchResult(sx.print_ast(target), found, rnd if found_at is None else found_at, len(formulas),
                        len(known), deriv)


# ---------------------------------------------------------------------------
# catalog samples (axiom validity suite)
# ---------------------------------------------------------------------------

# (schema, instantiation, heavy).  Heavy: y is an encoding subject under a
# bound F, so checking the instance scans every y against its comprehension
# witness; about 20s per model with 2^16 abstract objects, so suites check it
# only in smaller models.
CATALOG_SAMPLES = (
    ("A1", {}, False),
    ("A2", {"phi": "F = G"}, False),
    ("A2", {"phi": "F(y)"}, False),
    ("A2", {"phi": "y[F] & ~F(y)"}, True),
    ("A2", {"phi": "p"}, False),
    ("A3", {}, False),
    ("A3", {"x": "y", "F": "G"}, False),
    ("A4-ord", {}, False),
    ("A4-ord", {"y": "x"}, False),
    ("A4-abs", {}, False),
    ("A4-abs", {"y": "x"}, False),
    ("A4-rel", {}, False),
    ("A4-refl", {"t": "x"}, False),
    ("A4-refl", {"t": "F"}, False),
    ("A4-refl", {"t": "[\\z. F(z) & G(z)]"}, False),
    ("A5-K", {"phi": "F(x)", "psi": "G(x)"}, False),
    ("A5-K", {"phi": "x[F]", "psi": "p"}, False),
    ("A5-T", {"phi": "F(x)"}, False),
    ("A5-T", {"phi": "dia x[F]"}, False),
    ("A5-BF", {"alpha": "x", "phi": "F(x)"}, False),
    ("A6", {"alpha": "x", "phi": "F(x) -> x[G]", "tau": "y"}, False),
    ("A6", {"alpha": "F", "phi": "x[F] -> box x[F]", "tau": "G"}, False),
    ("A6", {"alpha": "F", "phi": "F(x) & x[F]", "tau": "[\\z. ~F(z)]"}, False),
    ("A7", {"alpha": "x", "phi": "p", "psi": "F(x)"}, False),
    ("LEIBNIZ", {"alpha": "H", "phi": "x[H] & H(x)", "s": "F", "t": "G"}, False),
    ("LEIBNIZ", {"alpha": "z", "phi": "F(z) & z[G]", "s": "x", "t": "y"}, False),
)


def catalog_samples() -> list:
    """[(label, theorem, heavy)] for every sample instance."""
    out = []
    for schema, inst, heavy in CATALOG_SAMPLES:
        t = axiom_instance(schema, inst)
        out.append((f"{schema} {sx.print_ast(t.formula)}", t, heavy))
    return out
