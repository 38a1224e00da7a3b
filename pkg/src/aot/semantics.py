"""Truth and denotation in finite Aczel models.

Exemplification goes through the urelement of the individual (its proxy when
abstract); encoding is membership and is constant across states and worlds;
a 1-place lambda denotes the property that holds of an urelement when *some*
individual over that urelement satisfies the matrix.  Descriptions are
Russellian and rigid: evaluated at the actual state and world.
"""

from __future__ import annotations

import dataclasses
import itertools
from typing import Iterator, Mapping

import numpy as np

from aot import syntax as sx
from aot.model import (
    AbstractInd, AczelModel, BudgetExceeded, Individual, ModelError, OrdinaryInd, Property,
    Proposition, Relation2, StateInterp, build_model,
)


class EvalError(ValueError):
    pass


class ImproperTerm(EvalError):
    pass


@dataclasses.dataclass(frozen=True)
class IndTermDen:
    proper: bool
    value: Individual | None = None


# ---------------------------------------------------------------------------
# value naming: o3, a17, P5, p1, R9
# ---------------------------------------------------------------------------


def value_name(v) -> str:
    if isinstance(v, (OrdinaryInd, AbstractInd)):
        return str(v)
    prefix = {Property: "P", Proposition: "p", Relation2: "R"}[type(v)]
    return f"{prefix}{v.bits}"


def parse_value(text: str):
    kind, num = text[:1], text[1:]
    if not num.isdigit():
        raise EvalError(f"bad value {text!r}; expected o<n>, a<n>, P<n>, p<n> or R<n>")
    cls = {"o": OrdinaryInd, "a": AbstractInd, "P": Property, "p": Proposition, "R": Relation2}.get(kind)
    if cls is None:
        raise EvalError(f"bad value {text!r}")
    return cls(int(num))


def _ur_only(node, var) -> bool:
    """True when every free occurrence of ``var`` in ``node`` is a direct
    argument of an exemplification.  The value of ``node`` then depends on
    ``var`` only through its urelement (induction on the formula), so a
    quantifier or lambda over ``var`` can range over one object per fiber."""
    if node == var:
        return False
    if isinstance(node, sx.Exe):
        return _ur_only(node.rel, var) and all(a == var or _ur_only(a, var) for a in node.args)
    if getattr(node, "var", None) == var:
        return True
    return all(_ur_only(c, var) for c in sx.children(node))


class _NotSymmetric(Exception):
    pass


def _enc_eq_pattern(node) -> bool:
    """``forall G.(a[G] <-> b[G])`` with individual variables a, b."""
    if not (isinstance(node, sx.Forall) and isinstance(node.var, sx.RelVar) and node.var.arity == 1
            and isinstance(node.body, sx.Equiv)):
        return False
    l, r = node.body.left, node.body.right
    return (isinstance(l, sx.Enc) and isinstance(r, sx.Enc) and l.rel == node.var == r.rel
            and isinstance(l.subject, sx.IndVar) and isinstance(r.subject, sx.IndVar))


def _symmetric_fixed(body, var):
    """``(fixed, classical)``: the relation terms whose encoding matters and
    whether the argument needs classical connectives; None if it fails.

    Call a permutation of the abstract objects *tame* if it keeps every
    object in its fiber, fixes the null object, and keeps membership of the
    fixed properties.  When every individual variable of ``body`` sits only
    in exemplification arguments, in x = y, in forall G.(x[G] <-> y[G]) or as
    subject of an encoding of a term with nothing bound inside ``body``, the
    value of ``body`` is invariant under tame permutations applied to all
    individual values at once.  (The forall G pattern is invariant only when
    the connectives are classical.)  A quantifier over ``var`` may then range
    over one object per (fiber, membership class) plus the special values.
    """
    fixed = []
    classical = False

    def walk(n, bound):
        if isinstance(n, (sx.IndVar, sx.Description)):
            raise _NotSymmetric
        if isinstance(n, sx.Exe):
            if not all(isinstance(a, sx.IndVar) for a in n.args):
                raise _NotSymmetric
            walk(n.rel, bound)
        elif isinstance(n, sx.Enc):
            if not isinstance(n.subject, sx.IndVar) or sx.free_vars(n.rel) & bound:
                raise _NotSymmetric
            if n.rel not in fixed:
                fixed.append(n.rel)
        elif isinstance(n, sx.IdInd):
            if not (isinstance(n.left, sx.IndVar) and isinstance(n.right, sx.IndVar)):
                raise _NotSymmetric
        elif _enc_eq_pattern(n):
            nonlocal classical
            classical = True
        elif isinstance(n, sx.BINDERS):
            walk(n.body, bound | {n.var})
        else:
            for c in sx.children(n):
                walk(c, bound)

    try:
        walk(body, frozenset({var}))
    except _NotSymmetric:
        return None
    return tuple(fixed), classical


def _conjuncts(f) -> Iterator:
    if isinstance(f, sx.And):
        yield from _conjuncts(f.left)
        yield from _conjuncts(f.right)
    else:
        yield f


# ---------------------------------------------------------------------------
# evaluator
# ---------------------------------------------------------------------------


class Evaluator:
    """Evaluates formulas of one model; values are ints (see ``aot.model``).

    Results are memoized per node on the values of the node's free variables,
    so an evaluator must only be used with nodes that stay alive (it keeps a
    reference to every node it caches).
    """

    symmetry = True  # tests switch the tame-permutation reduction off to cross-check it

    def __init__(self, m: AczelModel):
        self.m = m
        self.env: dict = {}
        self._memo: dict = {}
        self._info: dict = {}
        self._sym: dict = {}
        self._sym_domains: dict = {}
        self._dispatch = {
            sx.Exe: self._exe, sx.Enc: self._enc, sx.Not: self._not, sx.Impl: self._impl,
            sx.And: self._and, sx.Or: self._or, sx.Equiv: self._equiv, sx.Forall: self._quant,
            sx.Exists: self._quant, sx.Box: self._box, sx.Diamond: self._dia, sx.IdInd: self._idind,
            sx.IdRel: self._idrel,
        }

    # -- bookkeeping ----------------------------------------------------------

    def _node_info(self, node):
        info = self._info.get(id(node))
        if info is None:
            fv = tuple(sorted(sx.free_vars(node), key=lambda v: (type(v).__name__, v.name, getattr(v, "arity", 0))))
            body = getattr(node, "body", None)
            var = getattr(node, "var", None)
            info = (node, fv, _ur_only(body, var) if var is not None else True)
            self._info[id(node)] = info
        return info

    def _key(self, node):
        _, fv, _ = self._node_info(node)
        try:
            return (id(node), tuple(self.env[v] for v in fv))
        except KeyError as e:
            raise EvalError(f"unbound variable {e.args[0].name}") from None

    def lookup(self, v):
        try:
            return self.env[v]
        except KeyError:
            raise EvalError(f"unbound variable {v.name}") from None

    def bind(self, asg: Mapping):
        for var, val in asg.items():
            self.env[var] = self.encode(var, val)

    def encode(self, var, val) -> int:
        m = self.m
        if isinstance(var, sx.IndVar):
            if isinstance(val, int):
                return val
            if not isinstance(val, (OrdinaryInd, AbstractInd)):
                raise EvalError(f"{var.name} needs an individual, got {val!r}")
            if isinstance(val, OrdinaryInd) and val.index >= m.n_ordinary:
                raise EvalError(f"{val} is not in the model")
            if isinstance(val, AbstractInd) and (not m.n_special or val.rank >= m.n_abstract):
                raise EvalError(f"{val} is not in the model")
            return m.ind_code(val)
        expected = {0: Proposition, 1: Property, 2: Relation2}[var.arity]
        if isinstance(val, int):
            return val
        if not isinstance(val, expected):
            raise EvalError(f"{var.name} needs a {expected.__name__}, got {val!r}")
        return val.bits

    def decode(self, var, code: int):
        if isinstance(var, sx.IndVar):
            return self.m.ind_of_code(code)
        return {0: Proposition, 1: Property, 2: Relation2}[var.arity](code)

    # -- domains --------------------------------------------------------------

    def rel_domain(self, arity: int) -> range:
        m = self.m
        if arity == 0:
            n = 1 << m.n_prop_cells
        elif arity == 1:
            n = m.n_properties
        elif arity == 2:
            n = 1 << (m.n_urelements**2 * m.n_prop_cells)
        else:
            raise EvalError(f"relations of arity {arity} are not supported")
        m.check_property_budget(n)
        return range(n)

    def ind_representatives(self) -> list:
        m = self.m
        reps = list(range(m.n_ordinary))
        for u in range(m.n_ordinary, m.n_urelements):
            r = m.fiber_representative(u)
            if r is not None:
                reps.append(r)
        return reps

    def domain(self, var, ur_only: bool):
        if isinstance(var, sx.IndVar):
            return self.ind_representatives() if ur_only else self.m.individual_codes()
        return self.rel_domain(var.arity)

    # -- terms ----------------------------------------------------------------

    def den_ind(self, t) -> int | None:
        if isinstance(t, sx.IndVar):
            return self.lookup(t)
        if isinstance(t, sx.Description):
            key = self._key(t)
            if key in self._memo:
                return self._memo[key]
            out = self._describe(t)
            self._memo[key] = out
            return out
        raise EvalError(f"not an individual term: {t!r}")

    def _describe(self, t: sx.Description) -> int | None:
        var, body = t.var, t.body
        candidates = None
        for c in _conjuncts(body):
            if isinstance(c, sx.IdInd):
                for a, b in ((c.left, c.right), (c.right, c.left)):
                    if a == var and var not in sx.free_vars(b):
                        d = self.den_ind(b)
                        candidates = [] if d is None else [d]
                        break
            if candidates is not None:
                break
        if candidates is None:
            candidates = self.m.individual_codes()
        found = None
        saved = self.env.get(var, _MISSING)
        try:
            for c in candidates:
                self.env[var] = c
                if self.eval(body) & 1:
                    if found is not None:
                        return None
                    found = c
        finally:
            _restore(self.env, var, saved)
        return found

    def den_rel(self, r) -> int:
        if isinstance(r, sx.RelVar):
            return self.lookup(r)
        if isinstance(r, sx.RelConst):
            return self.m.o_bang if r.name == "O!" else self.m.a_bang
        if isinstance(r, sx.Lambda):
            key = self._key(r)
            if key in self._memo:
                return self._memo[key]
            out = self._lambda(r)
            self._memo[key] = out
            return out
        raise EvalError(f"not a relation term: {r!r}")

    def _lambda(self, lam: sx.Lambda) -> int:
        m = self.m
        _, _, ur_only = self._node_info(lam)
        full, bits = m.full, 0
        saved = self.env.get(lam.var, _MISSING)
        try:
            for u in range(m.n_urelements):
                if ur_only:
                    r = m.fiber_representative(u)
                    fiber = () if r is None else (r,)
                else:
                    fiber = m.fiber_codes(u)
                acc = 0
                for c in fiber:
                    self.env[lam.var] = c
                    acc |= self.eval(lam.body)
                    if acc == full:
                        break
                bits |= acc << (u * m.n_prop_cells)
        finally:
            _restore(self.env, lam.var, saved)
        return bits

    # -- formulas -------------------------------------------------------------

    def eval(self, f) -> int:
        try:
            handler = self._dispatch[type(f)]
        except KeyError:
            raise EvalError(f"not a formula: {f!r}") from None
        return handler(f)

    def _exe(self, f):
        m = self.m
        n = len(f.args)
        if n == 0:
            return self.lookup(f.rel)
        codes = [self.den_ind(a) for a in f.args]
        if any(c is None for c in codes):
            return 0
        bits = self.den_rel(f.rel)
        if n == 1:
            return m.exe_bits(bits, m.urelement_of_code(codes[0]))
        if n == 2:
            u1, u2 = (m.urelement_of_code(c) for c in codes)
            return m.exe_bits(bits, u1 * m.n_urelements + u2)
        raise EvalError(f"relations of arity {n} are not supported")

    def _enc_value(self, code, prop_bits) -> int:
        m = self.m
        if code is None or code < m.n_ordinary:
            return 0
        return m.full if (code - m.n_ordinary) >> prop_bits & 1 else 0

    def _enc(self, f):
        code = self.den_ind(f.subject)
        if code is None or code < self.m.n_ordinary:
            return 0
        return self._enc_value(code, self.den_rel(f.rel))

    def _not(self, f):
        return self.m.neg(self.eval(f.body))

    def _impl(self, f):
        m = self.m
        a = self.eval(f.left)
        if m.imp_decided(a):
            return m.imp(a, 0)
        return m.imp(a, self.eval(f.right))

    def _and(self, f):
        m = self.m
        a = self.eval(f.left)
        if m.imp_decided(a):
            return m.neg(m.imp(a, 0))
        return m.conj(a, self.eval(f.right))

    def _or(self, f):
        m = self.m
        na = m.neg(self.eval(f.left))
        if m.imp_decided(na):
            return m.imp(na, 0)
        return m.imp(na, self.eval(f.right))

    def _equiv(self, f):
        return self.m.iff(self.eval(f.left), self.eval(f.right))

    def _box(self, f):
        return self.m.box(self.eval(f.body))

    def _dia(self, f):
        m = self.m
        return m.neg(m.box(m.neg(self.eval(f.body))))

    def _quant(self, f):
        key = self._key(f)
        out = self._memo.get(key)
        if out is None:
            out = self._quant_compute(f)
            self._memo[key] = out
        return out

    def _one_point(self, f):
        """Exact shortcut for ``exists v.(v = t & ...)`` and
        ``forall v.(v = t & ... -> ...)`` in classical models."""
        if not self.m.is_classical or not isinstance(f.var, sx.IndVar):
            return None
        guard = f.body if isinstance(f, sx.Exists) else (f.body.left if isinstance(f.body, sx.Impl) else None)
        if guard is None:
            return None
        for c in _conjuncts(guard):
            if isinstance(c, sx.IdInd):
                for a, b in ((c.left, c.right), (c.right, c.left)):
                    if a == f.var and f.var not in sx.free_vars(b):
                        d = self.den_ind(b)
                        if d is None:
                            return 0 if isinstance(f, sx.Exists) else self.m.full
                        return (d,)
            pinned = self._pinned_by_encoding(f.var, c)
            if pinned is not None:
                return pinned
        return None

    def _pinned_by_encoding(self, x, c):
        """Candidates for ``x`` under a conjunct ``forall F.(x[F] <-> phi)``
        with ``x`` not free in ``phi``: at cell k only the abstract object
        encoding {F : phi(F) at k} satisfies it, or an ordinary object when
        that set is empty."""
        if not (isinstance(c, sx.Forall) and isinstance(c.var, sx.RelVar) and c.var.arity == 1
                and isinstance(c.body, sx.Equiv)):
            return None
        F = c.var
        for enc, phi in ((c.body.left, c.body.right), (c.body.right, c.body.left)):
            if enc == sx.Enc(x, F) and x not in sx.free_vars(phi):
                break
        else:
            return None
        m = self.m
        masks = [0] * m.n_prop_cells
        saved = self.env.get(F, _MISSING)
        try:
            for p in self.rel_domain(1):
                self.env[F] = p
                v = self.eval(phi)
                for k in range(m.n_prop_cells):
                    if v >> k & 1:
                        masks[k] |= 1 << p
        finally:
            _restore(self.env, F, saved)
        out = list(range(m.n_ordinary))
        if m.n_special:
            out.extend(m.n_ordinary + r for r in sorted(set(masks)))
        return tuple(out)

    def _symmetric_domain(self, f):
        """Reduced domain for ``f``'s individual variable (see
        ``_symmetric_fixed``), or None when the reduction does not apply."""
        m = self.m
        if not (self.symmetry and m.n_special):
            return None
        key = id(f)
        if key not in self._sym:
            self._sym[key] = _symmetric_fixed(f.body, f.var)
        found = self._sym[key]
        if found is None or (found[1] and not m.is_classical):
            return None
        fixed = found[0]
        props = tuple(self.den_rel(r) for r in fixed)
        null = m.n_ordinary
        partners = {self.lookup(v) for v in self._node_info(f)[1] if isinstance(v, sx.IndVar)}
        special = tuple(sorted(partners | {null}))
        dkey = (props, special)
        out = self._sym_domains.get(dkey)
        if out is None:
            picks = set(range(m.n_ordinary)) | set(special)
            for u in range(m.n_ordinary, m.n_urelements):
                fiber = m.fiber_codes(u)
                codes = np.arange(fiber.start, fiber.stop, fiber.step, dtype=np.int64)
                codes = codes[~np.isin(codes, special)]
                ranks = codes - m.n_ordinary
                cls = np.zeros(len(codes), dtype=np.int64)
                for i, p in enumerate(props):
                    cls |= ((ranks >> p) & 1) << i
                _, first = np.unique(cls, return_index=True)
                picks.update(int(c) for c in codes[first])
            out = sorted(picks)
            self._sym_domains[dkey] = out
        return out

    def _quant_compute(self, f):
        m = self.m
        exists = isinstance(f, sx.Exists)
        op = "forall_ind" if isinstance(f.var, sx.IndVar) else "forall_rel"
        _, _, ur_only = self._node_info(f)
        domain = self._one_point(f)
        if isinstance(domain, int):
            return domain
        one_point = domain is not None
        if domain is None and isinstance(f.var, sx.IndVar) and not ur_only:
            domain = self._symmetric_domain(f)
        if domain is None:
            domain = self.domain(f.var, ur_only)
            if (isinstance(f.var, sx.IndVar) and m.is_classical and len(domain) >= BATCH_THRESHOLD
                    and _batchable(f.body, f.var)):
                return self._quant_batched(f, exists)
        all_acc, any_acc = m.full, 0
        saved = self.env.get(f.var, _MISSING)
        try:
            for c in domain:
                self.env[f.var] = c
                v = self.eval(f.body)
                if exists:
                    v = m.neg(v)
                all_acc &= v
                any_acc |= v
                if m.decided(op, all_acc, any_acc):
                    break
        finally:
            _restore(self.env, f.var, saved)
        if one_point:
            # every other instance is vacuously true (forall) / false (exists)
            any_acc = m.full
        out = m.aggregate(op, all_acc, any_acc)
        return m.neg(out) if exists else out

    # batched evaluation: one individual variable ranges over a numpy array of
    # codes; only used in classical models

    def _quant_batched(self, f, exists: bool) -> int:
        m = self.m
        codes = np.arange(len(m.individual_codes()), dtype=np.int64)
        saved = self.env.get(f.var, _MISSING)
        try:
            self.env[f.var] = _Batch(codes)
            v = self._beval(f.body, f.var)
        finally:
            _restore(self.env, f.var, saved)
        if isinstance(v, np.ndarray):
            v = int(np.bitwise_or.reduce(v)) if exists else int(np.bitwise_and.reduce(v))
        return v

    def _beval(self, f, var):
        if var not in self._node_info(f)[1]:
            return self.eval(f)
        m = self.m
        full = m.full
        t = type(f)
        if t is sx.Exe:
            bits = self.den_rel(f.rel)
            us = [self._burelement(a) for a in f.args]
            if len(us) == 1:
                u = us[0]
            else:
                u = us[0] * m.n_urelements + us[1]
            return np.right_shift(bits, u * m.n_prop_cells) & full
        if t is sx.Enc:
            codes = self._bcode(f.subject)
            p = self.den_rel(f.rel)
            ranks = codes - m.n_ordinary
            return np.where(codes >= m.n_ordinary, np.right_shift(np.maximum(ranks, 0), p) & 1, 0) * full
        if t is sx.IdInd:
            a, b = self._bcode(f.left), self._bcode(f.right)
            return np.where(a == b, full, 0)
        if t is sx.Not:
            return ~self._beval(f.body, var) & full
        if t is sx.Impl:
            return (~self._beval(f.left, var) | self._beval(f.right, var)) & full
        if t is sx.And:
            return self._beval(f.left, var) & self._beval(f.right, var)
        if t is sx.Or:
            return self._beval(f.left, var) | self._beval(f.right, var)
        if t is sx.Equiv:
            return ~(self._beval(f.left, var) ^ self._beval(f.right, var)) & full
        if t in (sx.Box, sx.Diamond):
            a = self._beval(f.body, var)
            if t is sx.Diamond:
                a = ~a & full
            out = 0
            for row in m.rows:
                out = out | np.where(a & row == row, row, 0)
            return ~out & full if t is sx.Diamond else out
        if t in (sx.Forall, sx.Exists):
            exists = t is sx.Exists
            acc = 0 if exists else full
            saved = self.env.get(f.var, _MISSING)
            try:
                for c in self.rel_domain(f.var.arity):
                    self.env[f.var] = c
                    v = self._beval(f.body, var)
                    if exists:
                        acc = acc | v
                        if np.all(acc == full):
                            break
                    else:
                        acc = acc & v
                        if not np.any(acc):
                            break
            finally:
                _restore(self.env, f.var, saved)
            return acc
        raise AssertionError(f"not batchable: {t.__name__}")

    def _bcode(self, t):
        v = self.env[t] if isinstance(t, sx.IndVar) else self.den_ind(t)
        return v.codes if isinstance(v, _Batch) else v

    def _burelement(self, t):
        v = self.env[t] if isinstance(t, sx.IndVar) else self.den_ind(t)
        if isinstance(v, _Batch):
            return v.urelements(self.m)
        return self.m.urelement_of_code(v)

    # identity: computed from the definiens, with each quantifier ranging over
    # the distinct values its instances can take

    def _forall_over(self, op: str, values) -> int:
        m = self.m
        all_acc, any_acc = m.full, 0
        for v in values:
            all_acc &= v
            any_acc |= v
        return m.aggregate(op, all_acc, any_acc)

    def _idind(self, f):
        m = self.m
        x, y = self.den_ind(f.left), self.den_ind(f.right)
        full = m.full
        if m.is_classical:
            # distinct individuals always differ on some property (ordinary)
            # or some encoded property (abstract)
            return full if x is not None and x == y else 0

        def ordinary(c):
            return full if c is not None and c < m.n_ordinary else 0

        def abstract(c):
            return full if c is not None and c >= m.n_ordinary else 0

        # forall F (Fx <-> Fy)
        if x is None or y is None:
            ux = None if x is None else m.urelement_of_code(x)
            uy = None if y is None else m.urelement_of_code(y)
            props = range(1 << m.n_prop_cells)
            if ux is None and uy is None:
                pairs = {(0, 0)}
            else:
                pairs = {(p, 0) for p in props} if uy is None else {(0, p) for p in props}
        elif m.urelement_of_code(x) == m.urelement_of_code(y):
            pairs = {(p, p) for p in range(1 << m.n_prop_cells)}
        else:
            pairs = {(p, q) for p in range(1 << m.n_prop_cells) for q in range(1 << m.n_prop_cells)}
        exe_same = m.box(self._forall_over("forall_rel", (m.iff(p, q) for p, q in pairs)))
        # forall F (xF <-> yF)
        enc_same = m.box(self._forall_over("forall_rel", (m.iff(p, q) for p, q in self._enc_pairs(x, y))))
        d1 = m.conj(m.conj(ordinary(x), ordinary(y)), exe_same)
        d2 = m.conj(m.conj(abstract(x), abstract(y)), enc_same)
        return m.disj(d1, d2)

    def _enc_pairs(self, x, y) -> set:
        m = self.m
        every = (1 << m.n_properties) - 1

        def mask(c):
            return 0 if c is None or c < m.n_ordinary else c - m.n_ordinary

        mx, my = mask(x), mask(y)
        pairs = set()
        if mx & my:
            pairs.add((m.full, m.full))
        if mx & ~my & every:
            pairs.add((m.full, 0))
        if my & ~mx & every:
            pairs.add((0, m.full))
        if (mx | my) != every:
            pairs.add((0, 0))
        return pairs

    def _idrel(self, f):
        m = self.m
        if f.left.arity != 1 or f.right.arity != 1:
            raise sx.UnsupportedArity(f"relation identity is only defined for 1-place relations, got arity {f.left.arity}")
        p, q = self.den_rel(f.left), self.den_rel(f.right)
        pairs = set()
        if m.n_ordinary:
            pairs.add((0, 0))
        if m.n_special:
            pairs |= {(0, 0), (m.full, m.full)}
            if p != q:
                pairs |= {(m.full, 0), (0, m.full)}
        return m.box(self._forall_over("forall_ind", (m.iff(a, b) for a, b in pairs)))


_MISSING = object()

BATCH_THRESHOLD = 512


class _Batch:
    """Marker for an individual variable bound to all codes at once."""

    def __init__(self, codes):
        self.codes = codes
        self._u = None

    def urelements(self, m: AczelModel):
        if self._u is None:
            c = self.codes
            spec = m.n_ordinary + (c - m.n_ordinary + m.proxy_seed) % max(m.n_special, 1)
            self._u = np.where(c < m.n_ordinary, c, spec)
        return self._u


def _batchable(body, var) -> bool:
    """Can ``body`` be evaluated for all values of ``var`` at once?"""
    if var not in sx.free_vars(body):
        return True
    t = type(body)
    if t is sx.Exe:
        return (0 < len(body.args) <= 2 and var not in sx.free_vars(body.rel)
                and all(isinstance(a, sx.IndVar) for a in body.args))
    if t is sx.Enc:
        return var not in sx.free_vars(body.rel) and isinstance(body.subject, sx.IndVar)
    if t is sx.IdInd:
        return isinstance(body.left, sx.IndVar) and isinstance(body.right, sx.IndVar)
    if t in (sx.Not, sx.Box, sx.Diamond):
        return _batchable(body.body, var)
    if t in (sx.Impl, sx.And, sx.Or, sx.Equiv):
        return _batchable(body.left, var) and _batchable(body.right, var)
    if t in (sx.Forall, sx.Exists):
        return isinstance(body.var, sx.RelVar) and body.var != var and _batchable(body.body, var)
    return False


def _restore(env: dict, var, saved):
    if saved is _MISSING:
        env.pop(var, None)
    else:
        env[var] = saved


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def _evaluator(m: AczelModel, asg: Mapping | None) -> Evaluator:
    ev = Evaluator(m)
    ev.bind(asg or {})
    return ev


def den_individual_term(m: AczelModel, asg: Mapping, t) -> IndTermDen:
    ev = _evaluator(m, asg)
    c = ev.den_ind(t)
    return IndTermDen(False) if c is None else IndTermDen(True, m.ind_of_code(c))


def exe1(m: AczelModel, asg: Mapping, rel, t) -> Proposition:
    if not sx.is_rel_term(rel) or rel.arity != 1:
        raise sx.SortError("exe1 needs a 1-place relation term")
    return Proposition(_evaluator(m, asg).eval(sx.Exe(rel, (t,))))


def enc(m: AczelModel, asg: Mapping, t, rel) -> Proposition:
    if not sx.is_rel_term(rel) or rel.arity != 1:
        raise sx.SortError("enc needs a 1-place relation term")
    return Proposition(_evaluator(m, asg).eval(sx.Enc(t, rel)))


def lambda1(m: AczelModel, asg: Mapping, x: sx.IndVar, matrix) -> Property:
    return Property(_evaluator(m, asg).den_rel(sx.Lambda(x, matrix)))


def eval_formula(m: AczelModel, asg: Mapping, f) -> Proposition:
    return Proposition(_evaluator(m, asg).eval(f))


def _var_key(v):
    return (0 if isinstance(v, sx.IndVar) else 1, getattr(v, "arity", 0), v.name)


def universal_closure(f, skip=frozenset()):
    # individual variables innermost: that is where the one-point and the
    # batched shortcuts apply
    for v in sorted(sx.free_vars(f) - set(skip), key=_var_key):
        f = sx.Forall(v, f)
    return f


def actual_row(m: AczelModel, bits: int) -> list:
    """Truth values at the actual state, one per world."""
    return [bool(bits >> w & 1) for w in range(m.n_worlds)]


def valid(m: AczelModel, f, asg: Mapping | None = None) -> bool:
    """True at the actual state in every world, for every value of the free
    variables not fixed by ``asg``."""
    g = universal_closure(f, skip=set(asg or {}))
    bits = _evaluator(m, asg).eval(g)
    return bits & m.rows[0] == m.rows[0]


def beta_check(m: AczelModel, asg: Mapping, lam: sx.Lambda, t) -> bool:
    ev = _evaluator(m, asg)
    if ev.den_ind(t) is None:
        raise ImproperTerm(f"{sx.print_ast(t)} does not denote")
    lhs = ev.eval(sx.Exe(lam, (t,)))
    rhs = ev.eval(sx.substitute(lam.body, lam.var, t))
    row = m.rows[0]
    return lhs & row == rhs & row


def beta_failures(m: AczelModel, lam: sx.Lambda, asg: Mapping | None = None) -> Iterator[Individual]:
    """Individuals ``i`` for which beta-conversion of ``lam`` at ``i`` fails."""
    ev = _evaluator(m, asg)
    y = sx.IndVar(sx.fresh_name("y", sx.all_names(lam)))
    lhs_f = sx.Exe(lam, (y,))
    rhs_f = sx.substitute(lam.body, lam.var, y)
    row = m.rows[0]
    for c in m.individual_codes():
        ev.env[y] = c
        if ev.eval(lhs_f) & row != ev.eval(rhs_f) & row:
            yield m.ind_of_code(c)


def denotes(m: AczelModel, asg: Mapping, t) -> bool:
    if sx.is_ind_term(t):
        return den_individual_term(m, asg, t).proper
    if isinstance(t, sx.Lambda):
        if sx.classify_propositional(t.body, "strict"):
            return True
        return next(beta_failures(m, t, asg), None) is None
    if isinstance(t, (sx.RelVar, sx.RelConst)):
        return True
    raise sx.SortError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# countermodels
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Countermodel:
    model: AczelModel
    assignment: dict
    world: int

    def describe(self) -> dict:
        return {
            "model": self.model.describe(),
            "assignment": {v.name: value_name(x) for v, x in self.assignment.items()},
            "world": self.world,
        }


def falsifying_assignment(m: AczelModel, f) -> Countermodel | None:
    """First assignment (canonical order) making ``f`` false at the actual
    state in some world, or None when ``f`` is valid in ``m``."""
    if valid(m, f):
        return None
    ev = Evaluator(m)
    free = sorted(sx.free_vars(f), key=_var_key)
    domains = [ev.domain(v, ur_only=False) for v in free]
    row = m.rows[0]
    for values in itertools.product(*domains):
        ev.env = dict(zip(free, values))
        bits = ev.eval(f)
        if bits & row != row:
            world = next(w for w in range(m.n_worlds) if not bits >> w & 1)
            return Countermodel(m, {v: ev.decode(v, c) for v, c in zip(free, values)}, world)
    raise AssertionError("closure is false but no falsifying assignment found")


def _interp_variants(n_states: int) -> Iterator[dict]:
    """Non-classical connective tables for the non-actual states, classical first."""
    nots = [(1, 0)] + [t for t in itertools.product((0, 1), repeat=2) if t != (1, 0)]
    impls = [(1, 1, 0, 1)] + [t for t in itertools.product((0, 1), repeat=4) if t != (1, 1, 0, 1)]
    per_state = [StateInterp(not_=n, impl=i) for n in nots for i in impls]
    for combo in itertools.product(per_state, repeat=n_states - 1):
        yield {s + 1: si for s, si in enumerate(combo)}


def search_configs(max_ordinary=1, max_special=1, max_states=1, max_worlds=1, min_ordinary=1, min_special=1,
                   budget_objects: int = 2**20, cell_cap: int = 8) -> list:
    configs = []
    for o in range(min_ordinary, max_ordinary + 1):
        for s in range(min_special, max_special + 1):
            for st in range(1, max_states + 1):
                for w in range(1, max_worlds + 1):
                    if o + s == 0:
                        continue
                    cells = (o + s) * st * w
                    if cells > cell_cap or (s and 2 ** (2**cells) > budget_objects):
                        raise BudgetExceeded(f"configuration {(o, s, st, w)} exceeds the enumeration budget")
                    configs.append((o, s, st, w))
    configs.sort(key=lambda c: ((c[0] + c[1]) * c[2] * c[3], c[2], c[3], c[0], c[1]))
    return configs


def countermodel_search(f, max_ordinary=1, max_special=1, max_states=1, max_worlds=1, vary_state_interp=False,
                        min_ordinary=1, min_special=1, budget_objects: int = 2**20) -> Countermodel | None:
    """First model (increasing size) with an assignment falsifying ``f``."""
    for o, s, st, w in search_configs(max_ordinary, max_special, max_states, max_worlds, min_ordinary,
                                      min_special, budget_objects):
        variants = _interp_variants(st) if vary_state_interp and st > 1 else [None]
        for interp in variants:
            m = build_model(o, s, st, w, state_interp=interp, budget_objects=budget_objects)
            found = falsifying_assignment(m, f)
            if found is not None:
                return found
    return None


def evaluation_report(m: AczelModel, f, asg: Mapping | None = None) -> dict:
    bits = eval_formula(m, asg or {}, f).bits
    return {
        "formula": sx.print_ast(f),
        "model": m.describe(),
        "assignment": {v.name: value_name(x) for v, x in (asg or {}).items()},
        "actual_state_truth": actual_row(m, bits),
        "table": [[bool(bits >> (s * m.n_worlds + w) & 1) for w in range(m.n_worlds)] for s in range(m.n_states)],
    }


__all__ = [
    "EvalError", "ImproperTerm", "IndTermDen", "Evaluator", "Countermodel", "den_individual_term", "exe1", "enc",
    "lambda1", "eval_formula", "valid", "beta_check", "beta_failures", "denotes", "countermodel_search",
    "falsifying_assignment", "universal_closure", "value_name", "parse_value", "evaluation_report", "ModelError",
]
