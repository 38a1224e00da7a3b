"""A deliberately naive reference evaluator.

Shares nothing with ``aot.semantics`` except the model parameters and the
canonical numbering of properties (needed to locate proxies).  Formulas are
first rewritten into core form with identities unfolded; then every clause is
evaluated by brute force over explicit tuples of cells.  Slow, but short
enough to check by eye.  Used only as a test oracle.
"""

from __future__ import annotations

import itertools

from aot import syntax as sx
from aot.model import AczelModel


class NaiveModel:
    def __init__(self, m: AczelModel):
        self.m = m
        self.cells = [(s, w) for s in range(m.n_states) for w in range(m.n_worlds)]
        self.urs = [("o", i) for i in range(m.n_ordinary)] + [("s", j) for j in range(m.n_special)]
        C = len(self.cells)
        # property #k: bit u*C + c of k says whether urelement u has it at cell c
        self.props = []
        for k in range(2 ** (len(self.urs) * C)):
            self.props.append({u: tuple(bool(k >> (ui * C + c) & 1) for c in range(C))
                               for ui, u in enumerate(self.urs)})
        self.objects = []
        if m.n_special:
            for r in range(2 ** len(self.props)):
                self.objects.append(frozenset(i for i in range(len(self.props)) if r >> i & 1))
        self.inds = [("ord", i) for i in range(m.n_ordinary)] + [("abs", a) for a in self.objects]
        self.props0 = [tuple(bool(k >> c & 1) for c in range(C)) for k in range(2**C)]
        self.rels2 = []
        if len(self.urs) ** 2 * C <= 8:
            for k in range(2 ** (len(self.urs) ** 2 * C)):
                self.rels2.append({(u, v): tuple(bool(k >> ((ui * len(self.urs) + vi) * C + c) & 1) for c in range(C))
                                   for ui, u in enumerate(self.urs) for vi, v in enumerate(self.urs)})

    def ur(self, ind):
        kind, v = ind
        if kind == "ord":
            return ("o", v)
        rank = sum(1 << i for i in v)
        return ("s", (rank + self.m.proxy_seed) % self.m.n_special)

    def interp(self, s):
        return self.m.state_interp[s]

    # -- terms --

    def ind(self, t, env):
        if isinstance(t, sx.IndVar):
            return env[t]
        # rigid Russellian description: unique satisfier at the actual cell
        sats = [d for d in self.inds if self.formula(t.body, {**env, t.var: d})[0]]
        return sats[0] if len(sats) == 1 else None

    def rel(self, t, env):
        if isinstance(t, sx.RelVar):
            return env[t]
        if isinstance(t, sx.RelConst):
            want = "o" if t.name == "O!" else "s"
            return {u: tuple(u[0] == want for _ in self.cells) for u in self.urs}
        # lambda: true of u where some individual over u satisfies the body
        out = {}
        for u in self.urs:
            vals = [self.formula(t.body, {**env, t.var: d}) for d in self.inds if self.ur(d) == u]
            out[u] = tuple(any(v[c] for v in vals) for c in range(len(self.cells)))
        return out

    # -- formulas; value is a tuple of bools per cell --

    def formula(self, f, env):
        C = range(len(self.cells))
        if isinstance(f, sx.Exe):
            if not f.args:
                return env[f.rel]
            args = [self.ind(a, env) for a in f.args]
            if None in args:
                return tuple(False for _ in C)
            r = self.rel(f.rel, env)
            key = self.ur(args[0]) if len(args) == 1 else (self.ur(args[0]), self.ur(args[1]))
            return r[key]
        if isinstance(f, sx.Enc):
            d = self.ind(f.subject, env)
            if d is None or d[0] == "ord":
                return tuple(False for _ in C)
            p = self.props.index(self.rel(f.rel, env))
            return tuple(p in d[1] for _ in C)
        if isinstance(f, sx.Not):
            a = self.formula(f.body, env)
            return tuple(bool(self.interp(self.cells[c][0]).not_[a[c]]) for c in C)
        if isinstance(f, sx.Impl):
            a, b = self.formula(f.left, env), self.formula(f.right, env)
            return tuple(bool(self.interp(self.cells[c][0]).impl[2 * a[c] + b[c]]) for c in C)
        if isinstance(f, sx.Box):
            a = self.formula(f.body, env)
            out = []
            for s, _w in self.cells:
                row = [a[c] for c in C if self.cells[c][0] == s]
                out.append(bool(self.interp(s).box[_pattern(row)]))
            return tuple(out)
        if isinstance(f, sx.Forall):
            v = f.var
            if isinstance(v, sx.IndVar):
                dom, table = self.inds, "forall_ind"
            else:
                dom = {0: self.props0, 1: self.props, 2: self.rels2}[v.arity]
                table = "forall_rel"
            vals = [self.formula(f.body, {**env, v: d}) for d in dom]
            return tuple(bool(getattr(self.interp(self.cells[c][0]), table)[_pattern([x[c] for x in vals])])
                         for c in C)
        raise TypeError(f"not a core formula: {type(f).__name__}")


def _pattern(vals) -> int:
    if all(vals):
        return 2
    return 1 if any(vals) else 0


def naive_eval(m: AczelModel, f, env=None) -> tuple:
    """Truth value of ``f`` per cell, as a tuple of bools (cell ``s*|W|+w``)."""
    nm = NaiveModel(m)
    return nm.formula(sx.to_core(f), dict(env or {}))


def naive_valid(m: AczelModel, f) -> bool:
    nm = NaiveModel(m)
    core = sx.to_core(f)
    fv = sorted(sx.free_vars(core), key=lambda v: (type(v).__name__, v.name))
    doms = []
    for v in fv:
        if isinstance(v, sx.IndVar):
            doms.append(nm.inds)
        else:
            doms.append({0: nm.props0, 1: nm.props, 2: nm.rels2}[v.arity])
    for vals in itertools.product(*doms):
        row = nm.formula(core, dict(zip(fv, vals)))
        if not all(row[w] for w in range(m.n_worlds)):  # actual state = first |W| cells
            return False
    return True
