"""Propositional layer: skeletons over atoms, truth tables, and a small
resolution prover (Tseitin clauses + Davis-Putnam variable elimination).

A skeleton is an int (atom index), ``("~", e)`` or ``("->", a, b)``.  Atoms
are the maximal subformulas whose main operator is not ``~`` or ``->`` after
rewriting into core form, identified up to renaming of bound variables.
"""

from __future__ import annotations

import itertools

from aot import syntax as sx


class ResolutionBudget(RuntimeError):
    pass


def skeleton(*formulas, atoms: list | None = None, keys: dict | None = None, core: bool = False):
    """Skeletons of ``formulas`` over one shared atom table.

    Returns ``(skeletons, atoms)``; ``atoms[i]`` is the (core) formula of atom i.
    Pass ``core=True`` for formulas already in core form.
    """
    atoms = [] if atoms is None else atoms
    keys = {} if keys is None else keys

    def walk(f):
        if isinstance(f, sx.Not):
            return ("~", walk(f.body))
        if isinstance(f, sx.Impl):
            return ("->", walk(f.left), walk(f.right))
        k = sx.canon(f)
        if k not in keys:
            keys[k] = len(atoms)
            atoms.append(f)
        return keys[k]

    return [walk(f if core else sx.to_core(f, identities=False)) for f in formulas], atoms


def evaluate(e, val) -> bool:
    if isinstance(e, int):
        return bool(val[e])
    if e[0] == "~":
        return not evaluate(e[1], val)
    return (not evaluate(e[1], val)) or evaluate(e[2], val)


def truth_table(e, n_atoms: int):
    """(is_tautology, first falsifying valuation or None)."""
    for val in itertools.product((True, False), repeat=n_atoms):
        if not evaluate(e, val):
            return False, val
    return True, None


# ---------------------------------------------------------------------------
# resolution
# ---------------------------------------------------------------------------


def tseitin(e, n_atoms: int) -> tuple[list, int]:
    """Clauses satisfiable iff ``e`` is falsifiable.  Atom i is variable i+1;
    negation is folded into literals, so only implications get gate variables."""
    clauses = []
    counter = [n_atoms]
    cache = {}

    def lit(x):
        if isinstance(x, int):
            return x + 1
        if x[0] == "~":
            return -lit(x[1])
        if x in cache:
            return cache[x]
        a, b = lit(x[1]), lit(x[2])
        counter[0] += 1
        g = counter[0]
        clauses.extend([frozenset((-g, -a, b)), frozenset((g, a)), frozenset((g, -b))])
        cache[x] = g
        return g

    clauses.append(frozenset((-lit(e),)))
    return clauses, counter[0]


def _clean(clauses):
    out = set()
    for c in clauses:
        if not any(-l in c for l in c):
            out.add(c)
    return out


def davis_putnam(clauses, max_clauses: int = 200_000):
    """Decide satisfiability by eliminating variables with resolution.

    Returns ``(satisfiable, model)`` with ``model`` a dict var -> bool when
    satisfiable.
    """
    cs = _clean(clauses)
    eliminated = []
    while cs:
        if frozenset() in cs:
            return False, None
        # unit clauses first: resolving on them never grows the set
        units = [next(iter(c)) for c in cs if len(c) == 1]
        if units:
            v = abs(units[0])
        else:
            occ = {}
            for c in cs:
                for l in c:
                    p = occ.setdefault(abs(l), [0, 0])
                    p[l < 0] += 1
            v = min(occ, key=lambda x: (occ[x][0] * occ[x][1] - occ[x][0] - occ[x][1], x))
        pos = [c for c in cs if v in c]
        neg = [c for c in cs if -v in c]
        rest = {c for c in cs if v not in c and -v not in c}
        for p in pos:
            for q in neg:
                r = (p - {v}) | (q - {-v})
                if not any(-l in r for l in r):
                    rest.add(r)
        eliminated.append((v, pos + neg))
        if len(rest) > max_clauses:
            raise ResolutionBudget(f"resolution produced more than {max_clauses} clauses")
        cs = rest
    model: dict = {}
    for v, stored in reversed(eliminated):
        model[v] = True
        if not all(any(model.get(abs(l), False) == (l > 0) for l in c) for c in stored):
            model[v] = False
    return True, model


def resolution_tautology(e, n_atoms: int):
    """(is_tautology, falsifying valuation or None), decided by resolution."""
    clauses, _ = tseitin(e, n_atoms)
    sat, model = davis_putnam(clauses)
    if not sat:
        return True, None
    return False, tuple(model.get(i + 1, False) for i in range(n_atoms))


def implication_of(premises: list, conclusion):
    """Skeleton of ``p1 -> (p2 -> ... -> c)``."""
    e = conclusion
    for p in reversed(premises):
        e = ("->", p, e)
    return e
