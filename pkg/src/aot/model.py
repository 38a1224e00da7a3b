"""Finite modal, hyperintensional Aczel models.

Bit layouts (all canonical orders are plain binary counting):

* a proposition is an int over ``|S|*|W|`` cells, cell ``s*|W| + w``;
* a property is an int over ``|U|*|S|*|W|`` cells, cell ``u*|S|*|W| + s*|W| + w``,
  urelements ordered ordinary first, then special; the canonical index of a
  property is its bit pattern;
* an abstract object is a set of properties, stored as a bitmask over
  canonical property indices (its canonical subset rank).

Inside the evaluator individuals are ints: ``0..n_ordinary-1`` are ordinary,
``n_ordinary + rank`` is the abstract object of that rank.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
from typing import Callable, Iterator, Mapping, Sequence, Union

try:  # Python >= 3.11
    import tomllib
except ImportError:  # pragma: no cover
    import tomli as tomllib


class ModelError(ValueError):
    pass


class BudgetExceeded(ModelError):
    pass


class Kind(enum.IntEnum):
    ORDINARY = 0
    SPECIAL = 1


@dataclasses.dataclass(frozen=True, order=True)
class Urelement:
    kind: Kind
    index: int

    def __str__(self):
        return f"{'o' if self.kind is Kind.ORDINARY else 's'}{self.index}"


@dataclasses.dataclass(frozen=True)
class Proposition:
    bits: int


@dataclasses.dataclass(frozen=True, order=True)
class Property:
    bits: int


@dataclasses.dataclass(frozen=True)
class Relation2:
    bits: int


@dataclasses.dataclass(frozen=True, order=True)
class OrdinaryInd:
    index: int

    def __str__(self):
        return f"o{self.index}"


@dataclasses.dataclass(frozen=True, order=True)
class AbstractInd:
    """Abstract object as the canonical rank of its property set."""

    rank: int

    @classmethod
    def of(cls, props) -> "AbstractInd":
        rank = 0
        for p in props:
            rank |= 1 << p.bits
        return cls(rank)

    def properties(self) -> list:
        return [Property(i) for i in range(self.rank.bit_length()) if self.rank >> i & 1]

    def __contains__(self, p: Property) -> bool:
        return bool(self.rank >> p.bits & 1)

    def __str__(self):
        return f"a{self.rank}"


Individual = Union[OrdinaryInd, AbstractInd]


# ---------------------------------------------------------------------------
# per-state operator interpretations
# ---------------------------------------------------------------------------

# Quantifier/box tables map the instance pattern (none, mixed, all true) to a
# truth value; classical universal quantification is (0, 0, 1).
_CLASSICAL_AGG = (0, 0, 1)


@dataclasses.dataclass(frozen=True)
class StateInterp:
    not_: tuple = (1, 0)  # value for input 0, 1
    impl: tuple = (1, 1, 0, 1)  # (0,0) (0,1) (1,0) (1,1)
    box: tuple = _CLASSICAL_AGG
    forall_ind: tuple = _CLASSICAL_AGG
    forall_rel: tuple = _CLASSICAL_AGG

    def __post_init__(self):
        for name, size in (("not_", 2), ("impl", 4), ("box", 3), ("forall_ind", 3), ("forall_rel", 3)):
            table = getattr(self, name)
            if len(table) != size or any(v not in (0, 1) for v in table):
                raise ModelError(f"state_interp {name.rstrip('_')} needs {size} entries in {{0,1}}, got {table}")
            object.__setattr__(self, name, tuple(int(v) for v in table))

    @property
    def classical(self) -> bool:
        return self == CLASSICAL


CLASSICAL = StateInterp()


@dataclasses.dataclass(frozen=True)
class AczelModel:
    n_ordinary: int
    n_special: int
    n_states: int
    n_worlds: int
    state_interp: tuple
    proxy_seed: int = 0
    budget_properties: int = 2**16
    budget_objects: int = 2**20

    # -- sizes -------------------------------------------------------------

    @property
    def n_urelements(self) -> int:
        return self.n_ordinary + self.n_special

    @property
    def n_prop_cells(self) -> int:
        return self.n_states * self.n_worlds

    @property
    def n_cells(self) -> int:
        return self.n_urelements * self.n_prop_cells

    @property
    def n_properties(self) -> int:
        return 1 << self.n_cells

    @property
    def n_abstract(self) -> int:
        return 1 << self.n_properties if self.n_special else 0

    @property
    def config(self) -> tuple:
        return (self.n_ordinary, self.n_special, self.n_states, self.n_worlds)

    @functools.cached_property
    def is_classical(self) -> bool:
        return all(si.classical for si in self.state_interp)

    def describe(self) -> dict:
        out = {"ordinary": self.n_ordinary, "special": self.n_special,
               "states": self.n_states, "worlds": self.n_worlds}
        if self.proxy_seed:
            out["proxy_seed"] = self.proxy_seed
        interp = {str(s): _interp_dict(si) for s, si in enumerate(self.state_interp) if not si.classical}
        if interp:
            out["state_interp"] = interp
        return out

    # -- domains -------------------------------------------------------------

    def urelements(self) -> list:
        return [Urelement(Kind.ORDINARY, i) for i in range(self.n_ordinary)] + [
            Urelement(Kind.SPECIAL, i) for i in range(self.n_special)
        ]

    def urelement_index(self, u: Urelement) -> int:
        return u.index if u.kind is Kind.ORDINARY else self.n_ordinary + u.index

    def check_property_budget(self, count: int | None = None):
        count = self.n_properties if count is None else count
        if count > self.budget_properties:
            raise BudgetExceeded(f"relation enumeration needs {count} tables, budget is {self.budget_properties}")

    def check_object_budget(self):
        self.check_property_budget()
        if self.n_abstract > self.budget_objects:
            raise BudgetExceeded(
                f"abstract-object enumeration needs {self.n_abstract} objects, budget is {self.budget_objects}")

    def enumerate_properties(self) -> list:
        self.check_property_budget()
        return [Property(i) for i in range(self.n_properties)]

    def enumerate_abstract_objects(self) -> Iterator[AbstractInd]:
        self.check_object_budget()
        return (AbstractInd(r) for r in range(self.n_abstract))

    def individuals(self) -> Iterator[Individual]:
        yield from (OrdinaryInd(i) for i in range(self.n_ordinary))
        yield from self.enumerate_abstract_objects()

    def proxy(self, a: AbstractInd) -> Urelement:
        if self.n_special < 1:
            raise ModelError("model has no special urelements, abstract objects have no proxy")
        return Urelement(Kind.SPECIAL, (a.rank + self.proxy_seed) % self.n_special)

    def nu_upsilon(self, i: Individual) -> Urelement:
        if isinstance(i, OrdinaryInd):
            if not 0 <= i.index < self.n_ordinary:
                raise ModelError(f"{i} is not in the model")
            return Urelement(Kind.ORDINARY, i.index)
        return self.proxy(i)

    def comprehension_witness(self, cond: Callable[[Property], bool]) -> AbstractInd:
        if self.n_special < 1:
            raise ModelError("model has no abstract objects (n_special = 0)")
        return AbstractInd.of(p for p in self.enumerate_properties() if cond(p))

    def apply(self, p: Property, u: Urelement) -> Proposition:
        """The proposition a property assigns to an urelement."""
        return Proposition(p.bits >> (self.urelement_index(u) * self.n_prop_cells) & self.full)

    # -- integer codes used by the evaluator ---------------------------------

    def ind_code(self, i: Individual) -> int:
        if isinstance(i, OrdinaryInd):
            return i.index
        return self.n_ordinary + i.rank

    def ind_of_code(self, c: int) -> Individual:
        return OrdinaryInd(c) if c < self.n_ordinary else AbstractInd(c - self.n_ordinary)

    def urelement_of_code(self, c: int) -> int:
        if c < self.n_ordinary:
            return c
        return self.n_ordinary + (c - self.n_ordinary + self.proxy_seed) % self.n_special

    def individual_codes(self) -> range:
        if self.n_special:
            self.check_object_budget()
        return range(self.n_ordinary + self.n_abstract)

    def fiber_codes(self, u: int) -> range:
        """Codes of all individuals whose urelement is ``u``."""
        if u < self.n_ordinary:
            return range(u, u + 1)
        self.check_object_budget()
        j = u - self.n_ordinary
        first = (j - self.proxy_seed) % self.n_special
        return range(self.n_ordinary + first, self.n_ordinary + self.n_abstract, self.n_special)

    def fiber_representative(self, u: int) -> int | None:
        """Some individual of the fiber (fibers matter only up to urelement)."""
        if u < self.n_ordinary:
            return u
        first = (u - self.n_ordinary - self.proxy_seed) % self.n_special
        return self.n_ordinary + first if first < self.n_abstract else None

    # -- propositional operators, cellwise per state ---------------------------

    @functools.cached_property
    def full(self) -> int:
        return (1 << self.n_prop_cells) - 1

    @functools.cached_property
    def rows(self) -> tuple:
        w = self.n_worlds
        return tuple(((1 << w) - 1) << (s * w) for s in range(self.n_states))

    def _mask(self, pick) -> int:
        m = 0
        for s, si in enumerate(self.state_interp):
            if pick(si):
                m |= self.rows[s]
        return m

    @functools.cached_property
    def _tables(self) -> dict:
        t = {
            "n0": self._mask(lambda si: si.not_[0]),
            "n1": self._mask(lambda si: si.not_[1]),
        }
        for k in range(4):
            t[f"i{k}"] = self._mask(lambda si, k=k: si.impl[k])
        for op in ("box", "forall_ind", "forall_rel"):
            tabs = [getattr(si, op) for si in self.state_interp]
            t[op] = tuple(self._mask(lambda si, k=k: getattr(si, op)[k]) for k in range(3))
            t[op + "_det"] = (
                self._mask(lambda si: getattr(si, op)[0] == getattr(si, op)[1]),
                self._mask(lambda si: getattr(si, op)[1] == getattr(si, op)[2]),
            )
            del tabs
        return t

    def neg(self, a: int) -> int:
        if self.is_classical:
            return ~a & self.full
        t = self._tables
        return (a & t["n1"]) | (~a & t["n0"] & self.full)

    def imp(self, a: int, b: int) -> int:
        if self.is_classical:
            return (~a | b) & self.full
        t, full = self._tables, self.full
        na, nb = ~a & full, ~b & full
        return (na & nb & t["i0"]) | (na & b & t["i1"]) | (a & nb & t["i2"]) | (a & b & t["i3"])

    def imp_decided(self, a: int) -> bool:
        """Is ``imp(a, b)`` independent of ``b``?"""
        if self.is_classical:
            return a == 0
        t, full = self._tables, self.full
        na = ~a & full
        same0 = ~(t["i0"] ^ t["i1"]) & full
        same1 = ~(t["i2"] ^ t["i3"]) & full
        return (na & same0) | (a & same1) == full

    def conj(self, a: int, b: int) -> int:
        return self.neg(self.imp(a, self.neg(b)))

    def disj(self, a: int, b: int) -> int:
        return self.imp(self.neg(a), b)

    def iff(self, a: int, b: int) -> int:
        return self.conj(self.imp(a, b), self.imp(b, a))

    def aggregate(self, op: str, all_acc: int, any_acc: int) -> int:
        """Combine instance values given their cellwise AND and OR."""
        if self.is_classical:
            return all_acc
        q_none, q_mixed, q_all = self._tables[op]
        full = self.full
        return (all_acc & q_all) | (~any_acc & full & q_none) | (any_acc & ~all_acc & full & q_mixed)

    def decided(self, op: str, all_acc: int, any_acc: int) -> bool:
        """Can further instances no longer change ``aggregate``?"""
        full = self.full
        if self.is_classical:
            return all_acc == 0
        d_false, d_true = self._tables[op + "_det"]
        seen_false, seen_true = ~all_acc & full, any_acc
        return (seen_false & seen_true) | (seen_false & d_false) | (seen_true & d_true) == full

    def box(self, a: int) -> int:
        if self.is_classical:
            out = 0
            for row in self.rows:
                if a & row == row:
                    out |= row
            return out
        all_acc = any_acc = 0
        for row in self.rows:
            seg = a & row
            if seg == row:
                all_acc |= row
            if seg:
                any_acc |= row
        return self.aggregate("box", all_acc, any_acc)

    def exe_bits(self, prop_bits: int, u: int) -> int:
        return prop_bits >> (u * self.n_prop_cells) & self.full

    @functools.cached_property
    def o_bang(self) -> int:
        return self.full_rows_for(range(self.n_ordinary))

    @functools.cached_property
    def a_bang(self) -> int:
        return self.full_rows_for(range(self.n_ordinary, self.n_urelements))

    def full_rows_for(self, urelements) -> int:
        bits = 0
        for u in urelements:
            bits |= self.full << (u * self.n_prop_cells)
        return bits


def _interp_dict(si: StateInterp) -> dict:
    return {"not": list(si.not_), "impl": list(si.impl), "box": list(si.box),
            "forall_ind": list(si.forall_ind), "forall_rel": list(si.forall_rel)}


def build_model(
    n_ordinary: int,
    n_special: int,
    n_states: int = 1,
    n_worlds: int = 1,
    state_interp: Mapping[int, StateInterp] | Sequence[StateInterp] | None = None,
    proxy_seed: int = 0,
    cell_cap: int = 8,
    budget_properties: int = 2**16,
    budget_objects: int = 2**20,
) -> AczelModel:
    """Build a finite Aczel model; the first state and first world are actual."""
    if min(n_ordinary, n_special) < 0:
        raise ModelError("urelement counts must be non-negative")
    if n_ordinary + n_special < 1:
        raise ModelError("empty urelement domain")
    if n_states < 1 or n_worlds < 1:
        raise ModelError("need at least one state and one world")
    cells = (n_ordinary + n_special) * n_states * n_worlds
    if cells > cell_cap:
        raise BudgetExceeded(f"|U|*|S|*|W| = {cells} exceeds cap {cell_cap}")
    interps = [CLASSICAL] * n_states
    if state_interp is not None:
        items = state_interp.items() if isinstance(state_interp, Mapping) else enumerate(state_interp)
        for s, si in items:
            s = int(s)
            if not 0 <= s < n_states:
                raise ModelError(f"state_interp for unknown state {s}")
            if s == 0 and not si.classical:
                raise ModelError("the actual state must be interpreted classically")
            interps[s] = si
    return AczelModel(n_ordinary, n_special, n_states, n_worlds, tuple(interps), proxy_seed,
                      budget_properties, budget_objects)


# ---------------------------------------------------------------------------
# model spec files
# ---------------------------------------------------------------------------


def model_from_dict(d: Mapping, **budgets) -> AczelModel:
    known = {"ordinary", "special", "states", "worlds", "proxy_seed", "state_interp"}
    unknown = set(d) - known
    if unknown:
        raise ModelError(f"unknown model keys: {sorted(unknown)}")
    interp = {}
    for state, table in d.get("state_interp", {}).items():
        kw = {("not_" if k == "not" else k): tuple(v) for k, v in table.items()}
        try:
            interp[int(state)] = StateInterp(**kw)
        except TypeError as e:
            raise ModelError(f"bad state_interp for state {state}: {e}") from None
    return build_model(
        int(d.get("ordinary", 0)), int(d.get("special", 0)), int(d.get("states", 1)),
        int(d.get("worlds", 1)), interp, int(d.get("proxy_seed", 0)), **budgets)


def parse_model_spec(text: str, **budgets) -> AczelModel:
    try:
        d = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ModelError(f"malformed model spec: {e}") from None
    return model_from_dict(d, **budgets)


def load_model_spec(path, **budgets) -> AczelModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model_spec(fh.read(), **budgets)


def dump_model_spec(m: AczelModel) -> str:
    d = m.describe()
    lines = [f"{k} = {d[k]}" for k in ("ordinary", "special", "states", "worlds")]
    if "proxy_seed" in d:
        lines.append(f"proxy_seed = {d['proxy_seed']}")
    for state, table in d.get("state_interp", {}).items():
        lines.append(f"\n[state_interp.{state}]")
        lines.extend(f"{k} = {v}" for k, v in table.items())
    return "\n".join(lines) + "\n"


M0_CONFIG = (1, 1, 1, 1)
M1_CONFIG = (1, 1, 1, 2)


def m0(**kw) -> AczelModel:
    return build_model(*M0_CONFIG, **kw)


def m1(**kw) -> AczelModel:
    return build_model(*M1_CONFIG, **kw)


def model_family(max_ordinary=2, max_special=2, max_states=2, max_worlds=2, min_ordinary=0, min_special=1,
                 budget_objects: int = 2**20) -> list:
    """All configurations within bounds whose abstract domain fits the budget."""
    out = []
    for o in range(min_ordinary, max_ordinary + 1):
        for s in range(min_special, max_special + 1):
            for st in range(1, max_states + 1):
                for w in range(1, max_worlds + 1):
                    if o + s == 0:
                        continue
                    cells = (o + s) * st * w
                    if cells > 8 or (s and 2 ** (2**cells) > budget_objects):
                        continue
                    out.append(build_model(o, s, st, w, budget_objects=budget_objects))
    out.sort(key=lambda m: (m.n_cells, m.n_states, m.n_worlds, m.n_ordinary, m.n_special))
    return out
