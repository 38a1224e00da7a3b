"""The Clark-Boolos paradox, both ways.

Direct route: with K = [\\x. exists F.(x[F] & ~F(x))] and a the abstract
object encoding exactly K, unrestricted beta-conversion gives Ka <-> ~Ka.  We
replay that argument as a trace whose one non-catalog step is the naive beta
rule, so the contradiction is pinned to it.

Description route: K' = [\\x. G((the y. y = x & exists F.(x[F] & ~F(x))))]
slipped past the older well-formedness check because the encoding sits inside
a description.  In the models the defined lambda semantics stays consistent;
what fails is beta-conversion for K', and we exhibit the failing object.
"""

from __future__ import annotations

import dataclasses
import json

from aot import kernel as kn
from aot import semantics as se
from aot import syntax as sx
from aot.model import AczelModel, Property
from aot.syntax import (
    A_BANG, And, Description, Enc, Equiv, Exe, Exists, Forall, IdInd, IdRel, Impl, IndVar, Lambda, Not, RelVar,
)

UNIVERSAL_G = "[\\z. forall p.(p -> p)]"
EMPTY_G = "[\\z. ~forall p.(p -> p)]"


class ParadoxError(ValueError):
    pass


def russell_matrix(x: IndVar, F: RelVar | None = None):
    """exists F.(x[F] & ~F(x))"""
    F = F or RelVar("F", 1)
    return Exists(F, And(Enc(x, F), Not(Exe(F, (x,)))))


def k_term() -> Lambda:
    x = IndVar("x")
    return Lambda(x, russell_matrix(x))


def build_K_via_description(G, _matrix=None) -> Lambda:
    G = kn.as_term(G)
    if not sx.is_rel_term(G) or (isinstance(G, RelVar) and G.arity != 1):
        raise sx.SortError(f"G must be a 1-place relation term, got {sx.print_ast(G)}")
    names = sx.all_names(G)
    x = IndVar(_fresh("x", names))
    y = IndVar(_fresh("y", names | {x.name}))
    desc = Description(y, And(IdInd(y, x), _matrix or russell_matrix(x)))
    return Lambda(x, Exe(G, (desc,)))


def _fresh(base, avoid):
    while base in avoid:
        base += "'"
    return base


# ---------------------------------------------------------------------------
# equivalence chain
# ---------------------------------------------------------------------------


@dataclasses.dataclass
class ChainResult:
    ok: bool
    checked: int
    mismatches: list


def chain_formulas(G):
    """The three links, each with x free."""
    G = kn.as_term(G)
    x = IndVar(_fresh("x", sx.all_names(G)))
    matrix = russell_matrix(x)  # one node, so evaluations are shared
    lam = build_K_via_description(G, matrix)
    y, z = IndVar("y'"), IndVar("z'")
    phi = lambda v: And(IdInd(v, x), matrix)  # noqa: E731
    unique = Exists(y, And(phi(y), Forall(z, Impl(phi(z), IdInd(z, y)))))
    return x, [lam.body, unique, matrix]


def equivalence_chain(m: AczelModel, G=UNIVERSAL_G) -> ChainResult:
    G = kn.as_term(G)
    if sx.free_vars(G):
        raise ParadoxError(f"G must be closed, got {sx.print_ast(G)}")
    z = IndVar(_fresh("x", sx.all_names(G)))
    if not se.valid(m, Forall(z, Exe(G, (z,)))):
        raise ParadoxError(f"G = {sx.print_ast(G)} is not universal in {m.config}")
    x, links = chain_formulas(G)
    ev = se.Evaluator(m)
    bad, n = [], 0
    for code in m.individual_codes():
        ev.env[x] = code
        vals = [ev.eval(f) & 1 for f in links]
        n += 1
        if len(set(vals)) != 1:
            bad.append((str(m.ind_of_code(code)), vals))
    return ChainResult(not bad, n, bad[:10])


def verify_equivalence_chain(m: AczelModel, G=UNIVERSAL_G) -> bool:
    return equivalence_chain(m, G).ok


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclasses.dataclass
class ParadoxReport:
    route: str  # direct | description
    model: dict | None
    witness: str
    steps: list  # trace lines, or (label, formula, value) ledger rows
    verdict: str  # contradiction-derived | beta-countermodel-found
    notes: list = dataclasses.field(default_factory=list)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        out = [f"route: {self.route}", f"verdict: {self.verdict}"]
        if self.model is not None:
            out.append(f"model: {self.model}")
        out.append(f"witness: {self.witness}")
        out.append("steps:")
        for s in self.steps:
            out.append("  " + (s if isinstance(s, str) else "  ".join(str(c) for c in s)))
        out.extend(f"note: {n}" for n in self.notes)
        return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# semantic route
# ---------------------------------------------------------------------------


def run_clark_boolos_semantic(m: AczelModel, G=UNIVERSAL_G) -> ParadoxReport:
    if m.n_special < 1:
        raise ParadoxError("the model has no special urelements, hence no abstract objects")
    kprime = build_K_via_description(G)
    ev = se.Evaluator(m)
    k_bits = ev.den_rel(kprime)
    banished = ev.den_rel(k_term())
    a = m.comprehension_witness(lambda p: p == Property(k_bits))
    code = m.ind_code(a)
    ev.env[kprime.var] = code
    exe = ev.eval(Exe(kprime, (kprime.var,)))
    contractum = ev.eval(kprime.body)
    cells = [c for c in range(m.n_prop_cells) if (exe ^ contractum) >> c & 1]
    ledger = [
        ("K'", sx.print_ast(kprime), f"P{k_bits}"),
        ("K (banished)", sx.print_ast(k_term()), f"P{banished}"),
        ("a", "the object encoding exactly K'", str(a)),
        ("K'(a) at s0,w0", sx.print_ast(Exe(kprime, (IndVar("a"),))), bool(exe & 1)),
        ("contractum at s0,w0", sx.print_ast(sx.substitute(kprime.body, kprime.var, IndVar("a"))), bool(contractum & 1)),
    ]
    if not cells:
        raise ParadoxError("no divergence found; beta holds for K' at a")  # would contradict the analysis
    s, w = divmod(cells[0], m.n_worlds)
    notes = [
        f"beta fails for K' at a in cell (s{s}, w{w})",
        "the defined lambda semantics is total and consistent; contradiction only follows if beta is assumed for K'",
        f"K' and K denote the same property: {k_bits == banished}",
    ]
    return ParadoxReport("description", m.describe(), str(a), ledger, "beta-countermodel-found", notes)


# ---------------------------------------------------------------------------
# syntactic route
# ---------------------------------------------------------------------------


def _chk_naive_beta(prem, f, ext):
    if prem:
        raise kn.RuleError("NAIVE_BETA: takes no premises")
    shape = kn.beta_shape(f)
    if shape is None:
        raise kn.RuleError("NAIVE_BETA: not of the form [\\x. phi](t) <-> phi[t/x]")
    _lam, t, other, reduct = shape
    if not isinstance(t, IndVar):
        raise kn.RuleError("NAIVE_BETA: argument must be a variable")
    if not sx.alpha_eq(other, reduct):
        raise kn.RuleError("NAIVE_BETA: right side is not the reduct")


def naive_beta_extension(enable_unsound_beta: bool = False) -> kn.Extension:
    """Unrestricted beta-conversion (and denotation for every lambda).  This is
    unsound: it derives a contradiction.  The caller must ask for it."""
    if not enable_unsound_beta:
        raise kn.GateError("naive beta-conversion is unsound (it derives a contradiction) and is gated; "
                           "pass enable_unsound_beta=True / --enable-unsound-beta")
    return kn.Extension("naive-beta", {"NAIVE_BETA": _chk_naive_beta}, lambdas_denote=True)


def clark_boolos_derivation(enable_unsound_beta: bool = False) -> kn.Derivation:
    ext = naive_beta_extension(enable_unsound_beta)
    a, F, x = IndVar("a"), RelVar("F", 1), IndVar("x")
    K = k_term()
    Ka = Exe(K, (a,))
    body = lambda v: And(Enc(a, v), Not(Exe(v, (a,))))  # aF & ~F(a)  # noqa: E731
    theta_body = Equiv(Enc(a, F), IdRel(F, K))
    theta = Forall(F, theta_body)

    d = kn.Derivation(ext)
    beta = d.step("NAIVE_BETA", (), Equiv(Ka, sx.substitute(K.body, K.var, a)))
    aK = d.axiom("A6", alpha=F, phi=theta_body, tau=K)           # theta(a) -> (a[K] <-> K = K)
    refl = d.axiom("A4-refl", t=K)
    noK = d.axiom("A6", alpha=F, phi=Not(body(F)), tau=K)        # forall F.~(...) -> ~(a[K] & ~K(a))
    inst = d.axiom("A6", alpha=F, phi=theta_body, tau=F)
    leib = d.axiom("LEIBNIZ", alpha=F, phi=Not(Exe(F, (a,))), s=F, t=K)
    case = d.tc(Impl(theta, Impl(Ka, Not(body(F)))), inst, leib)
    g = d.gen(case, F)
    a7 = d.axiom("A7", alpha=F, phi=theta, psi=Impl(Ka, Not(body(F))))
    thetaK = d.mp(a7, g)
    a7b = d.axiom("A7", alpha=F, phi=Ka, psi=Not(body(F)))
    no_theta = d.tc(Not(And(Exe(A_BANG, (a,)), theta)), beta, aK, refl, noK, thetaK, a7b)
    g2 = d.gen(no_theta, a)
    comp = d.axiom("A2", x=a, phi=IdRel(F, K))
    d.tc(And(Ka, Not(Ka)), g2, comp)
    return d


def run_clark_boolos_syntactic(enable_unsound_beta: bool = False) -> ParadoxReport:
    d = clark_boolos_derivation(enable_unsound_beta)
    text = d.trace.serialize()
    # the trace must stand on its own
    kn.replay(kn.ProofTrace.parse(text), naive_beta_extension(True))
    notes = ["the only step outside the kernel catalog is NAIVE_BETA (step 0)",
             "A6/LEIBNIZ/A4-refl instances with K rely on the same naive assumption that every lambda denotes"]
    return ParadoxReport("direct", None, "a with forall F.(a[F] <-> F = K)", text.splitlines(),
                         "contradiction-derived", notes)


def drop_step(trace: kn.ProofTrace, i: int) -> kn.ProofTrace:
    """The trace without step ``i``; later premise indices are renumbered and
    references to the dropped step removed."""
    out = kn.ProofTrace()
    for j, s in enumerate(trace.steps):
        if j == i:
            continue
        prem = tuple(p - (p > i) for p in s.premises if p != i)
        out.steps.append(kn.Step(s.rule, prem, s.formula))
    return out
