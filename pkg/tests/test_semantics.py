import itertools

import pytest
from hypothesis import given, settings, strategies as st

from aot import model as md
from aot import semantics as se
from aot import syntax as sx
from aot.model import AbstractInd, OrdinaryInd, Property, Proposition, StateInterp
from aot.syntax import IndVar, RelVar

import strategies as S

x, y = IndVar("x"), IndVar("y")
F, G = RelVar("F", 1), RelVar("G", 1)
p, q = RelVar("p", 0), RelVar("q", 0)

M0 = md.m0()
M1 = md.m1()
HYPER = md.build_model(1, 1, 2, 1, state_interp={1: StateInterp(impl=(0, 0, 0, 1))})


def P(text):
    return sx.parse(text)


def T(text):
    return sx.parse_term(text)


def prop_full(m):
    return Proposition(m.full)


class TestDescriptions:
    def test_self(self):
        d = se.den_individual_term(M0, {x: AbstractInd(5)}, T("(the y. y = x)"))
        assert d.proper and d.value == AbstractInd(5)

    def test_empty(self):
        assert not se.den_individual_term(M0, {}, T("(the y. ~(y = y))")).proper

    def test_not_unique(self):
        # sixteen abstract objects satisfy A!
        assert sum(1 for a in M0.enumerate_abstract_objects()) == 16
        assert not se.den_individual_term(M0, {}, T("(the y. A!(y))")).proper

    def test_unique_ordinary(self):
        d = se.den_individual_term(M0, {}, T("(the y. O!(y))"))
        assert d.proper and d.value == OrdinaryInd(0)

    def test_rigid_at_actual_world(self):
        # in M1, F true of o0 at w0 only: the description still picks o0
        asg = {F: Property(0b01)}
        d = se.den_individual_term(M1, asg, T("(the y. F(y))"))
        assert d.proper and d.value == OrdinaryInd(0)


class TestExemplification:
    def test_full_property(self):
        m = M0
        top = m.enumerate_properties()[-1]
        assert se.exe1(m, {F: top, x: OrdinaryInd(0)}, F, x) == prop_full(m)

    def test_improper_term_is_false(self):
        for prop in M0.enumerate_properties():
            assert se.exe1(M0, {F: prop}, F, T("(the y. A!(y))")).bits == 0

    def test_proxy_lookup(self):
        # P true exactly on the special urelement: every abstract object exemplifies it
        m = M0
        s0 = m.urelements()[1]
        prop = next(pr for pr in m.enumerate_properties()
                    if m.apply(pr, s0).bits == m.full and m.apply(pr, m.urelements()[0]).bits == 0)
        for a in m.enumerate_abstract_objects():
            assert se.exe1(m, {F: prop, x: a}, F, x) == prop_full(m)
            assert se.exe1(m, {F: prop, x: OrdinaryInd(0)}, F, x).bits == 0


class TestEncoding:
    def test_membership(self):
        pr = Property(2)
        assert se.enc(M1, {x: AbstractInd.of([pr]), F: pr}, x, F) == prop_full(M1)

    def test_ordinary_never_encodes(self):
        for pr in M0.enumerate_properties():
            assert se.enc(M0, {x: OrdinaryInd(0), F: pr}, x, F).bits == 0

    def test_null_object(self):
        for pr in M1.enumerate_properties():
            assert se.enc(M1, {x: AbstractInd(0), F: pr}, x, F).bits == 0

    def test_constant_across_cells(self):
        for a, pr in itertools.product(range(16), range(16)):
            bits = se.enc(M1, {x: AbstractInd(a), F: Property(pr)}, x, F).bits
            assert bits in (0, M1.full)


class TestLambda:
    @pytest.mark.parametrize("m", [M0, M1, HYPER], ids=["M0", "M1", "hyper"])
    def test_exemplification_matrix_reproduces_property(self, m):
        for pr in m.enumerate_properties():
            assert se.lambda1(m, {F: pr}, x, P("F(x)")) == pr

    def test_russell_property_by_brute_force(self):
        m = M0
        got = se.lambda1(m, {}, x, P("exists F. x[F] & ~F(x)"))
        # special urelement: some abstract object encodes a property it lacks
        s0 = m.urelements()[1]
        expect = any(any(pr in a and m.apply(pr, s0).bits == 0 for pr in m.enumerate_properties())
                     for a in m.enumerate_abstract_objects())
        assert m.apply(got, s0).bits == (m.full if expect else 0)
        assert m.apply(got, m.urelements()[0]).bits == 0  # o0 encodes nothing

    def test_empty_matrix(self):
        assert se.lambda1(M1, {}, x, P("~(x = x)")).bits == 0


class TestEvalAndValidity:
    def test_a1(self):
        assert se.valid(M0, P("O!(x) -> box ~(exists F. x[F])"))

    def test_box_collapses_in_one_world(self):
        assert se.valid(M0, P("box p <-> p"))
        assert not se.valid(M1, P("box p <-> p"))

    def test_comprehension_for_fixed_property(self):
        K = Property(2)
        assert se.eval_formula(M0, {G: K}, P("exists x. A!(x) & (forall F. x[F] <-> F = G)")).bits & 1
        a = M0.comprehension_witness(lambda pr: pr == K)
        assert se.eval_formula(M0, {G: K, x: a}, P("forall F. x[F] <-> F = G")).bits == M0.full

    @pytest.mark.parametrize("m", [M0, M1], ids=["M0", "M1"])
    def test_abstract_identity(self, m):
        assert se.valid(m, P("A!(x) & A!(y) -> (x = y <-> box (forall F. x[F] <-> y[F]))"))

    def test_barcan_diamond(self):
        assert se.valid(M1, P("(dia exists x. F(x)) -> exists x. dia F(x)"))

    def test_russell_fails_for_null_object(self):
        f = P("forall x. exists F. x[F] & ~F(x)")
        assert not se.valid(M0, f)
        assert not se.eval_formula(M0, {x: AbstractInd(0)}, P("exists F. x[F] & ~F(x)")).bits

    def test_pigeonhole_is_valid_in_m0(self):
        assert se.valid(M0, P("exists x. exists y. A!(x) & A!(y) & ~(x = y) & box (forall F. F(x) <-> F(y))"))

    def test_unbound_variable(self):
        with pytest.raises(se.EvalError):
            se.eval_formula(M0, {}, P("F(x)"))

    def test_binary_relations(self):
        assert se.valid(M0, P("forall R. R(x, y) -> R(x, y)"))
        assert not se.valid(M0, P("forall R. R(x, y) -> R(y, x)"))

    def test_binary_budget(self):
        m = md.build_model(2, 2, 1, 2)
        with pytest.raises(md.BudgetExceeded):
            se.valid(m, P("exists R. R(x, y)"))

    def test_report(self):
        r = se.evaluation_report(M1, P("F(x)"), {F: Property(0b01), x: OrdinaryInd(0)})
        assert r["actual_state_truth"] == [True, False]
        assert r["model"]["worlds"] == 2


@pytest.mark.parametrize("m", md.model_family()[:7], ids=lambda m: str(m.config))
def test_encoding_rigidity(m):
    assert se.valid(m, P("x[F] -> box x[F]"))


def test_classical_at_actual_state():
    m = HYPER
    ev = se.Evaluator(m)
    props = range(1 << m.n_prop_cells)
    row = m.rows[0]
    for a, b in itertools.product(props, props):
        ev.env = {p: a, q: b}
        for text, fn in [("~p", lambda u, v: not u), ("p -> q", lambda u, v: (not u) or v),
                         ("p & q", lambda u, v: u and v), ("p | q", lambda u, v: u or v),
                         ("p <-> q", lambda u, v: u == v)]:
            got = ev.eval(P(text)) & row
            want = sum(1 << c for c in range(m.n_worlds) if fn(bool(a >> c & 1), bool(b >> c & 1)))
            assert got == want, text


def test_nonclassical_state_diverges():
    ev = se.Evaluator(HYPER)
    ev.env = {p: 0, q: 0}
    # impl table (0,0,0,1) at s1: false -> false is false there
    assert ev.eval(P("p -> q")) == 0b01


def _membership_conditions():
    atoms = [P("F = G"), P("x[F]"), P("F(x)")]
    yield from atoms
    for a, b in itertools.product(atoms, repeat=2):
        yield sx.And(a, sx.Not(b))
        yield sx.Or(a, b)
    for a, b, c in itertools.permutations(atoms, 3):
        yield sx.Impl(sx.And(a, b), sx.Not(c))


def test_comprehension_soundness_m0():
    for phi in _membership_conditions():
        f = sx.Exists(IndVar("z"), sx.And(sx.Exe(sx.A_BANG, (IndVar("z"),)),
                                          sx.Forall(F, sx.Equiv(sx.Enc(IndVar("z"), F), phi))))
        assert se.valid(M0, f), sx.print_ast(f)


def test_relation_identity_is_table_equality():
    for a, b in itertools.product(M0.enumerate_properties(), repeat=2):
        assert se.valid(M0, P("F = G"), {F: a, G: b}) == (a == b)


class TestDenotes:
    def test_plain(self):
        assert se.denotes(M0, {}, T("[\\x. F(x)]"))

    def test_russell(self):
        assert not se.denotes(M0, {}, T("[\\x. exists F. x[F] & ~F(x)]"))

    def test_improper_description(self):
        assert not se.denotes(M0, {}, T("(the y. ~(y = y))"))

    def test_variables(self):
        assert se.denotes(M0, {x: OrdinaryInd(0)}, x)
        assert se.denotes(M0, {}, F)


class TestBeta:
    def test_conjunction(self):
        lam = T("[\\x. F(x) & G(x)]")
        for a, b in itertools.product(M0.enumerate_properties(), repeat=2):
            for i in M0.individuals():
                assert se.beta_check(M0, {F: a, G: b, y: i}, lam, y)

    def test_encoding_matrix_fails(self):
        lam = T("[\\x. x[F]]")
        bad = [pr for pr in M0.enumerate_properties() if list(se.beta_failures(M0, lam, {F: pr}))]
        assert bad

    def test_description_route_fails(self):
        lam = T("[\\x. G((the y. y = x & (exists F. x[F] & ~F(x))))]")
        assert next(se.beta_failures(M0, lam, {G: M0.enumerate_properties()[-1]}), None) is not None

    def test_improper_argument(self):
        with pytest.raises(se.ImproperTerm):
            se.beta_check(M0, {}, T("[\\x. F(x)]"), T("(the y. A!(y))"))

    @settings(max_examples=40)
    @given(S.strict_lambdas(3), st.sampled_from([M0, M1]), st.data())
    def test_strict_matrices(self, lam, m, data):
        props = m.enumerate_properties()
        asg = {v: data.draw(st.sampled_from(props)) for v in (F, G)}
        asg[p] = Proposition(data.draw(st.integers(0, m.full)))
        for v in sx.free_vars(lam):
            if isinstance(v, IndVar):
                asg[v] = data.draw(st.sampled_from([OrdinaryInd(0), AbstractInd(0), AbstractInd(5)]))
        assert next(se.beta_failures(m, lam, asg), None) is None


class TestCountermodels:
    def test_tautology_has_none(self):
        assert se.countermodel_search(P("p -> p"), max_states=2, vary_state_interp=True) is None
        assert se.countermodel_search(P("p -> p"), max_worlds=2) is None

    def test_enc_vs_exe(self):
        cm = se.countermodel_search(P("x[F] <-> F(x)"))
        assert cm is not None and cm.model.config == (1, 1, 1, 1)
        ev = se.Evaluator(cm.model)
        ev.bind(cm.assignment)
        assert not ev.eval(P("x[F] <-> F(x)")) >> cm.world & 1
        assert cm.describe()["model"]["ordinary"] == 1

    def test_hyperintensional(self):
        f = P("[\\x. F(x) & G(x)] = [\\x. G(x) & F(x)]")
        assert se.countermodel_search(f, max_states=2) is None
        cm = se.countermodel_search(f, max_states=2, vary_state_interp=True)
        assert cm is not None and cm.model.n_states == 2 and not cm.model.is_classical

    def test_budget(self):
        with pytest.raises(md.BudgetExceeded):
            se.countermodel_search(P("p"), max_ordinary=2, max_special=2, max_worlds=2)

    def test_falsifying_assignment_first_in_order(self):
        cm = se.falsifying_assignment(M0, P("x[F]"))
        assert cm.assignment == {x: OrdinaryInd(0), F: Property(0)}
        assert se.falsifying_assignment(M0, P("x[F] -> x[F]")) is None


_SYM_FORMULAS = [
    "A!(x) & A!(y) -> (x = y <-> box (forall F. x[F] <-> y[F]))",
    "x = y -> (F(x) & x[G] -> F(y) & y[G])",
    "forall x. exists y. ~(x = y) & (x[F] <-> y[F]) & (y[G] <-> ~x[G])",
    "exists x. exists y. A!(x) & ~(x = y) & box (forall F. F(x) <-> F(y)) & x[G] & ~y[G]",
    "forall x. (forall G. x[G] <-> y[G]) -> x = y | O!(x)",
    "exists x. [\\z. x = z | G(z)](y) & x[F]",
    "box (forall x. x[[\\z. F(z) & G(z)]] <-> x[[\\z. G(z) & F(z)]])",
    "forall x. x[[\\z. F(z) -> z = y]] -> ~(x = y) | y[G]",
]
_SYM_MODELS = {c: md.build_model(*c) for c in [(1, 2, 1, 1), (2, 1, 1, 1), (0, 2, 1, 1)]}
# one fiber only: brute force over two non-classical fibers is out of reach for nested quantifiers
_SYM_MODELS["hyper-not"] = md.build_model(0, 1, 2, 1, state_interp={1: StateInterp(not_=(1, 1), impl=(1, 0, 0, 1))})


@pytest.mark.parametrize("config", list(_SYM_MODELS))
@pytest.mark.parametrize("text", _SYM_FORMULAS)
def test_symmetry_reduction_agrees_with_enumeration(config, text):
    m = _SYM_MODELS[config]
    f = se.universal_closure(P(text))
    plain = se.Evaluator(m)
    plain.symmetry = False
    assert se.Evaluator(m).eval(f) == plain.eval(f)


@pytest.mark.parametrize("pair", [(3, 5), (15, 6), (9, 9)])
def test_symmetry_reduction_two_fibers_nonclassical(pair):
    f = P("box (forall x. x[[\\z. F(z) & G(z)]] <-> x[[\\z. G(z) & F(z)]])")
    props = HYPER.enumerate_properties()
    asg = {F: props[pair[0]], G: props[pair[1]]}
    fast, plain = se.Evaluator(HYPER), se.Evaluator(HYPER)
    plain.symmetry = False
    fast.bind(asg)
    plain.bind(asg)
    assert fast.eval(f) == plain.eval(f)


@settings(max_examples=150)
@given(S.closed_formulas(3).filter(lambda f: S.binder_depth(f) <= 3),
       st.sampled_from(list(_SYM_MODELS)))
def test_symmetry_reduction_random(f, config):
    m = _SYM_MODELS[config]
    plain = se.Evaluator(m)
    plain.symmetry = False
    assert se.Evaluator(m).eval(f) == plain.eval(f)


def test_value_names_roundtrip():
    for v in [OrdinaryInd(1), AbstractInd(7), Property(3), Proposition(1)]:
        assert se.parse_value(se.value_name(v)) == v
    with pytest.raises(se.EvalError):
        se.parse_value("z9")
