import pytest
from hypothesis import given

from aot import syntax as sx
from aot.syntax import Enc, Exe, IndVar, RelVar

import strategies as S

x, y = IndVar("x"), IndVar("y")
F = RelVar("F", 1)


@pytest.mark.parametrize("text", [
    "forall F. F(x)",
    "x[F] -> box x[F]",
    "[\\y. exists F. y[F] & ~F(y)](x)",
    "R(x, y)",
    "x = y",
    "F = G",
    "dia p | ~q",
    "F((the y. A!(y)))",
    "forall p. p -> p",
    "[\\x. F(x)] = [\\y. F(y)]",
])
def test_print_parse_fixpoint(text):
    assert sx.print_ast(sx.parse(text)) == text


@given(S.formulas(3))
def test_roundtrip_random(f):
    assert sx.alpha_eq(sx.parse(sx.print_ast(f)), f)


@pytest.mark.parametrize("text, err", [
    ("F(", sx.SyntaxErr),
    ("forall . p", sx.SyntaxErr),
    ("F(x) &", sx.SyntaxErr),
    ("x[p]", sx.SortError),
    ("x(F)", sx.SortError),
    ("F(x) & F(x,y)", sx.SortError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        sx.parse(text)


def test_precedence():
    f = sx.parse("p & q -> r | s <-> t")
    assert isinstance(f, sx.Equiv)
    assert isinstance(f.left, sx.Impl)
    assert isinstance(f.left.left, sx.And) and isinstance(f.left.right, sx.Or)
    # a quantifier scopes as far right as it can
    g = sx.parse("forall x. F(x) -> G(x)")
    assert isinstance(g, sx.Forall) and isinstance(g.body, sx.Impl)


def test_substitution_avoids_capture():
    f = sx.parse("forall y. F(x) & G(y)")
    g = sx.substitute(f, x, y)
    assert y in sx.free_vars(g)
    assert g.var != y
    assert sx.alpha_eq(g, sx.parse("forall z. F(y) & G(z)"))


def test_substitution_respects_binding():
    f = sx.parse("F(x) & forall x. G(x)")
    g = sx.substitute(f, x, y)
    # the parser already renamed the bound x apart from the free one
    assert sx.alpha_eq(g, sx.parse("F(y) & forall z. G(z)"))


@given(S.formulas(3))
def test_substitution_identity(f):
    assert sx.substitute(f, x, x) == f


@given(S.formulas(3))
def test_substitution_removes_variable(f):
    z = IndVar("w")
    g = sx.substitute(f, x, z)
    assert x not in sx.free_vars(g)
    if x in sx.free_vars(f):
        assert z in sx.free_vars(g)


@given(S.formulas(3))
def test_canon_invariant_under_renaming(f):
    # renaming a free variable to a fresh one and back is the identity up to alpha
    z = IndVar("w")
    back = sx.substitute(sx.substitute(f, y, z), z, y)
    assert sx.canon(back) == sx.canon(f)


def test_alpha_eq():
    assert sx.alpha_eq(sx.parse("forall x. F(x)"), sx.parse("forall z. F(z)"))
    assert not sx.alpha_eq(sx.parse("forall x. F(x)"), sx.parse("forall x. F(y)"))


class TestClassification:
    K = "[\\x. exists F. x[F] & ~F(x)]"
    K_DESC = "[\\x. G((the y. y = x & exists F. x[F] & ~F(x)))]"

    def test_russell_matrix_rejected(self):
        body = sx.parse(self.K).body
        assert not sx.classify_propositional(body, "legacy")
        assert not sx.classify_propositional(body, "strict")

    def test_description_route_splits_modes(self):
        body = sx.parse(self.K_DESC).body
        assert sx.classify_propositional(body, "legacy")
        assert not sx.classify_propositional(body, "strict")

    def test_identity_counts_as_encoding(self):
        assert not sx.classify_propositional(sx.parse("x = y"), "legacy")
        assert not sx.classify_propositional(sx.parse("F = G"), "strict")

    def test_plain_matrix_accepted(self):
        assert sx.classify_propositional(sx.parse("F(x) & box (forall y. G(y) -> F(x))"), "strict")

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            sx.classify_propositional(sx.parse("F(x)"), "lenient")

    @given(S.formulas(3))
    def test_strict_implies_legacy(self, f):
        if sx.classify_propositional(f, "strict"):
            assert sx.classify_propositional(f, "legacy")

    @given(S.formulas(3))
    def test_strict_rejects_any_encoding(self, f):
        enc = any(isinstance(n, (Enc, sx.IdInd, sx.IdRel)) for n in sx.subterms(f))
        assert sx.classify_propositional(f, "strict") == (not enc)


def test_to_core_connectives():
    core = sx.to_core(sx.parse("(p & q) | dia r <-> exists x. F(x)"))
    kinds = {type(n) for n in sx.subterms(core)}
    assert kinds.isdisjoint({sx.And, sx.Or, sx.Equiv, sx.Exists, sx.Diamond, sx.IdInd, sx.IdRel})


def test_identity_definiens():
    core = sx.to_core(sx.parse("F = G"))
    assert sx.print_ast(core) == "box (forall x. ~((x[F] -> x[G]) -> ~(x[G] -> x[F])))"


def test_term_predicates():
    assert sx.is_ind_term(x) and not sx.is_rel_term(x)
    assert sx.is_rel_term(F) and sx.is_rel_term(sx.A_BANG)
    assert sx.is_formula(Exe(F, (x,))) and sx.is_formula(Enc(x, F))
    assert sx.has_description(sx.parse("F((the y. A!(y)))"))
