"""The naive evaluator against the real one."""

import pytest
from hypothesis import given, settings

from aot import model as md
from aot import naive as nv
from aot import semantics as se
from aot import syntax as sx
from aot.model import StateInterp

import strategies as S

MODELS = {
    "M0": md.m0(),
    "two-worlds": md.build_model(0, 1, 1, 2),
    "hyper": md.build_model(0, 1, 2, 1, state_interp={1: StateInterp(impl=(0, 0, 0, 1))}),
    "hyper-not": md.build_model(0, 1, 2, 1, state_interp={1: StateInterp(not_=(1, 1), impl=(1, 0, 0, 1),
                                                                        box=(0, 1, 1))}),
}


def cells(m, bits):
    return tuple(bool(bits >> c & 1) for c in range(m.n_prop_cells))


def small(f):
    return S.binder_depth(f) <= 4


@pytest.mark.parametrize("name", list(MODELS))
def test_agree(name):
    m = MODELS[name]

    @settings(max_examples=50)
    @given(S.closed_formulas(3).filter(small))
    def check(f):
        assert cells(m, se.eval_formula(m, {}, f).bits) == nv.naive_eval(m, f), sx.print_ast(f)

    check()


@pytest.mark.parametrize("text", [
    "forall x. exists F. x[F] & ~F(x)",
    "exists x. exists y. A!(x) & A!(y) & ~(x = y) & box (forall F. F(x) <-> F(y))",
    "forall F. exists x. A!(x) & (forall G. x[G] <-> G = F)",
    "forall F. [\\x. exists G. x[G] & ~G(x)] = F",
    "forall x. F((the y. y = x)) -> F(x)",
])
def test_named(text):
    f = se.universal_closure(sx.parse(text))
    for m in MODELS.values():
        assert cells(m, se.eval_formula(m, {}, f).bits) == nv.naive_eval(m, f), text


def test_valid_agrees_on_open_formulas():
    for text in ["x[F] -> box x[F]", "box p <-> p", "F(x) -> dia F(x)", "x = y -> (x[F] <-> y[F])"]:
        f = sx.parse(text)
        for m in MODELS.values():
            assert se.valid(m, f) == nv.naive_valid(m, f), text
