import pytest
from hypothesis import given

import lambda_calculus as lc
import rewrite_systems as rs
import ski
import stlcext as ext
import testkit
from error_handler import UsageError
from lambda_calculus import App, Var
from stlc import Arr, Base, Lam
from strategies import combinators, exprs, terms
from surface import ParseError, UnknownSystem, parse, parse_type, parse_word, print_term, span_at

B0, B1 = Base(0), Base(1)


# ---------------- parsing ----------------
def test_parse_identity():
    assert parse("lambda", "\\x. x") == lc.Lam(Var(0))
    assert parse("lambda", "λx. x") == lc.Lam(Var(0))


def test_named_binders_resolve_to_indices():
    assert parse("lambda", "\\x. \\y. x y") == lc.Lam(lc.Lam(App(Var(1), Var(0))))
    assert parse("lambda", "\\x. \\x. x") == lc.Lam(lc.Lam(Var(0)))


def test_raw_indices_and_anonymous_binders():
    assert parse("lambda", "\\. v0 v3") == lc.Lam(App(Var(0), Var(3)))
    assert parse("lambda", "(\\x.\\y.x) v5") == App(lc.Lam(lc.Lam(Var(1))), Var(5))


def test_application_is_left_associative():
    assert parse("lambda", "v0 v1 v2") == App(App(Var(0), Var(1)), Var(2))
    assert parse("lambda", "v0 \\x. x x") == App(Var(0), lc.Lam(App(Var(0), Var(0))))


def test_prelude_names():
    assert parse("lambda", "omega") == lc.OMEGA
    assert parse("lambda", "id v2") == App(lc.Lam(Var(0)), Var(2))
    # a binder shadows the prelude
    assert parse("lambda", "\\id. id") == lc.Lam(Var(0))


def test_unbound_name_has_a_span():
    with pytest.raises(ParseError) as info:
        parse("lambda", "\\x. y")
    assert info.value.span.column == 5
    assert info.value.span.byte_start == 4


def test_stlc_terms():
    assert parse("stlc", "\\x:b0. x") == Lam(B0, Var(0))
    assert parse("stlc", "\\f:b0 -> b1. \\x:b0. f x") == Lam(Arr(B0, B1), Lam(B0, App(Var(1), Var(0))))
    assert parse("stlc", "\\f:(b0 -> b0) -> b1. f").dom == Arr(Arr(B0, B0), B1)


def test_stlcext_terms():
    expected = ext.Fst(ext.Pair(Lam(B0, Var(0)), Lam(B1, Var(0))))
    assert parse("stlcext", "fst (\\x:b0. x, \\y:b1. y)") == expected


def test_stlcext_case_and_injections():
    m = parse("stlcext", "\\s:b0 + b1. case s of { inl x => inr[b1 + b0] x | inr y => inl[b1 + b0] y }")
    s, t = ext.Sum(B0, B1), ext.Sum(B1, B0)
    assert m == Lam(s, ext.Case(Var(0), ext.Inr(t, Var(0)), ext.Inl(t, Var(0))))


def test_type_operators():
    assert parse_type("stlcext", "b0 * b1 + b0 -> b1") == Arr(ext.Sum(ext.Prod(B0, B1), B0), B1)
    assert parse_type("stlcext", "b0 + b1 + b0") == ext.Sum(ext.Sum(B0, B1), B0)
    assert parse_type("stlc", "b0 -> b1 -> b0") == Arr(B0, Arr(B1, B0))


def test_ski_and_expr():
    assert parse("ski", "S K (K S)") == ski.apply_all(ski.S, ski.K, ski.CApp(ski.K, ski.S))
    assert parse("expr", "1 * 0 + 0") == rs.Add(rs.Mul(rs.ONE, rs.ZERO), rs.ZERO)


def test_srs_alphabet():
    assert parse("srs", " aabb ") == "aabb"
    with pytest.raises(ParseError) as info:
        parse("srs", "abc")
    assert info.value.span.column == 3
    assert info.value.expected == {'"a"', '"b"'}


def test_syntax_error_positions():
    with pytest.raises(ParseError) as info:
        parse("lambda", "\\x. (x")
    assert "end of input" in info.value.describe()

    with pytest.raises(ParseError) as info:
        parse("stlc", "\\x b0. x")
    assert info.value.span.line == 1
    assert info.value.span.column == 4


def test_unknown_system():
    with pytest.raises(UnknownSystem) as info:
        parse("fortran", "x")
    assert isinstance(info.value, UsageError)


def test_spans_count_utf8_bytes():
    span = span_at("λx.\n y", 5, 6)
    assert span.line == 2
    assert span.column == 2
    assert span.byte_start == 6
    assert str(span) == "2:2"
    assert parse_word("ab") == "ab"


# ---------------- printing ----------------
def test_canonical_forms():
    assert print_term(lc.Lam(Var(6))) == "\\. v6"
    assert print_term(App(lc.Lam(Var(0)), Var(1))) == "((\\. v0) v1)"
    assert print_term(Lam(Arr(B0, B0), Var(0))) == "\\:b0 -> b0. v0"
    assert print_term(ext.Inl(ext.Sum(B0, B1), Var(0))) == "inl[b0 + b1] v0"
    assert print_term(ext.Fst(ext.Pair(Var(0), Var(1)))) == "fst (v0, v1)"
    assert print_term(ext.Case(Var(0), Var(0), Var(1))) == "case v0 of { inl => v0 | inr => v1 }"
    assert print_term(ski.apply_all(ski.S, ski.K, ski.CApp(ski.K, ski.S))) == "S K (K S)"
    assert print_term(rs.Mul(rs.ONE, rs.Add(rs.ZERO, rs.ONE))) == "(1 * (0 + 1))"
    assert print_term("abba") == "abba"


def test_printing_rejects_foreign_values():
    with pytest.raises(TypeError):
        print_term(3.5)


@given(terms)
def test_lambda_round_trip(m):
    assert parse("lambda", print_term(m)) == m


@given(combinators)
def test_ski_round_trip(m):
    assert parse("ski", print_term(m)) == m


@given(exprs)
def test_expr_round_trip(m):
    assert parse("expr", print_term(m)) == m


def test_typed_round_trip(small_cfg):
    rng = small_cfg.rng()
    for system in ("stlc", "stlcext"):
        for m in testkit.typed_corpus(small_cfg, system, rng):
            assert parse(system, print_term(m)) == m
