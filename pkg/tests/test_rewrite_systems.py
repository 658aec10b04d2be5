import pytest
from hypothesis import given

import ars
import rewrite_systems as rs
from error_handler import InputError
from rewrite_systems import ONE, ZERO, Add, Mul
from strategies import exprs, words


# ---------------- arithmetic ----------------
def test_expr_examples():
    assert rs.expr_reducts(ZERO) == frozenset()
    source = Add(Mul(ONE, ZERO), ZERO)
    assert rs.expr_reducts(source) == {Add(ZERO, ZERO), Mul(ONE, ZERO)}


def test_expr_newman_example():
    verdict = ars.newman_verify(rs.EXPR, Add(Mul(ONE, ZERO), ZERO))
    assert verdict.normal_forms == {ZERO}
    assert verdict.unique_nf


def test_every_rule_shrinks():
    for e in rs.all_exprs(7):
        for _, t in rs.expr_steps(e):
            assert t.size < e.size
            assert rs.expr_size(t) < rs.expr_size(e)


def test_all_exprs_counts():
    # sizes 1, 3, 5: 2 + 8 + 64
    assert len(rs.all_exprs(5)) == 74


def test_root_overlaps_are_joinable():
    overlaps = rs.expr_root_overlaps()
    sources = {o.source for o in overlaps}
    assert Add(ZERO, ZERO) in sources
    assert Mul(ZERO, ONE) in sources
    assert all(o.joinable for o in overlaps)


@given(exprs)
def test_expressions_have_one_normal_form(e):
    verdict = ars.newman_verify(rs.EXPR, e)
    assert verdict.terminating and verdict.locally_confluent and verdict.unique_nf


# ---------------- strings ----------------
def test_srs_examples():
    assert rs.srs_reducts("aa") == {"a"}
    assert rs.srs_reducts("aaa") == {"aa"}
    assert rs.srs_reducts("ab") == frozenset()
    assert all(rs.str_len(t) < rs.str_len("aabb") for t in rs.srs_reducts("aabb"))


def test_alphabet_is_enforced():
    with pytest.raises(rs.AlphabetError) as info:
        rs.srs_reducts("abc")
    assert info.value.position == 2


@given(words)
def test_normal_form_collapses_runs(w):
    verdict = ars.newman_verify(rs.SRS, w)
    assert verdict.normal_forms == {rs.collapse_runs(w)}


def test_collapse_runs():
    assert rs.collapse_runs("aabbbab") == "abab"
    assert rs.collapse_runs("") == ""


def test_all_strings():
    assert rs.all_strings(2) == ["", "a", "b", "aa", "ab", "ba", "bb"]


# ---------------- rule files ----------------
def test_parse_rules():
    rules = rs.parse_rules("# idempotency\naa -> a\n\nbb -> b  # second\n")
    assert rules == rs.IDEMPOTENCY


@pytest.mark.parametrize("text", ["aa a", "a -> aa", "-> a", "ac -> a", "# nothing\n"])
def test_bad_rule_files(text):
    with pytest.raises(InputError):
        rs.parse_rules(text)


def test_rule_rendering():
    assert str(rs.RULE_AA) == "aa -> a"
    assert rs.RULE_AA.name == "aa->a"


# ---------------- critical pairs ----------------
def test_self_overlap_of_aa():
    pairs = rs.critical_pairs([rs.RULE_AA])
    assert pairs == {rs.CriticalPair("aaa", "aa", "aa", 1)}


def test_idempotency_has_exactly_the_two_self_overlaps():
    pairs = rs.sorted_pairs(rs.critical_pairs(rs.IDEMPOTENCY))
    assert [p.render() for p in pairs] == ["aaa -> aa | aa @1", "bbb -> bb | bb @1"]
    assert all(rs.join_critical_pair(p, rs.IDEMPOTENCY, 4) for p in pairs)


def test_containment_overlap():
    rules = rs.parse_rules("aba -> a\nb -> ")
    pairs = rs.critical_pairs(rules)
    assert rs.CriticalPair("aba", "a", "aa", 1) in pairs


def test_unjoinable_overlap():
    rules = rs.parse_rules("ab -> a\nba -> b")
    pairs = rs.sorted_pairs(rs.critical_pairs(rules))
    assert [p.render() for p in pairs] == ["aba -> aa | ab @1", "bab -> bb | ba @1"]
    assert all(rs.join_critical_pair(p, rules) is None for p in pairs)
