import pydot
import pytest
from hypothesis import given, strategies as st

import ars
import lambda_calculus as lc
import rewrite_systems as rs
from lambda_calculus import Var


def table(edges):
    return ars.Rel.from_successors(lambda s: edges.get(s, ()))


def countdown(n, innermost=False):
    if n > 0:
        yield "dec", n - 1


COUNTDOWN = ars.Rel(lambda n: countdown(n))
TWO_POINT = table({"a": ["b", "c"]})


# ---------------- star_reachable ----------------
def test_no_successors_gives_singleton_graph():
    graph = ars.star_reachable(ars.EMPTY_REL, "a")
    assert graph.nodes == {"a"}
    assert graph.edges == frozenset()
    assert graph.complete
    assert graph.normal_forms() == {"a"}


def test_srs_graph_from_aabb():
    graph = ars.star_reachable(rs.SRS, "aabb", node_cap=100)
    assert graph.nodes == {"aabb", "abb", "aab", "ab"}
    assert graph.complete


def test_omega_graph_is_one_self_loop():
    graph = ars.star_reachable(lc.BETA, lc.OMEGA, node_cap=10)
    assert graph.nodes == {lc.OMEGA}
    assert graph.edges == {(lc.OMEGA, lc.OMEGA)}
    assert graph.complete
    assert graph.edge_labels[(lc.OMEGA, lc.OMEGA)] == {"Beta"}


def test_node_cap_marks_graph_incomplete():
    graph = ars.star_reachable(COUNTDOWN, 10, node_cap=3)
    assert len(graph.nodes) == 3
    assert not graph.complete
    assert ars.is_terminating(graph) is None
    # nodes whose reducts were dropped are not normal forms
    assert graph.normal_forms() == frozenset()


def test_node_cap_must_be_positive():
    with pytest.raises(ValueError):
        ars.star_reachable(COUNTDOWN, 1, node_cap=0)


# ---------------- joinability ----------------
def test_equal_terms_join_trivially():
    witness = ars.joinable(rs.SRS, "ab", "ab", 0)
    assert witness == ars.JoinWitness("ab", (), ())


def test_srs_peak_joins_at_ab():
    witness = ars.joinable(rs.SRS, "abb", "aab", 4)
    assert witness.meet == "ab"
    assert ars.replay(rs.SRS, "abb", witness.left_path)
    assert ars.replay(rs.SRS, "aab", witness.right_path)


def test_distinct_lambda_normal_forms_do_not_join():
    assert ars.joinable(lc.BETA, Var(0), Var(1), 5) is None


def test_meet_minimizes_combined_path_length():
    witness = ars.joinable(COUNTDOWN, 3, 5, 10)
    assert witness.meet == 3
    assert witness.left_path == ()
    assert witness.right_path == (4, 3)


def test_negative_depth_is_rejected():
    with pytest.raises(ValueError):
        ars.joinable(COUNTDOWN, 1, 2, -1)


# ---------------- diamond and commutation ----------------
def test_diamond_on_normal_forms_has_no_peaks():
    report = ars.check_diamond(rs.SRS, ["ab", "ba", ""])
    assert report.ok
    assert report.checked == 0


def test_srs_is_locally_confluent_on_short_strings():
    assert ars.check_diamond(rs.SRS, rs.all_strings(5), depth_bound=6).ok


def test_two_point_counterexample_is_reported():
    report = ars.check_diamond(TWO_POINT, ["a"])
    assert report.failures == (ars.Peak("a", "b", "c"),)
    assert report.lines(str) == ["a\tb\tc\tunjoined"]


def test_union_of_single_rule_systems():
    union = ars.union_rel(rs.SRS_AA, rs.SRS_BB)
    assert union.successors("aabb") == {"abb", "aab"}
    assert ars.union_rel(ars.EMPTY_REL, ars.EMPTY_REL).successors("a") == frozenset()
    assert ars.union_rel(rs.SRS, rs.SRS) is rs.SRS


def test_disjoint_rules_commute():
    corpus = rs.all_strings(5)
    assert ars.commute_check(rs.SRS_AA, rs.SRS_BB, corpus).ok
    assert ars.commute_check(rs.SRS, rs.SRS, corpus).ok


def test_union_of_commuting_diamonds_is_a_diamond():
    corpus = rs.all_strings(8)
    assert ars.check_diamond(rs.SRS_AA, corpus).ok
    assert ars.check_diamond(rs.SRS_BB, corpus).ok
    assert ars.commute_check(rs.SRS_AA, rs.SRS_BB, corpus).ok
    assert ars.check_diamond(ars.union_rel(rs.SRS_AA, rs.SRS_BB), corpus).ok


def test_non_commuting_relations_report_a_peak():
    r = table({"a": ["b"]})
    s = table({"a": ["c"]})
    report = ars.commute_check(r, s, ["a"])
    assert report.failures == (ars.Peak("a", "b", "c"),)


# ---------------- termination and Newman ----------------
def test_newman_on_arithmetic():
    source = rs.Add(rs.Mul(rs.ONE, rs.ZERO), rs.ZERO)
    verdict = ars.newman_verify(rs.EXPR, source)
    assert verdict.terminating is True
    assert verdict.locally_confluent
    assert verdict.normal_forms == {rs.ZERO}
    assert verdict.unique_nf
    assert verdict.warning is None


def test_newman_on_omega_detects_cycle():
    verdict = ars.newman_verify(lc.BETA, lc.OMEGA, node_cap=10)
    assert verdict.terminating is False
    assert ars.find_cycle(verdict.graph) == (lc.OMEGA,)


def test_newman_on_overlapping_redexes():
    verdict = ars.newman_verify(rs.SRS, "aaa")
    assert verdict.normal_forms == {"a"}
    assert verdict.unique_nf


def test_newman_flags_two_point_system():
    verdict = ars.newman_verify(TWO_POINT, "a")
    assert verdict.terminating is True
    assert not verdict.locally_confluent
    assert not verdict.unique_nf
    assert verdict.normal_forms == {"b", "c"}


def test_incomplete_newman_verdict_carries_warning():
    verdict = ars.newman_verify(COUNTDOWN, 50, node_cap=5)
    assert not verdict.complete
    assert verdict.terminating is None
    assert "incomplete" in verdict.warning


def test_confluence_check_on_cycle():
    cyclic = table({0: [1], 1: [2], 2: [0]})
    assert ars.is_terminating(ars.star_reachable(cyclic, 0)) is False
    assert ars.confluence_check(cyclic, 0).ok
    assert not ars.confluence_check(TWO_POINT, "a").ok


# ---------------- normalization ----------------
@given(st.integers(min_value=0, max_value=40))
def test_countdown_normalizes_to_zero(n):
    assert ars.normalize(countdown, n) == ars.NormalForm(0, n)


def test_fuel_exhaustion_returns_the_current_term():
    assert ars.normalize(countdown, 5, fuel=2) == ars.FuelExhausted(3, 2)
    assert ars.normalize(countdown, 0, fuel=0) == ars.NormalForm(0, 0)


def test_bad_normalization_arguments():
    with pytest.raises(ValueError):
        ars.normalize(countdown, 3, fuel=-1)
    with pytest.raises(ValueError):
        ars.normalize(countdown, 3, strategy="random-order")


def test_reduction_sequence_is_labelled():
    assert list(ars.reduction_sequence(countdown, 2)) == [("dec", 1), ("dec", 0)]


# ---------------- DOT export ----------------
def test_dot_output_parses_and_is_deterministic():
    graph = ars.star_reachable(rs.SRS, "aabb")
    text = ars.to_dot(graph, show=str)
    assert text == ars.to_dot(ars.star_reachable(rs.SRS, "aabb"), show=str)

    (parsed,) = pydot.graph_from_dot_data(text)
    assert parsed.get_type() == "digraph"
    assert len(parsed.get_nodes()) == 4
    assert len(parsed.get_edges()) == 4


def test_dot_self_loop():
    text = ars.to_dot(ars.star_reachable(lc.BETA, lc.OMEGA), show=repr)
    (parsed,) = pydot.graph_from_dot_data(text)
    (edge,) = parsed.get_edges()
    assert edge.get_source() == edge.get_destination()


# ---------------- ordering ----------------
def test_serialization_is_prefix_with_decimal_indices():
    m = lc.Lam(lc.App(Var(0), Var(12)))
    assert ars.serialize(m) == "(Lam (App (Var 0) (Var 12)))"
    assert ars.canonical_key(m) == (4, "(Lam (App (Var 0) (Var 12)))")
    assert ars.canonical_key("abb") == (3, "abb")


def test_states_sort_by_size_then_serialization():
    terms = [lc.Lam(Var(0)), Var(10), lc.App(Var(0), Var(0)), Var(2)]
    assert ars.sort_states(terms) == [Var(10), Var(2), lc.Lam(Var(0)), lc.App(Var(0), Var(0))]
