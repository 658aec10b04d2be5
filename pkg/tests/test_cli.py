import io
import json

import pydot
import pytest

import main
from constants import CliConfig


def run(capsys, *argv):
    code = main.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def message(err):
    # log records come first; the user-facing message is the last line
    return err.rstrip("\n").splitlines()[-1]


# ---------------- golden invocations ----------------
GOLDEN = [
    (["parse", "--system", "lambda", "\\x. \\y. x"], "\\. \\. v1\n"),
    (["parse", "--system", "stlcext", "fst (\\x:b0. x, \\y:b1. y)"], "fst (\\:b0. v0, \\:b1. v0)\n"),
    (["parse", "--system", "ski", "S K (K S)"], "S K (K S)\n"),
    (["parse", "--system", "expr", "1 * 0 + 0"], "((1 * 0) + 0)\n"),
    (["typecheck", "--system", "stlc", "\\x:b0. x"], "b0 -> b0\n"),
    (["typecheck", "--system", "stlcext", "\\p:b0 * b1. snd p"], "b0 * b1 -> b1\n"),
    (["typecheck", "--system", "stlcext", "\\s:b0 + b1. case s of { inl x => inr[b1 + b0] x | inr y => inl[b1 + b0] y }"],
     "b0 + b1 -> b1 + b0\n"),
    (["normalize", "--system", "lambda", "(\\x.\\y.x) v5"], "\\. v6\n"),
    (["normalize", "--system", "lambda", "--strategy", "applicative-order", "(\\x. x) ((\\y. y) v2)"], "v2\n"),
    (["normalize", "--system", "ski", "S K K S"], "S\n"),
    (["normalize", "--system", "expr", "(1 * 0) + 0"], "0\n"),
    (["normalize", "--system", "srs", "aabbbaa"], "aba\n"),
    (["trace", "--system", "stlcext", "fst (v0, v1)"], "FstPair: v0\n"),
    (["trace", "--system", "stlcext", "(v0, fst (v1, v2))"], "FstPair: (v0, v1)\n"),
    (["trace", "--system", "lambda", "(\\x. x) ((\\y. y) v2)"], "Beta: ((\\. v0) v2)\nBeta: v2\n"),
    (["trace", "--system", "srs", "aab"], "aa->a: ab\n"),
    (["confluence", "--system", "srs", "--input", "aabb", "--cap", "100"],
     "terminating=true locallyConfluent=true uniqueNF=true nf=ab\n"),
    (["confluence", "--system", "expr", "--input", "(1 * 0) + 0"],
     "terminating=true locallyConfluent=true uniqueNF=true nf=0\n"),
    (["confluence", "--system", "lambda", "omega"],
     "terminating=false locallyConfluent=true uniqueNF=true nf=\n"),
    (["critical-pairs", "--system", "srs"],
     "aaa -> aa | aa @1 joinable=yes\nbbb -> bb | bb @1 joinable=yes\n"),
    (["normalize", "--system", "lambda", "--format", "json-lines", "(\\x.\\y.x) v5"],
     '{"event": "normal-form", "term": "\\\\. v6", "rule": null, "step": 1}\n'),
]


@pytest.mark.parametrize("argv,expected", GOLDEN, ids=[" ".join(a[:3]) for a, _ in GOLDEN])
def test_golden_output(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == CliConfig.EXIT_OK
    assert out == expected


@pytest.mark.parametrize("argv,expected", GOLDEN[:6])
def test_output_is_stable_across_runs(capsys, argv, expected):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[:2] == second[:2]


# ---------------- graphs ----------------
def test_omega_graph_is_a_single_self_loop(capsys):
    code, out, _ = run(capsys, "graph", "--system", "lambda", "--input", "(\\x.x x)(\\x.x x)", "--cap", "5")
    assert code == CliConfig.EXIT_OK
    (graph,) = pydot.graph_from_dot_data(out)
    assert len(graph.get_nodes()) == 1
    (edge,) = graph.get_edges()
    assert edge.get_source() == edge.get_destination()
    assert edge.get("label") == '"Beta"'


def test_graph_labels_are_canonical_terms(capsys):
    code, out, _ = run(capsys, "graph", "--system", "srs", "aabb")
    assert code == CliConfig.EXIT_OK
    (graph,) = pydot.graph_from_dot_data(out)
    labels = sorted(n.get("label").strip('"') for n in graph.get_nodes())
    assert labels == ["aab", "aabb", "ab", "abb"]


def test_partial_graph_exits_with_bound_code(capsys):
    code, out, err = run(capsys, "graph", "--system", "srs", "aaaabbbb", "--cap", "3")
    assert code == CliConfig.EXIT_BOUND_EXHAUSTED
    assert pydot.graph_from_dot_data(out)
    assert message(err).startswith("bound exhausted:")


# ---------------- errors and exit codes ----------------
def test_type_error_exits_with_input_code(capsys):
    code, out, err = run(capsys, "typecheck", "--system", "stlcext", "fst v0")
    assert code == CliConfig.EXIT_INPUT_ERROR
    assert out == ""
    assert "unbound variable v0" in err


def test_parse_error_shows_position(capsys):
    code, _, err = run(capsys, "parse", "--system", "srs", "abc")
    assert code == CliConfig.EXIT_INPUT_ERROR
    assert message(err).startswith("error: 1:3:")


def test_fuel_exhaustion(capsys):
    code, out, err = run(capsys, "normalize", "--system", "lambda", "omega", "--fuel", "50")
    assert code == CliConfig.EXIT_BOUND_EXHAUSTED
    assert out == ""
    assert "fuel exhausted after 50 steps" in err


def test_trace_stops_at_fuel(capsys):
    code, out, _ = run(capsys, "trace", "--system", "lambda", "omega", "--fuel", "3")
    assert code == CliConfig.EXIT_BOUND_EXHAUSTED
    assert out.count("Beta: ") == 3


@pytest.mark.parametrize("argv", [
    ["parse", "--system", "cobol", "x"],
    ["props", "--suite", "everything"],
    ["normalize", "--system", "lambda", "--fuel", "-1", "v0"],
    ["critical-pairs", "--system", "srs", "--depth", "65"],
    ["normalize", "--system", "lambda", "--depth", "3", "v0"],
    ["graph", "--system", "srs", "--depth", "3", "aab"],
    ["normalize", "--system", "lambda", "--fuel", "ten", "v0"],
    ["normalize", "--system", "lambda", "v0", "--input", "v1"],
    ["normalize", "--system", "lambda"],
    ["typecheck", "--system", "lambda", "v0"],
    ["critical-pairs", "--system", "lambda"],
    ["normalize", "--system", "lambda", "--format", "dot", "v0"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == CliConfig.EXIT_USAGE
    assert out == ""
    assert message(err).startswith("usage:")


# ---------------- inputs, outputs and settings ----------------
def test_stdin_input(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("(\\x. x) v3\n"))
    code, out, _ = run(capsys, "normalize", "--system", "lambda", "-")
    assert code == CliConfig.EXIT_OK
    assert out == "v3\n"


def test_file_input_and_output(capsys, tmp_path):
    source = tmp_path / "term.txt"
    source.write_text("1 * (0 + 1)", encoding="utf-8")
    target = tmp_path / "nf.txt"
    code, out, _ = run(capsys, "normalize", "--system", "expr", "--file", str(source), "--out", str(target))
    assert code == CliConfig.EXIT_OK
    assert out == ""
    assert target.read_text(encoding="utf-8") == "1\n"


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "parse", "--system", "srs", "--file", str(tmp_path / "absent.txt"))
    assert code == CliConfig.EXIT_INPUT_ERROR
    assert message(err).startswith("error: cannot read")


def test_rule_file(capsys, tmp_path):
    rules = tmp_path / "rules.txt"
    rules.write_text("ab -> a\nba -> b\n", encoding="utf-8")
    code, out, _ = run(capsys, "critical-pairs", "--system", "srs", "--rules", str(rules))
    assert code == CliConfig.EXIT_OK
    assert out == "aba -> aa | ab @1 joinable=no\nbab -> bb | ba @1 joinable=no\n"

    code, out, _ = run(capsys, "confluence", "--system", "srs", "--rules", str(rules), "aba")
    assert out == "terminating=true locallyConfluent=false uniqueNF=false nf=a,aa\n"


def test_json_lines_trace(capsys):
    code, out, _ = run(capsys, "trace", "--system", "srs", "--format", "json-lines", "aabb")
    assert code == CliConfig.EXIT_OK
    records = [json.loads(line) for line in out.splitlines()]
    assert [r["event"] for r in records] == ["step", "step", "normal-form"]
    assert records[0] == {"event": "step", "term": "abb", "rule": "aa->a", "step": 1}
    assert records[-1]["term"] == "ab"


def test_config_file_sets_defaults(capsys, tmp_path):
    (tmp_path / "rewritekit.json").write_text(json.dumps({"fuel": 5, "format": "json-lines"}), encoding="utf-8")
    code, out, _ = run(capsys, "normalize", "--system", "lambda", "omega")
    assert code == CliConfig.EXIT_BOUND_EXHAUSTED
    # a flag beats the file
    code, out, _ = run(capsys, "normalize", "--system", "lambda", "--format", "text", "id v1")
    assert (code, out) == (CliConfig.EXIT_OK, "v1\n")


def test_malformed_config_falls_back_to_defaults(capsys, tmp_path):
    config = tmp_path / "broken.json"
    config.write_text("{not json", encoding="utf-8")
    code, out, err = run(capsys, "normalize", "--system", "lambda", "--config", str(config), "id v1")
    assert (code, out) == (CliConfig.EXIT_OK, "v1\n")
    assert "Config load error" in err


def test_props_suite(capsys):
    code, out, _ = run(capsys, "props", "--suite", "takahashi", "--seed", "3", "--cases", "30",
                       "--exhaustive-size", "4")
    assert code == CliConfig.EXIT_OK
    assert out.splitlines()[-1].startswith("summary suite=takahashi cases=")
    assert out.splitlines()[-1].endswith("failures=0 seed=3")


def test_seed_environment_overrides_flag(capsys, monkeypatch):
    monkeypatch.setenv(CliConfig.SEED_ENV, "11")
    code, out, _ = run(capsys, "props", "--suite", "takahashi", "--seed", "3", "--cases", "30", "--exhaustive-size", "3",
                       "--format", "json-lines")
    assert code == CliConfig.EXIT_OK
    assert json.loads(out)["seed"] == 11


def test_help(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == CliConfig.EXIT_OK
    assert "critical-pairs" in out
