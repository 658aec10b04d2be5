# main.py
import argparse
import asyncio
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import aiofiles
from dotenv import load_dotenv

import ars
import lambda_calculus as lc
import rewrite_systems as rs
import ski
import stlc
import stlcext as ext
import testkit
from constants import ArsConfig, CliConfig, RewriteConfig, TestkitConfig
from error_handler import BoundExhausted, ErrorHandler, InputError, UsageError
from surface import UnknownSystem, parse, print_term

PROG = "rewritekit"


# ---------------- Setup ----------------
def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None):
    """Console logging on stderr, plus an optional file log."""
    logger = logging.getLogger()
    for handler in [h for h in logger.handlers if getattr(h, "_rewritekit", False)]:
        logger.removeHandler(handler)
        handler.close()

    level_name = (level or "WARNING").upper()
    logger.setLevel(getattr(logging, level_name, logging.WARNING))

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(logging.Formatter(
        '%(levelname)s - %(name)s - %(message)s'
    ))
    console_handler._rewritekit = True
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(filename=log_file, encoding="utf-8", mode="a")
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        ))
        file_handler._rewritekit = True
        logger.addHandler(file_handler)


# ---------------- Manager Classes ----------------
class ConfigManager:
    def __init__(self, filename: str = CliConfig.CONFIG_FILE, explicit: bool = False):
        self.filename = filename
        self.explicit = explicit
        self.default_config = {
            "node_cap": ArsConfig.NODE_CAP,
            "depth": RewriteConfig.CRITICAL_PAIR_DEPTH,
            "fuel": ArsConfig.FUEL,
            "seed": TestkitConfig.DEFAULT_SEED,
            "cases": TestkitConfig.DEFAULT_CASES,
            "strategy": ArsConfig.STRATEGIES[0],
            "format": CliConfig.FORMATS[0],
        }

    async def load(self) -> Dict[str, Any]:
        """Load configuration from file asynchronously, merged over the defaults."""
        if not self.explicit and not os.path.exists(self.filename):
            return self.default_config.copy()
        try:
            async with aiofiles.open(self.filename, "r", encoding="utf-8") as f:
                content = await f.read()
            config = json.loads(content)
            if not isinstance(config, dict):
                raise ValueError("top level must be an object")
        except (OSError, ValueError) as e:
            logging.error(f"❌ Config load error ({self.filename}): {e}, using defaults")
            return self.default_config.copy()

        unknown = sorted(set(config) - set(self.default_config))
        if unknown:
            logging.warning(f"⚠️ Ignoring unknown config keys: {', '.join(unknown)}")
        known = {k: v for k, v in config.items() if k in self.default_config}
        return {**self.default_config, **known}


@dataclass(frozen=True)
class System:
    name: str
    steps: Callable
    rel: ars.Rel
    infer: Optional[Callable] = None


def system_for(name: str, rules: Optional[Sequence[rs.StrRule]] = None) -> System:
    if name == "lambda":
        return System(name, lc.steps, lc.BETA)
    if name == "ski":
        return System(name, ski.steps, ski.SKI)
    if name == "expr":
        return System(name, rs.expr_steps, rs.EXPR)
    if name == "srs":
        rules = tuple(rules or rs.IDEMPOTENCY)
        return System(name, lambda w, innermost=False: rs.srs_steps(w, rules), rs.srs_rel(rules))
    if name == "stlc":
        return System(name, stlc.typed_steps, stlc.TYPED, stlc.infer)
    if name == "stlcext":
        return System(name, ext.ext_labelled_steps, ext.EXT, ext.ext_infer)
    raise UnknownSystem(name)


@dataclass
class CommandOutput:
    lines: List[str] = field(default_factory=list)
    # reported after the output is written
    error: Optional[Exception] = None


def record(event: str, term: Optional[str] = None, rule: Optional[str] = None,
           step: Optional[int] = None) -> str:
    return json.dumps({"event": event, "term": term, "rule": rule, "step": step}, ensure_ascii=False)


# ---------------- Commands ----------------
class Workbench:
    """One handler per subcommand; each returns the lines to print."""

    def __init__(self, args: argparse.Namespace, settings: Dict[str, Any]):
        self.args = args
        self.settings = settings

    @property
    def json_lines(self) -> bool:
        return self.settings["format"] == "json-lines"

    def require_format(self, *allowed: str):
        if self.settings["format"] not in allowed:
            raise UsageError(f"{self.args.command} does not support --format {self.settings['format']}")

    async def read_term(self):
        text = await read_input(self.args)
        return parse(self.args.system, text)

    async def rules(self) -> Optional[Sequence[rs.StrRule]]:
        path = getattr(self.args, "rules", None)
        if not path:
            return None
        if self.args.system != "srs":
            raise UsageError("--rules applies to the srs system only")
        return rs.parse_rules(await read_text(path))

    async def parse(self) -> CommandOutput:
        return CommandOutput([print_term(await self.read_term())])

    async def typecheck(self) -> CommandOutput:
        system = system_for(self.args.system)
        if system.infer is None:
            raise UsageError(f"typecheck needs a typed system (stlc or stlcext), not {system.name}")
        term = await self.read_term()
        return CommandOutput([str(system.infer(stlc.EMPTY, term))])

    async def normalize(self) -> CommandOutput:
        self.require_format("text", "json-lines")
        system = system_for(self.args.system, await self.rules())
        term = await self.read_term()
        outcome = ars.normalize(system.steps, term, self.settings["strategy"], self.settings["fuel"])
        if isinstance(outcome, ars.FuelExhausted):
            raise BoundExhausted(f"fuel exhausted after {outcome.steps} steps at {print_term(outcome.term)}")
        if self.json_lines:
            return CommandOutput([record("normal-form", print_term(outcome.term), None, outcome.steps)])
        return CommandOutput([print_term(outcome.term)])

    async def trace(self) -> CommandOutput:
        self.require_format("text", "json-lines")
        system = system_for(self.args.system, await self.rules())
        term = await self.read_term()
        fuel = self.settings["fuel"]
        out = CommandOutput()
        last = term
        for i, (rule, reduct) in enumerate(
                ars.reduction_sequence(system.steps, term, self.settings["strategy"], fuel), start=1):
            last = reduct
            text = print_term(reduct)
            out.lines.append(record("step", text, rule, i) if self.json_lines else f"{rule}: {text}")
        if next(iter(system.steps(last, False)), None) is not None:
            out.error = BoundExhausted(f"fuel exhausted after {fuel} steps")
        elif self.json_lines:
            out.lines.append(record("normal-form", print_term(last), None, len(out.lines)))
        return out

    async def confluence(self) -> CommandOutput:
        self.require_format("text", "json-lines")
        system = system_for(self.args.system, await self.rules())
        term = await self.read_term()
        verdict = ars.newman_verify(system.rel, term, self.settings["node_cap"])
        forms = sorted(print_term(n) for n in verdict.normal_forms)
        terminating = {True: "true", False: "false", None: "unknown"}[verdict.terminating]
        line = (f"terminating={terminating} "
                f"locallyConfluent={str(verdict.locally_confluent).lower()} "
                f"uniqueNF={str(verdict.unique_nf).lower()} "
                f"nf={','.join(forms)}")
        if self.json_lines:
            lines = [record("normal-form", nf) for nf in forms] + [record("verdict", line)]
        else:
            lines = [line]
        out = CommandOutput(lines)
        if not verdict.complete:
            out.error = BoundExhausted(f"node cap {self.settings['node_cap']} reached; {verdict.warning}")
        return out

    async def graph(self) -> CommandOutput:
        system = system_for(self.args.system, await self.rules())
        term = await self.read_term()
        graph = ars.star_reachable(system.rel, term, self.settings["node_cap"])
        out = CommandOutput(ars.to_dot(graph, show=print_term).rstrip("\n").split("\n"))
        if not graph.complete:
            out.error = BoundExhausted(f"node cap {self.settings['node_cap']} reached; graph is partial")
        return out

    async def critical_pairs(self) -> CommandOutput:
        depth = self.settings["depth"]
        if self.args.system == "expr":
            return CommandOutput([
                f"{print_term(o.source)} -> {' | '.join(print_term(r) for r in o.reducts)} "
                f"[{','.join(o.rules)}] joinable={'yes' if o.joinable else 'no'}"
                for o in rs.expr_root_overlaps(depth)
            ])
        if self.args.system != "srs":
            raise UsageError(f"critical-pairs supports srs and expr, not {self.args.system}")
        rules = tuple(await self.rules() or rs.IDEMPOTENCY)
        lines = []
        for pair in rs.sorted_pairs(rs.critical_pairs(rules)):
            joined = rs.join_critical_pair(pair, rules, depth) is not None
            lines.append(f"{pair.render()} joinable={'yes' if joined else 'no'}")
        return CommandOutput(lines)

    async def props(self) -> CommandOutput:
        sizes = {k: v for k, v in [("max_size", self.args.max_size),
                                   ("exhaustive_size", self.args.exhaustive_size)] if v is not None}
        cfg = testkit.GenConfig(seed=self.settings["seed"], cases=self.settings["cases"], **sizes)
        report = testkit.run_suite(self.args.suite, cfg)
        lines = [report.to_json()] if self.json_lines else report.lines()
        out = CommandOutput(lines)
        if not report.ok:
            out.error = InputError(f"suite {report.suite} failed {len(report.failures)} cases")
        return out


COMMANDS = {
    "parse": Workbench.parse,
    "typecheck": Workbench.typecheck,
    "normalize": Workbench.normalize,
    "trace": Workbench.trace,
    "confluence": Workbench.confluence,
    "graph": Workbench.graph,
    "critical-pairs": Workbench.critical_pairs,
    "props": Workbench.props,
}


# ---------------- Input and output ----------------
async def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        async with aiofiles.open(path, "r", encoding="utf-8") as f:
            return await f.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from e


async def read_input(args: argparse.Namespace) -> str:
    sources = [s for s in (args.term, args.input) if s is not None]
    if args.file is not None:
        sources.append(None)
    if len(sources) != 1:
        raise UsageError("give exactly one input: a term argument, --input or --file")
    if args.file is not None:
        return await read_text(args.file)
    text = sources[0]
    return sys.stdin.read() if text == "-" else text


async def emit(lines: List[str], out_path: Optional[str]):
    text = "".join(line + "\n" for line in lines)
    if out_path:
        async with aiofiles.open(out_path, "w", encoding="utf-8") as f:
            await f.write(text)
        logging.info(f"✅ Wrote {len(lines)} lines to {out_path}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


# ---------------- Argument parsing ----------------
class CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def numeral(lo: int, hi: int) -> Callable[[str], int]:
    def convert(text: str) -> int:
        try:
            value = int(text, 10)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a decimal numeral, got {text!r}")
        if not lo <= value <= hi:
            raise argparse.ArgumentTypeError(f"{value} is outside {lo}..{hi}")
        return value

    return convert


def build_parser() -> CliParser:
    parser = CliParser(prog=PROG, description="Rewriting and metatheory workbench.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    common = CliParser(add_help=False)
    common.add_argument("--config", help=f"JSON settings file (default: {CliConfig.CONFIG_FILE})")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", help="|".join(CliConfig.FORMATS))
    common.add_argument("--seed", type=numeral(0, CliConfig.MAX_SEED))

    term_input = CliParser(add_help=False)
    term_input.add_argument("--system", required=True, help="|".join(CliConfig.SYSTEMS))
    term_input.add_argument("term", nargs="?", help="inline input, or - for stdin")
    term_input.add_argument("--input", help="inline input")
    term_input.add_argument("--file", help="read input from a file, or - for stdin")

    bounds = CliParser(add_help=False)
    bounds.add_argument("--fuel", type=numeral(0, CliConfig.MAX_FUEL))
    bounds.add_argument("--cap", type=numeral(1, CliConfig.MAX_CAP))
    bounds.add_argument("--strategy", choices=ArsConfig.STRATEGIES)
    bounds.add_argument("--rules", help="srs rule file, one 'lhs -> rhs' per line")

    sub.add_parser("parse", parents=[common, term_input], help="print the canonical form")
    sub.add_parser("typecheck", parents=[common, term_input], help="infer the type")
    for name, text in [("normalize", "reduce to normal form"),
                       ("trace", "print each reduction step"),
                       ("confluence", "Newman check on the reduction graph"),
                       ("graph", "DOT reduction graph")]:
        sub.add_parser(name, parents=[common, term_input, bounds], help=text)

    pairs = sub.add_parser("critical-pairs", parents=[common], help="rule overlaps and their joins")
    pairs.add_argument("--system", required=True, help="srs|expr")
    pairs.add_argument("--rules", help="srs rule file")
    pairs.add_argument("--depth", type=numeral(0, CliConfig.MAX_DEPTH))

    props = sub.add_parser("props", parents=[common], help="run a property suite")
    props.add_argument("--suite", required=True, help="|".join(TestkitConfig.SUITES))
    props.add_argument("--cases", type=numeral(0, CliConfig.MAX_FUEL))
    props.add_argument("--max-size", type=numeral(1, CliConfig.MAX_DEPTH))
    props.add_argument("--exhaustive-size", type=numeral(0, CliConfig.MAX_DEPTH))
    return parser


def resolve_settings(args: argparse.Namespace, config: Dict[str, Any]) -> Dict[str, Any]:
    """Environment over flags over the JSON file over the built-in defaults."""
    settings = dict(config)
    for key, flag in [("node_cap", "cap"), ("depth", "depth"), ("fuel", "fuel"), ("seed", "seed"),
                      ("cases", "cases"), ("strategy", "strategy"), ("format", "format")]:
        value = getattr(args, flag, None)
        if value is not None:
            settings[key] = value

    env_seed = os.getenv(CliConfig.SEED_ENV)
    if env_seed:
        try:
            settings["seed"] = numeral(0, CliConfig.MAX_SEED)(env_seed)
        except argparse.ArgumentTypeError as e:
            raise UsageError(f"{CliConfig.SEED_ENV}: {e}") from None

    if settings["format"] not in CliConfig.FORMATS:
        raise UsageError(f"unknown format {settings['format']!r}; choose from {', '.join(CliConfig.FORMATS)}")
    if settings["strategy"] not in ArsConfig.STRATEGIES:
        raise UsageError(f"unknown strategy {settings['strategy']!r}")
    return settings


# ---------------- Entry point ----------------
async def main_async(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    setup_logging(os.getenv(CliConfig.LOG_LEVEL_ENV), os.getenv(CliConfig.LOG_FILE_ENV))

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        return ErrorHandler.handle_command_error(PROG, e)
    except SystemExit as e:
        # --help
        return e.code if isinstance(e.code, int) else CliConfig.EXIT_OK

    try:
        config_path = args.config or CliConfig.CONFIG_FILE
        config = await ConfigManager(config_path, explicit=args.config is not None).load()
        settings = resolve_settings(args, config)
        if getattr(args, "system", None) not in (None, *CliConfig.SYSTEMS):
            raise UnknownSystem(args.system)
        if args.command == "props" and args.suite not in TestkitConfig.SUITES:
            raise testkit.UnknownSuite(args.suite)
        out = await COMMANDS[args.command](Workbench(args, settings))
        await emit(out.lines, args.out)
    except Exception as e:
        return ErrorHandler.handle_command_error(args.command, e)

    if out.error is not None:
        return ErrorHandler.handle_command_error(args.command, out.error)
    logging.debug(f"✅ {args.command} finished")
    return CliConfig.EXIT_OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    return asyncio.run(main_async(argv))


if __name__ == "__main__":
    try:
        sys.exit(run())
    except KeyboardInterrupt:
        logging.info("⏹️ Stopped by user")
        sys.exit(CliConfig.EXIT_INPUT_ERROR)
