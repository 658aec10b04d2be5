# surface.py
"""Concrete syntax for every system: lark grammars in, canonical ASCII out.

Lambda-family grammars resolve named binders to de Bruijn indices; ``v<n>``
always denotes the raw index ``n``.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Optional

from lark import Lark, Token, Transformer, UnexpectedEOF, UnexpectedInput
from lark.lexer import PatternStr

import lambda_calculus as lc
import rewrite_systems as rs
import ski
import stlc
import stlcext as ext
from constants import CliConfig, RewriteConfig
from error_handler import InputError, UsageError
from lambda_calculus import App, Var

logger = logging.getLogger(__name__)


# ---------------- Errors ----------------
@dataclass(frozen=True)
class SourceSpan:
    byte_start: int
    byte_end: int
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


def span_at(text: str, start: int, end: Optional[int] = None) -> SourceSpan:
    """Span for the character range [start, end) of ``text`` (1-based line/column)."""
    start = min(max(start, 0), len(text))
    end = start if end is None else min(max(end, start), len(text))
    line = text.count("\n", 0, start) + 1
    column = start - (text.rfind("\n", 0, start) + 1) + 1
    return SourceSpan(
        byte_start=len(text[:start].encode("utf-8")),
        byte_end=len(text[:end].encode("utf-8")),
        line=line,
        column=column,
    )


class ParseError(InputError):
    def __init__(self, message: str, span: SourceSpan, expected: FrozenSet[str] = frozenset()):
        self.message = message or "syntax error"
        self.span = span
        self.expected = frozenset(expected)
        super().__init__(f"{span}: {self.message}")

    def describe(self) -> str:
        if not self.expected:
            return str(self)
        return f"{self} (expected one of: {', '.join(sorted(self.expected))})"


class UnknownSystem(UsageError):
    def __init__(self, system: str):
        self.system = system
        super().__init__(f"unknown system {system!r}; choose from {', '.join(CliConfig.SYSTEMS)}")


# ---------------- Grammars ----------------
_TOKENS = r"""
    _LAMBDA: "\\" | "λ"
    VAR.2: /v[0-9]+/
    NAME: /[a-zA-Z_][a-zA-Z0-9_']*/

    %import common.WS
    %ignore WS
"""

_ARROW_TYPES = r"""
    ?type: atom_ty
         | atom_ty "->" type -> arrow
    ?atom_ty: BASE -> base
            | "(" type ")"

    BASE.2: /b[0-9]+/
"""

_EXT_TYPES = r"""
    ?type: sum_ty
         | sum_ty "->" type -> arrow
    ?sum_ty: prod_ty
           | sum_ty "+" prod_ty -> sum
    ?prod_ty: atom_ty
            | prod_ty "*" atom_ty -> prod
    ?atom_ty: BASE -> base
            | "(" type ")"

    BASE.2: /b[0-9]+/
"""

LAMBDA_GRAMMAR = r"""
    ?start: term
    ?term: app
         | lam
         | app lam -> application
    lam: _LAMBDA [NAME] "." term
    ?app: atom
        | app atom -> application
    ?atom: VAR -> index
         | NAME -> name
         | "(" term ")"
""" + _TOKENS

STLC_GRAMMAR = r"""
    ?start: term
    ?term: app
         | lam
         | app lam -> application
    lam: _LAMBDA [NAME] ":" type "." term
    ?app: atom
        | app atom -> application
    ?atom: VAR -> index
         | NAME -> name
         | "(" term ")"
""" + _ARROW_TYPES + _TOKENS

STLCEXT_GRAMMAR = r"""
    ?start: term
    ?term: app
         | lam
         | app lam -> application
    lam: _LAMBDA [NAME] ":" type "." term
    ?app: prefix
        | app prefix -> application
    ?prefix: atom
           | "fst" prefix -> fst
           | "snd" prefix -> snd
           | "inl" [annotation] prefix -> inl
           | "inr" [annotation] prefix -> inr
    annotation: "[" type "]"
    ?atom: VAR -> index
         | NAME -> name
         | "(" term ")"
         | "(" term "," term ")" -> pair
         | "case" term "of" "{" "inl" [NAME] "=>" term "|" "inr" [NAME] "=>" term "}" -> case
""" + _EXT_TYPES + _TOKENS

SKI_GRAMMAR = r"""
    ?start: term
    ?term: atom
         | term atom -> app
    ?atom: "S" -> s
         | "K" -> k
         | "(" term ")"

    %import common.WS
    %ignore WS
"""

EXPR_GRAMMAR = r"""
    ?start: sum
    ?sum: prod
        | sum "+" prod -> add
    ?prod: atom
         | prod "*" atom -> mul
    ?atom: "0" -> zero
         | "1" -> one
         | "(" sum ")"

    %import common.WS
    %ignore WS
"""

# Closed terms usable by name in untyped inputs; a binder of the same name shadows them.
PRELUDE = {
    "id": lc.Lam(Var(0)),
    "const": lc.Lam(lc.Lam(Var(1))),
    "omega": lc.OMEGA,
}


# ---------------- Tree transformers ----------------
class _Unbound(Exception):
    def __init__(self, token: Token):
        self.token = token


class ScopedTerms(Transformer):
    """Builds ``env -> term`` closures so binder names resolve after parsing.

    ``env`` lists binder names innermost first; anonymous binders are None.
    """

    def __init__(self, lam_cls, prelude=None):
        super().__init__()
        self.lam_cls = lam_cls
        self.prelude = prelude or {}

    # types
    def base(self, args):
        return stlc.Base(int(args[0][1:]))

    def arrow(self, args):
        return stlc.Arr(args[0], args[1])

    def sum(self, args):
        return ext.Sum(args[0], args[1])

    def prod(self, args):
        return ext.Prod(args[0], args[1])

    def annotation(self, args):
        return args[0]

    # terms
    def index(self, args):
        n = int(args[0][1:])
        return lambda env: Var(n)

    def name(self, args):
        token = args[0]

        def resolve(env):
            if token.value in env:
                return Var(env.index(token.value))
            if token.value in self.prelude:
                return self.prelude[token.value]
            raise _Unbound(token)

        return resolve

    def application(self, args):
        fun, arg = args
        return lambda env: App(fun(env), arg(env))

    def lam(self, args):
        if self.lam_cls is lc.Lam:
            binder, body = args
            return lambda env: lc.Lam(body((_name(binder),) + env))
        binder, dom, body = args
        return lambda env: stlc.Lam(dom, body((_name(binder),) + env))

    def pair(self, args):
        left, right = args
        return lambda env: ext.Pair(left(env), right(env))

    def fst(self, args):
        (m,) = args
        return lambda env: ext.Fst(m(env))

    def snd(self, args):
        (m,) = args
        return lambda env: ext.Snd(m(env))

    def inl(self, args):
        ann, m = args
        return lambda env: ext.Inl(ann, m(env))

    def inr(self, args):
        ann, m = args
        return lambda env: ext.Inr(ann, m(env))

    def case(self, args):
        scrut, x, br1, y, br2 = args
        return lambda env: ext.Case(scrut(env), br1((_name(x),) + env), br2((_name(y),) + env))


def _name(token: Optional[Token]) -> Optional[str]:
    return token.value if token is not None else None


class SkiTerms(Transformer):
    def s(self, _):
        return ski.S

    def k(self, _):
        return ski.K

    def app(self, args):
        return ski.CApp(args[0], args[1])


class ExprTerms(Transformer):
    def zero(self, _):
        return rs.ZERO

    def one(self, _):
        return rs.ONE

    def add(self, args):
        return rs.Add(args[0], args[1])

    def mul(self, args):
        return rs.Mul(args[0], args[1])


_GRAMMARS = {
    "lambda": (LAMBDA_GRAMMAR, lambda: ScopedTerms(lc.Lam, PRELUDE)),
    "stlc": (STLC_GRAMMAR, lambda: ScopedTerms(stlc.Lam)),
    "stlcext": (STLCEXT_GRAMMAR, lambda: ScopedTerms(stlc.Lam)),
    "ski": (SKI_GRAMMAR, SkiTerms),
    "expr": (EXPR_GRAMMAR, ExprTerms),
}


@lru_cache(maxsize=None)
def parser_for(system: str) -> Lark:
    grammar, transformer = _GRAMMARS[system]
    return Lark(grammar, parser="lalr", transformer=transformer())


# ---------------- Parsing ----------------
def _describe_terminal(parser: Lark, name: str) -> str:
    if name == "$END":
        return "end of input"
    try:
        pattern = parser.get_terminal(name).pattern
    except KeyError:
        return name
    return f'"{pattern.value}"' if isinstance(pattern, PatternStr) else name


def _from_lark(parser: Lark, text: str, e: UnexpectedInput) -> ParseError:
    expected = getattr(e, "expected", None) or getattr(e, "allowed", None) or ()
    described = frozenset(_describe_terminal(parser, n) for n in expected)
    token = getattr(e, "token", None)
    at_end = isinstance(e, UnexpectedEOF) or (token is not None and token.type == "$END")
    if at_end or e.pos_in_stream is None or e.pos_in_stream < 0:
        return ParseError("unexpected end of input", span_at(text, len(text)), described)
    start = e.pos_in_stream
    found = token.value if token is not None else text[start:start + 1]
    return ParseError(f"unexpected {found!r}", span_at(text, start, start + len(found)), described)


def parse(system: str, text: str):
    """Parse ``text`` as a term of ``system``; raises ParseError or UnknownSystem."""
    if system not in CliConfig.SYSTEMS:
        raise UnknownSystem(system)
    if system == "srs":
        return parse_word(text)

    parser = parser_for(system)
    try:
        built = parser.parse(text)
    except UnexpectedInput as e:
        raise _from_lark(parser, text, e) from None
    logger.debug(f"🔍 Parsed {len(text)} characters of {system} input")

    if not callable(built):
        return built
    try:
        return built(())
    except _Unbound as e:
        token = e.token
        raise ParseError(f"unbound name {token.value!r}",
                         span_at(text, token.start_pos, token.end_pos)) from None


def parse_word(text: str) -> str:
    word = text.strip()
    offset = text.find(word) if word else 0
    try:
        return rs.check_alphabet(word)
    except rs.AlphabetError as e:
        pos = offset + e.position
        raise ParseError(str(e), span_at(text, pos, pos + 1),
                         frozenset(f'"{ch}"' for ch in RewriteConfig.ALPHABET)) from None


def parse_type(system: str, text: str):
    """Parse a type by wrapping it in an identity abstraction."""
    term = parse(system, f"\\:{text}. v0")
    return term.dom


# ---------------- Printing ----------------
LAMBDAS = (lc.Lam, stlc.Lam)


def _operand(m) -> str:
    text = print_term(m)
    return f"({text})" if isinstance(m, LAMBDAS) else text


def print_term(m) -> str:
    """Canonical de Bruijn rendering; ``parse`` reads it back to ``m``."""
    if isinstance(m, str):
        return m
    if isinstance(m, Var):
        return f"v{m.index}"
    if isinstance(m, lc.Lam):
        return f"\\. {print_term(m.body)}"
    if isinstance(m, stlc.Lam):
        return f"\\:{m.dom}. {print_term(m.body)}"
    if isinstance(m, App):
        return f"({_operand(m.fun)} {print_term(m.arg)})"
    if isinstance(m, ext.Pair):
        return f"({print_term(m.left)}, {print_term(m.right)})"
    if isinstance(m, ext.Fst):
        return f"fst {_operand(m.m)}"
    if isinstance(m, ext.Snd):
        return f"snd {_operand(m.m)}"
    if isinstance(m, (ext.Inl, ext.Inr)):
        tag = "inl" if isinstance(m, ext.Inl) else "inr"
        ann = f"[{m.ann}]" if m.ann is not None else ""
        return f"{tag}{ann} {_operand(m.m)}"
    if isinstance(m, ext.Case):
        return (f"case {print_term(m.scrut)} of "
                f"{{ inl => {print_term(m.br1)} | inr => {print_term(m.br2)} }}")
    if isinstance(m, ski.Comb):
        return m.name
    if isinstance(m, ski.CApp):
        arg = print_term(m.arg)
        return f"{print_term(m.fun)} {f'({arg})' if isinstance(m.arg, ski.CApp) else arg}"
    if isinstance(m, rs.Zero):
        return "0"
    if isinstance(m, rs.One):
        return "1"
    if isinstance(m, rs.Add):
        return f"({print_term(m.left)} + {print_term(m.right)})"
    if isinstance(m, rs.Mul):
        return f"({print_term(m.left)} * {print_term(m.right)})"
    raise TypeError(f"cannot print {type(m).__name__}")
