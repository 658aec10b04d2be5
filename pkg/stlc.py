# stlc.py
"""Simply typed lambda calculus with domain-annotated binders."""
import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterator, Optional, Tuple, Union

import ars
import lambda_calculus as lc
from ars import Outcome, ReductionGraph, Rel, find_cycle, reachable_within, sort_states, star_reachable
from constants import ArsConfig
from error_handler import InputError
from lambda_calculus import App, Var

logger = logging.getLogger(__name__)


# ---------------- Types ----------------
# precedence levels for printing types; stlcext adds sums and products
ARROW_PREC = 1
ATOM_PREC = 4


@dataclass(frozen=True)
class Base:
    n: int
    PREC = ATOM_PREC
    size: int = field(default=1, init=False, repr=False, compare=False)

    def __str__(self) -> str:
        return f"b{self.n}"


@dataclass(frozen=True)
class Arr:
    PREC = ARROW_PREC
    dom: "Ty"
    cod: "Ty"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.dom.size + self.cod.size)

    def __str__(self) -> str:
        return f"{show_operand(self.dom, ARROW_PREC)} -> {self.cod}"


Ty = Union[Base, Arr]


def show_operand(ty, level: int) -> str:
    """Parenthesize ``ty`` when it binds no tighter than ``level``."""
    text = str(ty)
    return f"({text})" if ty.PREC <= level else text


# ---------------- Contexts ----------------
@dataclass(frozen=True)
class Context:
    """Typing environment; position 0 is the most recent binder."""

    types: Tuple = ()

    def lookup(self, n: int):
        return self.types[n] if 0 <= n < len(self.types) else None

    def extend(self, ty) -> "Context":
        return Context((ty,) + self.types)

    def __len__(self) -> int:
        return len(self.types)


EMPTY = Context()


# ---------------- Terms ----------------
@dataclass(frozen=True)
class Lam:
    dom: Ty
    body: "TTerm"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.body.size)


TTerm = Union[Var, App, Lam]


# ---------------- Typing errors ----------------
class TypingError(InputError):
    """A term has no type in the given context."""


class UnboundVariable(TypingError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"unbound variable v{index}")


class NotAFunction(TypingError):
    def __init__(self, actual):
        self.actual = actual
        super().__init__(f"expected a function, found type {actual}")


class ArgMismatch(TypingError):
    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"argument has type {actual}, expected {expected}")


class NotInSystem(TypingError):
    def __init__(self, term, system: str):
        self.term = term
        super().__init__(f"{type(term).__name__} is not a {system} term")


def infer(ctx: Context, m: TTerm) -> Ty:
    """Syntax-directed type synthesis; raises a TypingError subclass."""
    if isinstance(m, Var):
        ty = ctx.lookup(m.index)
        if ty is None:
            raise UnboundVariable(m.index)
        return ty
    if isinstance(m, Lam):
        return Arr(m.dom, infer(ctx.extend(m.dom), m.body))
    if isinstance(m, App):
        fun_ty = infer(ctx, m.fun)
        if not isinstance(fun_ty, Arr):
            raise NotAFunction(fun_ty)
        arg_ty = infer(ctx, m.arg)
        if arg_ty != fun_ty.dom:
            raise ArgMismatch(fun_ty.dom, arg_ty)
        return fun_ty.cod
    raise NotInSystem(m, "stlc")


def type_of(ctx: Context, m: TTerm) -> Optional[Ty]:
    try:
        return infer(ctx, m)
    except TypingError:
        return None


# ---------------- Shifting and substitution ----------------
def tshift(d: int, c: int, m: TTerm) -> TTerm:
    if d == 0:
        return m
    if isinstance(m, Var):
        return m if m.index < c else Var(m.index + d)
    if isinstance(m, App):
        return App(tshift(d, c, m.fun), tshift(d, c, m.arg))
    return Lam(m.dom, tshift(d, c + 1, m.body))


def tsubst(k: int, n: TTerm, m: TTerm) -> TTerm:
    """Annotation-preserving lift of the untyped substitution."""
    if isinstance(m, Var):
        if m.index < k:
            return m
        if m.index == k:
            return n
        return Var(m.index - 1)
    if isinstance(m, App):
        return App(tsubst(k, n, m.fun), tsubst(k, n, m.arg))
    return Lam(m.dom, tsubst(k + 1, tshift(1, 0, n), m.body))


def erase(m: TTerm) -> lc.Term:
    if isinstance(m, Var):
        return m
    if isinstance(m, App):
        return App(erase(m.fun), erase(m.arg))
    return lc.Lam(erase(m.body))


# ---------------- Reduction ----------------
def typed_steps(m: TTerm, innermost: bool = False) -> Iterator[Tuple[str, TTerm]]:
    if isinstance(m, Var):
        return
    if isinstance(m, Lam):
        for rule, body in typed_steps(m.body, innermost):
            yield rule, Lam(m.dom, body)
        return
    redex = isinstance(m.fun, Lam)
    if redex and not innermost:
        yield "Beta", tsubst(0, m.arg, m.fun.body)
    for rule, fun in typed_steps(m.fun, innermost):
        yield rule, App(fun, m.arg)
    for rule, arg in typed_steps(m.arg, innermost):
        yield rule, App(m.fun, arg)
    if redex and innermost:
        yield "Beta", tsubst(0, m.arg, m.fun.body)


def typed_step_reducts(m: TTerm) -> FrozenSet[TTerm]:
    return frozenset(t for _, t in typed_steps(m))


TYPED: Rel[TTerm] = Rel(typed_steps, "beta")


def normalize(m: TTerm, strategy: str = "normal-order", fuel: int = ArsConfig.FUEL) -> Outcome:
    return ars.normalize(typed_steps, m, strategy, fuel)


def is_neutral(m: TTerm) -> bool:
    """Not a redex former: a variable or an application whose head is no lambda."""
    if isinstance(m, Var):
        return True
    if isinstance(m, App):
        return not isinstance(m.fun, (Lam, lc.Lam))
    return False


# ---------------- Metatheory checks ----------------
@dataclass(frozen=True)
class PreservationReport:
    ty: Ty
    checked: int
    # (reduct, type found or None when the reduct no longer types)
    violations: Tuple[Tuple[TTerm, Optional[Ty]], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_preservation(infer_fn, rel: Rel, ctx, m, depth: int) -> PreservationReport:
    """Every reduct of ``m`` within ``depth`` steps re-infers the type of ``m``."""
    ty = infer_fn(ctx, m)
    reached = reachable_within(rel.successors, m, depth)
    violations = []
    for n in sort_states(reached):
        if n == m:
            continue
        try:
            found = infer_fn(ctx, n)
        except TypingError:
            found = None
        if found != ty:
            violations.append((n, found))
    if violations:
        logger.info(f"❌ Subject reduction fails for {m!r}: {len(violations)} reducts")
    return PreservationReport(ty, len(reached) - 1, tuple(violations))


def subject_reduction_check(ctx: Context, m: TTerm,
                            depth: int = ArsConfig.DEPTH_BOUND) -> PreservationReport:
    return check_preservation(infer, TYPED, ctx, m, depth)


@dataclass(frozen=True)
class SN:
    graph: ReductionGraph


@dataclass(frozen=True)
class CycleFound:
    path: Tuple


@dataclass(frozen=True)
class CapExhausted:
    graph: ReductionGraph


SNVerdict = Union[SN, CycleFound, CapExhausted]


def sn_certificate(m, node_cap: int = ArsConfig.NODE_CAP, rel: Rel = TYPED) -> SNVerdict:
    """SN iff the reduction graph is finite and acyclic.

    ``rel`` defaults to typed beta; pass an untyped relation to run the same
    harness on erased terms.
    """
    graph = star_reachable(rel, m, node_cap)
    cycle = find_cycle(graph)
    if cycle is not None:
        return CycleFound(cycle)
    if not graph.complete:
        return CapExhausted(graph)
    return SN(graph)
