# lambda_calculus.py
"""Untyped lambda calculus with de Bruijn indices."""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import FrozenSet, Iterator, Tuple, Union

import ars
from ars import FuelExhausted, NormalForm, Outcome, Rel, sort_states
from constants import ArsConfig

logger = logging.getLogger(__name__)


# ---------------- Terms ----------------
@dataclass(frozen=True)
class Var:
    index: int
    size: int = field(default=1, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"de Bruijn index must be a natural number, got {self.index}")


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.fun.size + self.arg.size)


@dataclass(frozen=True)
class Lam:
    body: "Term"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.body.size)


Term = Union[Var, App, Lam]

OMEGA_HALF = Lam(App(Var(0), Var(0)))
OMEGA = App(OMEGA_HALF, OMEGA_HALF)


def free_indices(m: Term, depth: int = 0) -> FrozenSet[int]:
    """Free indices of ``m``, measured from outside all its binders."""
    if isinstance(m, Var):
        return frozenset({m.index - depth}) if m.index >= depth else frozenset()
    if isinstance(m, App):
        return free_indices(m.fun, depth) | free_indices(m.arg, depth)
    return free_indices(m.body, depth + 1)


def is_closed(m: Term) -> bool:
    return not free_indices(m)


# ---------------- Shifting and substitution ----------------
def shift(d: int, c: int, m: Term) -> Term:
    """Add ``d`` to every index at or above the cutoff ``c``."""
    if d < 0:
        raise ValueError("shift amount must be a natural number")
    if d == 0:
        return m
    if isinstance(m, Var):
        return m if m.index < c else Var(m.index + d)
    if isinstance(m, App):
        return App(shift(d, c, m.fun), shift(d, c, m.arg))
    return Lam(shift(d, c + 1, m.body))


def subst(k: int, n: Term, m: Term) -> Term:
    """Replace index ``k`` in ``m`` by ``n``, lowering the indices above it.

    The argument is shifted once per binder crossed and returned as-is at
    the leaf.
    """
    if isinstance(m, Var):
        if m.index < k:
            return m
        if m.index == k:
            return n
        return Var(m.index - 1)
    if isinstance(m, App):
        return App(subst(k, n, m.fun), subst(k, n, m.arg))
    return Lam(subst(k + 1, shift(1, 0, n), m.body))


def double_shift_subst(k: int, n: Term, m: Term) -> Term:
    """Substitution that shifts at each binder AND by ``k`` at the leaf.

    Counts crossed binders twice; ``(\\.\\.v1) N`` captures. Only used to
    check that the de Bruijn suite notices the difference.
    """
    if isinstance(m, Var):
        if m.index < k:
            return m
        if m.index == k:
            return shift(k, 0, n)
        return Var(m.index - 1)
    if isinstance(m, App):
        return App(double_shift_subst(k, n, m.fun), double_shift_subst(k, n, m.arg))
    return Lam(double_shift_subst(k + 1, shift(1, 0, n), m.body))


def beta(body: Term, arg: Term) -> Term:
    return subst(0, arg, body)


def is_redex(m: Term) -> bool:
    return isinstance(m, App) and isinstance(m.fun, Lam)


# ---------------- One-step beta ----------------
def steps(m: Term, innermost: bool = False) -> Iterator[Tuple[str, Term]]:
    """Single beta steps labelled by the contracted rule, in strategy order.

    Outermost order lists the root redex before redexes inside it; innermost
    order lists it after. Both are left to right.
    """
    if isinstance(m, Var):
        return
    if isinstance(m, Lam):
        for rule, body in steps(m.body, innermost):
            yield rule, Lam(body)
        return
    if is_redex(m) and not innermost:
        yield "Beta", beta(m.fun.body, m.arg)
    for rule, fun in steps(m.fun, innermost):
        yield rule, App(fun, m.arg)
    for rule, arg in steps(m.arg, innermost):
        yield rule, App(m.fun, arg)
    if is_redex(m) and innermost:
        yield "Beta", beta(m.fun.body, m.arg)


def beta_reducts(m: Term) -> FrozenSet[Term]:
    """Every term obtained by contracting exactly one redex of ``m``."""
    return frozenset(t for _, t in steps(m))


BETA: Rel[Term] = Rel(steps, "beta")


# ---------------- Parallel reduction ----------------
@lru_cache(maxsize=1 << 16)
def parallel_reducts(m: Term) -> FrozenSet[Term]:
    """All N with M => N (contract any subset of the redexes of M at once)."""
    if isinstance(m, Var):
        return frozenset({m})
    if isinstance(m, Lam):
        return frozenset(Lam(b) for b in parallel_reducts(m.body))
    funs = parallel_reducts(m.fun)
    args = parallel_reducts(m.arg)
    out = {App(f, a) for f in funs for a in args}
    if isinstance(m.fun, Lam):
        for b in parallel_reducts(m.fun.body):
            for a in args:
                out.add(subst(0, a, b))
    return frozenset(out)


PARALLEL: Rel[Term] = Rel.from_successors(parallel_reducts, "par")


@lru_cache(maxsize=1 << 16)
def complete_development(m: Term) -> Term:
    """M*: contract every redex of M."""
    if isinstance(m, Var):
        return m
    if isinstance(m, Lam):
        return Lam(complete_development(m.body))
    if isinstance(m.fun, Lam):
        return subst(0, complete_development(m.arg), complete_development(m.fun.body))
    return App(complete_development(m.fun), complete_development(m.arg))


@dataclass(frozen=True)
class TakahashiReport:
    term: Term
    development: Term
    checked: int
    violations: Tuple[Term, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def takahashi_check(m: Term) -> TakahashiReport:
    """Check M => N implies N => M* for every parallel reduct N of M."""
    star = complete_development(m)
    reducts = sort_states(parallel_reducts(m))
    violations = tuple(n for n in reducts if star not in parallel_reducts(n))
    if violations:
        logger.info(f"❌ Takahashi property fails for {m!r}: {len(violations)} reducts")
    return TakahashiReport(m, star, len(reducts), violations)


# ---------------- Normalization ----------------
def reduction_sequence(m: Term, strategy: str = "normal-order",
                       fuel: int = ArsConfig.FUEL) -> Iterator[Tuple[str, Term]]:
    return ars.reduction_sequence(steps, m, strategy, fuel)


def normalize(m: Term, strategy: str = "normal-order", fuel: int = ArsConfig.FUEL) -> Outcome:
    """Leftmost-outermost (normal-order) or leftmost-innermost (applicative-order)
    reduction until no redex is left or the fuel runs out."""
    return ars.normalize(steps, m, strategy, fuel)
