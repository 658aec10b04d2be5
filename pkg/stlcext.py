# stlcext.py
"""STLC extended with products and sums.

Terms reuse ``Var``/``App`` from the untyped calculus and the annotated
``Lam`` from stlc. Both case branches bind one extra variable at index 0.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterator, Optional, Tuple, Union

import ars
import lambda_calculus as lc
from ars import Outcome, Rel, sort_states, star_reachable
from constants import ArsConfig
from lambda_calculus import App, Var
from stlc import (
    EMPTY, ArgMismatch, Arr, Base, Context, Lam, NotAFunction, NotInSystem, PreservationReport,
    SNVerdict, TypingError, UnboundVariable, check_preservation, show_operand, sn_certificate,
)

logger = logging.getLogger(__name__)

SUM_PREC = 2
PROD_PREC = 3


# ---------------- Types ----------------
@dataclass(frozen=True)
class Prod:
    PREC = PROD_PREC
    left: "ETy"
    right: "ETy"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.left.size + self.right.size)

    def __str__(self) -> str:
        return f"{show_operand(self.left, PROD_PREC)} * {show_operand(self.right, PROD_PREC)}"


@dataclass(frozen=True)
class Sum:
    PREC = SUM_PREC
    left: "ETy"
    right: "ETy"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.left.size + self.right.size)

    def __str__(self) -> str:
        return f"{show_operand(self.left, SUM_PREC)} + {show_operand(self.right, SUM_PREC)}"


ETy = Union[Base, Arr, Prod, Sum]


# ---------------- Terms ----------------
@dataclass(frozen=True)
class Pair:
    left: "ETerm"
    right: "ETerm"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.left.size + self.right.size)


@dataclass(frozen=True)
class Fst:
    m: "ETerm"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.m.size)


@dataclass(frozen=True)
class Snd:
    m: "ETerm"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.m.size)


@dataclass(frozen=True)
class Inl:
    # the full target sum type; None only on erased terms
    ann: Optional[ETy]
    m: "ETerm"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.m.size)


@dataclass(frozen=True)
class Inr:
    ann: Optional[ETy]
    m: "ETerm"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.m.size)


@dataclass(frozen=True)
class Case:
    scrut: "ETerm"
    br1: "ETerm"
    br2: "ETerm"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.scrut.size + self.br1.size + self.br2.size)


ETerm = Union[Var, App, Lam, Pair, Fst, Snd, Inl, Inr, Case]
LAMBDAS = (Lam, lc.Lam)


class StepRule(str, Enum):
    BETA = "Beta"
    FST_PAIR = "FstPair"
    SND_PAIR = "SndPair"
    CASE_INL = "CaseInl"
    CASE_INR = "CaseInr"
    APP_L = "AppL"
    APP_R = "AppR"
    LAM = "Lam"
    PAIR_L = "PairL"
    PAIR_R = "PairR"
    FST = "Fst"
    SND = "Snd"
    INL = "Inl"
    INR = "Inr"
    CASE_M = "CaseM"
    CASE_N1 = "CaseN1"
    CASE_N2 = "CaseN2"

    def __str__(self) -> str:
        return self.value


COMPUTATIONAL = frozenset({
    StepRule.BETA, StepRule.FST_PAIR, StepRule.SND_PAIR, StepRule.CASE_INL, StepRule.CASE_INR,
})
CONGRUENCE = frozenset(StepRule) - COMPUTATIONAL


def _rebind(lam, body):
    return Lam(lam.dom, body) if isinstance(lam, Lam) else lc.Lam(body)


# ---------------- Shifting and substitution ----------------
def eshift(d: int, c: int, m: ETerm) -> ETerm:
    if d < 0:
        raise ValueError("shift amount must be a natural number")
    if d == 0:
        return m
    if isinstance(m, Var):
        return m if m.index < c else Var(m.index + d)
    if isinstance(m, LAMBDAS):
        return _rebind(m, eshift(d, c + 1, m.body))
    if isinstance(m, App):
        return App(eshift(d, c, m.fun), eshift(d, c, m.arg))
    if isinstance(m, Pair):
        return Pair(eshift(d, c, m.left), eshift(d, c, m.right))
    if isinstance(m, (Fst, Snd)):
        return type(m)(eshift(d, c, m.m))
    if isinstance(m, (Inl, Inr)):
        return type(m)(m.ann, eshift(d, c, m.m))
    return Case(eshift(d, c, m.scrut), eshift(d, c + 1, m.br1), eshift(d, c + 1, m.br2))


def esubst(k: int, n: ETerm, m: ETerm) -> ETerm:
    """Binder-crossing substitution; each case branch counts as one binder."""
    if isinstance(m, Var):
        if m.index < k:
            return m
        if m.index == k:
            return n
        return Var(m.index - 1)
    if isinstance(m, LAMBDAS):
        return _rebind(m, esubst(k + 1, eshift(1, 0, n), m.body))
    if isinstance(m, App):
        return App(esubst(k, n, m.fun), esubst(k, n, m.arg))
    if isinstance(m, Pair):
        return Pair(esubst(k, n, m.left), esubst(k, n, m.right))
    if isinstance(m, (Fst, Snd)):
        return type(m)(esubst(k, n, m.m))
    if isinstance(m, (Inl, Inr)):
        return type(m)(m.ann, esubst(k, n, m.m))
    lifted = eshift(1, 0, n)
    return Case(esubst(k, n, m.scrut), esubst(k + 1, lifted, m.br1), esubst(k + 1, lifted, m.br2))


# ---------------- Reduction ----------------
def _contract(m: ETerm) -> Optional[Tuple[StepRule, ETerm]]:
    """The computational rule firing at the root of ``m``, if any."""
    if isinstance(m, App) and isinstance(m.fun, LAMBDAS):
        return StepRule.BETA, esubst(0, m.arg, m.fun.body)
    if isinstance(m, Fst) and isinstance(m.m, Pair):
        return StepRule.FST_PAIR, m.m.left
    if isinstance(m, Snd) and isinstance(m.m, Pair):
        return StepRule.SND_PAIR, m.m.right
    if isinstance(m, Case) and isinstance(m.scrut, Inl):
        return StepRule.CASE_INL, esubst(0, m.scrut.m, m.br1)
    if isinstance(m, Case) and isinstance(m.scrut, Inr):
        return StepRule.CASE_INR, esubst(0, m.scrut.m, m.br2)
    return None


def _congruences(m: ETerm, innermost: bool) -> Iterator[Tuple[StepRule, StepRule, ETerm]]:
    def inner(t):
        return ((fired, r) for _, fired, r in _derivations(t, innermost))

    if isinstance(m, LAMBDAS):
        for fired, body in inner(m.body):
            yield StepRule.LAM, fired, _rebind(m, body)
    elif isinstance(m, App):
        for fired, fun in inner(m.fun):
            yield StepRule.APP_L, fired, App(fun, m.arg)
        for fired, arg in inner(m.arg):
            yield StepRule.APP_R, fired, App(m.fun, arg)
    elif isinstance(m, Pair):
        for fired, left in inner(m.left):
            yield StepRule.PAIR_L, fired, Pair(left, m.right)
        for fired, right in inner(m.right):
            yield StepRule.PAIR_R, fired, Pair(m.left, right)
    elif isinstance(m, Fst):
        for fired, t in inner(m.m):
            yield StepRule.FST, fired, Fst(t)
    elif isinstance(m, Snd):
        for fired, t in inner(m.m):
            yield StepRule.SND, fired, Snd(t)
    elif isinstance(m, Inl):
        for fired, t in inner(m.m):
            yield StepRule.INL, fired, Inl(m.ann, t)
    elif isinstance(m, Inr):
        for fired, t in inner(m.m):
            yield StepRule.INR, fired, Inr(m.ann, t)
    elif isinstance(m, Case):
        for fired, t in inner(m.scrut):
            yield StepRule.CASE_M, fired, Case(t, m.br1, m.br2)
        for fired, t in inner(m.br1):
            yield StepRule.CASE_N1, fired, Case(m.scrut, t, m.br2)
        for fired, t in inner(m.br2):
            yield StepRule.CASE_N2, fired, Case(m.scrut, m.br1, t)


def _derivations(m: ETerm, innermost: bool) -> Iterator[Tuple[StepRule, StepRule, ETerm]]:
    """(last rule, contracted rule, reduct) for every single step, in strategy order."""
    root = _contract(m)
    if root is not None and not innermost:
        yield root[0], root[0], root[1]
    yield from _congruences(m, innermost)
    if root is not None and innermost:
        yield root[0], root[0], root[1]


def ext_steps(m: ETerm, innermost: bool = False) -> Iterator[Tuple[StepRule, ETerm]]:
    """Single steps labelled by the last rule of their derivation, in strategy order."""
    return ((last, t) for last, _, t in _derivations(m, innermost))


def ext_labelled_steps(m: ETerm, innermost: bool = False) -> Iterator[Tuple[str, ETerm]]:
    """Single steps labelled by the computational rule they contract, as traces print them."""
    return ((fired.value, t) for _, fired, t in _derivations(m, innermost))


def ext_reducts(m: ETerm) -> FrozenSet[Tuple[StepRule, ETerm]]:
    return frozenset(ext_steps(m))


EXT: Rel[ETerm] = Rel(ext_labelled_steps, "ext")


def normalize(m: ETerm, strategy: str = "normal-order", fuel: int = ArsConfig.FUEL) -> Outcome:
    return ars.normalize(ext_labelled_steps, m, strategy, fuel)


# ---------------- Typing ----------------
class NotAProduct(TypingError):
    def __init__(self, actual):
        self.actual = actual
        super().__init__(f"expected a product, found type {actual}")


class NotASum(TypingError):
    def __init__(self, actual):
        self.actual = actual
        super().__init__(f"expected a sum, found type {actual}")


class BadInjectionAnnotation(TypingError):
    def __init__(self, ann, payload=None):
        self.ann = ann
        self.payload = payload
        if payload is None:
            super().__init__(f"injection annotation {ann} is not a sum type")
        else:
            super().__init__(f"payload of type {payload} does not fit annotation {ann}")


class BranchTypeMismatch(TypingError):
    def __init__(self, left, right):
        self.left = left
        self.right = right
        super().__init__(f"case branches disagree: {left} vs {right}")


def ext_infer(ctx: Context, m: ETerm) -> ETy:
    if isinstance(m, Var):
        ty = ctx.lookup(m.index)
        if ty is None:
            raise UnboundVariable(m.index)
        return ty
    if isinstance(m, Lam):
        return Arr(m.dom, ext_infer(ctx.extend(m.dom), m.body))
    if isinstance(m, App):
        fun_ty = ext_infer(ctx, m.fun)
        if not isinstance(fun_ty, Arr):
            raise NotAFunction(fun_ty)
        arg_ty = ext_infer(ctx, m.arg)
        if arg_ty != fun_ty.dom:
            raise ArgMismatch(fun_ty.dom, arg_ty)
        return fun_ty.cod
    if isinstance(m, Pair):
        return Prod(ext_infer(ctx, m.left), ext_infer(ctx, m.right))
    if isinstance(m, (Fst, Snd)):
        ty = ext_infer(ctx, m.m)
        if not isinstance(ty, Prod):
            raise NotAProduct(ty)
        return ty.left if isinstance(m, Fst) else ty.right
    if isinstance(m, (Inl, Inr)):
        if not isinstance(m.ann, Sum):
            raise BadInjectionAnnotation(m.ann)
        payload = ext_infer(ctx, m.m)
        expected = m.ann.left if isinstance(m, Inl) else m.ann.right
        if payload != expected:
            raise BadInjectionAnnotation(m.ann, payload)
        return m.ann
    if isinstance(m, Case):
        ty = ext_infer(ctx, m.scrut)
        if not isinstance(ty, Sum):
            raise NotASum(ty)
        c1 = ext_infer(ctx.extend(ty.left), m.br1)
        c2 = ext_infer(ctx.extend(ty.right), m.br2)
        if c1 != c2:
            raise BranchTypeMismatch(c1, c2)
        return c1
    raise NotInSystem(m, "stlcext")


def ext_type_of(ctx: Context, m: ETerm) -> Optional[ETy]:
    try:
        return ext_infer(ctx, m)
    except TypingError:
        return None


def erase(m: ETerm) -> ETerm:
    """Drop binder domains and injection annotations."""
    if isinstance(m, Var):
        return m
    if isinstance(m, LAMBDAS):
        return lc.Lam(erase(m.body))
    if isinstance(m, App):
        return App(erase(m.fun), erase(m.arg))
    if isinstance(m, Pair):
        return Pair(erase(m.left), erase(m.right))
    if isinstance(m, (Fst, Snd)):
        return type(m)(erase(m.m))
    if isinstance(m, (Inl, Inr)):
        return type(m)(None, erase(m.m))
    return Case(erase(m.scrut), erase(m.br1), erase(m.br2))


# ---------------- Values and neutral terms ----------------
def is_value(m: ETerm) -> bool:
    if isinstance(m, LAMBDAS):
        return True
    if isinstance(m, Pair):
        return is_value(m.left) and is_value(m.right)
    if isinstance(m, (Inl, Inr)):
        return is_value(m.m)
    return False


def is_neutral(m: ETerm) -> bool:
    if isinstance(m, Var):
        return True
    if isinstance(m, App):
        return not isinstance(m.fun, LAMBDAS)
    if isinstance(m, (Fst, Snd)):
        return not isinstance(m.m, Pair)
    if isinstance(m, Case):
        return not isinstance(m.scrut, (Inl, Inr))
    return False


def wrapper_neutral(m: ETerm, n1: ETerm, n2: ETerm, p: ETerm) -> bool:
    """A stuck-or-not case wrapped in an eliminator is never a redex former."""
    case = Case(m, n1, n2)
    return is_neutral(App(case, p)) and is_neutral(Fst(case)) and is_neutral(Snd(case))


# ---------------- Progress ----------------
@dataclass(frozen=True)
class IsValue:
    term: ETerm


@dataclass(frozen=True)
class Steps:
    rule: StepRule
    witness: ETerm


@dataclass(frozen=True)
class Violation:
    term: ETerm
    ty: ETy


ProgressVerdict = Union[IsValue, Steps, Violation]


def progress_check(m: ETerm) -> ProgressVerdict:
    """Values or terms with a reduct; raises the TypingError when ``m`` is not
    closed and well typed."""
    ty = ext_infer(EMPTY, m)
    if is_value(m):
        return IsValue(m)
    step = next(ext_steps(m), None)
    if step is not None:
        return Steps(*step)
    logger.error(f"❌ Progress violation: {m!r} : {ty} is stuck")
    return Violation(m, ty)


# ---------------- Metatheory checks ----------------
def ext_subject_reduction_check(ctx: Context, m: ETerm,
                                depth: int = ArsConfig.DEPTH_BOUND) -> PreservationReport:
    return check_preservation(ext_infer, EXT, ctx, m, depth)


def ext_sn_certificate(m: ETerm, node_cap: int = ArsConfig.NODE_CAP) -> SNVerdict:
    return sn_certificate(m, node_cap, EXT)


def rule_preserves_type(ctx: Context, m: ETerm, rule: StepRule) -> Optional[bool]:
    """None when ``rule`` does not apply to ``m``; otherwise whether every
    reduct by ``rule`` keeps the type of ``m``."""
    ty = ext_infer(ctx, m)
    reducts = [t for r, t in ext_steps(m) if r == rule]
    if not reducts:
        return None
    return all(ext_type_of(ctx, t) == ty for t in reducts)


def _injections(graph) -> FrozenSet[ETerm]:
    return frozenset(n for n in graph.nodes if isinstance(n, (Inl, Inr)))


def check_scrutinee_tracking(case: Case, node_cap: int = ArsConfig.NODE_CAP) -> Optional[bool]:
    """Every injection reached from ``case`` comes through an injection
    reached by its scrutinee, followed by the matching branch.

    Returns None when either reduction graph exceeds ``node_cap``.
    """
    outer = star_reachable(EXT, case, node_cap)
    targets = _injections(outer)
    if not targets:
        return True if outer.complete else None
    scrut = star_reachable(EXT, case.scrut, node_cap)
    if not (outer.complete and scrut.complete):
        return None

    explained = set()
    for inj in sort_states(_injections(scrut)):
        branch = case.br1 if isinstance(inj, Inl) else case.br2
        contractum = star_reachable(EXT, esubst(0, inj.m, branch), node_cap)
        if not contractum.complete:
            return None
        explained |= _injections(contractum)
    missing = targets - explained
    if missing:
        logger.info(f"❌ Scrutinee tracking fails for {case!r}: {len(missing)} injections unexplained")
    return not missing
