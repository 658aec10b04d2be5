# rewrite_systems.py
"""The two terminating case studies: unit/annihilator arithmetic and the
idempotency string rewriting system, plus critical pairs for string rules."""
import logging
from dataclasses import dataclass, field
from itertools import groupby, product
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from ars import JoinWitness, Rel, joinable
from constants import RewriteConfig
from error_handler import InputError

logger = logging.getLogger(__name__)


# ---------------- Arithmetic expressions ----------------
@dataclass(frozen=True)
class Zero:
    size: int = field(default=1, init=False, repr=False, compare=False)


@dataclass(frozen=True)
class One:
    size: int = field(default=1, init=False, repr=False, compare=False)


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.left.size + self.right.size)


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.left.size + self.right.size)


Expr = Union[Zero, One, Add, Mul]

ZERO = Zero()
ONE = One()

# One admissible unit/annihilator rule set; every rule shrinks the expression.
EXPR_RULES = ["ZeroAdd", "AddZero", "OneMul", "MulOne", "ZeroMul", "MulZero"]


def expr_size(e: Expr) -> int:
    return e.size


def root_contractions(e: Expr) -> List[Tuple[str, Expr]]:
    """Every rule of the fixed set that fires at the root of ``e``."""
    out = []
    if isinstance(e, Add):
        if e.left == ZERO:
            out.append(("ZeroAdd", e.right))  # 0 + e -> e
        if e.right == ZERO:
            out.append(("AddZero", e.left))  # e + 0 -> e
    elif isinstance(e, Mul):
        if e.left == ONE:
            out.append(("OneMul", e.right))  # 1 * e -> e
        if e.right == ONE:
            out.append(("MulOne", e.left))  # e * 1 -> e
        if e.left == ZERO:
            out.append(("ZeroMul", ZERO))  # 0 * e -> 0
        if e.right == ZERO:
            out.append(("MulZero", ZERO))  # e * 0 -> 0
    return out


def expr_steps(e: Expr, innermost: bool = False) -> Iterator[Tuple[str, Expr]]:
    if isinstance(e, (Zero, One)):
        return
    root = root_contractions(e)
    if not innermost:
        yield from root
    for rule, left in expr_steps(e.left, innermost):
        yield rule, type(e)(left, e.right)
    for rule, right in expr_steps(e.right, innermost):
        yield rule, type(e)(e.left, right)
    if innermost:
        yield from root


def expr_reducts(e: Expr) -> FrozenSet[Expr]:
    return frozenset(t for _, t in expr_steps(e))


EXPR: Rel[Expr] = Rel(expr_steps, "arith")


@dataclass(frozen=True)
class ExprOverlap:
    source: Expr
    rules: Tuple[str, ...]
    reducts: Tuple[Expr, ...]
    joinable: bool


def expr_root_overlaps(depth_bound: int = RewriteConfig.CRITICAL_PAIR_DEPTH) -> List[ExprOverlap]:
    """Root overlaps of the rule set. Every rule fixes one side to a constant,
    so two rules overlap exactly on operators whose sides are both constants."""
    overlaps = []
    for op, left, right in product((Add, Mul), (ZERO, ONE), (ZERO, ONE)):
        source = op(left, right)
        fired = root_contractions(source)
        if len(fired) < 2:
            continue
        reducts = tuple(t for _, t in fired)
        joined = all(joinable(EXPR, b, c, depth_bound) is not None
                     for i, b in enumerate(reducts) for c in reducts[i + 1:])
        overlaps.append(ExprOverlap(source, tuple(r for r, _ in fired), reducts, joined))
    return overlaps


def all_exprs(max_size: int) -> List[Expr]:
    """Every expression with at most ``max_size`` nodes, smallest first."""
    by_size = {1: [ZERO, ONE]}
    for n in range(2, max_size + 1):
        level = []
        for i in range(1, n - 1):
            for left in by_size.get(i, []):
                for right in by_size.get(n - 1 - i, []):
                    level.append(Add(left, right))
                    level.append(Mul(left, right))
        by_size[n] = level
    return [e for n in range(1, max_size + 1) for e in by_size.get(n, [])]


# ---------------- String rewriting ----------------
class AlphabetError(InputError):
    def __init__(self, word: str, position: int, alphabet: str = RewriteConfig.ALPHABET):
        self.word = word
        self.position = position
        super().__init__(f"symbol {word[position]!r} at position {position} is outside the alphabet {{{','.join(alphabet)}}}")


def check_alphabet(w: str, alphabet: str = RewriteConfig.ALPHABET) -> str:
    for i, ch in enumerate(w):
        if ch not in alphabet:
            raise AlphabetError(w, i, alphabet)
    return w


@dataclass(frozen=True)
class StrRule:
    lhs: str
    rhs: str

    def __post_init__(self):
        check_alphabet(self.lhs)
        check_alphabet(self.rhs)
        if not self.lhs:
            raise InputError("rule left-hand side must be non-empty")
        if len(self.rhs) >= len(self.lhs):
            raise InputError(f"rule {self.lhs} -> {self.rhs} is not length-decreasing")

    @property
    def name(self) -> str:
        return f"{self.lhs}->{self.rhs}"

    def __str__(self) -> str:
        return f"{self.lhs} -> {self.rhs}"


IDEMPOTENCY: Tuple[StrRule, ...] = tuple(StrRule(l, r) for l, r in RewriteConfig.IDEMPOTENCY_RULES)
RULE_AA, RULE_BB = IDEMPOTENCY


def str_len(w: str) -> int:
    return len(w)


def srs_steps(w: str, rules: Sequence[StrRule] = IDEMPOTENCY) -> Iterator[Tuple[str, str]]:
    """Single rule applications, leftmost position first."""
    check_alphabet(w)
    for i in range(len(w)):
        for rule in rules:
            if w.startswith(rule.lhs, i):
                yield rule.name, w[:i] + rule.rhs + w[i + len(rule.lhs):]


def srs_reducts(w: str, rules: Sequence[StrRule] = IDEMPOTENCY) -> FrozenSet[str]:
    return frozenset(t for _, t in srs_steps(w, rules))


def srs_rel(rules: Sequence[StrRule] = IDEMPOTENCY) -> Rel[str]:
    rules = tuple(rules)
    return Rel(lambda w: srs_steps(w, rules), " ".join(r.name for r in rules))


SRS: Rel[str] = srs_rel(IDEMPOTENCY)
SRS_AA: Rel[str] = srs_rel((RULE_AA,))
SRS_BB: Rel[str] = srs_rel((RULE_BB,))


def collapse_runs(w: str) -> str:
    """Independent oracle: collapse each maximal run of a letter to one letter."""
    return "".join(ch for ch, _ in groupby(w))


def all_strings(max_len: int, alphabet: str = RewriteConfig.ALPHABET) -> List[str]:
    return ["".join(p) for n in range(max_len + 1) for p in product(alphabet, repeat=n)]


def parse_rules(text: str) -> Tuple[StrRule, ...]:
    """Rule file: one ``lhs -> rhs`` per line; blank lines and ``#`` comments skipped."""
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.count("->") != 1:
            raise InputError(f"line {lineno}: expected 'lhs -> rhs', got {raw.strip()!r}")
        lhs, rhs = (part.strip() for part in line.split("->"))
        try:
            rules.append(StrRule(lhs, rhs))
        except InputError as e:
            raise InputError(f"line {lineno}: {e}") from e
    if not rules:
        raise InputError("rule file contains no rules")
    return tuple(rules)


# ---------------- Critical pairs ----------------
@dataclass(frozen=True)
class CriticalPair:
    source: str
    left: str
    right: str
    overlap_position: int

    def render(self) -> str:
        return f"{self.source} -> {self.left} | {self.right} @{self.overlap_position}"


def critical_pairs(rules: Sequence[StrRule]) -> FrozenSet[CriticalPair]:
    """Critical pairs from suffix/prefix overlaps and containments of every
    ordered pair of left-hand sides (self-overlaps included)."""
    pairs = set()
    for i, r1 in enumerate(rules):
        for j, r2 in enumerate(rules):
            l1, l2 = r1.lhs, r2.lhs
            # a proper suffix of l1 is a proper prefix of l2
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    pos = len(l1) - k
                    pairs.add(CriticalPair(
                        source=l1 + l2[k:],
                        left=r1.rhs + l2[k:],
                        right=l1[:pos] + r2.rhs,
                        overlap_position=pos,
                    ))
            # l2 occurs inside l1
            for pos in range(len(l1) - len(l2) + 1):
                if i == j and pos == 0:
                    continue
                if l1.startswith(l2, pos):
                    pairs.add(CriticalPair(
                        source=l1,
                        left=r1.rhs,
                        right=l1[:pos] + r2.rhs + l1[pos + len(l2):],
                        overlap_position=pos,
                    ))
    return frozenset(pairs)


def sorted_pairs(pairs: Iterable[CriticalPair]) -> List[CriticalPair]:
    return sorted(pairs, key=lambda p: (len(p.source), p.source, p.overlap_position, p.left, p.right))


def join_critical_pair(pair: CriticalPair, rules: Sequence[StrRule],
                       depth_bound: int = RewriteConfig.CRITICAL_PAIR_DEPTH) -> Optional[JoinWitness[str]]:
    return joinable(srs_rel(rules), pair.left, pair.right, depth_bound)
