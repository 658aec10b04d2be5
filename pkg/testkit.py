# testkit.py
"""Seeded generators, exhaustive enumerators and the executable lemma suites."""
import json
import logging
import random
from dataclasses import dataclass, field, fields, is_dataclass, replace
from functools import lru_cache
from itertools import product
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import ars
import lambda_calculus as lc
import rewrite_systems as rs
import ski
import stlc
import stlcext as ext
from ars import canonical_key, sort_states
from constants import (
    ArsConfig, CliConfig, LambdaConfig, RewriteConfig, SkiConfig, TestkitConfig, TypingConfig,
)
from error_handler import UsageError
from lambda_calculus import App, Var, shift, subst
from stlc import EMPTY, Arr, Base, Context, TypingError
from surface import print_term

logger = logging.getLogger(__name__)


# ---------------- Configuration ----------------
@dataclass(frozen=True)
class GenConfig:
    seed: int = TestkitConfig.DEFAULT_SEED
    max_size: int = TestkitConfig.DEFAULT_MAX_SIZE
    max_free_index: int = LambdaConfig.DEBRUIJN_FREE_BOUND
    type_depth: int = TypingConfig.TYPE_DEPTH
    cases: int = TestkitConfig.DEFAULT_CASES
    exhaustive_size: int = LambdaConfig.DEBRUIJN_EXHAUSTIVE_SIZE

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")
        if not 0 <= self.seed <= CliConfig.MAX_SEED:
            raise ValueError(f"seed must lie in 0..{CliConfig.MAX_SEED}")
        if min(self.max_free_index, self.type_depth, self.cases, self.exhaustive_size) < 0:
            raise ValueError("bounds must be natural numbers")

    def rng(self) -> random.Random:
        return random.Random(self.seed)


# ---------------- Untyped generators ----------------
def _random_term(rng: random.Random, size: int, free_bound: int, depth: int = 0) -> lc.Term:
    # without indices in scope a lambda is forced, so the size can overshoot by one
    choices = free_bound + depth
    if size <= 1 and choices:
        return Var(rng.randrange(choices))
    if size <= 2 or not choices or rng.random() < 0.4:
        return lc.Lam(_random_term(rng, size - 1, free_bound, depth + 1))
    left = rng.randint(1, size - 2)
    return App(_random_term(rng, left, free_bound, depth),
               _random_term(rng, size - 1 - left, free_bound, depth))


def gen_term(cfg: GenConfig, rng: Optional[random.Random] = None) -> lc.Term:
    """A random term of size at most ``max_size`` with free indices below ``max_free_index``."""
    rng = rng or cfg.rng()
    return _random_term(rng, rng.randint(1, cfg.max_size), cfg.max_free_index)


def _random_ski(rng: random.Random, size: int) -> ski.CTerm:
    if size < 3:
        return rng.choice((ski.S, ski.K))
    left = rng.randint(1, size - 2)
    return ski.CApp(_random_ski(rng, left), _random_ski(rng, size - 1 - left))


def gen_ski(cfg: GenConfig, rng: Optional[random.Random] = None) -> ski.CTerm:
    rng = rng or cfg.rng()
    return _random_ski(rng, rng.randint(1, cfg.max_size))


def gen_string(cfg: GenConfig, rng: Optional[random.Random] = None,
               max_len: int = TestkitConfig.RANDOM_STRING_LENGTH) -> str:
    rng = rng or cfg.rng()
    return "".join(rng.choice(RewriteConfig.ALPHABET) for _ in range(rng.randint(0, max_len)))


def _random_expr(rng: random.Random, size: int) -> rs.Expr:
    if size < 3:
        return rng.choice((rs.ZERO, rs.ONE))
    left = rng.randint(1, size - 2)
    op = rng.choice((rs.Add, rs.Mul))
    return op(_random_expr(rng, left), _random_expr(rng, size - 1 - left))


def gen_expr(cfg: GenConfig, rng: Optional[random.Random] = None,
             max_size: int = TestkitConfig.RANDOM_EXPR_SIZE) -> rs.Expr:
    rng = rng or cfg.rng()
    return _random_expr(rng, rng.randint(1, max_size))


# ---------------- Enumerators ----------------
@lru_cache(maxsize=None)
def _terms_of_size(n: int, k: int) -> Tuple[lc.Term, ...]:
    # k = number of indices available at this position
    if n < 1:
        return ()
    if n == 1:
        return tuple(Var(i) for i in range(k))
    out = [lc.Lam(b) for b in _terms_of_size(n - 1, k + 1)]
    for i in range(1, n - 1):
        for f in _terms_of_size(i, k):
            for a in _terms_of_size(n - 1 - i, k):
                out.append(App(f, a))
    return tuple(out)


def enum_terms(size: int, free_bound: int) -> List[lc.Term]:
    """Every term of size at most ``size`` whose free indices are below ``free_bound``."""
    return [m for n in range(1, size + 1) for m in _terms_of_size(n, free_bound)]


def count_terms(size: int, free_bound: int) -> int:
    """Independent count of ``enum_terms`` by the size recurrence."""

    @lru_cache(maxsize=None)
    def count(n: int, k: int) -> int:
        if n < 1:
            return 0
        if n == 1:
            return k
        return count(n - 1, k + 1) + sum(count(i, k) * count(n - 1 - i, k) for i in range(1, n - 1))

    return sum(count(n, free_bound) for n in range(1, size + 1))


@lru_cache(maxsize=None)
def _ski_of_size(n: int) -> Tuple[ski.CTerm, ...]:
    if n == 1:
        return (ski.S, ski.K)
    return tuple(ski.CApp(f, a) for i in range(1, n - 1)
                 for f in _ski_of_size(i) for a in _ski_of_size(n - 1 - i))


def enum_ski(size: int) -> List[ski.CTerm]:
    return [m for n in range(1, size + 1) for m in _ski_of_size(n)]


# annotations used when enumerating raw extended terms
_ENUM_DOM = Base(0)
_ENUM_SUM = ext.Sum(Base(0), Base(0))


@lru_cache(maxsize=None)
def _eterms_of_size(n: int, k: int) -> Tuple[ext.ETerm, ...]:
    if n < 1:
        return ()
    if n == 1:
        return tuple(Var(i) for i in range(k))
    out = [stlc.Lam(_ENUM_DOM, b) for b in _eterms_of_size(n - 1, k + 1)]
    for m in _eterms_of_size(n - 1, k):
        out += [ext.Fst(m), ext.Snd(m), ext.Inl(_ENUM_SUM, m), ext.Inr(_ENUM_SUM, m)]
    for i in range(1, n - 1):
        for f in _eterms_of_size(i, k):
            for a in _eterms_of_size(n - 1 - i, k):
                out += [App(f, a), ext.Pair(f, a)]
    for i in range(1, n - 2):
        for j in range(1, n - 1 - i):
            for s in _eterms_of_size(i, k):
                for b1 in _eterms_of_size(j, k + 1):
                    for b2 in _eterms_of_size(n - 1 - i - j, k + 1):
                        out.append(ext.Case(s, b1, b2))
    return tuple(out)


def enum_eterms(size: int, free_bound: int = 1) -> List[ext.ETerm]:
    """Every extended term up to ``size``, with fixed binder and injection annotations."""
    return [m for n in range(1, size + 1) for m in _eterms_of_size(n, free_bound)]


def subterms(m) -> Iterator[Any]:
    yield m
    for child in _children(m):
        yield from subterms(child)


# ---------------- Typed generation ----------------
@dataclass(frozen=True)
class GiveUp:
    target: Any
    attempts: int


def gen_type(rng: random.Random, depth: int, extended: bool = False):
    if depth <= 0 or rng.random() < 0.4:
        return Base(rng.randrange(TypingConfig.BASE_TYPES))
    formers = (Arr, ext.Prod, ext.Sum) if extended else (Arr,)
    former = rng.choice(formers)
    return former(gen_type(rng, depth - 1, extended), gen_type(rng, depth - 1, extended))


class _TypedSearch:
    """Rule-directed search: pick a typing rule whose conclusion fits the target
    and recurse on its premises. One search covers one target type."""

    def __init__(self, rng: random.Random, extended: bool, type_depth: int,
                 budget: int = TestkitConfig.BACKTRACK_BUDGET):
        self.rng = rng
        self.extended = extended
        self.type_depth = type_depth
        self.budget = budget
        self.attempts = 0

    @property
    def exhausted(self) -> bool:
        return self.attempts >= self.budget

    def side_type(self, ctx: Context):
        pool = list(ctx.types) + [gen_type(self.rng, min(1, self.type_depth), self.extended)]
        return self.rng.choice(pool)

    def term(self, ctx: Context, ty, size: int):
        if size < 1 or self.exhausted:
            return None
        rules = self._rules(ctx, ty, size)
        # introductions first most of the time
        rules.sort(key=lambda r: r[0] + self.rng.random())
        for _, rule in rules:
            if self.exhausted:
                return None
            self.attempts += 1
            m = rule()
            if m is not None:
                return m
        return None

    def _rules(self, ctx: Context, ty, size: int) -> List[Tuple[float, Callable]]:
        rng = self.rng
        rules = []
        hits = [i for i, t in enumerate(ctx.types) if t == ty]
        if hits:
            rules.append((0.0 if size < 3 else 0.5, lambda: Var(rng.choice(hits))))
        if isinstance(ty, Arr) and size >= 2:
            rules.append((0.0, lambda: self._lam(ctx, ty, size)))
        if isinstance(ty, ext.Prod) and size >= 3:
            rules.append((0.0, lambda: self._pair(ctx, ty, size)))
        if isinstance(ty, ext.Sum) and size >= 2:
            rules.append((0.0, lambda: self._inject(ext.Inl, ctx, ty, size)))
            rules.append((0.0, lambda: self._inject(ext.Inr, ctx, ty, size)))
        if size >= 3:
            rules.append((0.4, lambda: self._app(ctx, ty, size)))
        if self.extended and size >= 2:
            rules.append((0.4, lambda: self._project(ext.Fst, ctx, ty, size)))
            rules.append((0.4, lambda: self._project(ext.Snd, ctx, ty, size)))
        if self.extended and size >= 4:
            rules.append((0.4, lambda: self._case(ctx, ty, size)))
        return rules

    def _lam(self, ctx, ty, size):
        body = self.term(ctx.extend(ty.dom), ty.cod, size - 1)
        return stlc.Lam(ty.dom, body) if body is not None else None

    def _pair(self, ctx, ty, size):
        left = self.term(ctx, ty.left, size - 2)
        if left is None:
            return None
        right = self.term(ctx, ty.right, size - 1 - left.size)
        return ext.Pair(left, right) if right is not None else None

    def _inject(self, cls, ctx, ty, size):
        payload_ty = ty.left if cls is ext.Inl else ty.right
        m = self.term(ctx, payload_ty, size - 1)
        return cls(ty, m) if m is not None else None

    def _app(self, ctx, ty, size):
        arg_ty = self.side_type(ctx)
        fun = self.term(ctx, Arr(arg_ty, ty), size - 2)
        if fun is None:
            return None
        arg = self.term(ctx, arg_ty, size - 1 - fun.size)
        return App(fun, arg) if arg is not None else None

    def _project(self, cls, ctx, ty, size):
        other = self.side_type(ctx)
        pair_ty = ext.Prod(ty, other) if cls is ext.Fst else ext.Prod(other, ty)
        m = self.term(ctx, pair_ty, size - 1)
        return cls(m) if m is not None else None

    def _case(self, ctx, ty, size):
        sum_ty = ext.Sum(self.side_type(ctx), self.side_type(ctx))
        scrut = self.term(ctx, sum_ty, size - 3)
        if scrut is None:
            return None
        br1 = self.term(ctx.extend(sum_ty.left), ty, size - 2 - scrut.size)
        if br1 is None:
            return None
        br2 = self.term(ctx.extend(sum_ty.right), ty, size - 1 - scrut.size - br1.size)
        return ext.Case(scrut, br1, br2) if br2 is not None else None


def _draw_target(rng: random.Random, depth: int, extended: bool, ctx: Context):
    # no closed term has a base type
    while True:
        ty = gen_type(rng, depth, extended)
        if len(ctx) or not isinstance(ty, Base) or depth <= 0:
            return ty


def gen_typed(cfg: GenConfig, ctx: Context = EMPTY, target=None, system: str = "stlc",
              rng: Optional[random.Random] = None):
    """A term of type ``target`` (a random type when None) in ``ctx``, or GiveUp.

    Every target gets its own backtracking budget. With no target given, an
    uninhabitable draw only costs its own budget before another type is drawn,
    up to ``TestkitConfig.TARGET_DRAWS`` types.
    """
    if system not in ("stlc", "stlcext"):
        raise ValueError(f"typed generation supports stlc and stlcext, not {system!r}")
    rng = rng or cfg.rng()
    extended = system == "stlcext"
    infer_fn = ext.ext_infer if extended else stlc.infer
    draws = 1 if target is not None else TestkitConfig.TARGET_DRAWS
    attempts = 0

    for _ in range(draws):
        ty = target if target is not None else _draw_target(rng, cfg.type_depth, extended, ctx)
        search = _TypedSearch(rng, extended, cfg.type_depth)
        m = search.term(ctx, ty, cfg.max_size)
        attempts += max(search.attempts, 1)
        if m is None:
            continue
        try:
            found = infer_fn(ctx, m)
        except TypingError as e:
            logger.error(f"❌ Generated term does not type: {m!r}: {e}")
            return GiveUp(ty, attempts)
        if found != ty:
            logger.error(f"❌ Generated term has type {found}, wanted {ty}: {m!r}")
            return GiveUp(ty, attempts)
        return m
    return GiveUp(target, attempts)


def typed_corpus(cfg: GenConfig, system: str, rng: random.Random, ctx: Context = EMPTY) -> List[Any]:
    """``cfg.cases`` well-typed terms, unless generation keeps giving up."""
    out = []
    gave_up = 0
    limit = cfg.cases * TestkitConfig.CORPUS_DRAW_FACTOR
    while len(out) < cfg.cases and len(out) + gave_up < limit:
        m = gen_typed(cfg, ctx, None, system, rng)
        if isinstance(m, GiveUp):
            gave_up += 1
        else:
            out.append(m)
    if len(out) < cfg.cases:
        logger.warning(f"⚠️ Typed corpus for {system} holds {len(out)} of {cfg.cases} terms "
                       f"after {gave_up} give-ups")
    elif gave_up:
        logger.debug(f"Typed generation for {system} gave up {gave_up} times")
    return out


# ---------------- Shrinking ----------------
TERM_TYPES = (
    Var, App, lc.Lam, stlc.Lam, ext.Pair, ext.Fst, ext.Snd, ext.Inl, ext.Inr, ext.Case,
    ski.Comb, ski.CApp, rs.Zero, rs.One, rs.Add, rs.Mul,
)


def _term_fields(m) -> List[str]:
    if not (is_dataclass(m) and isinstance(m, TERM_TYPES)):
        return []
    return [f.name for f in fields(m) if f.init and isinstance(getattr(m, f.name), TERM_TYPES)]


def _children(m) -> List[Any]:
    return [getattr(m, name) for name in _term_fields(m)]


def shrink_candidates(value) -> Iterator[Any]:
    """Structurally smaller variants of ``value``: subterms first, then
    the same shape with one part shrunk."""
    if isinstance(value, tuple):
        for i, part in enumerate(value):
            for smaller in shrink_candidates(part):
                yield value[:i] + (smaller,) + value[i + 1:]
    elif isinstance(value, bool):
        return
    elif isinstance(value, int):
        if value > 0:
            yield 0
            if value > 1:
                yield value - 1
    elif isinstance(value, str):
        for i in range(len(value)):
            yield value[:i] + value[i + 1:]
    else:
        names = _term_fields(value)
        for name in names:
            yield getattr(value, name)
        for name in names:
            for smaller in shrink_candidates(getattr(value, name)):
                yield replace(value, **{name: smaller})


class Discard(Exception):
    """The case falls outside the property's precondition."""


def _fails(check: Callable[[Any], bool], value) -> bool:
    try:
        return not check(value)
    except Discard:
        return False


def shrink(check: Callable[[Any], bool], value, steps: int = TestkitConfig.SHRINK_STEPS):
    """Greedy structural shrinking: move to the first smaller variant that still fails."""
    for _ in range(steps):
        for candidate in sorted(shrink_candidates(value), key=canonical_key):
            if _fails(check, candidate):
                value = candidate
                break
        else:
            break
    return value


# ---------------- Reports ----------------
def render(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(render(v) for v in value)
    if isinstance(value, TERM_TYPES):
        return print_term(value)
    return str(value)


@dataclass(frozen=True)
class Failure:
    prop: str
    case_index: int
    counterexample: Any
    original: Any = field(compare=False)

    def render(self) -> str:
        return f"FAIL {self.prop} #{self.case_index}: {render(self.counterexample)}"


@dataclass(frozen=True)
class PropertyResult:
    name: str
    cases: int
    discarded: int
    failures: Tuple[Failure, ...]

    def render(self) -> str:
        text = f"{self.name}: {self.cases} cases, {len(self.failures)} failures"
        return text + (f", {self.discarded} discarded" if self.discarded else "")


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    seed: int
    results: Tuple[PropertyResult, ...]

    @property
    def cases(self) -> int:
        return sum(r.cases for r in self.results)

    @property
    def failures(self) -> Tuple[Failure, ...]:
        return tuple(f for r in self.results for f in r.failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def failed_properties(self) -> List[str]:
        return [r.name for r in self.results if r.failures]

    def summary(self) -> Dict[str, Any]:
        return {"suite": self.suite, "cases": self.cases, "failures": len(self.failures), "seed": self.seed}

    def lines(self) -> List[str]:
        out = [r.render() for r in self.results]
        out += [f.render() for f in self.failures]
        s = self.summary()
        out.append(f"summary suite={s['suite']} cases={s['cases']} failures={s['failures']} seed={s['seed']}")
        return out

    def to_json(self) -> str:
        record = dict(self.summary())
        record["properties"] = [
            {"name": r.name, "cases": r.cases, "discarded": r.discarded, "failures": len(r.failures)}
            for r in self.results
        ]
        record["counterexamples"] = [
            {"property": f.prop, "case": f.case_index, "term": render(f.counterexample)}
            for f in self.failures
        ]
        return json.dumps(record, sort_keys=True)


@dataclass(frozen=True)
class Property:
    name: str
    cases: Sequence[Any]
    check: Callable[[Any], bool]


def run_property(prop: Property) -> PropertyResult:
    failures = []
    discarded = 0
    for index, case in enumerate(prop.cases):
        try:
            ok = prop.check(case)
        except Discard:
            discarded += 1
            continue
        if not ok:
            failures.append(Failure(prop.name, index, shrink(prop.check, case), case))
    return PropertyResult(prop.name, len(prop.cases) - discarded, discarded, tuple(failures))


# ---------------- De Bruijn suite ----------------
SubstFn = Callable[[int, lc.Term, lc.Term], lc.Term]


def _params(rng: random.Random, n: int) -> Tuple[int, ...]:
    return tuple(rng.randrange(LambdaConfig.PARAMETER_RANGE) for _ in range(n))


def _ordered(rng: random.Random) -> Tuple[int, int]:
    a, b = _params(rng, 2)
    return min(a, b), max(a, b)


def debruijn_properties(cfg: GenConfig, rng: random.Random, subst_impl: SubstFn = subst) -> List[Property]:
    corpus = enum_terms(cfg.exhaustive_size, cfg.max_free_index)
    # the random part reaches past the exhaustive sizes
    wide = replace(cfg, max_size=max(cfg.max_size, LambdaConfig.DEBRUIJN_RANDOM_SIZE))
    corpus += [gen_term(wide, rng) for _ in range(cfg.cases)]
    small = replace(cfg, max_size=min(cfg.max_size, 4))

    def arg():
        return gen_term(small, rng)

    def require(cond: bool):
        if not cond:
            raise Discard()

    def shift_subst_below(case):
        d, c, k, n, m = case
        require(c <= k)
        return shift(d, c, subst_impl(k, n, m)) == subst_impl(k + d, shift(d, c, n), shift(d, c, m))

    def shift_subst_above(case):
        d, c, k, n, m = case
        require(k <= c)
        return shift(d, c, subst_impl(k, n, m)) == subst_impl(k, shift(d, c, n), shift(d, c + 1, m))

    def subst_subst_general(case):
        k, j, n, p, m = case
        require(k <= j)
        lhs = subst_impl(j, p, subst_impl(k, n, m))
        return lhs == subst_impl(k, subst_impl(j, p, n), subst_impl(j + 1, shift(1, k, p), m))

    def shift_shift_comm(case):
        d1, d2, c1, c2, m = case
        require(c1 <= c2)
        return shift(d1, c1, shift(d2, c2, m)) == shift(d2, c2 + d1, shift(d1, c1, m))

    return [
        Property("shift_zero", [(_params(rng, 1)[0], m) for m in corpus],
                 lambda case: shift(0, case[0], case[1]) == case[1]),
        Property("shift_shift", [_params(rng, 3) + (m,) for m in corpus],
                 lambda case: shift(case[0], case[2], shift(case[1], case[2], case[3]))
                 == shift(case[0] + case[1], case[2], case[3])),
        Property("shift_shift_comm", [_params(rng, 2) + _ordered(rng) + (m,) for m in corpus],
                 shift_shift_comm),
        Property("shift_shift_succ", [(_params(rng, 1)[0], m) for m in corpus],
                 lambda case: shift(1, case[0] + 1, shift(1, case[0], case[1])) == shift(2, case[0], case[1])),
        Property("subst_shift_cancel", [(_params(rng, 1)[0], arg(), m) for m in corpus],
                 lambda case: subst_impl(case[0], case[1], shift(1, case[0], case[2])) == case[2]),
        Property("shift_subst_below", [(_params(rng, 1)[0],) + _ordered(rng) + (arg(), m) for m in corpus],
                 shift_subst_below),
        Property("shift_subst_above", [(_params(rng, 1)[0],) + _ordered(rng)[::-1] + (arg(), m) for m in corpus],
                 shift_subst_above),
        Property("subst_subst", [(arg(), arg(), m) for m in corpus],
                 lambda case: subst_impl(0, case[1], subst_impl(0, case[0], case[2]))
                 == subst_impl(0, subst_impl(0, case[1], case[0]), subst_impl(1, shift(1, 0, case[1]), case[2]))),
        Property("subst_subst_general", [_ordered(rng) + (arg(), arg(), m) for m in corpus],
                 subst_subst_general),
    ]


# ---------------- Offset reconciliation ----------------
def shift_subst_template(a: int, b: int) -> Callable[[Tuple], bool]:
    """shift d c (subst k N M) = subst (k+d+a) (shift d c N) (shift d (c+1+b) M), for c <= k."""

    def holds(case):
        d, c, k, n, m = case
        if c > k or c + 1 + b < 0 or k + d + a < 0:
            raise Discard()
        return shift(d, c, subst(k, n, m)) == subst(k + d + a, shift(d, c, n), shift(d, c + 1 + b, m))

    return holds


def subst_subst_template(a: int, b: int) -> Callable[[Tuple], bool]:
    """subst j P (subst k N M) = subst (k+a) (subst j P N) (subst (j+1+b) (shift 1 k P) M), for k <= j."""

    def holds(case):
        k, j, n, p, m = case
        if k > j or k + a < 0 or j + 1 + b < 0:
            raise Discard()
        lhs = subst(j, p, subst(k, n, m))
        return lhs == subst(k + a, subst(j, p, n), subst(j + 1 + b, shift(1, k, p), m))

    return holds


def double_shift_composition(case) -> bool:
    """The generalized composition lemma with the index arithmetic of the
    double-shifting substitution; fails under ``subst``."""
    l, k, j, m, n, p = case
    lhs = subst(k, shift(l, 0, p), subst(k + j + 1, shift(k + l + 1, 0, n), m))
    return lhs == subst(k + j, shift(l, 0, subst(j, n, p)), subst(k, shift(l + 1, 0, p), m))


RECONCILED_STATEMENTS = {
    "shift_subst": shift_subst_template,
    "subst_subst": subst_subst_template,
}


def reconcile_offsets(statement: str, size: int = 4, free_bound: int = 2,
                      offsets: Iterable[int] = (-1, 0, 1)) -> List[Tuple[int, int]]:
    """Offset pairs (a, b) for which the statement template holds on every
    term up to ``size``, with every small parameter choice."""
    if statement not in RECONCILED_STATEMENTS:
        raise UsageError(f"unknown statement {statement!r}")
    template = RECONCILED_STATEMENTS[statement]
    terms = enum_terms(size, free_bound)
    args = enum_terms(2, free_bound)
    r = range(LambdaConfig.PARAMETER_RANGE)
    if statement == "shift_subst":
        cases = [(d, c, k, n, m) for d, c, k in product(r, r, r) for n in args for m in terms]
    else:
        cases = [(k, j, n, p, m) for k, j in product(r, r) for n in args for p in args for m in terms]

    offsets = tuple(offsets)
    surviving = []
    for a, b in product(offsets, offsets):
        holds = template(a, b)
        if all(not _fails(holds, case) for case in cases):
            surviving.append((a, b))
    logger.info(f"🔍 Offsets for {statement} holding up to size {size}: {surviving}")
    return surviving


# ---------------- Lambda and SK suites ----------------
def takahashi_properties(cfg: GenConfig, rng: random.Random) -> List[Property]:
    corpus = enum_terms(min(cfg.exhaustive_size, LambdaConfig.TAKAHASHI_SIZE),
                        min(cfg.max_free_index, LambdaConfig.TAKAHASHI_FREE_BOUND))

    def parallel_in_beta_star(m):
        reached = ars.reachable_within(lc.BETA.successors, m, m.size)
        return all(n in reached for n in lc.parallel_reducts(m))

    return [
        Property("takahashi", corpus, lambda m: lc.takahashi_check(m).ok),
        Property("beta_in_parallel", corpus, lambda m: lc.beta_reducts(m) <= lc.parallel_reducts(m)),
        Property("parallel_in_beta_star", corpus, parallel_in_beta_star),
    ]


def diamond_properties(cfg: GenConfig, rng: random.Random) -> List[Property]:
    terms = enum_terms(min(cfg.exhaustive_size, LambdaConfig.TAKAHASHI_SIZE),
                       min(cfg.max_free_index, LambdaConfig.TAKAHASHI_FREE_BOUND))
    combinators = enum_ski(min(cfg.exhaustive_size, SkiConfig.EXHAUSTIVE_SIZE))
    combinators += [gen_ski(cfg, rng) for _ in range(min(cfg.cases, TestkitConfig.RANDOM_REWRITE_CASES))]

    def strategies_agree(m):
        outcomes = [lc.normalize(m, s, ArsConfig.FUEL // 10) for s in ArsConfig.STRATEGIES]
        forms = [o.term for o in outcomes if isinstance(o, ars.NormalForm)]
        return len(forms) < 2 or forms[0] == forms[1]

    def beta_unique_nf(m):
        verdict = ars.newman_verify(lc.BETA, m, node_cap=200)
        if not verdict.complete or not verdict.terminating:
            raise Discard()
        return verdict.unique_nf

    return [
        Property("lambda_parallel_diamond", terms,
                 lambda m: ars.check_diamond(lc.PARALLEL, [m], depth_bound=1).ok),
        Property("ski_parallel_diamond", combinators,
                 lambda m: ars.check_diamond(ski.SKI_PARALLEL, [m], depth_bound=1).ok),
        Property("ski_takahashi", combinators, lambda m: ski.ski_takahashi_check(m).ok),
        Property("strategy_agreement", terms, strategies_agree),
        Property("beta_unique_nf", terms, beta_unique_nf),
    ]


# ---------------- Newman and Hindley-Rosen suites ----------------
def _newman_holds(rel: ars.Rel, a) -> bool:
    verdict = ars.newman_verify(rel, a)
    return bool(verdict.complete and verdict.terminating and verdict.locally_confluent and verdict.unique_nf)


def newman_properties(cfg: GenConfig, rng: random.Random) -> List[Property]:
    extra = min(cfg.cases, TestkitConfig.RANDOM_REWRITE_CASES)
    strings = rs.all_strings(RewriteConfig.STRING_CORPUS_LENGTH)
    strings += [gen_string(cfg, rng) for _ in range(extra)]
    exprs = rs.all_exprs(RewriteConfig.EXPR_CORPUS_SIZE)
    exprs += [gen_expr(cfg, rng) for _ in range(extra)]
    pairs = rs.sorted_pairs(rs.critical_pairs(rs.IDEMPOTENCY))

    def collapse_oracle(w):
        return ars.newman_verify(rs.SRS, w).normal_forms == {rs.collapse_runs(w)}

    return [
        Property("srs_newman", strings, lambda w: _newman_holds(rs.SRS, w)),
        Property("srs_collapse_oracle", strings, collapse_oracle),
        Property("expr_newman", exprs, lambda e: _newman_holds(rs.EXPR, e)),
        Property("srs_critical_pairs_joinable", pairs,
                 lambda p: rs.join_critical_pair(p, rs.IDEMPOTENCY) is not None),
        Property("expr_overlaps_joinable", rs.expr_root_overlaps(), lambda o: o.joinable),
    ]


def hindley_rosen_properties(cfg: GenConfig, rng: random.Random) -> List[Property]:
    strings = rs.all_strings(RewriteConfig.HINDLEY_ROSEN_LENGTH)
    union = ars.union_rel(rs.SRS_AA, rs.SRS_BB)

    def union_inherits_diamond(corpus):
        # diamond for both parts plus commutation implies diamond for the union
        premises = (ars.check_diamond(rs.SRS_AA, corpus).ok and ars.check_diamond(rs.SRS_BB, corpus).ok
                    and ars.commute_check(rs.SRS_AA, rs.SRS_BB, corpus).ok)
        if not premises:
            raise Discard()
        return ars.check_diamond(union, corpus).ok

    return [
        Property("aa_diamond", strings, lambda w: ars.check_diamond(rs.SRS_AA, [w]).ok),
        Property("bb_diamond", strings, lambda w: ars.check_diamond(rs.SRS_BB, [w]).ok),
        Property("aa_confluent", strings, lambda w: ars.newman_verify(rs.SRS_AA, w).unique_nf),
        Property("bb_confluent", strings, lambda w: ars.newman_verify(rs.SRS_BB, w).unique_nf),
        Property("aa_bb_commute", strings, lambda w: ars.commute_check(rs.SRS_AA, rs.SRS_BB, [w]).ok),
        Property("bb_aa_commute", strings, lambda w: ars.commute_check(rs.SRS_BB, rs.SRS_AA, [w]).ok),
        Property("union_diamond", strings, lambda w: ars.check_diamond(union, [w]).ok),
        Property("union_inherits_diamond", [strings], union_inherits_diamond),
        Property("union_confluent", strings, lambda w: ars.confluence_check(union, w).ok),
    ]


# ---------------- Typed suites ----------------
def _well_typed(check: Callable[[Any], bool]) -> Callable[[Any], bool]:
    def guarded(m):
        try:
            return check(m)
        except TypingError:
            raise Discard() from None

    return guarded


def subject_reduction_properties(cfg: GenConfig, rng: random.Random) -> List[Property]:
    depth = TestkitConfig.SUBJECT_REDUCTION_DEPTH
    simple = typed_corpus(cfg, "stlc", rng)
    extended = typed_corpus(cfg, "stlcext", rng)

    def erasure_commutes(m):
        stlc.infer(EMPTY, m)
        return frozenset(stlc.erase(t) for t in stlc.typed_step_reducts(m)) == lc.beta_reducts(stlc.erase(m))

    return [
        Property("stlc_subject_reduction", simple,
                 _well_typed(lambda m: stlc.subject_reduction_check(EMPTY, m, depth).ok)),
        Property("stlcext_subject_reduction", extended,
                 _well_typed(lambda m: ext.ext_subject_reduction_check(EMPTY, m, depth).ok)),
        Property("stlc_erasure_commutes", simple, _well_typed(erasure_commutes)),
    ]


def _sn_with_unique_nf(verdict) -> bool:
    return isinstance(verdict, stlc.SN) and len(verdict.graph.normal_forms()) == 1


def sn_properties(cfg: GenConfig, rng: random.Random) -> List[Property]:
    simple = typed_corpus(cfg, "stlc", rng)
    extended = typed_corpus(cfg, "stlcext", rng)
    functions = [m for m in simple if isinstance(stlc.infer(EMPTY, m), Arr)]

    def stlc_sn(m):
        stlc.infer(EMPTY, m)
        return _sn_with_unique_nf(stlc.sn_certificate(m))

    def stlcext_sn(m):
        ext.ext_infer(EMPTY, m)
        return _sn_with_unique_nf(ext.ext_sn_certificate(m))

    def applied_to_variable(m):
        # SN (M' v0) implies SN M, where M' is M moved under one binder
        ty = stlc.infer(EMPTY, m)
        if not isinstance(ty, Arr):
            raise Discard()
        applied = App(stlc.tshift(1, 0, m), Var(0))
        if not isinstance(stlc.sn_certificate(applied), stlc.SN):
            return True
        return isinstance(stlc.sn_certificate(m), stlc.SN)

    return [
        Property("stlc_sn", simple, _well_typed(stlc_sn)),
        Property("stlcext_sn", extended, _well_typed(stlcext_sn)),
        Property("sn_applied_to_variable", functions, _well_typed(applied_to_variable)),
        Property("omega_control", [lc.OMEGA],
                 lambda m: isinstance(stlc.sn_certificate(m, ArsConfig.NODE_CAP, lc.BETA), stlc.CycleFound)),
    ]


# One closed, well-typed term per reduction rule; each contains a redex for its rule.
_B0 = Base(0)
_F = Arr(_B0, _B0)
_I = stlc.Lam(_B0, Var(0))
_REDEX = App(stlc.Lam(_F, Var(0)), _I)
_SUM = ext.Sum(_F, _F)
_ID_F = stlc.Lam(_F, Var(0))

RULE_REGRESSION = {
    ext.StepRule.BETA: _REDEX,
    ext.StepRule.FST_PAIR: ext.Fst(ext.Pair(_I, _I)),
    ext.StepRule.SND_PAIR: ext.Snd(ext.Pair(_I, _I)),
    ext.StepRule.CASE_INL: ext.Case(ext.Inl(_SUM, _I), Var(0), Var(0)),
    ext.StepRule.CASE_INR: ext.Case(ext.Inr(_SUM, _I), Var(0), Var(0)),
    ext.StepRule.APP_L: App(App(stlc.Lam(Arr(_F, _F), Var(0)), _ID_F), _I),
    ext.StepRule.APP_R: App(_ID_F, _REDEX),
    ext.StepRule.LAM: stlc.Lam(_B0, App(_I, Var(0))),
    ext.StepRule.PAIR_L: ext.Pair(_REDEX, _I),
    ext.StepRule.PAIR_R: ext.Pair(_I, _REDEX),
    ext.StepRule.FST: ext.Fst(App(stlc.Lam(ext.Prod(_F, _F), Var(0)), ext.Pair(_I, _I))),
    ext.StepRule.SND: ext.Snd(App(stlc.Lam(ext.Prod(_F, _F), Var(0)), ext.Pair(_I, _I))),
    ext.StepRule.INL: ext.Inl(_SUM, _REDEX),
    ext.StepRule.INR: ext.Inr(_SUM, _REDEX),
    ext.StepRule.CASE_M: ext.Case(App(stlc.Lam(_SUM, Var(0)), ext.Inl(_SUM, _I)), Var(0), Var(0)),
    ext.StepRule.CASE_N1: ext.Case(ext.Inl(_SUM, _I), App(_ID_F, Var(0)), Var(0)),
    ext.StepRule.CASE_N2: ext.Case(ext.Inl(_SUM, _I), Var(0), App(_ID_F, Var(0))),
}


def progress_properties(cfg: GenConfig, rng: random.Random) -> List[Property]:
    extended = typed_corpus(cfg, "stlcext", rng)

    def normal_forms_are_values(m):
        ext.ext_infer(EMPTY, m)
        outcome = ext.normalize(m)
        if not isinstance(outcome, ars.NormalForm):
            raise Discard()
        return ext.is_value(outcome.term)

    def rule_regression(case):
        rule, m = case
        if not isinstance(rule, ext.StepRule):
            raise Discard()
        return ext.rule_preserves_type(EMPTY, m, rule) is True

    return [
        Property("progress", extended,
                 _well_typed(lambda m: not isinstance(ext.progress_check(m), ext.Violation))),
        Property("normal_forms_are_values", extended, _well_typed(normal_forms_are_values)),
        Property("rule_regression", sorted(RULE_REGRESSION.items(), key=lambda kv: kv[0].value),
                 _well_typed(rule_regression)),
    ]


def neutrality_properties(cfg: GenConfig, rng: random.Random) -> List[Property]:
    corpus = enum_eterms(TestkitConfig.NEUTRALITY_SIZE)
    typed = typed_corpus(replace(cfg, cases=min(cfg.cases, TestkitConfig.RANDOM_REWRITE_CASES)), "stlcext", rng)
    cases = sort_states({c for m in typed + corpus for c in subterms(m) if isinstance(c, ext.Case)})

    def tracked(case):
        verdict = ext.check_scrutinee_tracking(case, node_cap=500)
        if verdict is None:
            raise Discard()
        return verdict

    # every case expression of the corpus, applied to every small argument
    arguments = enum_eterms(TestkitConfig.NEUTRALITY_ARGUMENT_SIZE)
    wrappers = [(c.scrut, c.br1, c.br2, p) for c in corpus if isinstance(c, ext.Case) for p in arguments]

    return [
        Property("wrapper_neutral", wrappers, lambda case: ext.wrapper_neutral(*case)),
        Property("value_neutral_disjoint", corpus, lambda m: not (ext.is_value(m) and ext.is_neutral(m))),
        Property("scrutinee_tracking", cases, tracked),
    ]


# ---------------- Suite runner ----------------
class UnknownSuite(UsageError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown suite {name!r}; choose from {', '.join(TestkitConfig.SUITES)}")


SUITES: Dict[str, Callable[..., List[Property]]] = {
    "debruijn": debruijn_properties,
    "takahashi": takahashi_properties,
    "diamond": diamond_properties,
    "newman": newman_properties,
    "hindley-rosen": hindley_rosen_properties,
    "subject-reduction": subject_reduction_properties,
    "sn": sn_properties,
    "progress": progress_properties,
    "neutrality": neutrality_properties,
}


def run_suite(name: str, cfg: GenConfig = GenConfig(), subst_impl: SubstFn = subst) -> SuiteReport:
    """Run every property of suite ``name``; ``subst_impl`` swaps the
    substitution under test in the de Bruijn suite."""
    if name not in SUITES:
        raise UnknownSuite(name)
    rng = cfg.rng()
    build = SUITES[name]
    props = build(cfg, rng, subst_impl) if name == "debruijn" else build(cfg, rng)

    results = []
    for prop in props:
        result = run_property(prop)
        logger.debug(f"🔍 {name}/{result.render()}")
        results.append(result)
    report = SuiteReport(name, cfg.seed, tuple(results))

    if report.ok:
        logger.info(f"✅ Suite {name}: {report.cases} cases passed (seed {cfg.seed})")
    else:
        logger.info(f"❌ Suite {name}: {len(report.failures)} failures in {report.failed_properties()}")
    return report
