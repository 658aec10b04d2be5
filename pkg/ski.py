# ski.py
"""SK combinatory logic: the binder-free instance of the diamond technique."""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import FrozenSet, Iterator, Tuple, Union

from ars import Rel, sort_states

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Comb:
    name: str
    size: int = field(default=1, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.name not in ("S", "K"):
            raise ValueError(f"unknown combinator {self.name!r}")


@dataclass(frozen=True)
class CApp:
    fun: "CTerm"
    arg: "CTerm"
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + self.fun.size + self.arg.size)


CTerm = Union[Comb, CApp]

S = Comb("S")
K = Comb("K")


def apply_all(head: CTerm, *args: CTerm) -> CTerm:
    """Left-associated application: ``apply_all(S, x, y, z)`` is S x y z."""
    for a in args:
        head = CApp(head, a)
    return head


def _k_redex(m: CTerm):
    # K x y
    if isinstance(m, CApp) and isinstance(m.fun, CApp) and m.fun.fun == K:
        return m.fun.arg, m.arg
    return None


def _s_redex(m: CTerm):
    # S x y z
    if (isinstance(m, CApp) and isinstance(m.fun, CApp) and isinstance(m.fun.fun, CApp)
            and m.fun.fun.fun == S):
        return m.fun.fun.arg, m.fun.arg, m.arg
    return None


def contract(m: CTerm):
    """The root contraction of ``m`` as (rule, reduct), or None."""
    k = _k_redex(m)
    if k is not None:
        return "K", k[0]
    s = _s_redex(m)
    if s is not None:
        x, y, z = s
        return "S", CApp(CApp(x, z), CApp(y, z))
    return None


def steps(m: CTerm, innermost: bool = False) -> Iterator[Tuple[str, CTerm]]:
    """Single K/S contractions, labelled by the contracted rule."""
    if isinstance(m, Comb):
        return
    root = contract(m)
    if root is not None and not innermost:
        yield root
    for rule, fun in steps(m.fun, innermost):
        yield rule, CApp(fun, m.arg)
    for rule, arg in steps(m.arg, innermost):
        yield rule, CApp(m.fun, arg)
    if root is not None and innermost:
        yield root


def ski_reducts(m: CTerm) -> FrozenSet[CTerm]:
    return frozenset(t for _, t in steps(m))


SKI: Rel[CTerm] = Rel(steps, "ski")


@lru_cache(maxsize=1 << 16)
def ski_parallel_reducts(m: CTerm) -> FrozenSet[CTerm]:
    """All N with M => N: congruence on both sides plus K/S contraction of
    already parallel-reduced components."""
    if isinstance(m, Comb):
        return frozenset({m})
    out = {CApp(f, a) for f in ski_parallel_reducts(m.fun) for a in ski_parallel_reducts(m.arg)}
    k = _k_redex(m)
    if k is not None:
        out.update(ski_parallel_reducts(k[0]))
    s = _s_redex(m)
    if s is not None:
        x, y, z = s
        for x2 in ski_parallel_reducts(x):
            for y2 in ski_parallel_reducts(y):
                for z2 in ski_parallel_reducts(z):
                    out.add(CApp(CApp(x2, z2), CApp(y2, z2)))
    return frozenset(out)


SKI_PARALLEL: Rel[CTerm] = Rel.from_successors(ski_parallel_reducts, "par")


@lru_cache(maxsize=1 << 16)
def ski_complete(m: CTerm) -> CTerm:
    """Complete development: develop the components, then contract the
    outermost K/S redex of the original spine."""
    if isinstance(m, Comb):
        return m
    k = _k_redex(m)
    if k is not None:
        return ski_complete(k[0])
    s = _s_redex(m)
    if s is not None:
        x, y, z = (ski_complete(t) for t in s)
        return CApp(CApp(x, z), CApp(y, z))
    return CApp(ski_complete(m.fun), ski_complete(m.arg))


@dataclass(frozen=True)
class SkiTakahashiReport:
    term: CTerm
    development: CTerm
    violations: Tuple[CTerm, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def ski_takahashi_check(m: CTerm) -> SkiTakahashiReport:
    star = ski_complete(m)
    violations = tuple(n for n in sort_states(ski_parallel_reducts(m))
                       if star not in ski_parallel_reducts(n))
    if violations:
        logger.info(f"❌ SK Takahashi property fails for {m!r}")
    return SkiTakahashiReport(m, star, violations)
