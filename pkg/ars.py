# ars.py
"""Abstract rewriting: closures, joinability and confluence checks over
finite-successor relations."""
import logging
from collections import deque
from dataclasses import dataclass, field, fields, is_dataclass
from functools import cached_property
from itertools import combinations
from typing import (Any, Callable, Dict, FrozenSet, Generic, Hashable, Iterable,
                    Iterator, List, Optional, Sequence, Tuple, TypeVar, Union)

import networkx as nx
import pydot

from constants import ArsConfig

logger = logging.getLogger(__name__)

S = TypeVar("S", bound=Hashable)

Labelled = Iterable[Tuple[str, Any]]


def serialize(state: Any) -> str:
    """Prefix serialization: the constructor name, then its parts, indices in decimal."""
    if isinstance(state, str):
        return state
    if is_dataclass(state) and not isinstance(state, type):
        parts = [serialize(getattr(state, f.name)) for f in fields(state) if f.init]
        name = type(state).__name__
        return f"({' '.join([name, *parts])})" if parts else name
    if isinstance(state, tuple):
        return f"({' '.join(serialize(part) for part in state)})"
    if state is None:
        return "_"
    return str(state)


def canonical_key(state: Any) -> Tuple[int, str]:
    """Order states by (size, serialization)."""
    if isinstance(state, str):
        return (len(state), state)
    return (getattr(state, "size", 0), serialize(state))


def sort_states(states: Iterable[S]) -> List[S]:
    return sorted(states, key=canonical_key)


# ---------------- Relations ----------------
@dataclass(frozen=True)
class Rel(Generic[S]):
    """A one-step relation given by its labelled reducts.

    ``steps`` returns (rule, reduct) pairs; the same reduct may appear under
    several rules. ``successors`` collapses them into a set.
    """

    steps: Callable[[S], Labelled]
    label: str = "->"

    @classmethod
    def from_successors(cls, successors: Callable[[S], Iterable[S]], label: str = "->") -> "Rel[S]":
        return cls(lambda s: ((label, t) for t in successors(s)), label)

    def successors(self, state: S) -> FrozenSet[S]:
        return frozenset(t for _, t in self.steps(state))

    def __call__(self, state: S) -> FrozenSet[S]:
        return self.successors(state)

    def ordered_successors(self, state: S) -> List[S]:
        return sort_states(self.successors(state))


EMPTY_REL: Rel = Rel.from_successors(lambda _: (), "empty")


def union_rel(r: Rel[S], s: Rel[S]) -> Rel[S]:
    """The union relation: successors are the union of both successor sets."""
    if r is s:
        return r

    def steps(state: S) -> Labelled:
        yield from r.steps(state)
        yield from s.steps(state)

    return Rel(steps, f"{r.label} ∪ {s.label}")


# ---------------- Reduction Graphs ----------------
@dataclass(frozen=True)
class ReductionGraph(Generic[S]):
    root: S
    nodes: FrozenSet[S]
    edges: FrozenSet[Tuple[S, S]]
    complete: bool
    edge_labels: Dict[Tuple[S, S], FrozenSet[str]] = field(default_factory=dict, compare=False, hash=False)
    # nodes that had reducts dropped by the node cap
    cut: FrozenSet[S] = frozenset()

    @cached_property
    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(sort_states(self.nodes))
        for x, y in sorted(self.edges, key=lambda e: (canonical_key(e[0]), canonical_key(e[1]))):
            g.add_edge(x, y, rules=sorted(self.edge_labels.get((x, y), ())))
        return g

    @cached_property
    def adjacency(self) -> Dict[S, List[S]]:
        return {n: sort_states(self.digraph.successors(n)) for n in self.nodes}

    def successors_in(self, node: S) -> List[S]:
        return self.adjacency.get(node, [])

    def normal_forms(self) -> FrozenSet[S]:
        return frozenset(n for n in self.nodes if not self.adjacency[n] and n not in self.cut)

    def descendants(self, node: S) -> FrozenSet[S]:
        return frozenset(nx.descendants(self.digraph, node)) | {node}


def star_reachable(rel: Rel[S], a: S, node_cap: int = ArsConfig.NODE_CAP) -> ReductionGraph[S]:
    """Breadth-first presentation of the reflexive-transitive closure from ``a``."""
    if node_cap < 1:
        raise ValueError("node_cap must be at least 1")

    nodes = {a: None}
    edges = set()
    labels: Dict[Tuple[S, S], set] = {}
    cut = set()
    complete = True
    queue = deque([a])

    while queue:
        x = queue.popleft()
        by_target: Dict[S, set] = {}
        for rule, y in rel.steps(x):
            by_target.setdefault(y, set()).add(rule)
        for y in sort_states(by_target):
            if y not in nodes:
                if len(nodes) >= node_cap:
                    complete = False
                    cut.add(x)
                    continue
                nodes[y] = None
                queue.append(y)
            edges.add((x, y))
            labels.setdefault((x, y), set()).update(by_target[y])

    if not complete:
        logger.warning(f"⚠️ Exploration from {a!r} stopped at the node cap ({node_cap})")
    else:
        logger.debug(f"🔍 Explored {len(nodes)} states from {a!r}")

    return ReductionGraph(
        root=a,
        nodes=frozenset(nodes),
        edges=frozenset(edges),
        complete=complete,
        edge_labels={e: frozenset(r) for e, r in labels.items()},
        cut=frozenset(cut),
    )


# ---------------- Joinability ----------------
@dataclass(frozen=True)
class JoinWitness(Generic[S]):
    meet: S
    left_path: Tuple[S, ...]
    right_path: Tuple[S, ...]


def reachable_within(successors: Callable[[S], Iterable[S]], start: S, depth_bound: int) -> Dict[S, Tuple[int, Optional[S]]]:
    seen: Dict[S, Tuple[int, Optional[S]]] = {start: (0, None)}
    frontier = [start]
    for depth in range(1, depth_bound + 1):
        nxt = []
        for x in frontier:
            for y in sort_states(successors(x)):
                if y not in seen:
                    seen[y] = (depth, x)
                    nxt.append(y)
        if not nxt:
            break
        frontier = nxt
    return seen


def _path_to(seen: Dict[S, Tuple[int, Optional[S]]], target: S) -> Tuple[S, ...]:
    path = []
    node = target
    while seen[node][1] is not None:
        path.append(node)
        node = seen[node][1]
    return tuple(reversed(path))


def join_between(left: Callable[[S], Iterable[S]], b: S,
                 right: Callable[[S], Iterable[S]], c: S,
                 depth_bound: int) -> Optional[JoinWitness[S]]:
    """Search d with b ->left* d and c ->right* d."""
    from_b = reachable_within(left, b, depth_bound)
    from_c = reachable_within(right, c, depth_bound)
    common = from_b.keys() & from_c.keys()
    if not common:
        return None
    meet = min(common, key=lambda d: (from_b[d][0] + from_c[d][0], canonical_key(d)))
    return JoinWitness(meet, _path_to(from_b, meet), _path_to(from_c, meet))


def joinable(rel: Rel[S], b: S, c: S, depth_bound: int = ArsConfig.DEPTH_BOUND) -> Optional[JoinWitness[S]]:
    """A join witness for b and c, or None when none exists within the bound.

    None is not a proof of non-joinability.
    """
    if depth_bound < 0:
        raise ValueError("depth_bound must be non-negative")
    return join_between(rel.successors, b, rel.successors, c, depth_bound)


def replay(rel: Rel[S], start: S, path: Sequence[S]) -> bool:
    """True iff every step of ``path`` is a one-step reduct of its predecessor."""
    current = start
    for nxt in path:
        if nxt not in rel.successors(current):
            return False
        current = nxt
    return True


# ---------------- Peak reports ----------------
@dataclass(frozen=True)
class Peak(Generic[S]):
    source: S
    left: S
    right: S
    joined: bool = False

    def render(self, show: Callable[[Any], str] = repr) -> str:
        verdict = "joined" if self.joined else "unjoined"
        return f"{show(self.source)}\t{show(self.left)}\t{show(self.right)}\t{verdict}"


@dataclass(frozen=True)
class PeakReport(Generic[S]):
    checked: int
    failures: Tuple[Peak[S], ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self, show: Callable[[Any], str] = repr) -> List[str]:
        return [p.render(show) for p in self.failures]


def check_diamond(rel: Rel[S], corpus: Iterable[S],
                  depth_bound: int = ArsConfig.DEPTH_BOUND) -> PeakReport[S]:
    """Local-confluence check: every single-step divergence must be joinable."""
    checked = 0
    failures = []
    for a in corpus:
        for b, c in combinations(rel.ordered_successors(a), 2):
            checked += 1
            if joinable(rel, b, c, depth_bound) is None:
                failures.append(Peak(a, b, c))
    if failures:
        logger.info(f"❌ Diamond check over {rel.label}: {len(failures)} unjoined peaks of {checked}")
    else:
        logger.debug(f"✅ Diamond check over {rel.label}: {checked} peaks joined")
    return PeakReport(checked, tuple(failures))


def commute_check(r: Rel[S], s: Rel[S], corpus: Iterable[S],
                  depth_bound: int = ArsConfig.DEPTH_BOUND) -> PeakReport[S]:
    """For every r-step a->b and s-step a->c, look for d with b ->s* d and c ->r* d."""
    checked = 0
    failures = []
    for a in corpus:
        for b in r.ordered_successors(a):
            for c in s.ordered_successors(a):
                checked += 1
                if join_between(s.successors, b, r.successors, c, depth_bound) is None:
                    failures.append(Peak(a, b, c))
    if failures:
        logger.info(f"❌ Commutation of {r.label} and {s.label}: {len(failures)} unjoined peaks")
    return PeakReport(checked, tuple(failures))


# ---------------- Termination and Newman ----------------
def is_terminating(graph: ReductionGraph[S]) -> Optional[bool]:
    """Acyclicity of a complete graph; None (unknown) when exploration was cut."""
    if not graph.complete:
        return None
    return nx.is_directed_acyclic_graph(graph.digraph)


def find_cycle(graph: ReductionGraph[S]) -> Optional[Tuple[S, ...]]:
    """A cycle x0 -> x1 -> ... -> x0 in the explored graph, as its node list."""
    try:
        cycle = nx.find_cycle(graph.digraph, source=graph.root)
    except nx.NetworkXNoCycle:
        try:
            cycle = nx.find_cycle(graph.digraph)
        except nx.NetworkXNoCycle:
            return None
    return tuple(u for u, _ in cycle)


@dataclass(frozen=True)
class NewmanVerdict(Generic[S]):
    terminating: Optional[bool]
    locally_confluent: bool
    unique_nf: bool
    normal_forms: FrozenSet[S]
    complete: bool
    graph: ReductionGraph[S] = field(compare=False)
    failures: Tuple[Peak[S], ...] = ()

    @property
    def warning(self) -> Optional[str]:
        return None if self.complete else "incomplete exploration: verdict covers the explored region only"


def newman_verify(rel: Rel[S], a: S, node_cap: int = ArsConfig.NODE_CAP) -> NewmanVerdict[S]:
    """Termination plus local confluence on the reachable graph of ``a``."""
    graph = star_reachable(rel, a, node_cap)
    bound = len(graph.nodes)

    failures = []
    for node in sort_states(graph.nodes):
        for b, c in combinations(graph.successors_in(node), 2):
            if join_between(graph.successors_in, b, graph.successors_in, c, bound) is None:
                failures.append(Peak(node, b, c))

    normal_forms = graph.normal_forms()
    verdict = NewmanVerdict(
        terminating=is_terminating(graph),
        locally_confluent=not failures,
        unique_nf=len(normal_forms) <= 1,
        normal_forms=normal_forms,
        complete=graph.complete,
        graph=graph,
        failures=tuple(failures),
    )
    if verdict.warning:
        logger.warning(f"⚠️ Newman check from {a!r}: {verdict.warning}")
    return verdict


@dataclass(frozen=True)
class ConfluenceReport(Generic[S]):
    complete: bool
    pairs_checked: int
    failures: Tuple[Tuple[S, S], ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def confluence_check(rel: Rel[S], a: S, node_cap: int = ArsConfig.NODE_CAP) -> ConfluenceReport[S]:
    """Every two states reachable from ``a`` have a common reduct inside the graph."""
    graph = star_reachable(rel, a, node_cap)
    ordered = sort_states(graph.nodes)
    closure = {n: graph.descendants(n) for n in ordered}
    failures = []
    checked = 0
    for b, c in combinations(ordered, 2):
        checked += 1
        if not closure[b] & closure[c]:
            failures.append((b, c))
    return ConfluenceReport(graph.complete, checked, tuple(failures))


# ---------------- DOT export ----------------
def _dot_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: ReductionGraph[S], show: Callable[[Any], str] = repr,
           title: str = "reductions") -> str:
    """Directed DOT graph; nodes sorted by canonical form, edges labelled by rule."""
    dot = pydot.Dot(title, graph_type="digraph")
    ordered = sorted(graph.nodes, key=lambda n: (show(n), canonical_key(n)))
    ids = {n: f"n{i}" for i, n in enumerate(ordered)}

    for n in ordered:
        attrs = {"label": _dot_string(show(n))}
        if n == graph.root:
            attrs["shape"] = "box"
        dot.add_node(pydot.Node(ids[n], **attrs))

    for x, y in sorted(graph.edges, key=lambda e: (ids[e[0]], ids[e[1]])):
        rules = sorted(graph.edge_labels.get((x, y), ()))
        attrs = {"label": _dot_string(",".join(rules))} if rules else {}
        dot.add_edge(pydot.Edge(ids[x], ids[y], **attrs))

    return dot.to_string()


# ---------------- Strategies ----------------
StepFn = Callable[[S, bool], Iterator[Tuple[str, S]]]


@dataclass(frozen=True)
class NormalForm(Generic[S]):
    term: S
    steps: int = 0


@dataclass(frozen=True)
class FuelExhausted(Generic[S]):
    term: S
    steps: int = 0


Outcome = Union[NormalForm, FuelExhausted]


def is_innermost(strategy: str) -> bool:
    if strategy not in ArsConfig.STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    return strategy == "applicative-order"


def reduction_sequence(step_fn: StepFn, m: S, strategy: str = "normal-order",
                       fuel: int = ArsConfig.FUEL) -> Iterator[Tuple[str, S]]:
    """The labelled steps ``strategy`` takes from ``m``, at most ``fuel`` of them.

    ``step_fn(m, innermost)`` must list leftmost-outermost steps first when
    ``innermost`` is false and leftmost-innermost steps first otherwise.
    """
    innermost = is_innermost(strategy)
    for _ in range(fuel):
        step = next(step_fn(m, innermost), None)
        if step is None:
            return
        m = step[1]
        yield step


def normalize(step_fn: StepFn, m: S, strategy: str = "normal-order",
              fuel: int = ArsConfig.FUEL) -> Outcome:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    taken = 0
    for _, m in reduction_sequence(step_fn, m, strategy, fuel):
        taken += 1
    if next(step_fn(m, False), None) is None:
        return NormalForm(m, taken)
    logger.debug(f"Fuel exhausted after {taken} {strategy} steps")
    return FuelExhausted(m, taken)
