"""Directed multigraphs, transition matrices, and symbolic-word machinery.

Countable vertex/edge sets are handled through deterministic enumerations:
every operation that needs concrete data materializes a finite prefix (a
"horizon") and records how much it looked at.  Nothing here mutates shared
state; the one cache (TruncationLadder's connector table) is append-only so
ladders stay monotone across stages.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConnectorSearchExhausted, NonSimpleGraph

DEFAULT_CONNECTOR_BUDGET = 64


class Enumeration:
    """Deterministic enumeration of a finite or countable set.

    Finite sets are built from a sequence; countable ones from a zero-arg
    factory returning a fresh iterator.  Prefixes are cached, so indexing is
    stable for the lifetime of the object.
    """

    def __init__(self, items=None, factory=None):
        if (items is None) == (factory is None):
            raise ValueError("exactly one of items/factory required")
        if items is not None:
            self._cache = list(items)
            self._iter = None
            self._finite = True
        else:
            self._cache = []
            self._iter = factory()
            self._finite = False

    @property
    def is_finite(self):
        return self._finite

    @property
    def size(self):
        """Number of elements, or None when countably infinite."""
        return len(self._cache) if self._finite else None

    def prefix(self, k):
        """First min(k, size) elements as a list."""
        if k < 0:
            raise ValueError("negative prefix length")
        while not self._finite and len(self._cache) < k:
            try:
                self._cache.append(next(self._iter))
            except StopIteration:
                self._finite = True
                break
        return self._cache[:k]

    def __contains__(self, item):
        # Only sound for finite enumerations; countable membership is the
        # caller's problem (they hold the defining rule).
        if not self._finite:
            raise ValueError("membership test on countable enumeration")
        return item in self._cache


def finite_enumeration(items):
    return Enumeration(items=list(items))


@dataclass(frozen=True)
class DirectedMultigraph:
    """Directed multigraph with countably many vertices and edges.

    `initial`/`terminal` map an edge id to its endpoints.  `has_edge` is an
    optional fast predicate for simple graphs (at most one edge per ordered
    vertex pair); when absent it is derived from the materialized edge list.
    `simple` records what the constructor knows: True/False, or None for
    "verify on a prefix when asked".
    """

    vertices: Enumeration
    edges: Enumeration
    initial: Callable
    terminal: Callable
    simple: Optional[bool] = None
    has_edge: Optional[Callable] = None

    def edge_prefix(self, k):
        return self.edges.prefix(k)

    def vertex_prefix(self, k):
        return self.vertices.prefix(k)

    def check_simple(self, edge_horizon):
        """Raise NonSimpleGraph if a parallel edge pair is materialized."""
        if self.simple is False:
            raise NonSimpleGraph("graph declared non-simple")
        seen = {}
        for e in self.edge_prefix(edge_horizon):
            key = (self.initial(e), self.terminal(e))
            if key in seen:
                raise NonSimpleGraph(
                    f"parallel edges {seen[key]!r} and {e!r} on pair {key}"
                )
            seen[key] = e
        return True

    def edge_between(self, v, u, edge_horizon):
        """The unique edge v->u within the horizon, or None (simple graphs)."""
        for e in self.edge_prefix(edge_horizon):
            if self.initial(e) == v and self.terminal(e) == u:
                return e
        return None


@dataclass(frozen=True)
class TransitionMatrix:
    """0-1 transition structure over a countable, enumerated state set.

    `entry(a, b)` decides admissibility of the two-letter word ab.  An
    optional `successors_within(a, states)` accelerates row scans; the default
    filters the supplied state list through `entry`.
    """

    states: Enumeration
    entry: Callable
    successors_within: Optional[Callable] = None

    def row(self, a, states):
        if self.successors_within is not None:
            return list(self.successors_within(a, states))
        return [b for b in states if self.entry(a, b)]

    def materialize(self, k):
        return FiniteTransition.from_matrix(self, k)


class FiniteTransition:
    """Materialized k-state view: index maps, successor lists, dense matrix."""

    def __init__(self, states, succ_indices):
        self.states = list(states)
        self.index = {s: i for i, s in enumerate(self.states)}
        self.succ = [sorted(row) for row in succ_indices]
        n = len(self.states)
        self._dense = None
        self.n = n

    @classmethod
    def from_matrix(cls, matrix, k):
        states = matrix.states.prefix(k)
        index = {s: i for i, s in enumerate(states)}
        succ = [
            [index[b] for b in matrix.row(a, states)]
            for a in states
        ]
        return cls(states, succ)

    @classmethod
    def from_pairs(cls, states, pairs):
        index = {s: i for i, s in enumerate(states)}
        succ = [[] for _ in states]
        for a, b in pairs:
            succ[index[a]].append(index[b])
        return cls(states, succ)

    def entry(self, a, b):
        return self.index[b] in set(self.succ[self.index[a]])

    @property
    def dense(self):
        if self._dense is None:
            m = np.zeros((self.n, self.n), dtype=np.int8)
            for i, row in enumerate(self.succ):
                m[i, row] = 1
            self._dense = m
        return self._dense

    def out_degree(self, i):
        return len(self.succ[i])


@dataclass(frozen=True)
class SccDecomposition:
    """Strongly connected classes in dependency order (upstream first).

    A class is trivial when it is a single state without a self-loop; such
    classes carry no periodic words and are kept but flagged.
    """

    classes: tuple
    trivial: tuple
    horizon: int

    def nontrivial_classes(self):
        return [c for c, t in zip(self.classes, self.trivial) if not t]


def build_edge_transition(graph: DirectedMultigraph) -> TransitionMatrix:
    """Edge-coding transitions: ee' admissible iff terminal(e) == initial(e')."""

    def entry(e, e2):
        return graph.terminal(e) == graph.initial(e2)

    def successors_within(e, states):
        v = graph.terminal(e)
        return [e2 for e2 in states if graph.initial(e2) == v]

    return TransitionMatrix(graph.edges, entry, successors_within)


def build_vertex_transition(
    graph: DirectedMultigraph, edge_horizon=4096
) -> TransitionMatrix:
    """Vertex-coding transitions for simple graphs: vu admissible iff the
    edge vu exists.  Raises NonSimpleGraph on parallel edges."""
    if graph.has_edge is not None:
        if graph.simple is False:
            raise NonSimpleGraph("graph declared non-simple")
        return TransitionMatrix(graph.vertices, graph.has_edge)
    graph.check_simple(edge_horizon)
    pairs = {
        (graph.initial(e), graph.terminal(e))
        for e in graph.edge_prefix(edge_horizon)
    }
    return TransitionMatrix(graph.vertices, lambda v, u: (v, u) in pairs)


def strongly_connected_components(matrix, horizon) -> SccDecomposition:
    """Tarjan's algorithm (iterative) on the first `horizon` states.

    Classes come out in dependency order: if any edge runs from class X to
    class Y (X != Y) then X appears before Y.
    """
    fin = matrix if isinstance(matrix, FiniteTransition) else matrix.materialize(horizon)
    n = fin.n
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = itertools.count()

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = next(counter)
                stack.append(v)
                on_stack[v] = True
            advanced = False
            row = fin.succ[v]
            while pi < len(row):
                w = row[pi]
                pi += 1
                if index[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])

    # Tarjan emits sinks first; dependency order is the reverse.
    comps.reverse()
    classes = tuple(tuple(fin.states[i] for i in comp) for comp in comps)
    trivial = tuple(
        len(comp) == 1 and comp[0] not in fin.succ[comp[0]]
        for comp in comps
    )
    return SccDecomposition(classes=classes, trivial=trivial, horizon=fin.n)


def is_irreducible(matrix, horizon=None) -> bool:
    """Whole materialized state set forms one class with a periodic word."""
    fin = matrix if isinstance(matrix, FiniteTransition) else matrix.materialize(horizon)
    if fin.n == 0:
        return False
    dec = strongly_connected_components(fin, fin.n)
    if len(dec.classes) != 1:
        return False
    return not dec.trivial[0]


class TruncationLadder:
    """Monotone ladder of irreducible truncations of a countable matrix.

    Stage n starts from the first n states T_n, adds every letter of a cached
    connector word for each ordered pair in T_n x T_n, and grants S_n-minus-T_n
    states only the transitions their connectors use.  Caching connectors
    (first stage that needs a pair wins, lexicographically-first shortest BFS
    word) makes stages nested: S_n grows, matrices grow entrywise, and every
    stage matrix is dominated by the original.
    """

    def __init__(self, matrix: TransitionMatrix, budget=DEFAULT_CONNECTOR_BUDGET,
                 search_horizon=None):
        self.matrix = matrix
        self.budget = budget
        self.search_horizon = search_horizon
        self._connectors = {}          # (i, j) -> tuple of intermediate letters

    def connector(self, i, j, horizon=None):
        """Shortest word w (possibly empty) with i . w . j admissible."""
        key = (i, j)
        if key in self._connectors:
            return self._connectors[key]
        horizon = self.search_horizon or horizon or 256
        states = self.matrix.states.prefix(horizon)
        if i not in states or j not in states:
            raise ConnectorSearchExhausted(i, j, self.budget)
        # BFS over suffixes; parents reconstruct the path.  Expansion follows
        # enumeration order, so the shortest connector is deterministic.
        parent = {i: None}
        frontier = deque([(i, 0)])
        found = False
        while frontier:
            a, depth = frontier.popleft()
            if depth > self.budget:
                break
            for b in self.matrix.row(a, states):
                if b == j:
                    parent.setdefault(("goal",), a)
                    found = True
                    frontier.clear()
                    break
                if b not in parent and depth + 1 <= self.budget:
                    parent[b] = a
                    frontier.append((b, depth + 1))
        if not found:
            raise ConnectorSearchExhausted(i, j, self.budget)
        word = []
        a = parent[("goal",)]
        while a != i:
            word.append(a)
            a = parent[a]
        word.reverse()
        self._connectors[key] = tuple(word)
        return self._connectors[key]

    def stage(self, n):
        """States S_n and matrix A_n of the n-th truncation."""
        base = self.matrix.states.prefix(n)
        if len(base) < n:
            n = len(base)   # finite set ran out; use everything
        allowed = set()     # transitions granted to connector-only states
        order = list(base)
        seen = set(base)
        horizon = max(256, 4 * n)
        for i in base:
            for j in base:
                w = self.connector(i, j, horizon=horizon)
                full = (i, *w, j)
                for a, b in zip(full, full[1:]):
                    allowed.add((a, b))
                for a in w:
                    if a not in seen:
                        seen.add(a)
                        order.append(a)
        states = order
        base_set = set(base)
        state_set = set(states)
        pairs = []
        for a in states:
            if a in base_set:
                for b in self.matrix.row(a, states):
                    pairs.append((a, b))
            else:
                for (x, b) in allowed:
                    if x == a and b in state_set:
                        pairs.append((a, b))
        fin = FiniteTransition.from_pairs(states, pairs)
        return TruncationStage(base=tuple(base), states=tuple(states), matrix=fin)


@dataclass(frozen=True)
class TruncationStage:
    base: tuple       # T_n, the first n states
    states: tuple     # S_n in deterministic order (T_n first)
    matrix: FiniteTransition


def irreducible_truncation(matrix, n, ladder=None, budget=DEFAULT_CONNECTOR_BUDGET,
                           search_horizon=None):
    """One stage of an irreducible-truncation ladder.

    Pass the same `ladder` object across calls to get the nested family;
    a fresh ladder is created otherwise.
    """
    if ladder is None:
        ladder = TruncationLadder(matrix, budget=budget, search_horizon=search_horizon)
    return ladder.stage(n), ladder


def admissible_words(matrix, length, alphabet):
    """All admissible words of `length` letters over `alphabet`, DFS in
    lexicographic order with respect to the alphabet's order."""
    if length < 1:
        raise ValueError("word length must be >= 1")
    alphabet = list(alphabet)
    fin = isinstance(matrix, FiniteTransition)

    def successors(a):
        if fin:
            ia = matrix.index[a]
            allowed = set(matrix.succ[ia])
            return [b for b in alphabet if matrix.index.get(b, -1) in allowed]
        return [b for b in matrix.row(a, alphabet)]

    def extend(prefix):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        for b in successors(prefix[-1]):
            prefix.append(b)
            yield from extend(prefix)
            prefix.pop()

    for a in alphabet:
        yield from extend([a])
