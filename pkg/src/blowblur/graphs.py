"""Finite undirected graphs: colorings, chromatic number, girth, clique unions.

Graphs are plain values.  Nodes are ``0 .. node_count-1`` and an edge is
stored once, as a sorted pair.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import numpy as np

Edge = Tuple[int, int]


class _Infinite:
    """Girth of a forest.  Compares greater than every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __str__(self):
        return "infinite"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("blowblur.INFINITE")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INFINITE = _Infinite()


@dataclass(frozen=True)
class Graph:
    node_count: int
    edges: FrozenSet[Edge] = frozenset()

    def __post_init__(self):
        if self.node_count < 0:
            raise ValueError("node_count must be non-negative")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge ({u}, {v}) out of range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @property
    def nodes(self) -> range:
        return range(self.node_count)

    def adjacent(self, u, v) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def neighbours(self) -> List[set]:
        adj = [set() for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def has_edge_within(self, nodes: Iterable[int]) -> bool:
        ns = sorted(set(nodes))
        return any(self.adjacent(u, v) for i, u in enumerate(ns) for v in ns[i + 1:])


@dataclass(frozen=True)
class Coloring:
    assignment: Mapping[int, int] = field(default_factory=dict)

    def __getitem__(self, node):
        return self.assignment[node]

    @property
    def colors_used(self) -> int:
        return len(set(self.assignment.values()))

    def is_proper(self, g: Graph) -> bool:
        if set(self.assignment) != set(g.nodes):
            return False
        return all(self.assignment[u] != self.assignment[v] for u, v in g.edges)


def make_disjoint_cliques(count: int, size: int) -> Graph:
    """``count`` copies of K_size; block ``b`` holds nodes ``b*size .. b*size+size-1``."""
    if count < 0 or size < 0:
        raise ValueError("count and size must be non-negative")
    edges = set()
    for b in range(count):
        base = b * size
        for i in range(size):
            for j in range(i + 1, size):
                edges.add((base + i, base + j))
    return Graph(count * size, frozenset(edges))


def complete_graph(n: int) -> Graph:
    return make_disjoint_cliques(1, n) if n else Graph(0)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 nodes")
    return Graph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def disjoint_union(*graphs: Graph) -> Graph:
    edges, offset = set(), 0
    for g in graphs:
        edges.update((u + offset, v + offset) for u, v in g.edges)
        offset += g.node_count
    return Graph(offset, frozenset(edges))


# -- exact coloring ---------------------------------------------------------

def _dsatur_bnb(adj: List[set], upper: Optional[int] = None) -> Tuple[int, List[int]]:
    # DSATUR branch and bound: branch on the uncoloured vertex with most distinct
    # neighbour colours (ties: degree, then index); prune when colours >= best.
    n = len(adj)
    if n == 0:
        return 0, []
    best_k = n + 1 if upper is None else upper + 1
    best: List[int] = []
    colors = [-1] * n
    # counts[v][c] = neighbours of v coloured c
    counts = [dict() for _ in range(n)]
    degree = [len(a) for a in adj]

    def pick():
        sel, key = -1, None
        for v in range(n):
            if colors[v] < 0:
                k = (len(counts[v]), degree[v], -v)
                if key is None or k > key:
                    sel, key = v, k
        return sel

    def assign(v, c):
        colors[v] = c
        for w in adj[v]:
            counts[w][c] = counts[w].get(c, 0) + 1

    def unassign(v):
        c = colors[v]
        colors[v] = -1
        for w in adj[v]:
            k = counts[w][c] - 1
            if k:
                counts[w][c] = k
            else:
                del counts[w][c]

    def search(done, used):
        nonlocal best_k, best
        if used >= best_k:
            return
        if done == n:
            best_k, best = used, list(colors)
            return
        v = pick()
        for c in range(used):
            if c not in counts[v]:
                assign(v, c)
                search(done + 1, used)
                unassign(v)
                if used >= best_k:
                    return
        if used + 1 < best_k:
            assign(v, used)
            search(done + 1, used + 1)
            unassign(v)

    search(0, 0)
    return best_k, best


def minimum_coloring(g: Graph) -> Coloring:
    """An optimal proper coloring (exact; meant for graphs up to ~60 nodes)."""
    adj = g.neighbours()
    # solve components separately; colours are reused across components
    seen = [False] * g.node_count
    assignment: Dict[int, int] = {}
    for s in g.nodes:
        if seen[s]:
            continue
        comp, queue = [], deque([s])
        seen[s] = True
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        comp.sort()
        index = {v: i for i, v in enumerate(comp)}
        sub = [{index[w] for w in adj[v]} for v in comp]
        _, cols = _dsatur_bnb(sub)
        # relabel colours by first appearance so the output is canonical
        relabel: Dict[int, int] = {}
        for v, c in zip(comp, cols):
            assignment[v] = relabel.setdefault(c, len(relabel))
    return Coloring(dict(sorted(assignment.items())))


def chromatic_number(g: Graph) -> int:
    c = minimum_coloring(g)
    return c.colors_used


def independent_partition(g: Graph, c: Coloring) -> List[FrozenSet[int]]:
    """Colour classes of a proper coloring, indexed by colour."""
    if not c.is_proper(g):
        raise ValueError("coloring is not proper for this graph")
    if not c.assignment:
        return []
    k = max(c.assignment.values()) + 1
    classes: List[set] = [set() for _ in range(k)]
    for v, col in c.assignment.items():
        classes[col].add(v)
    return [frozenset(s) for s in classes if s]


# -- girth ------------------------------------------------------------------

def girth(g: Graph):
    """Length of a shortest cycle, or ``INFINITE`` for a forest."""
    adj = g.neighbours()
    best = None
    for s in g.nodes:
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            if best is not None and 2 * dist[v] + 1 >= best:
                break
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    queue.append(w)
                elif parent[v] != w:
                    length = dist[v] + dist[w] + 1
                    if best is None or length < best:
                        best = length
    return INFINITE if best is None else best


# -- random graphs -----------------------------------------------------------

def sample_random_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p) sample.

    Draws come from numpy's PCG64 bit generator seeded with ``seed`` (taken
    mod 2**64).  Pairs ``(u, v)``, ``u < v``, are visited in lexicographic
    order and each consumes one ``random()`` double; the edge is kept when
    the draw is ``< p``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed % (1 << 64)))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    draws = rng.random(len(pairs))
    return Graph(n, frozenset(pr for pr, x in zip(pairs, draws) if x < p))


# -- text format ---------------------------------------------------------------

def format_graph(g: Graph) -> str:
    lines = [f"nodes {g.node_count}"]
    lines += [f"edge {u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "nodes" and len(parts) == 2 and n is None:
            n = int(parts[1])
        elif parts[0] == "edge" and len(parts) == 3 and n is not None:
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
    if n is None:
        raise ValueError("missing 'nodes <N>' header")
    return Graph(n, frozenset(edges))
