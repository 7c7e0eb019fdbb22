"""The infinite atom structures, described intensionally.

Nothing infinite is ever materialised: a spec is a consistency oracle over
symbolic atoms, and every exhaustive check goes through :func:`truncate`,
which cuts the rows (or clique copies) down to a finite window.

Three constructions are provided:

* :func:`alpha_of_graph` -- atoms ``Id`` and ``(node, colour)`` for nodes of a
  graph and colours ``< n``;
* :func:`blur_structure` -- the finite algebra ``M`` split into rows and
  blurred by all 2-element subsets of its atoms;
* :func:`f_l_mu` -- blurs of size ``l`` with ``mu`` tags each.
"""
from __future__ import annotations

from itertools import combinations, product
from typing import Hashable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .finite_ra import FiniteAtomStructure
from .graphs import Graph, make_disjoint_cliques


class _Identity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Id"

    def __reduce__(self):
        return (_Identity, ())


IDENTITY = _Identity()


class GraphAtom(NamedTuple):
    node: int
    color: int

    def __repr__(self):
        return f"({self.node},{self.color})"


class Blur(NamedTuple):
    """A blur: a set of base atoms (kept as a tuple in ``I`` order) and a tag."""
    members: Tuple
    tag: int = 0

    def __repr__(self):
        core = "{" + ",".join(map(str, self.members)) + "}"
        return core if self.tag == 0 else f"({core},{self.tag})"


class BlurAtom(NamedTuple):
    row: int
    base: Hashable
    blur: Blur

    def __repr__(self):
        return f"a{self.row}^{{{self.base},{self.blur!r}}}"


class Truncation(NamedTuple):
    depth: int = 8
    copies: Optional[int] = None


def evenly_distributed(i: int, j: int, k: int) -> bool:
    """True iff some arrangement p, q, r of the set {i, j, k} has r - q == q - p.

    Repeated values collapse, so ``(0, 0, 0)`` qualifies while ``(1, 1, 2)``
    does not.
    """
    vals = {i, j, k}
    return any({p, q, r} == vals and r - q == q - p
               for p, q, r in product(vals, repeat=3))


def _even_arrays(i, j, k):
    # same relation in closed form; only all-equal or distinct progressions pass
    return (i + j == 2 * k) | (i + k == 2 * j) | (j + k == 2 * i)


def even_completions(i: int, j: int) -> List[int]:
    """All rows k >= 0 with ``evenly_distributed(i, j, k)``."""
    if i == j:
        return [i]
    out = {2 * j - i, 2 * i - j}
    if (i + j) % 2 == 0:
        out.add((i + j) // 2)
    return sorted(k for k in out if k >= 0)


# -- specs ------------------------------------------------------------------

class AtomStructureSpec:
    """Base class.  Subclasses supply ``consistent`` and the finite window."""

    kind: str = ""
    identity = IDENTITY

    def converse(self, a):
        return a

    def consistent(self, a, b, c) -> bool:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError

    def window_atoms(self, t: Truncation) -> List:
        raise NotImplementedError

    def _diversity_tensor(self, atoms: List) -> np.ndarray:
        # fallback: scalar oracle on every triple
        n = len(atoms)
        out = np.zeros((n, n, n), dtype=bool)
        for x, y, z in product(range(n), repeat=3):
            out[x, y, z] = self.consistent(atoms[x], atoms[y], atoms[z])
        return out


def _identity_consistent(a, b, c):
    # None if no identity atom is involved
    ids = (a is IDENTITY) + (b is IDENTITY) + (c is IDENTITY)
    if not ids:
        return None
    if a is IDENTITY:
        return b == c
    if b is IDENTITY:
        return a == c
    return a == b


class CliqueScheme(NamedTuple):
    """Countably many disjoint ``size``-cliques; node ``v`` sits in clique
    ``v // size`` at position ``v % size``."""
    size: int

    def adjacent(self, u: int, v: int) -> bool:
        return u != v and u // self.size == v // self.size

    def window(self, copies: int) -> Graph:
        return make_disjoint_cliques(copies, self.size)


class AlphaSpec(AtomStructureSpec):
    kind = "alpha_of_graph"

    def __init__(self, graph, n: int):
        if n < 2:
            raise ValueError("need at least two colours")
        self.graph = graph
        self.n = n

    @property
    def unbounded(self) -> bool:
        return isinstance(self.graph, CliqueScheme)

    def consistent(self, a, b, c) -> bool:
        r = _identity_consistent(a, b, c)
        if r is not None:
            return r
        if not (a.color == b.color == c.color):
            return True
        g = self.graph
        return g.adjacent(a.node, b.node) or g.adjacent(a.node, c.node) or g.adjacent(b.node, c.node)

    def window_graph(self, t: Truncation) -> Graph:
        if isinstance(self.graph, CliqueScheme):
            copies = t.copies if t.copies is not None else 1
            return self.graph.window(copies)
        return self.graph

    def window_atoms(self, t: Truncation) -> List:
        g = self.window_graph(t)
        return [IDENTITY] + [GraphAtom(v, i) for v in g.nodes for i in range(self.n)]

    def params(self) -> dict:
        if isinstance(self.graph, CliqueScheme):
            return {"construction": "alpha", "clique_size": self.graph.size, "n": self.n}
        return {"construction": "alpha", "graph": {"nodes": self.graph.node_count,
                                                   "edges": sorted(map(list, self.graph.edges))},
                "n": self.n}

    def _diversity_tensor(self, atoms):
        nodes = np.array([a.node for a in atoms])
        colors = np.array([a.color for a in atoms])
        size = nodes.max() + 1 if len(nodes) else 0
        adj = np.zeros((size, size), dtype=bool)
        if isinstance(self.graph, CliqueScheme):
            blk = np.arange(size) // self.graph.size
            adj = (blk[:, None] == blk[None, :]) & ~np.eye(size, dtype=bool)
        else:
            for u, v in self.graph.edges:
                if u < size and v < size:
                    adj[u, v] = adj[v, u] = True
        A = adj[np.ix_(nodes, nodes)]
        same = colors[:, None] == colors[None, :]
        n = len(atoms)
        out = np.empty((n, n, n), dtype=bool)
        for x in range(n):
            mono = same[x][:, None] & same[x][None, :]
            edge = A[x][:, None] | A[x][None, :] | A
            out[x] = ~mono | edge
        return out


class BlurSpec(AtomStructureSpec):
    """Atoms ``a_i^{P,W}`` with ``P`` in blur ``W``.

    A diversity triple is consistent iff the three blurs have no common base
    (:meth:`disjoint_ok`) or the rows are evenly distributed and the bases
    pass :meth:`base_ok`.
    """

    def __init__(self, I: Sequence, blurs: Sequence[Blur], kind: str, extra: dict):
        self.I = tuple(I)
        self.pos = {p: k for k, p in enumerate(self.I)}
        self.blurs = tuple(blurs)
        self.blur_index = {w: k for k, w in enumerate(self.blurs)}
        self.kind = kind
        self._extra = dict(extra)
        self._mask = {w: sum(1 << self.pos[p] for p in w.members) for w in self.blurs}

    # the two ingredients of the oracle; doctored specs override these
    def disjoint_ok(self, S: Blur, Z: Blur, W: Blur) -> bool:
        return not (self._mask[S] & self._mask[Z] & self._mask[W])

    def base_ok(self, P, Q, R) -> bool:
        raise NotImplementedError

    def consistent(self, a, b, c) -> bool:
        r = _identity_consistent(a, b, c)
        if r is not None:
            return r
        if self.disjoint_ok(a.blur, b.blur, c.blur):
            return True
        return evenly_distributed(a.row, b.row, c.row) and self.base_ok(a.base, b.base, c.base)

    def row_atoms(self, row: int) -> List[BlurAtom]:
        return [BlurAtom(row, p, w) for w in self.blurs for p in w.members]

    def window_atoms(self, t: Truncation) -> List:
        out = [IDENTITY]
        for i in range(t.depth):
            out.extend(self.row_atoms(i))
        return out

    def params(self) -> dict:
        d = {"construction": self.kind, "I": list(self.I)}
        d.update(self._extra)
        return d

    def _base_table(self) -> np.ndarray:
        if getattr(self, "_bt", None) is not None:
            return self._bt
        k = len(self.I)
        t = np.zeros((k, k, k), dtype=bool)
        for (a, P), (b, Q), (c, R) in product(enumerate(self.I), repeat=3):
            t[a, b, c] = self.base_ok(P, Q, R)
        t.setflags(write=False)
        self._bt = t
        return t

    def _disjoint_table(self) -> np.ndarray:
        if getattr(self, "_dt", None) is not None:
            return self._dt
        m = len(self.blurs)
        if type(self).disjoint_ok is BlurSpec.disjoint_ok and len(self.I) <= 62:
            masks = np.array([self._mask[w] for w in self.blurs], dtype=np.int64)
            t = (masks[:, None, None] & masks[None, :, None] & masks[None, None, :]) == 0
        else:
            t = np.zeros((m, m, m), dtype=bool)
            for (a, S), (b, Z), (c, W) in product(enumerate(self.blurs), repeat=3):
                t[a, b, c] = self.disjoint_ok(S, Z, W)
        t.setflags(write=False)
        self._dt = t
        return t

    def triple_block(self, xs: List, ys: List, zs: List) -> np.ndarray:
        """``out[x, y, z]`` = consistency of ``(xs[x], ys[y], zs[z])``; diversity atoms only."""
        def cols(atoms):
            return (np.array([a.row for a in atoms], dtype=np.int64),
                    np.array([self.pos[a.base] for a in atoms], dtype=np.intp),
                    np.array([self.blur_index[a.blur] for a in atoms], dtype=np.intp))
        (r1, p1, w1), (r2, p2, w2), (r3, p3, w3) = cols(xs), cols(ys), cols(zs)
        B, D = self._base_table(), self._disjoint_table()
        ev = _even_arrays(r1[:, None, None], r2[None, :, None], r3[None, None, :])
        ok = B[p1[:, None, None], p2[None, :, None], p3[None, None, :]]
        dj = D[w1[:, None, None], w2[None, :, None], w3[None, None, :]]
        return dj | (ev & ok)

    def _diversity_tensor(self, atoms):
        rows = np.array([a.row for a in atoms])
        bases = np.array([self.pos[a.base] for a in atoms])
        blurs = np.array([self.blur_index[a.blur] for a in atoms])
        B = self._base_table()
        D = self._disjoint_table()
        n = len(atoms)
        out = np.empty((n, n, n), dtype=bool)
        r2, r3 = rows[:, None], rows[None, :]
        for x in range(n):
            ev = _even_arrays(rows[x], r2, r3)
            ok = B[bases[x]][np.ix_(bases, bases)]
            dj = D[blurs[x]][np.ix_(blurs, blurs)]
            out[x] = dj | (ev & ok)
        return out


class _MBlurSpec(BlurSpec):
    def __init__(self, M: FiniteAtomStructure, I, blurs):
        super().__init__(I, blurs, "blur", {})
        self.M = M

    def base_ok(self, P, Q, R) -> bool:
        # P <= Q ; R in M
        return self.M.consistent(Q, R, P)


class _FlmuSpec(BlurSpec):
    def base_ok(self, P, Q, R) -> bool:
        return len({P, Q, R}) != 1


def alpha_of_graph(graph, n: int) -> AlphaSpec:
    """Atom structure with ``Id`` and ``(node, colour)`` atoms; ``graph`` is a
    finite :class:`Graph` or a :class:`CliqueScheme`."""
    return AlphaSpec(graph, n)


def atom_names(k: int) -> List[str]:
    """``A, B, C, ...`` for up to 26 atoms, ``P0, P1, ...`` beyond."""
    if k <= 26:
        return [chr(ord("A") + i) for i in range(k)]
    return [f"P{i}" for i in range(k)]


def two_subsets(I: Sequence) -> List[Blur]:
    return [Blur(tuple(c)) for c in combinations(I, 2)]


def blur_structure(M: FiniteAtomStructure, J: Optional[Sequence] = None) -> BlurSpec:
    I = M.diversity_atoms
    if len(I) < 6:
        raise ValueError("the blur construction needs at least 6 diversity atoms")
    full = two_subsets(I)
    if J is not None:
        given = {frozenset(w.members if isinstance(w, Blur) else w) for w in J}
        if given != {frozenset(w.members) for w in full}:
            raise ValueError("J must be the family of all 2-element subsets of I")
    return _MBlurSpec(M, I, full)


def f_l_mu(I: Sequence, l: int, mu: int) -> BlurSpec:
    I = list(I)
    if len(set(I)) != len(I):
        raise ValueError("duplicate atom names")
    if l < 2:
        raise ValueError("l must be at least 2")
    if len(I) < 3 * l:
        raise ValueError("need |I| >= 3l")
    if not 1 <= mu:
        raise ValueError("mu must be a positive integer")
    blurs = [Blur(tuple(X), t) for X in combinations(I, l) for t in range(mu)]
    return _FlmuSpec(I, blurs, "f_l_mu", {"l": l, "mu": mu})


def truncate(spec: AtomStructureSpec, t: Truncation = Truncation(), max_atoms: int = 800) -> FiniteAtomStructure:
    """The finite structure on the atoms of the window ``t``."""
    if t.depth < 1:
        raise ValueError("depth must be at least 1")
    atoms = spec.window_atoms(t)
    n = len(atoms)
    if n > max_atoms:
        raise ValueError(f"window has {n} atoms; the dense table is limited to {max_atoms} (lower the depth)")
    table = np.zeros((n, n, n), dtype=bool)
    div = [a for a in atoms[1:]]
    table[1:, 1:, 1:] = spec._diversity_tensor(div)
    table[0] = np.eye(n, dtype=bool)
    table[:, 0, :] = np.eye(n, dtype=bool)
    table[:, :, 0] = np.eye(n, dtype=bool)
    return FiniteAtomStructure(atoms, IDENTITY, {a: spec.converse(a) for a in atoms}, table)


def spec_from_params(d: dict) -> AtomStructureSpec:
    from .finite_ra import make_M
    kind = d.get("construction")
    if kind == "blur":
        return blur_structure(make_M(d["I"]))
    if kind == "f_l_mu":
        return f_l_mu(d["I"], int(d["l"]), int(d["mu"]))
    if kind == "alpha":
        if "clique_size" in d:
            return alpha_of_graph(CliqueScheme(int(d["clique_size"])), int(d["n"]))
        g = d["graph"]
        return alpha_of_graph(Graph(int(g["nodes"]), frozenset(map(tuple, g["edges"]))), int(d["n"]))
    raise ValueError(f"unknown construction {kind!r}")


# -- labelled triangles -------------------------------------------------------

class _Rho:
    def __repr__(self):
        return "rho"

    def __reduce__(self):
        return "RHO"


RHO = _Rho()


def valid_labelled_triangle(e1, e2, e3, g) -> bool:
    """Whether three edge labels ``(a, i), (b, j), (c, l)`` may meet in a
    triangle, for labels drawn from (nodes of ``g`` plus ``RHO``) x colours.

    The labels are those of the edges ``yx``, ``yz`` and ``xz``.
    """
    (a, i), (b, j), (c, l) = e1, e2, e3
    if len({i, j, l}) > 1:
        return True
    labels = (a, b, c)
    rhos = sum(x is RHO for x in labels)
    if rhos == 0:
        return g.has_edge_within(labels)
    if rhos == 1:
        u, v = [x for x in labels if x is not RHO]
        return u != v and g.adjacent(u, v)
    return True
