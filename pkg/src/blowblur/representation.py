"""Step-by-step construction of a consistent coloured graph and the map rep.

Edges are labelled by ultrafilters of the term algebra: principal ones
``U^a`` and blur ones ``U^W``.  Labels are interned, so the graph keeps an
integer matrix of label ids and the label list alongside it.

Defects are generated lazily.  Every new unordered node pair gets one batch
in a FIFO queue; when the batch reaches the front its demands are computed
from the generator sample and processed in order.
"""
from __future__ import annotations

import json
from collections import deque
from itertools import combinations
from typing import Dict, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .blowup import IDENTITY, BlurSpec
from .symbolic import (BlurFilter, Principal, TermElement, complement, compose, full_blur, in_ultrafilter,
                       join, meet, singleton, uf_triple_consistent)

ID_LABEL = Principal(IDENTITY)


class NoBlurAvailable(RuntimeError):
    """No blur colour fits a new edge; conditions (i)-(iii) must fail."""


class Defect(NamedTuple):
    x: int
    y: int
    F: object
    K: object

    def as_list(self):
        return [self.x, self.y, repr(self.F), repr(self.K)]


def _uf_key(labels):
    return tuple(sorted(labels, key=repr))


class ColoredGraph:
    """Nodes ``0 .. n-1`` with a symmetric ultrafilter labelling.

    ``queue`` holds pending pair batches ``(u, v)``; ``active`` holds the
    defects of the batch being worked through.
    """

    def __init__(self, spec: BlurSpec):
        self.spec = spec
        self.labels: List = [ID_LABEL]
        self._label_id: Dict = {ID_LABEL: 0}
        self._ids = np.zeros((8, 8), dtype=np.int32)
        self.n = 1
        self.queue: deque = deque([(0, 0)])
        self.active: deque = deque()
        self.step_log: List[dict] = []
        self.steps = 0
        self.dequeued: List[Tuple[Defect, int]] = []
        self.finished_pairs: set = set()
        self._uf_cache: Dict = {}
        self._demand_cache: Dict = {}

    # -- labels ------------------------------------------------------------
    @property
    def nodes(self) -> range:
        return range(self.n)

    def intern(self, label) -> int:
        k = self._label_id.get(label)
        if k is None:
            k = self._label_id[label] = len(self.labels)
            self.labels.append(label)
        return k

    @property
    def label_ids(self) -> np.ndarray:
        return self._ids[:self.n, :self.n]

    def label(self, x: int, y: int):
        return self.labels[self._ids[x, y]]

    def _grow(self):
        cap = self._ids.shape[0]
        if self.n >= cap:
            bigger = np.zeros((2 * cap, 2 * cap), dtype=np.int32)
            bigger[:cap, :cap] = self._ids
            self._ids = bigger

    def _set(self, x, y, label):
        k = self.intern(label)
        self._ids[x, y] = self._ids[y, x] = k

    def uf(self, F, G, K) -> bool:
        key = _uf_key((F, G, K))
        r = self._uf_cache.get(key)
        if r is None:
            r = self._uf_cache[key] = uf_triple_consistent(self.spec, F, G, K)
        return r

    def edges(self) -> Iterable[Tuple[int, int, object]]:
        for x, y in combinations(range(self.n), 2):
            yield x, y, self.label(x, y)

    def export_log(self) -> str:
        """The step log as line-delimited JSON."""
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.step_log)


def new_graph(spec: BlurSpec) -> ColoredGraph:
    return ColoredGraph(spec)


def graph_violations(g: ColoredGraph) -> List[str]:
    """Full rescan of the three consistent-coloured-graph conditions."""
    out = []
    ids = g.label_ids
    if not np.array_equal(ids, ids.T):
        out.append("labelling is not symmetric")
    diag = np.diag(ids) == 0
    if not diag.all():
        out.append("diagonal label other than U^Id")
    off = (ids == 0) & ~np.eye(g.n, dtype=bool)
    if off.any():
        out.append("U^Id on an edge between distinct nodes")
    for code in _triangle_codes(ids, len(g.labels)):
        a, b, c = _decode(code, len(g.labels))
        if not g.uf(g.labels[a], g.labels[b], g.labels[c]):
            out.append(f"inconsistent triangle {g.labels[a]!r} {g.labels[b]!r} {g.labels[c]!r}")
    return out


def _triangle_codes(ids: np.ndarray, L: int) -> np.ndarray:
    # distinct (l(x,y), l(x,z), l(y,z)) over all node triples, as integer codes
    n = ids.shape[0]
    seen = set()
    for x in range(n):
        codes = (ids[x][:, None].astype(np.int64) * L + ids[x][None, :]) * L + ids
        seen.update(np.unique(codes).tolist())
    return np.array(sorted(seen), dtype=np.int64)


def _decode(code, L):
    code = int(code)
    return code // (L * L), (code // L) % L, code % L


# -- extension ---------------------------------------------------------------

def extend(g: ColoredGraph, d: Defect, check: bool = False) -> int:
    """Add a node ``z`` with ``l(z,x) = F`` and ``l(z,y) = K``; returns ``z``.

    Every other edge from ``z`` gets the least blur (in the order of ``J``)
    compatible with both triangles through ``x`` and ``y``.
    """
    if not g.uf(g.label(d.x, d.y), d.F, d.K):
        raise ValueError(f"defect {d} is not a consistent triple")
    if d.F == ID_LABEL or d.K == ID_LABEL:
        raise ValueError("a new node cannot carry U^Id to an old one")
    g._grow()
    z = g.n
    chosen = {}
    for p in range(g.n):
        if p == d.x or p == d.y:
            continue
        lx, ly = g.label(d.x, p), g.label(d.y, p)
        for W in g.spec.blurs:
            c = BlurFilter(W)
            if g.uf(c, d.F, lx) and g.uf(c, d.K, ly):
                chosen[p] = c
                break
        else:
            raise NoBlurAvailable(f"no blur for edge to node {p} when adding a witness for {d}")
    g.n += 1
    g._ids[z, z] = 0
    g._set(z, d.x, d.F)
    g._set(z, d.y, d.K)
    for p, c in chosen.items():
        g._set(z, p, c)
    for p in range(z + 1):
        g.queue.append((min(p, z), max(p, z)) if p != z else (z, z))
    if check:
        bad = graph_violations(g)
        if bad:
            raise AssertionError(bad[0])
    g._last_blurs = sorted({repr(c.blur) for c in chosen.values()})
    return z


# -- witnesses -----------------------------------------------------------------

def _first_consistent(spec, xs, ys, a):
    """Least pair (b, c) from xs x ys with (b, c, a) consistent, in list order."""
    if a is IDENTITY:
        yset = set(ys)
        for b in xs:
            if b in yset:
                return b, b
        return None
    if IDENTITY in xs and a in ys:
        return IDENTITY, a
    if IDENTITY in ys and a in xs:
        return a, IDENTITY
    xd = [b for b in xs if b is not IDENTITY]
    yd = [c for c in ys if c is not IDENTITY]
    if not xd or not yd:
        return None
    hit = spec.triple_block(xd, yd, [a])[:, :, 0]
    if not hit.any():
        return None
    i, j = np.argwhere(hit)[0]
    return xd[i], yd[j]


def _candidates(X: TermElement, bound: int) -> List:
    out = [BlurFilter(w) for w, s in X.slices if s.cofinite]
    out += [Principal(a) for a in X.atoms_below(bound)]
    return out


def choose_witness(g: ColoredGraph, L, X: TermElement, Y: TermElement) -> Optional[Tuple]:
    """Labels ``(F, K)`` with ``X in F``, ``Y in K`` and ``(L, F, K)`` consistent.

    Follows the two cases of the proof and falls back on a bounded search.
    Returns None when ``X;Y`` is not in ``L``.
    """
    spec = g.spec
    bound = 3 * (max(X.max_row(), Y.max_row(), getattr(getattr(L, "atom", None), "row", 0)) + 1) + 3
    if isinstance(L, Principal):
        # Case 1: atoms b in X, c in Y with a <= b;c
        pair = _first_consistent(spec, list(X.atoms_below(bound)), list(Y.atoms_below(bound)), L.atom)
        return None if pair is None else (Principal(pair[0]), Principal(pair[1]))
    options = []
    if X.is_finite and Y.is_finite:
        for b in X.atoms_below(bound):
            for c in Y.atoms_below(bound):
                options.append((Principal(b), Principal(c)))
    else:
        xs = [BlurFilter(w) for w, s in X.slices if s.cofinite]
        ys = [BlurFilter(w) for w, s in Y.slices if s.cofinite]
        xa = [Principal(a) for a in X.atoms_below(bound) if a is not IDENTITY]
        ya = [Principal(a) for a in Y.atoms_below(bound) if a is not IDENTITY]
        if xs:
            options += [(xs[0], k) for k in ya[:1] + ys]
        if ys:
            options += [(f, ys[0]) for f in xa[:1]]
    for F, K in options:
        if g.uf(L, F, K):
            return F, K
    for F in _candidates(X, bound):
        for K in _candidates(Y, bound):
            if g.uf(L, F, K):
                return F, K
    return None


def _demands(g: ColoredGraph, label, generators, products) -> List[Tuple]:
    cached = g._demand_cache.get(label)
    if cached is not None:
        return cached
    out, seen = [], set()
    for (ix, iy), XY in products.items():
        if not in_ultrafilter(XY, label):
            continue
        w = choose_witness(g, label, generators[ix], generators[iy])
        if w is None:
            raise AssertionError(f"no witness for {generators[ix]!r};{generators[iy]!r} in {label!r}")
        for pair in (w, (w[1], w[0])):
            if pair not in seen:
                seen.add(pair)
                out.append(pair)
    g._demand_cache[label] = out
    return out


def default_generators(spec: BlurSpec, rows: int = 2) -> List[TermElement]:
    """Singletons of all atoms with row < ``rows``, then every ``E^W``."""
    gens = [singleton(a) for i in range(rows) for a in spec.row_atoms(i)]
    gens += [full_blur(w) for w in spec.blurs]
    return gens


def saturate(g: ColoredGraph, spec: BlurSpec, generators: Sequence[TermElement], steps: int,
             check: bool = False) -> ColoredGraph:
    """Run the FIFO construction for ``steps`` extensions (in place)."""
    if spec is not g.spec:
        raise ValueError("graph was built over a different spec")
    if steps <= 0:
        return g
    products = getattr(g, "_products", None)
    if products is None or g._generators != list(generators):
        products = {}
        for i, X in enumerate(generators):
            for j in range(i, len(generators)):
                products[i, j] = products[j, i] = compose(spec, X, generators[j])
        g._products, g._generators = products, list(generators)
    target = g.steps + steps
    while g.steps < target:
        if not g.active:
            if not g.queue:
                break
            u, v = g.queue.popleft()
            for F, K in _demands(g, g.label(u, v), generators, products):
                g.active.append(Defect(u, v, F, K))
            g.active.append((u, v))
            continue
        d = g.active.popleft()
        if not isinstance(d, Defect):
            # end of a batch: every demand on this pair now has a witness
            g.finished_pairs.add(d)
            continue
        ids = g.label_ids
        fid, kid = g._label_id.get(d.F), g._label_id.get(d.K)
        hits = []
        if fid is not None and kid is not None:
            hits = np.nonzero((ids[d.x] == fid) & (ids[:, d.y] == kid))[0]
        record = {"defect": d.as_list()}
        if len(hits):
            record.update(action="witnessed", node=int(hits[0]))
        else:
            z = extend(g, d, check=check)
            g.steps += 1
            record.update(action="extend", step=g.steps, node=z, blurs=g._last_blurs)
        g.dequeued.append((d, record["node"]))
        g.step_log.append(record)
    return g


# -- rep and its verification -------------------------------------------------------

def _member_vector(g: ColoredGraph, X: TermElement) -> np.ndarray:
    return np.array([in_ultrafilter(X, L) for L in g.labels], dtype=bool)


def rep_matrix(g: ColoredGraph, X: TermElement) -> np.ndarray:
    return _member_vector(g, X)[g.label_ids]


def rep(g: ColoredGraph, X: TermElement) -> set:
    m = rep_matrix(g, X)
    return {(int(u), int(v)) for u, v in zip(*np.nonzero(m))}


class RepReport(NamedTuple):
    violations: List[str]
    pending: int
    checked_pairs: int

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_representation(g: ColoredGraph, sample: Sequence[TermElement]) -> RepReport:
    """Exact checks of rep on a finite graph over a sample of elements.

    Reverse inclusion can only be demanded for node pairs whose defect batch
    has been processed; other misses count as pending.
    """
    spec = g.spec
    out: List[str] = list(graph_violations(g))
    n = g.n
    reps = [rep_matrix(g, X) for X in sample]

    if not np.array_equal(rep_matrix(g, TermElement(True)), np.eye(n, dtype=bool)):
        out.append("rep(Id) is not the diagonal")
    for k, (X, R) in enumerate(zip(sample, reps)):
        if not np.array_equal(R, R.T):
            out.append(f"rep not closed under converse for sample {k}")
        if not np.array_equal(rep_matrix(g, complement(spec, X)), ~R):
            out.append(f"complement not preserved for sample {k}")
    for i in range(len(sample)):
        for j in range(i + 1, len(sample)):
            if not np.array_equal(rep_matrix(g, meet(sample[i], sample[j])), reps[i] & reps[j]):
                out.append(f"meet not preserved for samples {i},{j}")
            if not np.array_equal(rep_matrix(g, join(sample[i], sample[j])), reps[i] | reps[j]):
                out.append(f"join not preserved for samples {i},{j}")

    done = np.zeros((n, n), dtype=bool)
    for u, v in g.finished_pairs:
        done[u, v] = done[v, u] = True
    gen_index = {X: k for k, X in enumerate(getattr(g, "_generators", []))}
    pending = 0
    pairs = 0
    floats = [R.astype(np.float32) for R in reps]
    for i, X in enumerate(sample):
        for j, Y in enumerate(sample):
            pairs += 1
            prod = (floats[i] @ floats[j]) > 0
            XY = rep_matrix(g, compose(spec, X, Y))
            bad = prod & ~XY
            if bad.any():
                u, v = np.argwhere(bad)[0]
                out.append(f"forward inclusion fails for samples {i},{j} at ({u},{v})")
            missing = XY & ~prod
            if missing.any():
                both_gen = X in gen_index and Y in gen_index
                hard = missing & done if both_gen else np.zeros_like(missing)
                if hard.any():
                    u, v = np.argwhere(hard)[0]
                    out.append(f"reverse inclusion fails for samples {i},{j} at ({u},{v})")
                pending += int((missing & ~hard).sum())

    for d, z in g.dequeued:
        if g.label(z, d.x) != d.F or g.label(z, d.y) != d.K:
            out.append(f"dequeued defect {d} lacks its witness")
    resolved = {d.F.atom for d, _ in g.dequeued if isinstance(d.F, Principal)} - {IDENTITY}
    for a in sorted(resolved, key=repr):
        if not rep_matrix(g, singleton(a)).any():
            out.append(f"rep({a!r}) is empty")
    return RepReport(out, pending, pairs)


# -- m-squareness ------------------------------------------------------------------

def is_m_square(labels: Mapping[Tuple[Hashable, Hashable], Hashable], s, m: int) -> bool:
    """Every clique ``C`` with ``|C| < m`` extends by one witness node.

    ``labels`` maps ordered node pairs to atoms of the finite structure ``s``
    (missing reverse pairs are filled in by converse); the unit is the set of
    labelled pairs, so cliques are node sets whose pairs are all labelled.
    """
    lab = dict(labels)
    for (x, y), a in list(lab.items()):
        lab.setdefault((y, x), s.converse[a])
    nodes = sorted({x for x, _ in lab} | {y for _, y in lab}, key=repr)

    def clique(C):
        return all((x, y) in lab for x in C for y in C)

    cliques = [C for k in range(1, max(m, 1)) for C in combinations(nodes, k) if clique(C)]
    atoms = list(s.atoms)
    for C in cliques:
        if len(C) >= m:
            continue
        ext = [z for z in nodes if all((z, c) in lab for c in C)]
        for x in C:
            for y in C:
                target = lab[x, y]
                for a in atoms:
                    for b in atoms:
                        if not s.consistent(a, b, target):
                            continue
                        if not any(lab[x, z] == a and lab[z, y] == b for z in ext):
                            return False
    return True
