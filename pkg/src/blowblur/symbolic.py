"""Term algebra of a blur structure, its ultrafilters and the blur conditions.

An element of the term algebra meets every blur slice ``E^W`` in a finite or
a cofinite set.  :class:`TermElement` stores exactly that: an identity bit
and, per blur, a :class:`Slice` that is either a finite set of
``(row, base)`` pairs or the complement of one.

Composition is computed in closed form.  Consistency in a blur structure
depends on rows only through :func:`~blowblur.blowup.evenly_distributed`,
so the rows of a composite that can differ from the "far away" behaviour are
bounded by twice the largest row mentioned in the arguments.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

from .blowup import (IDENTITY, Blur, BlurAtom, BlurSpec, even_completions)
from .finite_ra import FiniteAtomStructure


class NotInTermAlgebra(ValueError):
    """A slice came out infinite but not cofinite."""


class Slice(NamedTuple):
    cofinite: bool
    items: FrozenSet[Tuple[int, object]]

    def __repr__(self):
        body = ", ".join(f"{r}:{p}" for r, p in sorted(self.items, key=_item_key))
        return f"{'co' if self.cofinite else ''}{{{body}}}"

    @property
    def empty(self) -> bool:
        return not self.cofinite and not self.items

    def contains(self, row, base) -> bool:
        return ((row, base) in self.items) != self.cofinite

    def union(self, other: "Slice") -> "Slice":
        if self.cofinite and other.cofinite:
            return Slice(True, self.items & other.items)
        if self.cofinite:
            return Slice(True, self.items - other.items)
        if other.cofinite:
            return Slice(True, other.items - self.items)
        return Slice(False, self.items | other.items)

    def intersection(self, other: "Slice") -> "Slice":
        if self.cofinite and other.cofinite:
            return Slice(True, self.items | other.items)
        if self.cofinite:
            return Slice(False, other.items - self.items)
        if other.cofinite:
            return Slice(False, self.items - other.items)
        return Slice(False, self.items & other.items)

    def complement(self) -> "Slice":
        return Slice(not self.cofinite, self.items)

    def max_row(self) -> int:
        return max((r for r, _ in self.items), default=-1)


def _item_key(item):
    return (item[0], str(item[1]))


EMPTY = Slice(False, frozenset())
FULL = Slice(True, frozenset())


def _blur_key(w: Blur):
    return (tuple(map(str, w.members)), w.tag)


@dataclass(frozen=True)
class TermElement:
    identity: bool = False
    slices: Tuple[Tuple[Blur, Slice], ...] = ()
    _lookup: Dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        cleaned = sorted(((w, s) for w, s in self.slices if not s.empty), key=lambda ws: _blur_key(ws[0]))
        object.__setattr__(self, "slices", tuple(cleaned))
        object.__setattr__(self, "_lookup", dict(cleaned))

    @classmethod
    def build(cls, identity: bool, slices: Dict[Blur, Slice]) -> "TermElement":
        return cls(identity, tuple(slices.items()))

    def slice(self, w: Blur) -> Slice:
        return self._lookup.get(w, EMPTY)

    def blurs(self) -> List[Blur]:
        return [w for w, _ in self.slices]

    def __repr__(self):
        parts = ["Id"] if self.identity else []
        parts += [f"{w!r}:{s!r}" for w, s in self.slices]
        return "<" + " + ".join(parts or ["0"]) + ">"

    def __contains__(self, a) -> bool:
        if a is IDENTITY:
            return self.identity
        return self.slice(a.blur).contains(a.row, a.base)

    @property
    def is_finite(self) -> bool:
        return not any(s.cofinite for _, s in self.slices)

    def max_row(self) -> int:
        return max((s.max_row() for _, s in self.slices), default=-1)

    def atoms_below(self, max_row: int) -> Iterator:
        """Atoms with row < ``max_row`` in (row, blur, base) order; Id first."""
        if self.identity:
            yield IDENTITY
        for i in range(max_row):
            for w, s in self.slices:
                for p in w.members:
                    if s.contains(i, p):
                        yield BlurAtom(i, p, w)


# -- constructors -------------------------------------------------------------

def zero() -> TermElement:
    return TermElement()


def identity_element() -> TermElement:
    return TermElement(True)


def singleton(a) -> TermElement:
    if a is IDENTITY:
        return TermElement(True)
    return TermElement(False, ((a.blur, Slice(False, frozenset({(a.row, a.base)}))),))


def finite_element(atoms: Iterable) -> TermElement:
    out = zero()
    for a in atoms:
        out = join(out, singleton(a))
    return out


def full_blur(w: Blur) -> TermElement:
    """The slice ``E^W`` itself."""
    return TermElement(False, ((w, FULL),))


def top(spec: BlurSpec) -> TermElement:
    return TermElement(True, tuple((w, FULL) for w in spec.blurs))


# -- boolean operations ----------------------------------------------------------

def join(X: TermElement, Y: TermElement) -> TermElement:
    out = dict(X.slices)
    for w, s in Y.slices:
        out[w] = out[w].union(s) if w in out else s
    return TermElement.build(X.identity or Y.identity, out)


def meet(X: TermElement, Y: TermElement) -> TermElement:
    out = {}
    for w, s in X.slices:
        t = Y.slice(w)
        if not t.empty:
            out[w] = s.intersection(t)
    return TermElement.build(X.identity and Y.identity, out)


def complement(spec: BlurSpec, X: TermElement) -> TermElement:
    return TermElement.build(not X.identity, {w: X.slice(w).complement() for w in spec.blurs})


def converse(X: TermElement) -> TermElement:
    # every atom is self-converse
    return X


def _meets_diversity(X: TermElement, Y: TermElement) -> bool:
    return any(not s.intersection(Y.slice(w)).empty for w, s in X.slices)


# -- composition -------------------------------------------------------------------

class _Rows(NamedTuple):
    # a set of rows: finite, or cofinite (``rows`` then lists the exclusions)
    cofinite: bool
    rows: FrozenSet[int]

    @property
    def empty(self):
        return not self.cofinite and not self.rows

    def union(self, other):
        if self.cofinite and other.cofinite:
            return _Rows(True, self.rows & other.rows)
        if self.cofinite:
            return _Rows(True, self.rows - other.rows)
        if other.cofinite:
            return _Rows(True, other.rows - self.rows)
        return _Rows(False, self.rows | other.rows)

    def has(self, r):
        return (r in self.rows) != self.cofinite


_NO_ROWS = _Rows(False, frozenset())


def _rows_by_base(s: Slice, w: Blur) -> Dict[object, _Rows]:
    out = {p: [] for p in w.members}
    for r, p in s.items:
        out[p].append(r)
    return {p: _Rows(s.cofinite, frozenset(rs)) for p, rs in out.items()}


def _even_rows(rx: _Rows, ry: _Rows) -> _Rows:
    """Rows k for which some i in rx, j in ry have e(i, j, k)."""
    if rx.empty or ry.empty:
        return _NO_ROWS
    if rx.cofinite and ry.cofinite:
        # any k: take j large in ry and i = 2j - k
        return _Rows(True, frozenset())
    if not rx.cofinite and not ry.cofinite:
        return _Rows(False, frozenset(k for i in rx.rows for j in ry.rows for k in even_completions(i, j)))
    if not rx.cofinite:
        rx, ry = ry, rx
    # rx cofinite, ry finite.  Beyond ``bound`` the witness i = 2k - j is
    # larger than every excluded row, so only k <= bound can fail.
    bound = 2 * max(rx.rows | ry.rows | {0}) + 2
    missing = frozenset(
        k for k in range(bound + 1)
        if not any(rx.has(i) for j in ry.rows for i in even_completions(j, k))
    )
    return _Rows(True, missing)


def _slice_from_rows(per_base: Dict[object, _Rows]) -> Slice:
    kinds = {r.cofinite for r in per_base.values()}
    if len(kinds) > 1:
        raise NotInTermAlgebra("composite slice is infinite but not cofinite")
    cof = kinds.pop()
    return Slice(cof, frozenset((k, p) for p, r in per_base.items() for k in r.rows))


def atom_comp(spec: BlurSpec, a, b) -> TermElement:
    """``a ; b`` for two atoms, straight from the triple condition."""
    if a is IDENTITY:
        return singleton(b)
    if b is IDENTITY:
        return singleton(a)
    out = {}
    rows = even_completions(a.row, b.row)
    for w in spec.blurs:
        if spec.disjoint_ok(a.blur, b.blur, w):
            out[w] = FULL
        else:
            items = frozenset((k, r) for r in w.members if spec.base_ok(a.base, b.base, r) for k in rows)
            if items:
                out[w] = Slice(False, items)
    return TermElement.build(a == b, out)


def compose(spec: BlurSpec, X: TermElement, Y: TermElement) -> TermElement:
    """``X ; Y`` in the term algebra."""
    out: Dict[Blur, Slice] = {}

    def add(w, s):
        out[w] = out[w].union(s) if w in out else s

    if X.identity:
        for w, s in Y.slices:
            add(w, s)
    if Y.identity:
        for w, s in X.slices:
            add(w, s)
    ident = (X.identity and Y.identity) or _meets_diversity(X, Y)

    for S, xs in X.slices:
        rx = _rows_by_base(xs, S)
        for Z, ys in Y.slices:
            ry = _rows_by_base(ys, Z)
            pending = []
            for W in spec.blurs:
                if spec.disjoint_ok(S, Z, W):
                    out[W] = FULL
                elif not (W in out and out[W] == FULL):
                    pending.append(W)
            if not pending:
                continue
            even = {}
            for P, Q in product(S.members, Z.members):
                even[P, Q] = _even_rows(rx[P], ry[Q])
            by_target: Dict[object, _Rows] = {}
            for W in pending:
                per_base = {}
                for R in W.members:
                    if R not in by_target:
                        acc = _NO_ROWS
                        for (P, Q), rows in even.items():
                            if not rows.empty and spec.base_ok(P, Q, R):
                                acc = acc.union(rows)
                        by_target[R] = acc
                    per_base[R] = by_target[R]
                add(W, _slice_from_rows(per_base))
    return TermElement.build(ident, out)


# -- finite windows ---------------------------------------------------------------

def window_index(spec: BlurSpec) -> Tuple[int, Dict[Blur, int]]:
    offsets, k = {}, 0
    for w in spec.blurs:
        offsets[w] = k
        k += len(w.members)
    return k, offsets


def window_vector(spec: BlurSpec, X: TermElement, depth: int) -> np.ndarray:
    """Membership of every atom of ``truncate(spec, Truncation(depth))``."""
    per_row, offsets = window_index(spec)
    v = np.zeros(1 + depth * per_row, dtype=bool)
    v[0] = X.identity
    for w, s in X.slices:
        pos = {p: offsets[w] + t for t, p in enumerate(w.members)}
        if s.cofinite:
            for i in range(depth):
                base = 1 + i * per_row
                v[base + offsets[w]: base + offsets[w] + len(w.members)] = True
        for r, p in s.items:
            if r < depth:
                v[1 + r * per_row + pos[p]] = not s.cofinite
    return v


# -- ultrafilters -----------------------------------------------------------------

class Principal(NamedTuple):
    atom: object

    def __repr__(self):
        return f"U^{self.atom!r}"


class BlurFilter(NamedTuple):
    blur: Blur

    def __repr__(self):
        return f"U^{self.blur!r}"


def in_ultrafilter(X: TermElement, F) -> bool:
    if isinstance(F, Principal):
        return F.atom in X
    return X.slice(F.blur).cofinite


def _far(k: int) -> int:
    return 10 * (k + 1) + 7


def uf_triple_consistent(spec: BlurSpec, F, G, K) -> bool:
    """Whether ``F;G <= K``, ``F;K <= G`` and ``G;K <= F``.

    With self-converse atoms and a permutation-invariant oracle the three
    inclusions coincide, and each case reduces to finitely many oracle calls
    at rows far beyond anything a finite exclusion can reach.
    """
    labels = (F, G, K)
    prin = [x.atom for x in labels if isinstance(x, Principal)]
    blurs = [x.blur for x in labels if isinstance(x, BlurFilter)]
    if not blurs:
        return spec.consistent(*prin)
    if len(blurs) == 1:
        a, b = prin
        if a is IDENTITY or b is IDENTITY:
            return False
        W = blurs[0]
        k = 2 * max(a.row, b.row) + 3
        # the W-slice of a;b is infinite iff it contains far rows
        return any(spec.consistent(a, b, BlurAtom(k, r, W)) for r in W.members)
    if len(blurs) == 2:
        c = prin[0]
        S, Z = blurs
        if c is IDENTITY:
            return S == Z
        t = _far(c.row)
        configs = ((c.row + t, c.row + 2 * t), (c.row + t, c.row + 3 * t + 1))
        return any(spec.consistent(BlurAtom(i, P, S), BlurAtom(j, Q, Z), c)
                   for P in S.members for Q in Z.members for i, j in configs)
    S, Z, W = blurs
    t = _far(0)
    configs = ((t, 2 * t, 3 * t), (t, 2 * t, 4 * t + 1))
    return any(spec.consistent(BlurAtom(i, P, S), BlurAtom(j, Q, Z), BlurAtom(k, R, W))
               for P in S.members for Q in Z.members for R in W.members for i, j, k in configs)


def sample_members(spec: BlurSpec, F, depth: int = 20) -> List[TermElement]:
    """A few elements of the ultrafilter ``F``, small ones first."""
    if isinstance(F, Principal):
        return [singleton(F.atom)]
    W = F.blur
    out = [full_blur(W)]
    for cut in (1, depth // 2, depth):
        out.append(TermElement(False, ((W, Slice(True, frozenset((r, p) for r in range(cut) for p in W.members))),)))
    return out


def uf_triple_consistent_sampled(spec: BlurSpec, F, G, K, depth: int = 20) -> bool:
    """Bounded check of the three inclusions using sampled members.

    It can only refute consistency; agreement with
    :func:`uf_triple_consistent` is what the tests look for.
    """
    for A, B, C in ((F, G, K), (F, K, G), (G, K, F)):
        for X in sample_members(spec, A, depth):
            for Y in sample_members(spec, B, depth):
                if not in_ultrafilter(compose(spec, X, Y), C):
                    return False
    return True


# -- conditions (i)-(iii) -------------------------------------------------------

class Counterexample(NamedTuple):
    condition: str
    witness: Tuple

    def as_dict(self):
        return {"condition": self.condition, "witness": [repr(x) for x in self.witness]}


def check_blur_conditions(spec: BlurSpec) -> List[Counterexample]:
    """Exhaustive check of the three conditions that make the blur colours work.

    * (i)  ``(U^a, U^b, U^W)`` consistent whenever ``a;b`` is in ``U^W``;
    * (ii) any triple with two non-principal members (none the identity) is
      consistent;
    * (iii) for all ``a, b, c, d`` some ``W`` has ``(a;b).(c;d)`` in ``U^W``.

    The search is exhaustive modulo the symmetries of the construction:
    permutations of ``I`` (and of tags) act transitively on the atoms of a
    row, and rows matter only up to shift and the evenly-distributed relation.
    """
    report: List[Counterexample] = []
    S0 = spec.blurs[0]
    a0 = BlurAtom(0, S0.members[0], S0)

    # (i): a fixed, b over rows 0..2 so that row differences 0, 1, 2 all occur
    pair_targets: Dict[Tuple[Blur, Blur], FrozenSet[Blur]] = {}
    for j in range(3):
        for b in spec.row_atoms(j):
            ab = atom_comp(spec, a0, b)
            hits = frozenset(w for w in spec.blurs if ab.slice(w).cofinite)
            pair_targets.setdefault((a0.blur, b.blur), hits)
            for W in hits:
                if not uf_triple_consistent(spec, Principal(a0), Principal(b), BlurFilter(W)):
                    report.append(Counterexample("i", (a0, b, W)))

    # (ii): one blur fixed, the other blur and the third label free
    row0 = spec.row_atoms(0)
    for Z in spec.blurs:
        for W in spec.blurs:
            if not uf_triple_consistent(spec, BlurFilter(S0), BlurFilter(Z), BlurFilter(W)):
                report.append(Counterexample("ii", (S0, Z, W)))
        for c in row0:
            if not uf_triple_consistent(spec, BlurFilter(S0), BlurFilter(Z), Principal(c)):
                report.append(Counterexample("ii", (S0, Z, c)))

    # (iii): which W take a;b cofinitely depends only on the two blurs; the
    # atom_comp results from (i) are cross-checked against that table.
    D = spec._disjoint_table()
    m = len(spec.blurs)
    for (S, Z), hits in pair_targets.items():
        expect = frozenset(spec.blurs[k] for k in np.nonzero(D[spec.blur_index[S], spec.blur_index[Z]])[0])
        if hits != expect:
            report.append(Counterexample("iii", ("slice table mismatch", S, Z)))
    T = D.reshape(m * m, m)
    rows, first = np.unique(T, axis=0, return_index=True)
    meets = rows.astype(np.int32) @ rows.astype(np.int32).T
    for x, y in zip(*np.nonzero(meets == 0)):
        if x <= y:
            s1, z1 = divmod(int(first[x]), m)
            s2, z2 = divmod(int(first[y]), m)
            A, B, C, Dd = spec.blurs[s1], spec.blurs[z1], spec.blurs[s2], spec.blurs[z2]
            report.append(Counterexample("iii", (BlurAtom(0, A.members[0], A), BlurAtom(0, B.members[0], B),
                                                 BlurAtom(0, C.members[0], C), BlurAtom(0, Dd.members[0], Dd))))
    return report


# -- (**) --------------------------------------------------------------------------

def n_complex_blur(M: FiniteAtomStructure, J: Sequence, n: int, forall: bool = False) -> bool:
    """For all a_1..a_n, b_1..b_n in I some W in J meets every a_t;b_t.

    ``forall=True`` asks the same of every ``W`` in ``J``.
    """
    I = M.diversity_atoms
    masks = M.composition_masks()
    idx = M.index
    comps = sorted({masks[idx[a]][idx[b]] for a in I for b in I})
    wmasks = [sum(1 << idx[p] for p in (w.members if isinstance(w, Blur) else w)) for w in J]
    if n == 0:
        comps_iter = [()]
    else:
        comps_iter = combinations_with_replacement(comps, n)
    for combo in comps_iter:
        inter = -1
        for c in combo:
            inter &= c
        hits = [bool(w & inter) for w in wmasks]
        if not (all(hits) if forall else any(hits)):
            return False
    return True


def random_element(spec: BlurSpec, rng: np.random.Generator, max_row: int = 6,
                   max_slices: int = 3, p_cofinite: float = 0.4) -> TermElement:
    """A random term element whose explicit rows stay below ``max_row``."""
    k = int(rng.integers(0, max_slices + 1))
    chosen = rng.choice(len(spec.blurs), size=k, replace=False) if k else []
    slices = {}
    for ix in chosen:
        w = spec.blurs[int(ix)]
        n_items = int(rng.integers(0, 4))
        items = frozenset((int(rng.integers(0, max_row)), w.members[int(rng.integers(0, len(w.members)))])
                          for _ in range(n_items))
        slices[w] = Slice(bool(rng.random() < p_cofinite), items)
    return TermElement.build(bool(rng.random() < 0.2), slices)


# -- coarse blocks ------------------------------------------------------------------

class IdBlock(NamedTuple):
    def __repr__(self):
        return "Id"

    def contains(self, a) -> bool:
        return a is IDENTITY

    def as_dict(self):
        return {"kind": "id"}


class BaseBlock(NamedTuple):
    """``H^P``: every blur atom with base ``P``."""
    base: object

    def __repr__(self):
        return f"H^{self.base}"

    def contains(self, a) -> bool:
        return a is not IDENTITY and a.base == self.base

    def as_dict(self):
        return {"kind": "base", "base": self.base}


class ColorBlock(NamedTuple):
    """``(Y, k)``: graph atoms ``(v, k)`` with ``v`` in the independent set ``Y``."""
    nodes: FrozenSet[int]
    color: int
    index: int = 0

    def __repr__(self):
        return f"C{self.index}x{self.color}"

    def contains(self, a) -> bool:
        return a is not IDENTITY and a.color == self.color and a.node in self.nodes

    def as_dict(self):
        return {"kind": "color", "index": self.index, "color": self.color, "nodes": sorted(self.nodes)}


class UnionBlock(NamedTuple):
    parts: Tuple

    def __repr__(self):
        return "+".join(map(repr, self.parts))

    def contains(self, a) -> bool:
        return any(p.contains(a) for p in self.parts)

    def as_dict(self):
        return {"kind": "union", "parts": [p.as_dict() for p in self.parts]}


def block_from_dict(d: dict):
    kind = d["kind"]
    if kind == "id":
        return IdBlock()
    if kind == "base":
        return BaseBlock(d["base"])
    if kind == "color":
        return ColorBlock(frozenset(int(v) for v in d["nodes"]), int(d["color"]), int(d["index"]))
    if kind == "union":
        return UnionBlock(tuple(block_from_dict(p) for p in d["parts"]))
    raise ValueError(f"unknown block kind {kind!r}")
