"""Finite relation-algebra atom structures and their complex algebras.

A structure is stored as a boolean tensor ``table[a, b, c]`` over atom
indices, true when the triple ``(a, b, c)`` is consistent, i.e. when
``c <= a ; b`` in the complex algebra.
"""
from __future__ import annotations

from typing import Dict, Hashable, Iterable, Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

ID = "Id"


class Violation(NamedTuple):
    law: str
    triple: Tuple


class FiniteAtomStructure:
    """Atoms, converse and consistent triples of a finite atom structure.

    ``atoms[0]`` need not be the identity; ``identity`` names it.  Instances
    are treated as immutable once built.
    """

    def __init__(self, atoms: Sequence[Hashable], identity: Hashable,
                 converse: Dict[Hashable, Hashable], table: np.ndarray):
        self.atoms = tuple(atoms)
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("duplicate atom names")
        if identity not in self.atoms:
            raise ValueError("identity atom missing")
        self.identity = identity
        self.index = {a: i for i, a in enumerate(self.atoms)}
        self.converse = dict(converse)
        self.conv_idx = np.array([self.index[self.converse[a]] for a in self.atoms], dtype=np.intp)
        n = len(self.atoms)
        table = np.asarray(table, dtype=bool)
        if table.shape != (n, n, n):
            raise ValueError(f"table must have shape {(n, n, n)}")
        self.table = table
        self.table.setflags(write=False)
        self._comp_masks = None

    @classmethod
    def from_triples(cls, atoms, identity, converse, triples: Iterable[Tuple]):
        index = {a: i for i, a in enumerate(atoms)}
        n = len(atoms)
        t = np.zeros((n, n, n), dtype=bool)
        for a, b, c in triples:
            t[index[a], index[b], index[c]] = True
        return cls(atoms, identity, converse, t)

    def __len__(self):
        return len(self.atoms)

    def __repr__(self):
        return f"FiniteAtomStructure({len(self.atoms)} atoms)"

    @property
    def id_index(self) -> int:
        return self.index[self.identity]

    def consistent(self, a, b, c) -> bool:
        return bool(self.table[self.index[a], self.index[b], self.index[c]])

    def triples(self) -> Iterator[Tuple]:
        for i, j, k in zip(*np.nonzero(self.table)):
            yield self.atoms[i], self.atoms[j], self.atoms[k]

    @property
    def diversity_atoms(self) -> List:
        return [a for a in self.atoms if a != self.identity]

    def composition_masks(self) -> List[List[int]]:
        """``masks[a][b]`` is the bitmask (over atom indices) of ``a ; b``."""
        if self._comp_masks is None:
            n = len(self.atoms)
            weights = [1 << k for k in range(n)]
            masks = []
            for i in range(n):
                row = []
                for j in range(n):
                    row.append(sum(w for w, hit in zip(weights, self.table[i, j]) if hit))
                masks.append(row)
            self._comp_masks = masks
        return self._comp_masks


def make_M(I: Sequence[Hashable]) -> FiniteAtomStructure:
    """The finite algebra with P;P = (I - {P}) + Id and P;Q = I for P != Q.

    All atoms are self-converse.  The identity atom is named ``"Id"``.
    """
    I = list(I)
    if len(I) < 2:
        raise ValueError("need at least two diversity atoms")
    if len(set(I)) != len(I):
        raise ValueError("duplicate atom names")
    if ID in I:
        raise ValueError(f"{ID!r} is reserved for the identity")
    atoms = [ID] + I
    n = len(atoms)
    t = np.zeros((n, n, n), dtype=bool)
    for a in range(n):
        t[0, a, a] = t[a, 0, a] = t[a, a, 0] = True
    for p in range(1, n):
        for q in range(1, n):
            for r in range(1, n):
                t[p, q, r] = not (p == q == r)
    return FiniteAtomStructure(atoms, ID, {a: a for a in atoms}, t)


# (x, y, z) consistent  <=>  z <= x;y.  The other five Peircean transforms
# of a consistent triple must be consistent too.  Each transform is written
# as three (variable, converse?) slots over the variables x=0, y=1, z=2.
_PEIRCE = (
    ("conv(x), z, y", ((0, True), (2, False), (1, False))),
    ("y, conv(z), conv(x)", ((1, False), (2, True), (0, True))),
    ("conv(y), conv(x), conv(z)", ((1, True), (0, True), (2, True))),
    ("conv(z), x, conv(y)", ((2, True), (0, False), (1, True))),
    ("z, conv(y), x", ((2, False), (1, True), (0, False))),
)


def _transform(T, cv, slots):
    # image[x, y, z] = T[slot0, slot1, slot2]
    C = T
    for axis, (_, conv) in enumerate(slots):
        if conv:
            C = np.take(C, cv, axis=axis)
    var_of_axis = [v for v, _ in slots]
    axes = [var_of_axis.index(k) for k in range(3)]
    return C.transpose(axes)


def check_axioms(s: FiniteAtomStructure) -> List[Violation]:
    """Every violated instance of the identity law, converse involution and
    Peircean closure.  Empty means the structure is a relation atom structure
    in the sense checked here (associativity is a separate question).
    """
    out: List[Violation] = []
    A = s.atoms
    cv = s.conv_idx
    n = len(A)

    for a in range(n):
        if cv[cv[a]] != a:
            out.append(Violation("converse involution", (A[a],)))
    e = s.id_index
    if cv[e] != e:
        out.append(Violation("identity self-converse", (A[e],)))

    # (Id, b, c) consistent iff b == c
    bad = np.argwhere(s.table[e] != np.eye(n, dtype=bool))
    for b, c in bad:
        out.append(Violation("identity law", (A[e], A[b], A[c])))

    T = s.table
    for name, slots in _PEIRCE:
        image = _transform(T, cv, slots)
        for x, y, z in np.argwhere(T & ~image):
            out.append(Violation(f"Peircean closure ({name})", (A[x], A[y], A[z])))
    return out


def cm_compose(s: FiniteAtomStructure, X: Iterable, Y: Iterable) -> frozenset:
    """``X ; Y`` in the complex algebra, for sets of atoms."""
    xi = [s.index[a] for a in X]
    yi = [s.index[b] for b in Y]
    if not xi or not yi:
        return frozenset()
    hit = s.table[np.ix_(xi, yi)].any(axis=(0, 1))
    return frozenset(s.atoms[k] for k in np.nonzero(hit)[0])


def cm_converse(s: FiniteAtomStructure, X: Iterable) -> frozenset:
    return frozenset(s.converse[a] for a in X)


def subset_composition_table(s: FiniteAtomStructure) -> np.ndarray:
    """``table[X, Y]`` = bitmask of ``X ; Y`` for every pair of subset bitmasks.

    Memory is ``4**len(atoms)`` integers, so keep this to small structures.
    """
    n = len(s.atoms)
    if n > 10:
        raise ValueError("subset table limited to 10 atoms")
    masks = s.composition_masks()
    size = 1 << n
    # single[a, Y] = {a} ; Y
    single = np.zeros((n, size), dtype=np.int64)
    for a in range(n):
        row = single[a]
        for y in range(1, size):
            b = (y & -y).bit_length() - 1
            row[y] = row[y & (y - 1)] | masks[a][b]
    table = np.zeros((size, size), dtype=np.int64)
    for x in range(1, size):
        a = (x & -x).bit_length() - 1
        table[x] = table[x & (x - 1)] | single[a]
    return table


def is_associative(s: FiniteAtomStructure) -> bool:
    """(X;Y);Z == X;(Y;Z) on all subset triples (exhaustive)."""
    t = subset_composition_table(s)
    size = t.shape[0]
    for x in range(size):
        left = t[t[x]]          # left[y, z] = (x;y);z
        right = t[x][t]          # right[y, z] = x;(y;z)
        if not np.array_equal(left, right):
            return False
    return True
