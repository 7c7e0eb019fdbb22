"""Basic matrices over a finite atom structure and the cylindric basis check."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from itertools import combinations
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .finite_ra import FiniteAtomStructure


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class BasicMatrix:
    entries: Tuple[Tuple, ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def off(self, i: int) -> Tuple:
        """Entries not involving index ``i``."""
        return tuple(self.entries[a][b] for a in range(self.n) for b in range(self.n) if i not in (a, b))

    def permuted(self, perm: Sequence[int]) -> "BasicMatrix":
        n = self.n
        return BasicMatrix(tuple(tuple(self.entries[perm[i]][perm[j]] for j in range(n)) for i in range(n)))


def is_basic(s: FiniteAtomStructure, m: BasicMatrix) -> bool:
    n = m.n
    for i in range(n):
        if m[i, i] != s.identity:
            return False
        for j in range(n):
            if m[i, j] != s.converse[m[j, i]]:
                return False
            for k in range(n):
                if not s.consistent(m[i, j], m[j, k], m[i, k]):
                    return False
    return True


def _pairs(n):
    # fill order: (0,1), (0,2), (1,2), (0,3), (1,3), (2,3), ...
    return [(i, k) for k in range(1, n) for i in range(k)]


def enumerate_matrices(s: FiniteAtomStructure, n: int, limit: int = 10 ** 7) -> List[BasicMatrix]:
    """All n x n basic matrices, in lexicographic order of their upper entries.

    Refuses when ``|atoms| ** (n(n-1)/2)`` exceeds ``limit``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    A = len(s.atoms)
    bound = A ** (n * (n - 1) // 2)
    if bound > limit:
        raise EnumerationTooLarge(f"{A}^{n * (n - 1) // 2} = {bound} candidate matrices exceeds {limit}")
    T = s.table
    cv = s.conv_idx
    e = s.id_index
    order = _pairs(n)
    # column-by-column fill: triangle (a, i, k), a < i < k, is complete as
    # soon as (i, k) is set
    M = np.full((n, n), -1, dtype=np.intp)
    np.fill_diagonal(M, e)
    out = []

    def rec(p):
        if p == len(order):
            out.append(M.copy())
            return
        i, k = order[p]
        for a in range(A):
            M[i, k] = a
            M[k, i] = cv[a]
            if _partial_ok(T, M, i, k):
                rec(p + 1)
        M[i, k] = M[k, i] = -1

    rec(0)
    # triangles were checked one orientation at a time; a full scan keeps the
    # result exact for structures with non-trivial converse
    atoms = s.atoms
    result = []
    for X in out:
        m = BasicMatrix(tuple(tuple(atoms[X[i, j]] for j in range(n)) for i in range(n)))
        if is_basic(s, m):
            result.append(m)
    result.sort(key=lambda m: [s.index[m[i, k]] for i, k in order])
    return result


def _partial_ok(T, M, i, k):
    for a in range(i):
        if not T[M[a, i], M[i, k], M[a, k]]:
            return False
    return True


class BasisReport(NamedTuple):
    failures: List[Tuple]
    total: int
    matrices: int

    @property
    def empty(self) -> bool:
        return self.total == 0


def _columns(s: FiniteAtomStructure, m: BasicMatrix) -> np.ndarray:
    """Non-identity columns ``a`` (a_t = label from a new point to t) with m + a basic."""
    n = m.n
    div = [s.index[a] for a in s.diversity_atoms]
    T = s.table
    idx = [[s.index[m[i, j]] for j in range(n)] for i in range(n)]
    cols = [()]
    for t in range(n):
        nxt = []
        for c in cols:
            for a in div:
                # triangles (r, t, new) for r < t: m_rt ; a_t >= a_r
                if all(T[idx[r][t], a, c[r]] for r in range(t)):
                    nxt.append(c + (a,))
        cols = nxt
    return np.array(cols, dtype=np.intp).reshape(len(cols), n)


def check_cylindric_basis(s: FiniteAtomStructure, n: int, matrices: Sequence[BasicMatrix],
                          keep: int = 20) -> BasisReport:
    """Amalgamation of matrices over a common face.

    For a matrix ``m`` and two one-point extensions ``m + a`` (new index i)
    and ``m + b`` (new index j), an amalgam is a matrix on ``n + 2`` points
    restricting to both, i.e. a diversity atom ``c`` for the entry ``(i, j)``
    with ``c`` below ``a_t ; b_t`` for every ``t``.  Failures list
    ``(m, a, b)``; at most ``keep`` are stored, all are counted.
    """
    masks = np.array(s.composition_masks(), dtype=object)
    A = len(s.atoms)
    if A > 62:
        raise ValueError("bitmask check limited to 62 atoms")
    comp = np.array([[int(x) for x in row] for row in masks], dtype=np.int64)
    div_mask = np.int64(((1 << A) - 1) & ~(1 << s.id_index))
    failures, total = [], 0
    for m in matrices:
        if m.n != n:
            raise ValueError("matrix of the wrong dimension")
        cols = _columns(s, m)
        if len(cols) == 0:
            continue
        inter = np.full((len(cols), len(cols)), -1, dtype=np.int64)
        for t in range(n):
            inter &= comp[cols[:, t][:, None], cols[:, t][None, :]]
        bad = np.argwhere((inter & div_mask) == 0)
        total += len(bad)
        for x, y in bad[:max(0, keep - len(failures))]:
            failures.append((m, tuple(s.atoms[k] for k in cols[x]), tuple(s.atoms[k] for k in cols[y])))
    return BasisReport(failures, total, len(matrices))


# -- descriptors ----------------------------------------------------------------

def alpha_m_descriptor(m: BasicMatrix) -> str:
    """``n=<n>`` followed by one conjunct per pair ``i < j``, ascending."""
    parts = [f"n={m.n}"]
    for i, j in combinations(range(m.n), 2):
        a = m[i, j]
        parts.append(f"x{i}=x{j}" if str(a) == "Id" else f"{a}(x{i},x{j})")
    return "; ".join(parts)


_ATOM_RE = re.compile(r"^(.*)\(x(\d+),x(\d+)\)$")
_EQ_RE = re.compile(r"^x(\d+)=x(\d+)$")


def parse_descriptor(text: str, s: FiniteAtomStructure) -> BasicMatrix:
    names = {str(a): a for a in s.atoms}
    head, *rest = [p.strip() for p in text.split(";")]
    if not head.startswith("n="):
        raise ValueError("descriptor must start with n=<dimension>")
    n = int(head[2:])
    M = [[None] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = s.identity
    for p in rest:
        if not p:
            continue
        eq = _EQ_RE.match(p)
        if eq:
            i, j, a = int(eq[1]), int(eq[2]), s.identity
        else:
            at = _ATOM_RE.match(p)
            if not at or at[1] not in names:
                raise ValueError(f"cannot parse conjunct {p!r}")
            a, i, j = names[at[1]], int(at[2]), int(at[3])
        M[i][j] = a
        M[j][i] = s.converse[a]
    if any(x is None for row in M for x in row):
        raise ValueError("descriptor leaves an entry unset")
    return BasicMatrix(tuple(map(tuple, M)))


def matrices_to_json(matrices: Sequence[BasicMatrix]) -> str:
    return json.dumps({"matrices": [alpha_m_descriptor(m) for m in matrices]}, indent=1) + "\n"
