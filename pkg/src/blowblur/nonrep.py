"""Certificates that a complex algebra is not representable.

The argument is a finite/infinite clash.  The atoms split into finitely many
blocks, each block ``b`` other than the identity is monochromatic and has
``(b;b).b = 0``, yet the carrier is infinite.  In any representation Ramsey's
theorem would then find a monochromatic triangle.  That last step is about
all representations and is not run; a certificate records everything before
it in a form that can be re-derived from the spec parameters alone.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from . import __version__
from .blowup import (AlphaSpec, AtomStructureSpec, BlurSpec, CliqueScheme, Truncation,
                     alpha_of_graph, atom_names, f_l_mu, spec_from_params, truncate)
from .graphs import Coloring, Graph, independent_partition, make_disjoint_cliques, minimum_coloring
from .symbolic import BaseBlock, ColorBlock, IdBlock, block_from_dict, check_blur_conditions

TOOL_VERSION = f"blowblur-cert/1 ({__version__})"
MONK_COPIES = 10


class CertificateError(Exception):
    exit_code = 2


class CertificateFormatError(CertificateError):
    exit_code = 4


class CertificateVersionError(CertificateError):
    exit_code = 5


class CertificateCheckError(CertificateError):
    def __init__(self, item: str, detail: str = ""):
        super().__init__(f"{item}: {detail}" if detail else item)
        self.item = item


# -- blocks ----------------------------------------------------------------------

def base_partition(spec: BlurSpec) -> List:
    return [IdBlock()] + [BaseBlock(p) for p in spec.I]


def build_partition(spec: AlphaSpec, c: Coloring, copies: Optional[int] = None) -> List:
    """``{Id} + {(C_j, k)}`` for the colour classes ``C_j`` of ``c``."""
    g = spec.window_graph(Truncation(copies=copies))
    classes = independent_partition(g, c)
    blocks = [IdBlock()]
    for j, C in enumerate(classes):
        for k in range(spec.n):
            blocks.append(ColorBlock(frozenset(C), k, j))
    return blocks


def monochromatic(b) -> bool:
    if isinstance(b, (IdBlock, BaseBlock, ColorBlock)):
        return True
    kinds = set()
    for p in b.parts:
        if not monochromatic(p):
            return False
        if isinstance(p, IdBlock):
            kinds.add(("id",))
        elif isinstance(p, BaseBlock):
            kinds.add(("base", p.base))
        elif isinstance(p, ColorBlock):
            kinds.add(("color", p.color))
        else:
            kinds.add(("union", repr(p)))
    return len(kinds) <= 1


class MonoVerdict(NamedTuple):
    ok: bool
    witness: Optional[Tuple]


def _block_index(atoms, blocks) -> np.ndarray:
    out = np.full(len(atoms), -1, dtype=np.intp)
    for k, b in enumerate(blocks):
        for i, a in enumerate(atoms):
            if b.contains(a):
                if out[i] >= 0:
                    raise ValueError(f"blocks overlap at {a!r}")
                out[i] = k
    return out


def _symbolic_mono_zero(spec, b) -> Optional[bool]:
    if isinstance(b, BaseBlock) and isinstance(spec, BlurSpec):
        P = b.base
        if spec.base_ok(P, P, P):
            return False
        mine = [w for w in spec.blurs if P in w.members]
        return not any(spec.disjoint_ok(S, Z, W) for S in mine for Z in mine for W in mine)
    if isinstance(b, ColorBlock) and isinstance(spec, AlphaSpec):
        ns = sorted(b.nodes)
        return not any(spec.graph.adjacent(u, v) for i, u in enumerate(ns) for v in ns[i + 1:])
    return None


def verify_mono_zero(spec: AtomStructureSpec, b, t: Truncation = Truncation(), finite=None) -> MonoVerdict:
    """No consistent triple lies inside ``b``.

    Decided symbolically where a closed form exists and always confirmed by
    enumeration on the window ``t``; a disagreement raises.
    """
    if isinstance(b, IdBlock):
        raise ValueError("the identity block is not a diversity block")
    s = finite if finite is not None else truncate(spec, t)
    idx = [i for i, a in enumerate(s.atoms) if b.contains(a)]
    sub = s.table[np.ix_(idx, idx, idx)]
    hits = np.argwhere(sub)
    enum_ok = len(hits) == 0
    witness = None if enum_ok else tuple(s.atoms[idx[k]] for k in hits[0])
    sym = _symbolic_mono_zero(spec, b)
    if sym is not None and sym != enum_ok:
        raise AssertionError(f"symbolic and enumerated verdicts differ on {b!r}")
    return MonoVerdict(enum_ok, witness)


def _coarse_from_oracle(s, blocks) -> Dict[Tuple[int, int], FrozenSet[int]]:
    bi = _block_index(s.atoms, blocks)
    if (bi < 0).any():
        raise ValueError(f"atom {s.atoms[int(np.argmax(bi < 0))]!r} lies in no block")
    members = [np.nonzero(bi == k)[0] for k in range(len(blocks))]
    out = {}
    for x, mx in enumerate(members):
        A = s.table[mx].any(axis=0)
        for y, my in enumerate(members):
            hit = A[my].any(axis=0)
            out[x, y] = frozenset(np.unique(bi[hit]).tolist())
    return out


def coarse_embedding_table(spec: BlurSpec, t: Truncation = Truncation()) -> Dict[Tuple, FrozenSet]:
    """``H^P ; H^Q`` as a set of blocks, from the finite base algebra.

    The formula is ``{H^R : R <= P;Q} + Id (when Id <= P;Q)``; it is checked
    against enumeration of the consistency oracle on the window ``t``.
    """
    M = getattr(spec, "M", None)
    I = list(spec.I)
    table = {}
    for P in I:
        for Q in I:
            if M is not None:
                hits = {BaseBlock(R) for R in I if M.consistent(P, Q, R)}
                if M.consistent(P, Q, M.identity):
                    hits.add(IdBlock())
            else:
                hits = {BaseBlock(R) for R in I if spec.base_ok(P, Q, R)}
                if P == Q:
                    hits.add(IdBlock())
            table[P, Q] = frozenset(hits)
    blocks = base_partition(spec)
    s = truncate(spec, t)
    oracle = _coarse_from_oracle(s, blocks)
    pos = {b: k for k, b in enumerate(blocks)}
    for (P, Q), hits in table.items():
        got = frozenset(blocks[k] for k in oracle[pos[BaseBlock(P)], pos[BaseBlock(Q)]])
        if got != hits:
            raise AssertionError(f"coarse table disagrees with the oracle at ({P}, {Q}): "
                                 f"{sorted(map(repr, hits))} vs {sorted(map(repr, got))}")
    return table


# -- certificates -------------------------------------------------------------------

def _canonical(d) -> str:
    return json.dumps(d, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _digest(body: dict) -> str:
    return hashlib.sha256(_canonical({k: v for k, v in body.items() if k != "digest"}).encode()).hexdigest()


class NonRepCertificate:
    """A certificate document; ``data`` is plain JSON-compatible data."""

    def __init__(self, data: dict):
        self.data = data

    def __getitem__(self, key):
        return self.data[key]

    def __eq__(self, other):
        return isinstance(other, NonRepCertificate) and self.data == other.data

    @property
    def blocks(self) -> List:
        return [block_from_dict(d) for d in self.data["blocks"]]

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=1, ensure_ascii=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "NonRepCertificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise CertificateFormatError(f"not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise CertificateFormatError("certificate must be a JSON object")
        return cls(data)

    def save(self, path) -> Path:
        p = Path(path)
        p.write_text(self.to_json())
        return p

    @classmethod
    def load(cls, path) -> "NonRepCertificate":
        return cls.from_json(Path(path).read_text())


def _window(spec, depth: int, copies: Optional[int]) -> Truncation:
    if isinstance(spec, AlphaSpec):
        return Truncation(depth=1, copies=copies if copies is not None else MONK_COPIES)
    return Truncation(depth=depth)


def certify(spec: AtomStructureSpec, coloring: Optional[Coloring] = None, *, depth: int = 8,
            copies: Optional[int] = None, seed: int = 0) -> NonRepCertificate:
    """Assemble and self-check a certificate.  Any failed sub-check raises."""
    t = _window(spec, depth, copies)
    s = truncate(spec, t)
    if isinstance(spec, BlurSpec):
        blocks = base_partition(spec)
        table = coarse_embedding_table(spec, t)
        coarse = {f"{P};{Q}": sorted(map(repr, v)) for (P, Q), v in sorted(table.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1])))}
        unbounded = True
        window = {"depth": t.depth}
    elif isinstance(spec, AlphaSpec):
        if coloring is None:
            coloring = minimum_coloring(spec.window_graph(t))
        blocks = build_partition(spec, coloring, t.copies)
        oracle = _coarse_from_oracle(s, blocks)
        coarse = {f"{blocks[x]!r};{blocks[y]!r}": sorted(repr(blocks[k]) for k in v)
                  for (x, y), v in sorted(oracle.items())}
        unbounded = spec.unbounded
        window = {"copies": t.copies}
    else:
        raise TypeError("unsupported spec")

    bi = _block_index(s.atoms, blocks)
    if (bi < 0).any():
        raise CertificateCheckError("blocks", "the blocks do not cover every atom")
    mono = []
    for b in blocks[1:]:
        if not monochromatic(b):
            raise CertificateCheckError(f"block {b!r}", "not monochromatic")
        v = verify_mono_zero(spec, b, t, finite=s)
        if not v.ok:
            raise CertificateCheckError(f"block {b!r}", f"consistent triple {v.witness!r} inside the block")
        mono.append({"block": repr(b), "zero": True})
    body = {
        "spec": dict(spec.params(), window=window),
        "blocks": [b.as_dict() for b in blocks],
        "mono_zero": mono,
        "coarse_table": coarse,
        "flags": {"unbounded_carrier": bool(unbounded), "finite_partition": True,
                  "all_mono_zero": all(m["zero"] for m in mono)},
        "tool_version": TOOL_VERSION,
        "seed": int(seed),
    }
    body["digest"] = _digest(body)
    return NonRepCertificate(body)


REQUIRED = ("spec", "blocks", "mono_zero", "coarse_table", "flags", "tool_version", "seed", "digest")


def check_certificate(source: Union[str, Path, dict, NonRepCertificate]) -> bool:
    """Re-derive every field from the spec parameters; raise on any difference."""
    if isinstance(source, NonRepCertificate):
        data = source.data
    elif isinstance(source, dict):
        data = source
    else:
        p = Path(source)
        try:
            text = p.read_text()
        except OSError as e:
            raise CertificateFormatError(f"cannot read {p}: {e}") from None
        data = NonRepCertificate.from_json(text).data
    missing = [k for k in REQUIRED if k not in data]
    if missing:
        raise CertificateFormatError(f"missing fields: {', '.join(missing)}")
    if data["tool_version"] != TOOL_VERSION:
        raise CertificateVersionError(f"certificate written by {data['tool_version']!r}, this is {TOOL_VERSION!r}")
    try:
        params = dict(data["spec"])
        window = params.pop("window")
        spec = spec_from_params(params)
        blocks = [block_from_dict(b) for b in data["blocks"]]
        seed = int(data["seed"])
    except (KeyError, TypeError, ValueError) as e:
        raise CertificateFormatError(f"malformed field: {e}") from None
    coloring = None
    if isinstance(spec, AlphaSpec):
        assign = {}
        for b in blocks:
            if isinstance(b, ColorBlock):
                for v in b.nodes:
                    assign[v] = b.index
        coloring = Coloring(dict(sorted(assign.items())))
    try:
        fresh = certify(spec, coloring, depth=int(window.get("depth", 8)),
                        copies=window.get("copies"), seed=seed).data
    except CertificateCheckError:
        raise
    except ValueError as e:
        raise CertificateCheckError("blocks", str(e)) from None
    for key in REQUIRED:
        if key == "digest":
            continue
        if fresh[key] != data[key]:
            raise CertificateCheckError(_first_difference(key, data[key], fresh[key]))
    # last, so that a semantic change is reported by name rather than as a bad digest
    if _digest(data) != data["digest"]:
        raise CertificateCheckError("digest", "content does not match its digest")
    return True


def _first_difference(key, got, want) -> str:
    if key == "mono_zero" and isinstance(got, list):
        for g, w in zip(got, want):
            if g != w:
                return f"mono_zero verdict for block {w.get('block')}"
    if isinstance(got, dict) and isinstance(want, dict):
        for k in sorted(set(got) | set(want), key=str):
            if got.get(k) != want.get(k):
                return f"{key}[{k}]"
    if isinstance(got, list) and isinstance(want, list):
        for i, (g, w) in enumerate(zip(got, want)):
            if g != w:
                return f"{key}[{i}]"
    return key


# -- sequences ------------------------------------------------------------------------

class MonkMember(NamedTuple):
    graph: Graph
    spec: AlphaSpec
    certificate: NonRepCertificate
    chromatic_number: int


def monk_sequence(n: int, count: int, copies: int = MONK_COPIES) -> List[MonkMember]:
    """Members over ``copies`` disjoint cliques of size ``n(n-1)/2 + i``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    out = []
    for i in range(count):
        size = n * (n - 1) // 2 + i
        g = make_disjoint_cliques(copies, size)
        spec = alpha_of_graph(CliqueScheme(size), n)
        c = minimum_coloring(g)
        cert = certify(spec, c, copies=copies)
        out.append(MonkMember(g, spec, cert, c.colors_used))
    return out


def f_sequence(count: int, check: bool = True) -> List[Tuple[BlurSpec, Optional[list]]]:
    """``F(i, 1)`` for ``i = 2 .. count+1`` over ``3i`` base atoms, with reports."""
    out = []
    for i in range(2, count + 2):
        spec = f_l_mu(atom_names(3 * i), i, 1)
        out.append((spec, check_blur_conditions(spec) if check else None))
    return out
