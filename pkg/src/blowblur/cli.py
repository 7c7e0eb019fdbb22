"""Command-line front end.

Exit codes: 0 ok, 1 usage error, 2 a check failed, 3 internal error,
4 malformed certificate, 5 certificate version mismatch.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_INTERNAL = 0, 1, 2, 3
OUTPUT_ENV = "BLOWBLUR_OUTPUT_DIR"


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    construction: str = "blur"
    I: int = 6
    l: int = 2
    mu: int = 1
    n: int = 3
    N: int = 3
    copies: int = 10
    count: int = 4
    depth: int = 8
    steps: int = 300
    sample: int = 50
    seed: int = 0
    format: str = "text"
    output: Optional[str] = None
    path: Optional[str] = None
    graph_file: Optional[str] = None
    p: Optional[float] = None

    def validate(self):
        if self.format not in ("text", "json"):
            raise UsageError("--format must be text or json")
        for name in ("I", "l", "mu", "n", "N", "copies", "count", "depth", "steps", "sample"):
            if getattr(self, name) < 0:
                raise UsageError(f"--{name} must be non-negative")
        if self.depth < 1:
            raise UsageError("--depth must be at least 1")
        if self.construction not in ("blur", "f_l_mu", "alpha"):
            raise UsageError("--construction must be blur, f_l_mu or alpha")
        if self.command in ("ra-check", "blur-build", "certify", "represent") and self.construction != "alpha":
            if self.construction == "blur" and self.I < 6 and self.command != "ra-check":
                raise UsageError("the blur construction needs --I 6 or more")
            if self.construction == "f_l_mu" and (self.l < 2 or self.I < 3 * self.l or self.mu < 1):
                raise UsageError("f_l_mu needs l >= 2, mu >= 1 and I >= 3l")
        if self.command == "represent" and self.construction == "alpha":
            raise UsageError("represent works on blur constructions")
        if self.construction == "alpha" and self.n < 2:
            raise UsageError("alpha needs --n 2 or more")
        if self.command == "graph" and self.p is not None and not 0 <= self.p <= 1:
            raise UsageError("--p must lie in [0, 1]")
        if self.command == "check" and not self.path:
            raise UsageError("check needs a certificate path")
        if self.command == "monk" and self.n < 2:
            raise UsageError("monk needs --n 2 or more")
        if self.command in ("matrices", "ra-check") and self.construction == "blur" and self.I < 2:
            raise UsageError("--I must be at least 2")


def output_dir(config: RunConfig) -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "."))


def _build_spec(c: RunConfig):
    from .blowup import CliqueScheme, alpha_of_graph, atom_names, blur_structure, f_l_mu
    from .finite_ra import make_M
    if c.construction == "blur":
        return blur_structure(make_M(atom_names(c.I)))
    if c.construction == "f_l_mu":
        return f_l_mu(atom_names(c.I), c.l, c.mu)
    return alpha_of_graph(CliqueScheme(c.N), c.n)


class _Out:
    """Collects a report; text lines go out as they come, JSON at the end."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.doc = {"command": config.command, "config": asdict(config), "tool": __version__}
        self.failed = False

    def line(self, text: str):
        if self.config.format == "text":
            print(text)

    def set(self, key, value):
        self.doc[key] = value

    def fail(self, why: str):
        self.failed = True
        self.doc.setdefault("failures", []).append(why)
        self.line(f"FAIL: {why}")

    def finish(self) -> int:
        self.doc["ok"] = not self.failed
        if self.config.format == "json":
            text = json.dumps(self.doc, sort_keys=True, indent=1, default=str) + "\n"
            if self.config.output and self.config.command not in ("certify", "represent", "monk"):
                Path(self.config.output).write_text(text)
            else:
                sys.stdout.write(text)
        return EXIT_FAILED if self.failed else EXIT_OK


# -- commands -------------------------------------------------------------------

def cmd_graph(c: RunConfig, out: _Out):
    from .graphs import (format_graph, girth, make_disjoint_cliques, minimum_coloring, parse_graph,
                         sample_random_graph)
    if c.graph_file:
        g = parse_graph(Path(c.graph_file).read_text())
        source = c.graph_file
    elif c.p is not None:
        g = sample_random_graph(c.N, c.p, c.seed)
        source = f"G({c.N}, {c.p}) seed {c.seed}"
    else:
        g = make_disjoint_cliques(c.copies, c.N)
        source = f"{c.copies} disjoint K_{c.N}"
    col = minimum_coloring(g)
    gi = girth(g)
    out.line(f"graph: {source}; {g.node_count} nodes, {len(g.edges)} edges")
    out.line(f"chromatic number: {col.colors_used}")
    out.line(f"girth: {gi}")
    out.set("nodes", g.node_count)
    out.set("edges", len(g.edges))
    out.set("chromatic_number", col.colors_used)
    out.set("coloring", [col[v] for v in g.nodes])
    out.set("girth", str(gi) if not isinstance(gi, int) else gi)
    if c.output and c.format == "text":
        Path(c.output).write_text(format_graph(g))


def cmd_ra_check(c: RunConfig, out: _Out):
    from .blowup import Truncation, atom_names, truncate
    from .finite_ra import check_axioms, is_associative, make_M
    if c.construction == "blur" and c.I < 6:
        s = make_M(atom_names(c.I))
        what = f"M over {c.I} atoms"
    else:
        spec = _build_spec(c)
        s = truncate(spec, Truncation(c.depth, c.copies))
        what = f"{c.construction} truncated (depth {c.depth})"
    bad = check_axioms(s)
    out.line(f"{what}: {len(s.atoms)} atoms, {len(bad)} violations")
    out.set("atoms", len(s.atoms))
    out.set("violations", [[v.law, list(map(repr, v.triple))] for v in bad[:100]])
    if len(s.atoms) <= 8:
        assoc = is_associative(s)
        out.line(f"associative: {assoc}")
        out.set("associative", assoc)
        if not assoc:
            out.fail("composition is not associative")
    if bad:
        out.fail(f"{len(bad)} axiom violations, first: {bad[0].law} {bad[0].triple!r}")


def cmd_blur_build(c: RunConfig, out: _Out):
    from .blowup import Truncation
    spec = _build_spec(c)
    atoms = spec.window_atoms(Truncation(c.depth, c.copies))
    out.line(f"construction: {c.construction} {spec.params()}")
    if hasattr(spec, "blurs"):
        out.line(f"blurs: {len(spec.blurs)}")
        out.set("blurs", [repr(w) for w in spec.blurs])
    out.line(f"atoms in the window: {len(atoms)}")
    out.set("spec", spec.params())
    out.set("atoms", len(atoms))


def cmd_blur_check(c: RunConfig, out: _Out):
    from .blowup import atom_names, two_subsets
    from .finite_ra import make_M
    from .symbolic import check_blur_conditions, n_complex_blur
    names = atom_names(c.I)
    if c.I >= 6 and (c.construction == "blur" or (c.construction == "f_l_mu" and c.I >= 3 * c.l)):
        spec = _build_spec(c)
        report = check_blur_conditions(spec)
        out.line(f"conditions (i)-(iii) on {c.construction}: {len(report)} counterexamples")
        out.set("conditions", [r.as_dict() for r in report])
        for r in report[:5]:
            out.fail(f"condition ({r.condition}) fails at {r.witness!r}")
    else:
        out.line("conditions (i)-(iii): skipped, the construction needs at least 6 atoms")
    if c.I >= 2:
        M = make_M(names)
        ok = n_complex_blur(M, two_subsets(names), c.n)
        out.line(f"(**) with n = {c.n} over {c.I} atoms: {ok}")
        out.set("n_complex_blur", ok)
        if not ok:
            out.fail(f"(**) fails for n = {c.n}, |I| = {c.I}")


def cmd_represent(c: RunConfig, out: _Out):
    from .representation import default_generators, new_graph, saturate, verify_representation
    from .symbolic import random_element
    spec = _build_spec(c)
    gens = default_generators(spec)
    g = saturate(new_graph(spec), spec, gens, c.steps)
    rng = np.random.default_rng(c.seed)
    k = min(c.sample, len(gens))
    pick = sorted(rng.choice(len(gens), size=k // 2, replace=False).tolist()) if k else []
    sample = [gens[i] for i in pick] + [random_element(spec, rng) for _ in range(k - len(pick))]
    report = verify_representation(g, sample)
    log_path = Path(c.output) if c.output else output_dir(c) / f"represent-{c.construction}-{c.I}-{c.steps}-{c.seed}.jsonl"
    log_path.write_text(g.export_log())
    out.line(f"nodes: {g.n}, extensions: {g.steps}, dequeued defects: {len(g.dequeued)}")
    out.line(f"violations: {len(report.violations)}, pending reverse-inclusion pairs: {report.pending}")
    out.line(f"step log: {log_path}")
    out.set("nodes", g.n)
    out.set("steps", g.steps)
    out.set("violations", report.violations)
    out.set("pending", report.pending)
    out.set("log", str(log_path))
    for v in report.violations[:5]:
        out.fail(v)


def cmd_certify(c: RunConfig, out: _Out):
    from .nonrep import certify
    spec = _build_spec(c)
    cert = certify(spec, depth=c.depth, copies=c.copies, seed=c.seed)
    path = Path(c.output) if c.output else output_dir(c) / f"certificate-{c.construction}.json"
    cert.save(path)
    out.line(f"certificate: {path}")
    out.line(f"blocks: {len(cert['blocks'])}, all mono-zero: {cert['flags']['all_mono_zero']}")
    out.set("certificate", str(path))
    out.set("blocks", len(cert["blocks"]))


def cmd_check(c: RunConfig, out: _Out) -> Optional[int]:
    from .nonrep import CertificateError, check_certificate
    try:
        check_certificate(c.path)
    except CertificateError as e:
        out.fail(f"{type(e).__name__}: {e}")
        out.finish()
        return e.exit_code
    out.line(f"{c.path}: valid")
    return None


def cmd_matrices(c: RunConfig, out: _Out):
    from .blowup import atom_names
    from .finite_ra import make_M
    from .matrices import check_cylindric_basis, enumerate_matrices, matrices_to_json
    s = make_M(atom_names(c.I))
    ms = enumerate_matrices(s, c.n)
    rep = check_cylindric_basis(s, c.n, ms)
    out.line(f"basic {c.n}-matrices over M with {c.I} atoms: {len(ms)}")
    out.line(f"amalgamation failures: {rep.total}")
    out.set("matrices", len(ms))
    out.set("amalgamation_failures", rep.total)
    if c.output:
        Path(c.output).write_text(matrices_to_json(ms))
    if not rep.empty:
        m, a, b = rep.failures[0]
        out.fail(f"no amalgam over {m.entries!r} for columns {a!r}, {b!r}")


def cmd_monk(c: RunConfig, out: _Out):
    from .nonrep import check_certificate, monk_sequence
    members = monk_sequence(c.n, c.count, copies=c.copies)
    rows = []
    d = output_dir(c) if not c.output else Path(c.output)
    d.mkdir(parents=True, exist_ok=True)
    for i, m in enumerate(members):
        size = c.n * (c.n - 1) // 2 + i
        path = d / f"monk-{c.n}-{i}.json"
        m.certificate.save(path)
        check_certificate(m.certificate)
        out.line(f"member {i}: cliques of size {size}, chromatic number {m.chromatic_number}, "
                 f"{len(m.certificate['blocks'])} blocks, certificate {path}")
        rows.append({"clique_size": size, "chromatic_number": m.chromatic_number,
                     "blocks": len(m.certificate["blocks"]), "certificate": str(path)})
    out.set("members", rows)


COMMANDS = {
    "graph": cmd_graph, "ra-check": cmd_ra_check, "blur-build": cmd_blur_build, "blur-check": cmd_blur_check,
    "represent": cmd_represent, "certify": cmd_certify, "check": cmd_check, "matrices": cmd_matrices,
    "monk": cmd_monk,
}


def run(config: RunConfig) -> int:
    try:
        config.validate()
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    out = _Out(config)
    try:
        code = COMMANDS[config.command](config, out)
    except (UsageError, ValueError) as e:
        # parameter problems found while building (sizes, bounds)
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001 - reported as an internal failure
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    if code is not None:
        return code
    return out.finish()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blowblur", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *flags):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--output", "-o")
        sp.add_argument("--seed", type=int, default=0)
        for f in flags:
            if f == "construction":
                sp.add_argument("--construction", choices=("blur", "f_l_mu", "alpha"), default="blur")
            elif f in ("p",):
                sp.add_argument("--p", type=float)
            else:
                sp.add_argument(f"--{f}", type=int, default=RunConfig.__dataclass_fields__[f].default,
                                dest=f)

    sp = sub.add_parser("graph", help="chromatic number and girth of a graph")
    common(sp, "N", "copies", "p")
    sp.add_argument("--file", dest="graph_file")
    sp = sub.add_parser("ra-check", help="axioms of M or of a truncated construction")
    common(sp, "construction", "I", "l", "mu", "n", "N", "copies", "depth")
    sp = sub.add_parser("blur-build", help="build a construction and report its size")
    common(sp, "construction", "I", "l", "mu", "n", "N", "copies", "depth")
    sp = sub.add_parser("blur-check", help="conditions (i)-(iii) and (**)")
    common(sp, "construction", "I", "l", "mu", "n")
    sp = sub.add_parser("represent", help="saturate a coloured graph and verify rep")
    common(sp, "construction", "I", "l", "mu", "steps", "sample")
    sp = sub.add_parser("certify", help="write a non-representability certificate")
    common(sp, "construction", "I", "l", "mu", "n", "N", "copies", "depth")
    sp = sub.add_parser("check", help="re-verify a certificate file")
    common(sp)
    sp.add_argument("path")
    sp = sub.add_parser("matrices", help="basic matrices over M and the basis check")
    common(sp, "I", "n")
    sp = sub.add_parser("monk", help="Monk sequence of clique graphs with certificates")
    common(sp, "n", "count", "copies")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    kwargs = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    return run(RunConfig(**kwargs))


if __name__ == "__main__":
    sys.exit(main())
