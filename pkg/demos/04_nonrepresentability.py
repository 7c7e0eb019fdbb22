"""
Certificates and the Monk sequence
==================================

Finitely many monochromatic blocks, each with (b;b).b = 0, over an infinite
carrier: a certificate records the blocks and everything needed to check them
again.  Graphs of disjoint cliques give a sequence whose chromatic numbers
grow.
"""
import json
import tempfile
from pathlib import Path

from blowblur.blowup import blur_structure, two_subsets
from blowblur.finite_ra import make_M
from blowblur.matrices import check_cylindric_basis, enumerate_matrices
from blowblur.nonrep import certify, check_certificate, coarse_embedding_table, monk_sequence
from blowblur.symbolic import n_complex_blur

spec = blur_structure(make_M(list("ABCDEF")))
table = coarse_embedding_table(spec)
print("H^A ; H^A =", sorted(map(repr, table["A", "A"])))

cert = certify(spec)
print(len(cert["blocks"]), "blocks, flags", cert["flags"])
path = cert.save(Path(tempfile.mkdtemp()) / "blur.json")
print("re-check:", check_certificate(path))

bad = json.loads(path.read_text())
bad["mono_zero"][1]["zero"] = False
try:
    check_certificate(bad)
except Exception as e:
    print("tampered:", e)

for m in monk_sequence(3, 4):
    print(f"cliques of size {m.spec.graph.size}: chromatic number {m.chromatic_number}, "
          f"{len(m.certificate['blocks'])} blocks")

# basic matrices amalgamate exactly when (**) holds
for k in (3, 4, 6):
    I = [chr(65 + i) for i in range(k)]
    M = make_M(I)
    r = check_cylindric_basis(M, 3, enumerate_matrices(M, 3))
    print(f"|I|={k}: {r.matrices} matrices, {r.total} failed amalgamations, (**) {n_complex_blur(M, two_subsets(I), 3)}")
