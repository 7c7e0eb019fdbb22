"""
Finite algebra M and its blow-up
================================

M has one identity and diversity atoms I with P;P = (I - P) + Id and P;Q = I.
The blur structure splits every atom of I into infinitely many copies
a_i^{P,W}, one per row i and 2-subset W containing P.
"""
import numpy as np

from blowblur.blowup import BlurAtom, Truncation, blur_structure, evenly_distributed, truncate
from blowblur.finite_ra import check_axioms, cm_compose, is_associative, make_M

# --- M itself
M = make_M(list("ABCDEF"))
print("M:", M)
print("A;A =", sorted(cm_compose(M, {"A"}, {"A"})))
print("A;B =", sorted(cm_compose(M, {"A"}, {"B"})))
print("associative:", is_associative(make_M(list("ABCD"))))

# --- rows only matter through arithmetic progressions
print("e(3,5,7) =", evenly_distributed(3, 5, 7), " e(3,5,8) =", evenly_distributed(3, 5, 8))

# --- the blur structure, queried atom by atom
spec = blur_structure(M)
W = {frozenset(w.members): w for w in spec.blurs}
AB, AC, AD = W[frozenset("AB")], W[frozenset("AC")], W[frozenset("AD")]
print(len(spec.blurs), "blurs")
print(spec.consistent(BlurAtom(3, "A", AB), BlurAtom(5, "C", AC), BlurAtom(7, "D", AD)))
print(spec.consistent(BlurAtom(3, "A", AB), BlurAtom(5, "C", AC), BlurAtom(8, "D", AD)))

# --- a finite window is an ordinary finite atom structure
s = truncate(spec, Truncation(8))
print(len(s.atoms), "atoms in the depth-8 window;", int(s.table.sum()), "consistent triples")
print("axiom violations:", len(check_axioms(s)))

# density of consistent triples per row offset
rows = np.array([0] + [a.row for a in s.atoms[1:]])
for d in range(4):
    pick = np.nonzero(rows == d)[0]
    print(f"row {d}: {s.table[np.ix_(pick, pick, pick)].mean():.3f} of triples consistent")
