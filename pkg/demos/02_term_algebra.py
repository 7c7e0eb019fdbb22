"""
The term algebra, symbolically
==============================

Elements meet every slice E^W in a finite or cofinite set, so they have a
finite description.  Composition is computed in closed form; a finite window
check against the oracle shows it agrees.
"""
import numpy as np

from blowblur.blowup import BlurAtom, Truncation, blur_structure, truncate, two_subsets
from blowblur.finite_ra import make_M
from blowblur.symbolic import (BlurFilter, Principal, atom_comp, check_blur_conditions, complement, compose,
                               full_blur, n_complex_blur, singleton, uf_triple_consistent, window_vector)

spec = blur_structure(make_M(list("ABCDEF")))
AB = spec.blurs[0]
a, b = BlurAtom(3, "A", AB), BlurAtom(5, "B", AB)

ab = atom_comp(spec, a, b)
print("a;b inside E^{A,B}:", ab.slice(AB))
print("cofinite in", sum(ab.slice(w).cofinite for w in spec.blurs), "of", len(spec.blurs), "blurs")

X = full_blur(AB)
print("E^W ; E^W =", compose(spec, X, X))
print("its complement:", complement(spec, compose(spec, X, X)))

# compare one composite against brute force on a window
D = 6
s = truncate(spec, Truncation(2 * D))
Y = singleton(BlurAtom(1, "C", spec.blurs[5]))
want = s.table[np.ix_(window_vector(spec, X, 2 * D), window_vector(spec, Y, 2 * D))].any(axis=(0, 1))
got = window_vector(spec, compose(spec, X, Y), 2 * D)
print("window agreement on rows <", D, ":", np.array_equal(want[: 1 + D * 30], got[: 1 + D * 30]))

# ultrafilters and the three conditions
print(uf_triple_consistent(spec, Principal(a), Principal(a), BlurFilter(spec.blurs[-1])))
print("conditions (i)-(iii):", check_blur_conditions(spec) or "all hold")
for k in (3, 6, 8):
    I = [chr(65 + i) for i in range(k)]
    print(f"(**) n=3, |I|={k}:", n_complex_blur(make_M(I), two_subsets(I), 3))
