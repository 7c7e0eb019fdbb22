from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blowblur.blowup import IDENTITY, BlurAtom, Truncation, blur_structure, f_l_mu, truncate, two_subsets
from blowblur.finite_ra import make_M
from blowblur.symbolic import (EMPTY, FULL, BlurFilter, Principal, Slice, TermElement, atom_comp,
                               check_blur_conditions, complement, compose, converse, finite_element, full_blur,
                               identity_element, in_ultrafilter, join, meet, n_complex_blur, random_element,
                               singleton, top, uf_triple_consistent, uf_triple_consistent_sampled,
                               window_vector, zero)
from oracles import brute_atom_rows, brute_compose, literal_n_complex


def blur_of(spec, *members):
    return next(w for w in spec.blurs if set(w.members) == set(members))


def test_atom_comp_example(blur6):
    AB = blur_of(blur6, "A", "B")
    a, b = BlurAtom(3, "A", AB), BlurAtom(5, "B", AB)
    ab = atom_comp(blur6, a, b)
    assert not ab.identity
    # blurs avoiding both A and B are taken whole
    assert ab.slice(blur_of(blur6, "C", "D")) == FULL
    # inside AB only the rows 1, 4, 7 survive, and A;B in M is everything but Id
    assert ab.slice(AB) == Slice(False, frozenset((k, p) for k in (1, 4, 7) for p in "AB"))
    assert BlurAtom(4, "A", AB) in ab and BlurAtom(5, "A", AB) not in ab


def test_atom_comp_with_identity(blur6):
    a = BlurAtom(2, "C", blur_of(blur6, "C", "E"))
    assert atom_comp(blur6, IDENTITY, a) == singleton(a) == atom_comp(blur6, a, IDENTITY)
    assert atom_comp(blur6, a, a).identity


def test_atom_comp_matches_brute_force(blur6):
    ys = [y for j in range(6) for y in blur6.row_atoms(j)]
    for i in (0, 3, 5):
        for x in blur6.row_atoms(i)[::7]:
            want = brute_atom_rows(blur6, x, ys)
            got = np.array([window_vector(blur6, atom_comp(blur6, x, y), 20) for y in ys])
            assert np.array_equal(got, want)


def test_compose_matches_brute_force(blur6):
    rng = np.random.default_rng(7)
    for _ in range(40):
        X, Y = random_element(blur6, rng), random_element(blur6, rng)
        assert np.array_equal(window_vector(blur6, compose(blur6, X, Y), 20), brute_compose(blur6, X, Y))


def test_compose_identity_and_zero(blur6):
    rng = np.random.default_rng(3)
    for _ in range(30):
        X = random_element(blur6, rng)
        assert compose(blur6, identity_element(), X) == X == compose(blur6, X, identity_element())
        assert compose(blur6, zero(), X) == zero()


def test_compose_is_associative(blur6):
    rng = np.random.default_rng(11)
    for _ in range(25):
        X, Y, Z = (random_element(blur6, rng, max_row=4, max_slices=2) for _ in range(3))
        assert compose(blur6, compose(blur6, X, Y), Z) == compose(blur6, X, compose(blur6, Y, Z))


def test_compose_distributes_over_join(blur6):
    rng = np.random.default_rng(5)
    for _ in range(25):
        X, Y, Z = (random_element(blur6, rng) for _ in range(3))
        assert compose(blur6, X, join(Y, Z)) == join(compose(blur6, X, Y), compose(blur6, X, Z))


def test_canonical_form():
    spec = blur_structure(make_M(list("ABCDEF")))
    w = spec.blurs[0]
    # an explicitly empty slice is the same element as no slice
    assert TermElement(False, ((w, EMPTY),)) == zero()
    assert hash(TermElement(False, ((w, EMPTY),))) == hash(zero())
    a = BlurAtom(1, w.members[0], w)
    assert finite_element([a, a]) == singleton(a)


def test_boolean_laws(blur6):
    rng = np.random.default_rng(2)
    T = top(blur6)
    for _ in range(50):
        X, Y = random_element(blur6, rng), random_element(blur6, rng)
        assert complement(blur6, complement(blur6, X)) == X
        assert join(X, complement(blur6, X)) == T
        assert meet(X, complement(blur6, X)) == zero()
        assert complement(blur6, join(X, Y)) == meet(complement(blur6, X), complement(blur6, Y))
        assert converse(X) == X
        v = window_vector(blur6, X, 6)
        assert np.array_equal(window_vector(blur6, complement(blur6, X), 6), ~v)
        assert np.array_equal(window_vector(blur6, meet(X, Y), 6), v & window_vector(blur6, Y, 6))


def test_window_vector_matches_truncation_order(blur6):
    s = truncate(blur6, Truncation(3))
    X = finite_element([s.atoms[5], s.atoms[77]])
    v = window_vector(blur6, X, 3)
    assert list(np.nonzero(v)[0]) == [5, 77]


def test_ultrafilter_membership(blur6):
    w = blur6.blurs[4]
    a = BlurAtom(2, w.members[1], w)
    assert in_ultrafilter(singleton(a), Principal(a))
    assert not in_ultrafilter(singleton(a), BlurFilter(w))
    assert in_ultrafilter(full_blur(w), BlurFilter(w))
    cof = TermElement(False, ((w, Slice(True, frozenset({(0, w.members[0])}))),))
    assert in_ultrafilter(cof, BlurFilter(w))
    assert not in_ultrafilter(complement(blur6, cof), BlurFilter(w))


def test_uf_examples(blur6):
    AB, CD = blur_of(blur6, "A", "B"), blur_of(blur6, "C", "D")
    a = BlurAtom(0, "A", AB)
    assert uf_triple_consistent(blur6, Principal(IDENTITY), Principal(a), Principal(a))
    # a;a meets CD cofinitely: A, A and {C, D} share no base
    assert uf_triple_consistent(blur6, Principal(a), Principal(a), BlurFilter(CD))
    # Id;U^W is U^W
    assert uf_triple_consistent(blur6, Principal(IDENTITY), BlurFilter(AB), BlurFilter(AB))
    assert not uf_triple_consistent(blur6, Principal(IDENTITY), BlurFilter(AB), BlurFilter(CD))
    assert not uf_triple_consistent(blur6, Principal(IDENTITY), Principal(a), BlurFilter(AB))


def labels(spec):
    atoms = [IDENTITY] + [a for i in range(3) for a in spec.row_atoms(i)]
    return st.one_of(st.sampled_from(atoms).map(Principal), st.sampled_from(spec.blurs).map(BlurFilter))


def test_uf_is_permutation_invariant(blur6):
    @settings(max_examples=150, deadline=None)
    @given(labels(blur6), labels(blur6), labels(blur6))
    def check(F, G, K):
        v = uf_triple_consistent(blur6, F, G, K)
        assert all(uf_triple_consistent(blur6, *p) == v for p in permutations((F, G, K)))
    check()


def test_uf_closed_form_agrees_with_sampling(f21):
    @settings(max_examples=60, deadline=None)
    @given(labels(f21), labels(f21), labels(f21))
    def check(F, G, K):
        assert uf_triple_consistent(f21, F, G, K) == uf_triple_consistent_sampled(f21, F, G, K)
    check()


@pytest.mark.parametrize("make", [lambda: blur_structure(make_M(list("ABCDEF"))),
                                  lambda: f_l_mu(list("ABCDEF"), 2, 1),
                                  lambda: f_l_mu(list("ABCDEFG"), 2, 2)])
def test_blur_conditions_hold(make):
    assert check_blur_conditions(make()) == []


def doctored(M, I):
    base = type(blur_structure(M))

    class NoDisjoint(base):
        def disjoint_ok(self, S, Z, W):
            return False

    return NoDisjoint(M, I, two_subsets(I))


def test_blur_conditions_fail_without_disjoint_triples(M6):
    report = check_blur_conditions(doctored(M6, M6.diversity_atoms))
    assert report
    # (ii) survives through evenly distributed rows; (iii) needs disjoint blurs
    assert "iii" in {c.condition for c in report}
    assert all(set(c.as_dict()) == {"condition", "witness"} for c in report)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_n_complex_blur_matches_literal(k):
    I = [chr(65 + i) for i in range(k)]
    M = make_M(I)
    for n in (1, 2):
        assert n_complex_blur(M, two_subsets(I), n) == literal_n_complex(M, two_subsets(I), n)


def test_n_complex_blur_values():
    def at(k):
        I = [chr(65 + i) for i in range(k)]
        return n_complex_blur(make_M(I), two_subsets(I), 3)
    assert at(6) and at(8)
    assert not at(3)
    assert n_complex_blur(make_M(list("ABC")), two_subsets("ABC"), 0)


def test_random_element_is_seeded(blur6):
    a = [random_element(blur6, np.random.default_rng(9)) for _ in range(2)]
    assert a[0] == a[1]
