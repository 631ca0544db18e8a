import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfbraid.nilpotent import (ABOVE_BOUND, ClassUnsupported, NilpotentImage,
                                 generator_series, hall_basis, hall_word,
                                 nilpotent_quotient, series_inverse,
                                 series_leading_weight, series_mul,
                                 series_one, witt_rank, word_series)
from surfbraid.presentations import Presentation, catalog
from surfbraid.words import Sym, Word, commutator

A, B = Sym("a"), Sym("b")
WA, WB = Word.from_syms(A), Word.from_syms(B)


# -- an independent truncated-series oracle --------------------------------
# Multiplies group words directly in the truncated tensor algebra, storing
# coefficients per weight in nested dictionaries keyed by index tuples.
# Written against the same mathematical definition but sharing no code with
# the implementation under test.

def _oracle_one(c):
    return [{} for _ in range(c + 1)]


def _oracle_gen(i, exp, c):
    """(1 + X_i)^exp truncated at weight c, exp = +-1."""
    out = _oracle_one(c)
    coeff = 1
    for k in range(1, c + 1):
        coeff = coeff * (exp if k == 1 else (-exp if exp == -1 else 0))
        # (1+X)^1 = 1 + X ; (1+X)^-1 = 1 - X + X^2 - ...
        pass
    if exp == 1:
        out[1][(i,)] = 1
    else:
        sign = -1
        for k in range(1, c + 1):
            out[k][(i,) * k] = sign
            sign = -sign
    return out


def _oracle_mul(s, t, c):
    out = _oracle_one(c)
    for k in range(1, c + 1):
        acc = dict(s[k])
        for m, v in t[k].items():
            acc[m] = acc.get(m, 0) + v
        for i in range(1, k):
            for m1, v1 in s[i].items():
                for m2, v2 in t[k - i].items():
                    m = m1 + m2
                    acc[m] = acc.get(m, 0) + v1 * v2
        out[k] = {m: v for m, v in acc.items() if v}
    return out


def _oracle_word(letters, c):
    out = _oracle_one(c)
    for i, exp in letters:
        out = _oracle_mul(out, _oracle_gen(i, exp, c), c)
    return out


def _series_to_layers(s, c):
    out = [{} for _ in range(c + 1)]
    for m, v in s.items():
        if m and v and len(m) <= c:
            out[len(m)][m] = v
    return out


class TestSeriesArithmetic:
    @given(st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])),
                    max_size=8))
    @settings(max_examples=120)
    def test_matches_independent_oracle(self, letters):
        c = 3
        mine = _series_to_layers(word_series(letters, c), c)
        theirs = _oracle_word(letters, c)
        assert mine == theirs

    @given(st.lists(st.tuples(st.integers(0, 1), st.sampled_from([1, -1])),
                    max_size=6))
    @settings(max_examples=80)
    def test_inverse(self, letters):
        c = 3
        s = word_series(letters, c)
        assert series_mul(s, series_inverse(s, c), c) == series_one()

    def test_leading_weight(self):
        c = 3
        s = word_series([(0, 1), (1, 1), (0, -1), (1, -1)], c)
        assert series_leading_weight(s, c) == 2
        assert series_leading_weight(series_one(), c) is ABOVE_BOUND

    def test_generator_series(self):
        c = 2
        assert generator_series(0, 1, c) == word_series([(0, 1)], c)


class TestHallBasis:
    @pytest.mark.parametrize("rank,c,counts", [
        (2, 3, [2, 1, 2]),
        (2, 4, [2, 1, 2, 3]),
        (3, 3, [3, 3, 8]),
    ])
    def test_witt_counts(self, rank, c, counts):
        basis = hall_basis(rank, c)
        for k, expected in enumerate(counts, start=1):
            assert witt_rank(rank, k) == expected
            assert sum(1 for e in basis if e.weight == k) == expected

    def test_hall_words_are_brackets(self):
        basis = hall_basis(2, 3)
        gens = [A, B]
        for pos, e in enumerate(basis):
            w = hall_word(2, 3, pos, gens)
            if e.weight == 1:
                assert len(w.letters) == 1
            else:
                # a genuine commutator: zero exponent sum on every letter
                for s in (A, B):
                    assert sum(exp for sym, exp in w.letters if sym == s) == 0


def _layer(rep, k):
    lay = rep.layers[k - 1]
    return (lay.free_rank, lay.torsion)


class TestNilpotentQuotients:
    def test_free_rank2(self):
        rep = nilpotent_quotient(Presentation("F2", [A, B], []), 3)
        assert [_layer(rep, k) for k in (1, 2, 3)] == [(2, ()), (1, ()), (2, ())]

    def test_one_strand_klein(self):
        rep = nilpotent_quotient(catalog("Pi1K", 1), 3)
        assert [_layer(rep, k) for k in (1, 2, 3)] == [
            (1, (2,)), (0, (2,)), (0, (2,))]

    def test_two_strand_klein_braid(self):
        rep = nilpotent_quotient(catalog("BnK", 2), 3)
        assert [_layer(rep, k) for k in (1, 2, 3)] == [
            (1, (2, 2)), (0, (2, 2)), (0, (2, 2, 2))]

    @pytest.mark.parametrize("n", [3, 4])
    def test_klein_collapse(self, n):
        rep = nilpotent_quotient(catalog("BnK", n), 3)
        assert _layer(rep, 2) == (0, ())
        assert _layer(rep, 3) == (0, ())

    def test_torus_second_layer(self):
        rep = nilpotent_quotient(catalog("BnT", 3), 2)
        assert _layer(rep, 2) == (0, (3,))

    def test_two_strand_klein_pure(self):
        rep = nilpotent_quotient(catalog("P2K_reduced", 2), 2)
        assert _layer(rep, 2) == (0, (2, 2, 2))

    def test_nonorientable_collapse(self):
        rep = nilpotent_quotient(catalog("BnNg", 3, g=3), 3)
        assert _layer(rep, 1) == (3, (2,))
        assert _layer(rep, 2) == (0, ())
        assert _layer(rep, 3) == (0, ())

    def test_layer1_matches_abelianization(self):
        from surfbraid.presentations import abelianization
        for fam, n, g in [("BnK", 3, None), ("BnT", 4, None), ("BnNg", 2, 3)]:
            p = catalog(fam, n, g)
            rep = nilpotent_quotient(p, 2)
            inv = abelianization(p)
            assert _layer(rep, 1) == (inv.free_rank, inv.torsion)

    def test_class_bound_validation(self):
        with pytest.raises(ClassUnsupported):
            nilpotent_quotient(catalog("BnK", 2), 5)


class TestNilpotentImage:
    def test_power_membership(self):
        img = NilpotentImage([A, B], 3)
        img.add_words([WA ** 2])
        assert img.contains_word(WA ** 4)
        assert img.contains_word(WA ** -2)
        assert not img.contains_word(WA)

    def test_normal_closure_contains_conjugates(self):
        img = NilpotentImage([A, B], 3)
        img.add_words([WA ** 2])
        assert img.contains_word(WB * WA ** 2 * ~WB)
        assert img.contains_word(commutator(WA ** 2, WB))

    def test_odd_commutator_excluded(self):
        img = NilpotentImage([A, B], 3)
        img.add_words([WA ** 2])
        assert not img.contains_word(commutator(WA, WB))

    def test_identity_always_contained(self):
        img = NilpotentImage([A, B], 2)
        assert img.contains_word(Word([]))

    def test_relator_closure_gives_quotient_membership(self):
        p = catalog("Pi1K", 1)
        img = NilpotentImage(list(p.generators), 3)
        img.add_words(list(p.relators))
        a1 = Word.from_syms(Sym("a", (1,)))
        b1 = Word.from_syms(Sym("b", (1,)))
        # [a, b] = a^2 modulo the relation, and a itself stays outside
        assert img.contains_word(commutator(a1, b1) * a1 ** -2)
        assert not img.contains_word(a1)

    def test_class_bound_validation(self):
        with pytest.raises(ClassUnsupported):
            NilpotentImage([A], 0)
