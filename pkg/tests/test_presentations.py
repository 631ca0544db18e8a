import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfbraid.presentations import (BadParameters, IntMatrix, Presentation,
                                     TorusMetabelianElement, abelianization,
                                     all_trivial, catalog, check_homomorphism,
                                     derived_relation_instances,
                                     exponent_matrix, free_oracle,
                                     pi1k_normal_form, pi1k_oracle,
                                     smith_normal_form,
                                     torus_metabelian_evaluate,
                                     torus_metabelian_oracle)
from surfbraid.words import Sym, Word, commutator, substitute

A1, B1 = Sym("a", (1,)), Sym("b", (1,))


class TestSmithNormalForm:
    def test_diagonal_only(self):
        diag, _, _ = smith_normal_form(IntMatrix([[2, 0], [0, 3]], cols=2))
        assert diag == [1, 6]

    def test_zero_matrix(self):
        diag, _, _ = smith_normal_form(IntMatrix([[0, 0]], cols=2))
        assert diag == [0]

    @given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3),
                    min_size=1, max_size=4))
    @settings(max_examples=60)
    def test_divisibility_chain(self, rows):
        diag, _, _ = smith_normal_form(IntMatrix(rows, cols=3))
        nonzero = [d for d in diag if d]
        assert all(d > 0 for d in nonzero)
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


class TestAbelianizations:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_torus(self, n):
        inv = abelianization(catalog("BnT", n))
        assert (inv.free_rank, inv.torsion) == (2, (2,))

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_klein(self, n):
        inv = abelianization(catalog("BnK", n))
        assert (inv.free_rank, inv.torsion) == (1, (2, 2))

    @pytest.mark.parametrize("n,g", [(2, 3), (3, 3), (2, 4), (3, 4)])
    def test_nonorientable(self, n, g):
        inv = abelianization(catalog("BnNg", n, g=g))
        assert (inv.free_rank, inv.torsion) == (g, (2,))

    def test_two_strand_klein(self):
        inv = abelianization(catalog("P2K_reduced", 2))
        assert (inv.free_rank, inv.torsion) == (2, (2, 2))

    def test_one_strand_klein(self):
        inv = abelianization(catalog("Pi1K", 1))
        assert (inv.free_rank, inv.torsion) == (1, (2,))

    def test_torus_metabelian(self):
        inv = abelianization(catalog("TorusMetabelian", 5))
        assert (inv.free_rank, inv.torsion) == (2, (2,))


class TestCatalog:
    def test_unknown_family(self):
        with pytest.raises(BadParameters):
            catalog("Nope", 2)

    def test_reduced_needs_n2(self):
        with pytest.raises(BadParameters):
            catalog("P2K_reduced", 3)

    def test_genus_only_for_nonorientable(self):
        with pytest.raises(BadParameters):
            catalog("BnT", 3, g=2)

    def test_exponent_matrix_shape(self):
        p = catalog("BnK", 3)
        m = exponent_matrix(p)
        assert m.cols == len(p.generators)
        assert len(m.entries) == len(p.relators)


class TestOneStrandSolver:
    def test_normal_form_word(self):
        w = Word([(B1, 1), (A1, 1), (B1, 1)])
        assert pi1k_normal_form(w) == (2, -1)

    def test_relator_is_trivial(self):
        p = catalog("Pi1K", 1)
        for r in p.relators:
            assert pi1k_normal_form(r) == (0, 0)

    def test_oracle_verdicts(self):
        assert pi1k_oracle(Word([])) == "Trivial"
        assert pi1k_oracle(Word([(A1, 1)])) == "NonTrivial"

    @given(st.lists(st.tuples(st.sampled_from([A1, B1]),
                              st.sampled_from([1, -1])), max_size=10))
    @settings(max_examples=100)
    def test_normal_form_is_homomorphic(self, letters):
        # w * w^-1 always solves to the origin
        w = Word(letters)
        assert pi1k_normal_form(w * ~w) == (0, 0)


class TestTorusMetabelian:
    def test_sigma_order(self):
        n = 5
        one = TorusMetabelianElement(n)
        s = Word.from_syms(Sym("s"))
        orders = [k for k in range(1, 2 * n + 1)
                  if torus_metabelian_evaluate(s ** k, n) == one]
        assert orders == [2 * n]

    def test_sigma_central(self):
        n = 5
        one = TorusMetabelianElement(n)
        s, a = Word.from_syms(Sym("s")), Word.from_syms(Sym("a"))
        assert torus_metabelian_evaluate(commutator(s, a), n) == one

    def test_relators_map_trivially(self):
        n = 5
        p = catalog("BnT", n)
        images = {Sym("a"): Word.from_syms(Sym("a")),
                  Sym("b"): Word.from_syms(Sym("b"))}
        for i in range(1, n):
            images[Sym("s", (i,))] = Word.from_syms(Sym("s"))
        report = check_homomorphism(p, images, torus_metabelian_oracle(n))
        assert all_trivial(report)


class TestDerivedInstances:
    def test_instance_count(self):
        inst = derived_relation_instances(5, range(-1, 2), range(-1, 2))
        assert len(inst) == 288

    def test_needs_three_strands(self):
        with pytest.raises(BadParameters):
            derived_relation_instances(2, [0], [0])

    def test_instances_trivial_in_metabelian_image(self):
        n = 5
        one = TorusMetabelianElement(n)
        images = {Sym("a"): TorusMetabelianElement(n, i=1),
                  Sym("b"): TorusMetabelianElement(n, j=1)}
        for i in range(1, n):
            images[Sym("s", (i,))] = TorusMetabelianElement(n, k=1)
        for w in derived_relation_instances(n, [0, 1], [0, 1]):
            assert torus_metabelian_evaluate(w, n, images=images) == one


def test_free_oracle():
    assert free_oracle(Word([])) == "Trivial"
    assert free_oracle(Word([(A1, 1), (A1, -1)])) == "Trivial"
    assert free_oracle(Word([(A1, 1)])) == "NonTrivial"
