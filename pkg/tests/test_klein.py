import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfbraid.klein import (BadLevel, SemidirectElement, action_table,
                             base_generators, center_witness, fiber_basis,
                             normal_form, section_images, verify_action,
                             verify_central, verify_section)
from surfbraid.presentations import catalog
from surfbraid.words import Sym, Word, commutator, substitute

A1, B1 = Sym("a", (1,)), Sym("b", (1,))
A2, B2 = Sym("a", (2,)), Sym("b", (2,))


def _gen_word_strategy(n, max_len=8):
    syms = []
    for i in range(1, n + 1):
        syms += [Sym("a", (i,)), Sym("b", (i,))]
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            syms.append(Sym("C", (i, j)))
    letter = st.tuples(st.sampled_from(syms), st.sampled_from([1, -1]))
    return st.lists(letter, max_size=max_len).map(Word)


class TestSection:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_relators_survive(self, n):
        assert all(ok for _, ok in verify_section(n))

    def test_corrupted_control_fails(self):
        assert any(not ok for _, ok in verify_section(2, corrupted=True))

    def test_images_cover_generators(self):
        images = section_images(2)
        for g in catalog("PnK", 2).generators:
            assert g in images

    def test_bad_level(self):
        with pytest.raises(BadLevel):
            section_images(0)


class TestAction:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_action_respects_relations(self, n):
        assert all(ok for _, ok in verify_action(n))

    @pytest.mark.parametrize("n", [1, 2])
    def test_phi_psi_inverse(self, n):
        at = action_table(n)
        basis = fiber_basis(n + 1)
        for z in base_generators(n):
            for y in basis:
                w = Word.from_syms(y)
                assert at.apply_psi(z, at.apply_phi(z, w)) == w
                assert at.apply_phi(z, at.apply_psi(z, w)) == w


class TestNormalForm:
    def test_relators_solve_to_trivial(self):
        p = catalog("P2K_reduced", 2)
        for r in p.relators:
            assert normal_form(r, n=2).is_identity()

    def test_commuting_pure_generators(self):
        w = commutator(Word.from_syms(A1), Word.from_syms(A2))
        assert normal_form(w, n=2).is_identity()

    def test_nontrivial_word(self):
        assert not normal_form(Word.from_syms(A2), n=2).is_identity()

    def test_level_inference(self):
        e = normal_form(Word.from_syms(A2))
        assert e.level == 2

    def test_level_cap(self):
        w = Word.from_syms(Sym("a", (7,)))
        with pytest.raises(BadLevel):
            normal_form(w)

    @given(_gen_word_strategy(2), _gen_word_strategy(2))
    @settings(max_examples=60, deadline=None)
    def test_solver_is_homomorphic(self, u, v):
        lhs = normal_form(u * v, n=2)
        rhs = normal_form(u, n=2) * normal_form(v, n=2)
        assert lhs == rhs

    @given(_gen_word_strategy(2))
    @settings(max_examples=60, deadline=None)
    def test_inverse(self, w):
        e = normal_form(w, n=2)
        assert (e * ~e).is_identity()

    @given(_gen_word_strategy(2, max_len=6))
    @settings(max_examples=40, deadline=None)
    def test_word_round_trip(self, w):
        e = normal_form(w, n=2)
        assert normal_form(e.to_word(), n=2) == e

    @given(_gen_word_strategy(3, max_len=5))
    @settings(max_examples=25, deadline=None)
    def test_three_strand_inverse(self, w):
        e = normal_form(w, n=3)
        assert (~e * e).is_identity()


class TestCentre:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_witness_is_central(self, n):
        assert all(ok for _, ok in verify_central(n))

    @pytest.mark.parametrize("n", [2, 3])
    def test_witness_commutes_with_generators(self, n):
        z = center_witness(n)
        for g in catalog("PnK", n).generators:
            w = commutator(z, Word.from_syms(g))
            assert normal_form(w, n=n).is_identity()

    def test_negative_control(self):
        w = commutator(Word.from_syms(B2) ** 2, Word.from_syms(A2))
        assert not normal_form(w, n=2).is_identity()


class TestSectionHomomorphism:
    @pytest.mark.parametrize("n", [1, 2])
    def test_projection_of_section_is_identity(self, n):
        # forgetting the new strand takes the section image of g back to g
        for g, img in section_images(n).items():
            e = normal_form(img, n=n + 1)
            assert e.base == normal_form(Word.from_syms(g), n=n)
