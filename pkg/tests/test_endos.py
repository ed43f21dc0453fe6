"""The two endomorphism families: classification, composition, powers."""

import random

import pytest

from fatf.elements import FatfElement, GroupSignature, SignatureMismatch
from fatf.endos import (
    DegenerateSignature,
    abelian_power_data,
    RelationViolated,
    TypeIEndo,
    TypeIIEndo,
    apply,
    classify,
    compose,
    compose_type_i,
    identity_endo,
    is_bijective,
    is_injective,
    power,
    power_type_i,
    type_ii_matrices,
)
from fatf.intlinalg import IntMatrix
from fatf.words import Word

from support import random_element, random_type_i, random_type_ii

SIG = GroupSignature(2, 1)
x1 = Word.generator(2, 1)
x2 = Word.generator(2, 2)

SWAP = TypeIEndo((x2, x1), IntMatrix.from_rows([[2]]),
                 IntMatrix.from_rows([[1], [0]]))
COLLAPSE = TypeIIEndo(x1, (1,), (1, 1), IntMatrix.from_rows([[0]]),
                      IntMatrix.from_rows([[1], [1]]))


def _elem(word, *abelian):
    return FatfElement(word, tuple(abelian))


def _extensionally_equal(e1, e2, rng, trials=20):
    sig = e1.signature
    for _ in range(trials):
        g = random_element(rng, sig)
        if e1.apply(g) != e2.apply(g):
            return False
    return True


class TestApply:
    def test_type_i(self):
        image = SWAP.apply(_elem(x1, 3))
        assert image == _elem(x2, 7)

    def test_type_i_identity_data(self):
        endo = identity_endo(SIG)
        g = _elem(x1 * x2.inverse(), 5)
        assert endo.apply(g) == g

    def test_type_ii(self):
        image = COLLAPSE.apply(_elem(x2, 2))
        assert image == _elem(x1 ** 3, 1)

    def test_signature_guard(self):
        with pytest.raises(SignatureMismatch):
            SWAP.apply(FatfElement(x1, (1, 2)))

    def test_type_ii_factors_through_abelianization(self):
        rng = random.Random(41)
        endo = COLLAPSE
        for _ in range(40):
            u = random_element(rng, SIG)
            shuffle = x1 * x2 * x1.inverse() * x2.inverse()
            v = FatfElement(shuffle * u.word, u.abelian)
            assert u.word.abelianization() == v.word.abelianization()
            assert endo.apply(u) == endo.apply(v)

    def test_type_ii_image_in_cyclic_subgroup(self):
        from fatf.words import power_index
        rng = random.Random(43)
        for _ in range(40):
            endo = random_type_ii(rng, 2, 2)
            g = random_element(rng, endo.signature)
            image = endo.apply(g)
            assert power_index(image.word, endo.w) is not None


class TestClassify:
    def test_type_i_recognized(self):
        got = classify(
            [_elem(x1, 1), _elem(x2, 0)],
            [_elem(Word.identity(2), 2)])
        assert isinstance(got, TypeIEndo)
        assert got.images == (x1, x2)
        assert got.p.rows == ((1,), (0,))
        assert got.q.rows == ((2,),)

    def test_relation_violation(self):
        with pytest.raises(RelationViolated):
            classify([_elem(x1, 0), _elem(x2, 0)], [_elem(x1, 0)])

    def test_type_ii_recognized(self):
        got = classify(
            [_elem(x1, 0), _elem(x1, 0)],
            [_elem(x1, 1)])
        assert isinstance(got, TypeIIEndo)
        assert got.w == x1
        assert got.s == (1, 1)
        assert got.r == (1,)
        assert got.q.rows == ((1,),)
        assert got.p.rows == ((0,), (0,))

    def test_type_ii_canonical_root(self):
        got = classify(
            [_elem(x1.inverse(), 0), _elem(Word.identity(2), 0)],
            [_elem(x1 ** -2, 1)])
        assert isinstance(got, TypeIIEndo)
        assert got.w == x1
        assert got.s == (-1, 0)
        assert got.r == (-2,)

    def test_degenerate_signature(self):
        one = GroupSignature(1, 1)
        with pytest.raises(DegenerateSignature):
            classify([FatfElement(Word.generator(1, 1), (0,))],
                     [FatfElement(Word.generator(1, 1), (1,))])

    def test_degenerate_abelian_images_fine(self):
        got = classify([FatfElement(Word.generator(1, 1), (0,))],
                       [FatfElement(Word.identity(1), (2,))])
        assert isinstance(got, TypeIEndo)

    def test_roundtrip_both_types(self):
        rng = random.Random(47)
        for maker in (random_type_i, random_type_ii):
            for _ in range(20):
                endo = maker(rng, 2, 2)
                sig = endo.signature
                xs = [endo.apply(FatfElement(Word.generator(2, i + 1), (0, 0)))
                      for i in range(2)]
                ts = [endo.apply(FatfElement(Word.identity(2), tuple(
                    1 if j == k else 0 for k in range(2)))) for j in range(2)]
                rebuilt = classify(xs, ts)
                assert _extensionally_equal(endo, rebuilt, rng)


class TestComposition:
    def test_identity_neutral(self):
        rng = random.Random(53)
        ident = identity_endo(SIG)
        assert _extensionally_equal(compose_type_i(SWAP, ident), SWAP, rng)
        assert _extensionally_equal(compose_type_i(ident, SWAP), SWAP, rng)

    def test_translation_parts_add(self):
        p1 = IntMatrix.from_rows([[1], [0]])
        p2 = IntMatrix.from_rows([[0], [2]])
        e1 = TypeIEndo((x1, x2), IntMatrix.identity(1), p1)
        e2 = TypeIEndo((x1, x2), IntMatrix.identity(1), p2)
        got = compose_type_i(e1, e2)
        assert got.p.rows == ((1,), (2,))

    def test_double_application_oracle(self):
        rng = random.Random(59)
        makers = (random_type_i, random_type_ii)
        for first_maker in makers:
            for second_maker in makers:
                for _ in range(25):
                    e1 = first_maker(rng, 2, 2)
                    e2 = second_maker(rng, 2, 2)
                    composite = compose(e1, e2)
                    for _ in range(8):
                        g = random_element(rng, e1.signature)
                        assert composite.apply(g) == e2.apply(e1.apply(g))


class TestPowers:
    def test_closed_form_matches_example(self):
        squared = power_type_i(SWAP, 2)
        assert squared.p.rows == ((2,), (1,))
        assert squared.apply(_elem(x1, 3)) == _elem(x1, 14)
        assert SWAP.apply(SWAP.apply(_elem(x1, 3))) == _elem(x1, 14)

    def test_power_zero_and_one(self):
        rng = random.Random(61)
        endo = random_type_i(rng, 2, 2)
        assert power_type_i(endo, 1) == endo
        assert _extensionally_equal(power_type_i(endo, 0),
                                    identity_endo(endo.signature), rng)

    def test_commutative_data_scales(self):
        p = IntMatrix.from_rows([[1], [2]])
        endo = TypeIEndo((x1, x2), IntMatrix.identity(1), p)
        for k in range(5):
            assert power_type_i(endo, k).p.rows == tuple(
                tuple(k * c for c in row) for row in p.rows)

    def test_power_apply_coherence(self):
        rng = random.Random(67)
        for maker in (random_type_i, random_type_ii):
            for _ in range(20):
                endo = maker(rng, 2, 2)
                k = rng.randrange(7)
                closed = power(endo, k)
                for _ in range(5):
                    g = random_element(rng, endo.signature)
                    stepped = g
                    for _ in range(k):
                        stepped = endo.apply(stepped)
                    assert closed.apply(g) == stepped


class TestTypeIIMatrices:
    def test_running_example(self):
        mats = type_ii_matrices(COLLAPSE)
        assert mats.t_matrix.rows == ((1, 1), (1, 0))
        coords = mats.s_matrix.act((0, 1, 2))
        assert coords == (3, 1)
        assert mats.t_matrix.act(coords) == (4, 3)

    def test_coordinates_match_apply(self):
        rng = random.Random(71)
        for _ in range(25):
            endo = random_type_ii(rng, 2, 2)
            mats = type_ii_matrices(endo)
            g = random_element(rng, endo.signature)
            coords = mats.s_matrix.act(g.word.abelianization() + g.abelian)
            image = g
            for k in range(1, 5):
                image = endo.apply(image)
                from fatf.words import power_index
                exponent = power_index(image.word, endo.w)
                assert coords == (exponent,) + image.abelian
                coords = mats.t_matrix.act(coords)


class TestInjectivity:
    def test_type_ii_never(self):
        assert not is_injective(COLLAPSE)
        assert not is_bijective(COLLAPSE)

    def test_determinant_conditions(self):
        endo = TypeIEndo((x1, x2), IntMatrix.from_rows([[2]]),
                         IntMatrix.zeros(2, 1))
        assert is_injective(endo)
        assert not is_bijective(endo)

    def test_automorphism(self):
        endo = TypeIEndo((x1 * x2, x2), IntMatrix.from_rows([[1]]),
                         IntMatrix.zeros(2, 1))
        assert is_injective(endo)
        assert is_bijective(endo)

    def test_rank_deficient_free_part(self):
        endo = TypeIEndo((x1, x1), IntMatrix.identity(1), IntMatrix.zeros(2, 1))
        assert not is_injective(endo)

    def test_proper_embedding(self):
        endo = TypeIEndo((x1 * x1, x2), IntMatrix.identity(1),
                         IntMatrix.zeros(2, 1))
        assert is_injective(endo)
        assert not is_bijective(endo)

    def test_singular_q(self):
        endo = TypeIEndo((x1, x2), IntMatrix.from_rows([[0]]),
                         IntMatrix.zeros(2, 1))
        assert not is_injective(endo)


class TestAbelianPowerData:
    def test_matches_full_iterates(self):
        rng = random.Random(31)
        for _ in range(40):
            endo = random_type_i(rng, 2, 2, image_len=2, bound=2)
            k = rng.randrange(6)
            qk, pk = abelian_power_data(endo, k)
            full = power_type_i(endo, k)
            assert qk == full.q
            assert pk == full.p

    def test_rejects_negative_exponent(self):
        endo = TypeIEndo((x1, x2), IntMatrix.identity(1), IntMatrix.zeros(2, 1))
        with pytest.raises(ValueError):
            abelian_power_data(endo, -1)
