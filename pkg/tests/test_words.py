"""Free group words: reduction, conjugacy, roots, substitution."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from fatf.words import (
    RankMismatch,
    Word,
    conjugacy_class_key,
    cyclic_reduce,
    enumerate_words,
    is_conjugate,
    power_index,
    primitive_root,
    substitute,
)

x1 = Word.generator(3, 1)
x2 = Word.generator(3, 2)
x3 = Word.generator(3, 3)


def _letters():
    return st.lists(
        st.integers(min_value=1, max_value=3).flatmap(
            lambda i: st.sampled_from([i, -i])),
        max_size=8)


words = _letters().map(lambda ls: Word(3, tuple(ls)))


class TestReduction:
    def test_cancellation(self):
        assert (x1 * x1.inverse()).is_identity()
        assert Word(2, (1, -1, 2, -2)) == Word.identity(2)

    def test_nested_cancellation(self):
        w = Word(2, (1, 2, -2, -1, 2))
        assert w == Word(2, (2,))

    def test_rank_guard(self):
        with pytest.raises(ValueError):
            Word(2, (3,))
        with pytest.raises(RankMismatch):
            Word(2, (1,)) * Word(3, (1,))

    @given(words, words, words)
    @settings(max_examples=60)
    def test_associativity(self, u, v, w):
        assert (u * v) * w == u * (v * w)

    @given(words)
    @settings(max_examples=60)
    def test_inverse(self, u):
        assert (u * u.inverse()).is_identity()
        assert u.inverse().inverse() == u

    def test_powers(self):
        w = x1 * x2
        assert w ** 0 == Word.identity(3)
        assert w ** 3 == w * w * w
        assert w ** -2 == (w * w).inverse()

    def test_str(self):
        assert str(Word.identity(2)) == "1"
        assert str(Word(2, (1, -2, -2))) == "x1*x2^-2"
        assert str(Word(2, (1, 1, 2))) == "x1^2*x2"


class TestAbelianization:
    def test_counts_signed_occurrences(self):
        w = Word(3, (1, 2, -1, 2, 3))
        assert w.abelianization() == (0, 2, 1)

    @given(words, words)
    @settings(max_examples=60)
    def test_homomorphism(self, u, v):
        uv = (u * v).abelianization()
        assert uv == tuple(a + b for a, b in zip(u.abelianization(), v.abelianization()))


class TestCyclicReduction:
    def test_core_and_conjugator(self):
        w = Word(3, (1, 2, 3, -2, -1))
        dec = cyclic_reduce(w)
        assert dec.core == Word(3, (3,))
        assert dec.conjugator.inverse() * dec.core * dec.conjugator == w

    def test_already_reduced(self):
        w = Word(3, (1, 2))
        dec = cyclic_reduce(w)
        assert dec.core == w
        assert dec.conjugator.is_identity()

    @given(words)
    @settings(max_examples=60)
    def test_roundtrip(self, u):
        dec = cyclic_reduce(u)
        assert dec.conjugator.inverse() * dec.core * dec.conjugator == u
        core = dec.core.letters
        assert not core or core[0] != -core[-1]


class TestConjugacy:
    def test_cyclic_rotation(self):
        u = x1 * x2
        v = x2 * x1
        z = is_conjugate(u, v)
        assert z is not None
        assert z.inverse() * u * z == v

    def test_distinct_classes(self):
        assert is_conjugate(x1, x2) is None
        assert is_conjugate(x1, x1 * x1) is None

    def test_class_key_invariance(self):
        u = Word(3, (1, 2, 1))
        z = Word(3, (3, -2, 1))
        assert conjugacy_class_key(u.conjugate_by(z)) == conjugacy_class_key(u)

    @given(words, words)
    @settings(max_examples=60)
    def test_planted_conjugates_found(self, u, z):
        v = u.conjugate_by(z)
        witness = is_conjugate(u, v)
        assert witness is not None
        assert witness.inverse() * u * witness == v


class TestPowers:
    def test_power_index(self):
        w = x1 * x2
        assert power_index(w ** 3, w) == 3
        assert power_index(w ** -2, w) == -2
        assert power_index(Word.identity(3), w) == 0
        assert power_index(x1, w) is None
        assert power_index(x1 * x2 * x1, w) is None

    def test_primitive_root_conjugate_power(self):
        w = (x1 * x2 * x1.inverse()) ** 2
        root, e = primitive_root(w)
        assert e == 2
        assert root ** 2 == w
        assert primitive_root(root) == (root, 1)

    def test_primitive_root_rejects_identity(self):
        with pytest.raises(ValueError):
            primitive_root(Word.identity(3))

    @given(words, st.integers(min_value=1, max_value=4))
    @settings(max_examples=60)
    def test_root_reconstructs(self, u, k):
        if u.is_identity():
            return
        root, e = primitive_root(u ** k)
        assert root ** e == u ** k
        assert e % k == 0


class TestSubstitution:
    def test_basic(self):
        images = [x2, x1, x3]
        assert substitute(images, Word(3, (1, 3, -2))) == x2 * x3 * x1.inverse()

    def test_rank_change(self):
        images = [Word(1, (1, 1)), Word(1, ())]
        assert substitute(images, Word(2, (1, 2, 1))) == Word(1, (1, 1, 1, 1))

    @given(words, words)
    @settings(max_examples=40)
    def test_homomorphism(self, u, v):
        images = [x1 * x2, x2.inverse(), x3 * x1]
        assert substitute(images, u * v) == substitute(images, u) * substitute(images, v)


class TestEnumeration:
    def test_counts(self):
        seen = list(enumerate_words(2, 2))
        assert len(seen) == 1 + 4 + 12
        assert len(set(seen)) == len(seen)
        assert all(len(w) <= 2 for w in seen)

    def test_order_deterministic(self):
        assert list(enumerate_words(2, 2)) == list(enumerate_words(2, 2))
        assert list(enumerate_words(2, 1))[0].is_identity()


def test_class_key_is_least_rotation():
    rng = random.Random(97)
    from fatf.words import _least_rotation_start, _letter_key, _rotation

    for _ in range(300):
        length = rng.randint(1, 12)
        letters = tuple(rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(length))
        naive = min(
            (_rotation(letters, i) for i in range(length)),
            key=lambda ls: tuple(_letter_key(l) for l in ls),
        )
        start = _least_rotation_start(tuple(_letter_key(l) for l in letters))
        assert _rotation(letters, start) == naive
