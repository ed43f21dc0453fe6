"""Shared random generators for the test suite.

Everything takes an explicit random.Random so test runs stay
reproducible; no module-level state.
"""

from __future__ import annotations

import random

from fatf.elements import FatfElement, GroupSignature
from fatf.endos import TypeIEndo, TypeIIEndo, identity_endo
from fatf.intlinalg import IntMatrix
from fatf.words import Word


def random_word(rng: random.Random, rank: int, max_len: int) -> Word:
    length = rng.randrange(max_len + 1)
    letters = []
    for _ in range(length):
        letter = rng.randrange(1, rank + 1) * rng.choice((1, -1))
        letters.append(letter)
    return Word(rank, tuple(letters))


def nontrivial_word(rng: random.Random, rank: int, max_len: int) -> Word:
    while True:
        w = random_word(rng, rank, max_len)
        if not w.is_identity():
            return w


def random_vector(rng: random.Random, length: int, bound: int) -> tuple[int, ...]:
    return tuple(rng.randint(-bound, bound) for _ in range(length))


def random_matrix(rng: random.Random, n_rows: int, n_cols: int, bound: int) -> IntMatrix:
    return IntMatrix.from_rows(
        [[rng.randint(-bound, bound) for _ in range(n_cols)] for _ in range(n_rows)],
        n_cols)


def random_element(rng: random.Random, sig: GroupSignature,
                   max_len: int = 4, bound: int = 3) -> FatfElement:
    word = random_word(rng, sig.free_rank, max_len)
    return FatfElement(word, random_vector(rng, sig.abelian_rank, bound))


def random_type_i(rng: random.Random, n: int, m: int,
                  image_len: int = 3, bound: int = 2) -> TypeIEndo:
    images = tuple(random_word(rng, n, image_len) for _ in range(n))
    return TypeIEndo(images, random_matrix(rng, m, m, bound),
                     random_matrix(rng, n, m, bound))


def random_type_ii(rng: random.Random, n: int, m: int,
                   root_len: int = 3, bound: int = 2) -> TypeIIEndo:
    from fatf.words import primitive_root

    while True:
        w = nontrivial_word(rng, n, root_len)
        root, _ = primitive_root(w)
        r = random_vector(rng, m, bound)
        if any(r):
            return TypeIIEndo(root, r, random_vector(rng, n, bound),
                              random_matrix(rng, m, m, bound),
                              random_matrix(rng, n, m, bound))


def random_injective_type_i(rng: random.Random, n: int, m: int,
                            twists: int = 4, bound: int = 2) -> TypeIEndo:
    """Build an injective type I map as a product of basic Nielsen moves.

    Starting from the identity images and applying invertible moves
    keeps the free part an automorphism; an extra power move on one
    generator (x_i -> x_i^2) optionally drops surjectivity while
    keeping injectivity.  Q is made nonsingular by construction.
    """
    images = [Word.generator(n, i + 1) for i in range(n)]
    for _ in range(twists):
        i = rng.randrange(n)
        j = rng.randrange(n)
        move = rng.randrange(3)
        if move == 0:
            images[i] = images[i].inverse()
        elif move == 1 and i != j:
            images[i] = images[i] * images[j]
        elif move == 2 and i != j:
            images[i] = images[j] * images[i]
    if rng.random() < 0.3:
        i = rng.randrange(n)
        images[i] = images[i] * images[i]
    while True:
        q = random_matrix(rng, m, m, bound)
        if q.det() != 0:
            break
    return TypeIEndo(tuple(images), q, random_matrix(rng, n, m, bound))
