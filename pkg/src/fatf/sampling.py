"""Seeded instance generators for the differential report batch."""

from __future__ import annotations

import random
from typing import Optional

from .elements import FatfElement, GroupSignature
from .endos import Endomorphism, TypeIEndo, TypeIIEndo, apply
from .intlinalg import IntMatrix
from .words import Word, primitive_root


def _word(rng: random.Random, rank: int, max_len: int) -> Word:
    length = rng.randrange(max_len + 1)
    letters = tuple(rng.randrange(1, rank + 1) * rng.choice((1, -1))
                    for _ in range(length))
    return Word(rank, letters)


def _matrix(rng: random.Random, n_rows: int, n_cols: int) -> IntMatrix:
    return IntMatrix.from_rows(
        [[rng.randint(-2, 2) for _ in range(n_cols)] for _ in range(n_rows)],
        n_cols)


def _endo(rng: random.Random, n: int, m: int) -> Endomorphism:
    if rng.random() < 0.5:
        images = tuple(_word(rng, n, 3) for _ in range(n))
        return TypeIEndo(images, _matrix(rng, m, m), _matrix(rng, n, m))
    while True:
        w = _word(rng, n, 3)
        if w.is_identity():
            continue
        root, _ = primitive_root(w)
        r = tuple(rng.randint(-2, 2) for _ in range(m))
        if any(r):
            return TypeIIEndo(root, r,
                              tuple(rng.randint(-2, 2) for _ in range(n)),
                              _matrix(rng, m, m), _matrix(rng, n, m))


def _element(rng: random.Random, signature: GroupSignature) -> FatfElement:
    word = _word(rng, signature.free_rank, 3)
    abelian = tuple(rng.randint(-3, 3)
                    for _ in range(signature.abelian_rank))
    return FatfElement(word, abelian)


def random_instance(rng: random.Random
                    ) -> tuple[Endomorphism, FatfElement, FatfElement,
                               Optional[int]]:
    """An endomorphism with source and target; half the targets planted.

    Returns (endo, g, h, k) where k is the planted exponent with
    h = (g) applied k times, or None when h is unrelated.
    """
    n, m = rng.randint(1, 2), rng.randint(1, 2)
    endo = _endo(rng, n, m)
    g = _element(rng, endo.signature)
    if rng.random() < 0.5:
        k = rng.randrange(6)
        h = g
        for _ in range(k):
            h = apply(endo, h)
        return endo, g, h, k
    return endo, g, _element(rng, endo.signature), None


def random_twisted_instance(rng: random.Random
                            ) -> tuple[Endomorphism, FatfElement, FatfElement,
                                       Optional[FatfElement]]:
    """A twisted-conjugacy instance; half carry a planted conjugator."""
    n, m = rng.randint(1, 2), rng.randint(1, 2)
    endo = _endo(rng, n, m)
    g = _element(rng, endo.signature)
    if rng.random() < 0.5:
        z = _element(rng, endo.signature)
        h = apply(endo, z).inverse() * g * z
        return endo, g, h, z
    return endo, g, _element(rng, endo.signature), None
