"""Elements of the groups G = Fn x Zm in normal form.

An element is a pair (free part, abelian part): the word ``u`` over the free
factor and the vector ``a`` of exponents of the central generators
``t_1 .. t_m``.  Multiplication concatenates free parts and adds abelian
parts; the central letters always commute to the right.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .words import Word, is_conjugate


class SignatureMismatch(ValueError):
    """Raised when elements of groups with different (n, m) are combined."""


@dataclass(frozen=True)
class GroupSignature:
    """The pair (free rank n, abelian rank m) naming the group Fn x Zm."""

    free_rank: int
    abelian_rank: int

    def __post_init__(self) -> None:
        if self.free_rank < 0 or self.abelian_rank < 0:
            raise ValueError("ranks must be nonnegative")

    def identity(self) -> "FatfElement":
        return FatfElement(Word.identity(self.free_rank), (0,) * self.abelian_rank)

    def element(self, word: Word, abelian: tuple[int, ...]) -> "FatfElement":
        return FatfElement(word, tuple(abelian))


@dataclass(frozen=True)
class FatfElement:
    """Normal form ``u * t^a`` with ``u`` freely reduced and ``a`` in Z^m."""

    word: Word
    abelian: tuple[int, ...]

    @property
    def signature(self) -> GroupSignature:
        return GroupSignature(self.word.rank, len(self.abelian))

    def _check(self, other: "FatfElement") -> None:
        if self.word.rank != other.word.rank or len(self.abelian) != len(other.abelian):
            raise SignatureMismatch(
                f"signatures differ: {self.signature} vs {other.signature}"
            )

    def __mul__(self, other: "FatfElement") -> "FatfElement":
        self._check(other)
        return FatfElement(
            self.word * other.word,
            tuple(x + y for x, y in zip(self.abelian, other.abelian)),
        )

    def inverse(self) -> "FatfElement":
        return FatfElement(self.word.inverse(), tuple(-x for x in self.abelian))

    def __pow__(self, exponent: int) -> "FatfElement":
        return FatfElement(self.word ** exponent, tuple(exponent * x for x in self.abelian))

    def conjugate_by(self, z: "FatfElement") -> "FatfElement":
        return z.inverse() * self * z

    def is_identity(self) -> bool:
        return self.word.is_identity() and not any(self.abelian)

    def free_part(self) -> Word:
        """Projection to the free factor."""
        return self.word

    def abelian_part(self) -> tuple[int, ...]:
        """Projection to the Z^m factor."""
        return self.abelian

    def __str__(self) -> str:
        if not self.abelian:
            return str(self.word)
        vec = ",".join(str(x) for x in self.abelian)
        return f"{self.word} t^({vec})"


def conjugate_in_fatf(g: FatfElement, h: FatfElement) -> Optional[FatfElement]:
    """A conjugator z with ``z^-1 g z == h``, or None.

    Conjugation cannot touch the central part, so the elements are conjugate
    exactly when the free parts are conjugate and the abelian parts agree.
    The returned witness carries a zero abelian part.
    """
    g._check(h)
    if g.abelian != h.abelian:
        return None
    z = is_conjugate(g.word, h.word)
    if z is None:
        return None
    return FatfElement(z, (0,) * len(g.abelian))
