"""Exact arithmetic in finitely generated free groups.

Words over the free group of rank ``n`` are stored freely reduced as tuples
of nonzero signed indices: the generator ``x_i`` is the letter ``i`` and its
inverse is ``-i`` (indices are 1-based).  All values are immutable and every
operation is pure, so words can be hashed, memoized and compared directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence


class RankMismatch(ValueError):
    """Raised when two words over different free groups are combined."""


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    """Freely reduce a letter sequence by cancelling adjacent inverse pairs."""
    out: list[int] = []
    for letter in letters:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def _letter_key(letter: int) -> int:
    # Total order on letters: x1 < x1^-1 < x2 < x2^-1 < ...
    return 2 * abs(letter) - 2 + (1 if letter < 0 else 0)


@dataclass(frozen=True)
class Word:
    """A freely reduced word in the free group of rank ``rank``."""

    rank: int
    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        reduced = _reduce(self.letters)
        for letter in reduced:
            if letter == 0 or abs(letter) > self.rank:
                raise ValueError(f"letter {letter} out of range for rank {self.rank}")
        object.__setattr__(self, "letters", reduced)

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls(rank, ())

    @classmethod
    def generator(cls, rank: int, index: int) -> "Word":
        return cls(rank, (index,))

    def _check(self, other: "Word") -> None:
        if self.rank != other.rank:
            raise RankMismatch(f"ranks differ: {self.rank} vs {other.rank}")

    def __mul__(self, other: "Word") -> "Word":
        self._check(other)
        return Word(self.rank, self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(self.rank, tuple(-l for l in reversed(self.letters)))

    def __pow__(self, exponent: int) -> "Word":
        if exponent == 0:
            return Word.identity(self.rank)
        base = self if exponent > 0 else self.inverse()
        return Word(base.rank, base.letters * abs(exponent))

    def conjugate_by(self, z: "Word") -> "Word":
        """Return ``z^-1 * self * z``."""
        return z.inverse() * self * z

    def __len__(self) -> int:
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def abelianization(self) -> tuple[int, ...]:
        """Exponent-sum vector in Z^rank."""
        counts = [0] * self.rank
        for letter in self.letters:
            counts[abs(letter) - 1] += 1 if letter > 0 else -1
        return tuple(counts)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        i = 0
        while i < len(self.letters):
            letter = self.letters[i]
            j = i
            while j < len(self.letters) and self.letters[j] == letter:
                j += 1
            exp = (j - i) * (1 if letter > 0 else -1)
            parts.append(f"x{abs(letter)}" + (f"^{exp}" if exp != 1 else ""))
            i = j
        return "*".join(parts)


@dataclass(frozen=True)
class CyclicDecomposition:
    """Cyclic reduction ``original = conjugator^-1 * core * conjugator``."""

    core: Word
    conjugator: Word


def cyclic_reduce(u: Word) -> CyclicDecomposition:
    """Strip matching first/last letters until the core is cyclically reduced.

    The stripped prefix ``p`` satisfies ``u = p * core * p^-1``, so the
    decomposition uses ``conjugator = p^-1``.
    """
    letters = list(u.letters)
    prefix: list[int] = []
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        prefix.append(letters[0])
        letters = letters[1:-1]
    core = Word(u.rank, tuple(letters))
    conjugator = Word(u.rank, tuple(-l for l in reversed(prefix)))
    return CyclicDecomposition(core, conjugator)


def _rotation(letters: tuple[int, ...], offset: int) -> tuple[int, ...]:
    return letters[offset:] + letters[:offset]


def _least_rotation_start(values: tuple[int, ...]) -> int:
    """Index of the lexicographically least rotation (Booth's algorithm)."""
    doubled = values + values
    fail = [-1] * len(doubled)
    best = 0
    for j in range(1, len(doubled)):
        current = doubled[j]
        i = fail[j - best - 1]
        while i != -1 and current != doubled[best + i + 1]:
            if current < doubled[best + i + 1]:
                best = j - i - 1
            i = fail[i]
        if current != doubled[best + i + 1]:
            if current < doubled[best]:
                best = j
            fail[j - best] = -1
        else:
            fail[j - best] = i + 1
    return best


def conjugacy_class_key(u: Word) -> Word:
    """Canonical representative of the conjugacy class of ``u``.

    The least rotation (under a fixed letter order) of the cyclically reduced
    core.  Two words are conjugate exactly when their keys are equal.
    """
    core = cyclic_reduce(u).core.letters
    if not core:
        return Word(u.rank, ())
    mapped = tuple(_letter_key(l) for l in core)
    return Word(u.rank, _rotation(core, _least_rotation_start(mapped)))


def is_conjugate(u: Word, v: Word) -> Optional[Word]:
    """Return ``z`` with ``z^-1 * u * z == v``, or None when not conjugate."""
    u._check(v)
    du, dv = cyclic_reduce(u), cyclic_reduce(v)
    cu, cv = du.core.letters, dv.core.letters
    if len(cu) != len(cv):
        return None
    if not cu:
        return Word(u.rank, ())
    for offset in range(len(cu)):
        if _rotation(cu, offset) == cv:
            # rot_off(core_u) = p^-1 * core_u * p for the length-`offset` prefix p.
            p = Word(u.rank, cu[:offset])
            z = du.conjugator.inverse() * p * dv.conjugator
            return z
    return None


def power_index(v: Word, w: Word) -> Optional[int]:
    """Return the integer ``l`` with ``v == w^l``, or None.

    For nontrivial ``w`` the length of ``w^l`` grows with ``|l|``, so only
    exponents with ``|l| <= len(v)`` need to be tried.
    """
    v._check(w)
    if v.is_identity():
        return 0
    if w.is_identity():
        return None
    power = Word.identity(w.rank)
    for l in range(1, len(v) + 1):
        power = power * w
        if len(power) > len(v):
            return None
        if power == v:
            return l
        if power.inverse() == v:
            return -l
    return None


def primitive_root(w: Word) -> tuple[Word, int]:
    """Write ``w = root^e`` with maximal ``e >= 1`` (``root`` not a proper power).

    Raises ValueError for the identity, which is every element's power.
    """
    if w.is_identity():
        raise ValueError("the identity has no primitive root")
    dec = cyclic_reduce(w)
    core = dec.core.letters
    n = len(core)
    for d in range(1, n + 1):
        if n % d:
            continue
        piece = core[:d]
        if piece * (n // d) == core:
            root_core = Word(w.rank, piece)
            root = dec.conjugator.inverse() * root_core * dec.conjugator
            return root, n // d
    raise AssertionError("unreachable: every word is its own power")


def substitute(images: Sequence[Word], u: Word) -> Word:
    """Apply the endomorphism ``x_i -> images[i-1]`` to ``u``."""
    if len(images) != u.rank:
        raise RankMismatch(f"need {u.rank} images, got {len(images)}")
    rank = images[0].rank if images else 0
    out: list[int] = []
    for letter in u.letters:
        image = images[abs(letter) - 1]
        piece = image.letters if letter > 0 else tuple(-l for l in reversed(image.letters))
        for l in piece:
            if out and out[-1] == -l:
                out.pop()
            else:
                out.append(l)
    return Word(rank, tuple(out))


def enumerate_words(rank: int, max_len: int) -> Iterator[Word]:
    """Yield all freely reduced words of length at most ``max_len``.

    Deterministic order: by length, then lexicographically in the letter
    order x1 < x1^-1 < x2 < ...  Starts with the identity.
    """
    alphabet = sorted(
        [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)],
        key=_letter_key,
    )
    current: list[tuple[int, ...]] = [()]
    yield Word(rank, ())
    for _ in range(max_len):
        nxt: list[tuple[int, ...]] = []
        for stem in current:
            for letter in alphabet:
                if stem and stem[-1] == -letter:
                    continue
                grown = stem + (letter,)
                nxt.append(grown)
                yield Word(rank, grown)
        current = nxt
