"""Endomorphisms of a free-abelian-times-free group.

For free rank at least two and abelian rank at least one, every
endomorphism falls into one of two families, decided by where the
central generators go.  Type I maps send every t_j into the abelian
factor and restrict to an arbitrary substitution on the free factor.
Type II maps collapse all free coordinates onto powers of a single
word w.  Both families carry closed-form data for composition and
powers, which is what the decision procedures downstream consume.

Conventions: maps act on the right, so ``compose(f, g)`` means "f,
then g", and matrices multiply row vectors from the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .elements import FatfElement, GroupSignature, SignatureMismatch
from .intlinalg import IntMatrix, Vector, dot, outer, vec, vec_add
from .subgroups import SubgroupGraph
from .words import Word, power_index, primitive_root, substitute


class NotAnEndomorphism(ValueError):
    """The proposed generator images do not define an endomorphism."""


class RelationViolated(NotAnEndomorphism):
    """A defining relation of the group fails on the proposed images."""


class DegenerateSignature(NotAnEndomorphism):
    """Images fall outside the two-family classification.

    The dichotomy assumes free rank at least two.  Below that, maps
    sending a central generator outside the abelian factor are
    rejected rather than silently forced into either family.
    """


@dataclass(frozen=True)
class TypeIEndo:
    """u t^a maps to (u)phi t^(aQ + ubar P), with phi given on generators.

    ``images`` lists the words phi(x_1), ..., phi(x_n); ``q`` is the
    m by m matrix acting on the abelian part; ``p`` is the n by m
    matrix coupling the free abelianization into the abelian part.
    """

    images: tuple[Word, ...]
    q: IntMatrix
    p: IntMatrix

    def __post_init__(self) -> None:
        n = len(self.images)
        m = self.q.n_rows
        if self.q.n_cols != m:
            raise ValueError("Q must be square")
        if self.p.n_rows != n or self.p.n_cols != m:
            raise ValueError("P must have one row per free generator and one column per abelian generator")
        for image in self.images:
            if image.rank != n:
                raise ValueError("free images must live in the free factor of the same rank")

    @property
    def signature(self) -> GroupSignature:
        return GroupSignature(len(self.images), self.q.n_rows)

    def abelianized(self) -> IntMatrix:
        """Matrix of the induced map on the free abelianization."""
        n = len(self.images)
        return IntMatrix.from_rows([list(w.abelianization()) for w in self.images], n)

    def apply(self, g: FatfElement) -> FatfElement:
        _check_element(self, g)
        word = substitute(self.images, g.word)
        ubar = g.word.abelianization()
        abelian = vec_add(self.q.act(g.abelian), self.p.act(ubar))
        return FatfElement(word, abelian)


@dataclass(frozen=True)
class TypeIIEndo:
    """u t^a maps to w^(a.r + ubar.s) t^(aQ + ubar P).

    The whole image meets the free factor inside the cyclic subgroup
    generated by ``w``, which is required to be nontrivial and not a
    proper power; ``r`` must be nonzero, otherwise the map is type I.
    """

    w: Word
    r: tuple[int, ...]
    s: tuple[int, ...]
    q: IntMatrix
    p: IntMatrix

    def __post_init__(self) -> None:
        m = self.q.n_rows
        n = self.p.n_rows
        if self.q.n_cols != m:
            raise ValueError("Q must be square")
        if self.p.n_cols != m:
            raise ValueError("P must have one row per free generator and one column per abelian generator")
        if len(self.r) != m:
            raise ValueError("r must have one entry per abelian generator")
        if len(self.s) != n:
            raise ValueError("s must have one entry per free generator")
        if self.w.rank != n:
            raise ValueError("w must live in the free factor of the same rank")
        if self.w.is_identity():
            raise ValueError("w must be nontrivial")
        if all(c == 0 for c in self.r):
            raise ValueError("r must be nonzero")
        _, exponent = primitive_root(self.w)
        if exponent != 1:
            raise ValueError("w must not be a proper power")

    @property
    def signature(self) -> GroupSignature:
        return GroupSignature(len(self.s), self.q.n_rows)

    def apply(self, g: FatfElement) -> FatfElement:
        _check_element(self, g)
        ubar = g.word.abelianization()
        exponent = dot(g.abelian, self.r) + dot(ubar, self.s)
        abelian = vec_add(self.q.act(g.abelian), self.p.act(ubar))
        return FatfElement(self.w ** exponent, abelian)


Endomorphism = TypeIEndo | TypeIIEndo


@dataclass(frozen=True)
class TypeIIMatrices:
    """Coordinate form of iterating a type II endomorphism.

    In the basis (w, t_1, ..., t_m), the image of u t^a under the k-th
    iterate has coordinates (ubar.s + a.r, ...) given by the row vector
    (ubar, a) . S . T^(k-1) for every k >= 1.
    """

    s_matrix: IntMatrix
    t_matrix: IntMatrix
    basis_word: Word


def identity_endo(signature: GroupSignature) -> TypeIEndo:
    """The identity map, packaged as type I data."""
    n, m = signature.free_rank, signature.abelian_rank
    images = tuple(Word.generator(n, i + 1) for i in range(n))
    return TypeIEndo(images, IntMatrix.identity(m), IntMatrix.zeros(n, m))


def apply(endo: Endomorphism, g: FatfElement) -> FatfElement:
    """Image of ``g`` under ``endo``."""
    return endo.apply(g)


def classify(x_images: list[FatfElement], t_images: list[FatfElement]) -> Endomorphism:
    """Recognize the endomorphism defined by generator images.

    Verifies the defining relations (each t_j image must commute with
    every other image) and sorts the map into one of the two families:
    type I when all t_j images have trivial free part, type II when the
    free parts are powers of one common non-proper-power word.  Raises
    RelationViolated or DegenerateSignature otherwise.
    """
    x_imgs = tuple(x_images)
    t_imgs = tuple(t_images)
    n, m = len(x_imgs), len(t_imgs)
    sig = GroupSignature(n, m)
    for g in x_imgs + t_imgs:
        if g.signature != sig:
            raise SignatureMismatch(
                "generator images must be elements of the group they define; "
                f"expected signature {(n, m)}, got {(g.signature.free_rank, g.signature.abelian_rank)}")

    labels = [f"x{i}" for i in range(1, n + 1)] + [f"t{j}" for j in range(1, m + 1)]
    frees = [g.word for g in x_imgs + t_imgs]
    for j in range(m):
        tw = t_imgs[j].word
        if tw.is_identity():
            continue
        for k, other in enumerate(frees):
            if other * tw != tw * other:
                raise RelationViolated(
                    f"the images of {labels[k]} and t{j + 1} do not commute, "
                    f"so the relation [{labels[k]}, t{j + 1}] = 1 is not preserved")

    p = IntMatrix.from_rows([list(g.abelian) for g in x_imgs], m)
    q = IntMatrix.from_rows([list(g.abelian) for g in t_imgs], m)

    if all(g.word.is_identity() for g in t_imgs):
        return TypeIEndo(tuple(g.word for g in x_imgs), q, p)

    if n < 2:
        raise DegenerateSignature(
            "a central generator maps outside the abelian factor, and the "
            "two-family classification covers that only for free rank >= 2")

    seed = next(g.word for g in t_imgs if not g.word.is_identity())
    root, _ = primitive_root(seed)
    w = _canonical_root(root)
    s = []
    for i, g in enumerate(x_imgs):
        l = power_index(g.word, w)
        if l is None:
            raise RelationViolated(
                f"the image of x{i + 1} is not a power of the common root {w}")
        s.append(l)
    r = []
    for j, g in enumerate(t_imgs):
        l = power_index(g.word, w)
        if l is None:
            raise RelationViolated(
                f"the image of t{j + 1} is not a power of the common root {w}")
        r.append(l)
    return TypeIIEndo(w, tuple(r), tuple(s), q, p)


def compose_type_i(first: TypeIEndo, second: TypeIEndo) -> TypeIEndo:
    """Closed form for "first, then second" on type I data."""
    _check_pair(first, second)
    images = tuple(substitute(second.images, w) for w in first.images)
    q = first.q * second.q
    p = first.p * second.q + first.abelianized() * second.p
    return TypeIEndo(images, q, p)


def power_type_i(endo: TypeIEndo, k: int) -> TypeIEndo:
    """The k-th iterate of a type I endomorphism, k >= 0, in closed form.

    The abelian data is the matrix sum P^(k) = sum of (phiab)^(i-1) P Q^(k-i)
    over i = 1..k, paired with Q^k; the free images are iterated directly.
    """
    if k < 0:
        raise ValueError("the exponent must be nonnegative")
    if k == 0:
        return identity_endo(endo.signature)
    n, m = len(endo.images), endo.q.n_rows
    images = _iterated_images(endo.images, k)
    phi_ab = endo.abelianized()
    q_pows = [IntMatrix.identity(m)]
    for _ in range(k):
        q_pows.append(q_pows[-1] * endo.q)
    total = IntMatrix.zeros(n, m)
    left = IntMatrix.identity(n)
    for i in range(1, k + 1):
        total = total + left * endo.p * q_pows[k - i]
        left = left * phi_ab
    return TypeIEndo(images, q_pows[k], total)


def abelian_power_data(endo: TypeIEndo, k: int) -> tuple[IntMatrix, IntMatrix]:
    """Abelian data (Q^k, P^(k)) of the k-th iterate, without any word work.

    Runs the recurrence P^(j+1) = P Q^j + phiab P^(j), so the abelian
    part of ``g`` under the k-th iterate is ``a Q^k + ubar P^(k)`` even
    when the iterated free images would be too large to write down.
    """
    if k < 0:
        raise ValueError("the exponent must be nonnegative")
    n, m = len(endo.images), endo.q.n_rows
    phi_ab = endo.abelianized()
    qk = IntMatrix.identity(m)
    pk = IntMatrix.zeros(n, m)
    for _ in range(k):
        pk = endo.p * qk + phi_ab * pk
        qk = qk * endo.q
    return qk, pk


def type_ii_matrices(endo: TypeIIEndo) -> TypeIIMatrices:
    """Assemble the coordinate matrices S and T for a type II map."""
    n, m = len(endo.s), endo.q.n_rows
    s_rows = [[endo.s[i]] + list(endo.p.rows[i]) for i in range(n)]
    s_rows += [[endo.r[j]] + list(endo.q.rows[j]) for j in range(m)]
    wbar = endo.w.abelianization()
    t_rows = [[dot(wbar, endo.s)] + list(endo.p.act(wbar))]
    t_rows += [[endo.r[j]] + list(endo.q.rows[j]) for j in range(m)]
    return TypeIIMatrices(
        IntMatrix.from_rows(s_rows, 1 + m),
        IntMatrix.from_rows(t_rows, 1 + m),
        endo.w)


def compose(first: Endomorphism, second: Endomorphism) -> Endomorphism:
    """Closed form for "first, then second" across all type combinations.

    The composite of two endomorphisms is again an endomorphism, but
    its type depends on the data: anything followed by a type II map is
    type II unless the new r vector vanishes, and a type II map followed
    by a type I map stays type II unless the image of w dies.
    """
    _check_pair(first, second)
    if isinstance(first, TypeIEndo) and isinstance(second, TypeIEndo):
        return compose_type_i(first, second)

    if isinstance(first, TypeIEndo):
        r_new = _column_act(first.q, second.r)
        s_new = vec_add(_column_act(first.p, second.r),
                        _column_act(first.abelianized(), second.s))
        q_new = first.q * second.q
        p_new = first.p * second.q + first.abelianized() * second.p
        return _type_ii_or_degenerate(second.w, r_new, s_new, q_new, p_new)

    wbar1 = first.w.abelianization()
    if isinstance(second, TypeIEndo):
        image = substitute(second.images, first.w)
        drift = second.p.act(wbar1)
        q_new = first.q * second.q + outer(first.r, drift)
        p_new = first.p * second.q + outer(first.s, drift)
        if image.is_identity():
            n = len(first.s)
            blanks = tuple(Word.identity(n) for _ in range(n))
            return TypeIEndo(blanks, q_new, p_new)
        root, d = primitive_root(image)
        w_new = _canonical_root(root)
        sign = d if w_new == root else -d
        r_new = tuple(sign * c for c in first.r)
        s_new = tuple(sign * c for c in first.s)
        return TypeIIEndo(w_new, r_new, s_new, q_new, p_new)

    weight = dot(wbar1, second.s)
    drift = second.p.act(wbar1)
    r_new = vec_add(_column_act(first.q, second.r),
                    tuple(weight * c for c in first.r))
    s_new = vec_add(_column_act(first.p, second.r),
                    tuple(weight * c for c in first.s))
    q_new = first.q * second.q + outer(first.r, drift)
    p_new = first.p * second.q + outer(first.s, drift)
    return _type_ii_or_degenerate(second.w, r_new, s_new, q_new, p_new)


def power(endo: Endomorphism, k: int) -> Endomorphism:
    """The k-th iterate of an endomorphism of either type, k >= 0."""
    if k < 0:
        raise ValueError("the exponent must be nonnegative")
    if isinstance(endo, TypeIEndo):
        return power_type_i(endo, k)
    if k == 0:
        return identity_endo(endo.signature)
    result: Endomorphism = endo
    for _ in range(k - 1):
        result = compose(result, endo)
    return result


def is_injective(endo: Endomorphism) -> bool:
    """Whether the endomorphism is injective.

    Type II maps are never injective.  A type I map is injective
    exactly when its free part embeds (the image subgroup has full
    rank) and det(Q) is nonzero.
    """
    if isinstance(endo, TypeIIEndo):
        return False
    if endo.q.det() == 0:
        return False
    n = len(endo.images)
    graph = SubgroupGraph(n, list(endo.images))
    return graph.subgroup_rank() == n


def is_bijective(endo: Endomorphism) -> bool:
    """Whether the endomorphism is an automorphism.

    Requires type I with det(Q) = +1 or -1 and a free part whose
    images generate the whole free factor.
    """
    if isinstance(endo, TypeIIEndo):
        return False
    if endo.q.det() not in (1, -1):
        return False
    n = len(endo.images)
    graph = SubgroupGraph(n, list(endo.images))
    return graph.is_whole_group()


@lru_cache(maxsize=256)
def _iterated_images(images: tuple[Word, ...], k: int) -> tuple[Word, ...]:
    current = tuple(Word.generator(len(images), i + 1) for i in range(len(images)))
    for _ in range(k):
        current = tuple(substitute(images, w) for w in current)
    return current


def _canonical_root(root: Word) -> Word:
    """Pick the preferred generator of the cyclic subgroup <root>.

    The one whose abelianization has a positive first nonzero entry
    wins; if the abelianization vanishes, the lexicographically
    smaller letter tuple breaks the tie.
    """
    for c in root.abelianization():
        if c > 0:
            return root
        if c < 0:
            return root.inverse()
    inv = root.inverse()
    return root if root.letters <= inv.letters else inv


def _type_ii_or_degenerate(w: Word, r: Vector, s: Vector,
                           q: IntMatrix, p: IntMatrix) -> Endomorphism:
    if all(c == 0 for c in r):
        images = tuple(w ** e for e in s)
        return TypeIEndo(images, q, p)
    return TypeIIEndo(w, tuple(r), tuple(s), q, p)


def _column_act(matrix: IntMatrix, v: Vector) -> Vector:
    return tuple(dot(row, v) for row in matrix.rows)


def _check_element(endo: Endomorphism, g: FatfElement) -> None:
    if endo.signature != g.signature:
        raise SignatureMismatch(
            f"endomorphism of signature {(endo.signature.free_rank, endo.signature.abelian_rank)} "
            f"applied to an element of signature {(g.signature.free_rank, g.signature.abelian_rank)}")


def _check_pair(first: Endomorphism, second: Endomorphism) -> None:
    if first.signature != second.signature:
        raise SignatureMismatch("cannot compose endomorphisms of different signatures")
