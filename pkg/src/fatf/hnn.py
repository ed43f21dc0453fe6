"""Ascending HNN extensions of Fn x Zm by an injective endomorphism.

The extension adds one stable letter x with the relation
x^-1 g x = (g)Phi, and injectivity of Phi gives unique normal forms
x^i g x^-j with i, j >= 0, reduced so that i and j cannot both drop
(that is, j == 0, or i == 0, or g outside the image of Phi).  The
word problem is normal-form comparison; the conjugacy problem splits
on the stable-letter exponent sum, handing the zero case to the
two-sided power search and the rest to twisted conjugacy under the
iterated map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .decide import tcp_fatf, tsbrcp_fatf
from .elements import FatfElement, conjugate_in_fatf
from .endos import Endomorphism, TypeIEndo, apply, identity_endo, is_injective, power
from .free_orbits import DEFAULT_CONFIG, NotInjective, OracleConfig
from .intlinalg import solve_linear, vec, vec_sub
from .subgroups import SubgroupGraph
from .verdict import Decision, no, unknown, yes
from .words import Word

_WORD_CAP_FACTOR = 64


@dataclass(frozen=True)
class HnnElement:
    """The element x^i g x^-j, with nonnegative powers of the stable letter."""

    i: int
    g: FatfElement
    j: int

    def __post_init__(self) -> None:
        if self.i < 0 or self.j < 0:
            raise ValueError("stable-letter exponents must be nonnegative")

    @property
    def exponent_sum(self) -> int:
        """Total x-exponent; invariant under conjugation."""
        return self.i - self.j


class HnnGroup:
    """The ascending extension of Fn x Zm determined by one injective map.

    Caches the folded graph of the image subgroup (for normal-form
    reduction) and the powers of the defining endomorphism (for
    multiplication and the conjugacy search).
    """

    def __init__(self, endo: Endomorphism,
                 config: OracleConfig = DEFAULT_CONFIG) -> None:
        if not is_injective(endo):
            raise NotInjective("an ascending extension needs an injective map")
        assert isinstance(endo, TypeIEndo)  # type II maps are never injective
        self.endo = endo
        self.config = config
        self.signature = endo.signature
        self.graph = SubgroupGraph(len(endo.images), endo.images)
        self._powers: dict[int, Endomorphism] = {0: identity_endo(endo.signature),
                                                 1: endo}

    def power(self, k: int) -> Endomorphism:
        if k not in self._powers:
            self._powers[k] = power(self.endo, k)
        return self._powers[k]

    def identity(self) -> HnnElement:
        return HnnElement(0, self.signature.identity(), 0)

    def element(self, i: int, g: FatfElement, j: int) -> HnnElement:
        self._check(g)
        return normalize(self, i, g, j)

    def _check(self, g: FatfElement) -> None:
        if g.signature != self.signature:
            raise ValueError("element signature does not match the group")


def image_membership(group: HnnGroup, g: FatfElement) -> Optional[FatfElement]:
    """The unique h with apply(Phi, h) == g, or None.

    The free part must spell out as a product of the generator images
    (unique spelling since the image has full rank), and the abelian
    part must solve a = cQ + hbar P, unique because det(Q) != 0.
    """
    group._check(g)
    expr = group.graph.expression(g.word)
    if expr is None:
        return None
    h_word = Word(group.signature.free_rank, expr)
    rhs = vec_sub(vec(g.abelian), group.endo.p.act(h_word.abelianization()))
    solution = solve_linear(group.endo.q, rhs)
    if solution is None:
        return None
    preimage = FatfElement(h_word, solution[0])
    assert apply(group.endo, preimage) == g, "image expression failed to verify"
    return preimage


def normalize(group: HnnGroup, i: int, g: FatfElement, j: int) -> HnnElement:
    """Reduce x^i g x^-j: strip one x from both sides while g has a preimage."""
    group._check(g)
    while i > 0 and j > 0:
        preimage = image_membership(group, g)
        if preimage is None:
            break
        g = preimage
        i -= 1
        j -= 1
    return HnnElement(i, g, j)


def hnn_inverse(e: HnnElement) -> HnnElement:
    """(x^i g x^-j)^-1 = x^j g^-1 x^-i; reducedness is preserved."""
    return HnnElement(e.j, e.g.inverse(), e.i)


def hnn_mul(group: HnnGroup, e1: HnnElement, e2: HnnElement) -> HnnElement:
    """Product in the extension, renormalized.

    The middle x^-j1 x^i2 collapses by pushing the shorter side's base
    element through the relation g x = x (g)Phi.
    """
    group._check(e1.g)
    group._check(e2.g)
    if e1.j <= e2.i:
        shift = e2.i - e1.j
        merged = apply(group.power(shift), e1.g) * e2.g
        return normalize(group, e1.i + shift, merged, e2.j)
    shift = e1.j - e2.i
    merged = e1.g * apply(group.power(shift), e2.g)
    return normalize(group, e1.i, merged, e2.j + shift)


def hnn_conjugate(group: HnnGroup, e: HnnElement, z: HnnElement) -> HnnElement:
    return hnn_mul(group, hnn_mul(group, hnn_inverse(z), e), z)


def wp_hnn(group: HnnGroup, e: HnnElement) -> bool:
    """Whether the element is the identity of the extension."""
    reduced = normalize(group, e.i, e.g, e.j)
    return reduced.i == 0 and reduced.j == 0 and reduced.g.is_identity()


def cp_hnn(group: HnnGroup, e1: HnnElement, e2: HnnElement,
           config: Optional[OracleConfig] = None) -> Decision:
    """Conjugacy in the extension, with an assembled conjugator on Yes.

    The exponent sum e must agree.  For e == 0 both elements conjugate
    into the base group and the question becomes the two-sided power
    search; conjugating by x^r is exactly applying Phi^r.  For e > 0
    both conjugate to the shape x^e g, where conjugation by a base
    element z is the Phi^e-twisted move and conjugation by x steps g
    to (g)Phi, so a diagonal search over those two moves decides; the
    No side is certified once both twisted-class orbits are known to
    be eventually periodic and the covering grid is exhausted.
    """
    config = config or group.config
    e1 = normalize(group, e1.i, e1.g, e1.j)
    e2 = normalize(group, e2.i, e2.g, e2.j)
    if e1.exponent_sum != e2.exponent_sum:
        return no("stable-letter exponent sums differ")
    exp = e1.exponent_sum
    if exp < 0:
        return cp_hnn(group, hnn_inverse(e1), hnn_inverse(e2), config)
    if exp == 0:
        return _cp_exponent_zero(group, e1, e2, config)
    return _cp_exponent_positive(group, e1, e2, exp, config)


def _cp_exponent_zero(group: HnnGroup, e1: HnnElement, e2: HnnElement,
                      config: OracleConfig) -> Decision:
    # Conjugating x^i g x^-i by x^i lands on the base element g.
    g1, g2 = e1.g, e2.g
    two_sided = tsbrcp_fatf(group.endo, g1, g2, config)
    if two_sided.is_no:
        return no(("no pair of stable-letter shifts aligns the base elements",
                   two_sided.certificate))
    if two_sided.is_unknown:
        return unknown(two_sided.taint)
    r, s = two_sided.witness
    base = conjugate_in_fatf(apply(group.power(r), g1), apply(group.power(s), g2))
    assert base is not None, "two-sided witness failed to verify"
    witness = normalize(group, e1.i + r, base, s + e2.i)
    assert hnn_conjugate(group, e1, witness) == e2, "conjugator failed to verify"
    return yes(witness, certificate=("stable-letter shifts", (r, s)))


def _cp_exponent_positive(group: HnnGroup, e1: HnnElement, e2: HnnElement,
                          exp: int, config: OracleConfig) -> Decision:
    # Conjugating x^i g x^-j by x^j lands on x^e g.
    phi_e = group.power(exp)
    bound = config.hnn_depth
    word_cap = config.max_word_len * _WORD_CAP_FACTOR
    orbit1 = _orbit_prefix(group, e1.g, bound, word_cap)
    orbit2 = _orbit_prefix(group, e2.g, bound, word_cap)
    truncated = len(orbit1) <= bound or len(orbit2) <= bound

    uncertain = False
    for total in range(len(orbit1) + len(orbit2) - 1):
        for r in range(total + 1):
            s = total - r
            if r >= len(orbit1) or s >= len(orbit2):
                continue
            hit = tcp_fatf(phi_e, orbit1[r], orbit2[s], config)
            if hit.is_unknown:
                uncertain = True
                continue
            if hit.is_yes:
                witness = normalize(group, e1.j + r, hit.witness, s + e2.j)
                assert hnn_conjugate(group, e1, witness) == e2, \
                    "conjugator failed to verify"
                return yes(witness, certificate=("twisted pair", (r, s)))
    if uncertain or truncated:
        return unknown("the diagonal twisted search exhausted its bounds")

    period1 = _twisted_period(phi_e, orbit1, config)
    period2 = _twisted_period(phi_e, orbit2, config)
    if period1 is not None and period2 is not None:
        return no(("both twisted-class orbits are periodic and the grid "
                   "below the periods is exhausted", period1, period2))
    return unknown("twisted-class orbit periodicity could not be established")


def _orbit_prefix(group: HnnGroup, g: FatfElement, bound: int,
                  word_cap: int) -> list[FatfElement]:
    out = [g]
    for _ in range(bound):
        if len(out[-1].word) > word_cap:
            break
        out.append(apply(group.endo, out[-1]))
    return out


def _twisted_period(phi_e: Endomorphism, orbit: list[FatfElement],
                    config: OracleConfig) -> Optional[tuple[int, int]]:
    """First (entry, period) with orbit[entry + period] twisted-conjugate
    to orbit[entry] under phi_e, or None when none is certified.

    Twisted conjugacy under a fixed map is an equivalence, so once the
    class sequence repeats, every later index folds back and a searched
    grid covering one full window is exhaustive.
    """
    for hi in range(1, len(orbit)):
        for lo in range(hi):
            answer = tcp_fatf(phi_e, orbit[hi], orbit[lo], config)
            if answer.is_yes:
                return lo, hi - lo
    return None
