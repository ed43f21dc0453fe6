"""Orbit decision procedures for iterated free-group endomorphisms.

Given images defining an endomorphism of a free group, these routines
answer whether some iterate sends a word to a target (up to equality or
conjugacy), and when possible return the full set of matching exponents.

That hit set is always empty, a singleton, or an arithmetic progression:
if ``u phi^k0 = v`` and ``u phi^k1 = v`` with ``k0 < k1``, then
``phi^(k1-k0)`` fixes ``v``, so every ``k0 + j(k1-k0)`` hits as well.
The scanners lean on this shape when turning a finite enumeration into
an exact answer.

Two strategies back the scans.  The bounded strategy iterates words (or
conjugacy-class representatives) with exact hashing until the orbit
closes a cycle or outgrows its limits, supported by two certified
filters: the abelianized orbit, and membership in iterated image
subgroups.  The cyclic strategy applies when every generator image lies
in one cyclic subgroup; orbits then live in a single exponent, and the
one-dimensional integer orbit is decided exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Optional, Sequence, Union

from .intlinalg import IntMatrix, dot, vec_sub, solve_linear
from .orbit import OrbitNo, OrbitYes, solve_linear_orbit
from .subgroups import SubgroupGraph
from .verdict import Decision, no, unknown, yes
from .words import (
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


class NotInjective(ValueError):
    """Raised by operations that need an injective endomorphism."""


@dataclass(frozen=True)
class EmptyLog:
    """No exponent matches."""

    def contains(self, k: int) -> bool:
        return False

    def __contains__(self, k: int) -> bool:
        return False


@dataclass(frozen=True)
class Progression:
    """Matching exponents ``start + period * N`` (a singleton when period is 0)."""

    start: int
    period: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.period < 0:
            raise ValueError("progression parameters must be nonnegative")

    def contains(self, k: int) -> bool:
        if k < self.start:
            return False
        if self.period == 0:
            return k == self.start
        return (k - self.start) % self.period == 0

    def __contains__(self, k: int) -> bool:
        return self.contains(k)


LogSet = Union[EmptyLog, Progression]

EMPTY_LOG = EmptyLog()


@dataclass(frozen=True)
class OracleConfig:
    """Search limits and strategy selection for the orbit procedures.

    backend: "auto" picks the cyclic strategy when it applies and falls
    back to bounded scanning, "bounded" forces scanning, "abelian"
    insists on the cyclic strategy and raises when it does not apply.
    """

    backend: str = "auto"
    max_steps: int = 10000
    max_word_len: int = 64
    search_len: int = 6
    fix_len: int = 5
    grid: int = 512
    image_depth: int = 8
    hnn_depth: int = 8

    def __post_init__(self) -> None:
        if self.backend not in ("auto", "bounded", "abelian"):
            raise ValueError(f"unknown backend: {self.backend!r}")


DEFAULT_CONFIG = OracleConfig()


def _check_inputs(images: Sequence[Word], *words: Word) -> int:
    if not images and not words:
        raise RankMismatch("empty endomorphism needs an explicit word")
    rank = words[0].rank if words else len(images)
    if len(images) != rank:
        raise RankMismatch(f"need {rank} generator images, got {len(images)}")
    for w in list(images) + list(words):
        if w.rank != rank:
            raise RankMismatch("mixed ranks in orbit query")
    return rank


def _detect_root(images: Sequence[Word]) -> Optional[Word]:
    """Common primitive root when every nontrivial image is a power of it."""
    root: Optional[Word] = None
    for w in images:
        if w.is_identity():
            continue
        if root is None:
            root, _ = primitive_root(w)
        elif power_index(w, root) is None:
            return None
    return root


def _cyclic_root(images: Sequence[Word], config: OracleConfig) -> Optional[Word]:
    if config.backend == "bounded":
        return None
    root = _detect_root(images)
    if root is None and config.backend == "abelian":
        raise ValueError(
            "cyclic-image strategy needs every generator image in one cyclic subgroup"
        )
    return root


def _abelian_shadow(images: Sequence[Word]) -> IntMatrix:
    """Matrix acting on abelianizations: row i is the image of generator i."""
    width = images[0].rank if images else 0
    return IntMatrix.from_rows(tuple(w.abelianization() for w in images), width=width)


# ---------------------------------------------------------------------------
# generic eventually-periodic scanning


@dataclass(frozen=True)
class _Scan:
    hits: tuple[int, ...]
    entry: Optional[int]
    period: int
    scanned: int
    reason: str = ""


def _scan_orbit(
    start,
    step: Callable,
    is_hit: Callable,
    max_steps: int,
    oversized: Optional[Callable] = None,
    stop_on_hit: bool = False,
) -> _Scan:
    """Walk ``start, step(start), ...`` recording hit indices.

    Stops when a state repeats (the orbit is then fully enumerated, and
    hits inside the cycle recur forever) or when a bound trips.  With
    ``stop_on_hit`` the walk ends at the first hit instead.
    """
    seen: dict = {}
    hits: list[int] = []
    state = start
    k = 0
    while k < max_steps:
        if oversized is not None and oversized(state):
            return _Scan(tuple(hits), None, 0, k, f"state outgrew the size limit at step {k}")
        if state in seen:
            entry = seen[state]
            return _Scan(tuple(hits), entry, k - entry, k)
        if is_hit(state):
            hits.append(k)
            if stop_on_hit:
                return _Scan(tuple(hits), None, 0, k + 1, "stopped at the first hit")
        seen[state] = k
        state = step(state)
        k += 1
    return _Scan(tuple(hits), None, 0, k, f"step limit {max_steps} reached")


def _log_from_hits(hits: Sequence[int], entry: Optional[int], period: int) -> LogSet:
    """Assemble the exact hit set.

    With ``entry`` None the listed hits are the complete set.  Otherwise
    the listing covers every index below ``entry + period`` and hits at
    or past ``entry`` recur with the cycle.
    """
    if not hits:
        return EMPTY_LOG
    first = hits[0]
    recurring = [] if entry is None else [h for h in hits if h >= entry]
    if not recurring:
        if len(hits) > 1:
            raise AssertionError("two isolated hits are impossible: hits recur")
        return Progression(first, 0)
    window = sorted(set(hits) | {h + period for h in recurring})
    step = 0
    for a, b in zip(window, window[1:]):
        step = gcd(step, b - a)
    for i, h in enumerate(window):
        if h != first + i * step:
            raise AssertionError("hit set is not an arithmetic progression")
    return Progression(first, step)


def _image_ceiling(images: Sequence[Word], v: Word, config: OracleConfig) -> Optional[int]:
    """Least j with v outside the image of the j-th iterate, scanning a few.

    Any orbit hit at k >= j would put v inside that image, so a ceiling
    turns the membership question into a finite check.
    """
    if v.is_identity():
        return None
    current = list(images)
    for j in range(1, config.image_depth + 1):
        if sum(len(w) for w in current) > 20000:
            return None
        graph = SubgroupGraph(v.rank, current)
        if not graph.contains(v):
            return j
        current = [substitute(images, w) for w in current]
    return None


# ---------------------------------------------------------------------------
# cyclic strategy internals


def _cyclic_data(images: Sequence[Word], root: Word, u: Word) -> tuple[int, int, tuple[int, ...]]:
    """Exponent data: u maps to root^c, and root maps to root^lam."""
    exps = tuple(power_index(w, root) or 0 for w in images)
    c = dot(u.abelianization(), exps)
    lam = dot(root.abelianization(), exps)
    return c, lam, exps


def _exponent_log(c: int, lam: int, target: Optional[int], zero_hit: bool) -> LogSet:
    """Exact hit set of ``c * lam^(k-1) == target`` over k >= 1, plus k = 0."""
    hits: list[int] = [0] if zero_hit else []
    if target is None:
        return _log_from_hits(hits, None, 0)
    seen: dict[int, int] = {}
    e = c
    k = 1
    while True:
        if e in seen:
            entry = seen[e]
            return _log_from_hits(hits, entry, k - entry)
        if e == target:
            hits.append(k)
        seen[e] = k
        if abs(lam) >= 2 and e != 0 and abs(e) > abs(target):
            # |e| grows strictly from here on and can never come back
            return _log_from_hits(hits, None, 0)
        e *= lam
        k += 1


def conjugate_power_index(v: Word, root: Word) -> Optional[int]:
    """The l with v conjugate to root^l, if any.

    Unique when it exists: powers of a primitive root are conjugate only
    when equal, and no nontrivial word is conjugate to its inverse.
    """
    if v.is_identity():
        return 0
    core_v = cyclic_reduce(v).core
    core_r = cyclic_reduce(root).core
    quotient, remainder = divmod(len(core_v), len(core_r))
    if remainder or quotient == 0:
        return None
    for cand in (quotient, -quotient):
        if is_conjugate(v, root**cand) is not None:
            return cand
    return None


def _solve_exponent_orbit(c: int, lam: int, target: int, config: OracleConfig) -> Decision:
    """Least k >= 1 with c * lam^(k-1) == target, via the integer orbit."""
    answer = solve_linear_orbit(
        (c,), IntMatrix.from_rows(((lam,),)), (target,), max_steps=config.max_steps
    )
    if isinstance(answer, OrbitYes):
        return yes(answer.k + 1)
    if isinstance(answer, OrbitNo):
        return no(("exponent orbit never matches", answer.certificate))
    return unknown("exponent orbit undecided")


# ---------------------------------------------------------------------------
# membership: does some iterate send u to v exactly


def brp_free(
    images: Sequence[Word], u: Word, v: Word, config: OracleConfig = DEFAULT_CONFIG
) -> Decision:
    """Is ``u phi^k == v`` for some k >= 0?  Witness: the least such k."""
    _check_inputs(images, u, v)
    root = _cyclic_root(images, config)
    if root is not None:
        if u == v:
            return yes(0)
        c, lam, _ = _cyclic_data(images, root, u)
        target = power_index(v, root)
        if target is None:
            return no("every iterate lies in the cyclic image subgroup, the target does not")
        return _solve_exponent_orbit(c, lam, target, config)

    scan = _scan_orbit(
        u,
        lambda w: substitute(images, w),
        lambda w: w == v,
        config.max_steps,
        lambda w: len(w) > config.max_word_len,
        stop_on_hit=True,
    )
    if scan.hits:
        return yes(scan.hits[0])
    if scan.entry is not None:
        return no(("orbit is eventually periodic and never matches", scan.entry, scan.period))

    shadow = solve_linear_orbit(
        u.abelianization(), _abelian_shadow(images), v.abelianization(), max_steps=config.max_steps
    )
    if isinstance(shadow, OrbitNo):
        return no(("abelianized orbit never matches", shadow.certificate))

    ceiling = _image_ceiling(images, v, config)
    if ceiling is not None:
        w = u
        for k in range(ceiling):
            if w == v:
                return yes(k)
            w = substitute(images, w)
        return no(("target escapes the iterated images", ceiling))
    return unknown(scan.reason)


def philog_free(
    images: Sequence[Word], u: Word, v: Word, config: OracleConfig = DEFAULT_CONFIG
) -> Optional[LogSet]:
    """The exact set of k with ``u phi^k == v``, or None when undetermined."""
    _check_inputs(images, u, v)
    root = _cyclic_root(images, config)
    if root is not None:
        c, lam, _ = _cyclic_data(images, root, u)
        return _exponent_log(c, lam, power_index(v, root), zero_hit=u == v)

    scan = _scan_orbit(
        u,
        lambda w: substitute(images, w),
        lambda w: w == v,
        config.max_steps,
        lambda w: len(w) > config.max_word_len,
    )
    if scan.entry is not None:
        return _log_from_hits(scan.hits, scan.entry, scan.period)

    shadow = solve_linear_orbit(
        u.abelianization(), _abelian_shadow(images), v.abelianization(), max_steps=config.max_steps
    )
    if isinstance(shadow, OrbitNo):
        return EMPTY_LOG

    ceiling = _image_ceiling(images, v, config)
    if ceiling is not None:
        hits = []
        w = u
        for k in range(ceiling):
            if w == v:
                hits.append(k)
            w = substitute(images, w)
        return _log_from_hits(hits, None, 0)
    return None


# ---------------------------------------------------------------------------
# conjugacy: does some iterate send u into the conjugacy class of v


def brcp_free(
    images: Sequence[Word], u: Word, v: Word, config: OracleConfig = DEFAULT_CONFIG
) -> Decision:
    """Is ``u phi^k`` conjugate to v for some k >= 0?  Witness: least k."""
    _check_inputs(images, u, v)
    root = _cyclic_root(images, config)
    if root is not None:
        if is_conjugate(u, v) is not None:
            return yes(0)
        c, lam, _ = _cyclic_data(images, root, u)
        target = conjugate_power_index(v, root)
        if target is None:
            return no("no power of the cyclic generator is conjugate to the target")
        return _solve_exponent_orbit(c, lam, target, config)

    target_key = conjugacy_class_key(v)
    scan = _scan_orbit(
        conjugacy_class_key(u),
        lambda w: conjugacy_class_key(substitute(images, w)),
        lambda w: w == target_key,
        config.max_steps,
        lambda w: len(w) > config.max_word_len,
        stop_on_hit=True,
    )
    if scan.hits:
        return yes(scan.hits[0])
    if scan.entry is not None:
        return no(
            ("conjugacy class orbit is eventually periodic and never matches", scan.entry, scan.period)
        )

    shadow = solve_linear_orbit(
        u.abelianization(), _abelian_shadow(images), v.abelianization(), max_steps=config.max_steps
    )
    if isinstance(shadow, OrbitNo):
        return no(("abelianized orbit never matches", shadow.certificate))
    return unknown(scan.reason)


def philog_conj_free(
    images: Sequence[Word], u: Word, v: Word, config: OracleConfig = DEFAULT_CONFIG
) -> Optional[LogSet]:
    """The exact set of k with ``u phi^k`` conjugate to v, or None."""
    _check_inputs(images, u, v)
    root = _cyclic_root(images, config)
    if root is not None:
        c, lam, _ = _cyclic_data(images, root, u)
        return _exponent_log(
            c, lam, conjugate_power_index(v, root), zero_hit=is_conjugate(u, v) is not None
        )

    target_key = conjugacy_class_key(v)
    scan = _scan_orbit(
        conjugacy_class_key(u),
        lambda w: conjugacy_class_key(substitute(images, w)),
        lambda w: w == target_key,
        config.max_steps,
        lambda w: len(w) > config.max_word_len,
    )
    if scan.entry is not None:
        return _log_from_hits(scan.hits, scan.entry, scan.period)

    shadow = solve_linear_orbit(
        u.abelianization(), _abelian_shadow(images), v.abelianization(), max_steps=config.max_steps
    )
    if isinstance(shadow, OrbitNo):
        return EMPTY_LOG
    return None


# ---------------------------------------------------------------------------
# twisted conjugacy and fixed subgroups


def tcp_free(
    images: Sequence[Word], u: Word, v: Word, config: OracleConfig = DEFAULT_CONFIG
) -> Decision:
    """Find z with ``(z phi)^-1 * u * z == v``.

    Exact when phi is the identity (ordinary conjugacy) or when the
    abelianized equation is unsolvable; otherwise a bounded search that
    can only return yes with a verified witness.
    """
    rank = _check_inputs(images, u, v)
    if all(images[i] == Word.generator(rank, i + 1) for i in range(rank)):
        z = is_conjugate(u, v)
        if z is None:
            return no("not conjugate")
        return yes(z)

    lhs = IntMatrix.identity(rank) - _abelian_shadow(images)
    rhs = vec_sub(v.abelianization(), u.abelianization())
    if solve_linear(lhs, rhs) is None:
        return no("abelianized twisted equation has no solution")

    for z in enumerate_words(rank, config.search_len):
        if substitute(images, z).inverse() * u * z == v:
            return yes(z)
    return unknown(f"no twisted conjugator within length {config.search_len}")


def fix_generators(
    images: Sequence[Word], config: OracleConfig = DEFAULT_CONFIG
) -> tuple[tuple[Word, ...], bool]:
    """Generators of the fixed subgroup of phi, with an exactness flag.

    Exact for the identity map and for maps into one cyclic subgroup.
    Otherwise generators found by bounded enumeration: a subgroup of the
    true fixed subgroup, flagged inexact.
    """
    if not images:
        return (), True
    rank = _check_inputs(images)
    gens = [Word.generator(rank, i + 1) for i in range(rank)]
    if list(images) == gens:
        return tuple(gens), True

    root = _detect_root(images)
    if root is not None:
        _, lam, _ = _cyclic_data(images, root, root)
        if lam == 1:
            return (root,), True
        return (), True

    fixed = [
        z
        for z in enumerate_words(rank, config.fix_len)
        if not z.is_identity() and substitute(images, z) == z
    ]
    basis = SubgroupGraph(rank, fixed).basis()
    for b in basis:
        if substitute(images, b) != b:
            raise AssertionError("products of fixed words must stay fixed")
    return tuple(basis), False


def centralizer_generators(u: Word) -> tuple[Word, ...]:
    """Generators of the centralizer: everything for the identity, else the root."""
    if u.is_identity():
        return tuple(Word.generator(u.rank, i + 1) for i in range(u.rank))
    root, _ = primitive_root(u)
    return (root,)


# ---------------------------------------------------------------------------
# two-sided conjugacy of iterates


class _LazyClassOrbit:
    """Conjugacy classes of the iterates of one word, grown on demand.

    Once the key sequence repeats, any index folds into the cycle and
    every class the orbit will ever visit is known.  An orbit that
    outgrows the word-length or step budget instead reports None past
    the scanned prefix.
    """

    def __init__(self, images: Sequence[Word], w0: Word, config: OracleConfig):
        self.images = images
        self.config = config
        self.keys: list[Word] = []
        self.seen: dict[Word, int] = {}
        self.entry: Optional[int] = None
        self.period = 0
        self.exhausted = False
        self._next = conjugacy_class_key(w0)
        self._bound = min(config.max_steps, 2 * config.grid + 2)

    @property
    def closed(self) -> bool:
        return self.entry is not None

    @property
    def horizon(self) -> int:
        return self.entry + self.period if self.closed else len(self.keys)

    def key_at(self, idx: int) -> Optional[Word]:
        while not self.exhausted and not self.closed and len(self.keys) <= idx:
            key = self._next
            if key in self.seen:
                self.entry = self.seen[key]
                self.period = len(self.keys) - self.entry
                break
            if len(key) > self.config.max_word_len or len(self.keys) >= self._bound:
                self.exhausted = True
                break
            self.seen[key] = len(self.keys)
            self.keys.append(key)
            self._next = conjugacy_class_key(substitute(self.images, key))
        if idx < len(self.keys):
            return self.keys[idx]
        if self.closed:
            return self.keys[self.entry + (idx - self.entry) % self.period]
        return None


def class_orbit_data(
    images: Sequence[Word], w0: Word, config: OracleConfig = DEFAULT_CONFIG
) -> Optional[tuple[tuple[Word, ...], int, int]]:
    """Closed conjugacy-class orbit of w0: (key prefix, cycle entry, period).

    The prefix lists the class keys of ``w0 phi^k`` up to the step where
    the sequence first repeats; any later index folds into the cycle.
    None when the orbit outgrew the scan bounds before repeating.
    """
    _check_inputs(images, w0)
    orbit = _LazyClassOrbit(images, w0, config)
    orbit.key_at(min(config.max_steps, 2 * config.grid + 2))
    if not orbit.closed:
        return None
    return tuple(orbit.keys), orbit.entry, orbit.period


def tsbrcp_free(
    images: Sequence[Word], u: Word, v: Word, config: OracleConfig = DEFAULT_CONFIG
) -> Decision:
    """Least (r, s) under (r+s, then r) with ``u phi^r`` conjugate to ``v phi^s``.

    Needs phi injective, otherwise unrelated iterates could collide and
    the two-sided search order would not be exhaustive.
    """
    rank = _check_inputs(images, u, v)
    if SubgroupGraph(rank, images).subgroup_rank() != rank:
        raise NotInjective("generator images span a subgroup of deficient rank")

    side_u = _LazyClassOrbit(images, u, config)
    side_v = _LazyClassOrbit(images, v, config)

    # The sweep walks pairs in (r+s, then r) order.  A pair is skipped only
    # when an exhausted orbit cannot produce its key; the first skip is
    # remembered so a later hit cannot silently claim minimality.
    first_gap = None
    for total in range(0, 2 * config.grid + 1):
        if side_u.closed and side_v.closed and total > side_u.horizon + side_v.horizon:
            break
        for r in range(0, total + 1):
            key_u = side_u.key_at(r)
            key_v = side_v.key_at(total - r)
            if key_u is None or key_v is None:
                if first_gap is None:
                    first_gap = (total, r)
                continue
            if key_u == key_v:
                if first_gap is None:
                    return yes((r, total - r))
                return yes((r, total - r), certificate="least matching pair inside the scanned region")

    if side_u.closed and side_v.closed:
        if side_u.horizon + side_v.horizon - 2 <= 2 * config.grid:
            return no(
                (
                    "both class orbits are eventually periodic with no matching pair",
                    (side_u.entry, side_u.period),
                    (side_v.entry, side_v.period),
                )
            )
        return unknown(f"periodic class orbits need a grid beyond {config.grid}")
    stuck = "first" if not side_u.closed else "second"
    return unknown(f"class orbit of the {stuck} word exceeded the scan bounds")
