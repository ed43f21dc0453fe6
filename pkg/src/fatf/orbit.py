"""Integer orbit decisions: does x reach y under iterating a matrix?

Decides whether some k >= k_min has x M^k = y over the integers,
with three-valued answers.  Yes answers carry the exponent.  No
answers carry one of three machine-checkable certificates:

  Cycle       the orbit is eventually periodic, was enumerated in
              full, and misses the target at every admissible step.
  Growth      the map strictly expands euclidean length, and the
              orbit already passed the target's norm.
  Congruence  the orbit misses the target modulo a small modulus,
              beyond a prefix that was checked exactly.
  Escape      one-dimensional affine orbits only: past the checked
              prefix the orbit moves strictly away from the target.

Everything else is Unknown, reported with the number of exact steps
that were tried.  All certificates can be replayed by the verify
functions at the bottom, which use nothing but matrix arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .intlinalg import AffineMap, IntMatrix, Vector, norm_sq, vec

DEFAULT_MAX_STEPS = 10000
DEFAULT_MODULI = (2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27)
DEFAULT_ENTRY_CAP = 10 ** 12
_MODULAR_STEP_CAP = 20000


@dataclass(frozen=True)
class Cycle:
    """The orbit enters a loop: states at ``entry`` and ``entry + period`` agree."""
    entry: int
    period: int


@dataclass(frozen=True)
class Growth:
    """Strictly norm-increasing map; at ``threshold_step`` the orbit norm
    already exceeds the target norm by ``margin`` (squared euclidean)."""
    threshold_step: int
    margin: int


@dataclass(frozen=True)
class Congruence:
    """No admissible step beyond the exactly-checked prefix hits the
    target modulo ``modulus``."""
    modulus: int
    checked_prefix: int


@dataclass(frozen=True)
class Escape:
    """One-dimensional affine orbit that provably never returns.

    For the map v -> v*q + b on Z, no admissible step below
    ``checked_prefix`` hits the target, and at the prefix the orbit
    moves strictly away from it: constant drift on the target's far
    side when q == 1, or a geometric residue past the target's when
    |q| >= 2 (the residue z = v*(q-1) + b satisfies z -> z*q).
    """
    checked_prefix: int


NoCertificate = Cycle | Growth | Congruence | Escape


@dataclass(frozen=True)
class OrbitYes:
    k: int


@dataclass(frozen=True)
class OrbitNo:
    certificate: NoCertificate


@dataclass(frozen=True)
class OrbitUnknown:
    bound_used: int


OrbitAnswer = OrbitYes | OrbitNo | OrbitUnknown


def solve_linear_orbit(x: Vector, matrix: IntMatrix, y: Vector, k_min: int = 0,
                       max_steps: int = DEFAULT_MAX_STEPS,
                       moduli: tuple[int, ...] = DEFAULT_MODULI,
                       entry_cap: int = DEFAULT_ENTRY_CAP) -> OrbitAnswer:
    """Decide whether x M^k = y for some k >= k_min."""
    x = vec(x)
    y = vec(y)
    if not matrix.is_square() or matrix.n_rows != len(x) or len(x) != len(y):
        raise ValueError("orbit instance dimensions do not match")
    if len(x) == 0:
        return OrbitYes(k_min)

    grows = _strictly_expanding(matrix)
    target_norm = norm_sq(y)
    cap = max(entry_cap, 2 * max(_sup_norm(x), _sup_norm(y)) + 1)

    seen: dict[Vector, int] = {}
    v = x
    k = 0
    checked = 0
    while k <= max_steps:
        if k >= k_min and v == y:
            return OrbitYes(k)
        if v in seen:
            entry = seen[v]
            period = k - entry
            hit = _first_cycle_hit(x, matrix, y, k_min, entry, period)
            if hit is not None:
                return OrbitYes(hit)
            return OrbitNo(Cycle(entry, period))
        if grows:
            current = norm_sq(v)
            if current > target_norm:
                return OrbitNo(Growth(k, current - target_norm))
        checked = k + 1
        if _sup_norm(v) > cap:
            break
        seen[v] = k
        v = matrix.act(v)
        k += 1

    for q in moduli:
        if _congruence_rules_out(x, matrix, y, k_min, q, checked):
            return OrbitNo(Congruence(q, checked))
    return OrbitUnknown(checked)


def solve_affine_orbit(x: Vector, affine: AffineMap, y: Vector, k_min: int = 0,
                       max_steps: int = DEFAULT_MAX_STEPS,
                       moduli: tuple[int, ...] = DEFAULT_MODULI,
                       entry_cap: int = DEFAULT_ENTRY_CAP) -> OrbitAnswer:
    """Decide whether iterating v -> vM + b from x ever lands on y.

    One-dimensional instances are decided outright in closed form.
    Higher dimensions work on the homogenized matrix one dimension up,
    so certificates refer to the lifted instance (x, 1) -> (y, 1).
    """
    if len(x) == 1 and len(y) == 1:
        q = affine.matrix.rows[0][0]
        one_dim = _solve_affine_1d(int(x[0]), q, affine.offset[0], int(y[0]), k_min)
        if one_dim is not None:
            return one_dim
    lifted = affine.homogenize()
    return solve_linear_orbit(tuple(x) + (1,), lifted, tuple(y) + (1,),
                              k_min, max_steps, moduli, entry_cap)


def _solve_affine_1d(x: int, q: int, b: int, y: int,
                     k_min: int) -> Optional[OrbitAnswer]:
    """Closed form for x_{k+1} = x_k q + b on Z, or None to defer.

    Handles the cases the generic machinery cannot certify: constant
    drift (q == 1, b != 0) and geometric escape (|q| >= 2, where the
    homogenized matrix keeps a unit eigenvalue and so is never
    strictly expanding).  Small q values cycle and are left to the
    generic solver.
    """
    if q == 1 and b != 0:
        lam, rem = divmod(y - x, b)
        if rem != 0:
            return OrbitNo(Congruence(abs(b), 0))
        if lam >= k_min:
            return OrbitYes(lam)
        return OrbitNo(Escape(max(k_min, lam + 1)))
    if abs(q) >= 2:
        # z_k = x_k (q-1) + b turns the recursion into z -> z q.
        z = x * (q - 1) + b
        z_target = y * (q - 1) + b
        if z == 0:
            return OrbitYes(k_min) if x == y else OrbitNo(Cycle(0, 1))
        k = 0
        v = x
        while abs(v * (q - 1) + b) <= abs(z_target):
            if k >= k_min and v == y:
                return OrbitYes(k)
            v = v * q + b
            k += 1
        return OrbitNo(Escape(max(k, k_min)))
    return None


def brute_force_orbit(x: Vector, matrix: IntMatrix, y: Vector,
                      k_max: int) -> Optional[int]:
    """Smallest k <= k_max with x M^k = y, by plain iteration."""
    v = vec(x)
    y = vec(y)
    for k in range(k_max + 1):
        if v == y:
            return k
        v = matrix.act(v)
    return None


def _totient(q: int) -> int:
    result = q
    p = 2
    while p * p <= q:
        if q % p == 0:
            while q % p == 0:
                q //= p
            result -= result // p
        p += 1
    if q > 1:
        result -= result // q
    return result


@lru_cache(maxsize=None)
def max_finite_order(dim: int) -> int:
    """Largest order of a finite-order integer matrix of the given size.

    The characteristic polynomial of such a matrix is a product of
    cyclotomic polynomials whose degrees sum to the dimension, and its
    order is the lcm of their indices, so the maximum is a small
    combinatorial optimum over index multisets (2, 6, 6, 12, 12, 30,
    ... for dimensions 1, 2, 3, 4, 5, 6).
    """
    if dim < 1:
        return 1
    candidates = sorted(
        (q for q in range(2, 4 * dim * dim + 10) if _totient(q) <= dim),
        key=lambda q: -q)
    best = 1

    def search(start: int, budget: int, current: int) -> None:
        nonlocal best
        if current > best:
            best = current
        for i in range(start, len(candidates)):
            q = candidates[i]
            cost = _totient(q)
            if cost > budget:
                continue
            grown = math.lcm(current, q)
            if grown > current:
                search(i + 1, budget - cost, grown)

    search(0, dim, 1)
    return best


def solve_return_period(x: Vector, matrix: IntMatrix) -> Optional[int]:
    """Least k >= 1 with x M^k == x, or None when x never returns.

    A return at k makes M^k fix every orbit point, hence the whole
    sublattice the orbit spans, so M restricted to that lattice is an
    automorphism of finite order and the least return is exactly that
    order.  Orders of integer matrices acting on a lattice of rank at
    most len(x) are bounded by max_finite_order, so a scan up to the
    bound is a complete decision procedure, not a heuristic.
    """
    x = vec(x)
    if not matrix.is_square() or matrix.n_rows != len(x):
        raise ValueError("return instance dimensions do not match")
    v = matrix.act(x)
    for k in range(1, max_finite_order(len(x)) + 1):
        if v == x:
            return k
        v = matrix.act(v)
    return None


def verify_linear_orbit(x: Vector, matrix: IntMatrix, y: Vector,
                        answer: OrbitAnswer, k_min: int = 0) -> bool:
    """Replay an answer against the instance it claims to decide."""
    x = vec(x)
    y = vec(y)
    if isinstance(answer, OrbitUnknown):
        return answer.bound_used >= 0
    if isinstance(answer, OrbitYes):
        if answer.k < k_min:
            return False
        v = x
        for _ in range(answer.k):
            v = matrix.act(v)
        return v == y
    cert = answer.certificate
    if isinstance(cert, Cycle):
        return _verify_cycle(x, matrix, y, k_min, cert)
    if isinstance(cert, Growth):
        return _verify_growth(x, matrix, y, k_min, cert)
    if isinstance(cert, Congruence):
        return _verify_congruence(x, matrix, y, k_min, cert)
    return False


def verify_affine_orbit(x: Vector, affine: AffineMap, y: Vector,
                        answer: OrbitAnswer, k_min: int = 0) -> bool:
    if isinstance(answer, OrbitNo) and isinstance(answer.certificate, Escape):
        return _verify_escape(x, affine, y, k_min, answer.certificate)
    lifted = affine.homogenize()
    return verify_linear_orbit(tuple(x) + (1,), lifted, tuple(y) + (1,),
                               answer, k_min)


def _verify_escape(x: Vector, affine: AffineMap, y: Vector, k_min: int,
                   cert: Escape) -> bool:
    """Replay a one-dimensional escape: exact prefix, then monotone exit.

    Past the prefix the orbit provably never returns to the target:
    with q == 1 it drifts by a constant step on the target's far side,
    and with |q| >= 2 the residue z = v(q-1) + b satisfies z -> zq, so
    once |z| passes the target's residue it grows forever.
    """
    if len(x) != 1 or len(y) != 1 or cert.checked_prefix < 0:
        return False
    q = affine.matrix.rows[0][0]
    b = affine.offset[0]
    v, target = int(x[0]), int(y[0])
    for k in range(cert.checked_prefix):
        if k >= k_min and v == target:
            return False
        v = v * q + b
    if cert.checked_prefix < k_min:
        return False
    if q == 1:
        gap = v - target
        return b != 0 and gap != 0 and (gap > 0) == (b > 0)
    if abs(q) >= 2:
        z = v * (q - 1) + b
        z_target = target * (q - 1) + b
        return z != 0 and abs(z) > abs(z_target)
    return False


def _sup_norm(v: Vector) -> int:
    return max((abs(c) for c in v), default=0)


def _strictly_expanding(matrix: IntMatrix) -> bool:
    """Whether |vM| > |v| for every nonzero integer vector v.

    Holds exactly when M M^T - I is positive definite, because
    |vM|^2 - |v|^2 = v (M M^T - I) v^T in the row convention.
    """
    gram = matrix * matrix.transpose() - IntMatrix.identity(matrix.n_rows)
    return gram.is_positive_definite()


def _first_cycle_hit(x: Vector, matrix: IntMatrix, y: Vector, k_min: int,
                     entry: int, period: int) -> Optional[int]:
    """Smallest admissible k with x M^k = y, given the orbit cycles.

    The orbit is the tail v_0 .. v_{entry-1} followed by the loop
    v_entry .. v_{entry+period-1} repeating forever, so only indices
    below entry + period need inspection; loop hits below k_min shift
    up by whole periods.
    """
    v = x
    best: Optional[int] = None
    for j in range(entry + period):
        if v == y:
            if j >= k_min:
                return j
            if j >= entry:
                lift = j + period * (-(-(k_min - j) // period))
                best = lift if best is None else min(best, lift)
        v = matrix.act(v)
    return best


def _congruence_rules_out(x: Vector, matrix: IntMatrix, y: Vector, k_min: int,
                          modulus: int, checked_prefix: int) -> bool:
    """Certify that no k >= max(k_min, checked_prefix) hits y, mod q.

    Follows the orbit of x mod q until it repeats.  A hit inside the
    loop recurs forever, so it blocks certification outright; a hit on
    the tail blocks it only when its index is admissible and was not
    already checked exactly.
    """
    rows = tuple(tuple(c % modulus for c in row) for row in matrix.rows)
    dim = len(x)
    v = tuple(c % modulus for c in x)
    target = tuple(c % modulus for c in y)
    floor = max(k_min, checked_prefix)
    seen: dict[Vector, int] = {}
    hits: list[int] = []
    k = 0
    while k <= _MODULAR_STEP_CAP:
        if v in seen:
            entry = seen[v]
            return all(j < entry and j < floor for j in hits)
        seen[v] = k
        if v == target:
            hits.append(k)
        v = tuple(sum(v[i] * rows[i][j] for i in range(dim)) % modulus
                  for j in range(dim))
        k += 1
    return False


def _verify_cycle(x: Vector, matrix: IntMatrix, y: Vector, k_min: int,
                  cert: Cycle) -> bool:
    if cert.period < 1 or cert.entry < 0:
        return False
    states = []
    v = x
    for _ in range(cert.entry + cert.period + 1):
        states.append(v)
        v = matrix.act(v)
    if states[cert.entry] != states[cert.entry + cert.period]:
        return False
    for j in range(cert.entry + cert.period):
        if states[j] == y and (j >= k_min or j >= cert.entry):
            return False
    return True


def _verify_growth(x: Vector, matrix: IntMatrix, y: Vector, k_min: int,
                   cert: Growth) -> bool:
    if cert.margin <= 0 or cert.threshold_step < 0:
        return False
    if not _strictly_expanding(matrix):
        return False
    v = x
    for j in range(cert.threshold_step):
        if j >= k_min and v == y:
            return False
        v = matrix.act(v)
    return norm_sq(v) - norm_sq(y) == cert.margin


def _verify_congruence(x: Vector, matrix: IntMatrix, y: Vector, k_min: int,
                       cert: Congruence) -> bool:
    if cert.modulus < 2 or cert.checked_prefix < 0:
        return False
    v = x
    for j in range(cert.checked_prefix):
        if j >= k_min and v == y:
            return False
        v = matrix.act(v)
    return _congruence_rules_out(x, matrix, y, k_min, cert.modulus,
                                 cert.checked_prefix)
