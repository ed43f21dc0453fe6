"""Iterated-endomorphism decisions on Fn x Zm.

Given an endomorphism Phi of G = Fn x Zm and elements g, h, these
procedures answer reachability questions about the forward orbit of g:

  brp_fatf      least k with (g)Phi^k == h
  brcp_fatf     least k with (g)Phi^k conjugate to h
  philog_fatf   the full set of such k, as an arithmetic progression
  tcp_fatf      a twisted conjugator z with (z)Phi^-1 g z == h
  tsbrcp_fatf   least pair (r, s) with (g)Phi^r conjugate to (h)Phi^s

Each splits into a free-group question (handled by the oracles in
free_orbits) and an integer orbit question on the abelian coordinates
(handled by orbit / intlinalg).  The seam is exact: along the free
hit progression the free part is pinned to one conjugacy class, so
its abelianization is constant and the abelian part moves by a fixed
affine map whose orbit problem is decidable or honestly unknown.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .elements import FatfElement, conjugate_in_fatf
from .endos import (
    Endomorphism,
    TypeIEndo,
    TypeIIEndo,
    abelian_power_data,
    apply,
    is_injective,
    type_ii_matrices,
)
from .free_orbits import (
    DEFAULT_CONFIG,
    EMPTY_LOG,
    EmptyLog,
    LogSet,
    NotInjective,
    OracleConfig,
    Progression,
    brcp_free,
    brp_free,
    centralizer_generators,
    class_orbit_data,
    conjugate_power_index,
    fix_generators,
    philog_conj_free,
    philog_free,
    tcp_free,
    tsbrcp_free,
)
from .intlinalg import (
    AffineMap,
    IntMatrix,
    LatticeCoset,
    Vector,
    coset_meet,
    dot,
    solve_linear,
    stack,
    vec,
    vec_add,
    vec_sub,
)
from .orbit import (
    OrbitNo,
    OrbitUnknown,
    OrbitYes,
    solve_affine_orbit,
    solve_linear_orbit,
    solve_return_period,
)
from .verdict import Decision, no, unknown, yes
from .words import Word, power_index


def _check_instance(endo: Endomorphism, *elements: FatfElement) -> None:
    for g in elements:
        if g.signature != endo.signature:
            raise ValueError("element signature does not match the endomorphism")


class _AbelianFlow:
    """Abelian parts of (g)Phi^k for every k, without word arithmetic.

    Runs the coupled recurrence a' = aQ + ubar P, ubar' = ubar A with
    A the abelianized free part, extending the cached prefix on demand.
    """

    def __init__(self, endo: TypeIEndo, g: FatfElement) -> None:
        self.q = endo.q
        self.p = endo.p
        self.ab_map = endo.abelianized()
        self.values = [vec(g.abelian)]
        self.ubars = [vec(g.word.abelianization())]

    def at(self, k: int) -> Vector:
        while len(self.values) <= k:
            a, ub = self.values[-1], self.ubars[-1]
            self.values.append(vec_add(self.q.act(a), self.p.act(ub)))
            self.ubars.append(self.ab_map.act(ub))
        return self.values[k]

    def ubar_at(self, k: int) -> Vector:
        self.at(k)
        return self.ubars[k]


# -- one-sided reachability --------------------------------------------------


def brp_fatf(endo: Endomorphism, g: FatfElement, h: FatfElement,
             config: OracleConfig = DEFAULT_CONFIG) -> Decision:
    """Least k >= 0 with (g)Phi^k == h."""
    return _reach_core(endo, g, h, config, conjugacy=False, k_min=0)


def brcp_fatf(endo: Endomorphism, g: FatfElement, h: FatfElement,
              config: OracleConfig = DEFAULT_CONFIG) -> Decision:
    """Least k >= 0 with (g)Phi^k conjugate to h."""
    return _reach_core(endo, g, h, config, conjugacy=True, k_min=0)


def _reach_core(endo: Endomorphism, g: FatfElement, h: FatfElement,
                config: OracleConfig, conjugacy: bool, k_min: int) -> Decision:
    _check_instance(endo, g, h)
    if isinstance(endo, TypeIIEndo):
        return _reach_type_ii(endo, g, h, config, conjugacy, k_min)
    if k_min == 0:
        if conjugacy:
            if conjugate_in_fatf(g, h) is not None:
                return yes(0)
        elif g == h:
            return yes(0)

    u, v = g.word, h.word
    log = (philog_conj_free if conjugacy else philog_free)(endo.images, u, v, config)
    if log is None:
        return _reach_after_free_gap(endo, g, h, config, conjugacy, k_min)
    if isinstance(log, EmptyLog):
        reason = "no iterate has a conjugate free part" if conjugacy \
            else "no iterate has a matching free part"
        return no(reason)

    # The free parts match exactly at k0 + lam * period.  At each such
    # index the free part lies in the conjugacy class of v, so its
    # abelianization equals vbar and the abelian coordinates move by
    # the same affine step from one hit to the next.
    k0, period = log.start, log.period
    flow = _AbelianFlow(endo, g)
    base = flow.at(k0)
    if period == 0:
        if k0 >= k_min and base == vec(h.abelian):
            return yes(k0)
        return no(("the single free hit fails the abelian part", k0))
    qp, pp = abelian_power_data(endo, period)
    step = AffineMap(qp, pp.act(v.abelianization()))
    lam_min = 0 if k0 >= k_min else -((k0 - k_min) // period)
    answer = solve_affine_orbit(base, step, h.abelian, k_min=lam_min,
                                max_steps=config.max_steps)
    if isinstance(answer, OrbitYes):
        return yes(k0 + answer.k * period)
    if isinstance(answer, OrbitNo):
        return no(("the abelian part misses at every free hit",
                   answer.certificate))
    return unknown(
        f"abelian orbit along the free hits undecided within {answer.bound_used} steps")


def _reach_after_free_gap(endo: TypeIEndo, g: FatfElement, h: FatfElement,
                          config: OracleConfig, conjugacy: bool,
                          k_min: int) -> Decision:
    """Fallback when the free hit set could not be pinned down.

    The one-shot oracle may still certify emptiness, or produce the
    least free hit; if the abelian part matches there the combined
    answer is settled anyway.
    """
    if k_min > 0:
        return unknown("the free hit set could not be determined")
    oracle = brcp_free if conjugacy else brp_free
    fallback = oracle(endo.images, g.word, h.word, config)
    if fallback.is_no:
        return no(("free parts never meet", fallback.certificate))
    if fallback.is_yes:
        k = fallback.witness
        if _AbelianFlow(endo, g).at(k) == vec(h.abelian):
            return yes(k)
        return unknown(
            "the first free hit fails the abelian part and later hits are undetermined")
    return unknown(fallback.taint or "the free hit set could not be determined")


def _reach_type_ii(endo: TypeIIEndo, g: FatfElement, h: FatfElement,
                   config: OracleConfig, conjugacy: bool, k_min: int) -> Decision:
    """Reachability under a type II map via the coordinate matrices.

    Every image w^e t^a is determined by (e, a), and (g)Phi^k has
    coordinates (ubar, a) S T^(k-1) for k >= 1, so the question drops
    to a linear orbit in Z^(1+m) once the target is written in the
    same coordinates.
    """
    if k_min == 0:
        if conjugacy:
            if conjugate_in_fatf(g, h) is not None:
                return yes(0)
        elif g == h:
            return yes(0)
    mats = type_ii_matrices(endo)
    if conjugacy:
        exponent = conjugate_power_index(h.word, mats.basis_word)
        miss = "the target free part is conjugate to no power of the base word"
    else:
        exponent = power_index(h.word, mats.basis_word)
        miss = "the target free part is not a power of the base word"
    if exponent is None:
        return no(miss)
    start = mats.s_matrix.act(vec(g.word.abelianization()) + vec(g.abelian))
    target = (exponent,) + vec(h.abelian)
    answer = solve_linear_orbit(start, mats.t_matrix, target,
                                k_min=max(0, k_min - 1),
                                max_steps=config.max_steps)
    if isinstance(answer, OrbitYes):
        return yes(answer.k + 1)
    if isinstance(answer, OrbitNo):
        return no(("the exponent-abelian orbit never matches", answer.certificate))
    return unknown(
        f"exponent-abelian orbit undecided within {answer.bound_used} steps")


# -- full hit sets -----------------------------------------------------------


def philog_fatf(endo: Endomorphism, g: FatfElement, h: FatfElement,
                config: OracleConfig = DEFAULT_CONFIG,
                ) -> tuple[Optional[LogSet], Optional[str]]:
    """The set {k : (g)Phi^k == h}, or None with the reason.

    Two hits k0 < k1 force (h)Phi^(k1-k0) == h, and conversely every
    return of h extends a hit, so the hit set is k0 plus all multiples
    of the least return period of h (empty or a singleton when h never
    returns).  Both pieces reuse the reachability core.
    """
    return _log_core(endo, g, h, config, conjugacy=False)


def philog_conj_fatf(endo: Endomorphism, g: FatfElement, h: FatfElement,
                     config: OracleConfig = DEFAULT_CONFIG,
                     ) -> tuple[Optional[LogSet], Optional[str]]:
    """The set {k : (g)Phi^k conjugate to h}, or None with the reason."""
    return _log_core(endo, g, h, config, conjugacy=True)


def _log_core(endo: Endomorphism, g: FatfElement, h: FatfElement,
              config: OracleConfig, conjugacy: bool,
              ) -> tuple[Optional[LogSet], Optional[str]]:
    first = _reach_core(endo, g, h, config, conjugacy, k_min=0)
    if first.is_no:
        return EMPTY_LOG, None
    if first.is_unknown:
        return None, first.taint
    k0 = first.witness
    period, taint = _return_period(endo, h, config, conjugacy)
    if period is None:
        return None, (f"first hit at {k0}, but the return period of the "
                      f"target is undetermined: {taint}")
    return Progression(k0, period), None


def _return_period(endo: Endomorphism, h: FatfElement, config: OracleConfig,
                   conjugacy: bool) -> tuple[Optional[int], Optional[str]]:
    """Least p >= 1 with (h)Phi^p equal (or conjugate) to h, 0 when none.

    Returning to the start is much more rigid than general reachability:
    the free part must come back first, pinning the exponent to the
    multiples of the free return period, and along those the abelian
    coordinate moves by one affine map.  Landing back on the start
    forces that map to have finite order on the orbit lattice, which
    solve_return_period decides outright.
    """
    if isinstance(endo, TypeIIEndo):
        mats = type_ii_matrices(endo)
        index = (conjugate_power_index if conjugacy else power_index)(
            h.word, mats.basis_word)
        if index is None:
            return 0, None
        lam = solve_return_period((index,) + vec(h.abelian), mats.t_matrix)
        return (lam if lam is not None else 0), None
    log = (philog_conj_free if conjugacy else philog_free)(
        endo.images, h.word, h.word, config)
    if log is None:
        return None, "the free return set could not be determined"
    if isinstance(log, EmptyLog) or log.period == 0:
        return 0, None
    p = log.period
    qp, pp = abelian_power_data(endo, p)
    step = AffineMap(qp, pp.act(h.word.abelianization()))
    lam = solve_return_period(vec(h.abelian) + (1,), step.homogenize())
    return (lam * p if lam is not None else 0), None


# -- twisted conjugacy -------------------------------------------------------


def tcp_fatf(endo: Endomorphism, g: FatfElement, h: FatfElement,
             config: OracleConfig = DEFAULT_CONFIG) -> Decision:
    """A twisted conjugator z with ((z)Phi)^-1 g z == h, or a refusal.

    Splitting z = (z_w, c), the free part asks for a twisted conjugator
    of the free parts, and the abelian part asks for an integral
    solution of zbar P + c (Q - I) = a - b.
    """
    _check_instance(endo, g, h)
    if isinstance(endo, TypeIIEndo):
        return _tcp_type_ii(endo, g, h)
    return _tcp_type_i(endo, g, h, config)


def _tcp_type_i(endo: TypeIEndo, g: FatfElement, h: FatfElement,
                config: OracleConfig) -> Decision:
    n = len(endo.images)
    m = endo.q.n_rows
    gap = vec_sub(g.abelian, h.abelian)
    q_shift = endo.q - IntMatrix.identity(m)

    # Unrestricted abelian screen: if no (zbar, c) at all solves the
    # abelian equation, no twisted conjugator can exist.
    if solve_linear(stack(endo.p, q_shift), gap) is None:
        return no("the abelian twisted equation has no integral solution")

    free = tcp_free(endo.images, g.word, h.word, config)
    if free.is_no:
        return no(("free parts are not twisted conjugate", free.certificate))
    if free.is_unknown:
        return unknown(free.taint)
    z0: Word = free.witness

    # Every free solution is f * z0 with f fixed by x -> u^-1 (x)phi u,
    # so the reachable abelianizations form a coset of the fixed
    # subgroup's abelianization lattice.
    if all(image == Word.generator(n, i + 1) for i, image in enumerate(endo.images)):
        fixed, exact = centralizer_generators(g.word), True
    else:
        twisted = tuple(
            g.word.inverse() * image * g.word for image in endo.images)
        fixed, exact = fix_generators(twisted, config)

    fixed_ab = [vec(f.abelianization()) for f in fixed]
    source = LatticeCoset(vec(z0.abelianization()), tuple(fixed_ab))
    target = LatticeCoset(gap, q_shift.rows)
    zbar = coset_meet(source, endo.p, target)
    if zbar is None:
        if exact:
            return no("no abelianized free solution satisfies the abelian equation")
        return unknown(
            "the fixed subgroup is only partially known, so the abelian "
            "screen cannot be completed")

    basis = (IntMatrix.from_rows([list(r) for r in fixed_ab], n)
             if fixed_ab else IntMatrix.zeros(0, n))
    coeffs_sol = solve_linear(basis, vec_sub(zbar, vec(z0.abelianization())))
    assert coeffs_sol is not None, "coset_meet returned a vector outside the coset"
    coeffs = coeffs_sol[0]
    f_word = Word.identity(n)
    for f, c in zip(fixed, coeffs):
        f_word = f_word * f ** c
    z_word = f_word * z0

    c_sol = solve_linear(q_shift, vec_sub(gap, endo.p.act(zbar)))
    assert c_sol is not None, "coset_meet target row must be consistent"
    witness = FatfElement(z_word, c_sol[0])
    image = apply(endo, witness)
    assert image.inverse() * g * witness == h, "twisted witness failed to verify"
    return yes(witness)


def _tcp_type_ii(endo: TypeIIEndo, g: FatfElement, h: FatfElement) -> Decision:
    """Exact twisted conjugacy for type II maps.

    (z)Phi has free part w^E with E = c.r + zbar.s, which forces
    z_w = u^-1 w^E v; eliminating zbar leaves one linear system over
    the unknowns (E, c), so the answer is always certified.
    """
    u, v = g.word, h.word
    ubar, vbar = vec(u.abelianization()), vec(v.abelianization())
    wbar = vec(endo.w.abelianization())
    m = endo.q.n_rows
    diff = vec_sub(vbar, ubar)

    row_e = (1 - dot(wbar, endo.s),) + tuple(-x for x in endo.p.act(wbar))
    c_rows = [(-endo.r[i],) + vec_sub(IntMatrix.identity(m).rows[i], endo.q.rows[i])
              for i in range(m)]
    system = IntMatrix.from_rows([list(row_e)] + [list(r) for r in c_rows], 1 + m)
    rhs = (dot(diff, endo.s),) + vec_add(
        vec_sub(vec(h.abelian), vec(g.abelian)), endo.p.act(diff))

    solution = solve_linear(system, rhs)
    if solution is None:
        return no("the twisted equations have no integral solution")
    e_val, c_val = solution[0][0], solution[0][1:]
    z_word = u.inverse() * endo.w ** e_val * v
    witness = FatfElement(z_word, c_val)
    image = apply(endo, witness)
    assert image.inverse() * g * witness == h, "twisted witness failed to verify"
    return yes(witness)


# -- two-sided conjugacy search ----------------------------------------------


def tsbrcp_fatf(endo: Endomorphism, g: FatfElement, h: FatfElement,
                config: OracleConfig = DEFAULT_CONFIG) -> Decision:
    """Least (r, s) by (r+s, then r) with (g)Phi^r conjugate to (h)Phi^s.

    Injectivity is required: it gives the descent step that reduces an
    arbitrary solution to one on the search grid or in one of the two
    periodic families, which is what makes the No answers certified.
    """
    _check_instance(endo, g, h)
    if not is_injective(endo):
        raise NotInjective("the two-sided search needs an injective endomorphism")
    assert isinstance(endo, TypeIEndo)  # type II maps are never injective

    free = tsbrcp_free(endo.images, g.word, h.word, config)
    if free.is_no:
        return no(("free conjugacy-class orbits never meet", free.certificate))

    orbit_u = class_orbit_data(endo.images, g.word, config)
    orbit_v = class_orbit_data(endo.images, h.word, config)
    flow_g = _AbelianFlow(endo, g)
    flow_h = _AbelianFlow(endo, h)

    if orbit_u is None or orbit_v is None:
        return _two_sided_prefix_sweep(orbit_u, orbit_v, endo, g, h,
                                       flow_g, flow_h, config)

    keys_u, eu, pu = orbit_u
    keys_v, ev, pv = orbit_v
    ku = _key_fold(keys_u, eu, pu)
    kv = _key_fold(keys_v, ev, pv)

    base = _least_free_pair(keys_u, eu, pu, keys_v, ev, pv)
    if base is None:
        return no(("free conjugacy-class orbits never meet",
                   (eu, pu), (ev, pv)))
    p0, q0 = base

    # Rebase the anchor pair diagonally until both class orbits are
    # inside their cycles.  Coverage: any solution (r, s) with r <= p*
    # or s <= q* pushes diagonally onto one of the two grid lines or,
    # past their ends, onto an index congruent to the line's endpoint
    # modulo the cycle period, which the affine family scans.  Any
    # solution with r > p* and s > q* descends diagonally: both class
    # orbits are past their entries, conjugate free parts put both
    # cycles through a shared state, and two cycles of one map sharing
    # a state coincide, so the free parts stay conjugate step by step
    # and injectivity of Q pulls the abelian equality down as well.
    delta = max(eu - p0, ev - q0, 0)
    ps, qs = p0 + delta, q0 + delta

    candidates = []
    for k in range(qs + 1):
        if ku(ps) == kv(k) and flow_g.at(ps) == flow_h.at(k):
            candidates.append((ps, k))
    for k in range(ps + 1):
        if ku(k) == kv(qs) and flow_g.at(k) == flow_h.at(qs):
            candidates.append((k, qs))

    incomplete = None
    qk2, pk2 = abelian_power_data(endo, pv)
    step_v = AffineMap(qk2, pk2.act(flow_h.ubar_at(qs)))
    family = solve_affine_orbit(flow_h.at(qs), step_v, flow_g.at(ps),
                                k_min=1, max_steps=config.max_steps)
    if isinstance(family, OrbitYes):
        candidates.append((ps, qs + pv * family.k))
    elif isinstance(family, OrbitUnknown):
        incomplete = "the family along the second orbit"

    qk1, pk1 = abelian_power_data(endo, pu)
    step_u = AffineMap(qk1, pk1.act(flow_g.ubar_at(ps)))
    family = solve_affine_orbit(flow_g.at(ps), step_u, flow_h.at(qs),
                                k_min=1, max_steps=config.max_steps)
    if isinstance(family, OrbitYes):
        candidates.append((ps + pu * family.k, qs))
    elif isinstance(family, OrbitUnknown):
        incomplete = "the family along the first orbit"

    if candidates:
        best = min(candidates, key=lambda rs: (rs[0] + rs[1], rs[0]))
        return _minimal_two_sided(best, ku, kv, flow_g, flow_h, config)
    if incomplete is None:
        return no(("the grid and both periodic families are exhaustive and empty",
                   (eu, pu), (ev, pv)))
    return unknown(f"{incomplete} outgrew the step bound")


def _key_fold(keys, entry: int, period: int):
    def at(k: int):
        if k < len(keys):
            return keys[k]
        return keys[entry + (k - entry) % period]
    return at


def _least_free_pair(keys_u, eu: int, pu: int, keys_v, ev: int, pv: int,
                     ) -> Optional[tuple[int, int]]:
    """Least (r, s) by (r+s, then r) with conjugate free parts.

    Prefix states of an eventually periodic sequence never recur and
    cycle states first appear inside the cycle window, so the first
    occurrence among indices below entry + period is the minimum for
    each class; minimizing r and s independently per shared class is
    then exact.
    """
    first_u: dict = {}
    for r in range(eu + pu):
        if keys_u[r] not in first_u:
            first_u[keys_u[r]] = r
    best = None
    for s in range(ev + pv):
        r = first_u.get(keys_v[s])
        if r is not None:
            cand = (r + s, r)
            if best is None or cand < best:
                best = cand
    if best is None:
        return None
    return best[1], best[0] - best[1]


def _minimal_two_sided(best, ku, kv, flow_g: _AbelianFlow, flow_h: _AbelianFlow,
                       config: OracleConfig) -> Decision:
    """Exhaustive rescan below a found pair, in (r+s, then r) order."""
    t0, r0 = best[0] + best[1], best[0]
    cap = 2 * config.grid + 2
    if t0 > cap:
        return yes(best, certificate=(
            "a smaller sporadic pair below the found total was not ruled out"))
    for total in range(t0 + 1):
        for r in range(total + 1):
            if (total, r) >= (t0, r0):
                return yes(best)
            s = total - r
            if ku(r) == kv(s) and flow_g.at(r) == flow_h.at(s):
                return yes((r, s))
    return yes(best)


def _two_sided_prefix_sweep(orbit_u, orbit_v, endo: TypeIEndo,
                            g: FatfElement, h: FatfElement,
                            flow_g: _AbelianFlow, flow_h: _AbelianFlow,
                            config: OracleConfig) -> Decision:
    """Best-effort sweep when a class orbit outgrew the scan bounds.

    Only the computed key prefixes can be compared, so a hit is still a
    hit (flagged when unscanned smaller pairs remain), but absence only
    yields Unknown.
    """
    prefix_u = orbit_u[0] if orbit_u else _key_prefix(endo.images, g.word, config)
    prefix_v = orbit_v[0] if orbit_v else _key_prefix(endo.images, h.word, config)
    gap_seen = False
    for total in range(len(prefix_u) + len(prefix_v) - 1):
        for r in range(total + 1):
            s = total - r
            if r >= len(prefix_u) or s >= len(prefix_v):
                gap_seen = True
                continue
            if prefix_u[r] == prefix_v[s] and flow_g.at(r) == flow_h.at(s):
                if gap_seen:
                    return yes((r, s), certificate=(
                        "least matching pair inside the scanned region"))
                return yes((r, s))
    return unknown("a class orbit outgrew the scan bounds before any match")


def _key_prefix(images: Sequence[Word], w: Word, config: OracleConfig):
    from .words import conjugacy_class_key, substitute

    keys = []
    current = w
    for _ in range(min(config.max_steps, 2 * config.grid + 2)):
        key = conjugacy_class_key(current)
        if len(key) > config.max_word_len:
            break
        keys.append(key)
        current = substitute(images, current)
    return tuple(keys)
