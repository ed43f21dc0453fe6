"""Orbit procedures for iterated free-group endomorphisms."""

import random

import pytest

from fatf.free_orbits import (
    DEFAULT_CONFIG,
    EMPTY_LOG,
    EmptyLog,
    NotInjective,
    OracleConfig,
    Progression,
    _log_from_hits,
    brcp_free,
    brp_free,
    centralizer_generators,
    fix_generators,
    philog_conj_free,
    philog_free,
    tcp_free,
    tsbrcp_free,
)
from fatf.words import Word, conjugacy_class_key, is_conjugate, substitute

from support import random_injective_type_i, random_word

X1 = Word.generator(2, 1)
X2 = Word.generator(2, 2)
SWAP = (X2, X1)
Y1 = Word.generator(1, 1)


def iterate(images, u, k):
    for _ in range(k):
        u = substitute(images, u)
    return u


def test_progression_membership():
    log = Progression(2, 3)
    assert [k for k in range(12) if log.contains(k)] == [2, 5, 8, 11]
    single = Progression(4, 0)
    assert [k for k in range(12) if single.contains(k)] == [4]
    assert not any(EMPTY_LOG.contains(k) for k in range(12))
    with pytest.raises(ValueError):
        Progression(-1, 2)


def test_log_assembly():
    assert _log_from_hits([], None, 0) == EMPTY_LOG
    assert _log_from_hits([3], None, 0) == Progression(3, 0)
    assert _log_from_hits([2], 2, 5) == Progression(2, 5)
    # tail hit at 1, cycle of length 4 entered at 3 with hits 3 and 5
    assert _log_from_hits([1, 3, 5], 3, 4) == Progression(1, 2)
    # hit at 0 outside the cycle, cycle {1, 2} hitting at 2
    assert _log_from_hits([0, 2], 1, 2) == Progression(0, 2)


def test_identity_map_membership():
    gens = (X1, X2)
    assert brp_free(gens, X1 * X2, X1 * X2).witness == 0
    answer = brp_free(gens, X1, X2)
    assert answer.is_no


def test_swap_orbits():
    assert brp_free(SWAP, X1, X2).witness == 1
    assert philog_free(SWAP, X1, X1) == Progression(0, 2)
    assert philog_free(SWAP, X1, X2) == Progression(1, 2)
    answer = brp_free(SWAP, X1, X1 * X2)
    assert answer.is_no
    assert answer.certificate[0] == "orbit is eventually periodic and never matches"
    assert philog_free(SWAP, X1, X1 * X2) == EMPTY_LOG


def test_cyclic_strategy_membership():
    collapse = (X1, X1)
    assert brp_free(collapse, X2, X1).witness == 1
    assert philog_free(collapse, X2, X1) == Progression(1, 1)
    assert philog_free(collapse, X2, X2) == Progression(0, 0)
    assert brp_free(collapse, X2, X2).witness == 0

    doubling = (Y1 * Y1,)
    assert brp_free(doubling, Y1, Y1**8).witness == 3
    assert brp_free(doubling, Y1, Y1**5).is_no
    assert brp_free(doubling, Y1, Y1**-1).is_no

    flip = (Y1**-1,)
    assert philog_free(flip, Y1, Y1) == Progression(0, 2)
    assert philog_free(flip, Y1, Y1**-1) == Progression(1, 2)


def test_cyclic_strategy_conjugacy():
    images = (X1**2, X1**-1)
    target = (X1**-4).conjugate_by(X2)
    assert brp_free(images, X2, target).is_no
    answer = brcp_free(images, X2, target)
    assert answer.witness == 3
    assert is_conjugate(iterate(images, X2, 3), target) is not None
    log = philog_conj_free(images, X2, target)
    assert log == Progression(3, 0)


def test_image_ceiling_certifies_no():
    images = (X1 * X2 * X1**-1, X2)
    target = X1.conjugate_by(X2**-1)  # x2 x1 x2^-1
    answer = brp_free(images, X1, target)
    assert answer.is_no
    assert answer.certificate[0] == "target escapes the iterated images"
    log = philog_free(images, X1, target)
    assert log == EMPTY_LOG


def test_conjugacy_class_scan():
    u = X1.conjugate_by(X2)
    assert brcp_free(SWAP, u, X2).witness == 1
    assert philog_conj_free(SWAP, u, X2) == Progression(1, 2)
    answer = brcp_free(SWAP, X1, X1 * X2)
    assert answer.is_no


def test_twisted_search():
    gens = (X1, X2)
    u = X1.conjugate_by(X2 * X1)
    found = tcp_free(gens, u, X1)
    assert found.is_yes
    z = found.witness
    assert substitute(gens, z).inverse() * u * z == X1
    assert tcp_free(gens, X1, X2).is_no

    found = tcp_free(SWAP, X1, X2)
    assert found.is_yes
    z = found.witness
    assert substitute(SWAP, z).inverse() * X1 * z == X2

    stretched = (X1**2, X2)
    assert tcp_free(stretched, X1, X1 * X2).is_no


def test_fix_generators():
    gens, exact = fix_generators((X1, X2))
    assert gens == (X1, X2) and exact

    gens, exact = fix_generators(SWAP)
    assert gens == () and not exact

    gens, exact = fix_generators((X1, X1))
    assert gens == (X1,) and exact

    gens, exact = fix_generators((X1**2, X1))
    assert gens == () and exact

    gens, exact = fix_generators((X1, X2**2))
    assert not exact
    assert len(gens) == 1 and gens[0] in (X1, X1**-1)


def test_centralizer_generators():
    assert centralizer_generators(X1**2) == (X1,)
    assert centralizer_generators(Word.identity(2)) == (X1, X2)
    assert centralizer_generators((X1**3).conjugate_by(X2)) == (X1.conjugate_by(X2),)


def test_two_sided_search():
    answer = tsbrcp_free(SWAP, X1, X2)
    assert answer.witness == (0, 1)

    images = (X1 * X2, X2)
    answer = tsbrcp_free(images, X1, X1 * X2)
    assert answer.witness == (1, 0)

    answer = tsbrcp_free(SWAP, X1, X1**2)
    assert answer.is_no

    with pytest.raises(NotInjective):
        tsbrcp_free((X1, X1), X1, X2)


def test_oracle_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(backend="exhaustive")
    with pytest.raises(ValueError):
        brp_free((X1 * X2, X2), X1, X2, OracleConfig(backend="abelian"))


def test_membership_answers_are_sound():
    rng = random.Random(421)
    config = OracleConfig(max_steps=300, max_word_len=48)
    for _ in range(150):
        images = tuple(random_word(rng, 2, 3) for _ in range(2))
        u = random_word(rng, 2, 4)
        if rng.random() < 0.5:
            v = iterate(images, u, rng.randrange(6))
        else:
            v = random_word(rng, 2, 4)
        answer = brp_free(images, u, v, config)
        if answer.is_yes:
            assert iterate(images, u, answer.witness) == v
        elif answer.is_no:
            w, hit = u, False
            for _ in range(61):
                if w == v:
                    hit = True
                    break
                if len(w) > 2000:
                    break
                w = substitute(images, w)
            assert not hit


def test_conjugacy_answers_are_sound():
    rng = random.Random(422)
    config = OracleConfig(max_steps=300, max_word_len=48)
    for _ in range(100):
        images = tuple(random_word(rng, 2, 3) for _ in range(2))
        u = random_word(rng, 2, 4)
        if rng.random() < 0.5:
            v = iterate(images, u, rng.randrange(5)).conjugate_by(random_word(rng, 2, 2))
        else:
            v = random_word(rng, 2, 4)
        answer = brcp_free(images, u, v, config)
        if answer.is_yes:
            assert is_conjugate(iterate(images, u, answer.witness), v) is not None
        elif answer.is_no:
            w, hit = u, False
            for _ in range(41):
                if conjugacy_class_key(w) == conjugacy_class_key(v):
                    hit = True
                    break
                if len(w) > 2000:
                    break
                w = substitute(images, w)
            assert not hit


def test_logset_matches_pointwise_truth():
    rng = random.Random(423)
    config = OracleConfig(max_steps=300, max_word_len=48)
    determined = 0
    for trial in range(100):
        if trial % 2 == 0:
            images = tuple(Y1 ** rng.randint(-2, 2) for _ in range(1))
            u = Y1 ** rng.randint(-3, 3)
            v = Y1 ** rng.randint(-4, 4)
        else:
            images = tuple(random_word(rng, 2, 3) for _ in range(2))
            u = random_word(rng, 2, 4)
            v = iterate(images, u, rng.randrange(5)) if rng.random() < 0.5 else random_word(rng, 2, 3)
        log = philog_free(images, u, v, config)
        if log is None:
            continue
        determined += 1
        w = u
        for k in range(81):
            assert log.contains(k) == (w == v)
            w = substitute(images, w)
            if len(w) > 3000:
                break
    assert determined > 40


def test_conjugacy_logset_matches_pointwise_truth():
    rng = random.Random(424)
    config = OracleConfig(max_steps=300, max_word_len=48)
    determined = 0
    for _ in range(60):
        images = tuple(random_word(rng, 2, 3) for _ in range(2))
        u = random_word(rng, 2, 4)
        v = iterate(images, u, rng.randrange(5)).conjugate_by(random_word(rng, 2, 2))
        log = philog_conj_free(images, u, v, config)
        if log is None:
            continue
        determined += 1
        key_v = conjugacy_class_key(v)
        w = u
        for k in range(61):
            assert log.contains(k) == (conjugacy_class_key(w) == key_v)
            w = substitute(images, w)
            if len(w) > 3000:
                break
    assert determined > 20


def test_planted_twisted_conjugators_found():
    rng = random.Random(425)
    for _ in range(60):
        images = tuple(random_word(rng, 2, 3) for _ in range(2))
        u = random_word(rng, 2, 4)
        z = random_word(rng, 2, 3)
        v = substitute(images, z).inverse() * u * z
        answer = tcp_free(images, u, v)
        assert answer.is_yes
        found = answer.witness
        assert substitute(images, found).inverse() * u * found == v


def test_planted_two_sided_pairs_found():
    rng = random.Random(426)
    config = OracleConfig(grid=16, max_word_len=2048, max_steps=300)
    solved = 0
    while solved < 60:
        endo = random_injective_type_i(rng, 2, 1)
        images = endo.images
        if sum(len(w) for w in images) > 8:
            continue
        solved += 1
        u = random_word(rng, 2, 4)
        k = rng.randrange(4)
        v = iterate(images, u, k).conjugate_by(random_word(rng, 2, 2))
        answer = tsbrcp_free(images, u, v, config)
        assert answer.is_yes
        r, s = answer.witness
        assert r + s <= k
        assert is_conjugate(iterate(images, u, r), iterate(images, v, s)) is not None


def test_fixed_words_stay_fixed():
    rng = random.Random(427)
    for _ in range(40):
        images = tuple(random_word(rng, 2, 3) for _ in range(2))
        gens, exact = fix_generators(images)
        for g in gens:
            assert substitute(images, g) == g
        assert isinstance(exact, bool)
