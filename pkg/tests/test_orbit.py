"""Orbit decisions under iterated integer matrices, with certificates."""

import random

from fatf.intlinalg import AffineMap, IntMatrix
from fatf.orbit import (
    Congruence,
    Cycle,
    Escape,
    Growth,
    OrbitNo,
    OrbitUnknown,
    OrbitYes,
    brute_force_orbit,
    max_finite_order,
    solve_affine_orbit,
    solve_linear_orbit,
    solve_return_period,
    verify_affine_orbit,
    verify_linear_orbit,
)

from support import random_matrix, random_vector

FIB = IntMatrix.from_rows([[0, 1], [1, 1]])
ROT = IntMatrix.from_rows([[0, 1], [-1, 0]])


class TestLinear:
    def test_fibonacci_reaches_target(self):
        answer = solve_linear_orbit((1, 0), FIB, (5, 8))
        assert answer == OrbitYes(6)

    def test_rotation_cycle_misses(self):
        answer = solve_linear_orbit((1, 0), ROT, (2, 0))
        assert isinstance(answer, OrbitNo)
        assert isinstance(answer.certificate, (Cycle, Congruence))
        assert verify_linear_orbit((1, 0), ROT, (2, 0), answer)

    def test_reflexive(self):
        answer = solve_linear_orbit((3, -4), FIB, (3, -4))
        assert answer == OrbitYes(0)

    def test_growth_certificate(self):
        answer = solve_linear_orbit((1,), IntMatrix.from_rows([[2]]), (3,))
        assert isinstance(answer, OrbitNo)
        assert verify_linear_orbit((1,), IntMatrix.from_rows([[2]]), (3,), answer)

    def test_k_min_skips_early_hits(self):
        answer = solve_linear_orbit((1, 0), ROT, (1, 0), k_min=1)
        assert answer == OrbitYes(4)

    def test_k_min_lifts_cycle_hits(self):
        answer = solve_linear_orbit((1, 0), ROT, (0, 1), k_min=6)
        assert answer == OrbitYes(9)
        assert verify_linear_orbit((1, 0), ROT, (0, 1), answer, k_min=6)

    def test_empty_dimension(self):
        answer = solve_linear_orbit((), IntMatrix.from_rows([], 0), (), k_min=3)
        assert answer == OrbitYes(3)

    def test_deterministic(self):
        a1 = solve_linear_orbit((2, 1), FIB, (7, 7))
        a2 = solve_linear_orbit((2, 1), FIB, (7, 7))
        assert a1 == a2


class TestAffine:
    def test_counting(self):
        t = AffineMap(IntMatrix.from_rows([[1]]), (1,))
        assert solve_affine_orbit((0,), t, (7,)) == OrbitYes(7)

    def test_parity_obstruction(self):
        t = AffineMap(IntMatrix.from_rows([[1]]), (2,))
        answer = solve_affine_orbit((0,), t, (5,))
        assert isinstance(answer, OrbitNo)
        assert answer.certificate == Congruence(2, 0)
        assert verify_affine_orbit((0,), t, (5,), answer)

    def test_identity_fixed_point(self):
        t = AffineMap(IntMatrix.identity(2), (0, 0))
        answer = solve_affine_orbit((1, 1), t, (2, 2))
        assert isinstance(answer, OrbitNo)
        assert verify_affine_orbit((1, 1), t, (2, 2), answer)


class TestBruteForce:
    def test_fibonacci(self):
        assert brute_force_orbit((1, 0), FIB, (5, 8), 10) == 6

    def test_reflexive(self):
        assert brute_force_orbit((4, 2), FIB, (4, 2), 10) == 0

    def test_miss(self):
        assert brute_force_orbit((1, 0), ROT, (2, 0), 100) is None


class TestVerification:
    def test_tampered_yes_rejected(self):
        assert not verify_linear_orbit((1, 0), FIB, (5, 8), OrbitYes(5))

    def test_tampered_cycle_rejected(self):
        assert not verify_linear_orbit((1, 0), ROT, (0, 1), OrbitNo(Cycle(0, 4)))
        assert not verify_linear_orbit((1, 0), ROT, (2, 0), OrbitNo(Cycle(0, 3)))

    def test_tampered_growth_rejected(self):
        two = IntMatrix.from_rows([[2]])
        assert not verify_linear_orbit((1,), two, (4,), OrbitNo(Growth(3, 60)))
        assert not verify_linear_orbit((1, 0), ROT, (2, 0), OrbitNo(Growth(1, 1)))

    def test_tampered_congruence_rejected(self):
        t = AffineMap(IntMatrix.from_rows([[1]]), (2,))
        assert not verify_affine_orbit((0,), t, (4,), OrbitNo(Congruence(2, 0)))

    def test_yes_below_k_min_rejected(self):
        assert not verify_linear_orbit((1, 0), ROT, (1, 0), OrbitYes(0), k_min=1)


class TestDifferential:
    def test_random_instances_agree_with_brute_force(self):
        rng = random.Random(101)
        unknowns = 0
        for _ in range(250):
            d = rng.randrange(1, 4)
            m = random_matrix(rng, d, d, 2)
            x = random_vector(rng, d, 8)
            y = random_vector(rng, d, 8)
            answer = solve_linear_orbit(x, m, y, max_steps=600)
            reference = brute_force_orbit(x, m, y, 200)
            assert verify_linear_orbit(x, m, y, answer)
            if isinstance(answer, OrbitYes):
                assert reference == answer.k
            elif isinstance(answer, OrbitNo):
                assert reference is None
            else:
                unknowns += 1
                assert reference is None or reference > 600
        assert unknowns < 75

    def test_periodic_orbits_never_unknown(self):
        rng = random.Random(103)
        signed_perms = [
            IntMatrix.from_rows([[0, 1], [1, 0]]),
            IntMatrix.from_rows([[0, -1], [1, 0]]),
            IntMatrix.from_rows([[-1, 0], [0, 1]]),
            IntMatrix.from_rows([[0, 1], [-1, 0]]),
        ]
        for _ in range(80):
            m = rng.choice(signed_perms)
            x = random_vector(rng, 2, 5)
            y = random_vector(rng, 2, 5)
            answer = solve_linear_orbit(x, m, y)
            assert not isinstance(answer, OrbitUnknown)
            assert verify_linear_orbit(x, m, y, answer)


class TestOneDimensionalAffine:
    def test_constant_drift_is_exact(self):
        step = AffineMap(IntMatrix.from_rows([[1]], 1), (3,))
        assert solve_affine_orbit((1,), step, (13,)) == OrbitYes(4)
        missed = solve_affine_orbit((1,), step, (12,))
        assert isinstance(missed, OrbitNo)
        assert isinstance(missed.certificate, Congruence)
        behind = solve_affine_orbit((1,), step, (-2,))
        assert isinstance(behind, OrbitNo)
        assert isinstance(behind.certificate, Escape)
        assert verify_affine_orbit((1,), step, (-2,), behind)

    def test_geometric_escape(self):
        step = AffineMap(IntMatrix.from_rows([[2]], 1), (1,))
        # orbit 0, 1, 3, 7, 15, ...
        assert solve_affine_orbit((0,), step, (15,)) == OrbitYes(4)
        answer = solve_affine_orbit((0,), step, (12,))
        assert isinstance(answer, OrbitNo)
        assert isinstance(answer.certificate, Escape)
        assert verify_affine_orbit((0,), step, (12,), answer)

    def test_k_min_shifts_drift_answers(self):
        step = AffineMap(IntMatrix.from_rows([[1]], 1), (2,))
        assert solve_affine_orbit((0,), step, (4,), k_min=2) == OrbitYes(2)
        late = solve_affine_orbit((0,), step, (4,), k_min=3)
        assert isinstance(late, OrbitNo)
        assert isinstance(late.certificate, Escape)
        assert verify_affine_orbit((0,), step, (4,), late, k_min=3)

    def test_drift_differential(self):
        rng = random.Random(177)
        for _ in range(200):
            q = rng.choice((-3, -2, -1, 0, 1, 2, 3))
            b = rng.randint(-4, 4)
            x = rng.randint(-10, 10)
            y = rng.randint(-30, 30)
            step = AffineMap(IntMatrix.from_rows([[q]], 1), (b,))
            answer = solve_affine_orbit((x,), step, (y,), max_steps=500)
            assert verify_affine_orbit((x,), step, (y,), answer)
            v, hit = x, None
            for k in range(60):
                if v == y:
                    hit = k
                    break
                v = v * q + b
            if isinstance(answer, OrbitYes):
                assert answer.k == hit
            elif isinstance(answer, OrbitNo):
                assert hit is None


class TestReturnPeriods:
    def test_torsion_order_bounds(self):
        assert [max_finite_order(d) for d in range(1, 7)] == [2, 6, 6, 12,
                                                              12, 30]

    def test_rotation_returns_in_four(self):
        assert solve_return_period((1, 0), ROT) == 4

    def test_fixed_point_returns_immediately(self):
        shear = IntMatrix.from_rows([[1, 1], [0, 1]])
        assert solve_return_period((0, 1), shear) == 1

    def test_drifting_point_never_returns(self):
        shear = IntMatrix.from_rows([[1, 1], [0, 1]])
        assert solve_return_period((1, 0), shear) is None
        assert solve_return_period((1,), IntMatrix.from_rows([[2]])) is None

    def test_signed_three_cycle_has_order_six(self):
        matrix = IntMatrix.from_rows([[0, -1, 0], [0, 0, 1], [1, 0, 0]])
        assert solve_return_period((1, 0, 0), matrix) == 6

    def test_matches_long_iteration(self):
        rng = random.Random(271)
        for _ in range(300):
            d = rng.randint(1, 3)
            matrix = random_matrix(rng, d, d, 2)
            x = random_vector(rng, d, 2)
            claimed = solve_return_period(x, matrix)
            v = matrix.act(x)
            found = None
            for k in range(1, 301):
                if v == x:
                    found = k
                    break
                v = matrix.act(v)
            if found is not None:
                assert claimed == found, (matrix, x)
            elif claimed is not None:
                assert claimed > 300, (matrix, x)
