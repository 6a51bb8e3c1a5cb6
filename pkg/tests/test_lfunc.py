import math
from fractions import Fraction

import mpmath
import pytest

from bqfmoments.arith import is_squarefree, omega
from bqfmoments.forms import is_fundamental
from bqfmoments.lfunc import (
    EULER_GAMMA,
    ZETA_PRIME_2,
    L_one,
    L_one_direct,
    L_one_prime,
    L_value,
    alpha,
    alpha_two_adic,
    constants_bundle,
    kronecker,
    leading_constant,
    mueller_A,
    mueller_constant,
    odd_ideal_constant,
    primitive_discriminant,
)

mpmath.mp.dps = 30


def oracle_L_prime_one(D):
    """L'(1, chi_D) = -(1/k) sum_a chi(a) [gamma_1(a/k) - log k psi(a/k)]."""
    k = abs(D)
    total = mpmath.mpf(0)
    for a in range(1, k + 1):
        c = kronecker(D, a)
        if c:
            q = mpmath.mpf(a) / k
            total += c * (mpmath.stieltjes(1, q) - mpmath.log(k) * mpmath.digamma(q))
    return float(-total / k)


def oracle_L(s, D):
    k = abs(D)
    return float(sum(kronecker(D, a) * mpmath.zeta(s, mpmath.mpf(a) / k) for a in range(1, k + 1)) / mpmath.mpf(k) ** s)


def test_frozen_constants():
    assert abs(EULER_GAMMA - float(mpmath.euler)) < 1e-15
    assert abs(ZETA_PRIME_2 - float(mpmath.zeta(2, derivative=1))) < 1e-15


@pytest.mark.parametrize("D, n, v", [(-4, 3, -1), (-7, 3, -1), (-7, 2, 1), (-3, 2, -1), (-20, 1, 1), (-20, 5, 0)])
def test_kronecker_examples(D, n, v):
    assert kronecker(D, n) == v


def test_kronecker_multiplicative_and_periodic():
    for D in (-3, -4, -7, -8, -20, -84, -188, -15, -28):
        k = abs(4 * D)
        for n in range(1, 3000):
            assert kronecker(D, n) == kronecker(D, n + k)
            for m in (2, 3, 5, 7, 11):
                assert kronecker(D, n * m) == kronecker(D, n) * kronecker(D, m)


@pytest.mark.parametrize("D, v", [(-4, math.pi / 4), (-7, math.pi / math.sqrt(7)), (-20, math.pi / math.sqrt(5))])
def test_L_one_examples(D, v):
    assert abs(L_one(D) - v) < 1e-12


def test_L_one_dual_evaluation():
    for m in range(3, 501):
        D = -m
        if D % 4 in (0, 1) and is_fundamental(D):
            assert abs(L_one(D) - L_one_direct(D)) <= 1e-8, D


@pytest.mark.parametrize("D", [-3, -4, -20, -28, -47, -84, -188])
def test_L_value_against_hurwitz(D):
    for s in (0.7, 1.3, 2.0):
        assert abs(L_value(s, D) - oracle_L(s, D)) < 1e-10


@pytest.mark.parametrize("D", [-3, -4, -7, -12, -20, -28, -60, -188])
def test_L_prime_against_oracle(D):
    value, err = L_one_prime(D)
    assert abs(value - oracle_L_prime_one(D)) < 1e-6
    assert err < 1e-6
    halved, _ = L_one_prime(D, 5e-4)
    assert abs(halved - value) <= max(err, 1e-12) * 10


@pytest.mark.parametrize("N, C", [(1, 4), (3, 2), (7, 1), (2, 2), (5, Fraction(4, 3))])
def test_leading_constant(N, C):
    assert leading_constant(N) == C


def test_leading_constant_rejects_nonsquarefree():
    with pytest.raises(ValueError):
        leading_constant(4)


def test_mueller_examples():
    assert mueller_A(2) == 1 and mueller_A(4) == 2 and mueller_A(12) == 4
    assert mueller_constant(((2, 0), (0, 2))) == 4
    assert mueller_constant(((2, 0), (0, 6))) == 2
    with pytest.raises(ValueError):
        mueller_constant(((2, 1), (1, 1)))
    with pytest.raises(ValueError):
        mueller_constant(((2, 2), (2, 2)))


def test_quadratic_constant_identity_sample():
    for N in range(1, 2000):
        if is_squarefree(N):
            assert mueller_constant(((2, 0), (0, 2 * N))) == leading_constant(N)
            assert mueller_A(4 * N) == 2 ** omega(2 * N)
            if N % 2:
                assert mueller_A(4 * N) == 2 ** (omega(N) + 1)
    # A(8) = 2, so the odd-N shape 2^(t+1) does not carry over to N = 2
    assert mueller_A(8) == 2


def test_alpha_one_assembled_from_oracles():
    L1 = float(mpmath.pi / 4)
    L1p = oracle_L_prime_one(-4)
    expected = -1 + 2 * float(mpmath.euler) + math.log(2) / 3 + 2 * L1p / L1 - 12 / math.pi**2 * float(
        mpmath.zeta(2, derivative=1)
    )
    assert abs(alpha(1) - expected) < 1e-9


def test_alpha_normalizations():
    # they coincide unless chi_{-4N} is imprimitive
    for N in (1, 2, 5, 6, 10):
        assert alpha(N) == alpha(N, "primitive")
    for N in (3, 7, 15):
        assert primitive_discriminant(-4 * N) == -N
        assert alpha(N) != alpha(N, "primitive")
        assert alpha_two_adic(N) < alpha(N, "primitive")
    with pytest.raises(ValueError):
        alpha(3, "other")


def test_alpha_shift_between_one_and_three():
    # only sum log p/(p+1) and the L'/L term change
    l_term = lambda D: 2 * L_one_prime(D)[0] / L_one(D)  # noqa: E731
    shift = alpha(3) - alpha(1)
    assert abs(shift - (math.log(3) / 4 + l_term(-12) - l_term(-4))) < 1e-12


def test_constants_bundle():
    b = constants_bundle(7)
    assert b.C == 1 and b.A_Q == 1 and b.idoneal and not b.solvable_paper and b.alpha_regime
    js = b.to_json()
    for key in ("N", "C", "alpha", "L1", "L1_prime", "gamma", "zeta_prime_2", "A_Q", "solvable_paper", "idoneal"):
        assert key in js
    assert js["C"] == {"num": 1, "den": 1}
    assert not constants_bundle(47).alpha_regime


def test_odd_ideal_constant_examples():
    # -7 = 1 mod 8: A = (1/2 pi^2) (pi/sqrt 7)^2 (7/8) = 1/16
    assert abs(odd_ideal_constant(7) - 1 / 16) < 1e-12
    # -3 = 5 mod 8: nine times (1/2 pi^2) (pi/(3 sqrt 3))^2 (3/4)
    assert abs(odd_ideal_constant(3) - 9 / (2 * math.pi**2) * (math.pi / (3 * math.sqrt(3))) ** 2 * 0.75) < 1e-12
