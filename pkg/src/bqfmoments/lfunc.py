"""Kronecker symbols, quadratic Dirichlet L-values and the constants of the
second-moment asymptotic for x^2 + N y^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import factorize, omega, prime_divisors, require_discriminant, require_squarefree
from .forms import class_number, conductor_split, is_idoneal, is_solvable_paper, unit_weight

# Frozen from 30-digit evaluations; the test suite re-derives both.
EULER_GAMMA = 0.57721566490153286061
ZETA_PRIME_2 = -0.93754825431584375370

L_ONE_TOL = 1e-8
L_PRIME_TOL = 1e-6
DIFF_STEP = 1e-3

# B_2, B_4, ..., B_16
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
]


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n)."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    if D % 2 == 0 and n % 2 == 0:
        return 0
    k = 1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v % 2 and D % 8 in (3, 5):
        k = -k
    if n < 0:
        n = -n
        if D < 0:
            k = -k
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


def character_period(D: int) -> np.ndarray:
    """chi_D(1), ..., chi_D(|D|) as a float array."""
    return np.array([kronecker(D, a) for a in range(1, abs(D) + 1)], dtype=float)


# -- exact constants -------------------------------------------------------


def leading_constant(N: int) -> Fraction:
    """(3/N) prod_{p | 2N} 2p/(p+1)."""
    require_squarefree(N)
    c = Fraction(3, N)
    for p in prime_divisors(2 * N):
        c *= Fraction(2 * p, p + 1)
    return c


def mueller_A(q: int) -> Fraction:
    """Multiplicative function with A(p^e) = 2 + (1 - 1/p)(e - 1) for odd p
    and A(2^e) = 1, 2, e - 1 for e <= 1, e = 2, e >= 3."""
    if q < 1:
        raise ValueError("q must be positive")
    A = Fraction(1)
    for p, e in factorize(q) if q > 1 else ():
        if p == 2:
            A *= 1 if e <= 1 else 2 if e == 2 else e - 1
        else:
            A *= 2 + (1 - Fraction(1, p)) * (e - 1)
    return A


def mueller_constant(Q) -> Fraction:
    """12 A(q)/q prod_{p | q} (1 + 1/p)^-1 for the Gram matrix Q, q = det Q."""
    (a, b), (b2, c) = Q
    if b != b2 or a % 2 or c % 2:
        raise ValueError("Q must be symmetric with even diagonal")
    q = a * c - b * b
    if q == 0:
        raise ValueError("Q is singular")
    if q < 0 or a <= 0:
        raise ValueError("Q must be positive definite")
    value = 12 * mueller_A(q) / q
    for p in prime_divisors(q):
        value /= 1 + Fraction(1, p)
    return value


# -- L(s, chi_D) -----------------------------------------------------------


def L_one(D: int) -> float:
    """L(1, chi_D) = 2 pi h(D) / (w(D) sqrt|D|), checked against direct summation."""
    require_discriminant(D)
    value = 2 * math.pi * class_number(D) / (unit_weight(D) * math.sqrt(-D))
    direct = L_one_direct(D)
    if abs(value - direct) > L_ONE_TOL:
        raise ArithmeticError(f"L(1, chi_{D}): class number formula {value} vs sum {direct}")
    return value


def L_one_direct(D: int, levels: int = 5) -> float:
    """sum chi_D(n)/n by whole-period partial sums, Richardson-extrapolated in the period count.

    The tail after m periods has an expansion in powers of 1/m because each
    period of chi sums to zero.
    """
    k = abs(D)
    chi = character_period(D)
    m0 = max(8, -(-4000 // k))
    m_top = m0 * 2 ** (levels - 1)
    n = np.arange(1, m_top * k + 1, dtype=float)
    partial = np.cumsum(np.tile(chi, m_top) / n)
    R = [partial[m0 * 2**i * k - 1] for i in range(levels)]
    for j in range(1, levels):
        R = [(2**j * R[i] - R[i - 1]) / (2**j - 1) for i in range(1, len(R))]
    return float(R[-1])


def _rising(s: float, r: int) -> float:
    out = 1.0
    for i in range(r):
        out *= s + i
    return out


def L_value(s: float, D: int, cutoff: int = 12) -> float:
    """L(s, chi_D) for real s > 0 by Euler-Maclaurin on sum_a chi(a) zeta(s, a/k).

    The pole term 1/(s-1) of each Hurwitz zeta cancels over a full period, so
    it is dropped analytically; the formula is then smooth through s = 1.
    """
    k = abs(D)
    chi = character_period(D)
    q = np.arange(1, k + 1, dtype=float) / k
    head = sum(((j + q) ** -s for j in range(cutoff)), np.zeros(k))
    x = cutoff + q
    if s == 1:
        tail = -np.log(x)
    else:
        tail = np.expm1((1 - s) * np.log(x)) / (s - 1)
    corr = 0.5 * x**-s
    for j, B in enumerate(_BERNOULLI, start=1):
        corr = corr + float(B) / math.factorial(2 * j) * _rising(s, 2 * j - 1) * x ** (-s - 2 * j + 1)
    return float(k**-s * np.dot(chi, head + tail + corr))


def L_one_prime(D: int, h: float = DIFF_STEP) -> tuple[float, float]:
    """(L'(1, chi_D), error bound) from central differences at 1 +- h, 2h, 4h with two Richardson levels."""
    require_discriminant(D)
    d = {t: (L_value(1 + t * h, D) - L_value(1 - t * h, D)) / (2 * t * h) for t in (1, 2, 4)}
    r1 = {t: (4 * d[t] - d[2 * t]) / 3 for t in (1, 2)}
    r2 = (16 * r1[1] - r1[2]) / 15
    rounding = 50 * np.finfo(float).eps * (1 + abs(L_value(1, D))) * math.log(abs(D) + 2) / h
    return r2, abs(r2 - r1[1]) + rounding


def primitive_discriminant(D: int) -> int:
    return conductor_split(D)[1]


# -- the secondary constant ------------------------------------------------

NORMALIZATIONS = ("imprimitive", "primitive")


def alpha(N: int, normalization: str = "imprimitive") -> float:
    """-1 + 2 gamma + sum_{p|2N} log p/(p+1) + 2 L'/L(1, chi) - (12/pi^2) zeta'(2).

    ``imprimitive`` uses chi_{-4N} (the character mod 4N), ``primitive`` the
    primitive character it is induced from; they differ only for N = 3 mod 4.
    """
    require_squarefree(N)
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    D = -4 * N if normalization == "imprimitive" else primitive_discriminant(-4 * N)
    L1 = L_one(D)
    L1p, _ = L_one_prime(D)
    s = sum(math.log(p) / (p + 1) for p in prime_divisors(2 * N))
    return -1 + 2 * EULER_GAMMA + s + 2 * L1p / L1 - 12 / math.pi**2 * ZETA_PRIME_2


def _core_secondary(D: int) -> float:
    """-1 + 2 gamma + 2 L'/L(1, chi_D) - (12/pi^2) zeta'(2)."""
    L1p, _ = L_one_prime(D)
    return -1 + 2 * EULER_GAMMA + 2 * L1p / L_one(D) - 12 / math.pi**2 * ZETA_PRIME_2


def alpha_two_adic(N: int) -> float:
    """Secondary constant with the local factor at 2 worked out for N = 3 mod 4.

    For N = 3 mod 4, r(n) vanishes for n = 2 mod 4 and r(4k) counts
    representations of k by the principal form of discriminant -N; carrying
    that Euler factor at 2 through the residue shifts the primitive-character
    constant by -log 2 (2 split) or -(5/3) log 2 (2 inert). For other N this
    is ``alpha(N)``.
    """
    require_squarefree(N)
    if N % 4 != 3:
        return alpha(N)
    shift = 1 if kronecker(-N, 2) == 1 else Fraction(5, 3)
    return alpha(N, "primitive") - float(shift) * math.log(2)


@dataclass(frozen=True)
class ConstantsBundle:
    N: int
    C: Fraction
    A_Q: Fraction
    alpha: float
    L1: float
    L1_prime: float
    L1_prime_err: float
    alpha_primitive: float
    alpha_two_adic: float
    L1_primitive: float
    L1_prime_primitive: float
    gamma: float
    zeta_prime_2: float
    solvable_paper: bool
    idoneal: bool

    @property
    def alpha_regime(self) -> bool:
        """Whether N is in the regime where the x-term expansion is proved."""
        return self.solvable_paper or self.idoneal

    def to_json(self) -> dict:
        frac = lambda f: {"num": f.numerator, "den": f.denominator}  # noqa: E731
        return {
            "N": self.N,
            "C": frac(self.C),
            "alpha": self.alpha,
            "L1": self.L1,
            "L1_prime": self.L1_prime,
            "L1_prime_err": self.L1_prime_err,
            "gamma": self.gamma,
            "zeta_prime_2": self.zeta_prime_2,
            "A_Q": frac(self.A_Q),
            "solvable_paper": self.solvable_paper,
            "idoneal": self.idoneal,
            "alpha_regime": self.alpha_regime,
            "character": f"chi_{-4 * self.N}",
            "alpha_two_adic": self.alpha_two_adic,
            "primitive": {
                "character": f"chi_{primitive_discriminant(-4 * self.N)}",
                "alpha": self.alpha_primitive,
                "L1": self.L1_primitive,
                "L1_prime": self.L1_prime_primitive,
            },
        }


def constants_bundle(N: int) -> ConstantsBundle:
    require_squarefree(N)
    C = leading_constant(N)
    A_Q = mueller_constant(((2, 0), (0, 2 * N)))
    if A_Q != C:
        raise ArithmeticError(f"A_Q = {A_Q} but C = {C} for N = {N}")
    D = -4 * N
    d = primitive_discriminant(D)
    L1p, err = L_one_prime(D)
    return ConstantsBundle(
        N=N,
        C=C,
        A_Q=A_Q,
        alpha=alpha(N, "imprimitive"),
        L1=L_one(D),
        L1_prime=L1p,
        L1_prime_err=err,
        alpha_primitive=alpha(N, "primitive"),
        alpha_two_adic=alpha_two_adic(N),
        L1_primitive=L_one(d),
        L1_prime_primitive=L_one_prime(d)[0],
        gamma=EULER_GAMMA,
        zeta_prime_2=ZETA_PRIME_2,
        solvable_paper=is_solvable_paper(N),
        idoneal=is_idoneal(N),
    )


def odd_ideal_constant(N: int) -> float:
    """Leading constant A of sum_{n<=x} a_n^2 ~ A x log x, a_n the prime-to-2 ideal count of Q(sqrt -N).

    (1/2pi^2) L(1, chi_{-N})^2 prod_{p|N} p/(p+1) when -N = 1 mod 8, nine times
    that when -N = 5 mod 8.
    """
    require_squarefree(N)
    if N % 4 != 3:
        raise ValueError("needs N = 3 mod 4")
    factor = 1 if (-N) % 8 == 1 else 9
    prod = math.prod(p / (p + 1) for p in prime_divisors(N))
    return factor / (2 * math.pi**2) * L_one(-N) ** 2 * prod


def odd_ideal_secondary(N: int) -> float:
    """B/A in sum_{n<=x} a_n^2 = A x log x + B x + ..., from the same Euler-factor bookkeeping.

    Removing the factor at 2 from zeta(s)^2 L(s)^2 / zeta(2s) adds (10/3) log 2
    when 2 splits and (2/3) log 2 when it is inert.
    """
    require_squarefree(N)
    if N % 4 != 3:
        raise ValueError("needs N = 3 mod 4")
    two = Fraction(10, 3) if kronecker(-N, 2) == 1 else Fraction(2, 3)
    local = sum(math.log(p) / (p + 1) for p in prime_divisors(N))
    return _core_secondary(-N) + local + float(two) * math.log(2)
