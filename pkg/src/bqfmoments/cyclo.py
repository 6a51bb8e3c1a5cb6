"""Exact arithmetic in Q(zeta_e), enough for sums of character values.

An element is stored as rational coefficients on 1, z, ..., z^(phi(e)-1),
reduced modulo the e-th cyclotomic polynomial, so equality is exact.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np


@lru_cache(maxsize=None)
def cyclotomic_poly(e: int) -> tuple[int, ...]:
    """Coefficients of Phi_e, lowest degree first."""
    # x^e - 1 divided by Phi_d for every proper divisor d of e
    num = [-1] + [0] * (e - 1) + [1]
    for d in range(1, e):
        if e % d == 0:
            num = _divide_exact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _divide_exact(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        coef = num[i + len(den) - 1] // den[-1]
        q[i] = coef
        for j, dj in enumerate(den):
            num[i + j] -= coef * dj
    assert not any(num), "inexact cyclotomic division"
    return q


def _reduce(coeffs: dict[int, Fraction | int], e: int) -> tuple[Fraction, ...]:
    phi = cyclotomic_poly(e)
    deg = len(phi) - 1
    work = [Fraction(0)] * e
    for k, v in coeffs.items():
        work[k % e] += v
    for i in range(e - 1, deg - 1, -1):
        c = work[i]
        if c:
            for j in range(deg + 1):
                work[i - deg + j] -= c * phi[j]
    return tuple(work[:deg])


class Cyclo:
    """Element of Q(zeta_e) with zeta_e = exp(2 pi i / e)."""

    __slots__ = ("e", "coeffs")

    def __init__(self, e: int, coeffs: dict[int, Fraction | int] | None = None):
        self.e = e
        self.coeffs = _reduce(coeffs or {}, e)

    @classmethod
    def root(cls, angle: Fraction) -> "Cyclo":
        """exp(2 pi i * angle) for a rational angle."""
        angle = Fraction(angle) % 1
        e = angle.denominator
        return cls(e, {angle.numerator: 1})

    @classmethod
    def rational(cls, q) -> "Cyclo":
        return cls(1, {0: Fraction(q)})

    def lift(self, e: int) -> "Cyclo":
        if e % self.e:
            raise ValueError(f"cannot lift level {self.e} to {e}")
        step = e // self.e
        return Cyclo(e, {k * step: v for k, v in enumerate(self.coeffs) if v})

    def _common(self, other) -> tuple["Cyclo", "Cyclo"]:
        if not isinstance(other, Cyclo):
            other = Cyclo.rational(other)
        e = lcm(self.e, other.e)
        return self.lift(e), other.lift(e)

    def __add__(self, other):
        a, b = self._common(other)
        out = dict(enumerate(a.coeffs))
        for k, v in enumerate(b.coeffs):
            out[k] = out.get(k, 0) + v
        return Cyclo(a.e, out)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.e, {k: -v for k, v in enumerate(self.coeffs)})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Cyclo) else -Fraction(other))

    def __mul__(self, other):
        a, b = self._common(other)
        out: dict[int, Fraction] = {}
        for i, u in enumerate(a.coeffs):
            if u:
                for j, v in enumerate(b.coeffs):
                    if v:
                        out[i + j] = out.get(i + j, 0) + u * v
        return Cyclo(a.e, out)

    __rmul__ = __mul__

    def conj(self) -> "Cyclo":
        return Cyclo(self.e, {(-k) % self.e: v for k, v in enumerate(self.coeffs)})

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __complex__(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.e)
        return complex(sum(float(v) * z**k for k, v in enumerate(self.coeffs)))

    def __float__(self) -> float:
        return complex(self).real

    def __eq__(self, other) -> bool:
        if not isinstance(other, (Cyclo, int, Fraction)):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash((self.e, self.coeffs))

    def __repr__(self) -> str:
        terms = [f"{v}*z^{k}" for k, v in enumerate(self.coeffs) if v]
        return f"Cyclo({self.e}: {' + '.join(terms) or '0'})"


def from_power_sums(e: int, sums) -> Cyclo:
    """sum_k sums[k] * zeta_e^k with integer (possibly numpy) sums."""
    return Cyclo(e, {k: int(v) for k, v in enumerate(np.asarray(sums).tolist()) if v})
