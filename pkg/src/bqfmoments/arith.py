"""Small integer helpers shared by the other modules."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of |n| as ((p, e), ...) by trial division."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def omega(n: int) -> int:
    """Number of distinct prime factors."""
    return len(factorize(n))


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for _, e in factorize(n))


def require_squarefree(N: int) -> int:
    if not isinstance(N, int) or N < 1 or not is_squarefree(N):
        raise ValueError(f"N={N} is not a squarefree positive integer")
    return N


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def is_discriminant(D: int) -> bool:
    return D < 0 and D % 4 in (0, 1)


def require_discriminant(D: int) -> int:
    if not isinstance(D, int) or not is_discriminant(D):
        raise ValueError(f"D={D} is not a negative discriminant (D < 0, D = 0,1 mod 4)")
    return D


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def gcd3(a: int, b: int, c: int) -> int:
    return gcd(gcd(a, b), c)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def fmt_float(x: float) -> str:
    """Fixed 12-significant-digit rendering used by every report."""
    x = float(x)
    if abs(x) < 1e-12:
        x = 0.0
    return f"{x:.12g}"
