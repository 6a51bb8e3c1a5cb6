"""Positive definite binary quadratic forms and their class groups.

Forms are plain ``(a, b, c)`` triples standing for ``a x^2 + b xy + c y^2``.
Class groups are built by scanning reduced forms and composing them with
Dirichlet composition; groups here are small, so the full Cayley table is
stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import NamedTuple

from .arith import gcd3, omega, require_discriminant, require_squarefree, xgcd


class QuadForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return gcd3(self.a, self.b, self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


def reduce(f) -> QuadForm:
    """Return the reduced form properly equivalent to ``f``."""
    a, b, c = (int(v) for v in f)
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError(f"form {(a, b, c)} is not positive definite")
    while True:
        if not (-a < b <= a):
            k = (a - b) // (2 * a)
            b, c = b + 2 * a * k, a * k * k + b * k + c
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return QuadForm(a, b, c)


def conductor_split(D: int) -> tuple[int, int]:
    """Split ``D = kappa^2 * d`` with kappa maximal and d a discriminant."""
    require_discriminant(D)
    for k in range(isqrt(-D), 0, -1):
        if D % (k * k) == 0 and (D // (k * k)) % 4 in (0, 1):
            return k, D // (k * k)
    raise AssertionError("unreachable: kappa=1 always works")


def is_fundamental(D: int) -> bool:
    return conductor_split(D)[0] == 1


def unit_weight(D: int) -> int:
    """Number of units of the order of discriminant D."""
    require_discriminant(D)
    return {-3: 6, -4: 4}.get(D, 2)


def principal_form(D: int) -> QuadForm:
    require_discriminant(D)
    b = D % 2
    return QuadForm(1, b, (b - D) // 4)


def reduced_forms(D: int) -> list[QuadForm]:
    """All reduced primitive forms of discriminant D, principal form first."""
    require_discriminant(D)
    out = []
    for a in range(1, isqrt(-D // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            q, r = divmod(b * b - D, 4 * a)
            if r or q < a or (q == a and b < 0):
                continue
            if gcd3(a, b, q) == 1:
                out.append(QuadForm(a, b, q))
    out.sort(key=lambda f: (f.a, abs(f.b), -f.b))
    return out


def class_number(D: int) -> int:
    return len(reduced_forms(D))


def compose(f, g) -> QuadForm:
    """Dirichlet composition of two primitive forms of equal discriminant, reduced."""
    a1, b1, c1 = f
    a2, b2, c2 = g
    D = b1 * b1 - 4 * a1 * c1
    if b2 * b2 - 4 * a2 * c2 != D:
        raise ValueError("forms have different discriminants")
    s = (b1 + b2) // 2
    d1, u1, v1 = xgcd(a1, a2)
    d, x, w = xgcd(d1, s)
    v = x * v1
    a3 = a1 * a2 // (d * d)
    b3 = b2 + 2 * a2 // d * (v * (s - b2) - w * c2)
    b3 %= 2 * a3
    c3, r = divmod(b3 * b3 - D, 4 * a3)
    assert r == 0, (f, g)
    return reduce((a3, b3, c3))


def inverse(f) -> QuadForm:
    a, b, c = f
    return reduce((a, -b, c))


@dataclass(frozen=True)
class FormClassGroup:
    """Form class group of one discriminant with its Cayley table.

    Classes are indices into ``classes``; index 0 is the principal form.
    """

    disc: int
    classes: tuple[QuadForm, ...]
    table: tuple[tuple[int, ...], ...]
    inverses: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.classes)

    def index(self, f) -> int:
        return self._lookup[reduce(f)]

    @property
    def _lookup(self) -> dict[QuadForm, int]:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {f: i for i, f in enumerate(self.classes)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def lookup(self, f: QuadForm) -> int | None:
        """Class index of an already reduced form, or None if it is not in the group."""
        return self._lookup.get(f)

    def compose(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inverse(self, i: int) -> int:
        return self.inverses[i]

    def power(self, i: int, k: int) -> int:
        r = 0
        for _ in range(k):
            r = self.table[r][i]
        return r

    def order(self, i: int) -> int:
        k, r = 1, i
        while r != 0:
            r = self.table[r][i]
            k += 1
        return k

    def squares(self) -> set[int]:
        return {self.table[i][i] for i in range(len(self))}


def enumerate_class_group(D: int) -> FormClassGroup:
    forms = reduced_forms(D)
    index = {f: i for i, f in enumerate(forms)}
    table = tuple(tuple(index[compose(f, g)] for g in forms) for f in forms)
    inverses = tuple(index[inverse(f)] for f in forms)
    return FormClassGroup(D, tuple(forms), table, inverses)


class GenusInfo(NamedTuple):
    num_genera: int
    two_torsion_dual_size: int
    one_class_per_genus: bool


def genus_analysis(G: FormClassGroup) -> GenusInfo:
    h = len(G)
    sq = len(G.squares())
    genera = h // sq
    one_per_genus = all(G.compose(i, i) == 0 for i in range(h))
    return GenusInfo(genera, genera, one_per_genus)


def is_solvable_paper(N: int) -> bool:
    """h(-4N) equals 2^t, t the number of prime factors of N."""
    require_squarefree(N)
    return class_number(-4 * N) == 2 ** omega(N)


def is_idoneal(N: int) -> bool:
    """Every genus of discriminant -4N holds exactly one class."""
    require_squarefree(N)
    return genus_analysis(enumerate_class_group(-4 * N)).one_class_per_genus


def represents(f, n: int) -> bool:
    """Whether the positive definite form f takes the value n (brute force)."""
    a, b, c = f
    D = b * b - 4 * a * c
    ymax = isqrt(4 * a * n // -D)
    for y in range(-ymax, ymax + 1):
        disc = 4 * a * n + D * y * y
        if disc < 0:
            continue
        s = isqrt(disc)
        if s * s != disc:
            continue
        for t in (s, -s):
            if (t - b * y) % (2 * a) == 0:
                return True
    return False


