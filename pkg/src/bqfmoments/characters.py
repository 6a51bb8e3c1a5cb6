"""Characters of form class groups and the coefficients of their L-series.

Character values are kept as rational angles (value = exp(2 pi i angle)),
so orthogonality and the class-by-class inversion of ideal counts are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from pathlib import Path

import numpy as np

from .arith import fmt_float
from .cyclo import Cyclo, from_power_sums
from .forms import FormClassGroup
from .ideals import enumerate_ideals


class InvariantError(AssertionError):
    """An identity that must hold exactly did not."""


@dataclass(frozen=True)
class ClassCharacter:
    group: FormClassGroup
    angles: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return lcm(*(a.denominator for a in self.angles))

    def is_trivial(self) -> bool:
        return all(a == 0 for a in self.angles)

    def value(self, i: int) -> Cyclo:
        return Cyclo.root(self.angles[i])

    def __call__(self, i: int) -> complex:
        return complex(self.value(i))

    def conj(self) -> "ClassCharacter":
        return ClassCharacter(self.group, tuple((-a) % 1 for a in self.angles))

    def __mul__(self, other: "ClassCharacter") -> "ClassCharacter":
        if other.group is not self.group and other.group != self.group:
            raise ValueError("characters live on different groups")
        return ClassCharacter(self.group, tuple((a + b) % 1 for a, b in zip(self.angles, other.angles)))

    def is_real(self) -> bool:
        return all(a in (0, Fraction(1, 2)) for a in self.angles)


def is_genus_character(chi: ClassCharacter) -> bool:
    return chi.order <= 2


def _quotient_order(G: FormClassGroup, g: int, H: set[int]) -> int:
    k, r = 1, g
    while r not in H:
        r = G.compose(r, g)
        k += 1
    return k


def character_table(G: FormClassGroup) -> list[ClassCharacter]:
    """All |G| characters of G, trivial character first.

    Built by extending from the span of greedily chosen generators: each new
    generator g of order k modulo the current subgroup H gets the k possible
    values whose k-th power matches the character already fixed on g^k.
    """
    h = len(G)
    H = {0}
    chars: list[dict[int, Fraction]] = [{0: Fraction(0)}]
    while len(H) < h:
        g = max((i for i in range(h) if i not in H), key=lambda i: (_quotient_order(G, i, H), -i))
        k = _quotient_order(G, g, H)
        gk = G.power(g, k)
        powers = [G.power(g, t) for t in range(k)]
        new_chars = []
        for chi in chars:
            for j in range(k):
                theta = (chi[gk] + j) / k
                ext = {}
                for x in H:
                    for t, gt in enumerate(powers):
                        ext[G.compose(x, gt)] = (chi[x] + t * theta) % 1
                new_chars.append(ext)
        H = set(new_chars[0])
        chars = new_chars
    return [ClassCharacter(G, tuple(c[i] for i in range(h))) for c in chars]


def check_multiplicative(chi: ClassCharacter) -> bool:
    G = chi.group
    h = len(G)
    return all(
        chi.angles[G.compose(i, j)] == (chi.angles[i] + chi.angles[j]) % 1
        for i in range(h)
        for j in range(h)
    )


def orthogonality_defects(table: list[ClassCharacter]) -> list[str]:
    """Row and column orthogonality, checked exactly; returns failures."""
    G = table[0].group
    h = len(G)
    bad = []
    for a, chi in enumerate(table):
        for b, psi in enumerate(table):
            s = sum((chi.value(i) * psi.value(i).conj() for i in range(h)), Cyclo.rational(0))
            if s != (h if a == b else 0):
                bad.append(f"rows {a},{b}: {s!r}")
    for i in range(h):
        for j in range(h):
            s = sum((chi.value(i) * chi.value(j).conj() for chi in table), Cyclo.rational(0))
            if s != (h if i == j else 0):
                bad.append(f"columns {i},{j}: {s!r}")
    return bad


def _ideal_values(chi: ClassCharacter, n: int, coprime_to: int) -> list[Cyclo]:
    if coprime_to == 2 and n % 2 == 0:
        return []
    recs = enumerate_ideals(chi.group.disc, n, chi.group)
    return [chi.value(r.class_index) for r in recs if r.class_index is not None]


def hecke_coefficient(chi: ClassCharacter, n: int, D: int | None = None, coprime_to: int = 2) -> Cyclo:
    """Sum of chi over ideals of norm n prime to ``coprime_to``, exactly."""
    if D is not None and D != chi.group.disc:
        raise ValueError("character is not defined on the class group of D")
    return sum(_ideal_values(chi, n, coprime_to), Cyclo.rational(0))


def convolution_coefficient(
    chi1: ClassCharacter, chi2: ClassCharacter, n: int, D: int | None = None, coprime_to: int = 2
) -> Cyclo:
    """Sum over ideals of norm n of chi1(a) chi2(a); equals the coefficient of chi1*chi2."""
    if D is not None and D != chi1.group.disc:
        raise ValueError("character is not defined on the class group of D")
    direct = sum(
        (u * v for u, v in zip(_ideal_values(chi1, n, coprime_to), _ideal_values(chi2, n, coprime_to))),
        Cyclo.rational(0),
    )
    via_product = hecke_coefficient(chi1 * chi2, n, coprime_to=coprime_to)
    if direct != via_product:
        raise InvariantError(f"convolution coefficient mismatch at n={n}")
    return direct


def class_counts(G: FormClassGroup, n: int, coprime_to: int = 2) -> list[int]:
    """J(c, n) for every class c, by ideal enumeration."""
    counts = [0] * len(G)
    if coprime_to == 2 and n % 2 == 0:
        return counts
    for rec in enumerate_ideals(G.disc, n, G):
        if rec.class_index is not None:
            counts[rec.class_index] += 1
    return counts


def coefficient_from_counts(chi: ClassCharacter, counts) -> Cyclo:
    """sum_i chi(c_i) J(c_i, n) from a vector of class counts."""
    e = chi.order
    sums = [0] * e
    for a, c in zip(chi.angles, counts):
        sums[int(a * e)] += int(c)
    return from_power_sums(e, sums)


def decompose_J(
    G: FormClassGroup, table: list[ClassCharacter], n: int, class_index: int, coprime_to: int = 2
) -> Fraction:
    """(1/h) sum_chi conj(chi(c)) b_chi(n), which must equal J(c, n) exactly."""
    counts = class_counts(G, n, coprime_to)
    total = Cyclo.rational(0)
    for chi in table:
        total = total + chi.value(class_index).conj() * coefficient_from_counts(chi, counts)
    if not total.is_rational():
        raise InvariantError(f"character inversion is not rational at n={n}: {total!r}")
    value = total.to_fraction() / len(G)
    if value != counts[class_index]:
        raise InvariantError(f"J mismatch at class {class_index}, n={n}: {value} != {counts[class_index]}")
    return value


def power_rows(chi: ClassCharacter, J: np.ndarray) -> np.ndarray:
    """rows[k, n] = sum of J[i, n] over classes with chi(c_i) = zeta_e^k, e = order."""
    e = chi.order
    rows = np.zeros((e, J.shape[1]), dtype=np.int64)
    for i, a in enumerate(chi.angles):
        rows[int(a * e)] += J[i]
    return rows


def write_coefficient_csv(directory, chars: list[ClassCharacter], J: np.ndarray, lo: int = 1) -> list[Path]:
    """One CSV ``n,re,im`` of b_chi(n) per character, named ``chi<index>.csv``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for idx, chi in enumerate(chars):
        rows = power_rows(chi, J)
        z = np.exp(2j * np.pi * np.arange(chi.order) / chi.order)
        vals = z @ rows
        path = directory / f"chi{idx}.csv"
        with open(path, "w") as fh:
            fh.write("n,re,im\n")
            for off, v in enumerate(vals):
                fh.write(f"{lo + off},{fmt_float(v.real)},{fmt_float(v.imag)}\n")
        paths.append(path)
    return paths
