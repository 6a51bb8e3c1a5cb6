"""Representation counts of x^2 + N y^2 and ideal counts by class.

Two independent routes to the same numbers live here:

* lattice sweeps (``r_direct``, ``bulk_counts``, ``class_counts_sweep``), which
  count integer points on the form itself;
* ideal enumeration (``enumerate_ideals``, ``ideal_count_table``), which lists
  ideals of norm n as triples (g, m, b) with norm g^2 m and b^2 = D mod 4m and
  assigns each to a class through its associated form.
"""

from __future__ import annotations

import os
import struct
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np
from sympy.ntheory import sqrt_mod

from .arith import prime_divisors, require_discriminant, require_squarefree
from .forms import (
    FormClassGroup,
    QuadForm,
    conductor_split,
    enumerate_class_group,
    reduce,
    unit_weight,
)

LEDGER_MAGIC = b"BQF1"
CELL_MAX = np.iinfo(np.uint16).max
DEFAULT_CHUNK = 1 << 20


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("BQF_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def ordered_map(fn: Callable, items: Iterable, threads: int) -> Iterator:
    """Map ``fn`` over ``items`` on a thread pool, yielding results in input order.

    At most ``2 * threads`` results are in flight, so memory stays bounded.
    """
    if threads <= 1:
        yield from map(fn, items)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending: deque = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= 2 * threads:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def chunk_bounds(x_max: int, chunk_size: int) -> list[tuple[int, int]]:
    """Half-open n-ranges [lo, hi) covering 1..x_max."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    return [(lo, min(lo + chunk_size, x_max + 1)) for lo in range(1, x_max + 1, chunk_size)]


# -- representation numbers of x^2 + N y^2 ---------------------------------


def r_direct(N: int, n: int) -> int:
    """Number of (x, y) in Z^2 with x^2 + N y^2 = n, signs and order counted."""
    if n < 1:
        raise ValueError("n must be positive")
    count = 0
    for y in range(-isqrt(n // N), isqrt(n // N) + 1):
        rest = n - N * y * y
        s = isqrt(rest)
        if s * s == rest:
            count += 1 if s == 0 else 2
    return count


def _rep_chunk(N: int, lo: int, hi: int) -> np.ndarray:
    """r_{2,N}(n) for lo <= n < hi as int64, sweeping y then x over the quarter plane."""
    size = hi - lo
    quad, axis = [], []
    for y in range(isqrt((hi - 1) // N) + 1):
        base = N * y * y
        x0 = isqrt(lo - base - 1) + 1 if lo > base else 0
        x1 = isqrt(hi - 1 - base)
        if x1 < x0:
            continue
        xs = np.arange(x0, x1 + 1, dtype=np.int64)
        vals = xs * xs + (base - lo)
        if x0 == 0:
            if y > 0:
                axis.append(vals[:1])
            vals = vals[1:]
        (quad if y > 0 else axis).append(vals)
    counts = np.zeros(size, dtype=np.int64)
    if quad:
        counts += 4 * np.bincount(np.concatenate(quad), minlength=size)
    if axis:
        counts += 2 * np.bincount(np.concatenate(axis), minlength=size)
    return counts


def _to_cells(N: int, lo: int, counts: np.ndarray) -> np.ndarray:
    if counts.size and counts.max() > CELL_MAX:
        n = lo + int(np.argmax(counts > CELL_MAX))
        raise OverflowError(f"r_2,{N}({n}) exceeds the 16-bit ledger cell")
    return counts.astype(np.uint16)


def iter_rep_chunks(
    N: int, x_max: int, chunk_size: int = DEFAULT_CHUNK, threads: int | None = None
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (lo, cells) per chunk in increasing n order; cells[i] = r_{2,N}(lo + i)."""
    require_squarefree(N)

    def work(bounds):
        lo, hi = bounds
        return lo, _to_cells(N, lo, _rep_chunk(N, lo, hi))

    yield from ordered_map(work, chunk_bounds(x_max, chunk_size), resolve_threads(threads))


@dataclass(frozen=True)
class RepCountLedger:
    N: int
    x_max: int
    counts: np.ndarray  # counts[n - 1] = r_{2,N}(n), uint16

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.x_max:
            raise IndexError(n)
        return int(self.counts[n - 1])

    def total(self) -> int:
        return int(self.counts.sum(dtype=np.int64))

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("n,count\n")
            for n, c in enumerate(self.counts.tolist(), start=1):
                fh.write(f"{n},{c}\n")

    def to_binary(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(LEDGER_MAGIC + struct.pack("<QQ", self.N, self.x_max))
            fh.write(self.counts.astype("<u2").tobytes())

    @classmethod
    def from_binary(cls, path) -> "RepCountLedger":
        raw = Path(path).read_bytes()
        if raw[:4] != LEDGER_MAGIC:
            raise ValueError(f"{path}: bad magic {raw[:4]!r}")
        N, x_max = struct.unpack("<QQ", raw[4:20])
        counts = np.frombuffer(raw[20:], dtype="<u2").astype(np.uint16)
        if counts.size != x_max:
            raise ValueError(f"{path}: expected {x_max} cells, found {counts.size}")
        return cls(N, x_max, counts)


def bulk_counts(
    N: int, x_max: int, chunk_size: int = DEFAULT_CHUNK, threads: int | None = None
) -> RepCountLedger:
    require_squarefree(N)
    if x_max < 0:
        raise ValueError("x_max must be nonnegative")
    parts = [cells for _, cells in iter_rep_chunks(N, x_max, chunk_size, threads)]
    counts = np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint16)
    return RepCountLedger(N, x_max, counts)


def lattice_points(N: int, x_max: int) -> int:
    """Number of (x, y) with 0 < x^2 + N y^2 <= x_max, counted row by row."""
    total = 0
    for y in range(-isqrt(x_max // N), isqrt(x_max // N) + 1):
        total += 2 * isqrt(x_max - N * y * y) + 1
    return total - 1 if x_max >= 0 else 0


# -- counts for a general form ---------------------------------------------


def form_counts(f, lo: int, hi: int) -> np.ndarray:
    """r_f(n) for lo <= n < hi over all of Z^2 (int64)."""
    a, b, c = f
    D = b * b - 4 * a * c
    size = hi - lo
    vals = []
    ymax = isqrt(4 * a * (hi - 1) // -D) if hi > 1 else -1
    for y in range(-ymax, ymax + 1):
        # f(x, y) <= v  iff  |2ax + by| <= isqrt(4av + D y^2)
        outer = 4 * a * (hi - 1) + D * y * y
        if outer < 0:
            continue
        s = isqrt(outer)
        x0, x1 = -((b * y + s) // (2 * a)), (s - b * y) // (2 * a)
        inner = 4 * a * (lo - 1) + D * y * y
        if inner >= 0:
            t = isqrt(inner)
            i0, i1 = -((b * y + t) // (2 * a)), (t - b * y) // (2 * a)
            pieces = [(x0, i0 - 1), (i1 + 1, x1)] if i0 <= i1 else [(x0, x1)]
        else:
            pieces = [(x0, x1)]
        for p0, p1 in pieces:
            if p1 < p0:
                continue
            xs = np.arange(p0, p1 + 1, dtype=np.int64)
            vals.append(a * xs * xs + (b * y) * xs + (c * y * y - lo))
    if not vals:
        return np.zeros(size, dtype=np.int64)
    allv = np.concatenate(vals)
    allv = allv[allv >= 0]
    return np.bincount(allv, minlength=size)[:size].astype(np.int64)


def class_counts_sweep(G: FormClassGroup, lo: int, hi: int, coprime_to: int = 1) -> np.ndarray:
    """J(c, n) for every class c and lo <= n < hi, via r_f(n) / w.

    Rows follow ``G.classes``. Norms sharing a factor with ``coprime_to`` are
    zeroed. Valid for norms prime to the conductor only, so every prime of
    the conductor must divide ``coprime_to``.
    """
    D = G.disc
    kappa, _ = conductor_split(D)
    if kappa > 1 and any(coprime_to % p for p in prime_divisors(kappa)):
        raise ValueError(f"D={D} has conductor {kappa}; sweep needs coprime_to covering it")
    w = unit_weight(D)
    lo = max(lo, 1)
    out = np.empty((len(G), max(hi - lo, 0)), dtype=np.int64)
    for i, f in enumerate(G.classes):
        r = form_counts(f, lo, hi)
        if np.any(r % w):
            raise AssertionError(f"r_f not divisible by unit count for {f}")
        out[i] = r // w
    if coprime_to > 1 and out.shape[1]:
        ns = np.arange(lo, hi, dtype=np.int64)
        out[:, np.gcd(ns, coprime_to) != 1] = 0
    return out


# -- ideal enumeration -----------------------------------------------------


@dataclass(frozen=True)
class IdealRecord:
    """Ideal g * [m, (-b + sqrt D)/2] of norm g^2 m.

    ``class_index`` is None when the associated form is not a primitive form,
    i.e. the ideal is not invertible in a non-maximal order.
    """

    g: int
    m: int
    b: int
    class_index: int | None

    @property
    def norm(self) -> int:
        return self.g * self.g * self.m


def primitive_roots(D: int, m: int) -> list[int]:
    """Residues b in (-m, m] with b^2 = D (mod 4m)."""
    roots = {r % (2 * m) for r in sqrt_mod(D % (4 * m), 4 * m, all_roots=True)}
    return sorted(r - 2 * m if r > m else r for r in roots)


def associated_form(D: int, m: int, b: int) -> QuadForm:
    return QuadForm(m, b, (b * b - D) // (4 * m))


def _class_of(G: FormClassGroup, D: int, m: int, b: int) -> int | None:
    return G.lookup(reduce(associated_form(D, m, b)))


def enumerate_ideals(D: int, n: int, G: FormClassGroup | None = None) -> list[IdealRecord]:
    """All ideals of norm n in the order of discriminant D."""
    require_discriminant(D)
    if G is None:
        G = enumerate_class_group(D)
    out = []
    g = 1
    while g * g <= n:
        if n % (g * g) == 0:
            m = n // (g * g)
            for b in primitive_roots(D, m):
                out.append(IdealRecord(g, m, b, _class_of(G, D, m, b)))
        g += 1
    return out


def _as_norm(n) -> int | None:
    """Integer value of n, or None if n is not a positive integer."""
    if isinstance(n, Fraction):
        if n.denominator != 1:
            return None
        n = n.numerator
    if isinstance(n, float):
        if not n.is_integer():
            return None
        n = int(n)
    return n if n >= 1 else None


def J(D: int, class_index: int, n, coprime_to: int = 1, G: FormClassGroup | None = None) -> int:
    """Number of ideals of norm n in the given class with norm prime to ``coprime_to``.

    Non-integer n (from n / r^2) counts zero.
    """
    if coprime_to not in (1, 2):
        raise ValueError("coprime_to must be 1 or 2")
    n = _as_norm(n)
    if n is None or gcd(n, coprime_to) != 1:
        return 0
    return sum(1 for rec in enumerate_ideals(D, n, G) if rec.class_index == class_index)


def ideal_count_table(G: FormClassGroup, n_max: int, coprime_to: int = 1) -> np.ndarray:
    """table[c, n] = J(c, n) for 0 <= n <= n_max by ideal enumeration (column 0 is zero).

    Ideals whose associated form is imprimitive are left out of every row.
    """
    D = G.disc
    table = np.zeros((len(G), n_max + 1), dtype=np.int64)
    for m in range(1, n_max + 1):
        classes = [_class_of(G, D, m, b) for b in primitive_roots(D, m)]
        classes = [c for c in classes if c is not None]
        if not classes:
            continue
        g = 1
        while g * g * m <= n_max:
            n = g * g * m
            if gcd(n, coprime_to) == 1:
                for c in classes:
                    table[c, n] += 1
            g += 1
    return table


# -- the conductor-2 projection and the decomposition identity --------------


def _odd_representative(G4: FormClassGroup, idx: int, bound: int) -> tuple[int, int]:
    D = G4.disc
    for m in range(1, bound + 1, 2):
        for b in primitive_roots(D, m):
            if _class_of(G4, D, m, b) == idx:
                return m, b
    raise LookupError(f"no odd-norm ideal in class {idx} with norm <= {bound}")


def project_class(
    N: int,
    class_index: int,
    G4: FormClassGroup | None = None,
    G1: FormClassGroup | None = None,
    bound: int = 1000,
) -> int:
    """Image of a class of discriminant -4N under the map to discriminant -N."""
    require_squarefree(N)
    if N % 4 != 3:
        raise ValueError("projection needs N = 3 mod 4")
    G4 = G4 or enumerate_class_group(-4 * N)
    G1 = G1 or enumerate_class_group(-N)
    while True:
        try:
            m, b = _odd_representative(G4, class_index, bound)
            break
        except LookupError:
            bound *= 4
    # [m, -b/2 + sqrt(-N)] extends to [m, (-b' + sqrt(-N))/2] with b' = b/2 mod m, b' odd
    bp = (b // 2) % m
    if bp % 2 == 0:
        bp += m
    c, r = divmod(bp * bp + N, 4 * m)
    assert r == 0
    return G1.index((m, bp, c))


@dataclass
class DecompositionReport:
    N: int
    n_max: int
    failures: list[tuple[int, int, int]]  # (n, r_direct, ideal side)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_decomposition(N: int, n_max: int) -> DecompositionReport:
    """Check r_{2,N}(n) = 2 J(c, n) + w(-N) J(c_2, n/4) for all n <= n_max.

    c is the principal class of discriminant -4N restricted to norms prime to 2,
    c_2 its image in discriminant -N. The right side comes from ideal
    enumeration, the left from a direct point count.
    """
    require_squarefree(N)
    if N % 4 != 3:
        raise ValueError("decomposition identity needs N = 3 mod 4")
    G4 = enumerate_class_group(-4 * N)
    G1 = enumerate_class_group(-N)
    c2 = project_class(N, 0, G4, G1)
    w = unit_weight(-N)
    t4 = ideal_count_table(G4, n_max, coprime_to=2)
    t1 = ideal_count_table(G1, n_max // 4, coprime_to=1)
    failures = []
    for n in range(1, n_max + 1):
        rhs = 2 * int(t4[0, n]) + (w * int(t1[c2, n // 4]) if n % 4 == 0 else 0)
        lhs = r_direct(N, n)
        if lhs != rhs:
            failures.append((n, lhs, rhs))
    return DecompositionReport(N, n_max, failures)
