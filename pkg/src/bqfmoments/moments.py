"""Second moments of representation numbers and Hecke coefficients.

Sums are accumulated chunk by chunk in exact integers (Python ints, or exact
cyclotomic numbers for non-real characters); floats appear only in ratios and
fits computed from finished sums.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import fmt_float, require_squarefree
from .characters import ClassCharacter, character_table, is_genus_character, power_rows
from .cyclo import Cyclo, from_power_sums
from .forms import FormClassGroup, enumerate_class_group
from .ideals import (
    DEFAULT_CHUNK,
    chunk_bounds,
    class_counts_sweep,
    iter_rep_chunks,
    ordered_map,
    resolve_threads,
)
from .lfunc import kronecker, leading_constant, odd_ideal_constant, odd_ideal_secondary

GROWTH_THRESHOLD = 0.25


def default_checkpoints(x_max: int) -> list[int]:
    """Powers of ten from 10^3 up to x_max, closed off with x_max itself."""
    if x_max < 1:
        return []
    cps = [10**k for k in range(3, len(str(x_max))) if 10**k <= x_max]
    if not cps or cps[-1] != x_max:
        cps.append(x_max)
    return cps


def geometric_checkpoints(lo: int, hi: int, per_decade: int = 4) -> list[int]:
    a, b = math.log10(lo), math.log10(hi)
    k0, k1 = math.ceil(a * per_decade - 1e-9), math.floor(b * per_decade + 1e-9)
    cps = sorted({int(round(10 ** (k / per_decade))) for k in range(k0, k1 + 1)})
    return [x for x in cps if lo <= x <= hi]


def _check_checkpoints(checkpoints, x_max: int) -> list[int]:
    cps = [int(x) for x in checkpoints]
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if cps and (cps[0] < 1 or cps[-1] > x_max):
        raise ValueError(f"checkpoints must lie in [1, {x_max}]")
    return cps


def _xlogx(x: int) -> float:
    return x * math.log(x)


def _slope(xs, ys) -> float | None:
    if len(xs) < 2:
        return None
    lx = np.log(np.asarray(xs, dtype=float))
    y = np.asarray(ys, dtype=float) / np.asarray(xs, dtype=float)
    lx0 = lx - lx.mean()
    return float(np.dot(lx0, y - y.mean()) / np.dot(lx0, lx0))


def _real(v) -> float:
    return float(v) if not isinstance(v, Cyclo) else float(v)


def _exact(v):
    """int for rational integral values, the Cyclo otherwise."""
    if isinstance(v, Cyclo) and v.is_rational():
        q = v.to_fraction()
        return q.numerator if q.denominator == 1 else q
    return v


@dataclass
class MomentReport:
    """Exact partial sums S(x) at increasing checkpoints, with model comparisons."""

    label: str
    checkpoints: list[int]
    S: list
    C: Fraction | float | None = None
    alpha: float | None = None
    extra: dict = field(default_factory=dict)

    def values(self) -> list[float]:
        return [_real(s) for s in self.S]

    def model_main(self) -> list[float | None]:
        if self.C is None:
            return [None] * len(self.S)
        return [float(self.C) * _xlogx(x) for x in self.checkpoints]

    def model_full(self) -> list[float | None]:
        if self.C is None or self.alpha is None:
            return [None] * len(self.S)
        return [float(self.C) * (_xlogx(x) + self.alpha * x) for x in self.checkpoints]

    def ratio_main(self) -> list[float | None]:
        return [s / m if m else None for s, m in zip(self.values(), self.model_main())]

    def ratio_full(self) -> list[float | None]:
        return [s / m if m else None for s, m in zip(self.values(), self.model_full())]

    def running_slopes(self) -> list[float | None]:
        vals = self.values()
        return [_slope(self.checkpoints[: i + 1], vals[: i + 1]) for i in range(len(vals))]

    @property
    def slope_estimate(self) -> float | None:
        return _slope(self.checkpoints, self.values())

    def to_csv(self) -> str:
        def cell(v):
            return "" if v is None else fmt_float(v)

        lines = ["x,S,C_xlogx_model,full_model,ratio_main,ratio_full,slope_est"]
        cols = zip(
            self.checkpoints, self.S, self.model_main(), self.model_full(),
            self.ratio_main(), self.ratio_full(), self.running_slopes(),
        )
        for x, s, mm, mf, rm, rf, sl in cols:
            s_txt = str(s) if isinstance(s, int) else fmt_float(_real(s))
            lines.append(",".join([str(x), s_txt, cell(mm), cell(mf), cell(rm), cell(rf), cell(sl)]))
        return "\n".join(lines) + "\n"

    def to_json(self, constants: dict | None = None) -> str:
        def num(v):
            return None if v is None else float(fmt_float(v))

        rows = []
        for i, x in enumerate(self.checkpoints):
            s = self.S[i]
            rows.append({
                "x": x,
                "S": s if isinstance(s, int) else num(_real(s)),
                "C_xlogx_model": num(self.model_main()[i]),
                "full_model": num(self.model_full()[i]),
                "ratio_main": num(self.ratio_main()[i]),
                "ratio_full": num(self.ratio_full()[i]),
                "slope_est": num(self.running_slopes()[i]),
            })
        out = {
            "label": self.label,
            "C": None if self.C is None else str(self.C),
            "alpha": num(self.alpha),
            "slope_estimate": num(self.slope_estimate),
            "rows": rows,
            **self.extra,
        }
        if constants is not None:
            out["constants"] = _round(constants)
        return json.dumps(out, indent=2, sort_keys=True) + "\n"


def _round(obj):
    if isinstance(obj, float):
        return float(fmt_float(obj))
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    return obj


# -- sum of r_{2,N}(n)^2 ---------------------------------------------------


def accumulate_r_squared(
    N: int,
    x_max: int,
    checkpoints=None,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int | None = None,
    alpha: float | None = None,
) -> MomentReport:
    require_squarefree(N)
    cps = _check_checkpoints(default_checkpoints(x_max) if checkpoints is None else checkpoints, x_max)
    S = []
    running = 0
    j = 0
    for lo, cells in iter_rep_chunks(N, x_max, chunk_size, threads):
        sq = cells.astype(np.int64) ** 2
        hi = lo + cells.size
        if j < len(cps) and cps[j] < hi:
            cum = np.cumsum(sq)
            while j < len(cps) and cps[j] < hi:
                S.append(running + int(cum[cps[j] - lo]))
                j += 1
        running += int(sq.sum())
    return MomentReport(f"N={N}", cps, S, leading_constant(N), alpha)


# -- moments of Hecke coefficients -----------------------------------------


def _character_sums(
    G: FormClassGroup,
    chars: list[ClassCharacter],
    x_max: int,
    checkpoints: list[int],
    chunk_size: int,
    threads: int | None,
) -> list[list[Cyclo]]:
    """Exact sum_{n<=x} |b_chi(n)|^2 for each character and checkpoint."""
    bounds = chunk_bounds(x_max, chunk_size)

    def work(b):
        lo, hi = b
        J = class_counts_sweep(G, lo, hi, coprime_to=2)
        idx = [x - lo for x in checkpoints if lo <= x < hi]
        per_char = []
        for chi in chars:
            e = chi.order
            rows = power_rows(chi, J)
            # |b|^2 = sum_{k,l} R_k R_l z^(k-l): coefficient d collects k - l = d
            prods = np.stack([(rows * np.roll(rows, d, axis=0)).sum(axis=0) for d in range(e)])
            cum = np.cumsum(prods, axis=1)
            per_char.append(([[int(v) for v in cum[:, i]] for i in idx], [int(v) for v in prods.sum(axis=1)]))
        return per_char

    running = [[0] * chi.order for chi in chars]
    out: list[list[Cyclo]] = [[] for _ in chars]
    for per_char in ordered_map(work, bounds, resolve_threads(threads)):
        for c, (at_cps, total) in enumerate(per_char):
            e = chars[c].order
            for sums in at_cps:
                out[c].append(from_power_sums(e, [r + s for r, s in zip(running[c], sums)]))
            running[c] = [r + s for r, s in zip(running[c], total)]
    return out


def accumulate_character_moment(
    D: int,
    chi: ClassCharacter,
    x_max: int,
    checkpoints=None,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int | None = None,
) -> MomentReport:
    """sum_{n<=x} |b_chi(n)|^2 over prime-to-2 ideals, exactly."""
    if chi.group.disc != D:
        raise ValueError("character is not defined on the class group of D")
    cps = _check_checkpoints(default_checkpoints(x_max) if checkpoints is None else checkpoints, x_max)
    sums = _character_sums(chi.group, [chi], x_max, cps, chunk_size, threads)[0]
    return MomentReport(f"D={D} order={chi.order}", cps, [_exact(v) for v in sums])


def parseval_check(D: int, x: int, G: FormClassGroup | None = None) -> tuple[int, Cyclo]:
    """(h * sum_{n<=x} sum_c J(c,n)^2, sum_chi M_chi(x)); the two must be equal."""
    G = G or enumerate_class_group(D)
    chars = character_table(G)
    J = class_counts_sweep(G, 1, x + 1, coprime_to=2)
    lhs = len(G) * int((J**2).sum())
    sums = _character_sums(G, chars, x, [x], max(x, 1), 1)
    rhs = sum((s[0] for s in sums), Cyclo.rational(0))
    return lhs, rhs


def cross_term(D: int, chi: ClassCharacter, x: int) -> tuple[Cyclo, int, Cyclo]:
    """(sum a_n b_chi(n), sum a_n^2, sum |b_chi(n)|^2) for n <= x."""
    J = class_counts_sweep(chi.group, 1, x + 1, coprime_to=2)
    a = J.sum(axis=0)
    rows = power_rows(chi, J)
    cross = from_power_sums(chi.order, rows @ a)
    m = _character_sums(chi.group, [chi], x, [x], max(x, 1), 1)[0][0]
    return cross, int((a * a).sum()), m


# -- fits ------------------------------------------------------------------


@dataclass
class FitSummary:
    checkpoints: list[int]
    ratio_main: list[float]
    ratio_full: list[float] | None
    slope: float
    slope_ratio: float
    converging: bool

    def as_dict(self) -> dict:
        return {
            "checkpoints": self.checkpoints,
            "ratio_main": self.ratio_main,
            "ratio_full": self.ratio_full,
            "slope": self.slope,
            "slope_ratio": self.slope_ratio,
            "converging": self.converging,
        }


def fit_asymptotic(report: MomentReport, C, alpha: float | None = None) -> FitSummary:
    """Compare S(x) with C x log x (and C (x log x + alpha x)) across checkpoints.

    ``converging`` says whether |ratio - 1| never grows from one checkpoint to
    the next, using the full model when alpha is given.
    """
    xs = report.checkpoints
    if len(xs) < 4 or xs[-1] < 100 * xs[0]:
        raise ValueError("fit needs >= 4 checkpoints spanning >= 2 decades")
    C = float(C)
    vals = report.values()
    main = [s / (C * _xlogx(x)) for s, x in zip(vals, xs)]
    full = None
    if alpha is not None:
        full = [s / (C * (_xlogx(x) + alpha * x)) for s, x in zip(vals, xs)]
    track = full if full is not None else main
    dev = [abs(r - 1) for r in track]
    converging = all(b <= a for a, b in zip(dev, dev[1:]))
    slope = _slope(xs, vals)
    return FitSummary(xs, main, full, slope, slope / C, converging)


@dataclass
class IdealMomentReport:
    N: int
    branch: str
    A: float
    secondary: float
    report: MomentReport
    ratio: list[float | None]
    ratio_full: list[float | None]
    slope_ratio: float | None


def nowak_check(
    N: int,
    x_max: int,
    checkpoints=None,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int | None = None,
) -> IdealMomentReport:
    """sum a_n^2 over the prime-to-2 ideals of Q(sqrt -N) against A x log x."""
    require_squarefree(N)
    if N % 4 != 3:
        raise ValueError("needs N = 3 mod 4")
    D = -N
    G = enumerate_class_group(D)
    trivial = character_table(G)[0]
    rep = accumulate_character_moment(D, trivial, x_max, checkpoints, chunk_size, threads)
    A = odd_ideal_constant(N)
    B = odd_ideal_secondary(N)
    vals = rep.values()
    ratio = [s / (A * _xlogx(x)) if x > 1 else None for s, x in zip(vals, rep.checkpoints)]
    full = [s / (A * (_xlogx(x) + B * x)) for s, x in zip(vals, rep.checkpoints)]
    sl = rep.slope_estimate
    branch = "-N=1 mod 8" if kronecker(D, 2) == 1 else "-N=5 mod 8"
    return IdealMomentReport(N, branch, A, B, rep, ratio, full, None if sl is None else sl / A)


# -- growth of character moments -------------------------------------------


@dataclass
class ProbeRow:
    index: int
    order: int
    genus: bool
    slope: float
    relative_slope: float
    growth: str

    @property
    def agrees(self) -> bool:
        return (self.growth == "xlogx-like") == self.genus


def genus_pole_probe(
    D: int,
    x_max: int,
    checkpoints=None,
    threshold: float = GROWTH_THRESHOLD,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int | None = None,
) -> list[ProbeRow]:
    """Classify each character's moment M(x) as x log x-like or x-like.

    The slope of M(x)/x against log x is compared with the trivial
    character's slope; a ratio above ``threshold`` means x log x growth.
    """
    G = enumerate_class_group(D)
    chars = character_table(G)
    cps = geometric_checkpoints(min(1000, x_max), x_max) if checkpoints is None else checkpoints
    cps = _check_checkpoints(cps, x_max)
    sums = _character_sums(G, chars, x_max, cps, chunk_size, threads)
    slopes = [_slope(cps, [float(v) for v in s]) for s in sums]
    base = slopes[0]
    rows = []
    for i, (chi, sl) in enumerate(zip(chars, slopes)):
        rel = sl / base if base else float("nan")
        growth = "xlogx-like" if rel > threshold else "x-like"
        rows.append(ProbeRow(i, chi.order, is_genus_character(chi), sl, rel, growth))
    return rows


def probe_csv(rows: list[ProbeRow]) -> str:
    lines = ["character,order,genus,slope,relative_slope,growth,agrees"]
    for r in rows:
        lines.append(
            f"{r.index},{r.order},{str(r.genus).lower()},{fmt_float(r.slope)},"
            f"{fmt_float(r.relative_slope)},{r.growth},{str(r.agrees).lower()}"
        )
    return "\n".join(lines) + "\n"
