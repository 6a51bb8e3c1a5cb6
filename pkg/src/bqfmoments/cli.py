"""Command-line entry point: ``bqf <subcommand> ...``.

Exit status is 0 on success, 1 when an exact identity fails and 2 for
invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

from .arith import divisors, fmt_float, is_squarefree, omega, require_discriminant, require_squarefree
from .characters import InvariantError, character_table, decompose_J, orthogonality_defects
from .forms import (
    class_number,
    enumerate_class_group,
    genus_analysis,
    is_fundamental,
    is_idoneal,
    is_solvable_paper,
)
from .ideals import (
    DEFAULT_CHUNK,
    bulk_counts,
    enumerate_ideals,
    ideal_count_table,
    r_direct,
    verify_decomposition,
)
from .lfunc import constants_bundle, kronecker, leading_constant, mueller_A, mueller_constant
from .moments import (
    GROWTH_THRESHOLD,
    accumulate_r_squared,
    default_checkpoints,
    genus_pole_probe,
    nowak_check,
    probe_csv,
)

EXIT_OK, EXIT_IDENTITY, EXIT_USAGE = 0, 1, 2
SUITES = ("remark31", "decomposition", "h2relation", "orthogonality", "oracle")


class UsageError(ValueError):
    pass


def _int_arg(text: str) -> int:
    """Integer that may be written in exponent form, such as 1e7."""
    try:
        v = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v != v.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def _checkpoints_arg(text: str) -> list[int]:
    return [_int_arg(t) for t in text.split(",") if t.strip()]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _round_floats(obj):
    if isinstance(obj, float):
        return float(fmt_float(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _dumps(obj) -> str:
    return json.dumps(_round_floats(obj), indent=2, sort_keys=True) + "\n"


def _need(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def _squarefree_n(args) -> int:
    N = _need(args.n, "--n")
    try:
        return require_squarefree(N)
    except ValueError as exc:
        raise UsageError(str(exc))


# -- subcommands -----------------------------------------------------------


def _group_report(D: int) -> dict:
    G = enumerate_class_group(D)
    gi = genus_analysis(G)
    return {
        "D": D,
        "h": len(G),
        "forms": [list(f) for f in G.classes],
        "orders": [G.order(i) for i in range(len(G))],
        "genera": gi.num_genera,
        "one_class_per_genus": gi.one_class_per_genus,
        "fundamental": is_fundamental(D),
    }


def cmd_classgroup(args) -> int:
    N = _squarefree_n(args)
    out = {
        "N": N,
        "t": omega(N),
        "solvable_paper": is_solvable_paper(N),
        "idoneal": is_idoneal(N),
        "groups": [_group_report(-4 * N)],
    }
    if N % 4 == 3:
        out["groups"].append(_group_report(-N))
    if args.format == "csv":
        lines = ["D,h,genera,a,b,c,order"]
        for g in out["groups"]:
            for f, o in zip(g["forms"], g["orders"]):
                lines.append(f"{g['D']},{g['h']},{g['genera']},{f[0]},{f[1]},{f[2]},{o}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_dumps(out), args.out)
    return EXIT_OK


def cmd_constants(args) -> int:
    N = _squarefree_n(args)
    _emit(_dumps(constants_bundle(N).to_json()), args.out)
    return EXIT_OK


def _suite_remark31(args) -> tuple[bool, str]:
    """A_Q = C exactly, and A(4N) = 2^omega(2N).

    The second reads 2^(t+1), t = omega(N), for odd N; for even N the factor
    A(8) = 2 makes it 2^t, so the literal form is counted, not failed.
    """
    n_max = args.nmax or 10_000
    bad, literal_off = [], 0
    for N in range(1, n_max + 1):
        if not is_squarefree(N):
            continue
        A = mueller_A(4 * N)
        if mueller_constant(((2, 0), (0, 2 * N))) != leading_constant(N) or A != 2 ** omega(2 * N):
            bad.append(N)
        literal_off += A != 2 ** (omega(N) + 1)
    return not bad, (
        f"squarefree N <= {n_max}, failures {bad[:10]}; "
        f"A(4N) = 2^(t+1) literally fails for {literal_off} even N"
    )


def _decomposition_targets(args) -> list[int]:
    if args.n is not None:
        N = _squarefree_n(args)
        if N % 4 != 3:
            raise UsageError("decomposition suite needs N = 3 mod 4")
        return [N]
    return [N for N in range(3, 101, 4) if is_squarefree(N)]


def _suite_decomposition(args) -> tuple[bool, str]:
    n_max = args.nmax or 10_000
    targets = _decomposition_targets(args)
    bad = {}
    for N in targets:
        rep = verify_decomposition(N, n_max)
        if not rep.ok:
            bad[N] = rep.failures[:3]
    return not bad, f"N in {targets[0]}..{targets[-1]} ({len(targets)} values), n <= {n_max}, failures {bad}"


def _suite_h2relation(args) -> tuple[bool, str]:
    n_max = args.nmax or 5000
    bad = []
    for N in range(7, n_max + 1, 4):
        if is_squarefree(N) and class_number(-4 * N) != (2 - kronecker(-N, 2)) * class_number(-N):
            bad.append(N)
    special = class_number(-12) == 1 and class_number(-3) == 1
    return not bad and special, f"3 < N <= {n_max}, failures {bad[:10]}; N=3 special case h(-12)=1: {special}"


def _suite_orthogonality(args) -> tuple[bool, str]:
    targets = [_squarefree_n(args)] if args.n is not None else [7, 11, 23, 47]
    n_max = args.nmax or 1000
    bad = []
    for N in targets:
        G = enumerate_class_group(-4 * N)
        table = character_table(G)
        if orthogonality_defects(table):
            bad.append((N, "table"))
            continue
        try:
            for n in range(1, n_max + 1):
                for c in range(len(G)):
                    decompose_J(G, table, n, c, coprime_to=2)
        except InvariantError as exc:
            bad.append((N, str(exc)))
    return not bad, f"N in {targets}, n <= {n_max}, failures {bad}"


def _suite_oracle(args) -> tuple[bool, str]:
    n_max = args.nmax or 10_000
    bad = []
    for N in (1, 2, 3, 5, 7, 11, 15):
        led = bulk_counts(N, n_max, threads=args.threads)
        if any(led[n] != r_direct(N, n) for n in range(1, n_max + 1)):
            bad.append(("bulk", N))
    for D in (-3, -4, -7, -8, -15, -20, -23, -84):
        G = enumerate_class_group(D)
        table = ideal_count_table(G, n_max, coprime_to=1).sum(axis=0)
        for n in range(1, n_max + 1):
            if int(table[n]) != sum(kronecker(D, d) for d in divisors(n)):
                bad.append(("ideals", D, n))
                break
        if len(enumerate_ideals(D, 1)) != 1:
            bad.append(("unit ideal", D))
    return not bad, f"n <= {n_max}, failures {bad}"


_SUITE_FN = {
    "remark31": _suite_remark31,
    "decomposition": _suite_decomposition,
    "h2relation": _suite_h2relation,
    "orthogonality": _suite_orthogonality,
    "oracle": _suite_oracle,
}


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else [args.suite]
    results = {}
    lines = []
    for name in names:
        ok, detail = _SUITE_FN[name](args)
        results[name] = {"pass": ok, "detail": detail}
        lines.append(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    if args.format == "json":
        _emit(_dumps(results), args.out)
    else:
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(r["pass"] for r in results.values()) else EXIT_IDENTITY


def _checkpoints(args, x_max: int) -> list[int]:
    cps = args.checkpoints if args.checkpoints is not None else default_checkpoints(x_max)
    if cps and max(cps) > x_max:
        raise UsageError("checkpoints exceed --xmax")
    return cps


def cmd_moments(args) -> int:
    N = _squarefree_n(args)
    x_max = _need(args.xmax, "--xmax")
    if x_max < 0:
        raise UsageError("--xmax must be nonnegative")
    cps = _checkpoints(args, x_max)
    bundle = constants_bundle(N)
    if args.kind == "ideals":
        if N % 4 != 3:
            raise UsageError("--kind ideals needs N = 3 mod 4")
        nr = nowak_check(N, x_max, cps, args.chunk_size, args.threads)
        rep = nr.report
        rep.C, rep.alpha = nr.A, nr.secondary
        rep.extra = {"branch": nr.branch, "A": nr.A, "secondary": nr.secondary}
    else:
        rep = accumulate_r_squared(N, x_max, cps, args.chunk_size, args.threads, bundle.alpha)
    if args.format == "json":
        _emit(rep.to_json(bundle.to_json()), args.out)
    else:
        _emit(rep.to_csv(), args.out)
    return EXIT_OK


def cmd_characters(args) -> int:
    D = _need(args.d, "--d")
    try:
        require_discriminant(D)
    except ValueError as exc:
        raise UsageError(str(exc))
    x_max = _need(args.xmax, "--xmax")
    if x_max < 10:
        raise UsageError("--xmax must be at least 10 for a growth fit")
    cps = args.checkpoints
    if cps is not None and max(cps) > x_max:
        raise UsageError("checkpoints exceed --xmax")
    rows = genus_pole_probe(D, x_max, cps, args.threshold, args.chunk_size, args.threads)
    if args.format == "json":
        _emit(_dumps([{
            "character": r.index, "order": r.order, "genus": r.genus, "slope": r.slope,
            "relative_slope": r.relative_slope, "growth": r.growth, "agrees": r.agrees,
        } for r in rows]), args.out)
    else:
        _emit(probe_csv(rows), args.out)
    return EXIT_OK if all(r.agrees for r in rows) else EXIT_IDENTITY


def cmd_export_ledger(args) -> int:
    N = _squarefree_n(args)
    x_max = _need(args.xmax, "--xmax")
    out = _need(args.out, "--out")
    if x_max < 0:
        raise UsageError("--xmax must be nonnegative")
    led = bulk_counts(N, x_max, args.chunk_size, args.threads)
    if args.format == "binary":
        led.to_binary(out)
    else:
        led.to_csv(out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=_int_arg, help="squarefree N")
    common.add_argument("--d", type=_int_arg, help="negative discriminant D")
    common.add_argument("--xmax", type=_int_arg, help="largest n summed (1e7 style accepted)")
    common.add_argument("--nmax", type=_int_arg, help="bound for verification suites")
    common.add_argument("--chunk-size", type=_int_arg, default=DEFAULT_CHUNK)
    common.add_argument("--threads", type=_int_arg, default=None, help="worker threads (env BQF_THREADS)")
    common.add_argument("--checkpoints", type=_checkpoints_arg, help="comma separated x values")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=0, help="reserved for sampling suites")

    p = argparse.ArgumentParser(prog="bqf", description="Binary quadratic forms and second moments.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, formats=("json", "csv"), **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.add_argument("--format", choices=formats, default=formats[0])
        sp.set_defaults(func=fn)
        return sp

    add("classgroup", cmd_classgroup, help="reduced forms, group structure, genera")
    add("constants", cmd_constants, formats=("json",), help="C(N), alpha(N) and related constants")
    v = add("verify", cmd_verify, formats=("text", "json"), help="exact identity suites")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    m = add("moments", cmd_moments, formats=("csv", "json"), help="sum of r(n)^2 against the model")
    m.add_argument("--kind", choices=("r2", "ideals"), default="r2")
    c = add("characters", cmd_characters, formats=("csv", "json"), help="growth of character moments")
    c.add_argument("--threshold", type=float, default=GROWTH_THRESHOLD)
    add("export-ledger", cmd_export_ledger, formats=("csv", "binary"), help="write r(n) for n <= xmax")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be positive")
    if args.chunk_size < 1:
        parser.error("--chunk-size must be positive")
    try:
        return args.func(args)
    except (UsageError, OverflowError) as exc:
        print(f"bqf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantError, ArithmeticError) as exc:
        print(f"bqf: identity failure: {exc}", file=sys.stderr)
        return EXIT_IDENTITY


if __name__ == "__main__":
    sys.exit(main())
