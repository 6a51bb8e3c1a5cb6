import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bqfmoments.arith import divisors
from bqfmoments.forms import enumerate_class_group, reduce
from bqfmoments.ideals import (
    CELL_MAX,
    J,
    RepCountLedger,
    bulk_counts,
    class_counts_sweep,
    enumerate_ideals,
    form_counts,
    ideal_count_table,
    lattice_points,
    project_class,
    r_direct,
    verify_decomposition,
)
from bqfmoments.lfunc import kronecker


def naive_r(N, n):
    """Plain double loop over a box; independent of the library sweep."""
    b = int(n**0.5) + 1
    return sum(1 for x in range(-b, b + 1) for y in range(-b, b + 1) if x * x + N * y * y == n)


@pytest.mark.parametrize("N, n, r", [(3, 1, 2), (3, 7, 4), (3, 4, 6), (1, 25, 12), (7, 8, 4)])
def test_r_direct_examples(N, n, r):
    assert r_direct(N, n) == r == naive_r(N, n)


def test_bulk_counts_oracle_vectors():
    # r(8) = 0 and r(9) = 2 for x^2 + 3y^2 (9 = (+-3)^2)
    assert bulk_counts(3, 10).counts.tolist() == [naive_r(3, n) for n in range(1, 11)]
    assert bulk_counts(3, 10).counts.tolist() == [2, 0, 2, 6, 0, 0, 4, 0, 2, 0]
    assert bulk_counts(1, 5).counts.tolist() == [4, 4, 0, 4, 8]
    assert bulk_counts(5, 0).counts.size == 0


@pytest.mark.parametrize("N", [1, 2, 3, 5, 7, 11, 15])
def test_bulk_counts_match_direct(N):
    led = bulk_counts(N, 3000, chunk_size=257)
    assert [led[n] for n in range(1, 3001)] == [r_direct(N, n) for n in range(1, 3001)]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([1, 2, 3, 6, 7, 10, 15, 30]), st.integers(0, 5000), st.integers(1, 2000), st.integers(1, 3))
def test_bulk_counts_chunking_invariant(N, x_max, chunk, threads):
    ref = bulk_counts(N, x_max, chunk_size=1 << 20, threads=1)
    got = bulk_counts(N, x_max, chunk_size=chunk, threads=threads)
    assert np.array_equal(ref.counts, got.counts)
    assert got.total() == lattice_points(N, x_max)


def test_ledger_roundtrip(tmp_path):
    led = bulk_counts(7, 1000)
    led.to_binary(tmp_path / "r.bin")
    back = RepCountLedger.from_binary(tmp_path / "r.bin")
    assert back.N == 7 and back.x_max == 1000 and np.array_equal(back.counts, led.counts)
    raw = (tmp_path / "r.bin").read_bytes()
    assert raw[:4] == b"BQF1" and len(raw) == 20 + 2 * 1000
    led.to_csv(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "n,count" and lines[4] == f"4,{led[4]}"


def test_ledger_rejects_bad_file(tmp_path):
    (tmp_path / "bad.bin").write_bytes(b"XXXX" + bytes(16))
    with pytest.raises(ValueError):
        RepCountLedger.from_binary(tmp_path / "bad.bin")


def test_overflow_is_reported():
    from bqfmoments.ideals import _to_cells

    with pytest.raises(OverflowError, match=r"\(5\)"):
        _to_cells(1, 3, np.array([0, 0, CELL_MAX + 1]))


def test_lattice_points_small():
    assert lattice_points(1, 1) == 4 and lattice_points(1, 2) == 8 and lattice_points(3, 10) == 16


def test_form_counts_match_brute_force():
    for f in [(1, 0, 1), (2, 2, 3), (1, 1, 6), (3, 2, 4), (2, 1, 3)]:
        a, b, c = f
        got = form_counts(f, 5, 200)
        for n in range(5, 200):
            exp = sum(1 for x in range(-30, 31) for y in range(-30, 31) if a * x * x + b * x * y + c * y * y == n)
            assert got[n - 5] == exp, (f, n)


def test_enumerate_ideals_examples():
    G = enumerate_class_group(-20)
    recs = enumerate_ideals(-20, 3, G)
    assert len(recs) == 2
    assert all(G.classes[r.class_index] == reduce((2, 2, 3)) for r in recs)
    for D in (-3, -4, -20, -23, -188):
        one = enumerate_ideals(D, 1)
        assert len(one) == 1 and one[0].class_index == 0
    recs = enumerate_ideals(-7, 9)
    assert [(r.g, r.m) for r in recs] == [(3, 1)]


def test_J_examples():
    assert J(-28, 0, 1, 2) == 1
    assert J(-20, 1, 3, 2) == 2
    assert J(-20, 0, 3, 2) == 0
    assert J(-23, 0, 2, 2) == 0
    assert J(-23, 0, 2.5) == 0


def test_J_rejects_bad_coprimality():
    with pytest.raises(ValueError):
        J(-20, 0, 3, 3)


@pytest.mark.parametrize("D", [-3, -4, -7, -8, -15, -20, -23, -24, -84, -163])
def test_ideal_totals_match_divisor_sum(D):
    table = ideal_count_table(enumerate_class_group(D), 2000).sum(axis=0)
    for n in range(1, 2001):
        assert table[n] == sum(kronecker(D, d) for d in divisors(n)), n


@pytest.mark.parametrize("D", [-20, -7, -23, -188, -84, -12, -3, -4, -28])
def test_sweep_matches_enumeration(D):
    G = enumerate_class_group(D)
    coprime = 2 if D in (-12, -28, -188) else 1
    sweep = class_counts_sweep(G, 1, 1500, coprime_to=coprime)
    table = ideal_count_table(G, 1499, coprime_to=coprime)
    assert np.array_equal(sweep, table[:, 1:])


def test_projection_examples():
    G92, G23 = enumerate_class_group(-92), enumerate_class_group(-23)
    images = [project_class(23, i, G92, G23) for i in range(3)]
    assert images[0] == 0 and sorted(images) == [0, 1, 2]
    G44, G11 = enumerate_class_group(-44), enumerate_class_group(-11)
    assert [project_class(11, i, G44, G11) for i in range(3)] == [0, 0, 0]


@pytest.mark.parametrize("N", [3, 7, 11, 23])
def test_decomposition_identity(N):
    rep = verify_decomposition(N, 3000)
    assert rep.ok, rep.failures[:5]


def test_decomposition_small_cases():
    # n=4, N=3: r=6, no odd-norm ideal of norm 4, w(-3) * J(c2, 1) = 6
    assert r_direct(3, 4) == 6 and J(-12, 0, 4, 2) == 0 and J(-3, 0, 1) == 1
    with pytest.raises(ValueError):
        verify_decomposition(5, 10)
