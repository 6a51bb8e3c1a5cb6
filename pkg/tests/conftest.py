from functools import lru_cache

import pytest

from bqfmoments.moments import accumulate_r_squared, geometric_checkpoints, nowak_check

X_BIG = 10**7
FIT_CHECKPOINTS = geometric_checkpoints(10**5, X_BIG, per_decade=4)


@lru_cache(maxsize=None)
def r2_report(N: int):
    return accumulate_r_squared(N, X_BIG, FIT_CHECKPOINTS)


@lru_cache(maxsize=None)
def ideal_report(N: int):
    return nowak_check(N, X_BIG, FIT_CHECKPOINTS)


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line straight to the terminal, then assert."""

    def emit(label: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{label}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit
