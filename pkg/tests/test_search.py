import itertools
from fractions import Fraction

import pytest

from conftest import naive_is_sum_free
from sumfree.errors import UsageError
from sumfree.fields import BinaryFieldCtx, PrimeFieldCtx
from sumfree.search import (
    SCAN_HEADER,
    conjecture_scan,
    heuristic_search,
    max_sum_free,
    max_sum_free_inverse_closed,
    size_cap,
)
from sumfree.subsets import construct_interval_intersection, is_inverse_closed, is_sum_free


def naive_mu(ctx):
    """Largest sum-free union of inversion orbits, by plain enumeration."""
    orbits = ctx.inversion_orbits()
    best = 0
    for bits in range(1 << len(orbits)):
        els = [x for i, o in enumerate(orbits) if bits >> i & 1 for x in o]
        if len(els) > best and _sum_free(ctx, els):
            best = len(els)
    return best


def naive_sigma(p):
    """Largest sum-free subset of F_p, by enumerating subsets of F_p* largest first."""
    for k in range((p + 1) // 3 + 1, 0, -1):
        for combo in itertools.combinations(range(1, p), k):
            if naive_is_sum_free(combo, p):
                return k
    return 0


def _sum_free(ctx, els):
    s = set(els)
    return all(ctx.add(a, b) not in s for a in s for b in s)


@pytest.mark.parametrize("p, size", [(3, 1), (5, 2), (7, 2), (11, 4), (13, 4), (17, 6)])
def test_sigma_values(p, size):
    res = max_sum_free(PrimeFieldCtx(p))
    assert res.best_size == size and res.optimal
    assert is_sum_free(res.best_set)


@pytest.mark.parametrize("p, size", [(3, 1), (5, 2), (7, 2), (11, 4), (17, 4), (19, 6)])
def test_mu_values(p, size):
    res = max_sum_free_inverse_closed(PrimeFieldCtx(p))
    assert res.best_size == size and res.optimal
    assert is_sum_free(res.best_set) and is_inverse_closed(res.best_set)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19, 23, 29, 31])
@pytest.mark.parametrize("seeded", [True, False])
def test_mu_matches_naive(p, seeded):
    ctx = PrimeFieldCtx(p)
    assert max_sum_free_inverse_closed(ctx, seed_incumbent=seeded).best_size == naive_mu(ctx)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19])
@pytest.mark.parametrize("seeded", [True, False])
def test_sigma_matches_naive(p, seeded):
    assert max_sum_free(PrimeFieldCtx(p), seed_incumbent=seeded).best_size == naive_sigma(p)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_binary_matches_naive(n):
    ctx = BinaryFieldCtx(n)
    assert max_sum_free_inverse_closed(ctx).best_size == naive_mu(ctx)
    res = max_sum_free(ctx)
    # every sum-free set in GF(2^n) has at most q/2 elements, attained by a trace-1 coset
    assert res.best_size == ctx.order // 2 and res.optimal


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43])
def test_cauchy_davenport_cap(p):
    res = max_sum_free(PrimeFieldCtx(p), seed_incumbent=False)
    assert 3 * res.best_size <= p + 1
    assert res.best_size <= size_cap(res.field)


def test_beyond_limit_falls_back_to_heuristic():
    res = max_sum_free_inverse_closed(PrimeFieldCtx(67))
    assert not res.optimal
    assert is_sum_free(res.best_set) and is_inverse_closed(res.best_set)
    res = max_sum_free(PrimeFieldCtx(13), limit=11, budget=50)
    assert not res.optimal


def test_heuristic_deterministic():
    ctx = PrimeFieldCtx(101)
    a = heuristic_search(ctx, seed=7, budget=500)
    b = heuristic_search(ctx, seed=7, budget=500)
    assert a.best_set == b.best_set and a.best_size == b.best_size
    assert not a.optimal


def test_heuristic_budget_zero_is_greedy():
    ctx = PrimeFieldCtx(31)
    res = heuristic_search(ctx, seed=1, budget=0)
    assert res.best_size > 0 and is_sum_free(res.best_set) and is_inverse_closed(res.best_set)
    # greedy output is maximal: no orbit can be added
    for o in ctx.inversion_orbits():
        if o[0] not in res.best_set:
            bigger = list(res.best_set) + list(o)
            assert not _sum_free(ctx, bigger)


def test_heuristic_rejects_negative_budget():
    with pytest.raises(UsageError):
        heuristic_search(PrimeFieldCtx(7), budget=-1)


@pytest.mark.slow
def test_heuristic_p101_beats_construction():
    ctx = PrimeFieldCtx(101)
    res = heuristic_search(ctx, seed=0, budget=10 ** 5)
    assert res.best_size >= construct_interval_intersection(ctx).size


@pytest.mark.parametrize("p", [11, 23, 31])
@pytest.mark.parametrize("kind", ["mu", "sigma"])
def test_heuristic_never_beats_exhaustive(p, kind):
    ctx = PrimeFieldCtx(p)
    exact = (max_sum_free if kind == "sigma" else max_sum_free_inverse_closed)(ctx)
    for seed in range(3):
        h = heuristic_search(ctx, seed=seed, budget=300, kind=kind)
        assert h.best_size <= exact.best_size


def test_scan_rows():
    rows = conjecture_scan([5, 7, 11, 13])
    r5 = rows[0]
    assert (r5.sigma, r5.mu, r5.sigma_squared, r5.gap) == (
        Fraction(2, 5), Fraction(2, 5), Fraction(4, 25), Fraction(6, 25))
    assert rows[1].sigma == rows[1].mu == Fraction(2, 7)
    assert all(r.mu <= r.sigma and r.optimal for r in rows)
    assert len(r5.csv_fields()) == len(SCAN_HEADER)
    assert r5.csv_fields() == [5, 2, 5, 2, 5, 6, 25, "true"]


def test_scan_limits():
    with pytest.raises(UsageError):
        conjecture_scan([47])
    rows = conjecture_scan([47], heuristic=True, budget=200)
    assert not rows[0].optimal
    with pytest.raises(UsageError):
        conjecture_scan([9])


def test_scan_parallel_matches_serial():
    ps = [5, 7, 11, 13, 17]
    assert conjecture_scan(ps, workers=2) == conjecture_scan(ps)


def test_result_json():
    res = max_sum_free_inverse_closed(PrimeFieldCtx(13))
    js = res.to_json()
    assert js["best_size"] == 4 and js["density"] == "4/13" and js["optimal"] is True
    assert js["best_set"]["elements"] == list(res.best_set)
