import random

import numpy as np
import pytest

from sumfree.fields import PrimeFieldCtx
from sumfree.subsets import FieldSubset


def random_sum_free(ctx, rng: random.Random, min_density: float = 0.0, tries: int = 50,
                    stop: float = 1.0):
    """Random sum-free subset of F_p by greedy insertion in shuffled order.

    x may join A when x is not in A + A and neither 2x nor A + x meets A.  With
    ``stop < 1`` insertion halts after that fraction of the shuffled candidates,
    giving sets that are not maximal.  Rejection-samples until the density
    reaches ``min_density``.
    """
    p = ctx.order
    for _ in range(tries):
        members = np.zeros(p, dtype=bool)
        sums = np.zeros(p, dtype=bool)  # A + A
        order = list(range(1, p))
        rng.shuffle(order)
        chosen = []
        for x in order[: max(1, int(stop * (p - 1)))]:
            if sums[x] or members[2 * x % p]:
                continue
            els = np.array(chosen, dtype=np.int64)
            shifted = (els + x) % p
            if members[shifted].any():
                continue
            chosen.append(x)
            members[x] = True
            sums[shifted] = True
            sums[2 * x % p] = True
        A = FieldSubset(ctx, members)
        if A.size and A.density >= min_density:
            return A
    raise RuntimeError("density target not reached")


def random_dense_sum_free(ctx, rng: random.Random, keep: float = None):
    """Random subset of a random dilate of the middle third {x : p < 3x < 2p}."""
    p = ctx.order
    d = rng.randrange(1, p)
    keep = rng.uniform(0.3, 1.0) if keep is None else keep
    els = [d * x % p for x in range(p // 3 + 1, (2 * p) // 3 + 1) if p < 3 * x < 2 * p]
    chosen = [x for x in els if rng.random() < keep] or els[:1]
    return FieldSubset.from_elements(ctx, chosen)


def random_inverse_closed_sum_free(ctx, rng: random.Random):
    """Greedy union of inversion orbits in shuffled order."""
    from sumfree.subsets import is_sum_free

    orbits = ctx.inversion_orbits()
    rng.shuffle(orbits)
    chosen = []
    for o in orbits:
        trial = FieldSubset.from_elements(ctx, chosen + list(o))
        if is_sum_free(trial):
            chosen += list(o)
    return FieldSubset.from_elements(ctx, chosen)


def naive_is_sum_free(elements, p):
    s = set(elements)
    return all((a + b) % p not in s for a in s for b in s)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def f5():
    return PrimeFieldCtx(5)


@pytest.fixture
def f13():
    return PrimeFieldCtx(13)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
