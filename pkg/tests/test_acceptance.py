"""Acceptance criteria, one test each, at the stated tolerances.

Each check prints a single PASS/FAIL line; the lines are repeated in the
pytest terminal summary.  Run directly with ``python tests/test_acceptance.py``
to get only those lines.
"""

import io
import math
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import random_dense_sum_free, random_sum_free  # noqa: E402
from sumfree.cli import main as cli_main  # noqa: E402
from sumfree.fields import BinaryFieldCtx, PrimeFieldCtx  # noqa: E402
from sumfree.search import max_sum_free, max_sum_free_inverse_closed  # noqa: E402
from sumfree.spectrum import (  # noqa: E402
    check_cube_sum,
    check_doubling_bounds,
    check_parseval,
    check_self_inverse_bound,
    check_sum_of_cubes,
    check_sumfree_alpha_bounds,
    full_spectrum,
    kloosterman_char2_all,
    kloosterman_prime_matrix,
    moreover_shifts,
)
from sumfree.subsets import FieldSubset, construct_char2, is_inverse_closed, is_sum_free  # noqa: E402

RESULTS: list[str] = []


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})"
    RESULTS.append(line)
    print(line)


def run_cli(*argv):
    out = io.StringIO()
    return cli_main(list(argv), out=out), out.getvalue()


# ---------------------------------------------------------------------------
# criterion 1


def criterion_1():
    t0 = time.perf_counter()
    code, out = run_cli("verify", "--theorem")
    elapsed = time.perf_counter() - t0
    lines = out.splitlines()[:-1]
    failed = [ln.split()[0] for ln in lines if "PROVED" not in ln]
    ok = code == 0 and not failed and len(lines) == 11 and elapsed < 120
    detail = f"{len(lines) - len(failed)}/11 proved in {elapsed:.2f}s, exit {code}"
    if failed:
        detail += "; not proved: " + ", ".join(failed)
    return ok, detail


# ---------------------------------------------------------------------------
# criterion 2: independent brute force over all subsets of F_p*


def brute_force(p: int) -> tuple[int, int]:
    """(largest sum-free size, largest sum-free inverse-closed size) over all A in F_p*.

    Vectorised over every bitmask: A is sum-free iff (A + a) and A are disjoint
    for each a in A; inverse-closed iff the bit permutation x -> 1/x fixes it.
    """
    full = (1 << p) - 1
    m = np.arange(1 << (p - 1), dtype=np.uint64) << np.uint64(1)  # bit 0 (zero) never set
    bad = np.zeros(m.shape, dtype=bool)
    for a in range(1, p):
        has_a = (m >> np.uint64(a)) & np.uint64(1)
        rot = ((m << np.uint64(a)) | (m >> np.uint64(p - a))) & np.uint64(full)
        bad |= (has_a == 1) & ((rot & m) != 0)
    inv = np.zeros_like(m)
    for x in range(1, p):
        inv |= ((m >> np.uint64(x)) & np.uint64(1)) << np.uint64(pow(x, -1, p))
    sizes = np.bitwise_count(m)
    ok = ~bad
    return int(sizes[ok].max()), int(sizes[ok & (inv == m)].max())


def criterion_2():
    t0 = time.perf_counter()
    mismatches = []
    mu5 = mu7 = None
    for p in (3, 5, 7, 11, 13, 17, 19, 23):
        ctx = PrimeFieldCtx(p)
        sigma, mu = brute_force(p)
        s = max_sum_free(ctx).best_size
        m = max_sum_free_inverse_closed(ctx).best_size
        if (s, m) != (sigma, mu):
            mismatches.append(f"p={p}: search ({s},{m}) vs brute ({sigma},{mu})")
        if p == 5:
            mu5 = m
        if p == 7:
            mu7 = m
    elapsed = time.perf_counter() - t0
    ok = not mismatches and mu5 == 2 and mu7 == 2 and elapsed < 60
    detail = f"mu*5={mu5}, mu*7={mu7}, {elapsed:.2f}s"
    if mismatches:
        detail += "; " + "; ".join(mismatches)
    return ok, detail


# ---------------------------------------------------------------------------
# criterion 3


CD_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43]


def criterion_3():
    bad = []
    for p in CD_PRIMES:
        for seeded in (True, False):
            size = max_sum_free(PrimeFieldCtx(p), seed_incumbent=seeded).best_size
            if 3 * size > p + 1:
                bad.append((p, size))
    for p in (3, 5, 7, 11, 13, 17, 19, 23):
        size = brute_force(p)[0]
        if 3 * size > p + 1:
            bad.append((p, size))
    return not bad, f"{len(CD_PRIMES)} primes up to {CD_PRIMES[-1]}, violations {bad or 'none'}"


# ---------------------------------------------------------------------------
# criterion 4


def criterion_4():
    t0 = time.perf_counter()
    worst = 0.0
    bad = []
    for n in range(2, 15):
        ctx = BinaryFieldCtx(n)
        A = construct_char2(ctx, check=False)
        q = ctx.order
        bound = (1 + 2 * math.sqrt(q)) / (4 * q)
        dev = abs(A.density - 0.25)
        worst = max(worst, dev / bound)
        if not (is_sum_free(A) and is_inverse_closed(A) and dev <= bound):
            bad.append(n)
    elapsed = time.perf_counter() - t0
    return not bad and elapsed < 30, (f"n=2..14, max |alpha-1/4|/bound = {worst:.3f}, "
                                      f"{elapsed:.2f}s, failures {bad or 'none'}")


# ---------------------------------------------------------------------------
# criterion 5


def criterion_5():
    rng = random.Random(5)
    worst = {}
    ok = True
    for p in (101, 1009, 10007):
        ctx = PrimeFieldCtx(p)
        tol = 1e-9 * (p / 1000 + 1)
        wp = wc = 0.0
        for i in range(100):
            if i % 2:
                A = random_dense_sum_free(ctx, rng)
            else:
                A = random_sum_free(ctx, rng, stop=rng.uniform(0.1, 1.0))
            assert is_sum_free(A)
            S = full_spectrum(A)
            wp = max(wp, check_parseval(S))
            wc = max(wc, check_sum_of_cubes(A, S))
        worst[p] = (wp, wc)
        ok &= wp < tol and wc < tol
    detail = ", ".join(f"p={p}: parseval {a:.1e}, cubes {b:.1e}" for p, (a, b) in worst.items())
    return ok, detail


# ---------------------------------------------------------------------------
# criterion 6


def criterion_6():
    t0 = time.perf_counter()
    from sympy import primerange

    worst = 0.0
    for p in primerange(3, 200):
        K = kloosterman_prime_matrix(PrimeFieldCtx(p))[1:, 1:]
        worst = max(worst, float(np.abs(K).max()) / (2 * math.sqrt(p)))
    worst2 = 0.0
    for n in range(1, 11):
        ctx = BinaryFieldCtx(n)
        K = kloosterman_char2_all(ctx)[1:]
        worst2 = max(worst2, float(np.abs(K).max()) / (2 * math.sqrt(ctx.order)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1 + 1e-12 and worst2 <= 1 and elapsed < 120
    return ok, f"max |K|/2sqrt(p) = {worst:.6f}, max |K|/2sqrt(q) = {worst2:.6f}, {elapsed:.2f}s"


# ---------------------------------------------------------------------------
# criterion 7


def _inequalities(A: FieldSubset, S, sum_free: bool, inv_closed: bool):
    """Every applicable record for A; yields (name, holds)."""
    p = S.p
    if sum_free:
        yield "cor34_first", check_sumfree_alpha_bounds(S)[0].holds
        yield "cor33_full", check_cube_sum(S).holds
    if inv_closed:
        interleaved = [x for r in S.rs for x in (r, (-r) % p)]
        for m in range(0, p):
            yield "prop37", check_self_inverse_bound(A, interleaved[:m], S).holds
        for k in range(1, (p - 1) // 2 + 1):
            yield "prop37_moreover", check_self_inverse_bound(A, moreover_shifts(S, k), S).holds
    for r in range(1, p):
        for rec in check_doubling_bounds(S, r):
            yield rec.name, rec.holds


def _tally(counts, violations, A):
    S = full_spectrum(A)
    sf, ic = is_sum_free(A), is_inverse_closed(A)
    for name, holds in _inequalities(A, S, sf, ic):
        counts[name] = counts.get(name, 0) + 1
        if not holds:
            violations.append((name, A.field.p, list(A)))


def criterion_7():
    counts: dict = {}
    violations: list = []
    for p in (5, 7, 11):
        ctx = PrimeFieldCtx(p)
        for bits in range(1, 1 << (p - 1)):
            _tally(counts, violations, FieldSubset.from_elements(
                ctx, [x + 1 for x in range(p - 1) if bits >> x & 1]))
    rng = random.Random(7)
    ctx = PrimeFieldCtx(101)
    orbits = ctx.inversion_orbits()
    for i in range(10 ** 4):
        kind = i % 3
        if kind == 0:
            A = random_sum_free(ctx, rng, stop=rng.uniform(0.05, 1.0))
        elif kind == 1:
            A = random_dense_sum_free(ctx, rng)
        else:
            keep = rng.random()
            chosen = [x for o in orbits if rng.random() < keep for x in o] or list(orbits[0])
            A = FieldSubset.from_elements(ctx, chosen)
        _tally(counts, violations, A)
    summary = ", ".join(f"{k} {v}" for k, v in sorted(counts.items()))
    return not violations, f"checks: {summary}; violations {len(violations)}"


# ---------------------------------------------------------------------------
# criterion 8


FIGURE_RANGES = [
    ("E2b-reduced", "0.33", "0.45"),
    ("E3", "0.45", "0.7455"),
    ("E4a", "0.7455", "0.809016"),
    ("E4b", "0.7455", "0.809016"),
]


def criterion_8():
    ok = True
    parts = []
    e3_min = None
    for expr, lo, hi in FIGURE_RANGES:
        code, out = run_cli("figure", expr, lo, hi, "200")
        rows = [ln.split(",") for ln in out.splitlines() if ln and not ln.startswith(("#", "x"))]
        xs = [float(a) for a, _ in rows]
        vals = [float(b) for _, b in rows]
        ok &= code == 0 and len(vals) == 200 and min(vals) > 0.75
        parts.append(f"{expr} min {min(vals):.6f}")
        if expr == "E3":
            i = int(np.argmin(vals))
            e3_min = (xs[i], vals[i])
    ok &= e3_min is not None and e3_min[0] == 0.7455 and 0.75009 <= e3_min[1] <= 0.75012
    parts.append(f"E3 minimum {e3_min[1]:.9f} at x={e3_min[0]}")
    return ok, "; ".join(parts)


# ---------------------------------------------------------------------------

CRITERIA = [
    (1, "certificate suite proves all 11 claims", criterion_1),
    (2, "exhaustive search equals brute force, p <= 23", criterion_2),
    (3, "Cauchy-Davenport cap p*sigma <= (p+1)/3", criterion_3),
    (4, "characteristic-2 construction, n = 2..14", criterion_4),
    (5, "Parseval and sum-of-cubes residuals", criterion_5),
    (6, "Weil bounds for Kloosterman sums", criterion_6),
    (7, "inequality suite, exhaustive and random", criterion_7),
    (8, "figure data above 0.75, E3 minimum window", criterion_8),
]


@pytest.mark.parametrize("number, title, check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check, tmp_path, monkeypatch):
    monkeypatch.setenv("SUMFREE_RESULTS_DIR", str(tmp_path))
    ok, detail = check()
    report(number, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    import os
    import tempfile

    os.environ["SUMFREE_RESULTS_DIR"] = tempfile.mkdtemp()
    failures = 0
    for number, title, check in CRITERIA:
        ok, detail = check()
        report(number, title, ok, detail)
        failures += not ok
    sys.exit(1 if failures else 0)
