"""Largest sum-free (sigma) and sum-free inverse-closed (mu) subsets.

Sets are Python-int bitmasks over the field elements.  The search branches on
*units*: singletons for sigma, inversion orbits {a, 1/a} for mu, each taken
wholly in or out.  Adding an element c to a sum-free set S marks every x with
S + {c} + {x} no longer sum-free; for F_p those are cyclic rotations of S and
of -S, so one add costs a handful of big-int operations.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import UsageError
from .fields import FieldCtx, PrimeFieldCtx
from .subsets import (
    FieldSubset,
    construct_char2,
    construct_interval_intersection,
    is_inverse_closed,
    is_sum_free,
)

EXHAUSTIVE_LIMITS = {
    ("mu", "prime"): 61,
    ("sigma", "prime"): 43,
    ("mu", "binary"): 64,
    ("sigma", "binary"): 64,
}


def exhaustive_limit(kind: str, field: FieldCtx) -> int:
    return EXHAUSTIVE_LIMITS[(kind, field.kind)]


def size_cap(field: FieldCtx) -> int:
    """Upper bound on any sum-free set: (p+1)/3 in F_p, |F|/2 in general."""
    if field.kind == "prime":
        return (field.p + 1) // 3
    return field.order // 2


@dataclass
class SearchResult:
    field: FieldCtx
    kind: str
    best_set: FieldSubset
    best_size: int
    optimal: bool
    nodes_explored: int
    wall_time: float

    @property
    def density(self) -> Fraction:
        return Fraction(self.best_size, self.field.order)

    def to_json(self) -> dict:
        from .subsets import set_to_json

        return {
            "kind": self.kind,
            "field": self.field.descriptor(),
            "best_size": self.best_size,
            "density": f"{self.density.numerator}/{self.density.denominator}",
            "optimal": self.optimal,
            "nodes_explored": self.nodes_explored,
            "wall_time": self.wall_time,
            "best_set": set_to_json(self.best_set),
        }


class _Adder:
    """Incremental forbidden-element bookkeeping for one field."""

    def __init__(self, field: FieldCtx):
        self.field = field
        self.q = field.order
        self.full = (1 << self.q) - 1
        self.prime = field.kind == "prime"
        if self.prime:
            p = field.p
            self.half = [x * ((p + 1) // 2) % p for x in range(p)]

    def _rot(self, m: int, c: int) -> int:
        if c == 0:
            return m
        q = self.q
        return ((m << c) | (m >> (q - c))) & self.full

    def add(self, S: int, N: int, forb: int, c: int) -> tuple[int, int, int]:
        """Add c to S (N is the mask of -S); return the updated (S, N, forb)."""
        S |= 1 << c
        if self.prime:
            q = self.q
            N |= 1 << ((q - c) % q)
            forb |= self._rot(S, c) | self._rot(S, q - c) | self._rot(N, c) | (1 << self.half[c])
        else:
            N = S
            t = S
            while t:
                low = t & -t
                forb |= 1 << ((low.bit_length() - 1) ^ c)
                t ^= low
        return S, N, forb | 1

    def add_unit(self, S: int, N: int, forb: int, unit: Sequence[int]):
        """Add every element of a unit, or return None if that breaks sum-freeness."""
        for c in unit:
            if forb >> c & 1 or S >> c & 1:
                return None
            S, N, forb = self.add(S, N, forb, c)
        return S, N, forb

    def rebuild(self, elements: Iterable[int]):
        S = N = 0
        forb = 1
        for c in elements:
            S, N, forb = self.add(S, N, forb, c)
        return S, N, forb


def _mask(elements: Iterable[int]) -> int:
    m = 0
    for x in elements:
        m |= 1 << int(x)
    return m


def _to_subset(field: FieldCtx, mask: int) -> FieldSubset:
    return FieldSubset.from_elements(field, [i for i in range(field.order) if mask >> i & 1])


def _units(field: FieldCtx, kind: str) -> list[tuple[int, ...]]:
    if kind == "mu":
        return field.inversion_orbits()
    if kind == "sigma":
        return [(x,) for x in range(1, field.order)]
    raise UsageError(f"unknown search kind {kind!r}")


def _seeds(field: FieldCtx, kind: str) -> list[FieldSubset]:
    """Known feasible sets used as initial incumbents."""
    out = []
    if field.kind == "prime" and field.p >= 5:
        if kind == "mu":
            out.append(construct_interval_intersection(field))
        else:
            p = field.p
            out.append(FieldSubset.from_elements(field, [x for x in range(p) if p < 3 * x < 2 * p]))
    elif field.kind == "binary" and field.n >= 2:
        if kind == "mu":
            out.append(construct_char2(field))
        else:
            out.append(FieldSubset(field, field.trace_table.astype(bool)))
    return out


def _branch_and_bound(field: FieldCtx, kind: str, seed_incumbent: bool = True) -> SearchResult:
    t0 = time.perf_counter()
    adder = _Adder(field)
    cap = size_cap(field)
    units = sorted(_units(field, kind), key=lambda u: (-len(u), min(u)))

    start_S = start_N = 0
    start_forb = 1
    pivot_neg_mask = 0
    if kind == "sigma":
        # any nonempty sum-free set has a dilate containing 1
        units = [u for u in units if u != (1,)]
        start_S, start_N, start_forb = adder.add(0, 0, 1, 1)
    else:
        # x -> -x preserves both predicates: require pivot in S or -pivot not in S
        neg = field.neg
        for i, u in enumerate(units):
            nu = tuple(sorted(neg(x) for x in u))
            if nu != tuple(sorted(u)):
                units.insert(0, units.pop(i))
                pivot_neg_mask = _mask(nu)
                break

    masks = [_mask(u) for u in units]
    sizes = [len(u) for u in units]
    n_units = len(units)

    best_mask = start_S
    best = bin(start_S).count("1")
    if seed_incumbent:
        for A in _seeds(field, kind):
            if A.size > best:
                best, best_mask = A.size, _mask(A)
    nodes = 0

    def rec(i: int, S: int, N: int, forb: int, size: int) -> bool:
        nonlocal best, best_mask, nodes
        nodes += 1
        if size > best:
            best, best_mask = size, S
            if best >= cap:
                return True
        avail = [j for j in range(i, n_units) if not masks[j] & forb]
        bound = size + sum(sizes[j] for j in avail)
        if min(bound, cap) <= best or not avail:
            return False
        j = avail[0]
        added = adder.add_unit(S, N, forb, units[j])
        if added is not None and rec(j + 1, *added, size + sizes[j]):
            return True
        if j == 0 and pivot_neg_mask:
            forb |= pivot_neg_mask
        return rec(j + 1, S, N, forb, size)

    if best < cap:
        rec(0, start_S, start_N, start_forb, bin(start_S).count("1"))
    result = _to_subset(field, best_mask)
    assert result.size == best
    assert is_sum_free(result)
    if kind == "mu":
        assert is_inverse_closed(result)
    if field.kind == "prime":
        assert 3 * best <= field.p + 1
    return SearchResult(field, kind, result, best, True, nodes, time.perf_counter() - t0)


def _search(field: FieldCtx, kind: str, limit: Optional[int], seed: int, budget: int,
            seed_incumbent: bool) -> SearchResult:
    limit = exhaustive_limit(kind, field) if limit is None else limit
    if field.order <= limit:
        return _branch_and_bound(field, kind, seed_incumbent)
    return heuristic_search(field, seed=seed, budget=budget, kind=kind)


def max_sum_free(field: FieldCtx, limit: Optional[int] = None, seed: int = 0,
                 budget: int = 10000, seed_incumbent: bool = True) -> SearchResult:
    """Largest sum-free subset; exhaustive within ``limit``, heuristic beyond it."""
    return _search(field, "sigma", limit, seed, budget, seed_incumbent)


def max_sum_free_inverse_closed(field: FieldCtx, limit: Optional[int] = None, seed: int = 0,
                                budget: int = 10000, seed_incumbent: bool = True) -> SearchResult:
    """Largest sum-free inverse-closed subset; exhaustive within ``limit``."""
    return _search(field, "mu", limit, seed, budget, seed_incumbent)


def heuristic_search(field: FieldCtx, seed: int = 0, budget: int = 10000,
                     kind: str = "mu") -> SearchResult:
    """Tabu local search over unions of units, starting from a random greedy set.

    Each move adds a feasible unit (largest first) or, when none is addable,
    drops a chosen one.  Recently moved units are tabu for a few moves.
    """
    if budget < 0:
        raise UsageError("budget must be nonnegative")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    adder = _Adder(field)
    units = _units(field, kind)
    n_units = len(units)
    sizes = [len(u) for u in units]
    tenure = max(2, n_units // 5)

    order = list(range(n_units))
    rng.shuffle(order)
    chosen: list[int] = []
    S, N, forb = 0, 0, 1
    for u in order:
        added = adder.add_unit(S, N, forb, units[u])
        if added is not None:
            S, N, forb = added
            chosen.append(u)
    size = sum(sizes[u] for u in chosen)
    best, best_mask = size, S
    tabu = [-1] * n_units
    in_set = [False] * n_units
    for u in chosen:
        in_set[u] = True

    for it in range(budget):
        addable = []
        for u in range(n_units):
            if in_set[u] or tabu[u] > it:
                continue
            if adder.add_unit(S, N, forb, units[u]) is not None:
                addable.append(u)
        if addable:
            top = max(sizes[u] for u in addable)
            u = rng.choice([v for v in addable if sizes[v] == top])
            S, N, forb = adder.add_unit(S, N, forb, units[u])
            in_set[u] = True
            chosen.append(u)
            size += sizes[u]
        else:
            candidates = [v for v in chosen if tabu[v] <= it] or chosen
            if not candidates:
                break
            u = rng.choice(candidates)
            chosen.remove(u)
            in_set[u] = False
            size -= sizes[u]
            S, N, forb = adder.rebuild(x for v in chosen for x in units[v])
        tabu[u] = it + tenure
        if size > best:
            best, best_mask = size, S

    result = _to_subset(field, best_mask)
    assert is_sum_free(result)
    return SearchResult(field, kind, result, best, False, budget, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# sigma / mu scan


@dataclass(frozen=True)
class ScanRow:
    p: int
    sigma: Fraction
    mu: Fraction
    optimal: bool

    @property
    def sigma_squared(self) -> Fraction:
        return self.sigma ** 2

    @property
    def gap(self) -> Fraction:
        return self.mu - self.sigma ** 2

    def csv_fields(self) -> list:
        return [self.p, self.sigma.numerator, self.sigma.denominator,
                self.mu.numerator, self.mu.denominator,
                self.gap.numerator, self.gap.denominator, str(self.optimal).lower()]


SCAN_HEADER = ["p", "sigma_num", "sigma_den", "mu_num", "mu_den", "gap_num", "gap_den", "optimal"]


def _scan_one(args) -> ScanRow:
    p, heuristic, seed, budget, limits = args
    ctx = PrimeFieldCtx(p)
    mu_limit, sigma_limit = limits
    s = max_sum_free(ctx, limit=sigma_limit, seed=seed, budget=budget)
    m = max_sum_free_inverse_closed(ctx, limit=mu_limit, seed=seed, budget=budget)
    assert m.best_size <= s.best_size or not s.optimal
    return ScanRow(p, s.density, m.density, s.optimal and m.optimal)


def conjecture_scan(p_list: Sequence[int], heuristic: bool = False, seed: int = 0,
                    budget: int = 10000, workers: int = 1,
                    mu_limit: Optional[int] = None, sigma_limit: Optional[int] = None) -> list[ScanRow]:
    """sigma, mu, sigma^2 and mu - sigma^2 for each prime (exploratory, no verdict)."""
    mu_limit = EXHAUSTIVE_LIMITS[("mu", "prime")] if mu_limit is None else mu_limit
    sigma_limit = EXHAUSTIVE_LIMITS[("sigma", "prime")] if sigma_limit is None else sigma_limit
    for p in p_list:
        PrimeFieldCtx(p)
        if not heuristic and (p > mu_limit or p > sigma_limit):
            raise UsageError(f"p = {p} exceeds the exhaustive limit; allow heuristic rows")
    jobs = [(p, heuristic, seed, budget, (mu_limit, sigma_limit)) for p in p_list]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_scan_one, jobs))
    return [_scan_one(j) for j in jobs]
