"""Machine-checked numeric bounds behind the 0.25 - c density theorem.

A :class:`Claim` asserts that a catalogued expression stays above (or below) a
decimal threshold over a box.  :func:`verify_claim` proves such a claim by
interval branch-and-bound, or refutes it with a rigorous point evaluation.
"""

from __future__ import annotations

import heapq
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from typing import Callable, Optional, Sequence

from .errors import DomainError, FormatError, UsageError
from .interval import Interval

DEFAULT_BUDGET = 10 ** 6
MAX_DEPTH = 60

HALF = Interval(0.5)
ONE = Interval(1.0)
SQRT2_OVER_2 = Interval(2.0).sqrt() / 2
C_0999994 = Interval.exact("0.999994")
C_149 = Interval.exact("1.49")
C_1343 = Interval.exact("1.343")
ALPHA0 = Interval.exact("0.24")


@dataclass(frozen=True)
class Expression:
    name: str
    arity: int
    func: Callable[..., Interval]
    validity: tuple  # per-variable (lo, hi) inside which the formula is defined
    formula: str

    def __call__(self, *args: Interval) -> Interval:
        return self.func(*args)


def _e1(x):
    return x / (1 + x)


def _e2a(x, y):
    x3 = x ** 3
    return x * y / (1 + x * y + 2 * x3 * y - 2 * x3)


def _e2b(x, y):
    return (1 + y.sqr()) * x.sqr() + (HALF - (1 + y ** 3) * x ** 3).pow23()


def _e2r(x):
    return C_149 * x.sqr() + (HALF - C_1343 * x ** 3).pow23()


def _e3(x):
    return x.sqr() + (HALF - x ** 3).pow23()


def _e4pos(x):
    return HALF + (2 * x.sqr() - 1) ** 3 - x ** 3


def _e4a(x):
    u = 2 * x.sqr() - 1
    return x.sqr() + u.sqr() + (HALF + u ** 3 - x ** 3).pow23()


def _e4vtx(x):
    return 4 * (2 * x.sqr() - 1).sqr() - x


def _e4b(x):
    return x.sqr() + (HALF - SQRT2_OVER_2 * x.sqr()).pow23()


def _e5(x):
    return x.sqr() + (2 * x.sqr() - C_0999994).sqr()


def _ceps():
    return Interval(2.0 ** 9) / Interval(3.0 ** 4 * 5.0 ** 5) * ALPHA0 ** 4


def _efinal(s):
    return ONE / (1 + 4 * s)


CATALOG: dict[str, Expression] = {e.name: e for e in [
    Expression("E1", 1, _e1, ((0.0, 1.0),), "x/(1+x)"),
    Expression("E2a", 2, _e2a, ((0.0, 0.5), (0.0, 1.0)), "xy/(1 + xy + 2x^3y - 2x^3)"),
    Expression("E2b", 2, _e2b, ((0.0, 0.6), (0.0, 1.0)), "(1+y^2)x^2 + (1/2 - (1+y^3)x^3)^(2/3)"),
    Expression("E2r", 1, _e2r, ((0.0, 0.7),), "1.49x^2 + (0.5 - 1.343x^3)^(2/3)"),
    Expression("E3", 1, _e3, ((0.0, 0.79),), "x^2 + (1/2 - x^3)^(2/3)"),
    Expression("E4a", 1, _e4a, ((0.5, 0.809016),),
               "x^2 + (2x^2-1)^2 + (1/2 + (2x^2-1)^3 - x^3)^(2/3)"),
    Expression("E4pos", 1, _e4pos, ((0.0, 1.0),), "1/2 + (2x^2-1)^3 - x^3"),
    Expression("E4vtx", 1, _e4vtx, ((0.0, 1.0),), "4(2x^2-1)^2 - x"),
    Expression("E4b", 1, _e4b, ((0.0, 0.84),), "x^2 + (1/2 - (sqrt(2)/2)x^2)^(2/3)"),
    Expression("E5", 1, _e5, ((0.0, 1.0),), "x^2 + (2x^2 - 0.999994)^2"),
    Expression("CEPS", 0, _ceps, (), "2^9/(3^4 5^5) * 0.24^4"),
    Expression("EFINAL", 1, _efinal, ((0.0, 10.0),), "1/(1+4s)"),
]}
ALIASES = {"E2b-reduced": "E2r", "E2b_reduced": "E2r"}


def get_expression(name: str) -> Expression:
    name = ALIASES.get(name, name)
    try:
        return CATALOG[name]
    except KeyError:
        raise UsageError(f"unknown expression {name!r}; known: {', '.join(CATALOG)}") from None


def ival_eval(expr, box: Sequence[Interval]) -> Interval:
    """Rigorous enclosure of the range of ``expr`` over ``box``.

    Raises DomainError when the box leaves the expression's recorded validity
    region or an intermediate enclosure does (e.g. a negative base under the
    2/3 power).
    """
    e = get_expression(expr) if isinstance(expr, str) else expr
    box = [Interval._coerce(b) for b in box]
    if len(box) != e.arity:
        raise UsageError(f"{e.name} takes {e.arity} variables, got {len(box)}")
    for b, (lo, hi) in zip(box, e.validity):
        if b.lo < lo or b.hi > _next_up(hi):
            raise DomainError(f"{b!r} leaves the validity region [{lo}, {hi}] of {e.name}")
    return e(*box)


def _next_up(x: float) -> float:
    # outward-rounded claim boxes may exceed a decimal validity bound by one ulp
    return Interval.exact(repr(x)).hi if x else x


# ---------------------------------------------------------------------------
# claims

KINDS = ("min_above", "max_below", "always_negative", "value_above")


def _num(v) -> str:
    if isinstance(v, (int, Decimal, str)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    raise FormatError(f"expected a number or decimal string, got {v!r}")


@dataclass
class Claim:
    """A bound on a catalogued expression over a box.

    Box endpoints, thresholds and witness points are kept as exact decimal
    strings and only turned into floats (with outward rounding) when verified.
    """

    expr: str
    box: list
    kind: str
    threshold: Optional[str] = None
    witness_points: list = field(default_factory=list)
    budget: int = DEFAULT_BUDGET
    name: str = ""

    def __post_init__(self):
        self.expr = ALIASES.get(self.expr, self.expr)
        e = get_expression(self.expr)
        if self.kind not in KINDS:
            raise FormatError(f"unknown claim kind {self.kind!r}")
        try:
            self.box = [[_num(lo), _num(hi)] for lo, hi in self.box]
        except (TypeError, ValueError) as exc:
            raise FormatError(f"bad box {self.box!r}") from exc
        if len(self.box) != e.arity:
            raise FormatError(f"{e.name} takes {e.arity} variables, box has {len(self.box)}")
        if self.kind == "always_negative":
            self.threshold = None
        elif self.threshold is None:
            raise FormatError(f"{self.kind} needs a threshold")
        else:
            self.threshold = _num(self.threshold)
        self.witness_points = [_num(w) for w in self.witness_points]
        if not isinstance(self.budget, int) or isinstance(self.budget, bool):
            raise FormatError("budget must be an integer")
        try:
            boxes = self.box_intervals()
            self.threshold_interval()
            for w in self.witness_points:
                Interval.exact(w)
        except (DomainError, ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad number in claim: {exc}") from None
        for b, (lo, hi) in zip(boxes, e.validity):
            if b.lo > b.hi or b.lo < lo or b.hi > _next_up(hi):
                raise FormatError(f"box {b!r} leaves the validity region [{lo}, {hi}] of {e.name}")
        if self.witness_points:
            if e.arity < 1:
                raise FormatError("witness points need at least one variable")
            ws = [Interval.exact(w).mid for w in self.witness_points]
            if any(b <= a for a, b in zip(ws, ws[1:])):
                raise FormatError("witness points must be strictly increasing")
            if ws[0] < boxes[0].lo or ws[-1] > boxes[0].hi:
                raise FormatError("witness points must lie inside the box")

    def box_intervals(self) -> list[Interval]:
        return [Interval(Interval.exact(lo).lo, Interval.exact(hi).hi) for lo, hi in self.box]

    def threshold_interval(self) -> Interval:
        return Interval(0.0) if self.threshold is None else Interval.exact(self.threshold)

    def to_json(self) -> dict:
        d = {"expr": self.expr, "box": self.box, "kind": self.kind,
             "threshold": self.threshold, "witness_points": self.witness_points,
             "budget": self.budget}
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Claim":
        if not isinstance(d, dict):
            raise FormatError("a claim must be a JSON object")
        unknown = set(d) - {"expr", "box", "kind", "threshold", "witness_points", "budget", "name"}
        if unknown:
            raise FormatError(f"unknown claim fields: {sorted(unknown)}")
        try:
            return cls(expr=d["expr"], box=d["box"], kind=d["kind"],
                       threshold=d.get("threshold"),
                       witness_points=d.get("witness_points") or [],
                       budget=d.get("budget", DEFAULT_BUDGET), name=d.get("name", ""))
        except KeyError as exc:
            raise FormatError(f"claim is missing field {exc}") from None
        except UsageError as exc:
            raise FormatError(str(exc)) from exc


def claims_from_text(text: str) -> list[Claim]:
    """Parse a claims file: one claim object or a list of them.

    Floats are read as Decimals so that decimal thresholds stay bit-exact.
    """
    try:
        data = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise FormatError(str(exc)) from exc
    items = data if isinstance(data, list) else [data]
    return [Claim.from_json(d) for d in items]


@dataclass
class VerifiedResult:
    status: str  # proved | refuted | inconclusive
    boxes_processed: int
    max_depth: int
    refutation_point: Optional[list] = None
    refutation_value: Optional[list] = None
    certified_bound: Optional[float] = None
    name: str = ""

    def to_json(self) -> dict:
        return asdict(self)


def _safe(e: Expression, box):
    try:
        return e(*box)
    except (DomainError, ZeroDivisionError, OverflowError):
        return None


def _tests(kind: str, tau: Interval):
    """(proves(enclosure), violates(point enclosure), priority(enclosure))."""
    if kind in ("min_above", "value_above"):
        return (lambda v: v.lo > tau.hi), (lambda v: v.hi <= tau.lo), (lambda v: v.lo)
    if kind == "max_below":
        return (lambda v: v.hi < tau.lo), (lambda v: v.lo >= tau.hi), (lambda v: -v.hi)
    return (lambda v: v.hi < 0), (lambda v: v.lo >= 0), (lambda v: -v.hi)


def _bisect(box: list[Interval]):
    i = max(range(len(box)), key=lambda k: box[k].width)
    b = box[i]
    m = b.mid
    if not b.lo < m < b.hi:
        return None
    left, right = list(box), list(box)
    left[i] = Interval(b.lo, m)
    right[i] = Interval(m, b.hi)
    return left, right


def verify_claim(claim: Claim, max_depth: int = MAX_DEPTH) -> VerifiedResult:
    if claim.budget <= 0:
        raise UsageError("budget must be positive")
    e = get_expression(claim.expr)
    tau = claim.threshold_interval()
    proves, violates, priority = _tests(claim.kind, tau)
    box = claim.box_intervals()

    if e.arity == 0:
        v = _safe(e, [])
        if v is not None and proves(v):
            status = "proved"
        elif v is not None and violates(v):
            status = "refuted"
        else:
            status = "inconclusive"
        return VerifiedResult(status, 1, 0, [] if status == "refuted" else None,
                              v.as_list() if v is not None and status == "refuted" else None,
                              _bound_of(claim.kind, v) if status == "proved" else None, claim.name)

    seeds = [box]
    if claim.witness_points:
        cuts = [Interval.exact(w).mid for w in claim.witness_points]
        cuts = [c for c in cuts if box[0].lo < c < box[0].hi]
        edges = [box[0].lo] + cuts + [box[0].hi]
        seeds = []
        for a, b in zip(edges, edges[1:]):
            s = list(box)
            s[0] = Interval(a, b)
            seeds.append(s)

    heap = []
    counter = 0
    for s in seeds:
        heap.append((float("-inf"), counter, 0, s))
        counter += 1
    heapq.heapify(heap)

    processed = 0
    deepest = 0
    unresolved = False
    bound = None
    while heap:
        if processed >= claim.budget:
            return VerifiedResult("inconclusive", processed, deepest, name=claim.name)
        _, _, depth, b = heapq.heappop(heap)
        processed += 1
        deepest = max(deepest, depth)
        v = _safe(e, b)
        if v is not None and proves(v):
            bound = _merge_bound(claim.kind, bound, v)
            continue
        point = [Interval(x.mid) for x in b]
        pv = _safe(e, point)
        if pv is not None and violates(pv):
            return VerifiedResult("refuted", processed, deepest,
                                  [x.lo for x in point], pv.as_list(), name=claim.name)
        children = _bisect(b) if depth < max_depth else None
        if children is None:
            unresolved = True
            continue
        key = priority(v) if v is not None else float("-inf")
        for ch in children:
            heapq.heappush(heap, (key, counter, depth + 1, ch))
            counter += 1
    status = "inconclusive" if unresolved else "proved"
    return VerifiedResult(status, processed, deepest,
                          certified_bound=bound if status == "proved" else None, name=claim.name)


def _bound_of(kind: str, v: Interval) -> float:
    return v.lo if kind in ("min_above", "value_above") else v.hi


def _merge_bound(kind, bound, v):
    b = _bound_of(kind, v)
    if bound is None:
        return b
    return min(bound, b) if kind in ("min_above", "value_above") else max(bound, b)


# ---------------------------------------------------------------------------
# the fixed certificate suite

E4A_WITNESS = [
    "0.745500", "0.751659", "0.757252", "0.762475", "0.767466", "0.772325",
    "0.777125", "0.781914", "0.786710", "0.791485", "0.796142", "0.800481",
    "0.804182", "0.806873", "0.808367", "0.808906", "0.809008", "0.809016",
]


def theorem_claims(budget: int = DEFAULT_BUDGET) -> list[Claim]:
    def c(name, expr, box, kind, threshold=None, witness=()):
        return Claim(expr, box, kind, threshold, list(witness), budget, name)

    return [
        c("C1", "E1", [["0", "0.33"]], "max_below", "0.2482"),
        c("C2a", "E2a", [["0.33", "0.45"], ["0", "0.7"]], "max_below", "0.24994"),
        c("C2b", "E2b", [["0.33", "0.45"], ["0.7", "1"]], "min_above", "0.7510"),
        c("C3", "E3", [["0.45", "0.7455"]], "min_above", "0.7501"),
        c("C4a", "E4a", [["0.7455", "0.809016"]], "min_above", "0.75001", E4A_WITNESS),
        c("C4pos", "E4pos", [["0.7455", "0.809016"]], "min_above", "0.000001"),
        c("C4vtx", "E4vtx", [["0.7455", "0.809016"]], "always_negative"),
        c("C4b", "E4b", [["0.7455", "0.809016"]], "min_above", "0.7659"),
        c("C5", "E5", [["0.809016", "1"]], "min_above", "0.7500001"),
        c("CEPS", "CEPS", [], "value_above", "0.0000061"),
        c("C5final", "EFINAL", [["0.7500001", "0.7500001"]], "max_below", "0.249999975"),
    ]


@dataclass
class CertificateReport:
    claims: list[Claim]
    results: list[VerifiedResult]

    @property
    def exit_code(self) -> int:
        statuses = {r.status for r in self.results}
        if "refuted" in statuses:
            return 1
        if "inconclusive" in statuses:
            return 2
        return 0

    @property
    def proved(self) -> int:
        return sum(r.status == "proved" for r in self.results)

    def to_json(self) -> dict:
        return {
            "proved": self.proved,
            "total": len(self.results),
            "exit_code": self.exit_code,
            "claims": [{"claim": c.to_json(), "result": r.to_json()}
                       for c, r in zip(self.claims, self.results)],
        }


def verify_claims(claims: Sequence[Claim], workers: int = 1) -> CertificateReport:
    claims = list(claims)
    if workers > 1 and len(claims) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(verify_claim, claims))
    else:
        results = [verify_claim(c) for c in claims]
    return CertificateReport(claims, results)


def verify_theorem_certificates(budget: int = DEFAULT_BUDGET, thresholds: Optional[dict] = None,
                                workers: int = 1) -> CertificateReport:
    """Run the eleven built-in claims; ``thresholds`` overrides by claim name."""
    claims = theorem_claims(budget)
    for c in claims:
        if thresholds and c.name in thresholds:
            c.threshold = _num(thresholds[c.name])
    return verify_claims(claims, workers)


# ---------------------------------------------------------------------------
# figure data

FIGURE_PANELS = {
    "left": [("E2r", "0.33", "0.45")],
    "centre": [("E3", "0.45", "0.7455")],
    "right": [("E4a", "0.7455", "0.809016"), ("E4b", "0.7455", "0.809016")],
}
REFERENCE_LINE = 0.75


def emit_figure_data(expr: str, lo, hi, samples: int) -> list[tuple[float, float]]:
    """Evenly spaced (x, midpoint of the enclosure of expr(x)) pairs on [lo, hi]."""
    e = get_expression(expr)
    if e.arity != 1:
        raise UsageError(f"{e.name} is not a function of one variable")
    if samples < 2:
        raise UsageError("need at least two samples")
    a, b = float(Decimal(str(lo))), float(Decimal(str(hi)))
    if a > b:
        raise UsageError("empty range")
    (vlo, vhi), = e.validity
    if a < vlo or b > vhi:
        raise DomainError(f"range [{a}, {b}] leaves the validity region of {e.name}")
    rows = []
    for i in range(samples):
        x = b if i == samples - 1 else a + (b - a) * i / (samples - 1)
        v = e(Interval(x))
        rows.append((x, v.mid))
    return rows
