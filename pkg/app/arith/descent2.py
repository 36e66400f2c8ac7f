# app/arith/descent2.py

"""
Complete 2-descent on y^2 = (x - e1)(x - e2)(x - e3), e_i distinct integers.

A point maps to the square classes (x - e1, x - e2). The pair (b1, b2)
belongs to the 2-Selmer group when the homogeneous space

    b1 z1^2 - b2 z2^2    = (e2 - e1) w^2
    b1 z1^2 - b1 b2 z3^2 = (e3 - e1) w^2

has a point over R and over every Q_p. Writing x = e1 + b1 t^2 with
t = z1/w in P^1, that means: x - e2 lies in b2 * Q_v^2 and x - e3 lies in
b1 b2 * Q_v^2 (zero allowed). The product of the two conditions is the
quartic z^2 = b1 (b1 t^2 + e1 - e2)(b1 t^2 + e1 - e3).

Only the real place, 2 and the primes dividing the root differences can
obstruct; elsewhere the space has good reduction and a smooth F_p point lifts.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from app.arith.elliptic import (
    INFINITY,
    CurveQ,
    PointQ,
    TorsionResult,
    from_scaled,
    is_torsion,
    naive_point_search,
    scale_model,
    to_scaled,
)
from app.arith.ntheory import (
    factorize,
    is_padic_square,
    jacobi,
    squarefree_class,
    valuation,
)
from app.core.errors import (
    IncompleteFactorizationError,
    PointNotOnCurveError,
    SelmerClosureError,
    UsageError,
)
from app.jobs.pool import map_ordered

log = logging.getLogger("descent2")

REAL_PLACE = "inf"

Place = int | str

# ============================================================
# TYPES
# ============================================================

@dataclass(frozen=True)
class SplitCurve:
    e1: int
    e2: int
    e3: int

    def __post_init__(self):
        for name in ("e1", "e2", "e3"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if len({self.e1, self.e2, self.e3}) != 3:
            raise UsageError(f"roots must be pairwise distinct: {self.roots}")

    @property
    def roots(self) -> tuple[int, int, int]:
        return self.e1, self.e2, self.e3

    @property
    def differences(self) -> tuple[int, int, int]:
        return self.e1 - self.e2, self.e1 - self.e3, self.e2 - self.e3

    @property
    def disc_core(self) -> int:
        d12, d13, d23 = self.differences
        return (d12 * d13 * d23) ** 2

    def rhs(self, x):
        return (x - self.e1) * (x - self.e2) * (x - self.e3)

    def contains(self, P: PointQ) -> bool:
        return P.is_infinity or P.y * P.y == self.rhs(P.x)


def _sqf_mul(a: int, b: int) -> int:
    g = math.gcd(a, b)
    return (a // g) * (b // g)


@dataclass(frozen=True, order=True)
class SquareClassPair:
    b1: int
    b2: int

    def __post_init__(self):
        if self.b1 == 0 or self.b2 == 0:
            raise UsageError("square classes are nonzero")

    def times(self, other: "SquareClassPair") -> "SquareClassPair":
        return SquareClassPair(_sqf_mul(self.b1, other.b1), _sqf_mul(self.b2, other.b2))

    def as_list(self) -> list[int]:
        return [self.b1, self.b2]


IDENTITY_PAIR = SquareClassPair(1, 1)


@dataclass(frozen=True)
class WeierstrassTransport:
    """Short model of a split curve: x_split = x_short + shift, y unchanged."""
    curve: CurveQ
    shift: Fraction

    def to_short(self, P: PointQ) -> PointQ:
        return P if P.is_infinity else PointQ(P.x - self.shift, P.y)

    def to_split(self, P: PointQ) -> PointQ:
        return P if P.is_infinity else PointQ(P.x + self.shift, P.y)


@dataclass(frozen=True)
class SelmerReport:
    curve: SplitCurve
    accepted_pairs: tuple[SquareClassPair, ...]
    selmer_dim: int
    selmer_rank_bound: int
    local_obstructions: tuple[tuple[SquareClassPair, Place], ...]
    places_checked: tuple[Place, ...]

    def to_json(self) -> dict:
        return {
            "e": list(self.curve.roots),
            "accepted": [p.as_list() for p in self.accepted_pairs],
            "dim": self.selmer_dim,
            "rank_bound": self.selmer_rank_bound,
            "obstructions": [{"pair": p.as_list(), "place": place} for p, place in self.local_obstructions],
            "places": list(self.places_checked),
        }


@dataclass(frozen=True)
class RankWindow:
    lower: int
    upper: int
    certified: str | None   # "rank-certified-<r>" when the bounds pinch
    witness: PointQ | None  # non-torsion point behind lower = 1
    report: SelmerReport

# ============================================================
# MODELS AND POINTS
# ============================================================

def to_weierstrass(C: SplitCurve) -> WeierstrassTransport:
    e1, e2, e3 = C.roots
    s1 = e1 + e2 + e3
    s2 = e1 * e2 + e1 * e3 + e2 * e3
    s3 = e1 * e2 * e3
    a = Fraction(s2) - Fraction(s1 * s1, 3)
    b = Fraction(-2 * s1 ** 3, 27) + Fraction(s1 * s2, 3) - s3
    return WeierstrassTransport(CurveQ(a, b), Fraction(s1, 3))


def split_point_search(C: SplitCurve, height: int, jobs: int | None = None) -> list[PointQ]:
    """naive_point_search on the integral short model, transported back to the split model."""
    wt = to_weierstrass(C)
    model = scale_model(wt.curve)
    found = naive_point_search(model.curve, height, jobs)
    return sorted((wt.to_split(from_scaled(model, P)) for P in found), key=PointQ.sort_key)


def split_torsion(C: SplitCurve, P: PointQ) -> TorsionResult:
    if not C.contains(P):
        raise PointNotOnCurveError(f"point not on split curve {C.roots}")
    wt = to_weierstrass(C)
    model = scale_model(wt.curve)
    return is_torsion(model.curve, to_scaled(model, wt.to_short(P)))


def descent_image(C: SplitCurve, P: PointQ) -> SquareClassPair:
    if P.is_infinity:
        return IDENTITY_PAIR
    if not C.contains(P):
        raise PointNotOnCurveError(f"point not on split curve {C.roots}")
    e1, e2, e3 = C.roots
    x = P.x
    # at a root the vanishing coordinate is replaced by the product of the differences there
    if x == e1:
        return SquareClassPair(squarefree_class((e1 - e2) * (e1 - e3)), squarefree_class(e1 - e2))
    if x == e2:
        return SquareClassPair(squarefree_class(e2 - e1), squarefree_class((e2 - e1) * (e2 - e3)))
    return SquareClassPair(squarefree_class(x - e1), squarefree_class(x - e2))

# ============================================================
# CANDIDATES
# ============================================================

def bad_primes(C: SplitCurve) -> list[int]:
    primes: set[int] = set()
    for d in C.differences:
        f = factorize(d)
        if not f.complete:
            raise IncompleteFactorizationError(d, f.cofactor)
        primes.update(f.primes)
    return sorted(primes)


def places_for(C: SplitCurve) -> list[Place]:
    return [REAL_PLACE] + sorted(set(bad_primes(C)) | {2})


def _signed_squarefree_group(primes: list[int]) -> list[int]:
    out = []
    for signs in product((1, -1), *[(1, p) for p in primes]):
        out.append(math.prod(signs))
    return sorted(out)


def _divisor_classes(n: int) -> list[int]:
    """Signed squarefree divisors of n."""
    f = factorize(n)
    if not f.complete:
        raise IncompleteFactorizationError(n, f.cofactor)
    return _signed_squarefree_group(list(f.primes))


def candidate_pairs(C: SplitCurve) -> list[SquareClassPair]:
    """
    b1 over the signed squarefree divisors of (e1 - e2)(e1 - e3), b2 over
    those of (e2 - e1)(e2 - e3); this finite box contains the Selmer group.
    """
    e1, e2, e3 = C.roots
    firsts = _divisor_classes((e1 - e2) * (e1 - e3))
    seconds = _divisor_classes((e2 - e1) * (e2 - e3))
    return [SquareClassPair(b1, b2) for b1 in firsts for b2 in seconds]

# ============================================================
# LOCAL SOLVABILITY
# ============================================================

def _v(n: int, p: int) -> float:
    return math.inf if n == 0 else valuation(n, p)


def _eval(coeffs: list[int], t: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def _taylor(coeffs: list[int], x0: int) -> list[int]:
    """Coefficients of h(x0 + d) in d."""
    deg = len(coeffs) - 1
    return [
        sum(math.comb(i, j) * coeffs[i] * x0 ** (i - j) for i in range(j, deg + 1))
        for j in range(deg + 1)
    ]


def _quartic_disc(C: SplitCurve, b1: int) -> int:
    e1, e2, e3 = C.roots
    a, b, c, d, e = b1 ** 3, 0, b1 * b1 * (2 * e1 - e2 - e3), 0, b1 * (e1 - e2) * (e1 - e3)
    I = 12 * a * e - 3 * b * d + c * c
    J = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c ** 3
    return (4 * I ** 3 - J * J) // 27


MATCH, MISMATCH, ROOT, OPEN = "match", "mismatch", "root", "open"


def _ball_state(coeffs: list[int], target: int, x0: int, n: int, p: int) -> str:
    """Behaviour of h on the ball x0 + p^n Z_p relative to the class target * Q_p^2."""
    t = _taylor(coeffs, x0)
    h0 = t[0]
    if h0 == 0:
        return ROOT
    lam = _v(h0, p)
    nu = min((_v(c, p) + n * j for j, c in enumerate(t) if j and c), default=math.inf)
    if nu >= lam + 1 + 2 * (p == 2):
        # h = h(x0) * (1 + p^(1 + 2 v(2)) Z_p): constant square class on the ball
        return MATCH if is_padic_square(Fraction(h0 * target), p) else MISMATCH
    mu = _v(t[1], p) if len(t) > 1 else math.inf
    if lam > 2 * mu and lam - mu >= n:
        # Hensel: a root r with v(r - x0) >= lam - mu, inside the ball
        return ROOT
    return OPEN


def _ball_solvable(conds: list[tuple[list[int], int]], x0: int, n: int, p: int, cap: int) -> bool:
    states = [_ball_state(h, target, x0, n, p) for h, target in conds]
    if MISMATCH in states:
        return False
    if all(s == MATCH for s in states):
        return True
    if states.count(ROOT) == 1 and all(s in (MATCH, ROOT) for s in states):
        # near a simple root h runs through every square class while the others stay fixed
        return True
    if n >= cap:
        log.warning(f"hensel depth cap {cap} reached at p={p} ball {x0} + {p}^{n}Z_p; counted insoluble")
        return False
    step = p ** n
    return any(_ball_solvable(conds, x0 + k * step, n + 1, p, cap) for k in range(p))


def _real_solvable(C: SplitCurve, pair: SquareClassPair) -> bool:
    e1, e2, e3 = C.roots
    b1, b2 = pair.b1, pair.b2
    pts = sorted(C.roots)
    xs = {Fraction(e) for e in pts} | {Fraction(pts[0] - 1), Fraction(pts[-1] + 1)}
    xs |= {Fraction(u + v, 2) for u, v in zip(pts, pts[1:])}

    def ok(v, c):
        return v == 0 or (v > 0) == (c > 0)

    for x in sorted(xs):
        # x = e1 + b1 t^2 only reaches one side of e1
        if (x - e1) * b1 < 0:
            continue
        if ok(x - e2, b2) and ok(x - e3, b1 * b2):
            return True
    return False


def _padic_solvable(C: SplitCurve, pair: SquareClassPair, p: int) -> bool:
    e1, e2, e3 = C.roots
    b1, b2 = pair.b1, pair.b2
    targets = (b2, b1 * b2)
    # h_i(t) = x - e_i at x = e1 + b1 t^2, and s^2 h_i(1/s) for the chart at infinity
    affine = [([e1 - e, 0, b1], c) for e, c in zip((e2, e3), targets)]
    at_inf = [([b1, 0, e1 - e], c) for e, c in zip((e2, e3), targets)]
    cap = 2 * valuation(_quartic_disc(C, b1), p) + 6
    return _ball_solvable(affine, 0, 0, p, cap) or _ball_solvable(at_inf, 0, 1, p, cap)


def solvable_at(C: SplitCurve, pair: SquareClassPair, place: Place) -> bool:
    if place == REAL_PLACE:
        return _real_solvable(C, pair)
    return _padic_solvable(C, pair, int(place))


def _local_class(b: int, place: Place):
    if place == REAL_PLACE:
        return b > 0
    p = int(place)
    v = valuation(b, p)
    unit = b // p ** v
    if p == 2:
        return v % 2, unit % 8
    return v % 2, jacobi(unit % p, p)


def local_key(pair: SquareClassPair, place: Place):
    """Solvability at a place depends on (b1, b2) only through these local classes."""
    return _local_class(pair.b1, place), _local_class(pair.b2, place)


def locally_solvable(C: SplitCurve, pair: SquareClassPair, places: list[Place] | None = None) -> tuple[bool, Place | None]:
    """(True, None), or (False, first place without a local point)."""
    for place in places if places is not None else places_for(C):
        if not solvable_at(C, pair, place):
            log.debug(f"{pair.as_list()} obstructed at {place} on {C.roots}")
            return False, place
    return True, None


def _local_table(C: SplitCurve, place: Place, reps: list[SquareClassPair]) -> list[bool]:
    return [solvable_at(C, pair, place) for pair in reps]

# ============================================================
# SELMER GROUP
# ============================================================

def _check_group(pairs: list[SquareClassPair], C: SplitCurve):
    members = set(pairs)
    n = len(members)
    if IDENTITY_PAIR not in members:
        raise SelmerClosureError(f"identity class missing from accepted pairs of {C.roots}")
    if n & (n - 1):
        raise SelmerClosureError(f"{n} accepted pairs on {C.roots} is not a power of 2")
    for a in pairs:
        for b in pairs:
            if a.times(b) not in members:
                raise SelmerClosureError(
                    f"{a.as_list()} * {b.as_list()} left the accepted set of {C.roots}"
                )


def two_selmer(C: SplitCurve, jobs: int | None = None) -> SelmerReport:
    cands = candidate_pairs(C)
    places = places_for(C)

    # one local test per distinct local class pair, places fanned out over workers
    keyed: list[dict] = []
    tasks = []
    for place in places:
        reps: dict = {}
        for pair in cands:
            reps.setdefault(local_key(pair, place), pair)
        keyed.append(reps)
        tasks.append((C, place, list(reps.values())))
    tables = map_ordered(_local_table, tasks, jobs)
    verdicts = [dict(zip(reps.keys(), table)) for reps, table in zip(keyed, tables)]

    accepted, obstructions = [], []
    for pair in cands:
        failed = next(
            (place for place, table in zip(places, verdicts) if not table[local_key(pair, place)]),
            None,
        )
        if failed is None:
            accepted.append(pair)
        else:
            obstructions.append((pair, failed))

    _check_group(accepted, C)
    dim = len(accepted).bit_length() - 1
    report = SelmerReport(
        curve=C,
        accepted_pairs=tuple(accepted),
        selmer_dim=dim,
        selmer_rank_bound=dim - 2,
        local_obstructions=tuple(obstructions),
        places_checked=tuple(places),
    )
    log.info(f"2-selmer {C.roots}: {len(cands)} candidates, dim {dim}, rank bound {dim - 2}")
    return report


def rank_window(C: SplitCurve, search_height: int, point: PointQ | None = None, jobs: int | None = None) -> RankWindow:
    report = two_selmer(C, jobs)
    candidates = [] if point is None else [point]
    candidates += split_point_search(C, search_height, jobs)

    witness = None
    for P in candidates:
        if P.is_infinity:
            continue
        if not split_torsion(C, P).is_torsion:
            witness = P
            break

    lower = 1 if witness is not None else 0
    upper = report.selmer_rank_bound
    certified = f"rank-certified-{lower}" if lower == upper else None
    return RankWindow(lower, upper, certified, witness, report)
