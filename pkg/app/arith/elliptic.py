# app/arith/elliptic.py

"""
Short Weierstrass curves y^2 = x^3 + a x + b over Q, exact group law.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from app.arith.ntheory import factorize, format_rat, parse_rat
from app.core.errors import (
    IncompleteFactorizationError,
    NonIntegralModelError,
    PointNotOnCurveError,
    UsageError,
)
from app.jobs.pool import map_ordered

log = logging.getLogger("elliptic")

# largest order of a rational torsion point (Mazur)
MAZUR_BOUND = 12

# ============================================================
# TYPES
# ============================================================

@dataclass(frozen=True)
class CurveQ:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if 4 * self.a ** 3 + 27 * self.b ** 2 == 0:
            raise UsageError(f"singular curve: a={self.a} b={self.b} gives a repeated root")

    @property
    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1


@dataclass(frozen=True)
class PointQ:
    x: Fraction | None = None
    y: Fraction | None = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise UsageError("a point is either O or has both coordinates")
        if self.x is not None:
            object.__setattr__(self, "x", Fraction(self.x))
            object.__setattr__(self, "y", Fraction(self.y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def sort_key(self):
        return (0, 0, 0) if self.is_infinity else (1, self.x, self.y)


INFINITY = PointQ()


@dataclass(frozen=True)
class TorsionResult:
    is_torsion: bool
    order: int | None


@dataclass(frozen=True)
class ScaledModel:
    curve: CurveQ
    u: int

# ============================================================
# INVARIANTS / IO
# ============================================================

def discriminant(E: CurveQ) -> Fraction:
    return -16 * (4 * E.a ** 3 + 27 * E.b ** 2)


def j_invariant(E: CurveQ) -> Fraction:
    return 1728 * 4 * E.a ** 3 / (4 * E.a ** 3 + 27 * E.b ** 2)


def format_point(P: PointQ) -> str:
    if P.is_infinity:
        return "O"
    return f"({format_rat(P.x)}, {format_rat(P.y)})"


def parse_point(text: str) -> PointQ:
    s = text.strip()
    if s.upper() == "O":
        return INFINITY
    if not (s.startswith("(") and s.endswith(")")) or s.count(",") != 1:
        raise UsageError(f"point must be 'O' or '(x, y)', got {text!r}")
    xs, ys = s[1:-1].split(",")
    return PointQ(parse_rat(xs), parse_rat(ys))

# ============================================================
# GROUP LAW
# ============================================================

def on_curve(E: CurveQ, P: PointQ) -> bool:
    if P.is_infinity:
        return True
    return P.y * P.y == P.x ** 3 + E.a * P.x + E.b


def _require_on(E: CurveQ, *points: PointQ):
    for P in points:
        if not on_curve(E, P):
            raise PointNotOnCurveError(f"{format_point(P)} is not on y^2 = x^3 + ({E.a})x + ({E.b})")


def _neg(P: PointQ) -> PointQ:
    return P if P.is_infinity else PointQ(P.x, -P.y)


def _add(E: CurveQ, P: PointQ, Q: PointQ) -> PointQ:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if P.y == -Q.y:
            # vertical chord, or tangent at a 2-torsion point
            return INFINITY
        lam = (3 * P.x * P.x + E.a) / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - P.x - Q.x
    y3 = lam * (P.x - x3) - P.y
    return PointQ(x3, y3)


def _mul(E: CurveQ, k: int, P: PointQ) -> PointQ:
    if k < 0:
        return _neg(_mul(E, -k, P))
    acc, base = INFINITY, P
    while k:
        if k & 1:
            acc = _add(E, acc, base)
        base = _add(E, base, base)
        k >>= 1
    return acc


def neg(E: CurveQ, P: PointQ) -> PointQ:
    _require_on(E, P)
    return _neg(P)


def add(E: CurveQ, P: PointQ, Q: PointQ) -> PointQ:
    _require_on(E, P, Q)
    return _add(E, P, Q)


def mul(E: CurveQ, k: int, P: PointQ) -> PointQ:
    _require_on(E, P)
    return _mul(E, k, P)


def is_torsion(E: CurveQ, P: PointQ) -> TorsionResult:
    """
    kP for k = 1..12. On an integral model every torsion point is integral
    (Nagell-Lutz), so a non-integral multiple ends the loop early.
    """
    if not E.is_integral:
        raise NonIntegralModelError("is_torsion needs integral a, b; run scale_model first")
    _require_on(E, P)
    Q = P
    for k in range(1, MAZUR_BOUND + 1):
        if Q.is_infinity:
            return TorsionResult(True, k)
        if Q.x.denominator != 1 or Q.y.denominator != 1:
            return TorsionResult(False, None)
        Q = _add(E, Q, P)
    return TorsionResult(False, None)

# ============================================================
# MODELS
# ============================================================

def scale_model(E: CurveQ) -> ScaledModel:
    """
    Smallest positive integer u with a*u^4 and b*u^6 integral; the model is
    (x, y) -> (u^2 x, u^3 y).
    """
    need: dict[int, int] = {}
    for den, k in ((E.a.denominator, 4), (E.b.denominator, 6)):
        if den == 1:
            continue
        f = factorize(den)
        if not f.complete:
            raise IncompleteFactorizationError(den, f.cofactor)
        for p, e in f.factors:
            need[p] = max(need.get(p, 0), -(-e // k))
    u = math.prod(p ** e for p, e in need.items())
    return ScaledModel(CurveQ(E.a * u ** 4, E.b * u ** 6), u)


def to_scaled(model: ScaledModel, P: PointQ) -> PointQ:
    if P.is_infinity:
        return P
    return PointQ(P.x * model.u ** 2, P.y * model.u ** 3)


def from_scaled(model: ScaledModel, P: PointQ) -> PointQ:
    if P.is_infinity:
        return P
    return PointQ(P.x / model.u ** 2, P.y / model.u ** 3)

# ============================================================
# POINT SEARCH
# ============================================================

def _search_row(a: int, b: int, q: int, height: int) -> list[PointQ]:
    out = []
    q2, q3 = q * q, q ** 3
    q4, q6 = q2 * q2, q3 * q3
    for p in range(-height, height + 1):
        if math.gcd(p, q) != 1:
            continue
        n = p ** 3 + a * p * q4 + b * q6
        if n < 0:
            continue
        r = math.isqrt(n)
        if r * r != n:
            continue
        x = Fraction(p, q2)
        out.append(PointQ(x, Fraction(r, q3)))
        if r:
            out.append(PointQ(x, Fraction(-r, q3)))
    return out


def naive_point_search(E: CurveQ, height_bound: int, jobs: int | None = None) -> list[PointQ]:
    """
    Affine points with x = p/q^2, |p| <= H, 1 <= q <= H, gcd(p, q) = 1: then
    x^3 + a x + b is a square iff p^3 + a p q^4 + b q^6 is. Rows of the grid
    (one per q) may run on separate workers; the merge is sorted and deduplicated.
    """
    if not E.is_integral:
        raise NonIntegralModelError("point search needs an integral model; run scale_model first")
    if height_bound < 1:
        return []
    a, b = int(E.a), int(E.b)
    rows = map_ordered(_search_row, [(a, b, q, height_bound) for q in range(1, height_bound + 1)], jobs)
    found = {P for row in rows for P in row}
    return sorted(found, key=PointQ.sort_key)
