# app/arith/family.py

"""
The family y^2 = (x - a1 f(t))(x - a2 f(t))(x - a3 f(t)), f(t) = (t - a1)(t - a2)(t - a3),
at t = m/n. Its tautological point is x = t f(t), y = f(t)^2.

Integral model: scale by u = n^3. With F = (m - a1 n)(m - a2 n)(m - a3 n) = n^3 f(m/n)
the roots become e_i = a_i F n^3 and the point (F m n^2, F^2 n^3).
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from app.arith.descent2 import SplitCurve, rank_window, split_torsion
from app.arith.elliptic import PointQ, format_point
from app.arith.ntheory import factorize, is_prime, primes_up_to
from app.core.config import settings
from app.core.errors import ConsistencyError, DegenerateMemberError, IncompleteFactorizationError, UsageError
from app.jobs.pool import map_ordered

log = logging.getLogger("family")

CERTIFIED_TAG = "rank-certified-1"

# ============================================================
# TYPES
# ============================================================

@dataclass(frozen=True)
class FamilyParams:
    a1: int
    a2: int
    a3: int

    def __post_init__(self):
        if len({self.a1, self.a2, self.a3}) != 3:
            raise UsageError(f"family parameters must be pairwise distinct: {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int]:
        return self.a1, self.a2, self.a3


@dataclass(frozen=True)
class FamilyBox:
    m_max: int
    n_max: int
    m_min: int = 1
    n_min: int = 1

    def pairs(self):
        """Row-major: m outer, n inner."""
        for m in range(self.m_min, self.m_max + 1):
            for n in range(max(self.n_min, 1), self.n_max + 1):
                yield m, n


@dataclass(frozen=True)
class FamilyMember:
    params: FamilyParams
    m: int
    n: int
    F: int
    integral_curve: SplitCurve
    taut_point: PointQ
    disc_core: int

# ============================================================
# MEMBERS
# ============================================================

def f_eval(params: FamilyParams, t) -> Fraction:
    t = Fraction(t)
    return math.prod((t - a for a in params.as_tuple()), start=Fraction(1))


def linear_forms(params: FamilyParams, m: int, n: int) -> tuple[int, int, int]:
    return tuple(m - a * n for a in params.as_tuple())


def make_member(params: FamilyParams, m: int, n: int) -> FamilyMember:
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    if math.gcd(m, n) != 1:
        raise UsageError(f"m and n must be coprime, got ({m}, {n})")
    F = math.prod(linear_forms(params, m, n))
    if F == 0:
        raise DegenerateMemberError(f"m/n = {m}/{n} is a root of f, the member is singular")

    n3 = n ** 3
    curve = SplitCurve(*(a * F * n3 for a in params.as_tuple()))
    point = PointQ(F * m * n * n, F * F * n3)
    if not curve.contains(point):
        raise ConsistencyError(f"tautological point {format_point(point)} off curve {curve.roots}")

    return FamilyMember(params, m, n, F, curve, point, n * F)


def disc_core(member: FamilyMember) -> int:
    return member.n * member.F


def disc_support_check(member: FamilyMember) -> bool:
    """Every prime of the integral discriminant divides 2 (a1 - a2)(a1 - a3)(a2 - a3) n F."""
    a1, a2, a3 = member.params.as_tuple()
    allowed = factorize(2 * (a1 - a2) * (a1 - a3) * (a2 - a3) * disc_core(member))
    if not allowed.complete:
        raise IncompleteFactorizationError(disc_core(member), allowed.cofactor)
    for d in member.integral_curve.differences:
        rest = abs(d)
        for p in allowed.primes:
            while rest % p == 0:
                rest //= p
        if rest != 1:
            log.info(f"({member.m}, {member.n}): difference {d} leaves {rest} outside the core support")
            return False
    return True

# ============================================================
# PRIME SEARCH
# ============================================================

def _prime_test(bound: int):
    if bound <= settings.TRIAL_DIVISION_BOUND:
        table = frozenset(primes_up_to(bound))
        return table.__contains__
    return is_prime


def four_primes_search(params: FamilyParams, box: FamilyBox, positive_only: bool = False) -> list[tuple[int, int]]:
    """
    Coprime (m, n) with n prime and each m - a_i n prime. Forms are tested in
    absolute value unless positive_only, which requires all of them > 0.
    """
    pairs = list(box.pairs())
    if not pairs:
        return []
    bound = max(max(abs(v) for v in linear_forms(params, m, n)) for m, n in pairs)
    prime = _prime_test(max(bound, box.n_max))

    out = []
    for m, n in pairs:
        if not prime(n) or math.gcd(m, n) != 1:
            continue
        forms = linear_forms(params, m, n)
        if positive_only and any(v <= 0 for v in forms):
            continue
        if all(prime(abs(v)) for v in forms):
            out.append((m, n))
    log.info(f"four-primes search {params.as_tuple()}: {len(out)} of {len(pairs)} pairs")
    return out


def coprime_members(params: FamilyParams, box: FamilyBox) -> list[tuple[int, int]]:
    """Every non-degenerate coprime (m, n) in the box."""
    return [
        (m, n) for m, n in box.pairs()
        if math.gcd(m, n) == 1 and math.prod(linear_forms(params, m, n)) != 0
    ]

# ============================================================
# RANK ONE PIPELINE
# ============================================================

def member_report(params: FamilyParams, m: int, n: int, search_height: int = 0, certify: bool = True) -> dict:
    member = make_member(params, m, n)
    C = member.integral_curve
    torsion = split_torsion(C, member.taut_point)

    out = {
        "params": list(params.as_tuple()),
        "m": m,
        "n": n,
        "F": member.F,
        "disc_core": member.disc_core,
        "e": list(C.roots),
        "taut_point": format_point(member.taut_point),
        "taut_torsion": {"is_torsion": torsion.is_torsion, "order": torsion.order},
        "selmer": None,
        "rank_window": None,
        "certified": False,
        "tag": "taut-point-torsion" if torsion.is_torsion else None,
    }
    if not certify:
        return out

    try:
        # members already run on pool workers
        window = rank_window(C, search_height, point=member.taut_point, jobs=1)
    except IncompleteFactorizationError as e:
        log.warning(f"({m}, {n}) inconclusive: {e}")
        out["tag"] = "inconclusive"
        out["inconclusive_reason"] = str(e)
        return out

    out["selmer"] = window.report.to_json()
    out["rank_window"] = [window.lower, window.upper]
    # the lower bound must come from the built-in point itself
    if not torsion.is_torsion and window.report.selmer_rank_bound == 1:
        out["certified"] = True
        out["tag"] = CERTIFIED_TAG
    return out


def rank_one_pipeline(
    params: FamilyParams,
    box: FamilyBox,
    search_height: int = 0,
    certify: bool = True,
    prime_filter: bool = True,
    positive_only: bool = False,
    jobs: int | None = None,
) -> list[dict]:
    if prime_filter:
        pairs = four_primes_search(params, box, positive_only)
    else:
        pairs = coprime_members(params, box)
    tasks = [(params, m, n, search_height, certify) for m, n in pairs]
    return map_ordered(member_report, tasks, jobs)
