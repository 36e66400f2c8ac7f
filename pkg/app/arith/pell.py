# app/arith/pell.py

"""
Solutions of x^2 - (a^2 - 1) y^2 = 1 for a >= 2.

x_n + y_n sqrt(a^2 - 1) = (a + sqrt(a^2 - 1))^n. The recurrence is the
canonical generator; pell_term squares in Z[sqrt(a^2 - 1)] for one large index.

Divisibility: the literally quoted criterion "y_m^2 | y_n <=> y_m | n" already
fails at (a, m, n) = (2, 2, 4): y_2 = 4 divides 4 but 16 does not divide
y_4 = 56. The classical lemma is y_m^2 | y_n <=> m*y_m | n. Reports carry all
three predicates.
"""

import logging
import math
from dataclasses import dataclass

from app.core.errors import UsageError

log = logging.getLogger("pell")


@dataclass(frozen=True)
class PellSolution:
    a: int
    index: int
    x: int
    y: int


@dataclass(frozen=True)
class DivisibilityReport:
    a: int
    m: int
    n: int
    y_m: int
    y_n: int
    ymsq_divides_yn: bool
    ym_divides_n: bool
    m_ym_divides_n: bool
    quotient_t: int | None  # t with y_m^2 * t = y_n

    @property
    def classical_law_holds(self) -> bool:
        return self.ymsq_divides_yn == self.m_ym_divides_n

    @property
    def stated_law_holds(self) -> bool:
        return self.ymsq_divides_yn == self.ym_divides_n


def _check_a(a: int):
    if a < 2:
        raise UsageError(f"parameter a must be >= 2, got {a}")


def verify_pell(a: int, x: int, y: int) -> bool:
    return x * x - (a * a - 1) * y * y == 1


def pell_sequence(a: int, count: int) -> list[PellSolution]:
    """Indices 0..count (count + 1 entries)."""
    _check_a(a)
    if count < 0:
        raise UsageError(f"count must be non-negative, got {count}")
    d = a * a - 1
    x, y = 1, 0
    out = [PellSolution(a, 0, x, y)]
    for n in range(1, count + 1):
        x, y = a * x + d * y, x + a * y
        out.append(PellSolution(a, n, x, y))
    return out


def pell_term(a: int, n: int) -> PellSolution:
    _check_a(a)
    if n < 0:
        raise UsageError(f"index must be non-negative, got {n}")
    d = a * a - 1
    rx, ry = 1, 0
    bx, by = a, 1
    k = n
    while k:
        if k & 1:
            rx, ry = rx * bx + d * ry * by, rx * by + ry * bx
        bx, by = bx * bx + d * by * by, 2 * bx * by
        k >>= 1
    return PellSolution(a, n, rx, ry)


def enumerate_solutions_below(a: int, bound: int) -> list[tuple[int, int]]:
    """Brute force over 1 <= y <= bound; exact isqrt, no floats."""
    _check_a(a)
    if bound < 1:
        raise UsageError(f"bound must be >= 1, got {bound}")
    d = a * a - 1
    out = []
    for y in range(1, bound + 1):
        t = d * y * y + 1
        x = math.isqrt(t)
        if x * x == t:
            out.append((x, y))
    return out


def divisibility_report(a: int, m: int, n: int) -> DivisibilityReport:
    _check_a(a)
    if m < 1 or n < 1:
        raise UsageError(f"indices must be >= 1, got m={m} n={n}")
    y_m = pell_term(a, m).y
    y_n = pell_term(a, n).y
    sq = y_m * y_m
    divides = y_n % sq == 0
    return DivisibilityReport(
        a=a,
        m=m,
        n=n,
        y_m=y_m,
        y_n=y_n,
        ymsq_divides_yn=divides,
        ym_divides_n=n % y_m == 0,
        m_ym_divides_n=n % (m * y_m) == 0,
        quotient_t=y_n // sq if divides else None,
    )


def stated_form_counterexamples(a_max: int, m_max: int, n_max: int) -> list[tuple[int, int, int]]:
    """(a, m, n) where 'y_m^2 | y_n <=> y_m | n' fails, scanned from a = 2."""
    out = []
    for a in range(2, a_max + 1):
        ys = [s.y for s in pell_sequence(a, max(m_max, n_max))]
        for m in range(1, m_max + 1):
            sq = ys[m] * ys[m]
            for n in range(1, n_max + 1):
                if (ys[n] % sq == 0) != (n % ys[m] == 0):
                    out.append((a, m, n))
    if out:
        log.info(f"stated divisibility form fails on {len(out)} triples, first {out[0]}")
    return out
