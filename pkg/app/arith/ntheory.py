# app/arith/ntheory.py

"""
Exact integer / rational primitives.

Integers are plain Python ints, rationals are fractions.Fraction (always in
lowest terms with a positive denominator). Everything here is a pure
function over immutable values.
"""

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from app.core.config import settings
from app.core.errors import ConsistencyError, IncompleteFactorizationError, UsageError, ZeroInputError

log = logging.getLogger("ntheory")

BigRat = Fraction

# Miller-Rabin with these bases is deterministic for n < 3.3e24, so for every 64-bit n
MR_BASES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

SMALL_TRIAL_BOUND = 1000

# ============================================================
# STRINGS
# ============================================================

def parse_int(text: str) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise UsageError(f"not an integer: {text!r}") from None


def parse_rat(text: str) -> Fraction:
    s = str(text).strip()
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            den_i = int(den)
            if den_i == 0:
                raise UsageError(f"zero denominator in {text!r}")
            return Fraction(int(num), den_i)
        return Fraction(int(s))
    except ValueError:
        raise UsageError(f"not a rational 'p/q': {text!r}") from None


def format_rat(r) -> str:
    r = Fraction(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"

# ============================================================
# DIVISIBILITY
# ============================================================

def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def _strip(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return n, v


def valuation(r, p: int) -> int:
    """p-adic valuation of a nonzero integer or rational."""
    if r == 0:
        raise ZeroInputError("valuation of 0 is infinite")
    r = Fraction(r)
    return _strip(abs(r.numerator), p)[1] - _strip(r.denominator, p)[1]

# ============================================================
# PRIMES
# ============================================================

@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> tuple[int, ...]:
    if limit < 2:
        return ()
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for i in range(3, math.isqrt(limit) + 1, 2):
        if sieve[i]:
            sieve[i * i :: 2 * i] = False
    return tuple(int(p) for p in np.flatnonzero(sieve))


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in MR_BASES_64:
        if n % p == 0:
            return n == p

    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    if n < 1 << 64:
        bases = MR_BASES_64
    else:
        # seeded per n so repeated runs agree
        rng = random.Random(settings.PRIME_SEED ^ n)
        bases = [rng.randrange(2, n - 1) for _ in range(settings.MR_ROUNDS)]

    return all(_mr_round(n, d, s, a) for a in bases)

# ============================================================
# FACTORIZATION
# ============================================================

@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...]
    complete: bool
    cofactor: int = 1  # unfactored composite part

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def value(self) -> int:
        out = self.sign * self.cofactor
        for p, e in self.factors:
            out *= p ** e
        return out


def pollard_rho(n: int, budget: int) -> int | None:
    """Brent's variant. Returns a proper divisor of composite n, or None when the budget runs out."""
    if n % 2 == 0:
        return 2
    spent = 0
    c = 1
    while spent < budget:
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1 and spent < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            spent += 2 * r
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
        c += 1
    return None


def _trial_divide(m: int, found: dict[int, int], primes) -> int:
    for p in primes:
        if p * p > m:
            break
        if m % p == 0:
            m, e = _strip(m, p)
            found[p] = found.get(p, 0) + e
    return m


def factorize(n: int, effort: int | None = None) -> Factorization:
    """
    Trial division to settings.TRIAL_DIVISION_BOUND, then Pollard rho with
    `effort` iterations per cofactor. A composite cofactor that survives the
    budget is reported with complete=False rather than raised.
    """
    if n == 0:
        raise ZeroInputError("cannot factorize 0")
    budget = settings.FACTOR_BUDGET if effort is None else effort

    found: dict[int, int] = {}
    m = _trial_divide(abs(n), found, primes_up_to(SMALL_TRIAL_BOUND))
    if m > 1 and not is_prime(m):
        m = _trial_divide(m, found, primes_up_to(settings.TRIAL_DIVISION_BOUND))

    leftovers: list[int] = []
    stack = [m] if m > 1 else []
    while stack:
        c = stack.pop()
        if is_prime(c):
            found[c] = found.get(c, 0) + 1
            continue
        d = pollard_rho(c, budget)
        if d is None:
            leftovers.append(c)
            continue
        stack.extend((d, c // d))

    cofactor = math.prod(leftovers)
    if leftovers:
        log.warning(f"factor budget {budget} exhausted for {n}: cofactor {cofactor}")

    return Factorization(
        sign=-1 if n < 0 else 1,
        factors=tuple(sorted(found.items())),
        complete=not leftovers,
        cofactor=cofactor,
    )


def squarefree_part(n: int) -> tuple[int, int]:
    """n = s * t^2 with s squarefree carrying the sign of n, t > 0."""
    f = factorize(n)
    if not f.complete:
        raise IncompleteFactorizationError(n, f.cofactor)
    s, t = f.sign, 1
    for p, e in f.factors:
        if e % 2:
            s *= p
        t *= p ** (e // 2)
    return s, t


def squarefree_class(r) -> int:
    """Squarefree representative of r in Q*/Q*^2."""
    r = Fraction(r)
    if r == 0:
        raise ZeroInputError("0 has no square class")
    return squarefree_part(r.numerator * r.denominator)[0]

# ============================================================
# RESIDUES
# ============================================================

def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise UsageError(f"jacobi symbol needs odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_padic_square(r, p: int) -> bool:
    if r == 0:
        raise ZeroInputError("0 is excluded from square-class tests")
    if not is_prime(p):
        raise UsageError(f"{p} is not prime")
    r = Fraction(r)
    num, vn = _strip(r.numerator, p)
    den, vd = _strip(r.denominator, p)
    if (vn - vd) % 2:
        return False
    unit = num * den
    if p == 2:
        return unit % 8 == 1
    return jacobi(unit % p, p) == 1

# ============================================================
# SUMS OF SQUARES
# ============================================================

def _least_root(r: int, k: int) -> int:
    """Smallest x >= 0 with k*x^2 >= r."""
    x = math.isqrt(r // k)
    while k * x * x < r:
        x += 1
    return x


def two_squares(p: int) -> tuple[int, int]:
    """Write a prime p = 2 or p = 1 mod 4 as u^2 + v^2 with u >= v >= 0."""
    if p == 2:
        return 1, 1
    if p % 4 != 1 or not is_prime(p):
        raise UsageError(f"{p} is not a prime congruent to 1 mod 4")
    c = 2
    while jacobi(c, p) != -1:
        c += 1
    a, b = p, pow(c, (p - 1) // 4, p)
    while b * b > p:
        a, b = b, a % b
    u = b
    v = math.isqrt(p - u * u)
    if u * u + v * v != p:
        raise ConsistencyError(f"two-squares descent failed for {p}")
    return max(u, v), min(u, v)


def _four_squares_smallest(n: int) -> tuple[int, int, int, int]:
    a_min = (_least_root(n, 1) + 1) // 2
    for a in range(a_min, math.isqrt(n) + 1):
        r1 = n - a * a
        for b in range(_least_root(r1, 3), min(a, math.isqrt(r1)) + 1):
            r2 = r1 - b * b
            for c in range(_least_root(r2, 2), min(b, math.isqrt(r2)) + 1):
                r3 = r2 - c * c
                d = math.isqrt(r3)
                if d * d == r3:
                    return a, b, c, d
    raise ConsistencyError(f"no four-squares witness for {n}")


def _four_squares_random(n: int) -> tuple[int, int, int, int]:
    m, k = _strip(n, 4)
    rng = random.Random(settings.PRIME_SEED ^ n)
    # parities of (a, b) that make m - a^2 - b^2 = 1 mod 4
    pa, pb = {1: (0, 0), 2: (0, 1), 3: (1, 1)}[m % 4]
    half = math.isqrt(m) // 2
    while True:
        a = 2 * rng.randrange(0, half + 1) + pa
        b = 2 * rng.randrange(0, half + 1) + pb
        r = m - a * a - b * b
        if r <= 0:
            continue
        if r == 1:
            c, d = 1, 0
        elif is_prime(r):
            c, d = two_squares(r)
        else:
            continue
        scale = 1 << k
        out = sorted((scale * a, scale * b, scale * c, scale * d), reverse=True)
        return out[0], out[1], out[2], out[3]


def four_squares(n: int) -> tuple[int, int, int, int]:
    """
    a^2 + b^2 + c^2 + d^2 = n with a >= b >= c >= d >= 0.

    Up to settings.FOUR_SQUARES_EXHAUSTIVE_LIMIT the witness is the
    lexicographically smallest one; above it a seeded randomized descent
    (two random squares, then a prime = 1 mod 4 split by two_squares).
    """
    if n < 0:
        raise UsageError(f"negative integers are not sums of squares: {n}")
    if n <= settings.FOUR_SQUARES_EXHAUSTIVE_LIMIT:
        return _four_squares_smallest(n)
    return _four_squares_random(n)
