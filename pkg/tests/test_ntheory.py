from fractions import Fraction

import pytest

from app.arith.ntheory import (
    factorize,
    format_rat,
    four_squares,
    is_padic_square,
    is_prime,
    jacobi,
    parse_rat,
    pollard_rho,
    primes_up_to,
    squarefree_class,
    squarefree_part,
    two_squares,
    valuation,
)
from app.core.errors import IncompleteFactorizationError, UsageError, ZeroInputError


def _slow_prime(n):
    return n > 1 and all(n % d for d in range(2, int(n ** 0.5) + 1))


def test_primes_up_to_small():
    assert primes_up_to(30) == (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)
    assert primes_up_to(1) == ()


def test_is_prime_matches_trial_division():
    for n in range(-5, 3000):
        assert is_prime(n) == _slow_prime(n), n


@pytest.mark.parametrize("n, expected", [
    (561, False),                      # carmichael
    (2 ** 61 - 1, True),
    (2 ** 64 - 59, True),              # largest 64-bit prime
    (2 ** 89 - 1, True),               # above 2^64: seeded rounds
    ((2 ** 61 - 1) * (2 ** 31 - 1), False),
])
def test_is_prime_large(n, expected):
    assert is_prime(n) is expected


def test_factorize_reconstructs():
    n = -(2 ** 3) * 3 * 5 ** 2 * 1_000_000_007 * 998_244_353
    f = factorize(n)
    assert f.complete
    assert f.sign == -1
    assert dict(f.factors) == {2: 3, 3: 1, 5: 2, 998_244_353: 1, 1_000_000_007: 1}
    assert f.value() == n


def test_factorize_budget_exhausted():
    n = 1_000_003 * 1_000_033
    f = factorize(n, effort=0)
    assert not f.complete
    assert f.cofactor == n
    assert f.value() == n


def test_factorize_zero():
    with pytest.raises(ZeroInputError):
        factorize(0)


def test_pollard_rho_divisor():
    d = pollard_rho(8051, 10_000)
    assert d in (83, 97)


def test_squarefree():
    assert squarefree_part(-72) == (-2, 6)
    assert squarefree_class(Fraction(-4)) == -1
    assert squarefree_class(Fraction(18, 7)) == 14
    with pytest.raises(ZeroInputError):
        squarefree_class(0)


def test_squarefree_part_raises_when_incomplete(monkeypatch):
    from app.core.config import settings

    monkeypatch.setattr(settings, "FACTOR_BUDGET", 0)
    with pytest.raises(IncompleteFactorizationError):
        squarefree_part(1_000_003 * 1_000_033)


def test_valuation():
    assert valuation(Fraction(12, 5), 2) == 2
    assert valuation(Fraction(12, 5), 5) == -1
    with pytest.raises(ZeroInputError):
        valuation(0, 3)


def test_jacobi_matches_euler_criterion():
    for p in primes_up_to(60)[1:]:
        for a in range(p):
            e = pow(a, (p - 1) // 2, p)
            assert jacobi(a, p) == (e if e <= 1 else -1)


@pytest.mark.parametrize("r, p, expected", [
    (17, 2, True),
    (3, 2, False),
    (2, 2, False),
    (68, 2, True),
    (Fraction(1, 4), 2, True),
    (2, 7, True),
    (3, 7, False),
    (7, 7, False),
    (-1, 5, True),
    (-1, 3, False),
])
def test_is_padic_square(r, p, expected):
    assert is_padic_square(r, p) is expected


def test_two_squares():
    assert two_squares(2) == (1, 1)
    assert two_squares(13) == (3, 2)
    for p in primes_up_to(2000):
        if p % 4 == 1:
            u, v = two_squares(p)
            assert u * u + v * v == p
    with pytest.raises(UsageError):
        two_squares(7)


def test_four_squares_smallest():
    assert four_squares(0) == (0, 0, 0, 0)
    assert four_squares(1) == (1, 0, 0, 0)
    assert four_squares(7) == (2, 1, 1, 1)
    for n in range(2000):
        a, b, c, d = four_squares(n)
        assert a >= b >= c >= d >= 0
        assert a * a + b * b + c * c + d * d == n


def test_four_squares_randomized_path():
    for n in (10 ** 12 + 39, 4 ** 5 * (10 ** 9 + 7), 2 * 10 ** 15 + 2):
        w = four_squares(n)
        assert sum(x * x for x in w) == n
        assert list(w) == sorted(w, reverse=True)
    with pytest.raises(UsageError):
        four_squares(-1)


def test_rat_strings():
    assert parse_rat("-6/4") == Fraction(-3, 2)
    assert parse_rat(" 5 ") == 5
    assert format_rat(Fraction(-3, 2)) == "-3/2"
    assert format_rat(Fraction(8, 4)) == "2"
    with pytest.raises(UsageError):
        parse_rat("3/0")
    with pytest.raises(UsageError):
        parse_rat("x")


def test_gcd_examples():
    from app.arith.ntheory import gcd

    assert gcd(12, 18) == 6
    assert gcd(0, 0) == 0
    assert gcd(2 ** 64 + 1, 3) == 1
    rng = __import__("random").Random(5)
    for _ in range(200):
        a, b = rng.randint(-10 ** 9, 10 ** 9), rng.randint(1, 10 ** 6)
        g = gcd(a, b)
        assert a % g == 0 and b % g == 0
        c = rng.randint(1, 50)
        assert gcd(a * c, b * c) % c == 0


@pytest.mark.parametrize("n, sign, factors", [
    (360, 1, ((2, 3), (3, 2), (5, 1))),
    (-7, -1, ((7, 1),)),
    (10403, 1, ((101, 1), (103, 1))),
    (1, 1, ()),
])
def test_factorize_examples(n, sign, factors):
    f = factorize(n)
    assert f.complete and f.sign == sign and f.factors == factors


def test_factorize_round_trip_random():
    import random

    rng = random.Random(3)
    for _ in range(60):
        n = rng.randint(2, 10 ** 12)
        f = factorize(n)
        assert f.complete and f.value() == n
        assert list(f.primes) == sorted(set(f.primes))
        assert all(is_prime(p) for p in f.primes)


@pytest.mark.parametrize("n, expected", [(18, (2, 3)), (-4, (-1, 2)), (3600, (1, 60))])
def test_squarefree_part_examples(n, expected):
    assert squarefree_part(n) == expected


def test_squarefree_part_invariant():
    for n in range(-500, 501):
        if n == 0:
            continue
        s, t = squarefree_part(n)
        assert s * t * t == n
        assert all(abs(s) % (d * d) for d in range(2, 101))


@pytest.mark.parametrize("a, n, expected", [(1, 3, 1), (2, 15, 1), (3, 9, 0)])
def test_jacobi_examples(a, n, expected):
    assert jacobi(a, n) == expected


def test_is_padic_square_matches_exhaustive_residues():
    for p in primes_up_to(50):
        k = 6 if p == 2 else 3
        mod = p ** k
        squares = {x * x % mod for x in range(mod) if x % p}
        for num in range(-40, 41):
            for den in range(1, 11):
                if num == 0:
                    continue
                r = Fraction(num, den)
                v = valuation(r, p)
                unit = r.numerator * r.denominator // p ** (valuation(r.numerator, p) + valuation(r.denominator, p))
                expected = v % 2 == 0 and unit % mod in squares
                assert is_padic_square(r, p) is expected, (r, p)


def test_four_squares_310_and_range():
    w = four_squares(310)
    assert sum(x * x for x in w) == 310
    for n in range(10 ** 4, 10 ** 4 + 500):
        assert sum(x * x for x in four_squares(n)) == n
