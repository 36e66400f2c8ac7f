# app/arith/diophantine.py

"""
Diophantine sets S = { x in Z^n : exists y in Z^m with P(x, y) = 0 }.

Membership is only semi-decidable, so the search is bounded and the bound
is part of the answer. Witnesses are scanned in max-norm shells k = 0..bound;
inside a shell, tuples go in lexicographic order with each coordinate
running from -k to k. The first hit in that order is the reported witness,
for any worker count.
"""

import itertools
import logging
import re
from dataclasses import dataclass
from enum import Enum

from app.arith.ntheory import four_squares
from app.core.errors import ArityError, ConsistencyError, ParseError, UsageError
from app.jobs.pool import map_ordered, resolve_jobs

log = logging.getLogger("diophantine")

Exps = tuple[int, ...]

# ============================================================
# POLYNOMIALS
# ============================================================

@dataclass(frozen=True)
class IntPolynomial:
    arity: int
    terms: tuple[tuple[int, Exps], ...]  # sorted by exponent vector, no zero coefficients

    @classmethod
    def from_dict(cls, arity: int, coeffs: dict[Exps, int]) -> "IntPolynomial":
        for exps in coeffs:
            if len(exps) != arity or any(e < 0 for e in exps):
                raise UsageError(f"bad exponent vector {exps} for arity {arity}")
        terms = tuple((c, e) for e, c in sorted(coeffs.items()) if c != 0)
        return cls(arity, terms)

    @classmethod
    def zero(cls, arity: int) -> "IntPolynomial":
        return cls(arity, ())

    def as_dict(self) -> dict[Exps, int]:
        return {e: c for c, e in self.terms}

    def partial(self, prefix: tuple[int, ...]) -> "IntPolynomial":
        """Substitute the first len(prefix) variables; the rest stay symbolic."""
        k = len(prefix)
        out: dict[Exps, int] = {}
        for c, exps in self.terms:
            v = c
            for x, e in zip(prefix, exps[:k]):
                if e:
                    v *= x ** e
            if v:
                rest = exps[k:]
                out[rest] = out.get(rest, 0) + v
        return IntPolynomial.from_dict(self.arity - k, out)


def eval_poly(poly: IntPolynomial, point: tuple[int, ...]) -> int:
    if len(point) != poly.arity:
        raise ArityError(f"point has {len(point)} coordinates, polynomial arity is {poly.arity}")
    total = 0
    for c, exps in poly.terms:
        v = c
        for x, e in zip(point, exps):
            if e:
                v *= x ** e
        total += v
    return total

# ============================================================
# TEXT SYNTAX
# ============================================================

_TOKEN = re.compile(r"(?P<num>\d+)|(?P<var>[xy])(?P<idx>\d+)|(?P<op>[-+*^()])")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = pos
        if m.group("num") is not None:
            out.append(("num", int(m.group("num")), start))
        elif m.group("var") is not None:
            idx = int(m.group("idx"))
            if idx < 1:
                raise ParseError("variable indices start at 1", start)
            out.append(("var", (m.group("var"), idx), start))
        else:
            out.append(("op", m.group("op"), start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


def _p_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + sign * c
    return {e: c for e, c in out.items() if c}


def _p_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


class _Parser:
    def __init__(self, text: str, n_params: int, m_witnesses: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.n = n_params
        self.arity = n_params + m_witnesses

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def const(self, c: int) -> dict:
        return {(0,) * self.arity: c} if c else {}

    def expr(self) -> dict:
        acc = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = 1 if self.take()[1] == "+" else -1
            acc = _p_add(acc, self.term(), sign)
        return acc

    def term(self) -> dict:
        acc = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            acc = _p_mul(acc, self.unary())
        return acc

    def unary(self) -> dict:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return inner if val == "+" else {e: -c for e, c in inner.items()}
        return self.power()

    def power(self) -> dict:
        base = self.primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer literal", pos)
            out = self.const(1)
            for _ in range(val):
                out = _p_mul(out, base)
            return out
        return base

    def primary(self) -> dict:
        kind, val, pos = self.take()
        if kind == "num":
            return self.const(val)
        if kind == "var":
            name, idx = val
            if name == "x":
                if idx > self.n:
                    raise ParseError(f"x{idx} exceeds the {self.n} parameter variables", pos)
                slot = idx - 1
            else:
                if idx > self.arity - self.n:
                    raise ParseError(f"y{idx} exceeds the {self.arity - self.n} witness variables", pos)
                slot = self.n + idx - 1
            exps = [0] * self.arity
            exps[slot] = 1
            return {tuple(exps): 1}
        if kind == "op" and val == "(":
            inner = self.expr()
            kind, val, pos = self.take()
            if kind != "op" or val != ")":
                raise ParseError("expected ')'", pos)
            return inner
        raise ParseError("expected a number, variable or '('", pos)


def _count_vars(text: str) -> tuple[int, int]:
    xs = [int(i) for i in re.findall(r"x(\d+)", text)]
    ys = [int(i) for i in re.findall(r"y(\d+)", text)]
    return max(xs, default=0), max(ys, default=0)


def parse_polynomial(text: str, n_params: int | None = None, m_witnesses: int | None = None) -> IntPolynomial:
    """
    Integer coefficients, variables x1..xN (parameters) and y1..yM (witnesses),
    operators + - * ^ and parentheses, usual precedence. Unspecified counts
    are taken from the highest index that occurs.
    """
    nx, my = _count_vars(text)
    n = nx if n_params is None else n_params
    m = my if m_witnesses is None else m_witnesses
    p = _Parser(text, n, m)
    coeffs = p.expr()
    kind, _, pos = p.take()
    if kind != "end":
        raise ParseError("unexpected trailing input", pos)
    return IntPolynomial.from_dict(n + m, coeffs)

# ============================================================
# SETS AND MEMBERSHIP
# ============================================================

class MembershipStatus(str, Enum):
    MEMBER = "member-with-witness"
    NO_WITNESS = "no-witness-within-bound"


@dataclass(frozen=True)
class DiophantineSet:
    poly: IntPolynomial
    n_params: int
    m_witnesses: int
    name: str = ""

    def __post_init__(self):
        if self.n_params < 1 or self.m_witnesses < 0:
            raise UsageError("a Diophantine set needs n_params >= 1 and m_witnesses >= 0")
        if self.n_params + self.m_witnesses != self.poly.arity:
            raise ArityError(
                f"n_params + m_witnesses = {self.n_params + self.m_witnesses} but polynomial arity is {self.poly.arity}"
            )


@dataclass(frozen=True)
class MembershipResult:
    status: MembershipStatus
    witness: tuple[int, ...] | None
    bound_used: int
    note: str | None = None

    @property
    def is_member(self) -> bool:
        return self.status is MembershipStatus.MEMBER


def set_from_text(text: str, n_params: int | None = None, m_witnesses: int | None = None, name: str = "") -> DiophantineSet:
    poly = parse_polynomial(text, n_params, m_witnesses)
    n = _count_vars(text)[0] if n_params is None else n_params
    return DiophantineSet(poly, n, poly.arity - n, name)


def _shell_slice(poly: IntPolynomial, m: int, k: int, first: int) -> tuple[int, ...] | None:
    """First zero of poly (witness variables only) in shell k whose first coordinate is `first`."""
    rest_range = range(-k, k + 1)
    on_shell = abs(first) == k
    sub = poly.partial((first,))
    for rest in itertools.product(rest_range, repeat=m - 1):
        if not on_shell and max(map(abs, rest), default=0) != k:
            continue
        if eval_poly(sub, rest) == 0:
            return (first,) + rest
    return None


def member_search(S: DiophantineSet, params: tuple[int, ...], bound: int, jobs: int | None = None) -> MembershipResult:
    if len(params) != S.n_params:
        raise ArityError(f"expected {S.n_params} parameters, got {len(params)}")
    if bound < 0:
        raise UsageError(f"bound must be >= 0, got {bound}")

    wpoly = S.poly.partial(tuple(params))
    m = S.m_witnesses
    if m == 0:
        if eval_poly(wpoly, ()) == 0:
            return MembershipResult(MembershipStatus.MEMBER, (), 0)
        return MembershipResult(MembershipStatus.NO_WITNESS, None, bound, "no witness variables: P(params) != 0")

    jobs = resolve_jobs(jobs)
    for k in range(bound + 1):
        firsts = range(-k, k + 1)
        if jobs > 1 and k > 0:
            hits = map_ordered(_shell_slice, [(wpoly, m, k, f) for f in firsts], jobs)
            hit = next((h for h in hits if h is not None), None)
        else:
            hit = None
            for f in firsts:
                hit = _shell_slice(wpoly, m, k, f)
                if hit is not None:
                    break
        if hit is not None:
            log.debug(f"witness {hit} for {S.name or 'set'} params={params} in shell {k}")
            return MembershipResult(MembershipStatus.MEMBER, hit, bound)

    return MembershipResult(MembershipStatus.NO_WITNESS, None, bound)

# ============================================================
# CATALOG
# ============================================================

def four_squares_set() -> DiophantineSet:
    poly = parse_polynomial("x1 - y1^2 - y2^2 - y3^2 - y4^2", 1, 4)
    return DiophantineSet(poly, 1, 4, "nonneg")


def pell_set() -> DiophantineSet:
    # (a, x, y) with x^2 - (a^2 - 1) y^2 = 1, no witnesses
    poly = parse_polynomial("x2^2 - (x1^2 - 1)*x3^2 - 1", 3, 0)
    return DiophantineSet(poly, 3, 0, "pell")


def square_divides_set() -> DiophantineSet:
    # (u, v) with u^2 * t = v for some t
    poly = parse_polynomial("x2 - x1^2*y1", 2, 1)
    return DiophantineSet(poly, 2, 1, "square-divides")


NAMED_SETS = {
    "nonneg": four_squares_set,
    "pell": pell_set,
    "square-divides": square_divides_set,
}


def nonneg_witness(n: int) -> MembershipResult:
    """Membership in Z>=0 through the four-squares polynomial, witness from Lagrange's theorem."""
    if n < 0:
        return MembershipResult(
            MembershipStatus.NO_WITNESS, None, 0,
            "negative: a sum of four squares is never negative, so no bound finds a witness",
        )
    w = four_squares(n)
    S = four_squares_set()
    if eval_poly(S.poly, (n,) + w) != 0:
        raise ConsistencyError(f"four-squares witness {w} does not re-sum to {n}")
    return MembershipResult(MembershipStatus.MEMBER, w, max(w))

# ============================================================
# FIBONACCI
# ============================================================

def fibonacci_pair(n: int) -> tuple[int, int]:
    """(F_n, F_{n+1}) by fast doubling."""
    if n < 0:
        raise UsageError(f"index must be non-negative, got {n}")
    a, b = 0, 1
    for bit in bin(n)[2:]:
        c = a * (2 * b - a)
        d = a * a + b * b
        a, b = (d, c + d) if bit == "1" else (c, d)
    return a, b


def fibonacci(n: int) -> int:
    return fibonacci_pair(n)[0]
