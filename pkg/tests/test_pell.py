import pytest

from app.arith.pell import (
    divisibility_report,
    enumerate_solutions_below,
    pell_sequence,
    pell_term,
    stated_form_counterexamples,
    verify_pell,
)
from app.core.errors import UsageError


def test_sequence_a2():
    rows = [(s.x, s.y) for s in pell_sequence(2, 3)]
    assert rows == [(1, 0), (2, 1), (7, 4), (26, 15)]


def test_pell_term_matches_recurrence():
    seq = pell_sequence(5, 40)
    for s in seq:
        assert pell_term(5, s.index) == s


def test_enumeration_below():
    assert enumerate_solutions_below(2, 100) == [(2, 1), (7, 4), (26, 15), (97, 56)]


def test_rejects_bad_inputs():
    with pytest.raises(UsageError):
        pell_sequence(1, 3)
    with pytest.raises(UsageError):
        pell_term(3, -1)
    with pytest.raises(UsageError):
        divisibility_report(2, 0, 4)


def test_divisibility_report():
    rep = divisibility_report(2, 2, 8)
    assert (rep.y_m, rep.y_n) == (4, 10864)
    assert rep.ymsq_divides_yn and rep.ym_divides_n and rep.m_ym_divides_n
    assert rep.quotient_t == 679
    assert rep.classical_law_holds and rep.stated_law_holds


def test_stated_form_fails_at_2_2_4():
    rep = divisibility_report(2, 2, 4)
    assert rep.ym_divides_n and not rep.ymsq_divides_yn
    assert rep.quotient_t is None
    assert not rep.stated_law_holds
    assert rep.classical_law_holds
    assert (2, 2, 4) in stated_form_counterexamples(2, 2, 4)


@pytest.mark.slow
def test_pell_suite():
    for a in range(2, 11):
        seq = pell_sequence(a, 100)
        assert all(verify_pell(a, s.x, s.y) for s in seq)
        known = {(s.x, s.y) for s in seq}
        assert set(enumerate_solutions_below(a, 10 ** 4)) <= known


@pytest.mark.slow
def test_classical_divisibility_law():
    bad = []
    for a in range(2, 9):
        ys = [s.y for s in pell_sequence(a, 120)]
        for m in range(1, 13):
            for n in range(1, 121):
                if (ys[n] % (ys[m] ** 2) == 0) != (n % (m * ys[m]) == 0):
                    bad.append((a, m, n))
    assert bad == []


def test_index_divisibility():
    for a in range(2, 9):
        ys = [s.y for s in pell_sequence(a, 60)]
        for m in range(1, 13):
            for n in range(1, 61):
                assert (ys[n] % ys[m] == 0) == (n % m == 0), (a, m, n)


@pytest.mark.slow
def test_addition_law():
    for a in range(2, 21):
        d = a * a - 1
        seq = pell_sequence(a, 200)
        for m in range(0, 101):
            xm, ym = seq[m].x, seq[m].y
            for n in range(0, 101):
                xn, yn = seq[n].x, seq[n].y
                assert seq[m + n].x == xm * xn + d * ym * yn, (a, m, n)
                assert seq[m + n].y == xm * yn + ym * xn, (a, m, n)


def test_pell_term_for_every_a():
    for a in range(2, 21):
        seq = pell_sequence(a, 100)
        for n in (0, 1, 2, 17, 64, 99, 100):
            assert pell_term(a, n) == seq[n]
