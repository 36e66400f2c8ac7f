import multiprocessing

import pytest

from app.arith.family import FamilyBox, FamilyParams
from app.core.config import settings
from app.core.errors import EXIT_OK
from app.jobs.pool import map_ordered
from app.jobs.runner import CONGRUENT_RANKS, run_family, run_known_ranks


def _square(x):
    return x * x


def test_map_ordered_keeps_input_order():
    items = list(range(20))
    assert map_ordered(_square, items, jobs=1) == [x * x for x in items]
    assert map_ordered(_square, items, jobs=3) == [x * x for x in items]


def _worker_settings(_):
    return settings.FACTOR_BUDGET, settings.PRIME_SEED


def test_spawned_workers_see_overrides(monkeypatch):
    monkeypatch.setattr(settings, "FACTOR_BUDGET", 123)
    monkeypatch.setattr(settings, "PRIME_SEED", 99)
    ctx = multiprocessing.get_context("spawn")
    got = map_ordered(_worker_settings, [0, 1, 2], jobs=2, mp_context=ctx)
    assert got == [(123, 99)] * 3


def test_run_family_tally():
    seen = []
    out = run_family(FamilyParams(0, 1, 2), FamilyBox(m_max=20, n_max=10), seen.append, certify=False)
    assert out["members"] == len(seen) == 3
    assert out["certified"] == 0 and out["inconclusive"] == 0
    assert out["status"] == EXIT_OK


@pytest.mark.slow
def test_run_known_ranks():
    seen = []
    out = run_known_ranks(seen.append, height=50)
    assert out["curves"] == len(CONGRUENT_RANKS)
    assert out["mismatches"] == []
    assert all(r["parity_matches"] for r in seen)
